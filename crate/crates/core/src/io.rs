//! Plain-text formats.
//!
//! * code: `q n`, optional `#` comment lines, one word per line as digits;
//! * partition: `q n0 parts`, then each part as a code block, blocks
//!   separated by `--` lines;
//! * quasigroup: `m order`, then the table on one line, space separated;
//! * component: a code file whose comments carry `mu=`, the layout
//!   `t= l= n0=` and one `sigma=<path>` per block;
//! * assembly manifest: `q m r`, the outer code path, then
//!   `mu=<digits> file=<path>` per component;
//! * decomposition bundle: a directory holding `psi.txt`, `layout.txt`,
//!   `outer.code`, `sigma_<i>.qg`, `component_<mu>.code` and an assembly
//!   manifest `assembly.txt`.
//!
//! Relative paths inside files are resolved against the file's directory.
//! Writers are deterministic: codes are listed in canonical order.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::codespace::{write_digits, BlockLayout, Code, CodeParameters, MonomialTransform, Word};
use crate::combiner::Assembly;
use crate::components::{MollardPhelps, MuComponent, Phelps};
use crate::decomposer::Decomposition;
use crate::error::{Error, Result};
use crate::gfq::FieldTable;
use crate::hamming::{perfect_partition, PerfectPartition};
use crate::quasigroup::{standard_vh_pair, MultaryQuasigroup, SigmaFamily};

/// Content lines with their 1-based numbers; comments kept separately.
struct Lines<'a> {
    body: Vec<(usize, &'a str)>,
    comments: Vec<&'a str>,
}

fn lines(text: &str) -> Lines<'_> {
    let mut body = Vec::new();
    let mut comments = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(c) = line.strip_prefix('#') {
            comments.push(c.trim());
        } else if !line.is_empty() {
            body.push((i + 1, line));
        }
    }
    Lines { body, comments }
}

fn numbers<T: std::str::FromStr>(line: usize, s: &str, count: usize) -> Result<Vec<T>> {
    let v = s
        .split_whitespace()
        .map(|x| x.parse().map_err(|_| Error::parse(line, format!("not a number: {x:?}"))))
        .collect::<Result<Vec<T>>>()?;
    if v.len() != count {
        return Err(Error::parse(line, format!("expected {count} fields, found {}", v.len())));
    }
    Ok(v)
}

fn parse_word(line: usize, s: &str, q: u32) -> Result<Word> {
    Word::parse_digits(s, q).map_err(|e| match e {
        Error::Parse { msg, .. } => Error::parse(line, msg),
        e => e,
    })
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn resolve(base: &Path, rel: &str) -> PathBuf {
    base.parent().unwrap_or(Path::new(".")).join(rel)
}

fn code_from_lines(header: (usize, &str), body: &[(usize, &str)]) -> Result<Code> {
    let hv: Vec<u64> = numbers(header.0, header.1, 2)?;
    let (q, n) = (hv[0] as u32, hv[1] as usize);
    FieldTable::shared(q)?;
    let mut data = Vec::with_capacity(body.len() * n);
    for &(ln, s) in body {
        let w = parse_word(ln, s, q)?;
        if w.len() != n {
            return Err(Error::parse(ln, format!("word has length {}, expected {n}", w.len())));
        }
        data.extend_from_slice(&w);
    }
    Code::from_flat(q, n, data)
}

/// Parses a code file, returning the code and its comment lines.
pub fn parse_code(text: &str) -> Result<(Code, Vec<String>)> {
    let l = lines(text);
    let (&header, body) = l.body.split_first().ok_or_else(|| Error::parse(1, "missing `q n` header"))?;
    let code = code_from_lines(header, body)?;
    Ok((code, l.comments.iter().map(|s| s.to_string()).collect()))
}

pub fn format_code(code: &Code, comments: &[String]) -> String {
    let mut out = format!("{} {}\n", code.q(), code.n());
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    for w in code.iter() {
        let _ = write_digits(&mut out, w);
        out.push('\n');
    }
    out
}

pub fn read_code(path: &Path) -> Result<Code> {
    Ok(parse_code(&read_to_string(path)?)?.0)
}

pub fn write_code(path: &Path, code: &Code) -> Result<()> {
    Ok(fs::write(path, format_code(code, &[]))?)
}

pub fn parse_partition(text: &str) -> Result<PerfectPartition> {
    let l = lines(text);
    let (&(ln, header), rest) = l
        .body
        .split_first()
        .ok_or_else(|| Error::parse(1, "missing `q n0 parts` header"))?;
    let hv: Vec<u64> = numbers(ln, header, 3)?;
    let (q, n0, count) = (hv[0] as u32, hv[1] as usize, hv[2] as usize);
    let mut parts = Vec::new();
    for block in rest.split(|&(_, s)| s == "--") {
        let (&first, body) = block.split_first().ok_or_else(|| Error::parse(ln, "empty part block"))?;
        let part = code_from_lines(first, body)?;
        if part.q() != q || part.n() != n0 {
            return Err(Error::parse(first.0, format!("part is over F_{}^{}", part.q(), part.n())));
        }
        parts.push(part);
    }
    if parts.len() != count {
        return Err(Error::parse(ln, format!("header announces {count} parts, found {}", parts.len())));
    }
    PerfectPartition::new(q, n0, parts)
}

pub fn format_partition(p: &PerfectPartition) -> String {
    let mut out = format!("{} {} {}\n", p.q(), p.n0(), p.parts().len());
    for (i, part) in p.parts().iter().enumerate() {
        if i > 0 {
            out.push_str("--\n");
        }
        out.push_str(&format_code(part, &[]));
    }
    out
}

pub fn parse_quasigroup(text: &str) -> Result<MultaryQuasigroup> {
    let l = lines(text);
    let (&(ln, header), rest) = l
        .body
        .split_first()
        .ok_or_else(|| Error::parse(1, "missing `m order` header"))?;
    let hv: Vec<u64> = numbers(ln, header, 2)?;
    let (m, order) = (hv[0] as usize, hv[1] as u32);
    let expected = (order as usize)
        .checked_pow(m as u32)
        .ok_or_else(|| Error::too_large(format!("{m}-ary table of order {order}")))?;
    let (vln, values) = rest.first().copied().unwrap_or((ln + 1, ""));
    let table: Vec<u8> = numbers(vln, values, expected)?;
    if rest.len() > 1 {
        return Err(Error::parse(rest[1].0, "table must be on a single line"));
    }
    MultaryQuasigroup::new(m, order, table)
}

pub fn format_quasigroup(g: &MultaryQuasigroup) -> String {
    let values: Vec<String> = g.table().iter().map(u8::to_string).collect();
    format!("{} {}\n{}\n", g.arity(), g.order(), values.join(" "))
}

pub fn read_quasigroup(path: &Path) -> Result<MultaryQuasigroup> {
    parse_quasigroup(&read_to_string(path)?)
}

pub fn read_partition(path: &Path) -> Result<PerfectPartition> {
    parse_partition(&read_to_string(path)?)
}

/// Component file text referring to already written sigma files.
pub fn format_component(k: &MuComponent, sigma_paths: &[String]) -> String {
    let lay = k.layout();
    let mut comments = vec![format!("mu={}", k.mu()), format!("t={} l={} n0={}", lay.t, lay.l, lay.n0)];
    comments.extend(sigma_paths.iter().map(|p| format!("sigma={p}")));
    format_code(k.code(), &comments)
}

/// Writes `path` and one `<stem>.sigma<i>.qg` per block next to it.
pub fn write_component(path: &Path, k: &MuComponent) -> Result<()> {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| Error::InvalidParameter(format!("bad component path {}", path.display())))?;
    let mut refs = Vec::new();
    for (i, s) in k.sigma().sigmas().iter().enumerate() {
        let name = format!("{stem}.sigma{}.qg", i + 1);
        fs::write(resolve(path, &name), format_quasigroup(s))?;
        refs.push(name);
    }
    Ok(fs::write(path, format_component(k, &refs))?)
}

pub fn read_component(path: &Path) -> Result<MuComponent> {
    let text = read_to_string(path)?;
    let (code, comments) = parse_code(&text)?;
    let mut mu = None;
    let mut layout = None;
    let mut sigmas = Vec::new();
    for c in &comments {
        if let Some(d) = c.strip_prefix("mu=") {
            mu = Some(parse_word(0, d.trim(), code.q())?);
        } else if let Some(p) = c.strip_prefix("sigma=") {
            sigmas.push(read_quasigroup(&resolve(path, p.trim()))?);
        } else if c.starts_with("t=") {
            let kv = key_values(c);
            let get = |k: &str| -> Result<usize> {
                kv.get(k)
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| Error::parse(0, format!("layout comment lacks {k}=")))
            };
            layout = Some(BlockLayout::new(code.q(), get("t")?, get("l")?, get("n0")?)?);
        }
    }
    let mu = mu.ok_or_else(|| Error::parse(0, "component file lacks `# mu=`"))?;
    let layout = layout.ok_or_else(|| Error::parse(0, "component file lacks `# t= l= n0=`"))?;
    MuComponent::new(code, mu, layout, SigmaFamily::new(sigmas)?)
}

fn key_values(s: &str) -> BTreeMap<&str, &str> {
    s.split_whitespace().filter_map(|kv| kv.split_once('=')).collect()
}

/// Reads an assembly manifest. The sigma family is taken from the
/// component of the smallest profile.
pub fn read_assembly(path: &Path) -> Result<Assembly> {
    let text = read_to_string(path)?;
    let l = lines(&text);
    let mut body = l.body.iter();
    let &(ln, header) = body.next().ok_or_else(|| Error::parse(1, "missing `q m r` header"))?;
    let hv: Vec<u32> = numbers(ln, header, 3)?;
    let layout = CodeParameters::new(hv[0], hv[1], hv[2])?;
    let &(_, outer_path) = body.next().ok_or_else(|| Error::parse(ln + 1, "missing outer code path"))?;
    let outer = read_code(&resolve(path, outer_path))?;
    let mut components = BTreeMap::new();
    for &(ln, line) in body {
        let kv = key_values(line);
        let (Some(mu), Some(file)) = (kv.get("mu"), kv.get("file")) else {
            return Err(Error::parse(ln, "expected `mu=<digits> file=<path>`"));
        };
        let mu = parse_word(ln, mu, layout.q)?;
        let k = read_component(&resolve(path, file))?;
        if components.insert(mu.clone(), k).is_some() {
            return Err(Error::parse(ln, format!("duplicate component for mu={mu}")));
        }
    }
    let sigma = components
        .values()
        .next()
        .map(|k: &MuComponent| k.sigma().clone())
        .ok_or_else(|| Error::parse(ln, "manifest lists no components"))?;
    Ok(Assembly {
        outer,
        components,
        layout,
        sigma,
    })
}

/// Writes `outer.code`, one component file per profile and `assembly.txt`
/// into `dir`.
pub fn write_assembly(dir: &Path, a: &Assembly) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_code(&dir.join("outer.code"), &a.outer)?;
    let sigma_refs = write_sigma_files(dir, &a.sigma)?;
    let p = &a.layout;
    let mut manifest = format!("{} {} {}\nouter.code\n", p.q, p.m, p.r);
    for (mu, k) in &a.components {
        let name = format!("component_{mu}.code");
        let k = MuComponent::new(k.code().clone(), mu.clone(), *k.layout(), a.sigma.clone())?;
        fs::write(dir.join(&name), format_component(&k, &sigma_refs))?;
        let _ = writeln!(manifest, "mu={mu} file={name}");
    }
    Ok(fs::write(dir.join("assembly.txt"), manifest)?)
}

fn write_sigma_files(dir: &Path, sigma: &SigmaFamily) -> Result<Vec<String>> {
    let mut refs = Vec::new();
    for (i, s) in sigma.sigmas().iter().enumerate() {
        let name = format!("sigma_{}.qg", i + 1);
        fs::write(dir.join(&name), format_quasigroup(s))?;
        refs.push(name);
    }
    Ok(refs)
}

pub fn format_psi(psi: &MonomialTransform) -> String {
    let perm: Vec<String> = psi.perm().iter().map(usize::to_string).collect();
    let scale: Vec<String> = psi.scale().iter().map(u8::to_string).collect();
    format!("{}\n{}\n", perm.join(" "), scale.join(" "))
}

pub fn parse_psi(text: &str) -> Result<MonomialTransform> {
    let l = lines(text);
    if l.body.len() != 2 {
        return Err(Error::parse(1, "expected a permutation line and a scale line"));
    }
    let (pl, perm) = l.body[0];
    let (sl, scale) = l.body[1];
    let n = perm.split_whitespace().count();
    MonomialTransform::new(numbers(pl, perm, n)?, numbers(sl, scale, n)?)
}

/// Writes a decomposition bundle; see the module documentation.
pub fn write_decomposition(dir: &Path, d: &Decomposition) -> Result<()> {
    write_assembly(dir, &d.to_assembly())?;
    fs::write(dir.join("psi.txt"), format_psi(&d.psi))?;
    fs::write(dir.join("layout.txt"), format!("{}\n", d.layout))?;
    Ok(())
}

fn manifest_entries(text: &str) -> Vec<(usize, &str, &str)> {
    lines(text)
        .body
        .into_iter()
        .filter_map(|(ln, s)| s.split_once('=').map(|(k, v)| (ln, k.trim(), v.trim())))
        .collect()
}

fn single<'a>(entries: &[(usize, &str, &'a str)], key: &str) -> Result<&'a str> {
    let mut found = entries.iter().filter(|e| e.1 == key);
    match (found.next(), found.next()) {
        (Some(e), None) => Ok(e.2),
        (None, _) => Err(Error::parse(0, format!("manifest lacks `{key}=`"))),
        (Some(_), Some(e)) => Err(Error::parse(e.0, format!("`{key}=` given twice"))),
    }
}

fn all<'a>(entries: &[(usize, &str, &'a str)], key: &str) -> Vec<&'a str> {
    entries.iter().filter(|e| e.1 == key).map(|e| e.2).collect()
}

/// `sum` or a quasigroup file.
fn quasigroup_value(path: &Path, value: &str, field: &FieldTable, arity: usize) -> Result<MultaryQuasigroup> {
    match value {
        "sum" => MultaryQuasigroup::sum(field, arity),
        p => read_quasigroup(&resolve(path, p)),
    }
}

fn vh_values(path: &Path, entries: &[(usize, &str, &str)], field: &FieldTable) -> Result<(MultaryQuasigroup, MultaryQuasigroup)> {
    let (v, h) = (single(entries, "v")?, single(entries, "h")?);
    let (sv, sh) = standard_vh_pair(field)?;
    let v = if v == "standard" { sv } else { read_quasigroup(&resolve(path, v))? };
    let h = if h == "standard" { sh } else { read_quasigroup(&resolve(path, h))? };
    Ok((v, h))
}

/// Inputs of a component build read from a `key=value` manifest.
#[derive(Debug, Clone)]
pub struct ComponentManifest<T> {
    pub q: u32,
    pub mu: Word,
    pub inputs: T,
}

/// Mollard-Phelps manifest keys: `q`, `mu`, `csharp` (code file), `v` and
/// `h` (file or `standard`), one `V` per block and one `H` per coordinate
/// of `csharp` (file or `sum`).
pub fn read_mollard_phelps_manifest(path: &Path) -> Result<ComponentManifest<MollardPhelps>> {
    let text = read_to_string(path)?;
    let e = manifest_entries(&text);
    let q: u32 = single(&e, "q")?.parse().map_err(|_| Error::parse(0, "bad q"))?;
    let field = FieldTable::shared(q)?;
    let mu = parse_word(0, single(&e, "mu")?, q)?;
    let csharp = read_code(&resolve(path, single(&e, "csharp")?))?;
    let (v, h) = vh_values(path, &e, field)?;
    let k = csharp.n();
    let big_v = all(&e, "V");
    let t = big_v.len();
    let vertical = big_v
        .iter()
        .map(|s| quasigroup_value(path, s, field, k + 1))
        .collect::<Result<_>>()?;
    let horizontal = all(&e, "H")
        .iter()
        .map(|s| quasigroup_value(path, s, field, t + 1))
        .collect::<Result<_>>()?;
    Ok(ComponentManifest {
        q,
        mu,
        inputs: MollardPhelps {
            csharp,
            v,
            h,
            vertical,
            horizontal,
        },
    })
}

/// Generalized Phelps manifest keys: `q`, `k`, `mu`, `v`, `h`, one `V` per
/// block, `t + 1` `partition` entries (file or `coset`) and `Q` (file or
/// `sum`).
pub fn read_phelps_manifest(path: &Path) -> Result<ComponentManifest<Phelps>> {
    let text = read_to_string(path)?;
    let e = manifest_entries(&text);
    let q: u32 = single(&e, "q")?.parse().map_err(|_| Error::parse(0, "bad q"))?;
    let k: usize = single(&e, "k")?.parse().map_err(|_| Error::parse(0, "bad k"))?;
    let field = FieldTable::shared(q)?;
    let mu = parse_word(0, single(&e, "mu")?, q)?;
    let (v, h) = vh_values(path, &e, field)?;
    let big_v = all(&e, "V");
    let t = big_v.len();
    let vertical = big_v
        .iter()
        .map(|s| quasigroup_value(path, s, field, k + 1))
        .collect::<Result<_>>()?;
    let partitions = all(&e, "partition")
        .iter()
        .map(|s| match *s {
            "coset" => perfect_partition(q, k),
            p => read_partition(&resolve(path, p)),
        })
        .collect::<Result<_>>()?;
    let selector = match single(&e, "Q")? {
        "sum" => MultaryQuasigroup::sum(FieldTable::shared((q - 1) * k as u32 + 1)?, t)?,
        p => read_quasigroup(&resolve(path, p))?,
    };
    Ok(ComponentManifest {
        q,
        mu,
        inputs: Phelps {
            partitions,
            v,
            h,
            vertical,
            selector,
        },
    })
}
