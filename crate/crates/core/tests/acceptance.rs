//! Acceptance criteria, one line per criterion. Runs without the libtest
//! harness so the summary is printed even when everything passes.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use perfect_codes::census::{generate_assemblies, generate_distinct_codes, lower_bound};
use perfect_codes::codespace::{is_perfect, rank, Code, CodeParameters, Word};
use perfect_codes::combiner::{assembly_rank_bound_check, combine, Assembly};
use perfect_codes::components::{
    build_mollard_phelps, build_mollard_phelps_with, build_phelps_with, component_shift, BuildStrategy,
    MollardPhelps, MuComponent, Phelps,
};
use perfect_codes::decomposer::{decompose, decomposition_verify, Decomposition};
use perfect_codes::gfq::FieldTable;
use perfect_codes::hamming::{hamming_code, perfect_partition};
use perfect_codes::quasigroup::{qg_count, standard_vh_pair, MultaryQuasigroup, QuasigroupStream, SigmaFamily};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn field(q: u32) -> &'static FieldTable {
    FieldTable::shared(q).unwrap()
}

fn pow(q: u32, e: usize) -> usize {
    (q as usize).pow(e as u32)
}

fn criterion_1() -> Outcome {
    let mut slowest = Duration::ZERO;
    for (q, m) in [(2, 3), (2, 4), (3, 2), (3, 3), (4, 2), (5, 2)] {
        let start = Instant::now();
        let c = hamming_code(q, m).map_err(|e| e.to_string())?;
        let perfect = is_perfect(&c).map_err(|e| e.to_string())?;
        let took = start.elapsed();
        ensure!(perfect.is_perfect(), "hamming({q},{m}) not perfect: {:?}", perfect.certificate());
        ensure!(took < Duration::from_secs(10), "hamming({q},{m}) took {took:?}");
        slowest = slowest.max(took);
    }
    Ok(format!("6 Hamming codes perfect, slowest check {slowest:?}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    for m in 1..=3 {
        let c = qg_count(m, 3).map_err(|e| e.to_string())?;
        ensure!(c == 3 << m, "Q({m},3) = {c}");
    }
    for m in 1..=6 {
        let c = qg_count(m, 2).map_err(|e| e.to_string())?;
        ensure!(c == 2, "Q({m},2) = {c}");
    }
    let six = qg_count(1, 6).map_err(|e| e.to_string())?;
    ensure!(six == 720, "Q(1,6) = {six}");
    // Q(1,2) * Q(1,3)^2
    ensure!(six >= 2 * 6 * 6, "Q(1,6) below 72");
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(60), "counting took {took:?}");
    Ok(format!("Q(m,3)=6,12,24; Q(m,2)=2 for m<=6; Q(1,6)=720 in {took:?}"))
}

fn distinct_perfect(codes: &[Code], n: usize, expected: usize) -> Result<(), String> {
    ensure!(codes.len() == expected, "n={n}: {} codes, expected {expected}", codes.len());
    for c in codes {
        let check = is_perfect(c).map_err(|e| e.to_string())?;
        ensure!(check.is_perfect(), "n={n}: generated code not perfect");
    }
    let set: BTreeSet<&Code> = codes.iter().collect();
    ensure!(set.len() == codes.len(), "n={n}: duplicate codes");
    Ok(())
}

fn criterion_3() -> Outcome {
    for (n, q) in [(7, 2), (4, 3)] {
        let bound = lower_bound(n, q).map_err(|e| e.to_string())?.bound;
        let codes = generate_distinct_codes(n, q, None).map_err(|e| e.to_string())?;
        let expected = if q == 2 { 4 } else { 6 };
        ensure!(bound == BigUint::from(expected as u32), "lower_bound({n},{q}) = {bound}");
        distinct_perfect(&codes, n, expected)?;
    }
    Ok("4 codes at (7,2) and 6 at (4,3), all perfect and distinct, equal to the bound".into())
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let assemblies = generate_assemblies(13, 3, Some(20)).map_err(|e| e.to_string())?;
    let build = start.elapsed();
    ensure!(assemblies.len() == 20, "{} assemblies", assemblies.len());
    let mut slowest = Duration::ZERO;
    let mut codes = Vec::new();
    for a in &assemblies {
        ensure!(a.components.len() == 9, "{} components", a.components.len());
        let t = Instant::now();
        let c = combine(a).map_err(|e| e.to_string())?;
        // independent covering recheck of the union
        let check = is_perfect(&c).map_err(|e| e.to_string())?;
        slowest = slowest.max(t.elapsed());
        ensure!(check.is_perfect(), "union not perfect");
        ensure!(c.len() == 59049, "|C| = {}", c.len());
        codes.push(c);
    }
    let set: BTreeSet<&Code> = codes.iter().collect();
    ensure!(set.len() == 20, "only {} distinct codes", set.len());
    // component builds are shared between assemblies; charge them all to each code
    let per_code = build + slowest;
    ensure!(per_code < Duration::from_secs(60), "build+verify {per_code:?}");
    Ok(format!(
        "20 distinct perfect codes of 59049 words; components {build:?}, slowest combine+verify {slowest:?}"
    ))
}

fn binary_mp(c: u8) -> MollardPhelps {
    let id = MultaryQuasigroup::permutation(&[0, 1]).unwrap();
    MollardPhelps {
        csharp: Code::new(2, 1, [[c]]).unwrap(),
        v: id.clone(),
        h: id,
        vertical: vec![MultaryQuasigroup::sum(field(2), 2).unwrap(); 3],
        horizontal: vec![MultaryQuasigroup::sum(field(2), 4).unwrap()],
    }
}

/// Perfect code of length 7 whose mu = 111 component is a shifted
/// component of another construction; it misses the zero word.
fn shifted_assembly() -> Assembly {
    let mu0 = Word::parse_digits("000", 2).unwrap();
    let mu1 = Word::parse_digits("111", 2).unwrap();
    let k0 = build_mollard_phelps(&mu0, &binary_mp(1), field(2)).unwrap();
    let foreign = build_mollard_phelps(&mu0, &binary_mp(0), field(2)).unwrap();
    let k1 = component_shift(&foreign, &mu1).unwrap();
    Assembly::new(
        hamming_code(2, 2).unwrap(),
        [k0, k1],
        CodeParameters::new(2, 3, 2).unwrap(),
        SigmaFamily::block_sums(field(2), 3, 2).unwrap(),
    )
}

fn corpus() -> Vec<(&'static str, Code)> {
    let nonlinear = combine(&shifted_assembly()).unwrap();
    vec![
        ("Hamming(2,3)", hamming_code(2, 3).unwrap()),
        ("Hamming(3,2)", hamming_code(3, 2).unwrap()),
        ("shifted n=7", nonlinear),
    ]
}

fn admissible(c: &Code) -> Vec<u32> {
    let m = perfect_codes::codespace::perfect_length_exponent(c.q(), c.n()).unwrap();
    let max = (c.n() - rank(c).unwrap()) as u32;
    (1..m.min(max + 1)).collect()
}

fn decompositions() -> Vec<(String, Code, Decomposition)> {
    let mut out = Vec::new();
    for (name, c) in corpus() {
        for r in admissible(&c) {
            let d = decompose(&c, r).unwrap();
            out.push((format!("{name} r={r}"), c.clone(), d));
        }
    }
    out
}

fn criterion_5() -> Outcome {
    let (_, nonlinear) = &corpus()[2];
    ensure!(!nonlinear.contains(&[0; 7]), "shifted code contains the zero word");
    let mut cases = Vec::new();
    for (name, c, d) in decompositions() {
        let check = decomposition_verify(&d, &c, 0).map_err(|e| e.to_string())?;
        ensure!(check.is_valid(), "{name}: {}", check.certificate().unwrap());
        let image = d.psi.apply(&c).map_err(|e| e.to_string())?;
        let back = combine(&d.to_assembly()).map_err(|e| e.to_string())?;
        ensure!(back == image, "{name}: combine differs from psi(C)");
        cases.push(name);
    }
    ensure!(cases.len() == 5, "{} cases: {cases:?}", cases.len());
    Ok(format!("round trips exact for {}", cases.join(", ")))
}

fn cardinalities(a: &Assembly, what: &str) -> Result<(), String> {
    let p = &a.layout;
    let (q, n, m, t, r) = (p.q, p.n, p.m as usize, p.t, p.r as usize);
    ensure!(a.outer.len() == pow(q, t - r), "{what}: |C*| = {}", a.outer.len());
    let mut total = 0;
    for k in a.components.values() {
        ensure!(
            k.code().len() == pow(q, n - m - (t - r)),
            "{what}: |K| = {}",
            k.code().len()
        );
        total += k.code().len();
    }
    ensure!(total == pow(q, n - m), "{what}: sum |K| = {total}");
    Ok(())
}

fn criterion_6() -> Outcome {
    let mut checked = 0;
    for (name, _, d) in decompositions() {
        cardinalities(&d.to_assembly(), &name)?;
        checked += 1;
    }
    for (n, q, limit) in [(7, 2, None), (4, 3, None), (13, 3, Some(20))] {
        for a in generate_assemblies(n, q, limit).map_err(|e| e.to_string())? {
            cardinalities(&a, &format!("generated n={n} q={q}"))?;
            checked += 1;
        }
    }
    cardinalities(&shifted_assembly(), "shifted")?;
    checked += 1;
    Ok(format!("{checked} decompositions and assemblies"))
}

fn criterion_7() -> Outcome {
    let mut assemblies: Vec<(String, Assembly)> = Vec::new();
    for a in generate_assemblies(7, 2, None).map_err(|e| e.to_string())? {
        assemblies.push(("n=7 generated".into(), a));
    }
    assemblies.push(("n=7 shifted".into(), shifted_assembly()));
    let big = generate_assemblies(13, 3, Some(20)).map_err(|e| e.to_string())?;
    // swap: replace one component by the shift of another profile's component
    // taken from a different assembly
    let mut swapped = big[0].clone();
    let keys: Vec<Word> = swapped.components.keys().cloned().collect();
    let donor = component_shift(&big[19].components[&keys[1]], &keys[0]).map_err(|e| e.to_string())?;
    swapped.components.insert(keys[0].clone(), donor);
    for a in big {
        assemblies.push(("n=13 generated".into(), a));
    }
    assemblies.push(("n=13 swapped".into(), swapped));

    let mut worst = Vec::new();
    for (name, a) in &assemblies {
        ensure!(a.layout.r == 2, "{name}: r = {}", a.layout.r);
        let b = assembly_rank_bound_check(a).map_err(|e| format!("{name}: {e}"))?;
        ensure!(b.holds(), "{name}: rank {} > {}", b.rank, b.bound);
        worst.push(b.rank);
    }
    Ok(format!(
        "{} assemblies, ranks {:?} against bounds 5 and 11",
        assemblies.len(),
        worst.iter().collect::<BTreeSet<_>>()
    ))
}

fn same(a: MuComponent, b: MuComponent, what: &str) -> Result<(), String> {
    ensure!(a == b, "{what}: filter and solver differ");
    Ok(())
}

fn criterion_8() -> Outcome {
    let mut combos = 0;
    // q = 2, k = 1, t = 3
    let binary: Vec<MultaryQuasigroup> = QuasigroupStream::new(2, 2).unwrap().collect();
    let four_ary: Vec<MultaryQuasigroup> = QuasigroupStream::new(4, 2).unwrap().collect();
    let three_ary: Vec<MultaryQuasigroup> = QuasigroupStream::new(3, 2).unwrap().collect();
    let id = MultaryQuasigroup::permutation(&[0, 1]).unwrap();
    for vs in 0..8usize {
        let vertical: Vec<_> = (0..3).map(|i| binary[vs >> i & 1].clone()).collect();
        for m in 0..8u8 {
            let mu = Word::new(vec![m >> 2 & 1, m >> 1 & 1, m & 1]);
            for c in 0..2u8 {
                for hq in &four_ary {
                    let inputs = MollardPhelps {
                        csharp: Code::new(2, 1, [[c]]).unwrap(),
                        v: id.clone(),
                        h: id.clone(),
                        vertical: vertical.clone(),
                        horizontal: vec![hq.clone()],
                    };
                    let f = build_mollard_phelps_with(&mu, &inputs, field(2), BuildStrategy::Filter);
                    let s = build_mollard_phelps_with(&mu, &inputs, field(2), BuildStrategy::Solve);
                    same(f.unwrap(), s.unwrap(), "binary Mollard-Phelps")?;
                    combos += 1;
                }
            }
            for g in &three_ary {
                let inputs = Phelps {
                    partitions: vec![perfect_partition(2, 1).unwrap(); 4],
                    v: id.clone(),
                    h: id.clone(),
                    vertical: vertical.clone(),
                    selector: g.clone(),
                };
                let f = build_phelps_with(&mu, &inputs, field(2), BuildStrategy::Filter);
                let s = build_phelps_with(&mu, &inputs, field(2), BuildStrategy::Solve);
                same(f.unwrap(), s.unwrap(), "binary Phelps")?;
                combos += 1;
            }
        }
    }
    // q = 3, k = 1, t = 1
    let f3 = field(3);
    let (v, h) = standard_vh_pair(f3).unwrap();
    let latin: Vec<MultaryQuasigroup> = QuasigroupStream::new(2, 3).unwrap().collect();
    let perms: Vec<MultaryQuasigroup> = QuasigroupStream::new(1, 3).unwrap().collect();
    for big_v in &latin {
        for mu in 0..3u8 {
            let mu = Word::new(vec![mu]);
            for c in 0..3u8 {
                for big_h in &latin {
                    let inputs = MollardPhelps {
                        csharp: Code::new(3, 1, [[c]]).unwrap(),
                        v: v.clone(),
                        h: h.clone(),
                        vertical: vec![big_v.clone()],
                        horizontal: vec![big_h.clone()],
                    };
                    let f = build_mollard_phelps_with(&mu, &inputs, f3, BuildStrategy::Filter);
                    let s = build_mollard_phelps_with(&mu, &inputs, f3, BuildStrategy::Solve);
                    same(f.unwrap(), s.unwrap(), "ternary Mollard-Phelps")?;
                    combos += 1;
                }
            }
            for g in &perms {
                let inputs = Phelps {
                    partitions: vec![perfect_partition(3, 1).unwrap(); 2],
                    v: v.clone(),
                    h: h.clone(),
                    vertical: vec![big_v.clone()],
                    selector: g.clone(),
                };
                let f = build_phelps_with(&mu, &inputs, f3, BuildStrategy::Filter);
                let s = build_phelps_with(&mu, &inputs, f3, BuildStrategy::Solve);
                same(f.unwrap(), s.unwrap(), "ternary Phelps")?;
                combos += 1;
            }
        }
    }
    Ok(format!("{combos} input combinations agree"))
}

fn criterion_9() -> Outcome {
    let b = lower_bound(13, 3).map_err(|e| e.to_string())?;
    let mut expected = BigUint::from(1u32);
    for _ in 0..9 {
        expected *= 48u32;
    }
    ensure!(b.bound == expected, "bound {} != 48^9", b.bound);
    ensure!((b.t, b.q_count, b.r_count) == (4, 48, 9), "t, Q, R = {}, {}, {}", b.t, b.q_count, b.r_count);
    ensure!(b.printed_r == (81, 10), "printed R {:?}", b.printed_r);
    let text = b.to_string();
    ensure!(text.lines().count() == 2 && text.contains("81/10"), "report lacks diagnostic: {text}");
    Ok(format!("bound = {} = 48^9, printed R 81/10 reported", b.bound))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("Hamming perfectness", criterion_1),
        ("exact quasigroup counts", criterion_2),
        ("combining construction at n=7, n=4", criterion_3),
        ("large case q=3 n=13", criterion_4),
        ("decomposition round trip", criterion_5),
        ("cardinality identities", criterion_6),
        ("rank bound", criterion_7),
        ("filter and solver agree", criterion_8),
        ("bound report n=13 q=3", criterion_9),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let label = format!("criterion {} ({name})", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS {label}: {detail} [{:.2?}]", start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL {label}: {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
