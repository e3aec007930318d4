//! Gluing mu-components indexed by an outer perfect code.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::codespace::{is_perfect, rank, Code, CodeParameters, Word};
use crate::components::{verify_against, ComponentCheck, MuComponent};
use crate::error::{Error, Result};
use crate::gfq::FieldTable;
use crate::quasigroup::SigmaFamily;

/// An outer code together with one component per outer word.
///
/// Components are checked against the map key and `sigma`, not against
/// their own recorded profile and law.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assembly {
    pub outer: Code,
    pub components: BTreeMap<Word, MuComponent>,
    pub layout: CodeParameters,
    pub sigma: SigmaFamily,
}

impl Assembly {
    /// Keys each component by its own profile.
    pub fn new(
        outer: Code,
        components: impl IntoIterator<Item = MuComponent>,
        layout: CodeParameters,
        sigma: SigmaFamily,
    ) -> Self {
        let components = components.into_iter().map(|k| (k.mu().clone(), k)).collect();
        Assembly {
            outer,
            components,
            layout,
            sigma,
        }
    }

    /// Structural checks that need no search: shapes, key set, perfect outer code.
    fn check_layout(&self) -> Result<()> {
        let p = &self.layout;
        if self.outer.q() != p.q || self.outer.n() != p.t {
            return Err(Error::LayoutMismatch(format!(
                "outer code is over F_{}^{}, expected F_{}^{}",
                self.outer.q(),
                self.outer.n(),
                p.q,
                p.t
            )));
        }
        if self.sigma.t() != p.t || self.sigma.arity() != p.l || self.sigma.order() != p.q {
            return Err(Error::LayoutMismatch(format!(
                "sigma family has {} {}-ary quasigroups of order {}, layout needs {} {}-ary of order {}",
                self.sigma.t(),
                self.sigma.arity(),
                self.sigma.order(),
                p.t,
                p.l,
                p.q
            )));
        }
        if let Some(cert) = is_perfect(&self.outer)?.certificate() {
            return Err(Error::OuterNotPerfect(cert.clone()));
        }
        for mu in self.outer.iter() {
            if !self.components.contains_key(mu) {
                return Err(Error::LayoutMismatch(format!("no component for mu={}", Word::from(mu))));
            }
        }
        for (mu, k) in &self.components {
            if !self.outer.contains(mu) {
                return Err(Error::LayoutMismatch(format!("mu={mu} is not an outer codeword")));
            }
            if *k.layout() != p.layout() {
                return Err(Error::LayoutMismatch(format!(
                    "component for mu={mu} has layout {}, expected {}",
                    k.layout(),
                    p.layout()
                )));
            }
        }
        Ok(())
    }
}

/// Verifies the assembly and returns the union of its components, which is
/// checked to be perfect before it is returned.
pub fn combine(assembly: &Assembly) -> Result<Code> {
    assembly.check_layout()?;
    let layout = assembly.layout.layout();
    let failures: Vec<(Word, ComponentCheck)> = assembly
        .components
        .par_iter()
        .map(|(mu, k)| (mu.clone(), verify_against(k.code(), &layout, &assembly.sigma, mu)))
        .collect();
    if let Some((mu, ComponentCheck::Invalid(certificate))) = failures.into_iter().find(|(_, c)| !c.is_valid()) {
        return Err(Error::ComponentLawViolation { mu, certificate });
    }
    let p = &assembly.layout;
    let union = Code::union(p.q, p.n, assembly.components.values().map(MuComponent::code))?;
    if let Some(cert) = is_perfect(&union)?.certificate() {
        return Err(Error::NotPerfectResult(cert.clone()));
    }
    Ok(union)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankBound {
    pub rank: usize,
    /// `n - r`.
    pub bound: usize,
}

impl RankBound {
    pub fn holds(&self) -> bool {
        self.rank <= self.bound
    }
}

/// Combines a linear-sigma assembly and compares the rank of the result
/// with `n - r`.
pub fn assembly_rank_bound_check(assembly: &Assembly) -> Result<RankBound> {
    let field = FieldTable::shared(assembly.layout.q)?;
    assembly.sigma.linear_coefficients(field)?;
    let code = combine(assembly)?;
    Ok(RankBound {
        rank: rank(&code)?,
        bound: assembly.layout.n - assembly.layout.r as usize,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::{build_mollard_phelps, component_shift, ComponentCertificate, MollardPhelps};
    use crate::hamming::hamming_code;
    use crate::quasigroup::MultaryQuasigroup;

    fn f2() -> &'static FieldTable {
        FieldTable::shared(2).unwrap()
    }

    fn inputs(c: u8) -> MollardPhelps {
        let id = MultaryQuasigroup::permutation(&[0, 1]).unwrap();
        MollardPhelps {
            csharp: Code::new(2, 1, [[c]]).unwrap(),
            v: id.clone(),
            h: id,
            vertical: vec![MultaryQuasigroup::sum(f2(), 2).unwrap(); 3],
            horizontal: vec![MultaryQuasigroup::sum(f2(), 4).unwrap()],
        }
    }

    fn binary_assembly(k000: MuComponent, k111: MuComponent) -> Assembly {
        let layout = CodeParameters::new(2, 3, 2).unwrap();
        let sigma = SigmaFamily::block_sums(f2(), 3, 2).unwrap();
        Assembly::new(hamming_code(2, 2).unwrap(), [k000, k111], layout, sigma)
    }

    fn mu(s: &str) -> Word {
        Word::parse_digits(s, 2).unwrap()
    }

    #[test]
    fn binary_length_seven() {
        let a = binary_assembly(
            build_mollard_phelps(&mu("000"), &inputs(0), f2()).unwrap(),
            build_mollard_phelps(&mu("111"), &inputs(0), f2()).unwrap(),
        );
        let c = combine(&a).unwrap();
        assert_eq!(c.len(), 16);
        assert!(is_perfect(&c).unwrap().is_perfect());
        assert_eq!(assembly_rank_bound_check(&a).unwrap(), RankBound { rank: 4, bound: 5 });
    }

    #[test]
    fn shifted_component_from_another_code() {
        // K_111 comes from the C# = {1} construction, moved from mu = 000
        let foreign = build_mollard_phelps(&mu("000"), &inputs(1), f2()).unwrap();
        let a = binary_assembly(
            build_mollard_phelps(&mu("000"), &inputs(0), f2()).unwrap(),
            component_shift(&foreign, &mu("111")).unwrap(),
        );
        let c = combine(&a).unwrap();
        assert!(is_perfect(&c).unwrap().is_perfect());
        let bound = assembly_rank_bound_check(&a).unwrap();
        assert!(bound.holds(), "{bound:?}");
        assert_ne!(c, hamming_code(2, 3).unwrap());
    }

    #[test]
    fn rejects_bad_assemblies() {
        let k0 = build_mollard_phelps(&mu("000"), &inputs(0), f2()).unwrap();
        let k1 = build_mollard_phelps(&mu("111"), &inputs(0), f2()).unwrap();

        let mut a = binary_assembly(k0.clone(), k1.clone());
        a.components.remove(&mu("111"));
        assert!(matches!(combine(&a), Err(Error::LayoutMismatch(_))));

        let mut a = binary_assembly(k0.clone(), k1.clone());
        a.outer = Code::new(2, 3, [[0u8, 0, 0], [0, 1, 1]]).unwrap();
        assert!(matches!(combine(&a), Err(Error::OuterNotPerfect(_))));

        let mut a = binary_assembly(k0.clone(), k1.clone());
        a.components.insert(mu("000"), k1.clone());
        a.components.insert(mu("111"), k0.clone());
        match combine(&a) {
            Err(Error::ComponentLawViolation { mu: m, certificate }) => {
                assert_eq!(m, mu("000"));
                assert!(matches!(certificate, ComponentCertificate::Law { .. }));
            }
            other => panic!("{other:?}"),
        }

        let mut a = binary_assembly(k0, k1);
        a.layout = CodeParameters::new(2, 3, 1).unwrap();
        assert!(matches!(combine(&a), Err(Error::LayoutMismatch(_))));
    }

    #[test]
    fn rank_check_needs_linear_sigma() {
        let mut a = binary_assembly(
            build_mollard_phelps(&mu("000"), &inputs(0), f2()).unwrap(),
            build_mollard_phelps(&mu("111"), &inputs(0), f2()).unwrap(),
        );
        let plus_one = MultaryQuasigroup::linear(f2(), 2, &[1, 1], 1).unwrap();
        a.sigma = SigmaFamily::new(vec![plus_one; 3]).unwrap();
        assert!(matches!(assembly_rank_bound_check(&a), Err(Error::NonlinearSigma(0))));
    }
}
