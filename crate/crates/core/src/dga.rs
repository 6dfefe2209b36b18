//! Free graded-commutative DGAs, structural predicates and concrete endomorphisms.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{Coeff, Element, GradedAlgebra, Generator, Monomial};
use crate::error::{DgaError, Result};
use crate::expr::{format_element, Aliases};
use crate::rational::{fmt_q, Q};

#[derive(Clone, Debug, PartialEq)]
pub struct DgaSpec {
    pub name: String,
    alg: GradedAlgebra,
    diff: Vec<Element>,
    pub aliases: Aliases,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StructuralReport {
    pub simply_connected: bool,
    pub minimal: bool,
    pub pure: bool,
}

impl DgaSpec {
    /// Builds a DGA; `diff[i]` is the differential of generator `i`.
    pub fn new(name: impl Into<String>, gens: Vec<Generator>, diff: Vec<Element>) -> Result<Self> {
        assert_eq!(gens.len(), diff.len());
        let alg = GradedAlgebra::new(gens);
        for (i, g) in alg.generators().iter().enumerate() {
            if g.degree == 0 {
                return Err(DgaError::Invalid(format!("generator {} has degree 0", g.name)));
            }
            if alg.generators()[..i].iter().any(|h| h.name == g.name) {
                return Err(DgaError::Invalid(format!("duplicate generator {}", g.name)));
            }
            if let Some(d) = diff[i].homogeneous_degree() {
                if d != g.degree + 1 {
                    return Err(DgaError::Inhomogeneous(format!(
                        "d{} has degree {d}, expected {}",
                        g.name,
                        g.degree + 1
                    )));
                }
            } else if !diff[i].is_zero() {
                return Err(DgaError::Inhomogeneous(format!("d{} mixes degrees", g.name)));
            }
        }
        Ok(Self { name: name.into(), alg, diff, aliases: Aliases::new() })
    }

    pub fn algebra(&self) -> &GradedAlgebra {
        &self.alg
    }

    pub fn generators(&self) -> &[Generator] {
        self.alg.generators()
    }

    pub fn generator_differential(&self, g: usize) -> &Element {
        &self.diff[g]
    }

    pub fn fmt(&self, e: &Element) -> String {
        format_element(&self.alg, e)
    }

    /// d of a single monomial via the graded Leibniz rule.
    pub fn d_monomial(&self, m: &Monomial) -> Element {
        let n = self.alg.len();
        let mut out = Element::zero();
        let mut left_deg = 0u32;
        for g in 0..n {
            let e = m.exp(g);
            if e == 0 {
                continue;
            }
            let gen_deg = self.alg.generators()[g].degree;
            if !self.diff[g].is_zero() {
                let mut left = vec![0u16; n];
                left[..g].copy_from_slice(&m.exps()[..g]);
                let mut right = vec![0u16; n];
                right[g + 1..].copy_from_slice(&m.exps()[g + 1..]);
                let mut mid = vec![0u16; n];
                mid[g] = e - 1;
                let l = Element::from_term(self.alg.monomial_from_exps(left).unwrap(), Q::one());
                let r = Element::from_term(self.alg.monomial_from_exps(right).unwrap(), Q::one());
                let p = Element::from_term(self.alg.monomial_from_exps(mid).unwrap(), Q::from_integer(e.into()));
                // d(g^e) = e g^(e-1) dg; dg has even degree when g is even, and e = 1 when g is odd.
                let dge = self.alg.multiply(&p, &self.diff[g]);
                let mut t = self.alg.multiply(&self.alg.multiply(&l, &dge), &r);
                if left_deg % 2 == 1 {
                    t = t.neg();
                }
                out.add_assign(&t);
            }
            left_deg += e as u32 * gen_deg;
        }
        out
    }

    pub fn differential<C: Coeff>(&self, e: &Element<C>) -> Element<C> {
        let mut out = Element::zero();
        for (m, c) in e.terms() {
            let dm = self.d_monomial(m);
            for (mm, q) in dm.terms() {
                out.add_term(mm.clone(), c.c_scale(q));
            }
        }
        out
    }

    /// `Err(name)` of the first generator with d(d g) ≠ 0.
    pub fn check_d_squared(&self) -> std::result::Result<(), String> {
        for (i, g) in self.generators().iter().enumerate() {
            if !self.differential(&self.diff[i]).is_zero() {
                return Err(g.name.clone());
            }
        }
        Ok(())
    }

    pub fn structural_report(&self) -> StructuralReport {
        let gens = self.generators();
        let simply_connected = gens.iter().all(|g| g.degree >= 2);
        let minimal = self.diff.iter().all(|d| d.terms().all(|(m, _)| m.word_length() != 1));
        let pure = gens.iter().enumerate().all(|(i, g)| {
            if g.is_odd() {
                self.diff[i]
                    .terms()
                    .all(|(m, _)| (0..gens.len()).all(|h| !gens[h].is_odd() || m.exp(h) == 0))
            } else {
                self.diff[i].is_zero()
            }
        });
        StructuralReport { simply_connected, minimal, pure }
    }

    /// Σ_odd |g| − Σ_even (|g| − 1).
    pub fn formal_dimension(&self) -> i64 {
        self.generators()
            .iter()
            .map(|g| if g.is_odd() { g.degree as i64 } else { -(g.degree as i64 - 1) })
            .sum()
    }

    /// Number of generators in each degree `1..=upto`; absent degrees map to 0.
    pub fn rational_homotopy_dims(&self, upto: u32) -> BTreeMap<u32, usize> {
        let mut out: BTreeMap<u32, usize> = (1..=upto).map(|k| (k, 0)).collect();
        for g in self.generators() {
            if g.degree <= upto {
                *out.get_mut(&g.degree).unwrap() += 1;
            }
        }
        out
    }

    /// Generator blocks closed under d; the DGA is the tensor product of the blocks.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.alg.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for g in 0..n {
            for (m, _) in self.diff[g].terms() {
                for h in 0..n {
                    if m.exp(h) > 0 {
                        let (a, b) = (find(&mut parent, g), find(&mut parent, h));
                        parent[a] = b;
                    }
                }
            }
        }
        let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for g in 0..n {
            let r = find(&mut parent, g);
            blocks.entry(r).or_default().push(g);
        }
        let mut out: Vec<Vec<usize>> = blocks.into_values().collect();
        out.sort();
        out
    }

    /// Sub-DGA on a d-closed generator subset (indices in declaration order).
    pub fn restrict(&self, gens: &[usize]) -> DgaSpec {
        let sub_gens: Vec<Generator> = gens.iter().map(|&g| self.generators()[g].clone()).collect();
        let sub_alg = GradedAlgebra::new(sub_gens.clone());
        let diff = gens
            .iter()
            .map(|&g| {
                let mut e = Element::zero();
                for (m, c) in self.diff[g].terms() {
                    let exps = gens.iter().map(|&h| m.exp(h)).collect();
                    e.add_term(sub_alg.monomial_from_exps(exps).unwrap(), c.clone());
                }
                e
            })
            .collect();
        DgaSpec::new(format!("{}[{}]", self.name, gens.len()), sub_gens, diff).expect("restriction of a valid DGA")
    }

    /// Embeds a monomial of `restrict(gens)` back into this algebra.
    pub fn embed(&self, gens: &[usize], m: &Monomial) -> Monomial {
        let mut exps = vec![0u16; self.alg.len()];
        for (i, &g) in gens.iter().enumerate() {
            exps[g] = m.exp(i);
        }
        self.alg.monomial_from_exps(exps).unwrap()
    }

    pub fn embed_element(&self, gens: &[usize], e: &Element) -> Element {
        let mut out = Element::zero();
        for (m, c) in e.terms() {
            out.add_term(self.embed(gens, m), c.clone());
        }
        out
    }

    pub fn identity_endo(&self) -> ConcreteEndo {
        ConcreteEndo { images: (0..self.alg.len()).map(|g| self.alg.generator_element(g)).collect() }
    }

    pub fn zero_endo(&self) -> ConcreteEndo {
        ConcreteEndo { images: vec![Element::zero(); self.alg.len()] }
    }

    /// x ↦ base^|x| x on even generators, y ↦ base^(|y|+1) y on odd ones.
    pub fn pure_scaling_endo(&self, base: &Q) -> Result<ConcreteEndo> {
        if !self.structural_report().pure {
            return Err(DgaError::Precondition(format!("{} is not pure", self.name)));
        }
        let images = self
            .generators()
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let k = if g.is_odd() { g.degree + 1 } else { g.degree };
                self.alg.generator_element::<Q>(i).scale(&num_traits::pow(base.clone(), k as usize))
            })
            .collect();
        Ok(ConcreteEndo { images })
    }

    /// `Err(name)` of the first generator with f(dg) ≠ d(f(g)).
    pub fn check_chain_map(&self, f: &ConcreteEndo) -> Result<std::result::Result<(), String>> {
        f.validate(self)?;
        for (i, g) in self.generators().iter().enumerate() {
            let lhs = apply_map(&self.alg, &f.images, &self.diff[i]);
            let rhs = self.differential(&f.images[i]);
            if lhs != rhs {
                return Ok(Err(g.name.clone()));
            }
        }
        Ok(Ok(()))
    }

    pub fn tensor_product(a: &DgaSpec, b: &DgaSpec) -> DgaSpec {
        let (na, nb) = (a.alg.len(), b.alg.len());
        let rename = |g: &Generator, s: &str| Generator::new(format!("{}_{}", g.name, s), g.degree);
        let mut gens: Vec<Generator> = a.generators().iter().map(|g| rename(g, "a")).collect();
        gens.extend(b.generators().iter().map(|g| rename(g, "b")));
        let alg = GradedAlgebra::new(gens.clone());
        let shift = |e: &Element, offset: usize, n: usize| {
            let mut out = Element::zero();
            for (m, c) in e.terms() {
                let mut exps = vec![0u16; na + nb];
                exps[offset..offset + n].copy_from_slice(m.exps());
                out.add_term(alg.monomial_from_exps(exps).unwrap(), c.clone());
            }
            out
        };
        let mut diff: Vec<Element> = a.diff.iter().map(|e| shift(e, 0, na)).collect();
        diff.extend(b.diff.iter().map(|e| shift(e, na, nb)));
        let mut t = DgaSpec::new(format!("{}_x_{}", a.name, b.name), gens, diff).expect("tensor of valid DGAs");
        for (k, v) in &a.aliases {
            t.aliases.insert(format!("{k}_a"), shift(v, 0, na));
        }
        for (k, v) in &b.aliases {
            t.aliases.insert(format!("{k}_b"), shift(v, na, nb));
        }
        t
    }

    /// Index shift for embedding the factors of [`DgaSpec::tensor_product`].
    pub fn shift_into_tensor(&self, e: &Element, offset: usize, total: &GradedAlgebra) -> Element {
        let mut out = Element::zero();
        for (m, c) in e.terms() {
            let mut exps = vec![0u16; total.len()];
            exps[offset..offset + self.alg.len()].copy_from_slice(m.exps());
            out.add_term(total.monomial_from_exps(exps).unwrap(), c.clone());
        }
        out
    }
}

/// Algebra endomorphism given by the images of the generators.
#[derive(Clone, Debug, PartialEq)]
pub struct ConcreteEndo {
    pub images: Vec<Element>,
}

impl ConcreteEndo {
    pub fn validate(&self, a: &DgaSpec) -> Result<()> {
        if self.images.len() != a.generators().len() {
            return Err(DgaError::Invalid("wrong number of generator images".into()));
        }
        for (img, g) in self.images.iter().zip(a.generators()) {
            if let Some(d) = img.homogeneous_degree() {
                if d != g.degree {
                    return Err(DgaError::Inhomogeneous(format!(
                        "image of {} has degree {d}, expected {}",
                        g.name, g.degree
                    )));
                }
            } else if !img.is_zero() {
                return Err(DgaError::Inhomogeneous(format!("image of {} mixes degrees", g.name)));
            }
        }
        Ok(())
    }

    pub fn apply(&self, a: &DgaSpec, e: &Element) -> Element {
        apply_map(a.algebra(), &self.images, e)
    }

    pub fn describe(&self, a: &DgaSpec) -> BTreeMap<String, String> {
        a.generators()
            .iter()
            .zip(&self.images)
            .map(|(g, img)| (g.name.clone(), a.fmt(img)))
            .collect()
    }
}

/// Extends generator images multiplicatively: f(Σ c m) = Σ c Π f(g)^e.
pub fn apply_map<C: Coeff>(alg: &GradedAlgebra, images: &[Element<C>], e: &Element<C>) -> Element<C> {
    let mut powers: BTreeMap<(usize, u16), Element<C>> = BTreeMap::new();
    let mut out = Element::zero();
    for (m, c) in e.terms() {
        let mut t: Element<C> = alg.constant(c.clone());
        for (g, &k) in m.exps().iter().enumerate() {
            if k == 0 {
                continue;
            }
            let p = powers.entry((g, k)).or_insert_with(|| alg.power(&images[g], k as u32)).clone();
            t = alg.multiply(&t, &p);
            if t.is_zero() {
                break;
            }
        }
        out.add_assign(&t);
    }
    out
}

/// Human-readable scale suffix, e.g. ` scale 1/2`.
pub fn fmt_scale(s: &Q) -> String {
    if s.is_one() {
        String::new()
    } else {
        format!(" scale {}", fmt_q(s))
    }
}

/// Number of odd generator factors in a monomial.
pub fn odd_word_length(alg: &GradedAlgebra, m: &Monomial) -> u32 {
    (0..alg.len()).filter(|&g| alg.is_odd(g)).map(|g| m.exp(g) as u32).sum()
}

/// A top-degree class `scale · [representative]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FundamentalClass {
    pub representative: Element,
    pub scale: Q,
}

impl FundamentalClass {
    pub fn new(representative: Element) -> Self {
        Self { representative, scale: Q::one() }
    }

    pub fn scaled(&self, a: &Q) -> Self {
        assert!(!a.is_zero());
        Self { representative: self.representative.clone(), scale: &self.scale * a }
    }

    pub fn degree(&self) -> Option<u32> {
        self.representative.homogeneous_degree()
    }

    /// The product class in `DgaSpec::tensor_product(a, b)`.
    pub fn tensor(a: &DgaSpec, fa: &FundamentalClass, b: &DgaSpec, fb: &FundamentalClass, t: &DgaSpec) -> Self {
        let ra = a.shift_into_tensor(&fa.representative, 0, t.algebra());
        let rb = b.shift_into_tensor(&fb.representative, a.generators().len(), t.algebra());
        Self { representative: t.algebra().multiply(&ra, &rb), scale: &fa.scale * &fb.scale }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::fixtures;
    use crate::rational::q;

    fn el(a: &DgaSpec, s: &str) -> Element {
        parse_expr(a.algebra(), &a.aliases, s).unwrap()
    }

    #[test]
    fn fixture_differentials() {
        let a = fixtures::a1().spec;
        assert_eq!(a.fmt(&a.differential(&el(&a, "y1"))), "x1^3 x2");
        assert!(a.differential(&el(&a, "x1")).is_zero());
        assert_eq!(a.differential(&el(&a, "y1 y2")), el(&a, "x1^3 x2 y2 - x1^2 x2^2 y1"));
        // x1 x2 w = d(y1 y2 y3)
        assert_eq!(a.differential(&el(&a, "y1 y2 y3")), el(&a, "x1 x2 w"));
    }

    #[test]
    fn d_squared_and_corruption() {
        for (_, f) in fixtures::all() {
            assert_eq!(f.spec.check_d_squared(), Ok(()));
        }
        let text = fixtures::A1.replace("d z = x2^2 w + x1^18 + x2^9", "d z = x2^2 w + x1^18 + x2^9 + x1^8 y1 y2");
        let bad = crate::format::parse_dga(&text).unwrap().spec;
        assert_eq!(bad.check_d_squared(), Err("z".to_string()));
        let text = fixtures::A1.replace("d z = x2^2 w + x1^18 + x2^9", "d z = x2^2 w + x1^18 + x2^8 y1");
        assert!(crate::format::parse_dga(&text).is_err());
    }

    #[test]
    fn structure_and_dimension() {
        let a1 = fixtures::a1().spec;
        let r = a1.structural_report();
        assert!(r.simply_connected && r.minimal && !r.pure);
        assert!(fixtures::s2().spec.structural_report().pure);
        let dims: Vec<i64> = fixtures::all().iter().map(|(_, f)| f.spec.formal_dimension()).collect();
        assert_eq!(dims, vec![64, 108, 208, 228]);
        let h = a1.rational_homotopy_dims(64);
        assert_eq!((h[&2], h[&35], h[&63]), (1, 1, 0));
    }

    #[test]
    fn tensor_components() {
        let a3 = fixtures::a3().spec;
        let t = DgaSpec::tensor_product(&a3, &a3);
        assert_eq!(t.check_d_squared(), Ok(()));
        assert_eq!(t.formal_dimension(), 416);
        assert_eq!(t.components().len(), 2);
        let b8: Vec<String> = t.algebra().basis_of_degree(8).iter().map(|m| t.algebra().fmt_monomial(m)).collect();
        assert_eq!(b8, vec!["x1_a", "x1_b"]);
    }

    #[test]
    fn scaling_endo_on_sphere() {
        let s2 = fixtures::s2().spec;
        let f = s2.pure_scaling_endo(&q(2)).unwrap();
        assert_eq!(f.images[0], el(&s2, "4 e"));
        assert_eq!(f.images[1], el(&s2, "16 e'"));
        assert_eq!(s2.check_chain_map(&f).unwrap(), Ok(()));
        let wrong = ConcreteEndo { images: vec![el(&s2, "4 e"), el(&s2, "4 e'")] };
        assert_eq!(s2.check_chain_map(&wrong).unwrap(), Err("e'".to_string()));
        assert!(fixtures::a1().spec.pure_scaling_endo(&q(2)).is_err());
        let a1 = fixtures::a1().spec;
        assert_eq!(a1.check_chain_map(&a1.identity_endo()).unwrap(), Ok(()));
        assert_eq!(a1.check_chain_map(&a1.zero_endo()).unwrap(), Ok(()));
    }
}
