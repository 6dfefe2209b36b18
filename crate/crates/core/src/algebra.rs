//! Free graded-commutative algebras over Q with Koszul signs.
//!
//! Monomials are exponent vectors aligned with the generator declaration
//! order. Odd generators carry exponent 0 or 1; an element is a sparse map
//! from monomials to nonzero coefficients. The coefficient ring is generic so
//! the same machinery multiplies symbolic (polynomial-coefficient) elements.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::Q;

/// Coefficient ring of an [`Element`].
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn c_zero() -> Self;
    fn c_one() -> Self;
    fn c_is_zero(&self) -> bool;
    fn c_add_assign(&mut self, other: &Self);
    fn c_mul(&self, other: &Self) -> Self;
    fn c_neg(&self) -> Self;
    fn c_scale(&self, q: &Q) -> Self;
    fn from_q(q: &Q) -> Self;
}

impl Coeff for Q {
    fn c_zero() -> Self {
        Q::zero()
    }
    fn c_one() -> Self {
        Q::one()
    }
    fn c_is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn c_add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn c_mul(&self, other: &Self) -> Self {
        self * other
    }
    fn c_neg(&self) -> Self {
        -self.clone()
    }
    fn c_scale(&self, q: &Q) -> Self {
        self * q
    }
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: u32) -> Self {
        Self { name: name.into(), degree }
    }

    pub fn is_odd(&self) -> bool {
        self.degree % 2 == 1
    }
}

/// Exponent vector in declaration order, with its cached total degree.
///
/// Ordering: total degree ascending, then graded-lex with earlier generators
/// dominant (so `x1^2` precedes `x2` when both have degree 4).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    degree: u32,
    exps: Vec<u16>,
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Monomial {
    pub fn one(n_gens: usize) -> Self {
        Self { degree: 0, exps: vec![0; n_gens] }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn exps(&self) -> &[u16] {
        &self.exps
    }

    pub fn exp(&self, g: usize) -> u16 {
        self.exps[g]
    }

    pub fn is_one(&self) -> bool {
        self.degree == 0 && self.exps.iter().all(|&e| e == 0)
    }

    /// Number of generator factors counted with multiplicity.
    /// Componentwise exponent comparison.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    pub fn word_length(&self) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum()
    }

    /// Sub-monomial consisting of the generators in `range`, re-indexed from 0.
    pub fn slice(&self, range: std::ops::Range<usize>, gens: &[Generator]) -> Monomial {
        let exps: Vec<u16> = self.exps[range.clone()].to_vec();
        let degree = exps
            .iter()
            .zip(&gens[range])
            .map(|(&e, g)| e as u32 * g.degree)
            .sum();
        Monomial { degree, exps }
    }
}

/// Exact linear combination of monomials; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Element<C: Coeff = Q> {
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> Default for Element<C> {
    fn default() -> Self {
        Self { terms: BTreeMap::new() }
    }
}

impl<C: Coeff> Element<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_term(m: Monomial, c: C) -> Self {
        let mut e = Self::zero();
        e.add_term(m, c);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, C)> {
        self.terms.into_iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Option<&C> {
        self.terms.get(m)
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&Monomial) -> bool) {
        self.terms.retain(|m, _| keep(m));
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.c_is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                o.get_mut().c_add_assign(&c);
                if o.get().c_is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.c_neg());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.c_neg())).collect() }
    }

    pub fn scale(&self, q: &Q) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.c_scale(q));
        }
        out
    }

    pub fn mul_coeff(&self, k: &C) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.c_mul(k));
        }
        out
    }

    /// `Some(d)` when every term has degree `d` (the zero element has none).
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(Monomial::degree);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Element<D> {
        let mut out = Element::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }
}

impl Element<Q> {
    /// Lifts a rational element into another coefficient ring.
    pub fn lift<D: Coeff>(&self) -> Element<D> {
        self.map_coeffs(|c| D::from_q(c))
    }
}

/// The free graded-commutative algebra on an ordered generator list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedAlgebra {
    gens: Vec<Generator>,
}

impl GradedAlgebra {
    pub fn new(gens: Vec<Generator>) -> Self {
        Self { gens }
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    pub fn is_odd(&self, g: usize) -> bool {
        self.gens[g].is_odd()
    }

    pub fn one_monomial(&self) -> Monomial {
        Monomial::one(self.gens.len())
    }

    /// `g^e`, or `None` when `g` is odd and `e > 1`.
    pub fn generator_power(&self, g: usize, e: u16) -> Option<Monomial> {
        if e > 1 && self.is_odd(g) {
            return None;
        }
        let mut exps = vec![0u16; self.gens.len()];
        exps[g] = e;
        Some(Monomial { degree: e as u32 * self.gens[g].degree, exps })
    }

    pub fn monomial_from_exps(&self, exps: Vec<u16>) -> Option<Monomial> {
        assert_eq!(exps.len(), self.gens.len());
        if exps.iter().zip(&self.gens).any(|(&e, g)| g.is_odd() && e > 1) {
            return None;
        }
        let degree = exps.iter().zip(&self.gens).map(|(&e, g)| e as u32 * g.degree).sum();
        Some(Monomial { degree, exps })
    }

    pub fn generator_element<C: Coeff>(&self, g: usize) -> Element<C> {
        Element::from_term(self.generator_power(g, 1).unwrap(), C::c_one())
    }

    pub fn unit<C: Coeff>(&self) -> Element<C> {
        Element::from_term(self.one_monomial(), C::c_one())
    }

    pub fn constant<C: Coeff>(&self, c: C) -> Element<C> {
        Element::from_term(self.one_monomial(), c)
    }

    /// Product of two monomials as `(sign, monomial)`; `None` if an odd generator squares.
    pub fn monomial_mul(&self, a: &Monomial, b: &Monomial) -> Option<(bool, Monomial)> {
        let n = self.gens.len();
        let mut exps = Vec::with_capacity(n);
        // Moving each odd factor of `b` left past the odd factors of `a` that follow it.
        let mut negative = false;
        let mut odd_in_a_after = 0u32;
        for g in (0..n).rev() {
            let (ea, eb) = (a.exps[g], b.exps[g]);
            if self.gens[g].is_odd() {
                if ea + eb > 1 {
                    return None;
                }
                if eb == 1 && odd_in_a_after % 2 == 1 {
                    negative = !negative;
                }
                if ea == 1 {
                    odd_in_a_after += 1;
                }
            }
            exps.push(ea + eb);
        }
        exps.reverse();
        Some((negative, Monomial { degree: a.degree + b.degree, exps }))
    }

    pub fn multiply<C: Coeff>(&self, a: &Element<C>, b: &Element<C>) -> Element<C> {
        let mut out = Element::zero();
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                if let Some((neg, m)) = self.monomial_mul(ma, mb) {
                    let c = ca.c_mul(cb);
                    out.add_term(m, if neg { c.c_neg() } else { c });
                }
            }
        }
        out
    }

    pub fn power<C: Coeff>(&self, a: &Element<C>, k: u32) -> Element<C> {
        let mut result = self.unit();
        let mut base = a.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = self.multiply(&result, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.multiply(&base, &base);
            }
        }
        result
    }

    /// All monomials of total degree `n`, in monomial order.
    pub fn basis_of_degree(&self, n: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut exps = vec![0u16; self.gens.len()];
        self.enumerate(0, n, &mut exps, &mut out);
        out.sort();
        out
    }

    fn enumerate(&self, g: usize, remaining: u32, exps: &mut Vec<u16>, out: &mut Vec<Monomial>) {
        if g == self.gens.len() {
            if remaining == 0 {
                out.push(self.monomial_from_exps(exps.clone()).unwrap());
            }
            return;
        }
        let d = self.gens[g].degree;
        let max = if self.gens[g].is_odd() { 1 } else { remaining / d.max(1) };
        for e in 0..=max {
            if e * d > remaining {
                break;
            }
            exps[g] = e as u16;
            self.enumerate(g + 1, remaining - e * d, exps, out);
        }
        exps[g] = 0;
    }

    pub fn degree_of_monomial(&self, m: &Monomial) -> u32 {
        m.degree
    }

    /// Renders a monomial as juxtaposed powers, e.g. `x1^3 x2`.
    pub fn fmt_monomial(&self, m: &Monomial) -> String {
        if m.is_one() {
            return "1".into();
        }
        let mut parts = Vec::new();
        for (g, &e) in m.exps.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(self.gens[g].name.clone()),
                _ => parts.push(format!("{}^{}", self.gens[g].name, e)),
            }
        }
        parts.join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn a1() -> GradedAlgebra {
        GradedAlgebra::new(vec![
            Generator::new("x1", 2),
            Generator::new("x2", 4),
            Generator::new("y1", 9),
            Generator::new("y2", 11),
            Generator::new("y3", 13),
            Generator::new("z", 35),
        ])
    }

    fn gen(alg: &GradedAlgebra, name: &str) -> Element {
        alg.generator_element(alg.index_of(name).unwrap())
    }

    #[test]
    fn odd_square_vanishes() {
        let alg = a1();
        let y1 = gen(&alg, "y1");
        assert!(alg.multiply(&y1, &y1).is_zero());
    }

    #[test]
    fn even_generators_commute() {
        let alg = a1();
        let (x1, x2) = (gen(&alg, "x1"), gen(&alg, "x2"));
        assert_eq!(alg.multiply(&x1, &x2), alg.multiply(&x2, &x1));
        assert_eq!(alg.fmt_monomial(alg.multiply(&x2, &x1).terms().next().unwrap().0), "x1 x2");
    }

    #[test]
    fn koszul_sign_on_odd_swap() {
        let alg = a1();
        let (y1, y2) = (gen(&alg, "y1"), gen(&alg, "y2"));
        let y2y1 = alg.multiply(&y2, &y1);
        assert_eq!(y2y1, alg.multiply(&y1, &y2).neg());
        assert_eq!(y2y1.terms().next().unwrap().1, &q(-1));
    }

    #[test]
    fn three_odd_reorder() {
        let alg = a1();
        let (y1, y2, y3) = (gen(&alg, "y1"), gen(&alg, "y2"), gen(&alg, "y3"));
        // y3 y1 y2 = (+1) y1 y2 y3 (two transpositions)
        let lhs = alg.multiply(&alg.multiply(&y3, &y1), &y2);
        let rhs = alg.multiply(&alg.multiply(&y1, &y2), &y3);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn basis_degree_four_and_three() {
        let alg = a1();
        let b4: Vec<String> = alg.basis_of_degree(4).iter().map(|m| alg.fmt_monomial(m)).collect();
        assert_eq!(b4, vec!["x1^2", "x2"]);
        assert!(alg.basis_of_degree(3).is_empty());
        assert_eq!(alg.basis_of_degree(0).len(), 1);
    }
}
