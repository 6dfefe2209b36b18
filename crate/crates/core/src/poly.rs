//! Sparse multivariate polynomials over Q in numbered unknowns.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use crate::algebra::Coeff;
use crate::rational::{fmt_q, Q};

pub type Var = u32;

/// Power product of unknowns, sorted by variable, exponents ≥ 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PMono(Vec<(Var, u32)>);

impl PMono {
    pub fn one() -> Self {
        PMono(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        PMono(vec![(v, 1)])
    }

    pub fn from_pairs(mut pairs: Vec<(Var, u32)>) -> Self {
        pairs.retain(|(_, e)| *e > 0);
        pairs.sort();
        let mut out: Vec<(Var, u32)> = Vec::with_capacity(pairs.len());
        for (v, e) in pairs {
            match out.last_mut() {
                Some((w, f)) if *w == v => *f += e,
                _ => out.push((v, e)),
            }
        }
        PMono(out)
    }

    pub fn pairs(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exp(&self, v: Var) -> u32 {
        self.0.iter().find(|(w, _)| *w == v).map_or(0, |(_, e)| *e)
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.0.iter().map(|(v, _)| *v)
    }

    pub fn mul(&self, other: &PMono) -> PMono {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push(b[j]);
                j += 1;
            } else {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
        PMono(out)
    }

    pub fn pow(&self, k: u32) -> PMono {
        if k == 0 {
            return PMono::one();
        }
        PMono(self.0.iter().map(|(v, e)| (*v, e * k)).collect())
    }

    pub fn divides(&self, other: &PMono) -> bool {
        self.0.iter().all(|(v, e)| other.exp(*v) >= *e)
    }

    /// `self / other`; caller guarantees divisibility.
    pub fn div(&self, other: &PMono) -> PMono {
        let pairs = self.0.iter().map(|(v, e)| (*v, e - other.exp(*v))).collect();
        PMono::from_pairs(pairs)
    }

    pub fn gcd(&self, other: &PMono) -> PMono {
        PMono::from_pairs(self.0.iter().map(|(v, e)| (*v, (*e).min(other.exp(*v)))).collect())
    }

    pub fn without(&self, v: Var) -> PMono {
        PMono(self.0.iter().copied().filter(|(w, _)| *w != v).collect())
    }

    pub fn fmt_with(&self, name: &dyn Fn(Var) -> String) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        self.0
            .iter()
            .map(|(v, e)| if *e == 1 { name(*v) } else { format!("{}^{}", name(*v), e) })
            .collect::<Vec<_>>()
            .join("*")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    terms: BTreeMap<PMono, Q>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Q) -> Self {
        Self::term(PMono::one(), c)
    }

    pub fn var(v: Var) -> Self {
        Self::term(PMono::var(v), Q::one())
    }

    pub fn term(m: PMono, c: Q) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PMono, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &PMono) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    /// The constant value when the polynomial has no unknowns.
    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// `Some((m, c))` when the polynomial is a single term.
    pub fn as_monomial(&self) -> Option<(&PMono, &Q)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn add_term(&mut self, m: PMono, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, k: &Q) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect() }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut r = Poly::constant(Q::one());
        let mut b = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                r = r.mul(&b);
            }
            k >>= 1;
            if k > 0 {
                b = b.mul(&b);
            }
        }
        r
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.vars()).collect()
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exp(v) > 0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(PMono::degree).max().unwrap_or(0)
    }

    /// Replaces `v` by `value` everywhere.
    pub fn substitute(&self, v: Var, value: &Poly) -> Poly {
        if !self.contains_var(v) {
            return self.clone();
        }
        let mut powers: BTreeMap<u32, Poly> = BTreeMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            let rest = m.without(v);
            if e == 0 {
                out.add_term(rest, c.clone());
                continue;
            }
            let p = powers.entry(e).or_insert_with(|| value.pow(e));
            for (pm, pc) in &p.terms {
                out.add_term(rest.mul(pm), c * pc);
            }
        }
        out
    }

    /// Full evaluation; unknowns missing from `at` are an error.
    pub fn eval(&self, at: &dyn Fn(Var) -> Option<Q>) -> Option<Q> {
        let mut s = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m.pairs() {
                t *= num_traits::pow(at(*v)?, *e as usize);
            }
            s += t;
        }
        Some(s)
    }

    /// Largest power product dividing every term.
    pub fn monomial_content(&self) -> PMono {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else { return PMono::one() };
        it.fold(first.clone(), |g, m| g.gcd(m))
    }

    pub fn div_monomial(&self, d: &PMono) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.div(d), c.clone())).collect() }
    }

    /// Scales so the first term (in term order) has coefficient 1.
    pub fn monic(&self) -> Poly {
        match self.terms.values().next() {
            Some(c) if !c.is_one() => self.scale(&c.recip()),
            _ => self.clone(),
        }
    }

    pub fn fmt_with(&self, name: &dyn Fn(Var) -> String) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if m.is_one() {
                s.push_str(&fmt_q(&a));
            } else if a.is_one() {
                s.push_str(&m.fmt_with(name));
            } else {
                s.push_str(&format!("{}*{}", fmt_q(&a), m.fmt_with(name)));
            }
        }
        s
    }
}

impl Coeff for Poly {
    fn c_zero() -> Self {
        Poly::zero()
    }
    fn c_one() -> Self {
        Poly::constant(Q::one())
    }
    fn c_is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
    fn c_add_assign(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
    fn c_mul(&self, other: &Self) -> Self {
        Poly::mul(self, other)
    }
    fn c_neg(&self) -> Self {
        self.scale(&-Q::one())
    }
    fn c_scale(&self, q: &Q) -> Self {
        Poly::scale(self, q)
    }
    fn from_q(q: &Q) -> Self {
        Poly::constant(q.clone())
    }
}
