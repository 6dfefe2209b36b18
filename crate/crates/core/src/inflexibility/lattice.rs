//! Multiplicative relations Π u^e = c among nonzero unknowns.
//!
//! Relations form a lattice of integer exponent vectors; integer row reduction
//! (Hermite style, extended gcd on leading entries) isolates single-unknown
//! powers u^k = c, and membership tests decide whether P^k is a constant.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::poly::{PMono, Var};
use crate::rational::{pow_i, Q};

#[derive(Clone, Debug, PartialEq)]
pub struct Relation {
    /// Nonzero exponents.
    pub exps: BTreeMap<Var, BigInt>,
    pub value: Q,
}

impl Relation {
    /// `num / den = value`.
    pub fn ratio(num: &PMono, den: &PMono, value: Q) -> Self {
        let mut exps: BTreeMap<Var, BigInt> = BTreeMap::new();
        for (v, e) in num.pairs() {
            *exps.entry(*v).or_default() += *e;
        }
        for (v, e) in den.pairs() {
            *exps.entry(*v).or_default() -= *e;
        }
        exps.retain(|_, e| !e.is_zero());
        Self { exps, value }
    }

    fn combine(a: &BigInt, r: &Relation, b: &BigInt, s: &Relation) -> Relation {
        let mut exps: BTreeMap<Var, BigInt> = BTreeMap::new();
        for (v, e) in &r.exps {
            *exps.entry(*v).or_default() += a * e;
        }
        for (v, e) in &s.exps {
            *exps.entry(*v).or_default() += b * e;
        }
        exps.retain(|_, e| !e.is_zero());
        Relation { exps, value: pow_i(&r.value, a) * pow_i(&s.value, b) }
    }
}

/// Outcome of adding relations.
#[derive(Clone, Debug, PartialEq)]
pub enum LatticeError {
    /// A combination reduces to 1 = c with c ≠ 1.
    Inconsistent(Q),
}

/// Echelon basis of a relation lattice under a fixed variable order.
#[derive(Clone, Debug, Default)]
pub struct Lattice {
    order: Vec<Var>,
    rank: BTreeMap<Var, usize>,
    rows: BTreeMap<usize, Relation>,
}

impl Lattice {
    pub fn new(order: Vec<Var>) -> Self {
        let rank = order.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        Self { order, rank, rows: BTreeMap::new() }
    }

    fn lead(&self, r: &Relation) -> Option<(usize, BigInt)> {
        r.exps.iter().map(|(v, e)| (self.rank[v], e.clone())).min_by_key(|(i, _)| *i)
    }

    pub fn insert(&mut self, mut r: Relation) -> Result<(), LatticeError> {
        loop {
            let Some((pos, mut b)) = self.lead(&r) else {
                return if r.value.is_one() { Ok(()) } else { Err(LatticeError::Inconsistent(r.value)) };
            };
            if b.is_negative() {
                r = Relation::combine(&-BigInt::one(), &r, &BigInt::zero(), &r);
                b = -b;
            }
            let Some(row) = self.rows.get(&pos).cloned() else {
                self.rows.insert(pos, r);
                return Ok(());
            };
            let a = row.exps[&self.order[pos]].clone();
            let eg = a.extended_gcd(&b);
            let (g, x, y) = (eg.gcd, eg.x, eg.y);
            let new_row = Relation::combine(&x, &row, &y, &r);
            let rest = Relation::combine(&(&b / &g), &row, &-(&a / &g), &r);
            self.rows.insert(pos, new_row);
            r = rest;
        }
    }

    /// Smallest k > 0 with u^k = c in the lattice, where u is the last variable of the order.
    pub fn last_power(&self) -> Option<(BigInt, Q)> {
        let last = self.order.len().checked_sub(1)?;
        self.rows.get(&last).map(|r| (r.exps[&self.order[last]].clone(), r.value.clone()))
    }
}

/// u^k = c for `target`, by re-echelonizing with `target` last.
pub fn isolate(relations: &[Relation], target: Var) -> Result<Option<(BigInt, Q)>, LatticeError> {
    let mut vars: Vec<Var> = relations.iter().flat_map(|r| r.exps.keys().copied()).collect();
    vars.sort();
    vars.dedup();
    if !vars.contains(&target) {
        return Ok(None);
    }
    vars.retain(|v| *v != target);
    vars.push(target);
    let mut lat = Lattice::new(vars);
    for r in relations {
        lat.insert(r.clone())?;
    }
    Ok(lat.last_power())
}

/// Checks all relations for consistency.
pub fn consistent(relations: &[Relation]) -> Result<(), LatticeError> {
    let mut vars: Vec<Var> = relations.iter().flat_map(|r| r.exps.keys().copied()).collect();
    vars.sort();
    vars.dedup();
    let mut lat = Lattice::new(vars);
    for r in relations {
        lat.insert(r.clone())?;
    }
    Ok(())
}

/// For P = c·m, the smallest k with P^k constant, and that constant.
pub fn power_of_monomial(relations: &[Relation], c: &Q, m: &PMono, fresh: Var) -> Result<Option<(BigInt, Q)>, LatticeError> {
    if m.is_one() {
        return Ok(Some((BigInt::one(), c.clone())));
    }
    // fresh = m / (P / c), i.e. fresh · m^{-1} = 1/c with fresh standing for P.
    let mut rels = relations.to_vec();
    rels.push(Relation::ratio(&PMono::var(fresh), m, c.clone()));
    isolate(&rels, fresh)
}
