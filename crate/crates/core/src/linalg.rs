//! Sparse fraction-free elimination over Z with rational read-out.
//!
//! Rows are kept primitive (content divided out) after every elimination step,
//! so no rational arithmetic happens until a reduced echelon form is requested.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::Q;

/// Sparse integer row, sorted by column, no zero entries.
pub type IntRow = Vec<(usize, BigInt)>;

/// Sparse rational vector, sorted by column, no zero entries.
pub type QVec = Vec<(usize, Q)>;

/// Clears denominators: returns `(row, l)` with `row = l * v` integral.
pub fn to_int_row(v: &[(usize, Q)]) -> (IntRow, BigInt) {
    let l = v.iter().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    let row = v
        .iter()
        .map(|(i, c)| (*i, c.numer() * (&l / c.denom())))
        .collect();
    (row, l)
}

pub fn to_qvec(v: &IntRow) -> QVec {
    v.iter().map(|(i, c)| (*i, Q::from_integer(c.clone()))).collect()
}

fn content(row: &IntRow) -> BigInt {
    let mut g = BigInt::zero();
    for (_, c) in row {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn make_primitive(row: &mut IntRow) {
    let g = content(row);
    if !g.is_zero() && !g.is_one() {
        for (_, c) in row.iter_mut() {
            *c = &*c / &g;
        }
    }
}

/// `a*x - b*y`.
fn combine(a: &BigInt, x: &IntRow, b: &BigInt, y: &IntRow) -> IntRow {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j == y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i == x.len() || (j < y.len() && y[j].0 < x[i].0);
        if take_x {
            out.push((x[i].0, a * &x[i].1));
            i += 1;
        } else if take_y {
            out.push((y[j].0, -(b * &y[j].1)));
            j += 1;
        } else {
            let c = a * &x[i].1 - b * &y[j].1;
            if !c.is_zero() {
                out.push((x[i].0, c));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Incremental row echelon form. Pivots are only chosen among columns
/// `< limit`; columns beyond it ride along (tags, scale markers).
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    limit: usize,
    rows: Vec<IntRow>,
    pivots: BTreeMap<usize, usize>,
}

impl Echelon {
    pub fn new(limit: usize) -> Self {
        Self { limit, rows: Vec::new(), pivots: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivots.contains_key(&col)
    }

    /// Eliminates every pivot-column entry of `v`.
    pub fn reduce(&self, mut v: IntRow) -> IntRow {
        let mut start = 0;
        loop {
            let hit = v
                .iter()
                .find(|(c, _)| *c >= start && *c < self.limit && self.pivots.contains_key(c))
                .map(|(c, x)| (*c, x.clone()));
            let Some((col, coef)) = hit else { break };
            let row = &self.rows[self.pivots[&col]];
            let lead = &row[0].1;
            let g = lead.gcd(&coef);
            let mut a = lead / &g;
            let mut b = &coef / &g;
            if a.is_negative() {
                a = -a;
                b = -b;
            }
            v = combine(&a, &v, &b, row);
            make_primitive(&mut v);
            start = col + 1;
        }
        v
    }

    fn leading(&self, v: &IntRow) -> Option<usize> {
        v.iter().map(|(c, _)| *c).find(|&c| c < self.limit)
    }

    /// Adds `v` to the row space; returns the new pivot column if `v` was independent.
    pub fn insert(&mut self, v: IntRow) -> Option<usize> {
        let mut v = self.reduce(v);
        let p = self.leading(&v)?;
        debug_assert_eq!(v[0].0, p);
        if v[0].1.is_negative() {
            for (_, c) in v.iter_mut() {
                *c = -&*c;
            }
        }
        self.pivots.insert(p, self.rows.len());
        self.rows.push(v);
        Some(p)
    }

    /// Reduced row echelon form with unit pivots.
    pub fn rref(&self) -> Rref {
        let mut order: Vec<usize> = self.pivots.keys().copied().collect();
        order.reverse();
        let mut done: BTreeMap<usize, IntRow> = BTreeMap::new();
        for p in order {
            let mut v = self.rows[self.pivots[&p]].clone();
            // Back-substitute with already reduced rows at larger pivots.
            loop {
                let hit = v
                    .iter()
                    .skip(1)
                    .find(|(c, _)| done.contains_key(c))
                    .map(|(c, x)| (*c, x.clone()));
                let Some((col, coef)) = hit else { break };
                let row = &done[&col];
                let lead = &row[0].1;
                let g = lead.gcd(&coef);
                v = combine(&(lead / &g), &v, &(&coef / &g), row);
                make_primitive(&mut v);
                if v[0].1.is_negative() {
                    for (_, c) in v.iter_mut() {
                        *c = -&*c;
                    }
                }
            }
            done.insert(p, v);
        }
        let rows: Vec<(usize, QVec)> = done
            .into_iter()
            .map(|(p, v)| {
                let lead = Q::from_integer(v[0].1.clone());
                (p, v.iter().map(|(c, x)| (*c, Q::from_integer(x.clone()) / &lead)).collect())
            })
            .collect();
        let index = rows.iter().enumerate().map(|(i, (p, _))| (*p, i)).collect();
        Rref { rows, index }
    }
}

/// Fully reduced echelon form over Q.
#[derive(Clone, Debug, Default)]
pub struct Rref {
    rows: Vec<(usize, QVec)>,
    index: BTreeMap<usize, usize>,
}

impl Rref {
    pub fn from_rows(rows: Vec<QVec>, limit: usize) -> Self {
        let mut e = Echelon::new(limit);
        for r in rows {
            let (ir, _) = to_int_row(&r);
            e.insert(ir);
        }
        e.rref()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().map(|(p, _)| *p)
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.index.contains_key(&col)
    }

    /// Row with pivot `p` (pivot entry 1 first).
    pub fn row(&self, p: usize) -> Option<&QVec> {
        self.index.get(&p).map(|&i| &self.rows[i].1)
    }

    /// Entry `R[p, col]`, zero when absent.
    pub fn entry(&self, p: usize, col: usize) -> Q {
        self.row(p)
            .and_then(|r| r.binary_search_by_key(&col, |(c, _)| *c).ok().map(|i| r[i].1.clone()))
            .unwrap_or_else(Q::zero)
    }

    /// Subtracts pivot rows so that `v` vanishes on every pivot column.
    pub fn reduce(&self, v: &QVec) -> QVec {
        let mut acc: BTreeMap<usize, Q> = v.iter().cloned().collect();
        for (p, row) in &self.rows {
            let Some(c) = acc.get(p).cloned() else { continue };
            for (col, x) in row {
                let e = acc.entry(*col).or_insert_with(Q::zero);
                *e -= &c * x;
                if e.is_zero() {
                    acc.remove(col);
                }
            }
        }
        acc.into_iter().collect()
    }
}

/// Rank of a dense rational matrix.
pub fn rank_dense(m: &[Vec<Q>]) -> usize {
    let ncols = m.first().map_or(0, Vec::len);
    let mut e = Echelon::new(ncols);
    for row in m {
        let v: QVec = row.iter().cloned().enumerate().filter(|(_, x)| !x.is_zero()).collect();
        e.insert(to_int_row(&v).0);
    }
    e.rank()
}

/// Determinant of a square rational matrix by Gaussian elimination.
pub fn det(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m.to_vec();
    let mut d = Q::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Q::zero();
        };
        if piv != col {
            a.swap(piv, col);
            d = -d;
        }
        d *= &a[col][col];
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &a[col][col];
            for c in col..n {
                let t = &f * &a[col][c];
                a[r][c] -= t;
            }
        }
    }
    d
}
