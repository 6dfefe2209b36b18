//! Poincaré duality checks, intersection forms, signature and Lagrangians.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebra::Element;
use crate::cohomology::{Cohomology, CohomologyClass};
use crate::dga::FundamentalClass;
use crate::error::{DgaError, Result};
use crate::linalg::{det, rank_dense, to_int_row, Echelon, QVec};
use crate::rational::Q;

pub const DEFAULT_HEIGHT_BOUND: u32 = 10;

/// Upper limit on candidate vectors tried per isotropic-vector search.
const SEARCH_BUDGET: u64 = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tri {
    Yes,
    No,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairingCheck {
    pub degree: u32,
    pub dim_low: usize,
    pub dim_high: usize,
    pub perfect: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoincareReport {
    pub formal_dimension: i64,
    pub top_dimension: usize,
    pub pairings: Vec<PairingCheck>,
    /// Dimensions checked above the formal dimension (empty unless requested).
    pub spot_check_above: Vec<(u32, usize)>,
    pub passed: bool,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BilinearFormQ {
    pub matrix: Vec<Vec<Q>>,
    pub labels: Vec<String>,
}

impl BilinearFormQ {
    pub fn new(matrix: Vec<Vec<Q>>) -> Self {
        let labels = (0..matrix.len()).map(|i| format!("e{}", i + 1)).collect();
        Self { matrix, labels }
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::new(rows.iter().map(|r| r.iter().map(|&x| Q::from_integer(x.into())).collect()).collect())
    }

    pub fn dimension(&self) -> usize {
        self.matrix.len()
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.dimension();
        (0..n).all(|i| (0..n).all(|j| self.matrix[i][j] == self.matrix[j][i]))
    }

    pub fn eval(&self, u: &[Q], v: &[Q]) -> Q {
        let mut s = Q::zero();
        for (i, ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in v.iter().enumerate() {
                if !vj.is_zero() && !self.matrix[i][j].is_zero() {
                    s += ui * &self.matrix[i][j] * vj;
                }
            }
        }
        s
    }

    pub fn determinant(&self) -> Q {
        det(&self.matrix)
    }

    /// Integral entries and determinant ±1.
    pub fn is_unimodular(&self) -> bool {
        self.matrix.iter().flatten().all(|x| x.is_integer()) && self.determinant().abs().is_one()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WittVerdict {
    pub signature: i64,
    pub metabolic: Tri,
    pub lagrangian: Option<Vec<Vec<Q>>>,
    pub height_bound: u32,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BargeSullivanReport {
    pub form: BilinearFormQ,
    pub witt: WittVerdict,
    /// Witt class in the image of W0(Z) → W0(Q).
    pub condition_witt: Tri,
    /// Signature equals ⟨L(1), [X]⟩ = 0.
    pub condition_signature: Tri,
}

impl BargeSullivanReport {
    pub fn both_hold(&self) -> bool {
        self.condition_witt == Tri::Yes && self.condition_signature == Tri::Yes
    }
}

/// ⟨u, fc⟩ for a top-degree class u.
fn evaluate_top(fc: &FundamentalClass, top: &CohomologyClass, u: &CohomologyClass) -> Q {
    &u.coordinates[0] / (&fc.scale * &top.coordinates[0])
}

fn pairing_matrix(h: &Cohomology, fc: &FundamentalClass, top: &CohomologyClass, left: &[Element], right: &[Element]) -> Vec<Vec<Q>> {
    let alg = h.dga().algebra();
    let n = top.degree;
    left.iter()
        .map(|a| {
            right
                .iter()
                .map(|b| {
                    let p = alg.multiply(a, b);
                    let u = CohomologyClass { degree: n, coordinates: h.coordinates(n, &p) };
                    evaluate_top(fc, top, &u)
                })
                .collect()
        })
        .collect()
}

/// Validates the fundamental class and returns its class in H^n.
fn fundamental_class(h: &Cohomology, fc: &FundamentalClass) -> Result<CohomologyClass> {
    let c = h.class_of(&fc.representative)?;
    if c.is_zero() {
        return Err(DgaError::Precondition("fundamental class representative is exact".into()));
    }
    let n = h.dga().formal_dimension();
    if c.degree as i64 != n {
        return Err(DgaError::Precondition(format!(
            "fundamental class has degree {}, formal dimension is {n}",
            c.degree
        )));
    }
    if c.coordinates.len() != 1 {
        return Err(DgaError::Precondition(format!("top cohomology has dimension {}", c.coordinates.len())));
    }
    Ok(c)
}

pub fn check_poincare(h: &Cohomology, fc: &FundamentalClass, spot_check: bool) -> PoincareReport {
    let a = h.dga();
    let n = a.formal_dimension();
    let mut report = PoincareReport {
        formal_dimension: n,
        top_dimension: if n >= 0 { h.space(n as u32).dimension() } else { 0 },
        pairings: Vec::new(),
        spot_check_above: Vec::new(),
        passed: false,
        failure: None,
    };
    let top = match fundamental_class(h, fc) {
        Ok(t) => t,
        Err(e) => {
            report.failure = Some(match e {
                DgaError::Precondition(m) => m,
                other => other.to_string(),
            });
            return report;
        }
    };
    let n = n as u32;
    let degrees: Vec<u32> = (0..=n / 2).collect();
    report.pairings = degrees
        .iter()
        .map(|&j| {
            let lo = h.space(j);
            let hi = h.space(n - j);
            let perfect = lo.dimension() == hi.dimension()
                && (lo.dimension() == 0
                    || !det(&pairing_matrix(h, fc, &top, &lo.representatives, &hi.representatives)).is_zero());
            PairingCheck { degree: j, dim_low: lo.dimension(), dim_high: hi.dimension(), perfect }
        })
        .collect();
    if spot_check {
        let max_gen = a.generators().iter().map(|g| g.degree).max().unwrap_or(0);
        report.spot_check_above = (n + 1..=n + max_gen).map(|k| (k, h.space(k).dimension())).collect();
    }
    let bad_pairing = report.pairings.iter().find(|p| !p.perfect).map(|p| p.degree);
    let bad_spot = report.spot_check_above.iter().find(|(_, d)| *d > 0).map(|(k, _)| *k);
    report.failure = match (bad_pairing, bad_spot) {
        (Some(j), _) => Some(format!("pairing H^{j} x H^{} is not perfect", n - j)),
        (None, Some(k)) => Some(format!("H^{k} is nonzero above the formal dimension")),
        _ => None,
    };
    report.passed = report.failure.is_none();
    report
}

/// Middle-degree intersection form, over the canonical basis or `basis` when given.
pub fn intersection_form(h: &Cohomology, fc: &FundamentalClass, basis: Option<&[Element]>) -> Result<BilinearFormQ> {
    let a = h.dga();
    let n = a.formal_dimension();
    if n < 0 || n % 4 != 0 {
        return Err(DgaError::Unsupported(format!("formal dimension {n} is not divisible by 4")));
    }
    let top = fundamental_class(h, fc)?;
    let mid = (n / 2) as u32;
    let space = h.space(mid);
    let (elements, labels): (Vec<Element>, Vec<String>) = match basis {
        Some(b) => {
            let mut coords = Vec::new();
            for e in b {
                coords.push(h.class_in_degree(mid, e)?.coordinates);
            }
            if b.len() != space.dimension() || rank_dense(&coords) != space.dimension() {
                return Err(DgaError::Invalid(format!(
                    "supplied classes do not form a basis of H^{mid} (dimension {})",
                    space.dimension()
                )));
            }
            (b.to_vec(), b.iter().map(|e| format!("[{}]", a.fmt(e))).collect())
        }
        None => (
            space.representatives.clone(),
            space.representatives.iter().map(|e| format!("[{}]", a.fmt(e))).collect(),
        ),
    };
    let matrix = pairing_matrix(h, fc, &top, &elements, &elements);
    Ok(BilinearFormQ { matrix, labels })
}

/// Counts of positive and negative entries after congruence diagonalization.
pub fn inertia(f: &BilinearFormQ) -> (usize, usize) {
    let n = f.dimension();
    let mut a = f.matrix.clone();
    let (mut pos, mut neg) = (0, 0);
    for i in 0..n {
        if a[i][i].is_zero() {
            if let Some(j) = (i + 1..n).find(|&j| !a[j][j].is_zero()) {
                a.swap(i, j);
                for row in a.iter_mut() {
                    row.swap(i, j);
                }
            } else if let Some(j) = (i + 1..n).find(|&j| !a[i][j].is_zero()) {
                // e_i ← e_i + e_j gives a nonzero diagonal 2 a_ij.
                for k in 0..n {
                    let t = a[j][k].clone();
                    a[i][k] += t;
                }
                for k in 0..n {
                    let t = a[k][j].clone();
                    a[k][i] += t;
                }
            } else {
                continue;
            }
        }
        let p = a[i][i].clone();
        if p.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for j in i + 1..n {
            if a[j][i].is_zero() {
                continue;
            }
            let m = &a[j][i] / &p;
            for k in i..n {
                let t = &m * &a[i][k];
                a[j][k] -= t;
            }
            for k in i..n {
                let t = &m * &a[k][i];
                a[k][j] -= t;
            }
        }
    }
    (pos, neg)
}

pub fn signature(f: &BilinearFormQ) -> i64 {
    let (p, n) = inertia(f);
    p as i64 - n as i64
}

pub fn verify_lagrangian(f: &BilinearFormQ, subspace: &[Vec<Q>]) -> bool {
    let d = f.dimension();
    if subspace.iter().any(|v| v.len() != d) {
        return false;
    }
    if rank_dense(subspace) != subspace.len() || 2 * subspace.len() != d {
        return false;
    }
    subspace.iter().all(|u| subspace.iter().all(|v| f.eval(u, v).is_zero()))
}

fn gram(f: &BilinearFormQ, basis: &[Vec<Q>]) -> Vec<Vec<Q>> {
    basis.iter().map(|u| basis.iter().map(|v| f.eval(u, v)).collect()).collect()
}

/// Nonzero integer vector x with |x_i| ≤ bound and x^T G x = 0, searched by increasing height.
fn isotropic_search(g: &[Vec<Q>], bound: u32, budget: &mut u64) -> Option<Vec<i64>> {
    let d = g.len();
    let l = g.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let gi: Vec<Vec<i128>> = g
        .iter()
        .map(|r| r.iter().map(|x| (x.numer() * (&l / x.denom())).to_i128()).collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()?;
    let quad = |x: &[i64]| -> Option<i128> {
        let mut s: i128 = 0;
        for i in 0..d {
            for j in 0..d {
                let t = gi[i][j].checked_mul(x[i] as i128)?.checked_mul(x[j] as i128)?;
                s = s.checked_add(t)?;
            }
        }
        Some(s)
    };
    for h in 1..=bound as i64 {
        let side = (2 * h + 1) as u64;
        let Some(total) = side.checked_pow(d as u32) else { return None };
        let mut x = vec![0i64; d];
        for idx in 0..total {
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            let mut r = idx;
            for xi in x.iter_mut() {
                *xi = (r % side) as i64 - h;
                r /= side;
            }
            let first = x.iter().find(|&&v| v != 0).copied();
            let maxabs = x.iter().map(|v| v.abs()).max().unwrap_or(0);
            if first.is_some_and(|v| v > 0) && maxabs == h && quad(&x) == Some(0) {
                return Some(x);
            }
        }
    }
    None
}

/// Searches for a Lagrangian by splitting off hyperbolic planes.
pub fn find_lagrangian(f: &BilinearFormQ, height_bound: u32) -> WittVerdict {
    let sig = signature(f);
    let d = f.dimension();
    let verdict = |metabolic, lagrangian, reason: &str| WittVerdict {
        signature: sig,
        metabolic,
        lagrangian,
        height_bound,
        reason: reason.to_string(),
    };
    let mut basis: Vec<Vec<Q>> =
        (0..d).map(|i| (0..d).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect();
    let mut lag: Vec<Vec<Q>> = Vec::new();
    let mut budget = SEARCH_BUDGET;
    loop {
        if basis.is_empty() {
            return verdict(Tri::Yes, Some(lag), "hyperbolic splitting complete");
        }
        let g = gram(f, &basis);
        let residual = BilinearFormQ::new(g.clone());
        if residual.determinant().is_zero() {
            return verdict(Tri::Undetermined, None, "form is degenerate");
        }
        if basis.len() % 2 == 1 {
            return verdict(Tri::No, None, "residual form has odd dimension");
        }
        let (p, n) = inertia(&residual);
        if p == 0 || n == 0 {
            return verdict(Tri::No, None, "residual form is definite");
        }
        if p != n {
            return verdict(Tri::No, None, "residual form has nonzero signature");
        }
        let Some(x) = isotropic_search(&g, height_bound, &mut budget) else {
            return verdict(Tri::Undetermined, None, "no isotropic vector within the height bound");
        };
        let v: Vec<Q> = (0..d)
            .map(|k| basis.iter().zip(&x).map(|(b, &c)| &b[k] * Q::from_integer(c.into())).sum())
            .collect();
        let partner = basis.iter().find(|b| !f.eval(&v, b).is_zero()).expect("nondegenerate residual");
        let bvw = f.eval(&v, partner);
        let w: Vec<Q> = partner.iter().map(|c| c / &bvw).collect();
        let half = f.eval(&w, &w) / Q::from_integer(2.into());
        let w: Vec<Q> = w.iter().zip(&v).map(|(a, b)| a - &half * b).collect();
        let projected: Vec<Vec<Q>> = basis
            .iter()
            .map(|x| {
                let (a, b) = (f.eval(x, &w), f.eval(x, &v));
                x.iter().zip(&v).zip(&w).map(|((xi, vi), wi)| xi - &a * vi - &b * wi).collect()
            })
            .collect();
        let mut ech = Echelon::new(d);
        let mut next = Vec::new();
        for p in projected {
            let qv: QVec = p.iter().cloned().enumerate().filter(|(_, c)| !c.is_zero()).collect();
            if ech.insert(to_int_row(&qv).0).is_some() {
                next.push(p);
            }
        }
        debug_assert_eq!(next.len() + 2, basis.len());
        lag.push(v);
        basis = next;
    }
}

pub fn barge_sullivan_report(h: &Cohomology, fc: &FundamentalClass, basis: Option<&[Element]>, height_bound: u32) -> Result<BargeSullivanReport> {
    let form = intersection_form(h, fc, basis)?;
    let witt = find_lagrangian(&form, height_bound);
    let condition_witt = match witt.metabolic {
        Tri::Yes => Tri::Yes,
        _ => Tri::Undetermined,
    };
    let condition_signature = if witt.signature == 0 { Tri::Yes } else { Tri::No };
    Ok(BargeSullivanReport { form, witt, condition_witt, condition_signature })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn a1_form() -> BilinearFormQ {
        BilinearFormQ::from_ints(&[&[0, 0, 0, -1], &[0, 0, 1, 0], &[0, 1, 0, 0], &[-1, 0, 0, 1]])
    }

    #[test]
    fn signatures() {
        assert_eq!(signature(&a1_form()), 0);
        assert_eq!(signature(&BilinearFormQ::from_ints(&[&[0, -1], &[-1, 1]])), 0);
        assert_eq!(signature(&BilinearFormQ::from_ints(&[&[1, 0], &[0, 1]])), 2);
        assert_eq!(signature(&BilinearFormQ::from_ints(&[&[0, 1], &[1, 0]])), 0);
        assert_eq!(signature(&BilinearFormQ::from_ints(&[&[-2, 1], &[1, -3]])), -2);
    }

    #[test]
    fn lagrangians() {
        let e = |i: usize, d: usize| (0..d).map(|j| if i == j { q(1) } else { q(0) }).collect::<Vec<_>>();
        assert!(verify_lagrangian(&a1_form(), &[e(0, 4), e(1, 4)]));
        let h = BilinearFormQ::from_ints(&[&[0, -1], &[-1, 1]]);
        assert!(verify_lagrangian(&h, &[e(0, 2)]));
        let id = BilinearFormQ::from_ints(&[&[1, 0], &[0, 1]]);
        assert!(!verify_lagrangian(&id, &[e(0, 2)]));
        assert!(!verify_lagrangian(&id, &[vec![q(1), q(1)]]));

        for f in [a1_form(), h] {
            let v = find_lagrangian(&f, DEFAULT_HEIGHT_BOUND);
            assert_eq!(v.metabolic, Tri::Yes);
            assert!(verify_lagrangian(&f, v.lagrangian.as_ref().unwrap()));
        }
        assert_eq!(find_lagrangian(&id, DEFAULT_HEIGHT_BOUND).metabolic, Tri::No);
        let empty = find_lagrangian(&BilinearFormQ::new(Vec::new()), DEFAULT_HEIGHT_BOUND);
        assert_eq!(empty.metabolic, Tri::Yes);
        assert_eq!(empty.lagrangian, Some(Vec::new()));
        // x^2 - 2y^2 has no rational isotropic vector.
        let aniso = BilinearFormQ::from_ints(&[&[1, 0], &[0, -2]]);
        assert_eq!(find_lagrangian(&aniso, 5).metabolic, Tri::Undetermined);
    }

    #[test]
    fn unimodular() {
        assert!(a1_form().is_unimodular());
        assert!(!BilinearFormQ::from_ints(&[&[2, 0], &[0, 1]]).is_unimodular());
    }
}
