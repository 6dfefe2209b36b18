//! Degreewise cohomology by exact elimination.
//!
//! For a connected DGA the space H^n is computed directly: the reduced echelon
//! form of d_n: C^n → C^{n+1} splits the basis of C^n into pivot and free
//! columns, a cocycle is determined by its free coordinates, and the image of
//! d_{n-1} is echelonized inside those coordinates. The remaining free columns
//! index the classes.
//!
//! When the generators split into d-closed blocks the DGA is a tensor product
//! and H^n is assembled from the blocks (Künneth), which keeps products such as
//! A3 ⊗ A3 tractable.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebra::{Element, Monomial};
use crate::dga::DgaSpec;
use crate::error::{DgaError, Result};
use crate::exec::Exec;
use crate::linalg::{to_int_row, Echelon, QVec, Rref};
use crate::rational::Q;

#[derive(Clone, Debug, PartialEq)]
pub struct CohomologyClass {
    pub degree: u32,
    pub coordinates: Vec<Q>,
}

impl CohomologyClass {
    pub fn is_zero(&self) -> bool {
        self.coordinates.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, k: &Q) -> Self {
        Self { degree: self.degree, coordinates: self.coordinates.iter().map(|c| c * k).collect() }
    }
}

#[derive(Debug)]
pub struct CohomologySpace {
    pub degree: u32,
    /// Cocycles whose classes form a basis of H^n.
    pub representatives: Vec<Element>,
    /// dim ker d_n and dim im d_{n-1} when computed directly.
    pub cocycles: Option<usize>,
    pub coboundaries: Option<usize>,
    proj: Projection,
}

impl CohomologySpace {
    pub fn dimension(&self) -> usize {
        self.representatives.len()
    }
}

#[derive(Debug)]
enum Projection {
    Direct {
        index: HashMap<Monomial, usize>,
        kernel: Rref,
        image: Rref,
        class_pos: HashMap<usize, usize>,
    },
    /// Basis tuples `(degree, index)` per factor.
    Product { tuples: HashMap<Vec<(u32, usize)>, usize> },
}

struct Factor {
    gens: Vec<usize>,
    engine: Cohomology,
}

pub struct Cohomology {
    dga: DgaSpec,
    exec: Exec,
    factors: Vec<Factor>,
    cache: Mutex<HashMap<u32, Arc<CohomologySpace>>>,
    bound: OnceLock<Option<u32>>,
}

impl Cohomology {
    pub fn new(dga: &DgaSpec) -> Self {
        Self::with_exec(dga, Exec::default())
    }

    pub fn with_exec(dga: &DgaSpec, exec: Exec) -> Self {
        let comps = dga.components();
        let factors = if comps.len() > 1 {
            comps
                .into_iter()
                .map(|gens| Factor { engine: Cohomology::with_exec(&dga.restrict(&gens), exec), gens })
                .collect()
        } else {
            Vec::new()
        };
        Self { dga: dga.clone(), exec, factors, cache: Mutex::new(HashMap::new()), bound: OnceLock::new() }
    }

    /// Engine that never splits into tensor factors.
    pub fn direct(dga: &DgaSpec, exec: Exec) -> Self {
        Self { dga: dga.clone(), exec, factors: Vec::new(), cache: Mutex::new(HashMap::new()), bound: OnceLock::new() }
    }

    pub fn dga(&self) -> &DgaSpec {
        &self.dga
    }

    pub fn is_product(&self) -> bool {
        !self.factors.is_empty()
    }

    pub fn space(&self, n: u32) -> Arc<CohomologySpace> {
        if let Some(s) = self.cache.lock().unwrap().get(&n) {
            return s.clone();
        }
        let s = Arc::new(if self.is_product() { self.product_space(n) } else { self.direct_space(n) });
        self.cache.lock().unwrap().entry(n).or_insert(s).clone()
    }

    /// Spaces for every degree in `range`, computed in parallel.
    pub fn spaces(&self, range: std::ops::RangeInclusive<u32>) -> Vec<Arc<CohomologySpace>> {
        let degrees: Vec<u32> = range.collect();
        self.exec.map(&degrees, |&n| self.space(n))
    }

    fn d_vec(&self, m: &Monomial, index: &HashMap<Monomial, usize>) -> QVec {
        let mut v: QVec = self
            .dga
            .d_monomial(m)
            .into_terms()
            .map(|(t, c)| (index[&t], c))
            .collect();
        v.sort_by_key(|(i, _)| *i);
        v
    }

    fn direct_space(&self, n: u32) -> CohomologySpace {
        let alg = self.dga.algebra();
        let basis = alg.basis_of_degree(n);
        let index: HashMap<Monomial, usize> = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let above: HashMap<Monomial, usize> =
            alg.basis_of_degree(n + 1).into_iter().enumerate().map(|(i, m)| (m, i)).collect();
        let below = if n == 0 { Vec::new() } else { alg.basis_of_degree(n - 1) };

        // Rows of d_n indexed by target monomials.
        let cols = self.exec.map(&basis, |m| self.d_vec(m, &above));
        let mut rows: Vec<QVec> = vec![Vec::new(); above.len()];
        for (j, col) in cols.into_iter().enumerate() {
            for (t, c) in col {
                rows[t].push((j, c));
            }
        }
        let kernel = Rref::from_rows(rows.into_iter().filter(|r| !r.is_empty()).collect(), basis.len());

        let images = self.exec.map(&below, |m| {
            let v = self.d_vec(m, &index);
            v.into_iter().filter(|(i, _)| !kernel.is_pivot(*i)).collect::<QVec>()
        });
        let image = Rref::from_rows(images, basis.len());

        let free: Vec<usize> = (0..basis.len()).filter(|&j| !kernel.is_pivot(j)).collect();
        let classes: Vec<usize> = free.iter().copied().filter(|&j| !image.is_pivot(j)).collect();
        let representatives = classes
            .iter()
            .map(|&f| {
                let mut e = Element::from_term(basis[f].clone(), Q::one());
                for p in kernel.pivot_columns() {
                    let r = kernel.entry(p, f);
                    if !r.is_zero() {
                        e.add_term(basis[p].clone(), -r);
                    }
                }
                e
            })
            .collect();
        let class_pos = classes.iter().enumerate().map(|(k, &f)| (f, k)).collect();
        CohomologySpace {
            degree: n,
            representatives,
            cocycles: Some(free.len()),
            coboundaries: Some(image.rank()),
            proj: Projection::Direct { index, kernel, image, class_pos },
        }
    }

    /// Degree above which cohomology vanishes, when the DGA is minimal, simply
    /// connected and every even generator is nilpotent in cohomology (elliptic).
    pub fn vanishing_bound(&self) -> Option<u32> {
        *self.bound.get_or_init(|| {
            let r = self.dga.structural_report();
            let fd = self.dga.formal_dimension();
            if !(r.minimal && r.simply_connected) || fd < 0 {
                return None;
            }
            let all_nilpotent = (0..self.dga.generators().len())
                .filter(|&g| !self.dga.algebra().is_odd(g))
                .all(|g| self.nilpotency_check(g, None).is_some());
            all_nilpotent.then_some(fd as u32)
        })
    }

    fn factor_degrees(&self, i: usize, upto: u32) -> Vec<u32> {
        let f = &self.factors[i].engine;
        let top = f.vanishing_bound().map_or(upto, |b| b.min(upto));
        (0..=top).filter(|&d| f.space(d).dimension() > 0).collect()
    }

    fn product_space(&self, n: u32) -> CohomologySpace {
        let k = self.factors.len();
        let degs: Vec<Vec<u32>> = (0..k).map(|i| self.factor_degrees(i, n)).collect();
        let mut tuples: Vec<Vec<(u32, usize)>> = Vec::new();
        fn rec(
            me: &Cohomology,
            degs: &[Vec<u32>],
            i: usize,
            remaining: u32,
            cur: &mut Vec<(u32, usize)>,
            out: &mut Vec<Vec<(u32, usize)>>,
        ) {
            if i == degs.len() {
                if remaining == 0 {
                    out.push(cur.clone());
                }
                return;
            }
            for &d in &degs[i] {
                if d > remaining {
                    break;
                }
                if i + 1 == degs.len() && d != remaining {
                    continue;
                }
                let dim = me.factors[i].engine.space(d).dimension();
                for j in 0..dim {
                    cur.push((d, j));
                    rec(me, degs, i + 1, remaining - d, cur, out);
                    cur.pop();
                }
            }
        }
        rec(self, &degs, 0, n, &mut Vec::new(), &mut tuples);
        let alg = self.dga.algebra();
        let representatives = tuples
            .iter()
            .map(|t| {
                let mut e: Element = alg.unit();
                for (i, &(d, j)) in t.iter().enumerate() {
                    let f = &self.factors[i];
                    let r = &f.engine.space(d).representatives[j];
                    e = alg.multiply(&e, &self.dga.embed_element(&f.gens, r));
                }
                e
            })
            .collect();
        let tuples = tuples.into_iter().enumerate().map(|(i, t)| (t, i)).collect();
        CohomologySpace {
            degree: n,
            representatives,
            cocycles: None,
            coboundaries: None,
            proj: Projection::Product { tuples },
        }
    }

    /// Class coordinates of a single monomial under the chain-level projection.
    pub fn project_monomial(&self, m: &Monomial) -> Vec<(usize, Q)> {
        let n = m.degree();
        let space = self.space(n);
        match &space.proj {
            Projection::Direct { index, kernel, image, class_pos } => {
                let j = index[m];
                if kernel.is_pivot(j) || class_pos.is_empty() {
                    return Vec::new();
                }
                let r = image.reduce(&vec![(j, Q::one())]);
                r.into_iter().filter_map(|(c, x)| class_pos.get(&c).map(|&k| (k, x))).collect()
            }
            Projection::Product { tuples } => {
                if tuples.is_empty() {
                    return Vec::new();
                }
                let alg = self.dga.algebra();
                let mut parts = Vec::with_capacity(self.factors.len());
                let mut prod = alg.one_monomial();
                let mut negative = false;
                for f in &self.factors {
                    let sub = f.engine.dga.algebra();
                    let exps = f.gens.iter().map(|&g| m.exp(g)).collect();
                    let sm = sub.monomial_from_exps(exps).unwrap();
                    let (neg, p) = alg.monomial_mul(&prod, &self.dga.embed(&f.gens, &sm)).unwrap();
                    negative ^= neg;
                    prod = p;
                    parts.push(sm);
                }
                debug_assert_eq!(&prod, m);
                let mut acc: Vec<(Vec<(u32, usize)>, Q)> =
                    vec![(Vec::new(), if negative { -Q::one() } else { Q::one() })];
                for (i, sm) in parts.iter().enumerate() {
                    let f = &self.factors[i].engine;
                    let d = sm.degree();
                    if f.vanishing_bound().is_some_and(|b| d > b) {
                        return Vec::new();
                    }
                    let coords = f.project_monomial(sm);
                    if coords.is_empty() {
                        return Vec::new();
                    }
                    let mut next = Vec::with_capacity(acc.len() * coords.len());
                    for (t, c) in &acc {
                        for (k, x) in &coords {
                            let mut t2 = t.clone();
                            t2.push((d, *k));
                            next.push((t2, c * x));
                        }
                    }
                    acc = next;
                }
                let mut out: Vec<(usize, Q)> = acc.into_iter().map(|(t, c)| (tuples[&t], c)).collect();
                out.sort_by_key(|(k, _)| *k);
                out
            }
        }
    }

    /// Degree-`n` monomials with a nonzero projection to H^n.
    pub fn projecting_monomials(&self, n: u32) -> Vec<Monomial> {
        let space = self.space(n);
        if space.dimension() == 0 {
            return Vec::new();
        }
        match &space.proj {
            Projection::Direct { index, .. } => {
                let mut out: Vec<Monomial> =
                    index.keys().filter(|m| !self.project_monomial(m).is_empty()).cloned().collect();
                out.sort();
                out
            }
            Projection::Product { tuples } => {
                let alg = self.dga.algebra();
                let shapes: BTreeSet<Vec<u32>> = tuples.keys().map(|t| t.iter().map(|(d, _)| *d).collect()).collect();
                let mut out = BTreeSet::new();
                for shape in shapes {
                    let mut acc = vec![alg.one_monomial()];
                    for (i, &d) in shape.iter().enumerate() {
                        let f = &self.factors[i];
                        let parts: Vec<Monomial> =
                            f.engine.projecting_monomials(d).iter().map(|m| self.dga.embed(&f.gens, m)).collect();
                        acc = acc
                            .iter()
                            .flat_map(|a| parts.iter().filter_map(move |b| alg.monomial_mul(a, b).map(|(_, m)| m)))
                            .collect();
                    }
                    out.extend(acc);
                }
                out.into_iter().collect()
            }
        }
    }

    /// Coordinates of the projection of a degree-`n` chain (need not be a cocycle).
    pub fn coordinates(&self, n: u32, e: &Element) -> Vec<Q> {
        let dim = self.space(n).dimension();
        let mut out = vec![Q::zero(); dim];
        if dim == 0 {
            return out;
        }
        for (m, c) in e.terms() {
            debug_assert_eq!(m.degree(), n);
            for (k, x) in self.project_monomial(m) {
                out[k] += c * &x;
            }
        }
        out
    }

    fn require_cocycle(&self, c: &Element) -> Result<u32> {
        let n = match c.homogeneous_degree() {
            Some(n) => n,
            None if c.is_zero() => 0,
            None => return Err(DgaError::Inhomogeneous(self.dga.fmt(c))),
        };
        let dc = self.dga.differential(c);
        if !dc.is_zero() {
            return Err(DgaError::NotCocycle(self.dga.fmt(&dc)));
        }
        Ok(n)
    }

    pub fn class_of(&self, c: &Element) -> Result<CohomologyClass> {
        let n = self.require_cocycle(c)?;
        Ok(CohomologyClass { degree: n, coordinates: self.coordinates(n, c) })
    }

    /// Class of a cocycle of known degree (accepts the zero element).
    pub fn class_in_degree(&self, n: u32, c: &Element) -> Result<CohomologyClass> {
        if c.is_zero() {
            return Ok(CohomologyClass { degree: n, coordinates: vec![Q::zero(); self.space(n).dimension()] });
        }
        let got = self.require_cocycle(c)?;
        if got != n {
            return Err(DgaError::Invalid(format!("element has degree {got}, expected {n}")));
        }
        Ok(CohomologyClass { degree: n, coordinates: self.coordinates(n, c) })
    }

    pub fn element_of(&self, u: &CohomologyClass) -> Element {
        let s = self.space(u.degree);
        let mut e = Element::zero();
        for (c, r) in u.coordinates.iter().zip(&s.representatives) {
            if !c.is_zero() {
                e.add_assign(&r.scale(c));
            }
        }
        e
    }

    pub fn cup(&self, u: &CohomologyClass, v: &CohomologyClass) -> CohomologyClass {
        let p = self.dga.algebra().multiply(&self.element_of(u), &self.element_of(v));
        let n = u.degree + v.degree;
        CohomologyClass { degree: n, coordinates: self.coordinates(n, &p) }
    }

    /// `Some(u)` with d(u) = c, or `None` when c is not exact.
    pub fn coboundary_witness(&self, c: &Element) -> Result<Option<Element>> {
        let n = self.require_cocycle(c)?;
        if c.is_zero() {
            return Ok(Some(Element::zero()));
        }
        if n == 0 {
            return Ok(None);
        }
        if self.space(n).dimension() > 0 && !self.coordinates(n, c).iter().all(Zero::is_zero) {
            return Ok(None);
        }
        let alg = self.dga.algebra();
        let basis = alg.basis_of_degree(n);
        let index: HashMap<Monomial, usize> = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let below = alg.basis_of_degree(n - 1);
        let limit = basis.len();
        let marker = limit + below.len();
        let rows = self.exec.map_range(0..below.len(), |j| {
            let mut v = self.d_vec(&below[j], &index);
            v.push((limit + j, Q::one()));
            to_int_row(&v).0
        });
        let mut ech = Echelon::new(limit);
        for r in rows {
            ech.insert(r);
        }
        let mut target: QVec = c.terms().map(|(m, x)| (index[m], x.clone())).collect();
        target.sort_by_key(|(i, _)| *i);
        target.push((marker, Q::one()));
        let reduced = ech.reduce(to_int_row(&target).0);
        if reduced.iter().any(|(col, _)| *col < limit) {
            return Ok(None);
        }
        let scale: BigInt = reduced.iter().find(|(col, _)| *col == marker).map(|(_, x)| x.clone()).unwrap();
        let s = Q::from_integer(scale);
        let mut u = Element::zero();
        for (col, x) in &reduced {
            if *col >= limit && *col < marker {
                u.add_term(below[col - limit].clone(), -Q::from_integer(x.clone()) / &s);
            }
        }
        debug_assert_eq!(&self.dga.differential(&u), c);
        Ok(Some(u))
    }

    /// Smallest k ≤ bound with [g]^k = 0; default bound ⌊fd/|g|⌋ + 1.
    pub fn nilpotency_check(&self, g: usize, bound: Option<u32>) -> Option<u32> {
        let deg = self.dga.generators()[g].degree;
        let fd = self.dga.formal_dimension().max(0) as u32;
        let bound = bound.unwrap_or(fd / deg + 1);
        let alg = self.dga.algebra();
        let x: Element = alg.generator_element(g);
        if !self.dga.differential(&x).is_zero() {
            return None;
        }
        (1..=bound).find(|&k| {
            let p = alg.power(&x, k);
            p.is_zero() || self.coordinates(k * deg, &p).iter().all(Zero::is_zero)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::fixtures;

    fn el(a: &DgaSpec, s: &str) -> Element {
        parse_expr(a.algebra(), &a.aliases, s).unwrap()
    }

    #[test]
    fn a1_small_degrees() {
        let a = fixtures::a1().spec;
        let h = Cohomology::new(&a);
        assert_eq!(h.space(0).dimension(), 1);
        assert_eq!(h.space(4).dimension(), 2);
        assert_eq!(h.space(3).dimension(), 0);
        let s = h.space(10);
        assert_eq!(s.cocycles.unwrap() - s.coboundaries.unwrap(), s.dimension());
    }

    #[test]
    fn class_and_witness() {
        let a = fixtures::a1().spec;
        let h = Cohomology::new(&a);
        assert!(h.class_of(&el(&a, "x1^3 x2")).unwrap().is_zero());
        assert!(!h.class_of(&el(&a, "x2^16")).unwrap().is_zero());
        assert!(matches!(h.class_of(&el(&a, "y1")), Err(DgaError::NotCocycle(_))));
        let c = el(&a, "x1^3 x2^2");
        let u = h.coboundary_witness(&c).unwrap().unwrap();
        assert_eq!(a.differential(&u), c);
        assert_eq!(h.coboundary_witness(&Element::zero()).unwrap(), Some(Element::zero()));
        let x1 = h.class_of(&el(&a, "x1")).unwrap();
        assert_eq!(h.cup(&x1, &x1), h.class_of(&el(&a, "x1^2")).unwrap());
    }

    #[test]
    fn sphere() {
        let s = fixtures::s2().spec;
        let h = Cohomology::new(&s);
        let dims: Vec<usize> = (0..6).map(|n| h.space(n).dimension()).collect();
        assert_eq!(dims, vec![1, 0, 1, 0, 0, 0]);
        assert_eq!(h.nilpotency_check(0, None), Some(2));
        assert_eq!(h.vanishing_bound(), Some(2));
    }

    #[test]
    fn kunneth_matches_direct() {
        let s = fixtures::s2().spec;
        let t = DgaSpec::tensor_product(&s, &s);
        let prod = Cohomology::new(&t);
        assert!(prod.is_product());
        let direct = Cohomology::direct(&t, Exec::Sequential);
        let dims: Vec<usize> = (0..7).map(|n| prod.space(n).dimension()).collect();
        let direct_dims: Vec<usize> = (0..7).map(|n| direct.space(n).dimension()).collect();
        assert_eq!(dims, vec![1, 0, 2, 0, 1, 0, 0]);
        assert_eq!(dims, direct_dims);
        let top = el(&t, "e_a e_b");
        assert_eq!(prod.class_of(&top).unwrap().coordinates.len(), 1);
        assert!(!prod.class_of(&top).unwrap().is_zero());
        let ex = el(&t, "e_a^2");
        assert!(prod.class_of(&ex).unwrap().is_zero());
    }
}
