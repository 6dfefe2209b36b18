//! Checks shared by the property suites and the acceptance run.
#![allow(dead_code)]

use dgalab::algebra::{Element, GradedAlgebra};
use dgalab::cohomology::Cohomology;
use dgalab::dga::{ConcreteEndo, DgaSpec, FundamentalClass};
use dgalab::inflexibility::*;
use dgalab::rational::qf;
use dgalab::Q;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

pub type Picks = Vec<(usize, i64, i64)>;

pub fn picks(max_terms: usize) -> impl Strategy<Value = Picks> {
    prop::collection::vec((0usize..10_000, -6i64..=6, 1i64..=4), 1..=max_terms)
}

pub fn element(alg: &GradedAlgebra, n: u32, p: &Picks) -> Element {
    let basis = alg.basis_of_degree(n);
    let mut e = Element::zero();
    if basis.is_empty() {
        return e;
    }
    for &(i, num, den) in p {
        e.add_term(basis[i % basis.len()].clone(), qf(num, den));
    }
    e
}

/// Degrees with a nonempty monomial basis of manageable size.
pub fn usable_degrees(alg: &GradedAlgebra, max_degree: u32) -> Vec<u32> {
    (0..=max_degree).filter(|&n| (1..=300).contains(&alg.basis_of_degree(n).len())).collect()
}

pub fn sign(neg: bool) -> Q {
    if neg {
        -Q::one()
    } else {
        Q::one()
    }
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() })
}

/// Associativity, graded commutativity, Leibniz, d² = 0 and distributivity on random
/// homogeneous elements.
pub fn algebra_laws(a: &DgaSpec, cases: u32) -> Result<(), String> {
    let alg = a.algebra();
    let deg = prop::sample::select(usable_degrees(alg, 40));
    let strat = (deg.clone(), deg.clone(), deg, picks(4), picks(4), picks(4));
    runner(cases)
        .run(&strat, |(p, r, s, x, y, z)| {
            let (u, v, w) = (element(alg, p, &x), element(alg, r, &y), element(alg, s, &z));
            let uv = alg.multiply(&u, &v);
            prop_assert_eq!(alg.multiply(&uv, &w), alg.multiply(&u, &alg.multiply(&v, &w)));
            let vu = alg.multiply(&v, &u).scale(&sign(p * r % 2 == 1));
            prop_assert_eq!(&uv, &vu);
            let leibniz = alg
                .multiply(&a.differential(&u), &v)
                .add(&alg.multiply(&u, &a.differential(&v)).scale(&sign(p % 2 == 1)));
            prop_assert_eq!(a.differential(&uv), leibniz);
            prop_assert!(a.differential(&a.differential(&u)).is_zero());
            let v2 = element(alg, r, &z);
            prop_assert_eq!(alg.multiply(&u, &v.add(&v2)), uv.add(&alg.multiply(&u, &v2)));
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Random cocycles keep their coordinates after adding a random coboundary.
/// Returns the degrees tested.
pub fn coset_stability(a: &DgaSpec, cases: u32) -> Result<Vec<u32>, String> {
    let alg = a.algebra();
    let h = Cohomology::new(a);
    let fd = a.formal_dimension() as u32;
    let mut tested = Vec::new();
    for n in [2, 4, fd / 2, fd] {
        let space = h.space(n);
        if space.dimension() == 0 || alg.basis_of_degree(n - 1).is_empty() {
            continue;
        }
        tested.push(n);
        let strat = (prop::collection::vec((-5i64..=5, 1i64..=3), space.dimension()), picks(5));
        runner(cases)
            .run(&strat, |(coeffs, up)| {
                let c: Vec<Q> = coeffs.iter().map(|&(x, y)| qf(x, y)).collect();
                let mut z = Element::zero();
                for (rep, k) in space.representatives.iter().zip(&c) {
                    z.add_assign(&rep.scale(k));
                }
                let perturbed = z.add(&a.differential(&element(alg, n - 1, &up)));
                prop_assert_eq!(h.class_in_degree(n, &perturbed).unwrap().coordinates, c);
                Ok(())
            })
            .map_err(|e| format!("degree {n}: {e}"))?;
    }
    if tested.is_empty() {
        return Err("no degree tested".into());
    }
    Ok(tested)
}

/// Concrete solutions (identity, zero, extra maps, leaf specializations) satisfy the
/// extracted system, have degree P, and land in a leaf whose verdict matches.
/// Returns the number of samples checked.
pub fn soundness(f: &DgaSpec, fc: &FundamentalClass, extra: &[ConcreteEndo]) -> Result<usize, String> {
    let h = Cohomology::new(f);
    let config = CertifyConfig::default();
    let analysis = analyze(&h, fc, &config).map_err(|e| e.to_string())?;
    let tree = analysis.solve(&h, config.solve);
    let an = &analysis.ansatz;
    let mut samples = vec![an.identity_assignment(f.algebra()), an.zero_assignment()];
    samples.extend(extra.iter().map(|e| an.coordinates_of(e)));
    let mut specialized = 0;
    for leaf in tree.leaves() {
        let state = leaf.leaf.as_ref().unwrap();
        for free in [Q::zero(), Q::one()] {
            if let Some(vals) = state.specialize(an.len(), &free) {
                specialized += 1;
                samples.push(vals);
            }
        }
    }
    if specialized == 0 {
        return Err("no leaf could be fully specialized".into());
    }
    for vals in &samples {
        if !analysis.system.satisfied_by(vals) {
            return Err("sample violates constraints".into());
        }
        let d = degree_of_with(&h, &an.specialize(vals), fc).map_err(|e| e.to_string())?;
        if d != eval_poly(&analysis.degree, vals) {
            return Err(format!("degree_of gives {d}, P disagrees"));
        }
        let path = tree.route(vals).map_err(|e| format!("solution does not route to one leaf: {e:?}"))?;
        let mut node = &tree;
        for i in path {
            node = &node.children[i];
        }
        let ok = match node.verdict.as_ref().unwrap() {
            LeafVerdict::DegreeZero => d.is_zero(),
            LeafVerdict::UnitDegree { .. } => d.abs().is_one(),
            _ => false,
        };
        if !ok {
            return Err(format!("solution with degree {d} reached {:?}", node.verdict));
        }
    }
    Ok(samples.len())
}

/// The map exchanging the two tensor factors of a square.
pub fn swap(t: &DgaSpec, n: usize) -> ConcreteEndo {
    let images = (0..2 * n).map(|g| t.algebra().generator_element((g + n) % (2 * n))).collect();
    ConcreteEndo { images }
}

pub fn tensor_square(f: &dgalab::format::DgaFile) -> (DgaSpec, FundamentalClass) {
    let t = DgaSpec::tensor_product(&f.spec, &f.spec);
    let fc = f.fundamental.as_ref().unwrap();
    let fc = FundamentalClass::tensor(&f.spec, fc, &f.spec, fc, &t);
    (t, fc)
}
