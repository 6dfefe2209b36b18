//! Randomized checks of the algebraic invariants, each against an oracle that
//! shares no code with the implementation under test.

use std::collections::BTreeSet;

mod common;

use common::sign;
use dgalab::algebra::{Element, GradedAlgebra, Generator, Monomial};
use dgalab::dga::DgaSpec;
use dgalab::fixtures;
use dgalab::poincare::{inertia, signature, BilinearFormQ};
use dgalab::rational::q;
use dgalab::Q;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

#[test]
fn algebra_laws_on_fixtures() {
    for (name, f) in fixtures::all() {
        common::algebra_laws(&f.spec, 1000).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

fn word(m: &Monomial) -> Vec<usize> {
    m.exps().iter().enumerate().flat_map(|(g, &e)| std::iter::repeat(g).take(e as usize)).collect()
}

/// Sorts a word by adjacent swaps, tracking the Koszul sign; `None` if an odd generator repeats.
fn sort_word(alg: &GradedAlgebra, mut w: Vec<usize>) -> Option<(bool, Vec<usize>)> {
    let mut neg = false;
    for i in 1..w.len() {
        let mut j = i;
        while j > 0 && w[j - 1] > w[j] {
            if alg.is_odd(w[j - 1]) && alg.is_odd(w[j]) {
                neg = !neg;
            }
            w.swap(j - 1, j);
            j -= 1;
        }
    }
    if w.windows(2).any(|p| p[0] == p[1] && alg.is_odd(p[0])) {
        return None;
    }
    Some((neg, w))
}

fn from_word(alg: &GradedAlgebra, w: &[usize]) -> Monomial {
    let mut exps = vec![0u16; alg.len()];
    for &g in w {
        exps[g] += 1;
    }
    alg.monomial_from_exps(exps).unwrap()
}

fn word_product(alg: &GradedAlgebra, a: &Monomial, b: &Monomial) -> Element {
    let mut w = word(a);
    w.extend(word(b));
    match sort_word(alg, w) {
        Some((neg, s)) => Element::from_term(from_word(alg, &s), sign(neg)),
        None => Element::zero(),
    }
}

/// d on a monomial by the Leibniz rule over its letters, one letter at a time.
fn d_by_letters(a: &DgaSpec, m: &Monomial) -> Element {
    let alg = a.algebra();
    let w = word(m);
    let mut out = Element::zero();
    let mut passed = 0u32;
    for i in 0..w.len() {
        let s = sign(passed % 2 == 1);
        for (dm, c) in a.generator_differential(w[i]).terms() {
            let mut letters = w[..i].to_vec();
            letters.extend(word(dm));
            letters.extend_from_slice(&w[i + 1..]);
            if let Some((neg, sorted)) = sort_word(alg, letters) {
                out.add_term(from_word(alg, &sorted), c * &s * sign(neg));
            }
        }
        passed += alg.generators()[w[i]].degree;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn product_signs_match_word_sorting(fx in 0usize..4, p in 0u32..30, r in 0u32..30, i in 0usize..10_000, j in 0usize..10_000) {
        let f = &fixtures::all()[fx].1;
        let alg = f.spec.algebra();
        let (bp, br) = (alg.basis_of_degree(p), alg.basis_of_degree(r));
        prop_assume!(!bp.is_empty() && !br.is_empty());
        let (a, b) = (&bp[i % bp.len()], &br[j % br.len()]);
        let direct = alg.multiply(&Element::from_term(a.clone(), q(1)), &Element::from_term(b.clone(), q(1)));
        prop_assert_eq!(direct, word_product(alg, a, b));
    }

    #[test]
    fn differential_matches_letterwise_leibniz(fx in 0usize..4, n in 0u32..40, i in 0usize..10_000) {
        let f = &fixtures::all()[fx].1;
        let basis = f.spec.algebra().basis_of_degree(n);
        prop_assume!(!basis.is_empty());
        let m = &basis[i % basis.len()];
        prop_assert_eq!(f.spec.d_monomial(m), d_by_letters(&f.spec, m));
    }

    #[test]
    fn basis_matches_box_enumeration(degs in prop::collection::vec(1u32..=7, 1..=5), n in 0u32..=24) {
        let gens: Vec<Generator> = degs.iter().enumerate().map(|(i, &d)| Generator::new(format!("g{i}"), d)).collect();
        let alg = GradedAlgebra::new(gens);
        let got: Vec<Vec<u16>> = alg.basis_of_degree(n).iter().map(|m| m.exps().to_vec()).collect();
        let unique: BTreeSet<&Vec<u16>> = got.iter().collect();
        prop_assert_eq!(unique.len(), got.len());
        // Every exponent vector in the box [0, n/d] (odd: [0, 1]), filtered by degree.
        let mut want: BTreeSet<Vec<u16>> = BTreeSet::from([Vec::new()]);
        for &d in &degs {
            let cap = if d % 2 == 1 { 1 } else { n / d };
            want = want.into_iter().flat_map(|v| (0..=cap).map(move |e| { let mut v = v.clone(); v.push(e as u16); v })).collect();
        }
        want.retain(|v| v.iter().zip(&degs).map(|(&e, &d)| e as u32 * d).sum::<u32>() == n);
        prop_assert_eq!(unique.into_iter().cloned().collect::<BTreeSet<_>>(), want);
    }
}

#[test]
fn class_is_stable_under_coboundaries() {
    for (name, f) in fixtures::all() {
        common::coset_stability(&f.spec, 100).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

/// Characteristic polynomial coefficients c_0..c_n (c_n = 1) by Faddeev–LeVerrier.
fn charpoly(m: &[Vec<Q>]) -> Vec<Q> {
    let n = m.len();
    let mut c = vec![Q::zero(); n + 1];
    c[n] = Q::one();
    let mut mk = vec![vec![Q::zero(); n]; n];
    for k in 1..=n {
        let mut next = vec![vec![Q::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s: Q = (0..n).map(|l| &m[i][l] * &mk[l][j]).sum();
                if i == j {
                    s += &c[n - k + 1];
                }
                next[i][j] = s;
            }
        }
        mk = next;
        let tr: Q = (0..n).map(|i| (0..n).map(|l| &m[i][l] * &mk[l][i]).sum::<Q>()).sum();
        c[n - k] = -tr / Q::from_integer((k as i64).into());
    }
    c
}

/// Positive and negative roots of a real-rooted polynomial by Descartes' rule.
fn descartes(c: &[Q]) -> (usize, usize) {
    let changes = |seq: Vec<Q>| {
        let nz: Vec<Q> = seq.into_iter().filter(|x| !x.is_zero()).collect();
        nz.windows(2).filter(|w| w[0].is_positive() != w[1].is_positive()).count()
    };
    let pos = changes(c.to_vec());
    let neg = changes(c.iter().enumerate().map(|(k, x)| if k % 2 == 1 { -x } else { x.clone() }).collect());
    (pos, neg)
}

fn sym_matrix() -> impl Strategy<Value = Vec<Vec<Q>>> {
    (1usize..=5).prop_flat_map(|n| {
        prop::collection::vec(-4i64..=4, n * (n + 1) / 2).prop_map(move |v| {
            let mut m = vec![vec![Q::zero(); n]; n];
            let mut k = 0;
            for i in 0..n {
                for j in i..n {
                    m[i][j] = q(v[k]);
                    m[j][i] = q(v[k]);
                    k += 1;
                }
            }
            m
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn signature_invariant_under_congruence(
        m in sym_matrix(),
        lower in prop::collection::vec(-3i64..=3, 25),
        scales in prop::collection::vec(prop::sample::select(vec![1i64, -1, 2, -3]), 5),
    ) {
        let n = m.len();
        // P = L·D with L unit lower triangular and D diagonal: invertible.
        let p: Vec<Vec<Q>> = (0..n)
            .map(|i| (0..n).map(|j| {
                let l = if i == j { q(1) } else if i > j { q(lower[i * 5 + j]) } else { q(0) };
                l * q(scales[j])
            }).collect())
            .collect();
        let pt_m_p: Vec<Vec<Q>> = (0..n)
            .map(|i| (0..n).map(|j| {
                (0..n).map(|k| (0..n).map(|l| &p[k][i] * &m[k][l] * &p[l][j]).sum::<Q>()).sum()
            }).collect())
            .collect();
        let f = BilinearFormQ::new(m.clone());
        let g = BilinearFormQ::new(pt_m_p);
        prop_assert_eq!(signature(&f), signature(&g));
        prop_assert_eq!(inertia(&f), inertia(&g));
        prop_assert_eq!(inertia(&f), descartes(&charpoly(&m)));
    }
}
