use dgalab::cohomology::Cohomology;
use dgalab::fixtures;
use dgalab::poincare::*;
use dgalab::rational::{q, qf};
use dgalab::Q;

fn unit(i: usize, d: usize) -> Vec<Q> {
    (0..d).map(|j| if i == j { q(1) } else { q(0) }).collect()
}

#[test]
fn fixtures_satisfy_duality() {
    for (name, f) in fixtures::all() {
        let h = Cohomology::new(&f.spec);
        let r = check_poincare(&h, f.fundamental.as_ref().unwrap(), true);
        assert!(r.passed, "{name}: {:?}", r.failure);
        assert_eq!(r.top_dimension, 1);
    }
}

#[test]
fn a1_intersection_matrix_over_stated_basis() {
    let a1 = fixtures::a1();
    let h = Cohomology::new(&a1.spec);
    let form = intersection_form(&h, a1.fundamental.as_ref().unwrap(), Some(&a1.basis)).unwrap();
    assert_eq!(form, BilinearFormQ { labels: form.labels.clone(), ..BilinearFormQ::from_ints(&[&[0, 0, 0, -1], &[0, 0, 1, 0], &[0, 1, 0, 0], &[-1, 0, 0, 1]]) });
    assert!(form.is_symmetric() && form.is_unimodular());
    // {[x2 w], [x1^2 w]}.
    assert!(verify_lagrangian(&form, &[unit(0, 4), unit(1, 4)]));
}

#[test]
fn a2_a3_middle_forms() {
    for f in [fixtures::a2(), fixtures::a3()] {
        let h = Cohomology::new(&f.spec);
        let form = intersection_form(&h, f.fundamental.as_ref().unwrap(), Some(&f.basis)).unwrap();
        assert_eq!(form.matrix, BilinearFormQ::from_ints(&[&[0, -1], &[-1, 1]]).matrix, "{}", f.spec.name);
    }
}

#[test]
fn a4_form_is_empty() {
    let a4 = fixtures::a4();
    let h = Cohomology::new(&a4.spec);
    let form = intersection_form(&h, a4.fundamental.as_ref().unwrap(), None).unwrap();
    assert_eq!(form.dimension(), 0);
}

#[test]
fn witt_data_for_all_fixtures() {
    for (name, f) in fixtures::all() {
        let h = Cohomology::new(&f.spec);
        let basis = (!f.basis.is_empty()).then_some(f.basis.as_slice());
        let r = barge_sullivan_report(&h, f.fundamental.as_ref().unwrap(), basis, DEFAULT_HEIGHT_BOUND).unwrap();
        assert_eq!(r.witt.signature, 0, "{name}");
        assert_eq!(r.witt.metabolic, Tri::Yes, "{name}");
        assert!(verify_lagrangian(&r.form, r.witt.lagrangian.as_ref().unwrap()), "{name}");
        assert!(r.both_hold(), "{name}");
    }
}

#[test]
fn scaled_classes_keep_both_conditions() {
    for (name, f) in fixtures::all() {
        let h = Cohomology::new(&f.spec);
        for a in [qf(1, 2), q(3)] {
            let fc = f.fundamental.as_ref().unwrap().scaled(&a);
            let r = barge_sullivan_report(&h, &fc, None, DEFAULT_HEIGHT_BOUND).unwrap();
            assert!(r.both_hold(), "{name} scaled by {a}");
        }
    }
}

#[test]
fn scaling_divides_the_form() {
    let a2 = fixtures::a2();
    let h = Cohomology::new(&a2.spec);
    let fc = a2.fundamental.as_ref().unwrap();
    let base = intersection_form(&h, fc, None).unwrap();
    let scaled = intersection_form(&h, &fc.scaled(&q(3)), None).unwrap();
    for (r, s) in base.matrix.iter().zip(&scaled.matrix) {
        for (x, y) in r.iter().zip(s) {
            assert_eq!(x, &(y * q(3)));
        }
    }
}

#[test]
fn definite_and_odd_forms_are_not_metabolic() {
    let cases = [
        BilinearFormQ::from_ints(&[&[1, 0], &[0, 1]]),
        BilinearFormQ::from_ints(&[&[1]]),
        BilinearFormQ::from_ints(&[&[1, 0, 0], &[0, -1, 0], &[0, 0, 1]]),
    ];
    for f in cases {
        assert_eq!(find_lagrangian(&f, DEFAULT_HEIGHT_BOUND).metabolic, Tri::No);
    }
    // x² − 2y² is indefinite but anisotropic over Q.
    let f = BilinearFormQ::from_ints(&[&[1, 0], &[0, -2]]);
    assert_ne!(find_lagrangian(&f, DEFAULT_HEIGHT_BOUND).metabolic, Tri::Yes);
}

#[test]
fn degenerate_form_is_undetermined() {
    let f = BilinearFormQ::from_ints(&[&[0, 0], &[0, 0]]);
    assert_eq!(find_lagrangian(&f, DEFAULT_HEIGHT_BOUND).metabolic, Tri::Undetermined);
}
