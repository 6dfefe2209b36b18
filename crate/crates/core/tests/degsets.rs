use std::collections::BTreeSet;

use dgalab::degsets::*;
use proptest::prelude::*;

const SUM: &str = "\
entry M dim 64
entry N dim 64
entry M#N dim 64
flag M model_inflexible
flag M pi_top_rational_zero
degset N M rational finite {0, 1, 2}
";

fn inflexible(c: &Closure, name: &str) -> Option<usize> {
    c.find(&Fact::Flag { object: name.to_string(), flag: ObjFlag::Inflexible })
}

#[test]
fn connected_sum_inherits_inflexibility() {
    let cat = parse_catalog(SUM).unwrap();
    let c = propagate(&cat).unwrap();
    let id = inflexible(&c, "M#N").expect("M#N inflexible derived");
    c.replay(&cat, id).unwrap();
    let rules: BTreeSet<&str> = c.chain(id).iter().map(|&s| c.get(s).rule.as_str()).collect();
    for r in ["R1", "R2", "R3", "catalog"] {
        assert!(rules.contains(r), "{r} missing from {rules:?}");
    }
    // deg(M_Q, M_Q) ⊂ {-1,0,1} plus deg(N_Q, M_Q) ⊂ {0,1,2}.
    let bound = c.degset("M#N", "M", false);
    assert_eq!(bound.as_finite().unwrap(), &BTreeSet::from([-1, 0, 1, 2, 3]));
    assert!(bound.known.contains(&1));
    assert!(c.explain(id).last().unwrap().contains("M#N inflexible by R2"));
}

#[test]
fn iterated_self_sum() {
    let cat = parse_catalog("entry M dim 8\nentry M#M#M dim 8\nflag M model_inflexible\nflag M pi_top_rational_zero\n").unwrap();
    let c = propagate(&cat).unwrap();
    let id = inflexible(&c, "M#M#M").unwrap();
    c.replay(&cat, id).unwrap();
    assert_eq!(c.degset("M#M#M", "M", true).as_finite().unwrap(), &(-3..=3).collect::<BTreeSet<i64>>());
}

#[test]
fn no_pi_flag_no_conclusion() {
    let cat = parse_catalog(&SUM.replace("flag M pi_top_rational_zero\n", "")).unwrap();
    let c = propagate(&cat).unwrap();
    assert!(inflexible(&c, "M#N").is_none());
    assert!(!c.degset("M#N", "M", false).is_finite());
}

#[test]
fn unit_self_degrees_mean_inflexible() {
    let cat = parse_catalog("entry M dim 4\ndegset M M finite {-1,0,1}\n").unwrap();
    let c = propagate(&cat).unwrap();
    let id = inflexible(&c, "M").unwrap();
    assert_eq!(c.get(id).rule, Rule::R2);
    c.replay(&cat, id).unwrap();
}

#[test]
fn strongly_inflexible_implies_inflexible() {
    let cat = parse_catalog("entry M dim 4\nflag M strongly_inflexible\n").unwrap();
    let c = propagate(&cat).unwrap();
    assert_eq!(c.get(inflexible(&c, "M").unwrap()).rule, Rule::R4);
}

#[test]
fn bare_entry_derives_nothing() {
    let cat = parse_catalog("entry M dim 4\n").unwrap();
    let c = propagate(&cat).unwrap();
    assert_eq!(c.facts.len(), 0);
}

#[test]
fn propagation_is_idempotent() {
    let cat = parse_catalog(SUM).unwrap();
    let mut c = propagate(&cat).unwrap();
    let before = c.facts.len();
    assert_eq!(c.saturate(&cat).unwrap(), 0);
    assert_eq!(c.facts.len(), before);
}

#[test]
fn every_fact_replays() {
    let cat = parse_catalog(SUM).unwrap();
    let c = propagate(&cat).unwrap();
    for d in &c.facts {
        c.replay(&cat, d.id).unwrap();
    }
}

#[test]
fn tampered_chain_fails_replay() {
    let cat = parse_catalog(SUM).unwrap();
    let mut c = propagate(&cat).unwrap();
    let r1 = c.facts.iter().position(|d| d.rule == Rule::R1).unwrap();
    if let Fact::Within { set, .. } = &mut c.facts[r1].fact {
        set.remove(&3);
    }
    let id = inflexible(&c, "M#N").unwrap();
    assert!(c.replay(&cat, id).is_err());
}

#[test]
fn contradictions_name_both_facts() {
    let text = "entry N dim 4\nentry M dim 4\ndegset N M finite {0,1}\ndegset N M rational finite {0}\n";
    let err = propagate(&parse_catalog(text).unwrap()).unwrap_err().to_string();
    assert!(err.contains("deg(N_Q, M_Q) ⊂ {0}") && err.contains("1 ∈ deg(N_Q, M_Q)"), "{err}");

    let text = "entry M dim 4\nflag M inflexible\ndegset M M finite {0,2}\n";
    let err = propagate(&parse_catalog(text).unwrap()).unwrap_err().to_string();
    assert!(err.contains("2 ∈ deg(M, M)") && err.contains("line 3"), "{err}");

    let text = "entry N dim 4\nentry M dim 4\ndegset N M finite {0}\ndegset N M infinite\n";
    assert!(propagate(&parse_catalog(text).unwrap()).is_err());
}

#[test]
fn catalog_errors() {
    assert!(parse_catalog("entry M dim 4\nentry N dim 5\ndegset N M finite {0}\n").is_err());
    assert!(parse_catalog("entry M dim 4\nentry M#N dim 4\n").is_err());
    assert!(parse_catalog("entry M dim 4\nflag M bogus\n").is_err());
    assert!(parse_catalog("entry M dim 4\ndegset M M finite {1}\n").is_err());
    assert!(parse_catalog("flag X inflexible\n").is_err());
    let e = parse_catalog("entry M dim 4\nwat\n").unwrap_err();
    assert!(matches!(e, dgalab::DgaError::Parse { line: 2, .. }));
}

fn brute_sum(a: &BTreeSet<i64>, b: &BTreeSet<i64>) -> BTreeSet<i64> {
    let mut out = BTreeSet::new();
    for x in a {
        for y in b {
            out.insert(x + y);
        }
    }
    out
}

fn small_set() -> impl Strategy<Value = DegSet> {
    prop_oneof![
        6 => prop::collection::btree_set(-5i64..=5, 0..5).prop_map(DegSet::finite),
        1 => Just(DegSet::infinite()),
        1 => Just(DegSet::unknown()),
    ]
}

proptest! {
    #[test]
    fn sum_sets_laws(a in small_set(), b in small_set(), c in small_set()) {
        prop_assert_eq!(sum_sets(&a, &b), sum_sets(&b, &a));
        prop_assert_eq!(sum_sets(&sum_sets(&a, &b), &c), sum_sets(&a, &sum_sets(&b, &c)));
        let s = sum_sets(&a, &b);
        prop_assert!(s.known.contains(&0));
        match (a.as_finite(), b.as_finite()) {
            (Some(x), Some(y)) => prop_assert_eq!(s.as_finite().unwrap(), &brute_sum(x, y)),
            _ => prop_assert_eq!(s.kind, DegKind::Unknown),
        }
    }

    /// Adding catalog lines never retracts a derived statement.
    #[test]
    fn propagation_is_monotone(extra in prop::collection::vec(0usize..5, 0..4)) {
        let lines = [
            "flag N model_inflexible",
            "degset M N rational finite {0}",
            "flag N pi_top_rational_zero",
            "flag M#N strongly_inflexible",
            "degset N N rational finite {0,1}",
        ];
        let base = parse_catalog(SUM).unwrap();
        let before: BTreeSet<String> = propagate(&base).unwrap().facts.iter().map(|d| d.statement.clone()).collect();
        let mut text = SUM.to_string();
        for i in extra {
            text.push_str(lines[i]);
            text.push('\n');
        }
        let cat = parse_catalog(&text).unwrap();
        if let Ok(c) = propagate(&cat) {
            let after: BTreeSet<String> = c.facts.iter().map(|d| d.statement.clone()).collect();
            prop_assert!(before.is_subset(&after));
            for d in &c.facts {
                prop_assert!(c.replay(&cat, d.id).is_ok());
            }
        }
    }
}
