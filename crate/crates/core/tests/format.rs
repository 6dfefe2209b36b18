use dgalab::fixtures;
use dgalab::format::{parse_dga, serialize_dga};
use dgalab::DgaError;

#[test]
fn roundtrip_is_semantic_identity() {
    for (name, f) in fixtures::all().into_iter().chain([("S2", fixtures::s2())]) {
        let text = serialize_dga(&f);
        let back = parse_dga(&text).unwrap();
        assert_eq!(back.spec.algebra(), f.spec.algebra(), "{name}");
        for g in 0..f.spec.generators().len() {
            assert_eq!(back.spec.generator_differential(g), f.spec.generator_differential(g), "{name}");
        }
        assert_eq!(back.fundamental, f.fundamental, "{name}");
        assert_eq!(back.basis, f.basis, "{name}");
        assert_eq!(serialize_dga(&back), text, "{name}: serialization not byte-stable");
    }
}

/// Recorded on first build; set UPDATE_GOLDEN=1 to rewrite.
#[test]
fn canonical_a3_matches_golden() {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/a3.canonical.dga");
    let text = serialize_dga(&fixtures::a3());
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &text).unwrap();
    }
    assert_eq!(text, std::fs::read_to_string(&path).unwrap());
}

#[test]
fn a1_fundamental_class() {
    let f = fixtures::a1();
    let fc = f.fundamental.unwrap();
    assert_eq!(f.spec.fmt(&fc.representative), "x2^16");
    assert_eq!(fc.degree(), Some(64));
}

#[test]
fn inhomogeneous_differential_is_located() {
    let text = "dga Bad\ngenerator x1 2\ngenerator y1 9\nd y1 = x1^2\n";
    match parse_dga(text) {
        Err(DgaError::Parse { line, msg, .. }) => {
            assert_eq!(line, 4);
            assert!(msg.contains("degree"), "{msg}");
        }
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn malformed_inputs() {
    let cases = [
        ("dga X\ngenerator x 2\nd y = x\n", 3),
        ("dga X\ngenerator x 2\nfundamental x scale 1/0\n", 3),
        ("dga X\ngenerator x two\n", 2),
    ];
    for (text, want) in cases {
        match parse_dga(text) {
            Err(DgaError::Parse { line, .. }) => assert_eq!(line, want, "{text:?}"),
            Err(DgaError::UnknownGenerator(_)) => {}
            other => panic!("{text:?}: {other:?}"),
        }
    }
}
