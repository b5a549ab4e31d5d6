use std::path::PathBuf;

use flgauge::arith::{PrimeContext, Zq};
use flgauge::fl::random_mod_p;
use flgauge::format::{emit_fl, emit_morphism, parse_fl, parse_module, parse_morphism, read_module, read_morphism};
use flgauge::sen::extension_class;
use flgauge::Error;
use proptest::prelude::*;
use rand::SeedableRng;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn text(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

#[test]
fn w1_round_trips_byte_for_byte() {
    let t = text("w1.fl");
    assert_eq!(emit_fl(&parse_fl(&t).unwrap()), t);
}

#[test]
fn every_fixture_is_canonical() {
    for name in ["unit.fl", "w1.fl", "k2_p3.fl", "ext_p3_t1.fl", "ext_p3_split.fl", "ext_f9_gen.fl"] {
        let t = text(name);
        assert_eq!(read_module(&fixture(name)).unwrap().emit(), t, "{name}");
    }
    let t = text("ext_to_k2.morph");
    assert_eq!(emit_morphism(&parse_morphism(&t).unwrap()), t);
}

#[test]
fn nonsplit_extension_fixture() {
    let m = parse_fl(&text("ext_p3_t1.fl")).unwrap();
    assert!(m.validate().unwrap().passed());
    let c = extension_class(&m).unwrap();
    assert_eq!(c.t, Zq::one(m.ctx()));
    assert!(!c.splits);
    let split = parse_fl(&text("ext_p3_split.fl")).unwrap();
    assert!(extension_class(&split).unwrap().splits);
    let f9 = parse_fl(&text("ext_f9_gen.fl")).unwrap();
    assert_eq!(extension_class(&f9).unwrap().t, Zq::generator(f9.ctx()));
}

#[test]
fn morphism_fixture_kernel_is_the_unit() {
    let f = read_morphism(&fixture("ext_to_k2.morph")).unwrap();
    let ker = f.kernel().unwrap().source().trimmed();
    assert_eq!(ker.wmax(), 0);
    assert_eq!(ker.piece(0).ngens(), 1);
    assert!(f.cokernel().unwrap().target().is_zero());
}

#[test]
fn wrong_vminus_shape_names_the_degree() {
    let t = "flgauge-module 1\np 3\nN 2\nf 1\nkind fl\nwmax 1\npiece 0 free 2\npiece 1 free 2\nvminus 1 2x3\n  1 0 0\n  0 1 0\n";
    match parse_module(t) {
        Err(Error::Parse { line, msg }) => {
            assert_eq!(line, 9);
            assert!(msg.contains("degree 1") && msg.contains("2x2"), "{msg}");
        }
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn other_errors_are_line_addressed() {
    let good = text("w1.fl");
    let cases = [
        (good.replace("p 3", "p 9"), 2),
        (good.replace("kind fl", "kind crystal"), 5),
        (good.replace("piece 1 free 1", "piece 1 free 1 torsion 4"), 8),
        (good.replace("  3\n", "  3 1\n"), 12),
        (good.replace("  3\n", "  x\n"), 12),
        (format!("{good}extra\n"), 15),
    ];
    for (t, line) in cases {
        match parse_module(&t) {
            Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{t}"),
            other => panic!("expected a parse error at line {line}, got {other:?}"),
        }
    }
}

#[test]
fn ill_defined_map_is_rejected() {
    // F^0 = Z/9, F^1 = Z/3 and v- = 1 does not kill 3
    let t = "flgauge-module 1\np 3\nN 2\nf 1\nkind fl\nwmax 1\npiece 0 free 1\npiece 1 free 0 torsion 1\nvminus 1 1x1\n  1\nphi 0 1x1\n  1\nphi 1 1x1\n  0\n";
    assert!(matches!(parse_module(t), Err(Error::Parse { line: 9, .. })));
}

#[test]
fn comments_and_negative_entries() {
    let t = "# twisted unit\nflgauge-module 1\np 3\nN 4\nf 1\nkind fl # fl kind\nwmax 0\npiece 0 free 1\nphi 0 1x1\n  -80\n";
    let m = parse_fl(t).unwrap();
    assert_eq!(m.phi(0).get(0, 0), &Zq::one(m.ctx()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_modules_round_trip(p in prop::sample::select(vec![2u64, 3, 5]), f in 1usize..3, seed: u64) {
        let c = PrimeContext::new(p, 1, f, None).unwrap();
        let m = random_mod_p(&c, p as usize - 1, 4, &mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let t = emit_fl(&m);
        let back = parse_fl(&t).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(emit_fl(&back), t);
    }
}
