use nlogic::duality::*;
use nlogic::order::load_algebra;

fn fixture(name: &str) -> String {
    let path = format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).unwrap()
}

const ALL: [&str; 5] = ["chain2.alg", "chain3.alg", "lattice2x2.alg", "vposet.alg", "bool2_lambek.alg"];

#[test]
fn every_fixture_dualizes_cleanly() {
    for name in ALL {
        let alg = load_algebra(&fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        let cf = canonical_frame(&alg, Signature::of(&alg), false).unwrap();
        let mut reports = vec![
            verify_embedding(&alg, &cf).unwrap(),
            verify_canonical_extension(&alg, &cf).unwrap(),
            verify_pi_extension(&alg, &cf).unwrap(),
            verify_canonical_structure(&alg, &cf).unwrap(),
        ];
        for c in expected_classes(&alg, &cf) {
            reports.push(verify_canonical_class(&alg, &cf, c).unwrap());
        }
        for r in reports {
            assert!(r.all_pass(), "{name}\n{}", r.render());
        }
    }
}
