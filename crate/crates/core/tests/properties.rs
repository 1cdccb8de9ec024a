use std::sync::OnceLock;

use proptest::prelude::*;

use nlogic::bitset::PointSet;
use nlogic::correspondence::{correspond, fo_model_check, StepMode, DEFAULT_DEPTH};
use nlogic::frame::laws::{association, residuation_bridge};
use nlogic::frame::{check_frame_class, ClassId, Sort, SortedFrame};
use nlogic::sample::{self, random_formula, random_frame, random_sorted_valuation, sample_class_frames, sample_lk_frames};
use nlogic::semantics::{check_full_abstraction, check_full_abstraction_sequent, check_sequent, check_validity, Valuation};
use nlogic::syntax::fo::{normal_form, Assumptions};
use nlogic::syntax::{parse_fo, parse_formula, ImpMode, Sequent};

fn lk_frames() -> &'static [SortedFrame] {
    static F: OnceLock<Vec<SortedFrame>> = OnceLock::new();
    F.get_or_init(|| sample_lk_frames(99, ClassId::LKSub, 60, 3, 6000))
}

fn frame_from(seed: u64) -> SortedFrame {
    let mut r = sample::rng(seed);
    random_frame(&mut r, 1 + (seed % 4) as usize, 1 + (seed / 4 % 4) as usize)
}

// X′ straight from incidence: opposite points incident with no member of X
fn galois_oracle(f: &SortedFrame, sort: Sort, x: PointSet) -> PointSet {
    (0..f.size(sort.dual()))
        .filter(|&v| {
            x.iter().all(|u| match sort {
                Sort::One => !f.incident(u, v),
                Sort::D => !f.incident(v, u),
            })
        })
        .collect()
}

fn stable_oracle(f: &SortedFrame, sort: Sort) -> Vec<PointSet> {
    PointSet::all_subsets(f.size(sort))
        .filter(|&x| galois_oracle(f, sort.dual(), galois_oracle(f, sort, x)) == x)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn galois_map_matches_incidence(seed in any::<u64>(), bits in any::<u128>()) {
        let f = frame_from(seed);
        for sort in [Sort::One, Sort::D] {
            let x = PointSet::from_bits(bits).inter(f.full(sort));
            let xp = f.galois(sort, x);
            prop_assert_eq!(xp, galois_oracle(&f, sort, x));
            let c = f.closure(sort, x);
            prop_assert!(x.is_subset(c));
            prop_assert_eq!(f.closure(sort, c), c);
            prop_assert_eq!(f.galois(sort.dual(), xp).is_subset(c), true);
            prop_assert_eq!(f.galois(sort, c), xp);
        }
    }

    #[test]
    fn stable_sets_are_exactly_the_closed_subsets(seed in any::<u64>()) {
        let f = frame_from(seed);
        for sort in [Sort::One, Sort::D] {
            let mut got = f.stable_sets(sort).unwrap();
            let mut want = stable_oracle(&f, sort);
            got.sort_by_key(|s| s.bits());
            want.sort_by_key(|s| s.bits());
            prop_assert_eq!(got, want);
        }
    }

    #[test]
    fn validity_agrees_with_exhaustive_stable_valuations(seed in any::<u64>(), fi in 0usize..60) {
        let f = &lk_frames()[fi % lk_frames().len()];
        let mut r = sample::rng(seed);
        let seq = Sequent::new(random_formula(&mut r, &["p", "q"], 2, true), random_formula(&mut r, &["p", "q"], 2, true));
        let stable = stable_oracle(f, Sort::One);
        let mut valid = true;
        for &p in &stable {
            for &q in &stable {
                let val: Valuation = [("p".to_string(), p), ("q".to_string(), q)].into_iter().collect();
                valid &= check_sequent(f, &val, &seq).unwrap().is_none();
            }
        }
        prop_assert_eq!(check_validity(f, &seq, 2).unwrap().valid, valid, "{}", seq);
    }

    #[test]
    fn full_abstraction(seed in any::<u64>(), fi in 0usize..60, depth in 1usize..4) {
        let f = &lk_frames()[fi % lk_frames().len()];
        let mut r = sample::rng(seed);
        let phi = random_formula(&mut r, &["p", "q"], depth, true);
        let psi = random_formula(&mut r, &["p", "q"], depth, true);
        let sval = random_sorted_valuation(&mut r, f, &["p".into(), "q".into()]);
        for mode in [ImpMode::Table6, ImpMode::Rspoon] {
            let a = check_full_abstraction(f, &phi, &sval, mode).unwrap();
            prop_assert!(a.all_pass(), "{}", a.render());
            let b = check_full_abstraction_sequent(f, &Sequent::new(phi.clone(), psi.clone()), &sval, mode).unwrap();
            prop_assert!(b.all_pass(), "{}", b.render());
        }
    }

    #[test]
    fn formula_print_parse_round_trip(seed in any::<u64>(), lambek in any::<bool>()) {
        let mut r = sample::rng(seed);
        let phi = random_formula(&mut r, &["p", "q", "r2"], 4, lambek);
        prop_assert_eq!(parse_formula(&phi.to_string()).unwrap(), phi);
    }

    #[test]
    fn residuated_frames_satisfy_the_laws(fi in 0usize..60) {
        let f = &lk_frames()[fi % lk_frames().len()];
        prop_assert!(check_frame_class(f, ClassId::LKSub).unwrap().all_pass());
        prop_assert!(residuation_bridge(f).unwrap().all_pass());
        prop_assert!(association(f).unwrap().equivalent());
    }
}

#[test]
fn class_sampler_only_returns_members() {
    for class in [ClassId::parse("PU").unwrap(), ClassId::parse("LK").unwrap(), ClassId::LKSub] {
        let frames = sample_class_frames(5, class, 20, 3, 4000);
        assert!(!frames.is_empty());
        for f in &frames {
            assert!(check_frame_class(f, class).unwrap().all_pass(), "{class:?}\n{}", f.to_text());
        }
    }
}

/// Sequent, class, and the correspondent as written by hand.
const REFERENCE: &[(&str, &str, &str)] = &[
    ("p |- t*p", "LK_*", "∀¹x ∃¹u (U(u) ∧ R(x,u,x))"),
    ("t*p |- p", "LK_*", "∀¹x ∀¹u ∀¹z ((U(u) ∧ R(x,u,z)) → z ≤ x)"),
    ("p*q |- q*p", "LK_*", "∀¹x ∀¹u ∀¹z (R(x,u,z) → R(x,z,u))"),
    ("p |- p*p", "LK_*", "∀¹x R(x,x,x)"),
    ("p |- q -> p", "LK_*", "∀¹x ∀¹u ∀¹z (R(x,u,z) → z ≤ x)"),
    ("p |- q -> (p & q)", "LK_*", "∀¹u ∀¹x ∀¹z (R(u,x,z) → (x ≤ u ∧ z ≤ u))"),
    (
        "p2*p3 |- p1 -> ((p1*p2)*p3)",
        "LK_*",
        "∀¹x ∀¹z1 ∀¹z2 ∀¹z3 (∃¹u (R(x,z1,u) ∧ R(u,z2,z3)) → ∃¹u (R(x,u,z3) ∧ R(u,z1,z2)))",
    ),
    (
        "p2*p3 |- p1 -> ((p1*p2)*p3)",
        "LK*",
        "∀¹x ∀¹z1 ∀¹z2 ∀¹z3 (∃¹u (R(x,z1,u) ∧ R(u,z2,z3)) → ∃¹u ∃¹w1 ∃¹w2 ∃¹w3 (z1 ≤ w1 ∧ z2 ≤ w2 ∧ z3 ≤ w3 ∧ R(x,u,w3) ∧ R(u,w1,w2)))",
    ),
];

#[test]
fn computed_correspondents_agree_with_reference_on_frames() {
    let many = sample_lk_frames(3, ClassId::LKSub, 150, 3, 15000);
    for (seq, class, text) in REFERENCE {
        let class = ClassId::parse(class).unwrap();
        let frames: Vec<&SortedFrame> = many.iter().filter(|f| check_frame_class(f, class).unwrap().all_pass()).collect();
        let reference = parse_fo(text).unwrap();
        let got = correspond(&nlogic::syntax::parse_sequent(seq).unwrap(), class, StepMode::Auto, None, DEFAULT_DEPTH)
            .unwrap()
            .formula;
        let mut split = [0, 0];
        for f in &frames {
            let want = fo_model_check(f, &reference).unwrap().holds;
            assert_eq!(fo_model_check(f, &got).unwrap().holds, want, "{seq}: {got}\n{}", f.to_text());
            split[want as usize] += 1;
        }
        // unit laws hold throughout the class; the others must separate frames
        if !seq.contains('t') {
            assert!(split[0] > 0 && split[1] > 0, "{seq}: {split:?}");
        }
    }
}

#[test]
fn correspondent_text_round_trips_and_normal_form_is_idempotent() {
    for (seq, class, _) in REFERENCE {
        let class = ClassId::parse(class).unwrap();
        let asm = Assumptions { f1: class.f1_relations().to_vec(), monotone: class.monotone_relations().to_vec() };
        let fo = correspond(&nlogic::syntax::parse_sequent(seq).unwrap(), class, StepMode::Auto, None, DEFAULT_DEPTH)
            .unwrap()
            .formula;
        let text = fo.to_string();
        assert_eq!(parse_fo(&text).unwrap().to_string(), text);
        let once = normal_form(&fo, &asm);
        assert_eq!(normal_form(&parse_fo(&once).unwrap(), &asm), once);
    }
}
