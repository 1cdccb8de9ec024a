//! Seeded random frames, valuations and formulas.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitset::PointSet;
use crate::frame::{check_axiom, check_frame_class, ClassId, Relation, RelName, Sort, SortedFrame};
use crate::semantics::SortedValuation;
use crate::syntax::translate::modal_name;
use crate::syntax::Formula;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_set(rng: &mut ChaCha8Rng, n: usize) -> PointSet {
    PointSet::from_bits(rng.gen_range(0..(1u128 << n)))
}

fn random_incidence(rng: &mut ChaCha8Rng, n1: usize, nd: usize) -> SortedFrame {
    let inc = (0..n1).map(|_| random_set(rng, nd)).collect();
    SortedFrame::numbered(n1, nd, inc).expect("small frame")
}

/// Incidence, unit and all three relations drawn uniformly.
pub fn random_frame(rng: &mut ChaCha8Rng, n1: usize, nd: usize) -> SortedFrame {
    let mut f = random_incidence(rng, n1, nd);
    let u = random_set(rng, n1);
    f = f.with_unit(u);
    for name in RelName::ALL {
        let (o, a, b) = name.signature();
        let (no, na, nb) = (f.size(o), f.size(a), f.size(b));
        let secs = (0..na * nb).map(|_| random_set(rng, no)).collect();
        f = f.with_relation(Relation::from_sections(name, na, nb, secs)).expect("shape");
    }
    f
}

/// T and S read off R through (RES), with Galois-stable sections.
pub fn res_completion(f: &SortedFrame) -> Option<SortedFrame> {
    let r_dual = f.galois_dual_relation(RelName::R).ok()?;
    let (n1, nd) = (f.size(Sort::One), f.size(Sort::D));
    let mut t = Relation::empty(RelName::T, n1, nd);
    let mut s = Relation::empty(RelName::S, nd, n1);
    for x in 0..n1 {
        for v in 0..nd {
            // zT′xv iff vR′xz
            let t_dual: PointSet = (0..n1).filter(|&z| r_dual.contains(v, x, z)).collect();
            t.set_section(x, v, f.galois(Sort::One, t_dual));
        }
    }
    for v in 0..nd {
        for z in 0..n1 {
            // xS′vz iff vR′xz
            let s_dual: PointSet = (0..n1).filter(|&x| r_dual.contains(v, x, z)).collect();
            s.set_section(v, z, f.galois(Sort::One, s_dual));
        }
    }
    let g = f.clone().with_relation(t).ok()?.with_relation(s).ok()?;
    let ok = ["F1(T)", "F1(R)", "F1(S)", "RES"].iter().all(|id| matches!(check_axiom(&g, id), Ok(None)));
    ok.then_some(g)
}

/// One attempt at a frame of the residuated class with unit laws and (M).
///
/// R is built to satisfy (F1), (M), (F2) and the unit witnesses by construction;
/// T and S come from (RES). The attempt fails when the completed frame misses an axiom.
pub fn try_lk_frame(rng: &mut ChaCha8Rng, n1: usize, nd: usize, class: ClassId) -> Option<SortedFrame> {
    let base = random_incidence(rng, n1, nd);
    let stable = base.stable_sets(Sort::One).ok()?;
    let mut units: Vec<PointSet> = stable.iter().copied().filter(|s| !s.is_empty()).collect();
    // small units leave more room for R
    units.sort_by_key(|s| s.len());
    let u = if rng.gen_bool(0.75) { *units.first()? } else { *units.choose(rng)? };
    let gamma: Vec<PointSet> = (0..n1).map(|x| base.gamma(Sort::One, x)).collect();
    let full = base.full(Sort::One);
    let mut g = vec![PointSet::EMPTY; n1 * n1];
    for a in 0..n1 {
        for b in 0..n1 {
            let mut allowed = full;
            if u.contains(a) {
                allowed = allowed.inter(gamma[b]);
            }
            if u.contains(b) {
                allowed = allowed.inter(gamma[a]);
            }
            let density = rng.gen_range(0..=4);
            let pick: PointSet = (0..n1).filter(|_| rng.gen_range(0..4) < density).collect();
            g[a * n1 + b] = pick.inter(allowed);
        }
    }
    for x in 0..n1 {
        let e = if u.contains(x) { x } else { *u.to_vec().choose(rng)? };
        g[e * n1 + x].insert(x);
        g[x * n1 + e].insert(x);
    }
    let mut r = Relation::empty(RelName::R, n1, n1);
    for a in 0..n1 {
        for b in 0..n1 {
            let mut acc = PointSet::EMPTY;
            for a2 in gamma[a].iter() {
                for b2 in gamma[b].iter() {
                    acc = acc.union(g[a2 * n1 + b2]);
                }
            }
            r.set_section(a, b, base.closure(Sort::One, acc));
        }
    }
    let f = res_completion(&base.with_unit(u).with_relation(r).ok()?)?;
    check_frame_class(&f, class).ok()?.all_pass().then_some(f)
}

/// `count` frames of the class with at most `max` points per sort, or fewer if
/// `tries` attempts run out.
pub fn sample_lk_frames(seed: u64, class: ClassId, count: usize, max: usize, tries: usize) -> Vec<SortedFrame> {
    let mut rng = rng(seed);
    let mut out = Vec::new();
    for _ in 0..tries {
        if out.len() == count {
            break;
        }
        let n1 = rng.gen_range(2.min(max)..=max);
        let nd = rng.gen_range(1..=max);
        if let Some(f) = try_lk_frame(&mut rng, n1, nd, class) {
            out.push(f);
        }
    }
    out
}

/// Frames of any class: the constructive sampler for residuated classes, otherwise
/// uniform frames with a stable unit, filtered by the class axioms.
pub fn sample_class_frames(seed: u64, class: ClassId, count: usize, max: usize, tries: usize) -> Vec<SortedFrame> {
    if class.is_lambek() {
        return sample_lk_frames(seed, class, count, max, tries);
    }
    let mut rng = rng(seed);
    let mut out = Vec::new();
    for _ in 0..tries {
        if out.len() == count {
            break;
        }
        let n1 = rng.gen_range(1..=max);
        let nd = rng.gen_range(1..=max);
        let f = random_frame(&mut rng, n1, nd);
        let u = f.closure(Sort::One, f.unit_set().unwrap_or_default());
        let f = f.with_unit(u);
        if check_frame_class(&f, class).is_ok_and(|r| r.all_pass()) {
            out.push(f);
        }
    }
    out
}

/// Arbitrary subsets for each modal variable of `vars`.
pub fn random_sorted_valuation(rng: &mut ChaCha8Rng, frame: &SortedFrame, vars: &[String]) -> SortedValuation {
    vars.iter().map(|p| (modal_name(p), random_set(rng, frame.size(Sort::One)))).collect()
}

/// Formula of depth at most `depth`. `lambek` adds t, ∘ and ←.
pub fn random_formula(rng: &mut ChaCha8Rng, vars: &[&str], depth: usize, lambek: bool) -> Formula {
    if depth == 0 || rng.gen_range(0..4) == 0 {
        return match rng.gen_range(0..10) {
            0 => Formula::Top,
            1 => Formula::Bot,
            2 if lambek => Formula::Unit,
            _ => Formula::var(vars.choose(rng).expect("some variable")),
        };
    }
    let ops = if lambek { 6 } else { 3 };
    let a = random_formula(rng, vars, depth - 1, lambek);
    let b = random_formula(rng, vars, depth - 1, lambek);
    match rng.gen_range(0..ops) {
        0 => Formula::and(a, b),
        1 => Formula::or(a, b),
        2 => Formula::imp(a, b),
        3 => Formula::fuse(a, b),
        4 => Formula::limp(a, b),
        _ => Formula::imp(a, b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampler_is_deterministic() {
        let a = sample_lk_frames(7, ClassId::LKSub, 5, 3, 2000);
        let b = sample_lk_frames(7, ClassId::LKSub, 5, 3, 2000);
        assert_eq!(a.len(), 5);
        assert_eq!(a.iter().map(|f| f.to_text()).collect::<Vec<_>>(), b.iter().map(|f| f.to_text()).collect::<Vec<_>>());
    }

    #[test]
    fn formulas_respect_depth() {
        let mut r = rng(1);
        for _ in 0..200 {
            let f = random_formula(&mut r, &["p", "q"], 3, true);
            assert!(f.depth() <= 3, "{f}");
        }
    }
}
