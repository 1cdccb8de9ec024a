//! Finite model checking of first-order correspondents and empirical soundness of the rewrite rules.

use std::collections::{BTreeMap, BTreeSet};
use std::thread;

use super::system::{Assumption, InequalitySystem};
use super::{CorrError, Step};
use crate::bitset::PointSet;
use crate::frame::{Relation, RelName, Sort, SortedFrame};
use crate::report::Report;
use crate::semantics::{check_validity, eval_sorted, SortedValuation};
use crate::syntax::{Fo, Modal, Sequent};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoCheck {
    pub holds: bool,
    /// failing assignment to the outer universal block
    pub witness: Option<String>,
}

struct Model<'a> {
    f: &'a SortedFrame,
    duals: BTreeMap<RelName, Relation>,
}

type Env = Vec<(String, usize)>;
type Preds = Vec<(String, PointSet)>;

fn lookup(env: &Env, x: &str) -> usize {
    env.iter().rev().find(|(n, _)| n == x).map(|(_, v)| *v).unwrap_or_else(|| panic!("free variable {x}"))
}

impl Model<'_> {
    fn rel(&self, n: RelName) -> Result<&Relation, CorrError> {
        self.f.relation(n).ok_or_else(|| CorrError::MissingRelation(n.letter().to_string()))
    }

    fn eval(&self, fo: &Fo, env: &mut Env, preds: &mut Preds) -> Result<bool, CorrError> {
        Ok(match fo {
            Fo::True => true,
            Fo::False => false,
            Fo::Eq(_, a, b) => lookup(env, a) == lookup(env, b),
            Fo::Leq(s, a, b) => self.f.leq(*s, lookup(env, a), lookup(env, b)),
            Fo::Inc(x, y) => self.f.incident(lookup(env, x), lookup(env, y)),
            Fo::Unit(x) => {
                let u = self.f.unit_set().ok_or_else(|| CorrError::MissingRelation("U".into()))?;
                u.contains(lookup(env, x))
            }
            Fo::Rel(n, [o, a, b]) => self.rel(*n)?.contains(lookup(env, o), lookup(env, a), lookup(env, b)),
            Fo::DualRel(n, [o, a, b]) => {
                let d = self.duals.get(n).ok_or_else(|| CorrError::MissingRelation(format!("{}′", n.letter())))?;
                d.contains(lookup(env, o), lookup(env, a), lookup(env, b))
            }
            Fo::Pred(p, _, v) => {
                let set = preds.iter().rev().find(|(q, _)| q == p).map(|(_, s)| *s);
                set.ok_or_else(|| CorrError::MissingRelation(p.clone()))?.contains(lookup(env, v))
            }
            Fo::Not(a) => !self.eval(a, env, preds)?,
            Fo::And(cs) => {
                for c in cs {
                    if !self.eval(c, env, preds)? {
                        return Ok(false);
                    }
                }
                true
            }
            Fo::Or(cs) => {
                for c in cs {
                    if self.eval(c, env, preds)? {
                        return Ok(true);
                    }
                }
                false
            }
            Fo::Implies(a, b) => !self.eval(a, env, preds)? || self.eval(b, env, preds)?,
            Fo::Iff(a, b) => self.eval(a, env, preds)? == self.eval(b, env, preds)?,
            Fo::Forall(s, x, b) | Fo::Exists(s, x, b) => {
                let want = matches!(fo, Fo::Exists(..));
                for v in 0..self.f.size(*s) {
                    env.push((x.clone(), v));
                    let r = self.eval(b, env, preds);
                    env.pop();
                    if r? == want {
                        return Ok(want);
                    }
                }
                !want
            }
            Fo::SoForall(s, p, b) => {
                for set in PointSet::all_subsets(self.f.size(*s)) {
                    preds.push((p.clone(), set));
                    let r = self.eval(b, env, preds);
                    preds.pop();
                    if !r? {
                        return Ok(false);
                    }
                }
                true
            }
        })
    }
}

/// Tarskian evaluation of a closed formula.
pub fn fo_model_check(frame: &SortedFrame, fo: &Fo) -> Result<FoCheck, CorrError> {
    let mut duals = BTreeMap::new();
    let mut wants = BTreeSet::new();
    fo.visit(&mut |g| {
        if let Fo::DualRel(n, _) = g {
            wants.insert(*n);
        }
    });
    for n in wants {
        if frame.relation(n).is_some() {
            duals.insert(n, frame.galois_dual_relation(n)?);
        }
    }
    let m = Model { f: frame, duals };
    let mut block = Vec::new();
    let mut body = fo;
    while let Fo::Forall(s, x, b) = body {
        block.push((*s, x.clone()));
        body = b;
    }
    let mut idx = vec![0usize; block.len()];
    if block.iter().any(|(s, _)| frame.size(*s) == 0) {
        return Ok(FoCheck { holds: true, witness: None });
    }
    loop {
        let mut env: Env = block.iter().zip(&idx).map(|((_, x), &v)| (x.clone(), v)).collect();
        if !m.eval(body, &mut env, &mut Vec::new())? {
            let w = block.iter().zip(&idx).map(|((s, x), &v)| format!("{x}={}", frame.name(*s, v))).collect::<Vec<_>>();
            return Ok(FoCheck { holds: false, witness: Some(w.join(", ")) });
        }
        let mut k = block.len();
        loop {
            if k == 0 {
                return Ok(FoCheck { holds: true, witness: None });
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < frame.size(block[k].0) {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Runs `f` over `items` on a few threads, keeping input order.
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(8);
    if threads <= 1 || items.len() < 16 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    thread::scope(|sc| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| sc.spawn(|| c.iter().map(&f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// Correspondent holds on a frame iff the sequent is valid there.
pub fn verify_correspondence(frames: &[SortedFrame], seq: &Sequent, fo: &Fo, max_vars: usize) -> Result<Report, CorrError> {
    let results = par_map(frames, |f| -> Result<(bool, bool, Option<String>), CorrError> {
        let a = fo_model_check(f, fo)?;
        let b = check_validity(f, seq, max_vars)?;
        Ok((a.holds, b.valid, a.witness))
    });
    let mut rep = Report::new(format!("correspondence {seq}"));
    let mut agree = 0usize;
    let mut holds = 0usize;
    for (i, r) in results.into_iter().enumerate() {
        let (a, b, w) = r?;
        if a == b {
            agree += 1;
            holds += a as usize;
        } else {
            let why = format!("frame {i}: correspondent {a}, sequent {b}{}", w.map(|w| format!(" ({w})")).unwrap_or_default());
            rep.push(format!("frame {i}"), false, Some(why));
        }
    }
    rep.note(format!("{agree}/{} frames agree, {holds} validate the sequent", frames.len()));
    rep.push("agreement", agree == frames.len(), None);
    Ok(rep)
}

// ----- rule soundness -----

fn relations_of(m: &Modal, out: &mut BTreeSet<RelName>, unit: &mut bool) {
    m.walk(&mut |t| match t {
        Modal::Fuse(..) | Modal::RImp(..) | Modal::LImp(..) => {
            out.insert(RelName::R);
        }
        Modal::TriR(..) => {
            out.insert(RelName::T);
        }
        Modal::TriL(..) => {
            out.insert(RelName::S);
        }
        Modal::Unit => *unit = true,
        _ => {}
    });
}

/// All relations of one kind on the given carriers.
fn all_relations(name: RelName, f: &SortedFrame) -> Vec<Relation> {
    let (o, a, b) = name.signature();
    let (no, na, nb) = (f.size(o), f.size(a), f.size(b));
    let cells = na * nb;
    let per = 1usize << no;
    let total = per.pow(cells as u32);
    (0..total)
        .map(|mut code| {
            let secs = (0..cells)
                .map(|_| {
                    let s = PointSet::from_bits((code % per) as u128);
                    code /= per;
                    s
                })
                .collect();
            Relation::from_sections(name, na, nb, secs)
        })
        .collect()
}

/// Frames with at most `max` points per sort carrying the relations a system pair needs.
pub fn soundness_frames(rels: &BTreeSet<RelName>, unit: bool, assumption: Option<Assumption>, max: usize) -> Vec<SortedFrame> {
    let mut out = Vec::new();
    let residuated = assumption == Some(Assumption::Residuated);
    for n1 in 1..=max {
        for nd in 1..=max {
            for code in 0..(1u64 << (n1 * nd)) {
                let inc: Vec<PointSet> =
                    (0..n1).map(|x| PointSet::from_bits(((code >> (x * nd)) & ((1 << nd) - 1)) as u128)).collect();
                let base = SortedFrame::numbered(n1, nd, inc).expect("small frame");
                let mut layer = vec![base];
                let wanted: Vec<RelName> = if residuated {
                    vec![RelName::R]
                } else {
                    rels.iter().copied().collect()
                };
                for name in wanted {
                    let mut next = Vec::new();
                    for f in &layer {
                        for r in all_relations(name, f) {
                            next.push(f.clone().with_relation(r).expect("shape"));
                        }
                    }
                    layer = next;
                }
                if residuated {
                    layer = layer.iter().filter_map(crate::sample::res_completion).collect();
                }
                if unit {
                    let mut next = Vec::new();
                    for f in &layer {
                        for u in PointSet::all_subsets(n1) {
                            next.push(f.clone().with_unit(u));
                        }
                    }
                    layer = next;
                }
                out.extend(layer);
            }
        }
    }
    out
}

/// Sort of every variable in either system, with its constraint.
#[derive(Clone, Debug)]
enum Dom {
    Free(Sort),
    Stable(Sort),
    /// Q = P′
    Galois(Sort, String),
}

fn dom_sort(d: &Dom) -> Sort {
    match d {
        Dom::Free(s) | Dom::Stable(s) | Dom::Galois(s, _) => *s,
    }
}

fn domains(a: &InequalitySystem, b: &InequalitySystem) -> Result<Vec<(String, Dom)>, String> {
    let mut sorts: BTreeMap<String, Sort> = BTreeMap::new();
    let mut note = |p: &str, s: Sort| -> Result<(), String> {
        match sorts.insert(p.to_string(), s) {
            Some(t) if t != s => Err(format!("{p} used with two sorts")),
            _ => Ok(()),
        }
    };
    for sys in [a, b] {
        for (p, s) in sys.var_sorts() {
            note(&p, s)?;
        }
        for (p, s) in &sys.stb {
            note(p, *s)?;
        }
        for c in &sys.cvc {
            note(&c.var, c.sort)?;
            note(&c.of, c.sort.dual())?;
        }
    }
    let mut free = Vec::new();
    let mut derived = Vec::new();
    for (p, s) in sorts {
        let cvc = a.cvc.iter().chain(&b.cvc).find(|c| c.var == p);
        let stable = a.stb.iter().chain(&b.stb).any(|(q, _)| *q == p);
        match cvc {
            Some(c) => derived.push((p, Dom::Galois(s, c.of.clone()))),
            None if stable => free.push((p, Dom::Stable(s))),
            None => free.push((p, Dom::Free(s))),
        }
    }
    free.extend(derived);
    Ok(free)
}

fn holds(f: &SortedFrame, sys: &InequalitySystem, val: &SortedValuation) -> bool {
    match (eval_sorted(f, val, &sys.lhs), eval_sorted(f, val, &sys.rhs)) {
        (Ok(l), Ok(r)) => l.is_subset(r),
        _ => false,
    }
}

/// Joint valuations: `None` when one frame diverges, with a description.
fn check_frame(f: &SortedFrame, a: &InequalitySystem, b: &InequalitySystem, doms: &[(String, Dom)]) -> (usize, Option<String>) {
    let choices: Vec<Vec<PointSet>> = doms
        .iter()
        .map(|(_, d)| match d {
            Dom::Free(s) => PointSet::all_subsets(f.size(*s)).collect(),
            Dom::Stable(s) => f.stable_sets(*s).expect("small frame"),
            Dom::Galois(..) => vec![PointSet::EMPTY],
        })
        .collect();
    let mut idx = vec![0usize; doms.len()];
    let mut count = 0;
    loop {
        let mut val: SortedValuation = BTreeMap::new();
        for ((p, d), (i, ch)) in doms.iter().zip(idx.iter().zip(&choices)) {
            let v = match d {
                Dom::Galois(s, of) => f.galois(s.dual(), val[of]),
                _ => ch[*i],
            };
            val.insert(p.clone(), v);
        }
        count += 1;
        if holds(f, a, &val) != holds(f, b, &val) {
            let vs: Vec<String> = doms.iter().map(|(p, d)| format!("{p}={}", f.set_names(dom_sort(d), val[p]))).collect();
            return (count, Some(format!("{}+{} points, {}", f.size(Sort::One), f.size(Sort::D), vs.join(" "))));
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return (count, None);
            }
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SoundnessReport {
    pub instances: usize,
    pub frames: usize,
    pub valuations: usize,
    pub divergences: Vec<String>,
}

/// Re-checks each distinct rule instance: on every frame with at most `max` points per sort
/// meeting the rule's assumption, and every valuation satisfying the constraints of both
/// systems, the two main inequalities agree.
pub fn rule_soundness(steps: &[Step], max: usize) -> SoundnessReport {
    let mut rep = SoundnessReport::default();
    let mut seen = BTreeSet::new();
    let mut cache: BTreeMap<(Vec<RelName>, bool, Option<Assumption>), Vec<SortedFrame>> = BTreeMap::new();
    for st in steps {
        if !seen.insert((st.before.to_string(), st.after.to_string())) {
            continue;
        }
        rep.instances += 1;
        let mut rels = BTreeSet::new();
        let mut unit = false;
        for m in [&st.before.lhs, &st.before.rhs, &st.after.lhs, &st.after.rhs] {
            relations_of(m, &mut rels, &mut unit);
        }
        let asm = st.rule.assumption().filter(|a| *a == Assumption::Residuated);
        let key = (rels.iter().copied().collect::<Vec<_>>(), unit, asm);
        let frames = cache.entry(key).or_insert_with(|| soundness_frames(&rels, unit, asm, max));
        let doms = match domains(&st.before, &st.after) {
            Ok(d) => d,
            Err(e) => {
                rep.divergences.push(format!("{}: {e}", st.rule));
                continue;
            }
        };
        let results = par_map(frames, |f| check_frame(f, &st.before, &st.after, &doms));
        rep.frames += frames.len();
        for (n, bad) in results {
            rep.valuations += n;
            if let Some(b) = bad {
                rep.divergences.push(format!("{} {} ⇒ {}: {b}", st.rule, st.before, st.after));
                break;
            }
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_fo;

    fn two_point() -> SortedFrame {
        SortedFrame::numbered(2, 2, vec![PointSet::singleton(1), PointSet::EMPTY]).unwrap()
    }

    #[test]
    fn reflexivity_holds_everywhere() {
        let f = two_point();
        let c = fo_model_check(&f, &parse_fo("∀¹x x ≤ x").unwrap()).unwrap();
        assert!(c.holds);
    }

    #[test]
    fn empty_relation_fails_contraction_with_witness() {
        let f = two_point().with_relation(Relation::empty(RelName::R, 2, 2)).unwrap();
        let c = fo_model_check(&f, &parse_fo("∀¹x R(x,x,x)").unwrap()).unwrap();
        assert!(!c.holds);
        assert_eq!(c.witness.as_deref(), Some("x=x0"));
    }

    #[test]
    fn missing_relation_is_an_error() {
        let e = fo_model_check(&two_point(), &parse_fo("∀¹x R(x,x,x)").unwrap()).unwrap_err();
        assert!(matches!(e, CorrError::MissingRelation(_)));
    }

    #[test]
    fn second_order_quantifier_ranges_over_subsets() {
        let f = two_point();
        let fo = Fo::SoForall(Sort::One, "P".into(), Box::new(parse_fo("∀¹x (x = x)").unwrap()));
        assert!(fo_model_check(&f, &fo).unwrap().holds);
    }

    #[test]
    fn relation_enumeration_counts() {
        let f = two_point();
        assert_eq!(all_relations(RelName::R, &f).len(), 256);
        let rels: BTreeSet<RelName> = [RelName::R].into();
        let frames = soundness_frames(&rels, false, None, 1);
        assert_eq!(frames.len(), 2 * 2);
    }
}
