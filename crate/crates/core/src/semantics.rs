//! Satisfaction over sorted frames: object formulas, modal terms, sequents.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::bitset::PointSet;
use crate::frame::{FrameError, RelName, Sort, SortedFrame};
use crate::report::Report;
use crate::syntax::translate::{bullet, circ, modal_name, ImpMode};
use crate::syntax::{Formula, Modal, Sequent};

/// Object valuation: each variable denotes a stable sort-1 set.
pub type Valuation = BTreeMap<String, PointSet>;

/// Sorted valuation: each modal variable denotes an arbitrary subset of its sort.
pub type SortedValuation = BTreeMap<String, PointSet>;

pub const DEFAULT_SEARCH_BOUND: u128 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemError {
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("variable `{0}` has no value")]
    Unbound(String),
    #[error("value of `{0}` is not a stable set")]
    NotStable(String),
    #[error("{combos} valuations exceed the bound of {bound}")]
    SearchSpaceTooLarge { combos: u128, bound: u128 },
    #[error("{vars} variables exceed the bound of {bound}")]
    TooManyVariables { vars: usize, bound: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Extent (sort 1) and co-extent (sort ∂) of an object formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Extent {
    pub extent: PointSet,
    pub co_extent: PointSet,
}

pub fn eval_object(frame: &SortedFrame, val: &Valuation, phi: &Formula) -> Result<Extent, SemError> {
    let ext = |e: PointSet| Extent { extent: e, co_extent: frame.galois(Sort::One, e) };
    let co = |c: PointSet| Extent { extent: frame.galois(Sort::D, c), co_extent: c };
    Ok(match phi {
        Formula::Var(p) => {
            let v = *val.get(p).ok_or_else(|| SemError::Unbound(p.clone()))?;
            if !frame.is_stable(Sort::One, v) {
                return Err(SemError::NotStable(p.clone()));
            }
            ext(v)
        }
        Formula::Top => ext(frame.full(Sort::One)),
        Formula::Bot => co(frame.full(Sort::D)),
        Formula::Unit => ext(frame.require_unit()?),
        Formula::And(a, b) => ext(eval_object(frame, val, a)?.extent.inter(eval_object(frame, val, b)?.extent)),
        Formula::Or(a, b) => co(eval_object(frame, val, a)?.co_extent.inter(eval_object(frame, val, b)?.co_extent)),
        Formula::Imp(a, b) => {
            let a = eval_object(frame, val, a)?;
            let b = eval_object(frame, val, b)?;
            ext(frame.galois(Sort::D, frame.image(RelName::T, a.extent, b.co_extent)?))
        }
        Formula::Fuse(a, b) => {
            let a = eval_object(frame, val, a)?;
            let b = eval_object(frame, val, b)?;
            co(frame.galois(Sort::One, frame.image(RelName::R, a.extent, b.extent)?))
        }
        Formula::LImp(b, a) => {
            let a = eval_object(frame, val, a)?;
            let b = eval_object(frame, val, b)?;
            ext(frame.galois(Sort::D, frame.image(RelName::S, b.co_extent, a.extent)?))
        }
    })
}

/// Extent of a sorted modal term; the result is a subset of the term's sort.
pub fn eval_sorted(frame: &SortedFrame, val: &SortedValuation, m: &Modal) -> Result<PointSet, SemError> {
    let ev = |t: &Modal| eval_sorted(frame, val, t);
    Ok(match m {
        Modal::Var(s, p) => {
            let v = *val.get(p).ok_or_else(|| SemError::Unbound(p.clone()))?;
            v.inter(frame.full(*s))
        }
        Modal::Top(s) => frame.full(*s),
        Modal::Bot(_) => PointSet::EMPTY,
        Modal::Unit => frame.require_unit()?,
        Modal::Meet(a, b) => ev(a)?.inter(ev(b)?),
        Modal::Join(a, b) => ev(a)?.union(ev(b)?),
        Modal::Prime(a) => {
            let s = a.sort().unwrap_or(Sort::One);
            frame.galois(s, ev(a)?)
        }
        Modal::Fuse(a, b) => frame.image(RelName::R, ev(a)?, ev(b)?)?,
        Modal::TriR(a, b) => frame.image(RelName::T, ev(a)?, ev(b)?)?,
        Modal::TriL(b, a) => frame.image(RelName::S, ev(b)?, ev(a)?)?,
        Modal::RImp(a, e) => {
            let (a, e) = (ev(a)?, ev(e)?);
            residual(frame, |x| frame.image(RelName::R, a, PointSet::singleton(x)), e)?
        }
        Modal::LImp(e, a) => {
            let (a, e) = (ev(a)?, ev(e)?);
            residual(frame, |x| frame.image(RelName::R, PointSet::singleton(x), a), e)?
        }
    })
}

fn residual(
    frame: &SortedFrame,
    image: impl Fn(usize) -> Result<PointSet, FrameError>,
    target: PointSet,
) -> Result<PointSet, SemError> {
    let mut out = PointSet::EMPTY;
    for x in 0..frame.size(Sort::One) {
        if image(x)?.is_subset(target) {
            out.insert(x);
        }
    }
    Ok(out)
}

/// ⟦lhs⟧ ⊆ ⟦rhs⟧; on failure a point of the difference.
pub fn check_sequent(frame: &SortedFrame, val: &Valuation, seq: &Sequent) -> Result<Option<usize>, SemError> {
    let l = eval_object(frame, val, &seq.lhs)?.extent;
    let r = eval_object(frame, val, &seq.rhs)?.extent;
    Ok(l.minus(r).first())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Validity {
    pub valid: bool,
    /// falsifying valuation and point
    pub counter: Option<(Valuation, usize)>,
}

/// Validity over all stable valuations of the sequent's variables.
pub fn check_validity(frame: &SortedFrame, seq: &Sequent, max_vars: usize) -> Result<Validity, SemError> {
    check_validity_bounded(frame, seq, max_vars, DEFAULT_SEARCH_BOUND)
}

pub fn check_validity_bounded(
    frame: &SortedFrame,
    seq: &Sequent,
    max_vars: usize,
    bound: u128,
) -> Result<Validity, SemError> {
    let vars = seq.vars();
    if vars.len() > max_vars {
        return Err(SemError::TooManyVariables { vars: vars.len(), bound: max_vars });
    }
    let stable = frame.stable_sets(Sort::One)?;
    let combos = (stable.len() as u128).checked_pow(vars.len() as u32).unwrap_or(u128::MAX);
    if combos > bound {
        return Err(SemError::SearchSpaceTooLarge { combos, bound });
    }
    let mut idx = vec![0usize; vars.len()];
    loop {
        let val: Valuation = vars.iter().zip(&idx).map(|(v, &i)| (v.clone(), stable[i])).collect();
        if let Some(w) = check_sequent(frame, &val, seq)? {
            return Ok(Validity { valid: false, counter: Some((val, w)) });
        }
        // odometer
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(Validity { valid: true, counter: None });
            }
            idx[k] += 1;
            if idx[k] < stable.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Object valuation induced by a sorted one: V̄(p) = V(P)″.
pub fn induced_valuation(frame: &SortedFrame, vars: &[String], sval: &SortedValuation) -> Valuation {
    vars.iter()
        .map(|p| {
            let v = sval.get(&modal_name(p)).copied().unwrap_or(PointSet::EMPTY);
            (p.clone(), frame.closure(Sort::One, v.inter(frame.full(Sort::One))))
        })
        .collect()
}

fn show(frame: &SortedFrame, s: Sort, x: PointSet) -> String {
    frame.set_names(s, x)
}

/// Items 1 and 2: ⟦φ•⟧ = ⟦φ⟧ = ⟦(φ°)′⟧ = ⟦(φ•)″⟧ and the co-extent analogue.
pub fn check_full_abstraction(
    frame: &SortedFrame,
    phi: &Formula,
    sval: &SortedValuation,
    mode: ImpMode,
) -> Result<Report, SemError> {
    let mut rep = Report::new(format!("full abstraction for {phi}"));
    let val = induced_valuation(frame, &phi.vars(), sval);
    let obj = eval_object(frame, &val, phi)?;
    let b = bullet(phi, mode);
    let c = circ(phi, mode);
    let eb = eval_sorted(frame, sval, &b)?;
    let ec = eval_sorted(frame, sval, &c)?;
    let c_prime = frame.galois(Sort::D, ec);
    let b_dd = frame.closure(Sort::One, eb);
    let ok1 = eb == obj.extent && c_prime == obj.extent && b_dd == obj.extent;
    rep.push(
        "extent",
        ok1,
        (!ok1).then(|| {
            format!(
                "[[φ•]]={} [[φ]]={} [[(φ°)′]]={} [[(φ•)″]]={}",
                show(frame, Sort::One, eb),
                show(frame, Sort::One, obj.extent),
                show(frame, Sort::One, c_prime),
                show(frame, Sort::One, b_dd)
            )
        }),
    );
    let b_prime = frame.galois(Sort::One, eb);
    let c_dd = frame.closure(Sort::D, ec);
    let ok2 = ec == obj.co_extent && b_prime == obj.co_extent && c_dd == obj.co_extent;
    rep.push(
        "co-extent",
        ok2,
        (!ok2).then(|| {
            format!(
                "[[φ°]]={} co[[φ]]={} [[(φ•)′]]={} [[(φ°)″]]={}",
                show(frame, Sort::D, ec),
                show(frame, Sort::D, obj.co_extent),
                show(frame, Sort::D, b_prime),
                show(frame, Sort::D, c_dd)
            )
        }),
    );
    Ok(rep)
}

/// Item 3: M ⊨ φ• ⊢ ψ• iff N ⊨ φ ⊢ ψ iff M ⊨ ψ° ⊢ φ° (∂-sorted inclusion).
pub fn check_full_abstraction_sequent(
    frame: &SortedFrame,
    seq: &Sequent,
    sval: &SortedValuation,
    mode: ImpMode,
) -> Result<Report, SemError> {
    let mut rep = Report::new(format!("full abstraction for {seq}"));
    let val = induced_valuation(frame, &seq.vars(), sval);
    let object = check_sequent(frame, &val, seq)?.is_none();
    let tr = eval_sorted(frame, sval, &bullet(&seq.lhs, mode))?
        .is_subset(eval_sorted(frame, sval, &bullet(&seq.rhs, mode))?);
    let co = eval_sorted(frame, sval, &circ(&seq.rhs, mode))?
        .is_subset(eval_sorted(frame, sval, &circ(&seq.lhs, mode))?);
    let ok = object == tr && tr == co;
    rep.push(
        "sequent",
        ok,
        (!ok).then(|| format!("translation {tr}, object {object}, co-translation {co}")),
    );
    Ok(rep)
}

/// Reads lines `p: x0 x2`. Non-stable sets are closed; each closure adds a warning.
pub fn parse_valuation(frame: &SortedFrame, text: &str) -> Result<(Valuation, Vec<String>), SemError> {
    let mut val = Valuation::new();
    let mut warnings = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| SemError::Parse { line: line_no, msg: "expected `name: points`".into() })?;
        let key = key.trim();
        if key.is_empty() || !key.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(SemError::Parse { line: line_no, msg: format!("bad variable name `{key}`") });
        }
        let mut set = PointSet::EMPTY;
        for name in rest.split_whitespace() {
            let idx = frame.index(Sort::One, name).ok_or_else(|| SemError::Parse {
                line: line_no,
                msg: format!("unknown sort-1 point `{name}`"),
            })?;
            set.insert(idx);
        }
        let closed = frame.closure(Sort::One, set);
        if closed != set {
            warnings.push(format!(
                "line {line_no}: {key} = {} is not stable; using its closure {}",
                frame.set_names(Sort::One, set),
                frame.set_names(Sort::One, closed)
            ));
        }
        if val.insert(key.to_string(), closed).is_some() {
            return Err(SemError::Parse { line: line_no, msg: format!("`{key}` assigned twice") });
        }
    }
    Ok((val, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::Relation;
    use crate::syntax::{parse_formula, parse_sequent};

    fn classical(n: usize) -> SortedFrame {
        let names = (0..n).map(|i| format!("w{i}")).collect();
        SortedFrame::classical(names).unwrap()
    }

    #[test]
    fn classical_implication_is_boolean() {
        // T with yTxv iff x=y=v gives the Boolean clause
        let f = classical(3);
        let mut t = Relation::empty(RelName::T, 3, 3);
        for w in 0..3 {
            t.insert(w, w, w);
        }
        let f = f.with_relation(t).unwrap();
        let phi = parse_formula("p -> q").unwrap();
        for p in PointSet::all_subsets(3) {
            for q in PointSet::all_subsets(3) {
                let val: Valuation = [("p".to_string(), p), ("q".to_string(), q)].into();
                let got = eval_object(&f, &val, &phi).unwrap().extent;
                let want = p.complement(3).union(q);
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn bottom_is_closure_of_empty() {
        let f = SortedFrame::numbered(2, 2, vec![PointSet::from_bits(0b01), PointSet::EMPTY]).unwrap();
        let e = eval_object(&f, &Valuation::new(), &Formula::Bot).unwrap();
        assert_eq!(e.extent, f.closure(Sort::One, PointSet::EMPTY));
        assert_eq!(e.co_extent, f.full(Sort::D));
    }

    #[test]
    fn exchange_fails_with_witness_on_asymmetric_r() {
        let f = classical(2);
        let mut r = Relation::empty(RelName::R, 2, 2);
        r.insert(0, 0, 1);
        let f = f.with_relation(r).unwrap();
        let seq = parse_sequent("p * q |- q * p").unwrap();
        let v = check_validity(&f, &seq, 4).unwrap();
        assert!(!v.valid);
        let (val, w) = v.counter.unwrap();
        assert_eq!(check_sequent(&f, &val, &seq).unwrap(), Some(w));
    }

    #[test]
    fn search_bound_is_enforced() {
        let f = classical(4);
        let seq = parse_sequent("p & q & r & s & p1 |- p").unwrap();
        let e = check_validity_bounded(&f, &seq, 8, 1000).unwrap_err();
        assert!(matches!(e, SemError::SearchSpaceTooLarge { .. }));
    }

    #[test]
    fn double_prime_is_closure() {
        let f = SortedFrame::numbered(3, 2, vec![
            PointSet::from_bits(0b01),
            PointSet::from_bits(0b10),
            PointSet::from_bits(0b00),
        ])
        .unwrap();
        let m = crate::syntax::modal::dprime(crate::syntax::modal::v1("P"));
        for s in PointSet::all_subsets(3) {
            let val: SortedValuation = [("P".to_string(), s)].into();
            assert_eq!(eval_sorted(&f, &val, &m).unwrap(), f.closure(Sort::One, s));
        }
    }

    #[test]
    fn valuation_file_closes_with_warning() {
        let f = SortedFrame::numbered(2, 1, vec![PointSet::from_bits(0b1), PointSet::EMPTY]).unwrap();
        // x1 has no neighbour, so every stable set contains it
        let (val, warnings) = parse_valuation(&f, "p: x0\nq: x0 x1 # full\n").unwrap();
        assert_eq!(val["p"], PointSet::from_bits(0b11));
        assert_eq!(warnings.len(), 1);
        assert!(parse_valuation(&f, "p x0").is_err());
        assert!(parse_valuation(&f, "p: zz").is_err());
    }
}
