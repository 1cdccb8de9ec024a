//! Sahlqvist–van Benthem correspondence for the sorted modal companion.
//!
//! A sequent becomes an [`InequalitySystem`], the rewrite rules drive it into
//! canonical form, and [`compute_correspondent`] eliminates the predicate
//! variables by minimal instantiation.

pub mod check;
pub mod compute;
pub mod system;

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::frame::{ClassId, FrameError};
use crate::semantics::SemError;
use crate::syntax::{ImpMode, Sequent};

pub use check::{fo_model_check, rule_soundness, verify_correspondence, FoCheck, SoundnessReport};
pub use compute::{compute_correspondent, correspond, default_imp_mode, guarded_translation, Correspondent, FixedRow};
pub use system::{
    apply_rule, candidates, canonical_form_violation, is_canonical_form, to_system, Assumption, Cvc, InequalitySystem,
    Position, RuleContext, RuleId, Side, StepMode,
};

pub const DEFAULT_DEPTH: usize = 64;

#[derive(Debug, Error)]
pub enum CorrError {
    #[error("{rule} not applicable: {reason}")]
    RuleNotApplicable { rule: String, reason: String },
    #[error("not a Sahlqvist system ({} steps in best trace)", trace.len())]
    NotSahlqvist { trace: Vec<String> },
    #[error("not in canonical Sahlqvist form: {0}")]
    NotInCanonicalForm(String),
    #[error("missing relation: {0}")]
    MissingRelation(String),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Sem(#[from] SemError),
}

/// One logged rule application.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub rule: RuleId,
    pub position: Position,
    pub before: InequalitySystem,
    pub after: InequalitySystem,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<5} {:<8} {}", self.rule.as_str(), self.position.to_string(), self.after)
    }
}

#[derive(Clone, Debug)]
pub struct Reduction {
    pub initial: InequalitySystem,
    pub system: InequalitySystem,
    pub trace: Vec<Step>,
}

impl RuleContext {
    pub fn for_class(class: ClassId) -> RuleContext {
        RuleContext { residuated: class.is_lambek(), associative: false }
    }
}

/// R5 rewrites to a fixpoint, logging each one.
pub fn normalize(sys: &InequalitySystem, ctx: &RuleContext, trace: &mut Vec<Step>) -> InequalitySystem {
    let mut cur = sys.clone();
    while let Some((rule, pos)) = system::first_r5_redex(&cur, ctx) {
        let next = apply_rule(&cur, rule, &pos, ctx).expect("redex found by search applies");
        trace.push(Step { rule, position: pos, before: cur, after: next.clone() });
        cur = next;
    }
    cur
}

/// Drops guards on variables absent from the main inequality.
fn drop_unused(sys: &InequalitySystem, ctx: &RuleContext, trace: &mut Vec<Step>) -> InequalitySystem {
    let mut cur = sys.clone();
    loop {
        let main = cur.main_vars();
        let unused = cur
            .stb
            .iter()
            .map(|(p, _)| p.clone())
            .chain(cur.cvc.iter().map(|c| c.var.clone()))
            .find(|p| !main.contains(p));
        let Some(p) = unused else { return cur };
        let pos = Position::Var(p);
        let next = apply_rule(&cur, RuleId::R1, &pos, ctx).expect("unused guard");
        trace.push(Step { rule: RuleId::R1, position: pos, before: cur, after: next.clone() });
        cur = next;
    }
}

struct Search<'a> {
    ctx: &'a RuleContext,
    max_depth: usize,
    seen: HashSet<String>,
    best: Vec<Step>,
}

impl Search<'_> {
    fn dfs(&mut self, sys: &InequalitySystem, trace: &mut Vec<Step>) -> Option<InequalitySystem> {
        let mark = trace.len();
        let sys = normalize(sys, self.ctx, trace);
        if trace.len() > self.best.len() {
            self.best = trace.clone();
        }
        if is_canonical_form(&sys) {
            return Some(drop_unused(&sys, self.ctx, trace));
        }
        if trace.len() >= self.max_depth || !self.seen.insert(sys.to_string()) {
            trace.truncate(mark);
            return None;
        }
        for (rule, pos) in candidates(&sys, self.ctx) {
            let next = apply_rule(&sys, rule, &pos, self.ctx).expect("candidate applies");
            trace.push(Step { rule, position: pos, before: sys.clone(), after: next.clone() });
            if let Some(done) = self.dfs(&next, trace) {
                return Some(done);
            }
            trace.pop();
        }
        trace.truncate(mark);
        None
    }
}

/// Backtracking search for a canonical Sahlqvist form.
pub fn reduce(sys: &InequalitySystem, ctx: &RuleContext, max_depth: usize) -> Result<Reduction, CorrError> {
    let mut search = Search { ctx, max_depth, seen: HashSet::new(), best: Vec::new() };
    let mut trace = Vec::new();
    match search.dfs(sys, &mut trace) {
        Some(done) => Ok(Reduction { initial: sys.clone(), system: done, trace }),
        None => {
            let mut lines: Vec<String> = search.best.iter().map(|s| s.to_string()).collect();
            lines.insert(0, format!("start {sys}"));
            Err(CorrError::NotSahlqvist { trace: lines })
        }
    }
}

/// Step 1 plus reduction. `Auto` falls back to the co-translation.
pub fn reduce_sequent(
    seq: &Sequent,
    mode: StepMode,
    imp: ImpMode,
    ctx: &RuleContext,
    max_depth: usize,
) -> Result<Reduction, CorrError> {
    match mode {
        StepMode::Auto => match reduce(&to_system(seq, StepMode::Translate, imp), ctx, max_depth) {
            Ok(r) => Ok(r),
            Err(CorrError::NotSahlqvist { trace: first }) => {
                reduce(&to_system(seq, StepMode::Cotranslate, imp), ctx, max_depth).map_err(|e| match e {
                    CorrError::NotSahlqvist { trace } => {
                        CorrError::NotSahlqvist { trace: first.into_iter().chain(trace).collect() }
                    }
                    other => other,
                })
            }
            Err(e) => Err(e),
        },
        m => reduce(&to_system(seq, m, imp), ctx, max_depth),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::Sort;
    use crate::syntax::modal::{dprime, fuse, prime, tri_r, v1, vd, Modal};
    use crate::syntax::parse_sequent;

    fn lk() -> RuleContext {
        RuleContext { residuated: true, associative: false }
    }

    #[test]
    fn weakening_system_and_r7() {
        let seq = parse_sequent("p |- q -> p").unwrap();
        let sys = to_system(&seq, StepMode::Translate, ImpMode::Rspoon);
        assert_eq!(sys.to_string(), "⟨P′′ ≤₁ Q′′ ⊸ P′′⟩");
        let s = apply_rule(&sys, RuleId::R7a, &Position::Main, &lk()).unwrap();
        assert_eq!(s.to_string(), "⟨Q′′ ⊙ P′′ ≤₁ P′′⟩");
        let s = apply_rule(&s, RuleId::R4, &Position::Var("P".into()), &lk()).unwrap();
        let s = apply_rule(&s, RuleId::R4, &Position::Var("Q".into()), &lk()).unwrap();
        assert_eq!(s.to_string(), "⟨P′′ ≤₁ P, Q′′ ≤₁ Q ∣ Q ⊙ P ≤₁ P⟩");
        assert!(is_canonical_form(&s));
    }

    #[test]
    fn side_conditions_are_reported() {
        let sys = InequalitySystem::new(fuse(prime(v1("P")), dprime(v1("P"))), dprime(v1("P")), Sort::One);
        let e = apply_rule(&sys, RuleId::R4, &Position::Var("P".into()), &lk()).unwrap_err();
        assert!(e.to_string().contains("double-primed"), "{e}");
        assert!(matches!(reduce(&sys, &lk(), DEFAULT_DEPTH), Err(CorrError::NotSahlqvist { .. })));
    }

    #[test]
    fn unit_cotranslation_reduces_with_change_of_variables() {
        let seq = parse_sequent("t -> p |- p").unwrap();
        let sys = to_system(&seq, StepMode::Cotranslate, ImpMode::Table6);
        assert_eq!(sys.to_string(), "⟨P′ ≤∂ (u ▷ P′)′′⟩");
        let seq = parse_sequent("p |- t -> p").unwrap();
        let sys = to_system(&seq, StepMode::Cotranslate, ImpMode::Table6);
        assert_eq!(sys.to_string(), "⟨(u ▷ P′)′′ ≤∂ P′⟩");
        let r = reduce(&sys, &RuleContext::default(), DEFAULT_DEPTH).unwrap();
        assert_eq!(r.system.to_string(), "⟨Q =∂ P′ ∣ u ▷ Q ≤∂ Q⟩");
        let expect = InequalitySystem {
            stb: vec![],
            cvc: vec![Cvc { var: "Q".into(), sort: Sort::D, of: "P".into() }],
            lhs: tri_r(Modal::Unit, vd("Q")),
            rhs: vd("Q"),
            sort: Sort::D,
        };
        assert_eq!(r.system, expect);
    }

    #[test]
    fn r1_needs_an_unused_guard() {
        let mut sys = InequalitySystem::new(v1("P"), v1("P"), Sort::One);
        sys.stb.push(("P".into(), Sort::One));
        sys.stb.push(("Z".into(), Sort::One));
        assert!(apply_rule(&sys, RuleId::R1, &Position::Var("P".into()), &lk()).is_err());
        let s = apply_rule(&sys, RuleId::R1, &Position::Var("Z".into()), &lk()).unwrap();
        assert_eq!(s.stb.len(), 1);
    }

    #[test]
    fn positions_round_trip() {
        for p in ["main", "P", "R", "lhs.0.1", "rhs"] {
            assert_eq!(p.parse::<Position>().unwrap().to_string(), p);
        }
    }
}
