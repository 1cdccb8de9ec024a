//! Systems of formal inequalities and the reduction rules acting on them.

use std::collections::BTreeSet;
use std::fmt;

use super::CorrError;
use crate::frame::Sort;
use crate::syntax::modal::{fuse, prime, tri_l, tri_r, Modal, Polarity};
use crate::syntax::translate::{bullet, circ, ImpMode};
use crate::syntax::Sequent;

/// Change of variables Q =_♯ P′, where ♯ is the sort of Q.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cvc {
    pub var: String,
    pub sort: Sort,
    pub of: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InequalitySystem {
    /// stability constraints P″ ≤ P, with the sort of P
    pub stb: Vec<(String, Sort)>,
    pub cvc: Vec<Cvc>,
    pub lhs: Modal,
    pub rhs: Modal,
    pub sort: Sort,
}

fn sort_sub(s: Sort) -> &'static str {
    match s {
        Sort::One => "₁",
        Sort::D => "∂",
    }
}

impl fmt::Display for InequalitySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut guards: Vec<String> = self.stb.iter().map(|(p, s)| format!("{p}′′ ≤{} {p}", sort_sub(*s))).collect();
        guards.extend(self.cvc.iter().map(|c| format!("{} ={} {}′", c.var, sort_sub(c.sort), c.of)));
        write!(f, "⟨")?;
        if !guards.is_empty() {
            write!(f, "{} ∣ ", guards.join(", "))?;
        }
        write!(f, "{} ≤{} {}⟩", self.lhs, sort_sub(self.sort), self.rhs)
    }
}

/// Which inequality Step 1 starts from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepMode {
    Translate,
    Cotranslate,
    Auto,
}

impl std::str::FromStr for StepMode {
    type Err = String;
    fn from_str(s: &str) -> Result<StepMode, String> {
        match s {
            "translate" => Ok(StepMode::Translate),
            "cotranslate" => Ok(StepMode::Cotranslate),
            "auto" => Ok(StepMode::Auto),
            _ => Err(format!("unknown mode `{s}` (translate | cotranslate | auto)")),
        }
    }
}

/// φ ⊢ ψ as φ• ≤₁ ψ•, or as ψ° ≤∂ φ°. `Auto` yields the translation.
pub fn to_system(seq: &Sequent, mode: StepMode, imp: ImpMode) -> InequalitySystem {
    match mode {
        StepMode::Cotranslate => InequalitySystem::new(circ(&seq.rhs, imp), circ(&seq.lhs, imp), Sort::D),
        _ => InequalitySystem::new(bullet(&seq.lhs, imp), bullet(&seq.rhs, imp), Sort::One),
    }
}

impl InequalitySystem {
    pub fn new(lhs: Modal, rhs: Modal, sort: Sort) -> InequalitySystem {
        InequalitySystem { stb: Vec::new(), cvc: Vec::new(), lhs, rhs, sort }
    }

    pub fn is_constrained(&self, p: &str) -> bool {
        self.stb.iter().any(|(q, _)| q == p) || self.cvc.iter().any(|c| c.var == p)
    }

    /// Sort of a constrained variable.
    pub fn constraint_sort(&self, p: &str) -> Option<Sort> {
        self.stb
            .iter()
            .find(|(q, _)| q == p)
            .map(|(_, s)| *s)
            .or_else(|| self.cvc.iter().find(|c| c.var == p).map(|c| c.sort))
    }

    pub fn main_vars(&self) -> BTreeSet<String> {
        let mut v = self.lhs.var_names();
        v.extend(self.rhs.var_names());
        v
    }

    /// Every name in use, constraints included.
    pub fn all_names(&self) -> BTreeSet<String> {
        let mut v = self.main_vars();
        v.extend(self.stb.iter().map(|(p, _)| p.clone()));
        for c in &self.cvc {
            v.insert(c.var.clone());
            v.insert(c.of.clone());
        }
        v
    }

    /// Sort of every variable of the main inequality.
    pub fn var_sorts(&self) -> Vec<(String, Sort)> {
        let mut out: Vec<(String, Sort)> = Vec::new();
        for side in [&self.lhs, &self.rhs] {
            side.walk(&mut |m| {
                if let Modal::Var(s, p) = m {
                    if !out.iter().any(|(q, _)| q == p) {
                        out.push((p.clone(), *s));
                    }
                }
            });
        }
        out.sort();
        out
    }

    fn side(&self, side: Side) -> &Modal {
        match side {
            Side::Lhs => &self.lhs,
            Side::Rhs => &self.rhs,
        }
    }

    fn with_side(&self, side: Side, m: Modal) -> InequalitySystem {
        let mut s = self.clone();
        match side {
            Side::Lhs => s.lhs = m,
            Side::Rhs => s.rhs = m,
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Lhs,
    Rhs,
}

/// Where a rule applies.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Position {
    Main,
    Var(String),
    Term(Side, Vec<usize>),
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Position::Main => f.write_str("main"),
            Position::Var(p) => f.write_str(p),
            Position::Term(side, path) => {
                f.write_str(match side {
                    Side::Lhs => "lhs",
                    Side::Rhs => "rhs",
                })?;
                for i in path {
                    write!(f, ".{i}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::str::FromStr for Position {
    type Err = String;
    fn from_str(s: &str) -> Result<Position, String> {
        if s == "main" {
            return Ok(Position::Main);
        }
        let mut parts = s.split('.');
        let head = parts.next().unwrap_or("");
        let side = match head {
            "lhs" => Some(Side::Lhs),
            "rhs" => Some(Side::Rhs),
            _ => None,
        };
        match side {
            Some(side) => {
                let path = parts.map(|p| p.parse::<usize>().map_err(|_| format!("bad path `{s}`"))).collect::<Result<_, _>>()?;
                Ok(Position::Term(side, path))
            }
            None if !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || c == '_') => Ok(Position::Var(s.to_string())),
            None => Err(format!("bad position `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    R1,
    R2,
    R3,
    /// R3 against a stable residual on the right (residuated classes)
    R3x,
    R4,
    R5_1,
    /// (η∩ζ)″ ↦ η″∩ζ″
    R5_2a,
    /// (η∪ζ)′ ↦ η′∩ζ′
    R5_2b,
    R5_3,
    R5_4,
    R5_5,
    R5_6,
    R6,
    /// α ≤ η⊸ζ ↦ η⊙α ≤ ζ
    R7a,
    /// η ≤ ζ⟜α ↦ η⊙α ≤ ζ
    R7b,
}

/// Frame assumption a rule instance relies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Assumption {
    /// (F1) for T, R, S together with (RES)
    Residuated,
    /// ⊙ associative on all subsets
    Associative,
}

impl RuleId {
    pub const R5: [RuleId; 7] =
        [RuleId::R5_1, RuleId::R5_2a, RuleId::R5_2b, RuleId::R5_3, RuleId::R5_4, RuleId::R5_5, RuleId::R5_6];

    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::R1 => "R1",
            RuleId::R2 => "R2",
            RuleId::R3 => "R3",
            RuleId::R3x => "R3+",
            RuleId::R4 => "R4",
            RuleId::R5_1 => "R5.1",
            RuleId::R5_2a => "R5.2a",
            RuleId::R5_2b => "R5.2b",
            RuleId::R5_3 => "R5.3",
            RuleId::R5_4 => "R5.4",
            RuleId::R5_5 => "R5.5",
            RuleId::R5_6 => "R5.6",
            RuleId::R6 => "R6",
            RuleId::R7a => "R7",
            RuleId::R7b => "R7'",
        }
    }

    pub fn parse(s: &str) -> Option<RuleId> {
        let all = [
            RuleId::R1,
            RuleId::R2,
            RuleId::R3,
            RuleId::R3x,
            RuleId::R4,
            RuleId::R5_1,
            RuleId::R5_2a,
            RuleId::R5_2b,
            RuleId::R5_3,
            RuleId::R5_4,
            RuleId::R5_5,
            RuleId::R5_6,
            RuleId::R6,
            RuleId::R7a,
            RuleId::R7b,
        ];
        all.into_iter().find(|r| r.as_str() == s)
    }

    pub fn assumption(self) -> Option<Assumption> {
        match self {
            RuleId::R3x | RuleId::R5_3 | RuleId::R5_5 => Some(Assumption::Residuated),
            RuleId::R5_4 | RuleId::R5_6 => Some(Assumption::Associative),
            _ => None,
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which class-relative rules are enabled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RuleContext {
    /// frames satisfy (F1) for all relations and (RES)
    pub residuated: bool,
    /// ⊙ is associative
    pub associative: bool,
}

impl RuleContext {
    pub fn allows(&self, r: RuleId) -> bool {
        match r.assumption() {
            Some(Assumption::Residuated) => self.residuated,
            Some(Assumption::Associative) => self.associative,
            None => true,
        }
    }
}

// ----- term helpers -----

pub(crate) fn subterm<'a>(m: &'a Modal, path: &[usize]) -> Option<&'a Modal> {
    match path.split_first() {
        None => Some(m),
        Some((&i, rest)) => subterm(m.children().get(i)?, rest),
    }
}

pub(crate) fn replace_at(m: &Modal, path: &[usize], new: Modal) -> Modal {
    let Some((&i, rest)) = path.split_first() else { return new };
    let r = |k: usize, c: &Modal| if k == i { replace_at(c, rest, new.clone()) } else { c.clone() };
    match m {
        Modal::Prime(a) => Modal::Prime(Box::new(r(0, a))),
        Modal::Meet(a, b) => Modal::Meet(Box::new(r(0, a)), Box::new(r(1, b))),
        Modal::Join(a, b) => Modal::Join(Box::new(r(0, a)), Box::new(r(1, b))),
        Modal::Fuse(a, b) => Modal::Fuse(Box::new(r(0, a)), Box::new(r(1, b))),
        Modal::RImp(a, b) => Modal::RImp(Box::new(r(0, a)), Box::new(r(1, b))),
        Modal::LImp(a, b) => Modal::LImp(Box::new(r(0, a)), Box::new(r(1, b))),
        Modal::TriR(a, b) => Modal::TriR(Box::new(r(0, a)), Box::new(r(1, b))),
        Modal::TriL(a, b) => Modal::TriL(Box::new(r(0, a)), Box::new(r(1, b))),
        leaf => leaf.clone(),
    }
}

fn paths(m: &Modal, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(prefix.clone());
    for (i, c) in m.children().into_iter().enumerate() {
        prefix.push(i);
        paths(c, prefix, out);
        prefix.pop();
    }
}

fn is_var(m: &Modal) -> Option<&str> {
    match m {
        Modal::Var(_, p) => Some(p),
        _ => None,
    }
}

/// Syntactically Galois stable (or co-stable) terms.
pub(crate) fn is_stable_term(m: &Modal, sys: &InequalitySystem, ctx: &RuleContext) -> bool {
    match m {
        Modal::Prime(_) | Modal::Top(_) => true,
        Modal::Var(_, p) => sys.is_constrained(p),
        Modal::Meet(a, b) => is_stable_term(a, sys, ctx) && is_stable_term(b, sys, ctx),
        Modal::RImp(_, e) | Modal::LImp(e, _) => ctx.residuated && is_stable_term(e, sys, ctx),
        _ => false,
    }
}

/// Meet of primed terms.
fn is_primed_meet(m: &Modal) -> bool {
    match m {
        Modal::Prime(_) => true,
        Modal::Meet(a, b) => is_primed_meet(a) && is_primed_meet(b),
        _ => false,
    }
}

fn rewrite_r5(rule: RuleId, m: &Modal, sys: &InequalitySystem, ctx: &RuleContext) -> Option<Modal> {
    let constrained_var = |t: &Modal| is_var(t).is_some_and(|p| sys.is_constrained(p));
    match (rule, m) {
        (RuleId::R5_1, Modal::Prime(a)) => match &**a {
            Modal::Prime(b) => match &**b {
                Modal::Prime(c) => Some(prime((**c).clone())),
                _ => None,
            },
            _ => None,
        },
        (RuleId::R5_2a, Modal::Prime(a)) => match &**a {
            Modal::Prime(b) => match &**b {
                Modal::Meet(x, y) if is_stable_term(x, sys, ctx) && is_stable_term(y, sys, ctx) => Some(
                    Modal::Meet(Box::new(prime(prime((**x).clone()))), Box::new(prime(prime((**y).clone())))),
                ),
                _ => None,
            },
            _ => None,
        },
        (RuleId::R5_2b, Modal::Prime(a)) => match &**a {
            Modal::Join(x, y) => Some(Modal::Meet(Box::new(prime((**x).clone())), Box::new(prime((**y).clone())))),
            _ => None,
        },
        (RuleId::R5_3, Modal::RImp(p, q)) if constrained_var(p) && constrained_var(q) => {
            Some(prime(tri_r((**p).clone(), prime((**q).clone()))))
        }
        (RuleId::R5_5, Modal::LImp(q, p)) if constrained_var(p) && constrained_var(q) => {
            Some(prime(tri_l(prime((**q).clone()), (**p).clone())))
        }
        (RuleId::R5_4, Modal::RImp(p2, inner)) => match &**inner {
            Modal::RImp(p1, q) => Some(Modal::RImp(Box::new(fuse((**p1).clone(), (**p2).clone())), q.clone())),
            _ => None,
        },
        (RuleId::R5_6, Modal::LImp(inner, p1)) => match &**inner {
            Modal::LImp(q, p2) => Some(Modal::LImp(q.clone(), Box::new(fuse((**p1).clone(), (**p2).clone())))),
            _ => None,
        },
        _ => None,
    }
}

fn not_applicable(rule: RuleId, why: impl Into<String>) -> CorrError {
    CorrError::RuleNotApplicable { rule: rule.as_str().to_string(), reason: why.into() }
}

fn fresh_name(sys: &InequalitySystem) -> String {
    let used = sys.all_names();
    if !used.contains("Q") {
        return "Q".into();
    }
    (1..).map(|i| format!("Q{i}")).find(|n| !used.contains(n)).unwrap()
}

/// Applies one rule instance, checking its side conditions.
pub fn apply_rule(
    sys: &InequalitySystem,
    rule: RuleId,
    pos: &Position,
    ctx: &RuleContext,
) -> Result<InequalitySystem, CorrError> {
    if !ctx.allows(rule) {
        return Err(not_applicable(rule, "rule needs a frame assumption the class does not provide"));
    }
    match rule {
        RuleId::R1 => {
            let Position::Var(p) = pos else { return Err(not_applicable(rule, "position must name a variable")) };
            if sys.main_vars().contains(p) {
                return Err(not_applicable(rule, format!("{p} occurs in the main inequality")));
            }
            let mut s = sys.clone();
            let before = s.stb.len() + s.cvc.len();
            s.stb.retain(|(q, _)| q != p);
            s.cvc.retain(|c| c.var != *p);
            if s.stb.len() + s.cvc.len() == before {
                return Err(not_applicable(rule, format!("no guard on {p}")));
            }
            Ok(s)
        }
        RuleId::R2 | RuleId::R3 | RuleId::R3x => {
            let Modal::Prime(a) = &sys.lhs else { return Err(not_applicable(rule, "left side is not double-primed")) };
            let Modal::Prime(z) = &**a else { return Err(not_applicable(rule, "left side is not double-primed")) };
            let ok = match rule {
                RuleId::R2 => is_primed_meet(&sys.rhs),
                RuleId::R3 => matches!(sys.rhs.strip_primes().0, n if n >= 2),
                _ => is_stable_term(&sys.rhs, sys, ctx) && !is_primed_meet(&sys.rhs),
            };
            if !ok {
                return Err(not_applicable(rule, "right side has the wrong shape"));
            }
            let mut s = sys.clone();
            s.lhs = (**z).clone();
            Ok(s)
        }
        RuleId::R4 => {
            let Position::Var(p) = pos else { return Err(not_applicable(rule, "position must name a variable")) };
            if sys.is_constrained(p) {
                return Err(not_applicable(rule, format!("{p} is already constrained")));
            }
            let occ: Vec<_> = [&sys.lhs, &sys.rhs]
                .iter()
                .flat_map(|m| m.occurrences(Polarity::Pos))
                .filter(|o| o.name == *p)
                .collect();
            if occ.is_empty() {
                return Err(not_applicable(rule, format!("{p} does not occur")));
            }
            if occ.iter().any(|o| o.primes != 2) {
                return Err(not_applicable(rule, format!("not every occurrence of {p} is double-primed")));
            }
            let sort = occ[0].sort;
            let var = Modal::Var(sort, p.clone());
            let strip = |m: &Modal| {
                m.map_bottom_up(&mut |t| match &t {
                    Modal::Prime(a) if matches!(&**a, Modal::Prime(b) if **b == var) => var.clone(),
                    _ => t,
                })
            };
            let mut s = sys.clone();
            s.lhs = strip(&sys.lhs);
            s.rhs = strip(&sys.rhs);
            s.stb.push((p.clone(), sort));
            Ok(s)
        }
        RuleId::R6 => {
            let Position::Var(p) = pos else { return Err(not_applicable(rule, "position must name a variable")) };
            if sys.is_constrained(p) {
                return Err(not_applicable(rule, format!("{p} is already constrained")));
            }
            let occ: Vec<_> = [&sys.lhs, &sys.rhs]
                .iter()
                .flat_map(|m| m.occurrences(Polarity::Pos))
                .filter(|o| o.name == *p)
                .collect();
            if occ.is_empty() {
                return Err(not_applicable(rule, format!("{p} does not occur")));
            }
            if occ.iter().any(|o| o.primes != 1) || primes_above(sys, p) {
                return Err(not_applicable(rule, format!("not every occurrence of {p} is single-primed")));
            }
            let sort = occ[0].sort;
            let q = fresh_name(sys);
            let var = Modal::Var(sort, p.clone());
            let qv = Modal::Var(sort.dual(), q.clone());
            let swap = |m: &Modal| {
                m.map_bottom_up(&mut |t| match &t {
                    Modal::Prime(a) if **a == var => qv.clone(),
                    _ => t,
                })
            };
            let mut s = sys.clone();
            s.lhs = swap(&sys.lhs);
            s.rhs = swap(&sys.rhs);
            s.cvc.push(Cvc { var: q, sort: sort.dual(), of: p.clone() });
            Ok(s)
        }
        RuleId::R7a | RuleId::R7b => {
            if sys.sort != Sort::One {
                return Err(not_applicable(rule, "main inequality is not of sort 1"));
            }
            let (lhs, rhs) = match (&sys.rhs, rule) {
                (Modal::RImp(eta, zeta), RuleId::R7a) => (fuse((**eta).clone(), sys.lhs.clone()), (**zeta).clone()),
                (Modal::LImp(zeta, alpha), RuleId::R7b) => (fuse(sys.lhs.clone(), (**alpha).clone()), (**zeta).clone()),
                _ => return Err(not_applicable(rule, "right side is not the matching residual")),
            };
            let mut s = sys.clone();
            s.lhs = lhs;
            s.rhs = rhs;
            Ok(s)
        }
        r5 => {
            let Position::Term(side, path) = pos else {
                return Err(not_applicable(rule, "position must be a term path"));
            };
            let term = subterm(sys.side(*side), path).ok_or_else(|| not_applicable(rule, "no term at position"))?;
            let new = rewrite_r5(r5, term, sys, ctx).ok_or_else(|| not_applicable(rule, format!("no redex at `{term}`")))?;
            Ok(sys.with_side(*side, replace_at(sys.side(*side), path, new)))
        }
    }
}

/// True when some single-primed occurrence of `p` sits directly under another prime.
fn primes_above(sys: &InequalitySystem, p: &str) -> bool {
    let mut hit = false;
    for side in [&sys.lhs, &sys.rhs] {
        side.walk(&mut |m| {
            if let Modal::Prime(a) = m {
                if let Modal::Prime(b) = &**a {
                    if is_var(b) == Some(p) {
                        hit = true;
                    }
                }
            }
        });
    }
    hit
}

/// First R5 redex in preorder, left side first.
pub fn first_r5_redex(sys: &InequalitySystem, ctx: &RuleContext) -> Option<(RuleId, Position)> {
    for side in [Side::Lhs, Side::Rhs] {
        let mut ps = Vec::new();
        paths(sys.side(side), &mut Vec::new(), &mut ps);
        for path in ps {
            let t = subterm(sys.side(side), &path).unwrap();
            for r in RuleId::R5 {
                if ctx.allows(r) && rewrite_r5(r, t, sys, ctx).is_some() {
                    return Some((r, Position::Term(side, path)));
                }
            }
        }
    }
    None
}

fn lhs_ok(m: &Modal) -> bool {
    match m {
        Modal::Top(_) | Modal::Bot(_) | Modal::Var(..) | Modal::Unit => true,
        Modal::Meet(a, b) | Modal::Fuse(a, b) | Modal::TriR(a, b) | Modal::TriL(a, b) => lhs_ok(a) && lhs_ok(b),
        _ => false,
    }
}

/// Why the system is not in canonical Sahlqvist form, if it is not.
pub fn canonical_form_violation(sys: &InequalitySystem) -> Option<String> {
    if !lhs_ok(&sys.lhs) {
        return Some(format!("left side `{}` is not built from ⊤, ⊥, u, variables, ∩, ⊙, ▷, ◁", sys.lhs));
    }
    if let Some(o) = sys.rhs.occurrences(Polarity::Pos).iter().find(|o| o.polarity == Polarity::Neg) {
        return Some(format!("{} occurs negatively on the right", o.name));
    }
    for side in [&sys.lhs, &sys.rhs] {
        if let Some(o) = side.occurrences(Polarity::Pos).iter().find(|o| o.primes > 0 && sys.is_constrained(&o.name)) {
            return Some(format!("constrained variable {} occurs primed", o.name));
        }
    }
    None
}

pub fn is_canonical_form(sys: &InequalitySystem) -> bool {
    canonical_form_violation(sys).is_none()
}

/// Rule instances to try at a search node, in the fixed order R7, R4, R3/R2, R3+, R6, R1.
pub fn candidates(sys: &InequalitySystem, ctx: &RuleContext) -> Vec<(RuleId, Position)> {
    let mut out = vec![(RuleId::R7a, Position::Main), (RuleId::R7b, Position::Main)];
    let vars: Vec<String> = sys.main_vars().into_iter().collect();
    out.extend(vars.iter().map(|v| (RuleId::R4, Position::Var(v.clone()))));
    out.push((RuleId::R3, Position::Main));
    out.push((RuleId::R2, Position::Main));
    out.push((RuleId::R3x, Position::Main));
    out.extend(vars.iter().map(|v| (RuleId::R6, Position::Var(v.clone()))));
    out.retain(|(r, p)| apply_rule(sys, *r, p, ctx).is_ok());
    out
}
