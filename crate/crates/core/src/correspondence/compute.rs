//! Guarded second-order translation and elimination of predicate variables.

use std::collections::BTreeMap;

use super::system::{canonical_form_violation, InequalitySystem, StepMode};
use super::{reduce_sequent, CorrError, Reduction, RuleContext};
use crate::frame::{ClassId, RelName, Sort};
use crate::syntax::fo::{canonical, forall, implies, inc, not, parse_fo, simplify, standard_translation, Assumptions, Fresh};
use crate::syntax::modal::{dprime, Modal};
use crate::syntax::{Fo, ImpMode, Sequent};

fn point_var(s: Sort) -> &'static str {
    match s {
        Sort::One => "x",
        Sort::D => "y",
    }
}

fn and_all(mut v: Vec<Fo>) -> Fo {
    match v.len() {
        0 => Fo::True,
        1 => v.pop().unwrap(),
        _ => Fo::And(v),
    }
}

/// Implication mode used when none is given: ⊸/⟜ for residuated classes.
pub fn default_imp_mode(class: ClassId) -> ImpMode {
    if class.is_lambek() {
        ImpMode::Rspoon
    } else {
        ImpMode::Table6
    }
}

/// ∀P̄ ∀x [t-INV ∧ ST_x(lhs) → ST_x(rhs)]
pub fn guarded_translation(sys: &InequalitySystem) -> Fo {
    let mut fresh = Fresh::new();
    let x = point_var(sys.sort);
    let mut ante = Vec::new();
    let mut guarded: Vec<(String, Sort)> = sys.stb.clone();
    guarded.extend(sys.cvc.iter().map(|c| (c.var.clone(), c.sort)));
    for (p, s) in &guarded {
        let v = fresh.var(*s);
        let st = standard_translation(&dprime(Modal::Var(*s, p.clone())), &v, &mut fresh);
        ante.push(forall(*s, &v, implies(st, Fo::Pred(p.clone(), *s, v.clone()))));
    }
    ante.push(standard_translation(&sys.lhs, x, &mut fresh));
    let body = forall(sys.sort, x, implies(and_all(ante), standard_translation(&sys.rhs, x, &mut fresh)));
    let mut preds = sys.var_sorts();
    for (p, s) in guarded {
        if !preds.iter().any(|(q, _)| *q == p) {
            preds.push((p, s));
        }
    }
    preds.sort();
    preds.into_iter().rev().fold(body, |b, (p, s)| Fo::SoForall(s, p, Box::new(b)))
}

/// ST of a canonical left side, pulled out into witnesses and atoms. `None` when it contains ⊥.
fn flatten_lhs(m: &Modal, at: &str, fresh: &mut Fresh, wit: &mut Vec<(Sort, String)>, atoms: &mut Vec<Fo>) -> Option<()> {
    let new = |s: Sort, fresh: &mut Fresh, wit: &mut Vec<(Sort, String)>| {
        let z = fresh.var(s);
        wit.push((s, z.clone()));
        z
    };
    match m {
        Modal::Top(_) => {}
        Modal::Bot(_) => return None,
        Modal::Var(s, p) => atoms.push(Fo::Pred(p.clone(), *s, at.to_string())),
        Modal::Unit => atoms.push(Fo::Unit(at.to_string())),
        Modal::Meet(a, b) => {
            flatten_lhs(a, at, fresh, wit, atoms)?;
            flatten_lhs(b, at, fresh, wit, atoms)?;
        }
        Modal::Fuse(a, b) | Modal::TriR(a, b) | Modal::TriL(a, b) => {
            let name = match m {
                Modal::Fuse(..) => RelName::R,
                Modal::TriR(..) => RelName::T,
                _ => RelName::S,
            };
            let (_, sa, sb) = name.signature();
            let za = new(sa, fresh, wit);
            let zb = new(sb, fresh, wit);
            atoms.push(Fo::Rel(name, [at.to_string(), za.clone(), zb.clone()]));
            flatten_lhs(a, &za, fresh, wit, atoms)?;
            flatten_lhs(b, &zb, fresh, wit, atoms)?;
        }
        _ => unreachable!("checked canonical left side"),
    }
    Some(())
}

/// Replaces (η)″ by η for ⊙, ▷, ◁ terms on the right.
fn strengthen(m: &Modal) -> Modal {
    m.map_bottom_up(&mut |t| match &t {
        Modal::Prime(a) => match &**a {
            Modal::Prime(b) if matches!(&**b, Modal::Fuse(..) | Modal::TriR(..) | Modal::TriL(..)) => (**b).clone(),
            _ => t,
        },
        _ => t,
    })
}

/// Smallest admissible value of a predicate containing the witnesses `zs`.
fn minimal(sort: Sort, stable: bool, zs: &[String], s: &str, fresh: &mut Fresh) -> Fo {
    if !stable {
        return match zs.len() {
            0 => Fo::False,
            1 => Fo::Eq(sort, zs[0].clone(), s.to_string()),
            _ => Fo::Or(zs.iter().map(|z| Fo::Eq(sort, z.clone(), s.to_string())).collect()),
        };
    }
    if zs.len() == 1 {
        return Fo::Leq(sort, zs[0].clone(), s.to_string());
    }
    let w = fresh.var(sort.dual());
    let i = |a: &str, b: &str| match sort {
        Sort::One => inc(a, b),
        Sort::D => inc(b, a),
    };
    let hit = match zs.len() {
        0 => Fo::False,
        _ => Fo::Or(zs.iter().map(|z| i(z, &w)).collect()),
    };
    match zs.len() {
        0 => forall(sort.dual(), &w, not(i(s, &w))),
        _ => forall(sort.dual(), &w, implies(i(s, &w), hit)),
    }
}

/// First-order local correspondent of a system in canonical form.
pub fn compute_correspondent(sys: &InequalitySystem, class: ClassId) -> Result<(Fo, Vec<String>), CorrError> {
    if let Some(why) = canonical_form_violation(sys) {
        return Err(CorrError::NotInCanonicalForm(why));
    }
    let mut notes = Vec::new();
    let rhs = if class.is_strengthened() { strengthen(&sys.rhs) } else { sys.rhs.clone() };
    if rhs != sys.rhs {
        notes.push(format!("strengthened right side: {rhs}"));
    }
    let x = point_var(sys.sort);
    let mut fresh = Fresh::new();
    let mut wit = Vec::new();
    let mut atoms = Vec::new();
    let raw = match flatten_lhs(&sys.lhs, x, &mut fresh, &mut wit, &mut atoms) {
        None => Fo::True,
        Some(()) => {
            let mut at: BTreeMap<String, Vec<String>> = BTreeMap::new();
            let mut rest = Vec::new();
            for a in atoms {
                match a {
                    Fo::Pred(p, _, v) => at.entry(p).or_default().push(v),
                    other => rest.push(other),
                }
            }
            let mut cons = standard_translation(&rhs, x, &mut fresh);
            for (p, s) in sys.var_sorts() {
                let zs = at.get(&p).cloned().unwrap_or_default();
                let stable = sys.is_constrained(&p);
                if stable && s == Sort::D {
                    notes.push(format!("{p}: ∂-sorted minimal instantiation"));
                }
                cons = cons.instantiate(&p, &mut |v| minimal(s, stable, &zs, v, &mut fresh));
            }
            let body = implies(and_all(rest), cons);
            let body = wit.iter().rev().fold(body, |b, (s, z)| forall(*s, z, b));
            forall(sys.sort, x, body)
        }
    };
    let asm = Assumptions { f1: class.f1_relations().to_vec(), monotone: class.monotone_relations().to_vec() };
    Ok((canonical(&simplify(&raw, &asm)), notes))
}

/// A correspondent together with the reduction that produced it.
#[derive(Clone, Debug)]
pub struct Correspondent {
    pub reduction: Reduction,
    pub formula: Fo,
    pub notes: Vec<String>,
}

/// Reduce `seq` and compute its correspondent over `class`.
pub fn correspond(
    seq: &Sequent,
    class: ClassId,
    mode: StepMode,
    imp: Option<ImpMode>,
    max_depth: usize,
) -> Result<Correspondent, CorrError> {
    let ctx = RuleContext::for_class(class);
    let imp = imp.unwrap_or_else(|| default_imp_mode(class));
    let reduction = reduce_sequent(seq, mode, imp, &ctx, max_depth)?;
    let (formula, notes) = compute_correspondent(&reduction.system, class)?;
    Ok(Correspondent { reduction, formula, notes })
}

/// Correspondents of rules rather than sequents, stated directly.
#[derive(Clone, Debug)]
pub struct FixedRow {
    pub name: &'static str,
    pub rule: &'static str,
    pub formula: Fo,
    /// frame axiom it restates
    pub axiom: &'static str,
}

pub fn fixed_rows() -> Vec<FixedRow> {
    let row = |name, rule, text: &str, axiom| FixedRow { name, rule, formula: parse_fo(text).expect("fixed row parses"), axiom };
    vec![
        row(
            "residuation",
            "a∘b ⊢ c iff b ⊢ a→c iff a ⊢ c←b",
            "∀¹x ∀¹z ∀∂y ((S′(x,y,z) ↔ R′(y,x,z)) ∧ (R′(y,x,z) ↔ T′(z,x,y)))",
            "RES",
        ),
        row("unit", "a ⊢ b iff t ⊢ a→b", "∀¹x ∀∂y (¬x I y ↔ ∀¹u (U(u) → T′(u,x,y)))", "U"),
    ]
}
