//! Two-sorted first-order formulas over sorted frames.
//!
//! Printed syntax, which [`parse_fo`] reads back:
//!
//! ```text
//! ∀¹x1 ∀∂y1 (x1 I y1 → ∃¹x2 (R(x2,x1,x1) ∧ x1 ≤ x2))
//! ```
//!
//! `R(o,a,b)` is the tuple with output `o`; `R′(o,a,b)` the Galois dual relation.
//! ASCII input also works: `forall1 x`, `existsD y`, `&`, `|`, `->`, `<->`, `~`, `<=`, `!=`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::formula::ParseError;
use super::modal::Modal;
use crate::frame::{RelName, Sort};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fo {
    True,
    False,
    Eq(Sort, String, String),
    /// specialization order
    Leq(Sort, String, String),
    /// x I y, sort 1 then sort ∂
    Inc(String, String),
    Unit(String),
    Rel(RelName, [String; 3]),
    DualRel(RelName, [String; 3]),
    Pred(String, Sort, String),
    Not(Box<Fo>),
    And(Vec<Fo>),
    Or(Vec<Fo>),
    Implies(Box<Fo>, Box<Fo>),
    Iff(Box<Fo>, Box<Fo>),
    Forall(Sort, String, Box<Fo>),
    Exists(Sort, String, Box<Fo>),
    /// quantifier over all subsets of a sort
    SoForall(Sort, String, Box<Fo>),
}

pub fn not(a: Fo) -> Fo {
    Fo::Not(Box::new(a))
}

pub fn implies(a: Fo, b: Fo) -> Fo {
    Fo::Implies(Box::new(a), Box::new(b))
}

pub fn iff(a: Fo, b: Fo) -> Fo {
    Fo::Iff(Box::new(a), Box::new(b))
}

pub fn forall(s: Sort, x: &str, b: Fo) -> Fo {
    Fo::Forall(s, x.to_string(), Box::new(b))
}

pub fn exists(s: Sort, x: &str, b: Fo) -> Fo {
    Fo::Exists(s, x.to_string(), Box::new(b))
}

pub fn rel(n: RelName, o: &str, a: &str, b: &str) -> Fo {
    Fo::Rel(n, [o.to_string(), a.to_string(), b.to_string()])
}

pub fn leq(s: Sort, a: &str, b: &str) -> Fo {
    Fo::Leq(s, a.to_string(), b.to_string())
}

pub fn inc(x: &str, y: &str) -> Fo {
    Fo::Inc(x.to_string(), y.to_string())
}

impl Fo {
    fn children(&self) -> Vec<&Fo> {
        match self {
            Fo::Not(a) | Fo::Forall(_, _, a) | Fo::Exists(_, _, a) | Fo::SoForall(_, _, a) => vec![a],
            Fo::And(cs) | Fo::Or(cs) => cs.iter().collect(),
            Fo::Implies(a, b) | Fo::Iff(a, b) => vec![a, b],
            _ => vec![],
        }
    }

    /// Variables of an atom, in argument order.
    fn atom_vars(&self) -> Vec<&String> {
        match self {
            Fo::Eq(_, a, b) | Fo::Leq(_, a, b) | Fo::Inc(a, b) => vec![a, b],
            Fo::Unit(a) | Fo::Pred(_, _, a) => vec![a],
            Fo::Rel(_, xs) | Fo::DualRel(_, xs) => xs.iter().collect(),
            _ => vec![],
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.free_into(&mut Vec::new(), &mut out);
        out
    }

    fn free_into(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Fo::Forall(_, x, b) | Fo::Exists(_, x, b) => {
                bound.push(x.clone());
                b.free_into(bound, out);
                bound.pop();
            }
            _ => {
                for v in self.atom_vars() {
                    if !bound.contains(v) {
                        out.insert(v.clone());
                    }
                }
                for c in self.children() {
                    c.free_into(bound, out);
                }
            }
        }
    }

    pub fn mentions(&self, x: &str) -> bool {
        self.free_vars().contains(x)
    }

    /// Predicate names with their sorts.
    pub fn predicates(&self) -> BTreeSet<(String, Sort)> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Fo::Pred(p, s, _) = f {
                out.insert((p.clone(), *s));
            }
        });
        out
    }

    pub fn relations(&self) -> BTreeSet<RelName> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Fo::Rel(n, _) | Fo::DualRel(n, _) = f {
                out.insert(*n);
            }
        });
        out
    }

    pub fn visit(&self, f: &mut impl FnMut(&Fo)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Renames a free variable; binders of the same name shadow.
    pub fn rename(&self, from: &str, to: &str) -> Fo {
        let r = |s: &String| if s == from { to.to_string() } else { s.clone() };
        match self {
            Fo::True | Fo::False => self.clone(),
            Fo::Eq(s, a, b) => Fo::Eq(*s, r(a), r(b)),
            Fo::Leq(s, a, b) => Fo::Leq(*s, r(a), r(b)),
            Fo::Inc(a, b) => Fo::Inc(r(a), r(b)),
            Fo::Unit(a) => Fo::Unit(r(a)),
            Fo::Rel(n, xs) => Fo::Rel(*n, [r(&xs[0]), r(&xs[1]), r(&xs[2])]),
            Fo::DualRel(n, xs) => Fo::DualRel(*n, [r(&xs[0]), r(&xs[1]), r(&xs[2])]),
            Fo::Pred(p, s, a) => Fo::Pred(p.clone(), *s, r(a)),
            Fo::Forall(_, x, _) | Fo::Exists(_, x, _) if x == from => self.clone(),
            _ => self.map_children(|c| c.rename(from, to)),
        }
    }

    fn map_children(&self, mut f: impl FnMut(&Fo) -> Fo) -> Fo {
        match self {
            Fo::Not(a) => Fo::Not(Box::new(f(a))),
            Fo::And(cs) => Fo::And(cs.iter().map(&mut f).collect()),
            Fo::Or(cs) => Fo::Or(cs.iter().map(&mut f).collect()),
            Fo::Implies(a, b) => Fo::Implies(Box::new(f(a)), Box::new(f(b))),
            Fo::Iff(a, b) => Fo::Iff(Box::new(f(a)), Box::new(f(b))),
            Fo::Forall(s, x, b) => Fo::Forall(*s, x.clone(), Box::new(f(b))),
            Fo::Exists(s, x, b) => Fo::Exists(*s, x.clone(), Box::new(f(b))),
            Fo::SoForall(s, p, b) => Fo::SoForall(*s, p.clone(), Box::new(f(b))),
            _ => self.clone(),
        }
    }

    /// Replaces each atom `P(v)` by `lam(v)`.
    pub fn instantiate(&self, p: &str, lam: &mut dyn FnMut(&str) -> Fo) -> Fo {
        match self {
            Fo::Pred(q, _, v) if q == p => lam(v),
            _ => self.map_children(|c| c.instantiate(p, lam)),
        }
    }

    /// Gives every bound variable a distinct name.
    pub fn uniquify(&self) -> Fo {
        let mut used: BTreeSet<String> = self.free_vars();
        let mut n = 0usize;
        uniq(self, &mut used, &mut n)
    }
}

fn uniq(f: &Fo, used: &mut BTreeSet<String>, n: &mut usize) -> Fo {
    match f {
        Fo::Forall(s, x, b) | Fo::Exists(s, x, b) => {
            let name = if used.contains(x) {
                loop {
                    *n += 1;
                    let cand = format!("{x}_{n}");
                    if !used.contains(&cand) {
                        break cand;
                    }
                }
            } else {
                x.clone()
            };
            used.insert(name.clone());
            let body = uniq(&b.rename(x, &name), used, n);
            match f {
                Fo::Forall(..) => Fo::Forall(*s, name, Box::new(body)),
                _ => Fo::Exists(*s, name, Box::new(body)),
            }
        }
        _ => f.map_children(|c| uniq(c, used, n)),
    }
}

/// Fresh variable supply for translations.
#[derive(Default, Debug)]
pub struct Fresh {
    n: usize,
}

impl Fresh {
    pub fn new() -> Fresh {
        Fresh::default()
    }

    pub fn var(&mut self, s: Sort) -> String {
        self.n += 1;
        match s {
            Sort::One => format!("w{}", self.n),
            Sort::D => format!("v{}", self.n),
        }
    }
}

/// Standard translation ST_var(m); `var` must have the sort of `m`.
pub fn standard_translation(m: &Modal, var: &str, fresh: &mut Fresh) -> Fo {
    let sort = m.sort().unwrap_or(Sort::One);
    match m {
        Modal::Var(s, p) => Fo::Pred(p.clone(), *s, var.to_string()),
        Modal::Top(s) => Fo::Eq(*s, var.to_string(), var.to_string()),
        Modal::Bot(s) => not(Fo::Eq(*s, var.to_string(), var.to_string())),
        Modal::Unit => Fo::Unit(var.to_string()),
        Modal::Meet(a, b) => Fo::And(vec![standard_translation(a, var, fresh), standard_translation(b, var, fresh)]),
        Modal::Join(a, b) => Fo::Or(vec![standard_translation(a, var, fresh), standard_translation(b, var, fresh)]),
        Modal::Prime(a) => {
            let w = fresh.var(sort.dual());
            let guard = match sort {
                Sort::One => inc(var, &w),
                Sort::D => inc(&w, var),
            };
            forall(sort.dual(), &w, implies(guard, not(standard_translation(a, &w, fresh))))
        }
        Modal::Fuse(a, b) => {
            let (z1, z2) = (fresh.var(Sort::One), fresh.var(Sort::One));
            let body = Fo::And(vec![
                rel(RelName::R, var, &z1, &z2),
                standard_translation(a, &z1, fresh),
                standard_translation(b, &z2, fresh),
            ]);
            exists(Sort::One, &z1, exists(Sort::One, &z2, body))
        }
        Modal::TriR(a, b) => {
            let (x, y) = (fresh.var(Sort::One), fresh.var(Sort::D));
            let body = Fo::And(vec![
                rel(RelName::T, var, &x, &y),
                standard_translation(a, &x, fresh),
                standard_translation(b, &y, fresh),
            ]);
            exists(Sort::One, &x, exists(Sort::D, &y, body))
        }
        Modal::TriL(b, a) => {
            let (y, x) = (fresh.var(Sort::D), fresh.var(Sort::One));
            let body = Fo::And(vec![
                rel(RelName::S, var, &y, &x),
                standard_translation(b, &y, fresh),
                standard_translation(a, &x, fresh),
            ]);
            exists(Sort::D, &y, exists(Sort::One, &x, body))
        }
        Modal::RImp(a, e) | Modal::LImp(e, a) => {
            let (u, z) = (fresh.var(Sort::One), fresh.var(Sort::One));
            let r = match m {
                Modal::RImp(..) => rel(RelName::R, &z, &u, var),
                _ => rel(RelName::R, &z, var, &u),
            };
            let ante = Fo::And(vec![standard_translation(a, &u, fresh), r]);
            forall(Sort::One, &u, forall(Sort::One, &z, implies(ante, standard_translation(e, &z, fresh))))
        }
    }
}

// ----- simplification -----

/// Frame assumptions the simplifier may use.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assumptions {
    /// relations whose sections are Galois stable
    pub f1: Vec<RelName>,
    /// relations whose sections shrink as arguments grow
    pub monotone: Vec<RelName>,
}

impl Assumptions {
    pub fn none() -> Assumptions {
        Assumptions::default()
    }

    pub fn all() -> Assumptions {
        Assumptions { f1: RelName::ALL.to_vec(), monotone: RelName::ALL.to_vec() }
    }
}

/// Simplifies to a fixpoint. Bound variables are made distinct first.
pub fn simplify(f: &Fo, asm: &Assumptions) -> Fo {
    let mut cur = f.uniquify();
    for _ in 0..256 {
        let next = simp(&cur, asm);
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

fn simp(f: &Fo, asm: &Assumptions) -> Fo {
    let f = f.map_children(|c| simp(c, asm));
    local(f, asm)
}

fn local(f: Fo, asm: &Assumptions) -> Fo {
    match f {
        Fo::Eq(_, ref a, ref b) | Fo::Leq(_, ref a, ref b) if a == b => Fo::True,
        Fo::Not(a) => match *a {
            Fo::True => Fo::False,
            Fo::False => Fo::True,
            Fo::Not(b) => *b,
            Fo::Or(cs) => Fo::And(cs.into_iter().map(not).collect()),
            Fo::And(mut cs) if cs.len() >= 2 => {
                let last = cs.pop().unwrap();
                implies(and_of(cs), not(last))
            }
            Fo::Implies(a, b) => Fo::And(vec![*a, not(*b)]),
            Fo::Forall(s, x, b) => Fo::Exists(s, x, Box::new(not(*b))),
            Fo::Exists(s, x, b) => Fo::Forall(s, x, Box::new(not(*b))),
            other => not(other),
        },
        Fo::And(cs) => {
            let mut flat = Vec::new();
            for c in cs {
                match c {
                    Fo::And(inner) => flat.extend(inner),
                    Fo::True => {}
                    c => flat.push(c),
                }
            }
            if flat.contains(&Fo::False) {
                return Fo::False;
            }
            dedupe(&mut flat);
            if let Some(i) = flat.iter().position(|c| matches!(c, Fo::Exists(..))) {
                if let Fo::Exists(s, x, b) = flat.remove(i) {
                    flat.insert(i, *b);
                    return Fo::Exists(s, x, Box::new(Fo::And(flat)));
                }
            }
            and_of(flat)
        }
        Fo::Or(cs) => {
            let mut flat = Vec::new();
            for c in cs {
                match c {
                    Fo::Or(inner) => flat.extend(inner),
                    Fo::False => {}
                    c => flat.push(c),
                }
            }
            if flat.contains(&Fo::True) {
                return Fo::True;
            }
            dedupe(&mut flat);
            match flat.len() {
                0 => Fo::False,
                1 => flat.pop().unwrap(),
                _ => Fo::Or(flat),
            }
        }
        Fo::Implies(a, b) => match (*a, *b) {
            (Fo::True, b) => b,
            (Fo::False, _) | (_, Fo::True) => Fo::True,
            (a, Fo::False) => not(a),
            (a, b) if a == b => Fo::True,
            (Fo::Exists(s, x, a), b) => Fo::Forall(s, x, Box::new(implies(*a, b))),
            (a, Fo::Forall(s, x, b)) => Fo::Forall(s, x, Box::new(implies(a, *b))),
            (a, Fo::Implies(b1, b2)) => implies(Fo::And(vec![a, *b1]), *b2),
            (a, b) => implies(a, b),
        },
        Fo::Iff(a, b) => match (*a, *b) {
            (a, b) if a == b => Fo::True,
            (a, b) => iff(a, b),
        },
        Fo::Forall(s, x, b) => {
            if !b.mentions(&x) {
                return *b;
            }
            if let Some(g) = eliminate_forall_eq(&x, &b) {
                return g;
            }
            if let Some(g) = collapse_section(s, &x, &b, asm) {
                return g;
            }
            Fo::Forall(s, x, b)
        }
        Fo::Exists(s, x, b) => {
            if !b.mentions(&x) {
                return *b;
            }
            if let Some(g) = eliminate_exists_eq(&x, &b) {
                return g;
            }
            if let Some(g) = absorb_monotone(&x, &b, asm) {
                return g;
            }
            // look through an inner ∃ block
            let mut chain = Vec::new();
            let mut core = &*b;
            while let Fo::Exists(s2, x2, b2) = core {
                chain.push((*s2, x2.clone()));
                core = b2;
            }
            if !chain.is_empty() {
                let g = eliminate_exists_eq(&x, core).or_else(|| absorb_monotone(&x, core, asm));
                if let Some(g) = g {
                    return chain.into_iter().rev().fold(g, |acc, (s2, x2)| exists(s2, &x2, acc));
                }
            }
            Fo::Exists(s, x, b)
        }
        other => other,
    }
}

fn and_of(mut cs: Vec<Fo>) -> Fo {
    match cs.len() {
        0 => Fo::True,
        1 => cs.pop().unwrap(),
        _ => Fo::And(cs),
    }
}

fn dedupe(cs: &mut Vec<Fo>) {
    let mut seen = Vec::new();
    cs.retain(|c| {
        if seen.contains(c) {
            false
        } else {
            seen.push(c.clone());
            true
        }
    });
}

fn conjuncts(f: &Fo) -> Vec<Fo> {
    match f {
        Fo::And(cs) => cs.clone(),
        other => vec![other.clone()],
    }
}

/// `x = t` or `t = x` with `t` distinct from `x`.
fn eq_partner(c: &Fo, x: &str) -> Option<String> {
    match c {
        Fo::Eq(_, a, b) if a == x && b != x => Some(b.clone()),
        Fo::Eq(_, a, b) if b == x && a != x => Some(a.clone()),
        _ => None,
    }
}

fn eliminate_exists_eq(x: &str, body: &Fo) -> Option<Fo> {
    let cs = conjuncts(body);
    let i = cs.iter().position(|c| eq_partner(c, x).is_some())?;
    let t = eq_partner(&cs[i], x)?;
    let rest: Vec<Fo> = cs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, c)| c.rename(x, &t)).collect();
    Some(and_of(rest))
}

fn eliminate_forall_eq(x: &str, body: &Fo) -> Option<Fo> {
    let Fo::Implies(a, b) = body else { return None };
    let cs = conjuncts(a);
    let i = cs.iter().position(|c| eq_partner(c, x).is_some())?;
    let t = eq_partner(&cs[i], x)?;
    let rest: Vec<Fo> = cs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, c)| c.rename(x, &t)).collect();
    Some(implies(and_of(rest), b.rename(x, &t)))
}

/// ∃w(a ≤ w ∧ φ) ⟶ φ[a/w] when w occurs in φ only in argument places of monotone relations.
fn absorb_monotone(w: &str, body: &Fo, asm: &Assumptions) -> Option<Fo> {
    let cs = conjuncts(body);
    let mut lower = None;
    for (i, c) in cs.iter().enumerate() {
        if !c.mentions(w) {
            continue;
        }
        match c {
            Fo::Leq(_, a, b) if b == w && a != w && lower.is_none() => lower = Some((i, a.clone())),
            Fo::Rel(n, xs) if asm.monotone.contains(n) && xs[0] != w => {}
            _ => return None,
        }
    }
    let (i, a) = lower?;
    let rest: Vec<Fo> = cs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, c)| c.rename(w, &a)).collect();
    Some(and_of(rest))
}

/// ∀y(aIy → ∃w(wIy ∧ φ(w))) ⟶ φ(a) when {w : φ(w)} is Galois stable; dually on sort ∂.
fn collapse_section(s: Sort, y: &str, body: &Fo, asm: &Assumptions) -> Option<Fo> {
    let Fo::Implies(guard, rhs) = body else { return None };
    let a = match (s, &**guard) {
        (Sort::D, Fo::Inc(a, b)) if b == y && a != y => a.clone(),
        (Sort::One, Fo::Inc(b, a)) if b == y && a != y => a.clone(),
        _ => return None,
    };
    let Fo::Exists(ws, w, inner) = &**rhs else { return None };
    if *ws != s.dual() {
        return None;
    }
    let cs = conjuncts(inner);
    let link = match s {
        Sort::D => Fo::Inc(w.clone(), y.to_string()),
        Sort::One => Fo::Inc(y.to_string(), w.clone()),
    };
    let i = cs.iter().position(|c| *c == link)?;
    let rest: Vec<&Fo> = cs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, c)| c).collect();
    if rest.is_empty() {
        return None;
    }
    for c in &rest {
        if c.mentions(y) || !c.mentions(w) {
            return None;
        }
        let ok = match c {
            Fo::Leq(_, lo, hi) => hi == w && lo != w,
            Fo::Rel(n, xs) => {
                asm.f1.contains(n) && xs[0] == *w && xs[1] != *w && xs[2] != *w && n.signature().0 == *ws
            }
            _ => false,
        };
        if !ok {
            return None;
        }
    }
    Some(and_of(rest.into_iter().map(|c| c.rename(w, &a)).collect()))
}

// ----- printing -----

fn natural_cmp(a: &str, b: &str) -> std::cmp::Ordering {
    let split = |s: &str| {
        let i = s.find(|c: char| c.is_ascii_digit()).unwrap_or(s.len());
        let (p, d) = s.split_at(i);
        (p.to_string(), d.parse::<u64>().ok(), d.to_string())
    };
    split(a).cmp(&split(b))
}

fn is_binary(f: &Fo) -> bool {
    matches!(f, Fo::And(_) | Fo::Or(_) | Fo::Implies(..) | Fo::Iff(..))
}

fn quant_sym(f: &Fo) -> Option<(&'static str, Sort, &String, &Fo)> {
    match f {
        Fo::Forall(s, x, b) => Some(("∀", *s, x, b)),
        Fo::Exists(s, x, b) => Some(("∃", *s, x, b)),
        _ => None,
    }
}

fn sort_mark(s: Sort) -> &'static str {
    match s {
        Sort::One => "¹",
        Sort::D => "∂",
    }
}

/// Prints with bound and free names passed through `name`.
fn render(f: &Fo, name: &dyn Fn(&str) -> String) -> String {
    let atomize = |g: &Fo| {
        let s = render(g, name);
        if is_binary(g) {
            format!("({s})")
        } else {
            s
        }
    };
    let args = |xs: &[String; 3]| xs.iter().map(|x| name(x)).collect::<Vec<_>>().join(",");
    match f {
        Fo::True => "⊤".into(),
        Fo::False => "⊥".into(),
        Fo::Eq(_, a, b) => format!("{} = {}", name(a), name(b)),
        Fo::Leq(_, a, b) => format!("{} ≤ {}", name(a), name(b)),
        Fo::Inc(a, b) => format!("{} I {}", name(a), name(b)),
        Fo::Unit(a) => format!("U({})", name(a)),
        Fo::Rel(n, xs) => format!("{n}({})", args(xs)),
        Fo::DualRel(n, xs) => format!("{n}′({})", args(xs)),
        Fo::Pred(p, _, a) => format!("{p}({})", name(a)),
        Fo::Not(a) => match &**a {
            Fo::Eq(_, x, y) => format!("{} ≠ {}", name(x), name(y)),
            other => format!("¬{}", atomize(other)),
        },
        Fo::And(cs) | Fo::Or(cs) => {
            let mut parts: Vec<String> = cs.iter().map(atomize).collect();
            parts.sort();
            parts.join(if matches!(f, Fo::And(_)) { " ∧ " } else { " ∨ " })
        }
        Fo::Implies(a, b) => format!("{} → {}", atomize(a), atomize(b)),
        Fo::Iff(a, b) => format!("{} ↔ {}", atomize(a), atomize(b)),
        Fo::SoForall(s, p, b) => format!("∀{p}⊆W{s} ({})", render(b, name)),
        Fo::Forall(..) | Fo::Exists(..) => {
            let (sym, _, _, _) = quant_sym(f).unwrap();
            let mut vars = Vec::new();
            let mut cur = f;
            while let Some((q, s, x, b)) = quant_sym(cur) {
                if q != sym {
                    break;
                }
                vars.push((name(x), s));
                cur = b;
            }
            vars.sort_by(|a, b| natural_cmp(&a.0, &b.0).then(a.1.cmp(&b.1)));
            let prefix: Vec<String> = vars.iter().map(|(x, s)| format!("{sym}{}{x}", sort_mark(*s))).collect();
            let body = render(cur, name);
            if is_binary(cur) {
                format!("{} ({body})", prefix.join(" "))
            } else {
                format!("{} {body}", prefix.join(" "))
            }
        }
    }
}

impl fmt::Display for Fo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self, &|s| s.to_string()))
    }
}

// ----- canonical naming -----

/// Renames bound variables to x1, x2, ... (sort 1) and y1, y2, ... (sort ∂).
///
/// Quantifier blocks are processed outermost first; within a block every
/// permutation (up to 8 variables) is tried and the least printed string wins.
pub fn canonical(f: &Fo) -> Fo {
    let f = f.uniquify();
    let mut map: HashMap<String, String> = HashMap::new();
    let mut sorts: HashMap<String, Sort> = HashMap::new();
    f.visit(&mut |g| {
        if let Fo::Forall(s, x, _) | Fo::Exists(s, x, _) = g {
            sorts.insert(x.clone(), *s);
        }
    });
    let placeholder = |x: &str, sorts: &HashMap<String, Sort>| match sorts[x] {
        Sort::One => "x?".to_string(),
        Sort::D => "y?".to_string(),
    };
    let (mut n1, mut nd) = (0usize, 0usize);
    loop {
        let namer = |x: &str| -> String {
            match map.get(x) {
                Some(n) => n.clone(),
                None if sorts.contains_key(x) => placeholder(x, &sorts),
                None => x.to_string(),
            }
        };
        let Some(block) = first_open_block(&f, &map, &namer) else { break };
        let assign = |perm: &[String], n1: usize, nd: usize| {
            let (mut a, mut b) = (n1, nd);
            perm.iter()
                .map(|x| {
                    let nm = match sorts[x] {
                        Sort::One => {
                            a += 1;
                            format!("x{a}")
                        }
                        Sort::D => {
                            b += 1;
                            format!("y{b}")
                        }
                    };
                    (x.clone(), nm)
                })
                .collect::<Vec<_>>()
        };
        let mut best: Option<(String, Vec<(String, String)>)> = None;
        let mut perm = block.clone();
        let consider = |perm: &[String], best: &mut Option<(String, Vec<(String, String)>)>| {
            let cand = assign(perm, n1, nd);
            let printed = render(&f, &|x: &str| {
                if let Some((_, n)) = cand.iter().find(|(o, _)| o == x) {
                    return n.clone();
                }
                namer(x)
            });
            if best.as_ref().map_or(true, |(b, _)| printed < *b) {
                *best = Some((printed, cand));
            }
        };
        if block.len() <= 8 {
            permute(&mut perm, 0, &mut |p| consider(p, &mut best));
        } else {
            consider(&perm, &mut best);
        }
        let (_, chosen) = best.unwrap();
        for (o, n) in chosen {
            match sorts[&o] {
                Sort::One => n1 += 1,
                Sort::D => nd += 1,
            }
            map.insert(o, n);
        }
    }
    apply_names(&f, &map)
}

fn permute(v: &mut Vec<String>, k: usize, f: &mut dyn FnMut(&[String])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

/// Unnamed variables of the first quantifier block met in print order.
fn first_open_block(f: &Fo, map: &HashMap<String, String>, namer: &dyn Fn(&str) -> String) -> Option<Vec<String>> {
    match f {
        Fo::Forall(..) | Fo::Exists(..) => {
            let (sym, _, _, _) = quant_sym(f).unwrap();
            let mut vars = Vec::new();
            let mut cur = f;
            while let Some((q, _, x, b)) = quant_sym(cur) {
                if q != sym {
                    break;
                }
                if !map.contains_key(x) {
                    vars.push(x.clone());
                }
                cur = b;
            }
            if !vars.is_empty() {
                return Some(vars);
            }
            first_open_block(cur, map, namer)
        }
        Fo::And(cs) | Fo::Or(cs) => {
            let mut kids: Vec<(String, &Fo)> = cs.iter().map(|c| (render(c, namer), c)).collect();
            kids.sort_by(|a, b| a.0.cmp(&b.0));
            kids.into_iter().find_map(|(_, c)| first_open_block(c, map, namer))
        }
        _ => f.children().into_iter().find_map(|c| first_open_block(c, map, namer)),
    }
}

fn apply_names(f: &Fo, map: &HashMap<String, String>) -> Fo {
    let n = |s: &String| map.get(s).cloned().unwrap_or_else(|| s.clone());
    match f {
        Fo::True | Fo::False => f.clone(),
        Fo::Eq(s, a, b) => Fo::Eq(*s, n(a), n(b)),
        Fo::Leq(s, a, b) => Fo::Leq(*s, n(a), n(b)),
        Fo::Inc(a, b) => Fo::Inc(n(a), n(b)),
        Fo::Unit(a) => Fo::Unit(n(a)),
        Fo::Rel(r, xs) => Fo::Rel(*r, [n(&xs[0]), n(&xs[1]), n(&xs[2])]),
        Fo::DualRel(r, xs) => Fo::DualRel(*r, [n(&xs[0]), n(&xs[1]), n(&xs[2])]),
        Fo::Pred(p, s, a) => Fo::Pred(p.clone(), *s, n(a)),
        Fo::Forall(s, x, b) => Fo::Forall(*s, n(x), Box::new(apply_names(b, map))),
        Fo::Exists(s, x, b) => Fo::Exists(*s, n(x), Box::new(apply_names(b, map))),
        _ => f.map_children(|c| apply_names(c, map)),
    }
}

/// Simplified, canonically named, printed.
pub fn normal_form(f: &Fo, asm: &Assumptions) -> String {
    canonical(&simplify(f, asm)).to_string()
}

// ----- parsing -----

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Quant(bool, Sort),
    LParen,
    RParen,
    Comma,
    Not,
    And,
    Or,
    Imp,
    Iff,
    Eq,
    Neq,
    Leq,
    Top,
    Bot,
    Prime,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let at = |i: usize| chars.get(i).map(|&(_, c)| c);
    while i < chars.len() {
        let (pos, c) = chars[i];
        let err = |msg: String| ParseError { pos, msg };
        let (tok, len) = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            ',' => (Tok::Comma, 1),
            '¬' | '~' => (Tok::Not, 1),
            '∧' | '&' => (Tok::And, 1),
            '∨' | '|' => (Tok::Or, 1),
            '→' => (Tok::Imp, 1),
            '↔' => (Tok::Iff, 1),
            '=' => (Tok::Eq, 1),
            '≠' => (Tok::Neq, 1),
            '≤' => (Tok::Leq, 1),
            '⊤' => (Tok::Top, 1),
            '⊥' => (Tok::Bot, 1),
            '′' | '\'' => (Tok::Prime, 1),
            '-' if at(i + 1) == Some('>') => (Tok::Imp, 2),
            '<' if at(i + 1) == Some('-') && at(i + 2) == Some('>') => (Tok::Iff, 3),
            '<' if at(i + 1) == Some('=') => (Tok::Leq, 2),
            '!' if at(i + 1) == Some('=') => (Tok::Neq, 2),
            '∀' | '∃' => {
                let s = match at(i + 1) {
                    Some('¹') | Some('1') => Sort::One,
                    Some('∂') | Some('d') | Some('D') => Sort::D,
                    _ => return Err(err("quantifier needs a sort mark (¹ or ∂)".into())),
                };
                (Tok::Quant(c == '∀', s), 2)
            }
            c if c.is_alphanumeric() || c == '_' => {
                let mut j = i;
                let mut name = String::new();
                while let Some(d) = at(j) {
                    if d.is_alphanumeric() || d == '_' {
                        name.push(d);
                        j += 1;
                    } else {
                        break;
                    }
                }
                let tok = match name.as_str() {
                    "forall1" => Tok::Quant(true, Sort::One),
                    "forallD" => Tok::Quant(true, Sort::D),
                    "exists1" => Tok::Quant(false, Sort::One),
                    "existsD" => Tok::Quant(false, Sort::D),
                    "true" => Tok::Top,
                    "false" => Tok::Bot,
                    _ => Tok::Ident(name),
                };
                (tok, j - i)
            }
            _ => return Err(err(format!("unexpected character `{c}`"))),
        };
        out.push((pos, tok));
        i += len;
    }
    Ok(out)
}

struct P {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    env: Vec<(String, Sort)>,
    preds: HashMap<String, Sort>,
}

impl P {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let pos = self.toks.get(self.at).map_or(self.end, |(p, _)| *p);
        Err(ParseError { pos, msg: msg.into() })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            self.err(format!("expected {t:?}"))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) => {
                self.at += 1;
                Ok(s)
            }
            _ => self.err("expected a name"),
        }
    }

    fn sort_of(&self, x: &str) -> Result<Sort, ParseError> {
        match self.env.iter().rev().find(|(n, _)| n == x) {
            Some((_, s)) => Ok(*s),
            None => self.err(format!("variable `{x}` is not bound")),
        }
    }

    fn iff(&mut self) -> Result<Fo, ParseError> {
        let a = self.imp()?;
        if self.eat(&Tok::Iff) {
            let b = self.imp()?;
            return Ok(iff(a, b));
        }
        Ok(a)
    }

    fn imp(&mut self) -> Result<Fo, ParseError> {
        let a = self.or()?;
        if self.eat(&Tok::Imp) {
            let b = self.imp()?;
            return Ok(implies(a, b));
        }
        Ok(a)
    }

    fn or(&mut self) -> Result<Fo, ParseError> {
        let mut cs = vec![self.and()?];
        while self.eat(&Tok::Or) {
            cs.push(self.and()?);
        }
        Ok(if cs.len() == 1 { cs.pop().unwrap() } else { Fo::Or(cs) })
    }

    fn and(&mut self) -> Result<Fo, ParseError> {
        let mut cs = vec![self.unary()?];
        while self.eat(&Tok::And) {
            cs.push(self.unary()?);
        }
        Ok(if cs.len() == 1 { cs.pop().unwrap() } else { Fo::And(cs) })
    }

    fn unary(&mut self) -> Result<Fo, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Not) => {
                self.at += 1;
                Ok(not(self.unary()?))
            }
            Some(Tok::Quant(all, s)) => {
                self.at += 1;
                let x = self.ident()?;
                self.env.push((x.clone(), s));
                let body = self.unary();
                self.env.pop();
                let body = Box::new(body?);
                Ok(if all { Fo::Forall(s, x, body) } else { Fo::Exists(s, x, body) })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Fo, ParseError> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.at += 1;
                let f = self.iff()?;
                self.expect(&Tok::RParen)?;
                Ok(f)
            }
            Some(Tok::Top) => {
                self.at += 1;
                Ok(Fo::True)
            }
            Some(Tok::Bot) => {
                self.at += 1;
                Ok(Fo::False)
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                let dual = self.eat(&Tok::Prime);
                if self.eat(&Tok::LParen) {
                    let mut args = vec![self.ident()?];
                    while self.eat(&Tok::Comma) {
                        args.push(self.ident()?);
                    }
                    self.expect(&Tok::RParen)?;
                    for a in &args {
                        self.sort_of(a)?;
                    }
                    return self.application(&name, dual, args);
                }
                if dual {
                    return self.err("unexpected prime");
                }
                let lhs = name;
                let s = self.sort_of(&lhs)?;
                let op = self.peek().cloned();
                self.at += 1;
                let rhs = self.ident()?;
                let s2 = self.sort_of(&rhs)?;
                match op {
                    Some(Tok::Eq) | Some(Tok::Neq) | Some(Tok::Leq) if s != s2 => {
                        self.err(format!("`{lhs}` and `{rhs}` have different sorts"))
                    }
                    Some(Tok::Eq) => Ok(Fo::Eq(s, lhs, rhs)),
                    Some(Tok::Neq) => Ok(not(Fo::Eq(s, lhs, rhs))),
                    Some(Tok::Leq) => Ok(Fo::Leq(s, lhs, rhs)),
                    Some(Tok::Ident(i)) if i == "I" => {
                        if s != Sort::One || s2 != Sort::D {
                            return self.err("incidence relates a sort-1 point to a sort-∂ point");
                        }
                        Ok(Fo::Inc(lhs, rhs))
                    }
                    _ => {
                        self.at -= 1;
                        self.err("expected =, ≠, ≤ or I")
                    }
                }
            }
            _ => self.err("expected a formula"),
        }
    }

    fn application(&mut self, name: &str, dual: bool, args: Vec<String>) -> Result<Fo, ParseError> {
        let rel = match name {
            "T" => Some(RelName::T),
            "R" => Some(RelName::R),
            "S" => Some(RelName::S),
            _ => None,
        };
        if let Some(r) = rel {
            if args.len() != 3 {
                return self.err(format!("{r} takes three arguments"));
            }
            let (o, a, b) = r.signature();
            // the Galois dual relation outputs in the dual sort
            let o = if dual { o.dual() } else { o };
            let got = (self.sort_of(&args[0])?, self.sort_of(&args[1])?, self.sort_of(&args[2])?);
            if got != (o, a, b) {
                return self.err(format!("{r} arguments have the wrong sorts"));
            }
            let xs = [args[0].clone(), args[1].clone(), args[2].clone()];
            return Ok(if dual { Fo::DualRel(r, xs) } else { Fo::Rel(r, xs) });
        }
        if dual || args.len() != 1 {
            return self.err(format!("`{name}` takes one argument"));
        }
        let s = self.sort_of(&args[0])?;
        if name == "U" {
            if s != Sort::One {
                return self.err("U applies to sort-1 points");
            }
            return Ok(Fo::Unit(args[0].clone()));
        }
        if let Some(prev) = self.preds.insert(name.to_string(), s) {
            if prev != s {
                return self.err(format!("predicate `{name}` used at two sorts"));
            }
        }
        Ok(Fo::Pred(name.to_string(), s, args[0].clone()))
    }
}

/// Parses a closed formula in the printed syntax.
pub fn parse_fo(text: &str) -> Result<Fo, ParseError> {
    let mut p = P { toks: lex(text)?, at: 0, end: text.len(), env: Vec::new(), preds: HashMap::new() };
    let f = p.iff()?;
    if p.at < p.toks.len() {
        return p.err("trailing input");
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::modal::{dprime, fuse, v1};

    #[test]
    fn print_parse_round_trip() {
        for s in [
            "∀¹x1 R(x1,x1,x1)",
            "∀¹x1 ∀¹x2 ∀¹x3 (R(x1,x2,x3) → x3 ≤ x1)",
            "∀¹x1 ∀∂y1 ∀∂y2 ((T(y1,x1,y2) ∧ U(x1)) → y2 ≤ y1)",
            "∀¹x1 ∃¹x2 (R(x1,x2,x1) ∧ U(x2))",
            "∀¹x1 ∀∂y1 (x1 I y1 → ¬R′(y1,x1,x1))",
        ] {
            let f = parse_fo(s).unwrap();
            assert_eq!(f.to_string(), s);
        }
    }

    #[test]
    fn parser_checks_sorts() {
        assert!(parse_fo("∀¹x R(x,x,x)").is_ok());
        assert!(parse_fo("∀¹x ∀¹z T(x,x,z)").is_err());
        assert!(parse_fo("∀¹x ∀¹z x I z").is_err());
        assert!(parse_fo("R(x,x,x)").is_err());
    }

    #[test]
    fn canonical_names_ignore_input_names() {
        let a = parse_fo("forall1 x forall1 u forall1 z (R(x,u,z) -> z <= x)").unwrap();
        let b = parse_fo("forall1 p forall1 q forall1 r (R(r,p,q) -> q <= r)").unwrap();
        assert_eq!(normal_form(&a, &Assumptions::none()), normal_form(&b, &Assumptions::none()));
    }

    #[test]
    fn double_prime_translation_pushes_negation() {
        let m = dprime(fuse(v1("P"), v1("Q")));
        let f = standard_translation(&m, "x", &mut Fresh::new());
        let f = forall(Sort::One, "x", f);
        let s = normal_form(&f, &Assumptions::none());
        assert!(s.starts_with("∀¹x1 ∀∂y1 (x1 I y1 → ∃"), "{s}");
        assert!(!s.contains('¬'), "{s}");
    }

    #[test]
    fn monotone_absorption_and_section_collapse() {
        let f = parse_fo("∀¹x ∀¹u ∀¹z (R(x,u,z) → ∀∂y (x I y → ∃¹w (w I y ∧ ∃¹a ∃¹b (R(w,a,b) ∧ z ≤ a ∧ u ≤ b)))) ").unwrap();
        let s = normal_form(&f, &Assumptions::all());
        assert_eq!(s, "∀¹x1 ∀¹x2 ∀¹x3 (R(x1,x2,x3) → R(x1,x3,x2))");
        let kept = normal_form(&f, &Assumptions::none());
        assert!(kept.contains("I"), "{kept}");
    }

    #[test]
    fn equality_elimination() {
        let f = parse_fo("∀¹x ∃¹z (z = x ∧ R(x,z,z))").unwrap();
        assert_eq!(normal_form(&f, &Assumptions::none()), "∀¹x1 R(x1,x1,x1)");
    }
}
