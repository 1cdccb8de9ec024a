//! Object formulas into the sorted modal language.
//!
//! `φ•` is a sort-1 term (extent), `φ°` a sort-∂ term (co-extent).

use std::fmt;
use std::str::FromStr;

use super::formula::{Formula, Sequent};
use super::modal::{dprime, fuse, join, limp, meet, prime, rimp, tri_l, tri_r, v1, Modal};
use crate::frame::Sort;

/// How implications are rendered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ImpMode {
    /// (φ→ψ)• = (φ• ▷ ψ°)′ and (ψ←φ)• = (ψ° ◁ φ•)′
    Table6,
    /// (φ→ψ)• = φ• ⊸ ψ• and (ψ←φ)• = ψ• ⟜ φ•
    Rspoon,
}

impl FromStr for ImpMode {
    type Err = String;
    fn from_str(s: &str) -> Result<ImpMode, String> {
        match s {
            "table6" | "triangle" => Ok(ImpMode::Table6),
            "rspoon" | "residual" => Ok(ImpMode::Rspoon),
            _ => Err(format!("unknown implication mode `{s}` (table6 | rspoon)")),
        }
    }
}

impl fmt::Display for ImpMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ImpMode::Table6 => "table6",
            ImpMode::Rspoon => "rspoon",
        })
    }
}

/// Modal variable standing for the object variable `p`: first letter uppercased.
pub fn modal_name(p: &str) -> String {
    let mut c = p.chars();
    match c.next() {
        Some(h) => h.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// (φ•, φ°)
pub fn translate(phi: &Formula, mode: ImpMode) -> (Modal, Modal) {
    let b = bullet(phi, mode);
    let c = circ(phi, mode);
    (b, c)
}

pub fn bullet(phi: &Formula, mode: ImpMode) -> Modal {
    match phi {
        Formula::Var(p) => dprime(v1(&modal_name(p))),
        Formula::Top => Modal::Top(Sort::One),
        Formula::Bot => dprime(Modal::Bot(Sort::One)),
        Formula::Unit => Modal::Unit,
        Formula::And(a, b) => meet(bullet(a, mode), bullet(b, mode)),
        Formula::Or(a, b) => dprime(join(bullet(a, mode), bullet(b, mode))),
        Formula::Fuse(a, b) => dprime(fuse(bullet(a, mode), bullet(b, mode))),
        Formula::Imp(a, b) => match mode {
            ImpMode::Table6 => prime(tri_r(bullet(a, mode), circ(b, mode))),
            ImpMode::Rspoon => rimp(bullet(a, mode), bullet(b, mode)),
        },
        Formula::LImp(b, a) => match mode {
            ImpMode::Table6 => prime(tri_l(circ(b, mode), bullet(a, mode))),
            ImpMode::Rspoon => limp(bullet(b, mode), bullet(a, mode)),
        },
    }
}

pub fn circ(phi: &Formula, mode: ImpMode) -> Modal {
    match phi {
        Formula::Var(p) => prime(v1(&modal_name(p))),
        Formula::Top => dprime(Modal::Bot(Sort::D)),
        Formula::Bot => Modal::Top(Sort::D),
        Formula::Unit => prime(Modal::Unit),
        Formula::And(a, b) => dprime(join(circ(a, mode), circ(b, mode))),
        Formula::Or(a, b) => meet(circ(a, mode), circ(b, mode)),
        Formula::Fuse(a, b) => prime(fuse(bullet(a, mode), bullet(b, mode))),
        Formula::Imp(a, b) => match mode {
            ImpMode::Table6 => dprime(tri_r(bullet(a, mode), circ(b, mode))),
            ImpMode::Rspoon => prime(rimp(bullet(a, mode), bullet(b, mode))),
        },
        Formula::LImp(b, a) => match mode {
            ImpMode::Table6 => dprime(tri_l(circ(b, mode), bullet(a, mode))),
            ImpMode::Rspoon => prime(limp(bullet(b, mode), bullet(a, mode))),
        },
    }
}

/// φ ⊢ ψ as the sort-1 inequality φ• ≤ ψ•.
pub fn sequent_translation(s: &Sequent, mode: ImpMode) -> (Modal, Modal) {
    (bullet(&s.lhs, mode), bullet(&s.rhs, mode))
}

/// φ ⊢ ψ as the sort-∂ inequality ψ° ≤ φ°.
pub fn sequent_cotranslation(s: &Sequent, mode: ImpMode) -> (Modal, Modal) {
    (circ(&s.rhs, mode), circ(&s.lhs, mode))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::formula::parse_formula;

    #[test]
    fn table6_shapes() {
        let f = parse_formula("p -> q").unwrap();
        let (b, c) = translate(&f, ImpMode::Table6);
        assert_eq!(b.to_string(), "(P′′ ▷ Q′)′");
        assert_eq!(c.to_string(), "(P′′ ▷ Q′)′′");
        assert_eq!(b.sort(), Ok(Sort::One));
        assert_eq!(c.sort(), Ok(Sort::D));
    }

    #[test]
    fn rspoon_shapes() {
        let f = parse_formula("q <- p").unwrap();
        let (b, c) = translate(&f, ImpMode::Rspoon);
        assert_eq!(b, limp(dprime(v1("Q")), dprime(v1("P"))));
        assert_eq!(c, prime(b));
    }

    #[test]
    fn every_translation_is_well_sorted() {
        for s in ["p & (q | r)", "t * p -> p", "(p <- t) | bot", "top -> p * q"] {
            let f = parse_formula(s).unwrap();
            for mode in [ImpMode::Table6, ImpMode::Rspoon] {
                let (b, c) = translate(&f, mode);
                assert_eq!(b.sort(), Ok(Sort::One), "{s}");
                assert_eq!(c.sort(), Ok(Sort::D), "{s}");
            }
        }
    }
}
