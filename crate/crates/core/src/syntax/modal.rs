//! Two-sorted modal language over sorted frames.
//!
//! Terms of sort 1 denote subsets of W1, terms of sort ∂ subsets of W∂.
//! `′` flips the sort. ⊙, ⊸, ⟜ and `u` live on sort 1; ▷ and ◁ produce sort ∂.

use std::collections::BTreeSet;
use std::fmt;

use crate::frame::Sort;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Modal {
    Var(Sort, String),
    Top(Sort),
    Bot(Sort),
    /// the unit set U
    Unit,
    Meet(Box<Modal>, Box<Modal>),
    Join(Box<Modal>, Box<Modal>),
    Prime(Box<Modal>),
    /// α ⊙ η
    Fuse(Box<Modal>, Box<Modal>),
    /// α ⊸ η
    RImp(Box<Modal>, Box<Modal>),
    /// η ⟜ α, stored as (η, α)
    LImp(Box<Modal>, Box<Modal>),
    /// α ▷ β: sort 1 then sort ∂, result ∂
    TriR(Box<Modal>, Box<Modal>),
    /// β ◁ α: sort ∂ then sort 1, result ∂
    TriL(Box<Modal>, Box<Modal>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortError(pub String);

impl fmt::Display for SortError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ill-sorted term: {}", self.0)
    }
}

impl std::error::Error for SortError {}

/// Occurrence polarity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarity {
    Pos,
    Neg,
}

impl Polarity {
    fn flip(self) -> Polarity {
        match self {
            Polarity::Pos => Polarity::Neg,
            Polarity::Neg => Polarity::Pos,
        }
    }
}

/// One occurrence of a variable: polarity and the number of primes applied directly to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Occurrence {
    pub name: String,
    pub sort: Sort,
    pub polarity: Polarity,
    pub primes: usize,
}

pub fn var(sort: Sort, name: &str) -> Modal {
    Modal::Var(sort, name.to_string())
}

pub fn v1(name: &str) -> Modal {
    var(Sort::One, name)
}

pub fn vd(name: &str) -> Modal {
    var(Sort::D, name)
}

pub fn prime(m: Modal) -> Modal {
    Modal::Prime(Box::new(m))
}

pub fn dprime(m: Modal) -> Modal {
    prime(prime(m))
}

pub fn meet(a: Modal, b: Modal) -> Modal {
    Modal::Meet(Box::new(a), Box::new(b))
}

pub fn join(a: Modal, b: Modal) -> Modal {
    Modal::Join(Box::new(a), Box::new(b))
}

pub fn fuse(a: Modal, b: Modal) -> Modal {
    Modal::Fuse(Box::new(a), Box::new(b))
}

pub fn rimp(a: Modal, b: Modal) -> Modal {
    Modal::RImp(Box::new(a), Box::new(b))
}

/// η ⟜ α
pub fn limp(eta: Modal, alpha: Modal) -> Modal {
    Modal::LImp(Box::new(eta), Box::new(alpha))
}

pub fn tri_r(a: Modal, b: Modal) -> Modal {
    Modal::TriR(Box::new(a), Box::new(b))
}

/// β ◁ α
pub fn tri_l(beta: Modal, alpha: Modal) -> Modal {
    Modal::TriL(Box::new(beta), Box::new(alpha))
}

impl Modal {
    /// Sort of the term, checking all argument sorts.
    pub fn sort(&self) -> Result<Sort, SortError> {
        let want = |m: &Modal, s: Sort| -> Result<(), SortError> {
            let got = m.sort()?;
            if got == s {
                Ok(())
            } else {
                Err(SortError(format!("`{m}` has sort {got}, expected {s}")))
            }
        };
        match self {
            Modal::Var(s, _) | Modal::Top(s) | Modal::Bot(s) => Ok(*s),
            Modal::Unit => Ok(Sort::One),
            Modal::Meet(a, b) | Modal::Join(a, b) => {
                let s = a.sort()?;
                want(b, s)?;
                Ok(s)
            }
            Modal::Prime(a) => Ok(a.sort()?.dual()),
            Modal::Fuse(a, b) | Modal::RImp(a, b) | Modal::LImp(a, b) => {
                want(a, Sort::One)?;
                want(b, Sort::One)?;
                Ok(Sort::One)
            }
            Modal::TriR(a, b) => {
                want(a, Sort::One)?;
                want(b, Sort::D)?;
                Ok(Sort::D)
            }
            Modal::TriL(b, a) => {
                want(b, Sort::D)?;
                want(a, Sort::One)?;
                Ok(Sort::D)
            }
        }
    }

    pub fn children(&self) -> Vec<&Modal> {
        match self {
            Modal::Var(..) | Modal::Top(_) | Modal::Bot(_) | Modal::Unit => vec![],
            Modal::Prime(a) => vec![a],
            Modal::Meet(a, b)
            | Modal::Join(a, b)
            | Modal::Fuse(a, b)
            | Modal::RImp(a, b)
            | Modal::LImp(a, b)
            | Modal::TriR(a, b)
            | Modal::TriL(a, b) => vec![a, b],
        }
    }

    pub fn var_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |m| {
            if let Modal::Var(_, n) = m {
                out.insert(n.clone());
            }
        });
        out
    }

    pub fn walk(&self, f: &mut impl FnMut(&Modal)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    pub fn contains_var(&self, name: &str) -> bool {
        self.var_names().contains(name)
    }

    pub fn mentions_unit(&self) -> bool {
        let mut hit = false;
        self.walk(&mut |m| hit |= matches!(m, Modal::Unit));
        hit
    }

    /// Rebuilds the term bottom-up through `f`.
    pub fn map_bottom_up(&self, f: &mut impl FnMut(Modal) -> Modal) -> Modal {
        let b = |m: &Modal, f: &mut dyn FnMut(Modal) -> Modal| Box::new(map_dyn(m, f));
        let rebuilt = match self {
            Modal::Var(..) | Modal::Top(_) | Modal::Bot(_) | Modal::Unit => self.clone(),
            Modal::Prime(a) => Modal::Prime(b(a, f)),
            Modal::Meet(x, y) => Modal::Meet(b(x, f), b(y, f)),
            Modal::Join(x, y) => Modal::Join(b(x, f), b(y, f)),
            Modal::Fuse(x, y) => Modal::Fuse(b(x, f), b(y, f)),
            Modal::RImp(x, y) => Modal::RImp(b(x, f), b(y, f)),
            Modal::LImp(x, y) => Modal::LImp(b(x, f), b(y, f)),
            Modal::TriR(x, y) => Modal::TriR(b(x, f), b(y, f)),
            Modal::TriL(x, y) => Modal::TriL(b(x, f), b(y, f)),
        };
        f(rebuilt)
    }

    /// Replaces every occurrence of the variable `name` by `with`.
    pub fn substitute(&self, name: &str, with: &Modal) -> Modal {
        self.map_bottom_up(&mut |m| match &m {
            Modal::Var(_, n) if n == name => with.clone(),
            _ => m,
        })
    }

    /// Variable occurrences with polarity. Primes and the antecedents of ⊸, ⟜ flip polarity.
    pub fn occurrences(&self, start: Polarity) -> Vec<Occurrence> {
        let mut out = Vec::new();
        occ(self, start, 0, &mut out);
        out
    }

    pub fn is_positive(&self) -> bool {
        self.occurrences(Polarity::Pos).iter().all(|o| o.polarity == Polarity::Pos)
    }

    /// Number of leading primes and the term beneath them.
    pub fn strip_primes(&self) -> (usize, &Modal) {
        let mut n = 0;
        let mut m = self;
        while let Modal::Prime(a) = m {
            n += 1;
            m = a;
        }
        (n, m)
    }

    fn is_atomic(&self) -> bool {
        matches!(self, Modal::Var(..) | Modal::Top(_) | Modal::Bot(_) | Modal::Unit | Modal::Prime(_))
    }
}

fn map_dyn(m: &Modal, f: &mut dyn FnMut(Modal) -> Modal) -> Modal {
    m.map_bottom_up(&mut |x| f(x))
}

fn occ(m: &Modal, pol: Polarity, primes: usize, out: &mut Vec<Occurrence>) {
    match m {
        Modal::Var(s, n) => out.push(Occurrence { name: n.clone(), sort: *s, polarity: pol, primes }),
        Modal::Top(_) | Modal::Bot(_) | Modal::Unit => {}
        Modal::Prime(a) => occ(a, pol.flip(), primes + 1, out),
        Modal::Meet(a, b) | Modal::Join(a, b) | Modal::Fuse(a, b) | Modal::TriR(a, b) | Modal::TriL(a, b) => {
            occ(a, pol, 0, out);
            occ(b, pol, 0, out);
        }
        Modal::RImp(a, b) => {
            occ(a, pol.flip(), 0, out);
            occ(b, pol, 0, out);
        }
        Modal::LImp(b, a) => {
            occ(b, pol, 0, out);
            occ(a, pol.flip(), 0, out);
        }
    }
}

impl fmt::Display for Modal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arg = |m: &Modal, f: &mut fmt::Formatter<'_>| {
            if m.is_atomic() {
                write!(f, "{m}")
            } else {
                write!(f, "({m})")
            }
        };
        let bin = |a: &Modal, op: &str, b: &Modal, f: &mut fmt::Formatter<'_>| {
            arg(a, f)?;
            write!(f, " {op} ")?;
            arg(b, f)
        };
        match self {
            Modal::Var(_, n) => f.write_str(n),
            Modal::Top(s) => write!(f, "⊤{}", if *s == Sort::D { "∂" } else { "" }),
            Modal::Bot(s) => write!(f, "⊥{}", if *s == Sort::D { "∂" } else { "" }),
            Modal::Unit => f.write_str("u"),
            Modal::Prime(a) => {
                arg(a, f)?;
                f.write_str("′")
            }
            Modal::Meet(a, b) => bin(a, "∩", b, f),
            Modal::Join(a, b) => bin(a, "∪", b, f),
            Modal::Fuse(a, b) => bin(a, "⊙", b, f),
            Modal::RImp(a, b) => bin(a, "⊸", b, f),
            Modal::LImp(a, b) => bin(a, "⟜", b, f),
            Modal::TriR(a, b) => bin(a, "▷", b, f),
            Modal::TriL(a, b) => bin(a, "◁", b, f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorts_check() {
        let t = tri_r(Modal::Unit, prime(v1("P")));
        assert_eq!(t.sort(), Ok(Sort::D));
        assert_eq!(prime(t.clone()).sort(), Ok(Sort::One));
        assert!(fuse(t, v1("P")).sort().is_err());
        assert!(meet(v1("P"), vd("Q")).sort().is_err());
    }

    #[test]
    fn printing_uses_parentheses() {
        let t = fuse(v1("P1"), fuse(v1("P2"), v1("P3")));
        assert_eq!(t.to_string(), "P1 ⊙ (P2 ⊙ P3)");
        assert_eq!(dprime(fuse(v1("P"), v1("Q"))).to_string(), "(P ⊙ Q)′′");
    }

    #[test]
    fn polarity_counts_primes_and_antecedents() {
        let t = prime(tri_r(v1("P"), prime(v1("Q"))));
        let occ = t.occurrences(Polarity::Pos);
        assert_eq!(occ[0].polarity, Polarity::Neg);
        assert_eq!(occ[1].polarity, Polarity::Pos);
        assert_eq!(occ[1].primes, 1);
        assert!(!rimp(v1("P"), v1("Q")).is_positive());
        assert!(limp(v1("Q"), prime(v1("P"))).is_positive());
    }
}
