//! Two-sorted residuated frames and the polarity machinery on them.

mod axioms;
mod text;
pub mod laws;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::bitset::{lex_cmp, PointSet, MAX_POINTS};
use crate::limits;

pub use axioms::{check_axiom, check_frame_class, AxiomRecord, ClassId, ClassReport};
pub use text::parse_frame;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    One,
    D,
}

impl Sort {
    pub fn dual(self) -> Sort {
        match self {
            Sort::One => Sort::D,
            Sort::D => Sort::One,
        }
    }

    pub fn subscript(self) -> &'static str {
        match self {
            Sort::One => "1",
            Sort::D => "∂",
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.subscript())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelName {
    T,
    R,
    S,
}

impl RelName {
    pub const ALL: [RelName; 3] = [RelName::T, RelName::R, RelName::S];

    /// (output sort, first argument sort, second argument sort)
    pub fn signature(self) -> (Sort, Sort, Sort) {
        match self {
            RelName::T => (Sort::D, Sort::One, Sort::D),
            RelName::R => (Sort::One, Sort::One, Sort::One),
            RelName::S => (Sort::D, Sort::D, Sort::One),
        }
    }

    pub fn letter(self) -> &'static str {
        match self {
            RelName::T => "T",
            RelName::R => "R",
            RelName::S => "S",
        }
    }
}

impl fmt::Display for RelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.letter())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrameError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("carrier of sort {0} is empty")]
    EmptyCarrier(Sort),
    #[error("carrier of sort {sort} has {size} points, above the limit of {limit}")]
    CarrierTooLarge { sort: Sort, size: usize, limit: usize },
    #[error("duplicate point `{0}`")]
    DuplicatePoint(String),
    #[error("unknown point `{name}` of sort {sort}")]
    UnknownPoint { sort: Sort, name: String },
    #[error("frame has no `{0}`")]
    MissingRelation(&'static str),
    #[error("relation {0} has the wrong shape")]
    BadRelation(RelName),
}

/// A ternary relation stored as its output sections, indexed by argument pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Relation {
    name: RelName,
    n1: usize,
    n2: usize,
    sections: Vec<PointSet>,
}

impl Relation {
    pub fn empty(name: RelName, n1: usize, n2: usize) -> Relation {
        Relation { name, n1, n2, sections: vec![PointSet::EMPTY; n1 * n2] }
    }

    pub fn from_sections(name: RelName, n1: usize, n2: usize, sections: Vec<PointSet>) -> Relation {
        assert_eq!(sections.len(), n1 * n2);
        Relation { name, n1, n2, sections }
    }

    pub fn name(&self) -> RelName {
        self.name
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }

    pub fn section(&self, a: usize, b: usize) -> PointSet {
        self.sections[a * self.n2 + b]
    }

    pub fn set_section(&mut self, a: usize, b: usize, s: PointSet) {
        self.sections[a * self.n2 + b] = s;
    }

    pub fn contains(&self, out: usize, a: usize, b: usize) -> bool {
        self.section(a, b).contains(out)
    }

    pub fn insert(&mut self, out: usize, a: usize, b: usize) {
        self.sections[a * self.n2 + b].insert(out);
    }

    /// All tuples (out, a, b) in lexicographic order of (out, a, b).
    pub fn tuples(&self) -> Vec<(usize, usize, usize)> {
        let mut v = Vec::new();
        for a in 0..self.n1 {
            for b in 0..self.n2 {
                for o in self.section(a, b).iter() {
                    v.push((o, a, b));
                }
            }
        }
        v.sort_unstable();
        v
    }
}

/// A subset of one sort together with its stability status.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GaloisSet {
    pub sort: Sort,
    pub members: PointSet,
    pub stable: bool,
}

#[derive(Debug)]
struct Derived {
    /// `gamma[sort][u]` = Γu = {u}''
    gamma1: Vec<PointSet>,
    gammad: Vec<PointSet>,
}

#[derive(Debug)]
pub struct SortedFrame {
    w1: Vec<String>,
    wd: Vec<String>,
    /// `inc[x]` = { y : x I y }
    inc: Vec<PointSet>,
    /// `inc_t[y]` = { x : x I y }
    inc_t: Vec<PointSet>,
    u: Option<PointSet>,
    t: Option<Relation>,
    r: Option<Relation>,
    s: Option<Relation>,
    class_tag: Option<String>,
    derived: OnceLock<Derived>,
}

impl Clone for SortedFrame {
    fn clone(&self) -> Self {
        SortedFrame {
            w1: self.w1.clone(),
            wd: self.wd.clone(),
            inc: self.inc.clone(),
            inc_t: self.inc_t.clone(),
            u: self.u,
            t: self.t.clone(),
            r: self.r.clone(),
            s: self.s.clone(),
            class_tag: self.class_tag.clone(),
            derived: OnceLock::new(),
        }
    }
}

impl PartialEq for SortedFrame {
    fn eq(&self, o: &Self) -> bool {
        self.w1 == o.w1
            && self.wd == o.wd
            && self.inc == o.inc
            && self.u == o.u
            && self.t == o.t
            && self.r == o.r
            && self.s == o.s
    }
}

impl SortedFrame {
    /// `incidence[x]` lists the ∂-points y with x I y.
    pub fn new(w1: Vec<String>, wd: Vec<String>, incidence: Vec<PointSet>) -> Result<SortedFrame, FrameError> {
        for (sort, names) in [(Sort::One, &w1), (Sort::D, &wd)] {
            if names.is_empty() {
                return Err(FrameError::EmptyCarrier(sort));
            }
            if names.len() > MAX_POINTS {
                return Err(FrameError::CarrierTooLarge { sort, size: names.len(), limit: MAX_POINTS });
            }
            let distinct: BTreeSet<&String> = names.iter().collect();
            if distinct.len() != names.len() {
                let dup = names.iter().find(|n| names.iter().filter(|m| m == n).count() > 1).unwrap();
                return Err(FrameError::DuplicatePoint(dup.clone()));
            }
        }
        assert_eq!(incidence.len(), w1.len());
        let full_d = PointSet::full(wd.len());
        let inc: Vec<PointSet> = incidence.into_iter().map(|r| r.inter(full_d)).collect();
        let inc_t = (0..wd.len())
            .map(|y| (0..w1.len()).filter(|&x| inc[x].contains(y)).collect())
            .collect();
        Ok(SortedFrame {
            w1,
            wd,
            inc,
            inc_t,
            u: None,
            t: None,
            r: None,
            s: None,
            class_tag: None,
            derived: OnceLock::new(),
        })
    }

    /// Frame with numbered points `x0..` and `y0..`.
    pub fn numbered(n1: usize, nd: usize, incidence: Vec<PointSet>) -> Result<SortedFrame, FrameError> {
        let w1 = (0..n1).map(|i| format!("x{i}")).collect();
        let wd = (0..nd).map(|i| format!("y{i}")).collect();
        SortedFrame::new(w1, wd, incidence)
    }

    /// W1 = W∂ with I the identity.
    pub fn classical(names: Vec<String>) -> Result<SortedFrame, FrameError> {
        let inc = (0..names.len()).map(PointSet::singleton).collect();
        SortedFrame::new(names.clone(), names, inc)
    }

    pub fn with_unit(mut self, u: PointSet) -> SortedFrame {
        self.u = Some(u.inter(PointSet::full(self.w1.len())));
        self
    }

    pub fn with_relation(mut self, rel: Relation) -> Result<SortedFrame, FrameError> {
        let (_, a, b) = rel.name.signature();
        if rel.dims() != (self.size(a), self.size(b)) {
            return Err(FrameError::BadRelation(rel.name));
        }
        let (out, _, _) = rel.name.signature();
        let full = PointSet::full(self.size(out));
        if rel.sections.iter().any(|s| !s.is_subset(full)) {
            return Err(FrameError::BadRelation(rel.name));
        }
        match rel.name {
            RelName::T => self.t = Some(rel),
            RelName::R => self.r = Some(rel),
            RelName::S => self.s = Some(rel),
        }
        Ok(self)
    }

    pub fn with_class_tag(mut self, tag: Option<String>) -> SortedFrame {
        self.class_tag = tag;
        self
    }

    pub fn class_tag(&self) -> Option<&str> {
        self.class_tag.as_deref()
    }

    pub fn size(&self, sort: Sort) -> usize {
        match sort {
            Sort::One => self.w1.len(),
            Sort::D => self.wd.len(),
        }
    }

    pub fn full(&self, sort: Sort) -> PointSet {
        PointSet::full(self.size(sort))
    }

    pub fn names(&self, sort: Sort) -> &[String] {
        match sort {
            Sort::One => &self.w1,
            Sort::D => &self.wd,
        }
    }

    pub fn name(&self, sort: Sort, i: usize) -> &str {
        &self.names(sort)[i]
    }

    pub fn index(&self, sort: Sort, name: &str) -> Option<usize> {
        self.names(sort).iter().position(|n| n == name)
    }

    pub fn set_names(&self, sort: Sort, s: PointSet) -> String {
        let items: Vec<&str> = s.iter().map(|i| self.name(sort, i)).collect();
        format!("{{{}}}", items.join(","))
    }

    pub fn incident(&self, x: usize, y: usize) -> bool {
        self.inc[x].contains(y)
    }

    /// I-row of a point: the opposite-sort points it is incident with.
    pub fn incidence_row(&self, sort: Sort, u: usize) -> PointSet {
        match sort {
            Sort::One => self.inc[u],
            Sort::D => self.inc_t[u],
        }
    }

    pub fn unit_set(&self) -> Option<PointSet> {
        self.u
    }

    pub fn relation(&self, name: RelName) -> Option<&Relation> {
        match name {
            RelName::T => self.t.as_ref(),
            RelName::R => self.r.as_ref(),
            RelName::S => self.s.as_ref(),
        }
    }

    pub fn require(&self, name: RelName) -> Result<&Relation, FrameError> {
        self.relation(name).ok_or(FrameError::MissingRelation(name.letter()))
    }

    pub fn require_unit(&self) -> Result<PointSet, FrameError> {
        self.u.ok_or(FrameError::MissingRelation("U"))
    }

    // ----- polarity -----

    /// X′: the points of the other sort standing in ⫫ to every member of X.
    pub fn galois(&self, sort: Sort, x: PointSet) -> PointSet {
        let mut hit = PointSet::EMPTY;
        for u in x.iter() {
            hit = hit.union(self.incidence_row(sort, u));
        }
        self.full(sort.dual()).minus(hit)
    }

    pub fn closure(&self, sort: Sort, x: PointSet) -> PointSet {
        self.galois(sort.dual(), self.galois(sort, x))
    }

    pub fn is_stable(&self, sort: Sort, x: PointSet) -> bool {
        self.closure(sort, x) == x
    }

    pub fn galois_set(&self, sort: Sort, x: PointSet) -> GaloisSet {
        GaloisSet { sort, members: x, stable: self.is_stable(sort, x) }
    }

    /// Closure of the union (join in the stable-set lattice).
    pub fn join(&self, sort: Sort, a: PointSet, b: PointSet) -> PointSet {
        self.closure(sort, a.union(b))
    }

    fn derived(&self) -> &Derived {
        self.derived.get_or_init(|| Derived {
            gamma1: (0..self.w1.len()).map(|u| self.closure(Sort::One, PointSet::singleton(u))).collect(),
            gammad: (0..self.wd.len()).map(|u| self.closure(Sort::D, PointSet::singleton(u))).collect(),
        })
    }

    /// Γu = {u}″, the principal upset of u in the specialization order.
    pub fn gamma(&self, sort: Sort, u: usize) -> PointSet {
        match sort {
            Sort::One => self.derived().gamma1[u],
            Sort::D => self.derived().gammad[u],
        }
    }

    /// Specialization preorder: u ≤ w iff {u}′ ⊆ {w}′.
    pub fn leq(&self, sort: Sort, u: usize, w: usize) -> bool {
        self.gamma(sort, u).contains(w)
    }

    pub fn up_closure(&self, sort: Sort, x: PointSet) -> PointSet {
        x.iter().fold(PointSet::EMPTY, |acc, u| acc.union(self.gamma(sort, u)))
    }

    pub fn separated(&self) -> bool {
        [Sort::One, Sort::D].into_iter().all(|s| {
            let n = self.size(s);
            (0..n).all(|u| (0..n).all(|w| u == w || !(self.leq(s, u, w) && self.leq(s, w, u))))
        })
    }

    /// Galois stable (sort 1) or co-stable (sort ∂) sets, in lexicographic order of members.
    pub fn stable_sets(&self, sort: Sort) -> Result<Vec<PointSet>, FrameError> {
        self.stable_sets_bounded(sort, limits::max_stable_carrier())
    }

    pub fn stable_sets_bounded(&self, sort: Sort, bound: usize) -> Result<Vec<PointSet>, FrameError> {
        let n = self.size(sort);
        if n > bound {
            return Err(FrameError::CarrierTooLarge { sort, size: n, limit: bound });
        }
        // every stable set is an intersection of images {v}′ of opposite points
        let mut family: BTreeSet<u128> = BTreeSet::new();
        family.insert(self.full(sort).bits());
        for v in 0..self.size(sort.dual()) {
            let g = self.galois(sort.dual(), PointSet::singleton(v));
            let extra: Vec<u128> = family.iter().map(|&a| a & g.bits()).collect();
            family.extend(extra);
        }
        let mut out: Vec<PointSet> = family.into_iter().map(PointSet::from_bits).collect();
        out.sort_by(|a, b| lex_cmp(*a, *b));
        Ok(out)
    }

    // ----- relations and operators -----

    /// Section of the Galois dual relation: R′ab = (Rab)′.
    pub fn dual_section(&self, name: RelName, a: usize, b: usize) -> Result<PointSet, FrameError> {
        let rel = self.require(name)?;
        Ok(self.galois(name.signature().0, rel.section(a, b)))
    }

    /// The Galois dual relation as a table of sections.
    pub fn galois_dual_relation(&self, name: RelName) -> Result<Relation, FrameError> {
        let rel = self.require(name)?;
        let out = name.signature().0;
        let (n1, n2) = rel.dims();
        let sections = (0..n1)
            .flat_map(|a| (0..n2).map(move |b| (a, b)))
            .map(|(a, b)| self.galois(out, rel.section(a, b)))
            .collect();
        Ok(Relation { name, n1, n2, sections })
    }

    /// Image operator F(A, B) = ∪ { Rab : a∈A, b∈B }.
    pub fn image(&self, name: RelName, a: PointSet, b: PointSet) -> Result<PointSet, FrameError> {
        let rel = self.require(name)?;
        let mut acc = PointSet::EMPTY;
        for i in a.iter() {
            for j in b.iter() {
                acc = acc.union(rel.section(i, j));
            }
        }
        Ok(acc)
    }

    /// Closure of the image.
    pub fn closed_operator(&self, name: RelName, a: PointSet, b: PointSet) -> Result<PointSet, FrameError> {
        let out = name.signature().0;
        Ok(self.closure(out, self.image(name, a, b)?))
    }

    /// Sort-1 operation on stable sets induced by a relation: ⇒ for T, ⊙̄ for R, ⇐ for S.
    pub fn single_sorted(&self, name: RelName, a: PointSet, c: PointSet) -> Result<PointSet, FrameError> {
        match name {
            RelName::T => self.implication(a, c),
            RelName::R => self.fusion(a, c),
            RelName::S => self.left_implication(a, c),
        }
    }

    /// A ⇒ C = (A ▷ C′)′
    pub fn implication(&self, a: PointSet, c: PointSet) -> Result<PointSet, FrameError> {
        let tri = self.image(RelName::T, a, self.galois(Sort::One, c))?;
        Ok(self.galois(Sort::D, tri))
    }

    /// A ⊙̄ F = (A ⊙ F)″
    pub fn fusion(&self, a: PointSet, f: PointSet) -> Result<PointSet, FrameError> {
        self.closed_operator(RelName::R, a, f)
    }

    /// C ⇐ A = (C′ ⊲ A)′
    pub fn left_implication(&self, c: PointSet, a: PointSet) -> Result<PointSet, FrameError> {
        let tri = self.image(RelName::S, self.galois(Sort::One, c), a)?;
        Ok(self.galois(Sort::D, tri))
    }

    pub fn to_text(&self) -> String {
        text::render(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    #[test]
    fn classical_prime_is_complement() {
        let f = SortedFrame::classical(names("w", 3)).unwrap();
        for x in PointSet::all_subsets(3) {
            assert_eq!(f.galois(Sort::One, x), x.complement(3));
        }
        assert_eq!(f.stable_sets(Sort::One).unwrap().len(), 8);
        assert!(f.separated());
    }

    #[test]
    fn duplicate_rows_not_separated() {
        let row = PointSet::singleton(0);
        let f = SortedFrame::new(names("x", 2), names("y", 2), vec![row, row]).unwrap();
        assert!(!f.separated());
    }

    #[test]
    fn image_example() {
        let f = SortedFrame::new(names("x", 2), names("y", 1), vec![PointSet::EMPTY, PointSet::EMPTY]).unwrap();
        let mut t = Relation::empty(RelName::T, 2, 1);
        t.insert(0, 0, 0);
        let f = f.with_relation(t).unwrap();
        let got = f.image(RelName::T, PointSet::singleton(0), PointSet::singleton(0)).unwrap();
        assert_eq!(got, PointSet::singleton(0));
        assert!(f.image(RelName::T, PointSet::EMPTY, PointSet::full(1)).unwrap().is_empty());
    }

    #[test]
    fn empty_section_dualizes_to_everything() {
        let f = SortedFrame::classical(names("w", 2)).unwrap();
        let f = f.with_relation(Relation::empty(RelName::R, 2, 2)).unwrap();
        assert_eq!(f.dual_section(RelName::R, 0, 1).unwrap(), PointSet::full(2));
    }

    #[test]
    fn missing_relation_reported() {
        let f = SortedFrame::classical(names("w", 1)).unwrap();
        assert_eq!(f.image(RelName::R, PointSet::full(1), PointSet::full(1)), Err(FrameError::MissingRelation("R")));
    }

    #[test]
    fn wrong_shape_rejected() {
        let f = SortedFrame::classical(names("w", 2)).unwrap();
        assert!(f.with_relation(Relation::empty(RelName::T, 1, 2)).is_err());
    }
}
