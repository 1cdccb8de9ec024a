//! Dual filter-ideal frames of finite algebras and the representation checks.
//!
//! Points of sort 1 are filters, points of sort ∂ are ideals, and a filter is
//! incident with an ideal when the two are disjoint. Every filter of a finite
//! algebra is principal, so the point for ↑a is named `x_a` and the point for
//! ↓a is `y_a`; the optional empty cones are `x_empty` and `y_empty`.

use std::fmt;

use thiserror::Error;

use crate::bitset::PointSet;
use crate::frame::{check_frame_class, ClassId, FrameError, RelName, Relation, Sort, SortedFrame};
use crate::order::{enumerate_filters, enumerate_ideals, Cone, FilterSet, IdealSet, Kind, OrderedAlgebra};
use crate::report::Report;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Signature {
    Poset,
    Semilattice,
    Lattice,
    Lambek,
}

impl Signature {
    pub fn parse(s: &str) -> Option<Signature> {
        Some(match s {
            "poset" => Signature::Poset,
            "semilattice" | "meet-semilattice" => Signature::Semilattice,
            "lattice" => Signature::Lattice,
            "lambek" => Signature::Lambek,
            _ => return None,
        })
    }

    /// The richest signature an algebra supports.
    pub fn of(alg: &OrderedAlgebra) -> Signature {
        if alg.has_prod() && alg.has_limp() && alg.unit().is_some() {
            return Signature::Lambek;
        }
        match alg.kind() {
            Kind::Poset => Signature::Poset,
            Kind::MeetSemilattice => Signature::Semilattice,
            Kind::Lattice => Signature::Lattice,
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Signature::Poset => "poset",
            Signature::Semilattice => "semilattice",
            Signature::Lattice => "lattice",
            Signature::Lambek => "lambek",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DualityError {
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

#[derive(Clone, Debug)]
pub struct CanonicalFrame {
    frame: SortedFrame,
    filters: FilterSet,
    ideals: IdealSet,
    signature: Signature,
    integral_unit: bool,
}

fn cone_name(prefix: &str, alg: &OrderedAlgebra, c: &Cone) -> String {
    match c.generator {
        Some(a) => format!("{prefix}_{}", alg.name(a)),
        None => format!("{prefix}_empty"),
    }
}

pub fn canonical_frame(
    alg: &OrderedAlgebra,
    signature: Signature,
    allow_empty: bool,
) -> Result<CanonicalFrame, DualityError> {
    match signature {
        Signature::Semilattice if alg.kind() == Kind::Poset => {
            return Err(DualityError::SignatureMismatch("algebra is not a meet-semilattice".into()))
        }
        Signature::Lattice if alg.kind() != Kind::Lattice => {
            return Err(DualityError::SignatureMismatch("algebra is not a lattice".into()))
        }
        Signature::Lambek if !(alg.has_prod() && alg.has_limp() && alg.unit().is_some()) => {
            return Err(DualityError::SignatureMismatch("lambek signature needs prod, limp and unit".into()))
        }
        _ => {}
    }
    let filters = enumerate_filters(alg, allow_empty);
    let ideals = enumerate_ideals(alg, allow_empty);
    let n1 = filters.len();
    let nd = ideals.len();
    let w1 = filters.members.iter().map(|c| cone_name("x", alg, c)).collect();
    let wd = ideals.members.iter().map(|c| cone_name("y", alg, c)).collect();
    let inc = filters
        .members
        .iter()
        .map(|x| (0..nd).filter(|&j| !x.members.intersects(ideals.members[j].members)).collect())
        .collect();
    let mut frame = SortedFrame::new(w1, wd, inc)?;

    let e = alg.effective_unit();
    let unit: PointSet = (0..n1).filter(|&i| filters.members[i].members.contains(e)).collect();
    frame = frame.with_unit(unit);

    // yTxv iff a→b ∈ y for all a∈x, b∈v
    let mut t = Relation::empty(RelName::T, n1, nd);
    for (i, x) in filters.members.iter().enumerate() {
        for (j, v) in ideals.members.iter().enumerate() {
            let gen = image(x.members, v.members, |a, b| alg.imp(a, b));
            let sec = (0..nd).filter(|&k| gen.is_subset(ideals.members[k].members)).collect();
            t.set_section(i, j, sec);
        }
    }
    frame = frame.with_relation(t)?;

    if signature == Signature::Lambek {
        // uRxz iff a∘b ∈ u for all a∈x, b∈z
        let mut r = Relation::empty(RelName::R, n1, n1);
        for (i, x) in filters.members.iter().enumerate() {
            for (k, z) in filters.members.iter().enumerate() {
                let gen = image(x.members, z.members, |a, b| alg.prod(a, b).unwrap());
                let sec = (0..n1).filter(|&u| gen.is_subset(filters.members[u].members)).collect();
                r.set_section(i, k, sec);
            }
        }
        // ySvx iff b←a ∈ y for all a∈x, b∈v
        let mut s = Relation::empty(RelName::S, nd, n1);
        for (j, v) in ideals.members.iter().enumerate() {
            for (i, x) in filters.members.iter().enumerate() {
                let gen = image(v.members, x.members, |b, a| alg.limp(b, a).unwrap());
                let sec = (0..nd).filter(|&k| gen.is_subset(ideals.members[k].members)).collect();
                s.set_section(j, i, sec);
            }
        }
        frame = frame.with_relation(r)?.with_relation(s)?;
    }

    Ok(CanonicalFrame { frame, filters, ideals, signature, integral_unit: alg.unit().is_none() })
}

fn image(a: PointSet, b: PointSet, op: impl Fn(usize, usize) -> usize) -> PointSet {
    let mut out = PointSet::EMPTY;
    for i in a.iter() {
        for j in b.iter() {
            out.insert(op(i, j));
        }
    }
    out
}

impl CanonicalFrame {
    pub fn frame(&self) -> &SortedFrame {
        &self.frame
    }

    pub fn into_frame(self) -> SortedFrame {
        self.frame
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn filters(&self) -> &FilterSet {
        &self.filters
    }

    pub fn ideals(&self) -> &IdealSet {
        &self.ideals
    }

    /// True when U was taken to be Γx_⊤ for lack of a declared unit.
    pub fn integral_unit(&self) -> bool {
        self.integral_unit
    }

    pub fn filter(&self, i: usize) -> PointSet {
        self.filters.members[i].members
    }

    pub fn ideal(&self, j: usize) -> PointSet {
        self.ideals.members[j].members
    }

    /// Index of the point x_a.
    pub fn x(&self, a: usize) -> usize {
        self.filters.members.iter().position(|c| c.generator == Some(a)).unwrap()
    }

    /// Index of the point y_a.
    pub fn y(&self, a: usize) -> usize {
        self.ideals.members.iter().position(|c| c.generator == Some(a)).unwrap()
    }

    /// α(a) = { x : a ∈ x }
    pub fn alpha(&self, a: usize) -> PointSet {
        (0..self.filters.len()).filter(|&i| self.filter(i).contains(a)).collect()
    }

    /// η(a) = { y : a ∈ y }
    pub fn eta(&self, a: usize) -> PointSet {
        (0..self.ideals.len()).filter(|&j| self.ideal(j).contains(a)).collect()
    }

    /// Point ids against their member lists.
    pub fn sidecar(&self, alg: &OrderedAlgebra) -> String {
        let mut out = String::new();
        for (i, c) in self.filters.members.iter().enumerate() {
            out.push_str(&format!("{} = {}\n", self.frame.name(Sort::One, i), alg.set_names(c.members)));
        }
        for (j, c) in self.ideals.members.iter().enumerate() {
            out.push_str(&format!("{} = {}\n", self.frame.name(Sort::D, j), alg.set_names(c.members)));
        }
        out
    }

    fn header(&self, title: &str) -> Report {
        let mut rep = Report::new(title);
        rep.note(format!("signature {}", self.signature));
        if self.integral_unit {
            rep.note("no unit declared: U = Γx_⊤");
        }
        rep
    }

    fn set1(&self, s: PointSet) -> String {
        self.frame.set_names(Sort::One, s)
    }
}

/// Maps α and η for every element, as `(alpha, eta)` vectors indexed by element.
pub fn representation(alg: &OrderedAlgebra, cf: &CanonicalFrame) -> (Vec<PointSet>, Vec<PointSet>) {
    let alpha = (0..alg.size()).map(|a| cf.alpha(a)).collect();
    let eta = (0..alg.size()).map(|a| cf.eta(a)).collect();
    (alpha, eta)
}

pub fn verify_embedding(alg: &OrderedAlgebra, cf: &CanonicalFrame) -> Result<Report, DualityError> {
    let f = cf.frame();
    let n = alg.size();
    let mut rep = cf.header("representation embedding");
    let (alpha, eta) = representation(alg, cf);
    let nm = |a: usize| alg.name(a).to_string();

    let mut t = rep.tally("alpha stable, eta co-stable, alpha' = eta");
    for a in 0..n {
        let ok = f.is_stable(Sort::One, alpha[a])
            && f.is_stable(Sort::D, eta[a])
            && f.galois(Sort::One, alpha[a]) == eta[a]
            && alpha[a] == f.gamma(Sort::One, cf.x(a));
        t.expect(ok, || format!("a={}", nm(a)));
    }
    t.finish();

    let mut t = rep.tally("order embedding");
    for a in 0..n {
        for b in 0..n {
            t.expect(alg.leq(a, b) == alpha[a].is_subset(alpha[b]), || format!("a={}, b={}", nm(a), nm(b)));
        }
    }
    t.finish();

    let mut t = rep.tally("alpha(a->b) = alpha(a) => alpha(b)");
    for a in 0..n {
        for b in 0..n {
            let rhs = f.implication(alpha[a], alpha[b])?;
            t.expect(alpha[alg.imp(a, b)] == rhs, || {
                format!("a={}, b={}: {} vs {}", nm(a), nm(b), cf.set1(alpha[alg.imp(a, b)]), cf.set1(rhs))
            });
        }
    }
    t.finish();

    if cf.signature() == Signature::Lambek {
        let mut t = rep.tally("alpha(a*b) = closure(alpha(a) . alpha(b))");
        for a in 0..n {
            for b in 0..n {
                let lhs = alpha[alg.prod(a, b).unwrap()];
                let rhs = f.fusion(alpha[a], alpha[b])?;
                t.expect(lhs == rhs, || format!("a={}, b={}: {} vs {}", nm(a), nm(b), cf.set1(lhs), cf.set1(rhs)));
            }
        }
        t.finish();
        let mut t = rep.tally("alpha(b<-a) = alpha(b) <= alpha(a)");
        for a in 0..n {
            for b in 0..n {
                let lhs = alpha[alg.limp(b, a).unwrap()];
                let rhs = f.left_implication(alpha[b], alpha[a])?;
                t.expect(lhs == rhs, || format!("a={}, b={}: {} vs {}", nm(a), nm(b), cf.set1(lhs), cf.set1(rhs)));
            }
        }
        t.finish();
    }

    if alg.kind() != Kind::Poset {
        let mut t = rep.tally("alpha(a&b) = alpha(a) & alpha(b)");
        for a in 0..n {
            for b in 0..n {
                let m = alg.meet(a, b).unwrap();
                t.expect(alpha[m] == alpha[a].inter(alpha[b]), || format!("a={}, b={}", nm(a), nm(b)));
            }
        }
        t.finish();
    }
    if alg.kind() == Kind::Lattice {
        let mut t = rep.tally("alpha(a|b) = closure(alpha(a) | alpha(b))");
        for a in 0..n {
            for b in 0..n {
                let j = alg.join(a, b).unwrap();
                t.expect(alpha[j] == f.join(Sort::One, alpha[a], alpha[b]), || format!("a={}, b={}", nm(a), nm(b)));
            }
        }
        t.finish();
    }
    Ok(rep)
}

pub fn verify_canonical_extension(alg: &OrderedAlgebra, cf: &CanonicalFrame) -> Result<Report, DualityError> {
    let f = cf.frame();
    let mut rep = cf.header("canonical extension");
    let stable = f.stable_sets(Sort::One)?;

    let mut t = rep.tally("join density of closed elements");
    for &a in &stable {
        let joined = a.iter().fold(PointSet::EMPTY, |acc, x| acc.union(f.gamma(Sort::One, x)));
        t.expect(f.closure(Sort::One, joined) == a, || format!("A={}", cf.set1(a)));
    }
    t.finish();

    let mut t = rep.tally("meet density of open elements");
    for &a in &stable {
        let met = f.galois(Sort::One, a).iter().fold(f.full(Sort::One), |acc, y| {
            acc.inter(f.galois(Sort::D, PointSet::singleton(y)))
        });
        t.expect(met == a, || format!("A={}", cf.set1(a)));
    }
    t.finish();

    let mut t = rep.tally("compactness: Γx ⊆ {y}' iff x meets y");
    for i in 0..cf.filters().len() {
        for j in 0..cf.ideals().len() {
            let lhs = f.gamma(Sort::One, i).is_subset(f.galois(Sort::D, PointSet::singleton(j)));
            let rhs = cf.filter(i).intersects(cf.ideal(j));
            t.expect(lhs == rhs, || {
                format!(
                    "x={} ({}), y={} ({})",
                    f.name(Sort::One, i),
                    alg.set_names(cf.filter(i)),
                    f.name(Sort::D, j),
                    alg.set_names(cf.ideal(j))
                )
            });
        }
    }
    t.finish();
    Ok(rep)
}

/// Γx →π {y}′ = closure of the union of α(a→b) over a∈x, b∈y.
fn pi_value(alg: &OrderedAlgebra, cf: &CanonicalFrame, i: usize, j: usize) -> PointSet {
    let f = cf.frame();
    let mut acc = PointSet::EMPTY;
    for a in cf.filter(i).iter() {
        for b in cf.ideal(j).iter() {
            acc = acc.union(cf.alpha(alg.imp(a, b)));
        }
    }
    f.closure(Sort::One, acc)
}

pub fn verify_pi_extension(alg: &OrderedAlgebra, cf: &CanonicalFrame) -> Result<Report, DualityError> {
    let f = cf.frame();
    let mut rep = cf.header("pi-extension of implication");
    let n1 = cf.filters().len();
    let nd = cf.ideals().len();
    let pi: Vec<Vec<PointSet>> = (0..n1).map(|i| (0..nd).map(|j| pi_value(alg, cf, i, j)).collect()).collect();

    let mut t = rep.tally("closed/open pairs: Γx => {y}' = pi value");
    for i in 0..n1 {
        for j in 0..nd {
            let lhs = f.implication(f.gamma(Sort::One, i), f.galois(Sort::D, PointSet::singleton(j)))?;
            t.expect(lhs == pi[i][j], || {
                format!("x={}, y={}: {} vs {}", f.name(Sort::One, i), f.name(Sort::D, j), cf.set1(lhs), cf.set1(pi[i][j]))
            });
        }
    }
    t.finish();

    let mut t = rep.tally("principal pairs: alpha(a->b)");
    for a in 0..alg.size() {
        for b in 0..alg.size() {
            let got = pi[cf.x(a)][cf.y(b)];
            t.expect(got == cf.alpha(alg.imp(a, b)), || format!("a={}, b={}", alg.name(a), alg.name(b)));
        }
    }
    t.finish();

    let stable = f.stable_sets(Sort::One)?;
    let mut t = rep.tally("stable pairs: A => C = meet of pi values");
    for &a in &stable {
        let co = stable.iter().map(|&c| f.galois(Sort::One, c)).collect::<Vec<_>>();
        for (k, &c) in stable.iter().enumerate() {
            let lhs = f.implication(a, c)?;
            let mut rhs = f.full(Sort::One);
            for x in a.iter() {
                for y in co[k].iter() {
                    rhs = rhs.inter(pi[x][y]);
                }
            }
            t.expect(lhs == rhs, || format!("A={}, C={}", cf.set1(a), cf.set1(c)));
        }
    }
    t.finish();
    Ok(rep)
}

/// e→a = a for every a.
fn has_left_unit(alg: &OrderedAlgebra) -> bool {
    let e = alg.effective_unit();
    (0..alg.size()).all(|a| alg.imp(e, a) == a)
}

/// Frame classes the canonical frame is expected to belong to.
pub fn expected_classes(alg: &OrderedAlgebra, cf: &CanonicalFrame) -> Vec<ClassId> {
    let mut v = vec![ClassId::PU];
    if has_left_unit(alg) {
        v.extend([ClassId::PUl, ClassId::PUlStar, ClassId::PUlSub]);
    }
    match cf.signature() {
        Signature::Poset => {}
        Signature::Semilattice | Signature::Lattice if !alg.is_integral() => {}
        Signature::Semilattice => v.push(ClassId::S),
        Signature::Lattice => v.extend([ClassId::S, ClassId::L]),
        Signature::Lambek => v.extend([ClassId::LK, ClassId::LKStar, ClassId::LKSub]),
    }
    v
}

pub fn verify_canonical_class(
    alg: &OrderedAlgebra,
    cf: &CanonicalFrame,
    class: ClassId,
) -> Result<Report, DualityError> {
    let mut rep = cf.header(&format!("canonical frame in {class}"));
    rep.note(format!("{} elements, kind {}", alg.size(), alg.kind()));
    rep.absorb(&check_frame_class(cf.frame(), class)?);
    Ok(rep)
}

/// Point-level facts about canonical frames plus the structural laws the algebra satisfies.
pub fn verify_canonical_structure(alg: &OrderedAlgebra, cf: &CanonicalFrame) -> Result<Report, DualityError> {
    let f = cf.frame();
    let mut rep = cf.header("canonical structure");
    let n1 = cf.filters().len();
    let nd = cf.ideals().len();
    let full_cones = cf.filters().members.iter().all(|c| c.generator.is_some());

    rep.push("separated", f.separated(), None);

    if full_cones {
        let mut t = rep.tally("yTxv iff x⊳v ⊆ y");
        for i in 0..n1 {
            for j in 0..nd {
                let tri = alg.triangle(cf.filter(i), cf.ideal(j)).expect("cones");
                for k in 0..nd {
                    let rel = f.require(RelName::T)?.contains(k, i, j);
                    t.expect(rel == tri.is_subset(cf.ideal(k)), || {
                        format!("y={}, x={}, v={}", f.name(Sort::D, k), f.name(Sort::One, i), f.name(Sort::D, j))
                    });
                }
            }
        }
        t.finish();
    }

    if cf.signature() != Signature::Lambek {
        return Ok(rep);
    }
    let r = f.require(RelName::R)?;
    let n = alg.size();
    let prod = |a: usize, b: usize| alg.prod(a, b).unwrap();

    let mut t = rep.tally("Γx ⊙̄ Γz = Rxz");
    for i in 0..n1 {
        for k in 0..n1 {
            let lhs = f.fusion(f.gamma(Sort::One, i), f.gamma(Sort::One, k))?;
            t.expect(lhs == r.section(i, k), || format!("x={}, z={}", f.name(Sort::One, i), f.name(Sort::One, k)));
        }
    }
    t.finish();

    if full_cones {
        let mut t = rep.tally("uRxz iff x∘z ⊆ u");
        for i in 0..n1 {
            for k in 0..n1 {
                let fused = alg.fuse(cf.filter(i), cf.filter(k)).expect("cones");
                for u in 0..n1 {
                    t.expect(r.contains(u, i, k) == fused.is_subset(cf.filter(u)), || {
                        format!("u={}, x={}, z={}", f.name(Sort::One, u), f.name(Sort::One, i), f.name(Sort::One, k))
                    });
                }
            }
        }
        t.finish();
    }

    if alg.is_associative() && full_cones {
        let mut t = rep.tally("point operator ∘ associative");
        for a in 0..n1 {
            for b in 0..n1 {
                for c in 0..n1 {
                    let fuse = |x, y| alg.fuse(x, y).expect("cones");
                    let l = fuse(cf.filter(a), fuse(cf.filter(b), cf.filter(c)));
                    let rr = fuse(fuse(cf.filter(a), cf.filter(b)), cf.filter(c));
                    t.expect(l == rr, || format!("{} {} {}", f.name(Sort::One, a), f.name(Sort::One, b), f.name(Sort::One, c)));
                }
            }
        }
        t.finish();
    }

    let laws: [(&str, bool, &dyn Fn(usize, usize, usize) -> bool); 4] = [
        (
            "exchange: xRuz -> xRzu",
            alg.is_commutative(),
            &|x, u, z| !r.contains(x, u, z) || r.contains(x, z, u),
        ),
        (
            "contraction: xRxx",
            (0..n).all(|a| alg.leq(a, prod(a, a))),
            &|x, u, z| u != x || z != x || r.contains(x, x, x),
        ),
        (
            "weakening: xRuz -> z <= x",
            (0..n).all(|a| (0..n).all(|b| alg.leq(prod(a, b), b))),
            &|x, u, z| !r.contains(x, u, z) || f.leq(Sort::One, z, x),
        ),
        (
            "Visser: uRxz -> x <= u & z <= u",
            (0..n).all(|a| (0..n).all(|b| alg.meet(a, b).is_some_and(|m| alg.leq(prod(a, b), m)))),
            &|u, x, z| !r.contains(u, x, z) || (f.leq(Sort::One, x, u) && f.leq(Sort::One, z, u)),
        ),
    ];
    for (id, applies, holds) in laws {
        if !applies {
            continue;
        }
        let mut t = rep.tally(id);
        for x in 0..n1 {
            for u in 0..n1 {
                for z in 0..n1 {
                    t.expect(holds(x, u, z), || {
                        format!("({}, {}, {})", f.name(Sort::One, x), f.name(Sort::One, u), f.name(Sort::One, z))
                    });
                }
            }
        }
        t.finish();
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::load_algebra;

    const CHAIN2: &str = "elements: 0 1\norder: 0<=1\nkind: lattice\nunit: 1\nimp: (0,0)=1 (0,1)=1 (1,0)=0 (1,1)=1\n";

    #[test]
    fn two_chain_incidence() {
        let alg = load_algebra(CHAIN2).unwrap();
        let cf = canonical_frame(&alg, Signature::Lattice, false).unwrap();
        let f = cf.frame();
        assert_eq!(f.size(Sort::One), 2);
        let pairs: Vec<(String, String)> = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .filter(|&(i, j)| f.incident(i, j))
            .map(|(i, j)| (f.name(Sort::One, i).to_string(), f.name(Sort::D, j).to_string()))
            .collect();
        assert_eq!(pairs, vec![("x_1".to_string(), "y_0".to_string())]);
        assert_eq!(cf.alpha(1), f.full(Sort::One));
    }

    #[test]
    fn lambek_needs_prod() {
        let alg = load_algebra(CHAIN2).unwrap();
        assert!(matches!(canonical_frame(&alg, Signature::Lambek, false), Err(DualityError::SignatureMismatch(_))));
    }

    #[test]
    fn empty_cones_allowed() {
        let alg = load_algebra(CHAIN2).unwrap();
        let cf = canonical_frame(&alg, Signature::Poset, true).unwrap();
        assert_eq!(cf.frame().size(Sort::One), 3);
        assert!(verify_embedding(&alg, &cf).unwrap().all_pass());
    }
}
