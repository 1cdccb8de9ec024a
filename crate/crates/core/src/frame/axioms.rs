//! Frame-class axiom checkers.

use std::fmt;


use super::{FrameError, RelName, Sort, SortedFrame};
use crate::bitset::PointSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassId {
    PU,
    PUl,
    /// PUl with (U*2)
    PUlStar,
    /// PUl with (M) and (U_*2)
    PUlSub,
    LK,
    /// LK with (F3*.1), (F3*.2)
    LKStar,
    /// LK with (M), (F3_*.1), (F3_*.2)
    LKSub,
    S,
    L,
    QuasiSerial,
    Classical,
    Distributive,
}

impl ClassId {
    pub const ALL: [ClassId; 12] = [
        ClassId::PU,
        ClassId::PUl,
        ClassId::PUlStar,
        ClassId::PUlSub,
        ClassId::LK,
        ClassId::LKStar,
        ClassId::LKSub,
        ClassId::S,
        ClassId::L,
        ClassId::QuasiSerial,
        ClassId::Classical,
        ClassId::Distributive,
    ];

    pub fn parse(s: &str) -> Option<ClassId> {
        Some(match s {
            "PU" => ClassId::PU,
            "PUl" | "PUℓ" => ClassId::PUl,
            "PUl*" | "PUl^*" | "PUℓ*" => ClassId::PUlStar,
            "PUl_*" | "PUℓ_*" => ClassId::PUlSub,
            "LK" => ClassId::LK,
            "LK*" | "LK^*" => ClassId::LKStar,
            "LK_*" => ClassId::LKSub,
            "S" => ClassId::S,
            "L" => ClassId::L,
            "quasi-serial" => ClassId::QuasiSerial,
            "classical" => ClassId::Classical,
            "distributive" => ClassId::Distributive,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ClassId::PU => "PU",
            ClassId::PUl => "PUl",
            ClassId::PUlStar => "PUl*",
            ClassId::PUlSub => "PUl_*",
            ClassId::LK => "LK",
            ClassId::LKStar => "LK*",
            ClassId::LKSub => "LK_*",
            ClassId::S => "S",
            ClassId::L => "L",
            ClassId::QuasiSerial => "quasi-serial",
            ClassId::Classical => "classical",
            ClassId::Distributive => "distributive",
        }
    }

    /// Relations covered by (F1) in this class.
    pub fn f1_relations(self) -> &'static [RelName] {
        match self {
            ClassId::LK | ClassId::LKStar | ClassId::LKSub => &RelName::ALL,
            ClassId::QuasiSerial | ClassId::Classical | ClassId::Distributive => &[],
            _ => &[RelName::T],
        }
    }

    /// Relations covered by (M) in this class.
    pub fn monotone_relations(self) -> &'static [RelName] {
        match self {
            ClassId::LKSub => &RelName::ALL,
            ClassId::PUlSub => &[RelName::T],
            _ => &[],
        }
    }

    pub fn assumes_monotonicity(self) -> bool {
        !self.monotone_relations().is_empty()
    }

    /// Classes defined through the stronger (starred or subscripted) unit axioms.
    pub fn is_strengthened(self) -> bool {
        matches!(self, ClassId::PUlStar | ClassId::PUlSub | ClassId::LKStar | ClassId::LKSub)
    }

    pub fn is_lambek(self) -> bool {
        matches!(self, ClassId::LK | ClassId::LKStar | ClassId::LKSub)
    }

    pub fn axioms(self) -> Vec<&'static str> {
        let mut v: Vec<&'static str> = Vec::new();
        for r in self.f1_relations() {
            v.push(match r {
                RelName::T => "F1(T)",
                RelName::R => "F1(R)",
                RelName::S => "F1(S)",
            });
        }
        for r in self.monotone_relations() {
            v.push(match r {
                RelName::T => "M(T)",
                RelName::R => "M(R)",
                RelName::S => "M(S)",
            });
        }
        let rest: &[&'static str] = match self {
            ClassId::PU => &["U"],
            ClassId::PUl => &["U", "U1", "U2"],
            ClassId::PUlStar => &["U", "U1", "U*2"],
            ClassId::PUlSub => &["U", "U1", "U_*2"],
            ClassId::LK => &["RES", "U*", "F2.1", "F2.2", "F3.1", "F3.2"],
            ClassId::LKStar => &["RES", "U*", "F2.1", "F2.2", "F3*.1", "F3*.2"],
            ClassId::LKSub => &["RES", "U*", "F2.1", "F2.2", "F3_*.1", "F3_*.2"],
            ClassId::S => &["F2", "F3"],
            ClassId::L => &["F2", "F3a", "F3b"],
            ClassId::QuasiSerial => &["quasi-serial"],
            ClassId::Classical => &["classical"],
            ClassId::Distributive => &["R'<= sections", "G(W1) distributive"],
        };
        v.extend_from_slice(rest);
        v
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomRecord {
    pub id: String,
    pub pass: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassReport {
    pub class: String,
    pub records: Vec<AxiomRecord>,
}

impl ClassReport {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> Vec<&AxiomRecord> {
        self.records.iter().filter(|r| !r.pass).collect()
    }

    pub fn record(&self, id: &str) -> Option<&AxiomRecord> {
        self.records.iter().find(|r| r.id == id)
    }
}

pub fn check_frame_class(frame: &SortedFrame, class: ClassId) -> Result<ClassReport, FrameError> {
    let mut records = Vec::new();
    for id in class.axioms() {
        let witness = check_axiom(frame, id)?;
        records.push(AxiomRecord { id: id.to_string(), pass: witness.is_none(), witness });
    }
    Ok(ClassReport { class: class.as_str().to_string(), records })
}

/// Runs one named axiom; `Some(witness)` on failure.
pub fn check_axiom(f: &SortedFrame, id: &str) -> Result<Option<String>, FrameError> {
    let c = Checker { f };
    Ok(match id {
        "F1(T)" => c.f1(RelName::T)?,
        "F1(R)" => c.f1(RelName::R)?,
        "F1(S)" => c.f1(RelName::S)?,
        "M(T)" => c.monotone(RelName::T)?,
        "M(R)" => c.monotone(RelName::R)?,
        "M(S)" => c.monotone(RelName::S)?,
        "U" => c.unit_axiom(Some(f.require_unit()?), "U")?,
        "F2" => c.unit_axiom(None, "F2")?,
        "U1" => c.u1()?,
        "U2" => c.u2()?,
        "U*2" => c.u_star2()?,
        "U_*2" => c.u_sub2()?,
        "U*" => c.u_stable()?,
        "RES" => c.res()?,
        "F2.1" => c.f2(true)?,
        "F2.2" => c.f2(false)?,
        "F3.1" => c.f3(true)?,
        "F3.2" => c.f3(false)?,
        "F3*.1" => c.f3_star(true)?,
        "F3*.2" => c.f3_star(false)?,
        "F3_*.1" => c.f3_sub(true)?,
        "F3_*.2" => c.f3_sub(false)?,
        "F3" | "F3a" => c.f3a()?,
        "F3b" => c.f3b()?,
        "quasi-serial" => c.quasi_serial(),
        "classical" => c.classical(),
        "R'<= sections" => c.upper_bound_sections(),
        "G(W1) distributive" => c.distributive_lattice()?,
        other => panic!("unknown axiom id {other}"),
    })
}

struct Checker<'a> {
    f: &'a SortedFrame,
}

impl Checker<'_> {
    fn n(&self, s: Sort) -> usize {
        self.f.size(s)
    }

    fn p(&self, s: Sort, i: usize) -> &str {
        self.f.name(s, i)
    }

    fn f1(&self, name: RelName) -> Result<Option<String>, FrameError> {
        let rel = self.f.require(name)?;
        let (out, s1, s2) = name.signature();
        for a in 0..self.n(s1) {
            for b in 0..self.n(s2) {
                let sec = rel.section(a, b);
                if !self.f.is_stable(out, sec) {
                    return Ok(Some(format!(
                        "section {}{}{} = {} is not Galois",
                        name,
                        self.p(s1, a),
                        self.p(s2, b),
                        self.f.set_names(out, sec)
                    )));
                }
            }
        }
        Ok(None)
    }

    fn monotone(&self, name: RelName) -> Result<Option<String>, FrameError> {
        let rel = self.f.require(name)?;
        let (out, s1, s2) = name.signature();
        for a in 0..self.n(s1) {
            for b in 0..self.n(s2) {
                for a2 in 0..self.n(s1) {
                    if !self.f.leq(s1, a2, a) {
                        continue;
                    }
                    for b2 in 0..self.n(s2) {
                        if !self.f.leq(s2, b2, b) {
                            continue;
                        }
                        let missing = rel.section(a, b).minus(rel.section(a2, b2));
                        if let Some(o) = missing.first() {
                            return Ok(Some(format!(
                                "{o}{name}{a}{b} with {a2}<={a}, {b2}<={b} but not {o}{name}{a2}{b2}",
                                o = self.p(out, o),
                                a = self.p(s1, a),
                                b = self.p(s2, b),
                                a2 = self.p(s1, a2),
                                b2 = self.p(s2, b2),
                            )));
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    /// (U) with the given set, or (F2) with U = W1.
    fn unit_axiom(&self, u: Option<PointSet>, label: &str) -> Result<Option<String>, FrameError> {
        self.f.require(RelName::T)?;
        let u = match u {
            Some(u) => {
                if !self.f.is_stable(Sort::One, u) {
                    return Ok(Some(format!("U = {} is not stable", self.f.set_names(Sort::One, u))));
                }
                u
            }
            None => self.f.full(Sort::One),
        };
        for x in 0..self.n(Sort::One) {
            for v in 0..self.n(Sort::D) {
                let perp = !self.f.incident(x, v);
                let all = u.is_subset(self.f.dual_section(RelName::T, x, v)?);
                if perp != all {
                    return Ok(Some(format!(
                        "({}) at (x={}, v={}): x⫫v is {}, ∀u∈U uT'xv is {}",
                        label,
                        self.p(Sort::One, x),
                        self.p(Sort::D, v),
                        perp,
                        all
                    )));
                }
            }
        }
        Ok(None)
    }

    fn u1(&self) -> Result<Option<String>, FrameError> {
        let u = self.f.require_unit()?;
        let t = self.f.require(RelName::T)?;
        for (y, x, v) in t.tuples() {
            if u.contains(x) && !self.f.leq(Sort::D, v, y) {
                return Ok(Some(format!(
                    "{}T{}{} with {}∈U but not {}<={}",
                    self.p(Sort::D, y),
                    self.p(Sort::One, x),
                    self.p(Sort::D, v),
                    self.p(Sort::One, x),
                    self.p(Sort::D, v),
                    self.p(Sort::D, y)
                )));
            }
        }
        Ok(None)
    }

    fn u2(&self) -> Result<Option<String>, FrameError> {
        let u = self.f.require_unit()?;
        let t = self.f.require(RelName::T)?;
        let nd = self.n(Sort::D);
        for y in 0..nd {
            for x in 0..self.n(Sort::One) {
                if !self.f.incident(x, y) {
                    continue;
                }
                let ok = self.f.incidence_row(Sort::One, x).iter().any(|v| {
                    u.iter().any(|x1| (0..nd).any(|v1| t.contains(v, x1, v1) && self.f.leq(Sort::D, y, v1)))
                });
                if !ok {
                    return Ok(Some(format!("(y={}, x={})", self.p(Sort::D, y), self.p(Sort::One, x))));
                }
            }
        }
        Ok(None)
    }

    fn u_star2(&self) -> Result<Option<String>, FrameError> {
        let u = self.f.require_unit()?;
        let t = self.f.require(RelName::T)?;
        let nd = self.n(Sort::D);
        for y in 0..nd {
            let ok = u.iter().any(|x| (0..nd).any(|v| t.contains(y, x, v) && self.f.leq(Sort::D, y, v)));
            if !ok {
                return Ok(Some(format!("y={}", self.p(Sort::D, y))));
            }
        }
        Ok(None)
    }

    fn u_sub2(&self) -> Result<Option<String>, FrameError> {
        let u = self.f.require_unit()?;
        let t = self.f.require(RelName::T)?;
        for y in 0..self.n(Sort::D) {
            if !u.iter().any(|x| t.contains(y, x, y)) {
                return Ok(Some(format!("y={}", self.p(Sort::D, y))));
            }
        }
        Ok(None)
    }

    fn u_stable(&self) -> Result<Option<String>, FrameError> {
        let u = self.f.require_unit()?;
        Ok((!self.f.is_stable(Sort::One, u)).then(|| format!("U = {} is not stable", self.f.set_names(Sort::One, u))))
    }

    fn res(&self) -> Result<Option<String>, FrameError> {
        for name in RelName::ALL {
            self.f.require(name)?;
        }
        let n1 = self.n(Sort::One);
        for x in 0..n1 {
            for z in 0..n1 {
                let r_dual = self.f.dual_section(RelName::R, x, z)?;
                for v in 0..self.n(Sort::D) {
                    let a = self.f.dual_section(RelName::S, v, z)?.contains(x);
                    let b = r_dual.contains(v);
                    let c = self.f.dual_section(RelName::T, x, v)?.contains(z);
                    if a != b || b != c {
                        return Ok(Some(format!(
                            "(x={}, z={}, v={}): xS'vz={}, vR'xz={}, zT'xv={}",
                            self.p(Sort::One, x),
                            self.p(Sort::One, z),
                            self.p(Sort::D, v),
                            a,
                            b,
                            c
                        )));
                    }
                }
            }
        }
        Ok(None)
    }

    fn f2(&self, first: bool) -> Result<Option<String>, FrameError> {
        let u = self.f.require_unit()?;
        let r = self.f.require(RelName::R)?;
        for (x, z1, z2) in r.tuples() {
            let (unit, other) = if first { (z1, z2) } else { (z2, z1) };
            if u.contains(unit) && !self.f.leq(Sort::One, other, x) {
                return Ok(Some(format!(
                    "{}R{}{} with {}∈U but not {}<={}",
                    self.p(Sort::One, x),
                    self.p(Sort::One, z1),
                    self.p(Sort::One, z2),
                    self.p(Sort::One, unit),
                    self.p(Sort::One, other),
                    self.p(Sort::One, x)
                )));
            }
        }
        Ok(None)
    }

    /// ∃ z1 z2 with the unit in the chosen place, zRz1z2 and x ≤ the other place.
    fn unit_witness(&self, z: usize, x: usize, first: bool) -> Result<bool, FrameError> {
        let u = self.f.require_unit()?;
        let r = self.f.require(RelName::R)?;
        let n1 = self.n(Sort::One);
        Ok(u.iter().any(|e| {
            (0..n1).any(|w| {
                let (a, b) = if first { (e, w) } else { (w, e) };
                r.contains(z, a, b) && self.f.leq(Sort::One, x, w)
            })
        }))
    }

    fn f3(&self, first: bool) -> Result<Option<String>, FrameError> {
        let n1 = self.n(Sort::One);
        for x in 0..n1 {
            for y in self.f.incidence_row(Sort::One, x).iter() {
                let mut ok = false;
                for z in self.f.incidence_row(Sort::D, y).iter() {
                    if self.unit_witness(z, x, first)? {
                        ok = true;
                        break;
                    }
                }
                if !ok {
                    return Ok(Some(format!("(x={}, y={})", self.p(Sort::One, x), self.p(Sort::D, y))));
                }
            }
        }
        Ok(None)
    }

    fn f3_star(&self, first: bool) -> Result<Option<String>, FrameError> {
        for x in 0..self.n(Sort::One) {
            if !self.unit_witness(x, x, first)? {
                return Ok(Some(format!("x={}", self.p(Sort::One, x))));
            }
        }
        Ok(None)
    }

    fn f3_sub(&self, first: bool) -> Result<Option<String>, FrameError> {
        let u = self.f.require_unit()?;
        let r = self.f.require(RelName::R)?;
        for x in 0..self.n(Sort::One) {
            let ok = u.iter().any(|z| if first { r.contains(x, z, x) } else { r.contains(x, x, z) });
            if !ok {
                return Ok(Some(format!("x={}", self.p(Sort::One, x))));
            }
        }
        Ok(None)
    }

    /// Every section xT'z[ ] is co-stable.
    fn f3a(&self) -> Result<Option<String>, FrameError> {
        let n1 = self.n(Sort::One);
        for x in 0..n1 {
            for z in 0..n1 {
                let mut sec = PointSet::EMPTY;
                for y in 0..self.n(Sort::D) {
                    if self.f.dual_section(RelName::T, z, y)?.contains(x) {
                        sec.insert(y);
                    }
                }
                if !self.f.is_stable(Sort::D, sec) {
                    return Ok(Some(format!(
                        "{}T'{}[ ] = {} is not co-stable",
                        self.p(Sort::One, x),
                        self.p(Sort::One, z),
                        self.f.set_names(Sort::D, sec)
                    )));
                }
            }
        }
        Ok(None)
    }

    /// Every section xT'[ ]v is stable.
    fn f3b(&self) -> Result<Option<String>, FrameError> {
        let n1 = self.n(Sort::One);
        for x in 0..n1 {
            for v in 0..self.n(Sort::D) {
                let mut sec = PointSet::EMPTY;
                for z in 0..n1 {
                    if self.f.dual_section(RelName::T, z, v)?.contains(x) {
                        sec.insert(z);
                    }
                }
                if !self.f.is_stable(Sort::One, sec) {
                    return Ok(Some(format!(
                        "{}T'[ ]{} = {} is not stable",
                        self.p(Sort::One, x),
                        self.p(Sort::D, v),
                        self.f.set_names(Sort::One, sec)
                    )));
                }
            }
        }
        Ok(None)
    }

    fn quasi_serial(&self) -> Option<String> {
        for s in [Sort::One, Sort::D] {
            for u in 0..self.n(s) {
                if self.f.incidence_row(s, u).is_empty() {
                    return Some(format!("{} has no I-neighbour", self.p(s, u)));
                }
            }
        }
        None
    }

    fn classical(&self) -> Option<String> {
        if self.f.names(Sort::One) != self.f.names(Sort::D) {
            return Some("W1 and W∂ differ".into());
        }
        for x in 0..self.n(Sort::One) {
            if self.f.incidence_row(Sort::One, x) != PointSet::singleton(x) {
                return Some(format!("I-row of {} is not {{{}}}", self.p(Sort::One, x), self.p(Sort::One, x)));
            }
        }
        None
    }

    /// All sections of R′≤ are Galois, where u R≤ x z iff x ≤ u and z ≤ u.
    fn upper_bound_sections(&self) -> Option<String> {
        let n1 = self.n(Sort::One);
        let nd = self.n(Sort::D);
        let dual = |x: usize, z: usize| {
            let ub = self.f.gamma(Sort::One, x).inter(self.f.gamma(Sort::One, z));
            self.f.galois(Sort::One, ub)
        };
        for x in 0..n1 {
            for z in 0..n1 {
                let sec = dual(x, z);
                if !self.f.is_stable(Sort::D, sec) {
                    return Some(format!("R'≤{}{} not co-stable", self.p(Sort::One, x), self.p(Sort::One, z)));
                }
            }
        }
        for y in 0..nd {
            for z in 0..n1 {
                let first: PointSet = (0..n1).filter(|&x| dual(x, z).contains(y)).collect();
                if !self.f.is_stable(Sort::One, first) {
                    return Some(format!("{}R'≤[ ]{} not stable", self.p(Sort::D, y), self.p(Sort::One, z)));
                }
                let second: PointSet = (0..n1).filter(|&x| dual(z, x).contains(y)).collect();
                if !self.f.is_stable(Sort::One, second) {
                    return Some(format!("{}R'≤{}[ ] not stable", self.p(Sort::D, y), self.p(Sort::One, z)));
                }
            }
        }
        None
    }

    fn distributive_lattice(&self) -> Result<Option<String>, FrameError> {
        let sets = self.f.stable_sets(Sort::One)?;
        for &a in &sets {
            for &b in &sets {
                for &c in &sets {
                    let lhs = a.inter(self.f.join(Sort::One, b, c));
                    let rhs = self.f.join(Sort::One, a.inter(b), a.inter(c));
                    if lhs != rhs {
                        return Ok(Some(format!(
                            "A={}, B={}, C={}",
                            self.f.set_names(Sort::One, a),
                            self.f.set_names(Sort::One, b),
                            self.f.set_names(Sort::One, c)
                        )));
                    }
                }
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::Relation;

    #[test]
    fn class_names_round_trip() {
        for c in ClassId::ALL {
            assert_eq!(ClassId::parse(c.as_str()), Some(c));
        }
    }

    #[test]
    fn classical_point_with_empty_t_fails_unit() {
        let f = SortedFrame::classical(vec!["w".into()])
            .unwrap()
            .with_unit(PointSet::full(1))
            .with_relation(Relation::empty(RelName::T, 1, 1))
            .unwrap();
        let rep = check_frame_class(&f, ClassId::PU).unwrap();
        assert!(rep.record("F1(T)").unwrap().pass);
        let u = rep.record("U").unwrap();
        assert!(!u.pass);
        assert!(u.witness.as_ref().unwrap().contains("x=w, v=w"));
    }

    #[test]
    fn missing_unit_is_an_error() {
        let f = SortedFrame::classical(vec!["w".into()])
            .unwrap()
            .with_relation(Relation::empty(RelName::T, 1, 1))
            .unwrap();
        assert_eq!(check_frame_class(&f, ClassId::PU), Err(FrameError::MissingRelation("U")));
    }

    #[test]
    fn upward_closed_relation_breaks_monotonicity() {
        // x1 < x0 in the specialization order
        let f = SortedFrame::numbered(2, 1, vec![PointSet::EMPTY, PointSet::singleton(0)]).unwrap();
        assert!(f.leq(Sort::One, 1, 0));
        let mut r = Relation::empty(RelName::R, 2, 2);
        r.insert(0, 0, 0);
        let f = f.with_relation(r).unwrap();
        assert!(check_axiom(&f, "M(R)").unwrap().is_some());
    }
}
