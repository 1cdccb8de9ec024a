//! Algebraic laws of the full complex algebra, checked by enumeration.

use super::{FrameError, RelName, Sort, SortedFrame};
use crate::bitset::PointSet;
use crate::report::Report;

/// A ⊙̄ F ⊆ C iff F ⊆ A ⇒ C iff A ⊆ C ⇐ F, over all stable triples.
pub fn residuation_bridge(f: &SortedFrame) -> Result<Report, FrameError> {
    let sets = f.stable_sets(Sort::One)?;
    let mut rep = Report::new("residuation on stable sets");
    rep.note(format!("{} stable sets", sets.len()));
    let mut t = rep.tally("A⊙̄F⊆C iff F⊆A⇒C iff A⊆C⇐F");
    for &a in &sets {
        for &x in &sets {
            let fused = f.fusion(a, x)?;
            for &c in &sets {
                let l = fused.is_subset(c);
                let m = x.is_subset(f.implication(a, c)?);
                let r = a.is_subset(f.left_implication(c, x)?);
                t.expect(l == m && m == r, || {
                    format!(
                        "A={}, F={}, C={} ({l}, {m}, {r})",
                        f.set_names(Sort::One, a),
                        f.set_names(Sort::One, x),
                        f.set_names(Sort::One, c)
                    )
                });
            }
        }
    }
    t.finish();
    Ok(rep)
}

/// The three associativity conditions for R.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Association {
    /// ∃u(xRz₁u ∧ uRz₂z₃) iff ∃u(uRz₁z₂ ∧ xRuz₃)
    pub constraint: bool,
    /// ⊙ associative on all subsets of W1
    pub powerset: bool,
    /// ⊙̄ associative on stable sets
    pub stable: bool,
}

impl Association {
    pub fn equivalent(&self) -> bool {
        self.constraint == self.powerset && self.powerset == self.stable
    }
}

pub fn association(f: &SortedFrame) -> Result<Association, FrameError> {
    let r = f.require(RelName::R)?;
    let n = f.size(Sort::One);
    let right = |z1: usize, z2: usize, z3: usize| -> PointSet {
        r.section(z2, z3).iter().fold(PointSet::EMPTY, |acc, u| acc.union(r.section(z1, u)))
    };
    let left = |z1: usize, z2: usize, z3: usize| -> PointSet {
        r.section(z1, z2).iter().fold(PointSet::EMPTY, |acc, u| acc.union(r.section(u, z3)))
    };
    let mut constraint = true;
    'pts: for z1 in 0..n {
        for z2 in 0..n {
            for z3 in 0..n {
                if left(z1, z2, z3) != right(z1, z2, z3) {
                    constraint = false;
                    break 'pts;
                }
            }
        }
    }
    let assoc = |sets: &[PointSet], op: &dyn Fn(PointSet, PointSet) -> Result<PointSet, FrameError>| {
        for &a in sets {
            for &b in sets {
                let ab = op(a, b)?;
                for &c in sets {
                    if op(a, op(b, c)?)? != op(ab, c)? {
                        return Ok(false);
                    }
                }
            }
        }
        Ok::<bool, FrameError>(true)
    };
    let all: Vec<PointSet> = PointSet::all_subsets(n).collect();
    let powerset = assoc(&all, &|a, b| f.image(RelName::R, a, b))?;
    let stable = assoc(&f.stable_sets(Sort::One)?, &|a, b| f.fusion(a, b))?;
    Ok(Association { constraint, powerset, stable })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::Relation;

    #[test]
    fn classical_point_with_identity_product() {
        let f = SortedFrame::classical(vec!["w".into()])
            .unwrap()
            .with_relation(Relation::from_sections(RelName::R, 1, 1, vec![PointSet::singleton(0)]))
            .unwrap();
        let a = association(&f).unwrap();
        assert!(a.constraint && a.powerset && a.stable);
    }

    #[test]
    fn non_associative_product_is_detected() {
        // 2 classical points, R(a,b) = {1} only when a = b = 0, otherwise {0}
        let f = SortedFrame::classical(vec!["a".into(), "b".into()]).unwrap();
        let secs = vec![PointSet::singleton(1), PointSet::singleton(0), PointSet::singleton(0), PointSet::singleton(0)];
        let f = f.with_relation(Relation::from_sections(RelName::R, 2, 2, secs)).unwrap();
        let a = association(&f).unwrap();
        assert!(!a.constraint && !a.powerset && !a.stable);
    }
}
