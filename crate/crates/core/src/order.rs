//! Finite ordered algebras: implicative posets, semilattices, lattices and
//! residuated (Lambek) structures, with filter/ideal enumeration and the point
//! operators induced on filters and ideals.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::bitset::PointSet;
use crate::limits;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Poset,
    MeetSemilattice,
    Lattice,
}

impl Kind {
    pub fn parse(s: &str) -> Option<Kind> {
        match s {
            "poset" => Some(Kind::Poset),
            "meet-semilattice" | "semilattice" => Some(Kind::MeetSemilattice),
            "lattice" => Some(Kind::Lattice),
            _ => None,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Poset => "poset",
            Kind::MeetSemilattice => "meet-semilattice",
            Kind::Lattice => "lattice",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("carrier is empty")]
    EmptyCarrier,
    #[error("carrier has {size} elements, above the limit of {limit} (raise NLOGIC_MAX_CARRIER)")]
    CarrierTooLarge { size: usize, limit: usize },
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("order is not antisymmetric: {a} <= {b} and {b} <= {a}")]
    AntisymmetryViolation { a: String, b: String },
    #[error("order has no top element")]
    NotBoundedAbove,
    #[error("declared {field} `{declared}` but the order gives `{actual}`")]
    BoundMismatch {
        field: &'static str,
        declared: String,
        actual: String,
    },
    #[error("declared kind {declared} but the order only supports {actual}: {reason}")]
    KindViolation {
        declared: Kind,
        actual: Kind,
        reason: String,
    },
    #[error("table `{op}` is not total: no entry for ({a},{b})")]
    PartialTable { op: &'static str, a: String, b: String },
    #[error("table `{op}` has conflicting entries for ({a},{b})")]
    ConflictingEntry { op: &'static str, a: String, b: String },
    #[error("operator axiom `{axiom}` fails at {witness}")]
    OperatorTypeViolation { axiom: String, witness: String },
    #[error("unit axiom fails at {witness}")]
    UnitAxiomViolation { witness: String },
    #[error("residuation fails at {witness}")]
    ResiduationViolation { witness: String },
    #[error("{0} is not a filter")]
    NotAFilter(String),
    #[error("{0} is not an ideal")]
    NotAnIdeal(String),
    #[error("operation `{0}` is not defined on this algebra")]
    MissingOperation(&'static str),
}

/// A total binary operation on an `n`-element carrier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    n: usize,
    data: Vec<usize>,
}

impl Table {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> usize) -> Table {
        let mut data = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                data.push(f(a, b));
            }
        }
        Table { n, data }
    }

    pub fn get(&self, a: usize, b: usize) -> usize {
        self.data[a * self.n + b]
    }
}

/// Unvalidated algebra description, as read from a file.
#[derive(Clone, Debug, Default)]
pub struct RawAlgebra {
    pub elements: Vec<String>,
    pub order: Vec<(String, String)>,
    pub kind: Option<Kind>,
    pub unit: Option<String>,
    pub top: Option<String>,
    pub bottom: Option<String>,
    pub imp: Vec<(String, String, String)>,
    pub prod: Option<Vec<(String, String, String)>>,
    pub limp: Option<Vec<(String, String, String)>>,
}

#[derive(Clone, Debug)]
pub struct OrderedAlgebra {
    names: Vec<String>,
    /// `up[a]` = { b : a <= b }
    up: Vec<PointSet>,
    /// `down[a]` = { b : b <= a }
    down: Vec<PointSet>,
    kind: Kind,
    unit: Option<usize>,
    top: usize,
    bottom: Option<usize>,
    imp: Table,
    prod: Option<Table>,
    /// `limp.get(b, a)` is b <- a.
    limp: Option<Table>,
    meet: Option<Table>,
    join: Option<Table>,
}

impl OrderedAlgebra {
    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn carrier(&self) -> PointSet {
        PointSet::full(self.size())
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(b)
    }

    pub fn upset_of(&self, a: usize) -> PointSet {
        self.up[a]
    }

    pub fn downset_of(&self, a: usize) -> PointSet {
        self.down[a]
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn unit(&self) -> Option<usize> {
        self.unit
    }

    /// The declared unit, or the top element when none is declared (integral case).
    pub fn effective_unit(&self) -> usize {
        self.unit.unwrap_or(self.top)
    }

    pub fn is_integral(&self) -> bool {
        self.effective_unit() == self.top
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn bottom(&self) -> Option<usize> {
        self.bottom
    }

    pub fn imp(&self, a: usize, b: usize) -> usize {
        self.imp.get(a, b)
    }

    pub fn has_prod(&self) -> bool {
        self.prod.is_some()
    }

    pub fn has_limp(&self) -> bool {
        self.limp.is_some()
    }

    pub fn prod(&self, a: usize, b: usize) -> Option<usize> {
        self.prod.as_ref().map(|t| t.get(a, b))
    }

    /// b <- a
    pub fn limp(&self, b: usize, a: usize) -> Option<usize> {
        self.limp.as_ref().map(|t| t.get(b, a))
    }

    pub fn meet(&self, a: usize, b: usize) -> Option<usize> {
        self.meet.as_ref().map(|t| t.get(a, b))
    }

    pub fn join(&self, a: usize, b: usize) -> Option<usize> {
        self.join.as_ref().map(|t| t.get(a, b))
    }

    pub fn set_names(&self, s: PointSet) -> String {
        let items: Vec<&str> = s.iter().map(|i| self.name(i)).collect();
        format!("{{{}}}", items.join(","))
    }

    pub fn is_associative(&self) -> bool {
        let Some(p) = &self.prod else { return false };
        let n = self.size();
        (0..n).all(|a| {
            (0..n).all(|b| (0..n).all(|c| p.get(a, p.get(b, c)) == p.get(p.get(a, b), c)))
        })
    }

    pub fn is_commutative(&self) -> bool {
        let Some(p) = &self.prod else { return false };
        let n = self.size();
        (0..n).all(|a| (0..n).all(|b| p.get(a, b) == p.get(b, a)))
    }

    /// Serializes into the text format accepted by [`parse_algebra`].
    pub fn to_text(&self) -> String {
        let n = self.size();
        let mut out = String::new();
        out.push_str(&format!("elements: {}\n", self.names.join(" ")));
        let mut covers = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && self.leq(a, b) {
                    let between = (0..n).any(|c| c != a && c != b && self.leq(a, c) && self.leq(c, b));
                    if !between {
                        covers.push(format!("{}<={}", self.name(a), self.name(b)));
                    }
                }
            }
        }
        out.push_str(&format!("order: {}\n", covers.join(" ")));
        out.push_str(&format!("kind: {}\n", self.kind));
        if let Some(e) = self.unit {
            out.push_str(&format!("unit: {}\n", self.name(e)));
        }
        let table = |label: &str, t: &Table| {
            let mut line = format!("{label}:");
            for a in 0..n {
                for b in 0..n {
                    line.push_str(&format!(" ({},{})={}", self.name(a), self.name(b), self.name(t.get(a, b))));
                }
            }
            line.push('\n');
            line
        };
        out.push_str(&table("imp", &self.imp));
        if let Some(p) = &self.prod {
            out.push_str(&table("prod", p));
        }
        if let Some(l) = &self.limp {
            out.push_str(&table("limp", l));
        }
        out
    }

    // ----- filters, ideals, point operators -----

    pub fn up_closure(&self, s: PointSet) -> PointSet {
        s.iter().fold(PointSet::EMPTY, |acc, a| acc.union(self.up[a]))
    }

    pub fn down_closure(&self, s: PointSet) -> PointSet {
        s.iter().fold(PointSet::EMPTY, |acc, a| acc.union(self.down[a]))
    }

    pub fn is_filter(&self, s: PointSet) -> bool {
        !s.is_empty()
            && self.up_closure(s) == s
            && s.iter().all(|a| s.iter().all(|b| self.down[a].inter(self.down[b]).intersects(s)))
    }

    pub fn is_ideal(&self, s: PointSet) -> bool {
        !s.is_empty()
            && self.down_closure(s) == s
            && s.iter().all(|a| s.iter().all(|b| self.up[a].inter(self.up[b]).intersects(s)))
    }

    /// x ⊳ v: down-closure of { a→b : a∈x, b∈v }.
    pub fn triangle(&self, x: PointSet, v: PointSet) -> Result<PointSet, AlgebraError> {
        self.require_filter(x)?;
        self.require_ideal(v)?;
        let mut gen = PointSet::EMPTY;
        for a in x.iter() {
            for b in v.iter() {
                gen.insert(self.imp(a, b));
            }
        }
        Ok(self.down_closure(gen))
    }

    /// v ⊲ x: down-closure of { b←a : a∈x, b∈v }.
    pub fn left_triangle(&self, v: PointSet, x: PointSet) -> Result<PointSet, AlgebraError> {
        let limp = self.limp.as_ref().ok_or(AlgebraError::MissingOperation("<-"))?;
        self.require_ideal(v)?;
        self.require_filter(x)?;
        let mut gen = PointSet::EMPTY;
        for a in x.iter() {
            for b in v.iter() {
                gen.insert(limp.get(b, a));
            }
        }
        Ok(self.down_closure(gen))
    }

    /// x ∘ z: up-closure of { a∘b : a∈x, b∈z }.
    pub fn fuse(&self, x: PointSet, z: PointSet) -> Result<PointSet, AlgebraError> {
        let prod = self.prod.as_ref().ok_or(AlgebraError::MissingOperation("*"))?;
        self.require_filter(x)?;
        self.require_filter(z)?;
        let mut gen = PointSet::EMPTY;
        for a in x.iter() {
            for b in z.iter() {
                gen.insert(prod.get(a, b));
            }
        }
        Ok(self.up_closure(gen))
    }

    fn require_filter(&self, x: PointSet) -> Result<(), AlgebraError> {
        if self.is_filter(x) {
            Ok(())
        } else {
            Err(AlgebraError::NotAFilter(self.set_names(x)))
        }
    }

    fn require_ideal(&self, v: PointSet) -> Result<(), AlgebraError> {
        if self.is_ideal(v) {
            Ok(())
        } else {
            Err(AlgebraError::NotAnIdeal(self.set_names(v)))
        }
    }
}

/// A filter or ideal together with its generator when principal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cone {
    pub members: PointSet,
    pub generator: Option<usize>,
}

/// Filters (or ideals) of a finite algebra.
///
/// A finite nonempty directed set has a least (greatest) element, so apart from
/// the optional empty member every filter is principal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeSet {
    pub members: Vec<Cone>,
}

impl ConeSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn position(&self, s: PointSet) -> Option<usize> {
        self.members.iter().position(|c| c.members == s)
    }
}

pub type FilterSet = ConeSet;
pub type IdealSet = ConeSet;

pub fn enumerate_filters(alg: &OrderedAlgebra, allow_empty: bool) -> FilterSet {
    let mut members: Vec<Cone> = (0..alg.size())
        .map(|a| Cone { members: alg.upset_of(a), generator: Some(a) })
        .collect();
    if allow_empty {
        members.push(Cone { members: PointSet::EMPTY, generator: None });
    }
    ConeSet { members }
}

pub fn enumerate_ideals(alg: &OrderedAlgebra, allow_empty: bool) -> IdealSet {
    let mut members: Vec<Cone> = (0..alg.size())
        .map(|a| Cone { members: alg.downset_of(a), generator: Some(a) })
        .collect();
    if allow_empty {
        members.push(Cone { members: PointSet::EMPTY, generator: None });
    }
    ConeSet { members }
}

// ----- validation -----

pub fn validate_algebra(raw: &RawAlgebra) -> Result<OrderedAlgebra, AlgebraError> {
    let n = raw.elements.len();
    if n == 0 {
        return Err(AlgebraError::EmptyCarrier);
    }
    let limit = limits::max_algebra();
    if n > limit {
        return Err(AlgebraError::CarrierTooLarge { size: n, limit });
    }
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, e) in raw.elements.iter().enumerate() {
        if index.insert(e.as_str(), i).is_some() {
            return Err(AlgebraError::DuplicateElement(e.clone()));
        }
    }
    let lookup = |s: &str| index.get(s).copied().ok_or_else(|| AlgebraError::UnknownElement(s.to_string()));

    let mut le = vec![vec![false; n]; n];
    for (i, row) in le.iter_mut().enumerate() {
        row[i] = true;
    }
    for (a, b) in &raw.order {
        le[lookup(a)?][lookup(b)?] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if le[i][k] {
                for j in 0..n {
                    if le[k][j] {
                        le[i][j] = true;
                    }
                }
            }
        }
    }
    for a in 0..n {
        for b in (a + 1)..n {
            if le[a][b] && le[b][a] {
                return Err(AlgebraError::AntisymmetryViolation {
                    a: raw.elements[a].clone(),
                    b: raw.elements[b].clone(),
                });
            }
        }
    }
    let up: Vec<PointSet> = (0..n).map(|a| (0..n).filter(|&b| le[a][b]).collect()).collect();
    let down: Vec<PointSet> = (0..n).map(|a| (0..n).filter(|&b| le[b][a]).collect()).collect();
    let name = |i: usize| raw.elements[i].clone();

    let top = (0..n).find(|&t| down[t] == PointSet::full(n)).ok_or(AlgebraError::NotBoundedAbove)?;
    let bottom = (0..n).find(|&b| up[b] == PointSet::full(n));
    if let Some(t) = &raw.top {
        if lookup(t)? != top {
            return Err(AlgebraError::BoundMismatch { field: "top", declared: t.clone(), actual: name(top) });
        }
    }
    if let Some(b) = &raw.bottom {
        let declared = lookup(b)?;
        if Some(declared) != bottom {
            return Err(AlgebraError::BoundMismatch {
                field: "bottom",
                declared: b.clone(),
                actual: bottom.map(name).unwrap_or_else(|| "none".into()),
            });
        }
    }

    // greatest lower bound / least upper bound, when they exist
    let glb = |a: usize, b: usize| -> Option<usize> {
        let lower = down[a].inter(down[b]);
        lower.iter().find(|&c| lower.is_subset(down[c]))
    };
    let lub = |a: usize, b: usize| -> Option<usize> {
        let upper = up[a].inter(up[b]);
        upper.iter().find(|&c| upper.is_subset(up[c]))
    };
    let mut missing_meet = None;
    let mut missing_join = None;
    for a in 0..n {
        for b in 0..n {
            if missing_meet.is_none() && glb(a, b).is_none() {
                missing_meet = Some((a, b));
            }
            if missing_join.is_none() && lub(a, b).is_none() {
                missing_join = Some((a, b));
            }
        }
    }
    let order_kind = match (missing_meet, missing_join) {
        (None, None) => Kind::Lattice,
        (None, Some(_)) => Kind::MeetSemilattice,
        _ => Kind::Poset,
    };
    if let Some(declared) = raw.kind {
        if declared > order_kind {
            let (a, b, what) = match (missing_meet, missing_join) {
                (Some((a, b)), _) => (a, b, "meet"),
                (None, Some((a, b))) => (a, b, "join"),
                _ => unreachable!(),
            };
            return Err(AlgebraError::KindViolation {
                declared,
                actual: order_kind,
                reason: format!("{} and {} have no {}", name(a), name(b), what),
            });
        }
    }
    let meet = (order_kind >= Kind::MeetSemilattice).then(|| Table::from_fn(n, |a, b| glb(a, b).unwrap()));
    let join = (order_kind == Kind::Lattice).then(|| Table::from_fn(n, |a, b| lub(a, b).unwrap()));

    let build = |op: &'static str, entries: &[(String, String, String)]| -> Result<Table, AlgebraError> {
        let mut cells: Vec<Option<usize>> = vec![None; n * n];
        for (a, b, c) in entries {
            let (ia, ib, ic) = (lookup(a)?, lookup(b)?, lookup(c)?);
            let cell = &mut cells[ia * n + ib];
            if let Some(prev) = *cell {
                if prev != ic {
                    return Err(AlgebraError::ConflictingEntry { op, a: a.clone(), b: b.clone() });
                }
            }
            *cell = Some(ic);
        }
        let mut data = Vec::with_capacity(n * n);
        for (k, c) in cells.into_iter().enumerate() {
            match c {
                Some(v) => data.push(v),
                None => return Err(AlgebraError::PartialTable { op, a: name(k / n), b: name(k % n) }),
            }
        }
        Ok(Table { n, data })
    };
    let imp = build("imp", &raw.imp)?;
    let prod = raw.prod.as_deref().map(|e| build("prod", e)).transpose()?;
    let limp = raw.limp.as_deref().map(|e| build("limp", e)).transpose()?;
    let unit = raw.unit.as_deref().map(lookup).transpose()?;

    let lev = |a: usize, b: usize| le[a][b];
    let type_err = |axiom: &str, witness: String| AlgebraError::OperatorTypeViolation { axiom: axiom.into(), witness };

    // -> : antitone in the first argument, monotone in the second
    for a in 0..n {
        for a2 in 0..n {
            if !lev(a, a2) {
                continue;
            }
            for b in 0..n {
                if !lev(imp.get(a2, b), imp.get(a, b)) {
                    return Err(type_err("-> antitone in argument 1", format!("{} <= {}, b={}", name(a), name(a2), name(b))));
                }
                if !lev(imp.get(b, a), imp.get(b, a2)) {
                    return Err(type_err("-> monotone in argument 2", format!("a={}, {} <= {}", name(b), name(a), name(a2))));
                }
            }
        }
    }
    if let Some(p) = &prod {
        for a in 0..n {
            for a2 in 0..n {
                if !lev(a, a2) {
                    continue;
                }
                for b in 0..n {
                    if !lev(p.get(a, b), p.get(a2, b)) || !lev(p.get(b, a), p.get(b, a2)) {
                        return Err(type_err("* monotone", format!("{} <= {}, other={}", name(a), name(a2), name(b))));
                    }
                }
            }
        }
    }
    if let Some(l) = &limp {
        for a in 0..n {
            for a2 in 0..n {
                if !lev(a, a2) {
                    continue;
                }
                for b in 0..n {
                    if !lev(l.get(a, b), l.get(a2, b)) {
                        return Err(type_err("<- monotone in argument 1", format!("{} <= {}, a={}", name(a), name(a2), name(b))));
                    }
                    if !lev(l.get(b, a2), l.get(b, a)) {
                        return Err(type_err("<- antitone in argument 2", format!("b={}, {} <= {}", name(b), name(a), name(a2))));
                    }
                }
            }
        }
    }

    let e = unit.unwrap_or(top);
    for a in 0..n {
        for b in 0..n {
            if lev(a, b) != lev(e, imp.get(a, b)) {
                return Err(AlgebraError::UnitAxiomViolation {
                    witness: format!(
                        "a={}, b={}: a<=b is {}, {}<=a->b={} is {}",
                        name(a),
                        name(b),
                        lev(a, b),
                        name(e),
                        name(imp.get(a, b)),
                        lev(e, imp.get(a, b))
                    ),
                });
            }
        }
    }
    if let (Some(p), Some(e)) = (&prod, unit) {
        for a in 0..n {
            if p.get(e, a) != a || p.get(a, e) != a {
                return Err(AlgebraError::UnitAxiomViolation { witness: format!("{} is not a two-sided unit for * at {}", name(e), name(a)) });
            }
        }
    }
    if let Some(p) = &prod {
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let fused = lev(p.get(a, b), c);
                    if fused != lev(b, imp.get(a, c)) {
                        return Err(AlgebraError::ResiduationViolation {
                            witness: format!("a={}, b={}, c={}: a*b<=c vs b<=a->c", name(a), name(b), name(c)),
                        });
                    }
                    if let Some(l) = &limp {
                        if fused != lev(a, l.get(c, b)) {
                            return Err(AlgebraError::ResiduationViolation {
                                witness: format!("a={}, b={}, c={}: a*b<=c vs a<=c<-b", name(a), name(b), name(c)),
                            });
                        }
                    }
                }
            }
        }
    } else if limp.is_some() {
        return Err(AlgebraError::MissingOperation("* (required alongside <-)"));
    }

    // kind-specific implication laws; an undeclared kind is downgraded instead of rejected
    let mut kind = order_kind;
    if let Some(m) = &meet {
        let mut fail = None;
        'outer: for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if imp.get(a, m.get(b, c)) != m.get(imp.get(a, b), imp.get(a, c)) {
                        fail = Some(format!("a={}, b={}, c={}", name(a), name(b), name(c)));
                        break 'outer;
                    }
                }
            }
        }
        if let Some(w) = fail {
            if raw.kind.is_some_and(|k| k >= Kind::MeetSemilattice) {
                return Err(type_err("a->(b&c) = (a->b)&(a->c)", w));
            }
            kind = Kind::Poset;
        }
    }
    if kind == Kind::Lattice {
        let (m, j) = (meet.as_ref().unwrap(), join.as_ref().unwrap());
        let mut fail = None;
        'outer2: for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if imp.get(j.get(a, c), b) != m.get(imp.get(a, b), imp.get(c, b)) {
                        fail = Some(format!("a={}, c={}, b={}", name(a), name(c), name(b)));
                        break 'outer2;
                    }
                }
            }
        }
        if let Some(w) = fail {
            if raw.kind == Some(Kind::Lattice) {
                return Err(type_err("(a|c)->b = (a->b)&(c->b)", w));
            }
            kind = Kind::MeetSemilattice;
        }
    }

    Ok(OrderedAlgebra {
        names: raw.elements.clone(),
        up,
        down,
        kind,
        unit,
        top,
        bottom,
        imp,
        prod,
        limp,
        meet: if kind >= Kind::MeetSemilattice { meet } else { None },
        join: if kind == Kind::Lattice { join } else { None },
    })
}

// ----- text format -----

/// Parses the line-oriented algebra format.
///
/// ```text
/// elements: 0 a 1
/// order: 0<=a a<=1
/// kind: lattice
/// unit: 1
/// imp: (0,0)=1 (0,a)=1 ...
/// prod: (a,b)=c ...        # optional
/// limp: (b,a)=c ...        # optional, entry (b,a)=c means b<-a = c
/// ```
pub fn parse_algebra(text: &str) -> Result<RawAlgebra, AlgebraError> {
    let mut raw = RawAlgebra::default();
    let mut seen_elements = false;
    for (ln, line) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| AlgebraError::Parse { line: line_no, msg };
        let (key, value) = line.split_once(':').ok_or_else(|| err(format!("expected `key: value`, got `{line}`")))?;
        let value = value.trim();
        match key.trim() {
            "elements" => {
                seen_elements = true;
                raw.elements.extend(value.split_whitespace().map(str::to_string));
            }
            "order" => {
                for tok in value.split_whitespace() {
                    let parts: Vec<&str> = tok.split("<=").collect();
                    if parts.len() < 2 || parts.iter().any(|p| p.is_empty()) {
                        return Err(err(format!("bad order item `{tok}`")));
                    }
                    for w in parts.windows(2) {
                        raw.order.push((w[0].to_string(), w[1].to_string()));
                    }
                }
            }
            "kind" => raw.kind = Some(Kind::parse(value).ok_or_else(|| err(format!("unknown kind `{value}`")))?),
            "unit" => raw.unit = Some(single_name(value).map_err(err)?),
            "top" => raw.top = Some(single_name(value).map_err(err)?),
            "bottom" => raw.bottom = Some(single_name(value).map_err(err)?),
            "imp" => raw.imp.extend(parse_entries(value).map_err(err)?),
            "prod" => raw.prod.get_or_insert_with(Vec::new).extend(parse_entries(value).map_err(err)?),
            "limp" => raw.limp.get_or_insert_with(Vec::new).extend(parse_entries(value).map_err(err)?),
            other => return Err(err(format!("unknown key `{other}`"))),
        }
    }
    if !seen_elements {
        return Err(AlgebraError::Parse { line: 0, msg: "missing `elements:` line".into() });
    }
    Ok(raw)
}

pub fn load_algebra(text: &str) -> Result<OrderedAlgebra, AlgebraError> {
    validate_algebra(&parse_algebra(text)?)
}

fn single_name(value: &str) -> Result<String, String> {
    let mut it = value.split_whitespace();
    match (it.next(), it.next()) {
        (Some(v), None) => Ok(v.to_string()),
        _ => Err(format!("expected one element name, got `{value}`")),
    }
}

fn parse_entries(value: &str) -> Result<Vec<(String, String, String)>, String> {
    let compact: String = value.chars().filter(|c| !c.is_whitespace()).collect();
    let mut out = Vec::new();
    let mut rest = compact.as_str();
    while !rest.is_empty() {
        let body = rest.strip_prefix('(').ok_or_else(|| format!("expected `(` at `{rest}`"))?;
        let close = body.find(')').ok_or("missing `)`")?;
        let (a, b) = body[..close].split_once(',').ok_or("expected `(a,b)`")?;
        let after = body[close + 1..].strip_prefix('=').ok_or("expected `=` after `)`")?;
        let end = after.find('(').unwrap_or(after.len());
        let c = &after[..end];
        if a.is_empty() || b.is_empty() || c.is_empty() {
            return Err(format!("incomplete entry near `{}`", &rest[..rest.len().min(16)]));
        }
        out.push((a.to_string(), b.to_string(), c.to_string()));
        rest = &after[end..];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CHAIN2: &str = "elements: 0 1\norder: 0<=1\nkind: lattice\nunit: 1\nimp: (0,0)=1 (0,1)=1 (1,0)=0 (1,1)=1\n";

    #[test]
    fn boolean_two_chain() {
        let alg = load_algebra(CHAIN2).unwrap();
        assert_eq!(alg.kind(), Kind::Lattice);
        assert_eq!(alg.top(), 1);
        assert_eq!(alg.bottom(), Some(0));
        let f = enumerate_filters(&alg, false);
        assert_eq!(f.len(), 2);
        assert_eq!(f.members[1].members.to_vec(), vec![1]);
    }

    #[test]
    fn chain_order_closure() {
        let alg = load_algebra(
            "elements: 0 a 1\norder: 0<=a<=1\nimp: (0,0)=1 (0,a)=1 (0,1)=1 (a,0)=0 (a,a)=1 (a,1)=1 (1,0)=0 (1,a)=a (1,1)=1\n",
        )
        .unwrap();
        assert!(alg.leq(0, 2));
        assert_eq!(alg.kind(), Kind::Lattice);
    }

    #[test]
    fn cycle_rejected() {
        let r = load_algebra("elements: a b\norder: a<=b b<=a\nimp: (a,a)=a (a,b)=a (b,a)=a (b,b)=a\n");
        assert!(matches!(r, Err(AlgebraError::AntisymmetryViolation { .. })));
    }

    #[test]
    fn partial_table_rejected() {
        let r = load_algebra("elements: 0 1\norder: 0<=1\nimp: (0,0)=1 (0,1)=1 (1,0)=0\n");
        assert!(matches!(r, Err(AlgebraError::PartialTable { .. })));
    }

    #[test]
    fn unknown_key_rejected() {
        let r = parse_algebra("elements: 0\nfoo: 1\n");
        assert!(matches!(r, Err(AlgebraError::Parse { line: 2, .. })));
    }

    #[test]
    fn point_operator_on_two_chain() {
        let alg = load_algebra(CHAIN2).unwrap();
        let x = PointSet::full(2);
        let v = PointSet::singleton(0);
        assert_eq!(alg.triangle(x, v).unwrap(), PointSet::full(2));
        assert!(matches!(alg.triangle(PointSet::singleton(0), v), Err(AlgebraError::NotAFilter(_))));
    }

    #[test]
    fn text_round_trip() {
        let alg = load_algebra(CHAIN2).unwrap();
        let again = load_algebra(&alg.to_text()).unwrap();
        assert_eq!(again.to_text(), alg.to_text());
    }
}
