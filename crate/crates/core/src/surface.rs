//! Pants-decomposition graphs with Fenchel–Nielsen data.
//!
//! Cells are generated on demand from a template, so infinite surfaces cost
//! nothing until a finite window of them is inspected. Every generator is a
//! pure function of the cell id.
//!
//! Template topology:
//!
//! * `Flute`: cells `1, 2, …`; cell `i` has slots `(C_{i−1}, C_i, cusp)` and
//!   cell 1 starts with a cusp.
//! * `Ladder`: cells `i ∈ ℤ` with slots `(C_{i−1}, C_i, cusp)`.
//! * `Tripod`: a central cell `(C_1, C′_1, C″_1)` and three rays; ray cell `i`
//!   of family `F` has slots `(F_i, F_{i+1}, cusp)`.
//! * `FourHoledSphere`: cells `0 = (C_0, C_1, C_2)` and `1 = (C_0, C_3, C_4)`,
//!   core `C_0`, boundary geodesics `C_1 … C_4`.
//! * `Custom`: an explicit finite cell list.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use libm::pow;

use crate::error::{Error, Result};

/// The three curve families of the tripod; everything else lives in `C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    C,
    Prime,
    DoublePrime,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::C, Family::Prime, Family::DoublePrime];

    pub fn index(self) -> usize {
        match self {
            Family::C => 0,
            Family::Prime => 1,
            Family::DoublePrime => 2,
        }
    }

    pub fn from_index(i: usize) -> Family {
        Family::ALL[i % 3]
    }

    fn suffix(self) -> &'static str {
        match self {
            Family::C => "",
            Family::Prime => "'",
            Family::DoublePrime => "''",
        }
    }
}

/// Name of a pants curve, e.g. `C_3` or `C″_2`. Textual form: `3`, `2''`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CurveId {
    pub family: Family,
    pub index: i64,
}

impl CurveId {
    pub const fn c(index: i64) -> Self {
        CurveId { family: Family::C, index }
    }

    pub const fn new(family: Family, index: i64) -> Self {
        CurveId { family, index }
    }
}

impl fmt::Display for CurveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.index, self.family.suffix())
    }
}

impl FromStr for CurveId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (digits, family) = if let Some(d) = s.strip_suffix("''") {
            (d, Family::DoublePrime)
        } else if let Some(d) = s.strip_suffix('\'') {
            (d, Family::Prime)
        } else {
            (s, Family::C)
        };
        let index = digits.parse::<i64>().map_err(|_| Error::BadLiteral(String::from(s)))?;
        Ok(CurveId { family, index })
    }
}

/// Name of a pants cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellId {
    pub family: Family,
    pub index: i64,
}

impl CellId {
    pub const fn c(index: i64) -> Self {
        CellId { family: Family::C, index }
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}{}", self.index, self.family.suffix())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    Glued(CurveId),
    Boundary(CurveId),
    Cusp,
}

impl Slot {
    pub fn curve(&self) -> Option<CurveId> {
        match self {
            Slot::Glued(c) | Slot::Boundary(c) => Some(*c),
            Slot::Cusp => None,
        }
    }
}

/// A pair of pants with three cyclically ordered boundary slots.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cell {
    pub id: CellId,
    pub slots: [Slot; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Interior,
    Boundary,
}

/// The generator of a pants graph.
#[derive(Debug, Clone, PartialEq)]
pub enum TemplateKind {
    Flute,
    Ladder,
    Tripod,
    FourHoledSphere,
    Custom(Vec<Cell>),
}

impl TemplateKind {
    pub fn name(&self) -> &'static str {
        match self {
            TemplateKind::Flute => "flute",
            TemplateKind::Ladder => "ladder",
            TemplateKind::Tripod => "tripod",
            TemplateKind::FourHoledSphere => "four-holed-sphere",
            TemplateKind::Custom(_) => "custom",
        }
    }
}

/// Lazily generated pants decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct PantsGraph {
    kind: TemplateKind,
}

impl PantsGraph {
    pub fn new(kind: TemplateKind) -> Result<Self> {
        if let TemplateKind::Custom(cells) = &kind {
            validate_custom(cells)?;
        }
        Ok(PantsGraph { kind })
    }

    pub fn kind(&self) -> &TemplateKind {
        &self.kind
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.kind, TemplateKind::FourHoledSphere | TemplateKind::Custom(_))
    }

    pub fn cell(&self, id: CellId) -> Option<Cell> {
        use Slot::*;
        let glued = |f: Family, i: i64| Glued(CurveId::new(f, i));
        let slots = match &self.kind {
            TemplateKind::Flute => {
                if id.family != Family::C || id.index < 1 {
                    return None;
                }
                let first = if id.index == 1 { Cusp } else { glued(Family::C, id.index - 1) };
                [first, glued(Family::C, id.index), Cusp]
            }
            TemplateKind::Ladder => {
                if id.family != Family::C {
                    return None;
                }
                [glued(Family::C, id.index - 1), glued(Family::C, id.index), Cusp]
            }
            TemplateKind::Tripod => {
                if id.index == 0 && id.family == Family::C {
                    [glued(Family::C, 1), glued(Family::Prime, 1), glued(Family::DoublePrime, 1)]
                } else if id.index >= 1 {
                    [glued(id.family, id.index), glued(id.family, id.index + 1), Cusp]
                } else {
                    return None;
                }
            }
            TemplateKind::FourHoledSphere => match (id.family, id.index) {
                (Family::C, 0) => [glued(Family::C, 0), Boundary(CurveId::c(1)), Boundary(CurveId::c(2))],
                (Family::C, 1) => [glued(Family::C, 0), Boundary(CurveId::c(3)), Boundary(CurveId::c(4))],
                _ => return None,
            },
            TemplateKind::Custom(cells) => {
                return cells.iter().find(|c| c.id == id).cloned();
            }
        };
        Some(Cell { id, slots })
    }

    /// Every `(cell, slot)` carrying the curve: two for interior curves (possibly
    /// the same cell twice), one for boundary curves.
    pub fn incidences(&self, curve: CurveId) -> Option<Vec<(CellId, usize)>> {
        let out: Vec<(CellId, usize)> = match &self.kind {
            TemplateKind::Flute => {
                if curve.family != Family::C || curve.index < 1 {
                    return None;
                }
                alloc::vec![(CellId::c(curve.index), 1), (CellId::c(curve.index + 1), 0)]
            }
            TemplateKind::Ladder => {
                if curve.family != Family::C {
                    return None;
                }
                alloc::vec![(CellId::c(curve.index), 1), (CellId::c(curve.index + 1), 0)]
            }
            TemplateKind::Tripod => {
                if curve.index < 1 {
                    return None;
                }
                let ray = |i: i64| CellId { family: curve.family, index: i };
                if curve.index == 1 {
                    alloc::vec![(CellId::c(0), curve.family.index()), (ray(1), 0)]
                } else {
                    alloc::vec![(ray(curve.index - 1), 1), (ray(curve.index), 0)]
                }
            }
            TemplateKind::FourHoledSphere => match (curve.family, curve.index) {
                (Family::C, 0) => alloc::vec![(CellId::c(0), 0), (CellId::c(1), 0)],
                (Family::C, 1) => alloc::vec![(CellId::c(0), 1)],
                (Family::C, 2) => alloc::vec![(CellId::c(0), 2)],
                (Family::C, 3) => alloc::vec![(CellId::c(1), 1)],
                (Family::C, 4) => alloc::vec![(CellId::c(1), 2)],
                _ => return None,
            },
            TemplateKind::Custom(cells) => {
                let mut v = Vec::new();
                for cell in cells {
                    for (k, slot) in cell.slots.iter().enumerate() {
                        if slot.curve() == Some(curve) {
                            v.push((cell.id, k));
                        }
                    }
                }
                if v.is_empty() {
                    return None;
                }
                v
            }
        };
        Some(out)
    }

    pub fn curve_kind(&self, curve: CurveId) -> Option<CurveKind> {
        let inc = self.incidences(curve)?;
        let (cell, slot) = inc[0];
        match self.cell(cell)?.slots[slot] {
            Slot::Glued(_) => Some(CurveKind::Interior),
            Slot::Boundary(_) => Some(CurveKind::Boundary),
            Slot::Cusp => None,
        }
    }

    pub fn contains_curve(&self, curve: CurveId) -> bool {
        self.incidences(curve).is_some()
    }

    /// A deterministic finite sample of curve ids, `n` per family and direction
    /// for infinite templates and everything for finite ones.
    pub fn sample_curves(&self, n: i64) -> Vec<CurveId> {
        match &self.kind {
            TemplateKind::Flute => (1..=n).map(CurveId::c).collect(),
            TemplateKind::Ladder => (-n..=n).map(CurveId::c).collect(),
            TemplateKind::Tripod => Family::ALL
                .iter()
                .flat_map(|&f| (1..=n).map(move |i| CurveId::new(f, i)))
                .collect(),
            TemplateKind::FourHoledSphere => (0..=4).map(CurveId::c).collect(),
            TemplateKind::Custom(cells) => {
                let set: BTreeSet<CurveId> =
                    cells.iter().flat_map(|c| c.slots.iter().filter_map(|s| s.curve())).collect();
                set.into_iter().collect()
            }
        }
    }

    /// A deterministic finite sample of cell ids.
    pub fn sample_cells(&self, n: i64) -> Vec<CellId> {
        match &self.kind {
            TemplateKind::Flute => (1..=n).map(CellId::c).collect(),
            TemplateKind::Ladder => (-n..=n).map(CellId::c).collect(),
            TemplateKind::Tripod => {
                let mut v = alloc::vec![CellId::c(0)];
                for f in Family::ALL {
                    v.extend((1..=n).map(|i| CellId { family: f, index: i }));
                }
                v
            }
            TemplateKind::FourHoledSphere => alloc::vec![CellId::c(0), CellId::c(1)],
            TemplateKind::Custom(cells) => cells.iter().map(|c| c.id).collect(),
        }
    }

    /// The cell on the other side of `(cell, slot)`, with its slot.
    pub fn across(&self, cell: CellId, slot: usize) -> Option<(CellId, usize)> {
        let c = self.cell(cell)?;
        let Slot::Glued(curve) = c.slots[slot] else {
            return None;
        };
        let inc = self.incidences(curve)?;
        inc.into_iter().find(|&(id, k)| !(id == cell && k == slot))
    }
}

fn validate_custom(cells: &[Cell]) -> Result<()> {
    let mut count: BTreeMap<CurveId, (usize, usize)> = BTreeMap::new();
    let mut ids = BTreeSet::new();
    for cell in cells {
        if !ids.insert(cell.id) {
            return Err(Error::BadParameter(alloc::format!("duplicate cell {}", cell.id)));
        }
        for slot in &cell.slots {
            match slot {
                Slot::Glued(c) => count.entry(*c).or_default().0 += 1,
                Slot::Boundary(c) => count.entry(*c).or_default().1 += 1,
                Slot::Cusp => {}
            }
        }
    }
    for (curve, (glued, boundary)) in count {
        let ok = (glued == 2 && boundary == 0) || (glued == 0 && boundary == 1);
        if !ok {
            return Err(Error::BadParameter(alloc::format!(
                "curve {curve} must be glued exactly twice or be a single boundary"
            )));
        }
    }
    Ok(())
}

/// A deterministic real-valued rule on curve ids.
#[derive(Debug, Clone, PartialEq)]
pub enum Rule {
    Const(f64),
    /// `scale / max(|i|, 1)`.
    Harmonic { scale: f64 },
    /// `scale · max(|i|, 1)^e` with one exponent per family.
    Power { scale: f64, exponents: [f64; 3] },
    /// Explicit values with a fallback.
    Table { default: f64, entries: Vec<(CurveId, f64)> },
}

impl Rule {
    pub fn power(scale: f64, exponent: f64) -> Self {
        Rule::Power { scale, exponents: [exponent; 3] }
    }

    pub fn eval(&self, c: CurveId) -> f64 {
        let n = c.index.unsigned_abs().max(1) as f64;
        match self {
            Rule::Const(v) => *v,
            Rule::Harmonic { scale } => scale / n,
            Rule::Power { scale, exponents } => scale * pow(n, exponents[c.family.index()]),
            Rule::Table { default, entries } => {
                entries.iter().find(|(id, _)| *id == c).map(|(_, v)| *v).unwrap_or(*default)
            }
        }
    }
}

/// Fenchel–Nielsen lengths and twists. Twists are signed displacements along
/// the curve; `offsets` accumulate [`twist_deform`] edits.
#[derive(Debug, Clone, PartialEq)]
pub struct FnAssignment {
    pub lengths: Rule,
    pub twists: Rule,
    pub offsets: BTreeMap<CurveId, f64>,
}

impl FnAssignment {
    pub fn new(lengths: Rule, twists: Rule) -> Self {
        FnAssignment { lengths, twists, offsets: BTreeMap::new() }
    }

    pub fn length(&self, c: CurveId) -> Result<f64> {
        let length = self.lengths.eval(c);
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::BadLengthRule { curve: c, length });
        }
        Ok(length)
    }

    pub fn twist(&self, c: CurveId) -> f64 {
        self.twists.eval(c) + self.offsets.get(&c).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Surface {
    pub graph: PantsGraph,
    pub fn_data: FnAssignment,
    pub label: String,
}

impl Surface {
    pub fn length(&self, c: CurveId) -> Result<f64> {
        if !self.graph.contains_curve(c) {
            return Err(Error::UnknownCurve(c));
        }
        self.fn_data.length(c)
    }

    pub fn twist(&self, c: CurveId) -> f64 {
        self.fn_data.twist(c)
    }
}

/// Number of curves per family probed when validating a length rule.
pub const RULE_PROBE: i64 = 64;

pub fn build_template(kind: TemplateKind, lengths: Rule, twists: Rule) -> Result<Surface> {
    let label = String::from(kind.name());
    let graph = PantsGraph::new(kind)?;
    let fn_data = FnAssignment::new(lengths, twists);
    for c in graph.sample_curves(RULE_PROBE) {
        fn_data.length(c)?;
    }
    Ok(Surface { graph, fn_data, label })
}

/// Outcome of a two-sided length check `1/M ≤ ℓ ≤ M`.
#[derive(Debug, Clone, PartialEq)]
pub enum LengthBoundsCheck {
    Certificate { min: f64, max: f64, probed: usize },
    Violation { curve: CurveId, length: f64 },
}

pub fn fn_bounds_certificate(surface: &Surface, m: f64, probe: &[CurveId]) -> Result<LengthBoundsCheck> {
    if !(m > 1.0) {
        return Err(Error::BadParameter(alloc::format!("M = {m} must exceed 1")));
    }
    if probe.is_empty() {
        return Err(Error::BadParameter(String::from("empty probe set")));
    }
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for &c in probe {
        let l = surface.length(c)?;
        if l < 1.0 / m || l > m {
            return Ok(LengthBoundsCheck::Violation { curve: c, length: l });
        }
        lo = lo.min(l);
        hi = hi.max(l);
    }
    Ok(LengthBoundsCheck::Certificate { min: lo, max: hi, probed: probe.len() })
}

/// A finite union of cells with the FN data it needs. Slots glued to cells
/// outside the union are rewritten as boundary geodesics.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSurface {
    pub cells: Vec<Cell>,
    pub lengths: BTreeMap<CurveId, f64>,
    pub twists: BTreeMap<CurveId, f64>,
}

impl FiniteSurface {
    pub fn cell(&self, id: CellId) -> Option<&Cell> {
        self.cells.iter().find(|c| c.id == id)
    }

    pub fn boundary_curves(&self) -> Vec<CurveId> {
        self.cells
            .iter()
            .flat_map(|c| c.slots.iter())
            .filter_map(|s| match s {
                Slot::Boundary(c) => Some(*c),
                _ => None,
            })
            .collect()
    }

    pub fn incidences(&self, curve: CurveId) -> Vec<(CellId, usize)> {
        let mut v = Vec::new();
        for cell in &self.cells {
            for (k, s) in cell.slots.iter().enumerate() {
                if s.curve() == Some(curve) {
                    v.push((cell.id, k));
                }
            }
        }
        v
    }
}

pub fn finite_subsurface(surface: &Surface, core_curves: &[CurveId], radius: usize) -> Result<FiniteSurface> {
    if core_curves.is_empty() {
        return Err(Error::EmptyCore);
    }
    if radius == 0 {
        return Err(Error::BadParameter(String::from("radius must be at least 1")));
    }
    let graph = &surface.graph;
    let mut dist: BTreeMap<CellId, usize> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for &c in core_curves {
        let inc = graph.incidences(c).ok_or(Error::UnknownCurve(c))?;
        for (cell, _) in inc {
            if dist.insert(cell, 1).is_none() {
                queue.push_back(cell);
            }
        }
    }
    while let Some(cell) = queue.pop_front() {
        let d = dist[&cell];
        if d >= radius {
            continue;
        }
        for k in 0..3 {
            if let Some((next, _)) = graph.across(cell, k) {
                if let alloc::collections::btree_map::Entry::Vacant(e) = dist.entry(next) {
                    e.insert(d + 1);
                    queue.push_back(next);
                }
            }
        }
    }
    let mut cells = Vec::with_capacity(dist.len());
    let mut lengths = BTreeMap::new();
    let mut twists = BTreeMap::new();
    for &id in dist.keys() {
        let mut cell = graph.cell(id).ok_or_else(|| Error::BadParameter(alloc::format!("missing cell {id}")))?;
        for k in 0..3 {
            let slot = cell.slots[k];
            if let Slot::Glued(c) = slot {
                let inside = graph.across(id, k).map(|(other, _)| dist.contains_key(&other)).unwrap_or(false);
                if !inside {
                    cell.slots[k] = Slot::Boundary(c);
                } else {
                    twists.insert(c, surface.twist(c));
                }
            }
            if let Some(c) = slot.curve() {
                lengths.insert(c, surface.length(c)?);
            }
        }
        cells.push(cell);
    }
    Ok(FiniteSurface { cells, lengths, twists })
}

pub fn twist_deform(surface: &Surface, curve: CurveId, delta: f64) -> Result<Surface> {
    if !surface.graph.contains_curve(curve) {
        return Err(Error::UnknownCurve(curve));
    }
    let mut out = surface.clone();
    *out.fn_data.offsets.entry(curve).or_insert(0.0) += delta;
    Ok(out)
}

/// Symmetries of the infinite templates acting on curve and cell names.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphAutomorphism {
    /// `C_i ↦ C_{i+k}` on the ladder.
    LadderShift(i64),
    /// `C ↦ C′ ↦ C″ ↦ C`, applied `k` times, on the tripod.
    TripodRotation(u8),
}

impl GraphAutomorphism {
    pub fn map_curve(&self, c: CurveId) -> CurveId {
        match *self {
            GraphAutomorphism::LadderShift(k) => CurveId { family: c.family, index: c.index + k },
            GraphAutomorphism::TripodRotation(k) => {
                CurveId { family: Family::from_index(c.family.index() + k as usize), index: c.index }
            }
        }
    }

    pub fn map_cell(&self, c: CellId) -> CellId {
        match *self {
            GraphAutomorphism::LadderShift(k) => CellId { family: c.family, index: c.index + k },
            GraphAutomorphism::TripodRotation(k) => {
                if c.index == 0 {
                    c
                } else {
                    CellId { family: Family::from_index(c.family.index() + k as usize), index: c.index }
                }
            }
        }
    }

    pub fn inverse(&self) -> Self {
        match *self {
            GraphAutomorphism::LadderShift(k) => GraphAutomorphism::LadderShift(-k),
            GraphAutomorphism::TripodRotation(k) => GraphAutomorphism::TripodRotation((3 - k % 3) % 3),
        }
    }

    /// Slot permutation induced on a cell: image slot of slot `k`.
    pub fn map_slot(&self, cell: CellId, k: usize) -> usize {
        match *self {
            GraphAutomorphism::TripodRotation(r) if cell.index == 0 => (k + r as usize) % 3,
            _ => k,
        }
    }
}
