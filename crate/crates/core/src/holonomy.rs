//! `SL(2,ℝ)` holonomy of finite subsurfaces and exact geodesic lengths.
//!
//! Each pair of pants is realized by peripheral elements `P_0 P_1 P_2 = 1`
//! with traces `−2cosh(ℓ/2)` (parabolic for cusps). Every geodesic slot gets a
//! frame `N` with `N⁻¹ P N = −axial(ℓ)` that sends `i` to the midpoint of the
//! feet of the orthogeodesic from that boundary to itself around the next slot;
//! gluings identify two such frames through a quarter turn and a translation by
//! the twist. Cells are placed along a spanning tree; the remaining gluings
//! become extra conjugating letters.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use libm::{cosh, exp, fabs, log, sqrt};

use crate::curve::{Base, Curve};
use crate::error::{Error, Result};
use crate::hyp::{collar_half_width, Mat2};
use crate::surface::{finite_subsurface, CellId, CurveId, FiniteSurface, Slot, Surface};

/// Traces above this magnitude widen the reported interval.
pub const CONDITIONING_TRACE: f64 = 1e12;

/// Curves shorter than this count as short in collar decompositions.
pub const SHORT_THRESHOLD: f64 = 0.1;

/// A realized pair of pants in its own coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PantsFrame {
    /// Boundary lengths; `0` marks a cusp.
    pub lengths: [f64; 3],
    pub periph: [Mat2; 3],
    frames: [Option<Mat2>; 3],
}

fn frame_for_axis(u: Option<f64>, v: Option<f64>) -> Result<Mat2> {
    // Sends 0 ↦ u and ∞ ↦ v.
    let m = match (u, v) {
        (Some(u), Some(v)) if v > u => Mat2::new(v, u, 1.0, 1.0),
        (Some(u), Some(v)) => Mat2::new(v, -u, 1.0, -1.0),
        (Some(u), None) => Mat2::new(1.0, u, 0.0, 1.0),
        (None, Some(v)) => Mat2::new(v, -1.0, 1.0, 0.0),
        (None, None) => return Err(Error::NonHyperbolicInput(String::from("axis with both ends at infinity"))),
    };
    m.normalized()
}

/// Both endpoints of the axis of `m`, which must lie strictly on one side of 0.
fn endpoints(m: &Mat2) -> Result<(f64, f64)> {
    match m.fixed_points() {
        Some((Some(a), Some(b))) => Ok((a, b)),
        _ if m.discriminant() <= 0.0 => {
            // Parabolic: a double fixed point.
            if fabs(m.c) > 0.0 {
                let z = (m.a - m.d) / (2.0 * m.c);
                Ok((z, z))
            } else {
                Err(Error::NonHyperbolicInput(String::from("parabolic element fixing infinity")))
            }
        }
        _ => Err(Error::NonHyperbolicInput(String::from("axis through infinity"))),
    }
}

fn trace_of(length: f64) -> f64 {
    -2.0 * cosh(length / 2.0)
}

impl PantsFrame {
    /// Realize a pair of pants with the given boundary lengths (`0` = cusp),
    /// anchored at the shortest geodesic boundary.
    pub fn new(lengths: [f64; 3]) -> Result<Self> {
        Self::anchored(lengths, None)
    }

    /// As [`PantsFrame::new`], but the peripheral of slot `anchor` (if it is a
    /// geodesic) is exactly diagonal, which keeps its length accurate.
    pub fn anchored(lengths: [f64; 3], anchor: Option<usize>) -> Result<Self> {
        for &l in &lengths {
            if !(l >= 0.0) || !l.is_finite() {
                return Err(Error::NonHyperbolicInput(format!("boundary length {l}")));
            }
        }
        let shortest = (0..3)
            .filter(|&j| lengths[j] > 0.0)
            .min_by(|&i, &j| lengths[i].total_cmp(&lengths[j]));
        let Some(r) = anchor.filter(|&j| j < 3 && lengths[j] > 0.0).or(shortest) else {
            let x = Mat2::new(-1.0, -2.0, 0.0, -1.0);
            let y = Mat2::new(-1.0, 0.0, 2.0, -1.0);
            let z = (x * y).inv();
            return Ok(PantsFrame { lengths, periph: [x, y, z], frames: [None; 3] });
        };
        let (r1, r2) = ((r + 1) % 3, (r + 2) % 3);
        let x0 = -exp(lengths[r] / 2.0);
        let x = Mat2::new(x0, 0.0, 0.0, 1.0 / x0);
        let (ty, tz) = (trace_of(lengths[r1]), trace_of(lengths[r2]));
        let p = (tz - ty / x0) / (x0 - 1.0 / x0);
        let s = ty - p;
        let m = p * s - 1.0;
        if !(m < 0.0) {
            return Err(Error::NonHyperbolicInput(format!("pants {lengths:?}: q·r = {m}")));
        }
        let mut y = Mat2::new(p, 1.0, m, s);
        let (e0, e1) = endpoints(&y)?;
        if e0 + e1 > 0.0 {
            y = Mat2::new(p, -1.0, -m, s);
        }
        let z = (x * y).inv();
        let mut periph = [Mat2::IDENTITY; 3];
        periph[r] = x;
        periph[r1] = y;
        periph[r2] = z;
        let mut out = PantsFrame { lengths, periph, frames: [None; 3] };
        for (j, &l) in lengths.iter().enumerate() {
            if l > 0.0 {
                out.frames[j] = Some(out.mid_frame(j)?);
            }
        }
        Ok(out)
    }

    fn mid_frame(&self, j: usize) -> Result<Mat2> {
        let p = self.periph[j];
        let (u, v) = p.fixed_points().ok_or_else(|| Error::NonHyperbolicInput(format!("slot {j} not hyperbolic")))?;
        let a = frame_for_axis(u, v)?;
        let ai = a.inv();
        let next = ai * self.periph[(j + 1) % 3] * a;
        let local = ai * p * a;
        let around = next * local * next.inv();
        let (e0, e1) = endpoints(&around)?;
        if !(e0 * e1 > 0.0) {
            return Err(Error::NonHyperbolicInput(format!("slot {j}: crossing axes")));
        }
        let rho2 = e0 * e1;
        let pos_a = 0.5 * log(rho2);
        let x = 2.0 * rho2 / (e0 + e1);
        let y = sqrt((rho2 - x * x).max(0.0));
        let (bx, by) = next.inv().act(x, y);
        let pos_b = 0.5 * log(bx * bx + by * by);
        Ok(a * Mat2::axial(0.5 * (pos_a + pos_b)))
    }

    /// Frame of slot `j`: `N⁻¹ P_j N = −axial(ℓ_j)`.
    pub fn frame(&self, j: usize) -> Option<Mat2> {
        self.frames[j]
    }

    /// Position along slot `j` (in its frame) of the foot of the common
    /// perpendicular to slot `k`.
    pub fn seam_position(&self, j: usize, k: usize) -> Result<f64> {
        let n = self.frames[j].ok_or_else(|| Error::NonHyperbolicInput(format!("slot {j} is a cusp")))?;
        let (e0, e1) = endpoints(&(n.inv() * self.periph[k] * n))?;
        Ok(0.5 * log(e0 * e1))
    }
}

#[derive(Debug, Clone)]
struct PlacedCell {
    pants: PantsFrame,
    g: Mat2,
}

/// Holonomy of a finite subsurface.
#[derive(Debug, Clone)]
pub struct Representation {
    cells: Vec<PlacedCell>,
    index: BTreeMap<CellId, usize>,
    /// Gluings that close a cycle of the spanning tree: `Q` with
    /// `Q · P_second · Q⁻¹ = P_first⁻¹`.
    letters: BTreeMap<CurveId, Mat2>,
    incidences: BTreeMap<CurveId, Vec<(CellId, usize)>>,
}

fn gluing(
    ga: &Mat2,
    na: &Mat2,
    twist: f64,
    nb: &Mat2,
) -> Mat2 {
    *ga * *na * Mat2::axial(twist) * Mat2::QUARTER_TURN * nb.inv()
}

pub fn build_representation(fs: &FiniteSurface) -> Result<Representation> {
    build_representation_focused(fs, None)
}

/// Cells carrying `focus` are realized with that slot as anchor.
pub fn build_representation_focused(fs: &FiniteSurface, focus: Option<CurveId>) -> Result<Representation> {
    if fs.cells.is_empty() {
        return Err(Error::EmptyCore);
    }
    let length = |slot: &Slot| -> Result<f64> {
        match slot.curve() {
            None => Ok(0.0),
            Some(c) => fs.lengths.get(&c).copied().ok_or(Error::UnknownCurve(c)),
        }
    };
    let mut cells = Vec::with_capacity(fs.cells.len());
    let mut index = BTreeMap::new();
    for (n, cell) in fs.cells.iter().enumerate() {
        let lengths = [length(&cell.slots[0])?, length(&cell.slots[1])?, length(&cell.slots[2])?];
        let anchor = focus.and_then(|f| cell.slots.iter().position(|s| s.curve() == Some(f)));
        cells.push(PlacedCell { pants: PantsFrame::anchored(lengths, anchor)?, g: Mat2::IDENTITY });
        index.insert(cell.id, n);
    }
    let mut incidences: BTreeMap<CurveId, Vec<(CellId, usize)>> = BTreeMap::new();
    for cell in &fs.cells {
        for (k, s) in cell.slots.iter().enumerate() {
            if let Some(c) = s.curve() {
                incidences.entry(c).or_default().push((cell.id, k));
            }
        }
    }
    let mut placed = alloc::vec![false; cells.len()];
    let mut done: BTreeSet<CurveId> = BTreeSet::new();
    let mut letters = BTreeMap::new();
    for root in 0..cells.len() {
        if placed[root] {
            continue;
        }
        placed[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for k in 0..3 {
                let Slot::Glued(c) = fs.cells[x].slots[k] else { continue };
                if !done.insert(c) {
                    continue;
                }
                let inc = &incidences[&c];
                let &[first, second] = inc.as_slice() else {
                    return Err(Error::WordNotSupported(c));
                };
                let twist = fs.twists.get(&c).copied().unwrap_or(0.0);
                let (ia, ib) = (index[&first.0], index[&second.0]);
                let frame = |i: usize, j: usize| cells[i].pants.frame(j).ok_or(Error::UnknownCurve(c));
                if ia == ib {
                    let pants = &cells[ia].pants;
                    let a = pants.seam_position(first.1, second.1)?;
                    let b = pants.seam_position(second.1, first.1)?;
                    let na = frame(ia, first.1)? * Mat2::axial(a);
                    let nb = frame(ib, second.1)? * Mat2::axial(b);
                    let g = cells[ia].g;
                    letters.insert(c, gluing(&g, &na, twist, &nb) * g.inv());
                    continue;
                }
                let (y, (from, to)) = if x == ia { (ib, (first, second)) } else { (ia, (second, first)) };
                let nx = frame(x, from.1)?;
                let ny = frame(y, to.1)?;
                if placed[y] {
                    let (na, nb) = (frame(ia, first.1)?, frame(ib, second.1)?);
                    let q = gluing(&cells[ia].g, &na, twist, &nb) * cells[ib].g.inv();
                    letters.insert(c, q);
                } else {
                    cells[y].g = gluing(&cells[x].g, &nx, twist, &ny);
                    placed[y] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    Ok(Representation { cells, index, letters, incidences })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthMethod {
    ExactHolonomy,
    CollarBounds,
    /// Read off the Fenchel–Nielsen data where holonomy is ill-conditioned.
    FenchelNielsen,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LengthResult {
    pub value: f64,
    pub method: LengthMethod,
    pub lo: f64,
    pub hi: f64,
    /// Set when the trace exceeded [`CONDITIONING_TRACE`].
    pub ill_conditioned: bool,
}

fn exact_from_matrix(m: &Mat2) -> Result<LengthResult> {
    let value = m.translation_length()?;
    let disc = m.discriminant();
    let norm = fabs(m.a) + fabs(m.b) + fabs(m.c) + fabs(m.d);
    let tr = fabs(m.trace());
    let eps = f64::EPSILON;
    let err = if disc > 0.0 {
        8.0 * eps * norm * norm / (sqrt(disc) * sqrt(1.0 + disc / 4.0)) + 4.0 * eps * value
    } else {
        0.0
    };
    let ill_conditioned = tr > CONDITIONING_TRACE;
    let half = if ill_conditioned { err.max(1e-6 * value) } else { err };
    Ok(LengthResult {
        value,
        method: LengthMethod::ExactHolonomy,
        lo: (value - half).max(0.0),
        hi: value + half,
        ill_conditioned,
    })
}

impl Representation {
    fn cell(&self, id: CellId) -> Result<&PlacedCell> {
        self.index.get(&id).map(|&i| &self.cells[i]).ok_or_else(|| {
            Error::NonHyperbolicInput(format!("cell {id} not in representation"))
        })
    }

    /// Peripheral element of `(cell, slot)` in the common coordinates.
    pub fn peripheral(&self, cell: CellId, slot: usize) -> Result<Mat2> {
        let c = self.cell(cell)?;
        Ok(c.pants.periph[slot].conj(&c.g))
    }

    /// Cell placements, per-cell peripherals and stable letters.
    pub fn generators(&self) -> Vec<Mat2> {
        let mut out = Vec::new();
        for c in &self.cells {
            out.push(c.g);
            out.extend(c.pants.periph.iter().map(|p| p.conj(&c.g)));
        }
        out.extend(self.letters.values().copied());
        out
    }

    pub fn pants_frame(&self, cell: CellId) -> Result<&PantsFrame> {
        Ok(&self.cell(cell)?.pants)
    }

    /// Group element whose conjugacy class is the free homotopy class of `c`.
    pub fn word(&self, c: &Curve) -> Result<Mat2> {
        let anchor = c.base().anchor();
        let inc = self.incidences.get(&anchor).ok_or(Error::WordNotSupported(anchor))?;
        match c.base() {
            Base::Pants(_) => self.peripheral(inc[0].0, inc[0].1),
            Base::Dual(core) => {
                let &[(a, j), (b, jb)] = inc.as_slice() else {
                    return Err(Error::WordNotSupported(core));
                };
                let k = c.twist_power(core);
                let beta = self.peripheral(a, j)?;
                let bk = beta.pow(k);
                let letter = self.letters.get(&core);
                if a == b {
                    let q = letter.ok_or(Error::WordNotSupported(core))?;
                    return Ok(bk * *q);
                }
                let mut far = self.peripheral(b, (jb + 1) % 3)?;
                if let Some(q) = letter {
                    far = far.conj(q);
                }
                Ok(self.peripheral(a, (j + 1) % 3)? * far.conj(&bk))
            }
        }
    }

    pub fn length(&self, c: &Curve) -> Result<LengthResult> {
        if let Base::Pants(id) = c.base() {
            let inc = self.incidences.get(&id).ok_or(Error::WordNotSupported(id))?;
            let (cell, slot) = inc[0];
            let pants = self.pants_frame(cell)?;
            let n = pants.frame(slot).ok_or(Error::WordNotSupported(id))?;
            return exact_from_matrix(&(n.inv() * pants.periph[slot] * n));
        }
        exact_from_matrix(&self.word(c)?)
    }
}

/// Representation of the radius-`radius` neighbourhood of the curve's anchor.
pub fn representation_for(s: &Surface, c: &Curve, radius: usize) -> Result<Representation> {
    c.validate(&s.graph)?;
    let anchor = c.base().anchor();
    build_representation_focused(&finite_subsurface(s, &[anchor], radius)?, Some(anchor))
}

pub fn geodesic_length(s: &Surface, c: &Curve) -> Result<LengthResult> {
    let out = match representation_for(s, c, 1).and_then(|r| r.length(c)) {
        Err(Error::WordNotSupported(_)) => representation_for(s, c, 2).and_then(|r| r.length(c)),
        other => other,
    };
    match (c.base(), c.word().is_empty(), &out) {
        (Base::Pants(id), true, Err(Error::NonHyperbolicInput(_) | Error::BadDeterminant(_) | Error::EllipticElement(_))) => {
            pants_length(s, id)
        }
        (Base::Pants(id), true, Ok(r)) if r.ill_conditioned => pants_length(s, id),
        _ => out,
    }
}

fn pants_length(s: &Surface, id: CurveId) -> Result<LengthResult> {
    let l = s.length(id)?;
    Ok(LengthResult { value: l, method: LengthMethod::FenchelNielsen, lo: l, hi: l, ill_conditioned: true })
}

/// Collar lower bound and Dehn-twist upper bound.
pub fn length_bounds(s: &Surface, c: &Curve) -> Result<LengthResult> {
    let mut lo = 0.0;
    let mut twist_cost = 0.0;
    for core in c.support() {
        let i = crate::curve::intersection_with_pants_curve(&s.graph, c, core)? as f64;
        let l = s.length(core)?;
        lo += i * 2.0 * collar_half_width(l)?;
        twist_cost += c.twist_power(core).unsigned_abs() as f64 * i * l;
    }
    let untwisted = Curve::new(c.base(), Vec::new());
    let base = geodesic_length(s, &untwisted)?;
    let hi = base.hi + twist_cost;
    Ok(LengthResult { value: 0.5 * (lo + hi), method: LengthMethod::CollarBounds, lo, hi, ill_conditioned: base.ill_conditioned })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollarDecomposition {
    pub crossing_term: f64,
    pub remainder: f64,
}

pub fn collar_decomposition(s: &Surface, c: &Curve, short_set: &[CurveId]) -> Result<CollarDecomposition> {
    let mut crossing_term = 0.0;
    for &curve in short_set {
        let l = s.length(curve)?;
        if l >= SHORT_THRESHOLD {
            return Err(Error::NotShort { curve, length: l });
        }
        let i = crate::curve::intersection_with_pants_curve(&s.graph, c, curve)? as f64;
        crossing_term += i * fabs(log(l));
    }
    let exact = geodesic_length(s, c)?.value;
    Ok(CollarDecomposition { crossing_term, remainder: exact - crossing_term })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::apply_twist;
    use crate::hyp::{axis_distance, pants_boundary_distance};
    use crate::surface::{build_template, twist_deform, Cell, Family, Rule, TemplateKind};
    use libm::{acosh, asinh, sinh};
    use proptest::prelude::*;

    fn c(i: i64) -> CurveId {
        CurveId::c(i)
    }

    fn fhs(core: f64, bdry: [f64; 4], twist: f64) -> Surface {
        let entries = alloc::vec![(c(0), core), (c(1), bdry[0]), (c(2), bdry[1]), (c(3), bdry[2]), (c(4), bdry[3])];
        build_template(
            TemplateKind::FourHoledSphere,
            Rule::Table { default: 1.0, entries },
            Rule::Table { default: 0.0, entries: alloc::vec![(c(0), twist)] },
        )
        .unwrap()
    }

    fn torus(core: f64, boundary: f64, twist: f64) -> Surface {
        let cells = alloc::vec![Cell {
            id: CellId::c(0),
            slots: [Slot::Glued(c(0)), Slot::Glued(c(0)), Slot::Boundary(c(1))],
        }];
        build_template(
            TemplateKind::Custom(cells),
            Rule::Table { default: boundary, entries: alloc::vec![(c(0), core)] },
            Rule::Table { default: 0.0, entries: alloc::vec![(c(0), twist)] },
        )
        .unwrap()
    }

    /// Dual-curve length of a four-holed sphere assembled from right-angled
    /// pieces: each pants contributes the seam arc joining the core to itself
    /// around the next boundary, offset from the core's reference point.
    fn fhs_dual_oracle(core: f64, bdry: [f64; 4], twist: f64) -> f64 {
        let piece = |a: f64, b: f64| {
            let e = pants_boundary_distance(core, a, b).unwrap();
            let sh2 = cosh(e).powi(2) * sinh(a / 2.0).powi(2) - cosh(a / 2.0).powi(2);
            let h = asinh(sqrt(sh2));
            let x = asinh(cosh(a / 2.0) / sinh(h));
            (2.0 * h, x)
        };
        let (s1, x1) = piece(bdry[0], bdry[1]);
        let (s2, x2) = piece(bdry[2], bdry[3]);
        let w = twist + x2 - x1;
        let w2 = twist + x1 - x2;
        let ch = cosh((s1 + s2) / 2.0) * cosh(w / 2.0) * cosh(w2 / 2.0)
            + cosh((s1 - s2) / 2.0) * sinh(w / 2.0) * sinh(w2 / 2.0);
        2.0 * acosh(ch)
    }

    #[test]
    fn single_pants_traces() {
        let p = PantsFrame::new([1.0, 1.0, 1.0]).unwrap();
        for m in p.periph {
            assert!((m.trace() + 2.0 * cosh(0.5)).abs() < 1e-10);
            assert!((m.det() - 1.0).abs() < 1e-12);
        }
        let prod = p.periph[0] * p.periph[1] * p.periph[2];
        assert!((prod.a - 1.0).abs() < 1e-12 && prod.b.abs() < 1e-12 && prod.c.abs() < 1e-12);
        for lengths in [[1.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.3, 0.0, 5.0], [0.0, 0.0, 0.0]] {
            let p = PantsFrame::new(lengths).unwrap();
            for (m, l) in p.periph.iter().zip(lengths) {
                assert!((m.trace() + 2.0 * cosh(l / 2.0)).abs() < 1e-9, "{lengths:?}");
            }
        }
    }

    #[test]
    fn pants_axes_match_hexagon_distances() {
        for lengths in [[1.0, 1.0, 1.0], [0.2, 3.0, 1.5], [4.0, 0.05, 0.7]] {
            let p = PantsFrame::new(lengths).unwrap();
            for j in 0..3 {
                let k = (j + 1) % 3;
                let d = axis_distance(&p.periph[j], &p.periph[k]).unwrap();
                let expect = pants_boundary_distance(lengths[j], lengths[k], lengths[(j + 2) % 3]).unwrap();
                assert!((d - expect).abs() < 1e-9, "{lengths:?} {j}: {d} vs {expect}");
            }
        }
    }

    #[test]
    fn frames_diagonalize_and_keep_orientation() {
        for lengths in [[1.0, 1.0, 1.0], [0.2, 3.0, 1.5], [1.0, 2.0, 0.0], [0.0, 1.0, 1.0]] {
            let p = PantsFrame::new(lengths).unwrap();
            for j in 0..3 {
                let Some(n) = p.frame(j) else { continue };
                let local = n.inv() * p.periph[j] * n;
                let target = Mat2::axial(lengths[j]).neg();
                for (x, y) in [(local.a, target.a), (local.b, 0.0), (local.c, 0.0), (local.d, target.d)] {
                    assert!((x - y).abs() < 1e-9, "{lengths:?} slot {j}: {local:?}");
                }
                // The next boundary lies to the left of the upward axis.
                let next = n.inv() * p.periph[(j + 1) % 3] * n;
                let (e0, e1) = endpoints(&next).unwrap();
                assert!(e0 < 0.0 && e1 < 0.0, "{lengths:?} slot {j}: {e0} {e1}");
            }
        }
    }

    #[test]
    fn four_holed_sphere_core_trace_and_dets() {
        for t in [0.0, 0.4, -1.3, 7.0] {
            let s = fhs(0.8, [1.0, 0.5, 2.0, 1.2], t);
            let fs = finite_subsurface(&s, &[c(0)], 1).unwrap();
            let rep = build_representation(&fs).unwrap();
            for (cell, slot) in [(CellId::c(0), 0), (CellId::c(1), 0)] {
                let b = rep.peripheral(cell, slot).unwrap();
                assert!((b.trace().abs() - 2.0 * cosh(0.4)).abs() < 1e-9);
            }
            let a = rep.peripheral(CellId::c(0), 0).unwrap();
            let b = rep.peripheral(CellId::c(1), 0).unwrap();
            let prod = a * b;
            assert!((prod.a.abs() - 1.0).abs() < 1e-9 && prod.b.abs() < 1e-9 && prod.c.abs() < 1e-9);
            if t.abs() > 2.0 {
                continue;
            }
            for g in rep.generators() {
                assert!((g.det() - 1.0).abs() < 1e-9, "{} {g:?}", g.det() - 1.0);
            }
        }
    }

    #[test]
    fn symmetric_opposite_axes_distance() {
        let s = fhs(1.0, [1.0; 4], 0.0);
        let rep = build_representation(&finite_subsurface(&s, &[c(0)], 1).unwrap()).unwrap();
        let p1 = rep.peripheral(CellId::c(0), 1).unwrap();
        let p2 = rep.peripheral(CellId::c(0), 2).unwrap();
        let d = axis_distance(&p1, &p2).unwrap();
        assert!((d - pants_boundary_distance(1.0, 1.0, 1.0).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn dual_length_matches_oracle() {
        let cases = [
            (1.0, [1.0; 4], 0.0),
            (1.0, [1.0; 4], 0.3),
            (0.5, [1.0, 2.0, 0.7, 1.5], -1.1),
            (2.0, [0.6, 0.6, 3.0, 0.9], 2.5),
            (0.01, [1.0; 4], 0.0),
        ];
        for (core, bdry, t) in cases {
            let s = fhs(core, bdry, t);
            let got = geodesic_length(&s, &Curve::dual(c(0))).unwrap().value;
            let want = fhs_dual_oracle(core, bdry, t);
            assert!((got - want).abs() <= 1e-9 * want.max(1.0), "{core} {bdry:?} {t}: {got} vs {want}");
        }
    }

    #[test]
    fn frozen_symmetric_dual_length() {
        let v = geodesic_length(&fhs(1.0, [1.0; 4], 0.0), &Curve::dual(c(0))).unwrap().value;
        assert!((v - fhs_dual_oracle(1.0, [1.0; 4], 0.0)).abs() < 1e-12);
    }

    #[test]
    fn torus_dual_matches_oracle() {
        for (core, bdry, t) in [(1.0, 1.0, 0.0), (1.0, 1.0, 0.7), (0.4, 2.0, -1.5), (3.0, 0.5, 2.0)] {
            let s = torus(core, bdry, t);
            let got = geodesic_length(&s, &Curve::dual(c(0))).unwrap().value;
            let d = pants_boundary_distance(core, core, bdry).unwrap();
            let want = 2.0 * acosh(cosh(d / 2.0) * cosh(t / 2.0));
            assert!((got - want).abs() < 1e-9 * want.max(1.0), "{core} {bdry} {t}: {got} vs {want}");
        }
    }

    #[test]
    fn full_twist_periodicity() {
        for (core, bdry, t) in [(1.0, [1.0; 4], 0.2), (0.3, [2.0, 1.0, 0.5, 1.5], -0.7)] {
            let s = fhs(core, bdry, t);
            for k in -3..=3 {
                let twisted = apply_twist(&Curve::dual(c(0)), c(0), k);
                let a = geodesic_length(&s, &twisted).unwrap().value;
                let deformed = twist_deform(&s, c(0), k as f64 * core).unwrap();
                let b = geodesic_length(&deformed, &Curve::dual(c(0))).unwrap().value;
                assert!((a - b).abs() < 1e-8, "k={k}: {a} vs {b}");
            }
        }
        for (core, t) in [(1.0, 0.1), (0.6, -0.4)] {
            let s = torus(core, 1.3, t);
            for k in -3..=3 {
                let a = geodesic_length(&s, &apply_twist(&Curve::dual(c(0)), c(0), k)).unwrap().value;
                let b = geodesic_length(&twist_deform(&s, c(0), k as f64 * core).unwrap(), &Curve::dual(c(0)))
                    .unwrap()
                    .value;
                assert!((a - b).abs() < 1e-8, "torus k={k}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn pants_lengths_exact_on_templates() {
        let flute = build_template(TemplateKind::Flute, Rule::Harmonic { scale: 1.0 }, Rule::Const(0.3)).unwrap();
        for i in [1, 2, 3, 10, 57, 400] {
            let v = geodesic_length(&flute, &Curve::pants(c(i))).unwrap();
            assert!((v.value * i as f64 - 1.0).abs() < 1e-9, "{i}: {}", v.value);
            assert!(v.hi - v.lo <= 1e-8 * v.value.max(1.0));
        }
        let tripod = build_template(
            TemplateKind::Tripod,
            Rule::Power { scale: 1.0, exponents: [-1.0, 1.0, 2.0] },
            Rule::Const(0.0),
        )
        .unwrap();
        for f in Family::ALL {
            for i in [1, 2, 7] {
                let id = CurveId::new(f, i);
                let v = geodesic_length(&tripod, &Curve::pants(id)).unwrap().value;
                let want = tripod.length(id).unwrap();
                assert!((v - want).abs() <= 1e-9 * want, "{id}: {v} vs {want}");
            }
        }
    }

    #[test]
    fn twist_convexity() {
        let s = fhs(0.7, [1.0, 1.3, 0.8, 1.1], 0.0);
        let ts: Vec<f64> = (0..101).map(|n| -3.0 + 6.0 * n as f64 / 100.0).collect();
        let ls: Vec<f64> = ts
            .iter()
            .map(|&t| geodesic_length(&twist_deform(&s, c(0), t).unwrap(), &Curve::dual(c(0))).unwrap().value)
            .collect();
        for w in ls.windows(3) {
            assert!(w[0] + w[2] - 2.0 * w[1] > 0.0);
        }
    }

    #[test]
    fn bounds_sandwich_and_examples() {
        let s = fhs(exp(-4.0), [1.0; 4], 0.0);
        let dual = Curve::dual(c(0));
        let b = length_bounds(&s, &dual).unwrap();
        let exact = geodesic_length(&s, &dual).unwrap().value;
        assert!(b.lo >= 4.0 * asinh(1.0 / sinh(exp(-4.0) / 2.0)) - 1e-12);
        assert!(b.lo <= exact && exact <= b.hi);
        let p = length_bounds(&s, &Curve::pants(c(1))).unwrap();
        assert_eq!(p.lo, 0.0);
        assert!((p.hi - 1.0).abs() < 1e-9);
        for core in [0.2, 1.0, 2.5] {
            for t in [-0.5, 0.0, 0.9] {
                let s = fhs(core, [1.0, 0.7, 1.4, 1.0], t);
                let tw = apply_twist(&dual, c(0), 3);
                let b = length_bounds(&s, &tw).unwrap();
                let e = geodesic_length(&s, &tw).unwrap().value;
                assert!(b.lo <= e && e <= b.hi, "{core} {t}");
            }
        }
    }

    #[test]
    fn collar_decomposition_behaviour() {
        let s = fhs(1.0, [1.0; 4], 0.0);
        let dec = collar_decomposition(&s, &Curve::pants(c(1)), &[]).unwrap();
        assert_eq!(dec.crossing_term, 0.0);
        assert!((dec.remainder - 1.0).abs() < 1e-9);
        assert_eq!(collar_decomposition(&s, &Curve::dual(c(0)), &[c(0)]).unwrap_err().code(), "ElH03");
        let rems: Vec<f64> = [6.0, 8.0, 10.0]
            .iter()
            .map(|&e| {
                let s = fhs(exp(-e), [1.0; 4], 0.0);
                collar_decomposition(&s, &Curve::dual(c(0)), &[c(0)]).unwrap().remainder
            })
            .collect();
        assert!(rems.iter().all(|&r| r > 0.0));
        // The dual curve crosses the full collar twice, so the remainder keeps
        // one |log ε| per crossing: it grows by ≈ 2 per unit of |log ε|.
        let slope1 = (rems[1] - rems[0]) / 2.0;
        let slope2 = (rems[2] - rems[1]) / 2.0;
        assert!((slope1 - 2.0).abs() < 0.01 && (slope2 - 2.0).abs() < 0.01, "{rems:?}");
    }

    proptest! {
        #[test]
        fn periodicity_random(core in 0.05f64..3.0, t in -2.0f64..2.0, k in -3i64..=3,
                              b in proptest::array::uniform4(0.3f64..3.0)) {
            let s = fhs(core, b, t);
            let a = geodesic_length(&s, &apply_twist(&Curve::dual(c(0)), c(0), k)).unwrap().value;
            let d = twist_deform(&s, c(0), k as f64 * core).unwrap();
            let e = geodesic_length(&d, &Curve::dual(c(0))).unwrap().value;
            prop_assert!((a - e).abs() < 1e-8 * a.max(1.0));
        }

        #[test]
        fn oracle_random(core in 0.05f64..3.0, t in -2.0f64..2.0, b in proptest::array::uniform4(0.3f64..3.0)) {
            let got = geodesic_length(&fhs(core, b, t), &Curve::dual(c(0))).unwrap().value;
            let want = fhs_dual_oracle(core, b, t);
            prop_assert!((got - want).abs() <= 1e-9 * want.max(1.0));
        }
    }
}
