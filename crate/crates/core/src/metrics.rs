//! Length-spectrum estimates and the checks built on them.
//!
//! Every distance is reported as a bound on the constant `K` (with
//! `d = ½·log K`) together with the rule that certifies it.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::Range;

use libm::{acosh, asinh, cosh, exp, expm1, fabs, log, sin, sinh, sqrt};

use crate::curve::{apply_mapping_class, apply_twist, Curve, CurveMap, MappingClass, Schedule, TwistEntry, TwistSchedule};
use crate::error::{Error, Result};
use crate::holonomy::{build_representation_focused, geodesic_length, SHORT_THRESHOLD};
use crate::hyp::{abs_log, collar_half_width, quad_modulus, wedge_half_angle};
use crate::surface::{
    build_template, finite_subsurface, CurveId, GraphAutomorphism, Rule, Surface, TemplateKind,
};

/// Identity marking.
pub struct Identity;

impl CurveMap for Identity {
    fn image(&self, c: &Curve) -> Result<Curve> {
        Ok(c.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceEstimate {
    /// Lower bound on `K`.
    pub lower: f64,
    /// Upper bound on `K`; `+∞` when nothing certifies one.
    pub upper: f64,
    pub witness: Option<Curve>,
    /// `|log ratio|` at the witness.
    pub witness_log_ratio: f64,
    pub certificate: String,
    pub notes: Vec<String>,
}

impl DistanceEstimate {
    pub fn d_lower(&self) -> f64 {
        0.5 * log(self.lower)
    }

    pub fn d_upper(&self) -> f64 {
        0.5 * log(self.upper)
    }

    fn upper_only(upper: f64, certificate: &str) -> Self {
        DistanceEstimate {
            lower: 1.0,
            upper,
            witness: None,
            witness_log_ratio: 0.0,
            certificate: certificate.to_string(),
            notes: Vec::new(),
        }
    }
}

/// `|log(l_{s2}(f(c)) / l_{s1}(c))|`.
pub fn marked_log_ratio(s1: &Surface, s2: &Surface, f: &dyn CurveMap, c: &Curve) -> Result<f64> {
    let l1 = geodesic_length(s1, c)?.value;
    let l2 = geodesic_length(s2, &f.image(c)?)?.value;
    Ok(abs_log(l2 / l1))
}

pub fn log_length_ratio(s1: &Surface, s2: &Surface, c: &Curve) -> Result<f64> {
    marked_log_ratio(s1, s2, &Identity, c)
}

pub fn ls_constant_lower_marked(s1: &Surface, s2: &Surface, f: &dyn CurveMap, curves: &[Curve]) -> Result<DistanceEstimate> {
    if curves.is_empty() {
        return Err(Error::BadParameter("empty curve set".to_string()));
    }
    let mut best = (0.0f64, None::<&Curve>);
    for c in curves {
        let r = marked_log_ratio(s1, s2, f, c)?;
        if best.1.is_none() || r > best.0 {
            best = (r, Some(c));
        }
    }
    Ok(DistanceEstimate {
        lower: exp(best.0),
        upper: f64::INFINITY,
        witness: best.1.cloned(),
        witness_log_ratio: best.0,
        certificate: "enumeration".to_string(),
        notes: Vec::new(),
    })
}

pub fn ls_constant_lower(s1: &Surface, s2: &Surface, curves: &[Curve]) -> Result<DistanceEstimate> {
    ls_constant_lower_marked(s1, s2, &Identity, curves)
}

/// `1 + |k|·ℓ / (2·w(ℓ))`: a curve crossing the collar is at least `2w` long
/// per crossing and a twist adds at most `|k|·ℓ` per crossing.
pub fn single_twist_bound(length: f64, power: i64) -> Result<f64> {
    Ok(1.0 + power.unsigned_abs() as f64 * length / (2.0 * collar_half_width(length)?))
}

fn schedule_entries(m: &MappingClass) -> Vec<TwistEntry> {
    match &m.schedule {
        Schedule::Finite(v) => v.clone(),
        Schedule::Lazy { .. } => (1..=m.len()).filter_map(|n| m.entry(n)).collect(),
    }
}

pub fn twist_upper_bound(s: &Surface, m: &MappingClass) -> Result<DistanceEstimate> {
    let entries: Vec<TwistEntry> = schedule_entries(m).into_iter().filter(|e| e.power != 0).collect();
    match entries.as_slice() {
        [] => Ok(DistanceEstimate::upper_only(1.0, "identity")),
        [e] => Ok(DistanceEstimate::upper_only(single_twist_bound(s.length(e.curve)?, e.power)?, "dehn-twist-collar")),
        _ => {
            let mut lengths = Vec::with_capacity(entries.len());
            for e in &entries {
                lengths.push(s.length(e.curve)?);
            }
            let short = lengths.iter().filter(|&&l| l < SHORT_THRESHOLD).count();
            if short == entries.len() {
                let sum: f64 = entries
                    .iter()
                    .zip(&lengths)
                    .map(|(e, &l)| e.power.unsigned_abs() as f64 * l / fabs(log(l)))
                    .sum();
                return Ok(DistanceEstimate::upper_only(1.0 + sum, "collar-sum"));
            }
            let mut upper = 1.0;
            for (e, &l) in entries.iter().zip(&lengths) {
                upper *= single_twist_bound(l, e.power)?;
            }
            let mut out = DistanceEstimate::upper_only(upper, "product");
            if short > 0 {
                out.notes.push("ElM01 mixed short and long twist curves; product rule used".to_string());
            }
            Ok(out)
        }
    }
}

/// `1 + Σ_{n≤N} t_n·ε_n / |log ε_n|` evaluated from `log ε_n`.
pub fn schedule_twist_upper_bound(ts: &TwistSchedule, n_max: u64) -> Result<DistanceEstimate> {
    let mut sum = 0.0;
    for n in 1..=n_max {
        let l = ts.log_eps(n);
        if !(l < log(SHORT_THRESHOLD)) {
            return Err(Error::NotShort { curve: CurveId::c(n as i64), length: exp(l) });
        }
        sum += ts.displacement(n) / -l;
    }
    Ok(DistanceEstimate::upper_only(1.0 + sum, "collar-sum"))
}

/// `1 + 2·Σ_{n≤N} log(n+1)/n²`.
pub fn schedule_reference_bound(n_max: u64) -> f64 {
    1.0 + 2.0 * (1..=n_max).map(|n| log((n + 1) as f64) / (n * n) as f64).sum::<f64>()
}

pub fn small_twist_rate(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::EpsilonOutOfRange(eps));
    }
    Ok(1.0 + eps / fabs(log(eps)))
}

/// One four-holed sphere: core length, boundary lengths and twist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapPoint {
    pub core: f64,
    pub boundary: [f64; 4],
    pub twist: f64,
}

impl GapPoint {
    pub fn surface(&self) -> Result<Surface> {
        let b = self.boundary;
        let c = CurveId::c;
        build_template(
            TemplateKind::FourHoledSphere,
            Rule::Table {
                default: 1.0,
                entries: alloc::vec![(c(0), self.core), (c(1), b[0]), (c(2), b[1]), (c(3), b[2]), (c(4), b[3])],
            },
            Rule::Table { default: 0.0, entries: alloc::vec![(c(0), self.twist)] },
        )
    }
}

/// Product grid of five lengths in `[1/M, M]` and twists in `[0, ℓ(β))`.
#[derive(Debug, Clone, PartialEq)]
pub struct GapGrid {
    pub lengths: Vec<f64>,
    pub twist_steps: u32,
}

impl GapGrid {
    pub fn new(m: f64, length_step: f64, twist_steps: u32) -> Result<Self> {
        if !(m > 1.0) || !(length_step > 0.0) || twist_steps == 0 {
            return Err(Error::BadParameter(alloc::format!(
                "grid needs M > 1, step > 0, twist steps ≥ 1 (got {m}, {length_step}, {twist_steps})"
            )));
        }
        let lo = 1.0 / m;
        let mut lengths = Vec::new();
        let mut n = 0u32;
        loop {
            let v = lo + n as f64 * length_step;
            if v > m + 1e-12 {
                break;
            }
            lengths.push(v.min(m));
            n += 1;
        }
        if *lengths.last().unwrap() < m - 1e-12 {
            lengths.push(m);
        }
        Ok(GapGrid { lengths, twist_steps })
    }

    pub fn len(&self) -> usize {
        self.lengths.len().pow(5) * self.twist_steps as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, mut i: usize) -> GapPoint {
        let n = self.lengths.len();
        let j = i % self.twist_steps as usize;
        i /= self.twist_steps as usize;
        let mut v = [0.0; 5];
        for slot in v.iter_mut().rev() {
            *slot = self.lengths[i % n];
            i /= n;
        }
        GapPoint { core: v[0], boundary: [v[1], v[2], v[3], v[4]], twist: v[0] * j as f64 / self.twist_steps as f64 }
    }
}

/// `max(r, 1/r)` over `r = l(τ^{±1}α)/l(α)` for the dual curve `α`.
pub fn gap_value(p: &GapPoint) -> Result<f64> {
    let s = p.surface()?;
    let core = CurveId::c(0);
    let rep = build_representation_focused(&finite_subsurface(&s, &[core], 1)?, Some(core))?;
    let alpha = Curve::dual(core);
    let l0 = rep.length(&alpha)?.value;
    let mut best: f64 = 1.0;
    for k in [1, -1] {
        let r = rep.length(&apply_twist(&alpha, core, k))?.value / l0;
        best = best.max(r).max(1.0 / r);
    }
    Ok(best)
}

/// Threshold under which a grid value counts as indistinguishable from 1.
pub const GAP_RESOLUTION: f64 = 1e-6;

/// Minimum of [`gap_value`] over `range`, first index on ties.
pub fn min_gap_in_range(grid: &GapGrid, range: Range<usize>) -> Result<(usize, f64)> {
    let mut best = (usize::MAX, f64::INFINITY);
    for i in range {
        let v = gap_value(&grid.point(i))?;
        if v - 1.0 < GAP_RESOLUTION {
            return Err(Error::GridTooCoarse(v));
        }
        if v < best.1 {
            best = (i, v);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapResult {
    pub k: f64,
    pub witness: GapPoint,
    pub witness_index: usize,
    pub points: usize,
}

pub fn four_holed_min_gap(m: f64, length_step: f64, twist_steps: u32) -> Result<GapResult> {
    let grid = GapGrid::new(m, length_step, twist_steps)?;
    let (i, k) = min_gap_in_range(&grid, 0..grid.len())?;
    Ok(GapResult { k, witness: grid.point(i), witness_index: i, points: grid.len() })
}

/// `1 / Mod(−1/(1 + (e^t − 1)·sin θ))`.
pub fn qc_twist_lower_bound(t: f64, theta: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::BadParameter(alloc::format!("twist {t} must be non-negative")));
    }
    if !(theta > 0.0 && theta <= PI / 2.0) {
        return Err(Error::BadParameter(alloc::format!("angle {theta} outside (0, π/2]")));
    }
    Ok(1.0 / quad_modulus(-1.0 / (1.0 + expm1(t) * sin(theta)))?)
}

pub fn collar_angle(ell: f64) -> Result<f64> {
    Ok(wedge_half_angle(collar_half_width(ell)?))
}

fn collar_angle_from_log(log_ell: f64) -> f64 {
    let ell = exp(log_ell);
    if ell > 1e-300 {
        wedge_half_angle(asinh(1.0 / sinh(ell / 2.0)))
    } else {
        // w(ℓ) = log 4 − log ℓ + O(ℓ²)
        wedge_half_angle(log(4.0) - log_ell)
    }
}

pub fn schedule_qc_divergence(ts: &TwistSchedule, n_max: u64) -> Result<Vec<f64>> {
    (1..=n_max)
        .map(|n| qc_twist_lower_bound(ts.displacement(n), collar_angle_from_log(ts.log_eps(n))))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct WolpertReport {
    pub k: f64,
    /// Indices of pairs with ratio outside `[1/K, K]`.
    pub flagged: Vec<usize>,
}

impl WolpertReport {
    pub fn pass(&self) -> bool {
        self.flagged.is_empty()
    }
}

pub fn wolpert_check(k: f64, pairs: &[(f64, f64)]) -> Result<WolpertReport> {
    if !(k >= 1.0) {
        return Err(Error::BadParameter(alloc::format!("K = {k} below 1")));
    }
    let mut flagged = Vec::new();
    for (i, &(l1, l2)) in pairs.iter().enumerate() {
        if !(l1 > 0.0 && l2 > 0.0) {
            return Err(Error::NonPositiveLength(l1.min(l2)));
        }
        let r = l2 / l1;
        if r > k || r < 1.0 / k {
            flagged.push(i);
        }
    }
    Ok(WolpertReport { k, flagged })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const UNKNOWN: Interval = Interval { lo: 0.0, hi: f64::INFINITY };

    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    fn scale(self, c: f64) -> Self {
        Interval { lo: c * self.lo, hi: c * self.hi }
    }

    fn shift(self, c: f64) -> Self {
        Interval { lo: self.lo + c, hi: self.hi + c }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainMode {
    Infinite,
    FiniteType,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Verified,
    Violated,
    Undecidable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainCheck {
    pub relation: &'static str,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub checks: Vec<ChainCheck>,
}

impl ChainReport {
    pub fn violations(&self) -> usize {
        self.checks.iter().filter(|c| c.verdict == Verdict::Violated).count()
    }
}

fn leq(small: Interval, large: Interval) -> Verdict {
    if small.hi <= large.lo {
        Verdict::Verified
    } else if small.lo > large.hi {
        Verdict::Violated
    } else {
        Verdict::Undecidable
    }
}

pub fn metric_chain_check(d_ls: Interval, d_qc: Interval, d_bl: Interval, c: f64, n: f64, mode: ChainMode) -> Result<ChainReport> {
    if !(c >= 1.0) || !(n >= 0.0) {
        return Err(Error::BadParameter(alloc::format!("need C ≥ 1 and N ≥ 0 (got {c}, {n})")));
    }
    let mut checks = alloc::vec![
        ChainCheck { relation: "d_ls <= d_bL", verdict: leq(d_ls, d_bl) },
        ChainCheck { relation: "d_ls <= d_qc", verdict: leq(d_ls, d_qc) },
    ];
    match mode {
        ChainMode::Infinite => {
            checks.push(ChainCheck { relation: "d_qc <= d_bL", verdict: leq(d_qc, d_bl) });
            checks.push(ChainCheck { relation: "d_bL <= C*d_qc", verdict: leq(d_bl, d_qc.scale(c)) });
        }
        ChainMode::FiniteType => {
            checks.push(ChainCheck { relation: "d_qc <= 4*d_ls + N", verdict: leq(d_qc, d_ls.scale(4.0).shift(n)) });
        }
    }
    Ok(ChainReport { checks })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// `|log l_{s1}(c) − log l_{s2}(c)| ≤ 2·d_ls_upper`.
pub fn two_lipschitz_check(c: &Curve, s1: &Surface, s2: &Surface, d_ls_upper: f64) -> Result<LipschitzCheck> {
    let lhs = log_length_ratio(s1, s2, c)?;
    let rhs = 2.0 * d_ls_upper;
    Ok(LipschitzCheck { lhs, rhs, pass: lhs <= rhs })
}

/// Lengths of the seam arc and seam-foot offset that a pants contributes to its
/// dual curve, for core `ℓ` and the other boundaries `(a, b)` with `a` the one
/// the arc runs around (`0` = cusp).
fn seam_piece(core: f64, a: f64, b: f64) -> (f64, f64) {
    // cosh(e)·sinh(a/2) with e the core–a distance; finite as a → 0.
    let ch_sh = (cosh(b / 2.0) + cosh(core / 2.0) * cosh(a / 2.0)) / sinh(core / 2.0);
    let sh2 = ch_sh * ch_sh - cosh(a / 2.0) * cosh(a / 2.0);
    let h = asinh(sqrt(sh2));
    (2.0 * h, asinh(cosh(a / 2.0) / sinh(h)))
}

/// Right-angled-hexagon lower bound for the length of the dual curve of
/// `core` after the structure twist is moved by `extra`:
/// `cosh(L/2) ≥ 2·sinh(s₁/2)·sinh(s₂/2)·cosh(w/2)·cosh(w′/2)`.
pub fn dual_length_lower_bound(s: &Surface, core: CurveId, extra: f64) -> Result<f64> {
    let inc = s.graph.incidences(core).ok_or(Error::UnknownCurve(core))?;
    let &[(a, j), (b, jb)] = inc.as_slice() else {
        return Err(Error::WordNotSupported(core));
    };
    if a == b {
        return Err(Error::WordNotSupported(core));
    }
    let l = s.length(core)?;
    let side = |cell, slot: usize| -> Result<(f64, f64)> {
        let cell = s.graph.cell(cell).ok_or(Error::UnknownCurve(core))?;
        let len = |k: usize| cell.slots[k].curve().map(|c| s.length(c)).unwrap_or(Ok(0.0));
        Ok(seam_piece(l, len((slot + 1) % 3)?, len((slot + 2) % 3)?))
    };
    let (s1, x1) = side(a, j)?;
    let (s2, x2) = side(b, jb)?;
    let t = s.twist(core) + extra;
    let (w, w2) = (t + x2 - x1, t + x1 - x2);
    let ch = 2.0 * sinh(s1 / 2.0) * sinh(s2 / 2.0) * cosh(w / 2.0) * cosh(w2 / 2.0);
    Ok(2.0 * acosh(ch.max(1.0)))
}

/// Growth certificate for `ratio(i) = l(image_i) / l(curve_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceWitness {
    pub label: String,
    pub indices: Vec<i64>,
    pub curves: Vec<Curve>,
    pub images: Vec<Curve>,
    pub ratios: Vec<f64>,
    pub g: Vec<f64>,
}

impl DivergenceWitness {
    /// `ratio ≥ g` at every probe (up to 1e-12 relative rounding), `g`
    /// nondecreasing, and `g` grows across the probes.
    pub fn holds(&self) -> bool {
        let dominated = self.ratios.iter().zip(&self.g).all(|(r, g)| *r >= g * (1.0 - 1e-12));
        let monotone = self.g.windows(2).all(|w| w[1] >= w[0]);
        let growing = match (self.g.first(), self.g.last()) {
            (Some(a), Some(b)) => b > a,
            _ => false,
        };
        dominated && monotone && growing
    }
}

fn witness_from(
    label: &str,
    indices: &[i64],
    s_curve: &Surface,
    s_image: &Surface,
    pick: impl Fn(i64) -> Result<(Curve, Curve, f64)>,
) -> Result<DivergenceWitness> {
    let mut w = DivergenceWitness {
        label: label.to_string(),
        indices: indices.to_vec(),
        curves: Vec::new(),
        images: Vec::new(),
        ratios: Vec::new(),
        g: Vec::new(),
    };
    for &i in indices {
        let (c, img, g) = pick(i)?;
        let r = geodesic_length(s_image, &img)?.value / geodesic_length(s_curve, &c)?.value;
        w.curves.push(c);
        w.images.push(img);
        w.ratios.push(r);
        w.g.push(g);
    }
    Ok(w)
}

/// Flute with lengths 1 against lengths `1/i`: `l_{H0}(C_i)/l_{H1}(C_i) = i`.
pub fn flute_divergence(indices: &[i64]) -> Result<(Surface, Surface, DivergenceWitness)> {
    let h0 = build_template(TemplateKind::Flute, Rule::Const(1.0), Rule::Const(0.0))?;
    let h1 = build_template(TemplateKind::Flute, Rule::Harmonic { scale: 1.0 }, Rule::Const(0.0))?;
    let w = witness_from("flute-harmonic", indices, &h1, &h0, |i| {
        let c = Curve::pants(CurveId::c(i));
        Ok((c.clone(), c, i as f64))
    })?;
    Ok((h0, h1, w))
}

/// Smallest `k ≥ 0` with `l(τ^k D_i) ≥ i·l(D_i)`.
pub fn minimal_twist_power(s: &Surface, i: i64) -> Result<i64> {
    let core = CurveId::c(i);
    let d = Curve::dual(core);
    let target = i as f64 * geodesic_length(s, &d)?.value;
    let mut k = 0;
    while geodesic_length(s, &apply_twist(&d, core, k))?.value < target {
        k += 1;
    }
    Ok(k)
}

/// `f = τ_1^{k_1} ∘ τ_2^{k_2} ∘ …` on the uniform flute with `k_i` from
/// [`minimal_twist_power`], so `l(f(D_i)) ≥ i·l(D_i)`.
pub fn twist_divergence(indices: &[i64]) -> Result<(Surface, MappingClass, DivergenceWitness)> {
    let h0 = build_template(TemplateKind::Flute, Rule::Const(1.0), Rule::Const(0.0))?;
    let top = indices.iter().copied().max().unwrap_or(0);
    let mut entries = Vec::new();
    for i in 1..=top {
        entries.push(TwistEntry { curve: CurveId::c(i), power: minimal_twist_power(&h0, i)? });
    }
    let f = MappingClass { schedule: Schedule::Finite(entries), label: "flute-divergent-twists".to_string() };
    let w = witness_from("flute-divergent-twists", indices, &h0, &h0, |i| {
        let d = Curve::dual(CurveId::c(i));
        let img = apply_mapping_class(&d, &f)?;
        Ok((d, img, i as f64))
    })?;
    Ok((h0, f, w))
}

/// Translation-invariant ladder, `τ_i` the `i`-th power of the twist about
/// `C_i`; `H_1 = f(H_0)` so `l_{H1}(D_i) = l_{H0}(f⁻¹(D_i))`. The lower
/// function is the hexagon bound for the twisted dual curve over `l(D_i)`.
pub fn ladder_divergence(indices: &[i64], length: f64, twist: f64) -> Result<(Surface, MappingClass, DivergenceWitness)> {
    let h0 = build_template(TemplateKind::Ladder, Rule::Const(length), Rule::Const(twist))?;
    let f = MappingClass::lazy("ladder-powers", 100_000, |n| TwistEntry { curve: CurveId::c(n as i64), power: n as i64 });
    let finv = f.inverse();
    let base = geodesic_length(&h0, &Curve::dual(CurveId::c(0)))?.value;
    let w = witness_from("ladder-powers", indices, &h0, &h0, |i| {
        let core = CurveId::c(i);
        let d = Curve::dual(core);
        let img = apply_mapping_class(&d, &finv)?;
        let lb = dual_length_lower_bound(&h0, core, img.twist_power(core) as f64 * length)?;
        Ok((d, img, lb / base))
    })?;
    Ok((h0, f, w))
}

/// Tripod with `l(C_i) = 1/i`, `l(C′_i) = i`, `l(C″_i) = i²`; the rotation's
/// inverse carries `C_i` to `C″_i`, ratio `i³`, against `g(i) = i²`.
pub fn tripod_divergence(indices: &[i64]) -> Result<(Surface, DivergenceWitness)> {
    let h0 = build_template(
        TemplateKind::Tripod,
        Rule::Power { scale: 1.0, exponents: [-1.0, 1.0, 2.0] },
        Rule::Const(0.0),
    )?;
    let back = GraphAutomorphism::TripodRotation(1).inverse();
    let w = witness_from("tripod-rotation", indices, &h0, &h0, |i| {
        let c = Curve::pants(CurveId::c(i));
        let img = back.image(&c)?;
        Ok((c, img, (i * i) as f64))
    })?;
    Ok((h0, w))
}

/// `max |log(l_{H_m}(α_m) / l_{H_n}(α_m))|` with `H_j = τ_j(H)`, `α_m = D_m`.
pub fn translation_gap(s: &Surface, m: i64, n: i64) -> Result<f64> {
    if m == n {
        return Ok(0.0);
    }
    let alpha = Curve::dual(CurveId::c(m));
    let in_h = |j: i64| -> Result<f64> {
        let img = apply_mapping_class(&alpha, &MappingClass::twist(CurveId::c(j), 1).inverse())?;
        Ok(geodesic_length(s, &img)?.value)
    };
    Ok(abs_log(in_h(m)? / in_h(n)?))
}

/// Sup over `curves` of `max(r, 1/r)` with `r = l(τ^{-1}(α))/l(α)` for the
/// positive twist about `along`.
pub fn sup_twist_ratio(s: &Surface, along: CurveId, curves: &[Curve]) -> Result<(f64, Curve)> {
    let mut best = (1.0, curves.first().cloned().ok_or(Error::BadParameter("empty curve set".to_string()))?);
    for c in curves {
        let l = geodesic_length(s, c)?.value;
        let lt = geodesic_length(s, &apply_twist(c, along, -1))?.value;
        let r = (lt / l).max(l / lt);
        if r > best.0 {
            best = (r, c.clone());
        }
    }
    Ok(best)
}
