//! Pants curves, dual curves and their images under Dehn twists.
//!
//! A dual curve is named by the pants curve it crosses (its core). Twist words
//! are kept in a normal form: twists about curves the base does not cross are
//! isotopically trivial and are dropped, adjacent entries on the same curve are
//! merged, and zero powers disappear.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::surface::{CurveId, CurveKind, GraphAutomorphism, PantsGraph, Surface};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Base {
    Pants(CurveId),
    Dual(CurveId),
}

impl Base {
    /// The pants curve the base is built around.
    pub fn anchor(self) -> CurveId {
        match self {
            Base::Pants(c) | Base::Dual(c) => c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Curve {
    base: Base,
    word: Vec<(CurveId, i64)>,
}

impl Curve {
    pub fn new(base: Base, word: Vec<(CurveId, i64)>) -> Self {
        let word = normalize(base, &word);
        Curve { base, word }
    }

    pub fn pants(c: CurveId) -> Self {
        Curve { base: Base::Pants(c), word: Vec::new() }
    }

    pub fn dual(core: CurveId) -> Self {
        Curve { base: Base::Dual(core), word: Vec::new() }
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn word(&self) -> &[(CurveId, i64)] {
        &self.word
    }

    /// Total twist power along `c`.
    pub fn twist_power(&self, c: CurveId) -> i64 {
        self.word.iter().filter(|(id, _)| *id == c).map(|(_, k)| k).sum()
    }

    /// Pants curves this curve crosses.
    pub fn support(&self) -> Vec<CurveId> {
        match self.base {
            Base::Pants(_) => Vec::new(),
            Base::Dual(core) => alloc::vec![core],
        }
    }

    pub fn weight(&self) -> u64 {
        self.word.iter().map(|(_, k)| k.unsigned_abs()).sum()
    }

    /// Checks that every curve the literal names exists on the graph and that a
    /// dual base sits on an interior curve.
    pub fn validate(&self, graph: &PantsGraph) -> Result<()> {
        let anchor = self.base.anchor();
        match (self.base, graph.curve_kind(anchor)) {
            (_, None) => Err(Error::UnknownCurve(anchor)),
            (Base::Dual(_), Some(CurveKind::Boundary)) => Err(Error::WordNotSupported(anchor)),
            _ => Ok(()),
        }
    }
}

/// Merge, drop zero powers and drop twists about curves `base` does not cross.
/// Idempotent.
pub fn normalize(base: Base, word: &[(CurveId, i64)]) -> Vec<(CurveId, i64)> {
    let crossed = |c: CurveId| matches!(base, Base::Dual(core) if core == c);
    let mut out: Vec<(CurveId, i64)> = Vec::new();
    for &(c, k) in word {
        if !crossed(c) || k == 0 {
            continue;
        }
        match out.last_mut() {
            Some(last) if last.0 == c => {
                last.1 += k;
                if last.1 == 0 {
                    out.pop();
                }
            }
            _ => out.push((c, k)),
        }
    }
    out
}

pub fn intersection_with_pants_curve(graph: &PantsGraph, c: &Curve, with: CurveId) -> Result<u32> {
    match c.base {
        Base::Pants(_) => Ok(0),
        Base::Dual(core) if core != with => Ok(0),
        Base::Dual(core) => {
            let inc = graph.incidences(core).ok_or(Error::UnknownCurve(core))?;
            match inc.as_slice() {
                [(a, _), (b, _)] if a == b => Ok(1),
                [_, _] => Ok(2),
                _ => Err(Error::WordNotSupported(core)),
            }
        }
    }
}

pub fn apply_twist(c: &Curve, along: CurveId, k: i64) -> Curve {
    let mut word = c.word.clone();
    word.push((along, k));
    Curve::new(c.base, word)
}

/// One entry of a twist schedule: the `power`-th power of the positive Dehn
/// twist about `curve`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwistEntry {
    pub curve: CurveId,
    pub power: i64,
}

pub type EntryFn = Arc<dyn Fn(u64) -> TwistEntry + Send + Sync>;

/// Entries are indexed from 1. `Lazy` schedules are probed up to `horizon`.
#[derive(Clone)]
pub enum Schedule {
    Finite(Vec<TwistEntry>),
    Lazy { entry: EntryFn, horizon: u64 },
}

impl fmt::Debug for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::Finite(v) => f.debug_tuple("Finite").field(v).finish(),
            Schedule::Lazy { horizon, .. } => f.debug_struct("Lazy").field("horizon", horizon).finish_non_exhaustive(),
        }
    }
}

/// A composition of twists about pairwise disjoint pants curves.
#[derive(Debug, Clone)]
pub struct MappingClass {
    pub schedule: Schedule,
    pub label: String,
}

impl MappingClass {
    pub fn identity() -> Self {
        MappingClass { schedule: Schedule::Finite(Vec::new()), label: "id".to_string() }
    }

    pub fn twist(curve: CurveId, power: i64) -> Self {
        MappingClass {
            schedule: Schedule::Finite(alloc::vec![TwistEntry { curve, power }]),
            label: alloc::format!("tw({curve},{power})"),
        }
    }

    pub fn lazy(label: &str, horizon: u64, entry: impl Fn(u64) -> TwistEntry + Send + Sync + 'static) -> Self {
        MappingClass { schedule: Schedule::Lazy { entry: Arc::new(entry), horizon }, label: label.to_string() }
    }

    /// `entry(n)` for `n ≥ 1`, or `None` past the end.
    pub fn entry(&self, n: u64) -> Option<TwistEntry> {
        match &self.schedule {
            Schedule::Finite(v) => n.checked_sub(1).and_then(|i| v.get(i as usize)).copied(),
            Schedule::Lazy { entry, horizon } => (n >= 1 && n <= *horizon).then(|| entry(n)),
        }
    }

    pub fn len(&self) -> u64 {
        match &self.schedule {
            Schedule::Finite(v) => v.len() as u64,
            Schedule::Lazy { horizon, .. } => *horizon,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Schedule restricted to its first `n` entries.
    pub fn truncated(&self, n: u64) -> MappingClass {
        let entries = (1..=n.min(self.len())).filter_map(|i| self.entry(i)).collect();
        MappingClass { schedule: Schedule::Finite(entries), label: alloc::format!("{}[..{n}]", self.label) }
    }

    pub fn inverse(&self) -> MappingClass {
        let label = alloc::format!("{}^-1", self.label);
        match &self.schedule {
            Schedule::Finite(v) => MappingClass {
                schedule: Schedule::Finite(
                    v.iter().rev().map(|e| TwistEntry { curve: e.curve, power: -e.power }).collect(),
                ),
                label,
            },
            Schedule::Lazy { entry, horizon } => {
                let entry = entry.clone();
                MappingClass {
                    schedule: Schedule::Lazy {
                        entry: Arc::new(move |n| {
                            let e = entry(n);
                            TwistEntry { curve: e.curve, power: -e.power }
                        }),
                        horizon: *horizon,
                    },
                    label,
                }
            }
        }
    }

    /// Entries about curves in `support`, in schedule order.
    pub fn entries_meeting(&self, support: &[CurveId]) -> Result<Vec<TwistEntry>> {
        let mut out = Vec::new();
        for n in 1..=self.len() {
            let Some(e) = self.entry(n) else { break };
            if support.contains(&e.curve) {
                out.push(e);
                if matches!(self.schedule, Schedule::Lazy { .. }) && out.len() > support.len() {
                    return Err(Error::InfiniteInteraction(support.len()));
                }
            }
        }
        Ok(out)
    }
}

pub fn apply_mapping_class(c: &Curve, m: &MappingClass) -> Result<Curve> {
    let hits = m.entries_meeting(&c.support())?;
    // f = τ_1 ∘ τ_2 ∘ …: the innermost factor acts first.
    let mut word = c.word.clone();
    word.extend(hits.iter().rev().map(|e| (e.curve, e.power)));
    Ok(Curve::new(c.base, word))
}

/// Twist schedule `n ↦ (ε_n, t_n)` with `t_n = ⌊log|log ε_n| / ε_n⌋ + 1`.
///
/// `ε_n` is stored through its logarithm: the schedules of interest underflow
/// `f64` long before `n = 50`.
#[derive(Clone)]
pub struct TwistSchedule {
    log_eps: Arc<dyn Fn(u64) -> f64 + Send + Sync>,
    pub count: u64,
    pub label: String,
}

impl fmt::Debug for TwistSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwistSchedule").field("label", &self.label).field("count", &self.count).finish()
    }
}

/// Largest integer below which `f64` still resolves unit steps.
const EXACT_INT: f64 = 4_503_599_627_370_496.0;

impl TwistSchedule {
    pub fn new(label: &str, count: u64, log_eps: impl Fn(u64) -> f64 + Send + Sync + 'static) -> Self {
        TwistSchedule { log_eps: Arc::new(log_eps), count, label: label.to_string() }
    }

    /// `ε_n = e^{−(n²+n+1)}`, halfway (in the exponent) between the bounds.
    pub fn midpoint(count: u64) -> Self {
        Self::new("midpoint", count, |n| {
            let n = n as f64;
            -(n * n + n + 1.0)
        })
    }

    pub fn log_eps(&self, n: u64) -> f64 {
        (self.log_eps)(n)
    }

    /// May underflow to 0 for large `n`.
    pub fn eps(&self, n: u64) -> f64 {
        libm::exp(self.log_eps(n))
    }

    fn ratio(&self, n: u64) -> f64 {
        // log|log ε| / ε, computed as e^{log log|log ε| − log ε}.
        libm::exp(libm::log(libm::log(-self.log_eps(n)).max(f64::MIN_POSITIVE)) - self.log_eps(n))
    }

    /// `t_n`, exact while below 2^52.
    pub fn twist_count(&self, n: u64) -> f64 {
        libm::floor(self.ratio(n)) + 1.0
    }

    pub fn twist_power(&self, n: u64) -> Option<i64> {
        let t = self.twist_count(n);
        (t < EXACT_INT).then_some(t as i64)
    }

    /// Twist displacement `t_n·ε_n`. Past 2^52 the rounding of `t_n` is below
    /// resolution and the upper value `log|log ε_n| + ε_n` is returned.
    pub fn displacement(&self, n: u64) -> f64 {
        let x = self.ratio(n);
        if x < EXACT_INT {
            (libm::floor(x) + 1.0) * self.eps(n)
        } else {
            libm::log(-self.log_eps(n)) + self.eps(n)
        }
    }

    /// `e^{−(n+1)²} < ε_n < e^{−n²}` for `n = 1..=count`.
    pub fn check_invariants(&self) -> Result<()> {
        for n in 1..=self.count {
            let l = self.log_eps(n);
            let m = n as f64;
            if !(l < -m * m && l > -(m + 1.0) * (m + 1.0)) {
                return Err(Error::BadParameter(alloc::format!("log ε_{n} = {l} outside (−(n+1)², −n²)")));
            }
        }
        Ok(())
    }

    /// The mapping class `τ_1^{t_1} ∘ τ_2^{t_2} ∘ …` about `curve(n)`, available
    /// while every power fits an `i64`.
    pub fn mapping_class(&self, curve: impl Fn(u64) -> CurveId + Send + Sync + 'static) -> Result<MappingClass> {
        let mut entries = Vec::new();
        for n in 1..=self.count {
            let power = self
                .twist_power(n)
                .ok_or_else(|| Error::BadParameter(alloc::format!("t_{n} exceeds integer range")))?;
            entries.push(TwistEntry { curve: curve(n), power });
        }
        Ok(MappingClass { schedule: Schedule::Finite(entries), label: self.label.clone() })
    }
}

/// Anything that carries curves to curves.
pub trait CurveMap {
    fn image(&self, c: &Curve) -> Result<Curve>;
}

impl CurveMap for MappingClass {
    fn image(&self, c: &Curve) -> Result<Curve> {
        apply_mapping_class(c, self)
    }
}

impl CurveMap for GraphAutomorphism {
    fn image(&self, c: &Curve) -> Result<Curve> {
        let base = match c.base {
            Base::Pants(id) => Base::Pants(self.map_curve(id)),
            Base::Dual(id) => Base::Dual(self.map_curve(id)),
        };
        Ok(Curve::new(base, c.word.iter().map(|&(id, k)| (self.map_curve(id), k)).collect()))
    }
}

/// Pants and dual curves anchored on the window, with twist powers about the
/// core up to `max_weight`, in the order `Pants(C)`, `Dual(C)`, then twists
/// `1, −1, 2, −2, …`.
pub fn enumerate_curves(s: &Surface, window: &[CurveId], max_weight: u32) -> Result<Vec<Curve>> {
    let mut out = Vec::new();
    let mut seen = Vec::new();
    for &c in window {
        if seen.contains(&c) {
            continue;
        }
        seen.push(c);
        match s.graph.curve_kind(c) {
            None => return Err(Error::UnknownCurve(c)),
            Some(CurveKind::Boundary) => out.push(Curve::pants(c)),
            Some(CurveKind::Interior) => {
                out.push(Curve::pants(c));
                let dual = Curve::dual(c);
                out.push(dual.clone());
                for k in 1..=max_weight as i64 {
                    out.push(apply_twist(&dual, c, k));
                    out.push(apply_twist(&dual, c, -k));
                }
            }
        }
    }
    Ok(out)
}

fn fmt_id(f: &mut fmt::Formatter<'_>, c: CurveId) -> fmt::Result {
    write!(f, "C:{c}")
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.base {
            Base::Pants(c) => fmt_id(f, c)?,
            Base::Dual(c) => write!(f, "D:piece:{c}")?,
        }
        if !self.word.is_empty() {
            f.write_str("~[")?;
            for (n, &(c, k)) in self.word.iter().enumerate() {
                if n > 0 {
                    f.write_str(",")?;
                }
                f.write_str("(")?;
                fmt_id(f, c)?;
                write!(f, ",{k})")?;
            }
            f.write_str("]")?;
        }
        Ok(())
    }
}

fn parse_pants_id(s: &str) -> Result<CurveId> {
    s.trim().strip_prefix("C:").ok_or_else(|| Error::BadLiteral(s.to_string()))?.parse()
}

impl FromStr for Curve {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::BadLiteral(text.to_string());
        let text = text.trim();
        let (head, tail) = match text.split_once('~') {
            Some((h, t)) => (h, Some(t)),
            None => (text, None),
        };
        let base = if let Some(rest) = head.strip_prefix("D:piece:") {
            Base::Dual(rest.parse().map_err(|_| bad())?)
        } else {
            Base::Pants(parse_pants_id(head).map_err(|_| bad())?)
        };
        let mut word = Vec::new();
        if let Some(tail) = tail {
            let inner = tail.trim().strip_prefix('[').and_then(|t| t.strip_suffix(']')).ok_or_else(bad)?;
            let mut rest = inner.trim();
            while !rest.is_empty() {
                let body = rest.strip_prefix('(').ok_or_else(bad)?;
                let (entry, after) = body.split_once(')').ok_or_else(bad)?;
                let (id, power) = entry.split_once(',').ok_or_else(bad)?;
                let id = parse_pants_id(id).map_err(|_| bad())?;
                let power = power.trim().parse::<i64>().map_err(|_| bad())?;
                word.push((id, power));
                rest = after.trim_start();
                if let Some(r) = rest.strip_prefix(',') {
                    rest = r.trim_start();
                    if rest.is_empty() {
                        return Err(bad());
                    }
                }
            }
        }
        Ok(Curve::new(base, word))
    }
}
