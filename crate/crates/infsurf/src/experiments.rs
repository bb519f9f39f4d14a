//! Experiment registry. Each experiment builds its surfaces, runs the
//! estimates and records bounds, witnesses, verdicts and a table.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use infsurf_core::curve::{enumerate_curves, apply_twist, Curve, MappingClass, TwistSchedule};
use infsurf_core::holonomy::geodesic_length;
use infsurf_core::hyp::quad_modulus;
use infsurf_core::metrics::{
    collar_angle, flute_divergence, gap_value, ladder_divergence, ls_constant_lower, ls_constant_lower_marked,
    metric_chain_check, qc_twist_lower_bound, schedule_qc_divergence, schedule_reference_bound,
    schedule_twist_upper_bound, small_twist_rate, sup_twist_ratio, translation_gap, tripod_divergence,
    twist_divergence, twist_upper_bound, two_lipschitz_check, wolpert_check, ChainMode, GapGrid, Interval,
    Verdict as ChainVerdict, GAP_RESOLUTION,
};
use infsurf_core::surface::{
    build_template, fn_bounds_certificate, twist_deform, CurveId, GraphAutomorphism, LengthBoundsCheck, Rule,
    Surface, TemplateKind,
};
use infsurf_core::Error as CoreError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{CliError, Result};
use crate::report::{Cell, Report, Table};

type Body = fn(&mut Ctx) -> std::result::Result<(), CoreError>;

pub struct Entry {
    pub id: &'static str,
    pub anchor: &'static str,
    pub defaults: &'static [(&'static str, &'static str)],
    body: Body,
}

pub static REGISTRY: [Entry; 11] = [
    Entry {
        id: "ex-flute-divergence",
        anchor: "l_{H_0}(C_i)=1 and l_{H_1}(C_i)=1/i: the identity is not length-spectrum bounded",
        defaults: &[("N", "100")],
        body: flute,
    },
    Entry {
        id: "ex-ladder-translation",
        anchor: "f = tau_1 o tau_2 o ... on a translation-invariant ladder: l_{H_1}(D_i)/l_{H_0}(D_i) -> infinity",
        defaults: &[("N", "100"), ("length", "1"), ("twist", "0")],
        body: ladder,
    },
    Entry {
        id: "prop-twist-divergence",
        anchor: "powers tau_i of twists along C_i with l_{H_0}(tau_i(D_i)) > i give non-equivalent structures",
        defaults: &[("N", "100")],
        body: twist_powers,
    },
    Entry {
        id: "ex-tripod-rotation",
        anchor: "2pi/3 rotation of the tripod with lengths 1/i, i, i^2 is not length-spectrum bounded",
        defaults: &[("N", "100")],
        body: tripod,
    },
    Entry {
        id: "prop-small-twist",
        anchor: "twists about curves with l_H(alpha_n) -> 0 satisfy d_ls(tau_n(H), H) -> 0",
        defaults: &[("exponents", "2,3,4,5,6"), ("max_weight", "4"), ("C", "10")],
        body: small_twist,
    },
    Entry {
        id: "ex-noncompact-ball",
        anchor: "twists x_n along the translates C_n lie in one ball and are pairwise K apart",
        defaults: &[("length", "1"), ("twist", "0.25"), ("span", "5"), ("max_weight", "4"), ("C", "10")],
        body: noncompact_ball,
    },
    Entry {
        id: "prop-not-proper",
        anchor: "under 1/M <= l_H(C_i) <= M the length-spectrum Teichmuller space is not proper",
        defaults: &[
            ("M", "2"),
            ("pieces", "8"),
            ("length_step", "0.25"),
            ("twist_steps", "8"),
            ("max_weight", "3"),
            ("C", "10"),
        ],
        body: not_proper,
    },
    Entry {
        id: "lemma-four-holed-gap",
        anchor: "four-holed spheres with 1/M <= l <= M: max of l(tau^{+-1} alpha)/l(alpha) and inverses exceeds K > 1",
        defaults: &[("M", "2"), ("length_step", "0.25"), ("twist_steps", "8")],
        body: four_holed_gap,
    },
    Entry {
        id: "lemma-qc-twist",
        anchor: "Mod(H(-1,0,1,infinity)) = 1 and the dilatation K(t) of a collar twist tends to infinity",
        defaults: &[("theta_deg", "30"), ("t_max", "10")],
        body: qc_twist,
    },
    Entry {
        id: "prop-infinite-twist",
        anchor: "e^{-(n+1)^2} < eps_n < e^{-n^2}: a length-spectrum bounded twist schedule that is not quasiconformal",
        defaults: &[("N", "50")],
        body: infinite_twist,
    },
    Entry {
        id: "check-metric-chain",
        anchor: "d_ls <= d_qc <= d_bL <= C d_qc, and log l(alpha) is 2-Lipschitz for d_ls",
        defaults: &[("pairs", "100"), ("seed", "7"), ("max_weight", "3"), ("C", "10"), ("N_ft", "1")],
        body: metric_chain,
    },
];

pub fn list_experiments() -> Vec<(&'static str, &'static str)> {
    REGISTRY.iter().map(|e| (e.id, e.anchor)).collect()
}

pub fn lookup(id: &str) -> Result<&'static Entry> {
    REGISTRY.iter().find(|e| e.id == id).ok_or_else(|| CliError::UnknownExperiment(id.to_string()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub id: String,
    pub params: BTreeMap<String, String>,
    pub precision: Option<f64>,
    pub jobs: usize,
}

impl ExperimentSpec {
    pub fn new(id: &str) -> Self {
        ExperimentSpec { id: id.to_string(), params: BTreeMap::new(), precision: None, jobs: 1 }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }
}

pub const DEFAULT_PRECISION: f64 = 1e-9;

struct Ctx {
    params: BTreeMap<String, String>,
    precision: f64,
    jobs: usize,
    report: Report,
}

fn bad(msg: String) -> CoreError {
    CoreError::BadParameter(msg)
}

impl Ctx {
    fn raw(&self, key: &str) -> &str {
        &self.params[key]
    }

    fn f64(&self, key: &str) -> std::result::Result<f64, CoreError> {
        let v: f64 = self.raw(key).parse().map_err(|_| bad(format!("{key} = `{}` is not a number", self.raw(key))))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad(format!("{key} must be finite")))
        }
    }

    fn int(&self, key: &str, min: i64) -> std::result::Result<i64, CoreError> {
        let v: i64 = self.raw(key).parse().map_err(|_| bad(format!("{key} = `{}` is not an integer", self.raw(key))))?;
        if v < min {
            return Err(bad(format!("{key} = {v} is below {min}")));
        }
        Ok(v)
    }

    fn list(&self, key: &str) -> std::result::Result<Vec<f64>, CoreError> {
        self.raw(key)
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad(format!("{key}: `{s}` is not a number"))))
            .collect()
    }

    fn pool(&self) -> std::result::Result<rayon::ThreadPool, CoreError> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs.max(1))
            .build()
            .map_err(|e| bad(format!("thread pool: {e}")))
    }
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<Report> {
    let entry = lookup(&spec.id)?;
    let mut params: BTreeMap<String, String> =
        entry.defaults.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    for (k, v) in &spec.params {
        if k == "precision" {
            continue;
        }
        if !params.contains_key(k) {
            let known: Vec<&str> = entry.defaults.iter().map(|(k, _)| *k).collect();
            return Err(CliError::BadParams(format!("`{k}` is not a parameter of {} (known: {})", entry.id, known.join(", "))));
        }
        params.insert(k.clone(), v.clone());
    }
    let precision = match (spec.precision, spec.params.get("precision")) {
        (Some(p), _) => p,
        (None, Some(s)) => s.parse().map_err(|_| CliError::BadParams(format!("precision = `{s}`")))?,
        (None, None) => DEFAULT_PRECISION,
    };
    if !(precision > 0.0 && precision < 1.0) {
        return Err(CliError::BadParams(format!("precision {precision} outside (0, 1)")));
    }
    let mut inputs = params.clone();
    inputs.insert("precision".to_string(), format!("{precision:e}"));
    let mut ctx = Ctx { params, precision, jobs: spec.jobs.max(1), report: Report::new(entry.id, entry.anchor, inputs) };
    let start = Instant::now();
    match (entry.body)(&mut ctx) {
        Ok(()) => {}
        Err(e @ CoreError::BadParameter(_)) => return Err(CliError::BadParams(e.to_string())),
        Err(e) => ctx.report.verdict("completed", false, format!("{}: {e}", e.code())),
    }
    ctx.report.wall_time_s = start.elapsed().as_secs_f64();
    ctx.report.finish();
    Ok(ctx.report)
}

fn d(k: f64) -> f64 {
    0.5 * k.ln()
}

fn len(s: &Surface, c: &Curve) -> std::result::Result<f64, CoreError> {
    Ok(geodesic_length(s, c)?.value)
}

fn indices(n: i64) -> Vec<i64> {
    (1..=n).collect()
}

fn flute(cx: &mut Ctx) -> std::result::Result<(), CoreError> {
    let n = cx.int("N", 1)?;
    let (h0, h1, w) = flute_divergence(&indices(n))?;
    let mut t = Table::new(&["i", "curve", "l_h0", "l_h1", "ratio", "g"]);
    for (k, c) in w.curves.iter().enumerate() {
        let (a, b) = (len(&h0, c)?, len(&h1, c)?);
        t.push(vec![w.indices[k].into(), c.to_string().into(), a.into(), b.into(), w.ratios[k].into(), w.g[k].into()]);
    }
    let est = ls_constant_lower(&h0, &h1, &w.curves)?;
    let r = &mut cx.report;
    r.bound("d_ls", est.d_lower(), f64::INFINITY, &est.certificate);
    let witness = est.witness.clone().expect("non-empty curve set");
    r.witness(&witness, est.lower);
    let want = d(n as f64);
    r.verdict(
        "d_ls lower bound equals log(N)/2",
        (est.d_lower() - want).abs() <= cx.precision,
        format!("{} vs {want}", est.d_lower()),
    );
    r.verdict("witness is C_N", witness == Curve::pants(CurveId::c(n)), witness.to_string());
    r.verdict("ratio(C_i) >= i on every probe", w.holds(), "");
    r.set_table(t);
    Ok(())
}

fn ladder(cx: &mut Ctx) -> std::result::Result<(), CoreError> {
    let n = cx.int("N", 2)?;
    let (h0, f, w) = ladder_divergence(&indices(n), cx.f64("length")?, cx.f64("twist")?)?;
    let mut t = Table::new(&["i", "curve", "image", "l_h0", "l_h1", "ratio", "g"]);
    let mut finite = true;
    for (k, c) in w.curves.iter().enumerate() {
        let l0 = len(&h0, c)?;
        t.push(vec![
            w.indices[k].into(),
            c.to_string().into(),
            w.images[k].to_string().into(),
            l0.into(),
            (w.ratios[k] * l0).into(),
            w.ratios[k].into(),
            w.g[k].into(),
        ]);
        finite &= f.entries_meeting(&c.support())?.len() == 1;
    }
    let est = ls_constant_lower_marked(&h0, &h0, &f.inverse(), &w.curves)?;
    let r = &mut cx.report;
    r.bound("d_ls", est.d_lower(), f64::INFINITY, &est.certificate);
    r.witness(est.witness.as_ref().expect("non-empty"), est.lower);
    r.verdict("ratio(D_i) >= hexagon lower bound g(i), g unbounded", w.holds(), format!("g(N) = {}", w.g.last().unwrap()));
    r.verdict("each D_i meets exactly one twist of f", finite, "");
    r.set_table(t);
    Ok(())
}

fn twist_powers(cx: &mut Ctx) -> std::result::Result<(), CoreError> {
    let n = cx.int("N", 2)?;
    let (h0, f, w) = twist_divergence(&indices(n))?;
    let mut t = Table::new(&["i", "power", "curve", "image", "l", "l_image", "ratio", "g"]);
    for (k, c) in w.curves.iter().enumerate() {
        let l = len(&h0, c)?;
        let core = CurveId::c(w.indices[k]);
        t.push(vec![
            w.indices[k].into(),
            w.images[k].twist_power(core).into(),
            c.to_string().into(),
            w.images[k].to_string().into(),
            l.into(),
            (w.ratios[k] * l).into(),
            w.ratios[k].into(),
            w.g[k].into(),
        ]);
    }
    let est = ls_constant_lower_marked(&h0, &h0, &f, &w.curves)?;
    let r = &mut cx.report;
    r.bound("d_ls", est.d_lower(), f64::INFINITY, &est.certificate);
    r.witness(est.witness.as_ref().expect("non-empty"), est.lower);
    r.verdict("ratio(D_i) >= i on every probe", w.holds(), "");
    r.set_table(t);
    Ok(())
}

fn tripod(cx: &mut Ctx) -> std::result::Result<(), CoreError> {
    let n = cx.int("N", 2)?;
    let (h0, w) = tripod_divergence(&indices(n))?;
    let mut t = Table::new(&["i", "curve", "image", "l", "l_image", "ratio", "g"]);
    let mut cubic = true;
    for (k, c) in w.curves.iter().enumerate() {
        let l = len(&h0, c)?;
        let i = w.indices[k] as f64;
        cubic &= (w.ratios[k] - i * i * i).abs() <= cx.precision * i * i * i;
        t.push(vec![
            w.indices[k].into(),
            c.to_string().into(),
            w.images[k].to_string().into(),
            l.into(),
            (w.ratios[k] * l).into(),
            w.ratios[k].into(),
            w.g[k].into(),
        ]);
    }
    let back = GraphAutomorphism::TripodRotation(1).inverse();
    let est = ls_constant_lower_marked(&h0, &h0, &back, &w.curves)?;
    let r = &mut cx.report;
    r.bound("d_ls", est.d_lower(), f64::INFINITY, &est.certificate);
    r.witness(est.witness.as_ref().expect("non-empty"), est.lower);
    r.verdict("ratio(C_i) >= i^2 on every probe", w.holds(), "");
    r.verdict("ratio(C_i) = i^3", cubic, "");
    r.set_table(t);
    Ok(())
}

/// `½·log` of the collar-twist dilatation bound for `k` twists about a curve of length `l`.
fn qc_lower(l: f64, k: i64) -> std::result::Result<f64, CoreError> {
    Ok(d(qc_twist_lower_bound(k.unsigned_abs() as f64 * l, collar_angle(l)?)?))
}

fn chain_ok(d_ls: Interval, d_qc: Interval, c: f64, n_ft: Option<f64>) -> std::result::Result<(bool, String), CoreError> {
    let mut checks = metric_chain_check(d_ls, d_qc, Interval::UNKNOWN, c, 0.0, ChainMode::Infinite)?.checks;
    if let Some(n) = n_ft {
        checks.extend(metric_chain_check(d_ls, d_qc, Interval::UNKNOWN, c, n, ChainMode::FiniteType)?.checks);
    }
    let bad: Vec<&str> = checks.iter().filter(|c| c.verdict == ChainVerdict::Violated).map(|c| c.relation).collect();
    let verified = checks.iter().filter(|c| c.verdict == ChainVerdict::Verified).count();
    Ok((bad.is_empty(), format!("{verified} verified, {} violated {:?}", bad.len(), bad)))
}

fn small_twist(cx: &mut Ctx) -> std::result::Result<(), CoreError> {
    let exps = cx.list("exponents")?;
    let max_weight = cx.int("max_weight", 1)? as u32;
    let c_thurston = cx.f64("C")?;
    let core = CurveId::c(0);
    let mut t = Table::new(&["exponent", "eps", "curve", "l", "l_twisted", "ratio"]);
    let mut sups = Vec::new();
    let (mut slack_ok, mut sandwich_ok, mut wolpert_ok, mut chain_all) = (true, true, true, true);
    let mut literal = Vec::new();
    for &e in &exps {
        let eps = (-e).exp();
        let s = build_template(
            TemplateKind::Ladder,
            Rule::Table { default: 1.0, entries: vec![(core, eps)] },
            Rule::Const(0.0),
        )?;
        let curves = enumerate_curves(&s, &[CurveId::c(-1), core, CurveId::c(1)], max_weight)?;
        let mut pairs = Vec::with_capacity(curves.len());
        for c in &curves {
            let (l, lt) = (len(&s, c)?, len(&s, &apply_twist(c, core, -1))?);
            pairs.push((l, lt));
            t.push(vec![e.into(), eps.into(), c.to_string().into(), l.into(), lt.into(), (lt / l).max(l / lt).into()]);
        }
        let (sup, witness) = sup_twist_ratio(&s, core, &curves)?;
        let upper = twist_upper_bound(&s, &MappingClass::twist(core, 1))?;
        let rate = small_twist_rate(eps)?;
        slack_ok &= sup <= 1.0 + 10.0 * (rate - 1.0);
        sandwich_ok &= sup <= upper.upper;
        wolpert_ok &= wolpert_check(upper.upper, &pairs)?.pass();
        if sup <= rate {
            literal.push(e);
        }
        let (ok, _) = chain_ok(Interval::new(d(sup), upper.d_upper()), Interval::new(qc_lower(eps, 1)?, f64::INFINITY), c_thurston, None)?;
        chain_all &= ok;
        cx.report.bound(&format!("d_ls(tau(H), H) at eps = e^-{e}"), d(sup), upper.d_upper(), &upper.certificate);
        cx.report.witness(&witness, sup);
        sups.push(sup);
    }
    let decreasing = sups.windows(2).all(|w| w[1] < w[0]);
    let r = &mut cx.report;
    r.verdict("sup ratio strictly decreasing in the exponent", decreasing, format!("{sups:?}"));
    r.verdict("sup ratio <= 1 + 10 eps/|log eps|", slack_ok, "");
    r.verdict("sup ratio <= analytic twist bound", sandwich_ok, "");
    r.verdict("length ratios within the twist bound K", wolpert_ok, "");
    r.verdict("metric chain has no violations", chain_all, "");
    r.note(format!("literal bound 1 + eps/|log eps| holds at exponents {literal:?} of {exps:?}"));
    r.set_table(t);
    Ok(())
}

fn noncompact_ball(cx: &mut Ctx) -> std::result::Result<(), CoreError> {
    let s = build_template(TemplateKind::Ladder, Rule::Const(cx.f64("length")?), Rule::Const(cx.f64("twist")?))?;
    let span = cx.int("span", 1)?;
    let max_weight = cx.int("max_weight", 1)? as u32;
    let c_thurston = cx.f64("C")?;
    let k = translation_gap(&s, 0, 1)?;
    let mut t = Table::new(&["m", "n", "gap"]);
    let mut spread: f64 = 0.0;
    for m in -span..=span {
        for n in -span..=span {
            if m != n && (m - n).abs() <= span {
                let g = translation_gap(&s, m, n)?;
                spread = spread.max((g - k).abs());
                t.push(vec![m.into(), n.into(), g.into()]);
            }
        }
    }
    let core = CurveId::c(0);
    let upper = twist_upper_bound(&s, &MappingClass::twist(core, 1))?;
    let curves = enumerate_curves(&s, &[CurveId::c(-1), core, CurveId::c(1)], max_weight)?;
    let (sup, witness) = sup_twist_ratio(&s, core, &curves)?;
    let radius = upper.d_upper();
    let (chain, detail) = chain_ok(
        Interval::new(d(sup), radius),
        Interval::new(qc_lower(s.length(core)?, 1)?, f64::INFINITY),
        c_thurston,
        None,
    )?;
    let r = &mut cx.report;
    r.bound("K", k, k, "translation-gap");
    r.bound("d_ls(x, x_n)", d(sup), radius, &upper.certificate);
    r.bound("d_ls(x_m, x_n)", 0.5 * k, 2.0 * radius, "gap/triangle");
    r.witness(&witness, sup);
    r.verdict("K > 0", k > 0.0, format!("{k}"));
    r.verdict("K constant over |m - n| <= span", spread <= cx.precision, format!("max deviation {spread:e}"));
    r.verdict("x_n inside the ball: sup lower bound <= R", d(sup) <= radius, format!("R = {radius}"));
    r.verdict("pairwise gap K/2 <= 2R", 0.5 * k <= 2.0 * radius, "");
    r.verdict("metric chain has no violations", chain, detail);
    r.set_table(t);
    Ok(())
}

/// Deterministic lengths in `[1/M, M]`.
fn lm_lengths(m: f64, range: std::ops::RangeInclusive<i64>) -> Vec<(CurveId, f64)> {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    range.map(|i| (CurveId::c(i), 1.0 / m + (m - 1.0 / m) * (i as f64 * phi).rem_euclid(1.0))).collect()
}

fn gap_scan(cx: &Ctx, grid: &GapGrid) -> std::result::Result<Vec<f64>, CoreError> {
    let values: Vec<std::result::Result<f64, CoreError>> =
        cx.pool()?.install(|| (0..grid.len()).into_par_iter().map(|i| gap_value(&grid.point(i))).collect());
    let mut out = Vec::with_capacity(values.len());
    for v in values {
        let v = v?;
        if v - 1.0 < GAP_RESOLUTION {
            return Err(CoreError::GridTooCoarse(v));
        }
        out.push(v);
    }
    Ok(out)
}

fn argmin(values: &[f64]) -> (usize, f64) {
    values.iter().enumerate().fold((0, f64::INFINITY), |b, (i, &v)| if v < b.1 { (i, v) } else { b })
}

fn not_proper(cx: &mut Ctx) -> std::result::Result<(), CoreError> {
    let m = cx.f64("M")?;
    let pieces = cx.int("pieces", 2)?;
    let max_weight = cx.int("max_weight", 1)? as u32;
    let c_thurston = cx.f64("C")?;
    let grid = GapGrid::new(m, cx.f64("length_step")?, cx.int("twist_steps", 1)? as u32)?;
    let s = build_template(
        TemplateKind::Ladder,
        Rule::Table { default: 1.0, entries: lm_lengths(m, -1..=2 * pieces + 1) },
        Rule::Const(0.0),
    )?;
    let probe: Vec<CurveId> = (-1..=2 * pieces + 1).map(CurveId::c).collect();
    let lm = matches!(fn_bounds_certificate(&s, m, &probe)?, LengthBoundsCheck::Certificate { .. });
    let betas: Vec<CurveId> = (1..=pieces).map(|i| CurveId::c(2 * i)).collect();
    let mut t = Table::new(&["kind", "i", "j", "curve", "lower", "upper"]);
    let (mut radius, mut inside, mut chain_all) = (0.0f64, true, true);
    for (i, &b) in betas.iter().enumerate() {
        let upper = twist_upper_bound(&s, &MappingClass::twist(b, 1))?;
        let curves = enumerate_curves(&s, &[CurveId::c(b.index - 1), b, CurveId::c(b.index + 1)], max_weight)?;
        let (sup, witness) = sup_twist_ratio(&s, b, &curves)?;
        radius = radius.max(upper.d_upper());
        inside &= d(sup) <= upper.d_upper();
        let (ok, _) = chain_ok(
            Interval::new(d(sup), upper.d_upper()),
            Interval::new(qc_lower(s.length(b)?, 1)?, f64::INFINITY),
            c_thurston,
            None,
        )?;
        chain_all &= ok;
        t.push(vec!["piece".into(), (i + 1).into(), Cell::Empty, witness.to_string().into(), d(sup).into(), upper.d_upper().into()]);
    }
    // x_i and x_j differ at the dual of β_i only through τ_i.
    let mut own = Vec::with_capacity(betas.len());
    for &b in &betas {
        let alpha = Curve::dual(b);
        own.push(0.5 * (len(&s, &apply_twist(&alpha, b, -1))? / len(&s, &alpha)?).ln().abs());
    }
    let mut min_pair = f64::INFINITY;
    for i in 0..betas.len() {
        for j in 0..betas.len() {
            if i != j {
                let (g, at) = if own[i] >= own[j] { (own[i], betas[i]) } else { (own[j], betas[j]) };
                min_pair = min_pair.min(g);
                t.push(vec![
                    "pair".into(),
                    (i + 1).into(),
                    (j + 1).into(),
                    Curve::dual(at).to_string().into(),
                    g.into(),
                    (2.0 * radius).into(),
                ]);
            }
        }
    }
    let values = gap_scan(cx, &grid)?;
    let (wi, k_grid) = argmin(&values);
    let r = &mut cx.report;
    r.bound("R", 0.0, radius, "dehn-twist-collar");
    r.bound("K (four-holed grid)", k_grid, k_grid, "grid-minimum");
    r.bound("d_ls(x_i, x_j)", min_pair, 2.0 * radius, "dual-curve/triangle");
    let wp = grid.point(wi);
    r.witness(Curve::dual(CurveId::c(0)), k_grid);
    r.note(format!("grid minimum at index {wi}: core {}, boundary {:?}, twist {}", wp.core, wp.boundary, wp.twist));
    r.verdict("lengths satisfy 1/M <= l <= M", lm, "");
    r.verdict("every x_i lies in the ball of radius R", inside && radius.is_finite(), format!("R = {radius}"));
    r.verdict("four-holed gap K > 1", k_grid > 1.0, format!("{k_grid}"));
    r.verdict("pairwise distances bounded below by a positive constant", min_pair > 0.0, format!("{min_pair}"));
    r.verdict("metric chain has no violations", chain_all, "");
    r.note("ladder pieces have cusped outer holes; the grid constant covers geodesic-boundary pieces".to_string());
    r.set_table(t);
    Ok(())
}

fn four_holed_gap(cx: &mut Ctx) -> std::result::Result<(), CoreError> {
    let grid = GapGrid::new(cx.f64("M")?, cx.f64("length_step")?, cx.int("twist_steps", 1)? as u32)?;
    let values = gap_scan(cx, &grid)?;
    let (wi, k) = argmin(&values);
    let wp = grid.point(wi);
    let again = gap_value(&wp)?;
    let mut t = Table::new(&["index", "core", "b1", "b2", "b3", "b4", "twist", "value"]);
    for (i, &v) in values.iter().enumerate() {
        let p = grid.point(i);
        let b = p.boundary;
        t.push(vec![i.into(), p.core.into(), b[0].into(), b[1].into(), b[2].into(), b[3].into(), p.twist.into(), v.into()]);
    }
    let r = &mut cx.report;
    r.bound("K", k, k, "grid-minimum");
    r.witness(Curve::dual(CurveId::c(0)), k);
    r.verdict("K > 1 + 1e-4", k > 1.0 + 1e-4, format!("{k}"));
    r.verdict(
        "witness recomputes to the minimum",
        (again - k).abs() <= cx.precision,
        format!("index {wi}, core {}, boundary {:?}, twist {}", wp.core, wp.boundary, wp.twist),
    );
    r.set_table(t);
    Ok(())
}

fn qc_twist(cx: &mut Ctx) -> std::result::Result<(), CoreError> {
    let theta = cx.f64("theta_deg")? * PI / 180.0;
    let t_max = cx.int("t_max", 1)?;
    let mut t = Table::new(&["kind", "x", "value"]);
    let mut vals = Vec::new();
    for k in 0..=t_max {
        let v = qc_twist_lower_bound(k as f64, theta)?;
        vals.push(v);
        t.push(vec!["qc".into(), (k as f64).into(), v.into()]);
    }
    let mods: Vec<(f64, f64)> = (0..=6)
        .map(|e| {
            let cr = -(10f64).powi(-e);
            quad_modulus(cr).map(|m| (cr, m))
        })
        .collect::<std::result::Result<_, _>>()?;
    for &(cr, m) in &mods {
        t.push(vec!["modulus".into(), cr.into(), m.into()]);
    }
    let crossing = match vals.iter().position(|&v| v > 2.0) {
        Some(j) if j > 0 => {
            let (mut lo, mut hi) = ((j - 1) as f64, j as f64);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if qc_twist_lower_bound(mid, theta)? > 2.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Some(hi)
        }
        _ => None,
    };
    let r = &mut cx.report;
    r.verdict("K(0) = 1", (vals[0] - 1.0).abs() <= 1e-12, format!("{}", vals[0]));
    r.verdict("strictly increasing in t", vals.windows(2).all(|w| w[1] > w[0]), "");
    r.verdict("exceeds 2 on the range", crossing.is_some(), format!("crossing at t = {crossing:?}"));
    r.verdict("Mod(-1) = 1", (mods[0].1 - 1.0).abs() <= 1e-10, format!("{}", mods[0].1));
    r.verdict(
        "Mod decreases toward 0, below 0.2 at -1e-6",
        mods.windows(2).all(|w| w[1].1 < w[0].1) && mods.last().unwrap().1 < 0.2,
        "",
    );
    if let Some(c) = crossing {
        r.bound("t where K(t) = 2", c, c, "bisection");
    }
    r.bound("d_qc lower at t_max", d(*vals.last().unwrap()), f64::INFINITY, "collar-twist");
    r.set_table(t);
    Ok(())
}

fn infinite_twist(cx: &mut Ctx) -> std::result::Result<(), CoreError> {
    let n_max = cx.int("N", 5)? as u64;
    let ts = TwistSchedule::midpoint(n_max);
    ts.check_invariants()?;
    let qc = schedule_qc_divergence(&ts, n_max)?;
    let mut t = Table::new(&["n", "log_eps", "t_n", "displacement", "partial_bound", "reference_bound", "qc_lower"]);
    let mut sandwich = true;
    let mut partial = 1.0;
    for n in 1..=n_max {
        partial = schedule_twist_upper_bound(&ts, n)?.upper;
        let reference = schedule_reference_bound(n);
        sandwich &= partial <= reference;
        t.push(vec![
            (n as i64).into(),
            ts.log_eps(n).into(),
            ts.twist_power(n).into(),
            ts.displacement(n).into(),
            partial.into(),
            reference.into(),
            qc[n as usize - 1].into(),
        ]);
    }
    let first = qc.iter().position(|&v| v > 2.0).map(|i| i + 1);
    let r = &mut cx.report;
    r.bound("d_ls", 0.0, d(partial), "collar-sum");
    r.bound("d_qc", d(*qc.last().unwrap()), f64::INFINITY, "collar-twist");
    r.verdict("truncated sup bound <= 1 + 2 sum log(n+1)/n^2 for every N", sandwich, "");
    r.verdict("quasiconformal lower bound increasing in n", qc.windows(2).all(|w| w[1] > w[0]), "");
    r.verdict(
        "quasiconformal lower bound exceeds 2 by n = 5",
        first.is_some_and(|n| n <= 5),
        format!("value at n = 5: {:?}; first n above 2: {first:?}", qc.get(4)),
    );
    r.set_table(t);
    Ok(())
}

fn metric_chain(cx: &mut Ctx) -> std::result::Result<(), CoreError> {
    let pairs = cx.int("pairs", 1)?;
    let seed = cx.int("seed", 0)? as u64;
    let max_weight = cx.int("max_weight", 1)? as u32;
    let c_thurston = cx.f64("C")?;
    let n_ft = cx.f64("N_ft")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Table::new(&[
        "pair", "length", "twist", "core", "power", "curve", "lhs", "rhs", "d_ls_lower", "d_ls_upper", "d_qc_lower",
    ]);
    let (mut lip_fail, mut chain_fail) = (0, 0);
    for p in 0..pairs {
        let ell = rng.gen_range(0.05..2.0);
        let tw = rng.gen_range(-1.0..1.0);
        let s = build_template(TemplateKind::Ladder, Rule::Const(ell), Rule::Const(tw))?;
        let core = CurveId::c(rng.gen_range(-3..=3));
        let k = [-3i64, -2, -1, 1, 2, 3][rng.gen_range(0..6)];
        let window = [CurveId::c(core.index - 1), core, CurveId::c(core.index + 1)];
        let curves = enumerate_curves(&s, &window, max_weight)?;
        let c = &curves[rng.gen_range(0..curves.len())];
        let s2 = twist_deform(&s, core, k as f64 * ell)?;
        let upper = twist_upper_bound(&s, &MappingClass::twist(core, k))?.d_upper();
        let lip = two_lipschitz_check(c, &s, &s2, upper)?;
        let d_ls = Interval::new(0.5 * lip.lhs, upper);
        let qc = qc_lower(ell, k)?;
        let (ok, _) = chain_ok(d_ls, Interval::new(qc, f64::INFINITY), c_thurston, Some(n_ft))?;
        lip_fail += usize::from(!lip.pass);
        chain_fail += usize::from(!ok);
        t.push(vec![
            p.into(),
            ell.into(),
            tw.into(),
            core.to_string().into(),
            k.into(),
            c.to_string().into(),
            lip.lhs.into(),
            lip.rhs.into(),
            d_ls.lo.into(),
            d_ls.hi.into(),
            qc.into(),
        ]);
    }
    let r = &mut cx.report;
    r.verdict("2-Lipschitz check passes on every pair", lip_fail == 0, format!("{lip_fail} failures of {pairs}"));
    r.verdict("metric chain has no violations", chain_fail == 0, format!("{chain_fail} violations of {pairs}"));
    r.set_table(t);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_has_eleven_unique_ids() {
        let ids: std::collections::BTreeSet<&str> = REGISTRY.iter().map(|e| e.id).collect();
        assert_eq!(ids.len(), 11);
        assert!(REGISTRY.iter().all(|e| !e.anchor.is_empty()));
        assert_eq!(list_experiments(), list_experiments());
    }

    #[test]
    fn param_errors() {
        assert_eq!(run_experiment(&ExperimentSpec::new("nope")).unwrap_err().code(), "ElX01");
        let e = run_experiment(&ExperimentSpec::new("ex-flute-divergence").param("colour", 1)).unwrap_err();
        assert_eq!(e.code(), "ElX02");
        let e = run_experiment(&ExperimentSpec::new("ex-flute-divergence").param("N", "many")).unwrap_err();
        assert_eq!(e.code(), "ElX02");
        let e = run_experiment(&ExperimentSpec::new("lemma-four-holed-gap").param("M", 0.5)).unwrap_err();
        assert_eq!(e.code(), "ElX02");
    }

    #[test]
    fn module_errors_become_failed_verdicts() {
        let r = run_experiment(&ExperimentSpec::new("prop-small-twist").param("exponents", "0")).unwrap();
        assert!(!r.pass);
        assert!(r.verdict_named("completed").unwrap().detail.starts_with("ElM02"));
    }

    #[test]
    fn lm_lengths_in_range() {
        for (_, l) in lm_lengths(2.0, -5..=50) {
            assert!((0.5..=2.0).contains(&l));
        }
    }
}
