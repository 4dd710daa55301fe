use crate::config::{ModelKind, RunConfig};
use crate::output::{num, Table};
use evans_core::engine::{build_contour, winding, EvansFunction, WindingReport};
use evans_core::fkpp::{fkpp_crossing_count, fkpp_dispersion, fkpp_weight_interval, Fkpp, FkppEvans};
use evans_core::ks::{ks_dispersion, ks_truncation, ks_wave_eval, Ks};
use evans_core::numerics::{c64, OdeOptions, C64};
use evans_core::spectrum::{absolute_spectrum_scan, branch_points, region_map, weighted_scan, End, Region, SpectralProblem};
use evans_core::Error;
use serde_json::{json, Value};

/// What a command produced: a table, an optional structured report, summary
/// lines for the terminal and warnings for the error stream.
pub struct Outcome {
    pub table: Table,
    pub report: Option<Value>,
    pub summary: Vec<String>,
    pub warnings: Vec<String>,
}

impl Outcome {
    fn table(table: Table) -> Self {
        Outcome::new(table, None, Vec::new())
    }

    fn new(table: Table, report: Option<Value>, summary: Vec<String>) -> Self {
        Outcome { table, report, summary, warnings: Vec::new() }
    }
}

pub enum Model {
    Fkpp(Fkpp),
    Ks(Ks),
}

impl Model {
    pub fn build(cfg: &RunConfig) -> Result<Self, Error> {
        let map = |e: crate::config::ConfigError| Error::Parameter(e.0);
        match cfg.model {
            ModelKind::Fkpp => Ok(Model::Fkpp(Fkpp::new(cfg.fkpp_params().map_err(map)?, cfg.tolerances.tail)?)),
            ModelKind::Ks => {
                let params = cfg.ks_params().map_err(map)?;
                let l = cfg.ks.as_ref().and_then(|k| k.truncation).unwrap_or_else(|| ks_truncation(&params));
                Ok(Model::Ks(
                    Ks::new(params)
                        .with_options(cfg.tolerances.evans())
                        .with_exclusion(cfg.exclusion())
                        .with_truncation(l),
                ))
            }
        }
    }

    fn problem(&self) -> &dyn SpectralProblem {
        match self {
            Model::Fkpp(f) => f,
            Model::Ks(k) => k,
        }
    }

    fn evans(&self, cfg: &RunConfig) -> Box<dyn EvansFunction> {
        match self {
            Model::Fkpp(f) => Box::new(FkppEvans::new(f.clone(), cfg.tolerances.evans())),
            Model::Ks(k) => Box::new(k.clone()),
        }
    }
}

fn grid(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
}

pub fn wave(cfg: &RunConfig, model: &Model) -> Outcome {
    let n = cfg.wave.points;
    match model {
        Model::Fkpp(f) => {
            let l = cfg.wave.half_width.unwrap_or_else(|| f.wave.l_minus().min(f.wave.l_plus()));
            let mut t = Table::new(&["z", "u", "du"]);
            for z in grid(-l, l, n) {
                let [u, v] = f.wave.profile.state(z);
                t.push(vec![num(z), num(u), num(v)]);
            }
            Outcome::table(t)
        }
        Model::Ks(k) => {
            let l = cfg.wave.half_width.unwrap_or(k.truncation);
            let mut t = Table::new(&["z", "u", "w", "du", "dw"]);
            for z in grid(-l, l, n) {
                let e = ks_wave_eval(&k.params, z);
                t.push(vec![num(z), num(e.u), num(e.w), num(e.du), num(e.dw)]);
            }
            Outcome::table(t)
        }
    }
}

fn end_name(end: End) -> &'static str {
    match end {
        End::Minus => "minus",
        End::Plus => "plus",
    }
}

fn point_json(l: C64) -> Value {
    json!([l.re, l.im])
}

pub fn continuous(cfg: &RunConfig, model: &Model) -> Outcome {
    let s = &cfg.spectrum;
    let mut t = Table::new(&["k", "re", "im", "branch", "end"]);
    for k in grid(s.k_min, s.k_max, s.k_samples) {
        let (values, ends): (Vec<C64>, &[End]) = match model {
            Model::Fkpp(f) => (fkpp_dispersion(&f.params, k).to_vec(), &[End::Plus, End::Minus]),
            Model::Ks(m) => (ks_dispersion(&m.params, k).to_vec(), &[End::Plus, End::Plus, End::Minus, End::Minus]),
        };
        for (b, (l, end)) in values.iter().zip(ends).enumerate() {
            t.push(vec![num(k), num(l.re), num(l.im), b.to_string(), end_name(*end).into()]);
        }
    }
    Outcome::table(t)
}

fn region_name(r: Option<Region>) -> String {
    match r {
        Some(Region::Omega(i)) => format!("omega{i}"),
        Some(Region::Unresolved) => "unresolved".into(),
        Some(Region::Continuous) => "continuous".into(),
        None => "boundary".into(),
    }
}

pub fn regions(cfg: &RunConfig, model: &Model) -> Outcome {
    let s = &cfg.spectrum;
    let samples = region_map(model.problem(), s.window(), (s.grid[0], s.grid[1]), cfg.tolerances.hyperbolicity);
    let mut t = Table::new(&["re", "im", "region", "minus_unstable", "minus_stable", "plus_unstable", "plus_stable"]);
    let count = |x: Option<usize>| x.map_or_else(|| "-1".to_string(), |v| v.to_string());
    for p in samples {
        t.push(vec![
            num(p.lambda.re),
            num(p.lambda.im),
            region_name(p.region),
            count(p.minus.map(|s| s.n_plus)),
            count(p.minus.map(|s| s.n_minus)),
            count(p.plus.map(|s| s.n_plus)),
            count(p.plus.map(|s| s.n_minus)),
        ]);
    }
    Outcome::table(t)
}

pub fn absolute(cfg: &RunConfig, model: &Model) -> Outcome {
    let s = &cfg.spectrum;
    let points = absolute_spectrum_scan(model.problem(), s.window(), (s.grid[0], s.grid[1]), 1e-10);
    let mut t = Table::new(&["re", "im", "end", "gap"]);
    for p in &points {
        t.push(vec![num(p.lambda.re), num(p.lambda.im), end_name(p.end).into(), num(p.gap)]);
    }
    let branch: Vec<Value> = [End::Minus, End::Plus]
        .iter()
        .flat_map(|&e| branch_points(model.problem(), e).into_iter().map(move |b| json!({"end": end_name(e), "lambda": point_json(b)})))
        .collect();
    let rhp: Vec<C64> = points.iter().map(|p| p.lambda).filter(|l| l.re > 0.0).collect();
    let mut summary = vec![format!("{} absolute-spectrum points, {} with Re > 0", points.len(), rhp.len())];
    if let Some(m) = rhp.iter().map(|l| l.re).reduce(f64::max) {
        summary.push(format!("largest real part {}", num(m)));
    }
    Outcome::new(t, Some(json!({ "branch_points": branch, "right_half_plane_points": rhp.len() })), summary)
}

/// Maximal runs of consecutive admissible weights.
fn runs(rows: &[(f64, bool)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut start: Option<f64> = None;
    let mut last = 0.0;
    for &(nu, ok) in rows {
        match (ok, start) {
            (true, None) => start = Some(nu),
            (false, Some(s)) => {
                out.push((s, last));
                start = None;
            }
            _ => {}
        }
        last = nu;
    }
    if let Some(s) = start {
        out.push((s, last));
    }
    out
}

pub fn weighted(cfg: &RunConfig, model: &Model) -> Outcome {
    let s = &cfg.spectrum;
    let steps = ((s.nu_max - s.nu_min) / s.nu_step + 1e-9).floor() as usize;
    let mut t = Table::new(&["nu", "max_re", "witness_re", "witness_im", "witness_k", "admissible"]);
    let mut flags = Vec::new();
    for i in 0..=steps {
        let nu = s.nu_min + s.nu_step * i as f64;
        let v = weighted_scan(model.problem(), nu, (s.k_min, s.k_max), s.k_samples);
        t.push(vec![num(nu), num(v.max_re), num(v.witness.re), num(v.witness.im), num(v.witness_k), v.admissible.to_string()]);
        flags.push((nu, v.admissible));
    }
    let intervals = runs(&flags);
    let mut summary: Vec<String> = if intervals.is_empty() {
        vec!["no admissible weight".into()]
    } else {
        intervals.iter().map(|(a, b)| format!("admissible weights in [{}, {}]", num(*a), num(*b))).collect()
    };
    let mut report = json!({ "sampled_intervals": intervals.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>() });
    if let Model::Fkpp(f) = model {
        let exact = fkpp_weight_interval(&f.params);
        if let Some((a, b)) = exact {
            summary.push(format!("closed-form open interval ({}, {})", num(a), num(b)));
        }
        report["closed_form_interval"] = exact.map_or(Value::Null, |(a, b)| json!([a, b]));
    }
    Outcome::new(t, Some(report), summary)
}

fn sample_table(report: &WindingReport) -> Table {
    let mut t = Table::new(&[
        "re", "im", "e_re", "e_im", "arg", "unstable_chart", "stable_chart", "switches", "resident", "segment", "depth",
    ]);
    for s in &report.samples {
        t.push(vec![
            num(s.lambda.re),
            num(s.lambda.im),
            num(s.value.re),
            num(s.value.im),
            num(s.arg),
            s.unstable_chart.to_string(),
            s.stable_chart.to_string(),
            s.switches.to_string(),
            s.resident.to_string(),
            s.segment.to_string(),
            s.depth.to_string(),
        ]);
    }
    t
}

fn report_json(r: &WindingReport) -> Value {
    json!({
        "evaluator": r.evaluator,
        "winding": r.winding,
        "raw": r.raw,
        "accepted": r.accepted,
        "samples": r.samples.len(),
        "evaluations": r.evaluations,
        "refinements": r.refinements,
        "max_depth_used": r.max_depth_used,
        "pole_events": r.pole_events.iter().map(|&l| point_json(l)).collect::<Vec<_>>(),
        "warnings": r.warnings,
    })
}

fn contour_winding(cfg: &RunConfig, model: &Model) -> Result<WindingReport, Error> {
    let kind = cfg.contour.ok_or_else(|| Error::Contour("no [contour] section in the configuration".into()))?;
    let contour = build_contour(kind)?;
    winding(model.evans(cfg).as_ref(), &contour, &cfg.tolerances.winding())
}

pub fn evans_wind(cfg: &RunConfig, model: &Model) -> Result<Outcome, Error> {
    let r = contour_winding(cfg, model)?;
    let mut o = Outcome::new(sample_table(&r), Some(report_json(&r)), vec![r.winding.to_string()]);
    o.warnings = r.warnings.iter().map(|w| format!("warning: {w}")).collect();
    Ok(o)
}

pub fn evans_eval(cfg: &RunConfig, model: &Model) -> Result<Outcome, Error> {
    if cfg.evans.points.is_empty() {
        let r = contour_winding(cfg, model)?;
        let mut o = Outcome::new(sample_table(&r), Some(report_json(&r)), Vec::new());
        o.warnings = r.warnings.iter().map(|w| format!("warning: {w}")).collect();
        return Ok(o);
    }
    let evans = model.evans(cfg);
    let branch = evans.branch_points();
    let mut t = Table::new(&["re", "im", "e_re", "e_im", "arg", "modulus", "unstable_chart", "stable_chart", "switches", "resident"]);
    let mut notes = Vec::new();
    let mut arg = 0.0;
    let mut prev: Option<C64> = None;
    for &[re, im] in &cfg.evans.points {
        let lambda = c64(re, im);
        let v = evans.evaluate(lambda)?;
        let e = v.value;
        arg = match prev {
            Some(p) => arg + (e / p).arg(),
            None => e.arg(),
        };
        prev = Some(e);
        t.push(vec![
            num(re),
            num(im),
            num(e.re),
            num(e.im),
            num(arg),
            num(e.norm()),
            v.unstable_chart.to_string(),
            v.stable_chart.to_string(),
            v.switches.to_string(),
            v.resident.to_string(),
        ]);
        let near = branch.iter().any(|b| (lambda - b).norm() <= cfg.tolerances.branch_tol);
        if near {
            let verdict = if e.norm() <= cfg.tolerances.root_threshold {
                "below the root threshold: eigenvalue at a branch point of the absolute spectrum"
            } else {
                "above the root threshold: no eigenvalue claim"
            };
            notes.push(format!("lambda = {} + {}i: |E| = {} {verdict}", num(re), num(im), num(e.norm())));
        }
    }
    Ok(Outcome::new(t, Some(json!({ "notes": notes })), notes))
}

pub fn crossings(cfg: &RunConfig, model: &Model) -> Result<Outcome, Error> {
    let Model::Fkpp(f) = model else {
        return Err(Error::Domain("crossing counts are defined for the fkpp model only".into()));
    };
    if cfg.crossings.lambdas.is_empty() {
        return Err(Error::Domain("no [crossings] lambdas given".into()));
    }
    let opts = OdeOptions { rel_tol: cfg.tolerances.rel_tol, abs_tol: cfg.tolerances.abs_tol, ..Default::default() };
    let mut t = Table::new(&["lambda", "n", "degenerate", "crossings"]);
    let mut counts = Vec::new();
    for &lam in &cfg.crossings.lambdas {
        let c = fkpp_crossing_count(&f.params, &f.wave, lam, &opts)?;
        let at: Vec<String> = c.crossings.iter().map(|&z| num(z)).collect();
        t.push(vec![num(lam), c.n.to_string(), c.degenerate.to_string(), at.join(";")]);
        counts.push((lam, c.n as i64));
    }
    let mut pairs = Vec::new();
    let mut summary = Vec::new();
    for (i, &(li, ni)) in counts.iter().enumerate() {
        for &(lj, nj) in &counts[i + 1..] {
            let d = (ni - nj).abs();
            summary.push(format!("|N_i - N_j| = {d} eigenvalues between {} and {}",num(li.min(lj)), num(li.max(lj))));
            pairs.push(json!({ "lambda_i": li, "lambda_j": lj, "eigenvalues": d }));
        }
    }
    Ok(Outcome::new(t, Some(json!({ "pairwise": pairs })), summary))
}
