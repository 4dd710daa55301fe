use super::contour::Contour;
use super::{EvansFunction, EvansValue};
use crate::error::{Error, Result};
use crate::numerics::{c64, C64};
use crate::spectrum::Window;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::f64::consts::{PI, TAU};

/// Adaptive sampling controls for argument tracking.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindingOptions {
    /// Largest accepted argument increment between neighbours.
    pub theta_max: f64,
    pub max_depth: usize,
    /// Initial uniform samples per segment.
    pub initial_samples: usize,
    /// Minimum distance to a branch point.
    pub branch_tol: f64,
    /// `|E|` below this times the median modulus counts as a zero on the contour.
    pub zero_rel: f64,
    /// Accepted distance of the raw winding from the nearest integer.
    pub closure_tol: f64,
}

impl Default for WindingOptions {
    fn default() -> Self {
        WindingOptions {
            theta_max: PI / 3.0,
            max_depth: 24,
            initial_samples: 64,
            branch_tol: 1e-3,
            zero_rel: 1e-12,
            closure_tol: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvansSample {
    pub lambda: C64,
    pub value: C64,
    /// Continuous argument accumulated from the first sample.
    pub arg: f64,
    pub segment: usize,
    pub t: f64,
    pub depth: usize,
    pub resident: bool,
    pub unstable_chart: usize,
    pub stable_chart: usize,
    pub switches: usize,
    /// Distance to the nearest flagged branch point (infinite when none).
    pub branch_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindingReport {
    pub evaluator: String,
    pub winding: i64,
    /// Accumulated argument change divided by 2π.
    pub raw: f64,
    pub accepted: bool,
    pub samples: Vec<EvansSample>,
    pub evaluations: usize,
    /// Bisection points added beyond the initial sampling.
    pub refinements: usize,
    pub max_depth_used: usize,
    /// Points where a chart object leaves or re-enters its canonical chart.
    pub pole_events: Vec<C64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
struct Node {
    t: f64,
    depth: usize,
    lambda: C64,
    value: EvansValue,
}

fn refine_needed(a: &EvansValue, b: &EvansValue, theta_max: f64) -> bool {
    let (ea, eb) = (a.value, b.value);
    let darg = (eb / ea).arg().abs();
    darg > theta_max || (eb - ea).norm() > 0.5 * ea.norm().min(eb.norm())
}

fn evaluate_checked(evans: &dyn EvansFunction, lambda: C64, branches: &[C64], tol: f64) -> Result<EvansValue> {
    if let Some(d) = branches.iter().map(|b| (lambda - b).norm()).reduce(f64::min) {
        if d < tol {
            return Err(Error::BranchPoint { lambda, distance: d });
        }
    }
    let v = evans.evaluate(lambda)?;
    if !(v.value.re.is_finite() && v.value.im.is_finite()) {
        return Err(Error::Model(format!("non-finite Evans value at lambda = {lambda}")));
    }
    Ok(v)
}

fn check_zeros(nodes: &[Vec<Node>], zero_rel: f64) -> Result<()> {
    let mut moduli: Vec<f64> = nodes.iter().flatten().map(|n| n.value.value.norm()).collect();
    moduli.sort_by(|a, b| a.total_cmp(b));
    let median = moduli[moduli.len() / 2];
    match nodes.iter().flatten().find(|n| n.value.value.norm() <= zero_rel * median) {
        Some(n) => Err(Error::ZeroOnContour { lambda: n.lambda, modulus: n.value.value.norm() }),
        None => Ok(()),
    }
}

/// Winding number of `E` along `contour` with adaptive bisection of every
/// interval whose argument or modulus changes too fast.
pub fn winding(evans: &dyn EvansFunction, contour: &Contour, opts: &WindingOptions) -> Result<WindingReport> {
    contour.validate()?;
    let branches = evans.branch_points();
    let m = opts.initial_samples.max(4);
    let jobs: Vec<(usize, f64)> =
        (0..contour.segments.len()).flat_map(|s| (0..=m).map(move |j| (s, j as f64 / m as f64))).collect();
    let values: Vec<EvansValue> = jobs
        .par_iter()
        .map(|&(s, t)| evaluate_checked(evans, contour.segments[s].point(t), &branches, opts.branch_tol))
        .collect::<Result<_>>()?;
    let initial = values.len();
    let mut evaluations = initial;
    let mut nodes: Vec<Vec<Node>> = vec![Vec::with_capacity(m + 1); contour.segments.len()];
    for (&(s, t), v) in jobs.iter().zip(values) {
        nodes[s].push(Node { t, depth: 0, lambda: contour.segments[s].point(t), value: v });
    }

    loop {
        check_zeros(&nodes, opts.zero_rel)?;
        let mut pending: Vec<(usize, usize, f64, usize)> = Vec::new();
        for (s, seg) in nodes.iter().enumerate() {
            for i in 0..seg.len() - 1 {
                let (a, b) = (&seg[i], &seg[i + 1]);
                if refine_needed(&a.value, &b.value, opts.theta_max) {
                    let depth = a.depth.max(b.depth) + 1;
                    let t = 0.5 * (a.t + b.t);
                    if depth > opts.max_depth {
                        return Err(Error::Refinement { segment: s, lambda: contour.segments[s].point(t) });
                    }
                    pending.push((s, i, t, depth));
                }
            }
        }
        if pending.is_empty() {
            break;
        }
        let fresh: Vec<EvansValue> = pending
            .par_iter()
            .map(|&(s, _, t, _)| evaluate_checked(evans, contour.segments[s].point(t), &branches, opts.branch_tol))
            .collect::<Result<_>>()?;
        evaluations += fresh.len();
        for (&(s, i, t, depth), v) in pending.iter().zip(fresh).rev() {
            let node = Node { t, depth, lambda: contour.segments[s].point(t), value: v };
            nodes[s].insert(i + 1, node);
        }
    }

    let mut ordered: Vec<(usize, Node)> = Vec::new();
    for (s, seg) in nodes.into_iter().enumerate() {
        let skip = usize::from(s > 0);
        ordered.extend(seg.into_iter().skip(skip).map(|n| (s, n)));
    }

    let mut samples = Vec::with_capacity(ordered.len());
    let mut arg = ordered[0].1.value.value.arg();
    let mut pole_events = Vec::new();
    let mut max_depth_used = 0;
    for (k, (s, n)) in ordered.iter().enumerate() {
        if k > 0 {
            let prev = &ordered[k - 1].1;
            arg += (n.value.value / prev.value.value).arg();
            if prev.value.resident != n.value.resident {
                pole_events.push(0.5 * (prev.lambda + n.lambda));
            }
        }
        max_depth_used = max_depth_used.max(n.depth);
        samples.push(EvansSample {
            lambda: n.lambda,
            value: n.value.value,
            arg,
            segment: *s,
            t: n.t,
            depth: n.depth,
            resident: n.value.resident,
            unstable_chart: n.value.unstable_chart,
            stable_chart: n.value.stable_chart,
            switches: n.value.switches,
            branch_distance: branches.iter().map(|b| (n.lambda - b).norm()).fold(f64::INFINITY, f64::min),
        });
    }
    let raw = (arg - samples[0].value.arg()) / TAU;
    let winding = raw.round() as i64;
    let mut warnings = Vec::new();
    let accepted = (raw - winding as f64).abs() <= opts.closure_tol;
    if !accepted {
        warnings.push(format!("raw winding {raw} is not within {} of an integer", opts.closure_tol));
    }
    if !contour.closed {
        warnings.push("contour is not closed".into());
    }
    if !pole_events.is_empty() {
        warnings.push(format!("{} chart residency changes along the contour", pole_events.len()));
    }
    Ok(WindingReport {
        evaluator: evans.name().to_string(),
        winding,
        raw,
        accepted,
        samples,
        evaluations,
        refinements: evaluations - initial,
        max_depth_used,
        pole_events,
        warnings,
    })
}

/// Interior points at which a chart object sits far from its canonical chart, grouped in clusters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleEstimate {
    pub count: usize,
    pub centers: Vec<C64>,
    pub grid_points: usize,
    pub flagged_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueReport {
    pub winding: WindingReport,
    pub poles: PoleEstimate,
    /// Winding number plus estimated poles.
    pub eigenvalues: i64,
    /// Set when poles were detected, so the count relies on the estimate.
    pub flagged: bool,
}

fn bounding_window(contour: &Contour) -> Window {
    let mut w = Window::new(f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for s in &contour.segments {
        for j in 0..=64 {
            let p = s.point(j as f64 / 64.0);
            w.re_min = w.re_min.min(p.re);
            w.re_max = w.re_max.max(p.re);
            w.im_min = w.im_min.min(p.im);
            w.im_max = w.im_max.max(p.im);
        }
    }
    w
}

/// Counts zeros inside `contour` as winding number plus an estimate of the
/// poles introduced by the chart representation. Poles are searched on a
/// `grid × grid` lattice over `window` (default: the contour's bounding box);
/// `grid = 0` skips the search.
pub fn eigenvalue_report(
    evans: &dyn EvansFunction,
    contour: &Contour,
    opts: &WindingOptions,
    window: Option<Window>,
    grid: usize,
) -> Result<EigenvalueReport> {
    let report = winding(evans, contour, opts)?;
    let poles = estimate_poles(evans, contour, window.unwrap_or_else(|| bounding_window(contour)), grid, opts)?;
    let eigenvalues = report.winding + poles.count as i64;
    Ok(EigenvalueReport { winding: report, flagged: poles.count > 0, poles, eigenvalues })
}

fn estimate_poles(
    evans: &dyn EvansFunction,
    contour: &Contour,
    window: Window,
    grid: usize,
    opts: &WindingOptions,
) -> Result<PoleEstimate> {
    if grid < 2 {
        return Ok(PoleEstimate { count: 0, centers: Vec::new(), grid_points: 0, flagged_points: 0 });
    }
    let branches = evans.branch_points();
    let node = |k: usize| {
        let (j, i) = (k / grid, k % grid);
        let x = window.re_min + (window.re_max - window.re_min) * (i as f64 + 0.5) / grid as f64;
        let y = window.im_min + (window.im_max - window.im_min) * (j as f64 + 0.5) / grid as f64;
        c64(x, y)
    };
    let flags: Vec<Option<bool>> = (0..grid * grid)
        .into_par_iter()
        .map(|k| {
            let lam = node(k);
            if !contour.contains(lam) || branches.iter().any(|b| (lam - b).norm() < opts.branch_tol) {
                return Ok(None);
            }
            match evans.evaluate(lam) {
                Ok(v) => Ok(Some(!v.resident)),
                Err(Error::BranchPoint { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let grid_points = flags.iter().filter(|f| f.is_some()).count();
    let flagged_points = flags.iter().filter(|f| **f == Some(true)).count();
    let mut seen = vec![false; flags.len()];
    let mut centers = Vec::new();
    for start in 0..flags.len() {
        if seen[start] || flags[start] != Some(true) {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let (mut sum, mut count) = (c64(0.0, 0.0), 0.0);
        while let Some(k) = queue.pop_front() {
            sum += node(k);
            count += 1.0;
            let (j, i) = ((k / grid) as i64, (k % grid) as i64);
            for dj in -1..=1 {
                for di in -1..=1 {
                    let (jj, ii) = (j + dj, i + di);
                    if jj < 0 || ii < 0 || jj >= grid as i64 || ii >= grid as i64 {
                        continue;
                    }
                    let nb = jj as usize * grid + ii as usize;
                    if !seen[nb] && flags[nb] == Some(true) {
                        seen[nb] = true;
                        queue.push_back(nb);
                    }
                }
            }
        }
        centers.push(sum / count);
    }
    Ok(PoleEstimate { count: centers.len(), centers, grid_points, flagged_points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{build_contour, ContourKind, FnEvans};

    fn circle(x: f64, y: f64, r: f64) -> Contour {
        build_contour(ContourKind::Circle { center: [x, y], radius: r }).unwrap()
    }

    #[test]
    fn monomials() {
        let o = WindingOptions::default();
        for n in 0..4 {
            let f = FnEvans(move |l: C64| l.powi(n));
            let r = winding(&f, &circle(0.0, 0.0, 1.0), &o).unwrap();
            assert_eq!(r.winding, n as i64);
            assert!(r.accepted);
        }
        let f = FnEvans(|l: C64| 1.0 / l);
        assert_eq!(winding(&f, &circle(0.0, 0.0, 1.0), &o).unwrap().winding, -1);
    }

    #[test]
    fn rational_example() {
        let f = FnEvans(|l: C64| (l - 0.5) * (l + 2.0) / (l - c64(0.0, 3.0)));
        let o = WindingOptions::default();
        assert_eq!(winding(&f, &circle(0.0, 0.0, 1.0), &o).unwrap().winding, 1);
        assert_eq!(winding(&f, &circle(0.0, 0.0, 4.0), &o).unwrap().winding, 1);
        assert_eq!(winding(&f, &circle(0.0, 0.0, 2.5), &o).unwrap().winding, 2);
    }

    #[test]
    fn orientation_flips_sign() {
        let f = FnEvans(|l: C64| (l - 0.3) * (l + c64(0.1, 0.2)));
        let c = circle(0.0, 0.0, 1.0);
        let o = WindingOptions::default();
        assert_eq!(winding(&f, &c, &o).unwrap().winding, 2);
        assert_eq!(winding(&f, &c.reversed(), &o).unwrap().winding, -2);
    }

    #[test]
    fn zero_on_contour_and_branch() {
        let o = WindingOptions::default();
        let f = FnEvans(|l: C64| l - 1.0);
        assert!(matches!(winding(&f, &circle(0.0, 0.0, 1.0), &o), Err(Error::ZeroOnContour { .. })));
        struct Branchy;
        impl EvansFunction for Branchy {
            fn name(&self) -> &str {
                "branchy"
            }
            fn evaluate(&self, l: C64) -> Result<EvansValue> {
                Ok(EvansValue::plain(l))
            }
            fn branch_points(&self) -> Vec<C64> {
                vec![c64(1.0, 0.0)]
            }
        }
        assert!(matches!(winding(&Branchy, &circle(0.0, 0.0, 1.0), &o), Err(Error::BranchPoint { .. })));
    }

    #[test]
    fn near_zero_needs_refinement() {
        let o = WindingOptions::default();
        let f = FnEvans(|l: C64| l - 0.999);
        let r = winding(&f, &circle(0.0, 0.0, 1.0), &o).unwrap();
        assert_eq!(r.winding, 1);
        assert!(r.max_depth_used > 3);
        let tight = WindingOptions { max_depth: 2, ..o };
        assert!(matches!(winding(&f, &circle(0.0, 0.0, 1.0), &tight), Err(Error::Refinement { .. })));
    }

    #[test]
    fn pole_estimate_clusters() {
        struct WithPole;
        impl EvansFunction for WithPole {
            fn name(&self) -> &str {
                "pole"
            }
            fn evaluate(&self, l: C64) -> Result<EvansValue> {
                let v = (l - 0.2) / (l + 0.4);
                Ok(EvansValue { resident: (l + 0.4).norm() > 0.1, ..EvansValue::plain(v) })
            }
            fn branch_points(&self) -> Vec<C64> {
                Vec::new()
            }
        }
        let o = WindingOptions::default();
        let r = eigenvalue_report(&WithPole, &circle(0.0, 0.0, 1.0), &o, None, 40).unwrap();
        assert_eq!(r.winding.winding, 0);
        assert_eq!(r.poles.count, 1);
        assert_eq!(r.eigenvalues, 1);
        assert!((r.poles.centers[0] + 0.4).norm() < 0.1);
    }
}
