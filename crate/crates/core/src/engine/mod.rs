//! Contours in the spectral plane, adaptive argument tracking of Evans
//! functions, integer winding numbers and zero/pole accounting.

mod contour;
mod winding;

pub use contour::{build_contour, Contour, ContourKind, Segment};
pub use winding::{
    eigenvalue_report, winding, EigenvalueReport, EvansSample, PoleEstimate, WindingOptions, WindingReport,
};

use crate::error::Result;
use crate::numerics::{max_abs, OdeOptions, C64};
use crate::projective::ChartPoint;
use serde::{Deserialize, Serialize};

/// Multiple of the natural coordinate scale beyond which a canonical chart
/// coordinate at the matching point counts as sitting on a pole.
pub const POLE_FACTOR: f64 = 100.0;

/// Settings shared by the Evans evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvansOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    /// Evaluate at branch points using the coincident eigenvalue.
    pub at_branch_ok: bool,
    /// e-folds of attraction demanded before the matching point; bounds the
    /// integration span for large |λ|.
    pub attraction_efolds: f64,
}

impl Default for EvansOptions {
    fn default() -> Self {
        EvansOptions { rel_tol: 1e-10, abs_tol: 1e-12, max_steps: 2_000_000, at_branch_ok: false, attraction_efolds: 40.0 }
    }
}

impl EvansOptions {
    pub fn ode_options(&self) -> OdeOptions {
        OdeOptions {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_steps: self.max_steps,
            record: false,
            ..Default::default()
        }
    }
}

/// Distance needed for `efolds` e-folds of attraction at rate `gap`.
pub fn attraction_span(gap: f64, efolds: f64) -> f64 {
    if gap > 0.0 && gap.is_finite() {
        efolds / gap
    } else {
        f64::INFINITY
    }
}

/// One Evans-function value with its chart bookkeeping at the matching point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvansValue {
    pub value: C64,
    pub unstable_chart: usize,
    pub stable_chart: usize,
    /// Both objects have moderate coordinates in their canonical charts.
    pub resident: bool,
    pub switches: usize,
}

impl EvansValue {
    /// `canonical` holds the canonical charts of the unstable and stable objects;
    /// `scale` is the natural size of spatial eigenvalues at this λ.
    pub fn assemble(value: C64, unstable: &ChartPoint, stable: &ChartPoint, canonical: &[usize; 2], scale: f64) -> Self {
        let bound = POLE_FACTOR * scale * scale;
        let ok = |p: &ChartPoint, chart: usize| p.coords_in(chart).map(|a| max_abs(&a) <= bound).unwrap_or(false);
        EvansValue {
            value,
            unstable_chart: unstable.chart,
            stable_chart: stable.chart,
            resident: ok(unstable, canonical[0]) && ok(stable, canonical[1]),
            switches: unstable.switches() + stable.switches(),
        }
    }

    pub fn plain(value: C64) -> Self {
        EvansValue { value, unstable_chart: 1, stable_chart: 1, resident: true, switches: 0 }
    }
}

/// An analytic (or meromorphic) function of λ sampled along contours.
pub trait EvansFunction: Sync {
    fn name(&self) -> &str;
    fn evaluate(&self, lambda: C64) -> Result<EvansValue>;
    /// Points where the evaluator must not be sampled.
    fn branch_points(&self) -> Vec<C64>;
}

/// Wraps a plain closure as an [`EvansFunction`] without branch points.
pub struct FnEvans<F>(pub F);

impl<F> EvansFunction for FnEvans<F>
where
    F: Fn(C64) -> C64 + Sync,
{
    fn name(&self) -> &str {
        "closure"
    }

    fn evaluate(&self, lambda: C64) -> Result<EvansValue> {
        Ok(EvansValue::plain((self.0)(lambda)))
    }

    fn branch_points(&self) -> Vec<C64> {
        Vec::new()
    }
}
