use serde::{Deserialize, Serialize};

use super::space::ParamSpace;
use super::variant::ModelVariant;
use crate::error::{Error, Result};
use crate::hjm::WgParams;
use crate::marketdata::{CurveSet, Tenor};
use crate::math::norm_cdf;
use crate::pricing::{build_schedule, FrozenSwap, QuoteKind, SwaptionPricer, SwaptionQuote};

/// Residual assigned to a cell whose model price cannot be computed.
pub const FAILED_CELL_RESIDUAL: f64 = 1e3;

/// Optimiser settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerSettings {
    pub max_iters: usize,
    /// Relative objective decrease below which a run stops.
    pub tolerance: f64,
    /// Number of points taken from the built-in (lambda, h) start grid (at most 8).
    pub grid_starts: usize,
    /// Additional uniformly drawn start points.
    pub random_starts: usize,
    pub seed: u64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self { max_iters: 200, tolerance: 1e-10, grid_starts: 8, random_starts: 0, seed: 20100812 }
    }
}

/// One calibration instrument: the market target and the curve-only
/// pricing inputs for the variant's curves.
#[derive(Debug, Clone)]
pub(crate) struct Cell {
    pub quote: SwaptionQuote,
    pub target: f64,
    pub frozen: FrozenSwap,
}

/// A fit of one model variant to a set of ATM swaption quotes.
#[derive(Debug, Clone)]
pub struct CalibrationProblem {
    variant: ModelVariant,
    curves: CurveSet,
    space: ParamSpace,
    cells: Vec<Cell>,
    weights: Vec<f64>,
    settings: OptimizerSettings,
    extra_starts: Vec<Vec<f64>>,
}

/// Objective value together with the cells that failed to price.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub residuals: Vec<f64>,
    pub objective: f64,
    pub failed_cells: Vec<usize>,
}

/// ATM payer premium under lognormal Black with no shift.
fn atm_lognormal_premium(frozen: &FrozenSwap, vol: f64) -> f64 {
    let g = vol * frozen.expiry().sqrt();
    frozen.annuity * frozen.par_rate * (2.0 * norm_cdf(0.5 * g) - 1.0)
}

impl CalibrationProblem {
    /// Builds the problem on `market` curves (the variant applies its own
    /// curve restriction). Volatility quotes are converted to premia with
    /// the lognormal Black formula on the variant's curves.
    pub fn new(variant: ModelVariant, market: &CurveSet, quotes: &[SwaptionQuote], settings: OptimizerSettings) -> Result<Self> {
        let curves = variant.curves(market)?;
        let space = ParamSpace::new(variant);
        if quotes.len() < space.dim() {
            return Err(Error::CalibrationFailed(format!(
                "{} quotes for {} free parameters",
                quotes.len(),
                space.dim()
            )));
        }
        // Frozen quantities depend on the shift rule, which calibration
        // leaves at its default.
        let shift = WgParams::two_factor([0.0, 1.0], [0.0, 0.0], [0.0, 0.0], 0.0, 1.0, 1.0, 1.0)?;
        let mut cells = Vec::with_capacity(quotes.len());
        for q in quotes {
            q.validate()?;
            let sch = build_schedule(q.expiry, q.tenor_years, variant.pricing_tenor(q.float_tenor), Tenor::Y1)?;
            let frozen = FrozenSwap::new(&curves, &sch, shift.shift_rule())?;
            let target = match q.kind {
                QuoteKind::Premium => q.value,
                QuoteKind::BlackVol => atm_lognormal_premium(&frozen, q.value),
            };
            if !(target > 0.0) {
                return Err(Error::domain(format!(
                    "quote {}x{} {} has zero premium; relative loss undefined",
                    q.expiry, q.tenor_years, q.float_tenor
                )));
            }
            cells.push(Cell { quote: q.clone(), target, frozen });
        }
        Ok(Self {
            variant,
            curves,
            space,
            weights: vec![1.0; cells.len()],
            cells,
            settings,
            extra_starts: Vec::new(),
        })
    }

    pub fn with_space(mut self, space: ParamSpace) -> Result<Self> {
        if space.variant() != self.variant {
            return Err(Error::InvalidParams("parameter space belongs to another variant".into()));
        }
        self.space = space;
        Ok(self)
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.cells.len() || weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidParams("one non-negative weight per quote expected".into()));
        }
        self.weights = weights;
        Ok(self)
    }

    /// Adds a start point (projected onto the bounds) ahead of the default grid.
    pub fn with_start(mut self, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != self.space.dim() {
            return Err(Error::InvalidParams("start point has the wrong dimension".into()));
        }
        self.extra_starts.push(theta);
        Ok(self)
    }

    /// Adds the parameters of `p` as a start point.
    pub fn with_start_params(self, p: &WgParams) -> Result<Self> {
        let th = self.space.from_params(p)?;
        self.with_start(th)
    }

    pub fn variant(&self) -> ModelVariant {
        self.variant
    }

    pub fn curves(&self) -> &CurveSet {
        &self.curves
    }

    pub fn space(&self) -> &ParamSpace {
        &self.space
    }

    pub fn settings(&self) -> &OptimizerSettings {
        &self.settings
    }

    pub fn settings_mut(&mut self) -> &mut OptimizerSettings {
        &mut self.settings
    }

    pub fn quotes(&self) -> impl Iterator<Item = &SwaptionQuote> {
        self.cells.iter().map(|c| &c.quote)
    }

    /// Market premia the objective compares against.
    pub fn targets(&self) -> Vec<f64> {
        self.cells.iter().map(|c| c.target).collect()
    }

    pub(crate) fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub(crate) fn extra_starts(&self) -> &[Vec<f64>] {
        &self.extra_starts
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Model premia for every cell under `p`.
    pub fn model_prices(&self, p: &WgParams) -> Vec<Result<f64>> {
        let mut pricer = SwaptionPricer::new(p, &self.curves);
        self.cells
            .iter()
            .map(|c| pricer.price_frozen(&c.frozen, None).map(|a| a.price))
            .collect()
    }

    /// Weighted relative residuals `sqrt(w) (model - market) / market`.
    pub fn evaluate_params(&self, p: &WgParams) -> Evaluation {
        let mut failed = Vec::new();
        let residuals: Vec<f64> = self
            .model_prices(p)
            .into_iter()
            .zip(&self.cells)
            .zip(&self.weights)
            .enumerate()
            .map(|(i, ((m, c), w))| match m {
                Ok(v) if v.is_finite() => w.sqrt() * (v - c.target) / c.target,
                _ => {
                    failed.push(i);
                    FAILED_CELL_RESIDUAL
                }
            })
            .collect();
        let objective = residuals.iter().map(|r| r * r).sum();
        Evaluation { residuals, objective, failed_cells: failed }
    }

    pub fn evaluate(&self, theta: &[f64]) -> Evaluation {
        match self.space.to_params(theta) {
            Ok(p) => self.evaluate_params(&p),
            Err(_) => Evaluation {
                residuals: vec![FAILED_CELL_RESIDUAL; self.cells.len()],
                objective: FAILED_CELL_RESIDUAL * FAILED_CELL_RESIDUAL * self.cells.len() as f64,
                failed_cells: (0..self.cells.len()).collect(),
            },
        }
    }
}

/// `sum_cells w (model - market)^2 / market^2` at `theta`.
pub fn objective(prob: &CalibrationProblem, theta: &[f64]) -> f64 {
    prob.evaluate(theta).objective
}

/// Same objective for an explicit parameter set.
pub fn objective_params(prob: &CalibrationProblem, p: &WgParams) -> f64 {
    prob.evaluate_params(p).objective
}
