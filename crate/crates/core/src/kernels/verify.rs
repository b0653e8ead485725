use serde::{Deserialize, Serialize};

use super::discrete::{DiscretizedKernel, GramPower};
use super::functionals::{f_functional, FOptions};
use super::grid::GridSpec;
use super::kroute::ContractionRoute;
use super::spec::HermiteKernelSpec;
use crate::error::{Error, Result};
use crate::regularity::fit_power_law;

/// Kernels whose increment norms `‖A_{x,s}‖` can be swept on a time grid at a
/// base resolution (level 0) and one refinement (level 1).
pub trait KernelFamily: Sync {
    fn label(&self) -> String;
    fn alpha(&self) -> f64;
    fn horizon(&self) -> f64;
    /// Number of time steps at `level`.
    fn steps(&self, level: usize) -> usize;
    /// `‖A_{x,s}‖²` with `x = x_step·dt`, `s = s_steps·dt` at `level`.
    fn increment_norm_sq(&self, level: usize, x_step: usize, s_steps: usize) -> Result<f64>;
}

/// A Hermite kernel discretized on a grid and on its doubling.
pub struct DiscretizedFamily {
    spec: HermiteKernelSpec,
    levels: Vec<(DiscretizedKernel, GramPower)>,
}

impl DiscretizedFamily {
    pub fn new(spec: &HermiteKernelSpec, grid: &GridSpec) -> Result<Self> {
        let mut levels = Vec::with_capacity(2);
        for g in [grid.clone(), grid.doubled()] {
            let k = DiscretizedKernel::new(spec, &g)?;
            let gram = k.gram_power()?;
            levels.push((k, gram));
        }
        Ok(Self {
            spec: *spec,
            levels,
        })
    }

    pub fn spec(&self) -> &HermiteKernelSpec {
        &self.spec
    }
}

impl KernelFamily for DiscretizedFamily {
    fn label(&self) -> String {
        format!(
            "hermite(n={}, beta1={}, beta2={})",
            self.spec.n(),
            self.spec.beta1(),
            self.spec.beta2()
        )
    }

    fn alpha(&self) -> f64 {
        self.spec.alpha()
    }

    fn horizon(&self) -> f64 {
        self.spec.horizon()
    }

    fn steps(&self, level: usize) -> usize {
        self.levels[level].0.grid().m
    }

    fn increment_norm_sq(&self, level: usize, x_step: usize, s_steps: usize) -> Result<f64> {
        let (k, gram) = &self.levels[level];
        Ok(gram.norm_sq(&k.increment_weights(x_step, s_steps)?))
    }
}

/// `A_t = t·h` with `‖h‖` given; `‖A_{x,s}‖ = s‖h‖`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearKernel {
    pub alpha: f64,
    pub horizon: f64,
    pub m: usize,
    pub h_norm: f64,
}

impl KernelFamily for LinearKernel {
    fn label(&self) -> String {
        "linear".into()
    }

    fn alpha(&self) -> f64 {
        self.alpha
    }

    fn horizon(&self) -> f64 {
        self.horizon
    }

    fn steps(&self, level: usize) -> usize {
        self.m << level
    }

    fn increment_norm_sq(&self, level: usize, x_step: usize, s_steps: usize) -> Result<f64> {
        check_steps(self.steps(level), x_step, s_steps)?;
        let s = s_steps as f64 * self.horizon / self.steps(level) as f64;
        Ok((s * self.h_norm).powi(2))
    }
}

/// `A_t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroKernel {
    pub alpha: f64,
    pub horizon: f64,
    pub m: usize,
}

impl KernelFamily for ZeroKernel {
    fn label(&self) -> String {
        "zero".into()
    }

    fn alpha(&self) -> f64 {
        self.alpha
    }

    fn horizon(&self) -> f64 {
        self.horizon
    }

    fn steps(&self, level: usize) -> usize {
        self.m << level
    }

    fn increment_norm_sq(&self, level: usize, x_step: usize, s_steps: usize) -> Result<f64> {
        check_steps(self.steps(level), x_step, s_steps)?;
        Ok(0.0)
    }
}

fn check_steps(m: usize, x_step: usize, s_steps: usize) -> Result<()> {
    if s_steps == 0 || x_step + s_steps > m {
        return Err(Error::Domain(format!("increment ({x_step}, {s_steps}) outside 0..={m}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepOptions {
    /// Smallest lag in time steps of the base level.
    pub min_steps: usize,
    /// Upper bound on sampled positions `x` per lag.
    pub positions: usize,
    /// Allowed relative change between the base and refined levels, and between
    /// the two finest lags for `κ′`.
    pub drift_tol: f64,
    /// Slope of `log max_x s^{−α}‖A_{x,s}‖` against `log s` beyond which a
    /// trend is flagged.
    pub trend_tol: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            min_steps: 4,
            positions: 16,
            drift_tol: 0.1,
            trend_tol: 0.05,
        }
    }
}

/// Shape of `max_x s^{−α}‖A_{x,s}‖` as `s → 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Stable,
    /// Ratios shrink: the exponent `α` is not sharp.
    NonSharp,
    /// Ratios grow: no finite `κ`.
    Divergent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagStat {
    pub s: f64,
    pub max_ratio: f64,
    pub min_ratio: f64,
    /// Position attaining the maximum.
    pub argmax_x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub steps: usize,
    pub lags: Vec<LagStat>,
}

/// `s^{−α}‖A_{x,s}‖` over dyadic `s = T 2^{−j}` (at least `min_steps` steps)
/// and evenly spread grid positions `x`.
pub fn sweep(family: &dyn KernelFamily, level: usize, opts: &SweepOptions) -> Result<Sweep> {
    let m = family.steps(level);
    let dt = family.horizon() / m as f64;
    let min_steps = opts.min_steps << level;
    let mut lags = Vec::new();
    let mut s_steps = m;
    while s_steps >= min_steps.max(1) {
        let s = s_steps as f64 * dt;
        let room = m - s_steps;
        let stride = (room / opts.positions.max(1)).max(1);
        let mut stat = LagStat {
            s,
            max_ratio: f64::MIN,
            min_ratio: f64::MAX,
            argmax_x: 0.0,
        };
        let mut x_step = 0;
        while x_step <= room {
            let r = family.increment_norm_sq(level, x_step, s_steps)?.max(0.0).sqrt() / s.powf(family.alpha());
            if r > stat.max_ratio {
                stat.max_ratio = r;
                stat.argmax_x = x_step as f64 * dt;
            }
            stat.min_ratio = stat.min_ratio.min(r);
            x_step += stride;
        }
        lags.push(stat);
        if !s_steps.is_multiple_of(2) {
            break;
        }
        s_steps /= 2;
    }
    if lags.is_empty() {
        return Err(Error::Domain("no lag is resolvable on this grid".into()));
    }
    Ok(Sweep { steps: m, lags })
}

fn relative_change(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 {
        0.0
    } else {
        (a - b).abs() / m
    }
}

fn trend_of(sweep: &Sweep, tol: f64) -> (f64, Trend) {
    let pts: Vec<&LagStat> = sweep.lags.iter().filter(|l| l.max_ratio > 0.0).collect();
    if pts.len() < 2 {
        return (0.0, Trend::Stable);
    }
    let xs: Vec<f64> = pts.iter().map(|l| l.s).collect();
    let ys: Vec<f64> = pts.iter().map(|l| l.max_ratio).collect();
    let slope = fit_power_law(&xs, &ys).map(|(a, _)| a).unwrap_or(0.0);
    let trend = if slope > tol {
        Trend::NonSharp
    } else if slope < -tol {
        Trend::Divergent
    } else {
        Trend::Stable
    };
    (slope, trend)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct G1Report {
    pub label: String,
    pub kappa: f64,
    pub worst_x: f64,
    pub worst_s: f64,
    pub kappa_refined: f64,
    pub drift: f64,
    pub trend_slope: f64,
    pub trend: Trend,
    pub base: Sweep,
    pub refined: Sweep,
    pub pass: bool,
}

/// `κ = sup s^{−α}‖A_{x,s}‖` on the base and refined grids.
pub fn verify_g1(family: &dyn KernelFamily, opts: &SweepOptions) -> Result<G1Report> {
    let base = sweep(family, 0, opts)?;
    let refined = sweep(family, 1, opts)?;
    let top = |s: &Sweep| {
        s.lags
            .iter()
            .max_by(|a, b| a.max_ratio.total_cmp(&b.max_ratio))
            .cloned()
            .expect("nonempty sweep")
    };
    let worst = top(&base);
    let kappa_refined = top(&refined).max_ratio;
    let drift = relative_change(worst.max_ratio, kappa_refined);
    let (trend_slope, trend) = trend_of(&refined, opts.trend_tol);
    let pass = worst.max_ratio.is_finite() && worst.max_ratio > 0.0 && drift < opts.drift_tol && trend != Trend::Divergent;
    Ok(G1Report {
        label: family.label(),
        kappa: worst.max_ratio,
        worst_x: worst.argmax_x,
        worst_s: worst.s,
        kappa_refined,
        drift,
        trend_slope,
        trend,
        base,
        refined,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct G2Report {
    pub label: String,
    /// `min_x s^{−α}‖A_{x,s}‖` at the finest and second finest lags.
    pub kappa_prime: f64,
    pub finest: (f64, f64),
    pub second: (f64, f64),
    pub level_change: f64,
    pub kappa_prime_refined: f64,
    pub drift: f64,
    pub pass: bool,
}

/// `κ′ = min_x s^{−α}‖A_{x,s}‖` at the two finest resolvable lags.
pub fn verify_g2(family: &dyn KernelFamily, opts: &SweepOptions) -> Result<G2Report> {
    let two_finest = |s: &Sweep| -> Result<((f64, f64), (f64, f64))> {
        let n = s.lags.len();
        if n < 2 {
            return Err(Error::Domain("G2 needs two resolvable lags".into()));
        }
        let (a, b) = (&s.lags[n - 1], &s.lags[n - 2]);
        Ok(((a.s, a.min_ratio), (b.s, b.min_ratio)))
    };
    let (finest, second) = two_finest(&sweep(family, 0, opts)?)?;
    let (rf, rs) = two_finest(&sweep(family, 1, opts)?)?;
    let kappa_prime = finest.1.min(second.1);
    let kappa_prime_refined = rf.1.min(rs.1);
    let level_change = relative_change(finest.1, second.1);
    let drift = relative_change(kappa_prime, kappa_prime_refined);
    let pass = kappa_prime > 0.0 && level_change < opts.drift_tol && drift < opts.drift_tol;
    Ok(G2Report {
        label: family.label(),
        kappa_prime,
        finest,
        second,
        level_change,
        kappa_prime_refined,
        drift,
        pass,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct G4Options {
    /// Diagonal lags `s = T 2^{−j}` for `j` in this range.
    pub j_min: u32,
    pub j_max: u32,
    pub f: FOptions,
}

impl Default for G4Options {
    fn default() -> Self {
        Self {
            j_min: 2,
            j_max: 7,
            f: FOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FPoint {
    pub s: f64,
    pub t: f64,
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct G4Report {
    pub diagonal: Vec<FPoint>,
    pub off_diagonal: Vec<FPoint>,
    /// Half the fitted slope of `log F(s, s)` against `log s`.
    pub epsilon: f64,
    /// `max F(s, s) / s^{2ε}` over the diagonal.
    pub kappa_diagonal: f64,
    /// `max F(s, t) / (st)^ε` over all sampled points.
    pub kappa: f64,
    /// Off-diagonal points above `κ_diag (st)^ε`.
    pub violations: usize,
    pub pass: bool,
}

/// Fits `F(s, s) ≈ κ s^{2ε}` on dyadic lags and checks the product bound on
/// lag pairs two levels apart.
pub fn verify_g4(spec: &HermiteKernelSpec, opts: &G4Options) -> Result<G4Report> {
    if opts.j_max < opts.j_min + 1 {
        return Err(Error::InvalidArgument("G4 needs at least two lags".into()));
    }
    let route = ContractionRoute::new(spec, opts.f.resolution)?;
    let horizon = spec.horizon();
    let lag = |j: u32| horizon * 0.5f64.powi(j as i32);
    let mut diagonal = Vec::new();
    for j in opts.j_min..=opts.j_max {
        let s = lag(j);
        diagonal.push(FPoint { s, t: s, f: f_functional(&route, s, s, &opts.f)? });
    }
    let mut off_diagonal = Vec::new();
    for j in (opts.j_min..=opts.j_max.saturating_sub(2)).step_by(2) {
        let (s, t) = (lag(j), lag(j + 2));
        off_diagonal.push(FPoint { s, t, f: f_functional(&route, s, t, &opts.f)? });
    }
    let xs: Vec<f64> = diagonal.iter().map(|p| p.s).collect();
    let ys: Vec<f64> = diagonal.iter().map(|p| p.f).collect();
    let (slope, _) = fit_power_law(&xs, &ys)?;
    let epsilon = 0.5 * slope;
    let ratio = |p: &FPoint| p.f / (p.s * p.t).powf(epsilon);
    let kappa_diagonal = diagonal.iter().map(ratio).fold(0.0, f64::max);
    let kappa = diagonal.iter().chain(&off_diagonal).map(ratio).fold(0.0, f64::max);
    let violations = off_diagonal.iter().filter(|p| ratio(p) > kappa_diagonal).count();
    Ok(G4Report {
        diagonal,
        off_diagonal,
        epsilon,
        kappa_diagonal,
        kappa,
        violations,
        pass: epsilon > 0.0 && kappa.is_finite(),
    })
}
