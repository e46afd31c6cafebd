//! Concentration diagnostics: exact band masses on spheres and CP^n, Monte
//! Carlo estimation of concentration masses for scalar observables, trend
//! verdicts along a family, and Ricci rescaling.

use crate::error::{Error, Result};
use crate::rng::{batched_map, RandomStream};
use crate::stats::{clopper_pearson_halfwidth, median};
use rand_chacha::ChaCha8Rng;
use statrs::function::beta::beta_reg;
use std::f64::consts::PI;
use std::sync::Arc;

/// Confidence level used for every Monte Carlo halfwidth in this module.
pub const CONFIDENCE: f64 = 0.99;
/// Trials are processed in fixed-size batches, one RNG substream per batch,
/// so the result is independent of thread scheduling.
pub const TRIAL_BATCH: u64 = 4096;

/// Exact mass of the two polar caps {geodesic distance from the equator >=
/// epsilon} on the round sphere S^dim, i.e. the complement of the equatorial
/// band. Computed from the regularized incomplete beta function: the squared
/// height coordinate of a uniform point is Beta(1/2, dim/2).
pub fn sphere_band_mass(dim: u32, epsilon: f64) -> Result<f64> {
    if dim == 0 {
        return Err(Error::InvalidSpec("sphere dimension must be >= 1".into()));
    }
    if !(0.0..=PI / 2.0 + 1e-15).contains(&epsilon) {
        return Err(Error::Domain(format!(
            "equator distance {epsilon} outside [0, pi/2]"
        )));
    }
    if epsilon == 0.0 {
        return Ok(1.0);
    }
    let s2 = epsilon.sin().powi(2);
    Ok((1.0 - beta_reg(0.5, dim as f64 / 2.0, s2)).clamp(0.0, 1.0))
}

/// Exact mass of {xi <= pi/2 - epsilon} on CP^n: cos^{2n}(epsilon). This is
/// the complement of the epsilon-neighborhood (in the xi coordinate) of the
/// hyperplane at infinity. Evaluated as exp(2n log cos) so large n stays
/// accurate deep in the tail.
pub fn cpn_band_mass(n: u32, epsilon: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidSpec("CP^0 is a point".into()));
    }
    if !(0.0..=PI / 2.0 + 1e-15).contains(&epsilon) {
        return Err(Error::Domain(format!("epsilon {epsilon} outside [0, pi/2]")));
    }
    if epsilon == 0.0 {
        return Ok(1.0);
    }
    if epsilon >= PI / 2.0 {
        return Ok(0.0);
    }
    Ok((2.0 * n as f64 * epsilon.cos().ln()).exp())
}

/// Draws one value of the observable from the given generator.
pub type SamplerFn = Arc<dyn Fn(&mut ChaCha8Rng) -> Result<f64> + Send + Sync>;
/// Closed-form deviation mass as a function of epsilon.
pub type MassFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A scalar observable of a randomizable family member, with the metadata the
/// estimator can exploit: the known concentration point (locus) if there is
/// one, and a closed-form mass function if one exists.
#[derive(Clone)]
pub struct ObservableSpec {
    pub label: String,
    /// Family parameter recorded in report entries.
    pub n: u64,
    /// Known concentration point of the observable. `None` means the
    /// estimator centers at the empirical median instead.
    pub locus: Option<f64>,
    pub sampler: SamplerFn,
    /// Exact mass of {|observable - locus| > epsilon} when known.
    pub exact_mass: Option<MassFn>,
}

impl std::fmt::Debug for ObservableSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ObservableSpec")
            .field("label", &self.label)
            .field("n", &self.n)
            .field("locus", &self.locus)
            .field("exact_mass", &self.exact_mass.is_some())
            .finish()
    }
}

/// Built-in family: the xi angle of a uniform point of CP^n, concentrating
/// at pi/2 with exact mass cos^{2n}(epsilon).
pub fn cpn_family(n: u32) -> ObservableSpec {
    ObservableSpec {
        label: "cpn".into(),
        n: n as u64,
        locus: Some(PI / 2.0),
        sampler: Arc::new(move |rng| {
            Ok(crate::sampling::sample_cpn_angles(n as usize, rng)?.xi)
        }),
        exact_mass: Some(Arc::new(move |eps| {
            if eps >= PI / 2.0 {
                0.0
            } else {
                cpn_band_mass(n, eps.max(0.0)).unwrap_or(0.0)
            }
        })),
    }
}

/// The same observable as [`cpn_family`] drawn through the other route: the
/// xi angle recovered from the first coordinate of a uniform unit vector of
/// C^{n+1}. Distribution-level agreement of the two routes is a sampler
/// correctness check, so they must never share sampling code.
pub fn cpn_family_via_haar(n: u32) -> ObservableSpec {
    ObservableSpec {
        label: "cpn".into(),
        n: n as u64,
        locus: Some(PI / 2.0),
        sampler: Arc::new(move |rng| {
            let cos2 = crate::sampling::cpn_point_from_haar(n as usize, rng)?;
            Ok(cos2.clamp(0.0, 1.0).sqrt().acos())
        }),
        exact_mass: Some(Arc::new(move |eps| {
            if eps >= PI / 2.0 {
                0.0
            } else {
                cpn_band_mass(n, eps.max(0.0)).unwrap_or(0.0)
            }
        })),
    }
}

/// Built-in family: the first coordinate of a uniform point of S^dim,
/// concentrating at 0 with exact mass sphere_band_mass(dim, arcsin epsilon).
pub fn sphere_coordinate_family(dim: u32) -> ObservableSpec {
    ObservableSpec {
        label: "sphere-coordinate".into(),
        n: dim as u64,
        locus: Some(0.0),
        sampler: Arc::new(move |rng| {
            Ok(crate::sampling::uniform_sphere_point(dim as usize + 1, rng)?[0])
        }),
        exact_mass: Some(Arc::new(move |eps| {
            if eps >= 1.0 {
                0.0
            } else {
                sphere_band_mass(dim, eps.max(0.0).asin()).unwrap_or(0.0)
            }
        })),
    }
}

/// One (n, epsilon) line of a concentration report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportEntry {
    pub n: u64,
    pub epsilon: f64,
    pub exact_mass: Option<f64>,
    pub mc_mass: f64,
    pub mc_halfwidth: f64,
    pub trials: u64,
    /// Set when the observable had zero empirical spread.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationReport {
    pub family_label: String,
    pub entries: Vec<ReportEntry>,
}

impl ConcentrationReport {
    /// Append the entries of another report for the same family, e.g. to
    /// collect several n values before a trend check.
    pub fn merge(mut self, other: ConcentrationReport) -> Result<ConcentrationReport> {
        if self.family_label != other.family_label {
            return Err(Error::InvalidSpec(format!(
                "cannot merge reports for {} and {}",
                self.family_label, other.family_label
            )));
        }
        self.entries.extend(other.entries);
        Ok(self)
    }
}

/// Monte Carlo estimate of the deviation masses of an observable.
///
/// For each epsilon in the grid, estimates P(|observable - center| >
/// epsilon), where the center is the family's known locus when declared and
/// the empirical median otherwise. Exact masses are attached when the family
/// provides them. Trials run in batches of [`TRIAL_BATCH`], batch b drawing
/// from `stream.substream(b)`; a call consumes stream ids
/// [stream_id, stream_id + ceil(trials / TRIAL_BATCH)).
pub fn estimate_concentration(
    spec: &ObservableSpec,
    epsilon_grid: &[f64],
    trials: u64,
    stream: RandomStream,
) -> Result<ConcentrationReport> {
    if trials < 1_000 {
        return Err(Error::InsufficientData(format!(
            "need at least 1000 trials for a meaningful mass estimate, got {trials}"
        )));
    }
    if epsilon_grid.is_empty() {
        return Err(Error::InvalidSpec("empty epsilon grid".into()));
    }
    if epsilon_grid.iter().any(|e| !e.is_finite() || *e < 0.0) {
        return Err(Error::Domain("epsilon grid entries must be finite and >= 0".into()));
    }

    let values = batched_map(trials, TRIAL_BATCH, stream, |rng| (spec.sampler)(rng))?;

    let center = match spec.locus {
        Some(l) => l,
        None => median(&values)?,
    };
    let degenerate = values.iter().all(|v| *v == values[0]);

    let mut entries = Vec::with_capacity(epsilon_grid.len());
    for &eps in epsilon_grid {
        let hits = values.iter().filter(|v| (**v - center).abs() > eps).count() as u64;
        let mc_mass = hits as f64 / trials as f64;
        let mc_halfwidth = clopper_pearson_halfwidth(hits, trials, CONFIDENCE)?;
        let exact_mass = spec.exact_mass.as_ref().map(|f| f(eps));
        entries.push(ReportEntry {
            n: spec.n,
            epsilon: eps,
            exact_mass,
            mc_mass,
            mc_halfwidth,
            trials,
            degenerate,
        });
    }
    Ok(ConcentrationReport { family_label: spec.label.clone(), entries })
}

/// Trend verdict for one epsilon of a report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendVerdict {
    pub epsilon: f64,
    /// Number of distinct n values examined.
    pub points: usize,
    /// True when the masses decrease beyond confidence halfwidths along n.
    pub pass: bool,
}

/// For each epsilon present with at least 3 distinct n values, check that the
/// estimated masses decrease in n beyond the confidence halfwidths. This is
/// the numerical signature of a Levy family, not a proof of it.
pub fn levy_trend(report: &ConcentrationReport) -> Result<Vec<TrendVerdict>> {
    let mut grid: Vec<f64> = Vec::new();
    for e in &report.entries {
        if !grid.iter().any(|g| (g - e.epsilon).abs() < 1e-12) {
            grid.push(e.epsilon);
        }
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut verdicts = Vec::new();
    for &eps in &grid {
        let mut at_eps: Vec<&ReportEntry> = report
            .entries
            .iter()
            .filter(|e| (e.epsilon - eps).abs() < 1e-12)
            .collect();
        at_eps.sort_by_key(|e| e.n);
        at_eps.dedup_by_key(|e| e.n);
        if at_eps.len() < 3 {
            continue;
        }
        let pass = at_eps.windows(2).all(|w| {
            w[1].mc_mass + w[1].mc_halfwidth < w[0].mc_mass - w[0].mc_halfwidth
        });
        verdicts.push(TrendVerdict { epsilon: eps, points: at_eps.len(), pass });
    }
    if verdicts.is_empty() {
        return Err(Error::InsufficientData(
            "no epsilon has at least 3 distinct n values".into(),
        ));
    }
    Ok(verdicts)
}

/// How the rescaling constants of a family grow.
#[derive(Debug, Clone, PartialEq)]
pub enum GrowthTag {
    /// c_i = i (1-based).
    Linear,
    /// c_i = i^2 (1-based).
    Quadratic,
    /// Explicit constants; must be positive and nondecreasing.
    Custom(Vec<f64>),
}

/// A family of metric rescalings g_i -> g_i / c_i, which multiply Ricci
/// lower bounds by c_i.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledFamily {
    pub base_family: String,
    pub scale_constants: Vec<f64>,
}

impl ScaledFamily {
    pub fn new(base_family: impl Into<String>, growth: GrowthTag, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidSpec("empty scaled family".into()));
        }
        let scale_constants = match growth {
            GrowthTag::Linear => (1..=len).map(|i| i as f64).collect(),
            GrowthTag::Quadratic => (1..=len).map(|i| (i * i) as f64).collect(),
            GrowthTag::Custom(c) => {
                if c.len() != len {
                    return Err(Error::InvalidSpec(format!(
                        "expected {len} scale constants, got {}",
                        c.len()
                    )));
                }
                if c.iter().any(|x| !x.is_finite() || *x <= 0.0) {
                    return Err(Error::InvalidSpec("scale constants must be positive".into()));
                }
                if c.windows(2).any(|w| w[1] < w[0]) {
                    return Err(Error::InvalidSpec("scale constants must be nondecreasing".into()));
                }
                c
            }
        };
        Ok(Self { base_family: base_family.into(), scale_constants })
    }
}

/// Rescaled Ricci bounds c_i R_i. Rejects non-positive base bounds, which
/// make the divergence criterion inapplicable.
pub fn apply_rescaling(family: &ScaledFamily, base_ricci: &[f64]) -> Result<Vec<f64>> {
    if base_ricci.len() != family.scale_constants.len() {
        return Err(Error::InvalidSpec(format!(
            "{} scale constants vs {} Ricci bounds",
            family.scale_constants.len(),
            base_ricci.len()
        )));
    }
    for (i, &r) in base_ricci.iter().enumerate() {
        if !r.is_finite() || r <= 0.0 {
            return Err(Error::NonPositiveRicci { index: i, value: r });
        }
    }
    Ok(family
        .scale_constants
        .iter()
        .zip(base_ricci)
        .map(|(c, r)| c * r)
        .collect())
}
