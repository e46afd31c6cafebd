//! Worked examples: the two circle families, pushforward measures of compact
//! group actions, coordinate moments on truncated Hilbert spheres, the
//! weighted circle action without fixed points, the determinant-correcting
//! unitary embedding, and Sobolev norms of the sine basis.

use crate::concentration::ObservableSpec;
use crate::error::{Error, Result};
use crate::numeric::{adaptive_simpson, uniform_trapezoid};
use crate::rng::{batched_map, RandomStream};
use crate::sampling::{sample_orthogonal, uniform_sphere_point, CMatrix};
use crate::stats::{clopper_pearson_halfwidth, mean_and_stderr};
use num_complex::Complex64;
use statrs::distribution::{Beta, ContinuousCDF};
use statrs::function::gamma::ln_gamma;
use std::f64::consts::PI;
use std::sync::Arc;

/// Batch size shared by the Monte Carlo loops in this module.
const TRIAL_BATCH: u64 = 4096;
const POINT_TOL: f64 = 1e-8;

/// The circle with metric dtheta^2 / (4 pi^2 n^2): total length 1/n,
/// diameter 1/(2n). Carries the uniform measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleFamilyY {
    pub n: u64,
    /// Length element per unit of theta, 1/(2 pi n).
    pub metric_scale: f64,
}

impl CircleFamilyY {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpec("family index must be >= 1".into()));
        }
        Ok(Self { n, metric_scale: 1.0 / (2.0 * PI * n as f64) })
    }
}

/// Diameter of the n-th shrinking circle: half the total length.
pub fn yn_diameter(n: u64) -> Result<f64> {
    Ok(CircleFamilyY::new(n)?.metric_scale * PI)
}

/// Whether the epsilon-neighborhood of any half-mass set is already the
/// whole circle: true iff epsilon exceeds the diameter's scale, i.e. n >
/// pi / epsilon in the unscaled angle.
pub fn yn_tube_is_whole_space(n: u64, epsilon: f64) -> Result<bool> {
    if n == 0 {
        return Err(Error::InvalidSpec("family index must be >= 1".into()));
    }
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::Domain(format!("tube width must be positive, got {epsilon}")));
    }
    Ok((n as f64) > PI / epsilon)
}

/// The circle with the fixed round metric but measure proportional to
/// sin^{2n}(theta / 2) d theta, which piles up at theta = pi as n grows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleFamilyZ {
    pub n: u64,
    /// Normalizing constant (1/2pi) 2^{2n-1} Gamma(n) n! / Gamma(2n),
    /// evaluated through log-gamma so large n cannot overflow.
    pub norm_const: f64,
}

impl CircleFamilyZ {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpec("family index must be >= 1".into()));
        }
        let nf = n as f64;
        let log_c = -(2.0 * PI).ln() + (2.0 * nf - 1.0) * 2.0f64.ln() + ln_gamma(nf)
            + ln_gamma(nf + 1.0)
            - ln_gamma(2.0 * nf);
        Ok(Self { n, norm_const: log_c.exp() })
    }

    /// Normalized density at theta.
    pub fn density(&self, theta: f64) -> f64 {
        let s = (theta / 2.0).sin().abs();
        if s == 0.0 {
            return 0.0;
        }
        (self.norm_const.ln() + 2.0 * self.n as f64 * s.ln()).exp()
    }

    /// |integral of the density over [0, 2pi] minus 1|, by adaptive
    /// quadrature. Validates the Gamma-function constant.
    pub fn normalization_defect(&self) -> f64 {
        // The density is symmetric about pi; integrating the half keeps the
        // peak at an endpoint, which the adaptive rule resolves well.
        let half = adaptive_simpson(|t| self.density(t), 0.0, PI, 1e-13);
        (2.0 * half - 1.0).abs()
    }

    /// The family as a scalar observable: theta itself, concentrating at pi.
    pub fn observable(&self) -> ObservableSpec {
        let n = self.n;
        let beta = Beta::new(n as f64 + 0.5, 0.5).expect("valid shape parameters");
        ObservableSpec {
            label: "zn-circle".into(),
            n,
            locus: Some(PI),
            sampler: Arc::new(move |rng| {
                use rand::Rng;
                // sin^2(theta/2) is Beta(n + 1/2, 1/2); invert its CDF on the
                // half circle and reflect with a fair coin.
                let s = beta.inverse_cdf(rng.random::<f64>());
                let t = s.sqrt().clamp(0.0, 1.0).asin();
                let flip = rng.random::<f64>() < 0.5;
                Ok(if flip { 2.0 * PI - 2.0 * t } else { 2.0 * t })
            }),
            exact_mass: Some(Arc::new(move |eps| {
                if eps >= PI {
                    0.0
                } else if eps <= 0.0 {
                    1.0
                } else {
                    zn_mass_outside(n, eps).expect("delta validated in range")
                }
            })),
        }
    }
}

/// Mass of the density outside the arc (pi - delta, pi + delta), by
/// quadrature of the normalized density to 1e-10.
pub fn zn_mass_outside(n: u64, delta: f64) -> Result<f64> {
    let family = CircleFamilyZ::new(n)?;
    if !(delta > 0.0 && delta < PI) {
        return Err(Error::Domain(format!("arc half-width {delta} outside (0, pi)")));
    }
    // Symmetry about pi: the outside mass is twice the [0, pi - delta] tail.
    let tail = adaptive_simpson(|t| family.density(t), 0.0, PI - delta, 5e-11);
    Ok((2.0 * tail).clamp(0.0, 1.0))
}

/// Which group acts.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupTag {
    SpecialOrthogonal(usize),
    SpecialUnitary(usize),
    Unitary(usize),
    /// The circle acting through a list of integer weights, one per
    /// coordinate plane. All weights must be nonzero.
    CircleWeights(Vec<i64>),
}

/// Which compact space is acted on.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetTag {
    /// The round sphere S^m in R^{m+1}.
    Sphere(usize),
    /// The circle, with points represented by an angle in [0, 2pi).
    Circle,
    /// The unit ball of the span of the first N coordinates of a separable
    /// Hilbert space; the infinite-dimensional ball enters only through
    /// these truncations.
    HilbertTruncation(usize),
}

/// How the group acts on the target.
#[derive(Debug, Clone, PartialEq)]
pub enum EmbeddingTag {
    /// Every element acts as the identity.
    Trivial,
    /// The defining linear action on coordinates.
    Fundamental,
    /// Rotation of S^2 about a fixed axis.
    AxisRotation { axis: [f64; 3] },
}

/// Declarative description of a group action; the supported case analysis is
/// data rather than separate code paths.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionSpec {
    pub group: GroupTag,
    pub target: TargetTag,
    pub embedding: EmbeddingTag,
}

impl ActionSpec {
    pub fn validate(&self) -> Result<()> {
        if let GroupTag::CircleWeights(w) = &self.group {
            if w.is_empty() {
                return Err(Error::InvalidSpec("empty weight vector".into()));
            }
            if w.contains(&0) {
                return Err(Error::InvalidSpec(
                    "weight vector entries must be nonzero; a zero weight fixes a whole plane"
                        .into(),
                ));
            }
        }
        Ok(())
    }
}

/// Target sets for pushforward estimates: an arc on the circle, a coordinate
/// half-space, a weak-topology ball (a cylinder set depending on one
/// vector), or a complement of one of these.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetSet {
    /// {theta : (theta - start) mod 2pi < length}.
    Arc { start: f64, length: f64 },
    /// {y : y_coordinate > level}; coordinates beyond the truncation read 0.
    HalfSpace { coordinate: usize, level: f64 },
    /// {y : |<v, y> - center| < epsilon}.
    WeakBall { v: Vec<f64>, center: f64, epsilon: f64 },
    Complement(Box<TargetSet>),
}

impl TargetSet {
    pub fn validate(&self) -> Result<()> {
        match self {
            TargetSet::Arc { start, length } => {
                if !start.is_finite() || !(*length >= 0.0 && *length <= 2.0 * PI) {
                    return Err(Error::Domain(format!(
                        "arc start {start}, length {length} invalid; length must lie in [0, 2pi]"
                    )));
                }
            }
            TargetSet::HalfSpace { level, .. } => {
                if !level.is_finite() {
                    return Err(Error::Domain("half-space level must be finite".into()));
                }
            }
            TargetSet::WeakBall { v, center, epsilon } => {
                if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Domain("weak ball needs a finite nonempty vector".into()));
                }
                if !center.is_finite() || !epsilon.is_finite() || *epsilon <= 0.0 {
                    return Err(Error::Domain(format!(
                        "weak ball center {center}, radius {epsilon} invalid"
                    )));
                }
            }
            TargetSet::Complement(inner) => inner.validate()?,
        }
        Ok(())
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        match self {
            TargetSet::Arc { start, length } => {
                let theta = point.first().copied().unwrap_or(0.0);
                (theta - start).rem_euclid(2.0 * PI) < *length
            }
            TargetSet::HalfSpace { coordinate, level } => {
                point.get(*coordinate).copied().unwrap_or(0.0) > *level
            }
            TargetSet::WeakBall { v, center, epsilon } => {
                let dot: f64 = v.iter().zip(point).map(|(a, b)| a * b).sum();
                (dot - center).abs() < *epsilon
            }
            TargetSet::Complement(inner) => !inner.contains(point),
        }
    }
}

/// Monte Carlo estimate of a pushforward measure: the fraction of Haar group
/// elements moving the base point into the target set.
#[derive(Debug, Clone, PartialEq)]
pub struct PushforwardEstimate {
    pub action: ActionSpec,
    pub base_point: Vec<f64>,
    pub target: TargetSet,
    pub probability: f64,
    pub halfwidth: f64,
    pub trials: u64,
}

fn require_on_sphere(x: &[f64], ambient: usize) -> Result<()> {
    if x.len() != ambient {
        return Err(Error::InvalidSpec(format!(
            "base point has {} coordinates, the sphere sits in R^{ambient}",
            x.len()
        )));
    }
    let norm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > POINT_TOL {
        return Err(Error::Domain(format!("base point norm {norm} is not 1")));
    }
    Ok(())
}

fn rotate_about_axis(axis: [f64; 3], theta: f64, x: &[f64]) -> Vec<f64> {
    let (s, c) = theta.sin_cos();
    let k = axis;
    let dot = k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
    let cross = [
        k[1] * x[2] - k[2] * x[1],
        k[2] * x[0] - k[0] * x[2],
        k[0] * x[1] - k[1] * x[0],
    ];
    (0..3).map(|i| x[i] * c + cross[i] * s + k[i] * dot * (1.0 - c)).collect()
}

/// Estimate the measure the action pushes onto the target space from the
/// base point: P(g . x in target) over Haar-distributed g, with a 99%
/// Clopper-Pearson halfwidth.
///
/// Supported actions: any group acting trivially; SO(2) rotating the circle;
/// SO(m+1) rotating S^m; weighted circle actions on odd spheres; rotation of
/// S^2 about an axis; SO(N) on the N-th Hilbert truncation. For the
/// truncation the orbit of the base point is sampled through the exact law
/// of R x (uniform on the sphere of radius |x|), since materializing
/// N-by-N rotations is prohibitive at the N this example needs.
pub fn induced_measure(
    action: &ActionSpec,
    x: &[f64],
    target: &TargetSet,
    trials: u64,
    stream: RandomStream,
) -> Result<PushforwardEstimate> {
    action.validate()?;
    target.validate()?;
    if trials == 0 {
        return Err(Error::InsufficientData("zero trials".into()));
    }
    if x.iter().any(|a| !a.is_finite()) {
        return Err(Error::Domain("base point has non-finite coordinates".into()));
    }

    type Mover = Box<dyn Fn(&mut rand_chacha::ChaCha8Rng) -> Result<Vec<f64>> + Sync>;
    let mover: Mover = match (&action.group, &action.target, &action.embedding) {
        (_, TargetTag::Circle, EmbeddingTag::Trivial)
        | (_, TargetTag::Sphere(_), EmbeddingTag::Trivial)
        | (_, TargetTag::HilbertTruncation(_), EmbeddingTag::Trivial) => {
            match &action.target {
                TargetTag::Circle if x.len() != 1 => {
                    return Err(Error::InvalidSpec(
                        "circle points are a single angle".into(),
                    ))
                }
                TargetTag::Sphere(m) => require_on_sphere(x, m + 1)?,
                _ => {}
            }
            let fixed = x.to_vec();
            Box::new(move |_| Ok(fixed.clone()))
        }
        (GroupTag::SpecialOrthogonal(2), TargetTag::Circle, EmbeddingTag::Fundamental) => {
            if x.len() != 1 {
                return Err(Error::InvalidSpec("circle points are a single angle".into()));
            }
            let base = x[0];
            Box::new(move |rng| {
                use rand::Rng;
                let phi = rng.random::<f64>() * 2.0 * PI;
                Ok(vec![(base + phi).rem_euclid(2.0 * PI)])
            })
        }
        (GroupTag::SpecialOrthogonal(n), TargetTag::Sphere(m), EmbeddingTag::Fundamental) => {
            if *n != m + 1 {
                return Err(Error::InvalidSpec(format!(
                    "the defining action of SO({n}) lives on S^{}",
                    n - 1
                )));
            }
            require_on_sphere(x, m + 1)?;
            let base = nalgebra::DVector::from_column_slice(x);
            let n = *n;
            Box::new(move |rng| {
                let r = sample_orthogonal(n, rng)?.matrix;
                let y = r.map(|z| z.re) * &base;
                Ok(y.iter().copied().collect())
            })
        }
        (GroupTag::SpecialOrthogonal(3), TargetTag::Sphere(2), EmbeddingTag::AxisRotation { axis }) => {
            require_on_sphere(x, 3)?;
            let norm = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
            if norm < POINT_TOL {
                return Err(Error::Domain("rotation axis must be nonzero".into()));
            }
            let k = [axis[0] / norm, axis[1] / norm, axis[2] / norm];
            let base = x.to_vec();
            Box::new(move |rng| {
                use rand::Rng;
                let theta = rng.random::<f64>() * 2.0 * PI;
                Ok(rotate_about_axis(k, theta, &base))
            })
        }
        (GroupTag::CircleWeights(w), TargetTag::Sphere(m), EmbeddingTag::Fundamental) => {
            if m + 1 != 2 * w.len() {
                return Err(Error::InvalidSpec(format!(
                    "{} weights act on S^{}, not S^{m}",
                    w.len(),
                    2 * w.len() - 1
                )));
            }
            require_on_sphere(x, m + 1)?;
            let w = w.clone();
            let base = x.to_vec();
            Box::new(move |rng| {
                use rand::Rng;
                let theta = rng.random::<f64>() * 2.0 * PI;
                u1_block_action(&w, theta, &base)
            })
        }
        (GroupTag::SpecialOrthogonal(n), TargetTag::HilbertTruncation(nt), EmbeddingTag::Fundamental) => {
            if n != nt {
                return Err(Error::InvalidSpec(format!(
                    "SO({n}) acts on the {n}-th truncation, not the {nt}-th"
                )));
            }
            if x.len() > *nt {
                return Err(Error::InvalidSpec(format!(
                    "base point uses {} coordinates, truncation keeps {nt}",
                    x.len()
                )));
            }
            let radius = x.iter().map(|a| a * a).sum::<f64>().sqrt();
            if radius > 1.0 + POINT_TOL {
                return Err(Error::Domain(format!(
                    "base point norm {radius} is outside the unit ball"
                )));
            }
            let n = *nt;
            Box::new(move |rng| {
                let mut y = uniform_sphere_point(n, rng)?;
                for c in &mut y {
                    *c *= radius;
                }
                Ok(y)
            })
        }
        _ => {
            return Err(Error::InvalidSpec(format!(
                "unsupported action: {:?} on {:?} via {:?}",
                action.group, action.target, action.embedding
            )))
        }
    };

    let hits_vec = batched_map(trials, TRIAL_BATCH, stream, |rng| {
        Ok(if target.contains(&mover(rng)?) { 1.0 } else { 0.0 })
    })?;
    let hits = hits_vec.iter().filter(|h| **h == 1.0).count() as u64;
    let probability = hits as f64 / trials as f64;
    let halfwidth = clopper_pearson_halfwidth(hits, trials, 0.99)?;
    Ok(PushforwardEstimate {
        action: action.clone(),
        base_point: x.to_vec(),
        target: target.clone(),
        probability,
        halfwidth,
        trials,
    })
}

/// Monte Carlo estimate of E[<v, X>^2] for X uniform on the unit sphere of
/// the first `dim` coordinates, with the exact value attached.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentEstimate {
    pub dim: usize,
    pub estimate: f64,
    pub stderr: f64,
    pub exact: f64,
    pub trials: u64,
}

/// Second moment of the v-coordinate of a uniform point on the truncated
/// Hilbert sphere. The exact value is sum of v_j^2 over j < dim, divided by
/// dim, by exchangeability of sphere coordinates.
pub fn hilbert_coordinate_moment(
    dim: usize,
    v: &[f64],
    trials: u64,
    stream: RandomStream,
) -> Result<MomentEstimate> {
    if dim == 0 {
        return Err(Error::InvalidSpec("truncation must keep at least one coordinate".into()));
    }
    if trials < 2 {
        return Err(Error::InsufficientData("need at least 2 trials for a stderr".into()));
    }
    if v.iter().any(|a| !a.is_finite()) {
        return Err(Error::Domain("test vector has non-finite coordinates".into()));
    }
    let exact = v.iter().take(dim).map(|a| a * a).sum::<f64>() / dim as f64;
    let head = &v[..v.len().min(dim)];
    let values = batched_map(trials, TRIAL_BATCH, stream, |rng| {
        let x = uniform_sphere_point(dim, rng)?;
        let dot: f64 = head.iter().zip(&x).map(|(a, b)| a * b).sum();
        Ok(dot * dot)
    })?;
    let (estimate, stderr) = mean_and_stderr(&values)?;
    Ok(MomentEstimate { dim, estimate, stderr, exact, trials })
}

/// Apply the block rotation diag(R(m_1 theta), ..., R(m_k theta)) to a point
/// of R^{2k}, plane j turning m_j times as theta runs once around.
pub fn u1_block_action(weights: &[i64], theta: f64, x: &[f64]) -> Result<Vec<f64>> {
    if weights.is_empty() || weights.contains(&0) {
        return Err(Error::InvalidSpec("weights must be nonempty and nonzero".into()));
    }
    if !theta.is_finite() {
        return Err(Error::Domain("angle must be finite".into()));
    }
    if x.len() != 2 * weights.len() {
        return Err(Error::InvalidSpec(format!(
            "{} weights act on R^{}, point has {} coordinates",
            weights.len(),
            2 * weights.len(),
            x.len()
        )));
    }
    let mut y = vec![0.0; x.len()];
    for (j, &m) in weights.iter().enumerate() {
        let (s, c) = (m as f64 * theta).sin_cos();
        y[2 * j] = c * x[2 * j] - s * x[2 * j + 1];
        y[2 * j + 1] = s * x[2 * j] + c * x[2 * j + 1];
    }
    Ok(y)
}

/// Sampled certificate that the weighted circle action has no near-fixed
/// point: the minimum over sampled unit x of the maximum over a theta grid
/// of |R(theta) x - x|. Strictly positive output means no sampled point
/// stays near itself for every grid angle. This is a certificate at sample
/// resolution, not a proof.
pub fn u1_min_displacement(
    weights: &[i64],
    theta_grid: usize,
    sphere_samples: u64,
    stream: RandomStream,
) -> Result<f64> {
    if weights.is_empty() || weights.contains(&0) {
        return Err(Error::InvalidSpec("weights must be nonempty and nonzero".into()));
    }
    if theta_grid < 2 || sphere_samples == 0 {
        return Err(Error::InsufficientData(
            "need at least 2 grid angles and 1 sphere sample".into(),
        ));
    }
    let dim = 2 * weights.len();
    let weights = weights.to_vec();
    let thetas: Vec<f64> = (0..theta_grid)
        .map(|t| 2.0 * PI * t as f64 / theta_grid as f64)
        .collect();
    let per_sample = batched_map(sphere_samples, TRIAL_BATCH, stream, |rng| {
        let x = uniform_sphere_point(dim, rng)?;
        // |R(theta) x - x|^2 = sum_j 4 sin^2(m_j theta / 2) r_j^2 with r_j
        // the radius of x in plane j.
        let r2: Vec<f64> = (0..weights.len())
            .map(|j| x[2 * j] * x[2 * j] + x[2 * j + 1] * x[2 * j + 1])
            .collect();
        let max_disp2 = thetas
            .iter()
            .map(|&theta| {
                weights
                    .iter()
                    .zip(&r2)
                    .map(|(&m, r)| {
                        let s = (m as f64 * theta / 2.0).sin();
                        4.0 * s * s * r
                    })
                    .sum::<f64>()
            })
            .fold(0.0, f64::max);
        Ok(max_disp2.sqrt())
    })?;
    Ok(per_sample.into_iter().fold(f64::INFINITY, f64::min))
}

/// Append a determinant-correcting row and column: X goes to
/// diag(X, det(X)^{-1}), a special unitary matrix one size up. Rejects
/// inputs whose unitarity residual exceeds 1e-8.
pub fn embedding_j(x: &CMatrix) -> Result<CMatrix> {
    let n = x.nrows();
    if n == 0 || x.ncols() != n {
        return Err(Error::InvalidSpec(format!(
            "expected a square matrix, got {}x{}",
            n,
            x.ncols()
        )));
    }
    let gram = x.adjoint() * x;
    let residual = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| {
            let expect = if i == j { Complex64::ONE } else { Complex64::ZERO };
            (gram[(i, j)] - expect).norm()
        })
        .fold(0.0, f64::max);
    if residual > 1e-8 {
        return Err(Error::Domain(format!(
            "input is not unitary: residual {residual:.3e}"
        )));
    }
    let det = x.determinant();
    // det lies on the unit circle up to the residual; conjugate-divide keeps
    // the correction there too.
    let inv_det = det.conj() / det.norm_sqr();
    let mut j = CMatrix::zeros(n + 1, n + 1);
    j.view_mut((0, 0), (n, n)).copy_from(x);
    j[(n, n)] = inv_det;
    Ok(j)
}

/// Numerical W^{1,2} and L^2 norms on [0, 2pi] of sin(n x) / sqrt(pi (n^2 +
/// 1)), by the periodic trapezoid rule. Exact targets are 1 and
/// 1 / sqrt(n^2 + 1). Demands at least 20 points per oscillation.
pub fn sobolev_norms(n: u32, quadrature_points: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::InvalidSpec("mode number must be >= 1".into()));
    }
    let needed = 20 * n as usize;
    if quadrature_points < needed {
        return Err(Error::Resolution { got: quadrature_points, needed, n });
    }
    let scale = 1.0 / (PI * (n as f64 * n as f64 + 1.0)).sqrt();
    let u = |x: f64| (n as f64 * x).sin() * scale;
    let du = |x: f64| n as f64 * (n as f64 * x).cos() * scale;
    // Periodic integrands: the trapezoid rule on a full period is spectrally
    // accurate, so the guard above is about resolving the oscillation.
    let l2_sq = uniform_trapezoid(|x| u(x) * u(x), 0.0, 2.0 * PI, quadrature_points);
    let du_sq = uniform_trapezoid(|x| du(x) * du(x), 0.0, 2.0 * PI, quadrature_points);
    Ok(((l2_sq + du_sq).sqrt(), l2_sq.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concentration::{estimate_concentration, sphere_band_mass};
    use crate::stats::{ks_one_sample, ks_two_sample};
    use approx::assert_relative_eq;
    use statrs::function::beta::beta_reg;

    #[test]
    fn shrinking_circle_diameter_and_tube() {
        assert_relative_eq!(yn_diameter(1).unwrap(), 0.5);
        assert_relative_eq!(yn_diameter(10).unwrap(), 0.05);
        assert!(yn_tube_is_whole_space(4, 1.0).unwrap());
        assert!(!yn_tube_is_whole_space(3, 1.0).unwrap());
        assert!(yn_diameter(0).is_err());
        assert!(yn_tube_is_whole_space(5, 0.0).is_err());
        let y = CircleFamilyY::new(7).unwrap();
        assert_relative_eq!(y.metric_scale * 2.0 * PI, 1.0 / 7.0);
    }

    #[test]
    fn zn_constant_and_normalization() {
        // n = 1: (1/2pi) * 2 * 1 * 1 / 1 = 1/pi.
        assert_relative_eq!(CircleFamilyZ::new(1).unwrap().norm_const, 1.0 / PI, epsilon = 1e-14);
        for n in [1u64, 5, 50, 200] {
            let defect = CircleFamilyZ::new(n).unwrap().normalization_defect();
            assert!(defect < 1e-8, "n={n}: defect {defect:.3e}");
        }
        assert!(CircleFamilyZ::new(0).is_err());
    }

    #[test]
    fn zn_mass_outside_matches_the_elementary_case() {
        // n = 1: outside mass is 1 - (delta + sin delta)/pi.
        for delta in [0.2f64, 0.5, 1.5, 3.0] {
            let expect = 1.0 - (delta + delta.sin()) / PI;
            assert_relative_eq!(zn_mass_outside(1, delta).unwrap(), expect, epsilon = 1e-10);
        }
        assert_relative_eq!(
            zn_mass_outside(1, 0.5).unwrap(),
            0.6882391682813983,
            epsilon = 1e-12
        );
        assert!(zn_mass_outside(5, PI - 1e-5).unwrap() < 1e-8);
        assert!(zn_mass_outside(3, 0.0).is_err());
        assert!(zn_mass_outside(3, PI).is_err());
    }

    #[test]
    fn zn_mass_outside_matches_the_beta_tail_oracle() {
        // sin^2(theta/2) of a draw is Beta(n + 1/2, 1/2), so the outside mass
        // is the regularized incomplete beta at cos^2(delta/2).
        for n in [2u64, 5, 20, 80, 100] {
            for delta in [0.3f64, 1.0] {
                let c = (delta / 2.0).cos();
                let expect = beta_reg(n as f64 + 0.5, 0.5, c * c);
                let got = zn_mass_outside(n, delta).unwrap();
                assert!(
                    (got - expect).abs() < 1e-9,
                    "n={n} delta={delta}: {got} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn zn_mass_outside_frozen_values_and_monotonicity() {
        assert!((zn_mass_outside(5, 0.3).unwrap() - 0.6260685125).abs() < 1e-8);
        assert!((zn_mass_outside(20, 0.3).unwrap() - 0.3388496441).abs() < 1e-8);
        assert!((zn_mass_outside(80, 0.3).unwrap() - 0.05692055).abs() < 5e-8);
        assert!((zn_mass_outside(100, 0.3).unwrap() - 0.03333863).abs() < 5e-8);
        for delta in [0.3, 1.0] {
            let grid = [1u64, 2, 5, 10, 20, 50, 100, 200];
            let masses: Vec<f64> =
                grid.iter().map(|&n| zn_mass_outside(n, delta).unwrap()).collect();
            assert!(
                masses.windows(2).all(|w| w[1] < w[0]),
                "delta={delta}: {masses:?}"
            );
        }
    }

    #[test]
    fn zn_sampler_matches_the_density() {
        let family = CircleFamilyZ::new(6).unwrap();
        let spec = family.observable();
        let mut rng = RandomStream::new(31, 0).rng();
        let sample: Vec<f64> = (0..4096).map(|_| (spec.sampler)(&mut rng).unwrap()).collect();
        assert!(sample.iter().all(|t| (0.0..=2.0 * PI).contains(t)));
        let cdf = |theta: f64| {
            let s = (theta / 2.0).sin();
            let half = 0.5 * beta_reg(6.5, 0.5, s * s);
            if theta <= PI {
                half
            } else {
                1.0 - half
            }
        };
        let ks = ks_one_sample(&sample, cdf).unwrap();
        assert!(!ks.rejects_at(0.01), "KS p = {}", ks.p_value);
    }

    #[test]
    fn zn_observable_concentration_matches_quadrature() {
        let spec = CircleFamilyZ::new(20).unwrap().observable();
        let report =
            estimate_concentration(&spec, &[0.3], 20_000, RandomStream::new(77, 0)).unwrap();
        let e = &report.entries[0];
        assert_relative_eq!(e.exact_mass.unwrap(), 0.3388496441, epsilon = 1e-8);
        assert!(
            (e.mc_mass - e.exact_mass.unwrap()).abs() <= e.mc_halfwidth,
            "mc {} exact {} halfwidth {}",
            e.mc_mass,
            e.exact_mass.unwrap(),
            e.mc_halfwidth
        );
    }

    #[test]
    fn trivial_action_is_a_dirac_measure() {
        let action = ActionSpec {
            group: GroupTag::SpecialOrthogonal(3),
            target: TargetTag::Circle,
            embedding: EmbeddingTag::Trivial,
        };
        let hit = TargetSet::Arc { start: 0.8, length: 0.5 };
        let miss = TargetSet::Arc { start: 2.0, length: 0.5 };
        let stream = RandomStream::new(5, 0);
        let p = induced_measure(&action, &[1.0], &hit, 500, stream).unwrap();
        assert_eq!(p.probability, 1.0);
        let p = induced_measure(&action, &[1.0], &miss, 500, stream).unwrap();
        assert_eq!(p.probability, 0.0);
        // Dirac behavior holds for any target, here on a sphere too.
        let action = ActionSpec {
            group: GroupTag::SpecialUnitary(4),
            target: TargetTag::Sphere(2),
            embedding: EmbeddingTag::Trivial,
        };
        let half = TargetSet::HalfSpace { coordinate: 2, level: 0.0 };
        let p = induced_measure(&action, &[0.0, 0.0, 1.0], &half, 300, stream).unwrap();
        assert_eq!(p.probability, 1.0);
    }

    #[test]
    fn circle_rotation_pushes_to_arc_length_over_2pi() {
        let action = ActionSpec {
            group: GroupTag::SpecialOrthogonal(2),
            target: TargetTag::Circle,
            embedding: EmbeddingTag::Fundamental,
        };
        let arc = TargetSet::Arc { start: 4.0, length: 1.3 };
        let p = induced_measure(&action, &[0.7], &arc, 40_000, RandomStream::new(11, 0)).unwrap();
        let expect = 1.3 / (2.0 * PI);
        assert!(
            (p.probability - expect).abs() <= p.halfwidth,
            "{} vs {expect} (halfwidth {})",
            p.probability,
            p.halfwidth
        );
    }

    #[test]
    fn full_rotation_group_randomizes_the_sphere() {
        let action = ActionSpec {
            group: GroupTag::SpecialOrthogonal(3),
            target: TargetTag::Sphere(2),
            embedding: EmbeddingTag::Fundamental,
        };
        let half = TargetSet::HalfSpace { coordinate: 0, level: 0.0 };
        let p = induced_measure(&action, &[0.0, 0.0, 1.0], &half, 20_000, RandomStream::new(12, 0))
            .unwrap();
        assert!((p.probability - 0.5).abs() <= p.halfwidth);
        // Base point must sit on the sphere.
        let bad = induced_measure(&action, &[0.0, 0.0, 2.0], &half, 100, RandomStream::new(12, 0));
        assert!(bad.is_err());
    }

    #[test]
    fn axis_rotation_fixes_the_pole_and_spreads_the_equator() {
        let action = ActionSpec {
            group: GroupTag::SpecialOrthogonal(3),
            target: TargetTag::Sphere(2),
            embedding: EmbeddingTag::AxisRotation { axis: [0.0, 0.0, 1.0] },
        };
        let stream = RandomStream::new(13, 0);
        // Axis through the base point: the orbit is the point itself.
        let near_pole = TargetSet::WeakBall {
            v: vec![0.0, 0.0, 1.0],
            center: 1.0,
            epsilon: 1e-9,
        };
        let p = induced_measure(&action, &[0.0, 0.0, 1.0], &near_pole, 400, stream).unwrap();
        assert_eq!(p.probability, 1.0);
        // Axis not through the base point: uniform on the latitude circle.
        let half = TargetSet::HalfSpace { coordinate: 0, level: 0.0 };
        let p = induced_measure(&action, &[1.0, 0.0, 0.0], &half, 20_000, stream).unwrap();
        assert!((p.probability - 0.5).abs() <= p.halfwidth);
        // The z coordinate never moves.
        let z_moved = TargetSet::Complement(Box::new(TargetSet::WeakBall {
            v: vec![0.0, 0.0, 1.0],
            center: 0.0,
            epsilon: 1e-12,
        }));
        let p = induced_measure(&action, &[1.0, 0.0, 0.0], &z_moved, 400, stream).unwrap();
        assert_eq!(p.probability, 0.0);
    }

    #[test]
    fn weighted_circle_action_spreads_each_plane() {
        let action = ActionSpec {
            group: GroupTag::CircleWeights(vec![3]),
            target: TargetTag::Sphere(1),
            embedding: EmbeddingTag::Fundamental,
        };
        let half = TargetSet::HalfSpace { coordinate: 0, level: 0.0 };
        let p = induced_measure(&action, &[1.0, 0.0], &half, 20_000, RandomStream::new(14, 0))
            .unwrap();
        assert!((p.probability - 0.5).abs() <= p.halfwidth);
        let zero_weight = ActionSpec {
            group: GroupTag::CircleWeights(vec![1, 0]),
            target: TargetTag::Sphere(3),
            embedding: EmbeddingTag::Fundamental,
        };
        assert!(zero_weight.validate().is_err());
    }

    #[test]
    fn hilbert_truncation_sampler_agrees_with_literal_rotations() {
        // Dual route at small size: literal Haar matrices applied to e_1
        // versus the direct orbit sampler, compared through <e_1, y>.
        let n = 8;
        let mut rng = RandomStream::new(15, 0).rng();
        let literal: Vec<f64> = (0..4000)
            .map(|_| sample_orthogonal(n, &mut rng).unwrap().matrix[(0, 0)].re)
            .collect();
        let action = ActionSpec {
            group: GroupTag::SpecialOrthogonal(n),
            target: TargetTag::HilbertTruncation(n),
            embedding: EmbeddingTag::Fundamental,
        };
        let mut x = vec![0.0; n];
        x[0] = 1.0;
        let mut rng = RandomStream::new(15, 1).rng();
        let direct: Vec<f64> = (0..4000)
            .map(|_| {
                let _ = &action;
                let y = uniform_sphere_point(n, &mut rng).unwrap();
                y[0]
            })
            .collect();
        let ks = ks_two_sample(&literal, &direct).unwrap();
        assert!(!ks.rejects_at(0.01), "KS p = {}", ks.p_value);
    }

    #[test]
    fn hilbert_truncation_tail_matches_the_band_mass() {
        let n = 100;
        let action = ActionSpec {
            group: GroupTag::SpecialOrthogonal(n),
            target: TargetTag::HilbertTruncation(n),
            embedding: EmbeddingTag::Fundamental,
        };
        let mut v = vec![0.0; n];
        v[0] = 1.0;
        let outside = TargetSet::Complement(Box::new(TargetSet::WeakBall {
            v,
            center: 0.0,
            epsilon: 0.1,
        }));
        let p =
            induced_measure(&action, &[1.0], &outside, 20_000, RandomStream::new(16, 0)).unwrap();
        let exact = sphere_band_mass(n as u32 - 1, 0.1f64.asin()).unwrap();
        assert!(
            (p.probability - exact).abs() <= p.halfwidth,
            "{} vs {exact} (halfwidth {})",
            p.probability,
            p.halfwidth
        );
    }

    #[test]
    fn coordinate_moment_exact_cases() {
        let stream = RandomStream::new(17, 0);
        let m = hilbert_coordinate_moment(1, &[1.0], 100, stream).unwrap();
        assert_eq!(m.estimate, 1.0);
        assert_eq!(m.exact, 1.0);
        // Vector supported beyond the truncation.
        let m = hilbert_coordinate_moment(2, &[0.0, 0.0, 5.0], 100, stream).unwrap();
        assert_eq!(m.estimate, 0.0);
        assert_eq!(m.exact, 0.0);
    }

    #[test]
    fn coordinate_moment_matches_exchangeability() {
        let stream = RandomStream::new(18, 0);
        let mut e1 = vec![0.0; 1];
        e1[0] = 1.0;
        let m = hilbert_coordinate_moment(100, &e1, 20_000, stream).unwrap();
        assert_relative_eq!(m.exact, 0.01);
        assert!((m.estimate - m.exact).abs() <= 3.0 * m.stderr);
        let m = hilbert_coordinate_moment(10, &[3.0, 4.0], 20_000, RandomStream::new(18, 50))
            .unwrap();
        assert_relative_eq!(m.exact, 2.5);
        assert!((m.estimate - m.exact).abs() <= 3.0 * m.stderr);
    }

    #[test]
    fn block_rotation_basics() {
        let x = [0.3, 0.4, -0.5, 0.7];
        let y = u1_block_action(&[1, 1], PI, &x).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert_relative_eq!(*a, -b, epsilon = 1e-14);
        }
        let y = u1_block_action(&[4, -7], 0.0, &x).unwrap();
        assert_eq!(y, x.to_vec());
        let y = u1_block_action(&[2, 5], 1.234, &x).unwrap();
        let norm_in: f64 = x.iter().map(|a| a * a).sum();
        let norm_out: f64 = y.iter().map(|a| a * a).sum();
        assert_relative_eq!(norm_in, norm_out, epsilon = 1e-14);
        assert!(u1_block_action(&[1, 0], 0.5, &x).is_err());
        assert!(u1_block_action(&[1], 0.5, &x).is_err());
    }

    #[test]
    fn displacement_formula_matches_the_literal_action() {
        let x = [0.1, -0.2, 0.6, 0.3, -0.5, 0.4];
        let weights = [2i64, 5, -3];
        for theta in [0.3, 1.7, 4.4] {
            let y = u1_block_action(&weights, theta, &x).unwrap();
            let literal: f64 =
                y.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            let formula: f64 = weights
                .iter()
                .enumerate()
                .map(|(j, &m)| {
                    let r2 = x[2 * j] * x[2 * j] + x[2 * j + 1] * x[2 * j + 1];
                    let s = (m as f64 * theta / 2.0).sin();
                    4.0 * s * s * r2
                })
                .sum::<f64>()
                .sqrt();
            assert_relative_eq!(literal, formula, epsilon = 1e-12);
        }
    }

    #[test]
    fn min_displacement_certifies_no_fixed_points() {
        // Equal weights: theta = pi sends every x to -x, displacement 2, and
        // pi is on the 64-point grid.
        let d = u1_min_displacement(&[1, 1], 64, 2_000, RandomStream::new(19, 0)).unwrap();
        assert_relative_eq!(d, 2.0, epsilon = 1e-12);
        let d = u1_min_displacement(&[1, 2], 64, 10_000, RandomStream::new(19, 100)).unwrap();
        assert!(d > 0.5, "min displacement {d}");
        assert!(u1_min_displacement(&[0], 64, 100, RandomStream::new(19, 0)).is_err());
        assert!(u1_min_displacement(&[1], 1, 100, RandomStream::new(19, 0)).is_err());
    }

    #[test]
    fn embedding_extends_identity_and_phases() {
        let id = CMatrix::identity(3, 3);
        let j = embedding_j(&id).unwrap();
        assert_eq!(j.nrows(), 4);
        assert!((&j - CMatrix::identity(4, 4)).norm() < 1e-14);

        let phi = 0.9;
        let phase = CMatrix::from_element(1, 1, Complex64::from_polar(1.0, phi));
        let j = embedding_j(&phase).unwrap();
        assert!((j[(0, 0)] - Complex64::from_polar(1.0, phi)).norm() < 1e-14);
        assert!((j[(1, 1)] - Complex64::from_polar(1.0, -phi)).norm() < 1e-14);
        assert!((j.determinant() - Complex64::ONE).norm() < 1e-14);
        assert!((j[(0, 1)].norm() + j[(1, 0)].norm()) < 1e-14);
    }

    #[test]
    fn embedding_of_haar_unitaries_is_special_unitary() {
        use crate::sampling::{sample_unitary, HaarGroup, HaarSample};
        let mut rng = RandomStream::new(20, 0).rng();
        for _ in 0..10 {
            let x = sample_unitary(3, &mut rng).unwrap().matrix;
            let j = embedding_j(&x).unwrap();
            let check = HaarSample { group: HaarGroup::SpecialUnitary(4), matrix: j };
            assert!(check.residuals().max() < 1e-10);
        }
        let not_unitary = CMatrix::from_element(2, 2, Complex64::ONE);
        assert!(embedding_j(&not_unitary).is_err());
    }

    #[test]
    fn sobolev_norms_hit_their_targets() {
        for n in [1u32, 10, 100] {
            let (w12, l2) = sobolev_norms(n, 20 * n as usize).unwrap();
            assert!((w12 - 1.0).abs() < 1e-6, "n={n}: W norm {w12}");
            let target = 1.0 / (n as f64 * n as f64 + 1.0).sqrt();
            assert!((l2 - target).abs() < 1e-8, "n={n}: L2 norm {l2} vs {target}");
        }
        let (_, l2) = sobolev_norms(1, 64).unwrap();
        assert_relative_eq!(l2, 1.0 / 2.0f64.sqrt(), epsilon = 1e-10);
        let (_, l2) = sobolev_norms(100, 4000).unwrap();
        assert!((l2 - 0.0099995).abs() < 1e-7);
    }

    #[test]
    fn sobolev_guard_rejects_coarse_grids() {
        match sobolev_norms(10, 199) {
            Err(Error::Resolution { got, needed, n }) => {
                assert_eq!((got, needed, n), (199, 200, 10));
            }
            other => panic!("expected resolution error, got {other:?}"),
        }
        assert!(sobolev_norms(0, 100).is_err());
    }

    #[test]
    fn unsupported_action_combinations_are_rejected() {
        let action = ActionSpec {
            group: GroupTag::Unitary(3),
            target: TargetTag::Sphere(2),
            embedding: EmbeddingTag::Fundamental,
        };
        let half = TargetSet::HalfSpace { coordinate: 0, level: 0.0 };
        assert!(matches!(
            induced_measure(&action, &[1.0, 0.0, 0.0], &half, 100, RandomStream::new(0, 0)),
            Err(Error::InvalidSpec(_))
        ));
        let mismatched = ActionSpec {
            group: GroupTag::SpecialOrthogonal(4),
            target: TargetTag::Sphere(2),
            embedding: EmbeddingTag::Fundamental,
        };
        assert!(induced_measure(&mismatched, &[1.0, 0.0, 0.0], &half, 100, RandomStream::new(0, 0))
            .is_err());
    }

    #[test]
    fn target_set_validation_and_membership() {
        assert!(TargetSet::Arc { start: 0.0, length: 7.0 }.validate().is_err());
        assert!(TargetSet::WeakBall { v: vec![], center: 0.0, epsilon: 0.1 }
            .validate()
            .is_err());
        assert!(TargetSet::WeakBall { v: vec![1.0], center: 0.0, epsilon: 0.0 }
            .validate()
            .is_err());
        let arc = TargetSet::Arc { start: 6.0, length: 0.6 };
        // Wraps past 2pi.
        assert!(arc.contains(&[6.2]));
        assert!(arc.contains(&[0.2]));
        assert!(!arc.contains(&[1.0]));
        let ball = TargetSet::WeakBall { v: vec![1.0, 1.0], center: 1.0, epsilon: 0.25 };
        assert!(ball.contains(&[0.5, 0.6]));
        assert!(!ball.contains(&[0.0, 0.0]));
        // Missing coordinates read as zero.
        let hs = TargetSet::HalfSpace { coordinate: 5, level: -1.0 };
        assert!(hs.contains(&[0.0]));
    }
}
