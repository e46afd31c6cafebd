//! Sample statistics used by the concentration experiments: empirical CDFs,
//! Kolmogorov-Smirnov tests with the asymptotic tail, and exact binomial
//! confidence intervals for Monte Carlo hit fractions.

use crate::error::{Error, Result};
use statrs::distribution::{Beta, ContinuousCDF};

/// An empirical CDF over a finite sample. Construction sorts a copy of the data.
#[derive(Debug, Clone)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(mut data: Vec<f64>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::InsufficientData("empty sample for ECDF".into()));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("non-finite value in ECDF sample".into()));
        }
        data.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(Self { sorted: data })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Fraction of the sample that is <= x.
    pub fn eval(&self, x: f64) -> f64 {
        // partition_point gives the count of elements <= x on sorted data.
        let count = self.sorted.partition_point(|&v| v <= x);
        count as f64 / self.sorted.len() as f64
    }

    pub fn data(&self) -> &[f64] {
        &self.sorted
    }
}

/// Result of a Kolmogorov-Smirnov test.
#[derive(Debug, Clone, Copy)]
pub struct KsOutcome {
    /// Supremum distance between the two distribution functions.
    pub statistic: f64,
    /// Asymptotic two-sided p-value.
    pub p_value: f64,
}

impl KsOutcome {
    pub fn rejects_at(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// Asymptotic Kolmogorov tail Q(z) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 z^2),
/// evaluated with the small-argument guard from the standard treatment:
/// the series is summed until terms fall below machine noise.
fn kolmogorov_tail(z: f64) -> f64 {
    if z <= 0.0 {
        return 1.0;
    }
    if z < 0.2 {
        // Q -> 1 rapidly as z -> 0; the alternating series converges too
        // slowly there, and 1.0 is correct to double precision.
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100u32 {
        let term = (-2.0 * (k as f64 * z).powi(2)).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Effective-size correction for the asymptotic tail (Stephens):
/// arg = (sqrt(ne) + 0.12 + 0.11 / sqrt(ne)) * D.
fn ks_p_value(statistic: f64, effective_n: f64) -> f64 {
    let sqrt_ne = effective_n.sqrt();
    kolmogorov_tail((sqrt_ne + 0.12 + 0.11 / sqrt_ne) * statistic)
}

/// One-sample KS test of `sample` against a reference CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> Result<KsOutcome> {
    let ecdf = Ecdf::new(sample.to_vec())?;
    let n = ecdf.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in ecdf.data().iter().enumerate() {
        let fx = cdf(x);
        if !(0.0..=1.0).contains(&fx) {
            return Err(Error::Domain(format!("reference CDF returned {fx} at {x}")));
        }
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((fx - lo).abs()).max((hi - fx).abs());
    }
    Ok(KsOutcome { statistic: d, p_value: ks_p_value(d, n) })
}

/// Two-sample KS test. Effective size is n m / (n + m).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsOutcome> {
    let ea = Ecdf::new(a.to_vec())?;
    let eb = Ecdf::new(b.to_vec())?;
    // The supremum of |F_a - F_b| is attained at a data point of either sample;
    // walk the merged order once.
    let (xa, xb) = (ea.data(), eb.data());
    let (mut i, mut j) = (0usize, 0usize);
    let (n, m) = (xa.len() as f64, xb.len() as f64);
    let mut d: f64 = 0.0;
    while i < xa.len() && j < xb.len() {
        let t = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= t {
            i += 1;
        }
        while j < xb.len() && xb[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let ne = n * m / (n + m);
    Ok(KsOutcome { statistic: d, p_value: ks_p_value(d, ne) })
}

/// Exact (Clopper-Pearson) two-sided confidence interval for a binomial
/// proportion, returned as (lower, upper).
pub fn clopper_pearson(successes: u64, trials: u64, confidence: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::InsufficientData("binomial interval with zero trials".into()));
    }
    if successes > trials {
        return Err(Error::Domain(format!("{successes} successes out of {trials} trials")));
    }
    if !(0.0 < confidence && confidence < 1.0) {
        return Err(Error::Domain(format!("confidence level {confidence} outside (0, 1)")));
    }
    let alpha = 1.0 - confidence;
    let (k, n) = (successes as f64, trials as f64);
    let lower = if successes == 0 {
        0.0
    } else {
        let beta = Beta::new(k, n - k + 1.0)
            .map_err(|e| Error::Domain(format!("beta parameters: {e}")))?;
        beta.inverse_cdf(alpha / 2.0)
    };
    let upper = if successes == trials {
        1.0
    } else {
        let beta = Beta::new(k + 1.0, n - k)
            .map_err(|e| Error::Domain(format!("beta parameters: {e}")))?;
        beta.inverse_cdf(1.0 - alpha / 2.0)
    };
    Ok((lower, upper))
}

/// Half-width of the Clopper-Pearson interval around the point estimate:
/// max(upper - p_hat, p_hat - lower). Conservative for asymmetric intervals.
pub fn clopper_pearson_halfwidth(successes: u64, trials: u64, confidence: f64) -> Result<f64> {
    let (lo, hi) = clopper_pearson(successes, trials, confidence)?;
    let p_hat = successes as f64 / trials as f64;
    Ok((hi - p_hat).max(p_hat - lo))
}

/// Sample mean and standard error of the mean.
pub fn mean_and_stderr(data: &[f64]) -> Result<(f64, f64)> {
    if data.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 observations for a standard error, got {}",
            data.len()
        )));
    }
    let n = data.len() as f64;
    let mean = data.iter().sum::<f64>() / n;
    let var = data.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

/// Median of a sample (average of the two middle order statistics for even n).
pub fn median(data: &[f64]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::InsufficientData("median of empty sample".into()));
    }
    let mut v = data.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    Ok(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}
