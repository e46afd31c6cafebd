//! Root-system data for the classical series A/B/C/D and log-domain volume
//! computations for the corresponding compact groups.
//!
//! Two independent volume routes are provided on purpose. The product route
//! ([`macdonald_log_volume`]) assembles the volume from explicit root-system
//! data: torus volume, one odd-sphere factor per invariant degree, and one
//! squared-length factor per positive coroot. The closed-form route
//! ([`closed_form_log_volume`]) evaluates the per-series reduced expressions
//! directly from log-gamma. The two must agree to high relative accuracy, and
//! tests enforce that; any regression in either path breaks the agreement.

use crate::error::{Error, Result};
use crate::numeric::{ln_factorial, ln_odd_sphere_volume};
use nalgebra::DMatrix;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// The four classical series. The parameter `n` follows the group labels
/// SU(n), Spin(2n+1), USp(2n), Spin(2n); ranks are n-1, n, n, n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesTag {
    A,
    B,
    C,
    D,
}

impl SeriesTag {
    pub const ALL: [SeriesTag; 4] = [SeriesTag::A, SeriesTag::B, SeriesTag::C, SeriesTag::D];

    /// Smallest series parameter for which the root system below is simple
    /// and free of low-rank coincidences.
    pub fn min_n(self) -> u32 {
        match self {
            SeriesTag::A | SeriesTag::B | SeriesTag::C => 2,
            SeriesTag::D => 4,
        }
    }

    pub fn validate_n(self, n: u32) -> Result<()> {
        if n < self.min_n() {
            return Err(Error::InvalidSpec(format!(
                "series {self} needs n >= {}, got {n}",
                self.min_n()
            )));
        }
        Ok(())
    }

    /// Dimension of the compact group with series parameter `n`.
    pub fn dimension(self, n: u32) -> u64 {
        let n = n as u64;
        match self {
            SeriesTag::A => n * n - 1,
            SeriesTag::B | SeriesTag::C => n * (2 * n + 1),
            SeriesTag::D => n * (2 * n - 1),
        }
    }

    /// Order of the center of the simply connected group.
    pub fn full_center_order(self, n: u32) -> u32 {
        match self {
            SeriesTag::A => n,
            SeriesTag::B | SeriesTag::C => 2,
            SeriesTag::D => 4,
        }
    }

    /// Conventional name of the simply connected group, e.g. `SU(5)`.
    pub fn group_name(self, n: u32) -> String {
        match self {
            SeriesTag::A => format!("SU({n})"),
            SeriesTag::B => format!("Spin({})", 2 * n + 1),
            SeriesTag::C => format!("USp({})", 2 * n),
            SeriesTag::D => format!("Spin({})", 2 * n),
        }
    }
}

impl fmt::Display for SeriesTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SeriesTag::A => "A",
            SeriesTag::B => "B",
            SeriesTag::C => "C",
            SeriesTag::D => "D",
        };
        f.write_str(s)
    }
}

impl FromStr for SeriesTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(SeriesTag::A),
            "B" | "b" => Ok(SeriesTag::B),
            "C" | "c" => Ok(SeriesTag::C),
            "D" | "d" => Ok(SeriesTag::D),
            other => Err(Error::InvalidSpec(format!(
                "unknown series {other:?}; expected one of A, B, C, D"
            ))),
        }
    }
}

/// A compact group in one of the classical series, possibly divided by a
/// central subgroup of order `center_order` (1 means simply connected).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupSpec {
    pub series: SeriesTag,
    pub n: u32,
    pub center_order: u32,
}

impl GroupSpec {
    pub fn simply_connected(series: SeriesTag, n: u32) -> Result<Self> {
        series.validate_n(n)?;
        Ok(Self { series, n, center_order: 1 })
    }

    pub fn quotient(series: SeriesTag, n: u32, center_order: u32) -> Result<Self> {
        series.validate_n(n)?;
        let full = series.full_center_order(n);
        if center_order == 0 || !full.is_multiple_of(center_order) {
            return Err(Error::InvalidSpec(format!(
                "center order {center_order} does not divide |Z({})| = {full}",
                series.group_name(n)
            )));
        }
        Ok(Self { series, n, center_order })
    }

    pub fn dimension(&self) -> u64 {
        self.series.dimension(self.n)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.center_order == 1 {
            write!(f, "{}", self.series.group_name(self.n))
        } else {
            write!(f, "{}/Z{}", self.series.group_name(self.n), self.center_order)
        }
    }
}

/// Explicit root-system data in ambient Euclidean coordinates.
///
/// Fields are public so synthetic systems (for instance the empty rank-0
/// system, whose volume product is 1) can be built directly in tests.
#[derive(Debug, Clone)]
pub struct RootSystem {
    pub rank: usize,
    pub ambient_dim: usize,
    pub simple_roots: Vec<Vec<f64>>,
    pub simple_coroots: Vec<Vec<f64>>,
    pub positive_coroots: Vec<Vec<f64>>,
    pub invariant_degrees: Vec<u32>,
    /// |c_1 ^ ... ^ c_r| over the simple coroots, i.e. the covolume of the
    /// lattice they span.
    pub torus_volume: f64,
}

/// Natural log of a positive volume. Volumes of these groups overflow f64
/// well before n = 100, so they are only ever handled in log form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogVolume {
    pub log_value: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// 2 a / (a|a), the coroot of a root.
fn coroot(alpha: &[f64]) -> Vec<f64> {
    let scale = 2.0 / dot(alpha, alpha);
    alpha.iter().map(|x| x * scale).collect()
}

fn basis_vector(ambient: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; ambient];
    v[i] = 1.0;
    v
}

/// e_i - e_j.
fn e_minus(ambient: usize, i: usize, j: usize) -> Vec<f64> {
    let mut v = vec![0.0; ambient];
    v[i] = 1.0;
    v[j] = -1.0;
    v
}

/// e_i + e_j.
fn e_plus(ambient: usize, i: usize, j: usize) -> Vec<f64> {
    let mut v = vec![0.0; ambient];
    v[i] = 1.0;
    v[j] = 1.0;
    v
}

fn lattice_covolume(vectors: &[Vec<f64>], ambient: usize) -> f64 {
    if vectors.is_empty() {
        return 1.0;
    }
    let m = DMatrix::from_fn(vectors.len(), ambient, |i, j| vectors[i][j]);
    let gram = &m * m.transpose();
    gram.determinant().sqrt()
}

/// Construct the full root-system record for a classical series.
///
/// Conventions: roots live in R^n with the A-series inside the hyperplane
/// where coordinates sum to zero. Simple roots are e_i - e_{i+1} with the
/// series-specific last root (e_n for B, 2 e_n for C, e_{n-1} + e_n for D).
/// Long-root squared length is 2 except for the C series, whose long roots
/// 2 e_i have squared length 4 and coroots e_i.
pub fn build_root_system(series: SeriesTag, n: u32) -> Result<RootSystem> {
    series.validate_n(n)?;
    let n = n as usize;

    let (ambient, simple_roots): (usize, Vec<Vec<f64>>) = match series {
        SeriesTag::A => {
            let roots: Vec<Vec<f64>> = (0..n - 1).map(|i| e_minus(n, i, i + 1)).collect();
            (n, roots)
        }
        SeriesTag::B => {
            let mut roots: Vec<Vec<f64>> = (0..n - 1).map(|i| e_minus(n, i, i + 1)).collect();
            roots.push(basis_vector(n, n - 1));
            (n, roots)
        }
        SeriesTag::C => {
            let mut roots: Vec<Vec<f64>> = (0..n - 1).map(|i| e_minus(n, i, i + 1)).collect();
            let mut last = vec![0.0; n];
            last[n - 1] = 2.0;
            roots.push(last);
            (n, roots)
        }
        SeriesTag::D => {
            let mut roots: Vec<Vec<f64>> = (0..n - 1).map(|i| e_minus(n, i, i + 1)).collect();
            roots.push(e_plus(n, n - 2, n - 1));
            (n, roots)
        }
    };

    let positive_roots: Vec<Vec<f64>> = match series {
        SeriesTag::A => {
            let mut v = Vec::with_capacity(n * (n - 1) / 2);
            for i in 0..n {
                for j in i + 1..n {
                    v.push(e_minus(ambient, i, j));
                }
            }
            v
        }
        SeriesTag::B => {
            let mut v = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in i + 1..n {
                    v.push(e_minus(ambient, i, j));
                    v.push(e_plus(ambient, i, j));
                }
            }
            for i in 0..n {
                v.push(basis_vector(ambient, i));
            }
            v
        }
        SeriesTag::C => {
            let mut v = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in i + 1..n {
                    v.push(e_minus(ambient, i, j));
                    v.push(e_plus(ambient, i, j));
                }
            }
            for i in 0..n {
                let mut long = vec![0.0; ambient];
                long[i] = 2.0;
                v.push(long);
            }
            v
        }
        SeriesTag::D => {
            let mut v = Vec::with_capacity(n * (n - 1));
            for i in 0..n {
                for j in i + 1..n {
                    v.push(e_minus(ambient, i, j));
                    v.push(e_plus(ambient, i, j));
                }
            }
            v
        }
    };

    let simple_coroots: Vec<Vec<f64>> = simple_roots.iter().map(|a| coroot(a)).collect();
    let positive_coroots: Vec<Vec<f64>> = positive_roots.iter().map(|a| coroot(a)).collect();

    let invariant_degrees: Vec<u32> = match series {
        SeriesTag::A => (1..n as u32).map(|i| i + 1).collect(),
        SeriesTag::B | SeriesTag::C => (1..=n as u32).map(|i| 2 * i).collect(),
        SeriesTag::D => {
            let mut d: Vec<u32> = (1..n as u32).map(|i| 2 * i).collect();
            d.push(n as u32);
            d
        }
    };

    let torus_volume = lattice_covolume(&simple_coroots, ambient);

    Ok(RootSystem {
        rank: simple_roots.len(),
        ambient_dim: ambient,
        simple_roots,
        simple_coroots,
        positive_coroots,
        invariant_degrees,
        torus_volume,
    })
}

/// Volume of the group from explicit root-system data:
/// (1/|center|) * V(torus) * prod_i V(S^{2 d_i - 1}) * prod_coroots (c|c),
/// accumulated entirely in the log domain.
pub fn macdonald_log_volume(rs: &RootSystem, center_order: u32) -> Result<LogVolume> {
    if center_order == 0 {
        return Err(Error::InvalidSpec("center order must be at least 1".into()));
    }
    if rs.torus_volume <= 0.0 || !rs.torus_volume.is_finite() {
        return Err(Error::Domain(format!("torus volume {} not positive", rs.torus_volume)));
    }
    let mut log = rs.torus_volume.ln() - (center_order as f64).ln();
    for &d in &rs.invariant_degrees {
        log += ln_odd_sphere_volume(d);
    }
    for c in &rs.positive_coroots {
        let len2 = dot(c, c);
        if len2 <= 0.0 {
            return Err(Error::Domain("coroot with non-positive length".into()));
        }
        log += len2.ln();
    }
    Ok(LogVolume { log_value: log })
}

/// Volume of the group from the per-series reduced formulas:
///
/// - SU(n):       sqrt(n) (2 pi)^{n(n+1)/2 - 1} / prod_{i<n} i!
/// - Spin(2n+1):  2^{n(n+2)+1} pi^{n(n+1)} / prod (2i-1)!
/// - USp(2n):     2^{n^2} pi^{n(n+1)} / prod (2i-1)!
/// - Spin(2n):    2^{n^2+1} pi^{n^2} / ((n-1)! prod_{i<n} (2i-1)!)
///
/// A central quotient of order k divides the volume by k.
pub fn closed_form_log_volume(spec: &GroupSpec) -> Result<LogVolume> {
    spec.series.validate_n(spec.n)?;
    let n = spec.n as u64;
    let nf = spec.n as f64;
    let ln_pi = PI.ln();
    let ln_2pi = (2.0 * PI).ln();

    let log = match spec.series {
        SeriesTag::A => {
            let mut log = 0.5 * nf.ln() + (nf * (nf + 1.0) / 2.0 - 1.0) * ln_2pi;
            for i in 1..n {
                log -= ln_factorial(i);
            }
            log
        }
        SeriesTag::B => {
            let mut log =
                (nf * (nf + 2.0) + 1.0) * std::f64::consts::LN_2 + nf * (nf + 1.0) * ln_pi;
            for i in 1..=n {
                log -= ln_factorial(2 * i - 1);
            }
            log
        }
        SeriesTag::C => {
            let mut log = nf * nf * std::f64::consts::LN_2 + nf * (nf + 1.0) * ln_pi;
            for i in 1..=n {
                log -= ln_factorial(2 * i - 1);
            }
            log
        }
        SeriesTag::D => {
            let mut log =
                (nf * nf + 1.0) * std::f64::consts::LN_2 + nf * nf * ln_pi - ln_factorial(n - 1);
            for i in 1..n {
                log -= ln_factorial(2 * i - 1);
            }
            log
        }
    };

    Ok(LogVolume { log_value: log - (spec.center_order as f64).ln() })
}

/// The consecutive pair of simply connected groups a ratio diagnostic
/// compares: SU(n) -> SU(n+1) for A, parameter n-1 -> n for B, C, D.
/// Returns (smaller, larger).
pub fn ratio_pair(series: SeriesTag, n: u32) -> Result<(GroupSpec, GroupSpec)> {
    match series {
        SeriesTag::A => Ok((
            GroupSpec::simply_connected(series, n)?,
            GroupSpec::simply_connected(series, n + 1)?,
        )),
        _ => {
            if n <= series.min_n() {
                return Err(Error::InvalidSpec(format!(
                    "ratio for series {series} needs n > {}, got {n}",
                    series.min_n()
                )));
            }
            Ok((
                GroupSpec::simply_connected(series, n - 1)?,
                GroupSpec::simply_connected(series, n)?,
            ))
        }
    }
}

/// Natural log of the raw volume ratio V(larger)/V(smaller) for the
/// consecutive pair at parameter n. The raw ratio itself underflows f64 for
/// large n (factorials win), so callers should exponentiate only for display.
pub fn log_volume_ratio(series: SeriesTag, n: u32) -> Result<f64> {
    let (small, large) = ratio_pair(series, n)?;
    Ok(closed_form_log_volume(&large)?.log_value - closed_form_log_volume(&small)?.log_value)
}

/// Dimension gap between the consecutive pair at parameter n.
pub fn dimension_gap(series: SeriesTag, n: u32) -> Result<u64> {
    let (small, large) = ratio_pair(series, n)?;
    Ok(large.dimension() - small.dimension())
}

/// (V(larger)/V(smaller))^(1/dimension gap): the per-added-dimension volume
/// factor, the quantity that behaves like the sphere-radius analogue below.
pub fn normalized_volume_ratio(series: SeriesTag, n: u32) -> Result<f64> {
    let log_ratio = log_volume_ratio(series, n)?;
    let gap = dimension_gap(series, n)? as f64;
    Ok((log_ratio / gap).exp())
}

/// The asymptotic comparator sqrt(2 pi e / m) for the normalized ratio, with
/// m the defining matrix-size scale of the series: n for SU(n), 2n for the
/// other three families.
pub fn ratio_asymptote(series: SeriesTag, n: u32) -> f64 {
    let m = match series {
        SeriesTag::A => n as f64,
        _ => 2.0 * n as f64,
    };
    (2.0 * PI * std::f64::consts::E / m).sqrt()
}
