//! Haar-distributed samples on the classical compact groups and exact
//! inverse-CDF sampling of the angular coordinate measure on CP^n.
//!
//! The Haar samplers orthonormalize Gaussian matrices with a modified
//! Gram-Schmidt whose triangular factor has a positive diagonal by
//! construction; that positivity is precisely the condition under which the
//! orthonormal factor is Haar-distributed, so no post-hoc sign or phase fix
//! is needed. Determinant corrections then move O(n) to SO(n) and U(n) to
//! SU(n) by right-translation, which preserves Haar.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;
use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

pub type CMatrix = DMatrix<Complex64>;

/// Residuals below this threshold count as exact group membership for the
/// hygiene checks.
pub const GROUP_TOL: f64 = 1e-10;

/// Which compact group a Haar sample belongs to. `CompactSymplectic(n)`
/// denotes USp(2n) acting by 2n x 2n matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaarGroup {
    SpecialOrthogonal(usize),
    Unitary(usize),
    SpecialUnitary(usize),
    CompactSymplectic(usize),
}

impl HaarGroup {
    pub fn matrix_size(self) -> usize {
        match self {
            HaarGroup::SpecialOrthogonal(n)
            | HaarGroup::Unitary(n)
            | HaarGroup::SpecialUnitary(n) => n,
            HaarGroup::CompactSymplectic(n) => 2 * n,
        }
    }
}

impl fmt::Display for HaarGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HaarGroup::SpecialOrthogonal(n) => write!(f, "SO({n})"),
            HaarGroup::Unitary(n) => write!(f, "U({n})"),
            HaarGroup::SpecialUnitary(n) => write!(f, "SU({n})"),
            HaarGroup::CompactSymplectic(n) => write!(f, "USp({})", 2 * n),
        }
    }
}

/// One Haar draw together with its group tag.
#[derive(Debug, Clone)]
pub struct HaarSample {
    pub group: HaarGroup,
    pub matrix: CMatrix,
}

/// Deviations of a sample from exact group membership.
#[derive(Debug, Clone, Copy)]
pub struct HaarResiduals {
    /// max-norm of U'U - I (conjugate transpose).
    pub unitarity: f64,
    /// |det - 1| for the special and symplectic groups, ||det| - 1| for U(n).
    pub determinant: f64,
    /// max-norm of U^t J U - J for the symplectic group, zero otherwise.
    pub symplectic: f64,
}

impl HaarResiduals {
    pub fn max(&self) -> f64 {
        self.unitarity.max(self.determinant).max(self.symplectic)
    }
}

impl HaarSample {
    pub fn residuals(&self) -> HaarResiduals {
        let u = &self.matrix;
        let n = u.nrows();
        let gram = u.adjoint() * u;
        let mut unitarity = 0.0f64;
        for r in 0..n {
            for c in 0..n {
                let expect = if r == c { Complex64::new(1.0, 0.0) } else { Complex64::default() };
                unitarity = unitarity.max((gram[(r, c)] - expect).norm());
            }
        }
        let det = u.determinant();
        let determinant = match self.group {
            HaarGroup::Unitary(_) => (det.norm() - 1.0).abs(),
            _ => (det - Complex64::new(1.0, 0.0)).norm(),
        };
        let symplectic = match self.group {
            HaarGroup::CompactSymplectic(half) => {
                let j = symplectic_form(half);
                let lhs = u.transpose() * &j * u;
                let mut worst = 0.0f64;
                for r in 0..n {
                    for c in 0..n {
                        worst = worst.max((lhs[(r, c)] - j[(r, c)]).norm());
                    }
                }
                worst
            }
            _ => 0.0,
        };
        HaarResiduals { unitarity, determinant, symplectic }
    }
}

/// The block form J = [[0, I], [-I, 0]] on C^{2n}.
pub fn symplectic_form(n: usize) -> CMatrix {
    let mut j = CMatrix::zeros(2 * n, 2 * n);
    for a in 0..n {
        j[(a, a + n)] = Complex64::new(1.0, 0.0);
        j[(a + n, a)] = Complex64::new(-1.0, 0.0);
    }
    j
}

fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(standard_normal(rng), standard_normal(rng))
}

/// Two-pass modified Gram-Schmidt on real columns; the second pass restores
/// orthogonality that a single pass loses for ill-conditioned draws.
fn orthonormalize_real(a: &mut DMatrix<f64>) -> Result<()> {
    let n = a.ncols();
    for q in 0..n {
        for _ in 0..2 {
            for p in 0..q {
                let proj = a.column(p).dot(&a.column(q));
                let colp = a.column(p).clone_owned();
                a.column_mut(q).axpy(-proj, &colp, 1.0);
            }
        }
        let norm = a.column(q).norm();
        if norm < 1e-200 {
            return Err(Error::Domain("rank-deficient Gaussian draw".into()));
        }
        a.column_mut(q).unscale_mut(norm);
    }
    Ok(())
}

fn orthonormalize_complex(a: &mut CMatrix) -> Result<()> {
    let n = a.ncols();
    for q in 0..n {
        for _ in 0..2 {
            for p in 0..q {
                let proj = a.column(p).dotc(&a.column(q));
                let colp = a.column(p).clone_owned();
                a.column_mut(q).axpy(-proj, &colp, Complex64::new(1.0, 0.0));
            }
        }
        let norm = a.column(q).norm();
        if norm < 1e-200 {
            return Err(Error::Domain("rank-deficient Gaussian draw".into()));
        }
        a.column_mut(q).unscale_mut(norm);
    }
    Ok(())
}

/// Haar-uniform element of SO(n).
pub fn sample_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<HaarSample> {
    if n == 0 {
        return Err(Error::InvalidSpec("SO(0) has no elements to sample".into()));
    }
    let mut a = DMatrix::from_fn(n, n, |_, _| standard_normal(rng));
    orthonormalize_real(&mut a)?;
    if a.determinant() < 0.0 {
        // Right-translation by diag(1, ..., 1, -1) maps the reflection
        // component onto SO(n) while preserving Haar.
        for r in 0..n {
            a[(r, n - 1)] = -a[(r, n - 1)];
        }
    }
    let matrix = CMatrix::from_fn(n, n, |r, c| Complex64::new(a[(r, c)], 0.0));
    Ok(HaarSample { group: HaarGroup::SpecialOrthogonal(n), matrix })
}

/// Haar-uniform element of U(n).
pub fn sample_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<HaarSample> {
    if n == 0 {
        return Err(Error::InvalidSpec("U(0) has no elements to sample".into()));
    }
    let mut a = CMatrix::from_fn(n, n, |_, _| complex_gaussian(rng));
    orthonormalize_complex(&mut a)?;
    Ok(HaarSample { group: HaarGroup::Unitary(n), matrix: a })
}

/// Haar-uniform element of SU(n): a Haar U(n) draw with its last column
/// divided by the determinant, then multiplied by a uniformly random n-th
/// root of unity. Both steps preserve Haar, and the result has det = 1.
pub fn sample_special_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<HaarSample> {
    let mut s = sample_unitary(n, rng)?;
    let det = s.matrix.determinant();
    let size = s.matrix.nrows();
    let inv = det.conj() / det.norm_sqr().max(f64::MIN_POSITIVE);
    for r in 0..size {
        s.matrix[(r, size - 1)] *= inv;
    }
    let k = rng.random_range(0..n as u64);
    let omega = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
    s.matrix *= omega;
    s.group = HaarGroup::SpecialUnitary(n);
    Ok(s)
}

/// The quaternionic partner column -J conj(u): filling column q+n with the
/// partner of column q keeps the matrix in the block form [[A, B], [-conj B,
/// conj A]] that characterizes USp(2n) inside U(2n).
fn partner_column(u: &CMatrix, q: usize, half: usize) -> Vec<Complex64> {
    let mut w = vec![Complex64::default(); 2 * half];
    for i in 0..half {
        w[i] = -u[(i + half, q)].conj();
        w[i + half] = u[(i, q)].conj();
    }
    w
}

/// Haar-uniform element of USp(2n), sampled by orthonormalizing a
/// quaternionic Gaussian matrix column-pair by column-pair.
pub fn sample_symplectic<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<HaarSample> {
    if n == 0 {
        return Err(Error::InvalidSpec("USp(0) has no elements to sample".into()));
    }
    let size = 2 * n;
    let mut u = CMatrix::zeros(size, size);
    // Quaternionic Ginibre: [[A, B], [-conj B, conj A]].
    for r in 0..n {
        for c in 0..n {
            let a = complex_gaussian(rng);
            let b = complex_gaussian(rng);
            u[(r, c)] = a;
            u[(r, c + n)] = b;
            u[(r + n, c)] = -b.conj();
            u[(r + n, c + n)] = a.conj();
        }
    }
    for q in 0..n {
        for _ in 0..2 {
            for p in 0..q {
                for pp in [p, p + n] {
                    let proj = u.column(pp).dotc(&u.column(q));
                    let colp = u.column(pp).clone_owned();
                    u.column_mut(q).axpy(-proj, &colp, Complex64::new(1.0, 0.0));
                }
            }
        }
        let norm = u.column(q).norm();
        if norm < 1e-200 {
            return Err(Error::Domain("rank-deficient Gaussian draw".into()));
        }
        u.column_mut(q).unscale_mut(norm);
        let w = partner_column(&u, q, n);
        for (r, val) in w.into_iter().enumerate() {
            u[(r, q + n)] = val;
        }
    }
    Ok(HaarSample { group: HaarGroup::CompactSymplectic(n), matrix: u })
}

/// Uniform point on the unit sphere of R^dim.
pub fn uniform_sphere_point<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Vec<f64>> {
    if dim == 0 {
        return Err(Error::InvalidSpec("sphere in dimension 0".into()));
    }
    loop {
        let v: Vec<f64> = (0..dim).map(|_| standard_normal(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-200 {
            return Ok(v.into_iter().map(|x| x / norm).collect());
        }
    }
}

/// Uniform point on the unit sphere of C^dim.
pub fn uniform_complex_sphere_point<R: Rng + ?Sized>(
    dim: usize,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    if dim == 0 {
        return Err(Error::InvalidSpec("sphere in dimension 0".into()));
    }
    loop {
        let v: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-200 {
            return Ok(v.into_iter().map(|z| z / norm).collect());
        }
    }
}

/// Angular coordinates of a point of CP^n: the distance-like angle xi, the
/// nested sphere angles phi_a, and the torus phases theta.
#[derive(Debug, Clone)]
pub struct CpnAngles {
    pub n: usize,
    pub xi: f64,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
}

/// Inverse CDF of the xi marginal: density 2n cos(xi) sin^{2n-1}(xi) on
/// [0, pi/2], CDF sin^{2n}(xi), so xi = arcsin(u^{1/2n}).
pub fn xi_from_uniform(n: usize, u: f64) -> f64 {
    u.powf(1.0 / (2.0 * n as f64)).asin()
}

/// Inverse CDF of the phi_a marginal: density 2a sin(phi) cos^{2a-1}(phi),
/// CDF 1 - cos^{2a}(phi), so phi = arccos((1-u)^{1/2a}).
pub fn phi_from_uniform(a: usize, u: f64) -> f64 {
    (1.0 - u).powf(1.0 / (2.0 * a as f64)).acos()
}

/// Draw all angular coordinates of a uniform (Fubini-Study volume) point.
pub fn sample_cpn_angles<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<CpnAngles> {
    if n == 0 {
        return Err(Error::InvalidSpec("CP^0 is a point; nothing to sample".into()));
    }
    let xi = xi_from_uniform(n, rng.random::<f64>());
    let phi: Vec<f64> = (1..n).map(|a| phi_from_uniform(a, rng.random::<f64>())).collect();
    let theta: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 * PI).collect();
    Ok(CpnAngles { n, xi, phi, theta })
}

/// cos^2(xi), the squared magnitude of the first homogeneous coordinate.
pub fn cpn_cos2_from_angles(a: &CpnAngles) -> f64 {
    a.xi.cos().powi(2)
}

/// Unit-norm homogeneous coordinates (cos xi : sin xi R_1 e^{i theta_1} : ...)
/// from angles plus a unit vector R on the real sphere S^{n-1}. Numerically
/// stable at xi = pi/2, where the point lies on the hyperplane at infinity.
pub fn angles_to_homogeneous(a: &CpnAngles, sphere_coords: &[f64]) -> Result<Vec<Complex64>> {
    if sphere_coords.len() != a.n {
        return Err(Error::InvalidSpec(format!(
            "need {} sphere coordinates, got {}",
            a.n,
            sphere_coords.len()
        )));
    }
    let norm2: f64 = sphere_coords.iter().map(|x| x * x).sum();
    if (norm2 - 1.0).abs() > 1e-8 {
        return Err(Error::Domain(format!("sphere coordinates have norm^2 {norm2}")));
    }
    let (s, c) = a.xi.sin_cos();
    let mut z = Vec::with_capacity(a.n + 1);
    z.push(Complex64::new(c, 0.0));
    for (r, th) in sphere_coords.iter().zip(&a.theta) {
        z.push(Complex64::from_polar(s * r.abs(), th + if *r < 0.0 { PI } else { 0.0 }));
    }
    Ok(z)
}

/// The independent route to the xi-law: |first coordinate|^2 of a uniform
/// unit vector of C^{n+1}, which is the first homogeneous coordinate of a
/// uniform point of CP^n. Returns cos^2(xi).
pub fn cpn_point_from_haar<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidSpec("CP^0 is a point; nothing to sample".into()));
    }
    let v = uniform_complex_sphere_point(n + 1, rng)?;
    Ok(v[0].norm_sqr())
}

/// Fubini-Study metric components in an affine chart:
/// g_{i jbar} = delta_ij / (1 + |z|^2) - conj(z_i) z_j / (1 + |z|^2)^2.
pub fn fs_metric_components(z: &[Complex64]) -> CMatrix {
    let n = z.len();
    let s: f64 = z.iter().map(|w| w.norm_sqr()).sum();
    let d = 1.0 + s;
    CMatrix::from_fn(n, n, |i, j| {
        let kron = if i == j { 1.0 / d } else { 0.0 };
        Complex64::new(kron, 0.0) - z[i].conj() * z[j] / (d * d)
    })
}

/// Header magic for binary sample dumps.
pub const DUMP_MAGIC: [u8; 4] = *b"HSMP";
/// Flag bit: payload entries are complex (re, im interleaved).
pub const DUMP_FLAG_COMPLEX: u32 = 1;

/// Parsed contents of a binary sample dump.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleDump {
    pub n: u32,
    pub complex: bool,
    pub count: u32,
    pub payload: Vec<f64>,
}

/// Write matrices (or any fixed-record doubles) in the dump format: a 16-byte
/// header (magic, flags, n, count, all little-endian) followed by the payload
/// doubles. Byte-reproducible across platforms for equal inputs.
pub fn write_sample_dump(path: &Path, dump: &SampleDump) -> Result<()> {
    let per = dump.n as usize * dump.n as usize * if dump.complex { 2 } else { 1 };
    if dump.payload.len() != per * dump.count as usize {
        return Err(Error::InvalidSpec(format!(
            "payload length {} does not match {} records of {} doubles",
            dump.payload.len(),
            dump.count,
            per
        )));
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&DUMP_MAGIC)?;
    let flags: u32 = if dump.complex { DUMP_FLAG_COMPLEX } else { 0 };
    w.write_all(&flags.to_le_bytes())?;
    w.write_all(&dump.n.to_le_bytes())?;
    w.write_all(&dump.count.to_le_bytes())?;
    for x in &dump.payload {
        w.write_all(&x.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_sample_dump(path: &Path) -> Result<SampleDump> {
    let mut r = BufReader::new(File::open(path)?);
    let mut head = [0u8; 16];
    r.read_exact(&mut head)
        .map_err(|_| Error::MalformedDump("file shorter than the 16-byte header".into()))?;
    if head[0..4] != DUMP_MAGIC {
        return Err(Error::MalformedDump(format!("bad magic {:?}", &head[0..4])));
    }
    let flags = u32::from_le_bytes(head[4..8].try_into().unwrap());
    let n = u32::from_le_bytes(head[8..12].try_into().unwrap());
    let count = u32::from_le_bytes(head[12..16].try_into().unwrap());
    if flags & !DUMP_FLAG_COMPLEX != 0 {
        return Err(Error::MalformedDump(format!("unknown flag bits {flags:#x}")));
    }
    let complex = flags & DUMP_FLAG_COMPLEX != 0;
    let per = n as usize * n as usize * if complex { 2 } else { 1 };
    let expect = per * count as usize;
    let mut payload = Vec::with_capacity(expect);
    let mut buf = [0u8; 8];
    for _ in 0..expect {
        r.read_exact(&mut buf)
            .map_err(|_| Error::MalformedDump("payload truncated".into()))?;
        payload.push(f64::from_le_bytes(buf));
    }
    let mut tail = [0u8; 1];
    if r.read(&mut tail)? != 0 {
        return Err(Error::MalformedDump("trailing bytes after payload".into()));
    }
    Ok(SampleDump { n, complex, count, payload })
}

/// Row-major doubles of a matrix for dump payloads: re only, or re, im pairs.
pub fn matrix_to_doubles(m: &CMatrix, complex: bool) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols() * if complex { 2 } else { 1 });
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            out.push(m[(r, c)].re);
            if complex {
                out.push(m[(r, c)].im);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomStream;
    use crate::stats::{ks_one_sample, mean_and_stderr};
    use approx::assert_relative_eq;
    use statrs::distribution::{Beta, ContinuousCDF};

    #[test]
    fn identical_streams_give_bitwise_identical_samples() {
        for make in [
            |r: &mut rand_chacha::ChaCha8Rng| sample_orthogonal(7, r).unwrap(),
            |r: &mut rand_chacha::ChaCha8Rng| sample_special_unitary(5, r).unwrap(),
            |r: &mut rand_chacha::ChaCha8Rng| sample_symplectic(3, r).unwrap(),
        ] {
            let mut r1 = RandomStream::new(11, 4).rng();
            let mut r2 = RandomStream::new(11, 4).rng();
            let a = make(&mut r1);
            let b = make(&mut r2);
            assert_eq!(a.matrix, b.matrix);
        }
    }

    #[test]
    fn so1_is_the_identity() {
        let mut rng = RandomStream::new(1, 0).rng();
        let s = sample_orthogonal(1, &mut rng).unwrap();
        assert_relative_eq!(s.matrix[(0, 0)].re, 1.0, epsilon = 1e-14);
        assert_relative_eq!(s.matrix[(0, 0)].im, 0.0);
    }

    #[test]
    fn u1_phase_is_uniform() {
        let mut rng = RandomStream::new(2, 0).rng();
        let sample: Vec<f64> = (0..2000)
            .map(|_| {
                let u = sample_unitary(1, &mut rng).unwrap();
                let z = u.matrix[(0, 0)];
                assert!((z.norm() - 1.0).abs() < 1e-12);
                z.arg()
            })
            .collect();
        let out = ks_one_sample(&sample, |x| ((x + PI) / (2.0 * PI)).clamp(0.0, 1.0)).unwrap();
        assert!(!out.rejects_at(0.01), "p={}", out.p_value);
    }

    #[test]
    fn residuals_are_tiny_for_all_groups() {
        let mut rng = RandomStream::new(3, 0).rng();
        for n in [2usize, 10] {
            for _ in 0..25 {
                let sams = [
                    sample_orthogonal(n, &mut rng).unwrap(),
                    sample_unitary(n, &mut rng).unwrap(),
                    sample_special_unitary(n, &mut rng).unwrap(),
                    sample_symplectic(n, &mut rng).unwrap(),
                ];
                for s in sams {
                    let r = s.residuals();
                    assert!(r.max() < GROUP_TOL, "{}: residuals {r:?}", s.group);
                }
            }
        }
    }

    #[test]
    fn orthogonal_first_entry_squared_follows_beta_law() {
        let mut rng = RandomStream::new(4, 0).rng();
        let n = 10usize;
        let sample: Vec<f64> = (0..4000)
            .map(|_| {
                let s = sample_orthogonal(n, &mut rng).unwrap();
                s.matrix[(0, 0)].re.powi(2)
            })
            .collect();
        let (mean, se) = mean_and_stderr(&sample).unwrap();
        assert!(
            (mean - 1.0 / n as f64).abs() < 3.0 * se,
            "mean {mean} vs 1/{n} (se {se})"
        );
        let beta = Beta::new(0.5, (n as f64 - 1.0) / 2.0).unwrap();
        let out = ks_one_sample(&sample, |x| beta.cdf(x)).unwrap();
        assert!(!out.rejects_at(0.01), "D={} p={}", out.statistic, out.p_value);
    }

    #[test]
    fn unitary_first_entry_squared_mass_is_one_over_n() {
        let mut rng = RandomStream::new(5, 0).rng();
        let sample: Vec<f64> = (0..4000)
            .map(|_| sample_unitary(5, &mut rng).unwrap().matrix[(0, 0)].norm_sqr())
            .collect();
        let (mean, se) = mean_and_stderr(&sample).unwrap();
        assert!((mean - 0.2).abs() < 3.0 * se, "mean {mean} (se {se})");
        // |U_00|^2 for Haar U(n) is Beta(1, n-1).
        let beta = Beta::new(1.0, 4.0).unwrap();
        let out = ks_one_sample(&sample, |x| beta.cdf(x)).unwrap();
        assert!(!out.rejects_at(0.01), "p={}", out.p_value);
    }

    #[test]
    fn special_unitary_determinants_are_exactly_one() {
        let mut rng = RandomStream::new(6, 0).rng();
        for n in 2..=6usize {
            for _ in 0..10 {
                let s = sample_special_unitary(n, &mut rng).unwrap();
                let det = s.matrix.determinant();
                assert!((det - Complex64::new(1.0, 0.0)).norm() < 1e-10, "n={n} det={det}");
            }
        }
    }

    #[test]
    fn symplectic_samples_preserve_the_form_and_block_shape() {
        let mut rng = RandomStream::new(7, 0).rng();
        for n in [1usize, 3, 5] {
            let s = sample_symplectic(n, &mut rng).unwrap();
            let r = s.residuals();
            assert!(r.symplectic < GROUP_TOL, "n={n}: {r:?}");
            for a in 0..n {
                for b in 0..n {
                    let m = &s.matrix;
                    assert!((m[(a + n, b)] + m[(a, b + n)].conj()).norm() < 1e-10);
                    assert!((m[(a + n, b + n)] - m[(a, b)].conj()).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn xi_inverse_cdf_hits_boundaries_and_median() {
        assert_eq!(xi_from_uniform(5, 0.0), 0.0);
        assert_relative_eq!(xi_from_uniform(5, 1.0), PI / 2.0, epsilon = 1e-14);
        // CDF is sin^{2n}; at the median u = 0.5, sin(xi) = 0.5^{1/2n}.
        let xi = xi_from_uniform(3, 0.5);
        assert_relative_eq!(xi.sin().powi(6), 0.5, epsilon = 1e-13);
        assert_relative_eq!(phi_from_uniform(2, 1.0), PI / 2.0, epsilon = 1e-14);
        assert_relative_eq!(phi_from_uniform(2, 0.0), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn cpn_band_mass_matches_the_cosine_power_law() {
        // P(xi <= pi/2 - eps) = cos^{2n}(eps); Monte Carlo at n = 10, eps = 0.3.
        let mut rng = RandomStream::new(8, 0).rng();
        let n = 10usize;
        let eps = 0.3f64;
        let trials = 20_000u64;
        let mut hits = 0u64;
        for _ in 0..trials {
            let a = sample_cpn_angles(n, &mut rng).unwrap();
            if a.xi <= PI / 2.0 - eps {
                hits += 1;
            }
        }
        let expect = eps.cos().powi(2 * n as i32);
        let p_hat = hits as f64 / trials as f64;
        let half = crate::stats::clopper_pearson_halfwidth(hits, trials, 0.99).unwrap();
        assert!(
            (p_hat - expect).abs() <= half,
            "p_hat {p_hat} vs {expect}, halfwidth {half}"
        );
    }

    #[test]
    fn angle_ranges_are_respected() {
        let mut rng = RandomStream::new(9, 0).rng();
        for _ in 0..200 {
            let a = sample_cpn_angles(6, &mut rng).unwrap();
            assert!(a.xi >= 0.0 && a.xi < PI / 2.0 + 1e-12);
            assert_eq!(a.phi.len(), 5);
            assert_eq!(a.theta.len(), 6);
            assert!(a.phi.iter().all(|&p| (0.0..=PI / 2.0).contains(&p)));
            assert!(a.theta.iter().all(|&t| (0.0..2.0 * PI).contains(&t)));
        }
    }

    #[test]
    fn homogeneous_coordinates_from_angles() {
        let mk = |xi: f64, n: usize| CpnAngles {
            n,
            xi,
            phi: vec![0.0; n - 1],
            theta: vec![0.0; n],
        };
        // xi = 0: the base point (1 : 0 : ... : 0).
        let z = angles_to_homogeneous(&mk(0.0, 3), &[1.0, 0.0, 0.0]).unwrap();
        assert_relative_eq!(z[0].re, 1.0);
        assert!(z[1..].iter().all(|w| w.norm() == 0.0));
        // xi = pi/4 along R = e_1: (1 : 1 : 0)/sqrt2.
        let z = angles_to_homogeneous(&mk(PI / 4.0, 2), &[1.0, 0.0]).unwrap();
        assert_relative_eq!(z[0].re, 0.5f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(z[1].re, 0.5f64.sqrt(), epsilon = 1e-14);
        // xi = pi/2: first coordinate exactly 0 (hyperplane at infinity).
        let z = angles_to_homogeneous(&mk(PI / 2.0, 2), &[0.0, 1.0]).unwrap();
        assert!(z[0].norm() < 1e-16);
        assert_relative_eq!(z[2].norm(), 1.0, epsilon = 1e-14);
        // Unit norm always.
        let a = CpnAngles { n: 2, xi: 0.7, phi: vec![0.3], theta: vec![1.0, 2.5] };
        let z = angles_to_homogeneous(&a, &[0.6, -0.8]).unwrap();
        let norm2: f64 = z.iter().map(|w| w.norm_sqr()).sum();
        assert_relative_eq!(norm2, 1.0, epsilon = 1e-14);
        // Mismatched sphere dimension is rejected.
        assert!(angles_to_homogeneous(&a, &[1.0]).is_err());
        assert!(angles_to_homogeneous(&a, &[0.9, 0.9]).is_err());
    }

    #[test]
    fn haar_route_first_coordinate_is_beta_distributed() {
        let mut rng = RandomStream::new(10, 0).rng();
        // n = 1: |z_0|^2 uniform on [0, 1].
        let sample: Vec<f64> =
            (0..3000).map(|_| cpn_point_from_haar(1, &mut rng).unwrap()).collect();
        let out = ks_one_sample(&sample, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(!out.rejects_at(0.01), "p={}", out.p_value);
        // Mean 1/(n+1) by exchangeability, here n = 4.
        let sample: Vec<f64> =
            (0..4000).map(|_| cpn_point_from_haar(4, &mut rng).unwrap()).collect();
        let (mean, se) = mean_and_stderr(&sample).unwrap();
        assert!((mean - 0.2).abs() < 3.0 * se);
    }

    #[test]
    fn two_routes_agree_in_distribution() {
        let mut r1 = RandomStream::new(11, 0).rng();
        let mut r2 = RandomStream::new(11, 1).rng();
        let n = 5usize;
        let a: Vec<f64> = (0..10_000)
            .map(|_| cpn_cos2_from_angles(&sample_cpn_angles(n, &mut r1).unwrap()))
            .collect();
        let b: Vec<f64> =
            (0..10_000).map(|_| cpn_point_from_haar(n, &mut r2).unwrap()).collect();
        let out = crate::stats::ks_two_sample(&a, &b).unwrap();
        assert!(!out.rejects_at(0.01), "D={} p={}", out.statistic, out.p_value);
    }

    #[test]
    fn fs_metric_closed_form_checks() {
        // z = 0: identity.
        let g = fs_metric_components(&[Complex64::default(); 3]);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(g[(i, j)].re, expect);
                assert_relative_eq!(g[(i, j)].im, 0.0);
            }
        }
        // n = 1, z = 1: 1/2 - 1/4 = 1/4.
        let g = fs_metric_components(&[Complex64::new(1.0, 0.0)]);
        assert_relative_eq!(g[(0, 0)].re, 0.25, epsilon = 1e-15);

        // Spectrum: 1/(1+s)^2 along conj(z), 1/(1+s) orthogonally.
        let z = [
            Complex64::new(0.3, -0.4),
            Complex64::new(-1.1, 0.2),
            Complex64::new(0.0, 0.9),
        ];
        let s: f64 = z.iter().map(|w| w.norm_sqr()).sum();
        let g = fs_metric_components(&z);
        let zbar = nalgebra::DVector::from_iterator(3, z.iter().map(|w| w.conj()));
        let gz = &g * &zbar;
        for i in 0..3 {
            assert_relative_eq!(gz[i].re, zbar[i].re / (1.0 + s).powi(2), epsilon = 1e-14);
            assert_relative_eq!(gz[i].im, zbar[i].im / (1.0 + s).powi(2), epsilon = 1e-14);
        }
        // Hermitian.
        for i in 0..3 {
            for j in 0..3 {
                assert!((g[(i, j)] - g[(j, i)].conj()).norm() < 1e-15);
            }
        }
        // w with sum z_i w_i = 0 is an eigenvector with 1/(1+s).
        let w = nalgebra::DVector::from_vec(vec![
            z[1],
            -z[0],
            Complex64::default(),
        ]);
        let gw = &g * &w;
        for i in 0..3 {
            assert!((gw[i] - w[i] / Complex64::new(1.0 + s, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn dump_round_trip_preserves_bytes() {
        let mut rng = RandomStream::new(12, 0).rng();
        let mats: Vec<CMatrix> =
            (0..3).map(|_| sample_special_unitary(4, &mut rng).unwrap().matrix).collect();
        let mut payload = Vec::new();
        for m in &mats {
            payload.extend(matrix_to_doubles(m, true));
        }
        let dump = SampleDump { n: 4, complex: true, count: 3, payload };
        let dir = std::env::temp_dir().join("levylab-dump-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("samples.bin");
        write_sample_dump(&path, &dump).unwrap();
        let back = read_sample_dump(&path).unwrap();
        assert_eq!(dump, back);

        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[0..4], b"HSMP");
        assert_eq!(bytes.len(), 16 + 8 * dump.payload.len());

        // Malformed inputs are rejected.
        std::fs::write(&path, b"nope").unwrap();
        assert!(matches!(read_sample_dump(&path), Err(Error::MalformedDump(_))));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn payload_length_mismatch_is_rejected() {
        let dump = SampleDump { n: 3, complex: false, count: 2, payload: vec![0.0; 17] };
        let path = std::env::temp_dir().join("levylab-dump-bad.bin");
        assert!(write_sample_dump(&path, &dump).is_err());
    }
}
