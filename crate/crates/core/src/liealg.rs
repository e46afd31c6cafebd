//! Orthonormal bases for su(n), so(n), usp(2n) in the defining representation,
//! structure constants, adjoint matrices, and the Killing coefficient that
//! controls the Ricci curvature lower bound.
//!
//! All bases satisfy the standard normalization -(1/2) Tr(T_i T_j) = delta_ij,
//! under which every two-plane rotation subgroup is an orbit of length exactly
//! 2 pi (see [`orbit_length_check`]).

use crate::error::{Error, Result};
use crate::rootdata::{GroupSpec, SeriesTag};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use std::fmt;

pub type CMatrix = DMatrix<Complex64>;

/// Basis orthonormality is enforced to this absolute tolerance.
pub const BASIS_TOL: f64 = 1e-12;
/// Structure constants must be real to this tolerance before the imaginary
/// part is discarded.
pub const REALITY_TOL: f64 = 1e-12;
/// The Killing matrix must equal -chi times the identity to this tolerance.
pub const KILLING_TOL: f64 = 1e-8;
/// Hard cap on the algebra dimension: the structure-constant tensor holds
/// dim_alg^3 doubles.
pub const MAX_DIM_ALG: usize = 400;

/// A compact matrix Lie algebra in its defining representation.
///
/// `Symplectic(n)` denotes usp(2n) realized by 2n x 2n complex matrices.
/// The orthogonal tag takes the matrix size directly so that so(3) and so(4),
/// which no simple-group series label covers, are still constructible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatrixAlgebra {
    SpecialUnitary(u32),
    Orthogonal(u32),
    Symplectic(u32),
}

impl MatrixAlgebra {
    pub fn validate(self) -> Result<()> {
        let ok = match self {
            MatrixAlgebra::SpecialUnitary(n) => n >= 2,
            MatrixAlgebra::Orthogonal(n) => n >= 3,
            MatrixAlgebra::Symplectic(n) => n >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!("{self} is not a simple compact algebra")))
        }
    }

    /// Size of the defining matrices.
    pub fn defining_size(self) -> usize {
        match self {
            MatrixAlgebra::SpecialUnitary(n) | MatrixAlgebra::Orthogonal(n) => n as usize,
            MatrixAlgebra::Symplectic(n) => 2 * n as usize,
        }
    }

    /// Real dimension of the algebra.
    pub fn dim(self) -> usize {
        let n = match self {
            MatrixAlgebra::SpecialUnitary(n)
            | MatrixAlgebra::Orthogonal(n)
            | MatrixAlgebra::Symplectic(n) => n as usize,
        };
        match self {
            MatrixAlgebra::SpecialUnitary(_) => n * n - 1,
            MatrixAlgebra::Orthogonal(_) => n * (n - 1) / 2,
            MatrixAlgebra::Symplectic(_) => n * (2 * n + 1),
        }
    }

    /// The algebra of the compact group: su(n) for A, so(2n+1) for B,
    /// usp(2n) for C, so(2n) for D.
    pub fn from_group(spec: &GroupSpec) -> Self {
        match spec.series {
            SeriesTag::A => MatrixAlgebra::SpecialUnitary(spec.n),
            SeriesTag::B => MatrixAlgebra::Orthogonal(2 * spec.n + 1),
            SeriesTag::C => MatrixAlgebra::Symplectic(spec.n),
            SeriesTag::D => MatrixAlgebra::Orthogonal(2 * spec.n),
        }
    }

    /// Tabulated family predictions for the Killing coefficient:
    /// n+2 for su(n), n-2 for so(n), 2n+2 for usp(2n).
    ///
    /// For the unitary family the brute-force computation in this module
    /// yields 2n, which matches the tabulated n+2 only at n = 2; the table is
    /// kept as stated so reports can show both values side by side.
    pub fn chi_closed_form(self) -> f64 {
        match self {
            MatrixAlgebra::SpecialUnitary(n) => n as f64 + 2.0,
            MatrixAlgebra::Orthogonal(n) => n as f64 - 2.0,
            MatrixAlgebra::Symplectic(n) => 2.0 * n as f64 + 2.0,
        }
    }
}

impl fmt::Display for MatrixAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixAlgebra::SpecialUnitary(n) => write!(f, "su({n})"),
            MatrixAlgebra::Orthogonal(n) => write!(f, "so({n})"),
            MatrixAlgebra::Symplectic(n) => write!(f, "usp({})", 2 * n),
        }
    }
}

/// An orthonormal generator list for a matrix algebra.
#[derive(Debug, Clone)]
pub struct LieBasis {
    pub algebra: MatrixAlgebra,
    pub dim_rep: usize,
    pub dim_alg: usize,
    pub generators: Vec<CMatrix>,
}

/// Tr(A B) without forming the product.
fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut sum = Complex64::new(0.0, 0.0);
    for r in 0..n {
        for c in 0..n {
            sum += a[(r, c)] * b[(c, r)];
        }
    }
    sum
}

/// -(1/2) Tr(A B), the pairing under which the bases here are orthonormal.
pub fn pairing(a: &CMatrix, b: &CMatrix) -> Complex64 {
    -0.5 * trace_product(a, b)
}

fn su_generators(n: usize) -> Vec<CMatrix> {
    let i = Complex64::new(0.0, 1.0);
    let mut gens = Vec::with_capacity(n * n - 1);
    // Cartan elements H_k = i sqrt(2)/sqrt(k^2+k) (E_11 + ... + E_kk - k E_{k+1,k+1}).
    for k in 1..n {
        let scale = i * (2.0 / (k * k + k) as f64).sqrt();
        let mut m = CMatrix::zeros(n, n);
        for a in 0..k {
            m[(a, a)] = scale;
        }
        m[(k, k)] = -scale * k as f64;
        gens.push(m);
    }
    // S_kj = i (E_kj + E_jk).
    for k in 0..n {
        for j in k + 1..n {
            let mut m = CMatrix::zeros(n, n);
            m[(k, j)] = i;
            m[(j, k)] = i;
            gens.push(m);
        }
    }
    // A_kj = E_kj - E_jk.
    for k in 0..n {
        for j in k + 1..n {
            let mut m = CMatrix::zeros(n, n);
            m[(k, j)] = Complex64::new(1.0, 0.0);
            m[(j, k)] = Complex64::new(-1.0, 0.0);
            gens.push(m);
        }
    }
    gens
}

fn so_generators(n: usize) -> Vec<CMatrix> {
    let mut gens = Vec::with_capacity(n * (n - 1) / 2);
    for k in 0..n {
        for j in k + 1..n {
            let mut m = CMatrix::zeros(n, n);
            m[(k, j)] = Complex64::new(1.0, 0.0);
            m[(j, k)] = Complex64::new(-1.0, 0.0);
            gens.push(m);
        }
    }
    gens
}

fn usp_generators(n: usize) -> Vec<CMatrix> {
    let size = 2 * n;
    let i = Complex64::new(0.0, 1.0);
    let r = Complex64::new(1.0, 0.0);
    let i_h = i / 2.0f64.sqrt();
    let r_h = r / 2.0f64.sqrt();
    let mut gens = Vec::with_capacity(n * (2 * n + 1));

    // H_a = i (E_aa - E_{a+n,a+n}).
    for a in 0..n {
        let mut m = CMatrix::zeros(size, size);
        m[(a, a)] = i;
        m[(a + n, a + n)] = -i;
        gens.push(m);
    }
    // S^d_ij = i/sqrt2 (E_ij + E_ji - E_{i+n,j+n} - E_{j+n,i+n}).
    for a in 0..n {
        for b in a + 1..n {
            let mut m = CMatrix::zeros(size, size);
            m[(a, b)] = i_h;
            m[(b, a)] = i_h;
            m[(a + n, b + n)] = -i_h;
            m[(b + n, a + n)] = -i_h;
            gens.push(m);
        }
    }
    // A^d_ij = 1/sqrt2 (E_ij - E_ji + E_{i+n,j+n} - E_{j+n,i+n}).
    for a in 0..n {
        for b in a + 1..n {
            let mut m = CMatrix::zeros(size, size);
            m[(a, b)] = r_h;
            m[(b, a)] = -r_h;
            m[(a + n, b + n)] = r_h;
            m[(b + n, a + n)] = -r_h;
            gens.push(m);
        }
    }
    // T_a = i (E_{a,a+n} + E_{a+n,a}).
    for a in 0..n {
        let mut m = CMatrix::zeros(size, size);
        m[(a, a + n)] = i;
        m[(a + n, a)] = i;
        gens.push(m);
    }
    // S^a_ij = i/sqrt2 (E_{i,j+n} + E_{j,i+n} + E_{i+n,j} + E_{j+n,i}).
    for a in 0..n {
        for b in a + 1..n {
            let mut m = CMatrix::zeros(size, size);
            m[(a, b + n)] = i_h;
            m[(b, a + n)] = i_h;
            m[(a + n, b)] = i_h;
            m[(b + n, a)] = i_h;
            gens.push(m);
        }
    }
    // U_a = E_{a,a+n} - E_{a+n,a}.
    for a in 0..n {
        let mut m = CMatrix::zeros(size, size);
        m[(a, a + n)] = r;
        m[(a + n, a)] = -r;
        gens.push(m);
    }
    // A^a_ij = 1/sqrt2 (E_{i,j+n} + E_{j,i+n} - E_{i+n,j} - E_{j+n,i}).
    for a in 0..n {
        for b in a + 1..n {
            let mut m = CMatrix::zeros(size, size);
            m[(a, b + n)] = r_h;
            m[(b, a + n)] = r_h;
            m[(a + n, b)] = -r_h;
            m[(b + n, a)] = -r_h;
            gens.push(m);
        }
    }
    gens
}

/// Build the orthonormal basis for an algebra, Cartan elements first for the
/// unitary and symplectic families. The construction verifies anti-Hermiticity
/// and the full Gram matrix before returning.
pub fn build_basis(algebra: MatrixAlgebra) -> Result<LieBasis> {
    algebra.validate()?;
    let dim_alg = algebra.dim();
    if dim_alg > MAX_DIM_ALG {
        return Err(Error::SizeGuard { dim_alg, max: MAX_DIM_ALG });
    }
    let generators = match algebra {
        MatrixAlgebra::SpecialUnitary(n) => su_generators(n as usize),
        MatrixAlgebra::Orthogonal(n) => so_generators(n as usize),
        MatrixAlgebra::Symplectic(n) => usp_generators(n as usize),
    };
    debug_assert_eq!(generators.len(), dim_alg);

    for (idx, g) in generators.iter().enumerate() {
        let anti = (g + g.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if anti > BASIS_TOL {
            return Err(Error::Domain(format!(
                "{algebra} generator {idx} is not anti-Hermitian (residual {anti:.2e})"
            )));
        }
        if matches!(algebra, MatrixAlgebra::SpecialUnitary(_)) {
            let tr = g.trace().norm();
            if tr > BASIS_TOL {
                return Err(Error::Domain(format!(
                    "{algebra} generator {idx} has trace {tr:.2e}"
                )));
            }
        }
    }
    for a in 0..dim_alg {
        for b in a..dim_alg {
            let p = pairing(&generators[a], &generators[b]);
            let expect = if a == b { 1.0 } else { 0.0 };
            let err = (p.re - expect).abs().max(p.im.abs());
            if err > BASIS_TOL {
                return Err(Error::Domain(format!(
                    "{algebra} Gram entry ({a},{b}) = {p} deviates by {err:.2e}"
                )));
            }
        }
    }

    Ok(LieBasis {
        algebra,
        dim_rep: algebra.defining_size(),
        dim_alg,
        generators,
    })
}

/// Basis for the algebra of a compact group in one of the classical series.
pub fn build_basis_for_group(spec: &GroupSpec) -> Result<LieBasis> {
    spec.series.validate_n(spec.n)?;
    build_basis(MatrixAlgebra::from_group(spec))
}

/// The real 3-tensor c_ij^k with [T_i, T_j] = sum_k c_ij^k T_k, stored dense.
#[derive(Debug, Clone)]
pub struct StructureConstants {
    dim: usize,
    /// Flat layout: entry (i, j, k) at ((i * dim) + j) * dim + k.
    c: Vec<f64>,
}

impl StructureConstants {
    pub fn dim_alg(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[(i * self.dim + j) * self.dim + k]
    }

    /// Used by tests to build synthetic tensors (abelian or block inputs).
    #[cfg(test)]
    fn from_raw(dim: usize, c: Vec<f64>) -> Self {
        assert_eq!(c.len(), dim * dim * dim);
        Self { dim, c }
    }
}

/// Compute c_ij^k = -(1/2) Tr([T_i, T_j] T_k) for every index triple.
///
/// Each i-slab is computed independently (no use of antisymmetry), so the
/// antisymmetry relations checked by tests are genuine cross-validations, and
/// parallel scheduling cannot affect the result.
pub fn structure_constants(basis: &LieBasis) -> Result<StructureConstants> {
    let d = basis.dim_alg;
    if d > MAX_DIM_ALG {
        return Err(Error::SizeGuard { dim_alg: d, max: MAX_DIM_ALG });
    }
    let gens = &basis.generators;

    let mut c = vec![0.0f64; d * d * d];
    let slabs: Vec<Result<Vec<f64>>> = (0..d)
        .into_par_iter()
        .map(|i| {
            let mut slab = vec![0.0f64; d * d];
            for j in 0..d {
                if i == j {
                    continue;
                }
                let comm = &gens[i] * &gens[j] - &gens[j] * &gens[i];
                for (k, gk) in gens.iter().enumerate() {
                    let val = -0.5 * trace_product(&comm, gk);
                    if val.im.abs() > REALITY_TOL {
                        return Err(Error::BasisCorruption { i, j, k, imag: val.im });
                    }
                    slab[j * d + k] = val.re;
                }
            }
            Ok(slab)
        })
        .collect();

    for (i, slab) in slabs.into_iter().enumerate() {
        let slab = slab?;
        c[i * d * d..(i + 1) * d * d].copy_from_slice(&slab);
    }
    Ok(StructureConstants { dim: d, c })
}

/// The adjoint matrix of generator i: (ad_i)_{kj} = c_ij^k.
pub fn adjoint_matrix(sc: &StructureConstants, i: usize) -> DMatrix<f64> {
    assert!(i < sc.dim, "generator index {i} out of range (dim {})", sc.dim);
    DMatrix::from_fn(sc.dim, sc.dim, |k, j| sc.c(i, j, k))
}

/// Killing data of a simple algebra.
#[derive(Debug, Clone, Copy)]
pub struct KillingReport {
    /// chi = -(1/2) Tr(ad_{T_1}^2), the positive constant with
    /// (1/2) Tr(ad_i ad_j) = -chi delta_ij.
    pub chi: f64,
    /// max_ij |(1/2) Tr(ad_i ad_j) + chi delta_ij| over the whole matrix.
    pub killing_diagonal_spread: f64,
    /// chi / 4, the uniform Ricci lower bound in the standard normalization.
    pub ricci_bound: f64,
}

/// chi probed from a single generator: -(1/2) Tr(ad_i^2), evaluated directly
/// from the tensor without forming the adjoint matrix.
pub fn chi_from_probe(sc: &StructureConstants, i: usize) -> f64 {
    assert!(i < sc.dim);
    let mut tr = 0.0;
    for k in 0..sc.dim {
        for m in 0..sc.dim {
            tr += sc.c(i, m, k) * sc.c(i, k, m);
        }
    }
    -0.5 * tr
}

/// Compute the Killing coefficient and verify that the full Killing matrix is
/// -chi times the identity, which is what simplicity guarantees.
pub fn chi_coefficient(sc: &StructureConstants) -> Result<KillingReport> {
    if sc.dim == 0 {
        return Err(Error::InsufficientData("empty structure-constant tensor".into()));
    }
    let chi = chi_from_probe(sc, 0);
    let d = sc.dim;

    let spread = (0..d)
        .into_par_iter()
        .map(|i| {
            let mut worst = 0.0f64;
            for j in i..d {
                // Half-trace Killing entry (1/2) Tr(ad_i ad_j).
                let mut tr = 0.0;
                for k in 0..d {
                    for m in 0..d {
                        tr += sc.c(i, m, k) * sc.c(j, k, m);
                    }
                }
                let entry = 0.5 * tr;
                let expect = if i == j { -chi } else { 0.0 };
                worst = worst.max((entry - expect).abs());
            }
            worst
        })
        .reduce(|| 0.0, f64::max);

    if spread > KILLING_TOL {
        return Err(Error::NotSimple { spread, tol: KILLING_TOL });
    }
    Ok(KillingReport { chi, killing_diagonal_spread: spread, ricci_bound: chi / 4.0 })
}

/// Length of the one-parameter orbit generated by the rotation of the (k, j)
/// coordinate plane of the defining representation, zero-based indices.
///
/// The basis is scanned for the generator proportional to E_kj - E_jk; the
/// orbit length is 2 pi sqrt(-(1/2) Tr(G^2)), which is exactly 2 pi for a
/// standardly normalized basis. For the symplectic family the rotation planes
/// present in the algebra are (a, a+n).
pub fn orbit_length_check(basis: &LieBasis, k: usize, j: usize) -> Result<f64> {
    let n = basis.dim_rep;
    if k >= n || j >= n || k == j {
        return Err(Error::InvalidSpec(format!(
            "({k},{j}) does not label a coordinate plane of dimension {n}"
        )));
    }
    let (k, j) = if k < j { (k, j) } else { (j, k) };

    for g in &basis.generators {
        let lead = g[(k, j)];
        if lead.norm() == 0.0 {
            continue;
        }
        // Candidate scalar multiple of E_kj - E_jk: check every entry.
        let mut residual = 0.0f64;
        for r in 0..n {
            for c in 0..n {
                let expect = if (r, c) == (k, j) {
                    lead
                } else if (r, c) == (j, k) {
                    -lead
                } else {
                    Complex64::new(0.0, 0.0)
                };
                residual = residual.max((g[(r, c)] - expect).norm());
            }
        }
        if residual > BASIS_TOL {
            continue;
        }
        let s = pairing(g, g);
        if s.re <= 0.0 || s.im.abs() > BASIS_TOL {
            return Err(Error::Domain(format!(
                "generator for plane ({k},{j}) has invalid norm pairing {s}"
            )));
        }
        return Ok(2.0 * std::f64::consts::PI * s.re.sqrt());
    }
    Err(Error::Domain(format!(
        "no generator of {} spans the ({k},{j}) rotation plane",
        basis.algebra
    )))
}
