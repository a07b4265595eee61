//! Dense complex linear algebra used throughout the crate.
//!
//! Everything is built on `nalgebra` dense matrices of `Complex64`. Entropies
//! are in bits. Eigenvalues come back in ascending order and Schmidt
//! coefficients in nonincreasing order, with ties resolved by the order in
//! which the underlying solver produced them.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Result, SsrError};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Hermiticity tolerance for density operators.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Trace tolerance for density operators.
pub const TRACE_TOL: f64 = 1e-12;
/// Most negative eigenvalue still accepted (and clamped to zero).
/// Schmidt coefficients below this fraction of `‖M‖` are dropped.
pub const SCHMIDT_CUTOFF: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-10;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(m, &m.adjoint())
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Tensor product; the index of `a` is the slow one.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a CMatrix>) -> CMatrix {
    factors.into_iter().fold(CMatrix::identity(1, 1), |acc, f| acc.kronecker(f))
}

/// `U ρ U†`
pub fn conjugate_by(u: &CMatrix, rho: &CMatrix) -> CMatrix {
    u * rho * u.adjoint()
}

/// Hermitian eigendecomposition with eigenvalues in ascending order.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: CMatrix,
}

impl Spectrum {
    pub fn reconstruct(&self) -> CMatrix {
        let d = CMatrix::from_diagonal(&DVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&v| c64(v, 0.0)),
        ));
        &self.vectors * d * self.vectors.adjoint()
    }

    /// Rebuilds `f(H)` from the spectrum.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let d = CMatrix::from_diagonal(&DVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&v| c64(f(v), 0.0)),
        ));
        &self.vectors * d * self.vectors.adjoint()
    }
}

pub fn eig_hermitian(h: &CMatrix) -> Result<Spectrum> {
    if !h.is_square() {
        return Err(SsrError::DimensionMismatch(format!("eigendecomposition of a {}x{} matrix", h.nrows(), h.ncols())));
    }
    let scale = max_abs(h).max(1.0);
    let residual = hermiticity_residual(h);
    if residual > 1e-10 * scale {
        return Err(SsrError::NotHermitian { residual });
    }
    let n = h.nrows();
    if n == 0 {
        return Ok(Spectrum { values: vec![], vectors: CMatrix::zeros(0, 0) });
    }
    // symmetrize so the solver sees an exactly Hermitian input
    let sym = (h + h.adjoint()).scale(0.5);
    let a = faer::Mat::<Complex64>::from_fn(n, n, |i, j| sym[(i, j)]);
    let evd = a
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| SsrError::Numerical(format!("eigendecomposition failed: {e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let values = (0..n).map(|k| s[k].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| u[(i, j)]);
    Ok(Spectrum { values, vectors })
}

/// Square root of a positive semidefinite matrix; eigenvalues within the clamp
/// window are treated as zero.
pub fn sqrt_psd(m: &CMatrix) -> Result<CMatrix> {
    let spec = eig_hermitian(m)?;
    let scale = spec.values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    if let Some(&low) = spec.values.first() {
        if low < -PSD_TOL * scale {
            return Err(SsrError::NegativeEigenvalue { value: low });
        }
    }
    Ok(spec.map(|v| v.max(0.0).sqrt()))
}

/// Closest unitary in Frobenius norm, `M (M†M)^{-1/2}`, for invertible `M`.
/// Two Newton-Schulz steps clean up the rounding of the inverse square root.
pub fn polar_unitary(m: &CMatrix) -> CMatrix {
    let spec = eig_hermitian(&(m.adjoint() * m)).expect("gram matrix is Hermitian");
    let inv_sqrt = spec.map(|v| 1.0 / v.max(f64::MIN_POSITIVE).sqrt());
    let mut u = m * inv_sqrt;
    let three = identity(m.ncols()).scale(3.0);
    for _ in 0..2 {
        u = (&u * (&three - u.adjoint() * &u)).scale(0.5);
    }
    u
}

/// Shannon entropy in bits of a probability vector, with `0 log 0 = 0`.
pub fn shannon_bits(probs: impl IntoIterator<Item = f64>) -> f64 {
    probs.into_iter().filter(|&p| p > 0.0).map(|p| -p * p.log2()).sum()
}

/// A trace-one positive semidefinite matrix together with its subsystem
/// dimensions.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    matrix: CMatrix,
    dims: Vec<usize>,
}

impl DensityOperator {
    /// Validates all density-operator invariants.
    pub fn new(matrix: CMatrix, dims: Vec<usize>) -> Result<Self> {
        let report = validate_density(&matrix, &dims);
        if let Some(failure) = report.first_failure() {
            return Err(SsrError::InvalidState(failure));
        }
        Ok(Self { matrix, dims })
    }

    /// Builds without the PSD check; used for outputs of maps that preserve
    /// positivity, where an eigendecomposition per call would be wasted work.
    /// Hermitian part is taken so the stored matrix is exactly Hermitian.
    pub(crate) fn from_trusted(matrix: CMatrix, dims: Vec<usize>) -> Self {
        debug_assert_eq!(matrix.nrows(), dims.iter().product::<usize>());
        let matrix = (&matrix + matrix.adjoint()).scale(0.5);
        Self { matrix, dims }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let v = &psi.amplitudes;
        Self::from_trusted(v * v.adjoint(), psi.dims.clone())
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        Self::from_trusted(identity(d).scale(1.0 / d as f64), dims)
    }

    /// Builds a state from a mixture; the weights must sum to one.
    pub fn mixture(terms: &[(f64, &DensityOperator)]) -> Result<Self> {
        let first = terms.first().ok_or_else(|| SsrError::InvalidState("empty mixture".into()))?;
        let total: f64 = terms.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(SsrError::ProbabilitySum(total));
        }
        let mut acc = CMatrix::zeros(first.1.dim(), first.1.dim());
        for (p, rho) in terms {
            if rho.dims != first.1.dims {
                return Err(SsrError::DimensionMismatch("mixture components".into()));
            }
            acc += rho.matrix.scale(*p);
        }
        Ok(Self::from_trusted(acc, first.1.dims.clone()))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::from_trusted(kron(&self.matrix, &other.matrix), dims)
    }

    /// `U ρ U†` for a unitary `U` on the full space.
    pub fn conjugated(&self, u: &CMatrix) -> DensityOperator {
        Self::from_trusted(conjugate_by(u, &self.matrix), self.dims.clone())
    }

    /// Same matrix with a different subsystem signature of equal total dimension.
    pub fn with_dims(&self, dims: Vec<usize>) -> Result<DensityOperator> {
        if dims.iter().product::<usize>() != self.dim() {
            return Err(SsrError::DimensionMismatch(format!("dims {:?} do not multiply to {}", dims, self.dim())));
        }
        Ok(Self { matrix: self.matrix.clone(), dims })
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator> {
        partial_trace(self, keep)
    }

    pub fn entropy(&self) -> Result<f64> {
        von_neumann_entropy(self)
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }
}

/// Normalized state vector with subsystem dimensions.
#[derive(Clone, Debug)]
pub struct PureState {
    amplitudes: CVector,
    dims: Vec<usize>,
}

impl PureState {
    pub fn new(amplitudes: CVector, dims: Vec<usize>) -> Result<Self> {
        if dims.iter().product::<usize>() != amplitudes.len() {
            return Err(SsrError::DimensionMismatch(format!("dims {:?} vs {} amplitudes", dims, amplitudes.len())));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(SsrError::InvalidState("non-finite amplitude".into()));
        }
        let norm2 = amplitudes.norm_squared();
        if (norm2 - 1.0).abs() > 1e-12 {
            return Err(SsrError::InvalidState(format!("squared norm {norm2}")));
        }
        Ok(Self { amplitudes, dims })
    }

    /// Rescales to unit norm before validating.
    pub fn normalized(amplitudes: CVector, dims: Vec<usize>) -> Result<Self> {
        let n = amplitudes.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(SsrError::InvalidState("zero vector".into()));
        }
        Self::new(amplitudes.unscale(n), dims)
    }

    pub fn basis(index: usize, dims: Vec<usize>) -> Result<Self> {
        let d: usize = dims.iter().product();
        if index >= d {
            return Err(SsrError::InvalidState(format!("basis index {index} >= {d}")));
        }
        let mut v = CVector::zeros(d);
        v[index] = c64(1.0, 0.0);
        Self::new(v, dims)
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        PureState { amplitudes: kron_vec(&self.amplitudes, &other.amplitudes), dims }
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator::from_pure(self)
    }
}

fn check_subsystems(dims: &[usize], keep: &[usize]) -> Result<()> {
    if keep.is_empty() {
        return Err(SsrError::InvalidSubsystem("empty subsystem set".into()));
    }
    for (i, &k) in keep.iter().enumerate() {
        if k >= dims.len() {
            return Err(SsrError::InvalidSubsystem(format!("index {k} for {} subsystems", dims.len())));
        }
        if keep[..i].contains(&k) {
            return Err(SsrError::InvalidSubsystem(format!("index {k} repeated")));
        }
    }
    Ok(())
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Flat offsets of every multi-index over `subsystems` (row-major in the
/// listed order), expressed in the full space's strides.
fn offsets(dims: &[usize], full_strides: &[usize], subsystems: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for &s in subsystems {
        let mut next = Vec::with_capacity(out.len() * dims[s]);
        for &base in &out {
            for v in 0..dims[s] {
                next.push(base + v * full_strides[s]);
            }
        }
        out = next;
    }
    out
}

/// Reduced state on the subsystems in `keep`, in ascending subsystem order.
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    let dims = rho.dims();
    check_subsystems(dims, keep)?;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !kept.contains(i)).collect();
    let st = strides(dims);
    let keep_off = offsets(dims, &st, &kept);
    let trace_off = offsets(dims, &st, &traced);
    let m = rho.matrix();
    let dk = keep_off.len();
    let out = CMatrix::from_fn(dk, dk, |r, c| trace_off.iter().map(|&t| m[(keep_off[r] + t, keep_off[c] + t)]).sum());
    let out_dims = kept.iter().map(|&k| dims[k]).collect();
    Ok(DensityOperator::from_trusted(out, out_dims))
}

/// Permutation matrix taking the tensor ordering `dims` to the ordering
/// `order`, where new subsystem `k` is old subsystem `order[k]`.
pub fn subsystem_permutation(dims: &[usize], order: &[usize]) -> Result<CMatrix> {
    if order.len() != dims.len() {
        return Err(SsrError::InvalidSubsystem("order length".into()));
    }
    check_subsystems(dims, order)?;
    let st = strides(dims);
    let old_offsets = offsets(dims, &st, order);
    let d = old_offsets.len();
    let mut p = CMatrix::zeros(d, d);
    for (new_index, &old_index) in old_offsets.iter().enumerate() {
        p[(new_index, old_index)] = c64(1.0, 0.0);
    }
    Ok(p)
}

pub fn permute_subsystems(rho: &DensityOperator, order: &[usize]) -> Result<DensityOperator> {
    let p = subsystem_permutation(rho.dims(), order)?;
    let dims = order.iter().map(|&k| rho.dims()[k]).collect();
    Ok(DensityOperator::from_trusted(conjugate_by(&p, rho.matrix()), dims))
}

pub fn permute_pure(psi: &PureState, order: &[usize]) -> Result<PureState> {
    let p = subsystem_permutation(psi.dims(), order)?;
    let dims = order.iter().map(|&k| psi.dims()[k]).collect();
    Ok(PureState { amplitudes: p * psi.amplitudes(), dims })
}

/// Entropy in bits from a list of eigenvalues, applying the clamp window.
pub fn entropy_of_spectrum(values: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &v in values {
        if v < -PSD_TOL {
            return Err(SsrError::NegativeEigenvalue { value: v });
        }
        if v > 0.0 {
            s -= v * v.log2();
        }
    }
    Ok(s.max(0.0))
}

/// von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<f64> {
    let spec = eig_hermitian(rho.matrix())?;
    entropy_of_spectrum(&spec.values)
}

#[derive(Clone, Debug)]
pub struct SchmidtForm {
    /// Nonincreasing, nonnegative; zero coefficients are dropped.
    pub coefficients: Vec<f64>,
    /// Columns are the left Schmidt vectors.
    pub left: CMatrix,
    /// Columns are the right Schmidt vectors.
    pub right: CMatrix,
    pub left_dims: Vec<usize>,
    pub right_dims: Vec<usize>,
}

impl SchmidtForm {
    /// Entanglement entropy `-Σ Λ² log₂ Λ²`.
    pub fn entropy(&self) -> f64 {
        shannon_bits(self.coefficients.iter().map(|l| l * l))
    }

    pub fn reconstruct(&self) -> CVector {
        let mut v = CVector::zeros(self.left.nrows() * self.right.nrows());
        for (k, &lambda) in self.coefficients.iter().enumerate() {
            let term = kron_vec(&self.left.column(k).into_owned(), &self.right.column(k).into_owned());
            v += term.scale(lambda);
        }
        v
    }
}

/// Schmidt decomposition of a matrix of amplitudes `M[l, r]` (left index
/// slow). Returns coefficients with their left/right vectors.
///
/// Built from the Hermitian eigenproblem of `M M†` on the smaller side;
/// nalgebra's complex SVD loses accuracy on some rank-deficient inputs.
pub fn schmidt_of_matrix(m: &CMatrix) -> (Vec<f64>, CMatrix, CMatrix) {
    if m.nrows() > m.ncols() {
        let (c, right, left) = schmidt_of_matrix(&m.transpose());
        return (c, left, right);
    }
    let (rows, cols) = m.shape();
    let gram = m * m.adjoint();
    let spec = eig_hermitian(&gram).expect("gram matrix is Hermitian");
    let scale = m.norm().max(1e-300);
    let mut kept = Vec::new();
    for k in (0..rows).rev() {
        let u = spec.vectors.column(k).into_owned();
        let w = m.adjoint() * &u;
        let lambda = w.norm();
        if lambda > SCHMIDT_CUTOFF * scale {
            kept.push((lambda, u, w.unscale(lambda)));
        }
    }
    kept.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut left = CMatrix::zeros(rows, kept.len());
    let mut right = CMatrix::zeros(cols, kept.len());
    let mut coefficients = Vec::with_capacity(kept.len());
    for (k, (lambda, u, v)) in kept.into_iter().enumerate() {
        coefficients.push(lambda);
        left.set_column(k, &u);
        // M = Σ λ u v^T, so the right vector is the conjugate of M†u/λ
        right.set_column(k, &v.conjugate());
    }
    (coefficients, left, right)
}

/// Schmidt decomposition across the cut `left | rest`.
pub fn schmidt_decompose(psi: &PureState, left: &[usize]) -> Result<SchmidtForm> {
    let dims = psi.dims();
    check_subsystems(dims, left)?;
    if left.len() == dims.len() {
        return Err(SsrError::InvalidSubsystem("cut leaves the right side empty".into()));
    }
    let mut l: Vec<usize> = left.to_vec();
    l.sort_unstable();
    let r: Vec<usize> = (0..dims.len()).filter(|i| !l.contains(i)).collect();
    let mut order = l.clone();
    order.extend_from_slice(&r);
    let permuted = permute_pure(psi, &order)?;
    let left_dims: Vec<usize> = l.iter().map(|&k| dims[k]).collect();
    let right_dims: Vec<usize> = r.iter().map(|&k| dims[k]).collect();
    let dl: usize = left_dims.iter().product();
    let dr: usize = right_dims.iter().product();
    let amps = permuted.amplitudes();
    let m = CMatrix::from_fn(dl, dr, |i, j| amps[i * dr + j]);
    let (coefficients, left, right) = schmidt_of_matrix(&m);
    Ok(SchmidtForm { coefficients, left, right, left_dims, right_dims })
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantCheck {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<InvariantCheck>,
}

impl ValidationReport {
    pub fn push(&mut self, name: &str, measured: f64, tolerance: f64) {
        self.checks.push(InvariantCheck { name: name.to_string(), measured, tolerance, pass: measured <= tolerance });
    }

    pub fn push_flag(&mut self, name: &str, ok: bool) {
        self.checks.push(InvariantCheck {
            name: name.to_string(),
            measured: if ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
            pass: ok,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed(&self, name: &str) -> bool {
        self.checks.iter().any(|c| c.name == name && !c.pass)
    }

    pub fn first_failure(&self) -> Option<String> {
        self.checks
            .iter()
            .find(|c| !c.pass)
            .map(|c| format!("{} (measured {:.3e}, tolerance {:.1e})", c.name, c.measured, c.tolerance))
    }
}

/// Checks shape, finiteness, Hermiticity, unit trace and positivity.
pub fn validate_density(matrix: &CMatrix, dims: &[usize]) -> ValidationReport {
    let mut report = ValidationReport::default();
    let shape_ok = matrix.is_square() && dims.iter().product::<usize>() == matrix.nrows();
    report.push_flag("shape", shape_ok);
    let finite = matrix.iter().all(|z| z.re.is_finite() && z.im.is_finite());
    report.push_flag("finite", finite);
    if !shape_ok || !finite {
        return report;
    }
    let herm = hermiticity_residual(matrix);
    report.push("hermitian", herm, HERMITIAN_TOL);
    report.push("unit_trace", (trace(matrix) - c64(1.0, 0.0)).norm(), TRACE_TOL);
    let sym = (matrix + matrix.adjoint()).scale(0.5);
    let min_eig = eig_hermitian(&sym).map(|s| s.values.first().copied().unwrap_or(0.0)).unwrap_or(f64::NEG_INFINITY);
    report.push("positive_semidefinite", (-min_eig).max(0.0), PSD_TOL);
    report
}

/// Seeded sampler for states and matrices.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn complex_normal(&mut self) -> Complex64 {
        let re = self.normal();
        let im = self.normal();
        c64(re, im).unscale(std::f64::consts::SQRT_2)
    }

    pub fn ginibre(&mut self, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| self.complex_normal())
    }

    pub fn vector(&mut self, n: usize) -> CVector {
        CVector::from_fn(n, |_, _| self.complex_normal())
    }

    pub fn pure_state(&mut self, dims: &[usize]) -> PureState {
        let d = dims.iter().product();
        PureState::normalized(self.vector(d), dims.to_vec()).expect("nonzero gaussian vector")
    }

    /// `AA†/Tr(AA†)` with `A` a `D × rank` Ginibre matrix.
    pub fn mixed_state(&mut self, dims: &[usize], rank: usize) -> DensityOperator {
        let d: usize = dims.iter().product();
        let a = self.ginibre(d, rank.max(1));
        let m = &a * a.adjoint();
        let t = trace(&m).re;
        DensityOperator::from_trusted(m.unscale(t), dims.to_vec())
    }

    pub fn hermitian(&mut self, n: usize) -> CMatrix {
        let a = self.ginibre(n, n);
        (&a + a.adjoint()).scale(0.5)
    }

    pub fn unitary(&mut self, n: usize) -> CMatrix {
        // QR of a Ginibre matrix with the phases of R's diagonal moved into Q
        let qr = self.ginibre(n, n).qr();
        let (mut q, r) = (qr.q(), qr.r());
        for k in 0..n {
            let d = r[(k, k)];
            let phase = if d.norm() > 0.0 { d / d.norm() } else { c64(1.0, 0.0) };
            q.column_mut(k).iter_mut().for_each(|z| *z *= phase);
        }
        q
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Purity {
    Pure,
    Mixed,
}

/// Seeded random state: Gaussian amplitude vector or square Ginibre mixture.
pub fn random_state(dims: &[usize], purity: Purity, seed: u64) -> DensityOperator {
    let mut s = Sampler::new(seed);
    match purity {
        Purity::Pure => s.pure_state(dims).density(),
        Purity::Mixed => s.mixed_state(dims, dims.iter().product()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(0., 0.)])
    }

    fn pauli_z() -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_vec(vec![c64(1., 0.), c64(-1., 0.)]))
    }

    fn bell() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(CVector::from_vec(vec![c64(h, 0.), c64(0., 0.), c64(0., 0.), c64(h, 0.)]), vec![2, 2]).unwrap()
    }

    #[test]
    fn kron_identity_and_diagonal() {
        assert_eq!(kron(&identity(2), &identity(2)), identity(4));
        let zi = kron(&pauli_z(), &identity(2));
        let expect = [1.0, 1.0, -1.0, -1.0];
        for i in 0..4 {
            for j in 0..4 {
                let e = if i == j { expect[i] } else { 0.0 };
                assert_eq!(zi[(i, j)], c64(e, 0.0));
            }
        }
    }

    #[test]
    fn kron_index_formula() {
        let mut s = Sampler::new(3);
        let a = s.ginibre(2, 2);
        let b = s.ginibre(2, 2);
        let k = kron(&a, &b);
        for i in 0..2 {
            for j in 0..2 {
                for p in 0..2 {
                    for q in 0..2 {
                        assert_eq!(k[(i * 2 + p, j * 2 + q)], a[(i, j)] * b[(p, q)]);
                    }
                }
            }
        }
    }

    #[test]
    fn partial_trace_product_and_bell() {
        let mut s = Sampler::new(11);
        let ra = s.mixed_state(&[2], 2);
        let rb = s.mixed_state(&[3], 3);
        let joint = ra.tensor(&rb);
        let back = joint.partial_trace(&[0]).unwrap();
        assert!(max_abs_diff(back.matrix(), ra.matrix()) < 1e-12);
        let back_b = joint.partial_trace(&[1]).unwrap();
        assert!(max_abs_diff(back_b.matrix(), rb.matrix()) < 1e-12);

        let red = bell().density().partial_trace(&[0]).unwrap();
        assert!(max_abs_diff(red.matrix(), &identity(2).scale(0.5)) < 1e-15);
    }

    #[test]
    fn partial_trace_index_sum_oracle() {
        let rho = random_state(&[2, 2], Purity::Mixed, 5);
        let red = rho.partial_trace(&[0]).unwrap();
        let m = rho.matrix();
        for i in 0..2 {
            for k in 0..2 {
                let expect: Complex64 = (0..2).map(|j| m[(i * 2 + j, k * 2 + j)]).sum();
                assert!((red.matrix()[(i, k)] - expect).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn partial_trace_rejects_bad_index() {
        let rho = DensityOperator::maximally_mixed(vec![2, 2]);
        assert!(matches!(rho.partial_trace(&[2]), Err(SsrError::InvalidSubsystem(_))));
        assert!(matches!(rho.partial_trace(&[]), Err(SsrError::InvalidSubsystem(_))));
    }

    #[test]
    fn eig_spectra() {
        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![c64(3., 0.), c64(1., 0.), c64(2., 0.)]));
        let s = eig_hermitian(&d).unwrap();
        for (v, e) in s.values.iter().zip([1.0, 2.0, 3.0]) {
            assert!((v - e).abs() < 1e-14);
        }
        let s = eig_hermitian(&pauli_x()).unwrap();
        assert!((s.values[0] + 1.0).abs() < 1e-14 && (s.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_reconstruction_residual() {
        let mut s = Sampler::new(9);
        for n in [1, 3, 8, 16] {
            let h = s.hermitian(n);
            let spec = eig_hermitian(&h).unwrap();
            assert!(max_abs_diff(&spec.reconstruct(), &h) <= 1e-9 * max_abs(&h));
            let vtv = spec.vectors.adjoint() * &spec.vectors;
            assert!(max_abs_diff(&vtv, &identity(n)) < 1e-12);
            assert!(spec.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let mut m = identity(2);
        m[(0, 1)] = c64(1.0, 0.0);
        assert!(matches!(eig_hermitian(&m), Err(SsrError::NotHermitian { .. })));
    }

    #[test]
    fn entropy_values() {
        let pure = PureState::basis(0, vec![2]).unwrap().density();
        assert!(pure.entropy().unwrap().abs() < 1e-14);
        let mixed = DensityOperator::maximally_mixed(vec![2]);
        assert!((mixed.entropy().unwrap() - 1.0).abs() < 1e-14);
        let bad = [0.5, 0.6, -1e-6];
        assert!(matches!(entropy_of_spectrum(&bad), Err(SsrError::NegativeEigenvalue { .. })));
        assert_eq!(entropy_of_spectrum(&[1.0, -1e-11]).unwrap(), 0.0);
    }

    #[test]
    fn schmidt_product_bell_and_svd_oracle() {
        let p = PureState::basis(5, vec![3, 3]).unwrap();
        let sf = schmidt_decompose(&p, &[0]).unwrap();
        assert_eq!(sf.coefficients.len(), 1);
        assert!((sf.coefficients[0] - 1.0).abs() < 1e-14);

        let sf = schmidt_decompose(&bell(), &[0]).unwrap();
        for c in &sf.coefficients {
            assert!((c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
        }
        assert!((sf.entropy() - 1.0).abs() < 1e-14);

        let psi = Sampler::new(21).pure_state(&[3, 3]);
        let sf = schmidt_decompose(&psi, &[0]).unwrap();
        let amps = psi.amplitudes();
        let m = CMatrix::from_fn(3, 3, |i, j| amps[i * 3 + j]);
        let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in sf.coefficients.iter().zip(sv) {
            assert!((a - b).abs() < 1e-12);
        }
        let back = sf.reconstruct();
        assert!((back - amps).norm() < 1e-9);
    }

    #[test]
    fn schmidt_rejects_full_cut() {
        assert!(schmidt_decompose(&bell(), &[0, 1]).is_err());
        assert!(schmidt_decompose(&bell(), &[]).is_err());
    }

    #[test]
    fn validation_reports() {
        let half = identity(2).scale(0.5);
        assert!(validate_density(&half, &[2]).passed());
        let mut bent = half.clone();
        bent[(0, 1)] = c64(1e-6, 0.0);
        let r = validate_density(&bent, &[2]);
        assert!(r.failed("hermitian"));
        let neg = CMatrix::from_diagonal(&CVector::from_vec(vec![c64(1.5, 0.), c64(-0.5, 0.)]));
        let r = validate_density(&neg, &[2]);
        assert!(r.failed("positive_semidefinite"));
        assert!(!r.failed("unit_trace"));
    }

    #[test]
    fn random_state_is_seed_deterministic() {
        let a = random_state(&[2, 3], Purity::Mixed, 77);
        let b = random_state(&[2, 3], Purity::Mixed, 77);
        assert_eq!(a.matrix(), b.matrix());
        assert!(validate_density(a.matrix(), a.dims()).passed());
        let p = random_state(&[4], Purity::Pure, 1);
        assert!(p.entropy().unwrap() <= 1e-10);
    }

    #[test]
    fn subsystem_permutation_swaps_factors() {
        let mut s = Sampler::new(4);
        let a = s.mixed_state(&[2], 2);
        let b = s.mixed_state(&[3], 3);
        let ab = a.tensor(&b);
        let ba = permute_subsystems(&ab, &[1, 0]).unwrap();
        assert_eq!(ba.dims(), &[3, 2]);
        assert!(max_abs_diff(ba.matrix(), b.tensor(&a).matrix()) < 1e-15);
    }
}
