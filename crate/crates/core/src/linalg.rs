//! Dense complex linear algebra for small multi-qubit Hilbert spaces.
//!
//! Qubit ordering is big-endian throughout the crate: qubit 0 is the most
//! significant bit of a basis index, so the ket `|q0 q1 ... q(n-1)>` has index
//! `q0 * 2^(n-1) + ... + q(n-1)`. Kets are written left to right in the same
//! order as the qubit labels.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default absolute tolerance for matrix comparisons.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Eigenvalues above this are treated as non-negative in PSD checks.
pub const PSD_TOL: f64 = 1e-9;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} entries", rows * cols),
                actual: format!("{} entries", data.len()),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows. Panics on ragged input, so it is
    /// meant for literal constants.
    pub fn from_rows<const N: usize>(rows: [[C64; N]; N]) -> Self {
        let data = rows.iter().flat_map(|row| row.iter().copied()).collect();
        Self {
            rows: N,
            cols: N,
            data,
        }
    }

    pub fn from_real<const N: usize>(rows: [[f64; N]; N]) -> Self {
        Self::from_rows(rows.map(|row| row.map(r)))
    }

    pub fn diag(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &v) in entries.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Outer product `|u><v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        let mut m = Self::zeros(u.len(), v.len());
        for (i, a) in u.iter().enumerate() {
            for (j, b) in v.iter().enumerate() {
                m[(i, j)] = a * b.conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, k: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * k).collect(),
        }
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(r(k))
    }

    /// Tensor product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut m = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        m[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        m
    }

    pub fn apply(&self, ket: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, ket.len(), "matrix/vector dimension mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * ket[j]).sum())
            .collect()
    }

    /// `self · m · self†`.
    pub fn conjugate(&self, m: &Self) -> Self {
        &(self * m) * &self.adjoint()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.approx_eq(&self.adjoint(), tol)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && (&self.adjoint() * self).approx_eq(&Self::identity(self.rows), tol)
    }

    /// `(m + m†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_real(0.5)
    }

    pub fn frobenius_inner(&self, other: &Self) -> C64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        let mut out = Self::zeros(m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                out[(i, j)] = m[(i, j)];
            }
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut m = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    m[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        m
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let v = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", v.re, v.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Tensor product of two matrices.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, f| acc.kron(f))
}

pub fn kron_ket(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalize(v: &[C64]) -> Vec<C64> {
    let n = norm(v);
    v.iter().map(|a| a / n).collect()
}

/// Eigendecomposition of a Hermitian matrix: ascending real eigenvalues and
/// the matching orthonormal eigenvectors as columns.
pub fn hermitian_eigen(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    assert!(m.is_square(), "eigendecomposition needs a square matrix");
    let eig = m.hermitian_part().to_nalgebra().symmetric_eigen();
    let mut order: Vec<usize> = (0..m.rows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = ComplexMatrix::from_nalgebra(&eig.eigenvectors);
    let mut sorted = ComplexMatrix::zeros(m.rows(), m.cols());
    for (new, &old) in order.iter().enumerate() {
        for i in 0..m.rows() {
            sorted[(i, new)] = vecs[(i, old)];
        }
    }
    (values, sorted)
}

pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    hermitian_eigen(m).0
}

/// Rebuilds `V f(Λ) V†` from an eigendecomposition.
pub fn spectral_map(values: &[f64], vecs: &ComplexMatrix, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let n = values.len();
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &lambda) in values.iter().enumerate() {
        let w = f(lambda);
        if w == 0.0 {
            continue;
        }
        for i in 0..n {
            let vik = vecs[(i, k)] * w;
            for j in 0..n {
                out[(i, j)] += vik * vecs[(j, k)].conj();
            }
        }
    }
    out
}

/// Positive semidefinite square root of a Hermitian PSD matrix.
pub fn matrix_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_hermitian(PSD_TOL) {
        return Err(Error::invalid("matrix square root needs a Hermitian input"));
    }
    let (values, vecs) = hermitian_eigen(m);
    if let Some(&min) = values.first() {
        if min < -PSD_TOL {
            return Err(Error::NotPositive(min));
        }
    }
    Ok(spectral_map(&values, &vecs, |l| l.max(0.0).sqrt()))
}

/// Least-squares solve of `a x = b` through the SVD, reporting the numerical
/// rank. Returns an error when `a` is rank deficient.
pub fn solve_full_rank(a: &ComplexMatrix, b: &[C64], rank_tol: f64) -> Result<Vec<C64>> {
    let svd = a.to_nalgebra().svd(true, true);
    let needed = a.cols();
    let rank = svd.rank(rank_tol);
    if rank < needed {
        return Err(Error::RankDeficient { rank, needed });
    }
    let rhs = nalgebra::DVector::from_column_slice(b);
    let x = svd
        .solve(&rhs, rank_tol)
        .map_err(|e| Error::invalid(e.to_string()))?;
    Ok(x.iter().copied().collect())
}

/// Numerical rank of a matrix through its singular values.
pub fn rank(a: &ComplexMatrix, tol: f64) -> usize {
    a.to_nalgebra().svd(false, false).rank(tol)
}

fn bit(index: usize, qubit: usize, num_qubits: usize) -> usize {
    (index >> (num_qubits - 1 - qubit)) & 1
}

/// Embeds a single-qubit operator acting on `qubit` into an `n`-qubit space.
pub fn embed_single(op: &ComplexMatrix, qubit: usize, num_qubits: usize) -> ComplexMatrix {
    assert_eq!((op.rows(), op.cols()), (2, 2));
    assert!(qubit < num_qubits);
    let id = ComplexMatrix::identity(2);
    kron_all((0..num_qubits).map(|q| if q == qubit { op } else { &id }))
}

/// Controlled-Z between two qubits of an `n`-qubit register.
pub fn cz_between(a: usize, b: usize, num_qubits: usize) -> ComplexMatrix {
    assert!(a < num_qubits && b < num_qubits && a != b);
    let dim = 1 << num_qubits;
    let diag: Vec<C64> = (0..dim)
        .map(|i| {
            if bit(i, a, num_qubits) & bit(i, b, num_qubits) == 1 {
                -ONE
            } else {
                ONE
            }
        })
        .collect();
    ComplexMatrix::diag(&diag)
}

/// A density matrix over `num_qubits` qubits.
///
/// Normalised states have unit trace. Measurement branches are carried in
/// unnormalised form with trace equal to the branch probability; see
/// [`DensityState::is_normalized`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityState {
    num_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityState {
    /// Validated, unit-trace density matrix.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let state = Self::unnormalized(matrix)?;
        let tr = state.trace();
        if (tr - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::invalid(format!(
                "density matrix trace is {tr}, expected 1"
            )));
        }
        let min = state.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(state)
    }

    /// Hermitian matrix of qubit dimension with no trace or positivity check.
    pub fn unnormalized(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || !matrix.rows().is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: "square 2^n x 2^n matrix".into(),
                actual: format!("{}x{}", matrix.rows(), matrix.cols()),
            });
        }
        if !matrix.is_hermitian(DEFAULT_TOL) {
            return Err(Error::invalid("density matrix is not Hermitian"));
        }
        Ok(Self {
            num_qubits: matrix.rows().trailing_zeros() as usize,
            matrix,
        })
    }

    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self {
            num_qubits: matrix.rows().trailing_zeros() as usize,
            matrix,
        }
    }

    /// `|ψ><ψ|` for a ket, normalising it first.
    pub fn pure(ket: &[C64]) -> Result<Self> {
        if !ket.len().is_power_of_two() || ket.len() < 2 {
            return Err(Error::invalid(format!(
                "ket length {} is not 2^n",
                ket.len()
            )));
        }
        let n = norm(ket);
        if n == 0.0 {
            return Err(Error::invalid("zero ket"));
        }
        let ket = normalize(ket);
        Ok(Self::from_matrix_unchecked(ComplexMatrix::outer(
            &ket, &ket,
        )))
    }

    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let dim = 1 << num_qubits;
        Self::from_matrix_unchecked(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut ket = vec![ZERO; 1 << num_qubits];
        ket[index] = ONE;
        Self::from_matrix_unchecked(ComplexMatrix::outer(&ket, &ket))
    }

    /// Single-qubit state `(𝟙 + r·σ)/2`. Vectors longer than one give an
    /// unphysical matrix; this constructor does not check.
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Self {
        Self::from_matrix_unchecked(ComplexMatrix::from_rows([
            [r(0.5 * (1.0 + z)), c(0.5 * x, -0.5 * y)],
            [c(0.5 * x, 0.5 * y), r(0.5 * (1.0 - z))],
        ]))
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn is_normalized(&self) -> bool {
        (self.trace() - 1.0).abs() <= DEFAULT_TOL
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.matrix)
            .first()
            .copied()
            .unwrap_or(0.0)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Divides out the trace. Zero-trace states are returned unchanged.
    pub fn normalized(&self) -> Self {
        let tr = self.trace();
        if tr == 0.0 {
            return self.clone();
        }
        Self::from_matrix_unchecked(self.matrix.scale_real(1.0 / tr))
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::from_matrix_unchecked(self.matrix.scale_real(k))
    }

    /// Sum of two states of equal dimension.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self::from_matrix_unchecked(&self.matrix + &other.matrix))
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self::from_matrix_unchecked(self.matrix.kron(&other.matrix))
    }

    /// `U ρ U†`.
    pub fn evolve(&self, unitary: &ComplexMatrix) -> Result<Self> {
        if unitary.rows() != self.dim() || unitary.cols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: format!("{0}x{0}", self.dim()),
                actual: format!("{}x{}", unitary.rows(), unitary.cols()),
            });
        }
        Ok(Self::from_matrix_unchecked(unitary.conjugate(&self.matrix)))
    }

    pub fn evolve_qubit(&self, op: &ComplexMatrix, qubit: usize) -> Result<Self> {
        self.check_qubit(qubit)?;
        self.evolve(&embed_single(op, qubit, self.num_qubits))
    }

    pub fn expectation(&self, observable: &ComplexMatrix) -> f64 {
        (observable * &self.matrix).trace().re
    }

    /// `<ψ|ρ|ψ>`.
    pub fn overlap_with_pure(&self, ket: &[C64]) -> f64 {
        inner(ket, &self.matrix.apply(ket)).re
    }

    /// Bloch vector of a single-qubit state, relative to its trace.
    pub fn bloch_vector(&self) -> [f64; 3] {
        assert_eq!(self.num_qubits, 1, "Bloch vector is defined for one qubit");
        let m = &self.matrix;
        let tr = self.trace();
        [
            2.0 * m[(1, 0)].re / tr,
            2.0 * m[(1, 0)].im / tr,
            (m[(0, 0)].re - m[(1, 1)].re) / tr,
        ]
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.matrix.approx_eq(&other.matrix, tol)
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} qubits", self.num_qubits),
                actual: format!("{} qubits", other.num_qubits),
            });
        }
        Ok(())
    }
}

/// Reduced state on the `keep` qubits (in ascending label order).
pub fn partial_trace(state: &DensityState, keep: &[usize]) -> Result<DensityState> {
    let n = state.num_qubits();
    if keep.is_empty() {
        return Err(Error::invalid("partial trace must keep at least one qubit"));
    }
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&bad) = keep.iter().find(|&&q| q >= n) {
        return Err(Error::QubitOutOfRange {
            index: bad,
            num_qubits: n,
        });
    }
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let k = keep.len();
    let gather = |index: usize, qubits: &[usize]| -> usize {
        qubits
            .iter()
            .fold(0, |acc, &q| (acc << 1) | bit(index, q, n))
    };

    let m = state.matrix();
    let mut out = ComplexMatrix::zeros(1 << k, 1 << k);
    for i in 0..state.dim() {
        let ti = gather(i, &traced);
        let ki = gather(i, &keep);
        for j in 0..state.dim() {
            if gather(j, &traced) == ti {
                out[(ki, gather(j, &keep))] += m[(i, j)];
            }
        }
    }
    Ok(DensityState::from_matrix_unchecked(out))
}

/// Projects `qubit` onto `direction` and removes it from the register.
///
/// Returns the outcome probability `Tr[(P ⊗ 𝟙)ρ]` and the unnormalised
/// post-measurement state of the remaining qubits, whose trace equals that
/// probability. Projecting the last qubit of a register leaves a 1x1 scalar.
pub fn project(
    state: &DensityState,
    qubit: usize,
    direction: [C64; 2],
) -> Result<(f64, DensityState)> {
    let n = state.num_qubits();
    state.check_qubit(qubit)?;
    let dnorm = norm(&direction);
    if (dnorm - 1.0).abs() > DEFAULT_TOL {
        return Err(Error::invalid(format!(
            "projection direction has norm {dnorm}, expected 1"
        )));
    }
    let rest = n - 1;
    let low_bits = n - 1 - qubit;
    let insert = |idx: usize, b: usize| -> usize {
        let high = idx >> low_bits;
        let low = idx & ((1 << low_bits) - 1);
        (((high << 1) | b) << low_bits) | low
    };
    let m = state.matrix();
    let mut out = ComplexMatrix::zeros(1 << rest, 1 << rest);
    for a in 0..(1 << rest) {
        for b in 0..(1 << rest) {
            let mut acc = ZERO;
            for x in 0..2 {
                for y in 0..2 {
                    acc += direction[x].conj() * m[(insert(a, x), insert(b, y))] * direction[y];
                }
            }
            out[(a, b)] = acc;
        }
    }
    let post = DensityState::from_matrix_unchecked(out);
    Ok((post.trace(), post))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn hadamard() -> ComplexMatrix {
        ComplexMatrix::from_real([
            [FRAC_1_SQRT_2, FRAC_1_SQRT_2],
            [FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
        ])
    }

    fn z() -> ComplexMatrix {
        ComplexMatrix::from_real([[1.0, 0.0], [0.0, -1.0]])
    }

    fn matrix2() -> impl Strategy<Value = ComplexMatrix> {
        proptest::collection::vec(-1.0f64..1.0, 8).prop_map(|v| {
            ComplexMatrix::from_vec(2, 2, v.chunks(2).map(|p| c(p[0], p[1])).collect()).unwrap()
        })
    }

    fn random_state(n: usize) -> impl Strategy<Value = DensityState> {
        let dim = 1usize << n;
        proptest::collection::vec(-1.0f64..1.0, 2 * dim * dim).prop_map(move |v| {
            let a = ComplexMatrix::from_vec(dim, dim, v.chunks(2).map(|p| c(p[0], p[1])).collect())
                .unwrap();
            let m = &a * &a.adjoint();
            let tr = m.trace().re;
            DensityState::from_matrix_unchecked(m.scale_real(1.0 / tr))
        })
    }

    #[test]
    fn kron_identity() {
        let id = ComplexMatrix::identity(2);
        assert_eq!(kron(&id, &id), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_zz_fixes_11() {
        let zz = kron(&z(), &z());
        let ket11 = [ZERO, ZERO, ZERO, ONE];
        assert_eq!(zz.apply(&ket11), ket11.to_vec());
    }

    #[test]
    fn kron_hh_on_00() {
        let hh = kron(&hadamard(), &hadamard());
        let out = hh.apply(&[ONE, ZERO, ZERO, ZERO]);
        for a in out {
            assert!((a - r(0.5)).norm() < 1e-15);
        }
    }

    #[test]
    fn partial_trace_product_state() {
        let s = DensityState::basis(2, 0);
        let red = partial_trace(&s, &[0]).unwrap();
        assert!(red.approx_eq(&DensityState::basis(1, 0), 1e-15));
    }

    #[test]
    fn partial_trace_bell_marginal() {
        let bell = DensityState::pure(&[ONE, ZERO, ZERO, ONE]).unwrap();
        for q in 0..2 {
            let red = partial_trace(&bell, &[q]).unwrap();
            assert!(red.approx_eq(&DensityState::maximally_mixed(1), 1e-15));
        }
    }

    #[test]
    fn partial_trace_rejects_bad_index() {
        let s = DensityState::basis(2, 0);
        assert!(matches!(
            partial_trace(&s, &[2]),
            Err(Error::QubitOutOfRange { index: 2, .. })
        ));
        assert!(partial_trace(&s, &[]).is_err());
    }

    #[test]
    fn partial_trace_respects_ordering() {
        // |01>: qubit 0 is |0>, qubit 1 is |1>.
        let s = DensityState::basis(2, 1);
        assert!(partial_trace(&s, &[0])
            .unwrap()
            .approx_eq(&DensityState::basis(1, 0), 0.0));
        assert!(partial_trace(&s, &[1])
            .unwrap()
            .approx_eq(&DensityState::basis(1, 1), 0.0));
    }

    #[test]
    fn project_plus_on_zero() {
        let plus = DensityState::pure(&[ONE, ONE]).unwrap();
        let (p, post) = project(&plus, 0, [ONE, ZERO]).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert_eq!(post.dim(), 1);
        assert!((post.matrix()[(0, 0)] - r(0.5)).norm() < 1e-15);
    }

    #[test]
    fn project_orthogonal_is_zero() {
        let s = DensityState::basis(2, 0);
        let (p, post) = project(&s, 0, [ZERO, ONE]).unwrap();
        assert_eq!(p, 0.0);
        assert!(post.matrix().approx_eq(&ComplexMatrix::zeros(2, 2), 0.0));
    }

    #[test]
    fn project_rejects_unnormalized_direction() {
        let s = DensityState::basis(1, 0);
        assert!(project(&s, 0, [ONE, ONE]).is_err());
    }

    #[test]
    fn sqrt_examples() {
        assert!(matrix_sqrt(&ComplexMatrix::identity(2))
            .unwrap()
            .approx_eq(&ComplexMatrix::identity(2), 1e-12));
        let d = ComplexMatrix::diag(&[r(4.0), r(9.0)]);
        assert!(matrix_sqrt(&d)
            .unwrap()
            .approx_eq(&ComplexMatrix::diag(&[r(2.0), r(3.0)]), 1e-12));
    }

    #[test]
    fn sqrt_of_diagonal_projector_weighted_chi() {
        // diag(1/2, 0, 0, 1/2): the square root takes entrywise roots.
        let chi = ComplexMatrix::diag(&[r(0.5), ZERO, ZERO, r(0.5)]);
        let root = matrix_sqrt(&chi).unwrap();
        let expected = ComplexMatrix::diag(&[r(FRAC_1_SQRT_2), ZERO, ZERO, r(FRAC_1_SQRT_2)]);
        assert!(root.approx_eq(&expected, 1e-12));
        assert!((&root * &root).approx_eq(&chi, 1e-12));
    }

    #[test]
    fn sqrt_rejects_negative() {
        let d = ComplexMatrix::diag(&[r(1.0), r(-0.1)]);
        assert!(matches!(matrix_sqrt(&d), Err(Error::NotPositive(_))));
    }

    #[test]
    fn density_state_validation() {
        assert!(DensityState::new(ComplexMatrix::identity(2)).is_err());
        assert!(DensityState::new(ComplexMatrix::diag(&[r(1.5), r(-0.5)])).is_err());
        assert!(DensityState::new(ComplexMatrix::identity(3).scale_real(1.0 / 3.0)).is_err());
        assert!(DensityState::new(ComplexMatrix::identity(2).scale_real(0.5)).is_ok());
    }

    proptest! {
        #[test]
        fn kron_is_associative(a in matrix2(), b in matrix2(), c in matrix2()) {
            let left = kron(&kron(&a, &b), &c);
            let right = kron(&a, &kron(&b, &c));
            prop_assert!(left.approx_eq(&right, 1e-12));
        }

        #[test]
        fn partial_trace_preserves_trace(state in random_state(3), mask in 1u8..8) {
            let keep: Vec<usize> = (0..3).filter(|q| mask >> q & 1 == 1).collect();
            let red = partial_trace(&state, &keep).unwrap();
            prop_assert!((red.trace() - state.trace()).abs() < 1e-12);
            let all = partial_trace(&state, &[0, 1, 2]).unwrap();
            prop_assert!(all.approx_eq(&state, 1e-15));
        }

        #[test]
        fn projection_branches_complete(state in random_state(3), qubit in 0usize..3,
                                        theta in 0.0f64..3.2, phi in 0.0f64..6.3) {
            let up = [r((theta / 2.0).cos()), C64::from_polar((theta / 2.0).sin(), phi)];
            let down = [-up[1].conj(), up[0].conj()];
            let (p0, s0) = project(&state, qubit, up).unwrap();
            let (p1, s1) = project(&state, qubit, down).unwrap();
            prop_assert!((p0 + p1 - 1.0).abs() < 1e-12);
            let keep: Vec<usize> = (0..3).filter(|&q| q != qubit).collect();
            let marginal = partial_trace(&state, &keep).unwrap();
            prop_assert!(s0.add(&s1).unwrap().approx_eq(&marginal, 1e-12));
        }

        #[test]
        fn sqrt_squares_back(state in random_state(2), k in 0.1f64..5.0) {
            let m = state.matrix().scale_real(k);
            let root = matrix_sqrt(&m).unwrap();
            prop_assert!((&root * &root).approx_eq(&m, 1e-8));
            prop_assert!(root.is_hermitian(1e-10));
        }
    }
}
