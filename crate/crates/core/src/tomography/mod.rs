//! State and process tomography, process fidelity, and the stabilizer
//! fidelity estimator for the cluster resource.
//!
//! Process matrices use the operator basis `(𝟙, X, Y, Z)` in that order:
//! `E(ρ) = Σ χ_mn E_m ρ E_n†`.

mod pauli;
mod sampling;
mod witness;

use std::collections::BTreeMap;

pub use pauli::{PauliObservable, PauliWord};
pub use sampling::{
    bootstrap, multinomial, outcome_probabilities, parity_expectation, sample_counts, seeded_rng,
    BootstrapSummary,
};
pub use witness::{
    cluster_fidelity_terms, estimate_fidelity, fidelity_and_witness, WitnessResult, GME_THRESHOLD,
};

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::gates::{ket0, ket1, ket_plus, ket_plus_y, Pauli};
use crate::linalg::{
    hermitian_eigen, rank, solve_full_rank, spectral_map, ComplexMatrix, DensityState, C64, ZERO,
};

/// Expectation values beyond `1 + this` are rejected as corrupt data.
pub const EXPECTATION_SLACK: f64 = 1e-6;

/// Negative eigenvalues down to this are treated as noise in fidelity
/// inputs.
pub const CHI_PSD_TOL: f64 = 1e-8;

/// 4×4 Hermitian process matrix over `(𝟙, X, Y, Z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProcessMatrix {
    chi: ComplexMatrix,
}

impl ProcessMatrix {
    pub fn new(chi: ComplexMatrix) -> Result<Self> {
        if chi.rows() != 4 || chi.cols() != 4 {
            return Err(Error::DimensionMismatch {
                expected: "4x4 process matrix".into(),
                actual: format!("{}x{}", chi.rows(), chi.cols()),
            });
        }
        if !chi.is_hermitian(1e-9) {
            return Err(Error::invalid("process matrix is not Hermitian"));
        }
        Ok(Self { chi })
    }

    pub fn from_parts(re: &[[f64; 4]; 4], im: &[[f64; 4]; 4]) -> Result<Self> {
        let mut chi = ComplexMatrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                chi[(i, j)] = C64::new(re[i][j], im[i][j]);
            }
        }
        Self::new(chi)
    }

    /// Process matrix of the identity channel: a single unit at `(𝟙, 𝟙)`.
    pub fn identity() -> Self {
        let mut chi = ComplexMatrix::zeros(4, 4);
        chi[(0, 0)] = C64::new(1.0, 0.0);
        Self { chi }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.chi
    }

    pub fn trace(&self) -> f64 {
        self.chi.trace().re
    }

    pub fn real_part(&self) -> [[f64; 4]; 4] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.chi[(i, j)].re))
    }

    pub fn imag_part(&self) -> [[f64; 4]; 4] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.chi[(i, j)].im))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.chi.max_abs_diff(&other.chi)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigen(&self.chi).0[0]
    }

    /// `Σ χ_mn E_m A E_n†` for an arbitrary 2×2 operator `A`.
    pub fn apply_operator(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let basis: Vec<ComplexMatrix> = Pauli::ALL.iter().map(|p| p.matrix()).collect();
        let mut out = ComplexMatrix::zeros(2, 2);
        for (m, em) in basis.iter().enumerate() {
            let left = em * a;
            for (n, en) in basis.iter().enumerate() {
                let w = self.chi[(m, n)];
                if w != ZERO {
                    out = &out + &(&left * &en.adjoint()).scale(w);
                }
            }
        }
        out
    }

    pub fn apply(&self, rho: &DensityState) -> Result<DensityState> {
        if rho.num_qubits() != 1 {
            return Err(Error::invalid("process matrix acts on a single qubit"));
        }
        Ok(DensityState::from_matrix_unchecked(
            self.apply_operator(rho.matrix()).hermitian_part(),
        ))
    }

    /// Choi matrix `Σ_ij |i><j| ⊗ E(|i><j|)`.
    pub fn choi(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                let mut unit = ComplexMatrix::zeros(2, 2);
                unit[(i, j)] = C64::new(1.0, 0.0);
                let block = self.apply_operator(&unit);
                for a in 0..2 {
                    for b in 0..2 {
                        out[(2 * i + a, 2 * j + b)] = block[(a, b)];
                    }
                }
            }
        }
        out
    }

    pub fn choi_min_eigenvalue(&self) -> f64 {
        hermitian_eigen(&self.choi()).0[0]
    }

    pub fn is_completely_positive(&self, tol: f64) -> bool {
        self.choi_min_eigenvalue() >= -tol
    }

    /// Nearest PSD unit-trace matrix by eigenvalue clipping.
    pub fn to_physical(&self) -> Self {
        let (values, vecs) = hermitian_eigen(&self.chi);
        let clipped = spectral_map(&values, &vecs, |l| l.max(0.0));
        let tr = clipped.trace().re;
        Self {
            chi: clipped.scale_real(1.0 / tr).hermitian_part(),
        }
    }
}

/// Informationally complete single-qubit input states.
#[derive(Clone, Debug)]
pub struct ProbeSet {
    states: Vec<DensityState>,
    labels: Vec<String>,
}

impl ProbeSet {
    /// `|0>`, `|1>`, `|+>` and `|+i> = (|0> + i|1>)/√2`.
    pub fn standard() -> Self {
        let states = [ket0(), ket1(), ket_plus(), ket_plus_y()]
            .iter()
            .map(|k| DensityState::pure(k).expect("unit kets"))
            .collect();
        Self {
            states,
            labels: ["0", "1", "+", "+i"].map(String::from).to_vec(),
        }
    }

    pub fn new(states: Vec<DensityState>) -> Result<Self> {
        if states.iter().any(|s| s.num_qubits() != 1) {
            return Err(Error::invalid("probe states must be single-qubit"));
        }
        let labels = (0..states.len()).map(|i| format!("p{i}")).collect();
        Ok(Self { states, labels })
    }

    pub fn states(&self) -> &[DensityState] {
        &self.states
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Rank of the probes' Pauli coordinates, `[Tr ρ, Tr Xρ, Tr Yρ, Tr Zρ]`.
    pub fn rank(&self) -> usize {
        if self.states.is_empty() {
            return 0;
        }
        let mut m = ComplexMatrix::zeros(self.states.len(), 4);
        for (k, s) in self.states.iter().enumerate() {
            for (i, p) in Pauli::ALL.iter().enumerate() {
                m[(k, i)] = C64::new(s.expectation(&p.matrix()), 0.0);
            }
        }
        rank(&m, 1e-9)
    }

    pub fn is_informationally_complete(&self) -> bool {
        self.rank() == 4
    }
}

/// Linear-inversion state estimate `½(𝟙 + Σ <σ>σ)` projected onto the
/// physical states by eigenvalue clipping. Needs X, Y and Z expectations.
pub fn state_tomography(expectations: &BTreeMap<Pauli, f64>) -> Result<DensityState> {
    let get = |p: Pauli| {
        expectations
            .get(&p)
            .copied()
            .ok_or_else(|| Error::invalid(format!("missing <{}> expectation", p.symbol())))
    };
    state_from_bloch_estimate([get(Pauli::X)?, get(Pauli::Y)?, get(Pauli::Z)?])
}

pub fn state_from_bloch_estimate(v: [f64; 3]) -> Result<DensityState> {
    if let Some(bad) = v
        .iter()
        .find(|e| !e.is_finite() || e.abs() > 1.0 + EXPECTATION_SLACK)
    {
        return Err(Error::invalid(format!(
            "expectation value {bad} outside [-1, 1]"
        )));
    }
    let raw = DensityState::from_bloch(v[0], v[1], v[2]);
    Ok(project_to_physical(raw.matrix()))
}

/// Clips negative eigenvalues to zero and renormalises the trace.
pub fn project_to_physical(m: &ComplexMatrix) -> DensityState {
    let (values, vecs) = hermitian_eigen(m);
    let clipped = spectral_map(&values, &vecs, |l| l.max(0.0));
    let tr = clipped.trace().re;
    DensityState::from_matrix_unchecked(clipped.scale_real(1.0 / tr).hermitian_part())
}

/// Coefficient matrix of `E(ρ_k) = Σ χ_mn E_m ρ_k E_n†` with unknowns
/// ordered `m * 4 + n` and equations ordered by probe then entry.
fn tomography_system(probes: &ProbeSet) -> ComplexMatrix {
    let basis: Vec<ComplexMatrix> = Pauli::ALL.iter().map(|p| p.matrix()).collect();
    let mut a = ComplexMatrix::zeros(4 * probes.len(), 16);
    for (k, rho) in probes.states().iter().enumerate() {
        for (m, em) in basis.iter().enumerate() {
            let left = em * rho.matrix();
            for (n, en) in basis.iter().enumerate() {
                let term = &left * &en.adjoint();
                for e in 0..4 {
                    a[(4 * k + e, 4 * m + n)] = term[(e / 2, e % 2)];
                }
            }
        }
    }
    a
}

/// Linear process tomography: solves for χ from one output per probe and
/// Hermitises the result.
pub fn process_tomography(probes: &ProbeSet, outputs: &[DensityState]) -> Result<ProcessMatrix> {
    if outputs.len() != probes.len() {
        return Err(Error::invalid(format!(
            "{} outputs for {} probes",
            outputs.len(),
            probes.len()
        )));
    }
    if outputs.iter().any(|o| o.num_qubits() != 1) {
        return Err(Error::invalid(
            "process tomography outputs must be single-qubit",
        ));
    }
    let rank = probes.rank();
    if rank < 4 {
        return Err(Error::RankDeficient { rank, needed: 4 });
    }
    let a = tomography_system(probes);
    let b: Vec<C64> = outputs
        .iter()
        .flat_map(|o| o.matrix().entries().to_vec())
        .collect();
    let x = solve_full_rank(&a, &b, 1e-9)?;
    let chi = ComplexMatrix::from_vec(4, 4, x)?.hermitian_part();
    ProcessMatrix::new(chi)
}

/// Largest entrywise mismatch between the outputs χ predicts and the ones
/// observed.
pub fn reconstruction_residual(
    chi: &ProcessMatrix,
    probes: &ProbeSet,
    outputs: &[DensityState],
) -> f64 {
    probes
        .states()
        .iter()
        .zip(outputs)
        .map(|(p, o)| chi.apply_operator(p.matrix()).max_abs_diff(o.matrix()))
        .fold(0.0, f64::max)
}

/// Expands every Kraus operator in the Pauli basis, `K = Σ c_m E_m`, and sums
/// the outer products `c c†`.
pub fn kraus_to_chi(ch: &KrausChannel) -> ProcessMatrix {
    let basis: Vec<ComplexMatrix> = Pauli::ALL.iter().map(|p| p.matrix()).collect();
    let mut chi = ComplexMatrix::zeros(4, 4);
    for k in ch.ops() {
        let coeffs: Vec<C64> = basis.iter().map(|e| (e * k).trace() * 0.5).collect();
        chi = &chi + &ComplexMatrix::outer(&coeffs, &coeffs);
    }
    ProcessMatrix { chi }
}

/// `(Tr √(√χ χ_id √χ))² / (Tr χ · Tr χ_id)`.
/// Square root that treats eigenvalues at round-off level as zero, so
/// rank-deficient inputs do not pick up a `sqrt(eps)` tail.
fn clipped_sqrt(l: f64, spectrum: &[f64]) -> f64 {
    let scale = spectrum.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if l <= scale * 1e-13 {
        0.0
    } else {
        l.sqrt()
    }
}

pub fn process_fidelity(chi: &ProcessMatrix, chi_id: &ProcessMatrix) -> Result<f64> {
    let (values, vecs) = hermitian_eigen(chi.matrix());
    if values[0] < -CHI_PSD_TOL {
        return Err(Error::NotPositive(values[0]));
    }
    let ideal_min = chi_id.min_eigenvalue();
    if ideal_min < -CHI_PSD_TOL {
        return Err(Error::NotPositive(ideal_min));
    }
    let root = spectral_map(&values, &vecs, |l| clipped_sqrt(l, &values));
    let inner = &(&root * chi_id.matrix()) * &root;
    let inner_values = hermitian_eigen(&inner).0;
    let overlap: f64 = inner_values
        .iter()
        .map(|&l| clipped_sqrt(l, &inner_values))
        .sum();
    let norm = chi.trace() * chi_id.trace();
    if norm <= 0.0 {
        return Err(Error::invalid("process matrices must have positive trace"));
    }
    Ok(overlap * overlap / norm)
}
