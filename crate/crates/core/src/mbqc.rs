//! Measurement patterns on the four-qubit linear cluster.
//!
//! The logical ancilla enters on qubit 0 as the cluster's own `|+>`, the
//! system probe is attached to qubit 3. Measuring qubit 0 in `B(2γ₁)` and
//! qubit 1 in `B((−1)^{s₀} π/2)` walks the ancilla to qubit 2, where the CZ
//! edge to qubit 3 supplies the controlled gate. Qubit 2 is then measured in
//! the rotated basis `σz^{s₀} σx^{s₁} H Ry(2γ₂)† |m>` and qubit 3 carries the
//! system, up to the byproduct `σz^{s₁} σx^{s₂}`.
//!
//! Outcome tuples are indexed by step, so `outcomes[k]` is the result of the
//! k-th measurement. With the standard pattern step k measures qubit k.

use std::f64::consts::FRAC_PI_2;

use crate::channels::{ChannelMode, DampingParams};
use crate::error::{Error, Result};
use crate::gates::{hadamard, linear_cluster, pauli_x, pauli_z, ry, EquatorialBasis};
use crate::linalg::{
    cz_between, inner, norm, project, ComplexMatrix, DensityState, C64, DEFAULT_TOL, ONE, ZERO,
};
use crate::noise::NoiseSpec;
use crate::tomography::{process_tomography, ProbeSet, ProcessMatrix};

/// Number of qubits in the resource state.
pub const CLUSTER_QUBITS: usize = 4;

/// How a qubit is measured, possibly depending on earlier outcomes.
#[derive(Clone, Debug, PartialEq)]
pub enum MeasurementBasis {
    Computational,
    /// `B(θ)` with `θ = (−1)^{Σ s_k} · angle`, summing over `flip_on` steps.
    Equatorial {
        angle: f64,
        flip_on: Vec<usize>,
    },
    /// Fixed orthonormal pair, each vector premultiplied by
    /// `σz^{Σ s_z} σx^{Σ s_x}` over the listed steps.
    General {
        vectors: [[C64; 2]; 2],
        z_on: Vec<usize>,
        x_on: Vec<usize>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementStep {
    pub qubit: usize,
    pub basis: MeasurementBasis,
}

fn parity(outcomes: &[u8], steps: &[usize]) -> u8 {
    steps.iter().fold(0, |acc, &k| acc ^ (outcomes[k] & 1))
}

impl MeasurementStep {
    /// Steps whose outcomes this step's basis depends on.
    pub fn dependencies(&self) -> Vec<usize> {
        match &self.basis {
            MeasurementBasis::Computational => Vec::new(),
            MeasurementBasis::Equatorial { flip_on, .. } => flip_on.clone(),
            MeasurementBasis::General { z_on, x_on, .. } => {
                z_on.iter().chain(x_on).copied().collect()
            }
        }
    }

    /// Projection vector for `outcome`, resolved against earlier outcomes.
    pub fn direction(&self, earlier: &[u8], outcome: u8) -> [C64; 2] {
        match &self.basis {
            MeasurementBasis::Computational => {
                if outcome == 0 {
                    [ONE, ZERO]
                } else {
                    [ZERO, ONE]
                }
            }
            MeasurementBasis::Equatorial { angle, flip_on } => {
                let sign = if parity(earlier, flip_on) == 1 {
                    -1.0
                } else {
                    1.0
                };
                EquatorialBasis::new(sign * angle).vector(outcome)
            }
            MeasurementBasis::General {
                vectors,
                z_on,
                x_on,
            } => {
                let mut v = vectors[outcome as usize];
                if parity(earlier, x_on) == 1 {
                    v = [v[1], v[0]];
                }
                if parity(earlier, z_on) == 1 {
                    v[1] = -v[1];
                }
                v
            }
        }
    }
}

/// Pauli byproduct `σz^{Σ s_z} σx^{Σ s_x}` applied to the output qubit.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CorrectionRule {
    pub z_on: Vec<usize>,
    pub x_on: Vec<usize>,
}

impl CorrectionRule {
    pub fn none() -> Self {
        Self::default()
    }

    /// `(z, x)` exponents for a full outcome tuple.
    pub fn exponents(&self, outcomes: &[u8]) -> (bool, bool) {
        (
            parity(outcomes, &self.z_on) == 1,
            parity(outcomes, &self.x_on) == 1,
        )
    }

    pub fn operator(&self, outcomes: &[u8]) -> ComplexMatrix {
        let (z, x) = self.exponents(outcomes);
        let mut op = ComplexMatrix::identity(2);
        if x {
            op = &pauli_x() * &op;
        }
        if z {
            op = &pauli_z() * &op;
        }
        op
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementPattern {
    pub steps: Vec<MeasurementStep>,
    pub output_qubit: usize,
    pub correction: CorrectionRule,
}

impl MeasurementPattern {
    /// Checks the structural invariants on an `num_qubits` register: every
    /// qubit but the output measured exactly once, adaptivity only on earlier
    /// steps, and orthonormal general bases.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        if self.output_qubit >= num_qubits {
            return Err(Error::QubitOutOfRange {
                index: self.output_qubit,
                num_qubits,
            });
        }
        let mut seen = vec![false; num_qubits];
        for (k, step) in self.steps.iter().enumerate() {
            if step.qubit >= num_qubits {
                return Err(Error::QubitOutOfRange {
                    index: step.qubit,
                    num_qubits,
                });
            }
            if step.qubit == self.output_qubit {
                return Err(Error::invalid("pattern measures its output qubit"));
            }
            if std::mem::replace(&mut seen[step.qubit], true) {
                return Err(Error::invalid(format!(
                    "qubit {} measured twice",
                    step.qubit
                )));
            }
            if step.dependencies().iter().any(|&d| d >= k) {
                return Err(Error::invalid(format!(
                    "step {k} depends on an outcome that is not yet known"
                )));
            }
            if let MeasurementBasis::General { vectors, .. } = &step.basis {
                let ok = vectors.iter().all(|v| (norm(v) - 1.0).abs() <= DEFAULT_TOL)
                    && inner(&vectors[0], &vectors[1]).norm() <= DEFAULT_TOL;
                if !ok {
                    return Err(Error::invalid(format!("step {k} basis is not orthonormal")));
                }
            }
        }
        let unmeasured = (0..num_qubits).filter(|&q| !seen[q]).count();
        if unmeasured != 1 {
            return Err(Error::invalid("every non-output qubit must be measured"));
        }
        let n = self.steps.len();
        if self
            .correction
            .z_on
            .iter()
            .chain(&self.correction.x_on)
            .any(|&k| k >= n)
        {
            return Err(Error::invalid("correction refers to an unknown step"));
        }
        Ok(())
    }

    /// Same measurements with the output byproduct dropped.
    pub fn without_corrections(&self) -> Self {
        Self {
            correction: CorrectionRule::none(),
            ..self.clone()
        }
    }

    pub fn num_outcome_tuples(&self) -> usize {
        1 << self.steps.len()
    }

    /// Outcome tuple for index `i`, first step in the most significant bit.
    pub fn outcome_tuple(&self, i: usize) -> Vec<u8> {
        let n = self.steps.len();
        (0..n).map(|k| ((i >> (n - 1 - k)) & 1) as u8).collect()
    }
}

/// The three-measurement pattern realising `(α, β)` in the given mode.
pub fn build_pattern(p: DampingParams, mode: ChannelMode) -> MeasurementPattern {
    let rot = &hadamard() * &ry(2.0 * p.gamma2()).adjoint();
    let column = |m: usize| [rot[(0, m)], rot[(1, m)]];
    let steps = vec![
        MeasurementStep {
            qubit: 0,
            basis: MeasurementBasis::Equatorial {
                angle: 2.0 * p.gamma1(),
                flip_on: vec![],
            },
        },
        MeasurementStep {
            qubit: 1,
            basis: MeasurementBasis::Equatorial {
                angle: FRAC_PI_2,
                flip_on: vec![0],
            },
        },
        MeasurementStep {
            qubit: 2,
            basis: MeasurementBasis::General {
                vectors: [column(0), column(1)],
                z_on: vec![0],
                x_on: vec![1],
            },
        },
    ];
    let correction = CorrectionRule {
        z_on: vec![1],
        x_on: if mode.applies_bit_flip() {
            vec![2]
        } else {
            vec![]
        },
    };
    MeasurementPattern {
        steps,
        output_qubit: 3,
        correction,
    }
}

/// One outcome assignment with its probability and the corrected,
/// unnormalised output state (trace equals the probability).
#[derive(Clone, Debug)]
pub struct Branch {
    pub outcomes: Vec<u8>,
    pub probability: f64,
    pub output: DensityState,
}

/// Runs `pattern` on `resource` for a fixed outcome tuple.
pub fn run_branch(
    resource: &DensityState,
    pattern: &MeasurementPattern,
    outcomes: &[u8],
) -> Result<Branch> {
    if outcomes.len() != pattern.steps.len() {
        return Err(Error::invalid(format!(
            "{} outcomes supplied for a {}-step pattern",
            outcomes.len(),
            pattern.steps.len()
        )));
    }
    pattern.validate(resource.num_qubits())?;

    // Labels of the qubits still in the register, in register order.
    let mut live: Vec<usize> = (0..resource.num_qubits()).collect();
    let mut state = resource.clone();
    for (k, step) in pattern.steps.iter().enumerate() {
        let pos = live
            .iter()
            .position(|&q| q == step.qubit)
            .expect("validated pattern measures each qubit once");
        let direction = step.direction(&outcomes[..k], outcomes[k]);
        state = project(&state, pos, direction)?.1;
        live.remove(pos);
    }

    let fix = pattern.correction.operator(outcomes);
    let output = state.evolve(&fix)?;
    Ok(Branch {
        outcomes: outcomes.to_vec(),
        probability: output.trace(),
        output,
    })
}

/// Four-qubit resource with `probe` as the logical system input: a
/// three-qubit linear cluster on qubits 0..=2, the probe on qubit 3, and a
/// CZ joining qubits 2 and 3.
pub fn inject_probe(probe: &DensityState) -> Result<DensityState> {
    if probe.num_qubits() != 1 {
        return Err(Error::invalid("probe must be a single-qubit state"));
    }
    linear_cluster(3)?
        .tensor(probe)
        .evolve(&cz_between(2, 3, CLUSTER_QUBITS))
}

/// Pattern execution on a (possibly noisy) cluster.
#[derive(Clone, Debug)]
pub struct MbqcEngine {
    pattern: MeasurementPattern,
    noise: NoiseSpec,
}

impl MbqcEngine {
    pub fn new(p: DampingParams, mode: ChannelMode) -> Self {
        Self::from_pattern(build_pattern(p, mode))
    }

    pub fn from_pattern(pattern: MeasurementPattern) -> Self {
        Self {
            pattern,
            noise: NoiseSpec::ideal(),
        }
    }

    pub fn with_noise(mut self, noise: NoiseSpec) -> Self {
        self.noise = noise;
        self
    }

    pub fn without_corrections(mut self) -> Self {
        self.pattern = self.pattern.without_corrections();
        self
    }

    pub fn pattern(&self) -> &MeasurementPattern {
        &self.pattern
    }

    pub fn noise(&self) -> &NoiseSpec {
        &self.noise
    }

    /// Resource state for one probe, noise included.
    pub fn resource(&self, probe: &DensityState) -> Result<DensityState> {
        self.noise.apply(&inject_probe(probe)?)
    }

    /// All outcome branches for one probe, in outcome-tuple order.
    pub fn branches(&self, probe: &DensityState) -> Result<Vec<Branch>> {
        let resource = self.resource(probe)?;
        (0..self.pattern.num_outcome_tuples())
            .map(|i| run_branch(&resource, &self.pattern, &self.pattern.outcome_tuple(i)))
            .collect()
    }

    /// Channel output for one probe: the sum over all branches, or, with a
    /// postselection on the first two outcomes, the renormalised sum over the
    /// matching branches.
    pub fn output(
        &self,
        probe: &DensityState,
        postselect: Option<(u8, u8)>,
    ) -> Result<DensityState> {
        combine_branches(&self.branches(probe)?, postselect)
    }
}

/// Sums branch outputs, optionally keeping only branches whose first two
/// outcomes equal `postselect` and renormalising by their weight.
pub fn combine_branches(branches: &[Branch], postselect: Option<(u8, u8)>) -> Result<DensityState> {
    let keep = |b: &&Branch| match postselect {
        None => true,
        Some((a, c)) => b.outcomes[0] == a && b.outcomes[1] == c,
    };
    let kept: Vec<&Branch> = branches.iter().filter(keep).collect();
    let first = kept.first().ok_or(Error::ZeroProbability)?;
    let mut sum = first.output.clone();
    for b in &kept[1..] {
        sum = sum.add(&b.output)?;
    }
    let weight = sum.trace();
    if weight <= 1e-15 {
        return Err(Error::ZeroProbability);
    }
    Ok(sum.scale(1.0 / weight))
}

/// A channel extracted from the pattern by process tomography.
#[derive(Clone, Debug)]
pub struct ChannelRealisation {
    pub mode: ChannelMode,
    pub params: DampingParams,
    pub postselect: Option<(u8, u8)>,
    /// Branches for each probe, in probe order.
    pub branches: Vec<Vec<Branch>>,
    pub outputs: Vec<DensityState>,
    pub chi: ProcessMatrix,
}

impl ChannelRealisation {
    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        (self.chi.trace() - 1.0).abs() <= tol
    }

    pub fn is_completely_positive(&self, tol: f64) -> bool {
        self.chi.choi_min_eigenvalue() >= -tol
    }
}

pub fn realise_channel(
    p: DampingParams,
    mode: ChannelMode,
    probes: &ProbeSet,
    postselect: Option<(u8, u8)>,
) -> Result<ChannelRealisation> {
    realise_with(&MbqcEngine::new(p, mode), mode, p, probes, postselect)
}

pub fn realise_with(
    engine: &MbqcEngine,
    mode: ChannelMode,
    params: DampingParams,
    probes: &ProbeSet,
    postselect: Option<(u8, u8)>,
) -> Result<ChannelRealisation> {
    let branches = probes
        .states()
        .iter()
        .map(|probe| engine.branches(probe))
        .collect::<Result<Vec<_>>>()?;
    let outputs = branches
        .iter()
        .map(|b| combine_branches(b, postselect))
        .collect::<Result<Vec<_>>>()?;
    let chi = process_tomography(probes, &outputs)?;
    Ok(ChannelRealisation {
        mode,
        params,
        postselect,
        branches,
        outputs,
        chi,
    })
}
