//! Two-operator single-qubit channels: closed-form Kraus maps, the ancilla
//! circuit that realises them, and the damping-angle algebra tying the two
//! together.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{cx, pauli_x, ry};
use crate::linalg::{kron, kron_ket, ComplexMatrix, DensityState, DEFAULT_TOL, ONE, ZERO};

const ANGLE_SLACK: f64 = 1e-12;

/// Channel angles `(α, β)`, both in `[0, π/2]`.
///
/// The ancilla rotations are `γ₁ = (β − α + π/2)/2` and
/// `γ₂ = (β + α − π/2)/2`. With `β = 0` the damping strength is
/// `Γ = sin²α`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DampingParams {
    pub alpha: f64,
    pub beta: f64,
}

impl DampingParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let range = -ANGLE_SLACK..=FRAC_PI_2 + ANGLE_SLACK;
        if !range.contains(&alpha) || !range.contains(&beta) {
            return Err(Error::invalid(format!(
                "angles (alpha={alpha}, beta={beta}) must lie in [0, pi/2]"
            )));
        }
        Ok(Self {
            alpha: alpha.clamp(0.0, FRAC_PI_2),
            beta: beta.clamp(0.0, FRAC_PI_2),
        })
    }

    /// `α = arccos √(1−Γ)`, `β = 0`.
    pub fn from_damping(gamma: f64) -> Result<Self> {
        check_unit_interval("damping", gamma)?;
        Self::new((1.0 - gamma).sqrt().acos(), 0.0)
    }

    /// Damping accumulated at rate `eta` over time `t`: `α = arccos e^{−ηt/2}`,
    /// so that `Γ = 1 − e^{−ηt}`.
    pub fn from_rate(eta: f64, t: f64) -> Result<Self> {
        if !(eta >= 0.0 && t >= 0.0) || !(eta * t).is_finite() {
            return Err(Error::invalid(
                "rate and time must be finite and non-negative",
            ));
        }
        Self::new((-eta * t / 2.0).exp().acos(), 0.0)
    }

    pub fn gamma1(&self) -> f64 {
        (self.beta - self.alpha + FRAC_PI_2) / 2.0
    }

    pub fn gamma2(&self) -> f64 {
        (self.beta + self.alpha - FRAC_PI_2) / 2.0
    }

    /// `Γ = sin²α`; meaningful for the `β = 0` damping channels.
    pub fn damping(&self) -> f64 {
        self.alpha.sin().powi(2)
    }
}

pub(crate) fn check_unit_interval(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::invalid(format!("{name} {v} outside [0, 1]")));
    }
    Ok(())
}

/// Which of the demonstrated channels a parameter set is meant to realise.
///
/// Amplitude and β damping apply the bit-flip correction after the ancilla
/// reads 1; phase damping leaves it out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelMode {
    Amplitude,
    Phase,
    Beta,
}

impl ChannelMode {
    pub const ALL: [ChannelMode; 3] = [
        ChannelMode::Amplitude,
        ChannelMode::Phase,
        ChannelMode::Beta,
    ];

    pub fn applies_bit_flip(self) -> bool {
        !matches!(self, ChannelMode::Phase)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ChannelMode::Amplitude => "amplitude",
            ChannelMode::Phase => "phase",
            ChannelMode::Beta => "beta",
        }
    }
}

impl fmt::Display for ChannelMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChannelMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "amplitude" => Ok(ChannelMode::Amplitude),
            "phase" => Ok(ChannelMode::Phase),
            "beta" => Ok(ChannelMode::Beta),
            other => Err(Error::invalid(format!("unknown channel mode '{other}'"))),
        }
    }
}

/// Ordered Kraus operators of a single-qubit channel.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    ops: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Validates that all operators share one square dimension and satisfy
    /// `Σ K†K = 𝟙` within 1e-10.
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = ops
            .first()
            .map(ComplexMatrix::rows)
            .ok_or_else(|| Error::invalid("a channel needs at least one Kraus operator"))?;
        if ops.iter().any(|k| k.rows() != dim || k.cols() != dim) {
            return Err(Error::invalid(
                "Kraus operators must share one square dimension",
            ));
        }
        let ch = Self { ops };
        let err = ch.completeness_error();
        if err > DEFAULT_TOL {
            return Err(Error::invalid(format!(
                "Kraus operators violate completeness by {err:e}"
            )));
        }
        Ok(ch)
    }

    pub fn identity() -> Self {
        Self {
            ops: vec![ComplexMatrix::identity(2)],
        }
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn dim(&self) -> usize {
        self.ops[0].rows()
    }

    /// Max-entry deviation of `Σ K†K` from the identity.
    pub fn completeness_error(&self) -> f64 {
        let dim = self.dim();
        let sum = self
            .ops
            .iter()
            .fold(ComplexMatrix::zeros(dim, dim), |acc, k| {
                &acc + &(&k.adjoint() * k)
            });
        sum.max_abs_diff(&ComplexMatrix::identity(dim))
    }

    pub fn apply(&self, rho: &DensityState) -> Result<DensityState> {
        apply_channel(self, rho)
    }
}

/// `K₀ = diag(cos β, cos α)`, `K₁ = [[0, sin α], [sin β, 0]]`.
pub fn kraus_from_angles(p: DampingParams) -> KrausChannel {
    let (sa, ca) = p.alpha.sin_cos();
    let (sb, cb) = p.beta.sin_cos();
    KrausChannel {
        ops: vec![
            ComplexMatrix::from_real([[cb, 0.0], [0.0, ca]]),
            ComplexMatrix::from_real([[0.0, sa], [sb, 0.0]]),
        ],
    }
}

/// The Kraus pair a mode realises: `{K₀, K₁}` with the bit-flip correction,
/// `{K₀, X·K₁}` without it.
pub fn kraus_for_mode(p: DampingParams, mode: ChannelMode) -> KrausChannel {
    let ch = kraus_from_angles(p);
    if mode.applies_bit_flip() {
        ch
    } else {
        let x = pauli_x();
        KrausChannel {
            ops: vec![ch.ops[0].clone(), &x * &ch.ops[1]],
        }
    }
}

pub fn phase_damping_channel(gamma: f64) -> Result<KrausChannel> {
    check_unit_interval("damping", gamma)?;
    Ok(KrausChannel {
        ops: vec![
            ComplexMatrix::from_real([[1.0, 0.0], [0.0, (1.0 - gamma).sqrt()]]),
            ComplexMatrix::from_real([[0.0, 0.0], [0.0, gamma.sqrt()]]),
        ],
    })
}

pub fn amplitude_damping_channel(gamma: f64) -> Result<KrausChannel> {
    Ok(kraus_from_angles(DampingParams::from_damping(gamma)?))
}

/// `Σ K ρ K†`.
pub fn apply_channel(ch: &KrausChannel, rho: &DensityState) -> Result<DensityState> {
    if rho.dim() != ch.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("{0}x{0} state", ch.dim()),
            actual: format!("{0}x{0} state", rho.dim()),
        });
    }
    let dim = ch.dim();
    let out = ch
        .ops
        .iter()
        .fold(ComplexMatrix::zeros(dim, dim), |acc, k| {
            &acc + &k.conjugate(rho.matrix())
        });
    Ok(DensityState::from_matrix_unchecked(out))
}

/// Operators the circuit applies to the system for ancilla outcomes 0 and 1,
/// before any correction.
///
/// Ancilla starts in `|0>`, gets `Ry(2γ₁)`, then a CX with the system as
/// control, then `Ry(2γ₂)`, then a computational-basis measurement. Each
/// operator is read off column by column by running the circuit on system
/// inputs `|0>` and `|1>`.
pub fn circuit_branch_operators(p: DampingParams) -> [ComplexMatrix; 2] {
    let id = ComplexMatrix::identity(2);
    let circuit = [
        kron(&id, &ry(2.0 * p.gamma1())),
        cx(),
        kron(&id, &ry(2.0 * p.gamma2())),
    ]
    .iter()
    .fold(ComplexMatrix::identity(4), |acc, g| g * &acc);

    let mut branches = [ComplexMatrix::zeros(2, 2), ComplexMatrix::zeros(2, 2)];
    for input in 0..2 {
        let mut sys = [ZERO; 2];
        sys[input] = ONE;
        let out = circuit.apply(&kron_ket(&sys, &[ONE, ZERO]));
        for (m, op) in branches.iter_mut().enumerate() {
            for s in 0..2 {
                op[(s, input)] = out[2 * s + m];
            }
        }
    }
    branches
}

/// The channel realised by the ancilla circuit, with or without the
/// bit-flip applied to the system when the ancilla reads 1.
pub fn circuit_channel(p: DampingParams, apply_x_correction: bool) -> KrausChannel {
    let [k0, mut k1] = circuit_branch_operators(p);
    if apply_x_correction {
        k1 = &pauli_x() * &k1;
    }
    KrausChannel { ops: vec![k0, k1] }
}

pub fn circuit_channel_for_mode(p: DampingParams, mode: ChannelMode) -> KrausChannel {
    circuit_channel(p, mode.applies_bit_flip())
}

/// Bloch-vector image of `(x, y, z)` under a channel.
pub fn bloch_image(ch: &KrausChannel, v: [f64; 3]) -> Result<[f64; 3]> {
    let out = apply_channel(ch, &DensityState::from_bloch(v[0], v[1], v[2]))?;
    Ok(out.bloch_vector())
}
