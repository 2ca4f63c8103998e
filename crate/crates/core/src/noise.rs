//! Phenomenological imperfections of the resource state.

use serde::{Deserialize, Serialize};

use crate::channels::check_unit_interval;
use crate::error::{Error, Result};
use crate::gates::pauli_z;
use crate::linalg::{embed_single, DensityState};

/// Cluster qubit carried by the interferometer path of a photon; the
/// visibility knob dephases this one.
pub const PATH_QUBIT: usize = 1;

/// Knobs applied to the resource state before any measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Weight of the ideal state in a mix with the maximally mixed state.
    pub white_noise_v: f64,
    /// Dephasing probability for each qubit, by index. Missing entries are 0.
    pub per_qubit_dephasing: Vec<f64>,
    /// Interference visibility of the path qubit, mapped to a dephasing
    /// probability `(1 − V)/2`.
    pub path_visibility: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self::ideal()
    }
}

impl NoiseSpec {
    pub fn ideal() -> Self {
        Self {
            white_noise_v: 1.0,
            per_qubit_dephasing: Vec::new(),
            path_visibility: 1.0,
        }
    }

    pub fn white(v: f64) -> Self {
        Self {
            white_noise_v: v,
            ..Self::ideal()
        }
    }

    pub fn with_visibility(mut self, visibility: f64) -> Self {
        self.path_visibility = visibility;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_unit_interval("white-noise weight", self.white_noise_v)?;
        check_unit_interval("path visibility", self.path_visibility)?;
        for &p in &self.per_qubit_dephasing {
            check_unit_interval("dephasing probability", p)?;
        }
        Ok(())
    }

    pub fn is_ideal(&self) -> bool {
        self.white_noise_v == 1.0
            && self.path_visibility == 1.0
            && self.per_qubit_dephasing.iter().all(|&p| p == 0.0)
    }

    /// White noise first, then per-qubit dephasing, then the path-qubit
    /// visibility loss.
    pub fn apply(&self, rho: &DensityState) -> Result<DensityState> {
        self.validate()?;
        if self.is_ideal() {
            return Ok(rho.clone());
        }
        let mut out = white_noise_mix(rho, self.white_noise_v)?;
        for (q, &p) in self.per_qubit_dephasing.iter().enumerate() {
            if p > 0.0 {
                out = dephase_qubit(&out, q, p)?;
            }
        }
        if self.path_visibility < 1.0 && rho.num_qubits() > PATH_QUBIT {
            out = dephase_qubit(
                &out,
                PATH_QUBIT,
                visibility_to_dephasing(self.path_visibility),
            )?;
        }
        Ok(out)
    }
}

pub fn visibility_to_dephasing(visibility: f64) -> f64 {
    (1.0 - visibility) / 2.0
}

/// `v ρ + (1 − v) 𝟙/2ⁿ`.
pub fn white_noise_mix(rho: &DensityState, v: f64) -> Result<DensityState> {
    check_unit_interval("white-noise weight", v)?;
    rho.scale(v)
        .add(&DensityState::maximally_mixed(rho.num_qubits()).scale(1.0 - v))
}

/// White-noise weight that brings a pure `n`-qubit state to fidelity
/// `target` with itself: inverts `F = v + (1 − v)/2ⁿ`.
pub fn weight_for_fidelity(target: f64, num_qubits: usize) -> Result<f64> {
    let floor = 1.0 / (1u64 << num_qubits) as f64;
    if !(floor..=1.0).contains(&target) {
        return Err(Error::invalid(format!(
            "fidelity {target} unreachable by white noise (floor {floor})"
        )));
    }
    Ok((target - floor) / (1.0 - floor))
}

/// `(1 − p) ρ + p Z_q ρ Z_q`.
pub fn dephase_qubit(rho: &DensityState, qubit: usize, p: f64) -> Result<DensityState> {
    check_unit_interval("dephasing probability", p)?;
    if qubit >= rho.num_qubits() {
        return Err(Error::QubitOutOfRange {
            index: qubit,
            num_qubits: rho.num_qubits(),
        });
    }
    let z = embed_single(&pauli_z(), qubit, rho.num_qubits());
    rho.scale(1.0 - p).add(&rho.evolve(&z)?.scale(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{resource_ket, resource_state, ket_plus};
    use crate::linalg::partial_trace;

    #[test]
    fn white_noise_endpoints() {
        let rho = resource_state();
        assert!(white_noise_mix(&rho, 1.0).unwrap().approx_eq(&rho, 1e-15));
        assert!(white_noise_mix(&rho, 0.0)
            .unwrap()
            .approx_eq(&DensityState::maximally_mixed(4), 1e-15));
        assert!(white_noise_mix(&rho, 1.1).is_err());
    }

    #[test]
    fn weight_for_experimental_fidelity() {
        let v = weight_for_fidelity(0.63, 4).unwrap();
        assert!((v - (16.0 * 0.63 - 1.0) / 15.0).abs() < 1e-15);
        assert!((v - 0.6053).abs() < 1e-4);
        let mixed = white_noise_mix(&resource_state(), v).unwrap();
        assert!((mixed.overlap_with_pure(&resource_ket()) - 0.63).abs() < 1e-12);
    }

    #[test]
    fn dephasing_examples() {
        let plus = DensityState::pure(&ket_plus()).unwrap();
        assert!(dephase_qubit(&plus, 0, 0.0).unwrap().approx_eq(&plus, 0.0));
        assert!(dephase_qubit(&plus, 0, 0.5)
            .unwrap()
            .approx_eq(&DensityState::maximally_mixed(1), 1e-15));
        assert!(matches!(
            dephase_qubit(&plus, 1, 0.1),
            Err(Error::QubitOutOfRange { .. })
        ));
    }

    #[test]
    fn visibility_on_path_qubit_keeps_entanglement() {
        let noisy = NoiseSpec::ideal()
            .with_visibility(0.93)
            .apply(&resource_state())
            .unwrap();
        let f = noisy.overlap_with_pure(&resource_ket());
        assert!(f < 1.0 - 1e-6);
        assert!(f > 0.5);
        assert!((f - (1.0 - visibility_to_dephasing(0.93))).abs() < 1e-12);
    }

    #[test]
    fn spec_application_keeps_states_valid() {
        let spec = NoiseSpec {
            white_noise_v: 0.7,
            per_qubit_dephasing: vec![0.1, 0.0, 0.3, 0.2],
            path_visibility: 0.9,
        };
        let out = spec.apply(&resource_state()).unwrap();
        assert!((out.trace() - 1.0).abs() < 1e-12);
        assert!(out.min_eigenvalue() > -1e-12);
        assert!(out.matrix().is_hermitian(1e-12));
        let red = partial_trace(&out, &[3]).unwrap();
        assert!((red.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spec_rejects_out_of_range() {
        let bad = NoiseSpec {
            per_qubit_dephasing: vec![1.5],
            ..NoiseSpec::ideal()
        };
        assert!(bad.apply(&resource_state()).is_err());
        assert!(NoiseSpec::white(-0.2).validate().is_err());
    }
}
