//! Fidelity of a four-qubit state with the cluster resource, estimated from
//! local Pauli expectations, and the entanglement witness built on it.

use super::{PauliObservable, PauliWord};
use crate::error::{Error, Result};
use crate::gates::resource_state;
use crate::linalg::DensityState;

/// Fidelities above this certify genuine multipartite entanglement.
pub const GME_THRESHOLD: f64 = 0.5;

/// Signed stabilizer words of the resource, each weighted 1/16, whose sum is
/// the resource projector. Found by keeping every four-qubit Pauli word with
/// `|<P>| = 1` on the resource; the identity comes first.
pub fn cluster_fidelity_terms() -> Vec<PauliObservable> {
    let target = resource_state();
    let scale = 1.0 / 16.0;
    PauliWord::all(4)
        .filter_map(|word| {
            let ev = target.expectation(&word.matrix());
            ((ev.abs() - 1.0).abs() < 1e-9).then(|| PauliObservable {
                word,
                coefficient: ev.signum() * scale,
            })
        })
        .collect()
}

/// `Σ c_k <P_k>` for expectations listed in term order.
pub fn estimate_fidelity(terms: &[PauliObservable], expectations: &[f64]) -> Result<f64> {
    if terms.len() != expectations.len() {
        return Err(Error::invalid(format!(
            "{} expectations for {} terms",
            expectations.len(),
            terms.len()
        )));
    }
    Ok(terms
        .iter()
        .zip(expectations)
        .map(|(t, e)| t.coefficient * e)
        .sum())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WitnessResult {
    pub fidelity: f64,
    pub genuine_multipartite: bool,
}

/// Fidelity with the resource from exact Pauli expectations, and the
/// `F > 0.5` verdict.
pub fn fidelity_and_witness(rho: &DensityState) -> Result<WitnessResult> {
    if rho.num_qubits() != 4 {
        return Err(Error::invalid("witness needs a four-qubit state"));
    }
    let terms = cluster_fidelity_terms();
    let expectations: Vec<f64> = terms
        .iter()
        .map(|t| rho.expectation(&t.word.matrix()))
        .collect();
    let fidelity = estimate_fidelity(&terms, &expectations)?;
    Ok(WitnessResult {
        fidelity,
        genuine_multipartite: fidelity > GME_THRESHOLD,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::resource_ket;
    use crate::linalg::ComplexMatrix;
    use crate::noise::white_noise_mix;

    #[test]
    fn sixteen_terms_with_identity_first() {
        let terms = cluster_fidelity_terms();
        assert_eq!(terms.len(), 16);
        assert_eq!(terms[0].word.to_string(), "IIII");
        assert_eq!(terms[0].coefficient, 1.0 / 16.0);
    }

    #[test]
    fn terms_rebuild_projector() {
        let sum = cluster_fidelity_terms()
            .iter()
            .fold(ComplexMatrix::zeros(16, 16), |acc, t| {
                &acc + &t.word.matrix().scale_real(t.coefficient)
            });
        assert!(sum.approx_eq(resource_state().matrix(), 1e-12));
    }

    #[test]
    fn resource_is_stabilised_by_every_term() {
        let ket = resource_ket();
        for t in cluster_fidelity_terms() {
            let image = t.word.matrix().apply(&ket);
            let sign = t.coefficient.signum();
            for (a, b) in image.iter().zip(&ket) {
                assert!((a - b * sign).norm() < 1e-12, "{}", t.word);
            }
        }
    }

    #[test]
    fn witness_examples() {
        let ideal = fidelity_and_witness(&resource_state()).unwrap();
        assert!((ideal.fidelity - 1.0).abs() < 1e-12);
        assert!(ideal.genuine_multipartite);

        let mixed = fidelity_and_witness(&DensityState::maximally_mixed(4)).unwrap();
        assert!((mixed.fidelity - 1.0 / 16.0).abs() < 1e-12);
        assert!(!mixed.genuine_multipartite);

        let noisy = white_noise_mix(&resource_state(), (16.0 * 0.63 - 1.0) / 15.0).unwrap();
        let w = fidelity_and_witness(&noisy).unwrap();
        assert!((w.fidelity - 0.63).abs() < 1e-12);
        assert!(w.genuine_multipartite);

        assert!(fidelity_and_witness(&DensityState::maximally_mixed(3)).is_err());
    }
}
