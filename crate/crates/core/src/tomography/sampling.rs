//! Shot sampling of Pauli measurements and bootstrap error bars.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use super::PauliWord;
use crate::error::{Error, Result};
use crate::gates::{hadamard, Pauli};
use crate::linalg::{kron_all, ComplexMatrix, DensityState, C64};

/// Deterministic generator for `(seed, stream)`. Distinct streams give
/// independent sequences, so settings can be sampled in any order.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Multinomial draw via sequential conditional binomials.
pub fn multinomial<R: Rng + ?Sized>(rng: &mut R, shots: u64, probs: &[f64]) -> Vec<u64> {
    let mut counts = vec![0; probs.len()];
    let mut left = shots;
    let mut mass: f64 = probs.iter().map(|p| p.max(0.0)).sum();
    for (k, &p) in probs.iter().enumerate() {
        if left == 0 {
            break;
        }
        let p = p.max(0.0);
        if k + 1 == probs.len() || mass <= p {
            counts[k] = left;
            break;
        }
        let q = (p / mass).clamp(0.0, 1.0);
        let n = Binomial::new(left, q)
            .expect("probability clamped to [0, 1]")
            .sample(rng);
        counts[k] = n;
        left -= n;
        mass -= p;
    }
    counts
}

fn basis_change(p: Pauli) -> ComplexMatrix {
    match p {
        Pauli::X => hadamard(),
        Pauli::Y => &hadamard() * &ComplexMatrix::diag(&[C64::new(1.0, 0.0), C64::new(0.0, -1.0)]),
        Pauli::I | Pauli::Z => ComplexMatrix::identity(2),
    }
}

/// Probabilities of the joint eigenvalue outcomes of a Pauli word. Outcomes
/// range over the word's support, first supported qubit in the most
/// significant bit; bit 1 means eigenvalue −1.
pub fn outcome_probabilities(state: &DensityState, word: &PauliWord) -> Result<Vec<f64>> {
    if word.len() != state.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}-letter word", state.num_qubits()),
            actual: format!("{}-letter word", word.len()),
        });
    }
    let rotations: Vec<ComplexMatrix> = word.letters().iter().map(|&p| basis_change(p)).collect();
    let rotated = state.evolve(&kron_all(rotations.iter()))?;
    let support = word.support();
    let n = state.num_qubits();
    let mut probs = vec![0.0; 1 << support.len()];
    for idx in 0..state.dim() {
        let key = support
            .iter()
            .fold(0, |acc, &q| (acc << 1) | ((idx >> (n - 1 - q)) & 1));
        probs[key] += rotated.matrix()[(idx, idx)].re.max(0.0);
    }
    let total: f64 = probs.iter().sum();
    if total > 0.0 {
        probs.iter_mut().for_each(|p| *p /= total);
    }
    Ok(probs)
}

/// Counts from `shots` repetitions of measuring `word` on `state`.
pub fn sample_counts(
    state: &DensityState,
    word: &PauliWord,
    shots: u64,
    seed: u64,
) -> Result<Vec<u64>> {
    if shots == 0 {
        return Err(Error::invalid("at least one shot is required"));
    }
    let probs = outcome_probabilities(state, word)?;
    Ok(multinomial(&mut seeded_rng(seed, 0), shots, &probs))
}

/// `<P>` estimated from outcome counts: each outcome contributes the parity
/// of its eigenvalue bits.
pub fn parity_expectation(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let signed: i128 = counts
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            if k.count_ones() % 2 == 0 {
                n as i128
            } else {
                -(n as i128)
            }
        })
        .sum();
    signed as f64 / total as f64
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BootstrapSummary {
    pub mean: f64,
    pub std: f64,
    pub resamples: usize,
}

/// Nonparametric bootstrap over independent measurement settings: every
/// resample redraws each setting's counts from its own observed frequencies.
pub fn bootstrap<F>(
    counts: &[Vec<u64>],
    resamples: usize,
    seed: u64,
    statistic: F,
) -> Result<BootstrapSummary>
where
    F: Fn(&[Vec<u64>]) -> Result<f64>,
{
    if resamples < 2 {
        return Err(Error::invalid("bootstrap needs at least two resamples"));
    }
    let mut rng = seeded_rng(seed, u64::MAX);
    let mut values = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let draw: Vec<Vec<u64>> = counts
            .iter()
            .map(|c| {
                let n: u64 = c.iter().sum();
                if n == 0 {
                    return c.clone();
                }
                let freq: Vec<f64> = c.iter().map(|&k| k as f64 / n as f64).collect();
                multinomial(&mut rng, n, &freq)
            })
            .collect();
        values.push(statistic(&draw)?);
    }
    let mean = values.iter().sum::<f64>() / resamples as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (resamples - 1) as f64;
    Ok(BootstrapSummary {
        mean,
        std: var.sqrt(),
        resamples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{ket_plus, ket_plus_y};

    #[test]
    fn basis_state_is_deterministic() {
        let counts =
            sample_counts(&DensityState::basis(1, 0), &"Z".parse().unwrap(), 1000, 7).unwrap();
        assert_eq!(counts, vec![1000, 0]);
    }

    #[test]
    fn plus_state_concentrates() {
        let plus = DensityState::pure(&ket_plus()).unwrap();
        let counts = sample_counts(&plus, &"Z".parse().unwrap(), 1_000_000, 0).unwrap();
        let freq = counts[0] as f64 / 1e6;
        assert!((freq - 0.5).abs() < 0.002, "{freq}");
    }

    #[test]
    fn sampling_is_reproducible() {
        let plus = DensityState::pure(&ket_plus()).unwrap();
        let w: PauliWord = "Z".parse().unwrap();
        assert_eq!(
            sample_counts(&plus, &w, 5000, 11).unwrap(),
            sample_counts(&plus, &w, 5000, 11).unwrap()
        );
        assert_ne!(
            sample_counts(&plus, &w, 5000, 11).unwrap(),
            sample_counts(&plus, &w, 5000, 12).unwrap()
        );
    }

    #[test]
    fn rotated_bases() {
        let plus = DensityState::pure(&ket_plus()).unwrap();
        let plus_y = DensityState::pure(&ket_plus_y()).unwrap();
        let px = outcome_probabilities(&plus, &"X".parse().unwrap()).unwrap();
        let py = outcome_probabilities(&plus_y, &"Y".parse().unwrap()).unwrap();
        assert!((px[0] - 1.0).abs() < 1e-12);
        assert!((py[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn multi_qubit_support_ordering() {
        // |01>: Z on qubit 0 gives +1, Z on qubit 1 gives -1.
        let s = DensityState::basis(2, 1);
        let p = outcome_probabilities(&s, &"ZZ".parse().unwrap()).unwrap();
        assert!((p[1] - 1.0).abs() < 1e-12);
        let p = outcome_probabilities(&s, &"IZ".parse().unwrap()).unwrap();
        assert!((p[1] - 1.0).abs() < 1e-12);
        assert_eq!(parity_expectation(&[0, 10, 0, 0]), -1.0);
    }

    #[test]
    fn rejects_zero_shots_and_wrong_width() {
        let s = DensityState::basis(2, 0);
        assert!(sample_counts(&s, &"ZZ".parse().unwrap(), 0, 0).is_err());
        assert!(sample_counts(&s, &"Z".parse().unwrap(), 10, 0).is_err());
    }

    #[test]
    fn multinomial_conserves_shots() {
        let mut rng = seeded_rng(3, 1);
        let counts = multinomial(&mut rng, 12345, &[0.1, 0.0, 0.6, 0.3]);
        assert_eq!(counts.iter().sum::<u64>(), 12345);
        assert_eq!(counts[1], 0);
    }

    #[test]
    fn bootstrap_binomial_std() {
        // One fair coin setting with 10⁴ shots: σ of the mean is 0.005.
        let counts = vec![vec![5000, 5000]];
        let summary = bootstrap(&counts, 400, 5, |c| Ok(c[0][0] as f64 / 1e4)).unwrap();
        assert!((summary.std - 0.005).abs() < 0.001, "{}", summary.std);
    }
}
