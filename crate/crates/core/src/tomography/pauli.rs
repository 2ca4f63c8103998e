use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::Pauli;
use crate::linalg::{kron_all, ComplexMatrix};

/// Tensor product of single-qubit Paulis, qubit 0 first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliWord(pub Vec<Pauli>);

impl PauliWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&p| p == Pauli::I)
    }

    /// Qubits carrying a non-identity letter.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&q| self.0[q] != Pauli::I).collect()
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let factors: Vec<ComplexMatrix> = self.0.iter().map(|p| p.matrix()).collect();
        kron_all(factors.iter())
    }

    /// All `4ⁿ` words in lexicographic `I < X < Y < Z` order.
    pub fn all(num_qubits: usize) -> impl Iterator<Item = PauliWord> {
        (0..4usize.pow(num_qubits as u32)).map(move |mut idx| {
            let mut letters = vec![Pauli::I; num_qubits];
            for slot in letters.iter_mut().rev() {
                *slot = Pauli::ALL[idx % 4];
                idx /= 4;
            }
            PauliWord(letters)
        })
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|ch| {
                Pauli::from_symbol(ch)
                    .ok_or_else(|| Error::invalid(format!("bad Pauli letter '{ch}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(Error::invalid("empty Pauli word"));
        }
        Ok(PauliWord(letters))
    }
}

impl Serialize for PauliWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Signed, weighted Pauli word.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliObservable {
    pub word: PauliWord,
    pub coefficient: f64,
}
