//! Gate set, equatorial measurement bases, linear cluster states and the
//! one-step propagation rule of measurement-based computation.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use crate::error::{Error, Result};
use crate::linalg::{
    c, inner, kron_all, kron_ket, norm, r, ComplexMatrix, DensityState, C64, I, ONE, ZERO,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// Operator basis order used for process matrices.
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> ComplexMatrix {
        match self {
            Pauli::I => ComplexMatrix::identity(2),
            Pauli::X => pauli_x(),
            Pauli::Y => pauli_y(),
            Pauli::Z => pauli_z(),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_symbol(ch: char) -> Option<Self> {
        match ch.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real([[0.0, 1.0], [1.0, 0.0]])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_rows([[ZERO, -I], [I, ZERO]])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real([[1.0, 0.0], [0.0, -1.0]])
}

pub fn hadamard() -> ComplexMatrix {
    ComplexMatrix::from_real([
        [FRAC_1_SQRT_2, FRAC_1_SQRT_2],
        [FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
    ])
}

pub fn cz() -> ComplexMatrix {
    ComplexMatrix::diag(&[ONE, ONE, ONE, -ONE])
}

/// Controlled-X with the first slot as control and the second as target.
pub fn cx() -> ComplexMatrix {
    ComplexMatrix::from_real([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0],
    ])
}

/// `exp(-i α σz / 2)`.
pub fn rz(alpha: f64) -> ComplexMatrix {
    ComplexMatrix::diag(&[
        C64::from_polar(1.0, -alpha / 2.0),
        C64::from_polar(1.0, alpha / 2.0),
    ])
}

/// Real rotation `[[cos θ/2, -sin θ/2], [sin θ/2, cos θ/2]]`.
pub fn ry(theta: f64) -> ComplexMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    ComplexMatrix::from_real([[c, -s], [s, c]])
}

pub fn ket0() -> [C64; 2] {
    [ONE, ZERO]
}

pub fn ket1() -> [C64; 2] {
    [ZERO, ONE]
}

pub fn ket_plus() -> [C64; 2] {
    [r(FRAC_1_SQRT_2), r(FRAC_1_SQRT_2)]
}

pub fn ket_minus() -> [C64; 2] {
    [r(FRAC_1_SQRT_2), r(-FRAC_1_SQRT_2)]
}

/// `(|0> + i|1>)/√2`.
pub fn ket_plus_y() -> [C64; 2] {
    [r(FRAC_1_SQRT_2), c(0.0, FRAC_1_SQRT_2)]
}

/// Measurement basis on the Bloch equator: `|α±> = (|0> ± e^{-iα}|1>)/√2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquatorialBasis {
    pub angle: f64,
}

impl EquatorialBasis {
    pub fn new(angle: f64) -> Self {
        Self { angle }
    }

    pub fn plus(&self) -> [C64; 2] {
        self.vector(0)
    }

    pub fn minus(&self) -> [C64; 2] {
        self.vector(1)
    }

    /// Basis vector for outcome `s` (0 for `|α+>`, 1 for `|α->`).
    pub fn vector(&self, s: u8) -> [C64; 2] {
        let sign = if s == 0 { 1.0 } else { -1.0 };
        [
            r(FRAC_1_SQRT_2),
            C64::from_polar(sign * FRAC_1_SQRT_2, -self.angle),
        ]
    }
}

/// `|<u|v>| = 1` within `tol`, for normalised kets.
pub fn equal_up_to_phase(u: &[C64], v: &[C64], tol: f64) -> bool {
    if u.len() != v.len() {
        return false;
    }
    let (nu, nv) = (norm(u), norm(v));
    if nu == 0.0 || nv == 0.0 {
        return nu == nv;
    }
    (inner(u, v).norm() / (nu * nv) - 1.0).abs() <= tol
}

/// Two operators agree up to a global phase when `|Tr(A†B)| = ‖A‖‖B‖`.
pub fn operators_equal_up_to_phase(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return false;
    }
    let ab = a.frobenius_inner(b).norm();
    let aa = a.frobenius_inner(a).re.sqrt();
    let bb = b.frobenius_inner(b).re.sqrt();
    if aa == 0.0 || bb == 0.0 {
        return aa == bb;
    }
    // Cauchy-Schwarz is tight only for parallel operators; compare entrywise
    // after removing the phase so tolerance has the usual meaning.
    let phase = b.frobenius_inner(a) / ab;
    (ab / (aa * bb) - 1.0).abs() <= tol && a.approx_eq(&b.scale(phase), tol * aa.max(1.0))
}

fn check_chain_len(n: usize) -> Result<()> {
    if !(2..=6).contains(&n) {
        return Err(Error::invalid(format!("cluster length {n} outside 2..=6")));
    }
    Ok(())
}

/// State vector of the `n`-qubit linear cluster: CZ on every neighbouring
/// pair of `|+>^⊗n`.
pub fn linear_cluster_ket(n: usize) -> Result<Vec<C64>> {
    check_chain_len(n)?;
    let dim = 1usize << n;
    let amp = (dim as f64).sqrt().recip();
    Ok((0..dim)
        .map(|idx| {
            let bits: Vec<usize> = (0..n).map(|q| (idx >> (n - 1 - q)) & 1).collect();
            let edges = bits.windows(2).filter(|w| w[0] & w[1] == 1).count();
            r(if edges % 2 == 0 { amp } else { -amp })
        })
        .collect())
}

pub fn linear_cluster(n: usize) -> Result<DensityState> {
    DensityState::pure(&linear_cluster_ket(n)?)
}

/// The four-qubit resource `½(|+00+> + |+01-> + |-10+> - |-11->)`, built
/// term by term from single-qubit kets.
pub fn resource_ket() -> Vec<C64> {
    let (p, m, k0, k1) = (ket_plus(), ket_minus(), ket0(), ket1());
    let terms: [(f64, [&[C64]; 4]); 4] = [
        (0.5, [&p, &k0, &k0, &p]),
        (0.5, [&p, &k0, &k1, &m]),
        (0.5, [&m, &k1, &k0, &p]),
        (-0.5, [&m, &k1, &k1, &m]),
    ];
    let mut out = vec![ZERO; 16];
    for (w, factors) in terms {
        let ket = factors[1..]
            .iter()
            .fold(factors[0].to_vec(), |acc, f| kron_ket(&acc, f));
        for (o, a) in out.iter_mut().zip(ket) {
            *o += a * w;
        }
    }
    out
}

pub fn resource_state() -> DensityState {
    DensityState::pure(&resource_ket()).expect("resource ket is normalisable")
}

/// Hadamard placements (bitmask over qubits, bit `q` for qubit `q`) that map
/// `from` onto `to` up to global phase, found by trying all `2^n` masks.
pub fn local_hadamard_frames(from: &[C64], to: &[C64], tol: f64) -> Vec<u32> {
    assert_eq!(from.len(), to.len());
    let n = from.len().trailing_zeros() as usize;
    let h = hadamard();
    let id = ComplexMatrix::identity(2);
    (0u32..(1 << n))
        .filter(|mask| {
            let op = kron_all((0..n).map(|q| if mask >> q & 1 == 1 { &h } else { &id }));
            equal_up_to_phase(&op.apply(from), to, tol)
        })
        .collect()
}

/// `σx^s · H · Rz(α) |φ>`: the logical state carried to the next qubit after
/// measuring in `B(α)` with outcome `s`.
pub fn propagate_one_step(input: [C64; 2], alpha: f64, s: u8) -> [C64; 2] {
    let mut op = &hadamard() * &rz(alpha);
    if s == 1 {
        op = &pauli_x() * &op;
    }
    let out = op.apply(&input);
    [out[0], out[1]]
}

/// Checks `Ry(2γ) = Rz(π/2) H Rz(2γ) H Rz(-π/2)` up to global phase.
pub fn ry_decomposition_check(gamma: f64) -> bool {
    let h = hadamard();
    let rhs = [rz(FRAC_PI_2), h.clone(), rz(2.0 * gamma), h, rz(-FRAC_PI_2)]
        .iter()
        .fold(ComplexMatrix::identity(2), |acc, g| &acc * g);
    operators_equal_up_to_phase(&ry(2.0 * gamma), &rhs, 1e-10)
}
