//! Dense statevector engine.
//!
//! Qubit 0 is the most significant bit of an amplitude index. All operations
//! are pure: they take a state by reference and return a new one.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::sign::Sign;
use crate::TOLERANCE;

pub type Amplitude = Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("amplitude count {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("state norm² {0} differs from 1")]
    NotNormalized(f64),
    #[error("cannot normalize a zero vector")]
    ZeroNorm,
    #[error("non-finite amplitude")]
    NonFinite,
    #[error("matrix has {got} entries, expected {expected}")]
    BadShape { got: usize, expected: usize },
    #[error("matrix is not unitary: U†U deviates from identity by {0:e}")]
    NotUnitary(f64),
    #[error("operator of dimension {dim} cannot act on {targets} qubit(s)")]
    DimensionMismatch { dim: usize, targets: usize },
    #[error("qubit {qubit} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("qubit {0} listed more than once")]
    DuplicateQubit(usize),
    #[error("expectation value has imaginary part {0:e}")]
    ComplexExpectation(f64),
}

/// Single-qubit measurement basis. Outcome +1 belongs to the first eigenvector:
/// X: (|0⟩ ± |1⟩)/√2, Y: (|0⟩ ± i|1⟩)/√2, Z: |0⟩, |1⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub fn eigenvector(self, outcome: Sign) -> [Amplitude; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = outcome.as_f64();
        match self {
            Basis::X => [Complex64::new(h, 0.0), Complex64::new(s * h, 0.0)],
            Basis::Y => [Complex64::new(h, 0.0), Complex64::new(0.0, s * h)],
            Basis::Z => match outcome {
                Sign::Plus => [ONE, ZERO],
                Sign::Minus => [ZERO, ONE],
            },
        }
    }

    /// |v⟩⟨v| for the eigenvector of `outcome`, row-major.
    pub fn projector(self, outcome: Sign) -> [Amplitude; 4] {
        let v = self.eigenvector(outcome);
        [
            v[0] * v[0].conj(),
            v[0] * v[1].conj(),
            v[1] * v[0].conj(),
            v[1] * v[1].conj(),
        ]
    }

    /// The ±1-valued observable P₊ − P₋ (the Pauli matrix of this basis).
    pub fn observable(self) -> Unitary {
        let p = self.projector(Sign::Plus);
        let m = self.projector(Sign::Minus);
        Unitary {
            dim: 2,
            entries: p.iter().zip(m.iter()).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Basis::X => "X",
            Basis::Y => "Y",
            Basis::Z => "Z",
        };
        f.write_str(s)
    }
}

/// A unitary matrix of power-of-two dimension, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    dim: usize,
    entries: Vec<Amplitude>,
}

impl Unitary {
    /// Builds a unitary, rejecting anything whose U†U is not the identity
    /// entrywise within [`TOLERANCE`].
    pub fn new(dim: usize, entries: Vec<Amplitude>) -> Result<Self, StateError> {
        if !dim.is_power_of_two() {
            return Err(StateError::NotPowerOfTwo(dim));
        }
        if entries.len() != dim * dim {
            return Err(StateError::BadShape {
                got: entries.len(),
                expected: dim * dim,
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(StateError::NonFinite);
        }
        let u = Unitary { dim, entries };
        let dev = u.unitarity_defect();
        if dev > TOLERANCE {
            return Err(StateError::NotUnitary(dev));
        }
        Ok(u)
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim.is_power_of_two(), "identity dimension must be a power of two");
        let mut entries = vec![ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = ONE;
        }
        Unitary { dim, entries }
    }

    pub fn pauli_x() -> Self {
        Unitary {
            dim: 2,
            entries: vec![ZERO, ONE, ONE, ZERO],
        }
    }

    pub fn pauli_y() -> Self {
        let i = Complex64::i();
        Unitary {
            dim: 2,
            entries: vec![ZERO, -i, i, ZERO],
        }
    }

    pub fn pauli_z() -> Self {
        Unitary {
            dim: 2,
            entries: vec![ONE, ZERO, ZERO, -ONE],
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Amplitude>]) -> Result<Self, StateError> {
        let dim = columns.len();
        let mut entries = vec![ZERO; dim * dim];
        for (c, col) in columns.iter().enumerate() {
            if col.len() != dim {
                return Err(StateError::BadShape {
                    got: col.len(),
                    expected: dim,
                });
            }
            for (r, z) in col.iter().enumerate() {
                entries[r * dim + c] = *z;
            }
        }
        Unitary::new(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn entry(&self, row: usize, col: usize) -> Amplitude {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Amplitude] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut entries = vec![ZERO; d * d];
        for r in 0..d {
            for c in 0..d {
                entries[c * d + r] = self.entries[r * d + c].conj();
            }
        }
        Unitary { dim: d, entries }
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &Unitary) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in unitary product");
        let d = self.dim;
        let mut entries = vec![ZERO; d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.entries[r * d + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..d {
                    entries[r * d + c] += a * rhs.entries[k * d + c];
                }
            }
        }
        Unitary { dim: d, entries }
    }

    /// Kronecker product `self ⊗ rhs`; `self` acts on the more significant qubits.
    pub fn kron(&self, rhs: &Unitary) -> Self {
        let (a, b) = (self.dim, rhs.dim);
        let d = a * b;
        let mut entries = vec![ZERO; d * d];
        for r1 in 0..a {
            for c1 in 0..a {
                let x = self.entries[r1 * a + c1];
                for r2 in 0..b {
                    for c2 in 0..b {
                        entries[(r1 * b + r2) * d + (c1 * b + c2)] = x * rhs.entries[r2 * b + c2];
                    }
                }
            }
        }
        Unitary { dim: d, entries }
    }

    /// Largest entrywise deviation of U†U from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for r in 0..d {
            for c in 0..d {
                let mut acc = ZERO;
                for k in 0..d {
                    acc += self.entries[k * d + r].conj() * self.entries[k * d + c];
                }
                let target = if r == c { ONE } else { ZERO };
                worst = worst.max((acc - target).norm());
            }
        }
        worst
    }

    /// Largest entrywise difference between two matrices of equal dimension.
    pub fn max_abs_diff(&self, other: &Unitary) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Normalized amplitudes over an ordered qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Amplitude>,
}

impl StateVector {
    /// Wraps amplitudes that are already normalized within [`TOLERANCE`].
    pub fn new(amps: Vec<Amplitude>) -> Result<Self, StateError> {
        let num_qubits = check_len(amps.len())?;
        check_finite(&amps)?;
        let n = norm_sqr(&amps);
        if (n - 1.0).abs() > TOLERANCE {
            return Err(StateError::NotNormalized(n));
        }
        Ok(StateVector { num_qubits, amps })
    }

    pub fn from_unnormalized(mut amps: Vec<Amplitude>) -> Result<Self, StateError> {
        let num_qubits = check_len(amps.len())?;
        check_finite(&amps)?;
        let n = norm_sqr(&amps);
        if n <= f64::MIN_POSITIVE {
            return Err(StateError::ZeroNorm);
        }
        let scale = 1.0 / n.sqrt();
        amps.iter_mut().for_each(|a| *a *= scale);
        Ok(StateVector { num_qubits, amps })
    }

    /// The computational basis state |index⟩ on `num_qubits` qubits.
    pub fn basis_state(num_qubits: usize, index: usize) -> Self {
        let dim = 1usize << num_qubits;
        assert!(index < dim, "basis index out of range");
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        StateVector { num_qubits, amps }
    }

    pub fn zero(num_qubits: usize) -> Self {
        Self::basis_state(num_qubits, 0)
    }

    /// Single-qubit eigenstate of `basis` with eigenvalue `outcome`.
    pub fn eigenstate(basis: Basis, outcome: Sign) -> Self {
        StateVector {
            num_qubits: 1,
            amps: basis.eigenvector(outcome).to_vec(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Amplitude {
        assert_eq!(self.num_qubits, other.num_qubits, "inner product of unequal registers");
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// |⟨self|other⟩|². Insensitive to global phase.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// `self ⊗ other`; `self` occupies the leading qubits.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        StateVector {
            num_qubits: self.num_qubits + other.num_qubits,
            amps,
        }
    }

    /// Applies `u` to `targets` (first target = most significant qubit of
    /// `u`'s index) and the identity elsewhere.
    pub fn apply(&self, u: &Unitary, targets: &[usize]) -> Result<StateVector, StateError> {
        if u.dim() != 1usize << targets.len() {
            return Err(StateError::DimensionMismatch {
                dim: u.dim(),
                targets: targets.len(),
            });
        }
        self.check_targets(targets)?;
        let amps = self.apply_matrix(u.entries(), targets);
        debug_assert!((norm_sqr(&amps) - 1.0).abs() < 1e-9);
        Ok(StateVector {
            num_qubits: self.num_qubits,
            amps,
        })
    }

    /// Born-rule measurement of one qubit. Both outcomes are always present;
    /// a branch with probability below [`TOLERANCE`] has probability 0, keeps
    /// the input state as a placeholder and is marked unusable.
    pub fn measure(&self, qubit: usize, basis: Basis) -> Result<OutcomeDistribution, StateError> {
        self.check_targets(&[qubit])?;
        let mask = self.mask(qubit);
        let entries = Sign::BOTH
            .iter()
            .map(|&outcome| {
                let v = basis.eigenvector(outcome);
                let mut amps = vec![ZERO; self.amps.len()];
                let mut prob = 0.0;
                for i0 in (0..self.amps.len()).filter(|i| i & mask == 0) {
                    let i1 = i0 | mask;
                    let c = v[0].conj() * self.amps[i0] + v[1].conj() * self.amps[i1];
                    amps[i0] = v[0] * c;
                    amps[i1] = v[1] * c;
                    prob += c.norm_sqr();
                }
                if prob < TOLERANCE {
                    MeasurementBranch {
                        outcome,
                        probability: 0.0,
                        post_state: self.clone(),
                        usable: false,
                    }
                } else {
                    let scale = 1.0 / prob.sqrt();
                    amps.iter_mut().for_each(|a| *a *= scale);
                    MeasurementBranch {
                        outcome,
                        probability: prob,
                        post_state: StateVector {
                            num_qubits: self.num_qubits,
                            amps,
                        },
                        usable: true,
                    }
                }
            })
            .collect();
        Ok(OutcomeDistribution { entries })
    }

    /// ⟨⊗ₖ O_k⟩ for single-qubit ±1 observables on distinct qubits.
    pub fn expectation_product(&self, observables: &[(usize, Basis)]) -> Result<f64, StateError> {
        let qubits: Vec<usize> = observables.iter().map(|(q, _)| *q).collect();
        self.check_targets(&qubits)?;
        let mut amps = self.amps.clone();
        for &(q, basis) in observables {
            let o = basis.observable();
            amps = apply_raw(self.num_qubits, &amps, o.entries(), &[q]);
        }
        let value: Complex64 = self.amps.iter().zip(&amps).map(|(a, b)| a.conj() * b).sum();
        if value.im.abs() >= TOLERANCE {
            return Err(StateError::ComplexExpectation(value.im));
        }
        Ok(value.re)
    }

    /// Reduced density matrix of one qubit (partial trace over the rest),
    /// row-major 2×2.
    pub fn reduced_density_matrix(&self, qubit: usize) -> Result<[Amplitude; 4], StateError> {
        self.check_targets(&[qubit])?;
        let mask = self.mask(qubit);
        let mut rho = [ZERO; 4];
        for i0 in (0..self.amps.len()).filter(|i| i & mask == 0) {
            let a = [self.amps[i0], self.amps[i0 | mask]];
            for r in 0..2 {
                for c in 0..2 {
                    rho[r * 2 + c] += a[r] * a[c].conj();
                }
            }
        }
        Ok(rho)
    }

    /// Largest per-amplitude difference. Phase-sensitive; prefer
    /// [`StateVector::fidelity`] for physical comparisons.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        assert_eq!(self.num_qubits, other.num_qubits);
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    fn check_targets(&self, targets: &[usize]) -> Result<(), StateError> {
        for (i, &q) in targets.iter().enumerate() {
            if q >= self.num_qubits {
                return Err(StateError::QubitOutOfRange {
                    qubit: q,
                    num_qubits: self.num_qubits,
                });
            }
            if targets[..i].contains(&q) {
                return Err(StateError::DuplicateQubit(q));
            }
        }
        Ok(())
    }

    fn apply_matrix(&self, entries: &[Amplitude], targets: &[usize]) -> Vec<Amplitude> {
        apply_raw(self.num_qubits, &self.amps, entries, targets)
    }
}

/// `state ⊗ other` as a free function.
pub fn tensor(a: &StateVector, b: &StateVector) -> StateVector {
    a.tensor(b)
}

// Embeds a 2^k × 2^k row-major matrix on `targets`. Targets must already be
// validated.
fn apply_raw(num_qubits: usize, amps: &[Amplitude], entries: &[Amplitude], targets: &[usize]) -> Vec<Amplitude> {
    let k = targets.len();
    let sub_dim = 1usize << k;
    let masks: Vec<usize> = targets.iter().map(|&q| 1 << (num_qubits - 1 - q)).collect();
    let target_mask: usize = masks.iter().sum();
    // offsets[s] = the bits of full-register index set by sub-index s
    let offsets: Vec<usize> = (0..sub_dim)
        .map(|s| {
            masks
                .iter()
                .enumerate()
                .filter(|(j, _)| s & (1 << (k - 1 - j)) != 0)
                .map(|(_, m)| m)
                .sum()
        })
        .collect();
    let mut out = vec![ZERO; amps.len()];
    let mut gathered = vec![ZERO; sub_dim];
    for base in (0..amps.len()).filter(|i| i & target_mask == 0) {
        for (s, off) in offsets.iter().enumerate() {
            gathered[s] = amps[base | off];
        }
        for (r, off) in offsets.iter().enumerate() {
            let row = &entries[r * sub_dim..(r + 1) * sub_dim];
            out[base | off] = row.iter().zip(&gathered).map(|(u, a)| u * a).sum();
        }
    }
    out
}

fn check_len(len: usize) -> Result<usize, StateError> {
    if len == 0 || !len.is_power_of_two() {
        return Err(StateError::NotPowerOfTwo(len));
    }
    Ok(len.trailing_zeros() as usize)
}

fn check_finite(amps: &[Amplitude]) -> Result<(), StateError> {
    if amps.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(StateError::NonFinite)
    }
}

fn norm_sqr(amps: &[Amplitude]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

/// One outcome of a single-qubit measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBranch {
    pub outcome: Sign,
    pub probability: f64,
    pub post_state: StateVector,
    /// False when the branch has zero probability and `post_state` is a placeholder.
    pub usable: bool,
}

/// The two branches of a measurement, +1 first.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    pub entries: Vec<MeasurementBranch>,
}

impl OutcomeDistribution {
    pub fn branch(&self, outcome: Sign) -> &MeasurementBranch {
        self.entries
            .iter()
            .find(|b| b.outcome == outcome)
            .expect("both outcomes are always present")
    }

    pub fn probability(&self, outcome: Sign) -> f64 {
        self.branch(outcome).probability
    }

    pub fn total_probability(&self) -> f64 {
        self.entries.iter().map(|b| b.probability).sum()
    }
}
