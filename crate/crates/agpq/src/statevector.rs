//! Dense statevector simulator over M (+1 ancilla) qubits.
//!
//! Qubit p is bit p-1 of the amplitude index. Gate application is an
//! in-place amplitude-pair update keyed by target-bit stride, with a fixed
//! iteration order so results are bit-exact across runs.

use num_complex::Complex64;

use crate::error::{AgpqError, Result};
use crate::pair_model::{Pauli, PauliSum, PauliWord};
use crate::rng;

/// Dense complex amplitudes over 2^num_qubits basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amplitudes: Vec<Complex64>,
    pub num_qubits: usize,
}

/// One gate from the set needed by the preparation, projection, and
/// pair-hopper circuits. Qubit indices are 1-based (ancilla = M+1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    X { q: usize },
    H { q: usize },
    Ry { q: usize, angle: f64 },
    Rz { q: usize, angle: f64 },
    Cnot { control: usize, target: usize },
    CRy { control: usize, target: usize, angle: f64 },
    CRz { control: usize, target: usize, angle: f64 },
    /// exp(i tau (X_p Y_q - Y_p X_q)/2): |q occ> -> cos|q occ> + sin|p occ>.
    PairHopper { p: usize, q: usize, tau: f64 },
}

impl Gate {
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::X { q } | Gate::H { q } | Gate::Ry { q, .. } | Gate::Rz { q, .. } => (q, None),
            Gate::Cnot { control, target }
            | Gate::CRy {
                control, target, ..
            }
            | Gate::CRz {
                control, target, ..
            } => (control, Some(target)),
            Gate::PairHopper { p, q, .. } => (p, Some(q)),
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(
            self,
            Gate::Cnot { .. } | Gate::CRy { .. } | Gate::CRz { .. } | Gate::PairHopper { .. }
        )
    }
}

impl StateVector {
    /// |0...0> on n qubits.
    pub fn zero(num_qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self {
            amplitudes,
            num_qubits,
        }
    }

    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self {
            amplitudes,
            num_qubits,
        }
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() {
            return Err(AgpqError::InvalidArgument(format!(
                "amplitude count {len} is not a power of two"
            )));
        }
        Ok(Self {
            amplitudes,
            num_qubits: len.trailing_zeros() as usize,
        })
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        for a in &mut self.amplitudes {
            *a /= n;
        }
    }

    /// <self|other>.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    fn check_qubit(&self, q: usize) -> Result<usize> {
        if q == 0 || q > self.num_qubits {
            return Err(AgpqError::IndexOutOfRange {
                index: q,
                num_qubits: self.num_qubits,
            });
        }
        Ok(q - 1)
    }

    /// Apply an arbitrary 2x2 unitary [[a,b],[c,d]] to qubit bit `t`.
    fn apply_1q(&mut self, t: usize, u: [Complex64; 4]) {
        let bit = 1usize << t;
        let dim = self.amplitudes.len();
        let mut i = 0;
        while i < dim {
            if i & bit == 0 {
                let j = i | bit;
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[j];
                self.amplitudes[i] = u[0] * a0 + u[1] * a1;
                self.amplitudes[j] = u[2] * a0 + u[3] * a1;
            }
            i += 1;
        }
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        let zero = Complex64::new(0.0, 0.0);
        match *gate {
            Gate::X { q } => {
                let t = self.check_qubit(q)?;
                let bit = 1usize << t;
                for i in 0..self.amplitudes.len() {
                    if i & bit == 0 {
                        self.amplitudes.swap(i, i | bit);
                    }
                }
            }
            Gate::H { q } => {
                let t = self.check_qubit(q)?;
                let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                self.apply_1q(t, [s, s, s, -s]);
            }
            Gate::Ry { q, angle } => {
                let t = self.check_qubit(q)?;
                let (sin, cos) = (angle / 2.0).sin_cos();
                let (c, s) = (Complex64::new(cos, 0.0), Complex64::new(sin, 0.0));
                self.apply_1q(t, [c, -s, s, c]);
            }
            Gate::Rz { q, angle } => {
                let t = self.check_qubit(q)?;
                let ph0 = Complex64::from_polar(1.0, -angle / 2.0);
                let ph1 = Complex64::from_polar(1.0, angle / 2.0);
                self.apply_1q(t, [ph0, zero, zero, ph1]);
            }
            Gate::Cnot { control, target } => {
                let (c, t) = self.two_bits(control, target)?;
                let (cb, tb) = (1usize << c, 1usize << t);
                for i in 0..self.amplitudes.len() {
                    if i & cb != 0 && i & tb == 0 {
                        self.amplitudes.swap(i, i | tb);
                    }
                }
            }
            Gate::CRy {
                control,
                target,
                angle,
            } => {
                let (c, t) = self.two_bits(control, target)?;
                let (cb, tb) = (1usize << c, 1usize << t);
                let (sin, cos) = (angle / 2.0).sin_cos();
                for i in 0..self.amplitudes.len() {
                    if i & cb != 0 && i & tb == 0 {
                        let j = i | tb;
                        let a0 = self.amplitudes[i];
                        let a1 = self.amplitudes[j];
                        self.amplitudes[i] = cos * a0 - sin * a1;
                        self.amplitudes[j] = sin * a0 + cos * a1;
                    }
                }
            }
            Gate::CRz {
                control,
                target,
                angle,
            } => {
                let (c, t) = self.two_bits(control, target)?;
                let (cb, tb) = (1usize << c, 1usize << t);
                let ph0 = Complex64::from_polar(1.0, -angle / 2.0);
                let ph1 = Complex64::from_polar(1.0, angle / 2.0);
                for (i, a) in self.amplitudes.iter_mut().enumerate() {
                    if i & cb != 0 {
                        *a *= if i & tb == 0 { ph0 } else { ph1 };
                    }
                }
            }
            Gate::PairHopper { p, q, tau } => {
                let (pb_idx, qb_idx) = self.two_bits(p, q)?;
                let (pb, qb) = (1usize << pb_idx, 1usize << qb_idx);
                let (sin, cos) = tau.sin_cos();
                for i in 0..self.amplitudes.len() {
                    // i has the pair on q only; j on p only.
                    if i & qb != 0 && i & pb == 0 {
                        let j = (i & !qb) | pb;
                        let aq = self.amplitudes[i];
                        let ap = self.amplitudes[j];
                        self.amplitudes[i] = cos * aq - sin * ap;
                        self.amplitudes[j] = sin * aq + cos * ap;
                    }
                }
            }
        }
        Ok(())
    }

    fn two_bits(&self, a: usize, b: usize) -> Result<(usize, usize)> {
        let ab = self.check_qubit(a)?;
        let bb = self.check_qubit(b)?;
        if ab == bb {
            return Err(AgpqError::InvalidArgument(format!(
                "two-qubit gate with coincident qubits {a}"
            )));
        }
        Ok((ab, bb))
    }

    pub fn apply_all(&mut self, gates: &[Gate]) -> Result<()> {
        for g in gates {
            self.apply(g)?;
        }
        Ok(())
    }
}

/// Exact action of one Pauli word, as a new state.
pub fn pauli_word_apply(word: &PauliWord, state: &StateVector) -> Result<StateVector> {
    if word.num_qubits() != state.num_qubits {
        return Err(AgpqError::SizeMismatch {
            op_qubits: word.num_qubits(),
            state_qubits: state.num_qubits,
        });
    }
    StateVector::from_amplitudes(word.apply_slice(&state.amplitudes))
}

/// <state| obs |state>.
pub fn expectation(state: &StateVector, obs: &PauliSum) -> Result<Complex64> {
    if obs.num_qubits() != state.num_qubits {
        return Err(AgpqError::SizeMismatch {
            op_qubits: obs.num_qubits(),
            state_qubits: state.num_qubits,
        });
    }
    let image = obs.apply_slice(&state.amplitudes);
    Ok(state
        .amplitudes
        .iter()
        .zip(&image)
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// Rotate `state` so that measuring Z on each support qubit of `word`
/// realizes a measurement of the word's Pauli letters.
pub fn rotate_to_diagonal_basis(word: &PauliWord, state: &mut StateVector) -> Result<()> {
    let sdg = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    for (k, &p) in word.letters.iter().enumerate() {
        match p {
            Pauli::I | Pauli::Z => {}
            Pauli::X => state.apply(&Gate::H { q: k + 1 })?,
            Pauli::Y => {
                state.apply_1q(k, sdg);
                state.apply(&Gate::H { q: k + 1 })?;
            }
        }
    }
    Ok(())
}

/// Empirical mean of the +/-1 outcomes of measuring a Hermitian Pauli word
/// (its coefficient is ignored). Deterministic for a fixed seed.
pub fn sample(state: &StateVector, obs: &PauliWord, shots: usize, seed: u64) -> Result<f64> {
    if !obs.hermitian() {
        return Err(AgpqError::NonHermitianObservable(obs.letter_string()));
    }
    if obs.num_qubits() != state.num_qubits {
        return Err(AgpqError::SizeMismatch {
            op_qubits: obs.num_qubits(),
            state_qubits: state.num_qubits,
        });
    }
    if shots == 0 {
        return Err(AgpqError::InvalidArgument("shots must be >= 1".into()));
    }
    let mut rotated = state.clone();
    rotate_to_diagonal_basis(obs, &mut rotated)?;
    let support = obs.support_mask();

    // Cumulative distribution over basis outcomes, fixed order.
    let mut cdf = Vec::with_capacity(rotated.amplitudes.len());
    let mut acc = 0.0;
    for a in &rotated.amplitudes {
        acc += a.norm_sqr();
        cdf.push(acc);
    }
    let total = acc;

    let mut sum = 0i64;
    for shot in 0..shots {
        let u = rng::u01(seed, shot as u64) * total;
        let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        let parity = (idx & support).count_ones() % 2;
        sum += if parity == 0 { 1 } else { -1 };
    }
    Ok(sum as f64 / shots as f64)
}
