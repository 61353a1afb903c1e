//! Core domain types: the pairing (reduced BCS) Hamiltonian in both its
//! pair-configuration and qubit (Pauli) forms, and phase-carrying Pauli
//! words under the pair-to-qubit mapping.
//!
//! Each doubly-occupied/empty level p = 1..M is one qubit. Qubit p sits at
//! bit p-1 of a basis index, so smaller indices are rightmost in ket
//! notation; the ancilla, when present, is the leftmost (highest) qubit.

use num_complex::Complex64;

use crate::error::{AgpqError, Result};

/// Default cap on the pair-configuration sector dimension C(M, N).
pub const DEFAULT_DIM_LIMIT: u128 = 1_000_000;

/// The reduced BCS Hamiltonian's defining data: M equally spaced levels
/// eps_p = p * delta_eps, pairing strength G, and N pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingModel {
    pub m: usize,
    pub delta_eps: f64,
    pub g: f64,
    pub n: usize,
}

impl PairingModel {
    pub fn new(m: usize, n: usize, delta_eps: f64, g: f64) -> Result<Self> {
        if m == 0 {
            return Err(AgpqError::InvalidArgument("M must be positive".into()));
        }
        if n > m {
            return Err(AgpqError::InvalidArgument(format!(
                "pair count N = {n} exceeds level count M = {m}"
            )));
        }
        if !delta_eps.is_finite() || delta_eps <= 0.0 {
            return Err(AgpqError::InvalidArgument(
                "level spacing delta_eps must be > 0".into(),
            ));
        }
        Ok(Self { m, delta_eps, g, n })
    }

    /// Single-particle level energy, 1-based: eps_p = p * delta_eps.
    pub fn eps(&self, p: usize) -> f64 {
        debug_assert!(p >= 1 && p <= self.m);
        p as f64 * self.delta_eps
    }

    pub fn half_filling(&self) -> bool {
        2 * self.n == self.m
    }

    pub fn with_g(&self, g: f64) -> Self {
        Self { g, ..*self }
    }
}

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// Action on a classical bit: (flips bit, phase picked up by |b>).
    fn action(self, bit: bool) -> (bool, Complex64) {
        match self {
            Pauli::I => (false, Complex64::new(1.0, 0.0)),
            Pauli::X => (true, Complex64::new(1.0, 0.0)),
            Pauli::Y => {
                if bit {
                    (true, Complex64::new(0.0, -1.0))
                } else {
                    (true, Complex64::new(0.0, 1.0))
                }
            }
            Pauli::Z => {
                if bit {
                    (false, Complex64::new(-1.0, 0.0))
                } else {
                    (false, Complex64::new(1.0, 0.0))
                }
            }
        }
    }

    /// Single-qubit product A*B = phase * C.
    fn mul(a: Pauli, b: Pauli) -> (Complex64, Pauli) {
        use Pauli::*;
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match (a, b) {
            (I, p) | (p, I) => (one, p),
            (X, X) | (Y, Y) | (Z, Z) => (one, I),
            (X, Y) => (i, Z),
            (Y, X) => (-i, Z),
            (Y, Z) => (i, X),
            (Z, Y) => (-i, X),
            (Z, X) => (i, Y),
            (X, Z) => (-i, Y),
        }
    }

    fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A coefficient times a tensor product of Pauli letters.
///
/// `letters[k]` acts on qubit k+1 (bit k); the ancilla, when present, is
/// the last entry.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliWord {
    pub coefficient: Complex64,
    pub letters: Vec<Pauli>,
}

impl PauliWord {
    pub fn new(coefficient: Complex64, letters: Vec<Pauli>) -> Self {
        Self {
            coefficient,
            letters,
        }
    }

    /// Identity word on `n` qubits with coefficient `c`.
    pub fn identity(n: usize, c: Complex64) -> Self {
        Self::new(c, vec![Pauli::I; n])
    }

    /// Word with a single non-identity letter on 1-based qubit `q`.
    pub fn single(n: usize, q: usize, p: Pauli, c: Complex64) -> Self {
        let mut letters = vec![Pauli::I; n];
        letters[q - 1] = p;
        Self::new(c, letters)
    }

    pub fn num_qubits(&self) -> usize {
        self.letters.len()
    }

    /// A Pauli word is Hermitian iff its coefficient is real.
    pub fn hermitian(&self) -> bool {
        self.coefficient.im.abs() < 1e-14
    }

    /// Letter string such as "IXZY" with qubit 1 leftmost.
    pub fn letter_string(&self) -> String {
        self.letters.iter().map(|p| p.as_char()).collect()
    }

    /// Operator product self * other (self applied after other).
    pub fn mul(&self, other: &PauliWord) -> Result<PauliWord> {
        if self.letters.len() != other.letters.len() {
            return Err(AgpqError::SizeMismatch {
                op_qubits: self.letters.len(),
                state_qubits: other.letters.len(),
            });
        }
        let mut coeff = self.coefficient * other.coefficient;
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (ph, c) = Pauli::mul(a, b);
                coeff *= ph;
                c
            })
            .collect();
        Ok(PauliWord {
            coefficient: coeff,
            letters,
        })
    }

    /// Bit mask of qubits flipped by this word (X or Y letters).
    pub fn flip_mask(&self) -> usize {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, p)| matches!(p, Pauli::X | Pauli::Y))
            .fold(0, |m, (k, _)| m | (1 << k))
    }

    /// Bit mask of qubits carrying non-identity letters.
    pub fn support_mask(&self) -> usize {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, p)| !matches!(p, Pauli::I))
            .fold(0, |m, (k, _)| m | (1 << k))
    }

    /// Exact action on a dense amplitude array of length 2^num_qubits.
    pub fn apply_slice(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let n = self.letters.len();
        debug_assert_eq!(amps.len(), 1 << n);
        let flip = self.flip_mask();
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for (i, &a) in amps.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut phase = self.coefficient;
            for (k, &p) in self.letters.iter().enumerate() {
                let (_, ph) = p.action(i & (1 << k) != 0);
                phase *= ph;
            }
            out[i ^ flip] += phase * a;
        }
        out
    }
}

/// A sum of Pauli words over a fixed qubit count.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PauliSum {
    pub terms: Vec<PauliWord>,
}

impl PauliSum {
    pub fn new(terms: Vec<PauliWord>) -> Self {
        Self { terms }
    }

    pub fn num_qubits(&self) -> usize {
        self.terms.first().map_or(0, |w| w.num_qubits())
    }

    /// Merge equal letter strings, drop coefficients below 1e-14.
    pub fn simplify(&self) -> PauliSum {
        let mut merged: Vec<PauliWord> = Vec::new();
        for w in &self.terms {
            match merged.iter_mut().find(|m| m.letters == w.letters) {
                Some(m) => m.coefficient += w.coefficient,
                None => merged.push(w.clone()),
            }
        }
        merged.retain(|w| w.coefficient.norm() >= 1e-14);
        PauliSum { terms: merged }
    }

    pub fn hermitian(&self) -> bool {
        self.simplify().terms.iter().all(PauliWord::hermitian)
    }

    pub fn add(&self, other: &PauliSum) -> PauliSum {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        PauliSum { terms }.simplify()
    }

    pub fn scale(&self, c: Complex64) -> PauliSum {
        PauliSum {
            terms: self
                .terms
                .iter()
                .map(|w| PauliWord::new(w.coefficient * c, w.letters.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &PauliSum) -> Result<PauliSum> {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(a.mul(b)?);
            }
        }
        Ok(PauliSum { terms }.simplify())
    }

    /// Commutator [self, other], simplified.
    pub fn commutator(&self, other: &PauliSum) -> Result<PauliSum> {
        let ab = self.mul(other)?;
        let ba = other.mul(self)?;
        Ok(ab.add(&ba.scale(Complex64::new(-1.0, 0.0))))
    }

    pub fn is_zero(&self) -> bool {
        self.simplify().terms.is_empty()
    }

    pub fn apply_slice(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for w in &self.terms {
            let flip = w.flip_mask();
            for (i, &a) in amps.iter().enumerate() {
                let mut phase = w.coefficient;
                for (k, &p) in w.letters.iter().enumerate() {
                    let (_, ph) = p.action(i & (1 << k) != 0);
                    phase *= ph;
                }
                out[i ^ flip] += phase * a;
            }
        }
        out
    }

    /// Dense matrix representation, for small-M cross-checks.
    pub fn to_matrix(&self) -> nalgebra::DMatrix<Complex64> {
        let n = self.num_qubits();
        let dim = 1usize << n;
        let mut m = nalgebra::DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for col in 0..dim {
            let mut basis = vec![Complex64::new(0.0, 0.0); dim];
            basis[col] = Complex64::new(1.0, 0.0);
            let image = self.apply_slice(&basis);
            for row in 0..dim {
                m[(row, col)] += image[row];
            }
        }
        m
    }
}

/// Pair-number operator N_hat = sum_p (1 - Z_p)/2 on `m` qubits
/// (identity on any extra trailing qubits, e.g. the ancilla).
pub fn pair_number_operator(m: usize, total_qubits: usize) -> PauliSum {
    let mut terms = vec![PauliWord::identity(
        total_qubits,
        Complex64::new(m as f64 / 2.0, 0.0),
    )];
    for p in 1..=m {
        terms.push(PauliWord::single(
            total_qubits,
            p,
            Pauli::Z,
            Complex64::new(-0.5, 0.0),
        ));
    }
    PauliSum::new(terms)
}

/// Qubit form of the pairing Hamiltonian:
/// H = sum_p (eps_p - G/2)(1 - Z_p) - (G/2) sum_{p>q} (X_p X_q + Y_p Y_q).
pub fn hamiltonian_pauli(model: &PairingModel) -> PauliSum {
    let m = model.m;
    let g = model.g;
    let mut terms = Vec::new();
    let mut constant = 0.0;
    for p in 1..=m {
        let c = model.eps(p) - g / 2.0;
        constant += c;
        terms.push(PauliWord::single(m, p, Pauli::Z, Complex64::new(-c, 0.0)));
    }
    terms.push(PauliWord::identity(m, Complex64::new(constant, 0.0)));
    for p in 2..=m {
        for q in 1..p {
            for letter in [Pauli::X, Pauli::Y] {
                let mut letters = vec![Pauli::I; m];
                letters[p - 1] = letter;
                letters[q - 1] = letter;
                terms.push(PauliWord::new(Complex64::new(-g / 2.0, 0.0), letters));
            }
        }
    }
    PauliSum::new(terms).simplify()
}

pub fn binomial(m: usize, n: usize) -> u128 {
    if n > m {
        return 0;
    }
    let n = n.min(m - n);
    let mut acc: u128 = 1;
    for k in 0..n {
        acc = acc * (m - k) as u128 / (k + 1) as u128;
    }
    acc
}

/// All N-pair configurations over M levels as bit masks (bit p-1 = level p
/// occupied), in increasing numeric order (colexicographic in the
/// occupied-level sets).
pub fn sector_basis(m: usize, n: usize) -> Vec<u64> {
    if n == 0 {
        return vec![0];
    }
    let mut masks = Vec::with_capacity(binomial(m, n) as usize);
    // Gosper's hack enumerates same-popcount masks in increasing order.
    let mut v: u64 = (1 << n) - 1;
    let last: u64 = ((1 << n) - 1) << (m - n);
    loop {
        masks.push(v);
        if v == last {
            break;
        }
        let t = v | (v - 1);
        v = (t + 1) | (((!t & t.wrapping_add(1)) - 1) >> (v.trailing_zeros() + 1));
    }
    masks
}

/// Dense pairing Hamiltonian over the N-pair configuration basis.
///
/// Diagonal: sum over occupied levels of (2 eps_p - G); off-diagonal -G
/// between configurations differing by one pair hop.
pub fn hamiltonian_pair_matrix(model: &PairingModel) -> Result<nalgebra::DMatrix<f64>> {
    let dim = binomial(model.m, model.n);
    if dim > DEFAULT_DIM_LIMIT {
        return Err(AgpqError::DimensionLimit {
            m: model.m,
            n: model.n,
            dim,
            limit: DEFAULT_DIM_LIMIT,
        });
    }
    let masks = sector_basis(model.m, model.n);
    let dim = masks.len();
    let mut h = nalgebra::DMatrix::zeros(dim, dim);
    for (i, &mask) in masks.iter().enumerate() {
        h[(i, i)] = sector_diagonal(model, mask);
        for p in 0..model.m {
            if mask & (1 << p) == 0 {
                continue;
            }
            for q in 0..model.m {
                if q == p || mask & (1 << q) != 0 {
                    continue;
                }
                let hopped = (mask & !(1 << p)) | (1 << q);
                let j = masks.binary_search(&hopped).expect("hop stays in sector");
                h[(j, i)] += -model.g;
            }
        }
    }
    Ok(h)
}

/// Diagonal entry of the seniority-zero Hamiltonian on one configuration.
pub fn sector_diagonal(model: &PairingModel, mask: u64) -> f64 {
    (1..=model.m)
        .filter(|p| mask & (1 << (p - 1)) != 0)
        .map(|p| 2.0 * model.eps(p) - model.g)
        .sum()
}
