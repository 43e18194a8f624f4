//! Quantum states, Bloch decomposition and the even/odd correlation split.
//!
//! States live on `n` parties of local dimension `d` (2 unless the qudit
//! inversion paths are in use) as either a pure amplitude vector or a dense
//! density matrix. Bloch coefficients follow the state normalization
//! `rho = (1/2^n) sum_p c_p sigma_p` with `c_p = Tr(sigma_p rho)`, so a valid
//! state carries coefficient 1 on the identity string and every coefficient
//! in [-1, 1].

use std::collections::BTreeMap;

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::StateError;
use crate::linalg::{self, CMatrix, CVector};
use crate::pauli::{self, PauliString};
use crate::rng::SeededRng;

/// Cap for full 4^n Bloch scans.
pub const FULL_DECOMPOSE_CAP: usize = 8;
/// Cap for single-coefficient or weight-restricted queries.
pub const COEFFICIENT_CAP: usize = 12;

/// Coefficients below this are dropped when stored in a [`BlochVector`].
pub const COEFF_DROP: f64 = 1e-12;

const PURE_NORM_TOL: f64 = 1e-12;
const MIXED_HERM_TOL: f64 = 1e-12;
const MIXED_TRACE_TOL: f64 = 1e-12;
const MIXED_EIG_FLOOR: f64 = -1e-10;

#[derive(Debug, Clone)]
enum Repr {
    Pure(CVector),
    Mixed(CMatrix),
}

/// A quantum state on `n` parties of local dimension `d`.
#[derive(Debug, Clone)]
pub struct QuantumState {
    n: usize,
    d: usize,
    repr: Repr,
}

impl QuantumState {
    /// Pure state from amplitudes; validates normalization.
    pub fn pure_from_amplitudes(
        n: usize,
        d: usize,
        amplitudes: Vec<Complex64>,
    ) -> Result<Self, StateError> {
        let dim = checked_dim(n, d)?;
        if amplitudes.len() != dim {
            return Err(StateError::DimensionMismatch { expected: dim, got: amplitudes.len() });
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > PURE_NORM_TOL {
            return Err(StateError::NotNormalized(norm));
        }
        Ok(QuantumState { n, d, repr: Repr::Pure(Array1::from(amplitudes)) })
    }

    /// Qubit shorthand for [`QuantumState::pure_from_amplitudes`].
    pub fn pure_qubits(n: usize, amplitudes: Vec<Complex64>) -> Result<Self, StateError> {
        Self::pure_from_amplitudes(n, 2, amplitudes)
    }

    /// Mixed state from a density matrix; validates Hermiticity, trace and
    /// positivity (the latter through a full eigendecomposition).
    pub fn mixed_from_matrix(n: usize, d: usize, matrix: CMatrix) -> Result<Self, StateError> {
        let dim = checked_dim(n, d)?;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(StateError::DimensionMismatch { expected: dim, got: matrix.nrows() });
        }
        let herm_dev = linalg::hermiticity_deviation(&matrix);
        if herm_dev > MIXED_HERM_TOL {
            return Err(StateError::NotHermitian(herm_dev));
        }
        let tr = linalg::trace(&matrix);
        if (tr.re - 1.0).abs() > MIXED_TRACE_TOL || tr.im.abs() > MIXED_TRACE_TOL {
            return Err(StateError::BadTrace(tr.re));
        }
        let eig = linalg::hermitian_eig(&matrix)?;
        if let Some(&min) = eig.values.last() {
            if min < MIXED_EIG_FLOOR {
                return Err(StateError::NotPositive(min));
            }
        }
        Ok(QuantumState { n, d, repr: Repr::Mixed(matrix) })
    }

    /// Internal constructor for matrices that are states by construction.
    pub(crate) fn mixed_unchecked(n: usize, d: usize, matrix: CMatrix) -> Self {
        QuantumState { n, d, repr: Repr::Mixed(matrix) }
    }

    pub(crate) fn pure_unchecked(n: usize, d: usize, amplitudes: CVector) -> Self {
        QuantumState { n, d, repr: Repr::Pure(amplitudes) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn local_dim(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.d.pow(self.n as u32)
    }

    pub fn is_pure_repr(&self) -> bool {
        matches!(self.repr, Repr::Pure(_))
    }

    /// Amplitudes of a pure state.
    pub fn amplitudes(&self) -> Result<&CVector, StateError> {
        match &self.repr {
            Repr::Pure(v) => Ok(v),
            Repr::Mixed(_) => Err(StateError::PureRequired),
        }
    }

    /// Density-matrix form (projector for pure states).
    pub fn density(&self) -> CMatrix {
        match &self.repr {
            Repr::Pure(v) => linalg::projector(v),
            Repr::Mixed(m) => m.clone(),
        }
    }

    /// Tr(rho^2).
    pub fn purity(&self) -> f64 {
        match &self.repr {
            Repr::Pure(_) => 1.0,
            Repr::Mixed(m) => m.iter().map(|z| z.norm_sqr()).sum(),
        }
    }

    /// Fix the global phase so the first amplitude of magnitude > 1e-9 is
    /// real and positive. No-op for mixed states.
    pub fn canonical_phase(mut self) -> Self {
        if let Repr::Pure(v) = &mut self.repr {
            if let Some(pivot) = v.iter().find(|z| z.norm() > 1e-9) {
                let rot = pivot.conj() / pivot.norm();
                v.mapv_inplace(|z| z * rot);
            }
        }
        self
    }

    /// Expectation value of `op` in this state; `op` must be Hermitian, and
    /// only the real part is returned.
    pub fn expectation(&self, op: &CMatrix) -> f64 {
        match &self.repr {
            Repr::Pure(v) => linalg::inner(v, &op.dot(v)).re,
            Repr::Mixed(m) => linalg::trace(&op.dot(m)).re,
        }
    }

    /// Overlap fidelity. Pure/pure: |<a|b>|^2; pure/mixed: <psi|rho|psi>.
    /// For two mixed states this is the plain trace overlap Tr(rho sigma).
    pub fn fidelity(&self, other: &QuantumState) -> f64 {
        match (&self.repr, &other.repr) {
            (Repr::Pure(a), Repr::Pure(b)) => linalg::inner(a, b).norm_sqr(),
            (Repr::Pure(a), Repr::Mixed(m)) | (Repr::Mixed(m), Repr::Pure(a)) => {
                linalg::inner(a, &m.dot(a)).re
            }
            (Repr::Mixed(a), Repr::Mixed(b)) => linalg::trace(&a.dot(b)).re,
        }
    }

    fn require_qubits(&self) -> Result<(), StateError> {
        if self.d != 2 {
            return Err(StateError::QubitsOnly(self.d));
        }
        Ok(())
    }
}

fn checked_dim(n: usize, d: usize) -> Result<usize, StateError> {
    if d < 2 {
        return Err(StateError::QubitsOnly(d));
    }
    // Keep d^n inside addressable range.
    let dim = (d as u128).checked_pow(n as u32).filter(|&x| x <= 1 << 30);
    dim.map(|x| x as usize).ok_or(StateError::CapExceeded { n, cap: 30 })
}

/// Haar-random pure qubit state, deterministic per seed.
pub fn random_pure_state(n: usize, seed: u64) -> QuantumState {
    random_pure_qudit(n, 2, seed)
}

/// Haar-random pure state of n qudits with local dimension d.
pub fn random_pure_qudit(n: usize, d: usize, seed: u64) -> QuantumState {
    let dim = d.pow(n as u32);
    let mut rng = SeededRng::new(seed);
    let mut amps: Vec<Complex64> =
        (0..dim).map(|_| Complex64::new(rng.normal(), rng.normal())).collect();
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    QuantumState::pure_unchecked(n, d, Array1::from(amps)).canonical_phase()
}

/// Random full-rank mixed qubit state from the Hilbert-Schmidt (Ginibre)
/// ensemble, deterministic per seed.
pub fn random_mixed_state(n: usize, seed: u64) -> QuantumState {
    random_mixed_qudit(n, 2, seed)
}

pub fn random_mixed_qudit(n: usize, d: usize, seed: u64) -> QuantumState {
    let dim = d.pow(n as u32);
    let mut rng = SeededRng::new(seed);
    let mut g = Array2::<Complex64>::zeros((dim, dim));
    for i in 0..dim {
        for j in 0..dim {
            g[[i, j]] = Complex64::new(rng.normal(), rng.normal());
        }
    }
    let rho = g.dot(&linalg::adjoint(&g));
    let tr = linalg::trace(&rho).re;
    QuantumState::mixed_unchecked(n, d, rho.mapv(|z| z / tr))
}

/// Sparse expansion of a Hermitian operator over canonical Pauli strings.
///
/// The represented operator is `sum_p c_p sigma_p` (see
/// [`BlochVector::materialize`]); for a state the stored coefficients are the
/// usual Bloch coefficients and reassembly divides by 2^n.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochVector {
    n: usize,
    terms: BTreeMap<PauliString, f64>,
}

impl BlochVector {
    pub fn new(n: usize) -> Self {
        BlochVector { n, terms: BTreeMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Insert a coefficient; magnitudes below [`COEFF_DROP`] are dropped and
    /// non-canonical or foreign-size strings are rejected.
    pub fn set(&mut self, p: PauliString, c: f64) -> Result<(), StateError> {
        if p.n() != self.n {
            return Err(StateError::Pauli(crate::error::PauliError::SizeMismatch(p.n(), self.n)));
        }
        let (canon, k) = p.canonicalize();
        // Folding a -1 scalar keeps Hermiticity; i-phases cannot carry real coefficients.
        let c = match k {
            0 => c,
            2 => -c,
            _ => {
                return Err(StateError::NonRealCoefficient { label: p.label(), dev: c.abs() });
            }
        };
        if c.abs() < COEFF_DROP {
            self.terms.remove(&canon);
        } else {
            self.terms.insert(canon, c);
        }
        Ok(())
    }

    pub fn get(&self, p: &PauliString) -> f64 {
        self.terms.get(p).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in deterministic (x_bits, z_bits) order.
    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, f64)> {
        self.terms.iter().map(|(p, &c)| (p, c))
    }

    /// Coefficient of the identity string.
    pub fn identity_coefficient(&self) -> f64 {
        PauliString::identity(self.n).map(|id| self.get(&id)).unwrap_or(0.0)
    }

    /// Retain exactly the weight-j terms (the operator P_j).
    pub fn weight_filter(&self, j: usize) -> Result<BlochVector, StateError> {
        if j > self.n {
            return Err(StateError::WeightOutOfRange { j, n: self.n });
        }
        let terms =
            self.terms.iter().filter(|(p, _)| p.weight() == j).map(|(p, &c)| (*p, c)).collect();
        Ok(BlochVector { n: self.n, terms })
    }

    /// Even-weight terms with the identity excluded (the operator P_e).
    pub fn even_part(&self) -> BlochVector {
        let terms = self
            .terms
            .iter()
            .filter(|(p, _)| p.weight() % 2 == 0 && p.weight() != 0)
            .map(|(p, &c)| (*p, c))
            .collect();
        BlochVector { n: self.n, terms }
    }

    /// Odd-weight terms (the operator P_o).
    pub fn odd_part(&self) -> BlochVector {
        let terms =
            self.terms.iter().filter(|(p, _)| p.weight() % 2 == 1).map(|(p, &c)| (*p, c)).collect();
        BlochVector { n: self.n, terms }
    }

    /// Flip the sign of every odd-weight coefficient: the Bloch-space action
    /// of the qubit state inversion.
    pub fn flip_odd_signs(&self) -> BlochVector {
        let terms = self
            .terms
            .iter()
            .map(|(p, &c)| (*p, if p.weight() % 2 == 1 { -c } else { c }))
            .collect();
        BlochVector { n: self.n, terms }
    }

    /// Sum of squared coefficients.
    pub fn sq_sum(&self) -> f64 {
        self.terms.values().map(|c| c * c).sum()
    }

    /// Dense realization `sum_p c_p sigma_p`.
    pub fn materialize(&self) -> Result<CMatrix, StateError> {
        if self.n > COEFFICIENT_CAP {
            return Err(StateError::CapExceeded { n: self.n, cap: COEFFICIENT_CAP });
        }
        let dim = 1usize << self.n;
        let mut m = Array2::<Complex64>::zeros((dim, dim));
        for (p, c) in &self.terms {
            let scalar = pauli::i_power(p.phase_exp()) * *c;
            let x = p.x_bits() as usize;
            let z = p.z_bits() as usize;
            for col in 0..dim {
                let sign = if (z & col).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                m[[col ^ x, col]] += scalar * sign;
            }
        }
        Ok(m)
    }

    /// Largest |c_p| over a weight-parity class (weight 0 counts as even).
    pub fn parity_mass(&self, odd: bool) -> f64 {
        self.terms
            .iter()
            .filter(|(p, _)| (p.weight() % 2 == 1) == odd)
            .map(|(_, c)| c.abs())
            .fold(0.0, f64::max)
    }
}

/// Bloch coefficients `c_p = Tr(sigma_p rho)` for all 4^n strings.
pub fn bloch_decompose(state: &QuantumState) -> Result<BlochVector, StateError> {
    state.require_qubits()?;
    if state.n() > FULL_DECOMPOSE_CAP {
        return Err(StateError::CapExceeded { n: state.n(), cap: FULL_DECOMPOSE_CAP });
    }
    let mut out = BlochVector::new(state.n());
    for p in pauli::all_strings(state.n()) {
        let c = coefficient_checked(state, &p)?;
        out.set(p, c)?;
    }
    Ok(out)
}

/// Bloch coefficients restricted to the requested weights.
pub fn bloch_decompose_weights(
    state: &QuantumState,
    weights: &[usize],
) -> Result<BlochVector, StateError> {
    state.require_qubits()?;
    if state.n() > COEFFICIENT_CAP {
        return Err(StateError::CapExceeded { n: state.n(), cap: COEFFICIENT_CAP });
    }
    let mut out = BlochVector::new(state.n());
    for &w in weights {
        if w > state.n() {
            return Err(StateError::WeightOutOfRange { j: w, n: state.n() });
        }
        for p in pauli::strings_of_weight(state.n(), w) {
            let c = coefficient_checked(state, &p)?;
            out.set(p, c)?;
        }
    }
    Ok(out)
}

/// Single Bloch coefficient `Tr(sigma_p rho)`.
pub fn bloch_coefficient(state: &QuantumState, p: &PauliString) -> Result<f64, StateError> {
    state.require_qubits()?;
    if state.n() > COEFFICIENT_CAP {
        return Err(StateError::CapExceeded { n: state.n(), cap: COEFFICIENT_CAP });
    }
    coefficient_checked(state, p)
}

fn coefficient_checked(state: &QuantumState, p: &PauliString) -> Result<f64, StateError> {
    let raw = raw_coefficient(state, p);
    if raw.im.abs() > 1e-10 {
        return Err(StateError::NonRealCoefficient { label: p.label(), dev: raw.im.abs() });
    }
    Ok(raw.re)
}

/// Tr(sigma_p rho) using the one-nonzero-per-column action of the string,
/// O(2^n) per coefficient.
fn raw_coefficient(state: &QuantumState, p: &PauliString) -> Complex64 {
    let dim = state.dim();
    let x = p.x_bits() as usize;
    let z = p.z_bits() as usize;
    let scalar = pauli::i_power(p.phase_exp());
    let mut acc = Complex64::new(0.0, 0.0);
    match &state.repr {
        Repr::Pure(v) => {
            for j in 0..dim {
                let sign = if (z & j).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                acc += v[j] * v[j ^ x].conj() * sign;
            }
        }
        Repr::Mixed(m) => {
            for j in 0..dim {
                let sign = if (z & j).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                acc += m[[j, j ^ x]] * sign;
            }
        }
    }
    scalar * acc
}

/// Pauli expansion of an arbitrary Hermitian qubit operator A:
/// coefficients `Tr(sigma_p A) / 2^n`, so `materialize` returns A itself.
pub fn operator_bloch(m: &CMatrix) -> Result<BlochVector, StateError> {
    let dim = m.nrows();
    if m.ncols() != dim || !dim.is_power_of_two() || dim == 1 {
        return Err(StateError::DimensionMismatch { expected: dim.max(2), got: m.ncols() });
    }
    let n = dim.trailing_zeros() as usize;
    if n > FULL_DECOMPOSE_CAP {
        return Err(StateError::CapExceeded { n, cap: FULL_DECOMPOSE_CAP });
    }
    let herm = linalg::hermiticity_deviation(m);
    if herm > 1e-9 * linalg::max_abs(m).max(1.0) {
        return Err(StateError::NotHermitian(herm));
    }
    let scale = 1.0 / dim as f64;
    let mut out = BlochVector::new(n);
    for p in pauli::all_strings(n) {
        let x = p.x_bits() as usize;
        let z = p.z_bits() as usize;
        let scalar = pauli::i_power(p.phase_exp());
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..dim {
            let sign = if (z & j).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            acc += m[[j, j ^ x]] * sign;
        }
        out.set(p, (scalar * acc).re * scale)?;
    }
    Ok(out)
}

/// Operator `(1/2^n) sum_p c_p sigma_p` read off a Bloch vector.
pub fn bloch_reconstruct_operator(b: &BlochVector) -> Result<CMatrix, StateError> {
    let m = b.materialize()?;
    let scale = 1.0 / (1u64 << b.n()) as f64;
    Ok(m.mapv(|z| z * scale))
}

/// Reconstruct and validate a state from its Bloch coefficients.
pub fn bloch_reconstruct_state(b: &BlochVector) -> Result<QuantumState, StateError> {
    let m = bloch_reconstruct_operator(b)?;
    QuantumState::mixed_from_matrix(b.n(), 2, m)
}

/// The even/odd correlation split of a state, with purity and trace overlap
/// precomputed from the coefficients (Parseval).
#[derive(Debug, Clone)]
pub struct EvenOddSplit {
    n: usize,
    pe: BlochVector,
    po: BlochVector,
    purity: f64,
    trace_overlap: f64,
}

impl EvenOddSplit {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Even correlations P_e (weight 0 excluded).
    pub fn pe(&self) -> &BlochVector {
        &self.pe
    }

    /// Odd correlations P_o.
    pub fn po(&self) -> &BlochVector {
        &self.po
    }

    /// Purity Tr(rho^2) of the source state.
    pub fn purity(&self) -> f64 {
        self.purity
    }

    /// Tr(rho rho~) of the source state.
    pub fn trace_overlap(&self) -> f64 {
        self.trace_overlap
    }

    /// alpha = sqrt(Tr(rho rho~)); the n-concurrence for pure sources.
    pub fn alpha(&self) -> f64 {
        self.trace_overlap.max(0.0).sqrt()
    }

    pub fn pe_matrix(&self) -> Result<CMatrix, StateError> {
        self.pe.materialize()
    }

    pub fn po_matrix(&self) -> Result<CMatrix, StateError> {
        self.po.materialize()
    }

    /// (1 + P_e + P_o) / 2^n, which must reproduce the source state.
    pub fn reassemble(&self) -> Result<CMatrix, StateError> {
        let dim = 1usize << self.n;
        let mut m = self.pe.materialize()? + self.po.materialize()?;
        for i in 0..dim {
            m[[i, i]] += 1.0;
        }
        let scale = 1.0 / dim as f64;
        Ok(m.mapv(|z| z * scale))
    }
}

/// Split a qubit state into even and odd correlation components.
pub fn even_odd_split(state: &QuantumState) -> Result<EvenOddSplit, StateError> {
    let b = bloch_decompose(state)?;
    let pe = b.even_part();
    let po = b.odd_part();
    let dim = (1u64 << state.n()) as f64;
    let se = pe.sq_sum();
    let so = po.sq_sum();
    Ok(EvenOddSplit {
        n: state.n(),
        pe,
        po,
        purity: (1.0 + se + so) / dim,
        trace_overlap: (1.0 + se - so) / dim,
    })
}

/// Reduced density matrix on the (1-based, ascending) parties in `keep`.
/// An empty `keep` yields the scalar trace as a 1x1 matrix.
pub fn partial_trace(state: &QuantumState, keep: &[usize]) -> Result<QuantumState, StateError> {
    let n = state.n();
    let d = state.local_dim();
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != keep.len() {
        return Err(StateError::BadParty(0, n));
    }
    for &p in &sorted {
        if p == 0 || p > n {
            return Err(StateError::BadParty(p, n));
        }
    }
    let traced: Vec<usize> = (1..=n).filter(|p| !sorted.contains(p)).collect();
    let rho = state.density();
    let keep_spread = spread_table(n, d, &sorted);
    let tr_spread = spread_table(n, d, &traced);
    let dim_keep = d.pow(sorted.len() as u32);
    let dim_tr = d.pow(traced.len() as u32);

    let mut out = Array2::<Complex64>::zeros((dim_keep, dim_keep));
    for a in 0..dim_keep {
        for b in 0..dim_keep {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..dim_tr {
                acc += rho[[keep_spread[a] + tr_spread[t], keep_spread[b] + tr_spread[t]]];
            }
            out[[a, b]] = acc;
        }
    }
    Ok(QuantumState::mixed_unchecked(sorted.len(), d, out))
}

/// Pad a reduced operator back to the full system with identities on the
/// complement of `keep`: returns rho_keep (x) 1_rest at the right positions.
pub fn embed_padded(
    reduced: &CMatrix,
    keep: &[usize],
    n: usize,
    d: usize,
) -> Result<CMatrix, StateError> {
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    for &p in &sorted {
        if p == 0 || p > n {
            return Err(StateError::BadParty(p, n));
        }
    }
    let dim_keep = d.pow(sorted.len() as u32);
    if reduced.nrows() != dim_keep {
        return Err(StateError::DimensionMismatch { expected: dim_keep, got: reduced.nrows() });
    }
    let rest: Vec<usize> = (1..=n).filter(|p| !sorted.contains(p)).collect();
    let keep_spread = spread_table(n, d, &sorted);
    let rest_spread = spread_table(n, d, &rest);
    let dim = d.pow(n as u32);
    let dim_rest = d.pow(rest.len() as u32);
    let mut out = Array2::<Complex64>::zeros((dim, dim));
    for a in 0..dim_keep {
        for b in 0..dim_keep {
            let v = reduced[[a, b]];
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            for t in 0..dim_rest {
                out[[keep_spread[a] + rest_spread[t], keep_spread[b] + rest_spread[t]]] = v;
            }
        }
    }
    Ok(out)
}

/// Full-index contributions of local values on the given parties. Party 1 is
/// the most significant base-d digit.
fn spread_table(n: usize, d: usize, parties: &[usize]) -> Vec<usize> {
    let k = parties.len();
    let dim = d.pow(k as u32);
    let places: Vec<usize> = parties.iter().map(|&p| d.pow((n - p) as u32)).collect();
    (0..dim)
        .map(|value| {
            let mut rem = value;
            let mut idx = 0usize;
            for slot in (0..k).rev() {
                idx += (rem % d) * places[slot];
                rem /= d;
            }
            idx
        })
        .collect()
}
