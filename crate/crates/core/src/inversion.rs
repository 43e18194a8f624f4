//! The state-inversion map in its four forms, and the overlap quantities
//! built on it.
//!
//! For qubits the inversion is complex conjugation followed by a collective
//! spin flip, `rho~ = sigma_y^n rho^T sigma_y^n`; on pure states it is the
//! antiunitary `F = (i sigma_y)^n C`. The same map is the alternating sum
//! over all padded reductions, which also defines it for qudits, and in Bloch
//! form it flips the sign of every odd-weight term. Transposition is taken in
//! the computational basis fixed by the global qubit ordering.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{InversionError, StateError};
use crate::linalg::{self, CMatrix, CVector};
use crate::state::{self, QuantumState};

/// Band below which alpha counts as zero, and above 1 minus it as one.
pub const ALPHA_BAND: f64 = 1e-8;

/// Overlap data between a state and its inversion.
#[derive(Debug, Clone)]
pub struct OverlapData {
    /// |<psi~|psi>| for pure input; sqrt of the clamped trace form otherwise.
    pub alpha: f64,
    /// Phase of <psi~|psi>; convention-dependent, reported for debugging
    /// only and defined only for pure input with alpha above the zero band.
    pub phase: Option<f64>,
    /// Tr(rho rho~).
    pub trace_form: f64,
}

/// Classification bands used by the reconstruction case analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaClass {
    Zero,
    Generic,
    One,
}

impl OverlapData {
    pub fn class(&self) -> AlphaClass {
        if self.alpha < ALPHA_BAND {
            AlphaClass::Zero
        } else if self.alpha > 1.0 - ALPHA_BAND {
            AlphaClass::One
        } else {
            AlphaClass::Generic
        }
    }
}

/// Per-qubit generalized flip `F_alpha = iC(i a0 1 + a1 sx + a2 sy + a3 sz)`,
/// applied as the same factor on every qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipSpec {
    alpha_vec: [f64; 4],
}

impl FlipSpec {
    pub fn new(alpha_vec: [f64; 4]) -> Result<Self, InversionError> {
        let norm = alpha_vec.iter().map(|a| a * a).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(InversionError::FlipVecNotUnit(norm));
        }
        Ok(FlipSpec { alpha_vec })
    }

    /// The spin flip (0, 0, 1, 0), i.e. the inversion operator F itself.
    pub fn spin_flip() -> Self {
        FlipSpec { alpha_vec: [0.0, 0.0, 1.0, 0.0] }
    }

    pub fn alpha_vec(&self) -> [f64; 4] {
        self.alpha_vec
    }

    /// Unitary part `i (i a0 1 + sum a_i sigma_i)` acting on one qubit.
    fn single_qubit_unitary(&self) -> CMatrix {
        let [a0, a1, a2, a3] = self.alpha_vec;
        let i = Complex64::new(0.0, 1.0);
        let mut m = Array2::<Complex64>::zeros((2, 2));
        m[[0, 0]] = i * (i * a0 + a3);
        m[[0, 1]] = i * Complex64::new(a1, -a2);
        m[[1, 0]] = i * Complex64::new(a1, a2);
        m[[1, 1]] = i * (i * a0 - a3);
        m
    }
}

/// Qubit state inversion `rho~ = sigma_y^n rho^T sigma_y^n`; pure stays pure.
pub fn invert_qubit(rho: &QuantumState) -> Result<QuantumState, InversionError> {
    if rho.local_dim() != 2 {
        return Err(StateError::QubitsOnly(rho.local_dim()).into());
    }
    if rho.is_pure_repr() {
        let psi = rho.amplitudes().expect("pure");
        return Ok(QuantumState::pure_unchecked(rho.n(), 2, flip_vector(psi, rho.n())));
    }
    let dm = rho.density();
    Ok(QuantumState::mixed_unchecked(rho.n(), 2, invert_density(&dm, rho.n())))
}

/// Entrywise qubit inversion on a density matrix:
/// `rho~[i, j] = (-1)^{|i| + |j|} rho[~j, ~i]` with ~ the n-bit complement.
pub fn invert_density(dm: &CMatrix, n: usize) -> CMatrix {
    let dim = 1usize << n;
    let full = dim - 1;
    let mut out = Array2::<Complex64>::zeros((dim, dim));
    for i in 0..dim {
        for j in 0..dim {
            let sign = if ((i.count_ones() + j.count_ones()) % 2) == 0 { 1.0 } else { -1.0 };
            out[[i, j]] = dm[[full ^ j, full ^ i]] * sign;
        }
    }
    out
}

/// `F|psi>`: conjugate amplitudes, then apply (i sigma_y)^n.
pub fn flip_vector(psi: &CVector, n: usize) -> CVector {
    let dim = 1usize << n;
    let full = dim - 1;
    let mut out = Array1::<Complex64>::zeros(dim);
    for a in 0..dim {
        let sign = if a.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        out[a] = psi[full ^ a].conj() * sign;
    }
    out
}

/// State inversion as the alternating sum over padded reductions,
/// `1 - sum_i rho_i + sum_{i<j} rho_ij - ... +/- rho`.
///
/// Works for any local dimension and returns the raw positive operator; its
/// trace is (d-1)^n, so for d > 2 it is not itself a normalized state.
pub fn invert_via_reductions(rho: &QuantumState) -> Result<CMatrix, InversionError> {
    let n = rho.n();
    let d = rho.local_dim();
    let dim = rho.dim();
    let mut acc = Array2::<Complex64>::zeros((dim, dim));
    for bits in 0..1u32 << n {
        let subset: Vec<usize> = (1..=n).filter(|p| bits >> (p - 1) & 1 == 1).collect();
        let sign = if subset.len() % 2 == 0 { 1.0 } else { -1.0 };
        let reduced = state::partial_trace(rho, &subset)?;
        let padded = state::embed_padded(&reduced.density(), &subset, n, d)?;
        acc = acc + padded.mapv(|z| z * sign);
    }
    Ok(acc)
}

/// Per-weight coefficient of the qudit inversion in the normalized expansion
/// `rho~ = ((d-1)^n / d^n) sum_j (1/(1-d))^j P_j`.
pub fn qudit_weight_factor(d: usize, n: usize, j: usize) -> f64 {
    let base = 1.0 / (1.0 - d as f64);
    ((d as f64 - 1.0) / d as f64).powi(n as i32) * base.powi(j as i32)
}

/// Apply the Bloch-space inversion to precomputed weight components
/// (`components[j]` = P_j with `rho = (1/d^n) sum_j P_j`); returns the dense
/// inverted operator. For d = 2 this is the odd-weight sign flip.
pub fn invert_bloch_qudit(components: &[CMatrix], d: usize) -> Result<CMatrix, InversionError> {
    if d < 2 {
        return Err(InversionError::BadLocalDimension(d));
    }
    if components.is_empty() {
        return Err(InversionError::BadComponentCount { expected: 1, got: 0 });
    }
    let n = components.len() - 1;
    let dim = components[0].nrows();
    let mut acc = Array2::<Complex64>::zeros((dim, dim));
    for (j, pj) in components.iter().enumerate() {
        if pj.nrows() != dim || pj.ncols() != dim {
            return Err(StateError::DimensionMismatch { expected: dim, got: pj.nrows() }.into());
        }
        // Factors relative to the state's own 1/d^n normalization.
        let rel = (d as f64 - 1.0).powi((n - j) as i32) * if j % 2 == 0 { 1.0 } else { -1.0 };
        acc = acc + pj.mapv(|z| z * rel / dim as f64);
    }
    Ok(acc)
}

/// Apply a generalized flip to a pure state; the output is normalized but
/// keeps the phase the antiunitary produces.
pub fn apply_general_flip(
    psi: &QuantumState,
    spec: &FlipSpec,
) -> Result<QuantumState, InversionError> {
    if psi.local_dim() != 2 {
        return Err(StateError::QubitsOnly(psi.local_dim()).into());
    }
    let amps = psi.amplitudes()?;
    let n = psi.n();
    let u1 = spec.single_qubit_unitary();
    let mut v: CVector = amps.mapv(|z| z.conj());
    // Apply the same 2x2 unitary on every qubit; qubit q is bit n-q.
    for q in 1..=n {
        let stride = 1usize << (n - q);
        let dim = 1usize << n;
        let mut next = Array1::<Complex64>::zeros(dim);
        for idx in 0..dim {
            let bit = (idx / stride) % 2;
            let partner = if bit == 0 { idx + stride } else { idx - stride };
            let (lo, hi) = if bit == 0 { (idx, partner) } else { (partner, idx) };
            next[idx] = if bit == 0 {
                u1[[0, 0]] * v[lo] + u1[[0, 1]] * v[hi]
            } else {
                u1[[1, 0]] * v[lo] + u1[[1, 1]] * v[hi]
            };
        }
        v = next;
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.mapv_inplace(|z| z / norm);
    Ok(QuantumState::pure_unchecked(n, 2, v))
}

/// Overlap between a qubit state and its inversion.
pub fn overlap_alpha(state: &QuantumState) -> Result<OverlapData, InversionError> {
    if state.local_dim() != 2 {
        return Err(StateError::QubitsOnly(state.local_dim()).into());
    }
    if state.is_pure_repr() {
        let psi = state.amplitudes().expect("pure");
        let tilde = flip_vector(psi, state.n());
        let inner = linalg::inner(&tilde, psi);
        let alpha = inner.norm();
        let phase = if alpha > ALPHA_BAND {
            let mut arg = inner.arg();
            if arg < 0.0 {
                arg += 2.0 * std::f64::consts::PI;
            }
            Some(arg)
        } else {
            None
        };
        Ok(OverlapData { alpha, phase, trace_form: alpha * alpha })
    } else {
        let dm = state.density();
        let tilde = invert_density(&dm, state.n());
        let trace_form = linalg::trace(&dm.dot(&tilde)).re;
        Ok(OverlapData { alpha: trace_form.max(0.0).sqrt(), phase: None, trace_form })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::state::{bloch_decompose, random_mixed_state, random_pure_qudit, random_pure_state};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn ground_state_flips_to_excited() {
        let zero = QuantumState::pure_qubits(1, vec![c(1.0), c(0.0)]).unwrap();
        let flipped = invert_qubit(&zero).unwrap();
        let dm = flipped.density();
        assert!((dm[[1, 1]] - c(1.0)).norm() < 1e-12);
        assert!(dm[[0, 0]].norm() < 1e-12);
    }

    #[test]
    fn bell_state_is_inversion_invariant() {
        let bell = oracle::bell_psi_plus().unwrap();
        let tilde = invert_qubit(&bell).unwrap();
        assert!(linalg::max_abs_diff(&tilde.density(), &bell.density()) < 1e-12);
        let data = overlap_alpha(&bell).unwrap();
        assert!((data.alpha - 1.0).abs() < 1e-12);
    }

    #[test]
    fn odd_qubit_pure_states_are_orthogonal_to_inversion() {
        let psi = random_pure_state(3, 77);
        let rho = psi.density();
        let tilde = invert_qubit(&psi).unwrap().density();
        assert!(linalg::max_abs(&rho.dot(&tilde)) < 1e-10);
        let data = overlap_alpha(&psi).unwrap();
        assert!(data.alpha < 1e-10);
        assert_eq!(data.class(), AlphaClass::Zero);
    }

    #[test]
    fn reduction_sum_matches_operator_form_for_qubits() {
        for seed in 0..3 {
            let rho = random_mixed_state(3, 200 + seed);
            let a = invert_qubit(&rho).unwrap().density();
            let b = invert_via_reductions(&rho).unwrap();
            assert!(linalg::max_abs_diff(&a, &b) < 1e-10);
        }
    }

    #[test]
    fn qutrit_inversion_is_positive_not_pure() {
        let psi = random_pure_qudit(2, 3, 4);
        let inv = invert_via_reductions(&psi).unwrap();
        let eig = linalg::hermitian_eig(&inv).unwrap();
        assert!(*eig.values.last().unwrap() > -1e-9);
        // Trace (d-1)^n = 4 and rank > 1.
        assert!((linalg::trace(&inv).re - 4.0).abs() < 1e-10);
        assert!(eig.values.iter().filter(|v| **v > 1e-8).count() > 1);
    }

    #[test]
    fn single_party_inversion_is_identity_minus_rho() {
        for d in [2usize, 3] {
            let dim = d;
            let m = linalg::identity(dim).mapv(|z| z / dim as f64);
            let rho = QuantumState::mixed_from_matrix(1, d, m.clone()).unwrap();
            let inv = invert_via_reductions(&rho).unwrap();
            let expect = linalg::identity(dim).mapv(|z| z * (d as f64 - 1.0) / d as f64);
            assert!(linalg::max_abs_diff(&inv, &expect) < 1e-12, "d = {d}");
        }
    }

    #[test]
    fn bloch_inversion_flips_odd_weights_only() {
        let rho = random_mixed_state(3, 15);
        let b = bloch_decompose(&rho).unwrap();
        let tilde = invert_qubit(&rho).unwrap();
        let bt = bloch_decompose(&tilde).unwrap();
        for s in crate::pauli::all_strings(3) {
            let sign = if s.weight() % 2 == 1 { -1.0 } else { 1.0 };
            assert!((bt.get(&s) - sign * b.get(&s)).abs() < 1e-10, "{s}");
        }
        // Bloch-space flip agrees with the matrix-level map.
        let flipped = b.flip_odd_signs();
        for s in crate::pauli::all_strings(3) {
            assert!((flipped.get(&s) - bt.get(&s)).abs() < 1e-10);
        }
    }

    #[test]
    fn qudit_weight_factor_values() {
        // d = 2: plain sign alternation relative to 1/2^n.
        for j in 0..4 {
            let rel = qudit_weight_factor(2, 3, j) * 8.0;
            let expect = if j % 2 == 0 { 1.0 } else { -1.0 };
            assert!((rel - expect).abs() < 1e-12);
        }
        // d = 3: each weight step scales by -1/2.
        let r = qudit_weight_factor(3, 2, 1) / qudit_weight_factor(3, 2, 0);
        assert!((r + 0.5).abs() < 1e-12);
    }

    #[test]
    fn bloch_qudit_inversion_matches_reduction_sum() {
        // d = 2 sanity: odd weights negated on the GHZ_3 table.
        let ghz = oracle::ghz(3).unwrap();
        let comps = oracle::weight_components(&ghz).unwrap();
        let inv = invert_bloch_qudit(&comps, 2).unwrap();
        let direct = invert_qubit(&ghz).unwrap().density();
        assert!(linalg::max_abs_diff(&inv, &direct) < 1e-10);
        let binv = crate::state::operator_bloch(&inv).unwrap();
        let b = bloch_decompose(&ghz).unwrap();
        let zz = "ZZI".parse().unwrap();
        let xxx = "XXX".parse().unwrap();
        assert!((binv.get(&zz) * 8.0 - b.get(&zz)).abs() < 1e-10);
        assert!((binv.get(&xxx) * 8.0 + b.get(&xxx)).abs() < 1e-10);

        // d = 3: weight-resolved rescaling equals the reduction sum.
        for seed in [3u64, 9] {
            let rho = random_pure_qudit(2, 3, seed);
            let comps = oracle::weight_components(&rho).unwrap();
            let via_bloch = invert_bloch_qudit(&comps, 3).unwrap();
            let via_reductions = invert_via_reductions(&rho).unwrap();
            assert!(linalg::max_abs_diff(&via_bloch, &via_reductions) < 1e-10);
        }
    }

    #[test]
    fn spin_flip_spec_reproduces_inversion() {
        let psi = random_pure_state(3, 21);
        let a = apply_general_flip(&psi, &FlipSpec::spin_flip()).unwrap();
        let b = invert_qubit(&psi).unwrap();
        assert!(linalg::max_abs_diff(&a.density(), &b.density()) < 1e-12);
    }

    #[test]
    fn pure_transposition_flip_fixes_real_states() {
        let spec = FlipSpec::new([1.0, 0.0, 0.0, 0.0]).unwrap();
        let ghz = oracle::ghz(3).unwrap();
        let out = apply_general_flip(&ghz, &spec).unwrap();
        // Real amplitudes: unchanged up to a global phase.
        assert!((out.fidelity(&ghz) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn general_flip_preserves_norm_and_purity() {
        let mut rng = crate::rng::SeededRng::new(5);
        for seed in 0..5 {
            let mut a = [rng.normal(), rng.normal(), rng.normal(), rng.normal()];
            let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            a.iter_mut().for_each(|x| *x /= norm);
            let spec = FlipSpec::new(a).unwrap();
            let psi = random_pure_state(2, 400 + seed);
            let out = apply_general_flip(&psi, &spec).unwrap();
            let n2: f64 = out.amplitudes().unwrap().iter().map(|z| z.norm_sqr()).sum();
            assert!((n2 - 1.0).abs() < 1e-12);
            assert!((out.purity() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn flip_involution_and_adjoint_sign() {
        for n in 1..=4 {
            let psi = random_pure_state(n, 600 + n as u64);
            let amps = psi.amplitudes().unwrap();
            let twice = flip_vector(&flip_vector(amps, n), n);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let dev: f64 = twice
                .iter()
                .zip(amps.iter())
                .map(|(a, b)| (a - b * sign).norm())
                .fold(0.0, f64::max);
            assert!(dev < 1e-12, "F^2 != (-1)^n at n = {n}");

            // Unitary part M = (i sigma_y)^n satisfies M^T = (-1)^n M.
            let mut m = Array2::<Complex64>::zeros((1 << n, 1 << n));
            let full = (1usize << n) - 1;
            for a in 0..=full {
                let s = if a.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                m[[a, full ^ a]] = c(s);
            }
            let dev = linalg::max_abs_diff(&m.t().to_owned(), &m.mapv(|z| z * sign));
            assert!(dev < 1e-15);
        }
    }

    #[test]
    fn overlap_examples() {
        let ghz4 = oracle::ghz(4).unwrap();
        assert!((overlap_alpha(&ghz4).unwrap().alpha - 1.0).abs() < 1e-12);
        assert_eq!(overlap_alpha(&ghz4).unwrap().class(), AlphaClass::One);

        let w4 = oracle::w(4).unwrap();
        assert!(overlap_alpha(&w4).unwrap().alpha < 1e-12);

        let psi5 = random_pure_state(5, 1);
        assert!(overlap_alpha(&psi5).unwrap().alpha < 1e-10);

        // Pure-state consistency alpha^2 = Tr(rho rho~).
        let psi4 = random_pure_state(4, 2);
        let data = overlap_alpha(&psi4).unwrap();
        let dm = psi4.density();
        let tilde = invert_density(&dm, 4);
        let tf = linalg::trace(&dm.dot(&tilde)).re;
        assert!((data.alpha * data.alpha - tf).abs() < 1e-10);
    }

    #[test]
    fn non_unit_flip_vec_rejected() {
        assert!(FlipSpec::new([1.0, 0.0, 0.0, 0.5]).is_err());
    }
}
