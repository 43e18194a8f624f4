//! Brute-force oracles and reference state constructors.
//!
//! Everything here deliberately takes the slow, obvious road: Bloch
//! coefficients through explicit dense tensor products, weight components
//! through inclusion-exclusion over all reductions. These paths share no
//! machinery with the production implementations they validate.

use ndarray::{arr2, Array2};
use num_complex::Complex64;

use crate::error::StateError;
use crate::linalg::CMatrix;
use crate::pauli::PauliString;
use crate::state::{self, BlochVector, QuantumState};

/// Cap for the dense-tensor-product Bloch oracle.
pub const ORACLE_CAP: usize = 6;

/// Reference state family.
#[derive(Debug, Clone, PartialEq)]
pub enum NamedState {
    /// (|0..0> + |1..1>) / sqrt(2)
    Ghz { n: usize },
    /// Symmetric single-excitation state, amplitudes 1/sqrt(n).
    W { n: usize },
    /// |Psi+> = (|01> + |10>) / sqrt(2)
    Bell,
    /// Tensor product of Haar factors across the given cut, parties 1-based.
    BiseparableRandom { n: usize, cut: Vec<usize>, seed: u64 },
}

/// Construct the exact vector for a named state.
pub fn make_named(spec: &NamedState) -> Result<QuantumState, StateError> {
    match spec {
        NamedState::Ghz { n } => ghz(*n),
        NamedState::W { n } => w(*n),
        NamedState::Bell => bell_psi_plus(),
        NamedState::BiseparableRandom { n, cut, seed } => biseparable_random(*n, cut, *seed),
    }
}

pub fn ghz(n: usize) -> Result<QuantumState, StateError> {
    if n == 0 {
        return Err(StateError::BadParty(0, 0));
    }
    let dim = 1usize << n;
    let s = Complex64::new(1.0 / 2.0_f64.sqrt(), 0.0);
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    amps[0] = s;
    amps[dim - 1] = s;
    QuantumState::pure_qubits(n, amps)
}

pub fn w(n: usize) -> Result<QuantumState, StateError> {
    if n == 0 {
        return Err(StateError::BadParty(0, 0));
    }
    let dim = 1usize << n;
    let s = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    for k in 0..n {
        amps[1usize << k] = s;
    }
    QuantumState::pure_qubits(n, amps)
}

pub fn bell_psi_plus() -> Result<QuantumState, StateError> {
    let s = Complex64::new(1.0 / 2.0_f64.sqrt(), 0.0);
    let z = Complex64::new(0.0, 0.0);
    QuantumState::pure_qubits(2, vec![z, s, s, z])
}

/// |phi_M> (x) |chi_Mbar> with Haar factors; `cut` lists the parties of M.
pub fn biseparable_random(n: usize, cut: &[usize], seed: u64) -> Result<QuantumState, StateError> {
    let mut m: Vec<usize> = cut.to_vec();
    m.sort_unstable();
    m.dedup();
    if m.len() != cut.len() || m.is_empty() || m.len() >= n {
        return Err(StateError::BadParty(0, n));
    }
    for &p in &m {
        if p == 0 || p > n {
            return Err(StateError::BadParty(p, n));
        }
    }
    let rest: Vec<usize> = (1..=n).filter(|p| !m.contains(p)).collect();
    let phi = state::random_pure_state(m.len(), seed);
    let chi = state::random_pure_state(rest.len(), seed.wrapping_add(0x9e3779b97f4a7c15));
    let phi_amps = phi.amplitudes().expect("pure");
    let chi_amps = chi.amplitudes().expect("pure");

    let dim = 1usize << n;
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    for (full, amp) in amps.iter_mut().enumerate() {
        let mut a = 0usize;
        for &p in &m {
            a = (a << 1) | ((full >> (n - p)) & 1);
        }
        let mut b = 0usize;
        for &p in &rest {
            b = (b << 1) | ((full >> (n - p)) & 1);
        }
        *amp = phi_amps[a] * chi_amps[b];
    }
    QuantumState::pure_qubits(n, amps)
}

fn letter_matrix(code: usize) -> Array2<Complex64> {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match code {
        0 => arr2(&[[one, z], [z, one]]),
        1 => arr2(&[[z, one], [one, z]]),
        2 => arr2(&[[z, -i], [i, z]]),
        _ => arr2(&[[one, z], [z, -one]]),
    }
}

fn dense_kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::<Complex64>::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            for k in 0..br {
                for l in 0..bc {
                    out[[i * br + k, j * bc + l]] = a[[i, j]] * b[[k, l]];
                }
            }
        }
    }
    out
}

/// Dense realization of a string by repeated Kronecker products; used only to
/// cross-check the sparse production path.
pub fn dense_string_matrix(p: &PauliString) -> CMatrix {
    let mut m = letter_matrix(letter_code(p, 1));
    for q in 2..=p.n() {
        m = dense_kron(&m, &letter_matrix(letter_code(p, q)));
    }
    m
}

fn letter_code(p: &PauliString, qubit: usize) -> usize {
    use crate::pauli::PauliLetter::*;
    match p.letter(qubit) {
        I => 0,
        X => 1,
        Y => 2,
        Z => 3,
    }
}

/// Naive trace-based Bloch extraction: one dense matrix per string.
pub fn oracle_bloch(rho: &QuantumState) -> Result<BlochVector, StateError> {
    if rho.local_dim() != 2 {
        return Err(StateError::QubitsOnly(rho.local_dim()));
    }
    let n = rho.n();
    if n > ORACLE_CAP {
        return Err(StateError::CapExceeded { n, cap: ORACLE_CAP });
    }
    let dm = rho.density();
    let dim = 1usize << n;
    let mut out = BlochVector::new(n);
    for p in crate::pauli::all_strings(n) {
        let sigma = dense_string_matrix(&p);
        let mut tr = Complex64::new(0.0, 0.0);
        for i in 0..dim {
            for j in 0..dim {
                tr += sigma[[i, j]] * dm[[j, i]];
            }
        }
        out.set(p, tr.re)?;
    }
    Ok(out)
}

/// Weight components P_0..P_n of an n-qudit operator, normalized so that
/// `rho = (1/d^n) sum_j P_j`, obtained by inclusion-exclusion over padded
/// reductions.
pub fn weight_components(rho: &QuantumState) -> Result<Vec<CMatrix>, StateError> {
    let n = rho.n();
    let d = rho.local_dim();
    if n > ORACLE_CAP {
        return Err(StateError::CapExceeded { n, cap: ORACLE_CAP });
    }
    let dim = rho.dim();
    let dn = dim as f64;

    // B_M = (rho_M (x) 1) / d^{n-|M|} for every subset M.
    let subsets: Vec<Vec<usize>> =
        (0..1u32 << n).map(|bits| (1..=n).filter(|p| bits >> (p - 1) & 1 == 1).collect()).collect();
    let mut b: Vec<CMatrix> = Vec::with_capacity(subsets.len());
    for m in &subsets {
        let reduced = state::partial_trace(rho, m)?;
        let padded = state::embed_padded(&reduced.density(), m, n, d)?;
        let scale = 1.0 / (d as f64).powi((n - m.len()) as i32);
        b.push(padded.mapv(|z| z * scale));
    }

    // A_S = sum_{M subseteq S} (-1)^{|S|-|M|} B_M, then P_j = d^n sum_{|S|=j} A_S.
    let mut components = vec![Array2::<Complex64>::zeros((dim, dim)); n + 1];
    for (si, s) in subsets.iter().enumerate() {
        let s_bits = si as u32;
        let mut a = Array2::<Complex64>::zeros((dim, dim));
        for (mi, m) in subsets.iter().enumerate() {
            let m_bits = mi as u32;
            if m_bits & s_bits == m_bits {
                let sign = if (s.len() - m.len()) % 2 == 0 { 1.0 } else { -1.0 };
                a = a + b[mi].mapv(|z| z * sign);
            }
        }
        components[s.len()] = components[s.len()].clone() + a;
    }
    for comp in &mut components {
        comp.mapv_inplace(|z| z * dn);
    }
    Ok(components)
}
