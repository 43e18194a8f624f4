//! Hamiltonians with prescribed weight parity, exact unitary evolution, and
//! the conserved quantities that parity forces.
//!
//! A Hamiltonian built from odd-weight Pauli terms generates evolution that
//! cannot mix weight parities: nested commutators with an odd generator keep
//! the parity of the observable, the state inversion commutes with the
//! evolution, and the overlap Tr(rho rho~) is a constant of motion. Evolution
//! itself goes through the spectral decomposition of the materialized
//! Hamiltonian; the commutator series is implemented only as a finite-order
//! parity checker.

use std::collections::BTreeMap;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::DynamicsError;
use crate::inversion;
use crate::linalg::{self, CMatrix};
use crate::pauli::{self, PauliString};
use crate::rng::SeededRng;
use crate::state::{BlochVector, QuantumState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityClass {
    OddOnly,
    EvenOnly,
    Mixed,
}

impl ParityClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            ParityClass::OddOnly => "odd-only",
            ParityClass::EvenOnly => "even-only",
            ParityClass::Mixed => "mixed",
        }
    }
}

/// Hermitian operator as a real combination of canonical Pauli strings.
#[derive(Debug, Clone)]
pub struct PauliHamiltonian {
    n: usize,
    terms: BTreeMap<PauliString, f64>,
    parity_class: ParityClass,
}

impl PauliHamiltonian {
    pub fn from_terms(n: usize, terms: BTreeMap<PauliString, f64>) -> Result<Self, DynamicsError> {
        if terms.is_empty() {
            return Err(DynamicsError::EmptyTermSet { parity: "any", max_body: n, n });
        }
        for p in terms.keys() {
            if p.n() != n {
                return Err(crate::error::PauliError::SizeMismatch(p.n(), n).into());
            }
            if !p.is_canonical() {
                return Err(crate::error::PauliError::BadLabel(p.to_string()).into());
            }
        }
        let all_odd = terms.keys().all(|p| p.weight() % 2 == 1);
        let all_even = terms.keys().all(|p| p.weight() % 2 == 0);
        let parity_class = if all_odd {
            ParityClass::OddOnly
        } else if all_even {
            ParityClass::EvenOnly
        } else {
            ParityClass::Mixed
        };
        Ok(PauliHamiltonian { n, terms, parity_class })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parity_class(&self) -> ParityClass {
        self.parity_class
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, f64)> {
        self.terms.iter().map(|(p, &c)| (p, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn materialize(&self) -> Result<CMatrix, DynamicsError> {
        if self.n > pauli::DENSE_QUBIT_CAP {
            return Err(crate::error::PauliError::DenseCapExceeded {
                n: self.n,
                cap: pauli::DENSE_QUBIT_CAP,
            }
            .into());
        }
        let dim = 1usize << self.n;
        let mut m = Array2::<Complex64>::zeros((dim, dim));
        for (p, &c) in &self.terms {
            let scalar = pauli::i_power(p.phase_exp()) * c;
            let x = p.x_bits() as usize;
            let z = p.z_bits() as usize;
            for col in 0..dim {
                let sign = if (z & col).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                m[[col ^ x, col]] += scalar * sign;
            }
        }
        Ok(m)
    }
}

/// I.i.d. standard-normal coefficients on every string of the requested
/// weight parity with weight <= max_body; deterministic per seed.
pub fn random_hamiltonian(
    n: usize,
    parity: Parity,
    max_body: usize,
    seed: u64,
) -> Result<PauliHamiltonian, DynamicsError> {
    let start = match parity {
        Parity::Odd => 1,
        Parity::Even => 2,
    };
    let mut strings = Vec::new();
    let mut w = start;
    while w <= max_body.min(n) {
        strings.extend(pauli::strings_of_weight(n, w));
        w += 2;
    }
    if strings.is_empty() {
        return Err(DynamicsError::EmptyTermSet {
            parity: match parity {
                Parity::Odd => "odd",
                Parity::Even => "even",
            },
            max_body,
            n,
        });
    }
    let mut rng = SeededRng::new(seed);
    let terms: BTreeMap<PauliString, f64> =
        strings.into_iter().map(|p| (p, rng.normal())).collect();
    PauliHamiltonian::from_terms(n, terms)
}

/// Spectral propagator for one Hamiltonian, reusable across time points.
pub struct Propagator {
    n: usize,
    matrix: CMatrix,
    eig: linalg::HermitianEig,
}

impl Propagator {
    pub fn new(h: &PauliHamiltonian) -> Result<Self, DynamicsError> {
        let matrix = h.materialize()?;
        let eig = linalg::hermitian_eig(&matrix)?;
        Ok(Propagator { n: h.n(), matrix, eig })
    }

    pub fn hamiltonian_matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Largest |eigenvalue| of H.
    pub fn spectral_radius(&self) -> f64 {
        self.eig.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// U = exp(-i H t), checked unitary to 1e-10.
    pub fn unitary(&self, t: f64) -> Result<CMatrix, DynamicsError> {
        let dim = 1usize << self.n;
        let v = &self.eig.vectors;
        let mut phased = v.clone();
        for (k, &lam) in self.eig.values.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -lam * t);
            for row in 0..dim {
                phased[[row, k]] *= phase;
            }
        }
        let u = phased.dot(&linalg::adjoint(v));
        let dev = linalg::max_abs_diff(&u.dot(&linalg::adjoint(&u)), &linalg::identity(dim));
        if dev > 1e-10 {
            return Err(DynamicsError::UnitarityLoss(dev));
        }
        Ok(u)
    }

    pub fn evolve(&self, state: &QuantumState, t: f64) -> Result<QuantumState, DynamicsError> {
        if state.dim() != 1usize << self.n || state.local_dim() != 2 {
            return Err(crate::error::StateError::DimensionMismatch {
                expected: 1usize << self.n,
                got: state.dim(),
            }
            .into());
        }
        let u = self.unitary(t)?;
        if state.is_pure_repr() {
            let psi = state.amplitudes().expect("pure");
            Ok(QuantumState::pure_unchecked(self.n, 2, u.dot(psi)))
        } else {
            let dm = state.density();
            Ok(QuantumState::mixed_unchecked(self.n, 2, u.dot(&dm).dot(&linalg::adjoint(&u))))
        }
    }
}

/// Evolve a state under exp(-i H t).
pub fn evolve(
    state: &QuantumState,
    h: &PauliHamiltonian,
    t: f64,
) -> Result<QuantumState, DynamicsError> {
    Propagator::new(h)?.evolve(state, t)
}

/// Evolution record along a time grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<QuantumState>,
    pub alpha_series: Vec<f64>,
    pub ghz_fidelity_series: Option<Vec<f64>>,
    pub energy_series: Vec<f64>,
}

impl Trajectory {
    /// Largest |alpha^2(t) - alpha^2(0)| along the trajectory.
    pub fn alpha_sq_drift(&self) -> f64 {
        let a0 = self.alpha_series[0] * self.alpha_series[0];
        self.alpha_series.iter().map(|a| (a * a - a0).abs()).fold(0.0, f64::max)
    }
}

/// Default grid: `steps` uniform points on [0, 2 pi / ||H||], covering one
/// characteristic oscillation.
pub fn default_times(prop: &Propagator, steps: usize) -> Vec<f64> {
    let radius = prop.spectral_radius().max(1e-12);
    let span = 2.0 * std::f64::consts::PI / radius;
    let steps = steps.max(2);
    (0..steps).map(|k| span * k as f64 / (steps - 1) as f64).collect()
}

/// Evolve and record alpha (and optionally GHZ fidelity) along `times`.
pub fn alpha_trajectory(
    state: &QuantumState,
    h: &PauliHamiltonian,
    times: &[f64],
    track_ghz: bool,
) -> Result<Trajectory, DynamicsError> {
    if times.windows(2).any(|w| w[1] <= w[0]) || times.is_empty() {
        return Err(DynamicsError::BadTimeGrid);
    }
    let prop = Propagator::new(h)?;
    let mut states = Vec::with_capacity(times.len());
    let mut alpha_series = Vec::with_capacity(times.len());
    let mut energy_series = Vec::with_capacity(times.len());
    let mut ghz_series = if track_ghz { Some(Vec::with_capacity(times.len())) } else { None };
    for &t in times {
        let evolved = prop.evolve(state, t)?;
        alpha_series.push(overlap(&evolved));
        energy_series.push(evolved.expectation(prop.hamiltonian_matrix()));
        if let Some(series) = ghz_series.as_mut() {
            series.push(ghz_fidelity(&evolved));
        }
        states.push(evolved);
    }
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        alpha_series,
        ghz_fidelity_series: ghz_series,
        energy_series,
    })
}

/// alpha of an evolved qubit state, through the representation-appropriate
/// inversion primitive.
fn overlap(state: &QuantumState) -> f64 {
    match state.amplitudes() {
        Ok(psi) => {
            let n = (state.dim().trailing_zeros()) as usize;
            linalg::inner(&inversion::flip_vector(psi, n), psi).norm()
        }
        Err(_) => {
            let dm = state.density();
            let n = (state.dim().trailing_zeros()) as usize;
            let tilde = inversion::invert_density(&dm, n);
            linalg::trace(&dm.dot(&tilde)).re.max(0.0).sqrt()
        }
    }
}

/// |<GHZ_n|psi>|^2, or <GHZ|rho|GHZ> for mixed states.
pub fn ghz_fidelity(state: &QuantumState) -> f64 {
    let dim = state.dim();
    match state.amplitudes() {
        Ok(psi) => (psi[0] + psi[dim - 1]).norm_sqr() / 2.0,
        Err(_) => {
            let dm = state.density();
            (dm[[0, 0]] + dm[[0, dim - 1]] + dm[[dim - 1, 0]] + dm[[dim - 1, dim - 1]]).re / 2.0
        }
    }
}

/// GHZ fidelity, n-concurrence, and the algebraic bound between them.
#[derive(Debug, Clone, Copy)]
pub struct GhzBound {
    pub ghz_fidelity: f64,
    pub cn: f64,
    pub bound_ok: bool,
}

/// Evaluate `C_n >= 2F - 1` for a pure state (F the GHZ fidelity); the bound
/// is the even-n statement, the quantities are computed for any n.
pub fn ghz_bound(psi: &QuantumState) -> Result<GhzBound, DynamicsError> {
    if !psi.is_pure_repr() {
        return Err(crate::error::StateError::PureRequired.into());
    }
    if psi.local_dim() != 2 {
        return Err(crate::error::StateError::QubitsOnly(psi.local_dim()).into());
    }
    let f = ghz_fidelity(psi);
    let cn = overlap(psi);
    Ok(GhzBound { ghz_fidelity: f, cn, bound_ok: cn >= 2.0 * f - 1.0 - 1e-9 })
}

/// Outcome of the Heisenberg-picture parity check.
#[derive(Debug, Clone)]
pub struct ParityReport {
    pub observable_parity: Parity,
    /// Largest Bloch coefficient of the opposite parity after evolution.
    pub evolved_leakage: f64,
    pub parity_preserved: bool,
    /// Per-order parity verdicts for the nested commutators [H, P]_m,
    /// m = 1..=m_max (order 0 is the observable itself).
    pub commutator_parity_ok: Vec<bool>,
}

/// Evolve an observable under an odd-only Hamiltonian and verify that its
/// weight parity survives, both exactly (nested commutators up to `m_max`,
/// computed symbolically) and at matrix level for the finite time `t`.
pub fn heisenberg_parity_check(
    h: &PauliHamiltonian,
    p: &BlochVector,
    t: f64,
    m_max: usize,
) -> Result<ParityReport, DynamicsError> {
    if h.parity_class() != ParityClass::OddOnly {
        return Err(DynamicsError::OddOnlyRequired);
    }
    let odd_mass = p.parity_mass(true);
    let even_mass = p.parity_mass(false);
    let observable_parity = if odd_mass > 0.0 && even_mass == 0.0 {
        Parity::Odd
    } else if even_mass > 0.0 && odd_mass == 0.0 {
        Parity::Even
    } else {
        return Err(DynamicsError::MixedParityObservable);
    };

    // Matrix-level conjugation P(t) = U P U^dagger.
    let prop = Propagator::new(h)?;
    let u = prop.unitary(t)?;
    let pm = p.materialize().map_err(DynamicsError::State)?;
    let pt = u.dot(&pm).dot(&linalg::adjoint(&u));
    let scan = crate::state::operator_bloch(&pt).map_err(DynamicsError::State)?;
    let evolved_leakage = scan.parity_mass(observable_parity == Parity::Even);
    let parity_preserved = evolved_leakage <= 1e-9;

    // Symbolic nested commutators: [H, P]_m keeps the parity of P when H is odd.
    let mut current: BTreeMap<PauliString, Complex64> =
        p.terms().map(|(s, c)| (*s, Complex64::new(c, 0.0))).collect();
    let mut commutator_parity_ok = Vec::with_capacity(m_max);
    let want_odd = observable_parity == Parity::Odd;
    for _ in 0..m_max {
        let mut next: BTreeMap<PauliString, Complex64> = BTreeMap::new();
        for (hp, hc) in h.terms() {
            for (sp, sc) in &current {
                if let Some(comm) = hp.commutator(sp).map_err(DynamicsError::Pauli)? {
                    let coeff = sc * hc * comm.scalar();
                    let entry = next.entry(comm.string).or_insert(Complex64::new(0.0, 0.0));
                    *entry += coeff;
                }
            }
        }
        let peak = next.values().map(|c| c.norm()).fold(0.0, f64::max);
        next.retain(|_, c| c.norm() > 1e-12 * peak.max(1.0));
        let ok = next.keys().all(|s| (s.weight() % 2 == 1) == want_odd);
        commutator_parity_ok.push(ok);
        current = next;
        if current.is_empty() {
            // Remaining orders vanish identically.
            while commutator_parity_ok.len() < m_max {
                commutator_parity_ok.push(true);
            }
            break;
        }
    }

    Ok(ParityReport { observable_parity, evolved_leakage, parity_preserved, commutator_parity_ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::state::{random_mixed_state, random_pure_state};

    #[test]
    fn random_hamiltonian_term_counts() {
        // n = 3, odd weights <= 3: 9 weight-1 + 27 weight-3 strings.
        let h = random_hamiltonian(3, Parity::Odd, 3, 1).unwrap();
        assert_eq!(h.len(), 36);
        assert_eq!(h.parity_class(), ParityClass::OddOnly);

        // n = 2, even weights <= 2: the 9 weight-2 strings.
        let h = random_hamiltonian(2, Parity::Even, 2, 1).unwrap();
        assert_eq!(h.len(), 9);
        assert_eq!(h.parity_class(), ParityClass::EvenOnly);

        // No even strings of weight <= 1.
        assert!(matches!(
            random_hamiltonian(3, Parity::Even, 1, 1),
            Err(DynamicsError::EmptyTermSet { .. })
        ));
    }

    #[test]
    fn random_hamiltonian_is_seed_deterministic() {
        let a = random_hamiltonian(3, Parity::Odd, 3, 9).unwrap();
        let b = random_hamiltonian(3, Parity::Odd, 3, 9).unwrap();
        let av: Vec<_> = a.terms().map(|(p, c)| (*p, c)).collect();
        let bv: Vec<_> = b.terms().map(|(p, c)| (*p, c)).collect();
        assert_eq!(av, bv);
    }

    #[test]
    fn zero_time_evolution_is_identity() {
        let h = random_hamiltonian(3, Parity::Odd, 3, 2).unwrap();
        let psi = random_pure_state(3, 5);
        let out = evolve(&psi, &h, 0.0).unwrap();
        assert!((out.fidelity(&psi) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_qubit_z_rotation_closed_form() {
        // Under H = sigma_z: <sx(t)> = cos 2t, <sy(t)> = sin 2t from |+>.
        let mut terms = BTreeMap::new();
        terms.insert("Z".parse::<PauliString>().unwrap(), 1.0);
        let h = PauliHamiltonian::from_terms(1, terms).unwrap();
        let s = 1.0 / 2.0_f64.sqrt();
        let plus =
            QuantumState::pure_qubits(1, vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)])
                .unwrap();
        let sx = "X".parse::<PauliString>().unwrap().to_matrix().unwrap();
        let sy = "Y".parse::<PauliString>().unwrap().to_matrix().unwrap();
        for &t in &[0.3, std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_2, 1.9] {
            let out = evolve(&plus, &h, t).unwrap();
            assert!((out.expectation(&sx) - (2.0 * t).cos()).abs() < 1e-10);
            assert!((out.expectation(&sy) - (2.0 * t).sin()).abs() < 1e-10);
        }
    }

    #[test]
    fn evolution_is_reversible() {
        let h = random_hamiltonian(3, Parity::Odd, 3, 3).unwrap();
        let psi = random_pure_state(3, 6);
        let there = evolve(&psi, &h, 0.83).unwrap();
        let back = evolve(&there, &h, -0.83).unwrap();
        assert!((back.fidelity(&psi) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn alpha_constant_for_w4_and_ghz4_under_odd_h() {
        let prop_times: Vec<f64> = (0..50).map(|k| k as f64 * 0.11).collect();
        for seed in [1u64, 2] {
            let h = random_hamiltonian(4, Parity::Odd, 3, seed).unwrap();
            let w4 = oracle::w(4).unwrap();
            let traj = alpha_trajectory(&w4, &h, &prop_times, false).unwrap();
            assert!(traj.alpha_series.iter().all(|a| *a < 1e-9), "W_4 keeps alpha = 0");
            let ghz4 = oracle::ghz(4).unwrap();
            let traj = alpha_trajectory(&ghz4, &h, &prop_times, false).unwrap();
            assert!(traj.alpha_sq_drift() < 1e-9, "GHZ_4 keeps alpha = 1");
            assert!((traj.alpha_series[0] - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn alpha_departs_under_even_hamiltonian() {
        // GHZ_4 under XXII: alpha(t) = |cos 2t| in closed form.
        let mut terms = BTreeMap::new();
        terms.insert("XXII".parse::<PauliString>().unwrap(), 1.0);
        let h = PauliHamiltonian::from_terms(4, terms).unwrap();
        let ghz4 = oracle::ghz(4).unwrap();
        let times: Vec<f64> = (0..8).map(|k| 0.05 + k as f64 * 0.17).collect();
        let traj = alpha_trajectory(&ghz4, &h, &times, false).unwrap();
        for (&t, &a) in times.iter().zip(&traj.alpha_series) {
            assert!((a - (2.0 * t).cos().abs()).abs() < 1e-9, "t = {t}");
        }
        assert!(traj.alpha_sq_drift() > 0.1);
    }

    #[test]
    fn energy_is_conserved() {
        let h = random_hamiltonian(4, Parity::Odd, 3, 8).unwrap();
        let rho = random_mixed_state(4, 44);
        let times: Vec<f64> = (0..20).map(|k| k as f64 * 0.21).collect();
        let traj = alpha_trajectory(&rho, &h, &times, false).unwrap();
        let e0 = traj.energy_series[0];
        assert!(traj.energy_series.iter().all(|e| (e - e0).abs() < 1e-9));
    }

    #[test]
    fn heisenberg_parity_odd_and_even_observables() {
        let h = random_hamiltonian(3, Parity::Odd, 3, 12).unwrap();
        // Odd observable: a single weight-1 string.
        let mut p = BlochVector::new(3);
        p.set("XII".parse().unwrap(), 1.0).unwrap();
        let report = heisenberg_parity_check(&h, &p, 0.7, 6).unwrap();
        assert_eq!(report.observable_parity, Parity::Odd);
        assert!(report.parity_preserved, "leakage {:.3e}", report.evolved_leakage);
        assert!(report.commutator_parity_ok.iter().all(|ok| *ok));

        // Even observable: a weight-2 string.
        let mut p = BlochVector::new(3);
        p.set("ZZI".parse().unwrap(), 1.0).unwrap();
        let report = heisenberg_parity_check(&h, &p, 0.7, 6).unwrap();
        assert_eq!(report.observable_parity, Parity::Even);
        assert!(report.parity_preserved);
        assert!(report.commutator_parity_ok.iter().all(|ok| *ok));
    }

    #[test]
    fn heisenberg_rejects_mixed_parity_observable() {
        let h = random_hamiltonian(3, Parity::Odd, 3, 12).unwrap();
        let mut p = BlochVector::new(3);
        p.set("XII".parse().unwrap(), 1.0).unwrap();
        p.set("ZZI".parse().unwrap(), 0.5).unwrap();
        assert!(matches!(
            heisenberg_parity_check(&h, &p, 0.7, 3),
            Err(DynamicsError::MixedParityObservable)
        ));
    }

    #[test]
    fn ghz_bound_examples() {
        let b = ghz_bound(&oracle::ghz(4).unwrap()).unwrap();
        assert!((b.ghz_fidelity - 1.0).abs() < 1e-12);
        assert!((b.cn - 1.0).abs() < 1e-12);
        assert!(b.bound_ok);

        let b = ghz_bound(&oracle::w(4).unwrap()).unwrap();
        assert!(b.ghz_fidelity < 1e-12);
        assert!(b.cn < 1e-12);
        assert!(b.bound_ok);
    }

    #[test]
    fn default_grid_spans_one_oscillation() {
        let h = random_hamiltonian(2, Parity::Odd, 1, 3).unwrap();
        let prop = Propagator::new(&h).unwrap();
        let times = default_times(&prop, 50);
        assert_eq!(times.len(), 50);
        assert_eq!(times[0], 0.0);
        assert!((times[49] - 2.0 * std::f64::consts::PI / prop.spectral_radius()).abs() < 1e-12);
        assert!(times.windows(2).all(|w| w[1] > w[0]));
    }
}
