//! Text file formats for states, Bloch vectors and Hamiltonians.
//!
//! Both formats are JSON. A state file holds `kind` ("pure" or "mixed"),
//! `n`, `d`, and either `vector` (a list of [re, im] pairs of length d^n) or
//! `matrix` (d^n rows of [re, im] pairs). A Bloch file holds `n` plus a list
//! of `{pauli, coeff}` terms with labels over IXYZ; Hamiltonian files use the
//! same grammar. Terms are written sorted by (weight, label) and numbers
//! round-trip losslessly. Parsers reject non-finite values, duplicate terms
//! and anything violating the state invariants.

use std::collections::BTreeMap;
use std::path::Path;

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::PauliHamiltonian;
use crate::error::IoError;
use crate::state::{BlochVector, QuantumState};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub kind: String,
    pub n: usize,
    pub d: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlochTermFile {
    pub pauli: String,
    pub coeff: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlochFile {
    pub n: usize,
    pub terms: Vec<BlochTermFile>,
}

impl StateFile {
    pub fn from_state(state: &QuantumState) -> Self {
        match state.amplitudes() {
            Ok(v) => StateFile {
                kind: "pure".into(),
                n: state.n(),
                d: state.local_dim(),
                vector: Some(v.iter().map(|z| [z.re, z.im]).collect()),
                matrix: None,
            },
            Err(_) => {
                let dm = state.density();
                let rows = (0..dm.nrows())
                    .map(|i| (0..dm.ncols()).map(|j| [dm[[i, j]].re, dm[[i, j]].im]).collect())
                    .collect();
                StateFile {
                    kind: "mixed".into(),
                    n: state.n(),
                    d: state.local_dim(),
                    vector: None,
                    matrix: Some(rows),
                }
            }
        }
    }

    pub fn into_state(self) -> Result<QuantumState, IoError> {
        match (self.kind.as_str(), self.vector, self.matrix) {
            ("pure", Some(v), None) => {
                check_finite(v.iter().flatten())?;
                let amps: Vec<Complex64> =
                    v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect();
                Ok(QuantumState::pure_from_amplitudes(self.n, self.d, amps)?)
            }
            ("mixed", None, Some(rows)) => {
                check_finite(rows.iter().flatten().flatten())?;
                let dim = rows.len();
                if rows.iter().any(|r| r.len() != dim) {
                    return Err(IoError::BadStateFile("matrix rows have uneven length".into()));
                }
                let mut m = Array2::<Complex64>::zeros((dim, dim));
                for (i, row) in rows.iter().enumerate() {
                    for (j, &[re, im]) in row.iter().enumerate() {
                        m[[i, j]] = Complex64::new(re, im);
                    }
                }
                Ok(QuantumState::mixed_from_matrix(self.n, self.d, m)?)
            }
            ("pure", _, _) => Err(IoError::BadStateFile("pure state needs `vector` only".into())),
            ("mixed", _, _) => Err(IoError::BadStateFile("mixed state needs `matrix` only".into())),
            (other, _, _) => {
                Err(IoError::BadStateFile(format!("unknown kind {other:?} (pure|mixed)")))
            }
        }
    }
}

impl BlochFile {
    pub fn from_bloch(b: &BlochVector) -> Self {
        let mut terms: Vec<BlochTermFile> =
            b.terms().map(|(p, c)| BlochTermFile { pauli: p.label(), coeff: c }).collect();
        terms.sort_by(|a, b| {
            let wa = weight_of_label(&a.pauli);
            let wb = weight_of_label(&b.pauli);
            wa.cmp(&wb).then_with(|| a.pauli.cmp(&b.pauli))
        });
        BlochFile { n: b.n(), terms }
    }

    pub fn from_hamiltonian(h: &PauliHamiltonian) -> Self {
        let mut terms: Vec<BlochTermFile> =
            h.terms().map(|(p, c)| BlochTermFile { pauli: p.label(), coeff: c }).collect();
        terms.sort_by(|a, b| {
            let wa = weight_of_label(&a.pauli);
            let wb = weight_of_label(&b.pauli);
            wa.cmp(&wb).then_with(|| a.pauli.cmp(&b.pauli))
        });
        BlochFile { n: h.n(), terms }
    }

    pub fn into_bloch(self) -> Result<BlochVector, IoError> {
        let mut out = BlochVector::new(self.n);
        let mut seen = BTreeMap::new();
        for term in &self.terms {
            if !term.coeff.is_finite() {
                return Err(IoError::NonFinite);
            }
            let p: crate::pauli::PauliString = term.pauli.parse()?;
            if p.n() != self.n {
                return Err(IoError::BadBlochFile(format!(
                    "term {} has length {}, file says n = {}",
                    term.pauli,
                    p.n(),
                    self.n
                )));
            }
            if seen.insert(p, ()).is_some() {
                return Err(IoError::BadBlochFile(format!("duplicate term {}", term.pauli)));
            }
            out.set(p, term.coeff)?;
        }
        Ok(out)
    }

    pub fn into_hamiltonian(self) -> Result<PauliHamiltonian, IoError> {
        let n = self.n;
        let b = self.into_bloch()?;
        let terms: BTreeMap<_, _> = b.terms().map(|(p, c)| (*p, c)).collect();
        PauliHamiltonian::from_terms(n, terms)
            .map_err(|e| IoError::BadBlochFile(format!("not a valid Hamiltonian: {e}")))
    }
}

fn weight_of_label(label: &str) -> usize {
    label.chars().filter(|c| *c != 'I').count()
}

fn check_finite<'a>(values: impl Iterator<Item = &'a f64>) -> Result<(), IoError> {
    for v in values {
        if !v.is_finite() {
            return Err(IoError::NonFinite);
        }
    }
    Ok(())
}

pub fn save_state(state: &QuantumState, path: &Path) -> Result<(), IoError> {
    write_json(&StateFile::from_state(state), path)
}

pub fn load_state(path: &Path) -> Result<QuantumState, IoError> {
    let file: StateFile = read_json(path)?;
    file.into_state()
}

pub fn save_bloch(b: &BlochVector, path: &Path) -> Result<(), IoError> {
    write_json(&BlochFile::from_bloch(b), path)
}

pub fn load_bloch(path: &Path) -> Result<BlochVector, IoError> {
    let file: BlochFile = read_json(path)?;
    file.into_bloch()
}

pub fn save_hamiltonian(h: &PauliHamiltonian, path: &Path) -> Result<(), IoError> {
    write_json(&BlochFile::from_hamiltonian(h), path)
}

pub fn load_hamiltonian(path: &Path) -> Result<PauliHamiltonian, IoError> {
    let file: BlochFile = read_json(path)?;
    file.into_hamiltonian()
}

pub fn state_to_string(state: &QuantumState) -> String {
    serde_json::to_string_pretty(&StateFile::from_state(state)).expect("serializable")
}

pub fn bloch_to_string(b: &BlochVector) -> String {
    serde_json::to_string_pretty(&BlochFile::from_bloch(b)).expect("serializable")
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, IoError> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Rebuild a pure state from a possibly mixed-form projector file payload.
/// Used by front ends that accept either representation.
pub fn state_as_pure(state: &QuantumState) -> Result<QuantumState, IoError> {
    if state.is_pure_repr() {
        return Ok(state.clone());
    }
    if (state.purity() - 1.0).abs() > 1e-8 {
        return Err(IoError::State(crate::error::StateError::PureRequired));
    }
    let eig =
        crate::linalg::hermitian_eig(&state.density()).map_err(crate::error::StateError::Linalg)?;
    let v: Array1<Complex64> = eig.vector(0);
    Ok(QuantumState::pure_unchecked(state.n(), state.local_dim(), v).canonical_phase())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{bloch_decompose, random_mixed_state, random_pure_state};
    use tempfile::TempDir;

    #[test]
    fn state_roundtrip_pure_and_mixed() {
        let dir = TempDir::new().unwrap();
        let psi = random_pure_state(3, 1);
        let path = dir.path().join("pure.json");
        save_state(&psi, &path).unwrap();
        let loaded = load_state(&path).unwrap();
        assert!((loaded.fidelity(&psi) - 1.0).abs() < 1e-12);

        let rho = random_mixed_state(2, 2);
        let path = dir.path().join("mixed.json");
        save_state(&rho, &path).unwrap();
        let loaded = load_state(&path).unwrap();
        assert!(crate::linalg::max_abs_diff(&loaded.density(), &rho.density()) < 1e-12);
    }

    #[test]
    fn bloch_roundtrip() {
        let dir = TempDir::new().unwrap();
        let b = bloch_decompose(&random_pure_state(3, 7)).unwrap();
        let path = dir.path().join("bloch.json");
        save_bloch(&b, &path).unwrap();
        let loaded = load_bloch(&path).unwrap();
        for (p, c) in b.terms() {
            assert_eq!(loaded.get(p), c, "exact round-trip for {p}");
        }
        assert_eq!(loaded.len(), b.len());
    }

    #[test]
    fn rejects_non_finite_and_duplicates() {
        // Overflowing literals already fail at the JSON layer.
        assert!(serde_json::from_str::<BlochFile>(
            r#"{"n": 1, "terms": [{"pauli": "X", "coeff": 1e999}]}"#
        )
        .is_err());
        // NaN literals are not JSON either.
        assert!(serde_json::from_str::<BlochFile>(
            r#"{"n": 1, "terms": [{"pauli": "X", "coeff": NaN}]}"#
        )
        .is_err());
        // Values smuggled in programmatically are still caught.
        let file = BlochFile {
            n: 1,
            terms: vec![BlochTermFile { pauli: "X".into(), coeff: f64::INFINITY }],
        };
        assert!(matches!(file.into_bloch(), Err(IoError::NonFinite)));

        let text = r#"{"n": 1, "terms": [{"pauli": "X", "coeff": 0.5},
                                         {"pauli": "X", "coeff": 0.25}]}"#;
        let file: BlochFile = serde_json::from_str(text).unwrap();
        assert!(matches!(file.into_bloch(), Err(IoError::BadBlochFile(_))));
    }

    #[test]
    fn rejects_malformed_states() {
        let bad = StateFile {
            kind: "pure".into(),
            n: 1,
            d: 2,
            vector: Some(vec![[1.0, 0.0], [0.5, 0.0]]),
            matrix: None,
        };
        assert!(bad.into_state().is_err());

        let bad = StateFile { kind: "other".into(), n: 1, d: 2, vector: None, matrix: None };
        assert!(matches!(bad.into_state(), Err(IoError::BadStateFile(_))));
    }

    #[test]
    fn serialization_is_deterministic() {
        let b = bloch_decompose(&random_pure_state(3, 3)).unwrap();
        assert_eq!(bloch_to_string(&b), bloch_to_string(&b.clone()));
        // Terms come out sorted by weight then label.
        let file = BlochFile::from_bloch(&b);
        let keys: Vec<(usize, String)> =
            file.terms.iter().map(|t| (weight_of_label(&t.pauli), t.pauli.clone())).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn hamiltonian_file_roundtrip() {
        let dir = TempDir::new().unwrap();
        let h = crate::dynamics::random_hamiltonian(3, crate::dynamics::Parity::Odd, 3, 4).unwrap();
        let path = dir.path().join("ham.json");
        save_hamiltonian(&h, &path).unwrap();
        let loaded = load_hamiltonian(&path).unwrap();
        assert_eq!(loaded.parity_class(), h.parity_class());
        let a: Vec<_> = h.terms().map(|(p, c)| (*p, c)).collect();
        let b: Vec<_> = loaded.terms().map(|(p, c)| (*p, c)).collect();
        assert_eq!(a, b);
    }
}
