//! Dense complex linear algebra: Hermitian eigendecomposition and small
//! matrix utilities shared across the library.
//!
//! The eigensolver is a cyclic Jacobi iteration on the full complex Hermitian
//! matrix. It stops when the off-diagonal Frobenius mass drops below
//! 1e-12 * ||H||_F and refuses to run past 100 sweeps. That is plenty for the
//! dimensions this crate touches (<= 4096) and keeps the crate free of any
//! LAPACK binding.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::LinalgError;

pub type CMatrix = Array2<Complex64>;
pub type CVector = Array1<Complex64>;

pub const MAX_JACOBI_SWEEPS: usize = 100;
const OFF_DIAGONAL_STOP: f64 = 1e-12;

/// Relative scale at which two eigenvalues count as one degenerate block.
pub const DEGENERACY_SCALE: f64 = 1e-8;

/// Eigendecomposition of a Hermitian matrix: values sorted in descending
/// order, `vectors` holding the matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEig {
    /// Column `k` as an owned vector.
    pub fn vector(&self, k: usize) -> CVector {
        self.vectors.column(k).to_owned()
    }

    /// Groups of indices whose eigenvalues lie within
    /// `DEGENERACY_SCALE * scale` of each other, in descending order.
    pub fn degenerate_blocks(&self, scale: f64) -> Vec<Vec<usize>> {
        let tol = DEGENERACY_SCALE * scale.max(1.0);
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for i in 0..self.values.len() {
            match blocks.last_mut() {
                Some(b) if (self.values[b[0]] - self.values[i]).abs() <= tol => b.push(i),
                _ => blocks.push(vec![i]),
            }
        }
        blocks
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// The input must be Hermitian to 1e-10 (relative to its largest entry);
/// the iteration itself works on the Hermitian part (H + H†)/2.
pub fn hermitian_eig(h: &CMatrix) -> Result<HermitianEig, LinalgError> {
    let dim = check_square(h)?;
    let dev = hermiticity_deviation(h);
    let scale = max_abs(h).max(1.0);
    if dev > 1e-10 * scale {
        return Err(LinalgError::NotHermitian { dev });
    }

    // Flat row-major working copies; a is overwritten, v accumulates rotations.
    let mut a: Vec<Complex64> = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            a.push((h[[i, j]] + h[[j, i]].conj()) * 0.5);
        }
    }
    let mut v = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        v[i * dim + i] = Complex64::new(1.0, 0.0);
    }

    let norm_f = frobenius_flat(&a);
    if norm_f > 0.0 && dim > 1 {
        let stop = OFF_DIAGONAL_STOP * norm_f;
        let mut converged = false;
        for _sweep in 0..MAX_JACOBI_SWEEPS {
            if off_diagonal_flat(&a, dim) <= stop {
                converged = true;
                break;
            }
            for p in 0..dim - 1 {
                for q in p + 1..dim {
                    rotate(&mut a, &mut v, dim, p, q);
                }
            }
        }
        if !converged && off_diagonal_flat(&a, dim) > stop {
            return Err(LinalgError::NoConvergence(MAX_JACOBI_SWEEPS));
        }
    }

    // Sort descending, permuting eigenvector columns along.
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| {
        a[j * dim + j].re.partial_cmp(&a[i * dim + i].re).expect("finite eigenvalues")
    });
    let values: Vec<f64> = order.iter().map(|&i| a[i * dim + i].re).collect();
    let mut vectors = Array2::<Complex64>::zeros((dim, dim));
    for (col, &src) in order.iter().enumerate() {
        for row in 0..dim {
            vectors[[row, col]] = v[row * dim + src];
        }
    }
    Ok(HermitianEig { values, vectors })
}

/// One complex Jacobi rotation zeroing a[p][q], applied two-sided to `a`
/// and accumulated into `v`.
fn rotate(a: &mut [Complex64], v: &mut [Complex64], dim: usize, p: usize, q: usize) {
    let apq = a[p * dim + q];
    let abs_b = apq.norm();
    if abs_b == 0.0 {
        return;
    }
    let app = a[p * dim + p].re;
    let aqq = a[q * dim + q].re;
    // Phase-absorbed real Jacobi angle: tan selected for the smaller rotation.
    let g = apq / abs_b;
    let tau = (aqq - app) / (2.0 * abs_b);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        1.0 / (tau - (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let sg = g * s;

    // Column update: col_p <- c*col_p - conj(sg)*col_q ; col_q <- sg*col_p + c*col_q.
    for row in 0..dim {
        let ap = a[row * dim + p];
        let aq = a[row * dim + q];
        a[row * dim + p] = ap * c - aq * sg.conj();
        a[row * dim + q] = ap * sg + aq * c;
    }
    // Row update with the adjoint rotation.
    for col in 0..dim {
        let ap = a[p * dim + col];
        let aq = a[q * dim + col];
        a[p * dim + col] = ap * c - aq * sg;
        a[q * dim + col] = ap * sg.conj() + aq * c;
    }
    // Clean the pivots exactly; diagonal stays real.
    a[p * dim + q] = Complex64::new(0.0, 0.0);
    a[q * dim + p] = Complex64::new(0.0, 0.0);
    a[p * dim + p] = Complex64::new(a[p * dim + p].re, 0.0);
    a[q * dim + q] = Complex64::new(a[q * dim + q].re, 0.0);

    for row in 0..dim {
        let vp = v[row * dim + p];
        let vq = v[row * dim + q];
        v[row * dim + p] = vp * c - vq * sg.conj();
        v[row * dim + q] = vp * sg + vq * c;
    }
}

fn off_diagonal_flat(a: &[Complex64], dim: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            if i != j {
                sum += a[i * dim + j].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

fn frobenius_flat(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn check_square(m: &CMatrix) -> Result<usize, LinalgError> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(LinalgError::NotSquare { rows, cols });
    }
    Ok(rows)
}

/// Max |m_ij - conj(m_ji)|.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let dim = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..dim {
        for j in i..dim {
            dev = dev.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    dev
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.nrows() == m.ncols() && hermiticity_deviation(m) <= tol
}

pub fn identity(dim: usize) -> CMatrix {
    Array2::from_diag(&Array1::from_elem(dim, Complex64::new(1.0, 0.0)))
}

pub fn adjoint(m: &CMatrix) -> CMatrix {
    m.t().mapv(|z| z.conj())
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diag().sum()
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    debug_assert_eq!(a.dim(), b.dim());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn commutator_frobenius(a: &CMatrix, b: &CMatrix) -> f64 {
    frobenius(&(a.dot(b) - b.dot(a)))
}

/// Kronecker product, left factor on the most significant indices.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::<Complex64>::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            if aij == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[[i * br + k, j * bc + l]] = aij * b[[k, l]];
                }
            }
        }
    }
    out
}

/// Rank-1 projector |v><v|.
pub fn projector(v: &CVector) -> CMatrix {
    let dim = v.len();
    let mut out = Array2::<Complex64>::zeros((dim, dim));
    for i in 0..dim {
        for j in 0..dim {
            out[[i, j]] = v[i] * v[j].conj();
        }
    }
    out
}

/// <a|b> with the conjugation on the left argument.
pub fn inner(a: &CVector, b: &CVector) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliString;

    fn residual(h: &CMatrix, eig: &HermitianEig) -> f64 {
        let dim = h.nrows();
        let mut worst: f64 = 0.0;
        for k in 0..dim {
            let v = eig.vector(k);
            let hv = h.dot(&v);
            let diff: f64 =
                hv.iter().zip(v.iter()).map(|(a, b)| (a - b * eig.values[k]).norm_sqr()).sum();
            worst = worst.max(diff.sqrt());
        }
        worst
    }

    #[test]
    fn sigma_z_eigenvalues() {
        let m = "Z".parse::<PauliString>().unwrap().to_matrix().unwrap();
        let eig = hermitian_eig(&m).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-12);
        assert!((eig.values[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn sigma_y_eigenvalues_and_residual() {
        let m = "Y".parse::<PauliString>().unwrap().to_matrix().unwrap();
        let eig = hermitian_eig(&m).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-12);
        assert!((eig.values[1] + 1.0).abs() < 1e-12);
        assert!(residual(&m, &eig) < 1e-12);
    }

    #[test]
    fn diagonal_matrix_is_its_own_spectrum() {
        let mut m = Array2::<Complex64>::zeros((3, 3));
        m[[0, 0]] = Complex64::new(2.0, 0.0);
        m[[1, 1]] = Complex64::new(-1.0, 0.0);
        m[[2, 2]] = Complex64::new(0.5, 0.0);
        let eig = hermitian_eig(&m).unwrap();
        assert_eq!(eig.values.len(), 3);
        assert!((eig.values[0] - 2.0).abs() < 1e-14);
        assert!((eig.values[1] - 0.5).abs() < 1e-14);
        assert!((eig.values[2] + 1.0).abs() < 1e-14);
        // Eigenvectors are permuted basis vectors.
        for k in 0..3 {
            let v = eig.vector(k);
            let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!((max - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn random_hermitian_residual_and_unitarity() {
        // Deterministic pseudo-random Hermitian fill.
        let dim = 24;
        let mut m = Array2::<Complex64>::zeros((dim, dim));
        let mut s = 0x12345u64;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        for i in 0..dim {
            for j in i..dim {
                if i == j {
                    m[[i, i]] = Complex64::new(next(), 0.0);
                } else {
                    let z = Complex64::new(next(), next());
                    m[[i, j]] = z;
                    m[[j, i]] = z.conj();
                }
            }
        }
        let eig = hermitian_eig(&m).unwrap();
        let scale = frobenius(&m);
        assert!(residual(&m, &eig) < 1e-9 * scale);
        let vtv = adjoint(&eig.vectors).dot(&eig.vectors);
        assert!(max_abs_diff(&vtv, &identity(dim)) < 1e-9);
        // Descending order.
        for w in eig.values.windows(2) {
            assert!(w[0] >= w[1] - 1e-12);
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = Array2::<Complex64>::zeros((2, 2));
        m[[0, 1]] = Complex64::new(1.0, 0.0);
        assert!(matches!(hermitian_eig(&m), Err(LinalgError::NotHermitian { .. })));
    }

    #[test]
    fn degenerate_blocks_group_close_values() {
        let eig = HermitianEig { values: vec![3.0, 3.0 + 1e-12, 0.0, -1.0], vectors: identity(4) };
        let blocks = eig.degenerate_blocks(1.0);
        assert_eq!(blocks, vec![vec![0, 1], vec![2], vec![3]]);
    }

    #[test]
    fn kron_matches_pauli_tensor() {
        let x = "X".parse::<PauliString>().unwrap().to_matrix().unwrap();
        let z = "Z".parse::<PauliString>().unwrap().to_matrix().unwrap();
        let xz = "XZ".parse::<PauliString>().unwrap().to_matrix().unwrap();
        assert!(max_abs_diff(&kron(&x, &z), &xz) < 1e-15);
    }
}
