//! Exact algebra of n-qubit Pauli strings in symplectic form.
//!
//! A string is stored as a pair of bit vectors (X part, Z part) plus an
//! integer power of i, so products and commutation checks are a handful of
//! word operations and all phases are tracked exactly. Qubit 1 is the
//! leftmost tensor factor and the most significant bit of basis-state
//! indices; this convention is fixed once here and shared by every module.

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::PauliError;

/// Largest qubit count for which dense 2^n x 2^n realizations are built.
pub const DENSE_QUBIT_CAP: usize = 12;

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliLetter::I,
            (true, false) => PauliLetter::X,
            (true, true) => PauliLetter::Y,
            (false, true) => PauliLetter::Z,
        }
    }

    fn to_char(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }
}

/// A tensor product of Pauli matrices with an exact scalar i^phase_exp.
///
/// The represented operator is `i^phase_exp * prod_j X^{x_j} Z^{z_j}`, with
/// qubit 1 occupying the leftmost factor. The canonical Hermitian
/// representative of a letter pattern carries `phase_exp = #Y mod 4`, which
/// turns each `XZ` factor back into `Y`.
///
/// ```
/// use evenodd::pauli::PauliString;
///
/// let s: PauliString = "XYZ".parse().unwrap();
/// assert_eq!(s.weight(), 3);
///
/// // [XYZ, IXZ] = -2i XZI: odd + even weight gives an even commutator.
/// let t: PauliString = "IXZ".parse().unwrap();
/// let c = s.commutator(&t).unwrap().expect("anticommuting pair");
/// assert_eq!(c.string.label(), "XZI");
/// assert_eq!(c.sign, -1);
/// ```
///
/// Field order matters: the derived ordering sorts by (n, x, z, phase), which
/// gives Bloch containers a deterministic iteration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: usize,
    x_bits: u64,
    z_bits: u64,
    phase_exp: u8,
}

impl PauliString {
    /// Canonical Hermitian string for the given bit pattern.
    pub fn hermitian(n: usize, x_bits: u64, z_bits: u64) -> Result<Self, PauliError> {
        if n == 0 || n > 64 {
            return Err(PauliError::BadQubitCount(n));
        }
        let mask = mask(n);
        let x = x_bits & mask;
        let z = z_bits & mask;
        let phase_exp = ((x & z).count_ones() % 4) as u8;
        Ok(PauliString { n, x_bits: x, z_bits: z, phase_exp })
    }

    /// Identity string on n qubits.
    pub fn identity(n: usize) -> Result<Self, PauliError> {
        Self::hermitian(n, 0, 0)
    }

    /// Build from per-qubit letters, leftmost = qubit 1.
    pub fn from_letters(letters: &[PauliLetter]) -> Result<Self, PauliError> {
        let n = letters.len();
        if n == 0 || n > 64 {
            return Err(PauliError::BadQubitCount(n));
        }
        let mut x = 0u64;
        let mut z = 0u64;
        for (i, l) in letters.iter().enumerate() {
            let bit = 1u64 << (n - 1 - i);
            match l {
                PauliLetter::I => {}
                PauliLetter::X => x |= bit,
                PauliLetter::Y => {
                    x |= bit;
                    z |= bit;
                }
                PauliLetter::Z => z |= bit,
            }
        }
        Self::hermitian(n, x, z)
    }

    /// Single non-identity letter at `qubit` (1-based) on n qubits.
    pub fn single(n: usize, qubit: usize, letter: PauliLetter) -> Result<Self, PauliError> {
        if qubit == 0 || qubit > n {
            return Err(PauliError::BadQubitCount(qubit));
        }
        let mut letters = vec![PauliLetter::I; n];
        letters[qubit - 1] = letter;
        Self::from_letters(&letters)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_bits(&self) -> u64 {
        self.x_bits
    }

    pub fn z_bits(&self) -> u64 {
        self.z_bits
    }

    /// Power of i multiplying the X/Z bit pattern.
    pub fn phase_exp(&self) -> u8 {
        self.phase_exp
    }

    /// Letter at `qubit` (1-based).
    pub fn letter(&self, qubit: usize) -> PauliLetter {
        let bit = 1u64 << (self.n - qubit);
        PauliLetter::from_bits(self.x_bits & bit != 0, self.z_bits & bit != 0)
    }

    /// Number of non-identity tensor factors.
    pub fn weight(&self) -> usize {
        (self.x_bits | self.z_bits).count_ones() as usize
    }

    pub fn is_identity_pattern(&self) -> bool {
        self.x_bits == 0 && self.z_bits == 0
    }

    /// Whether this string carries the canonical Hermitian phase.
    pub fn is_canonical(&self) -> bool {
        self.phase_exp == ((self.x_bits & self.z_bits).count_ones() % 4) as u8
    }

    /// Same bit pattern with the canonical Hermitian phase, plus the scalar
    /// i^k relating the two: `self = i^k * canonical`.
    pub fn canonicalize(&self) -> (PauliString, u8) {
        let canon = PauliString::hermitian(self.n, self.x_bits, self.z_bits)
            .expect("bit pattern already validated");
        let k = (4 + self.phase_exp - canon.phase_exp) % 4;
        (canon, k)
    }

    /// Exact product: `matrix(result) = matrix(self) * matrix(other)`.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString, PauliError> {
        if self.n != other.n {
            return Err(PauliError::SizeMismatch(self.n, other.n));
        }
        // Commuting Z^{z1} past X^{x2} costs (-1)^{|z1 & x2|} = i^{2|z1 & x2|}.
        let swaps = (self.z_bits & other.x_bits).count_ones();
        let phase_exp = ((self.phase_exp as u32 + other.phase_exp as u32 + 2 * swaps) % 4) as u8;
        Ok(PauliString {
            n: self.n,
            x_bits: self.x_bits ^ other.x_bits,
            z_bits: self.z_bits ^ other.z_bits,
            phase_exp,
        })
    }

    /// True when the two strings commute as operators.
    pub fn commutes_with(&self, other: &PauliString) -> Result<bool, PauliError> {
        if self.n != other.n {
            return Err(PauliError::SizeMismatch(self.n, other.n));
        }
        let sym =
            (self.x_bits & other.z_bits).count_ones() + (self.z_bits & other.x_bits).count_ones();
        Ok(sym % 2 == 0)
    }

    /// Commutator `[self, other]`, or `None` when the strings commute.
    ///
    /// For anticommuting strings `[p, q] = 2 p q`, and the product of two
    /// Hermitian strings is anti-Hermitian, so the commutator is reported as
    /// `2i * sign * string` with a canonical Hermitian `string`.
    pub fn commutator(&self, other: &PauliString) -> Result<Option<Commutator>, PauliError> {
        if !self.commutes_with(other)? {
            let product = self.multiply(other)?;
            let (string, k) = product.canonicalize();
            // k is odd here; i^k = sign * i with sign = +1 for k=1, -1 for k=3.
            debug_assert!(k % 2 == 1);
            let sign = if k == 1 { 1 } else { -1 };
            Ok(Some(Commutator { string, sign }))
        } else {
            Ok(None)
        }
    }

    /// Dense 2^n x 2^n realization. Each column holds a single nonzero:
    /// `M[b ^ x, b] = i^phase * (-1)^{|z & b|}`.
    pub fn to_matrix(&self) -> Result<Array2<Complex64>, PauliError> {
        if self.n > DENSE_QUBIT_CAP {
            return Err(PauliError::DenseCapExceeded { n: self.n, cap: DENSE_QUBIT_CAP });
        }
        let dim = 1usize << self.n;
        let scalar = i_power(self.phase_exp);
        let mut m = Array2::<Complex64>::zeros((dim, dim));
        for col in 0..dim {
            let row = col ^ self.x_bits as usize;
            let sign =
                if ((self.z_bits as usize & col).count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
            m[[row, col]] = scalar * sign;
        }
        Ok(m)
    }

    /// Apply the string to a basis index: returns (new index, scalar).
    pub fn apply_to_index(&self, col: usize) -> (usize, Complex64) {
        let row = col ^ self.x_bits as usize;
        let sign = if ((self.z_bits as usize & col).count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
        (row, i_power(self.phase_exp) * sign)
    }

    /// Text label over IXYZ, defined for canonical strings.
    pub fn label(&self) -> String {
        (1..=self.n).map(|q| self.letter(q).to_char()).collect()
    }
}

/// Result of a nonvanishing commutator: `[p, q] = 2i * sign * string`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Commutator {
    pub string: PauliString,
    pub sign: i8,
}

impl Commutator {
    /// Scalar multiplying `string` in `[p, q]`, i.e. `2i * sign`.
    pub fn scalar(&self) -> Complex64 {
        Complex64::new(0.0, 2.0 * self.sign as f64)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (canon, k) = self.canonicalize();
        let prefix = match k {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{}{}", prefix, canon.label())
    }
}

impl FromStr for PauliString {
    type Err = PauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut letters = Vec::with_capacity(s.len());
        for c in s.chars() {
            letters.push(match c {
                'I' => PauliLetter::I,
                'X' => PauliLetter::X,
                'Y' => PauliLetter::Y,
                'Z' => PauliLetter::Z,
                _ => return Err(PauliError::BadLabel(s.to_string())),
            });
        }
        if letters.is_empty() {
            return Err(PauliError::BadLabel(s.to_string()));
        }
        PauliString::from_letters(&letters)
    }
}

/// All canonical Hermitian strings on n qubits, identity first, in
/// (x_bits, z_bits) order. 4^n entries.
pub fn all_strings(n: usize) -> impl Iterator<Item = PauliString> {
    let count = 1u64 << n;
    (0..count).flat_map(move |x| {
        (0..count).map(move |z| PauliString::hermitian(n, x, z).expect("valid bits"))
    })
}

/// All canonical Hermitian strings of the given weight on n qubits,
/// enumerated deterministically (support combinations in lexicographic
/// order, then letters in base-3 order X < Y < Z per site).
pub fn strings_of_weight(n: usize, w: usize) -> Vec<PauliString> {
    let mut out = Vec::new();
    let supports = combinations(n, w);
    for support in supports {
        let count = 3usize.pow(w as u32);
        for code in 0..count {
            let mut letters = vec![PauliLetter::I; n];
            let mut c = code;
            for &site in &support {
                letters[site] = match c % 3 {
                    0 => PauliLetter::X,
                    1 => PauliLetter::Y,
                    _ => PauliLetter::Z,
                };
                c /= 3;
            }
            out.push(PauliString::from_letters(&letters).expect("valid letters"));
        }
    }
    out
}

/// k-subsets of {0..n-1} in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

pub(crate) fn mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub(crate) fn i_power(k: u8) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}
