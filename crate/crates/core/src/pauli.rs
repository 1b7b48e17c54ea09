//! Signed Pauli operators in binary symplectic form.
//!
//! An operator on `n` qubits is stored as `i^phase * prod_q sigma_q` where
//! `sigma_q` is the Hermitian Pauli letter selected by the bit pair
//! `(x_q, z_q)`: `I = (0,0)`, `X = (1,0)`, `Z = (0,1)`, `Y = (1,1)`.
//! The phase exponent is tracked mod 4. Under this convention the letter
//! products follow the Levi-Civita rule `XY = iZ`, `YX = -iZ`, and in
//! particular `X * Z = -i Y` (phase exponent 3).

use crate::bits::BitVec;
use crate::error::{Error, Result};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Real sign carried by Hermitian operators and measurement outcomes.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    #[inline]
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        self.value() as f64
    }

    /// Sign of the eigenvalue `(-1)^bit`.
    #[inline]
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    #[inline]
    pub fn bit(self) -> bool {
        self == Sign::Minus
    }

    #[inline]
    pub fn flipped(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl core::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Pauli operator `i^phase * prod_q sigma_q` on a fixed number of qubits.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct PauliOperator {
    n: usize,
    x: BitVec,
    z: BitVec,
    /// Exponent of the global `i` prefactor, mod 4.
    phase: u8,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        PauliOperator {
            n,
            x: BitVec::zeros(n),
            z: BitVec::zeros(n),
            phase: 0,
        }
    }

    /// Build from raw symplectic data. `phase` is reduced mod 4.
    pub fn from_bits(x: BitVec, z: BitVec, phase: u8) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::LengthMismatch {
                expected: x.len(),
                got: z.len(),
            });
        }
        Ok(PauliOperator {
            n: x.len(),
            x,
            z,
            phase: phase % 4,
        })
    }

    /// Single-letter operator `letter` at qubit `q`, sign `+`.
    pub fn single(n: usize, q: usize, letter: char) -> Result<Self> {
        let mut p = Self::identity(n);
        p.set_letter(q, letter)?;
        Ok(p)
    }

    pub fn set_letter(&mut self, q: usize, letter: char) -> Result<()> {
        if q >= self.n {
            return Err(Error::BadParameter(format!(
                "qubit {q} out of range for n = {}",
                self.n
            )));
        }
        let (x, z) = match letter {
            'I' => (false, false),
            'X' => (true, false),
            'Y' => (true, true),
            'Z' => (false, true),
            other => return Err(Error::Parse(format!("unknown Pauli letter '{other}'"))),
        };
        self.x.set(q, x);
        self.z.set(q, z);
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn x_bits(&self) -> &BitVec {
        &self.x
    }

    #[inline]
    pub fn z_bits(&self) -> &BitVec {
        &self.z
    }

    #[inline]
    pub fn phase(&self) -> u8 {
        self.phase
    }

    /// The `[x | z]` row used by GF(2) group algebra.
    pub fn sympl_row(&self) -> BitVec {
        self.x.concat(&self.z)
    }

    pub fn from_sympl_row(row: &BitVec, phase: u8) -> Self {
        let n = row.len() / 2;
        PauliOperator {
            n,
            x: row.slice(0, n),
            z: row.slice(n, 2 * n),
            phase: phase % 4,
        }
    }

    pub fn letter(&self, q: usize) -> char {
        match (self.x.get(q), self.z.get(q)) {
            (false, false) => 'I',
            (true, false) => 'X',
            (true, true) => 'Y',
            (false, true) => 'Z',
        }
    }

    pub fn is_identity_bits(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// Hermitian iff the `i` exponent is even.
    #[inline]
    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    /// Sign of a Hermitian operator; `Err` if the phase is imaginary.
    pub fn sign(&self) -> Result<Sign> {
        match self.phase {
            0 => Ok(Sign::Plus),
            2 => Ok(Sign::Minus),
            _ => Err(Error::NotHermitian(self.to_text())),
        }
    }

    pub fn with_sign(&self, sign: Sign) -> Self {
        let mut p = self.clone();
        p.phase = match sign {
            Sign::Plus => 0,
            Sign::Minus => 2,
        };
        p
    }

    pub fn negated(&self) -> Self {
        let mut p = self.clone();
        p.phase = (p.phase + 2) % 4;
        p
    }

    /// Same letters, sign forced to `+`. The canonical unsigned representative.
    pub fn unsigned(&self) -> Self {
        let mut p = self.clone();
        p.phase = 0;
        p
    }

    /// Qubits acted on non-trivially, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&q| self.x.get(q) || self.z.get(q))
            .collect()
    }

    pub fn weight(&self) -> usize {
        let mut w = 0;
        for q in 0..self.n {
            if self.x.get(q) || self.z.get(q) {
                w += 1;
            }
        }
        w
    }

    /// Symplectic product: 0 if the operators commute, 1 if they anticommute.
    pub fn sympl(&self, other: &PauliOperator) -> u8 {
        debug_assert_eq!(self.n, other.n);
        (self.x.dot(&other.z) ^ self.z.dot(&other.x)) as u8
    }

    #[inline]
    pub fn commutes(&self, other: &PauliOperator) -> bool {
        self.sympl(other) == 0
    }

    /// Operator product with exact phase bookkeeping.
    ///
    /// Per qubit the Levi-Civita contribution is +1 for the cyclic letter
    /// pairs (X,Y), (Y,Z), (Z,X) and -1 for the anticyclic ones; the masks
    /// below evaluate all qubits of a word at once.
    pub fn mul(&self, other: &PauliOperator) -> PauliOperator {
        debug_assert_eq!(self.n, other.n);
        let mut plus = 0usize;
        let mut minus = 0usize;
        for q_word in 0..self.x_words().len() {
            let x1 = self.x_words()[q_word];
            let z1 = self.z_words()[q_word];
            let x2 = other.x_words()[q_word];
            let z2 = other.z_words()[q_word];
            let cyc = (x1 & !z1 & x2 & z2) | (x1 & z1 & !x2 & z2) | (!x1 & z1 & x2 & !z2);
            let anti = (x1 & !z1 & !x2 & z2) | (x1 & z1 & x2 & !z2) | (!x1 & z1 & x2 & z2);
            plus += cyc.count_ones() as usize;
            minus += anti.count_ones() as usize;
        }
        let phase = (self.phase as usize + other.phase as usize + plus + 3 * minus) % 4;
        let mut x = self.x.clone();
        x.xor_assign(&other.x);
        let mut z = self.z.clone();
        z.xor_assign(&other.z);
        PauliOperator {
            n: self.n,
            x,
            z,
            phase: phase as u8,
        }
    }

    /// Adjoint: letters are Hermitian, so only the prefactor conjugates.
    pub fn adjoint(&self) -> PauliOperator {
        let mut p = self.clone();
        p.phase = (4 - self.phase) % 4;
        p
    }

    fn x_words(&self) -> &[u64] {
        self.x.words()
    }

    fn z_words(&self) -> &[u64] {
        self.z.words()
    }

    /// Canonical text form, e.g. `+XZI`, `-iYX`.
    pub fn to_text(&self) -> String {
        let prefix = match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            3 => "-i",
            _ => unreachable!(),
        };
        let mut s = String::with_capacity(self.n + 2);
        s.push_str(prefix);
        for q in 0..self.n {
            s.push(self.letter(q));
        }
        s
    }

    /// Parse `[+-]?i?[IXYZ]+`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut chars = text.chars().peekable();
        let mut phase = 0u8;
        match chars.peek() {
            Some('+') => {
                chars.next();
            }
            Some('-') => {
                phase = 2;
                chars.next();
            }
            _ => {}
        }
        if chars.peek() == Some(&'i') {
            phase = (phase + 1) % 4;
            chars.next();
        }
        let letters: Vec<char> = chars.collect();
        if letters.is_empty() {
            return Err(Error::Parse(String::from("empty Pauli string")));
        }
        let mut p = PauliOperator::identity(letters.len());
        p.phase = phase;
        for (q, &c) in letters.iter().enumerate() {
            p.set_letter(q, c)?;
        }
        Ok(p)
    }

    /// Parse and require a Hermitian (real-signed) operator.
    pub fn parse_observable(text: &str) -> Result<Self> {
        let p = Self::parse(text)?;
        if !p.is_hermitian() {
            return Err(Error::NotHermitian(p.to_text()));
        }
        Ok(p)
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::vec;

    // Independent dense oracle: build the 2^n x 2^n matrix of a Pauli by
    // Kronecker products of literal 2x2 matrices and multiply matrices
    // directly. Shares nothing with the symplectic implementation.
    type Mat = Vec<Vec<Complex64>>;

    fn letter_matrix(c: char) -> Mat {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match c {
            'I' => vec![vec![l, o], vec![o, l]],
            'X' => vec![vec![o, l], vec![l, o]],
            'Y' => vec![vec![o, -i], vec![i, o]],
            'Z' => vec![vec![l, o], vec![o, -l]],
            _ => panic!("bad letter"),
        }
    }

    fn kron(a: &Mat, b: &Mat) -> Mat {
        let (ra, ca, rb, cb) = (a.len(), a[0].len(), b.len(), b[0].len());
        let mut out = vec![vec![Complex64::new(0.0, 0.0); ca * cb]; ra * rb];
        for i in 0..ra {
            for j in 0..ca {
                for k in 0..rb {
                    for l in 0..cb {
                        out[i * rb + k][j * cb + l] = a[i][j] * b[k][l];
                    }
                }
            }
        }
        out
    }

    fn matmul(a: &Mat, b: &Mat) -> Mat {
        let (r, m, c) = (a.len(), b.len(), b[0].len());
        let mut out = vec![vec![Complex64::new(0.0, 0.0); c]; r];
        for i in 0..r {
            for k in 0..m {
                for j in 0..c {
                    out[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        out
    }

    fn pauli_matrix(p: &PauliOperator) -> Mat {
        let mut m = vec![vec![Complex64::new(1.0, 0.0)]];
        for q in 0..p.n() {
            m = kron(&m, &letter_matrix(p.letter(q)));
        }
        let ph = Complex64::new(0.0, 1.0).powu(p.phase() as u32);
        for row in &mut m {
            for e in row.iter_mut() {
                *e *= ph;
            }
        }
        m
    }

    fn mat_eq(a: &Mat, b: &Mat) -> bool {
        a.len() == b.len()
            && a.iter()
                .zip(b)
                .all(|(ra, rb)| ra.iter().zip(rb).all(|(x, y)| (x - y).norm() < 1e-12))
    }

    #[test]
    fn single_qubit_products_match_matrix_oracle() {
        for a in ['I', 'X', 'Y', 'Z'] {
            for b in ['I', 'X', 'Y', 'Z'] {
                let pa = PauliOperator::single(1, 0, a).unwrap();
                let pb = PauliOperator::single(1, 0, b).unwrap();
                let prod = pa.mul(&pb);
                let oracle = matmul(&pauli_matrix(&pa), &pauli_matrix(&pb));
                assert!(
                    mat_eq(&pauli_matrix(&prod), &oracle),
                    "{a} * {b} -> {prod}"
                );
            }
        }
    }

    #[test]
    fn x_times_x_is_identity() {
        let x = PauliOperator::parse("+X").unwrap();
        assert_eq!(x.mul(&x), PauliOperator::parse("+I").unwrap());
    }

    #[test]
    fn x_times_z_is_minus_i_y() {
        let x = PauliOperator::parse("+X").unwrap();
        let z = PauliOperator::parse("+Z").unwrap();
        let xz = x.mul(&z);
        assert_eq!(xz.phase(), 3);
        assert!(xz.x_bits().get(0) && xz.z_bits().get(0));
        assert_eq!(xz, PauliOperator::parse("-iY").unwrap());
    }

    #[test]
    fn xx_times_zz_is_minus_yy() {
        let xx = PauliOperator::parse("+XX").unwrap();
        let zz = PauliOperator::parse("+ZZ").unwrap();
        let prod = xx.mul(&zz);
        assert_eq!(prod, PauliOperator::parse("-YY").unwrap());
        let oracle = matmul(&pauli_matrix(&xx), &pauli_matrix(&zz));
        assert!(mat_eq(&pauli_matrix(&prod), &oracle));
    }

    #[test]
    fn two_qubit_products_match_matrix_oracle() {
        let samples = ["+XZ", "-YY", "+iIX", "-iZY", "+XX", "+ZI"];
        for a in samples {
            for b in samples {
                let pa = PauliOperator::parse(a).unwrap();
                let pb = PauliOperator::parse(b).unwrap();
                let prod = pa.mul(&pb);
                let oracle = matmul(&pauli_matrix(&pa), &pauli_matrix(&pb));
                assert!(mat_eq(&pauli_matrix(&prod), &oracle), "{a} * {b}");
            }
        }
    }

    #[test]
    fn product_associates() {
        let ps = ["+XZY", "-ZZI", "+iYXI", "-iIXZ"];
        for a in ps {
            for b in ps {
                for c in ps {
                    let (pa, pb, pc) = (
                        PauliOperator::parse(a).unwrap(),
                        PauliOperator::parse(b).unwrap(),
                        PauliOperator::parse(c).unwrap(),
                    );
                    assert_eq!(pa.mul(&pb).mul(&pc), pa.mul(&pb.mul(&pc)));
                }
            }
        }
    }

    #[test]
    fn commutes_matches_definition() {
        let x = PauliOperator::parse("+X").unwrap();
        let z = PauliOperator::parse("+Z").unwrap();
        assert_eq!(x.sympl(&z), 1);
        let xx = PauliOperator::parse("+XX").unwrap();
        let zz = PauliOperator::parse("+ZZ").unwrap();
        assert_eq!(xx.sympl(&zz), 0);
        let id = PauliOperator::identity(2);
        assert!(id.commutes(&xx) && id.commutes(&zz));
        // pq = (-1)^sympl qp, checked against the matrix oracle
        for a in ["+XZ", "+YI", "+ZY"] {
            for b in ["+ZX", "+XY", "+IZ"] {
                let pa = PauliOperator::parse(a).unwrap();
                let pb = PauliOperator::parse(b).unwrap();
                let pq = pauli_matrix(&pa.mul(&pb));
                let mut qp = pauli_matrix(&pb.mul(&pa));
                if pa.sympl(&pb) == 1 {
                    for row in &mut qp {
                        for e in row.iter_mut() {
                            *e = -*e;
                        }
                    }
                }
                assert!(mat_eq(&pq, &qp));
            }
        }
    }

    #[test]
    fn parse_format_roundtrip() {
        for s in ["+XZI", "-Y", "+iZZ", "-iXIY", "+IIII"] {
            let p = PauliOperator::parse(s).unwrap();
            assert_eq!(p.to_text(), s);
            assert_eq!(PauliOperator::parse(&p.to_text()).unwrap(), p);
        }
        // Unsigned input defaults to +
        assert_eq!(PauliOperator::parse("XZ").unwrap().to_text(), "+XZ");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(PauliOperator::parse("").is_err());
        assert!(PauliOperator::parse("+").is_err());
        assert!(PauliOperator::parse("XQ").is_err());
        assert!(PauliOperator::parse_observable("+iX").is_err());
        assert!(PauliOperator::parse_observable("-ZZ").is_ok());
    }

    #[test]
    fn support_and_weight() {
        let p = PauliOperator::parse("+XIZIY").unwrap();
        assert_eq!(p.support(), vec![0, 2, 4]);
        assert_eq!(p.weight(), 3);
        assert_eq!(PauliOperator::identity(4).weight(), 0);
    }

    #[test]
    fn adjoint_conjugates_phase() {
        let p = PauliOperator::parse("+iXZ").unwrap();
        let pd = p.adjoint();
        assert_eq!(pd.phase(), 3);
        // P * P^dagger = I for unit-phase Paulis
        assert_eq!(p.mul(&pd), PauliOperator::identity(2));
    }

    #[test]
    fn hermitian_squares_to_identity() {
        for s in ["+XZY", "-ZZI", "-YXY"] {
            let p = PauliOperator::parse(s).unwrap();
            assert_eq!(p.mul(&p), PauliOperator::identity(3));
        }
    }
}
