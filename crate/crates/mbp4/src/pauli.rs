//! Phase-free N-qubit Pauli algebra.
//!
//! Operators are words over `{I, X, Y, Z}` with the global phase discarded.
//! Each qubit is stored as two bits (an x-bit and a z-bit) packed into `u64`
//! words, so products are XORs and the commutation form reduces to a packed
//! symplectic inner product.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Single-qubit Pauli operator. The derived order `I < X < Y < Z` is relied
/// on for hard-decision tie-breaking and serialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli1 {
    I,
    X,
    Y,
    Z,
}

impl Pauli1 {
    /// All four operators in canonical order.
    pub const ALL: [Pauli1; 4] = [Pauli1::I, Pauli1::X, Pauli1::Y, Pauli1::Z];

    /// The three non-identity operators in canonical order.
    pub const NON_IDENTITY: [Pauli1; 3] = [Pauli1::X, Pauli1::Y, Pauli1::Z];

    /// x-bit of the (x, z) encoding: I=(0,0), X=(1,0), Z=(0,1), Y=(1,1).
    #[inline]
    pub fn x_bit(self) -> u64 {
        matches!(self, Pauli1::X | Pauli1::Y) as u64
    }

    /// z-bit of the (x, z) encoding.
    #[inline]
    pub fn z_bit(self) -> u64 {
        matches!(self, Pauli1::Z | Pauli1::Y) as u64
    }

    #[inline]
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli1::I,
            (true, false) => Pauli1::X,
            (true, true) => Pauli1::Y,
            (false, true) => Pauli1::Z,
        }
    }

    /// Symplectic bilinear form: 0 if `self` and `other` commute, 1 otherwise.
    #[inline]
    pub fn anticommutes(self, other: Pauli1) -> bool {
        (self.x_bit() & other.z_bit()) ^ (self.z_bit() & other.x_bit()) != 0
    }

    /// True iff the two single-qubit operators commute.
    #[inline]
    pub fn commutes_with(self, other: Pauli1) -> bool {
        !self.anticommutes(other)
    }

    /// Phase-free product: `X*Y = Z` and cyclic, `W*W = I`, `I` neutral.
    #[inline]
    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: Pauli1) -> Pauli1 {
        Pauli1::from_bits(
            (self.x_bit() ^ other.x_bit()) != 0,
            (self.z_bit() ^ other.z_bit()) != 0,
        )
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli1::I => 'I',
            Pauli1::X => 'X',
            Pauli1::Y => 'Y',
            Pauli1::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli1::I),
            'X' => Some(Pauli1::X),
            'Y' => Some(Pauli1::Y),
            'Z' => Some(Pauli1::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Pauli1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Error produced when parsing Pauli strings from text.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PauliParseError {
    #[error("empty Pauli string")]
    Empty,
    #[error("invalid Pauli character {found:?} at position {position}")]
    InvalidChar { position: usize, found: char },
}

/// Phase-free N-qubit Pauli word, immutable length after construction.
///
/// The x-bits and z-bits of all qubits are packed into parallel `u64` words,
/// least significant bit first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    len: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

impl PauliString {
    /// The identity word `I^n`.
    pub fn identity(len: usize) -> Self {
        assert!(len >= 1, "PauliString length must be at least 1");
        PauliString {
            len,
            x: vec![0; words_for(len)],
            z: vec![0; words_for(len)],
        }
    }

    /// Builds a word from per-qubit operators.
    pub fn from_paulis(paulis: &[Pauli1]) -> Self {
        let mut s = PauliString::identity(paulis.len());
        for (i, &p) in paulis.iter().enumerate() {
            s.set(i, p);
        }
        s
    }

    /// Builds a word of length `len` from sparse `(qubit, operator)` entries.
    /// Later entries on the same qubit multiply into it.
    pub fn from_sparse(len: usize, entries: &[(usize, Pauli1)]) -> Self {
        let mut s = PauliString::identity(len);
        for &(i, p) in entries {
            assert!(i < len, "qubit index {i} out of range for length {len}");
            s.set(i, s.get(i).mul(p));
        }
        s
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false // length is always >= 1
    }

    #[inline]
    pub fn get(&self, i: usize) -> Pauli1 {
        assert!(i < self.len);
        let (w, b) = (i / 64, i % 64);
        Pauli1::from_bits((self.x[w] >> b) & 1 != 0, (self.z[w] >> b) & 1 != 0)
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, p: Pauli1) {
        assert!(i < self.len);
        let (w, b) = (i / 64, i % 64);
        self.x[w] = (self.x[w] & !(1 << b)) | (p.x_bit() << b);
        self.z[w] = (self.z[w] & !(1 << b)) | (p.z_bit() << b);
    }

    /// Number of non-identity entries.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    /// Word-parallel symplectic form. Returns true iff the strings commute.
    ///
    /// Panics on length mismatch (usage error).
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        assert_eq!(
            self.len, other.len,
            "PauliString length mismatch: {} vs {}",
            self.len, other.len
        );
        let mut acc = 0u64;
        for i in 0..self.x.len() {
            acc ^= (self.x[i] & other.z[i]) ^ (self.z[i] & other.x[i]);
        }
        acc.count_ones().is_multiple_of(2)
    }

    /// Componentwise phase-free product. Panics on length mismatch.
    #[allow(clippy::should_implement_trait)]
    pub fn mul(&self, other: &PauliString) -> PauliString {
        assert_eq!(
            self.len, other.len,
            "PauliString length mismatch: {} vs {}",
            self.len, other.len
        );
        PauliString {
            len: self.len,
            x: self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect(),
        }
    }

    /// In-place product, used by coset enumeration.
    pub(crate) fn mul_assign(&mut self, other: &PauliString) {
        assert_eq!(self.len, other.len);
        for i in 0..self.x.len() {
            self.x[i] ^= other.x[i];
            self.z[i] ^= other.z[i];
        }
    }

    /// Support as `(qubit, operator)` pairs in ascending qubit order.
    pub fn support(&self) -> Vec<(usize, Pauli1)> {
        self.iter()
            .enumerate()
            .filter(|(_, p)| *p != Pauli1::I)
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = Pauli1> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Symplectic image as a 2N-bit vector `(x_1..x_N | z_1..z_N)`.
    pub fn symplectic_bits(&self) -> Vec<bool> {
        let mut v = Vec::with_capacity(2 * self.len);
        for i in 0..self.len {
            let (w, b) = (i / 64, i % 64);
            v.push((self.x[w] >> b) & 1 != 0);
        }
        for i in 0..self.len {
            let (w, b) = (i / 64, i % 64);
            v.push((self.z[w] >> b) & 1 != 0);
        }
        v
    }

    /// Inverse of [`symplectic_bits`](Self::symplectic_bits).
    pub fn from_symplectic_bits(bits: &[bool]) -> Self {
        assert!(bits.len().is_multiple_of(2) && !bits.is_empty());
        let n = bits.len() / 2;
        let mut s = PauliString::identity(n);
        for i in 0..n {
            s.set(i, Pauli1::from_bits(bits[i], bits[n + i]));
        }
        s
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.iter() {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString(\"{self}\")")
    }
}

impl FromStr for PauliString {
    type Err = PauliParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        if trimmed.is_empty() {
            return Err(PauliParseError::Empty);
        }
        let mut paulis = Vec::with_capacity(trimmed.len());
        for (i, c) in trimmed.chars().enumerate() {
            match Pauli1::from_char(c) {
                Some(p) => paulis.push(p),
                None => return Err(PauliParseError::InvalidChar { position: i, found: c }),
            }
        }
        Ok(PauliString::from_paulis(&paulis))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent oracle: 2x2 complex matrix commutator check.
    mod matrix_oracle {
        type C = (f64, f64);
        type Mat = [[C; 2]; 2];

        fn cmul(a: C, b: C) -> C {
            (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
        }

        fn cadd(a: C, b: C) -> C {
            (a.0 + b.0, a.1 + b.1)
        }

        fn matmul(a: Mat, b: Mat) -> Mat {
            let mut out = [[(0.0, 0.0); 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        out[i][j] = cadd(out[i][j], cmul(a[i][k], b[k][j]));
                    }
                }
            }
            out
        }

        fn mat(p: super::Pauli1) -> Mat {
            use super::Pauli1::*;
            match p {
                I => [[(1.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (1.0, 0.0)]],
                X => [[(0.0, 0.0), (1.0, 0.0)], [(1.0, 0.0), (0.0, 0.0)]],
                Y => [[(0.0, 0.0), (0.0, -1.0)], [(0.0, 1.0), (0.0, 0.0)]],
                Z => [[(1.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (-1.0, 0.0)]],
            }
        }

        /// True iff AB == BA as complex matrices.
        pub fn commute(a: super::Pauli1, b: super::Pauli1) -> bool {
            let ab = matmul(mat(a), mat(b));
            let ba = matmul(mat(b), mat(a));
            ab.iter().flatten().zip(ba.iter().flatten()).all(|(x, y)| {
                (x.0 - y.0).abs() < 1e-12 && (x.1 - y.1).abs() < 1e-12
            })
        }

        /// Returns the Pauli whose matrix equals AB up to a global phase.
        pub fn product(a: super::Pauli1, b: super::Pauli1) -> super::Pauli1 {
            let ab = matmul(mat(a), mat(b));
            for cand in super::Pauli1::ALL {
                let m = mat(cand);
                // find a phase on the first nonzero entry and compare
                let mut phase = None;
                let mut ok = true;
                for i in 0..2 {
                    for j in 0..2 {
                        let (cr, ci) = m[i][j];
                        let (ar, ai) = ab[i][j];
                        let cnorm = cr * cr + ci * ci;
                        let anorm = ar * ar + ai * ai;
                        if cnorm < 1e-12 && anorm < 1e-12 {
                            continue;
                        }
                        if (cnorm < 1e-12) != (anorm < 1e-12) {
                            ok = false;
                            continue;
                        }
                        // phase = ab / m on this entry
                        let denom = cnorm;
                        let pr = (ar * cr + ai * ci) / denom;
                        let pi = (ai * cr - ar * ci) / denom;
                        match phase {
                            None => phase = Some((pr, pi)),
                            Some((qr, qi)) => {
                                if (pr - qr).abs() > 1e-9 || (pi - qi).abs() > 1e-9 {
                                    ok = false;
                                }
                            }
                        }
                    }
                }
                if ok && phase.is_some() {
                    return cand;
                }
            }
            panic!("no Pauli matches the product");
        }
    }

    #[test]
    fn commutes1_matches_matrix_oracle_exhaustively() {
        for a in Pauli1::ALL {
            for b in Pauli1::ALL {
                assert_eq!(
                    a.commutes_with(b),
                    matrix_oracle::commute(a, b),
                    "commutation mismatch for ({a}, {b})"
                );
            }
        }
    }

    #[test]
    fn commutes1_spec_values() {
        // equal Paulis commute; identity commutes with everything
        assert!(Pauli1::X.commutes_with(Pauli1::X));
        assert!(Pauli1::I.commutes_with(Pauli1::Z));
        // YZ = -ZY per the matrix oracle
        assert!(!matrix_oracle::commute(Pauli1::Y, Pauli1::Z));
        assert!(!Pauli1::Y.commutes_with(Pauli1::Z));
    }

    #[test]
    fn mul1_matches_matrix_oracle_exhaustively() {
        for a in Pauli1::ALL {
            for b in Pauli1::ALL {
                assert_eq!(a.mul(b), matrix_oracle::product(a, b), "product mismatch for ({a}, {b})");
            }
        }
    }

    #[test]
    fn string_commutes_examples() {
        let p: PauliString = "IIIYI".parse().unwrap();
        let q: PauliString = "XZZXI".parse().unwrap();
        // <Y,X> = 1 at position 4 (1-based), all other terms 0
        assert!(!p.commutes_with(&q));
        assert!(p.commutes_with(&p));

        let a: PauliString = "ZI".parse().unwrap();
        let b: PauliString = "XY".parse().unwrap();
        // componentwise: <Z,X> + <I,Y> = 1 mod 2
        assert!(!a.commutes_with(&b));
    }

    #[test]
    fn string_mul_examples() {
        let xz: PauliString = "XZ".parse().unwrap();
        assert_eq!(xz.mul(&xz).to_string(), "II");
        let xi: PauliString = "XI".parse().unwrap();
        let zi: PauliString = "ZI".parse().unwrap();
        assert_eq!(xi.mul(&zi).to_string(), "YI");
        let y4: PauliString = "IIIYI".parse().unwrap();
        assert_eq!(y4.mul(&y4).to_string(), "IIIII");
    }

    #[test]
    fn weight_examples() {
        assert_eq!("IIIII".parse::<PauliString>().unwrap().weight(), 0);
        assert_eq!("IXYZI".parse::<PauliString>().unwrap().weight(), 3);
        // X3 Z22 X23 X32 Y33 Z39 Z40 on N=49 (1-based indices)
        let p = PauliString::from_sparse(
            49,
            &[
                (2, Pauli1::X),
                (21, Pauli1::Z),
                (22, Pauli1::X),
                (31, Pauli1::X),
                (32, Pauli1::Y),
                (38, Pauli1::Z),
                (39, Pauli1::Z),
            ],
        );
        assert_eq!(p.weight(), 7);
    }

    #[test]
    fn parse_roundtrip_and_errors() {
        let p: PauliString = "IXYZ".parse().unwrap();
        assert_eq!(p.to_string(), "IXYZ");
        assert_eq!("".parse::<PauliString>(), Err(PauliParseError::Empty));
        assert_eq!(
            "IXQ".parse::<PauliString>(),
            Err(PauliParseError::InvalidChar { position: 2, found: 'Q' })
        );
    }

    #[test]
    #[should_panic(expected = "length mismatch")]
    fn commutes_length_mismatch_panics() {
        let a: PauliString = "XX".parse().unwrap();
        let b: PauliString = "XXX".parse().unwrap();
        a.commutes_with(&b);
    }

    #[test]
    fn commutes_symmetric_exhaustive_up_to_n3() {
        for n in 1..=3usize {
            let count = 4usize.pow(n as u32);
            let string = |mut idx: usize| {
                let mut paulis = Vec::with_capacity(n);
                for _ in 0..n {
                    paulis.push(Pauli1::ALL[idx % 4]);
                    idx /= 4;
                }
                PauliString::from_paulis(&paulis)
            };
            for i in 0..count {
                for j in 0..count {
                    let (p, q) = (string(i), string(j));
                    assert_eq!(p.commutes_with(&q), q.commutes_with(&p));
                }
            }
        }
    }

    #[test]
    fn bilinearity_exhaustive_n2() {
        // <PQ, R> = <P,R> xor <Q,R> on all length-2 words
        let all: Vec<PauliString> = (0..16)
            .map(|i| {
                PauliString::from_paulis(&[Pauli1::ALL[i / 4], Pauli1::ALL[i % 4]])
            })
            .collect();
        for p in &all {
            for q in &all {
                for r in &all {
                    let lhs = !p.mul(q).commutes_with(r);
                    let rhs = (!p.commutes_with(r)) ^ (!q.commutes_with(r));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn associativity_exhaustive_n1() {
        for a in Pauli1::ALL {
            for b in Pauli1::ALL {
                for c in Pauli1::ALL {
                    assert_eq!(a.mul(b).mul(c), a.mul(b.mul(c)));
                    assert_eq!(a.mul(b), b.mul(a));
                }
            }
        }
    }

    fn arb_pauli_string(max_len: usize) -> impl Strategy<Value = PauliString> {
        prop::collection::vec(0..4usize, 1..=max_len)
            .prop_map(|v| PauliString::from_paulis(&v.iter().map(|&i| Pauli1::ALL[i]).collect::<Vec<_>>()))
    }

    proptest! {
        #[test]
        fn commutes_is_symmetric(v in prop::collection::vec((0..4usize, 0..4usize), 1..80)) {
            let p = PauliString::from_paulis(&v.iter().map(|&(a, _)| Pauli1::ALL[a]).collect::<Vec<_>>());
            let q = PauliString::from_paulis(&v.iter().map(|&(_, b)| Pauli1::ALL[b]).collect::<Vec<_>>());
            prop_assert_eq!(p.commutes_with(&q), q.commutes_with(&p));
        }

        #[test]
        fn mul_self_is_identity(p in arb_pauli_string(80)) {
            prop_assert!(p.mul(&p).is_identity());
        }

        #[test]
        fn weight_bounds(p in arb_pauli_string(80)) {
            prop_assert!(p.weight() <= p.len());
        }
    }
}
