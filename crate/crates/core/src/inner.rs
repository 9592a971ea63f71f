//! The inner linear code placed on every constraint of a Tanner code.
//!
//! Block lengths are small (at most [`MAX_INNER_LEN`]), so words of the inner
//! code are handled as `u32` masks where bit `j` is coordinate `j`. Bounded
//! distance decoding is a constant-time syndrome table lookup.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

/// Largest supported inner block length.
pub const MAX_INNER_LEN: usize = 24;

/// Largest dimension for which codewords may be enumerated.
pub const MAX_ENUM_DIM: usize = 24;

const NO_LEADER: u32 = u32::MAX;

// Full word -> syndrome tables are kept for block lengths up to this size.
const FULL_SYNDROME_TABLE_LEN: usize = 16;

#[derive(Clone)]
pub struct InnerCode {
    d: usize,
    k0: usize,
    d0: usize,
    h: BitMatrix,
    g: BitMatrix,
    /// Syndrome contributed by each coordinate.
    column_syndromes: Vec<u32>,
    /// `syndrome_of[w]` for every word `w`, when `d` is small enough.
    syndrome_of: Vec<u32>,
    /// Coset leader per syndrome, `NO_LEADER` outside the decoding radius.
    leaders: Vec<u32>,
}

impl std::fmt::Debug for InnerCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InnerCode")
            .field("d", &self.d)
            .field("k0", &self.k0)
            .field("d0", &self.d0)
            .field("h", &self.h)
            .finish_non_exhaustive()
    }
}

/// Two inner codes are equal when they contain the same words.
impl PartialEq for InnerCode {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.h.rref().0 == other.h.rref().0
    }
}

impl InnerCode {
    /// Builds the code `{w : H w = 0}`.
    ///
    /// Redundant rows of `h` are dropped so that the stored parity-check matrix
    /// has full row rank. The minimum distance is found by enumerating every
    /// codeword, and the syndrome table covers all error patterns of weight up
    /// to `(d0 - 1) / 2`.
    pub fn from_parity_check(h: BitMatrix) -> Result<Self> {
        let d = h.num_cols();
        if d == 0 || d > MAX_INNER_LEN {
            return Err(Error::InvalidParameter(format!(
                "inner block length must be in 1..={MAX_INNER_LEN}, got {d}"
            )));
        }
        if h.rows().iter().all(BitVector::is_zero) {
            return Err(Error::InvalidParameter(
                "parity-check matrix has no nonzero row".into(),
            ));
        }
        let (reduced, rank, _) = h.rref();
        let h = if rank == h.num_rows() {
            h
        } else {
            BitMatrix::from_rows(d, reduced.rows()[..rank].to_vec())?
        };
        let g = {
            let basis = h.nullspace_basis();
            BitMatrix::from_rows(d, basis)?
        };
        let k0 = g.num_rows();
        if k0 == 0 {
            return Err(Error::ZeroDimension);
        }

        let r = h.num_rows();
        let column_syndromes: Vec<u32> = (0..d)
            .map(|j| {
                (0..r).fold(0u32, |s, i| s | (u32::from(h.get(i, j)) << i))
            })
            .collect();

        let mut code = InnerCode {
            d,
            k0,
            d0: 0,
            h,
            g,
            column_syndromes,
            syndrome_of: Vec::new(),
            leaders: Vec::new(),
        };
        if d <= FULL_SYNDROME_TABLE_LEN {
            code.syndrome_of = (0..1u32 << d)
                .map(|w| code.syndrome_by_columns(w))
                .collect();
        }
        code.d0 = code.min_distance()?;
        code.build_leader_table();
        Ok(code)
    }

    /// Even-weight code of length `d`.
    pub fn parity(d: usize) -> Result<Self> {
        Self::from_parity_check(BitMatrix::from_rows(d, vec![BitVector::ones(d)])?)
    }

    /// Repetition code `{0^d, 1^d}`.
    pub fn repetition(d: usize) -> Result<Self> {
        let rows = (1..d)
            .map(|j| BitVector::from_support(d, [0, j]))
            .collect();
        Self::from_parity_check(BitMatrix::from_rows(d, rows)?)
    }

    /// The [7,4,3] Hamming code.
    pub fn hamming_7_4() -> Result<Self> {
        Self::from_parity_check(BitMatrix::from_strs(&["1010101", "0110011", "0001111"])?)
    }

    /// The [8,4,4] extended Hamming code.
    pub fn extended_hamming_8_4() -> Result<Self> {
        Self::from_parity_check(BitMatrix::from_strs(&[
            "10101010", "01100110", "00011110", "11111111",
        ])?)
    }

    /// Code spanned by the given generator rows.
    pub fn from_generator(g: BitMatrix) -> Result<Self> {
        let h = BitMatrix::from_rows(g.num_cols(), g.nullspace_basis())?;
        Self::from_parity_check(h)
    }

    pub fn len(&self) -> usize {
        self.d
    }

    pub fn is_empty(&self) -> bool {
        self.d == 0
    }

    pub fn dimension(&self) -> usize {
        self.k0
    }

    pub fn distance(&self) -> usize {
        self.d0
    }

    /// Number of errors the bounded-distance decoder corrects.
    pub fn radius(&self) -> usize {
        (self.d0 - 1) / 2
    }

    pub fn parity_check(&self) -> &BitMatrix {
        &self.h
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.g
    }

    /// Number of rows of the parity-check matrix, `d - k0`.
    pub fn redundancy(&self) -> usize {
        self.h.num_rows()
    }

    pub fn check(&self, w: &BitVector) -> Result<bool> {
        Error::check_len(self.d, w.len())?;
        Ok(self.syndrome(w.to_word() as u32) == 0)
    }

    /// Nearest codeword when one lies within the decoding radius, else `None`.
    pub fn decode_bounded(&self, w: &BitVector) -> Result<Option<BitVector>> {
        Error::check_len(self.d, w.len())?;
        let word = w.to_word() as u32;
        Ok(self
            .leader(self.syndrome(word))
            .map(|e| BitVector::from_word(self.d, u64::from(word ^ e))))
    }

    #[inline]
    pub fn syndrome(&self, word: u32) -> u32 {
        if self.syndrome_of.is_empty() {
            self.syndrome_by_columns(word)
        } else {
            self.syndrome_of[word as usize]
        }
    }

    /// Minimum-weight error pattern for `syndrome`, if within the radius.
    #[inline]
    pub fn leader(&self, syndrome: u32) -> Option<u32> {
        match self.leaders[syndrome as usize] {
            NO_LEADER => None,
            e => Some(e),
        }
    }

    /// Exact minimum distance by exhaustive enumeration of the codewords.
    pub fn min_distance(&self) -> Result<usize> {
        if self.k0 == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(self
            .codeword_words()?
            .filter(|&w| w != 0)
            .map(|w| w.count_ones() as usize)
            .min()
            .expect("k0 >= 1 gives a nonzero codeword"))
    }

    /// All `2^k0` codewords, each exactly once, in Gray-code order from zero.
    pub fn enumerate_codewords(&self) -> Result<impl Iterator<Item = BitVector> + '_> {
        let d = self.d;
        Ok(self
            .codeword_words()?
            .map(move |w| BitVector::from_word(d, u64::from(w))))
    }

    fn codeword_words(&self) -> Result<impl Iterator<Item = u32> + '_> {
        if self.k0 > MAX_ENUM_DIM {
            return Err(Error::TooLarge {
                what: "inner code dimension",
                size: self.k0 as u64,
                limit: MAX_ENUM_DIM as u64,
            });
        }
        let gens: Vec<u32> = self.g.rows().iter().map(|r| r.to_word() as u32).collect();
        Ok(gray_span(gens))
    }

    fn syndrome_by_columns(&self, word: u32) -> u32 {
        let mut s = 0;
        let mut rest = word;
        while rest != 0 {
            s ^= self.column_syndromes[rest.trailing_zeros() as usize];
            rest &= rest - 1;
        }
        s
    }

    fn build_leader_table(&mut self) {
        let r = self.h.num_rows();
        let mut leaders = vec![NO_LEADER; 1usize << r];
        let radius = self.radius();
        for weight in 0..=radius {
            for_each_pattern(self.d, weight, |e| {
                let s = self.syndrome_by_columns(e) as usize;
                // Two patterns within the radius sharing a syndrome would differ
                // by a nonzero codeword of weight < d0.
                assert!(
                    leaders[s] == NO_LEADER,
                    "ambiguous coset leader inside the decoding radius"
                );
                leaders[s] = e;
            });
        }
        self.leaders = leaders;
    }

    /// Serializes in the `innercode v1` text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {}", self.d, self.h.num_rows()).unwrap();
        for row in self.h.rows() {
            writeln!(out, "{row}").unwrap();
        }
        out
    }

    /// Parses the `innercode v1` text format: a `d r` header line followed by
    /// `r` rows of `d` characters from `{0,1}`.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (ln, header) = lines.next().ok_or_else(|| Error::parse(1, "empty inner code file"))?;
        let fields: Vec<usize> = header
            .split_whitespace()
            .map(|f| f.parse().map_err(|_| Error::parse(ln, format!("bad integer {f:?}"))))
            .collect::<Result<_>>()?;
        let [d, r] = fields[..] else {
            return Err(Error::parse(ln, "header must be `d r`"));
        };
        let mut rows = Vec::with_capacity(r);
        for _ in 0..r {
            let (ln, line) = lines
                .next()
                .ok_or_else(|| Error::parse(ln, format!("expected {r} matrix rows")))?;
            if line.len() != d || !line.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(Error::parse(ln, format!("row must be {d} characters of 0/1")));
            }
            rows.push(line.parse::<BitVector>()?);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(Error::parse(ln, "trailing content after matrix rows"));
        }
        Self::from_parity_check(BitMatrix::from_rows(d, rows)?)
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        Ok(std::fs::write(path, self.to_text())?)
    }
}

/// Every element of the span of `gens`, via a Gray-code walk.
fn gray_span(gens: Vec<u32>) -> impl Iterator<Item = u32> {
    let total = 1u64 << gens.len();
    let mut acc = 0u32;
    let mut i = 0u64;
    std::iter::from_fn(move || {
        if i == total {
            return None;
        }
        if i > 0 {
            acc ^= gens[i.trailing_zeros() as usize];
        }
        i += 1;
        Some(acc)
    })
}

/// Calls `f` with every `len`-bit mask of the given weight.
fn for_each_pattern(len: usize, weight: usize, mut f: impl FnMut(u32)) {
    fn rec(start: usize, len: usize, left: usize, acc: u32, f: &mut impl FnMut(u32)) {
        if left == 0 {
            f(acc);
            return;
        }
        for j in start..=len - left {
            rec(j + 1, len, left - 1, acc | (1 << j), f);
        }
    }
    if weight <= len {
        rec(0, len, weight, 0, &mut f);
    }
}
