//! Value types shared by every module: symbols, finite prefixes, blocks.
//!
//! Positions are 1-based wherever they are exposed: `seq.get(1)` is the first
//! term. Internally the terms are stored as a dense `Vec<i8>`.

use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A letter of the alphabet {-1, 0, 1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub struct Symbol(i8);

impl Symbol {
    pub const NEG: Symbol = Symbol(-1);
    pub const ZERO: Symbol = Symbol(0);
    pub const POS: Symbol = Symbol(1);

    pub fn new(value: i64) -> Result<Self> {
        match value {
            -1..=1 => Ok(Symbol(value as i8)),
            other => Err(Error::InvalidSymbol(other)),
        }
    }

    #[inline]
    pub fn value(self) -> i8 {
        self.0
    }

    #[inline]
    pub fn square(self) -> Symbol {
        Symbol(self.0 * self.0)
    }
}

impl TryFrom<i8> for Symbol {
    type Error = Error;

    fn try_from(value: i8) -> Result<Self> {
        Symbol::new(value as i64)
    }
}

impl From<Symbol> for i8 {
    fn from(s: Symbol) -> i8 {
        s.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// 2-bit letter code used when blocks are packed into integers.
/// 0 -> 0, 1 -> 1, -1 -> 2.
#[inline]
pub(crate) fn letter_code(v: i8) -> u8 {
    match v {
        0 => 0,
        1 => 1,
        _ => 2,
    }
}

#[inline]
pub(crate) fn code_letter(c: u8) -> i8 {
    match c {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

fn validate(data: &[i8]) -> Result<()> {
    match data.iter().find(|v| !(-1..=1).contains(*v)) {
        Some(&bad) => Err(Error::InvalidSymbol(bad as i64)),
        None => Ok(()),
    }
}

/// A finite, non-empty prefix `z(1), ..., z(N)` of a sequence over {-1, 0, 1}.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SignSeq {
    data: Vec<i8>,
}

impl SignSeq {
    pub fn from_vec(data: Vec<i8>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptySequence);
        }
        validate(&data)?;
        Ok(SignSeq { data })
    }

    pub fn from_symbols(symbols: &[Symbol]) -> Result<Self> {
        Self::from_vec(symbols.iter().map(|s| s.value()).collect())
    }

    /// Caller guarantees the data is non-empty and every value is in {-1,0,1}.
    pub(crate) fn from_raw(data: Vec<i8>) -> Self {
        debug_assert!(!data.is_empty());
        debug_assert!(validate(&data).is_ok());
        SignSeq { data }
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::from_vec(vec![0; len])
    }

    pub fn constant(value: Symbol, len: usize) -> Result<Self> {
        Self::from_vec(vec![value.value(); len])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    /// Always false; kept for API symmetry with slices.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Term at 1-based position `n`.
    #[inline]
    pub fn get(&self, n: usize) -> Option<Symbol> {
        n.checked_sub(1)
            .and_then(|i| self.data.get(i))
            .map(|&v| Symbol(v))
    }

    /// Raw 0-based view of the terms.
    #[inline]
    pub fn as_slice(&self) -> &[i8] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<i8> {
        self.data
    }

    pub fn iter(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.data.iter().map(|&v| Symbol(v))
    }

    /// First `n` terms.
    pub fn prefix(&self, n: usize) -> Result<SignSeq> {
        if n == 0 {
            return Err(Error::EmptySequence);
        }
        if n > self.len() {
            return Err(Error::PrefixTooShort {
                required: n,
                available: self.len(),
            });
        }
        Ok(SignSeq::from_raw(self.data[..n].to_vec()))
    }

    /// Number of non-zero terms, i.e. `sum z(n)^2`.
    pub fn support_size(&self) -> usize {
        self.data.iter().filter(|&&v| v != 0).count()
    }

    pub fn support_density(&self) -> f64 {
        self.support_size() as f64 / self.len() as f64
    }

    /// Block of length `len` starting at 1-based position `start`.
    pub fn block_at(&self, start: usize, len: usize) -> Result<Block> {
        let end = start
            .checked_sub(1)
            .map(|s| s + len)
            .filter(|&e| len > 0 && e <= self.len())
            .ok_or(Error::PrefixTooShort {
                required: start.saturating_sub(1) + len,
                available: self.len(),
            })?;
        Ok(Block::from_raw(self.data[start - 1..end].to_vec()))
    }
}

impl Index<usize> for SignSeq {
    type Output = i8;

    /// 1-based indexing.
    fn index(&self, n: usize) -> &i8 {
        &self.data[n - 1]
    }
}

impl fmt::Debug for SignSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const SHOWN: usize = 32;
        write!(f, "SignSeq[{}](", self.len())?;
        for (i, v) in self.data.iter().take(SHOWN).enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        if self.len() > SHOWN {
            f.write_str(",…")?;
        }
        f.write_str(")")
    }
}

/// A finite word over {-1, 0, 1} together with its support.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    letters: Vec<i8>,
    support: Vec<usize>,
}

impl Block {
    pub fn new(letters: Vec<i8>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::EmptySequence);
        }
        validate(&letters)?;
        Ok(Self::from_raw(letters))
    }

    pub(crate) fn from_raw(letters: Vec<i8>) -> Self {
        let support = letters
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(i, _)| i)
            .collect();
        Block { letters, support }
    }

    /// Decode a block packed with [`Block::packed`].
    pub(crate) fn unpack(code: u128, len: usize) -> Self {
        let letters = (0..len)
            .map(|i| code_letter(((code >> (2 * (len - 1 - i))) & 3) as u8))
            .collect();
        Self::from_raw(letters)
    }

    /// 2-bit packing, first letter in the most significant position.
    pub(crate) fn packed(&self) -> u128 {
        self.letters
            .iter()
            .fold(0u128, |acc, &v| (acc << 2) | letter_code(v) as u128)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[i8] {
        &self.letters
    }

    /// Positions (0-based) of the non-zero letters.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn ones(&self) -> usize {
        self.support.len()
    }

    pub fn square(&self) -> Block {
        Block {
            letters: self.letters.iter().map(|v| v * v).collect(),
            support: self.support.clone(),
        }
    }
}

impl fmt::Debug for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

impl Serialize for Block {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.letters.serialize(s)
    }
}

/// Coordinate square map `z -> z^2`.
pub fn square_map(z: &SignSeq) -> SignSeq {
    SignSeq::from_raw(z.data.iter().map(|v| v * v).collect())
}

/// Coordinatewise product `m(a, b)(n) = a(n) b(n)`.
pub fn pointwise_product(a: &SignSeq, b: &SignSeq) -> Result<SignSeq> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(SignSeq::from_raw(
        a.data.iter().zip(&b.data).map(|(x, y)| x * y).collect(),
    ))
}

/// Left shift by `s`: `result(n) = w(n + s)`.
pub fn shift(w: &SignSeq, s: usize) -> Result<SignSeq> {
    if s >= w.len() {
        return Err(Error::ShiftOutOfRange {
            shift: s,
            len: w.len(),
        });
    }
    Ok(SignSeq::from_raw(w.data[s..].to_vec()))
}
