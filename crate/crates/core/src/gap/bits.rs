use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A binary string; index 0 is the leftmost symbol.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    pub fn empty() -> Self {
        BitString(Vec::new())
    }

    pub fn zeros(len: usize) -> Self {
        BitString(vec![false; len])
    }

    /// The `len`-bit binary expansion of `value`, most significant bit first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        BitString((0..len).rev().map(|i| i < 64 && (value >> i) & 1 == 1).collect())
    }

    /// Value of the string read as a binary number (first symbol most
    /// significant). Strings longer than 64 bits keep their low 64 bits.
    pub fn to_u64(&self) -> u64 {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn push(&mut self, b: bool) {
        self.0.push(b);
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        BitString(v)
    }

    pub fn slice(&self, start: usize, end: usize) -> BitString {
        BitString(self.0[start..end].to_vec())
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Every string of length `len`, in lexicographic order.
    pub fn all(len: usize) -> impl Iterator<Item = BitString> {
        assert!(len < 64, "enumeration length {len} is too large");
        (0..1u64 << len).map(move |v| BitString::from_u64(v, len))
    }

    /// The strings of length `len` with exactly one 1, in lexicographic
    /// order: the k-th (1-based) has its 1 at index `len − k`.
    pub fn one_hot(len: usize) -> Vec<BitString> {
        (1..=len)
            .map(|k| {
                let mut v = vec![false; len];
                v[len - k] = true;
                BitString(v)
            })
            .collect()
    }

    /// For a string with exactly one 1, its 1-based rank among
    /// [`BitString::one_hot`] strings of the same length.
    pub fn one_hot_rank(&self) -> Option<usize> {
        if self.count_ones() != 1 {
            return None;
        }
        let pos = self.0.iter().position(|&b| b)?;
        Some(self.len() - pos)
    }
}

impl From<&[bool]> for BitString {
    fn from(bits: &[bool]) -> Self {
        BitString(bits.to_vec())
    }
}

impl FromStr for BitString {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::input(format!("`{other}` is not a binary digit"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

/// Pairing `⟨x, y⟩ = 0x₁0x₂⋯0xₙ1y₁⋯yₘ`.
pub fn pair_encode(x: &BitString, y: &BitString) -> BitString {
    let mut v = Vec::with_capacity(2 * x.len() + 1 + y.len());
    for &b in x.bits() {
        v.push(false);
        v.push(b);
    }
    v.push(true);
    v.extend_from_slice(y.bits());
    BitString(v)
}

/// Length of `⟨x, y⟩` given `|x|` and `|y|`.
pub fn pair_len(x_len: usize, y_len: usize) -> usize {
    2 * x_len + 1 + y_len
}

pub fn pair_decode(s: &BitString) -> Result<(BitString, BitString)> {
    let bits = s.bits();
    let mut x = Vec::new();
    let mut i = 0;
    loop {
        match bits.get(i) {
            None => return Err(Error::input(format!("`{s}` has no pairing separator"))),
            Some(true) => break,
            Some(false) => {
                let b = *bits
                    .get(i + 1)
                    .ok_or_else(|| Error::input(format!("`{s}` ends inside the first component")))?;
                x.push(b);
                i += 2;
            }
        }
    }
    Ok((BitString(x), BitString(bits[i + 1..].to_vec())))
}

/// Left-nested tuple `⟨x₁, x₂, …, x_k⟩ = ⟨⟨x₁, x₂⟩, …, x_k⟩`; a 1-tuple is
/// the string itself.
pub fn tuple_encode(parts: &[&BitString]) -> BitString {
    let mut it = parts.iter();
    let first = it.next().map(|b| (*b).clone()).unwrap_or_default();
    it.fold(first, |acc, p| pair_encode(&acc, p))
}

/// Inverse of [`tuple_encode`] for a known arity.
pub fn tuple_decode(s: &BitString, arity: usize) -> Result<Vec<BitString>> {
    if arity == 0 {
        return Err(Error::input("tuple arity must be positive"));
    }
    let mut parts = Vec::with_capacity(arity);
    let mut cur = s.clone();
    for _ in 1..arity {
        let (head, last) = pair_decode(&cur)?;
        parts.push(last);
        cur = head;
    }
    parts.push(cur);
    parts.reverse();
    Ok(parts)
}

/// Length of a left-nested tuple with components of the given lengths.
pub fn tuple_len(lens: &[usize]) -> usize {
    let mut it = lens.iter();
    let first = it.next().copied().unwrap_or(0);
    it.fold(first, |acc, &l| pair_len(acc, l))
}
