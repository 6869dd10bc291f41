//! Explicit truth tables for completely- and incompletely-specified Boolean functions.
//!
//! A function over `n` variables is stored as `2^n` bits where bit `m` holds the
//! value at minterm `m = x_n...x_1` read as a binary number (so `x_1` is the least
//! significant input). In hexadecimal notation the leftmost digit carries the
//! highest minterms.

use std::fmt;
use std::ops::{BitAnd, BitXor, Not};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest supported number of variables.
pub const MAX_VARS: usize = 16;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    num_vars: usize,
    words: Vec<u64>,
}

fn word_count(num_vars: usize) -> usize {
    if num_vars <= 6 {
        1
    } else {
        1 << (num_vars - 6)
    }
}

/// Mask of the valid bits in the (single) word of a table with fewer than 6 variables.
fn tail_mask(num_vars: usize) -> u64 {
    if num_vars >= 6 {
        u64::MAX
    } else {
        (1u64 << (1 << num_vars)) - 1
    }
}

fn check_vars(num_vars: usize) -> Result<()> {
    if num_vars > MAX_VARS {
        Err(Error::TooManyVars(num_vars))
    } else {
        Ok(())
    }
}

impl TruthTable {
    pub fn zeros(num_vars: usize) -> Result<Self> {
        check_vars(num_vars)?;
        Ok(TruthTable {
            num_vars,
            words: vec![0; word_count(num_vars)],
        })
    }

    pub fn ones(num_vars: usize) -> Result<Self> {
        let mut t = Self::zeros(num_vars)?;
        t.words.iter_mut().for_each(|w| *w = u64::MAX);
        t.mask_tail();
        Ok(t)
    }

    /// Builds a table by evaluating `f` on every minterm index.
    pub fn from_fn(num_vars: usize, mut f: impl FnMut(usize) -> bool) -> Result<Self> {
        let mut t = Self::zeros(num_vars)?;
        for m in 0..t.num_bits() {
            if f(m) {
                t.set_bit(m, true);
            }
        }
        Ok(t)
    }

    /// Builds a table with at most 6 variables from the low `2^n` bits of `bits`.
    pub fn from_u64(num_vars: usize, bits: u64) -> Result<Self> {
        if num_vars > 6 {
            return Err(Error::TooManyVars(num_vars));
        }
        let mut t = Self::zeros(num_vars)?;
        t.words[0] = bits;
        t.mask_tail();
        Ok(t)
    }

    fn mask_tail(&mut self) {
        let mask = tail_mask(self.num_vars);
        if let Some(w) = self.words.last_mut() {
            *w &= mask;
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Number of minterms, `2^n`.
    pub fn num_bits(&self) -> usize {
        1 << self.num_vars
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// The low 64 bits of the table.
    pub fn as_u64(&self) -> u64 {
        self.words[0]
    }

    /// Value at `minterm`.
    ///
    /// # Panics
    ///
    /// Panics if `minterm >= 2^n`.
    #[inline]
    pub fn bit(&self, minterm: usize) -> bool {
        assert!(minterm < self.num_bits(), "minterm {minterm} out of range");
        (self.words[minterm >> 6] >> (minterm & 63)) & 1 == 1
    }

    pub fn value_at(&self, minterm: usize) -> Result<bool> {
        if minterm >= self.num_bits() {
            return Err(Error::MintermOutOfRange {
                minterm,
                num_vars: self.num_vars,
            });
        }
        Ok(self.bit(minterm))
    }

    pub fn set_bit(&mut self, minterm: usize, value: bool) {
        assert!(minterm < self.num_bits(), "minterm {minterm} out of range");
        let w = &mut self.words[minterm >> 6];
        if value {
            *w |= 1 << (minterm & 63);
        } else {
            *w &= !(1 << (minterm & 63));
        }
    }

    pub fn flip_bit(&mut self, minterm: usize) {
        assert!(minterm < self.num_bits(), "minterm {minterm} out of range");
        self.words[minterm >> 6] ^= 1 << (minterm & 63);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Minterms whose bit is set, in ascending order.
    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some((i << 6) | b)
            })
        })
    }

    /// Smallest set minterm, if any.
    pub fn first_one(&self) -> Option<usize> {
        self.ones_iter().next()
    }

    /// Parses a hexadecimal truth table.
    ///
    /// For `n >= 2` exactly `2^n / 4` digits are required; for `n < 2` a single
    /// digit whose unused high bits are zero. A `0x`/`0X` prefix is optional.
    pub fn parse_hex(text: &str, num_vars: usize) -> Result<Self> {
        check_vars(num_vars)?;
        let digits = text
            .strip_prefix("0x")
            .or_else(|| text.strip_prefix("0X"))
            .unwrap_or(text);
        let expected = hex_digits(num_vars);
        let found = digits.chars().count();
        if found != expected {
            return Err(Error::HexLength {
                num_vars,
                expected,
                found,
            });
        }
        let mut t = Self::zeros(num_vars)?;
        // The rightmost digit holds minterms 0..3.
        for (pos, ch) in digits.chars().rev().enumerate() {
            let nibble = ch.to_digit(16).ok_or(Error::HexDigit(ch))? as u64;
            if num_vars < 2 {
                if nibble & !tail_mask(num_vars) != 0 {
                    return Err(Error::HexPadding(num_vars));
                }
                t.words[0] = nibble;
            } else {
                let bit = pos * 4;
                t.words[bit >> 6] |= nibble << (bit & 63);
            }
        }
        Ok(t)
    }

    /// Uppercase hexadecimal with a `0x` prefix; the inverse of [`TruthTable::parse_hex`].
    pub fn to_hex(&self) -> String {
        let digits = hex_digits(self.num_vars);
        let mut s = String::with_capacity(digits + 2);
        s.push_str("0x");
        for pos in (0..digits).rev() {
            let bit = pos * 4;
            let nibble = (self.words[bit >> 6] >> (bit & 63)) & 0xF;
            s.push(char::from_digit(nibble as u32, 16).unwrap().to_ascii_uppercase());
        }
        s
    }
}

fn hex_digits(num_vars: usize) -> usize {
    if num_vars < 2 {
        1
    } else {
        (1 << num_vars) / 4
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable({}, {})", self.num_vars, self.to_hex())
    }
}

impl BitAnd for &TruthTable {
    type Output = TruthTable;

    fn bitand(self, rhs: &TruthTable) -> TruthTable {
        assert_eq!(self.num_vars, rhs.num_vars);
        TruthTable {
            num_vars: self.num_vars,
            words: self.words.iter().zip(&rhs.words).map(|(a, b)| a & b).collect(),
        }
    }
}

impl BitXor for &TruthTable {
    type Output = TruthTable;

    fn bitxor(self, rhs: &TruthTable) -> TruthTable {
        assert_eq!(self.num_vars, rhs.num_vars);
        TruthTable {
            num_vars: self.num_vars,
            words: self.words.iter().zip(&rhs.words).map(|(a, b)| a ^ b).collect(),
        }
    }
}

impl Not for &TruthTable {
    type Output = TruthTable;

    fn not(self) -> TruthTable {
        let mut t = TruthTable {
            num_vars: self.num_vars,
            words: self.words.iter().map(|w| !w).collect(),
        };
        t.mask_tail();
        t
    }
}

/// An incompletely-specified function: prescribed values on the care set,
/// don't-care elsewhere.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IncompleteFunction {
    value: TruthTable,
    care: TruthTable,
}

impl IncompleteFunction {
    pub fn new(value: TruthTable, care: TruthTable) -> Result<Self> {
        if value.num_vars != care.num_vars {
            return Err(Error::VarCountMismatch(value.num_vars, care.num_vars));
        }
        Ok(IncompleteFunction { value, care })
    }

    /// A completely-specified function (care set is everything).
    pub fn fully_specified(value: TruthTable) -> Self {
        let care = TruthTable::ones(value.num_vars).expect("variable count already validated");
        IncompleteFunction { value, care }
    }

    pub fn value(&self) -> &TruthTable {
        &self.value
    }

    pub fn care(&self) -> &TruthTable {
        &self.care
    }

    pub fn num_vars(&self) -> usize {
        self.value.num_vars
    }

    /// Care minterms in ascending order.
    pub fn care_minterms(&self) -> impl Iterator<Item = usize> + '_ {
        self.care.ones_iter()
    }

    pub fn care_count(&self) -> usize {
        self.care.count_ones()
    }

    /// True iff the function is 0 on every care minterm, i.e. the empty ESOP realizes it.
    pub fn is_constant_zero_on_care(&self) -> bool {
        (&self.value & &self.care).is_zero()
    }

    /// Seeded random function with independent fair bits for value and care.
    ///
    /// The generator is ChaCha8 seeded through `seed_from_u64(seed)`. The value
    /// table's 64-bit words are drawn first (lowest minterms first), then the care
    /// table's, one `next_u64` per word; tables with fewer than 6 variables use the
    /// low `2^n` bits of a single draw. This layout is fixed so that benchmark runs
    /// replay identically.
    pub fn random(num_vars: usize, seed: u64) -> Result<Self> {
        check_vars(num_vars)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || {
            let mut t = TruthTable::zeros(num_vars).expect("checked");
            t.words.iter_mut().for_each(|w| *w = rng.next_u64());
            t.mask_tail();
            t
        };
        let value = draw();
        let care = draw();
        Ok(IncompleteFunction { value, care })
    }
}

/// Applies an input transformation to a 4-variable table: the result at `x`
/// is `f` at the minterm obtained by complementing `x` with `neg` and then
/// moving input bit `i` to position `perm[i]`.
fn transform4(f: u16, perm: &[usize; 4], neg: usize) -> u16 {
    let mut g = 0u16;
    for x in 0..16usize {
        let y = x ^ neg;
        let mut z = 0;
        for (i, &p) in perm.iter().enumerate() {
            z |= ((y >> i) & 1) << p;
        }
        if (f >> z) & 1 == 1 {
            g |= 1 << x;
        }
    }
    g
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    p.iter().for_each(|&i| seen[i] = true);
                    if seen.iter().all(|&s| s) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// All functions NPN-equivalent to `f` (4 variables), with repetitions.
fn npn4_orbit(f: u16, perms: &[[usize; 4]]) -> impl Iterator<Item = u16> + '_ {
    perms.iter().flat_map(move |perm| {
        (0..16).flat_map(move |neg| {
            let g = transform4(f, perm, neg);
            [g, !g]
        })
    })
}

/// NPN canonical form of a 4-variable function: the numerically smallest
/// truth table over all input permutations, input complementations and
/// output complementation.
pub fn npn4_canonical(f: u16) -> u16 {
    let perms = permutations4();
    npn4_orbit(f, &perms).min().expect("orbit is nonempty")
}

/// Sorted canonical representatives of all NPN classes of 4-variable functions.
pub fn npn4_representatives() -> Vec<TruthTable> {
    let perms = permutations4();
    let mut visited = vec![false; 1 << 16];
    let mut reps = Vec::new();
    for f in 0..=u16::MAX {
        if visited[f as usize] {
            continue;
        }
        let mut min = f;
        for g in npn4_orbit(f, &perms) {
            visited[g as usize] = true;
            min = min.min(g);
        }
        reps.push(min);
    }
    reps.sort_unstable();
    reps.into_iter()
        .map(|r| TruthTable::from_u64(4, r as u64).expect("4 variables"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_gate() {
        let t = TruthTable::parse_hex("0x8", 2).unwrap();
        assert!(t.bit(3));
        assert!(!t.bit(2) && !t.bit(1) && !t.bit(0));
    }

    #[test]
    fn parse_low_digit_order() {
        let t = TruthTable::parse_hex("0x166A", 4).unwrap();
        assert!(t.bit(1));
        assert!(!t.bit(0));
        assert!(!t.value_at(0).unwrap());
        assert_eq!(t.as_u64(), 0x166A);
    }

    #[test]
    fn parse_example_table() {
        let t = TruthTable::parse_hex("0x688C802028222222", 6).unwrap();
        assert_eq!(t.as_u64(), 0x688C802028222222);
        assert!(t.value_at(62).unwrap());
        assert!(!t.value_at(63).unwrap());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            TruthTable::parse_hex("0x16", 4),
            Err(Error::HexLength {
                expected: 4,
                found: 2,
                ..
            })
        ));
        assert!(matches!(TruthTable::parse_hex("0x1G6A", 4), Err(Error::HexDigit('G'))));
        assert!(matches!(TruthTable::parse_hex("0x4", 1), Err(Error::HexPadding(1))));
        assert!(matches!(TruthTable::parse_hex("0x2", 0), Err(Error::HexPadding(0))));
        assert!(matches!(TruthTable::parse_hex("0x0", 17), Err(Error::TooManyVars(17))));
        assert!(TruthTable::parse_hex("3", 1).is_ok());
        assert!(TruthTable::parse_hex("1", 0).unwrap().bit(0));
    }

    #[test]
    fn hex_round_trip_examples() {
        assert_eq!(TruthTable::parse_hex("0x166A", 4).unwrap().to_hex(), "0x166A");
        assert_eq!(TruthTable::zeros(3).unwrap().to_hex(), "0x00");
        let care = TruthTable::parse_hex("0x6aaeff3ffebfeaa6", 6).unwrap();
        assert_eq!(care.to_hex(), "0x6AAEFF3FFEBFEAA6");
        assert_eq!(TruthTable::ones(1).unwrap().to_hex(), "0x3");
        assert_eq!(TruthTable::ones(0).unwrap().to_hex(), "0x1");
    }

    #[test]
    fn value_at_range() {
        let t = TruthTable::ones(3).unwrap();
        assert!((0..8).all(|m| t.value_at(m).unwrap()));
        assert!(matches!(
            t.value_at(8),
            Err(Error::MintermOutOfRange { minterm: 8, .. })
        ));
    }

    #[test]
    fn large_tables() {
        let t = TruthTable::from_fn(10, |m| m % 3 == 0).unwrap();
        assert_eq!(t.words().len(), 16);
        let back = TruthTable::parse_hex(&t.to_hex(), 10).unwrap();
        assert_eq!(back, t);
        assert_eq!(t.ones_iter().take(3).collect::<Vec<_>>(), vec![0, 3, 6]);
        assert_eq!(t.count_ones(), (0..1024).filter(|m| m % 3 == 0).count());
    }

    #[test]
    fn random_is_deterministic() {
        let a = IncompleteFunction::random(5, 42).unwrap();
        let b = IncompleteFunction::random(5, 42).unwrap();
        let c = IncompleteFunction::random(5, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let z = IncompleteFunction::random(0, 7).unwrap();
        assert_eq!(z.value().num_bits(), 1);
        assert_eq!(z.care().num_bits(), 1);
        assert!(IncompleteFunction::random(17, 0).is_err());
    }

    #[test]
    fn random_bit_balance() {
        // 1000 draws of 2 * 32 bits; the share of ones must lie within 3 sigma of 1/2.
        let mut ones = 0usize;
        let mut total = 0usize;
        for seed in 0..1000 {
            let g = IncompleteFunction::random(5, seed).unwrap();
            ones += g.value().count_ones() + g.care().count_ones();
            total += 64;
        }
        let p = ones as f64 / total as f64;
        let sigma = (0.25 / total as f64).sqrt();
        assert!((p - 0.5).abs() <= 3.0 * sigma, "share {p}");
    }

    #[test]
    fn constant_zero_on_care() {
        let zero = IncompleteFunction::fully_specified(TruthTable::zeros(3).unwrap());
        assert!(zero.is_constant_zero_on_care());
        let vacuous = IncompleteFunction::new(TruthTable::ones(3).unwrap(), TruthTable::zeros(3).unwrap()).unwrap();
        assert!(vacuous.is_constant_zero_on_care());
        let ex1 = IncompleteFunction::new(
            TruthTable::parse_hex("0x688C802028222222", 6).unwrap(),
            TruthTable::parse_hex("0x6AAEFF3FFEBFEAA6", 6).unwrap(),
        )
        .unwrap();
        assert!(!ex1.is_constant_zero_on_care());
        assert!(IncompleteFunction::new(TruthTable::zeros(2).unwrap(), TruthTable::zeros(3).unwrap()).is_err());
    }

    #[test]
    fn npn4_class_count() {
        let reps = npn4_representatives();
        assert_eq!(reps.len(), 222);
        assert_eq!(reps[0].as_u64(), 0);
        assert!(reps.windows(2).all(|w| w[0].as_u64() < w[1].as_u64()));
        for r in &reps {
            assert_eq!(npn4_canonical(r.as_u64() as u16) as u64, r.as_u64());
        }
    }

    #[test]
    fn npn4_canonical_is_permutation_invariant() {
        let f = 0x166Au16;
        let c = npn4_canonical(f);
        for perm in permutations4() {
            assert_eq!(npn4_canonical(transform4(f, &perm, 0)), c);
        }
        assert_eq!(npn4_canonical(!f), c);
        assert_eq!(npn4_canonical(transform4(f, &[0, 1, 2, 3], 0b0101)), c);
    }

    #[test]
    fn every_function_maps_to_one_representative() {
        let reps: std::collections::HashSet<u16> = npn4_representatives().iter().map(|t| t.as_u64() as u16).collect();
        for f in (0..=u16::MAX).step_by(97) {
            assert!(reps.contains(&npn4_canonical(f)));
        }
    }
}
