//! Cubes and ESOP forms.
//!
//! A cube over `n` variables is a word `l_1 ... l_n` over `{0, 1, -}`: `1` keeps
//! `x_i`, `0` keeps its complement and `-` drops the variable. An ESOP form is the
//! XOR of its cubes; the empty form is constant 0.

use std::cmp::Ordering;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::bfunc::{IncompleteFunction, TruthTable, MAX_VARS};
use crate::error::{Error, Result};

/// One position of a cube.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Trit {
    Zero,
    One,
    DontCare,
}

impl Trit {
    pub fn to_char(self) -> char {
        match self {
            Trit::Zero => '0',
            Trit::One => '1',
            Trit::DontCare => '-',
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            '0' => Ok(Trit::Zero),
            '1' => Ok(Trit::One),
            '-' => Ok(Trit::DontCare),
            other => Err(Error::CubeChar(other)),
        }
    }
}

/// A product term. Bit `i` of `pos` (resp. `neg`) set means `x_{i+1}`
/// (resp. its complement) occurs in the term; never both.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cube {
    num_vars: u8,
    pos: u16,
    neg: u16,
}

impl Cube {
    /// The all-dash cube (constant 1).
    pub fn universe(num_vars: usize) -> Result<Self> {
        if num_vars > MAX_VARS {
            return Err(Error::TooManyVars(num_vars));
        }
        Ok(Cube {
            num_vars: num_vars as u8,
            pos: 0,
            neg: 0,
        })
    }

    pub fn from_trits(trits: &[Trit]) -> Result<Self> {
        let mut cube = Cube::universe(trits.len())?;
        for (i, &t) in trits.iter().enumerate() {
            cube.set(i, t);
        }
        Ok(cube)
    }

    /// Builds a cube from its positive and negative literal masks.
    pub fn from_masks(num_vars: usize, pos: u16, neg: u16) -> Result<Self> {
        let mut cube = Cube::universe(num_vars)?;
        let all = cube.var_mask();
        if pos & neg != 0 || (pos | neg) & !all != 0 {
            return Err(Error::CubeMasks { pos, neg });
        }
        cube.pos = pos;
        cube.neg = neg;
        Ok(cube)
    }

    /// Parses a single word such as `0-1001`; the leftmost character is `l_1`.
    pub fn parse(word: &str) -> Result<Self> {
        let trits = word.chars().map(Trit::from_char).collect::<Result<Vec<_>>>()?;
        Cube::from_trits(&trits)
    }

    fn var_mask(&self) -> u16 {
        ((1u32 << self.num_vars) - 1) as u16
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars as usize
    }

    pub fn pos_mask(&self) -> u16 {
        self.pos
    }

    pub fn neg_mask(&self) -> u16 {
        self.neg
    }

    /// Number of literals in the term.
    pub fn literal_count(&self) -> usize {
        (self.pos | self.neg).count_ones() as usize
    }

    /// Entry at 0-based position `i` (variable `x_{i+1}`).
    pub fn get(&self, i: usize) -> Trit {
        assert!(i < self.num_vars(), "position {i} out of range");
        if self.pos >> i & 1 == 1 {
            Trit::One
        } else if self.neg >> i & 1 == 1 {
            Trit::Zero
        } else {
            Trit::DontCare
        }
    }

    pub fn set(&mut self, i: usize, t: Trit) {
        assert!(i < self.num_vars(), "position {i} out of range");
        let bit = 1u16 << i;
        self.pos &= !bit;
        self.neg &= !bit;
        match t {
            Trit::One => self.pos |= bit,
            Trit::Zero => self.neg |= bit,
            Trit::DontCare => {}
        }
    }

    pub fn trits(&self) -> impl Iterator<Item = Trit> + '_ {
        (0..self.num_vars()).map(|i| self.get(i))
    }

    #[inline]
    pub fn eval(&self, minterm: usize) -> bool {
        let m = minterm as u16;
        m & self.pos == self.pos && m & self.neg == 0
    }

    /// Number of positions whose entries differ.
    pub fn distance(&self, other: &Cube) -> Result<usize> {
        if self.num_vars != other.num_vars {
            return Err(Error::VarCountMismatch(self.num_vars(), other.num_vars()));
        }
        Ok(((self.pos ^ other.pos) | (self.neg ^ other.neg)).count_ones() as usize)
    }

    /// Calls `f` on every minterm covered by the cube.
    pub fn for_each_minterm(&self, mut f: impl FnMut(usize)) {
        let free = self.var_mask() & !(self.pos | self.neg);
        let base = self.pos;
        let mut sub: u16 = 0;
        loop {
            f((base | sub) as usize);
            sub = sub.wrapping_sub(free) & free;
            if sub == 0 {
                break;
            }
        }
    }

    /// Every cube over `num_vars` variables (`3^n` of them), in word order.
    pub fn all(num_vars: usize) -> Result<Vec<Cube>> {
        let mut out = vec![Cube::universe(num_vars)?];
        for i in 0..num_vars {
            out = out
                .into_iter()
                .flat_map(|c| {
                    [Trit::Zero, Trit::One, Trit::DontCare].map(|t| {
                        let mut c = c;
                        c.set(i, t);
                        c
                    })
                })
                .collect();
        }
        out.sort();
        Ok(out)
    }
}

impl Ord for Cube {
    /// Lexicographic over `l_1 ... l_n` with `0 < 1 < -`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.num_vars.cmp(&other.num_vars).then_with(|| {
            self.trits()
                .zip(other.trits())
                .map(|(a, b)| a.cmp(&b))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }
}

impl PartialOrd for Cube {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in self.trits() {
            write!(f, "{}", t.to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cube({self})")
    }
}

/// XOR of a list of cubes. Duplicate cubes are allowed; semantic identity is the
/// cube multiset.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct EsopForm {
    num_vars: usize,
    cubes: Vec<Cube>,
}

impl EsopForm {
    pub fn empty(num_vars: usize) -> Self {
        EsopForm {
            num_vars,
            cubes: Vec::new(),
        }
    }

    pub fn new(num_vars: usize, cubes: Vec<Cube>) -> Result<Self> {
        if num_vars > MAX_VARS {
            return Err(Error::TooManyVars(num_vars));
        }
        if let Some(c) = cubes.iter().find(|c| c.num_vars() != num_vars) {
            return Err(Error::CubeLength {
                word: c.to_string(),
                expected: num_vars,
                found: c.num_vars(),
            });
        }
        Ok(EsopForm { num_vars, cubes })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.cubes
    }

    /// Number of terms.
    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn push(&mut self, cube: Cube) -> Result<()> {
        if cube.num_vars() != self.num_vars {
            return Err(Error::VarCountMismatch(self.num_vars, cube.num_vars()));
        }
        self.cubes.push(cube);
        Ok(())
    }

    pub fn remove(&mut self, index: usize) -> Cube {
        self.cubes.remove(index)
    }

    pub fn eval(&self, minterm: usize) -> bool {
        self.cubes.iter().fold(false, |acc, c| acc ^ c.eval(minterm))
    }

    /// Truth table of the form.
    pub fn simulate(&self) -> TruthTable {
        let mut t = TruthTable::zeros(self.num_vars).expect("variable count validated");
        for c in &self.cubes {
            c.for_each_minterm(|m| t.flip_bit(m));
        }
        t
    }

    /// Smallest care minterm where the form disagrees with `spec`.
    ///
    /// # Panics
    ///
    /// Panics if the variable counts differ.
    pub fn first_counterexample(&self, spec: &IncompleteFunction) -> Option<usize> {
        assert_eq!(self.num_vars, spec.num_vars(), "variable count mismatch");
        let diff = &(&self.simulate() ^ spec.value()) & spec.care();
        diff.first_one()
    }

    pub fn realizes(&self, spec: &IncompleteFunction) -> bool {
        self.first_counterexample(spec).is_none()
    }

    /// Cubes sorted by the fixed cube order; equal canonical forms denote the same ESOP.
    pub fn canonicalize(&self) -> EsopForm {
        let mut cubes = self.cubes.clone();
        cubes.sort();
        EsopForm {
            num_vars: self.num_vars,
            cubes,
        }
    }

    /// Canonical form with pairs of equal cubes removed (they cancel under XOR).
    pub fn cancel_duplicates(&self) -> EsopForm {
        let sorted = self.canonicalize().cubes;
        let mut cubes: Vec<Cube> = Vec::with_capacity(sorted.len());
        for c in sorted {
            if cubes.last() == Some(&c) {
                cubes.pop();
            } else {
                cubes.push(c);
            }
        }
        EsopForm {
            num_vars: self.num_vars,
            cubes,
        }
    }

    /// Parses whitespace-separated words of equal length; the variable count is
    /// taken from the words (an empty text yields the empty form over 0 variables).
    pub fn parse_words(text: &str) -> Result<EsopForm> {
        let cubes = text.split_whitespace().map(Cube::parse).collect::<Result<Vec<_>>>()?;
        let num_vars = cubes.first().map_or(0, Cube::num_vars);
        EsopForm::new(num_vars, cubes)
    }

    pub fn print_words(&self) -> String {
        self.cubes.iter().map(Cube::to_string).collect::<Vec<_>>().join(" ")
    }

    /// Serializes to the single-output PLA dialect with `.type esop`.
    pub fn to_pla(&self) -> String {
        let mut s = format!(".i {}\n.o 1\n.type esop\n", self.num_vars);
        for c in &self.cubes {
            s.push_str(&format!("{c} 1\n"));
        }
        s.push_str(".e\n");
        s
    }

    pub fn from_pla(text: &str) -> Result<EsopForm> {
        let err = |line: usize, message: String| Error::EsopFile { line, message };
        let mut num_vars: Option<usize> = None;
        let mut cubes = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tokens = line.split_whitespace();
            if line.starts_with('.') {
                let key = tokens.next().unwrap_or_default();
                let arg = tokens.next();
                match key {
                    ".i" => {
                        let n: usize = arg
                            .and_then(|a| a.parse().ok())
                            .ok_or_else(|| err(line_no, "malformed .i directive".into()))?;
                        if n > MAX_VARS {
                            return Err(err(line_no, format!("{n} inputs exceed the maximum")));
                        }
                        if num_vars.is_some_and(|prev| prev != n) {
                            return Err(err(line_no, "inconsistent .i directive".into()));
                        }
                        num_vars = Some(n);
                    }
                    ".o" => {
                        if arg != Some("1") {
                            return Err(err(line_no, "only single-output files are supported".into()));
                        }
                    }
                    ".type" => {
                        if arg != Some("esop") {
                            return Err(err(line_no, format!("unsupported type {arg:?}")));
                        }
                    }
                    ".e" | ".end" => break,
                    _ => {}
                }
                continue;
            }
            let n = num_vars.ok_or_else(|| err(line_no, "cube before .i header".into()))?;
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let word = match (tokens.as_slice(), n) {
                ([word, "1"], _) => *word,
                (["1"], 0) => "",
                _ => return Err(err(line_no, format!("malformed cube line {line:?}"))),
            };
            let cube = Cube::parse(word).map_err(|e| err(line_no, e.to_string()))?;
            if cube.num_vars() != n {
                return Err(err(
                    line_no,
                    format!("cube {word:?} has {} positions, expected {n}", cube.num_vars()),
                ));
            }
            cubes.push(cube);
        }
        let n = num_vars.ok_or_else(|| err(0, "missing .i header".into()))?;
        EsopForm::new(n, cubes)
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = fs::File::create(path)?;
        f.write_all(self.to_pla().as_bytes())?;
        Ok(())
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<EsopForm> {
        EsopForm::from_pla(&fs::read_to_string(path)?)
    }
}

impl fmt::Display for EsopForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.print_words())
    }
}
