use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Whether the ambient algebra carries the involution `x_k ↦ x_k^t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Free,
    Involution,
}

impl Mode {
    pub fn join(self, other: Mode) -> Mode {
        if self == Mode::Involution || other == Mode::Involution {
            Mode::Involution
        } else {
            Mode::Free
        }
    }

    pub fn has_involution(self) -> bool {
        self == Mode::Involution
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Free => "free",
            Mode::Involution => "involution",
        }
    }
}

/// A generator `x_k` (or `x_k^t`, `x_k^*` in the complex setting). Variables are 1-based.
///
/// The derived ordering is `x_1 < x_1^t < x_2 < x_2^t < …`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub var: usize,
    pub starred: bool,
}

impl Letter {
    pub fn new(var: usize, starred: bool) -> Self {
        assert!(var >= 1, "variables are 1-based");
        Letter { var, starred }
    }

    pub fn x(var: usize) -> Self {
        Letter::new(var, false)
    }

    pub fn xt(var: usize) -> Self {
        Letter::new(var, true)
    }

    pub fn star(self) -> Self {
        Letter { var: self.var, starred: !self.starred }
    }

    /// All letters of an alphabet with `g` variables, in enumeration order.
    pub fn alphabet(g: usize, mode: Mode) -> Vec<Letter> {
        let mut out = Vec::with_capacity(2 * g);
        for k in 1..=g {
            out.push(Letter::x(k));
            if mode.has_involution() {
                out.push(Letter::xt(k));
            }
        }
        out
    }

    /// Position of this letter in [`Letter::alphabet`].
    pub fn alphabet_index(self, mode: Mode) -> usize {
        match mode {
            Mode::Free => self.var - 1,
            Mode::Involution => 2 * (self.var - 1) + self.starred as usize,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.starred {
            write!(f, "x{}*", self.var)
        } else {
            write!(f, "x{}", self.var)
        }
    }
}

/// An element of the free monoid on the letters; the empty word is the unit.
///
/// Words are ordered graded-lexicographically: shorter words first, then
/// lexicographically by letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<Letter>);

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Word {
    pub fn unit() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        Word(letters.into_iter().collect())
    }

    /// Word in unstarred variables, e.g. `Word::vars(&[1, 2])` is `x1 x2`.
    pub fn vars(vars: &[usize]) -> Self {
        Word(vars.iter().map(|&k| Letter::x(k)).collect())
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn has_starred(&self) -> bool {
        self.0.iter().any(|l| l.starred)
    }

    pub fn max_var(&self) -> usize {
        self.0.iter().map(|l| l.var).max().unwrap_or(0)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Reverses the word and flips every starred flag.
    pub fn involution(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.star()).collect())
    }

    /// Checked form of [`Word::involution`] that rejects starred letters in involution-free mode.
    pub fn involution_in(&self, mode: Mode) -> Result<Word> {
        self.check_mode(mode)?;
        Ok(self.involution())
    }

    pub fn check_mode(&self, mode: Mode) -> Result<()> {
        if !mode.has_involution() && self.has_starred() {
            return Err(Error::ModeViolation(format!("word `{}` has starred letters in involution-free mode", self)));
        }
        Ok(())
    }

    pub fn rotation(&self, k: usize) -> Word {
        let n = self.len();
        if n == 0 {
            return Word::unit();
        }
        let k = k % n;
        Word(self.0[k..].iter().chain(&self.0[..k]).copied().collect())
    }

    /// Representative of the cyclic class of the word: the lexicographically
    /// least rotation, and in `star_mode` the least over rotations of the word
    /// and of its involution.
    pub fn cyclic_canonical(&self, star_mode: bool) -> Word {
        let mut best = least_rotation(&self.0);
        if star_mode {
            let inv = least_rotation(&self.involution().0);
            if inv < best {
                best = inv;
            }
        }
        Word(best)
    }

    /// All words of length `m` over the alphabet, in graded-lexicographic order.
    pub fn enumerate(g: usize, mode: Mode, m: usize) -> Vec<Word> {
        let alphabet = Letter::alphabet(g, mode);
        let mut out = vec![Word::unit()];
        for _ in 0..m {
            let mut next = Vec::with_capacity(out.len() * alphabet.len());
            for w in &out {
                for &l in &alphabet {
                    let mut v = w.0.clone();
                    v.push(l);
                    next.push(Word(v));
                }
            }
            out = next;
        }
        out
    }
}

fn least_rotation(letters: &[Letter]) -> Vec<Letter> {
    let n = letters.len();
    (0..n.max(1))
        .map(|k| {
            if n == 0 {
                Vec::new()
            } else {
                letters[k..].iter().chain(&letters[..k]).copied().collect::<Vec<_>>()
            }
        })
        .min()
        .unwrap_or_default()
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", l)?;
        }
        Ok(())
    }
}

/// Parses a single `x<k>` / `x<k>*` / `x<k>^t` token.
pub fn parse_letter(tok: &str) -> Option<Letter> {
    let body = tok.strip_prefix('x')?;
    let (digits, starred) = if let Some(d) = body.strip_suffix('*') {
        (d, true)
    } else if let Some(d) = body.strip_suffix("^t") {
        (d, true)
    } else {
        (body, false)
    };
    let var: usize = digits.parse().ok()?;
    (var >= 1).then_some(Letter { var, starred })
}

impl std::str::FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        let s = s.trim();
        if s == "1" || s.is_empty() {
            return Ok(Word::unit());
        }
        let mut letters = Vec::new();
        let mut column = 1;
        for tok in s.split_whitespace() {
            let l = parse_letter(tok).ok_or_else(|| Error::Parse {
                line: 1,
                column,
                msg: format!("bad letter `{}`", tok),
            })?;
            letters.push(l);
            column += tok.len() + 1;
        }
        Ok(Word(letters))
    }
}
