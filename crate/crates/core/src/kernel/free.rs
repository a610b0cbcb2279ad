use std::fmt;

use serde::{Deserialize, Serialize};

/// A letter `x_i^{±1}` of a free group, stored as a signed generator index
/// (`i` for `x_i`, `-i` for `x_i^-1`). Generator indices start at 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter(i32);

impl Letter {
    pub fn new(generator: u32, inverted: bool) -> Self {
        assert!(generator >= 1, "generator indices start at 1");
        let g = generator as i32;
        Letter(if inverted { -g } else { g })
    }

    pub fn from_signed(v: i32) -> Self {
        assert!(v != 0, "letter 0 does not exist");
        Letter(v)
    }

    pub fn generator(self) -> u32 {
        self.0.unsigned_abs()
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    /// `+1` or `-1`.
    pub fn sign(self) -> i64 {
        self.0.signum() as i64
    }

    pub fn signed(self) -> i32 {
        self.0
    }

    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FreeWord {
    letters: Vec<Letter>,
}

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord { letters: Vec::new() }
    }

    pub fn generator(i: u32) -> Self {
        FreeWord { letters: vec![Letter::new(i, false)] }
    }

    /// Reduces an arbitrary letter sequence.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut w = FreeWord::identity();
        for l in letters {
            w.push(l);
        }
        w
    }

    pub fn from_signed(letters: &[i32]) -> Self {
        Self::from_letters(letters.iter().map(|&v| Letter::from_signed(v)))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Largest generator index that occurs, 0 for the empty word.
    pub fn max_generator(&self) -> u32 {
        self.letters.iter().map(|l| l.generator()).max().unwrap_or(0)
    }

    /// Appends a letter, cancelling it against the last one if possible.
    pub fn push(&mut self, l: Letter) {
        if self.letters.last() == Some(&l.inverse()) {
            self.letters.pop();
        } else {
            self.letters.push(l);
        }
    }

    pub fn mul_assign(&mut self, rhs: &FreeWord) {
        for &l in &rhs.letters {
            self.push(l);
        }
    }

    pub fn mul(&self, rhs: &FreeWord) -> FreeWord {
        let mut out = self.clone();
        out.mul_assign(rhs);
        out
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord { letters: self.letters.iter().rev().map(|l| l.inverse()).collect() }
    }

    pub fn pow(&self, n: i64) -> FreeWord {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = FreeWord::identity();
        for _ in 0..n.unsigned_abs() {
            out.mul_assign(&base);
        }
        out
    }

    /// Exponent sum of each generator `1..=rank`.
    pub fn exponent_sums(&self, rank: usize) -> Vec<i64> {
        let mut sums = vec![0i64; rank];
        for l in &self.letters {
            let g = l.generator() as usize;
            if g <= rank {
                sums[g - 1] += l.sign();
            }
        }
        sums
    }

    /// True when no adjacent pair cancels. Always holds for words built
    /// through the public constructors.
    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|p| p[0] != p[1].inverse())
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "x{}", l.generator())?;
            if l.is_inverse() {
                f.write_str("^-1")?;
            }
        }
        Ok(())
    }
}
