//! Freely reduced words in the four surface-group generators a1, b1, a2, b2.
//!
//! Words are the bookkeeping currency of the crate: group elements carry
//! their defining words, deck transformations of edge lifts are words, and
//! all deterministic orderings are shortlex over the letter order
//! a1 < a1⁻¹ < b1 < b1⁻¹ < a2 < a2⁻¹ < b2 < b2⁻¹.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

/// One of the four standard genus-2 generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    A1,
    B1,
    A2,
    B2,
}

impl Gen {
    pub const ALL: [Gen; 4] = [Gen::A1, Gen::B1, Gen::A2, Gen::B2];

    pub fn index(self) -> usize {
        match self {
            Gen::A1 => 0,
            Gen::B1 => 1,
            Gen::A2 => 2,
            Gen::B2 => 3,
        }
    }

    pub fn from_index(i: usize) -> Gen {
        Gen::ALL[i]
    }

    fn name(self) -> &'static str {
        match self {
            Gen::A1 => "a1",
            Gen::B1 => "b1",
            Gen::A2 => "a2",
            Gen::B2 => "b2",
        }
    }

    fn name_inverse(self) -> &'static str {
        match self {
            Gen::A1 => "A1",
            Gen::B1 => "B1",
            Gen::A2 => "A2",
            Gen::B2 => "B2",
        }
    }
}

/// A generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub gen: Gen,
    pub inverse: bool,
}

impl Letter {
    pub fn new(gen: Gen, inverse: bool) -> Self {
        Self { gen, inverse }
    }

    pub fn inverted(self) -> Self {
        Self {
            gen: self.gen,
            inverse: !self.inverse,
        }
    }

    /// Rank in the canonical letter order a1 < a1⁻¹ < b1 < b1⁻¹ < a2 < a2⁻¹ < b2 < b2⁻¹.
    pub fn rank(self) -> usize {
        let base = match self.gen {
            Gen::A1 => 0,
            Gen::B1 => 2,
            Gen::A2 => 4,
            Gen::B2 => 6,
        };
        base + usize::from(self.inverse)
    }
}

/// A freely reduced word. The reduction invariant is maintained by every
/// constructor and operation; adjacent inverse pairs never survive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

/// Error from [`Word::parse`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordParseError {
    pub token: String,
}

impl fmt::Display for WordParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unrecognized generator token `{}`", self.token)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for WordParseError {}

impl Word {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Builds a word from letters, freely reducing.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            match out.last() {
                Some(&last) if last.gen == l.gen && last.inverse != l.inverse => {
                    out.pop();
                }
                _ => out.push(l),
            }
        }
        Self { letters: out }
    }

    pub fn single(gen: Gen, inverse: bool) -> Self {
        Self {
            letters: alloc::vec![Letter::new(gen, inverse)],
        }
    }

    pub fn generator(gen: Gen) -> Self {
        Self::single(gen, false)
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

    /// Concatenation with free reduction.
    pub fn concat(&self, other: &Word) -> Word {
        Word::from_letters(self.letters.iter().chain(other.letters.iter()).copied())
    }

    pub fn push(&self, letter: Letter) -> Word {
        Word::from_letters(self.letters.iter().copied().chain(core::iter::once(letter)))
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverted()).collect(),
        }
    }

    /// Shortlex comparison under the canonical letter order.
    pub fn shortlex_cmp(&self, other: &Word) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            for (a, b) in self.letters.iter().zip(other.letters.iter()) {
                match a.rank().cmp(&b.rank()) {
                    Ordering::Equal => {}
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }

    /// Parses a whitespace-separated word; capitals denote inverses
    /// (`"a1 B2"` = a1 · b2⁻¹). The empty string is the identity.
    pub fn parse(s: &str) -> Result<Word, WordParseError> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let letter = match tok {
                "a1" => Letter::new(Gen::A1, false),
                "A1" => Letter::new(Gen::A1, true),
                "b1" => Letter::new(Gen::B1, false),
                "B1" => Letter::new(Gen::B1, true),
                "a2" => Letter::new(Gen::A2, false),
                "A2" => Letter::new(Gen::A2, true),
                "b2" => Letter::new(Gen::B2, false),
                "B2" => Letter::new(Gen::B2, true),
                other => {
                    return Err(WordParseError {
                        token: String::from(other),
                    })
                }
            };
            letters.push(letter);
        }
        Ok(Word::from_letters(letters))
    }
}

impl fmt::Display for Word {
    /// Whitespace-separated tokens, capitals for inverses; identity prints
    /// as the empty string.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(if l.inverse {
                l.gen.name_inverse()
            } else {
                l.gen.name()
            })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_reduction_cancels_adjacent_inverses() {
        // a1 a1⁻¹ reduces to the identity.
        let w = Word::from_letters([
            Letter::new(Gen::A1, false),
            Letter::new(Gen::A1, true),
        ]);
        assert!(w.is_empty());

        // a1 b1 b1⁻¹ a1 reduces to a1 a1 (cancellation cascades through concat).
        let left = Word::from_letters([
            Letter::new(Gen::A1, false),
            Letter::new(Gen::B1, false),
        ]);
        let right = Word::from_letters([
            Letter::new(Gen::B1, true),
            Letter::new(Gen::A1, false),
        ]);
        let prod = left.concat(&right);
        assert_eq!(prod.len(), 2);
        assert_eq!(prod.letters()[0], Letter::new(Gen::A1, false));
        assert_eq!(prod.letters()[1], Letter::new(Gen::A1, false));
    }

    #[test]
    fn inverse_concat_is_identity() {
        let w = Word::parse("a1 B2 a2 a2 b1").unwrap();
        assert!(w.concat(&w.inverse()).is_empty());
        assert!(w.inverse().concat(&w).is_empty());
    }

    #[test]
    fn parse_display_round_trip() {
        let s = "a1 B2 a2 b1 A1";
        let w = Word::parse(s).unwrap();
        assert_eq!(alloc::format!("{w}"), s);
        assert_eq!(Word::parse("").unwrap(), Word::identity());
        assert!(Word::parse("c3").is_err());
    }

    #[test]
    fn shortlex_orders_by_length_then_rank() {
        let a1 = Word::parse("a1").unwrap();
        let a1i = Word::parse("A1").unwrap();
        let b1 = Word::parse("b1").unwrap();
        let long = Word::parse("a1 a1").unwrap();
        assert_eq!(a1.shortlex_cmp(&a1i), Ordering::Less);
        assert_eq!(a1i.shortlex_cmp(&b1), Ordering::Less);
        assert_eq!(b1.shortlex_cmp(&long), Ordering::Less);
        assert_eq!(long.shortlex_cmp(&long), Ordering::Equal);
    }
}
