//! Permutations of `{1..d}` and finite words over that alphabet.
//!
//! Everything downstream leans on one convention fixed here: products are
//! read left to right, the left factor acting first, so
//! `compose(p, q).apply(x) == q.apply(p.apply(x))`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("letter {letter} out of range 1..={degree}")]
    LetterOutOfRange { letter: usize, degree: usize },
    #[error("letter {0} repeated across cycles")]
    RepeatedLetter(usize),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("malformed cycle notation: {0}")]
    Malformed(String),
    #[error("degree must be at least 1")]
    ZeroDegree,
}

/// A bijection of the letters `1..=d`, stored as an image table.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    /// `images[i]` is the 0-based image of the 0-based point `i`.
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(d: usize) -> Perm {
        Perm {
            images: (0..d).collect(),
        }
    }

    /// Builds a permutation from 1-based images: `images[i]` is the image of
    /// letter `i + 1`.
    pub fn from_images(images: &[usize]) -> Result<Perm, PermError> {
        let d = images.len();
        if d == 0 {
            return Err(PermError::ZeroDegree);
        }
        let mut table = vec![usize::MAX; d];
        let mut seen = vec![false; d];
        for (i, &y) in images.iter().enumerate() {
            if y == 0 || y > d {
                return Err(PermError::LetterOutOfRange {
                    letter: y,
                    degree: d,
                });
            }
            if seen[y - 1] {
                return Err(PermError::RepeatedLetter(y));
            }
            seen[y - 1] = true;
            table[i] = y - 1;
        }
        Ok(Perm { images: table })
    }

    /// Builds the permutation given by disjoint cycles over 1-based letters.
    pub fn from_cycles(d: usize, cycles: &[Vec<usize>]) -> Result<Perm, PermError> {
        if d == 0 {
            return Err(PermError::ZeroDegree);
        }
        let mut table: Vec<usize> = (0..d).collect();
        let mut moved = vec![false; d];
        for cycle in cycles {
            for (k, &x) in cycle.iter().enumerate() {
                if x == 0 || x > d {
                    return Err(PermError::LetterOutOfRange {
                        letter: x,
                        degree: d,
                    });
                }
                if moved[x - 1] {
                    return Err(PermError::RepeatedLetter(x));
                }
                moved[x - 1] = true;
                let y = cycle[(k + 1) % cycle.len()];
                if y == 0 || y > d {
                    return Err(PermError::LetterOutOfRange {
                        letter: y,
                        degree: d,
                    });
                }
                table[x - 1] = y - 1;
            }
        }
        Ok(Perm { images: table })
    }

    /// Parses whitespace-separated disjoint cycles over `1..=d`; `"()"` is the
    /// identity. Letters are decimal integers, so `"(2 3)"` and `"(1 2 3)"`.
    pub fn parse(text: &str, d: usize) -> Result<Perm, PermError> {
        if d == 0 {
            return Err(PermError::ZeroDegree);
        }
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Err(PermError::Malformed("empty input".into()));
        }
        if trimmed == "()" {
            return Ok(Perm::identity(d));
        }
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut rest = trimmed;
        while !rest.is_empty() {
            rest = rest.trim_start();
            if rest.is_empty() {
                break;
            }
            if !rest.starts_with('(') {
                return Err(PermError::Malformed(format!(
                    "expected '(' at \"{}\"",
                    rest
                )));
            }
            let close = rest
                .find(')')
                .ok_or_else(|| PermError::Malformed("unbalanced '('".into()))?;
            let body = &rest[1..close];
            rest = &rest[close + 1..];
            let letters: Vec<usize> = body
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>()
                        .map_err(|_| PermError::Malformed(format!("bad letter \"{tok}\"")))
                })
                .collect::<Result<_, _>>()?;
            if letters.is_empty() {
                return Err(PermError::Malformed(
                    "empty cycle only allowed as \"()\" identity".into(),
                ));
            }
            if letters.len() == 1 {
                return Err(PermError::Malformed(format!(
                    "cycle ({}) has a single letter",
                    letters[0]
                )));
            }
            cycles.push(letters);
        }
        Perm::from_cycles(d, &cycles)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of a 1-based letter.
    pub fn apply(&self, x: usize) -> usize {
        assert!(
            x >= 1 && x <= self.images.len(),
            "letter {x} out of range 1..={}",
            self.images.len()
        );
        self.images[x - 1] + 1
    }

    pub(crate) fn apply0(&self, x: usize) -> usize {
        self.images[x]
    }

    /// Left-to-right product: the result applies `self` first, then `other`.
    pub fn compose(&self, other: &Perm) -> Result<Perm, PermError> {
        if self.degree() != other.degree() {
            return Err(PermError::DegreeMismatch(self.degree(), other.degree()));
        }
        Ok(Perm {
            images: self.images.iter().map(|&y| other.images[y]).collect(),
        })
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0; self.images.len()];
        for (i, &y) in self.images.iter().enumerate() {
            images[y] = i;
        }
        Perm { images }
    }

    /// `self` composed with itself `k` times; negative `k` powers the inverse.
    pub fn pow(&self, k: i64) -> Perm {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Perm::identity(self.degree());
        for _ in 0..k.unsigned_abs() {
            out = out.compose(&base).expect("equal degrees");
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &y)| i == y)
    }

    /// Disjoint cycles, each rotated to start at its smallest point, sorted by
    /// that point. The identity yields an empty list.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let d = self.images.len();
        let mut seen = vec![false; d];
        let mut cycles = Vec::new();
        for start in 0..d {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x + 1);
                x = self.images[x];
            }
            cycles.push(cycle);
        }
        cycles
    }

    /// True if repeated application of `self` starting from `origin` visits
    /// every letter, i.e. `self` is a single `d`-cycle.
    pub fn is_transitive_cycle(&self) -> bool {
        let d = self.degree();
        let mut x = 0;
        for _ in 0..d {
            x = self.images[x];
        }
        // after d steps we are back; transitive iff the orbit of 0 has size d
        let mut orbit = 1;
        let mut y = self.images[0];
        while y != 0 {
            orbit += 1;
            y = self.images[y];
        }
        x == 0 && orbit == d
    }

    /// All permutations of degree `d` in lexicographic order of their image
    /// tables (so the identity comes first).
    pub fn all(d: usize) -> Vec<Perm> {
        use itertools::Itertools;
        (0..d)
            .permutations(d)
            .map(|images| Perm { images })
            .collect()
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        let parts: Vec<String> = cycles
            .iter()
            .map(|c| {
                let letters: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                format!("({})", letters.join(" "))
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Perm {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        // degree-tagged so deserialization is unambiguous
        serializer.serialize_str(&format!("{}:{}", self.degree(), self))
    }
}

impl<'de> Deserialize<'de> for Perm {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Perm, D::Error> {
        let s = String::deserialize(deserializer)?;
        let (deg, cyc) = s
            .split_once(':')
            .ok_or_else(|| serde::de::Error::custom("expected \"degree:cycles\""))?;
        let d: usize = deg.parse().map_err(serde::de::Error::custom)?;
        Perm::parse(cyc, d).map_err(serde::de::Error::custom)
    }
}

/// A finite word over `{1..d}`; the empty word is the tree root.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    /// Builds a word from 1-based letters, validating against `d`.
    pub fn new(letters: Vec<usize>, d: usize) -> Result<Word, PermError> {
        for &x in &letters {
            if x == 0 || x > d {
                return Err(PermError::LetterOutOfRange {
                    letter: x,
                    degree: d,
                });
            }
        }
        Ok(Word(letters))
    }

    /// Parses a bare digit string like `"231"`; restricted to alphabets of at
    /// most 9 letters, which is all the textual surface supports.
    pub fn parse(text: &str, d: usize) -> Result<Word, PermError> {
        if d > 9 {
            return Err(PermError::Malformed(format!(
                "digit words only cover alphabets up to 9 letters, got {d}"
            )));
        }
        let mut letters = Vec::with_capacity(text.len());
        for ch in text.chars() {
            let x = ch
                .to_digit(10)
                .ok_or_else(|| PermError::Malformed(format!("bad word letter '{ch}'")))?
                as usize;
            if x == 0 || x > d {
                return Err(PermError::LetterOutOfRange {
                    letter: x,
                    degree: d,
                });
            }
            letters.push(x);
        }
        Ok(Word(letters))
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    pub fn prepend(&self, letter: usize) -> Word {
        let mut letters = Vec::with_capacity(self.0.len() + 1);
        letters.push(letter);
        letters.extend_from_slice(&self.0);
        Word(letters)
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    /// All words of exactly length `n` over `{1..d}`, lexicographic.
    pub fn all_of_length(n: usize, d: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..n {
            let mut next = Vec::with_capacity(out.len() * d);
            for w in &out {
                for x in 1..=d {
                    let mut letters = w.0.clone();
                    letters.push(x);
                    next.push(Word(letters));
                }
            }
            out = next;
        }
        out
    }

    /// All words of length at most `n`, shortest first, lexicographic within a
    /// length.
    pub fn all_up_to_length(n: usize, d: usize) -> Vec<Word> {
        let mut out = Vec::new();
        for k in 0..=n {
            out.extend(Word::all_of_length(k, d));
        }
        out
    }
}

impl From<&[usize]> for Word {
    fn from(letters: &[usize]) -> Word {
        Word(letters.to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "\u{2205}");
        }
        for &x in &self.0 {
            if x <= 9 {
                write!(f, "{x}")?;
            } else {
                write!(f, "[{x}]")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.0.iter())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Word, D::Error> {
        let letters = Vec::<usize>::deserialize(deserializer)?;
        if letters.iter().any(|&x| x == 0) {
            return Err(serde::de::Error::custom("word letters are 1-based"));
        }
        Ok(Word(letters))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str, d: usize) -> Perm {
        Perm::parse(text, d).unwrap()
    }

    #[test]
    fn parse_transposition() {
        let t = p("(2 3)", 3);
        assert_eq!(t.apply(1), 1);
        assert_eq!(t.apply(2), 3);
        assert_eq!(t.apply(3), 2);
    }

    #[test]
    fn parse_identity_and_three_cycle() {
        assert!(p("()", 3).is_identity());
        let c = p("(1 2 3)", 3);
        assert_eq!(c.apply(1), 2);
        assert_eq!(c.apply(2), 3);
        assert_eq!(c.apply(3), 1);
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(matches!(
            Perm::parse("(2 4)", 3),
            Err(PermError::LetterOutOfRange { letter: 4, .. })
        ));
        assert!(matches!(
            Perm::parse("(1 2) (2 3)", 3),
            Err(PermError::RepeatedLetter(2))
        ));
        assert!(Perm::parse("(1", 3).is_err());
        assert!(Perm::parse("(1)", 3).is_err());
    }

    #[test]
    fn compose_is_left_to_right() {
        // the worked identity (12)(12)(12)·(23)(12)(23) = (123)
        let chain = ["(1 2)", "(1 2)", "(1 2)", "(2 3)", "(1 2)", "(2 3)"];
        let mut acc = Perm::identity(3);
        for text in chain {
            acc = acc.compose(&p(text, 3)).unwrap();
        }
        assert_eq!(acc, p("(1 2 3)", 3));

        // convention pin: apply(compose(p,q), x) = q(p(x))
        let a = p("(1 2)", 3);
        let b = p("(1 3)", 3);
        let ab = a.compose(&b).unwrap();
        for x in 1..=3 {
            assert_eq!(ab.apply(x), b.apply(a.apply(x)));
        }
        // (12)·(13) = (123): 1→2, 2→3, 3→1
        assert_eq!(ab, p("(1 2 3)", 3));
    }

    #[test]
    fn involution_squares_to_identity() {
        let t = p("(1 2)", 2);
        assert!(t.compose(&t).unwrap().is_identity());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(p("(1 2 3)", 3).inverse(), p("(1 3 2)", 3));
        assert_eq!(p("(2 3)", 3).inverse(), p("(2 3)", 3));
        assert!(Perm::identity(4).inverse().is_identity());
    }

    #[test]
    fn apply_examples() {
        assert_eq!(p("(2 3)", 3).apply(3), 2);
        assert_eq!(p("(1 2 3)", 3).apply(1), 2);
        assert_eq!(Perm::identity(3).apply(2), 2);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn apply_out_of_range_panics() {
        p("(2 3)", 3).apply(4);
    }

    #[test]
    fn compose_degree_mismatch() {
        let a = Perm::identity(2);
        let b = Perm::identity(3);
        assert!(matches!(
            a.compose(&b),
            Err(PermError::DegreeMismatch(2, 3))
        ));
    }

    #[test]
    fn display_is_canonical_and_roundtrips() {
        let g = p("(3 4) (1 2)", 4);
        assert_eq!(g.to_string(), "(1 2) (3 4)");
        assert_eq!(Perm::identity(5).to_string(), "()");
        for cand in Perm::all(4) {
            let text = cand.to_string();
            assert_eq!(Perm::parse(&text, 4).unwrap(), cand);
        }
    }

    #[test]
    fn group_laws_exhaustive_small_degree() {
        for d in 1..=4 {
            let all = Perm::all(d);
            let id = Perm::identity(d);
            for a in &all {
                assert_eq!(a.compose(&id).unwrap(), *a);
                assert_eq!(id.compose(a).unwrap(), *a);
                assert!(a.compose(&a.inverse()).unwrap().is_identity());
                for b in &all {
                    for c in &all {
                        let left = a.compose(b).unwrap().compose(c).unwrap();
                        let right = a.compose(&b.compose(c).unwrap()).unwrap();
                        assert_eq!(left, right);
                    }
                }
            }
        }
    }

    #[test]
    fn transitive_cycle_detection() {
        assert!(p("(1 2 3)", 3).is_transitive_cycle());
        assert!(!p("(1 2)", 3).is_transitive_cycle());
        assert!(!Perm::identity(3).is_transitive_cycle());
        assert!(Perm::identity(1).is_transitive_cycle());
    }

    #[test]
    fn word_parse_and_display() {
        let w = Word::parse("231", 3).unwrap();
        assert_eq!(w.letters(), &[2, 3, 1]);
        assert_eq!(w.to_string(), "231");
        assert!(Word::parse("241", 3).is_err());
        assert!(Word::parse("", 3).unwrap().is_empty());
    }

    #[test]
    fn word_enumeration_counts() {
        assert_eq!(Word::all_of_length(3, 3).len(), 27);
        assert_eq!(Word::all_up_to_length(2, 2).len(), 7);
    }

    #[test]
    fn perm_pow_matches_repeated_composition() {
        let z = p("(1 2 3 4)", 4);
        assert_eq!(z.pow(0), Perm::identity(4));
        assert_eq!(z.pow(2), z.compose(&z).unwrap());
        assert_eq!(z.pow(-1), z.inverse());
        assert_eq!(z.pow(4), Perm::identity(4));
    }
}
