//! Free-group words used as intersection labels.
//!
//! Words are kept freely reduced at all times; the only way to build a
//! [`GroupWord`] from raw letters is [`GroupWord::reduce`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest generator count expressible in the `a`..`z` text syntax.
pub const MAX_GENERATORS: usize = 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator {
    pub index: u8,
    pub inverted: bool,
}

impl Generator {
    pub fn new(index: u8) -> Self {
        Generator { index, inverted: false }
    }

    pub fn inverse(self) -> Self {
        Generator { index: self.index, inverted: !self.inverted }
    }

    fn cancels(self, other: Generator) -> bool {
        self.index == other.index && self.inverted != other.inverted
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = (b'a' + self.index) as char;
        if self.inverted {
            write!(f, "{c}'")
        } else {
            write!(f, "{c}")
        }
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupWord(Vec<Generator>);

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord(Vec::new())
    }

    pub fn generator(index: u8) -> Self {
        GroupWord(vec![Generator::new(index)])
    }

    /// Free reduction with a stack: each letter either cancels the top or is pushed.
    pub fn reduce<I>(raw: I, generators: usize) -> Result<Self>
    where
        I: IntoIterator<Item = Generator>,
    {
        let mut out: Vec<Generator> = Vec::new();
        for g in raw {
            if g.index as usize >= generators {
                return Err(Error::Malformed(format!(
                    "generator index {} out of range for {generators} generators",
                    g.index
                )));
            }
            match out.last() {
                Some(&top) if top.cancels(g) => {
                    out.pop();
                }
                _ => out.push(g),
            }
        }
        Ok(GroupWord(out))
    }

    pub fn letters(&self) -> &[Generator] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| !w[0].cancels(w[1]))
    }

    /// Highest generator index used, plus one.
    pub fn generator_bound(&self) -> usize {
        self.0.iter().map(|g| g.index as usize + 1).max().unwrap_or(0)
    }

    pub fn multiply(&self, other: &GroupWord) -> GroupWord {
        // Both operands are reduced, so cancellation only happens at the seam.
        let mut k = 0;
        while k < self.0.len()
            && k < other.0.len()
            && self.0[self.0.len() - 1 - k].cancels(other.0[k])
        {
            k += 1;
        }
        let mut letters = Vec::with_capacity(self.0.len() + other.0.len() - 2 * k);
        letters.extend_from_slice(&self.0[..self.0.len() - k]);
        letters.extend_from_slice(&other.0[k..]);
        GroupWord(letters)
    }

    pub fn invert(&self) -> GroupWord {
        GroupWord(self.0.iter().rev().map(|g| g.inverse()).collect())
    }

    /// The smaller of `w` and `w⁻¹`; an unordered edge carries either reading.
    pub fn class(&self) -> GroupWord {
        let inv = self.invert();
        if inv < *self {
            inv
        } else {
            self.clone()
        }
    }

    /// Parses the `a b' a` syntax, with `1` for the identity.
    pub fn parse(text: &str, generators: usize) -> Result<Self> {
        let text = text.trim();
        if text == "1" || text.is_empty() {
            return Ok(GroupWord::identity());
        }
        let mut raw = Vec::new();
        let mut chars = text.chars().peekable();
        while let Some(c) = chars.next() {
            match c {
                ' ' | '\t' => continue,
                'a'..='z' => {
                    let mut g = Generator::new(c as u8 - b'a');
                    if chars.peek() == Some(&'\'') {
                        chars.next();
                        g = g.inverse();
                    }
                    raw.push(g);
                }
                _ => return Err(Error::Malformed(format!("bad character {c:?} in word {text:?}"))),
            }
        }
        GroupWord::reduce(raw, generators)
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl FromStr for GroupWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GroupWord::parse(s, MAX_GENERATORS)
    }
}

impl Serialize for GroupWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GroupWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A finite group given by its multiplication table, elements `0..order`
/// with `0` the identity. Generators map to chosen elements, so words can
/// be evaluated and compared by table lookup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    generators: Vec<usize>,
    inverses: Vec<usize>,
}

impl FiniteGroup {
    pub fn new(table: Vec<Vec<usize>>, generators: Vec<usize>) -> Result<Self> {
        let order = table.len();
        if order == 0 || table.iter().any(|row| row.len() != order || row.iter().any(|&x| x >= order)) {
            return Err(Error::Malformed("multiplication table is not square over its elements".into()));
        }
        if (0..order).any(|x| table[0][x] != x || table[x][0] != x) {
            return Err(Error::Malformed("element 0 is not a two-sided identity".into()));
        }
        let mut inverses = Vec::with_capacity(order);
        for x in 0..order {
            match (0..order).find(|&y| table[x][y] == 0 && table[y][x] == 0) {
                Some(y) => inverses.push(y),
                None => return Err(Error::Malformed(format!("element {x} has no inverse"))),
            }
        }
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::Malformed("multiplication table is not associative".into()));
                    }
                }
            }
        }
        if let Some(&g) = generators.iter().find(|&&g| g >= order) {
            return Err(Error::Malformed(format!("generator image {g} is not an element")));
        }
        Ok(FiniteGroup { table, generators, inverses })
    }

    /// The cyclic group of the given order with one generator sent to `1`.
    pub fn cyclic(order: usize) -> Self {
        let table = (0..order).map(|a| (0..order).map(|b| (a + b) % order).collect()).collect();
        FiniteGroup::new(table, vec![1 % order]).expect("cyclic table is a group")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn multiply(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn evaluate(&self, word: &GroupWord) -> Result<usize> {
        let mut acc = 0;
        for g in word.letters() {
            let image = *self.generators.get(g.index as usize).ok_or_else(|| {
                Error::Malformed(format!("generator {} has no image in the finite group", g.index))
            })?;
            let x = if g.inverted { self.inverses[image] } else { image };
            acc = self.table[acc][x];
        }
        Ok(acc)
    }

    pub fn equal(&self, u: &GroupWord, v: &GroupWord) -> Result<bool> {
        Ok(self.evaluate(u)? == self.evaluate(v)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Generator {
        Generator::new(0)
    }
    fn b() -> Generator {
        Generator::new(1)
    }

    fn w(s: &str) -> GroupWord {
        GroupWord::parse(s, 4).unwrap()
    }

    #[test]
    fn cancellation_to_identity() {
        let r = GroupWord::reduce([a(), a().inverse()], 2).unwrap();
        assert!(r.is_identity());
    }

    #[test]
    fn inner_cancellation() {
        let r = GroupWord::reduce([a(), b(), b().inverse(), a()], 2).unwrap();
        assert_eq!(r.letters(), &[a(), a()]);
    }

    #[test]
    fn out_of_range_generator_is_malformed() {
        assert!(matches!(GroupWord::reduce([Generator::new(3)], 2), Err(Error::Malformed(_))));
    }

    #[test]
    fn multiply_and_invert() {
        assert_eq!(GroupWord::identity().multiply(&w("a b")), w("a b"));
        assert!(w("a").multiply(&w("a'")).is_identity());
        assert!(GroupWord::identity().invert().is_identity());
        assert_eq!(w("a b").invert(), w("b' a'"));
        assert_eq!(w("a b c").multiply(&w("c' b' d")), w("a d"));
    }

    #[test]
    fn text_syntax() {
        assert_eq!(w("a b' a").to_string(), "a b' a");
        assert_eq!(w("1").to_string(), "1");
        assert_eq!(w("a a'").to_string(), "1");
        assert!(GroupWord::parse("a ? b", 2).is_err());
        assert!(GroupWord::parse("c", 2).is_err());
    }

    #[test]
    fn class_picks_smaller_reading() {
        assert_eq!(w("a'").class(), w("a"));
        assert_eq!(w("a").class(), w("a"));
        assert_eq!(w("b a").class(), w("b a").invert().min(w("b a")));
    }

    #[test]
    fn finite_backend_detects_collisions() {
        let z3 = FiniteGroup::cyclic(3);
        assert!(z3.equal(&w("a a a"), &GroupWord::identity()).unwrap());
        assert!(z3.equal(&w("a a"), &w("a'")).unwrap());
        assert!(!z3.equal(&w("a"), &w("a'")).unwrap());
        assert!(FiniteGroup::new(vec![vec![0, 1], vec![1, 1]], vec![1]).is_err());
    }
}
