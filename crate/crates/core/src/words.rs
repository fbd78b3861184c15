//! Signed-alphabet words, free reduction, and Wise's long word.
//!
//! Generators are small integer codes into an [`Alphabet`]; a [`Letter`] is a
//! generator together with a sign. [`Word`] is always freely reduced,
//! [`PositiveWord`] never contains an inverse.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Generator code, an index into an [`Alphabet`].
pub type Gen = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    A,
    T,
    S,
}

/// Structured generator name: role tag plus optional level and index.
///
/// `level == 0` means unleveled and `index == 0` means unindexed, so
/// `a3`, `a2_5` (that is a_5 at level 2), `t1`, `t` and `s` are all
/// representable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenName {
    pub role: Role,
    pub level: u32,
    pub index: u32,
}

impl GenName {
    pub fn a(index: u32) -> Self {
        GenName { role: Role::A, level: 0, index }
    }

    pub fn a_level(level: u32, index: u32) -> Self {
        GenName { role: Role::A, level, index }
    }

    pub fn t(index: u32) -> Self {
        GenName { role: Role::T, level: 0, index }
    }

    pub fn s() -> Self {
        GenName { role: Role::S, level: 0, index: 0 }
    }
}

impl fmt::Display for GenName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.role {
            Role::A => 'a',
            Role::T => 't',
            Role::S => 's',
        };
        write!(f, "{tag}")?;
        if self.level > 0 {
            write!(f, "{}_", self.level)?;
        }
        if self.index > 0 {
            write!(f, "{}", self.index)?;
        }
        Ok(())
    }
}

impl FromStr for GenName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            location: format!("generator `{s}`"),
            message: "expected a role letter a/t/s followed by [level_]index".into(),
        };
        let mut chars = s.chars();
        let role = match chars.next() {
            Some('a') => Role::A,
            Some('t') => Role::T,
            Some('s') => Role::S,
            _ => return Err(bad()),
        };
        let rest = chars.as_str();
        let parse_num = |x: &str| x.parse::<u32>().map_err(|_| bad());
        let (level, index) = match rest.split_once('_') {
            Some((l, i)) => (parse_num(l)?, parse_num(i)?),
            None if rest.is_empty() => (0, 0),
            None => (0, parse_num(rest)?),
        };
        if level > 0 && index == 0 {
            return Err(bad());
        }
        Ok(GenName { role, level, index })
    }
}

impl Serialize for GenName {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GenName {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A generator with a sign, packed as `±(gen + 1)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(i32);

impl Letter {
    pub fn pos(g: Gen) -> Self {
        Letter(g as i32 + 1)
    }

    pub fn neg(g: Gen) -> Self {
        Letter(-(g as i32 + 1))
    }

    pub fn new(g: Gen, positive: bool) -> Self {
        if positive {
            Self::pos(g)
        } else {
            Self::neg(g)
        }
    }

    pub fn gen(self) -> Gen {
        (self.0.unsigned_abs() - 1) as Gen
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn sign(self) -> i8 {
        if self.0 > 0 {
            1
        } else {
            -1
        }
    }

    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "g{}", self.gen())
        } else {
            write!(f, "g{}^-1", self.gen())
        }
    }
}

/// Ordered list of distinct generator names. The order is significant: it
/// is the order Σ is built in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<GenName>,
    index: HashMap<GenName, Gen>,
}

impl Alphabet {
    pub fn new(names: Vec<GenName>) -> Result<Self> {
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if index.insert(*n, i as Gen).is_some() {
                return Err(Error::InvalidInput(format!("duplicate generator {n}")));
            }
        }
        Ok(Alphabet { names, index })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[GenName] {
        &self.names
    }

    pub fn name(&self, g: Gen) -> GenName {
        self.names[g as usize]
    }

    pub fn gen(&self, name: &GenName) -> Option<Gen> {
        self.index.get(name).copied()
    }

    pub fn gens(&self) -> impl Iterator<Item = Gen> {
        0..self.names.len() as Gen
    }

    /// Parses whitespace-separated tokens `name` / `name^-1` without reducing.
    /// Parses whitespace-separated tokens `g`, `g^-1` or `g^k`.
    pub fn parse_raw(&self, s: &str) -> Result<Vec<Letter>> {
        let mut out = Vec::new();
        for (pos, tok) in s.split_whitespace().enumerate() {
            let err = |message: String| Error::Parse { location: format!("token {pos} (`{tok}`)"), message };
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => (n, e.parse::<i64>().map_err(|_| err(format!("bad exponent `{e}`")))?),
                None => (tok, 1),
            };
            let name: GenName = name.parse().map_err(|_| err("malformed generator".into()))?;
            let g = self.gen(&name).ok_or_else(|| err(format!("generator {name} not in alphabet")))?;
            out.extend(std::iter::repeat(Letter::new(g, exp > 0)).take(exp.unsigned_abs() as usize));
        }
        Ok(out)
    }

    pub fn parse_word(&self, s: &str) -> Result<Word> {
        Ok(free_reduce(&self.parse_raw(s)?))
    }

    pub fn format(&self, letters: &[Letter]) -> String {
        let mut out = String::new();
        for (i, l) in letters.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&self.name(l.gen()).to_string());
            if !l.is_positive() {
                out.push_str("^-1");
            }
        }
        out
    }
}

/// Pushes `l` onto a reduced buffer, cancelling against the last letter.
#[inline]
pub(crate) fn push_reduced(buf: &mut Vec<Letter>, l: Letter) {
    if buf.last() == Some(&l.inverse()) {
        buf.pop();
    } else {
        buf.push(l);
    }
}

/// Freely reduced word.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

/// Returns the unique freely reduced form of a raw letter sequence.
pub fn free_reduce(raw: &[Letter]) -> Word {
    let mut buf = Vec::with_capacity(raw.len());
    for &l in raw {
        push_reduced(&mut buf, l);
    }
    Word(buf)
}

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    /// Caller guarantees `letters` is already freely reduced.
    pub(crate) fn from_reduced(letters: Vec<Letter>) -> Self {
        debug_assert!(letters.windows(2).all(|p| p[0] != p[1].inverse()));
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut buf = self.0.clone();
        for &l in &other.0 {
            push_reduced(&mut buf, l);
        }
        Word(buf)
    }

    pub fn pow(&self, e: i64) -> Word {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::empty();
        for _ in 0..e.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|l| l.is_positive())
    }

    pub fn to_positive(&self) -> Option<PositiveWord> {
        self.is_positive()
            .then(|| PositiveWord(self.0.iter().map(|l| l.gen()).collect()))
    }
}

/// Inverse-free word; concatenation never cancels.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PositiveWord(Vec<Gen>);

impl PositiveWord {
    pub fn new(gens: Vec<Gen>) -> Self {
        PositiveWord(gens)
    }

    pub fn gens(&self) -> &[Gen] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &PositiveWord) -> PositiveWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        PositiveWord(v)
    }

    pub fn to_word(&self) -> Word {
        Word(self.0.iter().map(|&g| Letter::pos(g)).collect())
    }
}

/// Wise's long word over `letters` (in the given order): for each i the
/// block `a_i a_i a_{i+1} a_i a_{i+2} … a_i a_m`, then a final `a_m`.
pub fn sigma(letters: &[Gen]) -> Result<PositiveWord> {
    let m = letters.len();
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "sigma needs at least 2 letters, got {m}"
        )));
    }
    let mut out = Vec::with_capacity(m * m);
    for i in 0..m - 1 {
        out.push(letters[i]);
        for &next in &letters[i + 1..] {
            out.push(letters[i]);
            out.push(next);
        }
    }
    out.push(letters[m - 1]);
    debug_assert_eq!(out.len(), m * m);
    Ok(PositiveWord(out))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairReport {
    /// Occurrences of every ordered length-2 subword, within words only.
    pub counts: BTreeMap<(Gen, Gen), usize>,
    pub ok: bool,
}

impl PairReport {
    pub fn repeated(&self) -> impl Iterator<Item = (&(Gen, Gen), &usize)> {
        self.counts.iter().filter(|(_, &c)| c > 1)
    }
}

pub fn check_pair_uniqueness(words: &[PositiveWord]) -> PairReport {
    let mut counts = BTreeMap::new();
    for w in words {
        for p in w.0.windows(2) {
            *counts.entry((p[0], p[1])).or_insert(0usize) += 1;
        }
    }
    let ok = counts.values().all(|&c| c <= 1);
    PairReport { counts, ok }
}

/// The first `k` consecutive disjoint subwords of length `len`.
pub fn chop(w: &PositiveWord, len: usize, k: usize) -> Result<Vec<PositiveWord>> {
    let needed = len.checked_mul(k).ok_or_else(|| {
        Error::InvalidParameter("chop length overflows".into())
    })?;
    if needed > w.len() {
        return Err(Error::InsufficientLength {
            needed,
            available: w.len(),
        });
    }
    if len == 0 {
        return Err(Error::InvalidParameter("chop length must be positive".into()));
    }
    Ok(w.0[..needed]
        .chunks(len)
        .map(|c| PositiveWord(c.to_vec()))
        .collect())
}
