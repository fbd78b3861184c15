//! Witness families and an exact-or-symbolic length calculus.
//!
//! Lengths like `14^(14·14^196)` cannot be materialized, so a [`LengthExpr`]
//! keeps towers symbolic once they pass a size cutoff. Comparison is exact
//! when both sides are numbers; otherwise same-base towers are compared by
//! their exponents, and anything left over by an iterated-logarithm estimate.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::navigator::Navigator;
use crate::presentations::{GroupSpec, Structure};
use crate::words::{free_reduce, Alphabet, Gen, GenName, Letter, PositiveWord, Word};

/// Towers whose value would exceed this many bits stay symbolic.
pub const DEFAULT_CUTOFF_BITS: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LengthExpr {
    Exact(BigUint),
    /// `base^(mult · exponent)`
    Tower { base: u32, mult: u64, exponent: Box<LengthExpr> },
    Sum(Vec<LengthExpr>),
    Product(Vec<LengthExpr>),
}

/// `exp2` applied `h` times to `top`; canonical when `top < 1024` and, for
/// `h > 0`, `top ≥ 10`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Mag {
    h: u32,
    top: f64,
}

impl Mag {
    const ZERO: Mag = Mag { h: 0, top: 0.0 };

    fn norm(mut self) -> Mag {
        while self.top >= 1024.0 {
            self.top = self.top.log2();
            self.h += 1;
        }
        while self.h > 0 && self.top < 10.0 {
            self.top = self.top.exp2();
            self.h -= 1;
        }
        self
    }

    fn of(n: &BigUint) -> Mag {
        match n.to_f64() {
            Some(f) if f.is_finite() => Mag { h: 0, top: f }.norm(),
            _ => {
                // log2 from the leading 64 bits
                let bits = n.bits();
                let shift = bits.saturating_sub(64);
                let lead = (n >> shift).to_f64().unwrap_or(1.0);
                Mag { h: 1, top: lead.log2() + shift as f64 }.norm()
            }
        }
    }

    fn is_zero(self) -> bool {
        self.h == 0 && self.top == 0.0
    }

    /// log2 of the value, as a plain float if it fits.
    fn log2(self) -> Mag {
        if self.h == 0 {
            Mag { h: 0, top: self.top.log2().max(0.0) }
        } else {
            Mag { h: self.h - 1, top: self.top }.norm()
        }
    }

    fn exp2(self) -> Mag {
        Mag { h: self.h + 1, top: self.top }.norm()
    }

    fn add(self, other: Mag) -> Mag {
        let (big, small) = if self.key() >= other.key() { (self, other) } else { (other, self) };
        match (big.h, small.h) {
            (0, 0) => Mag { h: 0, top: big.top + small.top }.norm(),
            (1, 0) => Mag { h: 1, top: big.top + (small.top / big.top.exp2()).ln_1p() / std::f64::consts::LN_2 }.norm(),
            (1, 1) => Mag { h: 1, top: big.top + (small.top - big.top).exp2().ln_1p() / std::f64::consts::LN_2 }.norm(),
            _ => big,
        }
    }

    fn mul(self, other: Mag) -> Mag {
        if self.is_zero() || other.is_zero() {
            return Mag::ZERO;
        }
        self.log2().add(other.log2()).exp2()
    }

    fn key(self) -> (u32, f64) {
        (self.h, self.top)
    }

    fn cmp(self, other: Mag) -> Ordering {
        self.h.cmp(&other.h).then(self.top.partial_cmp(&other.top).unwrap_or(Ordering::Equal))
    }
}

impl LengthExpr {
    pub fn exact(n: u64) -> Self {
        LengthExpr::Exact(BigUint::from(n))
    }

    /// `base^(mult · exponent)`, normalized.
    pub fn tower(base: u32, mult: u64, exponent: LengthExpr) -> Self {
        LengthExpr::Tower { base, mult, exponent: Box::new(exponent) }.normalize()
    }

    /// `f_L(x) = L^x`.
    pub fn f(len: u32, x: LengthExpr) -> Self {
        LengthExpr::tower(len, 1, x)
    }

    /// `f_L` applied `k` times to `x`.
    pub fn f_iter(len: u32, k: u32, x: LengthExpr) -> Self {
        (0..k).fold(x, |acc, _| LengthExpr::f(len, acc))
    }

    pub fn as_exact(&self) -> Option<&BigUint> {
        match self {
            LengthExpr::Exact(n) => Some(n),
            _ => None,
        }
    }

    pub fn normalize(self) -> Self {
        self.normalize_with(DEFAULT_CUTOFF_BITS)
    }

    pub fn normalize_with(self, cutoff_bits: u64) -> Self {
        match self {
            LengthExpr::Exact(_) => self,
            LengthExpr::Tower { base, mult, exponent } => {
                let exponent = exponent.normalize_with(cutoff_bits);
                if let LengthExpr::Exact(e) = &exponent {
                    let total = e * BigUint::from(mult);
                    let bits_per = (base as f64).log2();
                    if let Some(t) = total.to_u64() {
                        if (t as f64) * bits_per <= cutoff_bits as f64 {
                            return LengthExpr::Exact(BigUint::from(base).pow(t as u32));
                        }
                    }
                }
                LengthExpr::Tower { base, mult, exponent: Box::new(exponent) }
            }
            LengthExpr::Sum(parts) => {
                let parts: Vec<_> = parts.into_iter().map(|p| p.normalize_with(cutoff_bits)).collect();
                if parts.iter().all(|p| p.as_exact().is_some()) {
                    LengthExpr::Exact(parts.iter().filter_map(|p| p.as_exact()).sum())
                } else {
                    LengthExpr::Sum(parts)
                }
            }
            LengthExpr::Product(parts) => {
                let parts: Vec<_> = parts.into_iter().map(|p| p.normalize_with(cutoff_bits)).collect();
                if parts.iter().all(|p| p.as_exact().is_some()) {
                    LengthExpr::Exact(parts.iter().filter_map(|p| p.as_exact()).product())
                } else if parts.iter().any(|p| p.as_exact().is_some_and(|n| n.is_zero())) {
                    LengthExpr::Exact(BigUint::zero())
                } else {
                    let mut rest: Vec<_> = parts.into_iter().filter(|p| p.as_exact() != Some(&BigUint::one())).collect();
                    if rest.len() == 1 {
                        rest.pop().unwrap()
                    } else {
                        LengthExpr::Product(rest)
                    }
                }
            }
        }
    }

    fn mag(&self) -> Mag {
        match self {
            LengthExpr::Exact(n) => Mag::of(n),
            LengthExpr::Tower { base, mult, exponent } => {
                let k = Mag { h: 0, top: *mult as f64 * (*base as f64).log2() }.norm();
                exponent.mag().mul(k).exp2()
            }
            LengthExpr::Sum(p) => p.iter().fold(Mag::ZERO, |acc, e| acc.add(e.mag())),
            LengthExpr::Product(p) => p.iter().fold(Mag { h: 0, top: 1.0 }, |acc, e| acc.mul(e.mag())),
        }
    }

    /// Total order used throughout: exact on numbers, structural on towers
    /// over a common base, iterated-log magnitude otherwise.
    pub fn compare(&self, other: &LengthExpr) -> Ordering {
        let (a, b) = (self.clone().normalize(), other.clone().normalize());
        match (&a, &b) {
            (LengthExpr::Exact(x), LengthExpr::Exact(y)) => x.cmp(y),
            (
                LengthExpr::Tower { base: b1, mult: c1, exponent: e1 },
                LengthExpr::Tower { base: b2, mult: c2, exponent: e2 },
            ) if b1 == b2 => {
                if c1 >= c2 && e1.compare(e2) != Ordering::Less {
                    if c1 == c2 {
                        return e1.compare(e2);
                    }
                    return Ordering::Greater;
                }
                if c1 <= c2 && e1.compare(e2) != Ordering::Greater {
                    return Ordering::Less;
                }
                let p1 = LengthExpr::Product(vec![LengthExpr::exact(*c1), (**e1).clone()]);
                let p2 = LengthExpr::Product(vec![LengthExpr::exact(*c2), (**e2).clone()]);
                p1.mag().cmp(p2.mag())
            }
            (LengthExpr::Tower { .. }, LengthExpr::Exact(y)) if y.bits() < DEFAULT_CUTOFF_BITS => Ordering::Greater,
            (LengthExpr::Exact(x), LengthExpr::Tower { .. }) if x.bits() < DEFAULT_CUTOFF_BITS => Ordering::Less,
            _ => a.mag().cmp(b.mag()),
        }
    }

    /// Number of decimal digits, when exact.
    pub fn digits(&self) -> Option<usize> {
        self.as_exact().map(|n| n.to_str_radix(10).len())
    }

    pub fn representation(&self) -> &'static str {
        match self {
            LengthExpr::Exact(_) => "exact",
            LengthExpr::Tower { .. } => "tower",
            LengthExpr::Sum(_) => "sum",
            LengthExpr::Product(_) => "product",
        }
    }
}

impl fmt::Display for LengthExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LengthExpr::Exact(n) => write!(f, "{n}"),
            LengthExpr::Tower { base, mult: 1, exponent } => write!(f, "{base}^({exponent})"),
            LengthExpr::Tower { base, mult, exponent } => write!(f, "{base}^({mult}*{exponent})"),
            LengthExpr::Sum(p) => {
                let s: Vec<String> = p.iter().map(|e| e.to_string()).collect();
                write!(f, "({})", s.join(" + "))
            }
            LengthExpr::Product(p) => {
                let s: Vec<String> = p.iter().map(|e| e.to_string()).collect();
                write!(f, "({})", s.join(" * "))
            }
        }
    }
}

impl Serialize for LengthExpr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(1))?;
        match self {
            LengthExpr::Exact(n) => m.serialize_entry("exact", &n.to_str_radix(10))?,
            LengthExpr::Tower { base, mult, exponent } => {
                #[derive(Serialize)]
                struct T<'a> {
                    base: u32,
                    mult: u64,
                    exponent: &'a LengthExpr,
                }
                m.serialize_entry("tower", &T { base: *base, mult: *mult, exponent })?
            }
            LengthExpr::Sum(p) => m.serialize_entry("sum", p)?,
            LengthExpr::Product(p) => m.serialize_entry("product", p)?,
        }
        m.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    WitnessLowerBound,
    EmpiricalExact,
    UpperBoundAudit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CurvePoint {
    /// Input length `n` or radius `ρ`.
    pub x: u64,
    pub value: LengthExpr,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ball_size: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistortionCurve {
    pub kind: CurveKind,
    pub points: Vec<CurvePoint>,
}

impl DistortionCurve {
    pub fn is_monotone(&self) -> bool {
        self.points.windows(2).all(|w| w[0].x <= w[1].x && w[0].value.compare(&w[1].value) != Ordering::Greater)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n_or_radius,value_exact_or_tower,representation\n");
        for p in &self.points {
            s.push_str(&format!("{},{},{}\n", p.x, p.value, p.value.representation()));
        }
        s
    }
}

/// A witness word over its own small alphabet, with its length data.
#[derive(Debug, Clone)]
pub struct Witness {
    pub alphabet: Alphabet,
    pub word: Word,
    /// Upper bound on the length in the ambient group (the word length).
    pub g_bound: BigUint,
    /// Exact length in the distorted free subgroup.
    pub f_length: LengthExpr,
}

#[derive(Serialize)]
struct WitnessDoc<'a> {
    word: String,
    word_length: usize,
    g_bound: String,
    f_length: &'a LengthExpr,
    f_length_text: String,
}

impl Witness {
    /// The same word spelled in `target` by generator name.
    pub fn respell(&self, target: &Alphabet) -> Result<Vec<Letter>> {
        self.word
            .letters()
            .iter()
            .map(|l| {
                let name = self.alphabet.name(l.gen());
                target
                    .gen(&name)
                    .map(|g| Letter::new(g, l.is_positive()))
                    .ok_or_else(|| Error::InvalidInput(format!("{name} is not a generator of the target")))
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let text = if self.word.len() <= 4096 {
            self.alphabet.format(self.word.letters())
        } else {
            format!("<{} letters>", self.word.len())
        };
        serde_json::to_value(WitnessDoc {
            word: text,
            word_length: self.word.len(),
            g_bound: self.g_bound.to_str_radix(10),
            f_length: &self.f_length,
            f_length_text: self.f_length.to_string(),
        })
        .expect("witness serializes")
    }
}

fn small_alphabet(names: Vec<GenName>) -> Alphabet {
    Alphabet::new(names).expect("distinct names")
}

/// `t₁ⁿ a₁ t₁⁻ⁿ` in a block with relator length `len`.
pub fn witness_block(len: u32, n: u32) -> Witness {
    let al = small_alphabet(vec![GenName::a(1), GenName::t(1)]);
    let (a, t) = (0, 1);
    let mut raw = vec![Letter::pos(t); n as usize];
    raw.push(Letter::pos(a));
    raw.extend(std::iter::repeat(Letter::neg(t)).take(n as usize));
    Witness {
        alphabet: al,
        word: free_reduce(&raw),
        g_bound: BigUint::from(2 * n as u64 + 1),
        f_length: LengthExpr::tower(len, 1, LengthExpr::exact(n as u64)),
    }
}

/// Block witness spelled in a block or one-level chain spec.
pub fn witness_block_in(spec: &GroupSpec, n: u32) -> Result<(Witness, Vec<Letter>)> {
    match spec.structure() {
        Structure::Block { len, .. } => {
            let w = witness_block(len, n);
            let letters = w.respell(spec.alphabet())?;
            Ok((w, letters))
        }
        _ => Err(Error::InvalidInput("block witness needs a block".into())),
    }
}

/// Word lengths of `w_1..w_l` for the chain witness, `ℓ_k = 2ℓ_{k−1} + 1`.
pub fn chain_lengths(l: u32, n: u32) -> Vec<BigUint> {
    let mut out = vec![BigUint::from(2 * n as u64 + 1)];
    for _ in 1..l {
        let prev = out.last().unwrap().clone();
        out.push(prev * 2u32 + 1u32);
    }
    out
}

/// `2^l n + 2^l − 1`.
pub fn chain_bound(l: u32, n: u32) -> BigUint {
    let p = BigUint::one() << l as usize;
    &p * n + &p - 1u32
}

/// `w_1 = tⁿ a⁽¹⁾₁ t⁻ⁿ`, `w_k = w_{k−1} a⁽ᵏ⁾₁ w_{k−1}⁻¹`.
pub fn witness_chain(l: u32, len: u32, n: u32) -> Result<Witness> {
    if l == 0 {
        return Err(Error::InvalidParameter("chain witness needs l ≥ 1".into()));
    }
    let mut names = vec![GenName::t(0)];
    names.extend((1..=l).map(|k| GenName::a_level(k, 1)));
    let al = small_alphabet(names);
    let t = 0;
    let mut raw = vec![Letter::pos(t); n as usize];
    raw.push(Letter::pos(1));
    raw.extend(std::iter::repeat(Letter::neg(t)).take(n as usize));
    let mut w = free_reduce(&raw);
    for k in 2..=l {
        w = w.mul(&Word::letter(Letter::pos(k as Gen))).mul(&w.inverse());
    }
    let bound = chain_bound(l, n);
    debug_assert_eq!(BigUint::from(w.len()), *chain_lengths(l, n).last().unwrap());
    Ok(Witness {
        alphabet: al,
        word: w,
        g_bound: bound,
        f_length: LengthExpr::f_iter(len, l, LengthExpr::exact(n as u64)),
    })
}

/// `ℓ_G` bounds for the tower witness: `ℓ_1 = 3`, `ℓ_k = 2ℓ_{k−1} + 5`.
pub fn tower_g_lengths(k_max: u32) -> Vec<BigUint> {
    let mut out = Vec::new();
    let mut cur = BigUint::from(3u32);
    for _ in 1..=k_max {
        out.push(cur.clone());
        cur = cur * 2u32 + 5u32;
    }
    out
}

/// `ℓ_H(w_1) = L`, `ℓ_H(w_k) = L^(L · ℓ_H(w_{k−1}))`.
pub fn tower_f_length(len: u32, k: u32) -> LengthExpr {
    let mut cur = LengthExpr::exact(len as u64);
    for _ in 1..k {
        cur = LengthExpr::tower(len, len as u64, cur);
    }
    cur
}

/// `w_1 = t₁a₁t₁⁻¹`, `w_k = s w_{k−1} s⁻¹ · a₁ · s w_{k−1}⁻¹ s⁻¹`.
pub fn witness_tower(len: u32, k: u32) -> Result<Witness> {
    if k == 0 {
        return Err(Error::InvalidParameter("tower witness needs k ≥ 1".into()));
    }
    if k > 24 {
        return Err(Error::TooLarge(format!("tower witness w_{k} has {} letters", tower_g_lengths(k)[k as usize - 1])));
    }
    let al = small_alphabet(vec![GenName::a(1), GenName::t(1), GenName::s()]);
    let (a, t, s) = (Letter::pos(0), Letter::pos(1), Letter::pos(2));
    let mut w = free_reduce(&[t, a, t.inverse()]);
    for _ in 1..k {
        let sw = Word::letter(s).mul(&w).mul(&Word::letter(s.inverse()));
        w = sw.mul(&Word::letter(a)).mul(&sw.inverse());
    }
    Ok(Witness {
        alphabet: al,
        word: w,
        g_bound: tower_g_lengths(k)[k as usize - 1].clone(),
        f_length: tower_f_length(len, k),
    })
}

/// `L^|conjugator| · base_len`, exact because positive words never cancel.
pub fn expand_length(conjugator: &Word, base_len: LengthExpr, len: u32) -> Result<LengthExpr> {
    let p = conjugator
        .to_positive()
        .ok_or_else(|| Error::InvalidInput("conjugator must be a positive word".into()))?;
    Ok(expand_positive(&p, base_len, len))
}

pub fn expand_positive(conjugator: &PositiveWord, base_len: LengthExpr, len: u32) -> LengthExpr {
    LengthExpr::Product(vec![LengthExpr::tower(len, 1, LengthExpr::exact(conjugator.len() as u64)), base_len]).normalize()
}

/// Witness lower bound: points `(ℓ_G bound, |w|_F)`.
pub fn lower_bound_curve(spec: &GroupSpec, n_max: u32) -> Result<DistortionCurve> {
    let point = |x: &BigUint, value: LengthExpr| -> Result<CurvePoint> {
        let x = x.to_u64().ok_or_else(|| Error::TooLarge(format!("abscissa {x}")))?;
        Ok(CurvePoint { x, value, ball_size: None })
    };
    let points = match spec.structure() {
        Structure::Free { .. } => (0..=n_max as u64).map(|n| CurvePoint { x: n, value: LengthExpr::exact(n), ball_size: None }).collect(),
        Structure::Block { len, .. } => (0..=n_max)
            .map(|n| {
                let w = witness_block(len, n);
                point(&w.g_bound, w.f_length)
            })
            .collect::<Result<_>>()?,
        Structure::Chain { levels, len } => (0..=n_max)
            .map(|n| point(&chain_bound(levels, n), LengthExpr::f_iter(len, levels, LengthExpr::exact(n as u64))))
            .collect::<Result<_>>()?,
        // dist(4^k) ≥ ℓ_H(w_k) since ℓ_G(w_k) ≤ 4^k
        Structure::Double { len, .. } => (1..=n_max.min(31))
            .map(|k| point(&(BigUint::one() << (2 * k as usize)), tower_f_length(len, k)))
            .collect::<Result<_>>()?,
    };
    Ok(DistortionCurve { kind: CurveKind::WitnessLowerBound, points })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditRow {
    pub k: usize,
    pub samples: usize,
    /// Largest `|w|_F / (L^(k/2)·k)` seen.
    pub max_ratio: f64,
    pub max_f_length: usize,
    pub max_pinches: usize,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub seed: u64,
    pub rows: Vec<AuditRow>,
    pub ok: bool,
}

impl AuditReport {
    pub fn samples(&self) -> usize {
        self.rows.iter().map(|r| r.samples).sum()
    }

    pub fn violations(&self) -> usize {
        self.rows.iter().map(|r| r.violations).sum()
    }

    pub fn to_curve(&self) -> DistortionCurve {
        DistortionCurve {
            kind: CurveKind::UpperBoundAudit,
            points: self
                .rows
                .iter()
                .map(|r| CurvePoint { x: r.k as u64, value: LengthExpr::exact(r.max_f_length as u64), ball_size: None })
                .collect(),
        }
    }
}

/// Random word of length at most `budget` representing an element of the
/// base group: base letters, `t w t⁻¹` with `w` such a word, and
/// `t⁻¹ φ_t(v) t` for short base words `v`.
pub fn sample_base_word(nav: &Navigator<'_>, rng: &mut ChaCha8Rng, budget: usize) -> Result<Vec<Letter>> {
    let spec = nav.spec();
    let level = spec.levels().first().ok_or_else(|| Error::InvalidInput("audit needs a stable letter".into()))?;
    let base = spec.base();
    let len = spec.structure().image_len().unwrap_or(1) as usize;
    let mut out = Vec::new();
    let mut left = budget;
    while left > 0 {
        let choice = rng.gen_range(0..3);
        if choice == 1 && left >= 3 {
            let t = level.stable[rng.gen_range(0..level.stable.len())];
            let inner_budget = rng.gen_range(1..=left - 2);
            let inner = sample_base_word(nav, rng, inner_budget)?;
            let used = inner.len() + 2;
            out.push(Letter::pos(t));
            out.extend(inner);
            out.push(Letter::neg(t));
            left -= used.min(left);
        } else if choice == 2 && left >= len + 2 {
            let t = level.stable[rng.gen_range(0..level.stable.len())];
            let q = rng.gen_range(1..=(left - 2) / len);
            let v: Vec<Letter> = (0..q).map(|_| Letter::new(base[rng.gen_range(0..base.len())], rng.gen_bool(0.5))).collect();
            let img = spec.endomorphism(t)?.apply(&v)?;
            if img.is_empty() {
                continue;
            }
            out.push(Letter::neg(t));
            out.extend_from_slice(img.letters());
            out.push(Letter::pos(t));
            left -= (img.len() + 2).min(left);
        } else {
            out.push(Letter::new(base[rng.gen_range(0..base.len())], rng.gen_bool(0.5)));
            left -= 1;
        }
    }
    Ok(free_reduce(&out).into_letters())
}

/// Checks `|w|_F ≤ L^(k/2)·k` and at most `k/2` pinches on sampled words of
/// length `k ≤ k_max` lying in the base group.
pub fn upper_bound_audit(spec: &GroupSpec, k_max: usize, samples_per_k: usize, seed: u64) -> Result<AuditReport> {
    let len = match spec.structure() {
        Structure::Block { len, .. } => len,
        _ => return Err(Error::InvalidInput("the upper-bound audit applies to blocks".into())),
    };
    let nav = Navigator::new(spec);
    nav.warm()?;
    let rows = (1..=k_max)
        .map(|k| {
            let results: Vec<(usize, usize, usize, f64, bool)> = (0..samples_per_k)
                .into_par_iter()
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream((k * samples_per_k + i) as u64);
                    let w = sample_base_word(&nav, &mut rng, k)?;
                    let k_actual = w.len();
                    let (red, trace) = nav.britton_reduce(&w)?;
                    if red.letters().iter().any(|l| spec.level_of(l.gen()).is_some()) {
                        return Err(Error::ConstructionFailed("sampled word left the base group".into()));
                    }
                    let f = red.len();
                    // |w|_F² ≤ L^k k² avoids square roots
                    let lhs = BigUint::from(f).pow(2);
                    let rhs = BigUint::from(len).pow(k_actual as u32) * BigUint::from(k_actual).pow(2);
                    let ok = lhs <= rhs && 2 * trace.pinches() <= k_actual;
                    let ratio = if k_actual == 0 {
                        0.0
                    } else {
                        f as f64 / ((len as f64).powf(k_actual as f64 / 2.0) * k_actual as f64)
                    };
                    Ok((k_actual, f, trace.pinches(), ratio, ok))
                })
                .collect::<Result<_>>()?;
            Ok(AuditRow {
                k,
                samples: results.len(),
                max_ratio: results.iter().map(|r| r.3).fold(0.0, f64::max),
                max_f_length: results.iter().map(|r| r.1).max().unwrap_or(0),
                max_pinches: results.iter().map(|r| r.2).max().unwrap_or(0),
                violations: results.iter().filter(|r| !r.4).count(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ok = rows.iter().all(|r| r.violations == 0);
    Ok(AuditReport { seed, rows, ok })
}
