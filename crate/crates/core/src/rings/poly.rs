//! Sparse multivariate polynomials over the rationals.
//!
//! Generators are tagged symbols: time variables `t_k`, jet coordinates `p_j`,
//! and the differential-polynomial symbols `v^a_(r)` / `w_a_(r)` used by the
//! pseudo-differential calculus (`r` counts formal x-derivatives).
//!
//! Monomials are sorted vectors of `(generator, exponent)` pairs and compare
//! lexicographically, which fixes the canonical printing order.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use super::rational::Rational;
use crate::error::{Error, Result};

/// A ring generator. Variant order is the tag order used for canonical sorting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    /// Jet coordinate `p_j = ∂_x^j u`.
    P(u32),
    /// Time variable `t_k` (`t_1 = x`).
    T(u32),
    /// `r`-th x-derivative of the Lax coefficient `v^a`.
    V { a: u32, r: u32 },
    /// `r`-th x-derivative of the dressing coefficient `w_a`.
    W { a: u32, r: u32 },
}

impl Generator {
    pub fn tag(&self) -> &'static str {
        match self {
            Generator::P(_) => "p",
            Generator::T(_) => "t",
            Generator::V { .. } => "v",
            Generator::W { .. } => "w",
        }
    }

    /// The generator obtained by one more formal x-derivative, for the
    /// differential-polynomial symbols.
    pub fn x_shifted(&self, by: u32) -> Generator {
        match *self {
            Generator::P(j) => Generator::P(j + by),
            Generator::V { a, r } => Generator::V { a, r: r + by },
            Generator::W { a, r } => Generator::W { a, r: r + by },
            Generator::T(_) => panic!("time variables have no x-shift"),
        }
    }

    fn indices(&self) -> Vec<u32> {
        match *self {
            Generator::P(j) | Generator::T(j) => vec![j],
            Generator::V { a, r } | Generator::W { a, r } => vec![a, r],
        }
    }

    fn from_tag(tag: &str, idx: &[u32]) -> Option<Generator> {
        match (tag, idx) {
            ("p", [j]) => Some(Generator::P(*j)),
            ("t", [k]) => Some(Generator::T(*k)),
            ("v", [a, r]) => Some(Generator::V { a: *a, r: *r }),
            ("w", [a, r]) => Some(Generator::W { a: *a, r: *r }),
            _ => None,
        }
    }

    fn arity(tag: &str) -> Option<usize> {
        match tag {
            "p" | "t" => Some(1),
            "v" | "w" => Some(2),
            _ => None,
        }
    }
}

fn x_suffix(r: u32) -> String {
    if r == 0 {
        String::new()
    } else {
        format!("_{}", "x".repeat(r as usize))
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Generator::P(j) => write!(f, "p{j}"),
            Generator::T(k) => write!(f, "t{k}"),
            Generator::V { a, r } => write!(f, "v{a}{}", x_suffix(r)),
            Generator::W { a, r } => write!(f, "w{a}{}", x_suffix(r)),
        }
    }
}

/// Product of generator powers; factors sorted by generator, exponents positive.
///
/// Monomials order lexicographically on exponent vectors with `p0 > p1 > … >
/// t1 > …`, largest first: `t1^2` precedes `t1*t2`, which precedes `t1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<(Generator, u32)>);

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            match a.0.cmp(&b.0).then(b.1.cmp(&a.1)) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        other.0.len().cmp(&self.0.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(g: Generator) -> Self {
        Monomial(vec![(g, 1)])
    }

    pub fn from_factors(factors: impl IntoIterator<Item = (Generator, u32)>) -> Self {
        let mut acc: BTreeMap<Generator, u32> = BTreeMap::new();
        for (g, e) in factors {
            if e > 0 {
                *acc.entry(g).or_insert(0) += e;
            }
        }
        Monomial(acc.into_iter().collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Generator, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, g: &Generator) -> u32 {
        self.0
            .iter()
            .find(|(h, _)| h == g)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// Removes one power of `g`, returning the previous exponent (0 if absent).
    fn lower(&self, g: &Generator) -> Option<(u32, Monomial)> {
        let pos = self.0.iter().position(|(h, _)| h == g)?;
        let mut v = self.0.clone();
        let e = v[pos].1;
        if e == 1 {
            v.remove(pos);
        } else {
            v[pos].1 -= 1;
        }
        Some((e, Monomial(v)))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, (g, e)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{g}")?;
            } else {
                write!(f, "{g}^{e}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for Monomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(untagged)]
        enum Tok<'a> {
            S(&'a str),
            N(u32),
        }
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for (g, e) in &self.0 {
            let mut entry = vec![Tok::S(g.tag())];
            entry.extend(g.indices().into_iter().map(Tok::N));
            entry.push(Tok::N(*e));
            seq.serialize_element(&entry)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Monomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Tok {
            S(String),
            N(u32),
        }
        let raw: Vec<Vec<Tok>> = Vec::deserialize(deserializer)?;
        let mut factors = Vec::with_capacity(raw.len());
        for entry in raw {
            let mut it = entry.into_iter();
            let tag = match it.next() {
                Some(Tok::S(s)) => s,
                _ => return Err(de::Error::custom("monomial factor must start with a tag")),
            };
            let nums: Vec<u32> = it
                .map(|t| match t {
                    Tok::N(n) => Ok(n),
                    Tok::S(s) => Err(de::Error::custom(format!("unexpected string {s:?}"))),
                })
                .collect::<std::result::Result<_, D::Error>>()?;
            let arity = Generator::arity(&tag)
                .ok_or_else(|| de::Error::custom(format!("unknown generator tag {tag:?}")))?;
            let exp = match nums.len() {
                n if n == arity => 1,
                n if n == arity + 1 => nums[arity],
                _ => return Err(de::Error::custom(format!("bad arity for tag {tag:?}"))),
            };
            if exp == 0 {
                return Err(de::Error::custom("zero exponent"));
            }
            let g = Generator::from_tag(&tag, &nums[..arity]).expect("arity checked");
            factors.push((g, exp));
        }
        let canonical = Monomial::from_factors(factors.iter().copied());
        if canonical.0.len() != factors.len() {
            return Err(de::Error::custom("repeated generator in monomial"));
        }
        Ok(canonical)
    }
}

/// Sparse polynomial with rational coefficients; the zero polynomial has no terms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn one() -> Self {
        Polynomial::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Polynomial::term(c, Monomial::one())
    }

    pub fn int(n: i64) -> Self {
        Polynomial::constant(Rational::from(n))
    }

    pub fn var(g: Generator) -> Self {
        Polynomial::term(Rational::one(), Monomial::var(g))
    }

    pub fn t(k: u32) -> Self {
        Polynomial::var(Generator::T(k))
    }

    pub fn p(j: u32) -> Self {
        Polynomial::var(Generator::P(j))
    }

    pub fn v(a: u32, r: u32) -> Self {
        Polynomial::var(Generator::V { a, r })
    }

    pub fn w(a: u32, r: u32) -> Self {
        Polynomial::var(Generator::W { a, r })
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Polynomial::zero();
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Constant term, or `None` if the polynomial involves any generator.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: &Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &Polynomial) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c);
        }
    }

    pub fn add_scaled(&mut self, other: &Polynomial, s: &Rational) {
        if s.is_zero() {
            return;
        }
        for (m, c) in &other.terms {
            self.add_term(m.clone(), &(c * s));
        }
    }

    pub fn scale(&self, s: &Rational) -> Polynomial {
        if s.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut acc = Polynomial::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// All generators that occur in some term.
    pub fn generators(&self) -> BTreeSet<Generator> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(g, _)| *g))
            .collect()
    }

    /// Maximal total degree counted only over generators selected by `pred`.
    pub fn degree_in(&self, pred: impl Fn(&Generator) -> bool) -> u32 {
        self.terms
            .keys()
            .map(|m| m.0.iter().filter(|(g, _)| pred(g)).map(|(_, e)| e).sum())
            .max()
            .unwrap_or(0)
    }

    /// Formal partial derivative with respect to `g`.
    pub fn partial(&self, g: &Generator) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            if let Some((e, rest)) = m.lower(g) {
                out.add_term(rest, &(c * &Rational::from(e as i64)));
            }
        }
        out
    }

    /// Applies the derivation determined by its values on generators:
    /// `Σ_g (∂p/∂g) · rule(g)`. The rule returns `Ok(None)` for generators it
    /// annihilates.
    pub fn derive<F>(&self, mut rule: F) -> Result<Polynomial>
    where
        F: FnMut(&Generator) -> Result<Option<Polynomial>>,
    {
        let mut images: BTreeMap<Generator, Option<Polynomial>> = BTreeMap::new();
        for g in self.generators() {
            images.insert(g, rule(&g)?);
        }
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            for (g, _) in &m.0 {
                let Some(image) = images[g].as_ref() else { continue };
                let (e, rest) = m.lower(g).expect("generator present");
                let lowered = Polynomial::term(c * &Rational::from(e as i64), rest);
                out.add_assign_ref(&(&lowered * image));
            }
        }
        Ok(out)
    }

    /// Ring homomorphism fixing constants and sending each generator to
    /// `rule(g)` (or to itself when the rule returns `None`).
    pub fn substitute<F>(&self, mut rule: F) -> Result<Polynomial>
    where
        F: FnMut(&Generator) -> Result<Option<Polynomial>>,
    {
        let mut images: BTreeMap<Generator, Polynomial> = BTreeMap::new();
        for g in self.generators() {
            let image = rule(&g)?.unwrap_or_else(|| Polynomial::var(g));
            images.insert(g, image);
        }
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut acc = Polynomial::constant(c.clone());
            for (g, e) in &m.0 {
                acc = &acc * &images[g].pow(*e);
            }
            out.add_assign_ref(&acc);
        }
        Ok(out)
    }

    /// Keeps only the terms whose monomial satisfies `pred`.
    pub fn filter_terms(&self, pred: impl Fn(&Monomial) -> bool) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| pred(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// True when the polynomial is a single term (useful for parenthesization).
    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }
}

impl Add<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Sub<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out.add_scaled(rhs, &Rational::from(-1));
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&Rational::from(-1))
    }
}

impl Mul<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), &(ca * cb));
            }
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if neg {
                write!(f, "-")?;
            } else if i > 0 {
                write!(f, "+")?;
            }
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct WireTerm {
    mono: Monomial,
    coef: Rational,
}

#[derive(Serialize, Deserialize)]
struct WirePolynomial {
    terms: Vec<WireTerm>,
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        WirePolynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| WireTerm {
                    mono: m.clone(),
                    coef: c.clone(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = WirePolynomial::deserialize(deserializer)?;
        let mut terms = BTreeMap::new();
        for t in wire.terms {
            if t.coef.is_zero() {
                return Err(de::Error::custom("zero coefficient stored"));
            }
            if terms.insert(t.mono, t.coef).is_some() {
                return Err(de::Error::custom("duplicate monomial"));
            }
        }
        Ok(Polynomial { terms })
    }
}

impl From<Rational> for Polynomial {
    fn from(c: Rational) -> Self {
        Polynomial::constant(c)
    }
}

/// Error helper for operations that need a generator to be present in a table.
pub(crate) fn missing(g: &Generator) -> Error {
    Error::MissingFlow(g.to_string())
}
