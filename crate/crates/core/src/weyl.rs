//! The Weyl algebra `𝔄₁` in normal order, and the symmetry algebra `𝔰`.
//!
//! A [`WeylElement`] is a finite sum of `z^j (d/dz)^m` with rational
//! coefficients, keyed by `(m, j)`. The same key names the symmetry generator
//! `V_{m,j} = 𝒯^m ∘ ∂_x^j`; the correspondence `V_{m,j} ↦ z^j (d/dz)^m` reverses
//! products, so brackets pick up a sign. That sign is applied only in
//! [`bracket`] and [`StructureTable`]; `WeylElement` arithmetic is the plain
//! associative product.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rings::{binomial, factorial, Rational};

/// Index pair `(m, j)`: derivative order and z-power, or equivalently the
/// generator `V_{m,j}`. Ordered lexicographically by `(m, j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BasisIndex {
    pub m: u32,
    pub j: u32,
}

impl BasisIndex {
    pub const fn new(m: u32, j: u32) -> Self {
        BasisIndex { m, j }
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.m, self.j)
    }
}

/// `c^{m,k}_r = r! C(m,r) C(k,r)`: the coefficient in
/// `(d/dz)^m ∘ z^k = Σ_r c^{m,k}_r z^{k-r} (d/dz)^{m-r}`.
pub fn c_coefficient(m: u32, k: u32, r: u32) -> Rational {
    if r > m || r > k {
        return Rational::zero();
    }
    &(&factorial(r) * &binomial(m as i64, r)) * &binomial(k as i64, r)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct WeylElement {
    terms: BTreeMap<BasisIndex, Rational>,
}

impl WeylElement {
    pub fn zero() -> Self {
        WeylElement::default()
    }

    pub fn one() -> Self {
        WeylElement::basis(0, 0)
    }

    /// `z^j (d/dz)^m`.
    pub fn basis(m: u32, j: u32) -> Self {
        WeylElement::term(BasisIndex::new(m, j), Rational::one())
    }

    pub fn z() -> Self {
        WeylElement::basis(0, 1)
    }

    pub fn d() -> Self {
        WeylElement::basis(1, 0)
    }

    pub fn scalar(c: Rational) -> Self {
        WeylElement::term(BasisIndex::new(0, 0), c)
    }

    pub fn term(idx: BasisIndex, c: Rational) -> Self {
        let mut e = WeylElement::zero();
        e.add_term(idx, &c);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&BasisIndex, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, idx: BasisIndex) -> Rational {
        self.terms.get(&idx).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, idx: BasisIndex, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(idx).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&idx);
        }
    }

    pub fn add(&self, other: &WeylElement) -> WeylElement {
        let mut out = self.clone();
        for (i, c) in &other.terms {
            out.add_term(*i, c);
        }
        out
    }

    pub fn sub(&self, other: &WeylElement) -> WeylElement {
        self.add(&other.scale(&Rational::from(-1)))
    }

    pub fn scale(&self, s: &Rational) -> WeylElement {
        let mut out = WeylElement::zero();
        for (i, c) in &self.terms {
            out.add_term(*i, &(c * s));
        }
        out
    }

    /// Normal-ordered product `self ∘ other`.
    ///
    /// Each pair `z^j D^m ∘ z^k D^n` is rewritten with
    /// `D^m z^k = Σ_r c^{m,k}_r z^{k-r} D^{m-r}`. Indices are never clipped.
    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        let mut out = WeylElement::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let coeff = ca * cb;
                for r in 0..=a.m.min(b.j) {
                    let c = c_coefficient(a.m, b.j, r);
                    out.add_term(BasisIndex::new(a.m + b.m - r, a.j + b.j - r), &(&coeff * &c));
                }
            }
        }
        out
    }

    /// `self ∘ other − other ∘ self`.
    pub fn commutator(&self, other: &WeylElement) -> WeylElement {
        self.compose(other).sub(&other.compose(self))
    }

    pub fn pow(&self, n: u32) -> WeylElement {
        let mut acc = WeylElement::one();
        for _ in 0..n {
            acc = acc.compose(self);
        }
        acc
    }
}

impl fmt::Display for WeylElement {
    /// Terms in descending `(m, j)` order, e.g. `z^3*D^2+6*z^2*D+6*z`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (idx, c)) in self.terms.iter().rev().enumerate() {
            let mag = c.abs();
            if c.is_negative() {
                write!(f, "-")?;
            } else if i > 0 {
                write!(f, "+")?;
            }
            let mut factors = Vec::new();
            match idx.j {
                0 => {}
                1 => factors.push("z".to_string()),
                j => factors.push(format!("z^{j}")),
            }
            match idx.m {
                0 => {}
                1 => factors.push("D".to_string()),
                m => factors.push(format!("D^{m}")),
            }
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{mag}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct WireWeylTerm {
    m: u32,
    j: u32,
    coef: Rational,
}

#[derive(Serialize, Deserialize)]
struct WireWeyl {
    terms: Vec<WireWeylTerm>,
}

impl Serialize for WeylElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        WireWeyl {
            terms: self
                .terms
                .iter()
                .map(|(i, c)| WireWeylTerm {
                    m: i.m,
                    j: i.j,
                    coef: c.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeylElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let wire = WireWeyl::deserialize(d)?;
        let mut terms = BTreeMap::new();
        for t in wire.terms {
            if t.coef.is_zero() {
                return Err(serde::de::Error::custom("zero coefficient stored"));
            }
            if terms.insert(BasisIndex::new(t.m, t.j), t.coef).is_some() {
                return Err(serde::de::Error::custom("duplicate basis index"));
            }
        }
        Ok(WeylElement { terms })
    }
}

/// The `𝔰`-bracket `[V_a, V_b]` in the `V`-basis, from the closed formula
/// `[V_{m,j}, V_{n,k}] = −Σ_r (c^{m,k}_r − c^{n,j}_r) V_{m+n−r, j+k−r}`.
pub fn bracket(a: BasisIndex, b: BasisIndex) -> WeylElement {
    let mut out = WeylElement::zero();
    let top = a.m.min(b.j).max(b.m.min(a.j));
    for r in 0..=top {
        let c = &c_coefficient(a.m, b.j, r) - &c_coefficient(b.m, a.j, r);
        if c.is_zero() {
            continue;
        }
        out.add_term(BasisIndex::new(a.m + b.m - r, a.j + b.j - r), &(-c));
    }
    out
}

/// Every basis index `(m, j)` with `m + j ≤ bound`, ascending.
pub fn basis_within(bound: u32) -> Vec<BasisIndex> {
    let mut out = Vec::new();
    for m in 0..=bound {
        for j in 0..=bound - m {
            out.push(BasisIndex::new(m, j));
        }
    }
    out
}

/// Brackets of all basis pairs with both index sums `m + j ≤ bound`.
#[derive(Clone, Debug)]
pub struct StructureTable {
    bound: u32,
    entries: BTreeMap<(BasisIndex, BasisIndex), WeylElement>,
}

impl StructureTable {
    pub fn new(bound: u32) -> Self {
        let basis = basis_within(bound);
        let pairs: Vec<(BasisIndex, BasisIndex)> = basis
            .iter()
            .flat_map(|a| basis.iter().map(move |b| (*a, *b)))
            .collect();
        let entries = pairs
            .into_par_iter()
            .map(|(a, b)| ((a, b), bracket(a, b)))
            .collect();
        StructureTable { bound, entries }
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn get(&self, a: BasisIndex, b: BasisIndex) -> Option<&WeylElement> {
        self.entries.get(&(a, b))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(BasisIndex, BasisIndex), &WeylElement)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Structure constant `f^c_{ab}`: the `V_c` coefficient of `[V_a, V_b]`.
    pub fn constant(&self, c: BasisIndex, a: BasisIndex, b: BasisIndex) -> Option<Rational> {
        self.get(a, b).map(|e| e.coefficient(c))
    }
}
