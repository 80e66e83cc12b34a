use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rings::{binomial, Generator, Polynomial};

/// Formal x-derivative of a coefficient: `t_1 = x`, the other times are
/// constants, and `p`/`v`/`w` symbols shift their derivative count.
pub fn x_derivative(p: &Polynomial) -> Polynomial {
    p.derive(|g| {
        Ok(Some(match g {
            Generator::T(1) => Polynomial::one(),
            Generator::T(_) => Polynomial::zero(),
            other => Polynomial::var(other.x_shifted(1)),
        }))
    })
    .expect("x-derivative is total")
}

/// Truncated pseudo-differential operator `Σ_a f_a ∂^a`.
///
/// `tail: Some(d)` certifies every order `≥ d`; orders below `d` are unknown.
/// `tail: None` marks an exact differential operator, which has no negative
/// orders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsdoOperator {
    coeffs: BTreeMap<i64, Polynomial>,
    tail: Option<i64>,
}

impl PsdoOperator {
    pub fn zero() -> Self {
        PsdoOperator {
            coeffs: BTreeMap::new(),
            tail: None,
        }
    }

    pub fn one() -> Self {
        PsdoOperator::monomial(0, Polynomial::one(), None)
    }

    /// `∂^a`. Negative powers need a tail.
    pub fn d_pow(a: i64, tail: Option<i64>) -> Self {
        PsdoOperator::monomial(a, Polynomial::one(), tail)
    }

    pub fn monomial(a: i64, coef: Polynomial, tail: Option<i64>) -> Self {
        PsdoOperator::from_orders([(a, coef)], tail)
    }

    /// Builds an operator; orders below the tail are dropped.
    ///
    /// Panics when `tail` is `None` and a negative order is given.
    pub fn from_orders(orders: impl IntoIterator<Item = (i64, Polynomial)>, tail: Option<i64>) -> Self {
        let mut out = PsdoOperator {
            coeffs: BTreeMap::new(),
            tail,
        };
        for (a, c) in orders {
            assert!(tail.is_some() || a >= 0, "negative order {a} without a tail");
            out.add_at(a, &c);
        }
        out
    }

    fn add_at(&mut self, a: i64, c: &Polynomial) {
        if c.is_zero() || self.tail.is_some_and(|t| a < t) {
            return;
        }
        let slot = self.coeffs.entry(a).or_default();
        slot.add_assign_ref(c);
        if slot.is_zero() {
            self.coeffs.remove(&a);
        }
    }

    pub fn tail(&self) -> Option<i64> {
        self.tail
    }

    pub fn is_exact(&self) -> bool {
        self.tail.is_none()
    }

    /// True when every certified coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn orders(&self) -> impl DoubleEndedIterator<Item = (&i64, &Polynomial)> {
        self.coeffs.iter()
    }

    /// Highest order with a nonzero coefficient.
    pub fn top(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Coefficient of `∂^a`, or `DepthExhausted` below the certificate.
    pub fn coefficient(&self, a: i64) -> Result<Polynomial> {
        if let Some(t) = self.tail {
            if a < t {
                return Err(Error::DepthExhausted { order: a, tail: t });
            }
        }
        Ok(self.coeffs.get(&a).cloned().unwrap_or_default())
    }

    /// Highest order the operator can reach, counting the uncertified part.
    fn reach(&self) -> Option<i64> {
        match (self.top(), self.tail) {
            (Some(t), Some(d)) => Some(t.max(d - 1)),
            (t, None) => t,
            (None, Some(d)) => Some(d - 1),
        }
    }

    /// Drops orders below `floor`, narrowing the certificate. A differential
    /// operator cut at or below order 0 stays exact.
    pub fn truncate(&self, floor: i64) -> PsdoOperator {
        if self.tail.is_none() && floor <= 0 {
            return self.clone();
        }
        let mut out = PsdoOperator {
            coeffs: BTreeMap::new(),
            tail: Some(self.tail.map_or(floor, |t| t.max(floor))),
        };
        for (a, c) in &self.coeffs {
            out.add_at(*a, c);
        }
        out
    }

    fn joint_tail(&self, other: &PsdoOperator) -> Option<i64> {
        match (self.tail, other.tail) {
            (None, t) | (t, None) => t,
            (Some(a), Some(b)) => Some(a.max(b)),
        }
    }

    pub fn add(&self, other: &PsdoOperator) -> PsdoOperator {
        let mut out = PsdoOperator {
            coeffs: BTreeMap::new(),
            tail: self.joint_tail(other),
        };
        for (a, c) in self.coeffs.iter().chain(other.coeffs.iter()) {
            out.add_at(*a, c);
        }
        out
    }

    pub fn sub(&self, other: &PsdoOperator) -> PsdoOperator {
        self.add(&other.scale(&Polynomial::int(-1)))
    }

    /// Left multiplication by a function.
    pub fn scale(&self, c: &Polynomial) -> PsdoOperator {
        let mut out = PsdoOperator {
            coeffs: BTreeMap::new(),
            tail: self.tail,
        };
        for (a, v) in &self.coeffs {
            out.add_at(*a, &(v * c));
        }
        out
    }

    /// Applies `f` to every coefficient.
    pub fn map_coefficients(&self, mut f: impl FnMut(i64, &Polynomial) -> Result<Polynomial>) -> Result<PsdoOperator> {
        let mut out = PsdoOperator {
            coeffs: BTreeMap::new(),
            tail: self.tail,
        };
        for (a, v) in &self.coeffs {
            out.add_at(*a, &f(*a, v)?);
        }
        Ok(out)
    }

    /// Lowest order at which `self ∘ other` is exact.
    ///
    /// The unknown part of `self` lies below `tail_A`, and composing it with
    /// `other` (reaching order `top_B`) pollutes orders below `tail_A + top_B`.
    /// The symmetric term bounds the other side. `None` means the product of
    /// two differential operators (or a product with an exact zero), which is
    /// exact.
    pub fn composition_floor(&self, other: &PsdoOperator) -> Option<i64> {
        let left = self.tail.and_then(|t| other.reach().map(|r| t + r));
        let right = other.tail.and_then(|t| self.reach().map(|r| t + r));
        match (left, right) {
            (None, None) => None,
            (Some(a), None) | (None, Some(a)) => Some(a),
            (Some(a), Some(b)) => Some(a.max(b)),
        }
    }

    pub fn compose(&self, other: &PsdoOperator) -> PsdoOperator {
        leibniz_compose(self, other)
    }

    pub fn commutator(&self, other: &PsdoOperator) -> PsdoOperator {
        leibniz_compose(self, other).sub(&leibniz_compose(other, self))
    }

    /// `self^n` for `n ≥ 1`.
    pub fn pow(&self, n: u32) -> PsdoOperator {
        assert!(n >= 1, "operator power needs n >= 1");
        let mut acc = self.clone();
        for _ in 1..n {
            acc = leibniz_compose(&acc, self);
        }
        acc
    }
}

/// Generalized Leibniz product
/// `(f ∂^a) ∘ (g ∂^b) = Σ_r C(a,r) f g^{(r)} ∂^{a+b−r}`,
/// kept on every order the tail certificates make exact.
pub fn leibniz_compose(a: &PsdoOperator, b: &PsdoOperator) -> PsdoOperator {
    let floor = a.composition_floor(b);
    let mut out = PsdoOperator {
        coeffs: BTreeMap::new(),
        tail: floor,
    };
    for (&oa, fa) in &a.coeffs {
        for (&ob, gb) in &b.coeffs {
            let mut deriv = gb.clone();
            let mut r: u32 = 0;
            loop {
                let order = oa + ob - i64::from(r);
                if floor.is_some_and(|f| order < f) {
                    break;
                }
                if oa >= 0 && i64::from(r) > oa {
                    break;
                }
                if deriv.is_zero() {
                    break;
                }
                let c = binomial(oa, r);
                out.add_at(order, &(fa * &deriv).scale(&c));
                deriv = x_derivative(&deriv);
                r += 1;
            }
        }
    }
    out
}

/// `(plus, minus)`: orders `≥ 0` and orders `≤ −1`.
pub fn split(op: &PsdoOperator) -> (PsdoOperator, PsdoOperator) {
    let plus_tail = op.tail.filter(|t| *t > 0);
    let mut plus = PsdoOperator {
        coeffs: BTreeMap::new(),
        tail: plus_tail,
    };
    let mut minus = PsdoOperator {
        coeffs: BTreeMap::new(),
        tail: Some(op.tail.unwrap_or(0)),
    };
    if op.tail.is_none() {
        minus.tail = None;
    }
    for (a, c) in &op.coeffs {
        if *a >= 0 {
            plus.add_at(*a, c);
        } else {
            minus.add_at(*a, c);
        }
    }
    (plus, minus)
}

impl fmt::Display for PsdoOperator {
    /// `D^2 + 2*v1 + O(D^-5)`; multi-term coefficients are parenthesized.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (a, c) in self.coeffs.iter().rev() {
            let op = match *a {
                0 => String::new(),
                1 => "D".to_string(),
                a => format!("D^{a}"),
            };
            let (neg, coef) = match c.as_constant() {
                Some(q) => (q.is_negative(), Polynomial::constant(q.abs())),
                None if c.is_monomial() => {
                    let (m, q) = c.terms().next().expect("one term");
                    (q.is_negative(), Polynomial::term(q.abs(), m.clone()))
                }
                None => (false, c.clone()),
            };
            let body = match (coef.as_constant().is_some_and(|q| q.is_one()), op.is_empty()) {
                (true, true) => "1".to_string(),
                (true, false) => op,
                (false, true) if coef.len() > 1 => format!("({coef})"),
                (false, true) => coef.to_string(),
                (false, false) if coef.len() > 1 => format!("({coef})*{op}"),
                (false, false) => format!("{coef}*{op}"),
            };
            match (first, neg) {
                (true, false) => write!(f, "{body}")?,
                (true, true) => write!(f, "-{body}")?,
                (false, false) => write!(f, " + {body}")?,
                (false, true) => write!(f, " - {body}")?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        if let Some(t) = self.tail {
            write!(f, " + O(D^{})", t - 1)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct WireOrder {
    a: i64,
    coef: Polynomial,
}

#[derive(Serialize, Deserialize)]
struct WireOperator {
    orders: Vec<WireOrder>,
    tail_depth: Option<i64>,
}

impl Serialize for PsdoOperator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WireOperator {
            orders: self
                .coeffs
                .iter()
                .rev()
                .map(|(a, c)| WireOrder { a: *a, coef: c.clone() })
                .collect(),
            tail_depth: self.tail,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PsdoOperator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = WireOperator::deserialize(d)?;
        let mut out = PsdoOperator {
            coeffs: BTreeMap::new(),
            tail: wire.tail_depth,
        };
        for o in wire.orders {
            if o.coef.is_zero() {
                return Err(D::Error::custom(format!("zero coefficient at order {}", o.a)));
            }
            if out.tail.map_or(o.a < 0, |t| o.a < t) {
                return Err(D::Error::custom(format!("order {} lies below the certificate", o.a)));
            }
            if out.coeffs.insert(o.a, o.coef).is_some() {
                return Err(D::Error::custom(format!("order {} repeated", o.a)));
            }
        }
        Ok(out)
    }
}
