//! Truncated power series in the auxiliary indeterminate `z` with polynomial
//! coefficients, and the conjugated derivatives of the heat-hierarchy wave
//! function.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::poly::Polynomial;
use super::rational::Rational;
use crate::error::{Error, Result};

/// Power series `Σ_s c_s z^s` known exactly for `s ≤ bound`.
///
/// A `complete` series is a genuine polynomial in `z`: every coefficient past
/// `bound` is zero, so operations on it never lose validity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZSeries {
    coeffs: Vec<Polynomial>,
    complete: bool,
}

impl ZSeries {
    pub fn from_coeffs(mut coeffs: Vec<Polynomial>, complete: bool) -> Self {
        if coeffs.is_empty() {
            coeffs.push(Polynomial::zero());
        }
        ZSeries { coeffs, complete }
    }

    pub fn constant(c: Polynomial) -> Self {
        ZSeries::from_coeffs(vec![c], true)
    }

    pub fn one() -> Self {
        ZSeries::constant(Polynomial::one())
    }

    /// Highest z-power whose coefficient is certified.
    pub fn bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn coeffs(&self) -> &[Polynomial] {
        &self.coeffs
    }

    /// Coefficient of `z^s`; fails past the certified bound of a truncated series.
    pub fn coeff(&self, s: usize) -> Result<Polynomial> {
        match self.coeffs.get(s) {
            Some(c) => Ok(c.clone()),
            None if self.complete => Ok(Polynomial::zero()),
            None => Err(Error::WindowExceeded(format!(
                "z^{s} requested from a series certified through z^{}",
                self.bound()
            ))),
        }
    }

    /// Drops everything past `z^bound`.
    pub fn truncate(&self, bound: usize) -> ZSeries {
        if bound >= self.bound() {
            return self.clone();
        }
        let dropped_nonzero = self.coeffs[bound + 1..].iter().any(|c| !c.is_zero());
        ZSeries {
            coeffs: self.coeffs[..=bound].to_vec(),
            complete: self.complete && !dropped_nonzero,
        }
    }

    /// `d/dz`. A truncated series loses one order of validity.
    pub fn derivative(&self) -> Result<ZSeries> {
        if !self.complete && self.bound() == 0 {
            return Err(Error::WindowExceeded(
                "derivative of a series certified only through z^0".into(),
            ));
        }
        let mut out: Vec<Polynomial> = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(s, c)| c.scale(&Rational::from(s as i64 + 1)))
            .collect();
        if self.complete && out.is_empty() {
            out.push(Polynomial::zero());
        }
        Ok(ZSeries::from_coeffs(out, self.complete))
    }

    pub fn add(&self, other: &ZSeries) -> ZSeries {
        let bound = self.joint_bound(other, self.bound().max(other.bound()));
        let coeffs = (0..=bound)
            .map(|s| {
                let a = self.coeffs.get(s).cloned().unwrap_or_default();
                let b = other.coeffs.get(s).cloned().unwrap_or_default();
                &a + &b
            })
            .collect();
        ZSeries::from_coeffs(coeffs, self.complete && other.complete)
    }

    pub fn mul(&self, other: &ZSeries) -> ZSeries {
        let bound = self.joint_bound(other, self.bound() + other.bound());
        let mut coeffs = vec![Polynomial::zero(); bound + 1];
        for (i, a) in self.coeffs.iter().enumerate().filter(|(i, _)| *i <= bound) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j > bound {
                    break;
                }
                coeffs[i + j].add_assign_ref(&(a * b));
            }
        }
        ZSeries::from_coeffs(coeffs, self.complete && other.complete)
    }

    fn joint_bound(&self, other: &ZSeries, complete_bound: usize) -> usize {
        match (self.complete, other.complete) {
            (true, true) => complete_bound,
            (true, false) => other.bound(),
            (false, true) => self.bound(),
            (false, false) => self.bound().min(other.bound()),
        }
    }
}

impl fmt::Display for ZSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (s, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match s {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*z")?,
                _ => write!(f, "({c})*z^{s}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        if !self.complete {
            write!(f, " + O(z^{})", self.bound() + 1)?;
        }
        Ok(())
    }
}

/// `r`-th z-derivative of `ξ = Σ_{k=0}^{N} t_k z^k`, truncated at `z^z_bound`.
///
/// The coefficient of `z^{k-r}` is `k!/(k-r)! · t_k`. `r = 0` is rejected:
/// `ξ` itself (and with it `t_0`) only ever enters through its derivatives.
pub fn xi_derivative(n: u32, r: u32, z_bound: usize) -> Result<ZSeries> {
    if r == 0 {
        return Err(Error::InvalidArgument(
            "xi_derivative needs r >= 1; xi itself is never materialized".into(),
        ));
    }
    let mut coeffs = Vec::new();
    for k in r..=n {
        let falling: i64 = (k - r + 1..=k).map(i64::from).product();
        coeffs.push(Polynomial::t(k).scale(&Rational::from(falling)));
    }
    Ok(ZSeries::from_coeffs(coeffs, true).truncate(z_bound))
}

/// `B_m = e^{-ξ} (d/dz)^m e^{ξ}` for `m = 0..=max_order`, each certified
/// through `z^z_bound`, via `B_0 = 1`, `B_{m+1} = B_m' + ξ' B_m`.
///
/// Intermediate series are carried `max_order - m` orders past the requested
/// bound so that each derivative step stays exact.
pub fn bell_sequence(n: u32, max_order: u32, z_bound: usize) -> Result<Vec<ZSeries>> {
    let head = z_bound + max_order as usize;
    let xi1 = if n >= 1 {
        xi_derivative(n, 1, head)?
    } else {
        ZSeries::constant(Polynomial::zero())
    };
    let mut out = Vec::with_capacity(max_order as usize + 1);
    let mut current = ZSeries::one();
    for m in 0..=max_order {
        out.push(current.truncate(z_bound));
        if m == max_order {
            break;
        }
        let carried = head - m as usize;
        let next = current.derivative()?.add(&xi1.mul(&current));
        current = next.truncate(carried - 1);
    }
    Ok(out)
}
