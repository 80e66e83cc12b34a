//! The jet ring of the heat hierarchy.
//!
//! Coordinates are `p_j = ∂_x^j u` and the times `t_k` (`t_1 = x`). The flows
//! act on-shell: `D_{t_i}(p_k) = p_{k+i}`, `D_{t_i}(t_k) = δ_{ik}`. Every
//! expression carries a [`JetWindow`]; an operation whose exact result would
//! leave the window fails with [`Error::WindowExceeded`] instead of dropping
//! terms.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rings::{Generator, Monomial, Polynomial, Rational};
use crate::weyl::{BasisIndex, WeylElement};

/// Largest admissible time index `tmax` and jet order `jetmax`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JetWindow {
    pub tmax: u32,
    pub jetmax: u32,
}

impl JetWindow {
    pub fn new(tmax: u32, jetmax: u32) -> Self {
        JetWindow { tmax, jetmax }
    }

    /// Smallest jet order for which [`verify_symmetry`] can run flow `i`
    /// against `V_{m,j}` on the full test basis `p_k, k ≤ jetmax/2`.
    pub fn certifying_symmetry(tmax: u32, i: u32, m: u32, j: u32) -> Self {
        let reach = i + j + m * tmax.saturating_sub(1);
        JetWindow::new(tmax, 2 * reach)
    }

    fn admits(&self, g: &Generator) -> bool {
        match *g {
            Generator::P(j) => j <= self.jetmax,
            Generator::T(k) => k <= self.tmax,
            _ => false,
        }
    }
}

impl fmt::Display for JetWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tmax={}, jetmax={}", self.tmax, self.jetmax)
    }
}

/// Polynomial in `t_k` (`k ≤ tmax`) and `p_j` (`j ≤ jetmax`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JetExpression {
    poly: Polynomial,
    window: JetWindow,
}

impl JetExpression {
    pub fn new(poly: Polynomial, window: JetWindow) -> Result<Self> {
        if let Some(g) = poly.generators().into_iter().find(|g| !window.admits(g)) {
            return Err(Error::WindowExceeded(format!(
                "generator {g} lies outside the jet window ({window})"
            )));
        }
        Ok(JetExpression { poly, window })
    }

    pub fn p(j: u32, window: JetWindow) -> Result<Self> {
        JetExpression::new(Polynomial::p(j), window)
    }

    pub fn t(k: u32, window: JetWindow) -> Result<Self> {
        JetExpression::new(Polynomial::t(k), window)
    }

    pub fn constant(c: Rational, window: JetWindow) -> Self {
        JetExpression {
            poly: Polynomial::constant(c),
            window,
        }
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn into_poly(self) -> Polynomial {
        self.poly
    }

    pub fn window(&self) -> JetWindow {
        self.window
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// Re-homes the expression in a wider window.
    pub fn widen(&self, window: JetWindow) -> Result<Self> {
        JetExpression::new(self.poly.clone(), window)
    }

    fn with_poly(&self, poly: Polynomial) -> Self {
        JetExpression {
            poly,
            window: self.window,
        }
    }

    pub fn add(&self, other: &JetExpression) -> JetExpression {
        self.with_poly(&self.poly + &other.poly)
    }

    pub fn sub(&self, other: &JetExpression) -> JetExpression {
        self.with_poly(&self.poly - &other.poly)
    }

    pub fn mul(&self, other: &JetExpression) -> JetExpression {
        self.with_poly(&self.poly * &other.poly)
    }

    pub fn scale(&self, c: &Rational) -> JetExpression {
        self.with_poly(self.poly.scale(c))
    }

    fn shift_jet(&self, j: u32, by: u32) -> Result<Option<Polynomial>> {
        if j + by > self.window.jetmax {
            return Err(Error::WindowExceeded(format!(
                "p{} needed but jetmax is {}",
                j + by,
                self.window.jetmax
            )));
        }
        Ok(Some(Polynomial::p(j + by)))
    }
}

impl fmt::Display for JetExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.poly.fmt(f)
    }
}

/// Total x-derivative `D_{t_1}`.
pub fn total_x(e: &JetExpression) -> Result<JetExpression> {
    d_t(1, e)
}

/// The on-shell flow derivation `D_{t_i}`, `i ≥ 1`.
pub fn d_t(i: u32, e: &JetExpression) -> Result<JetExpression> {
    if i == 0 {
        return Err(Error::InvalidArgument("flow index must be >= 1".into()));
    }
    let poly = e.poly.derive(|g| match *g {
        Generator::P(j) => e.shift_jet(j, i),
        Generator::T(k) if k == i => Ok(Some(Polynomial::one())),
        _ => Ok(None),
    })?;
    Ok(e.with_poly(poly))
}

/// `∂_x^n`.
pub fn x_power(n: u32, e: &JetExpression) -> Result<JetExpression> {
    let mut cur = e.clone();
    for _ in 0..n {
        if cur.is_zero() {
            break;
        }
        cur = total_x(&cur)?;
    }
    Ok(cur)
}

/// `𝒯 = Σ_{j=1}^{tmax} j t_j ∂_x^{j-1}`, truncated at the window's `tmax`.
#[allow(non_snake_case)]
pub fn apply_T(e: &JetExpression) -> Result<JetExpression> {
    let mut out = Polynomial::zero();
    let mut deriv = e.clone();
    for j in 1..=e.window.tmax {
        if j > 1 {
            deriv = total_x(&deriv)?;
        }
        if deriv.is_zero() {
            break;
        }
        let coeff = Polynomial::t(j).scale(&Rational::from(j as i64));
        out.add_assign_ref(&(&coeff * &deriv.poly));
    }
    Ok(e.with_poly(out))
}

/// `V_{m,j} = 𝒯^m ∘ ∂_x^j`.
#[allow(non_snake_case)]
pub fn apply_V(m: u32, j: u32, e: &JetExpression) -> Result<JetExpression> {
    let mut cur = x_power(j, e)?;
    for _ in 0..m {
        cur = apply_T(&cur)?;
    }
    Ok(cur)
}

/// Action of a linear combination of generators `Σ c_{m,j} V_{m,j}`, the
/// element's `(m, j)` keys read in the `V`-basis.
pub fn apply_symmetry(element: &WeylElement, e: &JetExpression) -> Result<JetExpression> {
    let mut out = e.with_poly(Polynomial::zero());
    for (idx, c) in element.terms() {
        out = out.add(&apply_V(idx.m, idx.j, e)?.scale(c));
    }
    Ok(out)
}

/// Test basis for symmetry checks: t-monomials of degree ≤ 2 over
/// `t_1..t_tmax`, times `p_k` for `k ≤ jetmax/2`.
pub fn symmetry_basis(window: JetWindow) -> Vec<JetExpression> {
    let mut tmonos = vec![Monomial::one()];
    for a in 1..=window.tmax {
        tmonos.push(Monomial::var(Generator::T(a)));
        for b in a..=window.tmax {
            tmonos.push(Monomial::from_factors([(Generator::T(a), 1), (Generator::T(b), 1)]));
        }
    }
    let mut out = Vec::new();
    for k in 0..=window.jetmax / 2 {
        for tm in &tmonos {
            let m = tm.mul(&Monomial::var(Generator::P(k)));
            out.push(JetExpression {
                poly: Polynomial::term(Rational::one(), m),
                window,
            });
        }
    }
    out
}

/// One evaluated case of a symmetry check.
#[derive(Clone, Debug)]
pub struct SymmetryCase {
    pub input: JetExpression,
    pub residual: JetExpression,
}

/// Residuals of `[D_{t_i} − ∂_x^i, V_{m,j}]` on every element of
/// [`symmetry_basis`]. Fails with `NonzeroResidual` on the first basis element
/// whose residual does not cancel.
pub fn verify_symmetry(i: u32, m: u32, j: u32, window: JetWindow) -> Result<Vec<SymmetryCase>> {
    if i == 0 || i > window.tmax {
        return Err(Error::WindowExceeded(format!(
            "flow t{i} is not covered by the truncated symmetry operator (tmax={})",
            window.tmax
        )));
    }
    let flow = |e: &JetExpression| -> Result<JetExpression> {
        Ok(d_t(i, e)?.sub(&x_power(i, e)?))
    };
    let cases: Result<Vec<SymmetryCase>> = symmetry_basis(window)
        .into_par_iter()
        .map(|input| {
            let lhs = flow(&apply_V(m, j, &input)?)?;
            let rhs = apply_V(m, j, &flow(&input)?)?;
            Ok(SymmetryCase {
                residual: lhs.sub(&rhs),
                input,
            })
        })
        .collect();
    let cases = cases?;
    if let Some(bad) = cases.iter().find(|c| !c.residual.is_zero()) {
        return Err(Error::NonzeroResidual {
            location: format!(
                "[D_t{i} - Dx^{i}, V({m},{j})] on {}",
                bad.input
            ),
            residual: bad.residual.to_string(),
        });
    }
    Ok(cases)
}

/// Representation check for one pair: the commutator of the two actions
/// minus the action of the tabulated bracket, on the given input.
pub fn representation_residual(
    a: BasisIndex,
    b: BasisIndex,
    bracket: &WeylElement,
    e: &JetExpression,
) -> Result<JetExpression> {
    let ab = apply_V(a.m, a.j, &apply_V(b.m, b.j, e)?)?;
    let ba = apply_V(b.m, b.j, &apply_V(a.m, a.j, e)?)?;
    Ok(ab.sub(&ba).sub(&apply_symmetry(bracket, e)?))
}
