use std::collections::BTreeMap;

use super::kp::{kp_flows, x_derivative_n};
use super::operator::{leibniz_compose, split, PsdoOperator};
use crate::error::{Error, Result};
use crate::rings::{missing, Generator, Polynomial, Rational};

/// One checked coefficient of an identity, labelled by where it sits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residual {
    pub location: String,
    pub value: Polynomial,
}

fn fail_on_nonzero(cells: Vec<Residual>) -> Result<Vec<Residual>> {
    if let Some(bad) = cells.iter().find(|c| !c.value.is_zero()) {
        return Err(Error::NonzeroResidual {
            location: bad.location.clone(),
            residual: bad.value.to_string(),
        });
    }
    Ok(cells)
}

/// `g`, its inverse and `L = g ∘ ∂ ∘ g⁻¹`.
#[derive(Clone, Debug)]
pub struct Dressing {
    pub depth: u32,
    pub g: PsdoOperator,
    pub g_inv: PsdoOperator,
    pub l: PsdoOperator,
}

impl Dressing {
    /// `v^a` as a differential polynomial in the `w`'s, for `a ≤ depth − 1`.
    pub fn v_of_w(&self, a: u32) -> Result<Polynomial> {
        self.l.coefficient(-i64::from(a))
    }
}

/// `g = 1 + Σ_{a ≤ depth} w_a ∂^{−a}`, `g⁻¹ = Σ_n (1 − g)^n` through
/// `∂^{−depth}`, and `L` certified through `∂^{−depth+1}`.
pub fn dress(depth: u32) -> Result<Dressing> {
    if depth < 2 {
        return Err(Error::InvalidArgument("dressing needs depth >= 2".into()));
    }
    let d = i64::from(depth);
    let neg_h = PsdoOperator::from_orders(
        (1..=depth).map(|a| (-i64::from(a), Polynomial::w(a, 0).scale(&Rational::from(-1)))),
        Some(-d),
    );
    let g = PsdoOperator::one().sub(&neg_h);
    let mut g_inv = PsdoOperator::one().truncate(-d);
    let mut power = PsdoOperator::one();
    for _ in 1..=depth {
        power = leibniz_compose(&power, &neg_h).truncate(-d);
        g_inv = g_inv.add(&power);
    }
    let l = leibniz_compose(&leibniz_compose(&g, &PsdoOperator::d_pow(1, None)), &g_inv);
    Ok(Dressing { depth, g, g_inv, l })
}

/// `∂_{t_j} w_a` for `a ≤ depth − j`, read off `∂_{t_j} g = −(L^j)_− g`.
pub fn w_flows(dressing: &Dressing, j: u32) -> Result<BTreeMap<u32, Polynomial>> {
    let lj = dressing.l.pow(j);
    let (_, minus) = split(&lj);
    let rhs = leibniz_compose(&minus, &dressing.g).scale(&Polynomial::int(-1));
    let order0 = rhs.coefficient(0)?;
    if !order0.is_zero() {
        return Err(Error::NonIntegralBracket(0));
    }
    let floor = rhs.tail().unwrap_or(i64::MIN);
    let mut out = BTreeMap::new();
    for a in 1..=dressing.depth {
        let order = -i64::from(a);
        if order < floor {
            break;
        }
        out.insert(a, rhs.coefficient(order)?);
    }
    Ok(out)
}

/// Derivation on mixed `t`/`w` coefficients: `∂_{t_i} t_k = δ_{ik}` and
/// `∂_{t_i} w_a_(r) = ∂_x^r` of the `w`-flow.
fn dressed_t_derivative(p: &Polynomial, i: u32, flows: &BTreeMap<u32, Polynomial>) -> Result<Polynomial> {
    p.derive(|g| match *g {
        Generator::T(k) => Ok(Some(if k == i { Polynomial::one() } else { Polynomial::zero() })),
        Generator::W { a, r } => flows
            .get(&a)
            .map(|f| Some(x_derivative_n(f, r)))
            .ok_or_else(|| missing(g)),
        _ => Err(missing(g)),
    })
}

/// Checks that the `w`-flows induce the KP flow on `L(w)` two ways:
/// `∂_{t_j} L` against `[(L^j)_+, L]`, and `∂_{t_j} v^a(w)` against
/// `F_{j,a}` evaluated at `v = v(w)`.
pub fn verify_g_flow_consistency(j: u32, depth: u32) -> Result<Vec<Residual>> {
    let dressing = dress(depth)?;
    let flows = w_flows(&dressing, j)?;
    let (plus, _) = split(&dressing.l.pow(j));
    if let Some(t) = plus.tail() {
        return Err(Error::DepthExhausted { order: 0, tail: t });
    }
    let bracket = plus.commutator(&dressing.l);
    let abstract_flows = kp_flows(j, depth)?;
    let last = depth.saturating_sub(1 + j);
    let mut v_of_w = BTreeMap::new();
    for b in 1..depth {
        v_of_w.insert(b, dressing.v_of_w(b)?);
    }
    let mut cells = Vec::new();
    for a in 1..=last {
        let order = -i64::from(a);
        let lhs = dressed_t_derivative(&dressing.l.coefficient(order)?, j, &flows)?;
        let rhs = bracket.coefficient(order)?;
        cells.push(Residual {
            location: format!("d/dt{j} L at order {order}"),
            value: &lhs - &rhs,
        });
        let f = abstract_flows.rhs(a).ok_or_else(|| missing(&Generator::V { a, r: 0 }))?;
        let substituted = f.substitute(|g| match *g {
            Generator::V { a: b, r } => v_of_w
                .get(&b)
                .map(|v| Some(x_derivative_n(v, r)))
                .ok_or(Error::DepthExhausted { order: -i64::from(b), tail: 1 - i64::from(depth) }),
            _ => Ok(None),
        })?;
        cells.push(Residual {
            location: format!("flow of v{a} through w"),
            value: &lhs - &substituted,
        });
    }
    fail_on_nonzero(cells)
}

/// `𝒯 = Σ_{k=1}^{n} k t_k ∂^{k−1}`.
pub fn t_operator(n: u32) -> PsdoOperator {
    PsdoOperator::from_orders(
        (1..=n).map(|k| (i64::from(k) - 1, Polynomial::t(k).scale(&Rational::from(i64::from(k))))),
        None,
    )
}

/// Checks `[L, S] = 1` and `∂_{t_i} S − [(L^i)_+, S] = 0` for `i ≤ i_max`
/// with `S = g ∘ 𝒯 ∘ g⁻¹`, on every certified order.
///
/// An order inside the certificate whose coefficient needs an uncovered
/// `w`-flow raises `DepthExhausted`.
pub fn verify_s_relations(i_max: u32, t_index: u32, depth: u32) -> Result<Vec<Residual>> {
    let dressing = dress(depth)?;
    let t = t_operator(t_index);
    let s = leibniz_compose(&leibniz_compose(&dressing.g, &t), &dressing.g_inv);
    let mut cells = Vec::new();
    let ls = dressing.l.commutator(&s).sub(&PsdoOperator::one());
    push_orders(&mut cells, &ls, "[L,S]-1")?;
    for i in 1..=i_max {
        let flows = w_flows(&dressing, i)?;
        let (plus, _) = split(&dressing.l.pow(i));
        if let Some(tail) = plus.tail() {
            return Err(Error::DepthExhausted { order: 0, tail });
        }
        let br = plus.commutator(&s);
        let floor = br.tail().expect("S carries a tail");
        let mut ds = BTreeMap::new();
        for (a, c) in s.orders() {
            if *a < floor {
                continue;
            }
            let d = dressed_t_derivative(c, i, &flows).map_err(|e| match e {
                Error::MissingFlow(_) => Error::DepthExhausted { order: *a, tail: floor },
                other => other,
            })?;
            ds.insert(*a, d);
        }
        let ds = PsdoOperator::from_orders(ds, Some(floor));
        push_orders(&mut cells, &ds.sub(&br), &format!("[D_t{i}-(L^{i})_+,S]"))?;
    }
    fail_on_nonzero(cells)
}

fn push_orders(cells: &mut Vec<Residual>, op: &PsdoOperator, label: &str) -> Result<()> {
    let tail = op.tail().unwrap_or(0);
    let top = op.top().unwrap_or(tail).max(tail);
    for a in (tail..=top).rev() {
        cells.push(Residual {
            location: format!("{label} at order {a}"),
            value: op.coefficient(a)?,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_first_coefficient() {
        let dr = dress(6).unwrap();
        let id = leibniz_compose(&dr.g, &dr.g_inv);
        assert_eq!(id.tail(), Some(-6));
        assert!(id.sub(&PsdoOperator::one()).is_zero());
        assert_eq!(dr.v_of_w(1).unwrap(), Polynomial::w(1, 1).scale(&Rational::from(-1)));
        let (plus, _) = split(&dr.l);
        assert_eq!(plus, PsdoOperator::d_pow(1, None));
        assert_eq!(dr.l.tail(), Some(-5));
    }

    #[test]
    fn low_flows_are_consistent() {
        verify_g_flow_consistency(1, 4).unwrap();
        verify_g_flow_consistency(2, 4).unwrap();
    }

    #[test]
    fn undressed_commutator() {
        let c = PsdoOperator::d_pow(1, None).commutator(&t_operator(5));
        assert_eq!(c, PsdoOperator::one());
    }

    #[test]
    fn s_relations_small() {
        let cells = verify_s_relations(2, 4, 4).unwrap();
        assert!(!cells.is_empty());
    }
}
