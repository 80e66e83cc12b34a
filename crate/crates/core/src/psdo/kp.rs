use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::operator::{leibniz_compose, split, x_derivative, PsdoOperator};
use crate::error::{Error, Result};
use crate::forms::{Coframe, GradedForm};
use crate::rings::{missing, Generator, Polynomial};

/// `L = ∂ + Σ_{a=1}^{depth} v^a ∂^{−a}`, certified through `∂^{−depth}`.
pub fn lax_operator(depth: u32) -> PsdoOperator {
    let d = i64::from(depth);
    let orders = std::iter::once((1, Polynomial::one()))
        .chain((1..=depth).map(|a| (-i64::from(a), Polynomial::v(a, 0))));
    PsdoOperator::from_orders(orders, Some(-d))
}

/// `L^j`, certified through `∂^{−depth+j−1}`.
pub fn l_power(j: u32, depth: u32) -> Result<PsdoOperator> {
    if j == 0 {
        return Err(Error::InvalidArgument("L_power needs j >= 1".into()));
    }
    Ok(lax_operator(depth).pow(j))
}

/// `(L^j)_+`, which must be fully certified.
pub fn l_power_plus(j: u32, depth: u32) -> Result<PsdoOperator> {
    let lj = l_power(j, depth)?;
    let (plus, _) = split(&lj);
    if let Some(t) = plus.tail() {
        return Err(Error::DepthExhausted { order: 0, tail: t });
    }
    Ok(plus)
}

/// The flow `∂_{t_j} v^a = F_{j,a}` for every `a` the depth certifies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowTable {
    j: u32,
    equations: BTreeMap<u32, Polynomial>,
}

impl FlowTable {
    pub fn new(j: u32, equations: BTreeMap<u32, Polynomial>) -> Self {
        FlowTable { j, equations }
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    pub fn equations(&self) -> impl Iterator<Item = (&u32, &Polynomial)> {
        self.equations.iter()
    }

    pub fn rhs(&self, a: u32) -> Option<&Polynomial> {
        self.equations.get(&a)
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }
}

/// Reads `∂_{t_j} L = [(L^j)_+, L]` coefficient by coefficient.
///
/// The bracket's orders `≥ 0` are checked to vanish.
pub fn kp_flows(j: u32, depth: u32) -> Result<FlowTable> {
    let plus = l_power_plus(j, depth)?;
    let l = lax_operator(depth);
    let br = plus.commutator(&l);
    if let Some((a, _)) = br.orders().rev().find(|(a, _)| **a >= 0) {
        return Err(Error::NonIntegralBracket(*a));
    }
    let floor = br.tail().unwrap_or(i64::MIN);
    let mut equations = BTreeMap::new();
    for a in 1..=depth {
        let order = -i64::from(a);
        if order < floor {
            break;
        }
        equations.insert(a, br.coefficient(order)?);
    }
    Ok(FlowTable { j, equations })
}

/// `∂_x^n` of a coefficient.
pub fn x_derivative_n(p: &Polynomial, n: u32) -> Polynomial {
    (0..n).fold(p.clone(), |acc, _| x_derivative(&acc))
}

/// `∂_{t_j}` of a differential polynomial in the `v`'s, with the prolonged
/// flows `∂_{t_j} v^a_(r) = ∂_x^r F_{j,a}`.
pub fn t_derivative(p: &Polynomial, flows: &FlowTable) -> Result<Polynomial> {
    let mut cache: BTreeMap<Generator, Polynomial> = BTreeMap::new();
    p.derive(|g| {
        if let Some(c) = cache.get(g) {
            return Ok(Some(c.clone()));
        }
        let Generator::V { a, r } = *g else {
            return Err(missing(g));
        };
        let rhs = flows.rhs(a).ok_or_else(|| missing(g))?;
        let out = x_derivative_n(rhs, r);
        cache.insert(*g, out.clone());
        Ok(Some(out))
    })
}

/// `∂_{t_j}(L^k)_+ − ∂_{t_k}(L^j)_+ − [(L^j)_+, (L^k)_+]`.
pub fn zero_curvature_residual(j: u32, k: u32, depth: u32) -> Result<PsdoOperator> {
    let pj = l_power_plus(j, depth)?;
    let pk = l_power_plus(k, depth)?;
    let fj = kp_flows(j, depth)?;
    let fk = kp_flows(k, depth)?;
    let dj_pk = pk.map_coefficients(|_, c| t_derivative(c, &fj))?;
    let dk_pj = pj.map_coefficients(|_, c| t_derivative(c, &fk))?;
    Ok(dj_pk.sub(&dk_pj).sub(&pj.commutator(&pk)))
}

/// Like [`zero_curvature_residual`] but fails on the first nonzero order.
pub fn verify_zero_curvature(j: u32, k: u32, depth: u32) -> Result<PsdoOperator> {
    let res = zero_curvature_residual(j, k, depth)?;
    if let Some((a, c)) = res.orders().next_back() {
        return Err(Error::NonzeroResidual {
            location: format!("zero curvature ({j},{k}) at order {a}"),
            residual: c.to_string(),
        });
    }
    Ok(res)
}

/// The connection `φ` of the transformed linear system `d p̃ = p̃ φ` with
/// `p̃_i = ∂^i ψ` and `∂_{t_j} ψ = (L^j)_+ ψ` for `j ≤ j_max`:
/// `φ_{b,i} = Σ_j [∂^b](∂^i ∘ (L^j)_+) dt_j`.
#[derive(Clone, Debug)]
pub struct PhiConnection {
    n: usize,
    j_max: u32,
    depth: u32,
    plus: Vec<PsdoOperator>,
}

impl PhiConnection {
    pub fn size(&self) -> usize {
        self.n
    }

    /// Entry `(b, i)`; rows run past `n` because `∂^i (L^j)_+` reaches `∂^{i+j}`.
    pub fn entry(&self, b: usize, i: usize) -> GradedForm {
        let di = PsdoOperator::d_pow(i as i64, None);
        let mut out = GradedForm::zero(1, None);
        for (jj, plus) in self.plus.iter().enumerate() {
            let c = leibniz_compose(&di, plus)
                .coefficient(b as i64)
                .expect("differential operators are exact");
            out = out.add(&GradedForm::dt(jj as u32 + 1).scale(&c));
        }
        out
    }

    /// Highest row that can be nonzero in column `i`.
    pub fn row_reach(&self, i: usize) -> usize {
        i + self.j_max as usize
    }

    /// `(dφ + φ∧φ)_{b,i}` for every column `i < n` and every row it reaches.
    /// `d` acts on coefficients through the KP flows.
    pub fn flatness_residuals(&self) -> Result<Vec<((usize, usize), GradedForm)>> {
        let flows = (1..=self.j_max)
            .map(|k| kp_flows(k, self.depth))
            .collect::<Result<Vec<_>>>()?;
        let cells: Vec<(usize, usize)> = (0..self.n)
            .flat_map(|i| (0..=self.row_reach(i)).map(move |b| (b, i)))
            .collect();
        cells
            .into_par_iter()
            .map(|(b, i)| {
                let e = self.entry(b, i);
                let mut d = GradedForm::zero(2, None);
                for (key, c) in e.terms() {
                    for (k, fk) in flows.iter().enumerate() {
                        let dc = t_derivative(c, fk)?;
                        let mut form = GradedForm::zero(2, None);
                        form.add_term(vec![Coframe::Dt(k as u32 + 1), key[0]], &dc);
                        d = d.add(&form);
                    }
                }
                let mut sq = GradedForm::zero(2, None);
                for c in 0..=self.row_reach(i) {
                    sq = sq.add(&self.entry(b, c).wedge(&self.entry(c, i)));
                }
                Ok(((b, i), d.add(&sq)))
            })
            .collect()
    }
}

pub fn build_phi(n: usize, j_max: u32, depth: u32) -> Result<PhiConnection> {
    let plus = (1..=j_max)
        .map(|j| l_power_plus(j, depth))
        .collect::<Result<Vec<_>>>()?;
    Ok(PhiConnection { n, j_max, depth, plus })
}

#[derive(Serialize, Deserialize)]
struct WireEquation {
    a: u32,
    rhs: Polynomial,
}

#[derive(Serialize, Deserialize)]
struct WireFlows {
    j: u32,
    equations: Vec<WireEquation>,
}

impl Serialize for FlowTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WireFlows {
            j: self.j,
            equations: self
                .equations
                .iter()
                .map(|(a, rhs)| WireEquation { a: *a, rhs: rhs.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FlowTable {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = WireFlows::deserialize(d)?;
        let mut equations = BTreeMap::new();
        for e in wire.equations {
            if equations.insert(e.a, e.rhs).is_some() {
                return Err(D::Error::custom(format!("equation for v{} repeated", e.a)));
            }
        }
        Ok(FlowTable { j: wire.j, equations })
    }
}
