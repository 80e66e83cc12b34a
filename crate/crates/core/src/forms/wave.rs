//! The wave-function extension: expressing each `dt_k` through the
//! Maurer–Cartan coframe of the symmetry algebra.
//!
//! From `w Σ_k dt_k z^k = Σ_{m,j} z^j (d/dz)^m(w) η^{m,j}` one reads off
//! `dt_k = Σ_{m,j≤k} [z^{k−j}] B_m · η^{m,j}` with `B_m = e^{−ξ} (d/dz)^m e^{ξ}`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::connection::hat_omega_from_bands;
use super::{Coboundary, Coframe, ConnectionMatrix, EtaWindow, GradedForm};
use crate::error::{Error, Result};
use crate::rings::{bell_sequence, binomial, xi_derivative, Generator, Polynomial, ZSeries};
use crate::weyl::BasisIndex;

/// Truncation of the extension: `η^{m,j}` with `m ≤ m_max`, `dt_k` with
/// `k ≤ k_max`, and times `t_1 … t_tmax`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WaveWindow {
    pub m_max: u32,
    pub k_max: u32,
    pub tmax: u32,
}

impl WaveWindow {
    /// The smallest time range that keeps every coefficient exact.
    pub fn new(m_max: u32, k_max: u32) -> Self {
        WaveWindow {
            m_max,
            k_max,
            tmax: m_max + k_max,
        }
    }

    pub fn with_tmax(mut self, tmax: u32) -> Self {
        self.tmax = tmax;
        self
    }

    pub fn eta_window(&self) -> EtaWindow {
        EtaWindow::new(self.m_max, self.k_max)
    }
}

impl fmt::Display for WaveWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M={}, K={}, N={}", self.m_max, self.k_max, self.tmax)
    }
}

/// The solved 1-forms `dt_0 … dt_K`, each exact on the η-window `(M, K)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionTable {
    window: WaveWindow,
    dt: Vec<GradedForm>,
}

impl ExtensionTable {
    pub fn window(&self) -> WaveWindow {
        self.window
    }

    pub fn eta_window(&self) -> EtaWindow {
        self.window.eta_window()
    }

    pub fn dt(&self, k: u32) -> Option<&GradedForm> {
        self.dt.get(k as usize)
    }

    pub fn forms(&self) -> &[GradedForm] {
        &self.dt
    }

    /// `T^k_{m,j}`, the coefficient of `η^{m,j}` in `dt_k`.
    pub fn entry(&self, k: u32, m: u32, j: u32) -> Result<Polynomial> {
        let f = self.dt(k).ok_or_else(|| {
            Error::WindowExceeded(format!("dt{k} lies past K={}", self.window.k_max))
        })?;
        f.coefficient(&[Coframe::eta(m, j)])
    }

    /// Differential rule for the coefficient ring: `t_ℓ ↦ dt_ℓ` for `ℓ ≤ K`.
    pub fn rule(&self, g: &Generator) -> Option<GradedForm> {
        match g {
            Generator::T(l) => self.dt(*l).cloned(),
            _ => None,
        }
    }
}

impl fmt::Display for ExtensionTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, form) in self.dt.iter().enumerate() {
            writeln!(f, "dt{k} = {form}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct WireTerm {
    eta: [u32; 2],
    coef: Polynomial,
}

#[derive(Serialize, Deserialize)]
struct WireForm {
    k: u32,
    terms: Vec<WireTerm>,
}

#[derive(Serialize, Deserialize)]
struct WireTable {
    window: WaveWindow,
    dt: Vec<WireForm>,
}

impl Serialize for ExtensionTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let dt = self
            .dt
            .iter()
            .enumerate()
            .map(|(k, f)| WireForm {
                k: k as u32,
                terms: f
                    .terms()
                    .filter_map(|(key, c)| match key[0] {
                        Coframe::Eta(i) => Some(WireTerm { eta: [i.m, i.j], coef: c.clone() }),
                        Coframe::Dt(_) => None,
                    })
                    .collect(),
            })
            .collect();
        WireTable { window: self.window, dt }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExtensionTable {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = WireTable::deserialize(d)?;
        let eta = wire.window.eta_window();
        if wire.dt.len() != wire.window.k_max as usize + 1 {
            return Err(D::Error::custom("dt list does not match k_max"));
        }
        let mut dt = Vec::with_capacity(wire.dt.len());
        for (pos, form) in wire.dt.into_iter().enumerate() {
            if form.k as usize != pos {
                return Err(D::Error::custom(format!("dt{} out of order", form.k)));
            }
            let mut out = GradedForm::zero(1, Some(eta));
            for t in form.terms {
                let idx = BasisIndex::new(t.eta[0], t.eta[1]);
                if !eta.contains(idx) || t.coef.is_zero() {
                    return Err(D::Error::custom(format!("bad term on eta{idx}")));
                }
                out.add_term(vec![Coframe::Eta(idx)], &t.coef);
            }
            dt.push(out);
        }
        Ok(ExtensionTable { window: wire.window, dt })
    }
}

/// Solves for `dt_0 … dt_K` on the window.
pub fn solve_wave_extension(window: WaveWindow) -> Result<ExtensionTable> {
    let needed = window.m_max + window.k_max;
    if window.tmax < needed {
        return Err(Error::WindowExceeded(format!(
            "times up to t{needed} enter the extension but only t{} are available",
            window.tmax
        )));
    }
    let bell = bell_sequence(window.tmax, window.m_max, window.k_max as usize)?;
    let eta = window.eta_window();
    let dt = (0..=window.k_max)
        .into_par_iter()
        .map(|k| -> Result<GradedForm> {
            let mut form = GradedForm::zero(1, Some(eta));
            for (m, b) in bell.iter().enumerate() {
                for j in 0..=k {
                    let c = b.coeff((k - j) as usize)?;
                    form.add_term(vec![Coframe::eta(m as u32, j)], &c);
                }
            }
            Ok(form)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExtensionTable { window, dt })
}

/// An extension wide enough to check flatness on the η-window `(M, K)`.
pub fn flatness_table(window: EtaWindow) -> Result<ExtensionTable> {
    let reach = window.coboundary_reach();
    let k_max = reach.j_max.max(window.m_max + window.j_max);
    solve_wave_extension(WaveWindow::new(reach.m_max, k_max))
}

/// One coefficient of `d(dt_k)` on the key `η^a ∧ η^b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatnessCell {
    pub k: u32,
    pub key: (BasisIndex, BasisIndex),
    pub residual: Polynomial,
}

/// Checks `d(dt_k) = 0` for `k ≤ K` on every key of the η-window `(M, K)`.
pub fn verify_flatness(ext: &ExtensionTable, window: EtaWindow) -> Result<Vec<FlatnessCell>> {
    if ext.window.k_max < window.j_max {
        return Err(Error::WindowExceeded(format!(
            "dt{} is needed but the extension stops at dt{}",
            window.j_max, ext.window.k_max
        )));
    }
    let cob = Coboundary::new(window);
    let rule = |g: &Generator| ext.rule(g);
    let indices = window.indices();
    let per_k = (0..=window.j_max)
        .into_par_iter()
        .map(|k| -> Result<Vec<FlatnessCell>> {
            let d = cob.exterior_d(&ext.dt[k as usize], &rule)?;
            let mut cells = Vec::new();
            for (ia, a) in indices.iter().enumerate() {
                for b in &indices[ia + 1..] {
                    let residual = d.coefficient(&[Coframe::Eta(*a), Coframe::Eta(*b)])?;
                    cells.push(FlatnessCell { k, key: (*a, *b), residual });
                }
            }
            Ok(cells)
        })
        .collect::<Result<Vec<_>>>()?;
    let cells: Vec<FlatnessCell> = per_k.into_iter().flatten().collect();
    if let Some(bad) = cells.iter().find(|c| !c.residual.is_zero()) {
        return Err(Error::NonzeroResidual {
            location: format!("d(dt{}) on eta{}^eta{}", bad.k, bad.key.0, bad.key.1),
            residual: bad.residual.to_string(),
        });
    }
    Ok(cells)
}

/// Re-derives every entry from the Bell recurrence
/// `B_{m+1} = Σ_i C(m,i) ξ^{(i+1)} B_{m−i}` and compares coefficientwise.
/// Matching z-powers is triangular in `k`, so agreement means the table is
/// the unique solution on its window.
pub fn verify_resubstitution(ext: &ExtensionTable) -> Result<()> {
    let w = ext.window;
    let z = w.k_max as usize;
    let derivs = (1..=w.m_max)
        .map(|r| xi_derivative(w.tmax, r, z))
        .collect::<Result<Vec<_>>>()?;
    let mut bell: Vec<ZSeries> = vec![ZSeries::one()];
    for m in 0..w.m_max {
        let mut next = ZSeries::constant(Polynomial::zero());
        for i in 0..=m {
            let term = derivs[i as usize].mul(&bell[(m - i) as usize]);
            let c = binomial(i64::from(m), i);
            next = next.add(&ZSeries::from_coeffs(
                term.coeffs().iter().map(|p| p.scale(&c)).collect(),
                term.is_complete(),
            ));
        }
        bell.push(next.truncate(z));
    }
    for k in 0..=w.k_max {
        for (m, b) in bell.iter().enumerate() {
            for j in 0..=w.k_max {
                let expect = if j <= k { b.coeff((k - j) as usize)? } else { Polynomial::zero() };
                let got = ext.entry(k, m as u32, j)?;
                if got != expect {
                    return Err(Error::NonzeroResidual {
                        location: format!("dt{k} on eta({m},{j})"),
                        residual: (&got - &expect).to_string(),
                    });
                }
            }
        }
    }
    Ok(())
}

/// The extended connection: band `r` is `dt_r` of the extension.
pub fn build_hat_omega(ext: &ExtensionTable, n: usize) -> Result<ConnectionMatrix> {
    if n > ext.dt.len() {
        return Err(Error::WindowExceeded(format!(
            "{n} bands requested but the extension has {}",
            ext.dt.len()
        )));
    }
    Ok(hat_omega_from_bands(&ext.dt, n, ext.eta_window()))
}

/// Sets `η^{m,j} = 0` for `m ≥ 1` and `η^{0,0} = 0`; `dt` factors are kept.
pub fn apply_constraint(form: &GradedForm) -> GradedForm {
    let mut out = GradedForm::zero(form.degree(), form.window());
    for (key, c) in form.terms() {
        let killed = key.iter().any(|f| match f {
            Coframe::Eta(i) => i.m >= 1 || (i.m == 0 && i.j == 0),
            Coframe::Dt(_) => false,
        });
        if !killed {
            out.add_term(key.clone(), c);
        }
    }
    out
}

/// Checks that the constrained extended connection of size `n` equals the
/// heat connection under `dt_k ↦ η^{0,k}`.
pub fn verify_reduction(ext: &ExtensionTable, n: usize) -> Result<()> {
    let hat = build_hat_omega(ext, n)?;
    let eta = ext.eta_window();
    let omega = super::build_omega(n);
    for r in 0..n {
        let lhs = apply_constraint(hat.band(r));
        let rhs = omega.band(r).substitute_basis(
            |c| match c {
                Coframe::Dt(k) => GradedForm::eta(0, *k, Some(eta)),
                Coframe::Eta(_) => GradedForm::basis(*c, Some(eta)),
            },
            Some(eta),
        );
        let diff = lhs.sub(&rhs);
        if !diff.is_zero() {
            return Err(Error::NonzeroResidual {
                location: format!("band {r}"),
                residual: diff.to_string(),
            });
        }
    }
    Ok(())
}

/// A constraint `form = 0` read off the coefficient of `z^power`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WaveConstraint {
    pub power: u32,
    pub form: GradedForm,
}

/// Restricts the wave function to `ξ = t_1 z + t_2 z²` and reads the
/// coefficients of `(du − Σ_{j=1}^{n} p_j dt_j)/u` in `z` through `z^n`.
/// Returns the nonvanishing constraints.
pub fn example_0wave(n: u32) -> Vec<WaveConstraint> {
    let len = n as usize + 1;
    let mut xi = vec![Polynomial::zero(); len];
    for (s, t) in [(1usize, 1u32), (2, 2)] {
        if s < len {
            xi[s] = Polynomial::t(t);
        }
    }
    let xi_t: Vec<Vec<Polynomial>> = (1..=2)
        .map(|k| xi.iter().map(|c| c.partial(&Generator::T(k))).collect())
        .collect();
    // p_j / u = q_j with q_0 = 1, q_{j+1} = ∂_{t_1} q_j + ξ_{t_1} q_j.
    let mut q = vec![Polynomial::zero(); len];
    q[0] = Polynomial::one();
    let mut qs = vec![q.clone()];
    for _ in 0..n {
        let mut next: Vec<Polynomial> = q.iter().map(|c| c.partial(&Generator::T(1))).collect();
        for (a, xa) in xi_t[0].iter().enumerate() {
            for (b, qb) in q.iter().enumerate() {
                if a + b < len && !xa.is_zero() && !qb.is_zero() {
                    next[a + b].add_assign_ref(&(xa * qb));
                }
            }
        }
        qs.push(next.clone());
        q = next;
    }
    let mut out = Vec::new();
    for s in 0..len {
        let mut form = GradedForm::zero(1, None);
        for (k, col) in xi_t.iter().enumerate() {
            form = form.add(&GradedForm::dt(k as u32 + 1).scale(&col[s]));
        }
        for (j, qj) in qs.iter().enumerate().skip(1) {
            form = form.sub(&GradedForm::dt(j as u32).scale(&qj[s]));
        }
        if !form.is_zero() {
            out.push(WaveConstraint { power: s as u32, form });
        }
    }
    out
}
