use std::collections::BTreeMap;

use super::{Coframe, EtaWindow, GradedForm};
use crate::error::{Error, Result};
use crate::rings::{Generator, Polynomial};
use crate::weyl::{bracket, BasisIndex};

/// The Maurer–Cartan coboundaries `dη^c` restricted to wedge keys inside a
/// window, for every `c` that receives a contribution.
///
/// `dη^c = −Σ_{a<b} f^c_{ab} η^a ∧ η^b` where `[V_a, V_b] = Σ_c f^c_{ab} V_c`.
/// Each coefficient is exact; `c` itself may lie outside the window.
#[derive(Clone, Debug)]
pub struct Coboundary {
    window: EtaWindow,
    forms: BTreeMap<BasisIndex, GradedForm>,
}

impl Coboundary {
    pub fn new(window: EtaWindow) -> Self {
        let basis = window.indices();
        let mut forms: BTreeMap<BasisIndex, GradedForm> = BTreeMap::new();
        for (ia, a) in basis.iter().enumerate() {
            for b in &basis[ia + 1..] {
                for (c, f) in bracket(*a, *b).terms() {
                    forms
                        .entry(*c)
                        .or_insert_with(|| GradedForm::zero(2, Some(window)))
                        .add_term(vec![Coframe::Eta(*a), Coframe::Eta(*b)], &Polynomial::constant(-f));
                }
            }
        }
        Coboundary { window, forms }
    }

    pub fn window(&self) -> EtaWindow {
        self.window
    }

    /// `dη^c` on the window's keys.
    pub fn of(&self, c: BasisIndex) -> GradedForm {
        self.forms
            .get(&c)
            .cloned()
            .unwrap_or_else(|| GradedForm::zero(2, Some(self.window)))
    }

    /// Exterior derivative of `form`, certified on this coboundary's window.
    ///
    /// `d(a e^{K}) = da ∧ e^{K} + a d(e^{K})` with `da = Σ_g (∂a/∂g) rule(g)`
    /// and `d(dt_k) = 0`. The input must be exact on
    /// [`EtaWindow::coboundary_reach`] of the output window, and every rule
    /// form exact on the output window.
    pub fn exterior_d(
        &self,
        form: &GradedForm,
        rule: &dyn Fn(&Generator) -> Option<GradedForm>,
    ) -> Result<GradedForm> {
        let out_window = self.window;
        let reach = out_window.coboundary_reach();
        if let Some(w) = form.window() {
            if !w.covers(&reach) {
                return Err(Error::WindowExceeded(format!(
                    "input form is exact on ({w}) but ({reach}) is needed to certify ({out_window})"
                )));
            }
        }
        let mut out = GradedForm::zero(form.degree() + 1, Some(out_window));
        let mut rules: BTreeMap<Generator, GradedForm> = BTreeMap::new();
        for (key, coeff) in form.terms() {
            // da ∧ e^K survives only when K itself lies in the output window.
            let key_in_window = out_window.contains_key(key);
            for g in coeff.generators().into_iter().filter(|_| key_in_window) {
                if !rules.contains_key(&g) {
                    let r = rule(&g).ok_or_else(|| Error::MissingDifferentialRule(g.to_string()))?;
                    if let Some(w) = r.window() {
                        if !w.covers(&out_window) {
                            return Err(Error::WindowExceeded(format!(
                                "differential of {g} is exact on ({w}), narrower than ({out_window})"
                            )));
                        }
                    }
                    rules.insert(g, r);
                }
                let da = rules[&g].scale(&coeff.partial(&g));
                for (k1, c1) in da.terms() {
                    let mut k = k1.clone();
                    k.extend_from_slice(key);
                    out.add_term(k, c1);
                }
            }
            for (pos, factor) in key.iter().enumerate() {
                let Coframe::Eta(c) = factor else { continue };
                let sign = if pos % 2 == 0 { 1 } else { -1 };
                let rest_in_window = key
                    .iter()
                    .enumerate()
                    .all(|(i, f)| i == pos || out_window.contains_key(std::slice::from_ref(f)));
                if !rest_in_window {
                    continue;
                }
                let scaled = coeff.scale(&crate::rings::Rational::from(sign));
                for (k2, c2) in self.of(*c).terms() {
                    let mut k = key[..pos].to_vec();
                    k.extend_from_slice(k2);
                    k.extend_from_slice(&key[pos + 1..]);
                    out.add_term(k, &(&scaled * c2));
                }
            }
        }
        Ok(out)
    }
}

/// `dη^{q,i}` restricted to wedge keys inside `window`.
pub fn d_eta(q: u32, i: u32, window: EtaWindow) -> Result<GradedForm> {
    let idx = BasisIndex::new(q, i);
    if !window.contains(idx) {
        return Err(Error::WindowExceeded(format!(
            "eta({q},{i}) lies outside ({window})"
        )));
    }
    Ok(Coboundary::new(window).of(idx))
}

/// Exterior derivative of a form with a supplied coefficient differential,
/// certified on `out_window`.
pub fn exterior_d(
    form: &GradedForm,
    rule: &dyn Fn(&Generator) -> Option<GradedForm>,
    out_window: EtaWindow,
) -> Result<GradedForm> {
    Coboundary::new(out_window).exterior_d(form, rule)
}
