//! Differential forms over the coordinate coframe `{dt_k}` and the
//! Maurer–Cartan coframe `{η^{m,j}}` of the symmetry algebra.
//!
//! The η-coframe is infinite, so η-valued forms carry an [`EtaWindow`]: the
//! form's coefficient is exact on every wedge key whose η-factors all lie in
//! the window, and keys outside the window are simply not represented.

mod coboundary;
mod connection;
mod wave;

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::rings::{Polynomial, Rational};
use crate::weyl::BasisIndex;

pub use coboundary::{d_eta, exterior_d, Coboundary};
pub use connection::{build_omega, heat_linear_residuals, ConnectionMatrix};
pub use wave::{
    apply_constraint, build_hat_omega, example_0wave, flatness_table, solve_wave_extension,
    verify_flatness, verify_reduction, verify_resubstitution, ExtensionTable, FlatnessCell,
    WaveConstraint, WaveWindow,
};

/// A 1-form basis element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coframe {
    Dt(u32),
    Eta(BasisIndex),
}

impl Coframe {
    pub fn eta(m: u32, j: u32) -> Self {
        Coframe::Eta(BasisIndex::new(m, j))
    }
}

impl fmt::Display for Coframe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coframe::Dt(k) => write!(f, "dt{k}"),
            Coframe::Eta(i) => write!(f, "eta({},{})", i.m, i.j),
        }
    }
}

/// Bounds `m ≤ m_max`, `j ≤ j_max` on η-indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EtaWindow {
    pub m_max: u32,
    pub j_max: u32,
}

impl EtaWindow {
    pub const fn new(m_max: u32, j_max: u32) -> Self {
        EtaWindow { m_max, j_max }
    }

    pub fn contains(&self, idx: BasisIndex) -> bool {
        idx.m <= self.m_max && idx.j <= self.j_max
    }

    pub fn contains_key(&self, key: &[Coframe]) -> bool {
        key.iter().all(|c| match c {
            Coframe::Dt(_) => true,
            Coframe::Eta(i) => self.contains(*i),
        })
    }

    pub fn covers(&self, other: &EtaWindow) -> bool {
        self.m_max >= other.m_max && self.j_max >= other.j_max
    }

    pub fn intersect(&self, other: &EtaWindow) -> EtaWindow {
        EtaWindow::new(self.m_max.min(other.m_max), self.j_max.min(other.j_max))
    }

    /// Smallest input window whose coboundary contributions determine every
    /// key inside `self` exactly: the bracket of two indices in the window
    /// reaches at most `(2 m_max − 1, 2 j_max − 1)`.
    pub fn coboundary_reach(&self) -> EtaWindow {
        EtaWindow::new(
            (2 * self.m_max).saturating_sub(1).max(self.m_max),
            (2 * self.j_max).saturating_sub(1).max(self.j_max),
        )
    }

    /// Basis indices inside the window, ascending.
    pub fn indices(&self) -> Vec<BasisIndex> {
        let mut out = Vec::new();
        for m in 0..=self.m_max {
            for j in 0..=self.j_max {
                out.push(BasisIndex::new(m, j));
            }
        }
        out
    }
}

impl fmt::Display for EtaWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m<={}, j<={}", self.m_max, self.j_max)
    }
}

/// Sorts `key` in place and returns the sign of the permutation, or `None`
/// when a factor repeats (the wedge vanishes).
fn normalize_key(key: &mut [Coframe]) -> Option<i64> {
    let mut sign = 1;
    for i in 1..key.len() {
        let mut j = i;
        while j > 0 && key[j - 1] > key[j] {
            key.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if key.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

/// Homogeneous form of a fixed degree. Keys are strictly increasing factor
/// lists, so antisymmetry is normalized at construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedForm {
    degree: usize,
    terms: BTreeMap<Vec<Coframe>, Polynomial>,
    window: Option<EtaWindow>,
}

impl GradedForm {
    /// The zero form. `window: None` means the form is an exact finite sum.
    pub fn zero(degree: usize, window: Option<EtaWindow>) -> Self {
        GradedForm {
            degree,
            terms: BTreeMap::new(),
            window,
        }
    }

    pub fn basis(c: Coframe, window: Option<EtaWindow>) -> Self {
        let mut f = GradedForm::zero(1, window);
        f.add_term(vec![c], &Polynomial::one());
        f
    }

    pub fn dt(k: u32) -> Self {
        GradedForm::basis(Coframe::Dt(k), None)
    }

    pub fn eta(m: u32, j: u32, window: Option<EtaWindow>) -> Self {
        GradedForm::basis(Coframe::eta(m, j), window)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn window(&self) -> Option<EtaWindow> {
        self.window
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Coframe>, &Polynomial)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient on the (unsorted) key, with the permutation sign applied.
    pub fn coefficient(&self, key: &[Coframe]) -> Result<Polynomial> {
        let mut k = key.to_vec();
        if let Some(w) = self.window {
            if !w.contains_key(&k) {
                return Err(Error::WindowExceeded(format!(
                    "key {} lies outside the form's window ({w})",
                    key_string(&k)
                )));
            }
        }
        match normalize_key(&mut k) {
            None => Ok(Polynomial::zero()),
            Some(sign) => Ok(self
                .terms
                .get(&k)
                .map(|c| c.scale(&Rational::from(sign)))
                .unwrap_or_default()),
        }
    }

    /// Adds `coeff · e^{key}` for an arbitrary factor order. Keys outside the
    /// window are dropped: they are not part of what the form certifies.
    pub fn add_term(&mut self, mut key: Vec<Coframe>, coeff: &Polynomial) {
        assert_eq!(key.len(), self.degree, "key degree mismatch");
        if coeff.is_zero() {
            return;
        }
        if let Some(w) = self.window {
            if !w.contains_key(&key) {
                return;
            }
        }
        let Some(sign) = normalize_key(&mut key) else { return };
        let signed = if sign < 0 { -coeff } else { coeff.clone() };
        let slot = self.terms.entry(key.clone()).or_default();
        slot.add_assign_ref(&signed);
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    fn joint_window(&self, other: &GradedForm) -> Option<EtaWindow> {
        match (self.window, other.window) {
            (None, w) | (w, None) => w,
            (Some(a), Some(b)) => Some(a.intersect(&b)),
        }
    }

    pub fn add(&self, other: &GradedForm) -> GradedForm {
        assert_eq!(self.degree, other.degree, "degree mismatch");
        let mut out = GradedForm::zero(self.degree, self.joint_window(other));
        for (k, c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(k.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &GradedForm) -> GradedForm {
        self.add(&other.scale(&Polynomial::int(-1)))
    }

    /// Multiplies every coefficient by a function.
    pub fn scale(&self, c: &Polynomial) -> GradedForm {
        let mut out = GradedForm::zero(self.degree, self.window);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), &(v * c));
        }
        out
    }

    pub fn wedge(&self, other: &GradedForm) -> GradedForm {
        let mut out = GradedForm::zero(self.degree + other.degree, self.joint_window(other));
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let mut key = ka.clone();
                key.extend_from_slice(kb);
                out.add_term(key, &(ca * cb));
            }
        }
        out
    }

    /// Drops keys outside `window` and narrows the certificate accordingly.
    pub fn restrict(&self, window: EtaWindow) -> GradedForm {
        let w = match self.window {
            Some(own) => own.intersect(&window),
            None => window,
        };
        let mut out = GradedForm::zero(self.degree, Some(w));
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c);
        }
        out
    }

    /// Replaces each 1-form basis element by the given 1-form (degree 1 only).
    pub fn substitute_basis(
        &self,
        rule: impl Fn(&Coframe) -> GradedForm,
        window: Option<EtaWindow>,
    ) -> GradedForm {
        assert_eq!(self.degree, 1, "basis substitution is defined on 1-forms");
        let mut out = GradedForm::zero(1, window);
        for (k, c) in &self.terms {
            out = out.add(&rule(&k[0]).scale(c));
        }
        out.window = window;
        out
    }

    pub fn map_coefficients(&self, f: impl Fn(&Polynomial) -> Result<Polynomial>) -> Result<GradedForm> {
        let mut out = GradedForm::zero(self.degree, self.window);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), &f(c)?);
        }
        Ok(out)
    }

    pub fn with_window(mut self, window: Option<EtaWindow>) -> GradedForm {
        self.window = window;
        self
    }
}

pub fn key_string(key: &[Coframe]) -> String {
    key.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("^")
}

impl fmt::Display for GradedForm {
    /// `eta(0,0) + t1*eta(1,0) + (t1^2+2*t2)*eta(2,0)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (key, c)) in self.terms.iter().enumerate() {
            let key = key_string(key);
            let (neg, body) = match c.as_constant() {
                Some(q) => {
                    let neg = q.is_negative();
                    let mag = q.abs();
                    if mag.is_one() {
                        (neg, key)
                    } else {
                        (neg, format!("{mag}*{key}"))
                    }
                }
                None if c.is_monomial() => {
                    let (m, q) = c.terms().next().expect("one term");
                    let neg = q.is_negative();
                    let mag = Polynomial::term(q.abs(), m.clone());
                    (neg, format!("{mag}*{key}"))
                }
                None => (false, format!("({c})*{key}")),
            };
            match (i, neg) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_antisymmetry() {
        let a = GradedForm::eta(1, 0, None);
        let b = GradedForm::eta(0, 1, None);
        let ab = a.wedge(&b);
        let ba = b.wedge(&a);
        assert_eq!(ab, ba.scale(&Polynomial::int(-1)));
        assert!(a.wedge(&a).is_zero());
        assert_eq!(
            ab.coefficient(&[Coframe::eta(1, 0), Coframe::eta(0, 1)]).unwrap(),
            Polynomial::one()
        );
        assert_eq!(
            ab.coefficient(&[Coframe::eta(0, 1), Coframe::eta(1, 0)]).unwrap(),
            Polynomial::int(-1)
        );
    }

    #[test]
    fn self_wedge_with_commuting_coefficients_is_computed() {
        let f = GradedForm::eta(0, 1, None)
            .scale(&Polynomial::t(1))
            .add(&GradedForm::eta(2, 0, None).scale(&Polynomial::t(2)));
        assert!(f.wedge(&f).is_zero());
    }

    #[test]
    fn window_drops_outside_keys() {
        let w = EtaWindow::new(1, 1);
        let f = GradedForm::eta(2, 0, Some(w));
        assert!(f.is_zero());
        assert!(f.coefficient(&[Coframe::eta(2, 0)]).is_err());
    }

    #[test]
    fn text_form() {
        let f = GradedForm::eta(0, 0, None)
            .add(&GradedForm::eta(1, 0, None).scale(&Polynomial::t(1)))
            .sub(&GradedForm::dt(3).scale(&Polynomial::int(2)));
        assert_eq!(f.to_string(), "-2*dt3 + eta(0,0) + t1*eta(1,0)");
    }
}
