use super::{EtaWindow, GradedForm};
use crate::error::Result;
use crate::jets::{d_t, JetExpression, JetWindow};
use crate::rings::{Generator, Polynomial};

/// Lower-triangular Toeplitz matrix of 1-forms: entry `(row, col)` is
/// `band[row − col]` for `row ≥ col` and zero above the diagonal.
///
/// The row-vector convention `d p = p Ω` reads `d p_i = Σ_b p_b Ω_{b,i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionMatrix {
    bands: Vec<GradedForm>,
    window: Option<EtaWindow>,
}

impl ConnectionMatrix {
    pub fn from_bands(bands: Vec<GradedForm>, window: Option<EtaWindow>) -> Self {
        assert!(!bands.is_empty(), "empty connection matrix");
        ConnectionMatrix { bands, window }
    }

    pub fn size(&self) -> usize {
        self.bands.len()
    }

    pub fn band(&self, r: usize) -> &GradedForm {
        &self.bands[r]
    }

    pub fn entry(&self, row: usize, col: usize) -> GradedForm {
        if row >= col {
            self.bands[row - col].clone()
        } else {
            GradedForm::zero(1, self.window)
        }
    }

    /// `(Ω ∧ Ω)_{ik} = Σ_c Ω_{ic} ∧ Ω_{ck}`, computed entry by entry.
    pub fn wedge_square(&self) -> Vec<Vec<GradedForm>> {
        let n = self.size();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|k| {
                        let mut acc = GradedForm::zero(2, self.window);
                        for c in 0..n {
                            acc = acc.add(&self.entry(i, c).wedge(&self.entry(c, k)));
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    }

    pub fn map_entries(&self, f: impl Fn(&GradedForm) -> GradedForm) -> ConnectionMatrix {
        ConnectionMatrix {
            bands: self.bands.iter().map(f).collect(),
            window: self.window,
        }
    }
}

/// The heat-hierarchy connection: band `r ≥ 1` is `dt_r`, the diagonal vanishes.
pub fn build_omega(n: usize) -> ConnectionMatrix {
    assert!(n >= 2, "connection matrix needs n >= 2");
    let mut bands = vec![GradedForm::zero(1, None)];
    bands.extend((1..n).map(|r| GradedForm::dt(r as u32)));
    ConnectionMatrix::from_bands(bands, None)
}

/// The extended connection: band `r` is the 1-form `dt_r` of the extension.
pub(crate) fn hat_omega_from_bands(dt: &[GradedForm], n: usize, window: EtaWindow) -> ConnectionMatrix {
    assert!(dt.len() >= n, "extension covers only {} bands", dt.len());
    let bands = dt[..n].iter().map(|f| f.restrict(window)).collect();
    ConnectionMatrix::from_bands(bands, Some(window))
}

/// Residuals `d p_i − (p Ω)_i` for `i < n`, where `d p_i = Σ_k D_{t_k}(p_i) dt_k`
/// is compared on every `dt_k` that the truncated matrix can see
/// (`i + k ≤ n − 1`).
pub fn heat_linear_residuals(omega: &ConnectionMatrix) -> Result<Vec<GradedForm>> {
    let n = omega.size();
    let window = JetWindow::new(n as u32, n as u32);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut dp = GradedForm::zero(1, None);
        let pi = JetExpression::p(i as u32, window)?;
        for k in 1..(n - i) {
            let coeff = d_t(k as u32, &pi)?;
            dp = dp.add(&GradedForm::dt(k as u32).scale(coeff.poly()));
        }
        let mut p_omega = GradedForm::zero(1, None);
        for b in 0..n {
            p_omega = p_omega.add(&omega.entry(b, i).scale(&Polynomial::var(Generator::P(b as u32))));
        }
        out.push(dp.sub(&p_omega));
    }
    Ok(out)
}
