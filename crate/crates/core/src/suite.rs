//! Named verification suites. Each suite enumerates its cases in sorted
//! order, runs them in parallel, and records every residual or error in the
//! report instead of stopping at the first one.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{
    apply_constraint, build_hat_omega, flatness_table, solve_wave_extension, verify_flatness,
    verify_reduction, verify_resubstitution, Coframe, EtaWindow, GradedForm, WaveWindow,
};
use crate::jets::{d_t, verify_symmetry, JetExpression, JetWindow};
use crate::psdo::{
    dress, leibniz_compose, verify_g_flow_consistency, verify_s_relations, zero_curvature_residual,
    PsdoOperator,
};
use crate::rings::Polynomial;
use crate::weyl::{basis_within, bracket, BasisIndex, StructureTable, WeylElement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SuiteName {
    HeatCompat,
    Symmetry,
    Structure,
    ExtendedFlatness,
    Reduction,
    ZeroCurvature,
    Dressing,
}

impl SuiteName {
    pub const ALL: [SuiteName; 7] = [
        SuiteName::HeatCompat,
        SuiteName::Symmetry,
        SuiteName::Structure,
        SuiteName::ExtendedFlatness,
        SuiteName::Reduction,
        SuiteName::ZeroCurvature,
        SuiteName::Dressing,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SuiteName::HeatCompat => "heat-compat",
            SuiteName::Symmetry => "symmetry",
            SuiteName::Structure => "structure",
            SuiteName::ExtendedFlatness => "extended-flatness",
            SuiteName::Reduction => "reduction",
            SuiteName::ZeroCurvature => "zero-curvature",
            SuiteName::Dressing => "dressing",
        }
    }
}

impl FromStr for SuiteName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite '{s}'")))
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Truncation orders shared by the suites.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteWindow {
    /// Highest 𝒯-degree `M`.
    pub m_max: u32,
    /// Highest z/j-index `K`.
    pub k_max: u32,
    /// Highest time index `N`.
    pub tmax: u32,
    /// Highest jet order `P`.
    pub jetmax: u32,
    /// PsDO tail depth.
    pub depth: u32,
    /// Flow pair for the zero-curvature suite; all of (2,3), (2,4), (3,4) when unset.
    pub pair: Option<(u32, u32)>,
    /// Highest flow index in the dressing suite.
    pub imax: u32,
}

impl Default for SuiteWindow {
    fn default() -> Self {
        SuiteWindow {
            m_max: 2,
            k_max: 3,
            tmax: 6,
            jetmax: 8,
            depth: 6,
            pair: None,
            imax: 2,
        }
    }
}

/// One failed check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub location: String,
    pub coefficient: String,
    /// Exit code the failure maps to: 1 for a residual, 3 for an exhausted
    /// window or depth, 2 for invalid arguments.
    pub code: i32,
}

impl Failure {
    fn from_error(case: &str, e: &Error) -> Failure {
        match e {
            Error::NonzeroResidual { location, residual } => Failure {
                location: format!("{case}: {location}"),
                coefficient: residual.clone(),
                code: 1,
            },
            other => Failure {
                location: case.to_string(),
                coefficient: other.to_string(),
                code: other.exit_code(),
            },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases_run: usize,
    pub failures: Vec<Failure>,
    /// Wall time is diagnostic only; it is neither serialized nor compared,
    /// which keeps reports byte-identical across runs.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl PartialEq for SuiteReport {
    fn eq(&self, other: &Self) -> bool {
        self.suite == other.suite && self.cases_run == other.cases_run && self.failures == other.failures
    }
}

impl Eq for SuiteReport {}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// 0 when every case passed; otherwise the most severe failure code,
    /// with residuals (1) taking precedence over exhausted windows (3).
    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            0
        } else if self.failures.iter().any(|f| f.code == 1) {
            1
        } else {
            self.failures.iter().map(|f| f.code).max().unwrap_or(1)
        }
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "suite {}: {} cases, {} failures",
            self.suite,
            self.cases_run,
            self.failures.len()
        )?;
        for fail in &self.failures {
            writeln!(f, "FAIL {}: {}", fail.location, fail.coefficient)?;
        }
        Ok(())
    }
}

/// A named check. Cases are sorted by `key` before running.
struct Case {
    key: String,
    run: Box<dyn Fn() -> Result<Vec<(String, Polynomial)>> + Send + Sync>,
}

fn case(key: String, run: impl Fn() -> Result<Vec<(String, Polynomial)>> + Send + Sync + 'static) -> Case {
    Case { key, run: Box::new(run) }
}

fn zero_check(location: String, value: Polynomial) -> Vec<(String, Polynomial)> {
    vec![(location, value)]
}

fn form_cells(label: &str, f: &GradedForm) -> Vec<(String, Polynomial)> {
    f.terms()
        .map(|(k, c)| (format!("{label} on {}", crate::forms::key_string(k)), c.clone()))
        .collect()
}

fn operator_cells(label: &str, op: &PsdoOperator) -> Vec<(String, Polynomial)> {
    op.orders()
        .rev()
        .map(|(a, c)| (format!("{label} at order {a}"), c.clone()))
        .collect()
}

fn weyl_cells(label: &str, e: &WeylElement) -> Vec<(String, Polynomial)> {
    e.terms()
        .map(|(i, q)| (format!("{label} on V{i}"), Polynomial::constant(q.clone())))
        .collect()
}

fn heat_compat_cases(w: &SuiteWindow) -> Vec<Case> {
    let window = JetWindow::new(w.tmax, w.jetmax);
    let mut out = Vec::new();
    for i in 1..=w.jetmax {
        for j in 1..=w.jetmax - i {
            out.push(case(format!("d_t{i} d_t{j} p0"), move || {
                let p0 = JetExpression::p(0, window)?;
                let lhs = d_t(i, &d_t(j, &p0)?)?;
                let rhs = JetExpression::p(i + j, window)?;
                Ok(zero_check("residual".into(), lhs.sub(&rhs).into_poly()))
            }));
        }
    }
    out
}

fn symmetry_cases(w: &SuiteWindow) -> Vec<Case> {
    let tmax = w.tmax;
    let mut out = Vec::new();
    for i in 1..=tmax.min(4) {
        for m in 0..=3u32 {
            for j in 0..=(3 - m) {
                out.push(case(format!("i={i} V({m},{j})"), move || {
                    let window = JetWindow::certifying_symmetry(tmax, i, m, j);
                    let cases = verify_symmetry(i, m, j, window)?;
                    Ok(cases
                        .into_iter()
                        .map(|c| (format!("on {}", c.input), c.residual.into_poly()))
                        .collect())
                }));
            }
        }
    }
    out
}

fn structure_cases(w: &SuiteWindow) -> Vec<Case> {
    let bound = (w.m_max + w.k_max).max(1);
    let jacobi_bound = bound.min(4);
    let mut out = vec![case(format!("table bound {bound}"), move || {
        let table = StructureTable::new(bound);
        let mut cells = Vec::new();
        for ((a, b), e) in table.entries() {
            let direct = WeylElement::basis(a.m, a.j)
                .commutator(&WeylElement::basis(b.m, b.j))
                .scale(&(-crate::rings::Rational::one()));
            cells.extend(weyl_cells(&format!("[V{a},V{b}] + commutator"), &e.sub(&direct)));
            let anti = table.get(*b, *a).cloned().unwrap_or_else(WeylElement::zero);
            cells.extend(weyl_cells(&format!("[V{a},V{b}] antisymmetry"), &e.add(&anti)));
        }
        Ok(cells)
    })];
    let basis = basis_within(jacobi_bound);
    for (ia, a) in basis.iter().enumerate() {
        let (a, rest) = (*a, basis[ia + 1..].to_vec());
        out.push(case(format!("jacobi from V{a}"), move || {
            let br = |x: &WeylElement, y: &WeylElement| bracket_extended(x, y);
            let mut cells = Vec::new();
            for (ib, b) in rest.iter().enumerate() {
                for c in &rest[ib + 1..] {
                    let (ea, eb, ec) = (single(a), single(*b), single(*c));
                    let j = br(&br(&ea, &eb), &ec)
                        .add(&br(&br(&eb, &ec), &ea))
                        .add(&br(&br(&ec, &ea), &eb));
                    cells.extend(weyl_cells(&format!("jacobi V{a},V{b},V{c}"), &j));
                }
            }
            Ok(cells)
        }));
    }
    out
}

fn single(i: BasisIndex) -> WeylElement {
    WeylElement::basis(i.m, i.j)
}

/// The symmetry-algebra bracket extended bilinearly from basis elements.
fn bracket_extended(x: &WeylElement, y: &WeylElement) -> WeylElement {
    let mut out = WeylElement::zero();
    for (a, qa) in x.terms() {
        for (b, qb) in y.terms() {
            out = out.add(&bracket(*a, *b).scale(&(qa * qb)));
        }
    }
    out
}

fn flatness_cases(w: &SuiteWindow) -> Vec<Case> {
    let (m, k) = (w.m_max, w.k_max);
    vec![
        case(format!("d(dt_k) on M={m} K={k}"), move || {
            let win = EtaWindow::new(m, k);
            let ext = flatness_table(win)?;
            let cells = verify_flatness(&ext, win)?;
            Ok(cells
                .into_iter()
                .map(|c| (format!("d(dt{}) on eta{}^eta{}", c.k, c.key.0, c.key.1), c.residual))
                .collect())
        }),
        case(format!("hat omega wedge square n={}", k + 1), move || {
            let ext = solve_wave_extension(WaveWindow::new(m, k))?;
            let hat = build_hat_omega(&ext, k as usize + 1)?;
            let mut cells = Vec::new();
            for (r, row) in hat.wedge_square().iter().enumerate() {
                for (c, f) in row.iter().enumerate() {
                    cells.extend(form_cells(&format!("entry ({r},{c})"), f));
                }
            }
            Ok(cells)
        }),
        case(format!("resubstitution M={m} K={k}"), move || {
            let ext = solve_wave_extension(WaveWindow::new(m, k))?;
            verify_resubstitution(&ext)?;
            Ok(Vec::new())
        }),
    ]
}

fn reduction_cases(w: &SuiteWindow) -> Vec<Case> {
    let (m, kk) = (w.m_max, w.k_max);
    let mut out = Vec::new();
    for k in 0..=kk {
        out.push(case(format!("constrained dt{k}"), move || {
            let ext = solve_wave_extension(WaveWindow::new(m, kk))?;
            let got = apply_constraint(ext.dt(k).expect("k within K"));
            let expect = if k == 0 {
                GradedForm::zero(1, Some(ext.eta_window()))
            } else {
                GradedForm::basis(Coframe::eta(0, k), Some(ext.eta_window()))
            };
            Ok(form_cells(&format!("dt{k}"), &got.sub(&expect)))
        }));
    }
    out.push(case(format!("hat omega collapses n={}", kk + 1), move || {
        let ext = solve_wave_extension(WaveWindow::new(m, kk))?;
        verify_reduction(&ext, kk as usize + 1)?;
        Ok(Vec::new())
    }));
    out
}

fn zero_curvature_cases(w: &SuiteWindow) -> Vec<Case> {
    let pairs = match w.pair {
        Some(p) => vec![p],
        None => vec![(2, 3), (2, 4), (3, 4)],
    };
    let depth = w.depth;
    pairs
        .into_iter()
        .map(|(j, k)| {
            case(format!("({j},{k}) depth {depth}"), move || {
                let res = zero_curvature_residual(j, k, depth)?;
                Ok(operator_cells("residual", &res))
            })
        })
        .collect()
}

fn dressing_cases(w: &SuiteWindow) -> Vec<Case> {
    let (depth, imax, tmax) = (w.depth, w.imax, w.tmax);
    let mut out = vec![case(format!("g g^-1 depth {depth}"), move || {
        let d = dress(depth)?;
        let id = leibniz_compose(&d.g, &d.g_inv).sub(&PsdoOperator::one());
        Ok(operator_cells("g g^-1 - 1", &id))
    })];
    for j in 1..=imax {
        out.push(case(format!("g-flow j={j} depth {depth}"), move || {
            let cells = verify_g_flow_consistency(j, depth)?;
            Ok(cells.into_iter().map(|r| (r.location, r.value)).collect())
        }));
    }
    out.push(case(format!("S relations i<={imax} N={tmax} depth {depth}"), move || {
        let cells = verify_s_relations(imax, tmax, depth)?;
        Ok(cells.into_iter().map(|r| (r.location, r.value)).collect())
    }));
    out
}

/// Runs a suite; module errors become report entries.
pub fn run_suite(name: SuiteName, window: &SuiteWindow) -> SuiteReport {
    let start = Instant::now();
    let mut cases = match name {
        SuiteName::HeatCompat => heat_compat_cases(window),
        SuiteName::Symmetry => symmetry_cases(window),
        SuiteName::Structure => structure_cases(window),
        SuiteName::ExtendedFlatness => flatness_cases(window),
        SuiteName::Reduction => reduction_cases(window),
        SuiteName::ZeroCurvature => zero_curvature_cases(window),
        SuiteName::Dressing => dressing_cases(window),
    };
    cases.sort_by(|a, b| a.key.cmp(&b.key));
    let outcomes: Vec<Vec<Failure>> = cases
        .par_iter()
        .map(|c| match (c.run)() {
            Ok(cells) => cells
                .into_iter()
                .filter(|(_, v)| !v.is_zero())
                .map(|(loc, v)| Failure {
                    location: format!("{}: {loc}", c.key),
                    coefficient: v.to_string(),
                    code: 1,
                })
                .collect(),
            Err(e) => vec![Failure::from_error(&c.key, &e)],
        })
        .collect();
    SuiteReport {
        suite: name.to_string(),
        cases_run: cases.len(),
        failures: outcomes.into_iter().flatten().collect(),
        wall_time: start.elapsed(),
    }
}
