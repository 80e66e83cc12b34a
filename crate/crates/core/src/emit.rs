//! Text, LaTeX and JSON renderings. Text is the `Display` form; JSON is the
//! serde form written compactly; LaTeX is built here.

use serde::Serialize;

use crate::forms::{Coframe, ExtensionTable, GradedForm};
use crate::jets::JetExpression;
use crate::psdo::{FlowTable, PsdoOperator};
use crate::rings::{Generator, Monomial, Polynomial, Rational};
use crate::suite::SuiteReport;
use crate::weyl::{StructureTable, WeylElement};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Latex,
    Json,
}

impl std::str::FromStr for Format {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "latex" => Ok(Format::Latex),
            "json" => Ok(Format::Json),
            other => Err(crate::Error::InvalidArgument(format!("unknown emit format '{other}'"))),
        }
    }
}

pub trait Emit {
    fn text(&self) -> String;
    fn latex(&self) -> String;
    fn json(&self) -> String;

    fn emit(&self, format: Format) -> String {
        match format {
            Format::Text => self.text(),
            Format::Latex => self.latex(),
            Format::Json => self.json(),
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("values serialize")
}

fn rational_latex(q: &Rational) -> String {
    if q.is_integer() {
        q.to_string()
    } else {
        let sign = if q.is_negative() { "-" } else { "" };
        let a = q.abs();
        format!("{sign}\\frac{{{}}}{{{}}}", a.numer(), a.denom())
    }
}

fn generator_latex(g: &Generator) -> String {
    let xs = |r: u32| "x".repeat(r as usize);
    match *g {
        Generator::P(j) => format!("p_{{{j}}}"),
        Generator::T(k) => format!("t_{{{k}}}"),
        Generator::V { a, r: 0 } => format!("v^{{{a}}}"),
        Generator::V { a, r } => format!("v^{{{a}}}_{{{}}}", xs(r)),
        Generator::W { a, r: 0 } => format!("w_{{{a}}}"),
        Generator::W { a, r } => format!("w_{{{a},{}}}", xs(r)),
    }
}

fn monomial_latex(m: &Monomial) -> String {
    m.factors()
        .iter()
        .map(|(g, e)| {
            let base = generator_latex(g);
            match (*e, g) {
                (1, _) => base,
                (e, Generator::V { .. }) => format!("\\left({base}\\right)^{{{e}}}"),
                (e, _) => format!("{base}^{{{e}}}"),
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// `coef` times a LaTeX factor (`""` for a bare scalar), signs folded in.
fn signed_term(first: bool, q: &Rational, factor: &str) -> String {
    let neg = q.is_negative();
    let mag = q.abs();
    let body = if factor.is_empty() {
        rational_latex(&mag)
    } else if mag.is_one() {
        factor.to_string()
    } else {
        format!("{}{factor}", rational_latex(&mag))
    };
    match (first, neg) {
        (true, false) => body,
        (true, true) => format!("-{body}"),
        (false, false) => format!("+{body}"),
        (false, true) => format!("-{body}"),
    }
}

pub fn polynomial_latex(p: &Polynomial) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (m, q)) in p.terms().enumerate() {
        let factor = if m.is_one() { String::new() } else { monomial_latex(m) };
        out.push_str(&signed_term(i == 0, q, &factor));
    }
    out
}

/// A polynomial used as a coefficient: parenthesized when it has several terms.
fn coefficient_latex(first: bool, c: &Polynomial, factor: &str) -> String {
    if let Some(q) = c.as_constant() {
        return signed_term(first, &q, factor);
    }
    if c.is_monomial() {
        let (m, q) = c.terms().next().expect("one term");
        let joined = if factor.is_empty() {
            monomial_latex(m)
        } else {
            format!("{} {factor}", monomial_latex(m))
        };
        return signed_term(first, q, &joined);
    }
    let sep = if first { "" } else { "+" };
    if factor.is_empty() {
        format!("{sep}\\left({}\\right)", polynomial_latex(c))
    } else {
        format!("{sep}\\left({}\\right){factor}", polynomial_latex(c))
    }
}

impl Emit for Polynomial {
    fn text(&self) -> String {
        self.to_string()
    }
    fn latex(&self) -> String {
        polynomial_latex(self)
    }
    fn json(&self) -> String {
        to_json(self)
    }
}

impl Emit for JetExpression {
    fn text(&self) -> String {
        self.to_string()
    }
    fn latex(&self) -> String {
        polynomial_latex(self.poly())
    }
    fn json(&self) -> String {
        to_json(self.poly())
    }
}

impl Emit for WeylElement {
    fn text(&self) -> String {
        self.to_string()
    }

    /// `z^{j}\left(\frac{d}{dz}\right)^{m}`, highest basis index first.
    fn latex(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (idx, q)) in self.terms().rev().enumerate() {
            let z = match idx.j {
                0 => String::new(),
                1 => "z".to_string(),
                j => format!("z^{{{j}}}"),
            };
            let d = match idx.m {
                0 => String::new(),
                1 => "\\frac{d}{dz}".to_string(),
                m => format!("\\left(\\frac{{d}}{{dz}}\\right)^{{{m}}}"),
            };
            out.push_str(&signed_term(i == 0, q, &format!("{z}{d}")));
        }
        out
    }

    fn json(&self) -> String {
        to_json(self)
    }
}

fn coframe_latex(c: &Coframe) -> String {
    match c {
        Coframe::Dt(k) => format!("dt_{{{k}}}"),
        Coframe::Eta(i) => format!("\\eta^{{{},{}}}", i.m, i.j),
    }
}

pub fn form_latex(f: &GradedForm) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (key, c)) in f.terms().enumerate() {
        let k = key.iter().map(coframe_latex).collect::<Vec<_>>().join("\\wedge ");
        out.push_str(&coefficient_latex(i == 0, c, &k));
    }
    out
}

impl Emit for GradedForm {
    fn text(&self) -> String {
        self.to_string()
    }
    fn latex(&self) -> String {
        form_latex(self)
    }
    fn json(&self) -> String {
        let terms: Vec<serde_json::Value> = self
            .terms()
            .map(|(key, c)| {
                serde_json::json!({
                    "key": key.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    "coef": c,
                })
            })
            .collect();
        to_json(&serde_json::json!({ "degree": self.degree(), "terms": terms }))
    }
}

impl Emit for ExtensionTable {
    fn text(&self) -> String {
        self.to_string()
    }
    fn latex(&self) -> String {
        let mut out = String::from("\\begin{aligned}\n");
        for (k, f) in self.forms().iter().enumerate() {
            out.push_str(&format!("dt_{{{k}}} &= {} \\\\\n", form_latex(f)));
        }
        out.push_str("\\end{aligned}\n");
        out
    }
    fn json(&self) -> String {
        to_json(self)
    }
}

impl Emit for PsdoOperator {
    fn text(&self) -> String {
        self.to_string()
    }
    fn latex(&self) -> String {
        let mut out = String::new();
        for (i, (a, c)) in self.orders().rev().enumerate() {
            let op = match *a {
                0 => String::new(),
                1 => "\\partial_x".to_string(),
                a => format!("\\partial_x^{{{a}}}"),
            };
            out.push_str(&coefficient_latex(i == 0, c, &op));
        }
        if out.is_empty() {
            out.push('0');
        }
        if let Some(t) = self.tail() {
            out.push_str(&format!("+O\\left(\\partial_x^{{{}}}\\right)", t - 1));
        }
        out
    }
    fn json(&self) -> String {
        to_json(self)
    }
}

impl Emit for FlowTable {
    fn text(&self) -> String {
        self.equations()
            .map(|(a, rhs)| format!("d/dt{} v{a} = {rhs}\n", self.j()))
            .collect()
    }
    fn latex(&self) -> String {
        let mut out = String::from("\\begin{aligned}\n");
        for (a, rhs) in self.equations() {
            out.push_str(&format!(
                "\\partial_{{t_{{{}}}}} v^{{{a}}} &= {} \\\\\n",
                self.j(),
                polynomial_latex(rhs)
            ));
        }
        out.push_str("\\end{aligned}\n");
        out
    }
    fn json(&self) -> String {
        to_json(self)
    }
}

impl Emit for SuiteReport {
    fn text(&self) -> String {
        self.to_string()
    }
    fn latex(&self) -> String {
        let mut out = format!(
            "\\textbf{{{}}}: {} cases, {} failures\n",
            self.suite,
            self.cases_run,
            self.failures.len()
        );
        for f in &self.failures {
            out.push_str(&format!("\\\\ \\texttt{{{}}}: \\texttt{{{}}}\n", f.location, f.coefficient));
        }
        out
    }
    fn json(&self) -> String {
        to_json(self)
    }
}

/// `2*V(0,1) - V(1,0)`: a bracket written in the symmetry-algebra basis.
fn v_basis_text(e: &WeylElement) -> String {
    if e.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (idx, q)) in e.terms().rev().enumerate() {
        let v = format!("V{idx}");
        let mag = q.abs();
        let body = if mag.is_one() { v } else { format!("{mag}*{v}") };
        match (i == 0, q.is_negative()) {
            (true, false) => out.push_str(&body),
            (true, true) => out.push_str(&format!("-{body}")),
            (false, false) => out.push_str(&format!(" + {body}")),
            (false, true) => out.push_str(&format!(" - {body}")),
        }
    }
    out
}

impl Emit for StructureTable {
    fn text(&self) -> String {
        self.entries()
            .map(|((a, b), e)| format!("[V{a},V{b}] = {}\n", v_basis_text(e)))
            .collect()
    }
    fn latex(&self) -> String {
        let mut out = String::from("\\begin{aligned}\n");
        for ((a, b), e) in self.entries() {
            let mut rhs = String::new();
            for (i, (idx, q)) in e.terms().rev().enumerate() {
                rhs.push_str(&signed_term(i == 0, q, &format!("V_{{{},{}}}", idx.m, idx.j)));
            }
            if rhs.is_empty() {
                rhs.push('0');
            }
            out.push_str(&format!(
                "[V_{{{},{}}},V_{{{},{}}}] &= {rhs} \\\\\n",
                a.m, a.j, b.m, b.j
            ));
        }
        out.push_str("\\end{aligned}\n");
        out
    }
    fn json(&self) -> String {
        let entries: Vec<serde_json::Value> = self
            .entries()
            .map(|((a, b), e)| serde_json::json!({ "a": [a.m, a.j], "b": [b.m, b.j], "bracket": e }))
            .collect();
        to_json(&serde_json::json!({ "bound": self.bound(), "entries": entries }))
    }
}
