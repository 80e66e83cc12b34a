//! Seeded random values shared by the round-trip and acceptance tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::time::Duration;

use hierarchy_core::forms::{solve_wave_extension, ExtensionTable, WaveWindow};
use hierarchy_core::psdo::{FlowTable, PsdoOperator};
use hierarchy_core::rings::{Generator, Monomial, Polynomial, Rational, ZSeries};
use hierarchy_core::suite::{Failure, SuiteReport};
use hierarchy_core::weyl::{BasisIndex, WeylElement};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CORPUS_SIZE: usize = 50;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rational(r: &mut ChaCha8Rng) -> Rational {
    let num: i64 = r.gen_range(-1_000_000..=1_000_000);
    let den: i64 = r.gen_range(1..=5000);
    // occasionally huge, to exercise the big-integer path
    if r.gen_bool(0.1) {
        let big = Rational::from(i64::MAX);
        return &(&big * &big) * &Rational::new(num, den);
    }
    Rational::new(num, den)
}

pub fn generator(r: &mut ChaCha8Rng) -> Generator {
    match r.gen_range(0..4) {
        0 => Generator::P(r.gen_range(0..9)),
        1 => Generator::T(r.gen_range(1..7)),
        2 => Generator::V { a: r.gen_range(1..6), r: r.gen_range(0..4) },
        _ => Generator::W { a: r.gen_range(1..6), r: r.gen_range(0..4) },
    }
}

pub fn polynomial(r: &mut ChaCha8Rng) -> Polynomial {
    let n = r.gen_range(0..6);
    Polynomial::from_terms((0..n).map(|_| {
        let k = r.gen_range(0..4);
        let mono = Monomial::from_factors((0..k).map(|_| (generator(r), r.gen_range(1..4))));
        (mono, rational(r))
    }))
}

pub fn zseries(r: &mut ChaCha8Rng) -> ZSeries {
    let n = r.gen_range(1..6);
    ZSeries::from_coeffs((0..n).map(|_| polynomial(r)).collect(), r.gen_bool(0.5))
}

pub fn weyl(r: &mut ChaCha8Rng) -> WeylElement {
    let mut e = WeylElement::zero();
    for _ in 0..r.gen_range(0..6) {
        e.add_term(BasisIndex::new(r.gen_range(0..6), r.gen_range(0..6)), &rational(r));
    }
    e
}

pub fn operator(r: &mut ChaCha8Rng) -> PsdoOperator {
    let top: i64 = r.gen_range(-2..4);
    if r.gen_bool(0.3) {
        let top = top.max(0);
        return PsdoOperator::from_orders((0..=top).map(|a| (a, polynomial(r))), None);
    }
    let tail = top - r.gen_range(0..6);
    PsdoOperator::from_orders((tail..=top).map(|a| (a, polynomial(r))), Some(tail))
}

pub fn flow_table(r: &mut ChaCha8Rng) -> FlowTable {
    let j = r.gen_range(1..6);
    let eqs: BTreeMap<u32, Polynomial> = (1..r.gen_range(1..6)).map(|a| (a, polynomial(r))).collect();
    FlowTable::new(j, eqs)
}

/// Tables over 25 windows, each at its minimal and an enlarged time range.
pub fn extension_tables() -> Vec<ExtensionTable> {
    let mut out = Vec::new();
    for m in 0..5 {
        for k in 0..5 {
            let w = WaveWindow::new(m, k);
            out.push(solve_wave_extension(w).unwrap());
            out.push(solve_wave_extension(w.with_tmax(w.tmax + 1)).unwrap());
        }
    }
    out
}

pub fn suite_report(r: &mut ChaCha8Rng) -> SuiteReport {
    let names = ["heat-compat", "structure", "dressing", "zero-curvature"];
    SuiteReport {
        suite: names[r.gen_range(0..names.len())].to_string(),
        cases_run: r.gen_range(0..500),
        failures: (0..r.gen_range(0..3))
            .map(|i| Failure {
                location: format!("case {i}"),
                coefficient: polynomial(r).to_string(),
                code: [1, 2, 3][r.gen_range(0..3)],
            })
            .collect(),
        wall_time: Duration::ZERO,
    }
}

/// `value → JSON → value` is the identity and re-serializing is stable.
pub fn round_trips<T>(values: &[T]) -> Result<(), String>
where
    T: serde::Serialize + serde::de::DeserializeOwned + PartialEq + std::fmt::Debug,
{
    for v in values {
        let json = serde_json::to_string(v).map_err(|e| e.to_string())?;
        let back: T = serde_json::from_str(&json).map_err(|e| format!("{e}: {json}"))?;
        if &back != v {
            return Err(format!("{v:?} came back as {back:?}"));
        }
        if serde_json::to_string(&back).unwrap() != json {
            return Err(format!("re-serialization differs for {json}"));
        }
    }
    Ok(())
}

pub fn corpus<T>(seed: u64, mut make: impl FnMut(&mut ChaCha8Rng) -> T) -> Vec<T> {
    let mut r = rng(seed);
    (0..CORPUS_SIZE).map(|_| make(&mut r)).collect()
}

/// Round-trips every corpus type; returns the first failure.
pub fn round_trip_all() -> Result<(), String> {
    round_trips(&corpus(1, rational))?;
    round_trips(&corpus(2, polynomial))?;
    round_trips(&corpus(3, zseries))?;
    round_trips(&corpus(4, weyl))?;
    round_trips(&corpus(5, operator))?;
    round_trips(&corpus(6, flow_table))?;
    round_trips(&extension_tables())?;
    round_trips(&corpus(7, suite_report))?;
    Ok(())
}

pub mod oracle;
