//! Acceptance suite: one PASS/FAIL line per criterion with its time budget.
//! Run with `cargo test --release --test acceptance -- --nocapture`.

mod common;

use std::time::{Duration, Instant};

use common::oracle::*;
use hierarchy_core::emit::Emit;
use hierarchy_core::forms::{
    apply_constraint, build_hat_omega, example_0wave, flatness_table, solve_wave_extension,
    verify_flatness, verify_reduction, Coframe, EtaWindow, GradedForm, WaveWindow,
};
use hierarchy_core::jets::{d_t, verify_symmetry, JetExpression, JetWindow};
use hierarchy_core::psdo::{
    dress, l_power, l_power_plus, leibniz_compose, lax_operator, verify_g_flow_consistency,
    verify_s_relations, zero_curvature_residual, PsdoOperator,
};
use hierarchy_core::rings::{Polynomial, Rational};
use hierarchy_core::suite::{run_suite, SuiteName, SuiteWindow};
use hierarchy_core::weyl::{basis_within, bracket, StructureTable, WeylElement};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn weyl_oracle() -> Check {
    let basis = basis_within(5);
    let mut pairs = 0;
    for a in &basis {
        for b in &basis {
            let (ea, eb) = (WeylElement::basis(a.m, a.j), WeylElement::basis(b.m, b.j));
            let got = ea.compose(&eb);
            let want = product_by_action(&ea, &eb, a.m + b.m);
            ensure(got == want, || format!("{a}*{b}: {got} vs {want}"))?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} pairs"))
}

fn structure_fidelity() -> Check {
    let table = StructureTable::new(5);
    let minus = Rational::from(-1);
    for ((a, b), entry) in table.entries() {
        let comm = WeylElement::basis(a.m, a.j).commutator(&WeylElement::basis(b.m, b.j));
        ensure(*entry == comm.scale(&minus), || format!("[{a},{b}] = {entry}, Weyl gives {comm}"))?;
        let back = table.get(*b, *a).expect("table is square");
        ensure(entry.add(back).is_zero(), || format!("antisymmetry fails at {a},{b}"))?;
    }
    let extend = |x: &WeylElement, y| {
        x.terms().fold(WeylElement::zero(), |acc, (i, c)| acc.add(&bracket(*i, y).scale(c)))
    };
    let small = basis_within(4);
    let mut triples = 0;
    for a in &small {
        for b in &small {
            for c in &small {
                let jac = extend(&bracket(*a, *b), *c)
                    .add(&extend(&bracket(*b, *c), *a))
                    .add(&extend(&bracket(*c, *a), *b));
                ensure(jac.is_zero(), || format!("Jacobi fails at {a},{b},{c}: {jac}"))?;
                triples += 1;
            }
        }
    }
    Ok(format!("{} entries, {triples} Jacobi triples", table.len()))
}

fn heat_compatibility() -> Check {
    let win = JetWindow::new(8, 8);
    let p0 = JetExpression::p(0, win).map_err(|e| e.to_string())?;
    let mut n = 0;
    for i in 1..=8u32 {
        for j in 1..=8 - i {
            let got = d_t(i, &d_t(j, &p0).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            ensure(got.poly() == &Polynomial::p(i + j), || format!("D_t{i} D_t{j} p0 = {got}"))?;
            n += 1;
        }
    }
    Ok(format!("{n} pairs"))
}

fn symmetry() -> Check {
    let tmax = 6;
    let mut cases = 0;
    for i in 1..=4 {
        for m in 0..=3 {
            for j in 0..=3 - m {
                let win = JetWindow::certifying_symmetry(tmax, i, m, j);
                cases += verify_symmetry(i, m, j, win).map_err(|e| e.to_string())?.len();
            }
        }
    }
    Ok(format!("{cases} basis evaluations"))
}

fn extension_table() -> Check {
    let ext = solve_wave_extension(WaveWindow::new(2, 3)).map_err(|e| e.to_string())?;
    let n = ext.window().tmax;
    for k in 0..=3 {
        for j in 0..=3 {
            let want = if j == k { Polynomial::one() } else { Polynomial::zero() };
            let got = ext.entry(k, 0, j).map_err(|e| e.to_string())?;
            ensure(got == want, || format!("T^{k}_(0,{j}) = {got}"))?;
        }
        for m in 0..=2 {
            let bell = bell_by_partitions(n, m as usize, 3);
            for j in 0..=3 {
                let want = if j <= k { bell[(k - j) as usize].clone() } else { Polynomial::zero() };
                let got = ext.entry(k, m, j).map_err(|e| e.to_string())?;
                ensure(got == want, || format!("T^{k}_({m},{j}) = {got}, oracle {want}"))?;
            }
        }
    }
    let dt0 = ext.dt(0).expect("dt0").to_string();
    ensure(dt0 == "eta(0,0) + t1*eta(1,0) + (t1^2+2*t2)*eta(2,0)", || format!("dt0 = {dt0}"))?;
    Ok(dt0)
}

fn flatness() -> Check {
    let win = EtaWindow::new(2, 3);
    let ext = flatness_table(win).map_err(|e| e.to_string())?;
    let cells = verify_flatness(&ext, win).map_err(|e| e.to_string())?;
    let ks: std::collections::BTreeSet<u32> = cells.iter().map(|c| c.k).collect();
    ensure(ks == (0..=3).collect(), || format!("only k in {ks:?} checked"))?;
    let hat = build_hat_omega(&solve_wave_extension(WaveWindow::new(2, 3)).map_err(|e| e.to_string())?, 4)
        .map_err(|e| e.to_string())?;
    for row in hat.wedge_square() {
        for f in row {
            ensure(f.is_zero(), || format!("hat omega ^ hat omega = {f}"))?;
        }
    }
    Ok(format!("{} wedge keys", cells.len()))
}

fn reduction() -> Check {
    let ext = solve_wave_extension(WaveWindow::new(2, 3)).map_err(|e| e.to_string())?;
    let eta = ext.eta_window();
    for k in 0..=3 {
        let got = apply_constraint(ext.dt(k).expect("k <= K"));
        let want = if k == 0 {
            GradedForm::zero(1, Some(eta))
        } else {
            GradedForm::basis(Coframe::eta(0, k), Some(eta))
        };
        ensure(got == want, || format!("constrained dt{k} = {got}"))?;
    }
    verify_reduction(&ext, 4).map_err(|e| e.to_string())?;
    Ok("dt0 = 0, dt_k = eta(0,k), hat omega = omega".into())
}

fn zero_wave() -> Check {
    let constraints = example_0wave(6);
    let powers: Vec<u32> = constraints.iter().map(|c| c.power).collect();
    ensure(powers == [3, 4, 5, 6], || format!("constraints at z^{powers:?}"))?;
    for c in &constraints {
        let want = GradedForm::dt(c.power).scale(&Polynomial::int(-1));
        ensure(c.form == want, || format!("z^{}: {} = 0", c.power, c.form))?;
    }
    Ok("dt3 = dt4 = dt5 = dt6 = 0".into())
}

fn kp_canon() -> Check {
    let depth = 6;
    let l: Symbol = lax_operator(depth).orders().map(|(a, c)| (*a, c.clone())).collect();
    let l2 = compose_symbols(&l, &l, -(depth as i64) + 1);
    let l3 = compose_symbols(&l2, &l, -(depth as i64) + 2);
    for (j, oracle) in [(2u32, &l2), (3, &l3)] {
        let lib: Symbol = l_power(j, depth).map_err(|e| e.to_string())?.orders().map(|(a, c)| (*a, c.clone())).collect();
        ensure(&lib == oracle, || format!("L^{j} differs from the Leibniz oracle"))?;
    }
    let v = Polynomial::v;
    let two = PsdoOperator::from_orders([(2, Polynomial::one()), (0, v(1, 0).scale(&2.into()))], None);
    let three = PsdoOperator::from_orders(
        [
            (3, Polynomial::one()),
            (1, v(1, 0).scale(&3.into())),
            (0, (&v(2, 0) + &v(1, 1)).scale(&3.into())),
        ],
        None,
    );
    let p2 = l_power_plus(2, depth).map_err(|e| e.to_string())?;
    let p3 = l_power_plus(3, depth).map_err(|e| e.to_string())?;
    ensure(p2 == two, || format!("(L^2)_+ = {p2}"))?;
    ensure(p3 == three, || format!("(L^3)_+ = {p3}"))?;
    Ok(format!("(L^2)_+ = {p2}; (L^3)_+ = {p3}"))
}

fn zero_curvature() -> Check {
    for (j, k) in [(2, 3), (2, 4), (3, 4)] {
        let res = zero_curvature_residual(j, k, 6).map_err(|e| e.to_string())?;
        // both (L^j)_+ are exact, so the residual carries no tail
        ensure(res.is_zero() && res.is_exact(), || format!("({j},{k}) residual {res}"))?;
    }
    Ok("(2,3), (2,4), (3,4) residuals identically zero".into())
}

fn dressing() -> Check {
    let d = dress(6).map_err(|e| e.to_string())?;
    let id = leibniz_compose(&d.g, &d.g_inv).sub(&PsdoOperator::one());
    ensure(id.is_zero() && id.tail() == Some(-6), || format!("g g^-1 - 1 = {id}"))?;
    let mut cells = 0;
    for j in 1..=2 {
        cells += verify_g_flow_consistency(j, 6).map_err(|e| e.to_string())?.len();
    }
    cells += verify_s_relations(2, 4, 4).map_err(|e| e.to_string())?.len();
    Ok(format!("{cells} coefficients"))
}

fn determinism() -> Check {
    let w = SuiteWindow::default();
    for name in [SuiteName::Structure, SuiteName::ExtendedFlatness, SuiteName::Reduction] {
        let runs: Vec<String> = [1, 4]
            .into_iter()
            .map(|threads| {
                let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
                pool.install(|| run_suite(name, &w).json())
            })
            .collect();
        ensure(runs[0] == runs[1], || format!("{name} output depends on thread count"))?;
        ensure(runs[0] == run_suite(name, &w).json(), || format!("{name} rerun differs"))?;
    }
    common::round_trip_all()?;
    Ok(format!("3 suites rerun, {} values per type round-tripped", common::CORPUS_SIZE))
}

#[test]
fn acceptance() {
    let criteria: [(&str, u64, fn() -> Check); 12] = [
        ("Weyl product matches the monomial-action oracle", 5, weyl_oracle),
        ("structure constants, antisymmetry, Jacobi", 30, structure_fidelity),
        ("heat flows are compatible", 1, heat_compatibility),
        ("symmetries commute with the heat flows", 30, symmetry),
        ("extension table at M=2, K=3", 1, extension_table),
        ("extended connection is flat", 60, flatness),
        ("reduction to the heat connection", 1, reduction),
        ("zero-wave constraints", 1, zero_wave),
        ("low Lax powers", 5, kp_canon),
        ("zero curvature at depth 6", 120, zero_curvature),
        ("dressing, g-flows and S relations", 120, dressing),
        ("determinism and JSON round trip", 5, determinism),
    ];
    let mut failed = Vec::new();
    for (i, (label, limit, check)) in criteria.iter().enumerate() {
        let n = i + 1;
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*limit);
        let timing = format!("{:.3}s / {limit}s", elapsed.as_secs_f64());
        match (&outcome, in_time) {
            (Ok(detail), true) => println!("PASS criterion {n}: {label} ({timing}) {detail}"),
            (Ok(_), false) => {
                println!("FAIL criterion {n}: {label} ({timing}) over the time limit");
                failed.push(n);
            }
            (Err(why), _) => {
                println!("FAIL criterion {n}: {label} ({timing}) {why}");
                failed.push(n);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
