//! Brute-force reference computations, written without the library's
//! closed formulas.

use std::collections::BTreeMap;

use hierarchy_core::rings::{Generator, Polynomial, Rational};
use hierarchy_core::weyl::{BasisIndex, WeylElement};

/// Polynomial in `z` with rational coefficients, keyed by power.
pub type ZPoly = BTreeMap<u32, Rational>;

fn falling(s: u32, m: u32) -> Rational {
    (s - m + 1..=s).fold(Rational::one(), |acc, k| &acc * &Rational::from(k as i64))
}

fn add_into(out: &mut ZPoly, power: u32, c: &Rational) {
    let e = out.entry(power).or_insert_with(Rational::zero);
    *e += c;
    if e.is_zero() {
        out.remove(&power);
    }
}

/// `e` acting on a polynomial: `z^j (d/dz)^m z^s = s!/(s−m)! z^{s−m+j}`.
pub fn act(e: &WeylElement, p: &ZPoly) -> ZPoly {
    let mut out = ZPoly::new();
    for (idx, c) in e.terms() {
        for (s, a) in p {
            if idx.m > *s {
                continue;
            }
            let coeff = &(c * a) * &falling(*s, idx.m);
            add_into(&mut out, s - idx.m + idx.j, &coeff);
        }
    }
    out
}

pub fn z_pow(s: u32) -> ZPoly {
    ZPoly::from([(s, Rational::one())])
}

/// Recovers the normal form of an operator of order `≤ order` from its
/// values on `1, z, …, z^order`.
pub fn normal_form_from_action(order: u32, action: impl Fn(u32) -> ZPoly) -> WeylElement {
    let mut found = WeylElement::zero();
    for s in 0..=order {
        let mut rest = action(s);
        let known = act(&found, &z_pow(s));
        for (p, c) in known {
            add_into(&mut rest, p, &-c);
        }
        // what remains is Σ_j c_{s,j} s! z^j
        let fact = falling(s, s);
        for (j, c) in rest {
            found.add_term(BasisIndex::new(s, j), &(&c / &fact));
        }
    }
    found
}

/// Product `a ∘ b` rebuilt from the composite action on monomials.
pub fn product_by_action(a: &WeylElement, b: &WeylElement, order: u32) -> WeylElement {
    normal_form_from_action(order, |s| act(a, &act(b, &z_pow(s))))
}

/// Set partitions of `{0, …, n−1}` as lists of block sizes.
pub fn partition_block_sizes(n: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, n: usize, blocks: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b] += 1;
            go(i + 1, n, blocks, out);
            blocks[b] -= 1;
        }
        blocks.push(1);
        go(i + 1, n, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    go(0, n, &mut Vec::new(), &mut out);
    out
}

/// Series in `z` with polynomial coefficients, truncated at `z^bound`.
pub type PolySeries = Vec<Polynomial>;

/// `ξ^{(r)}` for `ξ = Σ_{k ≤ n} t_k z^k`, through `z^bound`.
pub fn xi_derivative_series(n: u32, r: u32, bound: usize) -> PolySeries {
    let mut out = vec![Polynomial::zero(); bound + 1];
    for k in r..=n {
        let s = (k - r) as usize;
        if s <= bound {
            out[s] = Polynomial::t(k).scale(&falling(k, r));
        }
    }
    out
}

fn series_mul(a: &PolySeries, b: &PolySeries) -> PolySeries {
    let bound = a.len().min(b.len());
    let mut out = vec![Polynomial::zero(); bound];
    for i in 0..bound {
        for j in 0..bound - i {
            out[i + j] = &out[i + j] + &(&a[i] * &b[j]);
        }
    }
    out
}

/// `e^{−ξ} (d/dz)^m e^{ξ}` as the sum over set partitions of `m` of the
/// product of `ξ^{(block size)}`.
pub fn bell_by_partitions(n: u32, m: usize, bound: usize) -> PolySeries {
    let mut total = vec![Polynomial::zero(); bound + 1];
    for blocks in partition_block_sizes(m) {
        let mut prod = vec![Polynomial::zero(); bound + 1];
        prod[0] = Polynomial::one();
        for size in blocks {
            prod = series_mul(&prod, &xi_derivative_series(n, size as u32, bound));
        }
        for (t, p) in total.iter_mut().zip(prod) {
            *t = &*t + &p;
        }
    }
    total
}

/// Plain x-derivative for coefficients in `v`, `w` and `t` (with `t_1 = x`).
pub fn dx(p: &Polynomial) -> Polynomial {
    let mut out = Polynomial::zero();
    for g in p.generators() {
        let dg = match g {
            Generator::V { a, r } => Polynomial::v(a, r + 1),
            Generator::W { a, r } => Polynomial::w(a, r + 1),
            Generator::P(j) => Polynomial::p(j + 1),
            Generator::T(1) => Polynomial::one(),
            Generator::T(_) => continue,
        };
        out = &out + &(&p.partial(&g) * &dg);
    }
    out
}

/// Generalized binomial `C(a, r)` for any integer `a`.
pub fn gen_binomial(a: i64, r: u32) -> Rational {
    let mut acc = Rational::one();
    for i in 0..r as i64 {
        acc = &(&acc * &Rational::from(a - i)) / &Rational::from(i + 1);
    }
    acc
}

/// Symbol of a pseudo-differential operator: order → coefficient.
pub type Symbol = BTreeMap<i64, Polynomial>;

/// `A ∘ B` kept at orders `≥ floor`, from
/// `∂^a ∘ f = Σ_r C(a,r) f^{(r)} ∂^{a−r}`.
pub fn compose_symbols(a: &Symbol, b: &Symbol, floor: i64) -> Symbol {
    let mut out = Symbol::new();
    for (ia, fa) in a {
        for (ib, fb) in b {
            let mut deriv = fb.clone();
            let mut r = 0u32;
            while ia + ib - r as i64 >= floor {
                let c = gen_binomial(*ia, r);
                if c.is_zero() {
                    break;
                }
                let term = (fa * &deriv).scale(&c);
                let e = out.entry(ia + ib - r as i64).or_insert_with(Polynomial::zero);
                *e = &*e + &term;
                deriv = dx(&deriv);
                r += 1;
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}
