//! Real root isolation by Sturm chains with floating-point
//! pseudo-remainders, count-driven bisection and Newton polish.

use crate::fp;
use crate::poly::Polynomial;
use alloc::vec;
use alloc::vec::Vec;

/// A located distinct real root.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootInfo {
    pub x: f64,
    /// Order of the root, inferred from the derivative ladder.
    pub multiplicity: usize,
}

const CHAIN_TRUNC: f64 = 1e-12;
const REL_WIDTH: f64 = 1e-13;

/// Scales to unit max-abs coefficient (positive scaling keeps every sign).
fn normalize(p: Polynomial) -> Polynomial {
    let m = p.max_abs_coeff();
    if m == 0.0 {
        p
    } else {
        p.scale(1.0 / m)
    }
}

/// Remainder of `a / b` by long division (`deg a >= deg b >= 0`).
fn remainder(a: &Polynomial, b: &Polynomial) -> Polynomial {
    let db = b.degree().expect("nonzero divisor");
    let mut r: Vec<f64> = a.coeffs().to_vec();
    let lead = b.coeffs()[db];
    while r.len() >= db + 1 {
        let shift = r.len() - 1 - db;
        let factor = r[r.len() - 1] / lead;
        for i in 0..=db {
            r[shift + i] -= factor * b.coeffs()[i];
        }
        r.pop();
        while r.last() == Some(&0.0) {
            r.pop();
        }
        if r.len() <= db {
            break;
        }
    }
    // drop noise left behind by cancellation so chains terminate
    let m = r.iter().fold(0.0f64, |acc, &c| acc.max(fp::abs(c)));
    for c in r.iter_mut() {
        if fp::abs(*c) < CHAIN_TRUNC * m {
            *c = 0.0;
        }
    }
    Polynomial::from_coeffs(r)
}

fn sturm_chain(p: &Polynomial) -> Vec<Polynomial> {
    let mut chain = vec![normalize(p.clone())];
    let d = normalize(p.derivative());
    if d.is_zero() {
        return chain;
    }
    chain.push(d);
    loop {
        let n = chain.len();
        let rem = remainder(&chain[n - 2], &chain[n - 1]);
        if rem.is_zero() {
            break;
        }
        let next = normalize(rem.scale(-1.0));
        if next.degree() == Some(0) {
            chain.push(next);
            break;
        }
        chain.push(next);
    }
    chain
}

fn sign_changes(chain: &[Polynomial], x: f64) -> usize {
    let mut changes = 0;
    let mut prev = 0.0f64;
    for p in chain {
        let v = p.eval(x);
        if v == 0.0 {
            continue;
        }
        if prev != 0.0 && (v > 0.0) != (prev > 0.0) {
            changes += 1;
        }
        prev = v;
    }
    changes
}

/// Coefficient-scale of `p` near `x`, for relative zero tests.
fn local_scale(p: &Polynomial, x: f64) -> f64 {
    let ax = fp::abs(x).max(1.0);
    let mut pw = 1.0;
    let mut s = 0.0;
    for &c in p.coeffs() {
        s += fp::abs(c) * pw;
        pw *= ax;
    }
    s.max(f64::MIN_POSITIVE)
}

/// Multiplicity by the derivative ladder: the first derivative order whose
/// value at `x` rises above the local coefficient scale.
fn multiplicity_at(p: &Polynomial, x: f64) -> usize {
    let mut q = p.clone();
    for m in 1..=p.degree().unwrap_or(0) {
        q = q.derivative();
        if fp::abs(q.eval(x)) > 1e-7 * local_scale(&q, x) {
            return m;
        }
    }
    p.degree().unwrap_or(1).max(1)
}

/// Newton polish on the derivative ladder appropriate to the multiplicity;
/// keeps the bisection value unless the polish stays bracketed and improves.
fn polish(p: &Polynomial, x: f64, lo: f64, hi: f64) -> f64 {
    let m = multiplicity_at(p, x);
    let mut target = p.clone();
    for _ in 1..m {
        target = target.derivative();
    }
    let dtarget = target.derivative();
    let mut best = x;
    let mut best_val = fp::abs(target.eval(x));
    let mut cur = x;
    // bisection brackets multiple roots only to ~sqrt(eps); let the polish
    // move within that halo, but not off to a different root
    let w = (hi - lo).max(1e-6 * fp::abs(x).max(1.0));
    for _ in 0..8 {
        let d = dtarget.eval(cur);
        if d == 0.0 {
            break;
        }
        let next = cur - target.eval(cur) / d;
        if !next.is_finite() || next < lo - w || next > hi + w {
            break;
        }
        let v = fp::abs(target.eval(next));
        if v < best_val {
            best_val = v;
            best = next;
        }
        if next == cur {
            break;
        }
        cur = next;
    }
    best
}

/// All distinct real roots of `p` in the closed interval `[a, b]`,
/// ascending, with multiplicities.
pub fn real_roots_in(p: &Polynomial, a: f64, b: f64) -> Vec<RootInfo> {
    debug_assert!(a < b);
    let mut roots: Vec<RootInfo> = Vec::new();
    let deg = match p.degree() {
        None | Some(0) => return roots,
        Some(d) => d,
    };
    if deg == 1 {
        let r = -p.coeffs()[0] / p.coeffs()[1];
        if r >= a && r <= b {
            roots.push(RootInfo {
                x: r,
                multiplicity: 1,
            });
        }
        return roots;
    }

    let chain = sturm_chain(p);

    // endpoint roots are handled explicitly; (a, b] counting then covers the
    // interior (the count at b is corrected below)
    let is_root_at = |x: f64| fp::abs(p.eval(x)) <= 1e-12 * local_scale(p, x);
    if is_root_at(a) {
        let x = polish(p, a, a, a + (b - a) * 1e-6);
        roots.push(RootInfo {
            x: if (a..=b).contains(&x) { x } else { a },
            multiplicity: multiplicity_at(p, a),
        });
    }
    if is_root_at(b) {
        // the zero-skipping count is unreliable when p vanishes at b itself
        let x = polish(p, b, b - (b - a) * 1e-6, b);
        roots.push(RootInfo {
            x: if (a..=b).contains(&x) { x } else { b },
            multiplicity: multiplicity_at(p, b),
        });
    }

    let count = |lo: f64, hi: f64| -> usize {
        sign_changes(&chain, lo).saturating_sub(sign_changes(&chain, hi))
    };

    let total = count(a, b);
    let mut stack: Vec<(f64, f64, usize)> = vec![(a, b, total)];
    let mut interior: Vec<(f64, f64)> = Vec::new(); // isolating (lo, hi]

    while let Some((lo, hi, n)) = stack.pop() {
        if n == 0 {
            continue;
        }
        let width_tol = REL_WIDTH * fp::abs(lo).max(fp::abs(hi)).max(1.0);
        if n == 1 || hi - lo <= width_tol {
            interior.push((lo, hi));
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let right = count(mid, hi);
        let left = n.saturating_sub(right);
        stack.push((lo, mid, left));
        stack.push((mid, hi, right));
    }

    for (mut lo, mut hi) in interior {
        // shrink by count-driven bisection: works across multiple roots
        // where the sign of p does not change
        let mut iter = 0;
        while hi - lo > REL_WIDTH * fp::abs(lo).max(fp::abs(hi)).max(1.0) && iter < 200 {
            let mid = 0.5 * (lo + hi);
            if count(mid, hi) >= 1 {
                lo = mid;
            } else {
                hi = mid;
            }
            iter += 1;
        }
        let x = polish(p, 0.5 * (lo + hi), lo, hi);
        let x = if x.is_finite() { x } else { 0.5 * (lo + hi) };
        // endpoint roots were already recorded; (a, b] includes b itself
        if roots
            .iter()
            .any(|r| fp::abs(r.x - x) <= 4.0 * REL_WIDTH * fp::abs(x).max(1.0))
        {
            continue;
        }
        roots.push(RootInfo {
            x,
            multiplicity: multiplicity_at(p, x),
        });
    }

    roots.sort_by(|p, q| p.x.partial_cmp(&q.x).expect("finite roots"));
    roots
}
