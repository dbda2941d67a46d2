//! The Lie-Poisson structure on the dual of the jet algebra.
//!
//! The only nonzero structure brackets are `{P_1, P_i} = P_{i+1}` for
//! `2 <= i <= k+1` (reading `P_{k+3} = 0`), so the Poisson tensor has rank 2
//! wherever `Z_k = (P_3, ..., P_{k+2})` is nonzero and rank 0 on `Z_k = 0`.
//! The kernel of the tensor is cut out by `k` polynomial Casimirs, built
//! here constructively: flow the shift system `P_m' = P_{m+1}`
//! (`m = 2..k+1`, `P_{k+2}` constant) to the time where `P_{k+1}` vanishes,
//! read off `P_{k+2-i}` there, and clear denominators with `P_{k+2}^{i-1}`.
//! The closed form is
//!
//! ```text
//! C_i = sum_{m=0}^{i-2} (-1)^m P_{k+2}^{i-1-m} P_{k+2-i+m} P_{k+1}^m / m!
//!       + (-1)^{i-1} (i-1)/i! * P_{k+1}^i,             C_1 = P_{k+2}.
//! ```
//!
//! [`casimir_paper_poly`] keeps a published variant of this family verbatim;
//! its middle sum index differs and it fails bracket annihilation for
//! `i >= 3` (see [`annihilation_defect`]), which is why the constructive
//! family above is the one used everywhere else.

use crate::fp;
use crate::jet::{JetDim, ReducedMomenta};
use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;

/// One monomial of a multivariate polynomial: `coef * prod P_v^exps[v]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub exps: Vec<u32>,
    pub coef: f64,
}

/// A multivariate polynomial on momentum space, stored as a coefficient map
/// (one entry per distinct exponent vector).
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly {
    nvars: usize,
    terms: Vec<Term>,
}

impl MultiPoly {
    pub fn new(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: Vec::new(),
        }
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    #[inline]
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Adds `coef * prod P_{var}^exp` with one-based variable indices,
    /// merging exponents and like terms.
    pub fn add_term(&mut self, coef: f64, factors: &[(usize, u32)]) {
        if coef == 0.0 {
            return;
        }
        let mut exps = vec![0u32; self.nvars];
        for &(var, exp) in factors {
            assert!((1..=self.nvars).contains(&var), "variable out of range");
            exps[var - 1] += exp;
        }
        if let Some(t) = self.terms.iter_mut().find(|t| t.exps == exps) {
            t.coef += coef;
            if t.coef == 0.0 {
                self.terms.retain(|t| t.coef != 0.0);
            }
        } else {
            self.terms.push(Term { exps, coef });
        }
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        debug_assert_eq!(z.len(), self.nvars);
        self.terms
            .iter()
            .map(|t| {
                let mut m = t.coef;
                for (v, &e) in t.exps.iter().enumerate() {
                    if e > 0 {
                        m *= fp::powi(z[v], e);
                    }
                }
                m
            })
            .sum()
    }

    /// Exact partial derivative with respect to `P_var` (one-based).
    pub fn partial(&self, var: usize) -> MultiPoly {
        let mut out = MultiPoly::new(self.nvars);
        for t in &self.terms {
            let e = t.exps[var - 1];
            if e == 0 {
                continue;
            }
            let mut exps = t.exps.clone();
            exps[var - 1] -= 1;
            let coef = t.coef * e as f64;
            let factors: Vec<(usize, u32)> = exps
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(v, &x)| (v + 1, x))
                .collect();
            out.add_term(coef, &factors);
        }
        out
    }

    /// Exact gradient evaluated at `z`.
    pub fn gradient_at(&self, z: &[f64]) -> Vec<f64> {
        (1..=self.nvars).map(|v| self.partial(v).eval(z)).collect()
    }

    /// Maximum total degree over terms; 0 for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| t.exps.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }
}

/// The Poisson tensor `B[i][j] = {P_i, P_j}` evaluated at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct PoissonTensor {
    n: usize,
    entries: Vec<f64>, // row-major n x n
}

impl PoissonTensor {
    #[inline]
    pub fn size(&self) -> usize {
        self.n
    }

    /// Entry `B[i][j]` with one-based indices.
    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[(i - 1) * self.n + (j - 1)]
    }

    /// `B * v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|r| {
                (0..self.n)
                    .map(|c| self.entries[r * self.n + c] * v[c])
                    .sum()
            })
            .collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.n)
    }
}

/// `{P_i, P_j}` at `z` (one-based indices up to `k+2`).
pub fn structure_bracket(i: usize, j: usize, z: &ReducedMomenta) -> Result<f64> {
    let n = z.len();
    if i < 1 || i > n || j < 1 || j > n {
        let index = if i < 1 || i > n { i } else { j };
        return Err(Error::IndexOutOfRange { index, len: n });
    }
    Ok(match bracket_index(i, j, n) {
        Some((sign, m)) => sign * z.p(m),
        None => 0.0,
    })
}

/// The bracket table in symbolic form: `{P_i, P_j} = sign * P_m`, or `None`
/// when the bracket vanishes identically (including `{P_1, P_{k+2}} = 0`).
pub fn bracket_index(i: usize, j: usize, n: usize) -> Option<(f64, usize)> {
    if i == 1 && (2..n).contains(&j) {
        Some((1.0, j + 1))
    } else if j == 1 && (2..n).contains(&i) {
        Some((-1.0, i + 1))
    } else {
        None
    }
}

/// Assembles the full tensor at `z`.
pub fn poisson_tensor(z: &ReducedMomenta) -> PoissonTensor {
    let n = z.len();
    let mut entries = vec![0.0; n * n];
    for i in 1..=n {
        for j in 1..=n {
            if let Some((sign, m)) = bracket_index(i, j, n) {
                entries[(i - 1) * n + (j - 1)] = sign * z.p(m);
            }
        }
    }
    PoissonTensor { n, entries }
}

/// Rank of the tensor at `z`: 2 iff `|Z_k| > tol`, else 0.
pub fn tensor_rank(z: &ReducedMomenta, tol: f64) -> usize {
    debug_assert!(tol > 0.0);
    if z.z_norm() > tol {
        2
    } else {
        0
    }
}

/// The `k` Casimir invariants of the structure, as exact coefficient maps.
#[derive(Clone, Debug)]
pub struct CasimirSet {
    dim: JetDim,
    polys: Vec<MultiPoly>,
}

impl CasimirSet {
    #[inline]
    pub fn dim(&self) -> JetDim {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.polys.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// `C_i` for `1 <= i <= k`.
    #[inline]
    pub fn get(&self, i: usize) -> &MultiPoly {
        &self.polys[i - 1]
    }

    pub fn polys(&self) -> &[MultiPoly] {
        &self.polys
    }

    pub fn eval_all(&self, z: &ReducedMomenta) -> Vec<f64> {
        self.polys.iter().map(|c| c.eval(z.as_slice())).collect()
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, v| acc * v as f64)
}

/// Builds the `k` Casimirs by the shift-flow construction.
pub fn casimirs(dim: JetDim) -> CasimirSet {
    let k = dim.k();
    let n = dim.algebra();
    let mut polys = Vec::with_capacity(k);
    // C_1 = P_{k+2}
    let mut c1 = MultiPoly::new(n);
    c1.add_term(1.0, &[(n, 1)]);
    polys.push(c1);
    for i in 2..=k {
        let mut c = MultiPoly::new(n);
        for m in 0..=i - 2 {
            let coef = if m % 2 == 0 { 1.0 } else { -1.0 } / factorial(m);
            c.add_term(
                coef,
                &[
                    (n, (i - 1 - m) as u32),
                    (k + 2 - i + m, 1),
                    (k + 1, m as u32),
                ],
            );
        }
        let tail_sign = if (i - 1) % 2 == 0 { 1.0 } else { -1.0 };
        c.add_term(tail_sign * (i - 1) as f64 / factorial(i), &[(k + 1, i as u32)]);
        polys.push(c);
    }
    CasimirSet { dim, polys }
}

/// The published closed form for `C_i`, kept verbatim as a coefficient map:
///
/// ```text
/// C_i = P_{k+2}^{i-1} P_{k+2-i}
///       + sum_{j=1}^{i-2} (-1)^j P_{k+2}^{i-(j+1)} P_{k+2-j} P_{k+1}^j / j!
///       + (-1)^{i-1} P_{k+1}^i / ((i-2)! i)
/// ```
///
/// For `i = 2` (empty sum) this agrees with the constructive family; for
/// `i >= 3` it does not annihilate the tensor — the defect is measurable
/// with [`annihilation_defect`] and is reported, not patched.
pub fn casimir_paper_poly(i: usize, dim: JetDim) -> Result<MultiPoly> {
    let k = dim.k();
    if !(2..=k).contains(&i) {
        return Err(Error::IndexOutOfRange { index: i, len: k });
    }
    let n = dim.algebra();
    let mut c = MultiPoly::new(n);
    c.add_term(1.0, &[(n, (i - 1) as u32), (k + 2 - i, 1)]);
    for j in 1..=i - 2 {
        let coef = if j % 2 == 0 { 1.0 } else { -1.0 } / factorial(j);
        c.add_term(
            coef,
            &[(n, (i - j - 1) as u32), (k + 2 - j, 1), (k + 1, j as u32)],
        );
    }
    let tail_sign = if (i - 1) % 2 == 0 { 1.0 } else { -1.0 };
    c.add_term(
        tail_sign / (factorial(i - 2) * i as f64),
        &[(k + 1, i as u32)],
    );
    Ok(c)
}

/// Evaluates the published formula at `z` (hypothesis `P_{k+2} != 0` is the
/// caller's; the polynomial itself is defined everywhere).
pub fn casimir_paper(i: usize, z: &ReducedMomenta) -> Result<f64> {
    let poly = casimir_paper_poly(i, z.dim())?;
    Ok(poly.eval(z.as_slice()))
}

fn norm(v: &[f64]) -> f64 {
    fp::sqrt(v.iter().map(|x| x * x).sum())
}

/// `|B(z) * grad C(z)|` with the exact polynomial gradient; zero (to
/// rounding) iff `C` is a Casimir at `z`.
pub fn annihilation_defect(c: &MultiPoly, z: &ReducedMomenta) -> f64 {
    let grad = c.gradient_at(z.as_slice());
    norm(&poisson_tensor(z).apply(&grad))
}

/// Finite-difference variant for arbitrary functions of the momenta
/// (central differences, relative step `1e-6`).
pub fn annihilation_defect_fd<F: Fn(&[f64]) -> f64>(c: F, z: &ReducedMomenta) -> f64 {
    let zs = z.as_slice();
    let n = zs.len();
    let mut grad = vec![0.0; n];
    let mut buf = zs.to_vec();
    for v in 0..n {
        let h = 1e-6 * (1.0 + fp::abs(zs[v]));
        buf[v] = zs[v] + h;
        let fp_ = c(&buf);
        buf[v] = zs[v] - h;
        let fm = c(&buf);
        buf[v] = zs[v];
        grad[v] = (fp_ - fm) / (2.0 * h);
    }
    norm(&poisson_tensor(z).apply(&grad))
}
