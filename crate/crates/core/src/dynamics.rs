//! Integration of the geodesic flow: the reduced momentum equations plus the
//! horizontal position lift.
//!
//! The flow in arclength `s` is
//!
//! ```text
//! x' = P_1,  u_k' = P_2,  u_{i-1}' = u_i P_1,  y' = u_1 P_1,
//! P_1' = P_3 P_2,  P_2' = -P_3 P_1,  P_i' = -P_1 P_{i+1},  P_{k+2}' = 0,
//! ```
//!
//! augmented by the heading `theta' = kappa = -P_3`. Steps are taken with a
//! Dormand-Prince 5(4) pair; output samples come from its quartic dense
//! interpolant, never from step forcing. The heading is re-anchored to
//! `atan2(P_2, P_1)` modulo `2 pi` at every accepted step and at every
//! emitted sample, which keeps it continuous without secular drift. Every
//! sample records `H` and all Casimir values; the arc carries the maximum
//! relative drift seen.

use crate::fp;
use crate::jet::{hamiltonian, horizontal_velocity, JetDim, JetPoint, JetTangent, ReducedMomenta};
use crate::poisson::{casimirs, CasimirSet};
use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

/// Instantaneous state of the flow.
#[derive(Clone, Debug)]
pub struct GeodesicState {
    pub q: JetPoint,
    pub p: ReducedMomenta,
    pub s: f64,
}

impl GeodesicState {
    pub fn new(q: JetPoint, p: ReducedMomenta, s: f64) -> Result<Self> {
        if q.k() + 2 != p.len() {
            return Err(Error::DimensionMismatch {
                expected: q.k() + 2,
                got: p.len(),
            });
        }
        Ok(GeodesicState { q, p, s })
    }
}

/// One output sample of an integrated arc.
#[derive(Clone, Debug)]
pub struct ArcSample {
    pub s: f64,
    pub q: JetPoint,
    pub p: ReducedMomenta,
    /// Continuously unwrapped heading; `(cos, sin) theta = (P_1, P_2)/sqrt(2H)`.
    pub theta: f64,
    /// Signed curvature of the planar projection, `kappa = -P_3`.
    pub kappa: f64,
    pub h: f64,
    pub casimir_values: Vec<f64>,
}

/// An arclength-sampled trajectory with invariant diagnostics.
#[derive(Clone, Debug)]
pub struct GeodesicArc {
    pub dim: JetDim,
    /// Samples with strictly increasing `s` (backward integrations are
    /// reversed on output).
    pub samples: Vec<ArcSample>,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// `max |v - v_0| / max(1, |v_0|)` over samples, for `v` in
    /// `{H, C_1, ..., C_k}`.
    pub max_invariant_drift: f64,
}

impl GeodesicArc {
    pub fn first(&self) -> &ArcSample {
        self.samples.first().expect("arc is nonempty")
    }

    pub fn last(&self) -> &ArcSample {
        self.samples.last().expect("arc is nonempty")
    }

    pub fn s_range(&self) -> (f64, f64) {
        (self.first().s, self.last().s)
    }

    /// Interpolates a sample-derived quantity at `s` with a 4-point Lagrange
    /// stencil on the output grid; `None` outside the sampled range.
    pub fn interp_with<F: Fn(&ArcSample) -> f64>(&self, s: f64, f: F) -> Option<f64> {
        let n = self.samples.len();
        if n < 2 {
            return None;
        }
        let (s0, s1) = self.s_range();
        if s < s0 - 1e-12 || s > s1 + 1e-12 {
            return None;
        }
        let mut lo = match self
            .samples
            .binary_search_by(|smp| smp.s.partial_cmp(&s).expect("finite s"))
        {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        };
        lo = lo.saturating_sub(1).min(n.saturating_sub(4));
        let window = &self.samples[lo..(lo + 4).min(n)];
        let mut acc = 0.0;
        for (i, si) in window.iter().enumerate() {
            let mut w = 1.0;
            for (j, sj) in window.iter().enumerate() {
                if i != j {
                    w *= (s - sj.s) / (si.s - sj.s);
                }
            }
            acc += w * f(si);
        }
        Some(acc)
    }

    /// Planar projection `(x, u_k)` at `s` by interpolation.
    pub fn interp_planar(&self, s: f64) -> Option<(f64, f64)> {
        let x = self.interp_with(s, |smp| smp.q.x)?;
        let u = self.interp_with(s, |smp| *smp.q.u.last().expect("k >= 1"))?;
        Some((x, u))
    }
}

/// How output samples are placed on `[s0, sEnd]`.
#[derive(Clone, Copy, Debug)]
pub enum OutputGrid {
    /// Uniform spacing (the final point is always included).
    Step(f64),
    /// A fixed number of uniform intervals (`n + 1` samples).
    Count(usize),
}

#[derive(Clone, Copy, Debug)]
pub struct IntegrationOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub grid: OutputGrid,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        IntegrationOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            grid: OutputGrid::Count(1000),
        }
    }
}

/// Right-hand side of the reduced momentum equations.
pub fn reduced_rhs(p: &ReducedMomenta) -> ReducedMomenta {
    let n = p.len();
    let k = n - 2;
    let mut d = vec![0.0; n];
    d[0] = p.p(3) * p.p(2);
    d[1] = -p.p(3) * p.p(1);
    for i in 3..=k + 1 {
        d[i - 1] = -p.p(1) * p.p(i + 1);
    }
    ReducedMomenta::new(d).expect("same dimension as input")
}

/// Position part of the flow: the horizontal lift `P_1 X_1 + P_2 X_2`.
pub fn position_rhs(q: &JetPoint, p: &ReducedMomenta) -> JetTangent {
    horizontal_velocity(q, p.p(1), p.p(2))
}

// Flat state layout: x, u_1..u_k, y, P_1..P_{k+2}, theta.
fn pack(q: &JetPoint, p: &ReducedMomenta, theta: f64) -> Vec<f64> {
    let k = q.k();
    let mut y = Vec::with_capacity(2 * k + 5);
    y.push(q.x);
    y.extend_from_slice(&q.u);
    y.push(q.y);
    y.extend_from_slice(p.as_slice());
    y.push(theta);
    y
}

fn unpack(y: &[f64], k: usize) -> (JetPoint, ReducedMomenta, f64) {
    let q = JetPoint::new(y[0], y[1..=k].to_vec(), y[k + 1]);
    let p = ReducedMomenta::new(y[k + 2..2 * k + 4].to_vec()).expect("k+2 >= 3");
    (q, p, y[2 * k + 4])
}

fn rhs(y: &[f64], dy: &mut [f64], k: usize) {
    let p1 = y[k + 2];
    let p2 = y[k + 3];
    let p3 = y[k + 4];
    dy[0] = p1;
    for i in 2..=k {
        dy[i - 1] = y[i] * p1; // u_{i-1}' = u_i P_1
    }
    dy[k] = p2; // u_k' = P_2
    dy[k + 1] = y[1] * p1; // y' = u_1 P_1
    dy[k + 2] = p3 * p2;
    dy[k + 3] = -p3 * p1;
    for i in 3..=k + 1 {
        dy[k + 1 + i] = -p1 * y[k + 2 + i]; // P_i' = -P_1 P_{i+1}
    }
    dy[2 * k + 3] = 0.0; // P_{k+2}' = 0
    dy[2 * k + 4] = -p3; // theta' = kappa
}

// Dormand-Prince 5(4) coefficients (the system is autonomous, so the stage
// abscissas never appear).
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// e = b5 - b4 (error weights)
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// dense output weights
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

struct DenseStep {
    r1: Vec<f64>,
    r2: Vec<f64>,
    r3: Vec<f64>,
    r4: Vec<f64>,
    r5: Vec<f64>,
}

impl DenseStep {
    fn eval(&self, theta: f64, out: &mut [f64]) {
        let t1 = 1.0 - theta;
        for i in 0..out.len() {
            out[i] = self.r1[i]
                + theta
                    * (self.r2[i] + t1 * (self.r3[i] + theta * (self.r4[i] + t1 * self.r5[i])));
        }
    }
}

fn re_anchor_theta(y: &mut [f64], k: usize) {
    let p1 = y[k + 2];
    let p2 = y[k + 3];
    if p1 == 0.0 && p2 == 0.0 {
        return;
    }
    let a = fp::atan2(p2, p1);
    let turns = fp::round((y[2 * k + 4] - a) / (2.0 * PI));
    y[2 * k + 4] = a + 2.0 * PI * turns;
}

/// Integrates the flow from `init` to `s_end`, sampling on the output grid.
pub fn integrate(
    init: &GeodesicState,
    s_end: f64,
    opts: &IntegrationOptions,
) -> Result<GeodesicArc> {
    integrate_impl(init, s_end, opts, None)
}

/// Like [`integrate`], applying `post_step` to the flat state
/// `(x, u_1..u_k, y, P_1..P_{k+2}, theta)` after every accepted step.
/// Synthesis uses this to project momenta back onto the profile manifold on
/// long asymptotic arcs, where the transverse saddle instability would
/// otherwise amplify the local error exponentially.
pub(crate) fn integrate_impl(
    init: &GeodesicState,
    s_end: f64,
    opts: &IntegrationOptions,
    post_step: Option<&dyn Fn(&mut [f64])>,
) -> Result<GeodesicArc> {
    if !(opts.rel_tol > 0.0) || !(opts.abs_tol > 0.0) {
        return Err(Error::InvalidParameter(
            "relTol and absTol must be positive".into(),
        ));
    }
    if s_end == init.s {
        return Err(Error::InvalidParameter("sEnd equals initial s".into()));
    }

    let k = init.q.k();
    let dim = init.p.dim();
    let cas = casimirs(dim);
    let span = s_end - init.s;
    let dir = if span > 0.0 { 1.0 } else { -1.0 };

    // Output grid, in integration direction.
    let grid: Vec<f64> = match opts.grid {
        OutputGrid::Step(h) => {
            if !(h > 0.0) {
                return Err(Error::InvalidParameter("grid step must be positive".into()));
            }
            let mut g = Vec::new();
            let mut j = 0usize;
            loop {
                let s = init.s + dir * h * j as f64;
                if (s - s_end) * dir >= -1e-12 * fp::abs(span) {
                    break;
                }
                g.push(s);
                j += 1;
            }
            g.push(s_end);
            g
        }
        OutputGrid::Count(n) => {
            if n == 0 {
                return Err(Error::InvalidParameter("grid count must be >= 1".into()));
            }
            (0..=n)
                .map(|j| init.s + span * j as f64 / n as f64)
                .collect()
        }
    };

    let theta0 = fp::atan2(init.p.p(2), init.p.p(1));
    let mut y = pack(&init.q, &init.p, theta0);
    let n = y.len();
    let mut s = init.s;

    let invariants0 = {
        let mut v = Vec::with_capacity(1 + cas.len());
        v.push(hamiltonian(&init.p));
        v.extend(cas.eval_all(&init.p));
        v
    };
    let mut max_drift = 0.0f64;
    let mut samples: Vec<ArcSample> = Vec::with_capacity(grid.len());
    let mut next_grid = 0usize;

    let emit = |state: &[f64], s_at: f64, max_drift: &mut f64, samples: &mut Vec<ArcSample>| {
        let mut st = state.to_vec();
        re_anchor_theta(&mut st, k);
        let (q, p, theta) = unpack(&st, k);
        let h_val = hamiltonian(&p);
        let cvals = cas.eval_all(&p);
        for (idx, v) in core::iter::once(h_val).chain(cvals.iter().copied()).enumerate() {
            let v0 = invariants0[idx];
            let drift = fp::abs(v - v0) / fp::abs(v0).max(1.0);
            if drift > *max_drift {
                *max_drift = drift;
            }
        }
        samples.push(ArcSample {
            s: s_at,
            kappa: -p.p(3),
            theta,
            q,
            p,
            h: h_val,
            casimir_values: cvals,
        });
    };

    // First sample is the initial state itself.
    emit(&y, s, &mut max_drift, &mut samples);
    next_grid += 1;

    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut ytmp = vec![0.0; n];
    let mut y1 = vec![0.0; n];
    rhs(&y, &mut k1, k);

    // Initial step size: second-derivative heuristic.
    let mut h = {
        let sc = |i: usize| opts.abs_tol + opts.rel_tol * fp::abs(y[i]);
        let d0: f64 = (0..n).map(|i| (y[i] / sc(i)) * (y[i] / sc(i))).sum::<f64>();
        let d1: f64 = (0..n).map(|i| (k1[i] / sc(i)) * (k1[i] / sc(i))).sum::<f64>();
        let (d0, d1) = (fp::sqrt(d0 / n as f64), fp::sqrt(d1 / n as f64));
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        h0.min(fp::abs(span))
    };

    let mut rejected = false;
    let mut steps = 0usize;
    const MAX_STEPS: usize = 50_000_000;

    while (s - s_end) * dir < 0.0 {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::InvalidParameter("step budget exceeded".into()));
        }
        if h < 1e-14 * fp::abs(s).max(1.0) {
            return Err(Error::StepSizeUnderflow { s });
        }
        let mut hs = dir * h;
        if (s + hs - s_end) * dir > 0.0 {
            hs = s_end - s;
        }

        for i in 0..n {
            ytmp[i] = y[i] + hs * A21 * k1[i];
        }
        rhs(&ytmp, &mut k2, k);
        for i in 0..n {
            ytmp[i] = y[i] + hs * (A31 * k1[i] + A32 * k2[i]);
        }
        rhs(&ytmp, &mut k3, k);
        for i in 0..n {
            ytmp[i] = y[i] + hs * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        rhs(&ytmp, &mut k4, k);
        for i in 0..n {
            ytmp[i] = y[i] + hs * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        rhs(&ytmp, &mut k5, k);
        for i in 0..n {
            ytmp[i] =
                y[i] + hs * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        rhs(&ytmp, &mut k6, k);
        for i in 0..n {
            y1[i] = y[i]
                + hs * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        rhs(&y1, &mut k7, k);

        let mut err_acc = 0.0;
        let mut finite = true;
        for i in 0..n {
            if !y1[i].is_finite() {
                finite = false;
                break;
            }
            let e = hs
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.abs_tol + opts.rel_tol * fp::abs(y[i]).max(fp::abs(y1[i]));
            err_acc += (e / sc) * (e / sc);
        }
        let err = fp::sqrt(err_acc / n as f64);

        if !finite || !err.is_finite() {
            if h < 1e-13 * fp::abs(s).max(1.0) {
                return Err(Error::NonFiniteState { s });
            }
            h *= 0.1;
            rejected = true;
            continue;
        }

        if err <= 1.0 {
            // accepted: serve grid points inside (s, s + hs]
            let dense = {
                let mut r1 = vec![0.0; n];
                let mut r2 = vec![0.0; n];
                let mut r3 = vec![0.0; n];
                let mut r4 = vec![0.0; n];
                let mut r5 = vec![0.0; n];
                for i in 0..n {
                    r1[i] = y[i];
                    let dy = y1[i] - y[i];
                    r2[i] = dy;
                    let bspl = hs * k1[i] - dy;
                    r3[i] = bspl;
                    r4[i] = dy - hs * k7[i] - bspl;
                    r5[i] = hs
                        * (D1 * k1[i]
                            + D3 * k3[i]
                            + D4 * k4[i]
                            + D5 * k5[i]
                            + D6 * k6[i]
                            + D7 * k7[i]);
                }
                DenseStep { r1, r2, r3, r4, r5 }
            };
            let s_new = s + hs;
            while next_grid < grid.len() {
                let sg = grid[next_grid];
                let past_end = (sg - s_new) * dir > 0.0;
                if past_end {
                    break;
                }
                if (sg - s_new) * dir == 0.0 {
                    emit(&y1, sg, &mut max_drift, &mut samples);
                } else {
                    dense.eval((sg - s) / hs, &mut ytmp);
                    emit(&ytmp, sg, &mut max_drift, &mut samples);
                }
                next_grid += 1;
            }

            s = s_new;
            core::mem::swap(&mut y, &mut y1);
            re_anchor_theta(&mut y, k);
            if let Some(project) = post_step {
                project(&mut y);
                rhs(&y, &mut k7, k); // state moved: refresh the FSAL stage
            }
            core::mem::swap(&mut k1, &mut k7); // FSAL
            let fac = (0.9 * fp::powf(err.max(1e-16), -0.2))
                .min(if rejected { 1.0 } else { 10.0 })
                .max(0.2);
            h *= fac;
            rejected = false;
        } else {
            let fac = (0.9 * fp::powf(err, -0.2)).max(0.2);
            h *= fac;
            rejected = true;
        }
    }

    // Guard against a grid point equal to s_end left unserved by rounding.
    if next_grid < grid.len() {
        emit(&y, s_end, &mut max_drift, &mut samples);
    }

    if dir < 0.0 {
        samples.reverse();
    }

    Ok(GeodesicArc {
        dim,
        samples,
        rel_tol: opts.rel_tol,
        abs_tol: opts.abs_tol,
        max_invariant_drift: max_drift,
    })
}

/// `(s, x, kappa)` along the arc, with `kappa = -P_3`.
pub fn curvature_along(arc: &GeodesicArc) -> Vec<(f64, f64, f64)> {
    arc.samples
        .iter()
        .map(|smp| (smp.s, smp.q.x, smp.kappa))
        .collect()
}

/// Maximum deviation between `kappa = -P_3` and the discrete geometric
/// curvature `d theta / ds` of the planar projection (central differences on
/// the output grid). Samples with `P_1^2 + P_2^2` near zero are skipped: the
/// projection is degenerate there while `kappa` itself stays defined.
pub fn geometric_curvature_residual(arc: &GeodesicArc) -> f64 {
    let smp = &arc.samples;
    let mut worst = 0.0f64;
    for w in smp.windows(3) {
        let (a, b, c) = (&w[0], &w[1], &w[2]);
        if fp::hypot(b.p.p(1), b.p.p(2)) < 1e-9 {
            continue;
        }
        let dtheta = (c.theta - a.theta) / (c.s - a.s);
        worst = worst.max(fp::abs(b.kappa - dtheta));
    }
    worst
}

/// The Casimir set used for a given arc's diagnostics.
pub fn arc_casimirs(arc: &GeodesicArc) -> CasimirSet {
    casimirs(arc.dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::JetDim;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn state(k: usize, p: Vec<f64>) -> GeodesicState {
        let dim = JetDim::new(k).unwrap();
        GeodesicState::new(
            JetPoint::origin(dim),
            ReducedMomenta::new(p).unwrap(),
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn reduced_rhs_examples() {
        let p = ReducedMomenta::new(vec![1.0, 0.0, 1.0]).unwrap();
        assert_eq!(reduced_rhs(&p).as_slice(), &[0.0, -1.0, 0.0]);

        // relative equilibrium: P_1 = P_3 = 0
        let p = ReducedMomenta::new(vec![0.0, 0.7, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(reduced_rhs(&p).as_slice(), &[0.0; 5]);

        // vertical-line momenta are stationary
        let p = ReducedMomenta::new(vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        assert_eq!(reduced_rhs(&p).as_slice(), &[0.0; 4]);
    }

    #[test]
    fn position_rhs_examples() {
        let dim = JetDim::new(2).unwrap();
        let mut q = JetPoint::origin(dim);
        q.u[0] = 3.0; // u_1 = 3
        let p = ReducedMomenta::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let v = position_rhs(&q, &p);
        assert_eq!(v.to_canonical(), vec![1.0, 0.0, 0.0, 3.0]);

        let p = ReducedMomenta::new(vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        let v = position_rhs(&q, &p);
        assert_eq!(v.to_canonical(), vec![0.0, 1.0, 0.0, 0.0]);

        let p = ReducedMomenta::new(vec![0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(position_rhs(&q, &p).to_canonical(), vec![0.0; 4]);
    }

    #[test]
    fn heisenberg_circle_matches_closed_form() {
        // P = (1, 0, -1): P_2(s) = sin s, so (x, u_1) = (sin s, 1 - cos s).
        let arc = integrate(
            &state(1, vec![1.0, 0.0, -1.0]),
            2.0 * PI,
            &IntegrationOptions::default(),
        )
        .unwrap();
        for smp in &arc.samples {
            let s = smp.s;
            assert!((smp.q.x - s.sin()).abs() < 1e-8, "x at s={s}");
            assert!((smp.q.u[0] - (1.0 - s.cos())).abs() < 1e-8, "u_1 at s={s}");
        }
        // closes to the start point
        let last = arc.last();
        assert!(last.q.x.abs() < 1e-8);
        assert!(last.q.u[0].abs() < 1e-8);

        // P = (1, 0, +1) is the mirror circle (sin s, cos s - 1).
        let arc = integrate(
            &state(1, vec![1.0, 0.0, 1.0]),
            2.0 * PI,
            &IntegrationOptions::default(),
        )
        .unwrap();
        for smp in &arc.samples {
            let s = smp.s;
            assert!((smp.q.x - s.sin()).abs() < 1e-8);
            assert!((smp.q.u[0] - (s.cos() - 1.0)).abs() < 1e-8);
        }
    }

    #[test]
    fn vertical_line_is_rigid() {
        for k in 1..=4 {
            let mut p = vec![0.0; k + 2];
            p[1] = 1.0;
            let arc = integrate(&state(k, p), 10.0, &IntegrationOptions::default()).unwrap();
            for smp in &arc.samples {
                assert_eq!(smp.q.x, 0.0);
                assert!((smp.q.u[k - 1] - smp.s).abs() < 1e-12);
                for j in 0..k.saturating_sub(1) {
                    assert_eq!(smp.q.u[j], 0.0);
                }
                assert_eq!(smp.q.y, 0.0);
                assert_eq!(smp.kappa, 0.0);
            }
        }
    }

    #[test]
    fn invariants_conserved_on_random_arcs() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for k in 1..=4 {
            for _ in 0..3 {
                let theta0: f64 = rng.gen_range(0.0..2.0 * PI);
                let mut p = vec![theta0.cos(), theta0.sin()];
                for _ in 0..k {
                    p.push(rng.gen_range(-1.0..1.0));
                }
                let arc = integrate(
                    &state(k, p),
                    100.0,
                    &IntegrationOptions {
                        grid: OutputGrid::Count(2000),
                        ..Default::default()
                    },
                )
                .unwrap();
                assert!(
                    arc.max_invariant_drift < 1e-8,
                    "k={k} drift={:e}",
                    arc.max_invariant_drift
                );
            }
        }
    }

    #[test]
    fn unit_speed_along_arclength_arcs() {
        // |(x', u_k')| = 1 at every sample when H(init) = 1/2
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for k in 1..=4 {
            let theta0: f64 = rng.gen_range(0.0..2.0 * PI);
            let mut p = vec![theta0.cos(), theta0.sin()];
            for _ in 0..k {
                p.push(rng.gen_range(-1.0..1.0));
            }
            let arc = integrate(
                &state(k, p),
                50.0,
                &IntegrationOptions {
                    rel_tol: 1e-12,
                    abs_tol: 1e-12,
                    grid: OutputGrid::Count(1000),
                },
            )
            .unwrap();
            for smp in &arc.samples {
                let v = fp::hypot(smp.p.p(1), smp.p.p(2));
                assert!((v - 1.0).abs() < 1e-9, "k={k} |v-1|={:e}", (v - 1.0).abs());
            }
        }
    }

    #[test]
    fn heading_matches_momenta_direction() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut p = vec![0.8, -0.6];
        for _ in 0..3 {
            p.push(rng.gen_range(-1.0..1.0));
        }
        let arc = integrate(&state(3, p), 40.0, &IntegrationOptions::default()).unwrap();
        for smp in &arc.samples {
            let h2 = fp::sqrt(2.0 * smp.h);
            assert!((smp.theta.cos() - smp.p.p(1) / h2).abs() < 1e-9);
            assert!((smp.theta.sin() - smp.p.p(2) / h2).abs() < 1e-9);
            assert_eq!(smp.kappa, -smp.p.p(3));
        }
        // heading is continuous: no jumps close to 2 pi
        for w in arc.samples.windows(2) {
            assert!((w[1].theta - w[0].theta).abs() < 1.0);
        }
    }

    #[test]
    fn geometric_curvature_cross_check() {
        // circle: kappa = 1 exactly, FD residual bounded by grid error
        let arc = integrate(
            &state(1, vec![1.0, 0.0, -1.0]),
            2.0 * PI,
            &IntegrationOptions {
                grid: OutputGrid::Count(4000),
                ..Default::default()
            },
        )
        .unwrap();
        let g: f64 = 2.0 * PI / 4000.0;
        assert!(geometric_curvature_residual(&arc) < (10.0 * g * g).max(1e-6));

        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let mut p = vec![0.6, 0.8];
        for _ in 0..4 {
            p.push(rng.gen_range(-0.5..0.5));
        }
        let arc = integrate(
            &state(4, p),
            20.0,
            &IntegrationOptions {
                grid: OutputGrid::Count(20_000),
                ..Default::default()
            },
        )
        .unwrap();
        let g: f64 = 20.0 / 20_000.0;
        assert!(geometric_curvature_residual(&arc) < (10.0 * g * g).max(1e-6));
    }

    #[test]
    fn heisenberg_p3_constant_and_circle_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..5 {
            let theta0: f64 = rng.gen_range(0.0..2.0 * PI);
            let p3: f64 = rng.gen_range(0.3..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let arc = integrate(
                &state(1, vec![theta0.cos(), theta0.sin(), p3]),
                15.0,
                &IntegrationOptions::default(),
            )
            .unwrap();
            for smp in &arc.samples {
                assert!((smp.p.p(3) - p3).abs() < 1e-10);
            }
            // fit a circle through the planar samples (Kasa fit)
            let pts: Vec<(f64, f64)> = arc
                .samples
                .iter()
                .map(|s| (s.q.x, s.q.u[0]))
                .collect();
            let (cx, cu, r) = fit_circle(&pts);
            assert!((r - 1.0 / p3.abs()).abs() < 1e-7, "radius {r} vs {}", 1.0 / p3.abs());
            for (x, u) in pts {
                assert!((fp::hypot(x - cx, u - cu) - r).abs() < 1e-7);
            }
        }
    }

    fn fit_circle(pts: &[(f64, f64)]) -> (f64, f64, f64) {
        // least squares on x^2+u^2 + D x + E u + F = 0
        let mut ata = [[0.0f64; 3]; 3];
        let mut atb = [0.0f64; 3];
        for &(x, u) in pts {
            let row = [x, u, 1.0];
            let b = -(x * x + u * u);
            for i in 0..3 {
                for j in 0..3 {
                    ata[i][j] += row[i] * row[j];
                }
                atb[i] += row[i] * b;
            }
        }
        // Gaussian elimination
        for col in 0..3 {
            let piv = (col..3)
                .max_by(|&a, &b| ata[a][col].abs().partial_cmp(&ata[b][col].abs()).unwrap())
                .unwrap();
            ata.swap(col, piv);
            atb.swap(col, piv);
            for r in col + 1..3 {
                let f = ata[r][col] / ata[col][col];
                for c in col..3 {
                    ata[r][c] -= f * ata[col][c];
                }
                atb[r] -= f * atb[col];
            }
        }
        let mut sol = [0.0f64; 3];
        for r in (0..3).rev() {
            let mut v = atb[r];
            for c in r + 1..3 {
                v -= ata[r][c] * sol[c];
            }
            sol[r] = v / ata[r][r];
        }
        let (d, e, f) = (sol[0], sol[1], sol[2]);
        let cx = -d / 2.0;
        let cu = -e / 2.0;
        (cx, cu, fp::sqrt(cx * cx + cu * cu - f))
    }

    #[test]
    fn horizontality_of_sampled_positions() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let mut p = vec![0.6, 0.8];
        for _ in 0..3 {
            p.push(rng.gen_range(-0.6..0.6));
        }
        let count = 10_000usize;
        let arc = integrate(
            &state(3, p),
            10.0,
            &IntegrationOptions {
                grid: OutputGrid::Count(count),
                ..Default::default()
            },
        )
        .unwrap();
        let k = 3;
        let h = 10.0 / count as f64;
        let tol = (10.0 * h * h).max(1e-6);
        for w in arc.samples.windows(3) {
            let (a, b, c) = (&w[0], &w[1], &w[2]);
            let dx = (c.q.x - a.q.x) / (2.0 * h);
            let dy = (c.q.y - a.q.y) / (2.0 * h);
            assert!((dy - b.q.u[0] * dx).abs() < tol);
            for i in 2..=k {
                let du = (c.q.u[i - 2] - a.q.u[i - 2]) / (2.0 * h);
                assert!((du - b.q.u[i - 1] * dx).abs() < tol);
            }
        }
    }

    #[test]
    fn backward_integration_and_grid_variants() {
        let arc = integrate(
            &state(1, vec![1.0, 0.0, -1.0]),
            -3.0,
            &IntegrationOptions {
                grid: OutputGrid::Step(0.01),
                ..Default::default()
            },
        )
        .unwrap();
        // ascending s, covering [-3, 0]
        assert!(arc.samples.windows(2).all(|w| w[0].s < w[1].s));
        assert_eq!(arc.first().s, -3.0);
        assert_eq!(arc.last().s, 0.0);
        for smp in &arc.samples {
            assert!((smp.q.x - smp.s.sin()).abs() < 1e-8);
        }
        assert!(arc.max_invariant_drift < 1e-10);
    }

    #[test]
    fn rejects_bad_parameters() {
        let st = state(1, vec![1.0, 0.0, 0.0]);
        assert!(integrate(&st, 0.0, &IntegrationOptions::default()).is_err());
        let bad = IntegrationOptions {
            rel_tol: 0.0,
            ..Default::default()
        };
        assert!(integrate(&st, 1.0, &bad).is_err());
    }

    #[test]
    fn interpolation_matches_closed_form() {
        let arc = integrate(
            &state(1, vec![1.0, 0.0, -1.0]),
            6.0,
            &IntegrationOptions {
                grid: OutputGrid::Count(2000),
                ..Default::default()
            },
        )
        .unwrap();
        for j in 0..50 {
            let s = 0.11 + j as f64 * 0.117;
            let (x, u) = arc.interp_planar(s).unwrap();
            assert!((x - s.sin()).abs() < 1e-8);
            assert!((u - (1.0 - s.cos())).abs() < 1e-8);
        }
        assert!(arc.interp_planar(-0.5).is_none());
        assert!(arc.interp_planar(6.5).is_none());
    }
}
