//! Band structure and motion classification of a slope profile `F`.
//!
//! A unit-speed planar curve with `du/ds = F(x)` can only exist over
//! `F^{-1}([-1, 1])`, a union of closed intervals bounded by roots of
//! `F = +-1`. Endpoints where `F' != 0` are turning points; endpoints where
//! `F' = 0` are relative equilibria reached in infinite arclength. The
//! period of a fully regular interval is
//!
//! ```text
//! L = int_{x0}^{x1} 2 dx / sqrt(1 - F^2),     tau likewise with numerator 2F,
//! ```
//!
//! and the action `I = 2 int sqrt(2H - F^2) dx` satisfies `dI/dH = L` at
//! `H = 1/2`. The quadrature substitutes `x = x0 + (x1-x0) sin^2 phi` after
//! deflating the inverse-square-root endpoint roots, which leaves an
//! analytic integrand; tanh-sinh panels take over near interior tangencies.

pub mod quad;
pub mod sturm;

use crate::dynamics::GeodesicArc;
use crate::fp;
use crate::poly::Polynomial;
use crate::synthesis::FProfile;
use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
use quad::{gauss_legendre_adaptive, integrate_auto, tanh_sinh, QuadResult};
use sturm::real_roots_in;

/// Endpoint classification: `Regular` is a turning point (`F' != 0`),
/// `Critical` a relative equilibrium (`F' = 0`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndpointKind {
    Regular,
    Critical,
}

/// One endpoint of a band interval.
///
/// `multiplicity` is the root order of `F - level`; a value of 0 marks a
/// synthetic endpoint (window clip, or the whole-window interval of a
/// constant `|F| < 1`) where `F` does not actually reach `level`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BandEndpoint {
    pub x: f64,
    /// The level `+-1` hit at this endpoint.
    pub level: f64,
    pub kind: EndpointKind,
    pub multiplicity: usize,
}

impl BandEndpoint {
    pub fn is_synthetic(&self) -> bool {
        self.multiplicity == 0
    }
}

/// A maximal interval of `F^{-1}([-1, 1])` (interior tangencies split).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BandInterval {
    pub x0: BandEndpoint,
    pub x1: BandEndpoint,
}

impl BandInterval {
    pub fn width(&self) -> f64 {
        self.x1.x - self.x0.x
    }
}

/// The band `F^{-1}([-1, 1])` over a window.
#[derive(Clone, Debug)]
pub struct BandDecomposition {
    pub intervals: Vec<BandInterval>,
    /// Isolated band points (outside tangencies); each carries a vertical
    /// line geodesic.
    pub isolated: Vec<f64>,
    /// True when the band holds no interval (empty or isolated points only).
    pub degenerate: bool,
}

/// The three generic motions plus the degenerate vertical line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MotionClass {
    Periodic,
    AsymptoticOneLine,
    AsymptoticTwoLines,
    DegenerateVerticalLine,
}

impl MotionClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            MotionClass::Periodic => "Periodic",
            MotionClass::AsymptoticOneLine => "AsymptoticOneLine",
            MotionClass::AsymptoticTwoLines => "AsymptoticTwoLines",
            MotionClass::DegenerateVerticalLine => "DegenerateVerticalLine",
        }
    }
}

/// Period data of one band interval.
#[derive(Clone, Copy, Debug)]
pub struct PeriodData {
    /// `None` encodes the infinite period of intervals with a critical
    /// endpoint ("takes infinite time to arrive").
    pub length: Option<f64>,
    /// Vertical shift per period; undefined when the period diverges.
    pub tau: Option<f64>,
    /// Action `I` at `H = 1/2`.
    pub action: f64,
    pub quadrature_error: f64,
}

/// Default window: the smallest interval containing all real roots of
/// `F^2 - 1` by Cauchy bounds, padded by 10%.
pub fn default_window(prof: &FProfile) -> (f64, f64) {
    let f = prof.polynomial();
    let b = f
        .add_constant(-1.0)
        .cauchy_root_bound()
        .max(f.add_constant(1.0).cauchy_root_bound());
    if b == 0.0 {
        (-1.0, 1.0)
    } else {
        (-1.1 * b, 1.1 * b)
    }
}

const ENDPOINT_CRITICAL_TOL: f64 = 1e-10;

fn endpoint_kind(prof: &FProfile, x: f64, window_width: f64) -> EndpointKind {
    let fd = prof.eval_deriv(1, x);
    let fdd = if prof.dim().k() >= 2 {
        prof.eval_deriv(2, x)
    } else {
        0.0
    };
    if fp::abs(fd) < ENDPOINT_CRITICAL_TOL * (1.0 + fp::abs(fdd) * window_width) {
        EndpointKind::Critical
    } else {
        EndpointKind::Regular
    }
}

/// Decomposes `F^{-1}([-1, 1])` over the window into intervals and isolated
/// points; fails only for an inverted window.
pub fn decompose_band(prof: &FProfile, window: (f64, f64)) -> Result<BandDecomposition> {
    let (a, b) = window;
    if !(a < b) {
        return Err(Error::WindowInverted { xmin: a, xmax: b });
    }
    let f = prof.polynomial();
    let width = b - a;

    // constant profiles have no root structure
    if f.degree().map_or(true, |d| d == 0) {
        let c = f.eval(0.0);
        if fp::abs(c) < 1.0 {
            let level = if c >= 0.0 { 1.0 } else { -1.0 };
            let mk = |x: f64| BandEndpoint {
                x,
                level,
                kind: EndpointKind::Critical,
                multiplicity: 0,
            };
            return Ok(BandDecomposition {
                intervals: vec![BandInterval {
                    x0: mk(a),
                    x1: mk(b),
                }],
                isolated: Vec::new(),
                degenerate: false,
            });
        }
        return Ok(BandDecomposition {
            intervals: Vec::new(),
            isolated: Vec::new(),
            degenerate: true,
        });
    }

    // breakpoints: all roots of F = +1 and F = -1 inside the window
    let mut marks: Vec<(f64, f64, usize)> = Vec::new();
    for (level, poly) in [(1.0, f.add_constant(-1.0)), (-1.0, f.add_constant(1.0))] {
        for root in real_roots_in(&poly, a, b) {
            marks.push((root.x, level, root.multiplicity));
        }
    }
    marks.sort_by(|p, q| p.0.partial_cmp(&q.0).expect("finite roots"));

    // gap nodes: window edges plus the breakpoints
    let mut nodes: Vec<f64> = Vec::with_capacity(marks.len() + 2);
    nodes.push(a);
    for &(x, _, _) in &marks {
        if x > *nodes.last().expect("nonempty") + 1e-14 * width {
            nodes.push(x);
        }
    }
    if b > *nodes.last().expect("nonempty") + 1e-14 * width {
        nodes.push(b);
    }

    let inside: Vec<bool> = nodes
        .windows(2)
        .map(|w| fp::abs(f.eval(0.5 * (w[0] + w[1]))) < 1.0)
        .collect();

    let mark_at = |x: f64| -> Option<&(f64, f64, usize)> {
        marks
            .iter()
            .find(|(mx, _, _)| fp::abs(mx - x) <= 1e-13 * width.max(1.0))
    };
    let make_endpoint = |x: f64| -> BandEndpoint {
        match mark_at(x) {
            Some(&(mx, level, mult)) => BandEndpoint {
                x: mx,
                level,
                kind: endpoint_kind(prof, mx, width),
                multiplicity: mult,
            },
            None => {
                // window clip: F is strictly inside (-1, 1) here
                let v = f.eval(x);
                BandEndpoint {
                    x,
                    level: if v >= 0.0 { 1.0 } else { -1.0 },
                    kind: endpoint_kind(prof, x, width),
                    multiplicity: 0,
                }
            }
        }
    };

    let mut intervals = Vec::new();
    for (g, w) in nodes.windows(2).enumerate() {
        if inside[g] {
            intervals.push(BandInterval {
                x0: make_endpoint(w[0]),
                x1: make_endpoint(w[1]),
            });
        }
    }

    // isolated band points: marks not adjacent to any inside gap
    let mut isolated = Vec::new();
    for &(x, _, _) in &marks {
        let adjacent_inside = nodes.windows(2).enumerate().any(|(g, w)| {
            inside[g]
                && (fp::abs(w[0] - x) <= 1e-13 * width.max(1.0)
                    || fp::abs(w[1] - x) <= 1e-13 * width.max(1.0))
        });
        if !adjacent_inside {
            isolated.push(x);
        }
    }

    let degenerate = intervals.is_empty();
    Ok(BandDecomposition {
        intervals,
        isolated,
        degenerate,
    })
}

/// Motion class of an interval: periodic iff both endpoints are turning
/// points (`p = F' != 0` there); each critical endpoint contributes an
/// asymptote line.
pub fn classify(interval: &BandInterval) -> MotionClass {
    match (interval.x0.kind, interval.x1.kind) {
        (EndpointKind::Regular, EndpointKind::Regular) => MotionClass::Periodic,
        (EndpointKind::Critical, EndpointKind::Critical) => MotionClass::AsymptoticTwoLines,
        _ => MotionClass::AsymptoticOneLine,
    }
}

/// Divides the band polynomial by both endpoint roots: returns `q >= 0` with
/// `band = (x - r0)(r1 - x) q` on the interval.
fn deflate_band(band: &Polynomial, r0: f64, r1: f64) -> Polynomial {
    let (q0, _rem0) = band.deflate(r0);
    let (q1, _rem1) = q0.deflate(r1);
    q1.scale(-1.0)
}

fn period_integrals(
    prof: &FProfile,
    r0: f64,
    r1: f64,
    tol: f64,
) -> (QuadResult, QuadResult) {
    let f = prof.polynomial();
    let one = Polynomial::constant(1.0);
    let band = one.sub(f).mul(&one.add(f));
    let q = deflate_band(&band, r0, r1);
    let w = r1 - r0;
    let x_of = move |phi: f64| {
        let s = fp::sin(phi);
        r0 + w * s * s
    };
    let l_integrand = {
        let q = q.clone();
        move |phi: f64| 4.0 / fp::sqrt(q.eval(x_of(phi)).max(1e-300))
    };
    let tau_integrand = {
        let q = q.clone();
        let f = f.clone();
        move |phi: f64| {
            let x = x_of(phi);
            4.0 * f.eval(x) / fp::sqrt(q.eval(x).max(1e-300))
        }
    };
    let l = integrate_auto(&l_integrand, 0.0, FRAC_PI_2, 0.5 * tol);
    let tau = integrate_auto(&tau_integrand, 0.0, FRAC_PI_2, 0.5 * tol);
    (l, tau)
}

/// Period `L` and shift `tau` of a band interval, plus the action at
/// `H = 1/2`. A critical endpoint flags `L` infinite and leaves `tau`
/// undefined.
pub fn period_shift(prof: &FProfile, interval: &BandInterval, tol: f64) -> Result<PeriodData> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    if interval.x0.is_synthetic() || interval.x1.is_synthetic() {
        return Err(Error::InvalidParameter(
            "period is undefined for window-clipped intervals".into(),
        ));
    }
    let act = action_impl(prof, interval, 0.5, tol)?;
    if interval.x0.kind == EndpointKind::Critical || interval.x1.kind == EndpointKind::Critical {
        return Ok(PeriodData {
            length: None,
            tau: None,
            action: act.value,
            quadrature_error: act.error,
        });
    }
    let (l, tau) = period_integrals(prof, interval.x0.x, interval.x1.x, tol);
    let err = l.error + tau.error + act.error;
    if !(l.converged && tau.converged) || err > tol {
        return Err(Error::ToleranceNotAchieved {
            requested: tol,
            achieved: err,
        });
    }
    Ok(PeriodData {
        length: Some(l.value),
        tau: Some(tau.value),
        action: act.value,
        quadrature_error: err,
    })
}

fn newton_level_root(g: &Polynomial, start: f64, lo: f64, hi: f64) -> Option<f64> {
    let dg = g.derivative();
    let mut x = start;
    let guard = (hi - lo).max(1.0);
    for _ in 0..80 {
        let v = g.eval(x);
        let d = dg.eval(x);
        if d == 0.0 {
            return None;
        }
        let next = x - v / d;
        if !next.is_finite() || next < lo - guard || next > hi + guard {
            return None;
        }
        if fp::abs(next - x) <= 1e-16 * fp::abs(next).max(1.0) {
            return Some(next);
        }
        x = next;
    }
    Some(x)
}

fn action_impl(
    prof: &FProfile,
    interval: &BandInterval,
    h_energy: f64,
    tol: f64,
) -> Result<QuadResult> {
    if !(h_energy > 0.0) {
        return Err(Error::InvalidParameter("H must be positive".into()));
    }
    let f = prof.polynomial();
    let target = 2.0 * h_energy;
    // g = 2H - F^2
    let g = Polynomial::constant(target).sub(&f.mul(f));
    let (x0, x1) = (interval.x0.x, interval.x1.x);

    let locate = |ep: &BandEndpoint| -> (f64, bool) {
        let scale = 1e-10 * (1.0 + fp::abs(g.eval(ep.x)));
        let _ = scale;
        if fp::abs(g.eval(ep.x)) <= 1e-12 * (1.0 + target) {
            return (ep.x, true);
        }
        if ep.is_synthetic() || ep.kind == EndpointKind::Critical {
            return (ep.x, false);
        }
        match newton_level_root(&g, ep.x, x0, x1) {
            Some(r) => (r, true),
            None => (ep.x, false),
        }
    };

    let (mut a, root_a) = locate(&interval.x0);
    let (mut b, root_b) = locate(&interval.x1);
    if a > b {
        core::mem::swap(&mut a, &mut b);
    }
    if !(a < b) || g.eval(0.5 * (a + b)) <= 0.0 {
        return Err(Error::EmptyAdmissibleSet);
    }

    let result = if root_a && root_b {
        let qh = deflate_band(&g, a, b);
        let w = b - a;
        let integrand = move |phi: f64| {
            let s = fp::sin(phi);
            let x = a + w * s * s;
            let s2 = fp::sin(2.0 * phi);
            w * w * s2 * s2 * fp::sqrt(qh.eval(x).max(0.0))
        };
        gauss_legendre_adaptive(&integrand, 0.0, FRAC_PI_2, tol)
    } else {
        let integrand = |x: f64| 2.0 * fp::sqrt(g.eval(x).max(0.0));
        tanh_sinh(&integrand, a, b, tol)
    };
    Ok(result)
}

/// The loop integral `I = oint P_1 dx = 2 int sqrt(2H - F^2) dx` over the
/// connected admissible sub-interval attached to the band interval.
pub fn action(prof: &FProfile, interval: &BandInterval, h_energy: f64, tol: f64) -> Result<f64> {
    let r = action_impl(prof, interval, h_energy, tol)?;
    if !r.converged && r.error > tol {
        return Err(Error::ToleranceNotAchieved {
            requested: tol,
            achieved: r.error,
        });
    }
    Ok(r.value)
}

/// Central-difference `dI/dH` at `H = 1/2` (step `1e-5`); equals `L` for
/// periodic intervals.
pub fn action_h_derivative(prof: &FProfile, interval: &BandInterval, tol: f64) -> Result<f64> {
    let h = 1e-5;
    let plus = action(prof, interval, 0.5 + h, tol)?;
    let minus = action(prof, interval, 0.5 - h, tol)?;
    Ok((plus - minus) / (2.0 * h))
}

fn householder_lstsq(rows: &[Vec<f64>], rhs: &[f64]) -> Vec<f64> {
    let m = rows.len();
    let n = rows[0].len();
    debug_assert!(m >= n);
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let mut b: Vec<f64> = rhs.to_vec();
    for col in 0..n {
        let mut norm = 0.0;
        for r in col..m {
            norm += a[r][col] * a[r][col];
        }
        let norm = fp::sqrt(norm);
        if norm == 0.0 {
            continue;
        }
        let sign = if a[col][col] >= 0.0 { 1.0 } else { -1.0 };
        let mut v: Vec<f64> = (col..m).map(|r| a[r][col]).collect();
        v[0] += sign * norm;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for c in col..n {
            let dot: f64 = (col..m).map(|r| v[r - col] * a[r][c]).sum();
            let f = 2.0 * dot / vnorm2;
            for r in col..m {
                a[r][c] -= f * v[r - col];
            }
        }
        let dot: f64 = (col..m).map(|r| v[r - col] * b[r]).sum();
        let f = 2.0 * dot / vnorm2;
        for r in col..m {
            b[r] -= f * v[r - col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut v = b[r];
        for c in r + 1..n {
            v -= a[r][c] * x[c];
        }
        x[r] = if a[r][r] != 0.0 { v / a[r][r] } else { 0.0 };
    }
    x
}

/// Least-squares fit of the sampled curvature against powers of `x` on the
/// widest sub-arc with `|dx/ds| >= 0.05`; the residual is taken over the
/// whole arc (analytic continuation across turning points).
pub fn fit_curvature(arc: &GeodesicArc, max_degree: usize) -> Result<(Polynomial, f64)> {
    let smp = &arc.samples;
    // maximal runs with |P_1| >= 0.05, keep the one with the widest x-span
    let mut best: Option<(usize, usize, f64)> = None;
    let mut start: Option<usize> = None;
    for i in 0..=smp.len() {
        let alive = i < smp.len() && fp::abs(smp[i].p.p(1)) >= 0.05;
        match (alive, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                let xs: Vec<f64> = smp[s..i].iter().map(|t| t.q.x).collect();
                let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let span = hi - lo;
                if best.map_or(true, |(_, _, bs)| span > bs) {
                    best = Some((s, i, span));
                }
                start = None;
            }
            _ => {}
        }
    }
    let (s, e, _) = best.ok_or(Error::InsufficientSpan)?;
    let run = &smp[s..e];

    let mut xs: Vec<f64> = run.iter().map(|t| t.q.x).collect();
    xs.sort_by(|p, q| p.partial_cmp(q).expect("finite x"));
    xs.dedup_by(|p, q| fp::abs(*p - *q) <= 1e-12 * p.abs().max(1.0));
    if xs.len() < max_degree + 2 {
        return Err(Error::InsufficientSpan);
    }

    let lo = xs[0];
    let hi = xs[xs.len() - 1];
    let mu = 0.5 * (lo + hi);
    let sig = 0.5 * (hi - lo);

    let rows: Vec<Vec<f64>> = run
        .iter()
        .map(|t| {
            let z = (t.q.x - mu) / sig;
            let mut row = Vec::with_capacity(max_degree + 1);
            let mut p = 1.0;
            for _ in 0..=max_degree {
                row.push(p);
                p *= z;
            }
            row
        })
        .collect();
    let rhs: Vec<f64> = run.iter().map(|t| t.kappa).collect();
    let coef = householder_lstsq(&rows, &rhs);
    let fit = Polynomial::from_coeffs(coef).compose_affine(1.0 / sig, -mu / sig);

    let residual = smp
        .iter()
        .map(|t| fp::abs(t.kappa - fit.eval(t.q.x)))
        .fold(0.0f64, f64::max);
    Ok((fit, residual))
}

/// The periodicity law on an arc: maxima of `|x(s+L) - x(s)|` and
/// `|u(s+L) - u(s) - tau|` over all admissible `s`.
pub fn periodicity_defect(arc: &GeodesicArc, l: f64, tau: f64) -> Result<(f64, f64)> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::InvalidParameter("period must be finite".into()));
    }
    let (s0, s1) = arc.s_range();
    if s1 - s0 < l {
        return Err(Error::SpanTooShort {
            needed: l,
            available: s1 - s0,
        });
    }
    let mut dx = 0.0f64;
    let mut du = 0.0f64;
    let mut any = false;
    for smp in &arc.samples {
        let target = smp.s + l;
        if target > s1 {
            break;
        }
        let (x2, u2) = arc.interp_planar(target).expect("inside range");
        let u1 = *smp.q.u.last().expect("k >= 1");
        dx = dx.max(fp::abs(x2 - smp.q.x));
        du = du.max(fp::abs(u2 - u1 - tau));
        any = true;
    }
    if !any {
        return Err(Error::SpanTooShort {
            needed: l,
            available: s1 - s0,
        });
    }
    Ok((dx, du))
}

/// First return of `(x, sign dx/ds)` to its initial value, by bisection on
/// the interpolated `x(s)`. `None` when no return happens inside the arc.
pub fn first_return_s(arc: &GeodesicArc) -> Option<f64> {
    let smp = &arc.samples;
    if smp.len() < 4 {
        return None;
    }
    let x0 = smp[0].q.x;
    let sign0 = smp[0].p.p(1);
    if sign0 == 0.0 {
        return None;
    }
    let grid = smp[1].s - smp[0].s;
    let mut armed = false;
    for i in 1..smp.len() {
        let d_prev = smp[i - 1].q.x - x0;
        let d_cur = smp[i].q.x - x0;
        if !armed {
            if smp[i].s - smp[0].s > 3.0 * grid && fp::abs(d_cur) > 1e-9 {
                armed = true;
            }
            continue;
        }
        if d_prev * d_cur <= 0.0 && smp[i].p.p(1) * sign0 > 0.0 {
            // refine inside [s_{i-1}, s_i]
            let mut lo = smp[i - 1].s;
            let mut hi = smp[i].s;
            let f_lo = d_prev;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let v = arc.interp_with(mid, |t| t.q.x).expect("inside") - x0;
                if v * f_lo <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Some((0.5 * (lo + hi)) - smp[0].s);
        }
    }
    None
}

/// Poincare return check for periodic intervals: `L` from quadrature versus
/// the first-return arclength on an integrated arc.
pub fn return_time_mismatch(arc: &GeodesicArc, l: f64) -> Option<f64> {
    first_return_s(arc).map(|s| fp::abs(s - l))
}

/// The paper prints the action integrand without the square on `F`; this
/// evaluates that literal variant `2 int sqrt(1 - F) dx` so the mismatch of
/// its `H`-derivative against `L` can be reported.
pub fn action_literal_variant(prof: &FProfile, interval: &BandInterval, tol: f64) -> f64 {
    let f = prof.polynomial().clone();
    let integrand = move |x: f64| 2.0 * fp::sqrt((1.0 - f.eval(x)).max(0.0));
    tanh_sinh(&integrand, interval.x0.x, interval.x1.x, tol).value
}
