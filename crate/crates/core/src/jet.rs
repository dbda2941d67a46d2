//! Domain types for the k-jet space and its momenta.
//!
//! A point of `J^k` is the tuple `(x, u_k, ..., u_1, y)`; the space carries
//! the global horizontal frame
//!
//! ```text
//! X_1 = d/dx + u_1 d/dy + sum_{i=2..k} u_i d/du_{i-1},      X_2 = d/du_k
//! ```
//!
//! Internally the derivative coordinates are stored ascending (`u[0] = u_1`);
//! every serialized tuple uses the canonical order `(x, u_k, ..., u_1, y)`.

use crate::{Error, Result};
use alloc::vec;
use alloc::vec::Vec;

/// Jet order `k >= 1` together with the dimensions it determines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JetDim {
    k: usize,
}

impl JetDim {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("jet order k must be >= 1".into()));
        }
        Ok(JetDim { k })
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    /// Dimension of the manifold `J^k` (and of the algebra): `k + 2`.
    #[inline]
    pub fn manifold(&self) -> usize {
        self.k + 2
    }

    #[inline]
    pub fn algebra(&self) -> usize {
        self.k + 2
    }
}

/// A point `(x, u_k, ..., u_1, y)` of `J^k`.
///
/// `u[i]` holds `u_{i+1}`, so `u` runs ascending from `u_1` to `u_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct JetPoint {
    pub x: f64,
    pub u: Vec<f64>,
    pub y: f64,
}

impl JetPoint {
    pub fn new(x: f64, u: Vec<f64>, y: f64) -> Self {
        JetPoint { x, u, y }
    }

    /// The origin of `J^k`.
    pub fn origin(dim: JetDim) -> Self {
        JetPoint {
            x: 0.0,
            u: vec![0.0; dim.k()],
            y: 0.0,
        }
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.u.len()
    }

    /// `u_i` for `1 <= i <= k`.
    #[inline]
    pub fn u_coord(&self, i: usize) -> f64 {
        self.u[i - 1]
    }

    /// Canonical tuple `(x, u_k, ..., u_1, y)`.
    pub fn to_canonical(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.u.len() + 2);
        v.push(self.x);
        v.extend(self.u.iter().rev());
        v.push(self.y);
        v
    }

    /// Inverse of [`JetPoint::to_canonical`].
    pub fn from_canonical(coords: &[f64], dim: JetDim) -> Result<Self> {
        if coords.len() != dim.manifold() {
            return Err(Error::DimensionMismatch {
                expected: dim.manifold(),
                got: coords.len(),
            });
        }
        let k = dim.k();
        let mut u: Vec<f64> = coords[1..=k].to_vec();
        u.reverse();
        Ok(JetPoint {
            x: coords[0],
            u,
            y: coords[k + 1],
        })
    }
}

/// A tangent vector to `J^k`, laid out like [`JetPoint`].
#[derive(Clone, Debug, PartialEq)]
pub struct JetTangent {
    pub x: f64,
    pub u: Vec<f64>,
    pub y: f64,
}

impl JetTangent {
    /// Canonical component order `(x', u_k', ..., u_1', y')`.
    pub fn to_canonical(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.u.len() + 2);
        v.push(self.x);
        v.extend(self.u.iter().rev());
        v.push(self.y);
        v
    }
}

/// Cotangent coordinates `(p_x, p_1, ..., p_k, p_y)` conjugate to
/// `(x, u_1, ..., u_k, y)`; `p[i]` holds `p_{i+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalMomenta {
    pub p_x: f64,
    pub p: Vec<f64>,
    pub p_y: f64,
}

impl CanonicalMomenta {
    pub fn new(p_x: f64, p: Vec<f64>, p_y: f64) -> Self {
        CanonicalMomenta { p_x, p, p_y }
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.p.len()
    }
}

/// The left-trivialized momentum vector `(P_1, ..., P_{k+2})`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedMomenta {
    values: Vec<f64>,
}

impl ReducedMomenta {
    /// Wraps a `k+2`-vector; fails for fewer than 3 entries (k >= 1).
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                got: values.len(),
            });
        }
        Ok(ReducedMomenta { values })
    }

    #[inline]
    pub fn dim(&self) -> JetDim {
        JetDim {
            k: self.values.len() - 2,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// `P_i` for `1 <= i <= k+2` (one-based, matching the bracket table).
    #[inline]
    pub fn p(&self, i: usize) -> f64 {
        self.values[i - 1]
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// The sub-vector `Z_k = (P_3, ..., P_{k+2})`.
    #[inline]
    pub fn z_part(&self) -> &[f64] {
        &self.values[2..]
    }

    /// Euclidean norm of `Z_k`.
    pub fn z_norm(&self) -> f64 {
        crate::fp::sqrt(self.z_part().iter().map(|v| v * v).sum())
    }
}

/// A point of the projection plane `(x, u_k)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanarPoint {
    pub x: f64,
    pub u: f64,
}

/// The power functions of the frame: the reduced momenta of a covector.
///
/// `P_1 = p_x + u_1 p_y + sum_{i=2..k} u_i p_{i-1}`, `P_2 = p_k`, and the
/// tail `(P_3, ..., P_{k+2}) = (p_{k-1}, ..., p_1, p_y)`.
pub fn power_functions(q: &JetPoint, m: &CanonicalMomenta) -> Result<ReducedMomenta> {
    let k = q.k();
    if m.k() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: m.k(),
        });
    }
    let mut p1 = m.p_x + q.u_coord(1) * m.p_y;
    for i in 2..=k {
        p1 += q.u_coord(i) * m.p[i - 2];
    }
    let mut values = Vec::with_capacity(k + 2);
    values.push(p1);
    values.push(m.p[k - 1]); // P_2 = p_k
    for j in (1..k).rev() {
        values.push(m.p[j - 1]); // P_3 = p_{k-1}, ..., P_{k+1} = p_1
    }
    values.push(m.p_y); // P_{k+2}
    ReducedMomenta::new(values)
}

/// The geodesic Hamiltonian `H = (P_1^2 + P_2^2) / 2`.
#[inline]
pub fn hamiltonian(p: &ReducedMomenta) -> f64 {
    0.5 * (p.p(1) * p.p(1) + p.p(2) * p.p(2))
}

/// Projection onto the `(x, u_k)` plane.
#[inline]
pub fn project_plane(q: &JetPoint) -> PlanarPoint {
    PlanarPoint {
        x: q.x,
        u: *q.u.last().expect("k >= 1"),
    }
}

/// The horizontal vector `a X_1(q) + b X_2(q)`.
pub fn horizontal_velocity(q: &JetPoint, a: f64, b: f64) -> JetTangent {
    let k = q.k();
    let mut u = vec![0.0; k];
    u[k - 1] = b; // u_k' = b
    for i in 2..=k {
        u[i - 2] += q.u_coord(i) * a; // u_{i-1}' = u_i a
    }
    JetTangent {
        x: a,
        u,
        y: q.u_coord(1) * a,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn power_functions_direct_substitution() {
        // k=1, u_1=2, (p_x,p_1,p_y)=(1,0,3)
        let q = JetPoint::new(0.0, vec![2.0], 0.0);
        let m = CanonicalMomenta::new(1.0, vec![0.0], 3.0);
        let p = power_functions(&q, &m).unwrap();
        assert_eq!(p.as_slice(), &[7.0, 0.0, 3.0]);

        // k=2 identity case
        let q = JetPoint::new(0.0, vec![0.0, 0.0], 0.0);
        let m = CanonicalMomenta::new(1.0, vec![0.0, 0.0], 0.0);
        let p = power_functions(&q, &m).unwrap();
        assert_eq!(p.as_slice(), &[1.0, 0.0, 0.0, 0.0]);

        // k=2, (u_1,u_2)=(1,1), (p_x,p_1,p_2,p_y)=(0,1,1,1)
        let q = JetPoint::new(0.0, vec![1.0, 1.0], 0.0);
        let m = CanonicalMomenta::new(0.0, vec![1.0, 1.0], 1.0);
        let p = power_functions(&q, &m).unwrap();
        assert_eq!(p.as_slice(), &[2.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn power_functions_dimension_mismatch() {
        let q = JetPoint::new(0.0, vec![0.0, 0.0], 0.0);
        let m = CanonicalMomenta::new(0.0, vec![0.0], 0.0);
        assert!(matches!(
            power_functions(&q, &m),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn power_functions_is_linear_in_momenta() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for k in 1..=5 {
            let q = JetPoint::new(
                rng.gen_range(-2.0..2.0),
                (0..k).map(|_| rng.gen_range(-2.0..2.0)).collect(),
                rng.gen_range(-2.0..2.0),
            );
            let rand_m = |rng: &mut ChaCha8Rng| {
                CanonicalMomenta::new(
                    rng.gen_range(-2.0..2.0),
                    (0..k).map(|_| rng.gen_range(-2.0..2.0)).collect(),
                    rng.gen_range(-2.0..2.0),
                )
            };
            let m1 = rand_m(&mut rng);
            let m2 = rand_m(&mut rng);
            let (a, b) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let combo = CanonicalMomenta::new(
                a * m1.p_x + b * m2.p_x,
                m1.p
                    .iter()
                    .zip(&m2.p)
                    .map(|(x, y)| a * x + b * y)
                    .collect(),
                a * m1.p_y + b * m2.p_y,
            );
            let lhs = power_functions(&q, &combo).unwrap();
            let p1 = power_functions(&q, &m1).unwrap();
            let p2 = power_functions(&q, &m2).unwrap();
            for i in 1..=k + 2 {
                let rhs = a * p1.p(i) + b * p2.p(i);
                assert!((lhs.p(i) - rhs).abs() < 1e-12 * (1.0 + rhs.abs()));
            }
        }
    }

    #[test]
    fn hamiltonian_values() {
        let p = ReducedMomenta::new(vec![0.6, 0.8, 0.3]).unwrap();
        assert_eq!(hamiltonian(&p), 0.5);
        let p = ReducedMomenta::new(vec![0.0, 0.0, 7.0]).unwrap();
        assert_eq!(hamiltonian(&p), 0.0);
        let p = ReducedMomenta::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(hamiltonian(&p), 0.5);
    }

    #[test]
    fn projection_selects_x_and_uk() {
        // k=3, (x,u_3,u_2,u_1,y)=(1,5,2,3,4) -> (1,5)
        let q = JetPoint::from_canonical(&[1.0, 5.0, 2.0, 3.0, 4.0], JetDim::new(3).unwrap())
            .unwrap();
        let pl = project_plane(&q);
        assert_eq!((pl.x, pl.u), (1.0, 5.0));

        let q = JetPoint::origin(JetDim::new(1).unwrap());
        let pl = project_plane(&q);
        assert_eq!((pl.x, pl.u), (0.0, 0.0));

        let q =
            JetPoint::from_canonical(&[2.0, -1.0, 7.0, 0.0], JetDim::new(2).unwrap()).unwrap();
        let pl = project_plane(&q);
        assert_eq!((pl.x, pl.u), (2.0, -1.0));
    }

    #[test]
    fn horizontal_velocity_frame_fields() {
        // k=2, (u_1,u_2)=(3,5), (a,b)=(1,0) -> (x',u_2',u_1',y') = (1,0,5,3)
        let q = JetPoint::new(0.0, vec![3.0, 5.0], 0.0);
        let v = horizontal_velocity(&q, 1.0, 0.0);
        assert_eq!(v.to_canonical(), vec![1.0, 0.0, 5.0, 3.0]);

        let v = horizontal_velocity(&q, 0.0, 1.0);
        assert_eq!(v.to_canonical(), vec![0.0, 1.0, 0.0, 0.0]);

        let v = horizontal_velocity(&q, 0.0, 0.0);
        assert_eq!(v.to_canonical(), vec![0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn projection_is_submetry_on_velocities() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for k in 1..=6 {
            let q = JetPoint::new(
                rng.gen_range(-2.0..2.0),
                (0..k).map(|_| rng.gen_range(-2.0..2.0)).collect(),
                rng.gen_range(-2.0..2.0),
            );
            let (a, b) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let v = horizontal_velocity(&q, a, b);
            // planar velocity of a X_1 + b X_2 is exactly (a, b)
            assert_eq!(v.x, a);
            assert_eq!(*v.u.last().unwrap(), b);
        }
    }

    #[test]
    fn canonical_roundtrip() {
        let dim = JetDim::new(4).unwrap();
        let q = JetPoint::new(1.5, vec![0.1, 0.2, 0.3, 0.4], -2.0);
        let c = q.to_canonical();
        assert_eq!(c, vec![1.5, 0.4, 0.3, 0.2, 0.1, -2.0]);
        assert_eq!(JetPoint::from_canonical(&c, dim).unwrap(), q);
    }
}
