//! Float intrinsics routed through std or `libm` depending on the build.

#![allow(dead_code)]

macro_rules! shim {
    ($name:ident, $std_method:ident, $libm_fn:ident) => {
        #[cfg(feature = "std")]
        #[inline(always)]
        pub fn $name(x: f64) -> f64 {
            x.$std_method()
        }
        #[cfg(all(not(feature = "std"), feature = "libm"))]
        #[inline(always)]
        pub fn $name(x: f64) -> f64 {
            libm::$libm_fn(x)
        }
    };
}

shim!(sqrt, sqrt, sqrt);
shim!(sin, sin, sin);
shim!(cos, cos, cos);
shim!(exp, exp, exp);
shim!(ln, ln, log);
shim!(sinh, sinh, sinh);
shim!(cosh, cosh, cosh);
shim!(tanh, tanh, tanh);
shim!(floor, floor, floor);
shim!(round, round, round);
shim!(abs, abs, fabs);

#[cfg(feature = "std")]
#[inline(always)]
pub fn atan2(y: f64, x: f64) -> f64 {
    y.atan2(x)
}
#[cfg(all(not(feature = "std"), feature = "libm"))]
#[inline(always)]
pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

#[cfg(feature = "std")]
#[inline(always)]
pub fn powf(x: f64, y: f64) -> f64 {
    x.powf(y)
}
#[cfg(all(not(feature = "std"), feature = "libm"))]
#[inline(always)]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[cfg(feature = "std")]
#[inline(always)]
pub fn hypot(x: f64, y: f64) -> f64 {
    x.hypot(y)
}
#[cfg(all(not(feature = "std"), feature = "libm"))]
#[inline(always)]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

/// Integer power by binary exponentiation; exact for small exponents.
#[inline]
pub fn powi(x: f64, n: u32) -> f64 {
    let mut acc = 1.0;
    let mut base = x;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("no_std builds require the `libm` feature");
