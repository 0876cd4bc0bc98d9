//! Scalar float helpers with one deterministic implementation per function.
//!
//! Transcendental functions (`tanh`, `exp`, `pow`, …) are not required by
//! IEEE 754 to be correctly rounded, so different libm implementations may
//! disagree in the last bits. To keep results identical between `std` and
//! `no_std` builds, this module always routes them through the software
//! [`libm`] crate. Operations that IEEE 754 defines exactly (`sqrt`, `abs`,
//! rounding) may use hardware intrinsics when `std` is available because
//! every conforming implementation returns bit-identical results for them.

/// π as f64.
pub const PI: f64 = core::f64::consts::PI;

/// Square root (IEEE-exact; hardware when available).
#[inline(always)]
pub fn sqrt(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.sqrt()
    }
    #[cfg(not(feature = "std"))]
    {
        libm::sqrt(x)
    }
}

/// Absolute value (IEEE-exact).
#[inline(always)]
pub fn abs(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.abs()
    }
    #[cfg(not(feature = "std"))]
    {
        libm::fabs(x)
    }
}

/// Largest integer ≤ x (IEEE-exact).
#[inline(always)]
pub fn floor(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.floor()
    }
    #[cfg(not(feature = "std"))]
    {
        libm::floor(x)
    }
}

/// Smallest integer ≥ x (IEEE-exact).
#[inline(always)]
pub fn ceil(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.ceil()
    }
    #[cfg(not(feature = "std"))]
    {
        libm::ceil(x)
    }
}

/// Hyperbolic tangent (single software implementation on every build).
#[inline(always)]
pub fn tanh(x: f64) -> f64 {
    libm::tanh(x)
}

/// Natural exponential.
#[inline(always)]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

/// Natural logarithm.
#[inline(always)]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

/// Base-10 logarithm.
#[inline(always)]
pub fn log10(x: f64) -> f64 {
    libm::log10(x)
}

/// `x^y` for real exponents.
#[inline(always)]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

/// Sine.
#[inline(always)]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

/// Cosine.
#[inline(always)]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

/// Euclidean gamma function Γ(x).
#[inline(always)]
pub fn tgamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// `sqrt(x² + y²)` without intermediate overflow; used for complex moduli.
#[inline(always)]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}
