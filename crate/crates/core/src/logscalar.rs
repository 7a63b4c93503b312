//! Real or complex numbers held as `(ln|z|, arg z)`.

use core::f64::consts::PI;
use core::fmt;
use core::ops::{Div, Mul};

use num_complex::Complex64;

/// `exp(log_magnitude) * exp(i * phase)`, phase in `(-π, π]`.
///
/// Zero is `log_magnitude == -inf`. A positive real has phase `0`, a negative
/// real phase `π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogScalar {
    log_magnitude: f64,
    phase: f64,
}

/// Reduces an angle to `(-π, π]`.
pub fn wrap_phase(phase: f64) -> f64 {
    if phase > -PI && phase <= PI {
        return phase;
    }
    let two_pi = 2.0 * PI;
    let mut p = phase - two_pi * libm::floor((phase + PI) / two_pi);
    if p <= -PI {
        p += two_pi;
    }
    p
}

impl LogScalar {
    pub const ZERO: Self = Self { log_magnitude: f64::NEG_INFINITY, phase: 0.0 };
    pub const ONE: Self = Self { log_magnitude: 0.0, phase: 0.0 };

    pub fn new(log_magnitude: f64, phase: f64) -> Self {
        if log_magnitude == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        Self { log_magnitude, phase: wrap_phase(phase) }
    }

    /// Positive real `exp(log_value)`.
    pub fn from_ln(log_value: f64) -> Self {
        Self::new(log_value, 0.0)
    }

    /// `exp(z)` for a complex logarithm `z`.
    pub fn from_complex_ln(z: Complex64) -> Self {
        Self::new(z.re, z.im)
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else if x > 0.0 {
            Self::new(libm::log(x), 0.0)
        } else {
            Self::new(libm::log(-x), PI)
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            Self::ZERO
        } else {
            Self::new(libm::log(z.norm()), z.arg())
        }
    }

    pub fn log_magnitude(&self) -> f64 {
        self.log_magnitude
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// Principal complex logarithm.
    pub fn ln(&self) -> Complex64 {
        Complex64::new(self.log_magnitude, self.phase)
    }

    pub fn is_zero(&self) -> bool {
        self.log_magnitude == f64::NEG_INFINITY
    }

    /// True when the value is a non-negative real within `tol` radians.
    pub fn is_positive_real(&self, tol: f64) -> bool {
        libm::fabs(self.phase) <= tol
    }

    /// Principal-branch power: scales both log-magnitude and phase.
    pub fn powf(self, exponent: f64) -> Self {
        if self.is_zero() {
            return if exponent == 0.0 { Self::ONE } else { Self::ZERO };
        }
        Self::new(self.log_magnitude * exponent, self.phase * exponent)
    }

    pub fn recip(self) -> Self {
        Self::new(-self.log_magnitude, -self.phase)
    }

    pub fn conj(self) -> Self {
        Self::new(self.log_magnitude, -self.phase)
    }

    /// `value * exp(-shift)` as an ordinary complex number.
    pub fn to_complex_scaled(&self, shift: f64) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        let r = libm::exp(self.log_magnitude - shift);
        Complex64::new(r * libm::cos(self.phase), r * libm::sin(self.phase))
    }

    pub fn to_complex(&self) -> Complex64 {
        self.to_complex_scaled(0.0)
    }

    /// Real part; overflows to infinity for large magnitudes.
    pub fn to_f64(&self) -> f64 {
        self.to_complex().re
    }
}

impl Mul for LogScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        Self::new(self.log_magnitude + rhs.log_magnitude, self.phase + rhs.phase)
    }
}

impl Div for LogScalar {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl fmt::Display for LogScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.phase == 0.0 {
            write!(f, "exp({})", self.log_magnitude)
        } else {
            write!(f, "exp({} + {}i)", self.log_magnitude, self.phase)
        }
    }
}
