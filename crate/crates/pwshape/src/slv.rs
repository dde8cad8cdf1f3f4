//! Signed log-space scalars.
//!
//! Zonal series terms span hundreds of orders of magnitude and alternate
//! in sign once generator derivatives of odd order enter, so they cannot
//! be accumulated in plain `f64`. [`SignedLogValue`] stores `sign` and
//! `ln|x|` and implements exact-cancellation-aware addition via
//! `log1p`/`expm1`.

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg};

/// A real number `x` represented as `(sign, ln|x|)`.
///
/// `sign == 0` if and only if `x == 0`, in which case `ln_abs` is
/// `f64::NEG_INFINITY`.
#[derive(Debug, Clone, Copy)]
pub struct SignedLogValue {
    sign: i8,
    ln_abs: f64,
}

impl SignedLogValue {
    /// Exact zero.
    pub const ZERO: Self = Self {
        sign: 0,
        ln_abs: f64::NEG_INFINITY,
    };

    /// Exact one.
    pub const ONE: Self = Self {
        sign: 1,
        ln_abs: 0.0,
    };

    /// Build from an ordinary float.
    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Self {
                sign: if x > 0.0 { 1 } else { -1 },
                ln_abs: x.abs().ln(),
            }
        }
    }

    /// Build from an explicit sign and log-magnitude. A zero sign or a
    /// `-inf` magnitude both give exact zero.
    pub fn from_parts(sign: i8, ln_abs: f64) -> Self {
        if sign == 0 || ln_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Self {
                sign: sign.signum(),
                ln_abs,
            }
        }
    }

    /// `exp(ln_x)` as a positive value, staying in log space.
    pub fn exp_of(ln_x: f64) -> Self {
        Self {
            sign: 1,
            ln_abs: ln_x,
        }
    }

    /// Sign in `{-1, 0, +1}`.
    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// `ln|x|`; `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        self.ln_abs
    }

    /// True iff the value is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Convert back to `f64` (overflows to `±inf` gracefully).
    pub fn to_f64(&self) -> f64 {
        self.sign as f64 * self.ln_abs.exp()
    }

    /// Natural log of a positive value; `None` if the sign is not `+1`.
    pub fn ln(&self) -> Option<f64> {
        (self.sign == 1).then_some(self.ln_abs)
    }

    /// `|x|` as a new value.
    pub fn abs(&self) -> Self {
        Self {
            sign: self.sign.abs(),
            ln_abs: self.ln_abs,
        }
    }

    /// Integer power (sign handled exactly).
    pub fn powi(&self, k: i32) -> Self {
        if self.sign == 0 {
            if k == 0 {
                Self::ONE
            } else {
                Self::ZERO
            }
        } else {
            let sign = if self.sign < 0 && k % 2 != 0 { -1 } else { 1 };
            Self::from_parts(sign, self.ln_abs * k as f64)
        }
    }
}

impl Neg for SignedLogValue {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            sign: -self.sign,
            ln_abs: self.ln_abs,
        }
    }
}

impl Mul for SignedLogValue {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.sign == 0 || rhs.sign == 0 {
            Self::ZERO
        } else {
            Self {
                sign: self.sign * rhs.sign,
                ln_abs: self.ln_abs + rhs.ln_abs,
            }
        }
    }
}

impl MulAssign for SignedLogValue {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl Div for SignedLogValue {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        assert!(rhs.sign != 0, "division of SignedLogValue by zero");
        if self.sign == 0 {
            Self::ZERO
        } else {
            Self {
                sign: self.sign * rhs.sign,
                ln_abs: self.ln_abs - rhs.ln_abs,
            }
        }
    }
}

impl Add for SignedLogValue {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.sign == 0 {
            return rhs;
        }
        if rhs.sign == 0 {
            return self;
        }
        // Order so |a| >= |b|.
        let (a, b) = if self.ln_abs >= rhs.ln_abs {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let d = b.ln_abs - a.ln_abs; // <= 0
        if a.sign == b.sign {
            Self {
                sign: a.sign,
                ln_abs: a.ln_abs + d.exp().ln_1p(),
            }
        } else if d == 0.0 {
            Self::ZERO
        } else {
            // ln(1 - e^d), computed to avoid cancellation for d near 0
            // and underflow for very negative d.
            let ln_1m_exp = if d < -std::f64::consts::LN_2 {
                (-d.exp()).ln_1p()
            } else {
                (-d.exp_m1()).ln()
            };
            Self {
                sign: a.sign,
                ln_abs: a.ln_abs + ln_1m_exp,
            }
        }
    }
}

impl AddAssign for SignedLogValue {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}
