//! Thin wrappers over `libm` for the float operations `core` lacks.

pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

pub fn round(x: f64) -> f64 {
    libm::round(x)
}

/// Integer power through repeated squaring; exact for the small exponents
/// used by the discounting code.
pub fn powi(x: f64, mut n: u32) -> f64 {
    let mut base = x;
    let mut acc = 1.0;
    while n > 0 {
        if n & 1 == 1 {
            acc *= base;
        }
        base *= base;
        n >>= 1;
    }
    acc
}
