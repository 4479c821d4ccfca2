//! Float helpers that work without `std`.

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

/// `sqrt(x² + y²)`, falling back to the careful routine only where the
/// squares could overflow or underflow.
#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    let m = x.abs().max(y.abs());
    if m > 1e-150 && m < 1e150 {
        sqrt(x * x + y * y)
    } else {
        libm::hypot(x, y)
    }
}

pub fn norm2(v: &[f64]) -> f64 {
    sqrt(v.iter().map(|x| x * x).sum())
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}
