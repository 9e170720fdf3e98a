//! Tolerances for floating-point verification.

/// Relative slack for the theorem inequalities (sandwich, packing, Carleson, bound chain).
pub const INEQUALITY: f64 = 1e-9;

/// Relative slack for statements that are algebraic identities on the finite model.
pub const IDENTITY: f64 = 1e-12;

/// `lhs ≤ rhs·(1 + tol)` for nonnegative quantities.
pub fn le_rel(lhs: f64, rhs: f64, tol: f64) -> bool {
    lhs <= rhs + tol * rhs.abs()
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
