//! Recovering small rationals from floats for human-readable reports.

/// Largest denominator reported as an exact fraction.
pub const MAX_DENOMINATOR: u64 = 1_000_000;

/// Closest fraction `p/q` with `q <= max_den` along the continued-fraction
/// convergents of `x`, if it matches `x` to within `tol`.
pub fn recover(x: f64, max_den: u64, tol: f64) -> Option<(i64, u64)> {
    if !x.is_finite() {
        return None;
    }
    let sign = if x < 0.0 { -1 } else { 1 };
    let mut r = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    for _ in 0..64 {
        let a = r.floor();
        if a > u32::MAX as f64 {
            break;
        }
        let a = a as u64;
        let p2 = a.checked_mul(p1)?.checked_add(p0)?;
        let q2 = a.checked_mul(q1)?.checked_add(q0)?;
        if q2 > max_den {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        if (x.abs() - p1 as f64 / q1 as f64).abs() <= tol {
            return Some((sign * p1 as i64, q1));
        }
        let frac = r - a as f64;
        if frac == 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

/// Decimal with at most ten places and no trailing zeros.
pub fn decimal(x: f64) -> String {
    let s = format!("{x:.10}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// `decimal (p/q)` when a fraction with denominator in `2..=10^6` matches
/// within `1e-9`, plain decimal otherwise.
pub fn describe(x: f64) -> String {
    match recover(x, MAX_DENOMINATOR, 1e-9) {
        Some((p, q)) if q > 1 => format!("{} ({p}/{q})", decimal(x)),
        _ => decimal(x),
    }
}
