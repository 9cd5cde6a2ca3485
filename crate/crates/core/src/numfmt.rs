//! Fixed-significance float formatting for machine-readable output.

/// Round to `sig` significant decimal digits.
pub fn round_sig(x: f64, sig: u32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x + 0.0; // normalizes -0.0
    }
    let digits = x.abs().log10().floor() as i32 + 1;
    let scale = 10f64.powi(sig as i32 - digits);
    (x * scale).round() / scale
}

/// Shortest form of `x` rounded to 12 significant digits; switches to
/// scientific notation outside `[1e-4, 1e15)` the way `%g` does.
pub fn fmt_sig12(x: f64) -> String {
    let r = round_sig(x, 12);
    if r == 0.0 {
        return "0".to_string();
    }
    if !r.is_finite() {
        return format!("{}", r);
    }
    let exponent = r.abs().log10().floor() as i32;
    if (-5..15).contains(&exponent) {
        format!("{}", r)
    } else {
        // Pin the mantissa at 12 significant digits and trim zeros; the
        // shortest-roundtrip form can spill extra digits here.
        let s = format!("{:.11e}", r);
        match s.find('e') {
            Some(pos) => {
                let (mantissa, exp) = s.split_at(pos);
                format!("{}{}", mantissa.trim_end_matches('0').trim_end_matches('.'), exp)
            }
            None => s,
        }
    }
}
