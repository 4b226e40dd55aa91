/// Formats `x` with `digits` significant digits in plain decimal notation,
/// falling back to scientific notation for very large or small magnitudes.
/// Trailing zeros are kept so columns stay aligned in precision.
pub fn sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    // Round once in scientific form so the exponent reflects carries (9.99.. -> 10.0).
    let sci = format!("{:.*e}", digits - 1, x);
    let (_, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-6..=15).contains(&exp) {
        return sci;
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    format!("{:.*}", decimals, x)
}

/// Ten significant digits, the precision used in every CSV and table.
pub fn sig10(x: f64) -> String {
    sig(x, 10)
}
