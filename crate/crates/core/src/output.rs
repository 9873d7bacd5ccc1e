//! Shared text formatting for CSV output.

/// Formats a float with 17 significant digits, enough to round-trip.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}
