//! Landscape CSV output.

use std::io::Write;

use crate::error::Result;
use crate::ip_scoring::ScoreLandscape;

pub const CSV_HEADER: &str = "q1,q2,value";

/// `printf("%.12g")`: 12 significant digits, trailing zeros dropped.
pub fn fmt_g12(v: f64) -> String {
    const P: i32 = 12;
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (P - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..P).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        trim_zeros(&format!("{:.*}", (P - 1 - exp) as usize, v)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_csv<W: Write>(landscape: &ScoreLandscape, mut w: W) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in &landscape.rows {
        writeln!(w, "{},{},{}", fmt_g12(r.q1), fmt_g12(r.q2), fmt_g12(r.value))?;
    }
    w.flush()?;
    Ok(())
}

pub fn landscape_csv(landscape: &ScoreLandscape) -> String {
    let mut buf = Vec::new();
    write_csv(landscape, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g12_matches_printf() {
        let cases = [
            (0.0, "0"),
            (-0.0, "0"),
            (0.4, "0.4"),
            (-0.25, "-0.25"),
            (1.0, "1"),
            (0.1 + 0.2, "0.3"),
            (-0.2400000000004, "-0.2400000000"),
            (1e-5, "1e-05"),
            (-1.5e-7, "-1.5e-07"),
            (123456789012345.0, "1.23456789012e+14"),
            (0.0001, "0.0001"),
            (2.0 / 3.0, "0.666666666667"),
            (f64::NEG_INFINITY, "-inf"),
        ];
        for (v, want) in cases {
            let want = trim_zeros(want);
            assert_eq!(fmt_g12(v), want, "formatting {v}");
        }
    }
}
