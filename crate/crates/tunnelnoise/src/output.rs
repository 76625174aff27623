//! CSV conventions shared by every output file.
//!
//! Numbers are written with 12 significant digits in the style of C's `%.12g`
//! (trailing zeros dropped, exponent only for very large or small values),
//! independent of locale. Each file opens with a `#` comment block holding
//! the software version and the full configuration.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::config::Config;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Formats `x` like `%.12g`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIGNIFICANT_DIGITS as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `#`-prefixed header: title, version, and the configuration as TOML.
pub fn header_block(title: &str, config: &Config) -> String {
    let mut out = String::new();
    out.push_str(&format!("# {title}\n"));
    out.push_str(&format!(
        "# software: {} {}\n",
        env!("CARGO_CRATE_NAME"),
        env!("CARGO_PKG_VERSION")
    ));
    out.push_str("# units: energy eV, length nm, time fs, frequency rad/fs, noise 4q^2/h\n");
    for line in config.to_toml_string().lines() {
        if line.is_empty() {
            out.push_str("#\n");
        } else {
            out.push_str(&format!("# {line}\n"));
        }
    }
    out
}

/// Writes `header` followed by the CSV `rows` under `columns`.
pub fn write_table(
    path: &Path,
    header: &str,
    columns: &[&str],
    rows: &[Vec<String>],
) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(header.as_bytes())?;
    {
        let mut w = csv::WriterBuilder::new().from_writer(&mut out);
        w.write_record(columns)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_percent_g() {
        let cases = [
            (0.073, "0.073"),
            (1.0, "1"),
            (-8e-4, "-0.0008"),
            (3.3428337725632855e-4, "0.000334283377256"),
            (1.23456789012345e-7, "1.23456789012e-07"),
            (123456789012345.0, "1.23456789012e+14"),
            (0.1 + 0.2, "0.3"),
            (2.0 / 3.0, "0.666666666667"),
            (99999999999.99999, "100000000000"),
            (f64::NAN, "NaN"),
            (-0.0, "0"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_num(x), want, "{x:e}");
        }
    }

    #[test]
    fn formatting_is_stable_under_reparsing() {
        for x in [
            0.697982361,
            1.0 / 7.0,
            6.02214076e23,
            -2.5e-13,
            503.30000000000007,
        ] {
            let s = fmt_num(x);
            assert_eq!(fmt_num(s.parse().unwrap()), s);
        }
    }

    #[test]
    fn header_echoes_config() {
        let h = header_block("records", &Config::default());
        assert!(h.lines().all(|l| l.starts_with('#')));
        assert!(h.contains("mass_ratio = 0.067"));
        assert!(h.contains(env!("CARGO_PKG_VERSION")));
    }
}
