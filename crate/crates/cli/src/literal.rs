//! Parsers for the textual command-line values.

use num_complex::Complex64;

/// A complex argument as given on the command line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ComplexArg {
    Random,
    Value(Complex64),
}

impl ComplexArg {
    pub fn value(self) -> Option<Complex64> {
        match self {
            ComplexArg::Random => None,
            ComplexArg::Value(z) => Some(z),
        }
    }
}

fn real(text: &str, whole: &str) -> Result<f64, String> {
    text.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| format!("'{whole}' is not a complex literal of the form a+bi"))
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` (decimal or exponent notation) or `random`.
pub fn parse_complex(text: &str) -> Result<ComplexArg, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.eq_ignore_ascii_case("random") {
        return Ok(ComplexArg::Random);
    }
    if s.is_empty() {
        return Err("empty complex literal".into());
    }
    let Some(body) = s.strip_suffix('i') else {
        return Ok(ComplexArg::Value(Complex64::new(real(&s, text)?, 0.0)));
    };
    // The real/imaginary split is the last sign that is not a leading sign
    // and not part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (real(&body[..k], text)?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => real(other, text)?,
    };
    Ok(ComplexArg::Value(Complex64::new(re, im)))
}

/// `AxB` with both sides positive.
pub fn parse_grid(text: &str) -> Result<(usize, usize), String> {
    let (a, b) = text
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("grid '{text}' must look like 4x4"))?;
    let side = |s: &str| s.trim().parse::<usize>().ok().filter(|&v| v > 0);
    match (side(a), side(b)) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(format!("grid '{text}' needs two positive integers")),
    }
}

/// `name=value`.
pub fn parse_tolerance(text: &str) -> Result<(String, f64), String> {
    let (name, value) = text
        .split_once('=')
        .ok_or_else(|| format!("tolerance override '{text}' must look like name=value"))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| format!("tolerance '{value}' for {name} is not a number"))?;
    Ok((name.trim().to_string(), value))
}
