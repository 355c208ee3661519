//! Literal formats accepted on the command line.

use num_complex::Complex64;

use lempert::PlaneDomain;

/// Parses `RE+IMi`, `RE-IMi`, a bare real `RE`, or a bare imaginary `IMi`.
pub fn complex(s: &str) -> Result<Complex64, String> {
    let t = s.trim();
    let bad = || format!("invalid complex literal `{s}` (expected RE+IMi, e.g. 0.5+0i)");
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    // The sign separating the parts: the last `+`/`-` not at the start and not part of an exponent.
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        x => x,
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = im.trim_start_matches('+').parse().map_err(|_| bad())?;
    if !(re.is_finite() && im.is_finite()) {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

pub fn domain(s: &str) -> Result<PlaneDomain, String> {
    s.parse::<PlaneDomain>().map_err(|e| e.to_string())
}

/// Shortest text that parses back to the same complex number.
pub fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", z.re, sign, z.im.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        assert_eq!(complex("0.5+0i").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(complex("-0.3+0.2i").unwrap(), Complex64::new(-0.3, 0.2));
        assert_eq!(complex("-0.5-1e-3i").unwrap(), Complex64::new(-0.5, -1e-3));
        assert_eq!(complex("1e-2+2.5E-1i").unwrap(), Complex64::new(0.01, 0.25));
        assert_eq!(complex("0.25").unwrap(), Complex64::new(0.25, 0.0));
        assert_eq!(complex("0.5i").unwrap(), Complex64::new(0.0, 0.5));
        assert_eq!(complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert!(complex("0.5+xi").is_err());
        assert!(complex("").is_err());
        assert!(complex("nan+0i").is_err());
    }

    #[test]
    fn round_trip() {
        for z in [
            Complex64::new(0.1, -0.0),
            Complex64::new(-1.0 / 3.0, 2e-300),
            Complex64::new(0.7, -0.2),
        ] {
            let back = complex(&format_complex(z)).unwrap();
            assert_eq!(back.re.to_bits(), z.re.to_bits());
            assert_eq!(back.im.abs().to_bits(), z.im.abs().to_bits());
        }
    }

    #[test]
    fn domains() {
        assert_eq!(domain("annulus:0.3").unwrap(), PlaneDomain::annulus(0.3).unwrap());
        assert!(domain("annulus:1.3").is_err());
        assert!(domain("square").is_err());
    }
}
