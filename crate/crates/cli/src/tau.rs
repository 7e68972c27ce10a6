//! Parsing of moduli written as `i`, `1.5i`, `0.5+1.3i` or `-0.5+i`.

use num_complex::Complex64;

pub fn parse_tau(text: &str) -> Result<Complex64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let body = s
        .strip_suffix('i')
        .ok_or_else(|| format!("modulus '{text}' must end in 'i' (e.g. i, 1.5i, 0.5+1.3i)"))?;
    // The sign separating the real part: the last '+'/'-' that is neither
    // leading nor part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re_text, im_text) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re = if re_text.is_empty() {
        0.0
    } else {
        re_text
            .parse::<f64>()
            .map_err(|_| format!("bad real part '{re_text}' in modulus '{text}'"))?
    };
    let im = match im_text {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => t
            .parse::<f64>()
            .map_err(|_| format!("bad imaginary part '{t}' in modulus '{text}'"))?,
    };
    if !(re.is_finite() && im.is_finite()) {
        return Err(format!("modulus '{text}' is not finite"));
    }
    if im <= 0.0 {
        return Err(format!(
            "modulus '{text}' must have positive imaginary part"
        ));
    }
    Ok(Complex64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepted_forms() {
        assert_eq!(parse_tau("i"), Ok(Complex64::new(0.0, 1.0)));
        assert_eq!(parse_tau("1.5i"), Ok(Complex64::new(0.0, 1.5)));
        assert_eq!(parse_tau("0.5+1.3i"), Ok(Complex64::new(0.5, 1.3)));
        assert_eq!(parse_tau("-0.5+i"), Ok(Complex64::new(-0.5, 1.0)));
        assert_eq!(parse_tau(" 0.5 + 0.866i "), Ok(Complex64::new(0.5, 0.866)));
        assert_eq!(parse_tau("1e-1+2e0i"), Ok(Complex64::new(0.1, 2.0)));
    }

    #[test]
    fn rejected_forms() {
        for bad in [
            "", "1.5", "abc", "0.5+xi", "-i", "0.5-1.3i", "0i", "++1i", "nani",
        ] {
            assert!(parse_tau(bad).is_err(), "{bad}");
        }
    }
}
