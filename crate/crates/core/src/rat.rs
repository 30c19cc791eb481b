//! Exact rational exponents.
//!
//! All energies and exponents in this crate are rationals in lowest terms,
//! never floats. The textual form is `p/q` with `q > 0`, abbreviated to `p`
//! when `q == 1`; that is also what `Ratio`'s `Display`/`FromStr` produce, so
//! the helpers here only add validation on top.

use num_rational::Ratio;
use num_traits::Zero;

pub type Rational = Ratio<i64>;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(numer, denom)
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// Parses `p/q` (or `p`) in lowest terms. Rejects zero denominators and any
/// token `Ratio` itself would reject.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    if let Some((_, d)) = s.split_once('/') {
        match d.trim().parse::<i64>() {
            Ok(0) => return Err(format!("zero denominator in `{s}`")),
            Ok(_) => {}
            Err(_) => return Err(format!("`{s}` is not a rational")),
        }
    }
    s.parse::<Rational>()
        .map_err(|_| format!("`{s}` is not a rational"))
}

/// Canonical rendering: lowest terms, `q > 0`, plain integer when `q == 1`.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn is_zero(r: &Rational) -> bool {
    r.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "1", "3/2", "-2/3", "7"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
    }

    #[test]
    fn parse_reduces_to_lowest_terms() {
        assert_eq!(parse_rational("4/6").unwrap(), rat(2, 3));
        assert_eq!(format_rational(&parse_rational("4/6").unwrap()), "2/3");
        assert_eq!(parse_rational("-4/-6").unwrap(), rat(2, 3));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x/2").is_err());
        assert!(parse_rational("1.5").is_err());
        assert!(parse_rational("").is_err());
    }
}
