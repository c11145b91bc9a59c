//! Exact rational exponent algebra and step-size bookkeeping.
//!
//! Everything that can be decided in rational arithmetic is (triangle
//! membership, Hölder identities, admissibility gates, the divergence
//! predicates); only the irrational powers behind `M_k` and `delta_N^(k)`
//! go through double-double floating evaluation, and that precision choice
//! is recorded in the schedule summary.

mod exponents;
mod schedule;

pub use exponents::{
    triangle_membership, Triangle, Tsu1Exponents, Tsu2Exponents,
};
pub use schedule::{
    alpha_max, choose_q, compute_m0, corrected_lim_lhs, delta_k, divergence_check,
    fin_lim_agreement_sweep, fin_value, least_q_divergent, lim_holds, lim_lhs, m0_satisfies, m_k,
    steps_count, DivergenceReport, M0Breakdown, ProofConstants, Schedule, ScheduleRow,
    SweepOutcome, PRECISION_NOTE,
};

use num_bigint::BigInt;
use num_rational::BigRational;

/// Exact rational scalar used throughout the scheduler.
pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_to_f64(x: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// Parse `"a/b"`, an integer, or a finite decimal (`"0.03"` becomes `3/100`
/// exactly) into a rational.
pub fn parse_rational(s: &str) -> crate::Result<Rat> {
    let s = s.trim();
    let parse_int = |t: &str| -> crate::Result<BigInt> {
        t.parse::<BigInt>()
            .map_err(|_| crate::Error::Config(format!("cannot parse '{t}' as an integer")))
    };
    if let Some((a, b)) = s.split_once('/') {
        let num = parse_int(a.trim())?;
        let den = parse_int(b.trim())?;
        if den == BigInt::from(0) {
            return Err(crate::Error::Config(format!("zero denominator in '{s}'")));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let digits = frac_part.len() as u32;
        let sign = if int_part.trim_start().starts_with('-') { -1 } else { 1 };
        let int_val = if int_part.is_empty() || int_part == "-" {
            BigInt::from(0)
        } else {
            parse_int(int_part)?
        };
        let frac_val = if frac_part.is_empty() {
            BigInt::from(0)
        } else {
            parse_int(frac_part)?
        };
        let base = BigInt::from(10).pow(digits);
        let num = int_val * &base + BigInt::from(sign) * frac_val;
        return Ok(BigRational::new(num, base));
    }
    Ok(BigRational::from_integer(parse_int(s)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_decimals_and_integers() {
        assert_eq!(parse_rational("7/2").unwrap(), rat(7, 2));
        assert_eq!(parse_rational("0.03").unwrap(), rat(3, 100));
        assert_eq!(parse_rational("-0.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("25").unwrap(), rat_int(25));
        assert_eq!(parse_rational(" 1/50 ").unwrap(), rat(1, 50));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }
}
