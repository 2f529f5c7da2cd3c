//! Arbitrary-precision rational scalars and the few controlled exits to `f64`.
//!
//! Everything in the set and function algebra is a [`Rat`]; floating point
//! appears only where a square root is unavoidable (L2 norms) and in the
//! reported `value` column of emitted series. The conversions here stay
//! accurate for numerators and denominators far beyond `f64` range.

use num_bigint::{BigInt, Sign};
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;
pub type CRat = Complex<BigRational>;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn crat(re: Rat, im: Rat) -> CRat {
    Complex::new(re, im)
}

pub fn crat_zero() -> CRat {
    Complex::new(Rat::zero(), Rat::zero())
}

pub fn crat_one() -> CRat {
    Complex::new(Rat::one(), Rat::zero())
}

pub fn conj(z: &CRat) -> CRat {
    Complex::new(z.re.clone(), -z.im.clone())
}

/// Squared modulus, exact.
pub fn norm_sqr(z: &CRat) -> Rat {
    &z.re * &z.re + &z.im * &z.im
}

/// Reduce x into [0,1) exactly.
pub fn frac_mod1(x: &Rat) -> Rat {
    let f = x.fract();
    if f.is_negative() {
        f + Rat::one()
    } else {
        f
    }
}

/// Distance from x to the nearest integer, exact.
pub fn dist_to_int(x: &Rat) -> Rat {
    let f = frac_mod1(x);
    let half = rat(1, 2);
    if f > half {
        Rat::one() - f
    } else {
        f
    }
}

/// Rational to f64 that stays finite for huge numerators/denominators.
///
/// `BigRational::to_f64` divides two separately converted floats, which
/// collapses to NaN once either side overflows; this shifts both by a
/// common power of two first.
pub fn to_f64(x: &Rat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let num = x.numer();
    let den = x.denom();
    let shift = num.bits() as i64 - den.bits() as i64;
    // bring the quotient near 2^0, convert with ~80 bits of headroom
    let scaled_num: BigInt;
    let scaled_den: BigInt;
    if shift > 0 {
        scaled_num = num.clone();
        scaled_den = den.clone() << shift as u64;
    } else {
        scaled_num = num.clone() << (-shift) as u64;
        scaled_den = den.clone();
    }
    // now |scaled_num / scaled_den| in [1/2, 2); extract 80-bit mantissas
    let keep = 80u64;
    let nb = scaled_num.bits().max(1);
    let drop = nb.saturating_sub(keep);
    let m_num = (&scaled_num >> drop).to_f64().unwrap_or(f64::NAN);
    let m_den = (&scaled_den >> drop).to_f64().unwrap_or(f64::NAN);
    let q = m_num / m_den;
    q * 2f64.powi(shift as i32)
}

/// sqrt(x) for x >= 0 via integer Newton on a scaled numerator.
///
/// Relative error is bounded by 1e-12 (documented tolerance for all
/// L2-norm values); internally we carry ~96 extra bits before rounding
/// to f64, so the f64 rounding dominates.
pub fn sqrt_to_f64(x: &Rat) -> f64 {
    assert!(!x.is_negative(), "sqrt of negative rational");
    if x.is_zero() {
        return 0.0;
    }
    // sqrt(n/d) = sqrt(n*d)/d ; scale so the integer sqrt carries 2*96 guard bits
    let n = x.numer();
    let d = x.denom();
    let prod = n * d;
    let bits = prod.bits();
    let guard = 192u64;
    let shift = if bits >= guard { 0 } else { (guard - bits + 1) & !1 };
    let scaled = &prod << shift;
    let root = scaled.sqrt();
    let approx = Rat::new(root, d << (shift / 2));
    to_f64(&approx)
}

pub fn abs(x: &Rat) -> Rat {
    x.abs()
}

/// Serialize a rational as the `[numerator, denominator]` pair used in all
/// JSON artifacts. Components render as JSON integers while they fit i64
/// and as decimal strings beyond that; both forms parse back.
pub fn rat_to_json(x: &Rat) -> serde_json::Value {
    serde_json::Value::Array(vec![int_to_json(x.numer()), int_to_json(x.denom())])
}

pub fn int_to_json(x: &BigInt) -> serde_json::Value {
    match x.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::String(x.to_string()),
    }
}

pub fn rat_from_json(v: &serde_json::Value) -> crate::error::Result<Rat> {
    use crate::error::Error;
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Descriptor(format!("expected [num, den] pair, got {v}")))?;
    if arr.len() != 2 {
        return Err(Error::Descriptor(format!(
            "expected [num, den] pair of length 2, got {v}"
        )));
    }
    let num = int_from_json(&arr[0])?;
    let den = int_from_json(&arr[1])?;
    if den.is_zero() {
        return Err(Error::Descriptor("zero denominator".into()));
    }
    Ok(Rat::new(num, den))
}

pub fn int_from_json(v: &serde_json::Value) -> crate::error::Result<BigInt> {
    use crate::error::Error;
    match v {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(Error::Descriptor(format!("non-integer number {n}")))
            }
        }
        serde_json::Value::String(s) => s
            .parse::<BigInt>()
            .map_err(|e| Error::Descriptor(format!("bad integer string {s:?}: {e}"))),
        other => Err(Error::Descriptor(format!("expected integer, got {other}"))),
    }
}

/// Exact decimal sign-magnitude rendering used in CSV columns.
pub fn int_to_string(x: &BigInt) -> String {
    x.to_string()
}

pub fn is_negative(x: &BigInt) -> bool {
    x.sign() == Sign::Minus
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn to_f64_handles_huge_components() {
        let big: BigInt = BigInt::from(3) << 400;
        let x = Rat::new(big.clone(), (big.clone() << 1) + 1);
        let f = to_f64(&x);
        assert!((f - 0.5).abs() < 1e-12);
        assert!(to_f64(&Rat::zero()) == 0.0);
        let neg = Rat::new(-BigInt::one() << 300, BigInt::one() << 301);
        assert!((to_f64(&neg) + 0.5).abs() < 1e-14);
    }

    #[test]
    fn sqrt_matches_known_squares() {
        assert_eq!(sqrt_to_f64(&rat(1, 4)), 0.5);
        assert!((sqrt_to_f64(&rat(2, 1)) - 2f64.sqrt()).abs() < 1e-14);
        let tiny = Rat::new(BigInt::one(), BigInt::one() << 200);
        let r = sqrt_to_f64(&tiny);
        assert!((r - 2f64.powi(-100)).abs() / 2f64.powi(-100) < 1e-12);
    }

    #[test]
    fn mod1_and_distance() {
        assert_eq!(frac_mod1(&rat(-1, 4)), rat(3, 4));
        assert_eq!(dist_to_int(&rat(7, 8)), rat(1, 8));
        assert_eq!(dist_to_int(&rat(3, 8)), rat(3, 8));
    }

    #[test]
    fn json_pair_roundtrip() {
        let cases = [rat(1, 4), rat(-3, 7), Rat::new(BigInt::one() << 200, BigInt::from(3))];
        for x in cases {
            let v = rat_to_json(&x);
            let back = rat_from_json(&v).unwrap();
            assert_eq!(back, x);
        }
        assert!(rat_from_json(&serde_json::json!([1, 0])).is_err());
        assert!(rat_from_json(&serde_json::json!("nope")).is_err());
    }
}
