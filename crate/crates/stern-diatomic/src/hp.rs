//! Configurable-precision binary floats with a trust policy.
//!
//! Every reported float is computed twice, at the requested precision and at
//! double that precision, and the two runs must agree to `prec - 8` bits
//! (relative to the natural scale of the computation); disagreement is an
//! error, never a silently wrong digit. Printed decimal digits are capped at
//! `floor((prec - 8) * log10 2)`, at most 30, so no unverified digit is ever
//! emitted.
//!
//! The scale anchor matters for difference-type quantities: when a value is
//! produced by catastrophic cancellation (say `ratio - 1` near a record
//! point), the digits are trustworthy relative to the operand scale, not the
//! tiny result, and callers declare that anchor.

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::{Nat, Rat};

/// Minimum working precision in bits.
pub const MIN_PREC: u32 = 64;

const RM: RoundingMode = RoundingMode::ToEven;

/// Arithmetic context at a fixed precision. Wraps the underlying float
/// library so call sites stay free of precision/rounding plumbing.
pub struct HpCtx {
    prec: usize,
    cc: Consts,
}

impl HpCtx {
    pub fn new(prec: u32) -> Self {
        HpCtx {
            prec: prec as usize,
            cc: Consts::new().expect("constants cache"),
        }
    }

    pub fn prec(&self) -> u32 {
        self.prec as u32
    }

    pub fn one(&self) -> BigFloat {
        BigFloat::from_word(1, self.prec)
    }

    pub fn from_u64(&self, v: u64) -> BigFloat {
        BigFloat::from_word(v, self.prec)
    }

    /// Exact conversion of a big natural number.
    pub fn from_nat(&self, n: &Nat) -> BigFloat {
        if n.is_zero() {
            return BigFloat::from_word(0, self.prec);
        }
        let bits = n.bits();
        let words = bits.div_ceil(64);
        let shifted: BigUint = n << (words * 64 - bits);
        let mut digits: Vec<u64> = shifted.iter_u64_digits().collect();
        digits.resize(words as usize, 0);
        BigFloat::from_raw_parts(
            &digits,
            (words * 64) as usize,
            Sign::Pos,
            bits as astro_float::Exponent,
            false,
        )
    }

    pub fn from_rat(&self, r: &Rat) -> BigFloat {
        let num = self.from_nat(r.numer().magnitude());
        let den = self.from_nat(r.denom().magnitude());
        let v = num.div(&den, self.prec, RM);
        if r.is_negative() {
            v.neg()
        } else {
            v
        }
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.prec, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.prec, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.prec, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.prec, RM)
    }

    pub fn neg(&self, a: &BigFloat) -> BigFloat {
        a.neg()
    }

    pub fn abs(&self, a: &BigFloat) -> BigFloat {
        if a.is_negative() {
            a.neg()
        } else {
            a.clone()
        }
    }

    pub fn powi(&self, a: &BigFloat, e: u64) -> BigFloat {
        a.powi(e as usize, self.prec, RM)
    }

    pub fn pow(&mut self, a: &BigFloat, e: &BigFloat) -> BigFloat {
        a.pow(e, self.prec, RM, &mut self.cc)
    }

    pub fn log2(&mut self, a: &BigFloat) -> BigFloat {
        a.log2(self.prec, RM, &mut self.cc)
    }

    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.prec, RM)
    }

    pub fn parse(&mut self, s: &str) -> BigFloat {
        BigFloat::parse(s, Radix::Dec, self.prec, RM, &mut self.cc)
    }

    pub fn sqrt5(&self) -> BigFloat {
        self.sqrt(&self.from_u64(5))
    }

    /// The golden ratio `(1 + sqrt 5)/2`.
    pub fn phi(&self) -> BigFloat {
        self.div(&self.add(&self.one(), &self.sqrt5()), &self.from_u64(2))
    }

    pub fn log2_phi(&mut self) -> BigFloat {
        let phi = self.phi();
        self.log2(&phi)
    }

    pub fn log2_3(&mut self) -> BigFloat {
        let three = self.from_u64(3);
        self.log2(&three)
    }

    /// `phi^(log2 3) / sqrt 5`, the limit of the record ratios.
    pub fn limit_c(&mut self) -> BigFloat {
        let phi = self.phi();
        let e = self.log2_3();
        let num = self.pow(&phi, &e);
        self.div(&num, &self.sqrt5())
    }

    /// The alternative closed form `(phi / sqrt 5) (3/2)^(log2 phi)`.
    pub fn limit_c_alt(&mut self) -> BigFloat {
        let phi = self.phi();
        let base = self.div(&self.from_u64(3), &self.from_u64(2));
        let e = self.log2_phi();
        let p = self.pow(&base, &e);
        let lead = self.div(&phi, &self.sqrt5());
        self.mul(&lead, &p)
    }

    /// `(phi + 1) / sqrt 5 = 1.170820...`, the classical upper bound.
    pub fn upper_bound(&self) -> BigFloat {
        self.div(&self.add(&self.phi(), &self.one()), &self.sqrt5())
    }

    /// `m^(log2 phi)`.
    pub fn power_law(&mut self, m: &Nat) -> BigFloat {
        let base = self.from_nat(m);
        let e = self.log2_phi();
        self.pow(&base, &e)
    }
}

/// Bits of agreement between two floats, relative to the given scale
/// (binary exponent). `i64::MAX` when they are identical.
pub fn agreement_bits(a: &BigFloat, b: &BigFloat, scale_exp: Option<i64>) -> i64 {
    let prec = a
        .mantissa_max_bit_len()
        .unwrap_or(64)
        .max(b.mantissa_max_bit_len().unwrap_or(64));
    let diff = a.sub(b, prec, RM);
    if diff.is_zero() {
        return i64::MAX;
    }
    let scale = scale_exp.unwrap_or_else(|| {
        let ea = if a.is_zero() { i64::MIN } else { exp_of(a) };
        let eb = if b.is_zero() { i64::MIN } else { exp_of(b) };
        ea.max(eb)
    });
    scale - exp_of(&diff)
}

fn exp_of(v: &BigFloat) -> i64 {
    v.exponent().map(|e| e as i64).unwrap_or(0)
}

/// A value carrying the precision it was verified at.
#[derive(Clone, Debug)]
pub struct HpFloat {
    value: BigFloat,
    prec: u32,
}

impl HpFloat {
    /// Run `f` at `prec` and at `2 * prec` and require the results to agree
    /// to `prec - 8` bits. `f` returns the value and an optional scale
    /// anchor; without one, agreement is measured relative to the value
    /// itself.
    pub fn compute<F>(prec: u32, what: &str, f: F) -> Result<HpFloat>
    where
        F: Fn(&mut HpCtx) -> (BigFloat, Option<BigFloat>),
    {
        if prec < MIN_PREC {
            return Err(Error::PrecisionTooLow {
                prec,
                min: MIN_PREC,
            });
        }
        let mut ctx1 = HpCtx::new(prec);
        let (v1, anchor) = f(&mut ctx1);
        let mut ctx2 = HpCtx::new(2 * prec);
        let (v2, _) = f(&mut ctx2);
        let scale_exp = anchor.as_ref().map(exp_of);
        let agree = agreement_bits(&v1, &v2, scale_exp);
        let need = prec as i64 - 8;
        if agree < need {
            return Err(Error::PrecisionPolicy {
                what: what.to_string(),
                prec,
                prec2: 2 * prec,
                agree,
                need,
            });
        }
        Ok(HpFloat { value: v1, prec })
    }

    /// Wrap an already-verified value. Prefer [`HpFloat::compute`].
    pub fn from_verified(value: BigFloat, prec: u32) -> HpFloat {
        HpFloat { value, prec }
    }

    pub fn value(&self) -> &BigFloat {
        &self.value
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn is_negative(&self) -> bool {
        self.value.is_negative()
    }

    /// Decimal digits justified by the policy: `floor((prec-8) log10 2)`,
    /// capped at 30.
    pub fn policy_digits(&self) -> usize {
        policy_digits(self.prec)
    }

    /// The value printed to its policy digit count.
    pub fn to_decimal_string(&self) -> String {
        format_decimal(&self.value, self.policy_digits())
    }

    /// The value printed to an explicit significant-digit count (truncated,
    /// never rounded up, so every printed digit is a true digit).
    pub fn to_decimal_digits(&self, digits: usize) -> String {
        format_decimal(&self.value, digits)
    }

    pub fn to_f64(&self) -> f64 {
        big_to_f64(&self.value)
    }

    /// Exact textual form for checkpoints: sign, hex mantissa, mantissa bit
    /// length, binary exponent, inexact flag. Round-trips bit-identically.
    pub fn to_hex(&self) -> String {
        if self.value.is_zero() {
            return format!("+:0x0:0:0:0:{}", self.prec);
        }
        let (words, bits, sign, exp, inexact) =
            self.value.as_raw_parts().expect("finite value");
        let mant = words
            .iter()
            .rev()
            .fold(BigUint::zero(), |acc, w| (acc << 64) | BigUint::from(*w));
        format!(
            "{}:0x{:x}:{}:{}:{}:{}",
            if sign == Sign::Neg { "-" } else { "+" },
            mant,
            bits,
            exp,
            u8::from(inexact),
            self.prec,
        )
    }

    pub fn from_hex(s: &str) -> Result<HpFloat> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Parse(format!("malformed hex float `{s}`"));
        if parts.len() != 6 {
            return Err(bad());
        }
        let sign = match parts[0] {
            "+" => Sign::Pos,
            "-" => Sign::Neg,
            _ => return Err(bad()),
        };
        let mant_str = parts[1].strip_prefix("0x").ok_or_else(bad)?;
        let mant = BigUint::parse_bytes(mant_str.as_bytes(), 16).ok_or_else(bad)?;
        let bits: usize = parts[2].parse().map_err(|_| bad())?;
        let exp: i32 = parts[3].parse().map_err(|_| bad())?;
        let inexact = match parts[4] {
            "0" => false,
            "1" => true,
            _ => return Err(bad()),
        };
        let prec: u32 = parts[5].parse().map_err(|_| bad())?;
        if bits == 0 {
            return Ok(HpFloat {
                value: BigFloat::from_word(0, prec.max(MIN_PREC) as usize),
                prec,
            });
        }
        let words = bits.div_ceil(64);
        let mut digits: Vec<u64> = mant.iter_u64_digits().collect();
        if digits.len() > words {
            return Err(bad());
        }
        digits.resize(words, 0);
        let value = BigFloat::from_raw_parts(&digits, bits, sign, exp, inexact);
        Ok(HpFloat { value, prec })
    }

    pub fn cmp(&self, other: &HpFloat) -> std::cmp::Ordering {
        cmp_big(&self.value, &other.value)
    }
}

impl PartialEq for HpFloat {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}

pub fn cmp_big(a: &BigFloat, b: &BigFloat) -> std::cmp::Ordering {
    let c = a.cmp(b).expect("finite values are comparable");
    c.cmp(&0)
}

pub fn policy_digits(prec: u32) -> usize {
    let d = (prec.saturating_sub(8) as u64 * 30103 / 100000) as usize;
    d.min(30)
}

fn big_to_f64(v: &BigFloat) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    let (words, bits, sign, exp, _) = v.as_raw_parts().expect("finite value");
    let top = words[words.len() - 1] as f64;
    let next = if words.len() > 1 {
        words[words.len() - 2] as f64
    } else {
        0.0
    };
    let frac = top / 2f64.powi(64) + next / 2f64.powi(128);
    let _ = bits;
    let mag = frac * 2f64.powi(exp);
    if sign == Sign::Neg {
        -mag
    } else {
        mag
    }
}

/// Exact decimal rendering of a binary float, truncated to `digits`
/// significant digits. Done entirely in integer arithmetic.
pub fn format_decimal(v: &BigFloat, digits: usize) -> String {
    let digits = digits.max(1);
    if v.is_zero() {
        return "0".to_string();
    }
    let (words, bits, sign, exp, _) = v.as_raw_parts().expect("finite value");
    let mant = words
        .iter()
        .rev()
        .fold(BigUint::zero(), |acc, w| (acc << 64) | BigUint::from(*w));
    // |v| = mant * 2^e2
    let e2 = exp as i64 - bits as i64;
    let real_bits = mant.bits() as i64 + e2; // 2^(b-1) <= |v| < 2^b
    let log10_floor = ((real_bits - 1) * 30103).div_euclid(100000);
    let mut k = digits as i64 - 1 - log10_floor;
    let mut int_digits = scaled_floor(&mant, e2, k);
    let mut s = int_digits.to_string();
    while s.len() > digits {
        int_digits /= 10u32;
        k -= 1;
        s = int_digits.to_string();
    }
    while s.len() < digits {
        k += 1;
        int_digits = scaled_floor(&mant, e2, k);
        s = int_digits.to_string();
    }
    // value ~= s * 10^-k with len(s) == digits
    let e10 = digits as i64 - 1 - k;
    let prefix = if sign == Sign::Neg { "-" } else { "" };
    if (-4..=20).contains(&e10) {
        let point = e10 + 1; // digits before the decimal point
        if point <= 0 {
            format!("{prefix}0.{}{}", "0".repeat(-point as usize), s)
        } else if (point as usize) < digits {
            format!("{prefix}{}.{}", &s[..point as usize], &s[point as usize..])
        } else {
            format!("{prefix}{}{}", s, "0".repeat(point as usize - digits))
        }
    } else {
        format!("{prefix}{}.{}e{}", &s[..1], &s[1..], e10)
    }
}

/// `floor(mant * 2^e2 * 10^k)` for signed `e2`, `k`.
fn scaled_floor(mant: &BigUint, e2: i64, k: i64) -> BigUint {
    let mut num = mant.clone();
    let mut den = BigUint::from(1u32);
    if k >= 0 {
        num *= BigUint::from(10u32).pow(k as u32);
    } else {
        den *= BigUint::from(10u32).pow((-k) as u32);
    }
    if e2 >= 0 {
        num <<= e2 as u64;
    } else {
        den <<= (-e2) as u64;
    }
    num / den
}

/// Parse a decimal string (as produced by [`format_decimal`]) into an exact
/// rational. Used by report round-trip checks.
pub fn parse_decimal_rat(s: &str) -> Result<Rat> {
    let bad = || Error::Parse(format!("malformed decimal `{s}`"));
    let (mant, e10) = match s.split_once('e') {
        Some((m, e)) => (m, e.parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int_part, frac_part) = match mant.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mant, ""),
    };
    let joined = format!("{int_part}{frac_part}");
    let num: BigInt = joined.parse().map_err(|_| bad())?;
    let shift = e10 - frac_part.len() as i64;
    let ten = BigInt::from(10);
    Ok(if shift >= 0 {
        Rat::from_integer(num * ten.pow(shift as u32))
    } else {
        Rat::new(num, ten.pow((-shift) as u32))
    })
}
