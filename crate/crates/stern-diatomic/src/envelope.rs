//! The piecewise-linear envelope `h` through `(0,0)` and the record points
//! `(m_n, F_n)`, with exact per-piece slopes, the two gap functions whose
//! signs drive the domination induction, and the refined breakpoints on which
//! those gaps are affine.
//!
//! On `[m_n, m_{n+1}]` the envelope is the chord between consecutive records:
//!
//! ```text
//! h(x) = 3 F_{n-1} / (2^n + 2(-1)^n) * x
//!      + F_n - F_{n-1} (2^n - (-1)^n) / (2^n + 2(-1)^n)
//! ```
//!
//! and the distinguished initial piece joins `(0,0)` to `(1,1)` with slope 1.
//! All arithmetic here is exact rational; the only float in this module is
//! the documented asymptotic approximation [`h_asymptotic`].

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::hp::{HpCtx, HpFloat};
use crate::sequence::{fibonacci, record_index};
use crate::{Nat, Rat};

/// Which linear piece of `h` a segment describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PieceIndex {
    /// The chord from `(0,0)` to `(1,1)` covering `[0, 1)`.
    Initial,
    /// The chord from `(m_n, F_n)` to `(m_{n+1}, F_{n+1})`, `n >= 2`.
    Fib(u64),
}

/// One linear piece of the envelope, with exact slope and intercept and the
/// half-open range `[x_lo, x_hi)` it is canonical for.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub index: PieceIndex,
    pub x_lo: Nat,
    pub x_hi: Nat,
    pub slope: Rat,
    pub intercept: Rat,
}

impl Segment {
    pub fn initial() -> Segment {
        Segment {
            index: PieceIndex::Initial,
            x_lo: Nat::zero(),
            x_hi: Nat::one(),
            slope: Rat::one(),
            intercept: Rat::zero(),
        }
    }

    /// The piece for `[m_n, m_{n+1})`. Rejects `n < 2`.
    pub fn fib(n: u64) -> Result<Segment> {
        if n < 2 {
            return Err(Error::IndexBelowMin { n, min: 2 });
        }
        let m_lo = record_index(n)?;
        let m_hi = record_index(n + 1)?;
        let f_prev = BigInt::from(fibonacci(n - 1)?);
        let f_n = BigInt::from(fibonacci(n)?);
        let pow = BigInt::one() << n;
        let sign: BigInt = if n & 1 == 0 {
            BigInt::one()
        } else {
            -BigInt::one()
        };
        let den: BigInt = &pow + 2 * &sign;
        let slope = Rat::new(3 * &f_prev, den.clone());
        let intercept = Rat::from_integer(f_n) - Rat::new(&f_prev * (&pow - &sign), den);
        Ok(Segment {
            index: PieceIndex::Fib(n),
            x_lo: m_lo,
            x_hi: m_hi,
            slope,
            intercept,
        })
    }

    /// Exact value of this piece's chord at `x` (also valid slightly outside
    /// the range; the range only fixes which piece is canonical).
    pub fn eval(&self, x: &Rat) -> Rat {
        &self.slope * x + &self.intercept
    }
}

fn rat_from_nat(n: &Nat) -> Rat {
    Rat::from_integer(BigInt::from(n.clone()))
}

/// The piece whose half-open range `[m_n, m_{n+1})` contains `x`; the initial
/// piece for `x` in `[0, 1)`. Rejects `x < 0`.
///
/// The level is located from the bit length of `floor(3x)` (since
/// `3 m_n = 2^n - (-1)^n`), then nudged into place, so lookup costs
/// `O(log x)` big-integer work.
pub fn segment_for(x: &Rat) -> Result<Segment> {
    if x.is_negative() {
        return Err(Error::NegativeInput { x: x.to_string() });
    }
    if *x < Rat::one() {
        return Ok(Segment::initial());
    }
    let three_x = (x * Rat::from_integer(BigInt::from(3))).floor();
    let t = three_x
        .to_integer()
        .to_biguint()
        .expect("non-negative by check above");
    let mut n = t.bits().saturating_sub(1).max(2);
    loop {
        let lo = record_index(n)?;
        if n > 2 && *x < rat_from_nat(&lo) {
            n -= 1;
            continue;
        }
        let hi = record_index(n + 1)?;
        if *x >= rat_from_nat(&hi) {
            n += 1;
            continue;
        }
        return Segment::fib(n);
    }
}

/// Exact envelope value `h(x)`. Rejects `x < 0`.
pub fn h(x: &Rat) -> Result<Rat> {
    Ok(segment_for(x)?.eval(x))
}

/// Convenience for integer arguments.
pub fn h_at(m: &Nat) -> Result<Rat> {
    h(&rat_from_nat(m))
}

/// Leading-term approximation of `h` on the piece containing `x`:
///
/// ```text
/// (1/sqrt 5) [ (3/2)(phi/2)^(n-1) x + phi^n (1 - (-1)^(n-1)/phi^(2(n-1)) - 1/phi) ]
/// ```
///
/// This is an approximation with relative error `O(2^-n)`, not an exact
/// evaluator; use [`h`] for exact values. Rejects `x < 1` and `prec < 64`.
pub fn h_asymptotic(x: &Rat, prec: u32) -> Result<HpFloat> {
    if *x < Rat::one() {
        return Err(Error::NegativeInput {
            x: format!("{x} (asymptotic form needs x >= 1)"),
        });
    }
    let seg = segment_for(x)?;
    let n = match seg.index {
        PieceIndex::Fib(n) => n,
        PieceIndex::Initial => unreachable!("x >= 1 lands on a record piece"),
    };
    HpFloat::compute(prec, "h_asymptotic", |ctx: &mut HpCtx| {
        let phi = ctx.phi();
        let sqrt5 = ctx.sqrt5();
        let xf = ctx.from_rat(x);
        let half_phi = ctx.div(&phi, &ctx.from_u64(2));
        let t1 = ctx.mul(
            &ctx.mul(&ctx.from_rat(&Rat::new(3.into(), 2.into())), &ctx.powi(&half_phi, n - 1)),
            &xf,
        );
        // 1 - (-1)^(n-1)/phi^(2(n-1)) - 1/phi
        let inv = ctx.div(&ctx.one(), &ctx.powi(&phi, 2 * (n - 1)));
        let signed_inv = if (n - 1) & 1 == 0 { inv } else { ctx.neg(&inv) };
        let paren = ctx.sub(
            &ctx.sub(&ctx.one(), &signed_inv),
            &ctx.div(&ctx.one(), &phi),
        );
        let t2 = ctx.mul(&ctx.powi(&phi, n), &paren);
        let sum = ctx.add(&t1, &t2);
        let v = ctx.div(&sum, &sqrt5);
        (v, None)
    })
}

/// Exact signed gaps at one point: `h(4x+1) - h(2x+1) - h(x)` and
/// `h(4x-1) - h(2x-1) - h(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GapSample {
    pub x: Rat,
    pub gap_plus: Rat,
    pub gap_minus: Rat,
}

/// Selects between the `+1` and `-1` families of gap arguments.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GapSign {
    Plus,
    Minus,
}

impl GapSign {
    /// The linear maps `x -> c x + d` whose arguments feed `h` for this gap:
    /// the identity, `2x±1` and `4x±1`.
    fn maps(self) -> [(u32, i32); 3] {
        match self {
            GapSign::Plus => [(1, 0), (2, 1), (4, 1)],
            GapSign::Minus => [(1, 0), (2, -1), (4, -1)],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            GapSign::Plus => "plus",
            GapSign::Minus => "minus",
        }
    }
}

fn apply_map(x: &Rat, map: (u32, i32)) -> Rat {
    x * Rat::from_integer(BigInt::from(map.0)) + Rat::from_integer(BigInt::from(map.1))
}

/// `h(4x+1) - h(2x+1) - h(x)`, exactly. 0 at every even-level record point
/// `m_n` because then `m_{n+1} = 2 m_n + 1` and `m_{n+2} = 4 m_n + 1`.
///
/// The sign claim made about this quantity for `x >= 5` is *not* asserted
/// here; the value is reported as-is (it is 0 at `x = 5` and negative on
/// parts of `(5, 11)`, for example). Rejects `x < 0`.
pub fn gap_plus(x: &Rat) -> Result<Rat> {
    gap(x, GapSign::Plus)
}

/// `h(4x-1) - h(2x-1) - h(x)`, exactly. Defined for `x >= 1/2` so that every
/// argument of `h` is non-negative; smaller `x` report the offending
/// argument.
pub fn gap_minus(x: &Rat) -> Result<Rat> {
    gap(x, GapSign::Minus)
}

fn gap(x: &Rat, sign: GapSign) -> Result<Rat> {
    if x.is_negative() {
        return Err(Error::NegativeInput { x: x.to_string() });
    }
    let [m1, m2, m4] = sign.maps();
    let hx = h(x)?;
    let h2 = h(&apply_map(x, m2))?;
    let h4 = h(&apply_map(x, m4))?;
    let _ = m1;
    Ok(h4 - h2 - hx)
}

/// Both gaps at one point.
pub fn gap_sample(x: &Rat) -> Result<GapSample> {
    Ok(GapSample {
        x: x.clone(),
        gap_plus: gap_plus(x)?,
        gap_minus: gap_minus(x)?,
    })
}

/// All `x` in `[lo, hi]` at which any of `x`, `2x+1`, `2x-1`, `4x+1`, `4x-1`
/// coincides with an envelope breakpoint (0 or some `m_i`), plus the
/// endpoints, sorted and deduplicated. Between consecutive returned points
/// both gap functions are affine.
pub fn refined_breakpoints(lo: &Rat, hi: &Rat) -> Result<Vec<Rat>> {
    refined(lo, hi, &[(1, 0), (2, 1), (2, -1), (4, 1), (4, -1)])
}

/// Refined breakpoints for a single gap family: only the maps `x`, `2x±1`,
/// `4x±1` of that sign contribute. The other family's crossings do not bend
/// this gap, so pieces for slope queries come from here.
pub fn refined_breakpoints_for(lo: &Rat, hi: &Rat, sign: GapSign) -> Result<Vec<Rat>> {
    refined(lo, hi, &sign.maps())
}

fn refined(lo: &Rat, hi: &Rat, maps: &[(u32, i32)]) -> Result<Vec<Rat>> {
    if lo.is_negative() {
        return Err(Error::NegativeInput { x: lo.to_string() });
    }
    if lo >= hi {
        return Err(Error::InvalidInterval {
            lo: lo.to_string(),
            hi: hi.to_string(),
        });
    }
    let mut points: BTreeSet<Rat> = BTreeSet::new();
    points.insert(lo.clone());
    points.insert(hi.clone());
    for &(c, d) in maps {
        let c_rat = Rat::from_integer(BigInt::from(c));
        let d_rat = Rat::from_integer(BigInt::from(d));
        let y_lo = lo * &c_rat + &d_rat;
        let y_hi = hi * &c_rat + &d_rat;
        let mut push = |b: Rat| {
            if b >= y_lo && b <= y_hi {
                let x = (&b - &d_rat) / &c_rat;
                if x >= *lo && x <= *hi {
                    points.insert(x);
                }
            }
        };
        push(Rat::zero());
        let mut i = 2u64;
        loop {
            let m = rat_from_nat(&record_index(i)?);
            if m > y_hi {
                break;
            }
            push(m);
            i += 1;
        }
    }
    Ok(points.into_iter().collect())
}

/// The exact constant slope of the chosen gap on `(lo, hi)`:
/// `4 s(4x±1) - 2 s(2x±1) - s(x)` with segments selected at the midpoint.
/// Rejects intervals containing one of that gap's refined breakpoints
/// strictly inside, where the slope would not be constant.
pub fn gap_slope_on_piece(lo: &Rat, hi: &Rat, sign: GapSign) -> Result<Rat> {
    let crossings = refined_breakpoints_for(lo, hi, sign)?;
    for p in &crossings {
        if p > lo && p < hi {
            return Err(Error::BreakpointInside {
                lo: lo.to_string(),
                hi: hi.to_string(),
                at: p.to_string(),
            });
        }
    }
    let mid = (lo + hi) / Rat::from_integer(BigInt::from(2));
    let [m1, m2, m4] = sign.maps();
    let s1 = segment_for(&apply_map(&mid, m1))?.slope;
    let s2 = segment_for(&apply_map(&mid, m2))?.slope;
    let s4 = segment_for(&apply_map(&mid, m4))?.slope;
    Ok(s4 * Rat::from_integer(BigInt::from(4)) - s2 * Rat::from_integer(BigInt::from(2)) - s1)
}

/// Exact maximum of `|gap|` over the integers in `[m_n, m_{n+1})`, with its
/// first argmax.
///
/// The gap is affine between consecutive refined breakpoints, so on each
/// piece `|gap|` over integers is maximal at the first or last integer of
/// the piece; only those are evaluated. Equivalent to (and unit-tested
/// against) the brute-force integer scan.
pub fn max_abs_gap_on_level(n: u64, sign: GapSign) -> Result<(Rat, Nat)> {
    let lo = rat_from_nat(&record_index(n)?);
    let hi = rat_from_nat(&record_index(n + 1)?);
    let points = refined_breakpoints_for(&lo, &hi, sign)?;
    let mut best: Option<(Rat, Nat)> = None;
    for w in points.windows(2) {
        let (u, v) = (&w[0], &w[1]);
        let first = u.ceil().to_integer();
        let mut last = v.floor().to_integer();
        // half-open [m_n, m_{n+1}): drop the overall right end; at interior
        // breakpoints the gap is continuous so either piece gives the value.
        if Rat::from_integer(last.clone()) == *v && *v == hi {
            last -= 1;
        }
        if last < first {
            continue;
        }
        for x in [first.clone(), last.clone()] {
            let g = gap(&Rat::from_integer(x.clone()), sign)?.abs();
            let m = x.to_biguint().expect("x >= m_n >= 1");
            match &best {
                Some((b, barg)) if *b > g || (*b == g && *barg <= m) => {}
                _ => best = Some((g, m)),
            }
            if first == last {
                break;
            }
        }
    }
    Ok(best.expect("every level interval contains integers"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::stern;
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    fn rint(n: i64) -> Rat {
        Rat::from_integer(BigInt::from(n))
    }

    #[test]
    fn segment_examples() {
        let s = segment_for(&rint(7)).unwrap();
        assert_eq!(s.index, PieceIndex::Fib(4));
        assert_eq!(s.slope, rat(1, 3));
        assert_eq!(s.intercept, rat(4, 3));

        let s = segment_for(&rat(1, 2)).unwrap();
        assert_eq!(s.index, PieceIndex::Initial);
        assert_eq!(s.slope, rint(1));
        assert_eq!(s.intercept, rint(0));

        let s = segment_for(&rint(22)).unwrap();
        assert_eq!(s.index, PieceIndex::Fib(6));
        assert_eq!(s.slope, rat(5, 22));
        assert_eq!(s.intercept, rat(71, 22));
    }

    #[test]
    fn segment_rejects_negative() {
        assert!(matches!(
            segment_for(&rint(-1)),
            Err(Error::NegativeInput { .. })
        ));
    }

    #[test]
    fn segment_at_breakpoints_is_right_piece() {
        // half-open convention: x = m_n belongs to the piece starting there
        for n in 2..=12u64 {
            let m = rat_from_nat(&record_index(n).unwrap());
            let s = segment_for(&m).unwrap();
            assert_eq!(s.index, PieceIndex::Fib(n), "n={n}");
        }
        // x just below 1 is still on the initial piece
        let s = segment_for(&rat(999, 1000)).unwrap();
        assert_eq!(s.index, PieceIndex::Initial);
    }

    #[test]
    fn h_table_values() {
        assert_eq!(h(&rint(12)).unwrap(), rat(53, 10));
        assert_eq!(h(&rint(0)).unwrap(), rint(0));
        assert_eq!(h(&rint(22)).unwrap(), rat(181, 22));
    }

    #[test]
    fn h_anchors_and_continuity() {
        for n in 2..=40u64 {
            let m = rat_from_nat(&record_index(n).unwrap());
            let f = Rat::from_integer(BigInt::from(fibonacci(n).unwrap()));
            assert_eq!(h(&m).unwrap(), f, "anchor n={n}");
            // piece ending at m and piece starting at m agree there
            let left = Segment::fib(n - 1).or_else(|_| Ok::<_, Error>(Segment::initial()))
                .unwrap();
            let right = Segment::fib(n).unwrap();
            assert_eq!(left.eval(&m), right.eval(&m), "continuity n={n}");
        }
    }

    #[test]
    fn slopes_positive_and_closed_form_matches_interpolation() {
        for n in 2..=60u64 {
            let s = Segment::fib(n).unwrap();
            assert!(s.slope > Rat::zero(), "n={n}");
            // independent route: point-slope interpolation of the endpoints
            let m_lo = rat_from_nat(&s.x_lo);
            let m_hi = rat_from_nat(&s.x_hi);
            let f_lo = Rat::from_integer(BigInt::from(fibonacci(n).unwrap()));
            let f_hi = Rat::from_integer(BigInt::from(fibonacci(n + 1).unwrap()));
            let slope = (&f_hi - &f_lo) / (&m_hi - &m_lo);
            let intercept = &f_lo - &slope * &m_lo;
            assert_eq!(s.slope, slope, "slope n={n}");
            assert_eq!(s.intercept, intercept, "intercept n={n}");
            assert_eq!(s.eval(&m_lo), f_lo, "left endpoint n={n}");
            assert_eq!(s.eval(&m_hi), f_hi, "right endpoint n={n}");
        }
    }

    #[test]
    fn gap_examples() {
        assert_eq!(gap_plus(&rint(5)).unwrap(), rint(0));
        assert_eq!(gap_plus(&rint(6)).unwrap(), rat(-4, 165));
        assert_eq!(gap_minus(&rint(6)).unwrap(), rat(4, 33));
    }

    #[test]
    fn gap_plus_zero_at_even_records() {
        for n in (4..=20u64).step_by(2) {
            let m = rat_from_nat(&record_index(n).unwrap());
            assert_eq!(gap_plus(&m).unwrap(), Rat::zero(), "n={n}");
        }
    }

    #[test]
    fn gap_minus_domain() {
        assert!(gap_minus(&rat(1, 4)).is_err());
        assert!(gap_minus(&rat(1, 2)).is_ok());
    }

    #[test]
    fn refined_breakpoints_on_5_11() {
        let pts = refined_breakpoints(&rint(5), &rint(11)).unwrap();
        assert!(pts.contains(&rint(10)), "2x+1 = 21 at x = 10");
        assert!(pts.contains(&rat(21, 2)), "4x+1 = 43 at x = 21/2");
        assert_eq!(pts.first().unwrap(), &rint(5));
        assert_eq!(pts.last().unwrap(), &rint(11));

        let plus = refined_breakpoints_for(&rint(5), &rint(11), GapSign::Plus).unwrap();
        assert_eq!(plus, vec![rint(5), rint(10), rat(21, 2), rint(11)]);
    }

    #[test]
    fn refined_breakpoints_on_21_43() {
        let pts = refined_breakpoints_for(&rint(21), &rint(43), GapSign::Plus).unwrap();
        // 4x+1 = m_8 = 85 exactly at the left end x = 21; 2x+1 = 85 at x = 42
        assert_eq!(pts.first().unwrap(), &rint(21));
        assert!(pts.contains(&rint(42)));
    }

    #[test]
    fn gap_slopes_on_5_11() {
        assert_eq!(
            gap_slope_on_piece(&rint(5), &rint(10), GapSign::Plus).unwrap(),
            rat(-4, 165)
        );
        assert_eq!(
            gap_slope_on_piece(&rint(10), &rat(21, 2), GapSign::Plus).unwrap(),
            rat(4, 33)
        );
        assert_eq!(
            gap_slope_on_piece(&rat(21, 2), &rint(11), GapSign::Plus).unwrap(),
            rat(-2, 77)
        );
    }

    #[test]
    fn gap_slope_rejects_interior_breakpoint() {
        assert!(matches!(
            gap_slope_on_piece(&rint(5), &rint(11), GapSign::Plus),
            Err(Error::BreakpointInside { .. })
        ));
    }

    #[test]
    fn gap_slope_matches_finite_difference() {
        // independent oracle: exact finite difference at two interior points
        let pts = refined_breakpoints_for(&rint(5), &rint(200), GapSign::Plus).unwrap();
        for w in pts.windows(2) {
            let (u, v) = (&w[0], &w[1]);
            let x1 = u + (v - u) / rint(7);
            let x2 = u + (v - u) * rat(3, 7);
            let fd = (gap_plus(&x2).unwrap() - gap_plus(&x1).unwrap()) / (&x2 - &x1);
            let s = gap_slope_on_piece(u, v, GapSign::Plus).unwrap();
            assert_eq!(s, fd, "piece [{u}, {v}]");
        }
    }

    #[test]
    fn max_abs_gap_matches_brute_force() {
        for n in 6..=10u64 {
            let lo = record_index(n).unwrap();
            let hi = record_index(n + 1).unwrap();
            let mut best = (Rat::zero(), lo.clone());
            let mut m = lo.clone();
            while m < hi {
                let g = gap_plus(&rat_from_nat(&m)).unwrap().abs();
                if g > best.0 {
                    best = (g, m.clone());
                }
                m += 1u32;
            }
            let fast = max_abs_gap_on_level(n, GapSign::Plus).unwrap();
            assert_eq!(fast, best, "n={n}");
        }
    }

    #[test]
    fn asymptotic_tracks_h() {
        let v6 = h_asymptotic(&rint(21), 128).unwrap();
        let diff = (v6.to_f64() - 8.0).abs();
        assert!(diff < 0.1, "h_asym(21) = {}", v6.to_f64());

        let m20 = rat_from_nat(&record_index(20).unwrap());
        let v20 = h_asymptotic(&m20, 128).unwrap();
        let h20 = h(&m20).unwrap();
        let h20_f = h20.numer().to_f64().unwrap() / h20.denom().to_f64().unwrap();
        let rel = (v20.to_f64() / h20_f - 1.0).abs();
        assert!(rel < (2.0f64).powi(-12), "rel err {rel}");
    }

    #[test]
    fn asymptotic_error_decays_along_records() {
        let rel_err = |n: u64| -> f64 {
            let m = rat_from_nat(&record_index(n).unwrap());
            let v = h_asymptotic(&m, 192).unwrap().to_f64();
            let hv = h(&m).unwrap();
            let hf = hv.numer().to_f64().unwrap() / hv.denom().to_f64().unwrap();
            (v / hf - 1.0).abs()
        };
        for n in 10..=30u64 {
            assert!(rel_err(n + 2) < rel_err(n), "n={n}");
        }
    }

    #[test]
    fn asymptotic_domain_checks() {
        assert!(h_asymptotic(&rat(1, 2), 128).is_err());
        assert!(matches!(
            h_asymptotic(&rint(21), 32),
            Err(Error::PrecisionTooLow { .. })
        ));
    }

    #[test]
    fn table_h_column_matches_stern_relation() {
        // a(m) <= h(m) on the first 22 integers, equality at records
        for m in 1u64..=22 {
            let a = Rat::from_integer(BigInt::from(stern(&Nat::from(m))));
            let hv = h(&rint(m as i64)).unwrap();
            assert!(a <= hv, "m={m}");
        }
    }
}
