//! Exact evaluators for Stern's diatomic sequence, Fibonacci numbers, and the
//! record points where the sequence attains its per-interval maxima.
//!
//! Stern's sequence is defined by `a(0) = 0`, `a(1) = 1`,
//! `a(2n) = a(n)` and `a(2n+1) = a(n) + a(n+1)`.
//!
//! Three mutually independent evaluators are provided so each can serve as an
//! oracle for the others: [`stern_naive`] applies the recursion directly,
//! [`stern_pair`] walks the binary digits of `n` carrying the state
//! `(a(k), a(k+1))`, and [`stern_range`] evaluates whole windows by recursive
//! halving. The maximum of `a(m)` over `2^(n-2) <= m <= 2^(n-1)` is the nth
//! Fibonacci number `F_n` (with `F_1 = F_2 = 1`), first attained at
//! `m_n = (2^n - (-1)^n) / 3`.

use std::collections::HashMap;

use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::Nat;

/// Memoized direct-recursion evaluator.
///
/// Uses an explicit work stack instead of call-stack recursion, so inputs of
/// any bit length are safe. Results do not depend on memo reuse; the memo can
/// be shared across calls for bulk workloads.
#[derive(Default)]
pub struct NaiveEvaluator {
    memo: HashMap<Nat, Nat>,
}

impl NaiveEvaluator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn eval(&mut self, n: &Nat) -> Nat {
        if let Some(v) = self.memo.get(n) {
            return v.clone();
        }
        let mut stack: Vec<Nat> = vec![n.clone()];
        while let Some(k) = stack.pop() {
            if self.memo.contains_key(&k) {
                continue;
            }
            if k.bits() <= 1 {
                // a(0) = 0, a(1) = 1
                self.memo.insert(k.clone(), k);
                continue;
            }
            let one = Nat::one();
            if (&k).bit(0) {
                let lo = (&k - &one) >> 1;
                let hi = (&k + &one) >> 1;
                match (self.memo.get(&lo), self.memo.get(&hi)) {
                    (Some(a), Some(b)) => {
                        let v = a + b;
                        self.memo.insert(k, v);
                    }
                    (a, b) => {
                        let need_lo = a.is_none();
                        let need_hi = b.is_none();
                        stack.push(k);
                        if need_lo {
                            stack.push(lo);
                        }
                        if need_hi {
                            stack.push(hi);
                        }
                    }
                }
            } else {
                let half = &k >> 1;
                match self.memo.get(&half) {
                    Some(v) => {
                        let v = v.clone();
                        self.memo.insert(k, v);
                    }
                    None => {
                        stack.push(k);
                        stack.push(half);
                    }
                }
            }
        }
        self.memo[n].clone()
    }
}

/// `a(n)` by direct application of the recursion.
pub fn stern_naive(n: &Nat) -> Nat {
    NaiveEvaluator::new().eval(n)
}

/// `(a(n), a(n+1))` in `O(log n)` big-integer additions.
///
/// Walks the binary digits of `n` from the most significant down, starting
/// from `(a(0), a(1)) = (0, 1)`; digit 0 maps `(x, y) -> (x, x+y)` and
/// digit 1 maps `(x, y) -> (x+y, y)`.
pub fn stern_pair(n: &Nat) -> (Nat, Nat) {
    let mut x = Nat::zero();
    let mut y = Nat::one();
    let bits = n.bits();
    for i in (0..bits).rev() {
        if n.bit(i) {
            x += &y;
        } else {
            y += &x;
        }
    }
    (x, y)
}

/// `a(n)` — the default fast evaluator.
pub fn stern(n: &Nat) -> Nat {
    stern_pair(n).0
}

/// `a(lo), a(lo+1), ..., a(hi)` inclusive, by recursive halving.
///
/// Each level derives the window from its parent window
/// `[lo/2, hi/2 + 1]`, so the total work is `O(hi - lo)` big-integer
/// additions plus `O(log hi)` levels. Rejects `lo > hi`.
pub fn stern_range(lo: &Nat, hi: &Nat) -> Result<Vec<Nat>> {
    if lo > hi {
        return Err(Error::EmptyRange {
            lo: lo.to_string(),
            hi: hi.to_string(),
        });
    }
    Ok(range_rec(lo, hi))
}

fn range_rec(lo: &Nat, hi: &Nat) -> Vec<Nat> {
    let count = (hi - lo)
        .to_u64()
        .expect("window too wide to materialize")
        + 1;
    if count <= 8 || hi.bits() <= 4 {
        let mut out = Vec::with_capacity(count as usize);
        let mut m = lo.clone();
        for _ in 0..count {
            out.push(stern(&m));
            m += 1u32;
        }
        return out;
    }
    let plo = lo >> 1;
    let phi = (hi >> 1) + Nat::one();
    let parent = range_rec(&plo, &phi);
    let mut out = Vec::with_capacity(count as usize);
    // p is the parent offset of floor(m/2); it advances after each odd m.
    let mut p = 0usize;
    let mut odd = lo.bit(0);
    for _ in 0..count {
        if odd {
            out.push(&parent[p] + &parent[p + 1]);
            p += 1;
        } else {
            out.push(parent[p].clone());
        }
        odd = !odd;
    }
    out
}

/// `F_n` with `F_1 = F_2 = 1`, by fast doubling. Rejects `n = 0`.
pub fn fibonacci(n: u64) -> Result<Nat> {
    if n == 0 {
        return Err(Error::IndexBelowMin { n: 0, min: 1 });
    }
    Ok(fib_pair(n).0)
}

/// `(F_k, F_{k+1})` via `F_{2k} = F_k (2 F_{k+1} - F_k)` and
/// `F_{2k+1} = F_k^2 + F_{k+1}^2`.
fn fib_pair(k: u64) -> (Nat, Nat) {
    if k == 0 {
        return (Nat::zero(), Nat::one());
    }
    let (a, b) = fib_pair(k >> 1);
    let c = &a * ((&b << 1) - &a);
    let d = &a * &a + &b * &b;
    if k & 1 == 0 {
        (c, d)
    } else {
        let e = &c + &d;
        (d, e)
    }
}

/// `m_n = (2^n - (-1)^n) / 3`, the first position in `[2^(n-2), 2^(n-1)]`
/// where `a` attains the interval maximum `F_n`. Rejects `n < 2`.
pub fn record_index(n: u64) -> Result<Nat> {
    if n < 2 {
        return Err(Error::IndexBelowMin { n, min: 2 });
    }
    let pow = Nat::one() << n;
    let adjusted = if n & 1 == 0 {
        pow - Nat::one()
    } else {
        pow + Nat::one()
    };
    let (q, r) = num_integer::Integer::div_rem(&adjusted, &Nat::from(3u32));
    debug_assert!(r.is_zero());
    Ok(q)
}

/// A record of the sequence: level `n`, position `m_n`, value `F_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordPoint {
    pub n: u64,
    pub m: Nat,
    pub f: Nat,
}

impl RecordPoint {
    /// `3 m + (-1)^n = 2^n`, exactly.
    pub fn check_identity(&self) -> bool {
        let lhs = &self.m * 3u32;
        let pow = Nat::one() << self.n;
        if self.n & 1 == 0 {
            lhs + Nat::one() == pow
        } else {
            lhs == pow + Nat::one()
        }
    }
}

/// The record point at level `n >= 2`, cross-checked: `a(m_n)` is recomputed
/// and must equal `F_n`.
///
/// # Panics
///
/// If the cross-check `a(m_n) = F_n` ever failed. That identity is the
/// bedrock the rest of the crate stands on, so a mismatch is an internal
/// error rather than a recoverable one.
pub fn record_point(n: u64) -> Result<RecordPoint> {
    let m = record_index(n)?;
    let f = fibonacci(n)?;
    let a = stern(&m);
    assert_eq!(
        a, f,
        "internal error: a(m_{n}) = {a} but F_{n} = {f}; record structure violated"
    );
    Ok(RecordPoint { n, m, f })
}
