//! Arithmetic in `Z/p^M`, the finite-precision model of the p-adic integers.
//!
//! Every value carries its [`PadicContext`]. Valuations saturate at `M`:
//! at precision `M` the element `0` cannot be told apart from `p^M * u`, so
//! `valuation(0) == M` and it is displayed as `≥ M`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Largest modulus we accept; products are formed in `u128`.
const MAX_MODULUS: u64 = 1 << 62;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PadicContext {
    p: u64,
    precision: u32,
    modulus: u64,
}

impl PadicContext {
    pub fn new(p: u64, precision: u32) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        if precision == 0 {
            return Err(Error::InvalidPrecision(precision));
        }
        let mut modulus: u64 = 1;
        for _ in 0..precision {
            modulus = modulus
                .checked_mul(p)
                .filter(|&m| m <= MAX_MODULUS)
                .ok_or(Error::InvalidPrecision(precision))?;
        }
        Ok(Self {
            p,
            precision,
            modulus,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// The exponent `M`.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// `p^M`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn zero(&self) -> PadicScalar {
        PadicScalar { ctx: *self, value: 0 }
    }

    pub fn one(&self) -> PadicScalar {
        self.from_u64(1)
    }

    pub fn from_u64(&self, v: u64) -> PadicScalar {
        PadicScalar {
            ctx: *self,
            value: v % self.modulus,
        }
    }

    pub fn from_i64(&self, v: i64) -> PadicScalar {
        let m = self.modulus as i128;
        let r = (v as i128).rem_euclid(m);
        PadicScalar {
            ctx: *self,
            value: r as u64,
        }
    }

    /// `p^k` reduced mod `p^M` (zero once `k ≥ M`).
    pub fn p_power(&self, k: u32) -> PadicScalar {
        if k >= self.precision {
            return self.zero();
        }
        self.from_u64(self.p.pow(k))
    }

    pub(crate) fn reduce_u128(&self, v: u128) -> u64 {
        (v % self.modulus as u128) as u64
    }
}

impl fmt::Display for PadicContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}^{}", self.p, self.precision)
    }
}

/// An element of `Z/p^M`, stored as its representative in `[0, p^M)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PadicScalar {
    ctx: PadicContext,
    value: u64,
}

impl PadicScalar {
    pub fn ctx(&self) -> PadicContext {
        self.ctx
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    /// `min(v_p(value), M)`.
    pub fn valuation(&self) -> u32 {
        valuation_of(self.value, &self.ctx)
    }

    pub fn is_unit(&self) -> bool {
        !self.value.is_multiple_of(self.ctx.p)
    }

    pub fn pow(&self, mut e: u64) -> PadicScalar {
        let mut base = *self;
        let mut acc = self.ctx.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse of a unit.
    pub fn inv_unit(&self) -> Result<PadicScalar> {
        if !self.is_unit() {
            return Err(Error::NotAUnit {
                value: self.value,
                p: self.ctx.p,
            });
        }
        let m = self.ctx.modulus as i128;
        let (mut old_r, mut r) = (self.value as i128, m);
        let (mut old_s, mut s) = (1i128, 0i128);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        debug_assert_eq!(old_r, 1);
        Ok(PadicScalar {
            ctx: self.ctx,
            value: old_s.rem_euclid(m) as u64,
        })
    }

    /// Exact division by `p^k`, valid when `valuation ≥ k`. The result is
    /// one of the `p^k` preimages; the representative `value / p^k` is used.
    pub fn div_p_power(&self, k: u32) -> PadicScalar {
        debug_assert!(self.valuation() >= k);
        PadicScalar {
            ctx: self.ctx,
            value: self.value / self.ctx.p.pow(k),
        }
    }

    /// Canonical square root by Hensel lifting: the root in `[0, p^M/2]`.
    pub fn sqrt_hensel(&self) -> Result<PadicScalar> {
        let ctx = self.ctx;
        if !self.is_unit() {
            return Err(Error::NotAUnit {
                value: self.value,
                p: ctx.p,
            });
        }
        let residue = self.value % ctx.p;
        let seed = (1..ctx.p)
            .find(|&r| (r * r) % ctx.p == residue)
            .ok_or(Error::NonResidue {
                value: self.value,
                p: ctx.p,
            })?;
        let two = ctx.from_u64(2);
        let root = newton_lift(ctx.from_u64(seed), ctx.precision, |r| {
            (*r * *r - *self, two * *r)
        })?;
        let other = -root;
        Ok(if root.value <= other.value { root } else { other })
    }

    /// Unit root `α` of `X^2 - a_p X + p`, with `α ≡ a_p (mod p)`.
    pub fn unit_root(&self) -> Result<PadicScalar> {
        let ctx = self.ctx;
        if !self.is_unit() {
            return Err(Error::NonOrdinary {
                ap: self.value,
                p: ctx.p,
            });
        }
        let p = ctx.from_u64(ctx.p);
        let two = ctx.from_u64(2);
        let ap = *self;
        newton_lift(ctx.from_u64(ap.value % ctx.p), ctx.precision, |x| {
            (*x * *x - ap * *x + p, two * *x - ap)
        })
    }

    /// Reduce into a context of the same prime and lower precision.
    pub fn reduce_to(&self, ctx: PadicContext) -> PadicScalar {
        debug_assert_eq!(ctx.p, self.ctx.p);
        ctx.from_u64(self.value)
    }
}

/// Newton iteration `x ← x - f(x)/f'(x)` for a simple root; `f'` must stay a unit.
/// Each step doubles the number of correct p-adic digits.
fn newton_lift<F>(seed: PadicScalar, precision: u32, f: F) -> Result<PadicScalar>
where
    F: Fn(&PadicScalar) -> (PadicScalar, PadicScalar),
{
    let mut x = seed;
    let mut correct = 1u32;
    while correct < precision {
        let (value, slope) = f(&x);
        x = x - value * slope.inv_unit()?;
        correct = correct.saturating_mul(2);
    }
    Ok(x)
}

pub(crate) fn valuation_of(value: u64, ctx: &PadicContext) -> u32 {
    if value == 0 {
        return ctx.precision;
    }
    let mut v = 0;
    let mut x = value;
    while x.is_multiple_of(ctx.p) {
        x /= ctx.p;
        v += 1;
    }
    v.min(ctx.precision)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for PadicScalar {
    type Output = PadicScalar;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.ctx, rhs.ctx);
        let s = self.value as u128 + rhs.value as u128;
        PadicScalar {
            ctx: self.ctx,
            value: self.ctx.reduce_u128(s),
        }
    }
}

impl Sub for PadicScalar {
    type Output = PadicScalar;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> Self {
        let value = if self.value == 0 {
            0
        } else {
            self.ctx.modulus - self.value
        };
        PadicScalar {
            ctx: self.ctx,
            value,
        }
    }
}

impl Mul for PadicScalar {
    type Output = PadicScalar;
    fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.ctx, rhs.ctx);
        PadicScalar {
            ctx: self.ctx,
            value: self.ctx.reduce_u128(self.value as u128 * rhs.value as u128),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, m: u32) -> PadicContext {
        PadicContext::new(p, m).unwrap()
    }

    #[test]
    fn rejects_bad_contexts() {
        assert!(PadicContext::new(2, 3).is_err());
        assert!(PadicContext::new(9, 1).is_err());
        assert!(PadicContext::new(5, 0).is_err());
        assert!(PadicContext::new(3, 60).is_err());
    }

    #[test]
    fn unit_root_examples() {
        let c = ctx(5, 2);
        let alpha = c.from_u64(3).unit_root().unwrap();
        assert_eq!(alpha.value(), 18);
        let c = ctx(3, 1);
        assert_eq!(c.from_u64(1).unit_root().unwrap().value(), 1);
        let c = ctx(5, 2);
        assert!(matches!(
            c.from_u64(5).unit_root(),
            Err(Error::NonOrdinary { .. })
        ));
    }

    #[test]
    fn unit_root_companion_has_valuation_one() {
        for (p, m) in [(3, 4), (5, 3), (7, 2), (11, 5)] {
            let c = ctx(p, m);
            for ap in 1..p {
                let ap = c.from_u64(ap);
                let alpha = ap.unit_root().unwrap();
                let zero = alpha * alpha - ap * alpha + c.from_u64(p);
                assert!(zero.is_zero());
                assert_eq!(alpha.value() % p, ap.value() % p);
                let beta = c.from_u64(p) * alpha.inv_unit().unwrap();
                assert_eq!(beta.valuation(), 1.min(m));
                assert_eq!((alpha + beta).value(), ap.value());
                assert_eq!((alpha * alpha.inv_unit().unwrap()).value(), 1);
            }
        }
    }

    #[test]
    fn inverse_examples() {
        let c = ctx(5, 2);
        assert_eq!(c.one().inv_unit().unwrap().value(), 1);
        assert_eq!(c.from_u64(2).inv_unit().unwrap().value(), 13);
        assert!(matches!(
            c.from_u64(5).inv_unit(),
            Err(Error::NotAUnit { .. })
        ));
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(ctx(5, 2).from_u64(4).sqrt_hensel().unwrap().value(), 2);
        assert_eq!(ctx(11, 1).from_i64(-7).sqrt_hensel().unwrap().value(), 2);
        assert!(matches!(
            ctx(5, 1).from_u64(2).sqrt_hensel(),
            Err(Error::NonResidue { .. })
        ));
        assert!(matches!(
            ctx(5, 2).from_u64(10).sqrt_hensel(),
            Err(Error::NotAUnit { .. })
        ));
    }

    #[test]
    fn sqrt_is_canonical_and_lifts_seed() {
        for (p, m) in [(3, 5), (5, 4), (7, 3), (13, 2)] {
            let c = ctx(p, m);
            for d in 1..c.modulus() {
                let d = c.from_u64(d);
                let Ok(r) = d.sqrt_hensel() else { continue };
                assert_eq!(r * r, d);
                assert!(2 * r.value() <= c.modulus());
                assert_eq!((r.value() * r.value()) % p, d.value() % p);
            }
        }
    }

    #[test]
    fn ring_axioms_exhaustive_p3_m2() {
        let c = ctx(3, 2);
        let all: Vec<_> = (0..9).map(|v| c.from_u64(v)).collect();
        for &a in &all {
            assert_eq!(a + c.zero(), a);
            assert_eq!(a * c.one(), a);
            assert!((a + (-a)).is_zero());
            for &b in &all {
                assert_eq!(a + b, b + a);
                assert_eq!(a * b, b * a);
                assert_eq!(
                    (a * b).valuation(),
                    (a.valuation() + b.valuation()).min(2)
                );
                for &d in &all {
                    assert_eq!((a + b) + d, a + (b + d));
                    assert_eq!((a * b) * d, a * (b * d));
                    assert_eq!(a * (b + d), a * b + a * d);
                }
            }
        }
    }

    #[test]
    fn zero_valuation_saturates() {
        let c = ctx(5, 3);
        assert_eq!(c.zero().valuation(), 3);
        assert_eq!(c.from_u64(25).valuation(), 2);
        assert_eq!(c.p_power(3), c.zero());
    }
}
