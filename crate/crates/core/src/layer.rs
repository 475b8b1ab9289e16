//! The finite-layer Iwasawa algebra `Λ_n^{(M)} = (Z/p^M)[X]/(ω_n)` with
//! `ω_n = (1+X)^{p^n} - 1`, and its structure maps.
//!
//! Elements are stored in the polynomial basis `X^i`, `0 ≤ i < p^n`. The
//! group generator is `γ = 1 + X`; the group basis `γ^i` is available through
//! [`LayerElement::to_group_basis`] and is where `ν` and `ι` are defined.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use rand::Rng;

use crate::error::{Error, Result};
use crate::padic::{PadicContext, PadicScalar};

/// Pascal triangle mod `p^M`, rows `0..=d`, cached per `(p, M, d)`.
type Pascal = Arc<Vec<Vec<u64>>>;

fn pascal(ctx: &PadicContext, d: usize) -> Pascal {
    static CACHE: OnceLock<RwLock<HashMap<(u64, u32, usize), Pascal>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (ctx.p(), ctx.precision(), d);
    if let Some(t) = cache.read().unwrap().get(&key) {
        return t.clone();
    }
    let m = ctx.modulus();
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity(d + 1);
    rows.push(vec![1 % m]);
    for i in 1..=d {
        let prev = &rows[i - 1];
        let mut row = vec![0u64; i + 1];
        row[0] = 1 % m;
        row[i] = 1 % m;
        for k in 1..i {
            row[k] = ((prev[k - 1] as u128 + prev[k] as u128) % m as u128) as u64;
        }
        rows.push(row);
    }
    let t = Arc::new(rows);
    cache.write().unwrap().insert(key, t.clone());
    t
}

/// `p^n` as a usize.
pub fn layer_degree(p: u64, n: u32) -> usize {
    (p as usize).pow(n)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LayerElement {
    ctx: PadicContext,
    n: u32,
    coeffs: Vec<u64>,
}

impl LayerElement {
    pub fn zero(ctx: PadicContext, n: u32) -> Self {
        Self {
            ctx,
            n,
            coeffs: vec![0; layer_degree(ctx.p(), n)],
        }
    }

    pub fn constant(c: PadicScalar, n: u32) -> Self {
        let mut e = Self::zero(c.ctx(), n);
        e.coeffs[0] = c.value();
        e
    }

    pub fn one(ctx: PadicContext, n: u32) -> Self {
        Self::constant(ctx.one(), n)
    }

    /// The variable `X = γ - 1`.
    pub fn x(ctx: PadicContext, n: u32) -> Self {
        Self::monomial(ctx, n, 1)
    }

    /// `X^k` reduced mod `ω_n`.
    pub fn monomial(ctx: PadicContext, n: u32, k: usize) -> Self {
        let d = layer_degree(ctx.p(), n);
        if k < d {
            let mut e = Self::zero(ctx, n);
            e.coeffs[k] = 1 % ctx.modulus();
            e
        } else {
            let mut full = vec![0u64; k + 1];
            full[k] = 1 % ctx.modulus();
            Self::reduce_poly(ctx, n, full)
        }
    }

    /// `γ^k = (1+X)^k`; `k` may be any integer.
    pub fn gamma_power(ctx: PadicContext, n: u32, k: i64) -> Self {
        let d = layer_degree(ctx.p(), n);
        let mut group = vec![0u64; d];
        group[k.rem_euclid(d as i64) as usize] = 1 % ctx.modulus();
        Self::from_group_basis(ctx, n, &group)
    }

    /// Builds an element from signed integer coefficients in the `X^i` basis.
    /// Shorter inputs are zero-padded; longer inputs are rejected.
    pub fn from_coeffs(ctx: PadicContext, n: u32, coeffs: &[i64]) -> Result<Self> {
        let d = layer_degree(ctx.p(), n);
        if coeffs.len() > d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: coeffs.len(),
            });
        }
        let mut e = Self::zero(ctx, n);
        for (slot, &c) in e.coeffs.iter_mut().zip(coeffs) {
            *slot = ctx.from_i64(c).value();
        }
        Ok(e)
    }

    pub(crate) fn from_raw(ctx: PadicContext, n: u32, coeffs: Vec<u64>) -> Self {
        debug_assert_eq!(coeffs.len(), layer_degree(ctx.p(), n));
        Self { ctx, n, coeffs }
    }

    pub fn random<R: Rng + ?Sized>(ctx: PadicContext, n: u32, rng: &mut R) -> Self {
        let d = layer_degree(ctx.p(), n);
        let coeffs = (0..d).map(|_| rng.gen_range(0..ctx.modulus())).collect();
        Self { ctx, n, coeffs }
    }

    pub fn ctx(&self) -> PadicContext {
        self.ctx
    }

    pub fn layer(&self) -> u32 {
        self.n
    }

    /// `p^n`, the rank over `Z/p^M`.
    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, i: usize) -> PadicScalar {
        self.ctx.from_u64(self.coeffs[i])
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Minimal coefficient valuation; `M` for the zero element.
    pub fn min_valuation(&self) -> u32 {
        self.coeffs
            .iter()
            .map(|&c| self.ctx.from_u64(c).valuation())
            .min()
            .unwrap_or(self.ctx.precision())
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch);
        }
        if self.n != other.n {
            return Err(Error::LayerMismatch(self.n, other.n));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let m = self.ctx.modulus() as u128;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| ((a as u128 + b as u128) % m) as u64)
            .collect();
        Ok(Self::from_raw(self.ctx, self.n, coeffs))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg_ref())
    }

    fn neg_ref(&self) -> Self {
        let m = self.ctx.modulus();
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| if c == 0 { 0 } else { m - c })
            .collect();
        Self::from_raw(self.ctx, self.n, coeffs)
    }

    pub fn scale(&self, c: PadicScalar) -> Self {
        debug_assert_eq!(c.ctx(), self.ctx);
        let coeffs = self
            .coeffs
            .iter()
            .map(|&a| self.ctx.reduce_u128(a as u128 * c.value() as u128))
            .collect();
        Self::from_raw(self.ctx, self.n, coeffs)
    }

    /// Schoolbook product followed by reduction modulo `ω_n`.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let d = self.degree();
        let m = self.ctx.modulus() as u128;
        let mut full = vec![0u128; 2 * d - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                full[i + j] = (full[i + j] + a as u128 * b as u128) % m;
            }
        }
        let full = full.into_iter().map(|v| v as u64).collect();
        Ok(Self::reduce_poly(self.ctx, self.n, full))
    }

    /// Reduce an arbitrary polynomial modulo `ω_n` (monic of degree `p^n`).
    fn reduce_poly(ctx: PadicContext, n: u32, poly: Vec<u64>) -> Self {
        let d = layer_degree(ctx.p(), n);
        reduce_mod_omega(ctx, d, poly, |out| Self::from_raw(ctx, n, out))
    }

    /// Coefficients in the group basis `γ^k`, `0 ≤ k < p^n`.
    pub fn to_group_basis(&self) -> Vec<u64> {
        // X^i = (γ - 1)^i = Σ_k C(i,k) (-1)^{i-k} γ^k
        let d = self.degree();
        let t = pascal(&self.ctx, d);
        let ctx = self.ctx;
        let mut group = vec![ctx.zero(); d];
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let c = ctx.from_u64(c);
            for k in 0..=i {
                let term = c * ctx.from_u64(t[i][k]);
                group[k] = if (i - k) % 2 == 0 {
                    group[k] + term
                } else {
                    group[k] - term
                };
            }
        }
        group.into_iter().map(|s| s.value()).collect()
    }

    pub fn from_group_basis(ctx: PadicContext, n: u32, group: &[u64]) -> Self {
        // γ^k = (1 + X)^k = Σ_i C(k,i) X^i
        let d = layer_degree(ctx.p(), n);
        assert_eq!(group.len(), d, "group basis vector has wrong length");
        let t = pascal(&ctx, d);
        let mut coeffs = vec![ctx.zero(); d];
        for (k, &g) in group.iter().enumerate() {
            if g == 0 {
                continue;
            }
            let g = ctx.from_u64(g);
            for i in 0..=k {
                coeffs[i] = coeffs[i] + g * ctx.from_u64(t[k][i]);
            }
        }
        Self::from_raw(ctx, n, coeffs.into_iter().map(|s| s.value()).collect())
    }

    /// The involution `Σ a_σ σ ↦ Σ a_σ σ^{-1}`.
    pub fn iota(&self) -> Self {
        let group = self.to_group_basis();
        let d = group.len();
        let mut inverted = vec![0u64; d];
        for (k, &g) in group.iter().enumerate() {
            inverted[(d - k) % d] = g;
        }
        Self::from_group_basis(self.ctx, self.n, &inverted)
    }

    /// `π_{n,n-1}`: reduction modulo `ω_{n-1}`, i.e. `γ_n ↦ γ_{n-1}`.
    pub fn project(&self) -> Result<Self> {
        if self.n == 0 {
            return Err(Error::BottomLayer);
        }
        Ok(Self::reduce_poly(self.ctx, self.n - 1, self.coeffs.clone()))
    }

    /// Composite projection `π_{n,m}` for `m ≤ n`.
    pub fn project_to(&self, m: u32) -> Result<Self> {
        if m > self.n {
            return Err(Error::InvalidTarget {
                source_layer: self.n,
                target: m,
            });
        }
        Ok(Self::reduce_poly(self.ctx, m, self.coeffs.clone()))
    }

    /// `ν_{n,n+1}`: each group element goes to the sum of its `p` preimages.
    pub fn norm_map(&self) -> Self {
        let group = self.to_group_basis();
        let low = group.len();
        let ctx = self.ctx;
        let mut lifted = vec![0u64; low * ctx.p() as usize];
        for (i, &g) in group.iter().enumerate() {
            for j in 0..ctx.p() as usize {
                lifted[i + j * low] = g;
            }
        }
        Self::from_group_basis(ctx, self.n + 1, &lifted)
    }

    /// Composite `ν_{n,m}` of one-step norm maps, `m ≥ n`; identity when `m == n`.
    pub fn norm_to(&self, m: u32) -> Result<Self> {
        if m < self.n {
            return Err(Error::InvalidTarget {
                source_layer: self.n,
                target: m,
            });
        }
        let mut acc = self.clone();
        while acc.n < m {
            acc = acc.norm_map();
        }
        Ok(acc)
    }

    /// The same polynomial viewed one layer up; a section of `π`.
    pub fn lift(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(self.degree() * self.ctx.p() as usize, 0);
        Self::from_raw(self.ctx, self.n + 1, coeffs)
    }

    /// Drop precision from `M` to `ctx.precision()` (same prime).
    pub fn reduce_precision(&self, ctx: PadicContext) -> Self {
        debug_assert_eq!(ctx.p(), self.ctx.p());
        let coeffs = self.coeffs.iter().map(|&c| c % ctx.modulus()).collect();
        Self::from_raw(ctx, self.n, coeffs)
    }
}

fn reduce_mod_omega<T>(
    ctx: PadicContext,
    d: usize,
    mut poly: Vec<u64>,
    finish: impl FnOnce(Vec<u64>) -> T,
) -> T {
    if poly.len() > d {
        // X^d ≡ -Σ_{k=1}^{d-1} C(d,k) X^k
        let t = pascal(&ctx, d);
        let row = &t[d];
        let m = ctx.modulus() as u128;
        for top in (d..poly.len()).rev() {
            let c = poly[top];
            if c == 0 {
                continue;
            }
            poly[top] = 0;
            let shift = top - d;
            for k in 1..d {
                let sub = (c as u128 * row[k] as u128) % m;
                let slot = &mut poly[shift + k];
                *slot = ((*slot as u128 + m - sub) % m) as u64;
            }
        }
    }
    poly.resize(d, 0);
    finish(poly)
}

/// `ω_k = (1+X)^{p^k} - 1` as an element of layer `target ≥ k`.
pub fn omega(ctx: PadicContext, k: u32, target: u32) -> Result<LayerElement> {
    if target < k {
        return Err(Error::InvalidTarget {
            source_layer: k,
            target,
        });
    }
    let dk = layer_degree(ctx.p(), k);
    let t = pascal(&ctx, dk);
    let mut coeffs = t[dk].clone();
    coeffs[0] = 0;
    Ok(LayerElement::reduce_poly(ctx, target, coeffs))
}

/// `ν_{n-1,n}(1)`, the element written `f_n` in the identity `ν(π(x)) = f_n·x`.
pub fn norm_of_one(ctx: PadicContext, n: u32) -> Result<LayerElement> {
    if n == 0 {
        return Err(Error::BottomLayer);
    }
    Ok(LayerElement::one(ctx, n - 1).norm_map())
}

impl fmt::Display for LayerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*X")?,
                _ => write!(f, "{c}*X^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

// Operator sugar; panics on mismatched layers. Use the `try_*` forms on
// untrusted input.
impl Add for &LayerElement {
    type Output = LayerElement;
    fn add(self, rhs: Self) -> LayerElement {
        self.try_add(rhs).expect("layer mismatch in +")
    }
}

impl Sub for &LayerElement {
    type Output = LayerElement;
    fn sub(self, rhs: Self) -> LayerElement {
        self.try_sub(rhs).expect("layer mismatch in -")
    }
}

impl Mul for &LayerElement {
    type Output = LayerElement;
    fn mul(self, rhs: Self) -> LayerElement {
        self.try_mul(rhs).expect("layer mismatch in *")
    }
}

impl Neg for &LayerElement {
    type Output = LayerElement;
    fn neg(self) -> LayerElement {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx(p: u64, m: u32) -> PadicContext {
        PadicContext::new(p, m).unwrap()
    }

    #[test]
    fn gamma_has_order_p_to_the_n() {
        for (p, n) in [(3, 0), (3, 1), (3, 2), (5, 1), (5, 2)] {
            let c = ctx(p, 2);
            let gamma = LayerElement::gamma_power(c, n, 1);
            let d = layer_degree(p, n);
            let mut acc = LayerElement::one(c, n);
            for _ in 0..d {
                acc = &acc * &gamma;
            }
            assert_eq!(acc, LayerElement::one(c, n));
        }
    }

    #[test]
    fn x_times_top_monomial_reduces() {
        // X^9 in Λ_2 for p = 3 is -(C(9,1) X + ... + C(9,8) X^8).
        let c = ctx(3, 3);
        let a = LayerElement::x(c, 2);
        let b = LayerElement::monomial(c, 2, 8);
        let prod = &a * &b;
        let binom = [9i64, 36, 84, 126, 126, 84, 36, 9];
        let mut expected = vec![0i64];
        expected.extend(binom.iter().map(|v| -v));
        assert_eq!(prod, LayerElement::from_coeffs(c, 2, &expected).unwrap());
    }

    #[test]
    fn omega_examples() {
        let c = ctx(3, 2);
        assert!(omega(c, 1, 1).unwrap().is_zero());
        assert_eq!(omega(c, 0, 1).unwrap(), LayerElement::x(c, 1));
        assert_eq!(
            omega(c, 1, 2).unwrap(),
            LayerElement::from_coeffs(c, 2, &[0, 3, 3, 1]).unwrap()
        );
        assert!(omega(c, 2, 1).is_err());
    }

    #[test]
    fn iota_examples() {
        let c = ctx(5, 2);
        let one = LayerElement::one(c, 2);
        assert_eq!(one.iota(), one);
        let gamma = LayerElement::gamma_power(c, 2, 1);
        assert_eq!(gamma.iota(), LayerElement::gamma_power(c, 2, 24));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = LayerElement::random(c, 2, &mut rng);
        assert_eq!(a.iota().iota(), a);
    }

    #[test]
    fn project_examples() {
        let c = ctx(3, 2);
        let k = c.from_u64(7);
        assert_eq!(
            LayerElement::constant(k, 2).project().unwrap(),
            LayerElement::constant(k, 1)
        );
        assert!(LayerElement::x(c, 1).project().unwrap().is_zero());
        assert_eq!(LayerElement::one(c, 0).project(), Err(Error::BottomLayer));
    }

    #[test]
    fn norm_of_identity_is_kernel_subgroup_sum() {
        let c = ctx(3, 2);
        let nu1 = norm_of_one(c, 2).unwrap();
        let mut expected = LayerElement::zero(c, 2);
        for j in 0..3 {
            expected = &expected + &LayerElement::gamma_power(c, 2, 3 * j);
        }
        assert_eq!(nu1, expected);
        assert!(LayerElement::zero(c, 1).norm_map().is_zero());
    }

    #[test]
    fn norm_equals_lift_times_norm_of_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (p, m) in [(3, 3), (5, 2)] {
            let c = ctx(p, m);
            for n in 0..2 {
                let a = LayerElement::random(c, n, &mut rng);
                let f = norm_of_one(c, n + 1).unwrap();
                assert_eq!(a.norm_map(), &a.lift() * &f);
            }
        }
    }

    #[test]
    fn group_basis_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = ctx(5, 3);
        for n in 0..3 {
            let a = LayerElement::random(c, n, &mut rng);
            let g = a.to_group_basis();
            assert_eq!(LayerElement::from_group_basis(c, n, &g), a);
        }
    }

    #[test]
    fn projection_agrees_with_group_basis_folding() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = ctx(3, 2);
        let a = LayerElement::random(c, 2, &mut rng);
        let g = a.to_group_basis();
        let mut folded = vec![c.zero(); 3];
        for (k, &v) in g.iter().enumerate() {
            folded[k % 3] = folded[k % 3] + c.from_u64(v);
        }
        let folded: Vec<u64> = folded.into_iter().map(|s| s.value()).collect();
        assert_eq!(
            a.project().unwrap(),
            LayerElement::from_group_basis(c, 1, &folded)
        );
    }

    #[test]
    fn layer_mismatch_is_an_error() {
        let c = ctx(3, 1);
        let a = LayerElement::one(c, 1);
        let b = LayerElement::one(c, 2);
        assert_eq!(a.try_mul(&b), Err(Error::LayerMismatch(1, 2)));
        assert!(LayerElement::from_coeffs(c, 0, &[1, 2]).is_err());
    }
}
