//! Elliptic-curve and imaginary-quadratic context: Frobenius traces by point
//! counting, quadratic symbols, hypothesis checks, and the local matrices
//! attached to Gross points at split primes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{is_prime, PadicContext, PadicScalar};

/// Largest prime accepted by the naive point counter.
pub const POINT_COUNT_LIMIT: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveSpec {
    #[serde(default)]
    pub a1: i64,
    #[serde(default)]
    pub a2: i64,
    #[serde(default)]
    pub a3: i64,
    #[serde(default)]
    pub a4: i64,
    #[serde(default)]
    pub a6: i64,
    #[serde(rename = "N")]
    pub conductor: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl CurveSpec {
    pub fn short(a4: i64, a6: i64, conductor: u64) -> Self {
        Self {
            a1: 0,
            a2: 0,
            a3: 0,
            a4,
            a6,
            conductor,
            label: None,
        }
    }

    /// Discriminant of the long Weierstrass model.
    pub fn discriminant(&self) -> i128 {
        let (a1, a2, a3, a4, a6) = (
            self.a1 as i128,
            self.a2 as i128,
            self.a3 as i128,
            self.a4 as i128,
            self.a6 as i128,
        );
        let b2 = a1 * a1 + 4 * a2;
        let b4 = 2 * a4 + a1 * a3;
        let b6 = a3 * a3 + 4 * a6;
        let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    }

    pub fn validate(&self) -> Result<()> {
        if self.discriminant() == 0 {
            return Err(Error::InvalidCurve("singular model (discriminant 0)".into()));
        }
        if self.conductor == 0 {
            return Err(Error::InvalidCurve("conductor must be ≥ 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    #[serde(rename = "D_K")]
    pub d_k: u64,
}

impl FieldSpec {
    /// `D_K` odd and `> 4`.
    pub fn shape_ok(&self) -> bool {
        self.d_k % 2 == 1 && self.d_k > 4
    }
}

/// `a_ℓ = ℓ + 1 − #E(F_ℓ)` by enumerating all affine points.
pub fn count_points_ap(curve: &CurveSpec, ell: u64) -> Result<i64> {
    curve.validate()?;
    if !is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    if ell > POINT_COUNT_LIMIT {
        return Err(Error::Data(format!(
            "point counting is capped at {POINT_COUNT_LIMIT}"
        )));
    }
    if curve.conductor.is_multiple_of(ell) || curve.discriminant() % ell as i128 == 0 {
        return Err(Error::BadReduction(ell));
    }
    let l = ell as i128;
    let r = |v: i64| (v as i128).rem_euclid(l);
    let (a1, a2, a3, a4, a6) = (r(curve.a1), r(curve.a2), r(curve.a3), r(curve.a4), r(curve.a6));
    let mut affine: i64 = 0;
    for x in 0..l {
        let rhs = (((x + a2) * x + a4) * x + a6).rem_euclid(l);
        for y in 0..l {
            let lhs = (y * y + a1 * x * y + a3 * y).rem_euclid(l);
            if lhs == rhs {
                affine += 1;
            }
        }
    }
    Ok(ell as i64 + 1 - (affine + 1))
}

/// Kronecker symbol `(d / q)` for a prime `q`.
pub fn kronecker(d: i64, q: u64) -> Result<i8> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    let r = (d as i128).rem_euclid(q as i128) as u64;
    if r == 0 {
        return Ok(0);
    }
    if q == 2 {
        return Ok(match (d as i128).rem_euclid(8) {
            1 | 7 => 1,
            _ => -1,
        });
    }
    let ctx = PadicContext::new(q, 1)?;
    let e = ctx.from_u64(r).pow((q - 1) / 2);
    Ok(if e == ctx.one() { 1 } else { -1 })
}

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ConductorSplit {
    pub n_plus: u64,
    pub n_minus: u64,
    /// `N⁻` is a square-free product of an odd number of primes.
    pub def_ok: bool,
}

/// `N = N⁺·N⁻` by the splitting behaviour of each prime factor in `K`.
pub fn split_conductor(conductor: u64, d_k: u64) -> Result<ConductorSplit> {
    let disc = -(d_k as i64);
    let mut n_plus = 1;
    let mut n_minus = 1;
    let mut minus_primes = 0;
    let mut minus_squarefree = true;
    for (q, e) in factorize(conductor) {
        let qe = q.pow(e);
        match kronecker(disc, q)? {
            1 => n_plus *= qe,
            -1 => {
                n_minus *= qe;
                minus_primes += 1;
                minus_squarefree &= e == 1;
            }
            _ => return Err(Error::RamifiedPrime(q)),
        }
    }
    Ok(ConductorSplit {
        n_plus,
        n_minus,
        def_ok: minus_squarefree && minus_primes % 2 == 1,
    })
}

/// Outcome of the checkable hypotheses. (Im) and (Ram) need the mod-p image
/// and are always reported as unchecked.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContextReport {
    pub ap: i64,
    pub ordinary: bool,
    #[serde(rename = "Na")]
    pub na: bool,
    #[serde(rename = "Spl")]
    pub spl: bool,
    #[serde(rename = "Def")]
    pub def: bool,
    pub coprimality: bool,
    pub field_shape: bool,
    #[serde(rename = "Nplus")]
    pub n_plus: u64,
    #[serde(rename = "Nminus")]
    pub n_minus: u64,
    #[serde(rename = "Im")]
    pub im: &'static str,
    #[serde(rename = "Ram")]
    pub ram: &'static str,
}

impl ContextReport {
    pub fn all_checked_pass(&self) -> bool {
        self.ordinary && self.na && self.spl && self.def && self.coprimality && self.field_shape
    }
}

pub fn check_hypotheses(curve: &CurveSpec, field: &FieldSpec, p: u64) -> Result<ContextReport> {
    let ap = count_points_ap(curve, p)?;
    let pi = p as i64;
    let split = split_conductor(curve.conductor, field.d_k)?;
    let coprimality = gcd(field.d_k, curve.conductor.saturating_mul(p)) == 1;
    Ok(ContextReport {
        ap,
        ordinary: ap.rem_euclid(pi) != 0,
        na: ap.rem_euclid(pi) != 1 % pi,
        spl: kronecker(-(field.d_k as i64), p)? == 1,
        def: split.def_ok,
        coprimality,
        field_shape: field.shape_ok(),
        n_plus: split.n_plus,
        n_minus: split.n_minus,
        im: "unchecked",
        ram: "unchecked",
    })
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A 2×2 integer matrix, row-major.
pub type IntMatrix2 = [[i128; 2]; 2];

pub fn mat_mul(a: &IntMatrix2, b: &IntMatrix2) -> IntMatrix2 {
    let mut out = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// `(trd(ϑ), nrd(ϑ)) = (D_K, (D_K² + D_K)/4)` for `ϑ = (D_K − √−D_K)/2`.
pub fn theta_trace_norm(field: &FieldSpec) -> Result<(i128, i128)> {
    let d = field.d_k as i128;
    if field.d_k % 4 != 3 {
        return Err(Error::NonIntegralNorm(field.d_k));
    }
    Ok((d, (d * d + d) / 4))
}

/// `i_q(ϑ) = [[trd ϑ, −nrd ϑ], [1, 0]]`.
pub fn local_embedding_matrix(field: &FieldSpec) -> Result<IntMatrix2> {
    let (t, nr) = theta_trace_norm(field)?;
    Ok([[t, -nr], [1, 0]])
}

/// The integer part of `i_q(J) = √β·[[−1, trd ϑ], [0, 1]]`; the scalar `√β`
/// (the quaternion `β = J²`, unrelated to the Hecke root) is left symbolic.
pub fn local_j_matrix(field: &FieldSpec) -> Result<IntMatrix2> {
    let (t, _) = theta_trace_norm(field)?;
    Ok([[-1, t], [0, 1]])
}

/// `M² − trd·M + nrd·I`.
pub fn char_poly_residual(m: &IntMatrix2, trace: i128, norm: i128) -> IntMatrix2 {
    let sq = mat_mul(m, m);
    let mut out = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let id = if i == j { norm } else { 0 };
            out[i][j] = sq[i][j] - trace * m[i][j] + id;
        }
    }
    out
}

/// `ϑ = (D_K − √−D_K)/2` in `Z/p^M`, using the canonical Hensel square root.
pub fn vartheta_mod(field: &FieldSpec, ctx: PadicContext) -> Result<PadicScalar> {
    if kronecker(-(field.d_k as i64), ctx.p())? != 1 {
        return Err(Error::NotSplit {
            p: ctx.p(),
            d: field.d_k,
        });
    }
    let root = ctx.from_i64(-(field.d_k as i64)).sqrt_hensel()?;
    let half = ctx.from_u64(2).inv_unit()?;
    Ok((ctx.from_u64(field.d_k) - root) * half)
}

/// `ς_p^{(n)} = [[ϑ, −1], [1, 0]]·diag(p^n, 1) = [[ϑ·p^n, −1], [p^n, 0]]` mod `p^M`.
pub fn gross_point_matrix_p(
    field: &FieldSpec,
    n: u32,
    ctx: PadicContext,
) -> Result<[[PadicScalar; 2]; 2]> {
    let theta = vartheta_mod(field, ctx)?;
    let pn = ctx.from_u64(ctx.p()).pow(n as u64);
    let left = [[theta, -ctx.one()], [ctx.one(), ctx.zero()]];
    let right = [[pn, ctx.zero()], [ctx.zero(), ctx.one()]];
    let mut out = [[ctx.zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = left[i][0] * right[0][j] + left[i][1] * right[1][j];
        }
    }
    Ok(out)
}
