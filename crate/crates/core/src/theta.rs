//! Theta towers `(θ_0, …, θ_N)`, their p-stabilization, and the ideal
//! identities relating them.
//!
//! A tower is valid when the three-term relation
//! `π(θ_{n+1}) = a_p·θ_n − ν(θ_{n-1})` holds for `1 ≤ n ≤ N−1`. Strict towers
//! additionally satisfy the base relation `π(θ_1) = (a_p − 1)·θ_0`, which is
//! exactly what makes the stabilized tower norm-compatible at level 0.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fitting::PresentationMatrix;
use crate::ideal::IdealHandle;
use crate::layer::{norm_of_one, omega, LayerElement};
use crate::linalg::HowellBasis;
use crate::padic::{PadicContext, PadicScalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaTower {
    ctx: PadicContext,
    ap: PadicScalar,
    levels: Vec<LayerElement>,
    seed: Option<u64>,
}

impl ThetaTower {
    /// Level `n` must sit at layer `n`. `a_p` is not required to be a unit
    /// here; operations needing `α` fail with `NonOrdinary` instead.
    pub fn new(ap: PadicScalar, levels: Vec<LayerElement>) -> Result<Self> {
        let ctx = ap.ctx();
        if levels.is_empty() {
            return Err(Error::InvalidTower("tower has no levels".into()));
        }
        for (n, t) in levels.iter().enumerate() {
            if t.ctx() != ctx {
                return Err(Error::ContextMismatch);
            }
            if t.layer() as usize != n {
                return Err(Error::InvalidTower(format!(
                    "level {n} is stored at layer {}",
                    t.layer()
                )));
            }
        }
        Ok(Self {
            ctx,
            ap,
            levels,
            seed: None,
        })
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    pub fn ctx(&self) -> PadicContext {
        self.ctx
    }

    pub fn ap(&self) -> PadicScalar {
        self.ap
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// `N`, the index of the top level.
    pub fn top(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[LayerElement] {
        &self.levels
    }

    pub fn level(&self, n: usize) -> &LayerElement {
        &self.levels[n]
    }

    /// (Na): `a_p ≢ 1 (mod p)`.
    pub fn non_anomalous(&self) -> bool {
        (self.ap - self.ctx.one()).is_unit()
    }

    /// Replace one level `θ_n` by `γ^k·θ_n`.
    pub fn twist_level(&self, n: usize, k: i64) -> Self {
        let mut out = self.clone();
        let gamma = LayerElement::gamma_power(self.ctx, n as u32, k);
        out.levels[n] = &gamma * &self.levels[n];
        out
    }

    /// Replace every `θ_m` by `γ_m^k·θ_m`; preserves all tower relations.
    pub fn twist_all(&self, k: i64) -> Self {
        let mut out = self.clone();
        for (m, t) in out.levels.iter_mut().enumerate() {
            let gamma = LayerElement::gamma_power(self.ctx, m as u32, k);
            *t = &gamma * &*t;
        }
        out
    }

    /// Add `delta` to the constant coefficient of level `n`.
    pub fn tamper(&self, n: usize, delta: i64) -> Self {
        let mut out = self.clone();
        let bump = LayerElement::constant(self.ctx.from_i64(delta), n as u32);
        out.levels[n] = &out.levels[n] + &bump;
        out
    }

    fn check_level(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.top() {
            return Err(Error::LevelOutOfRange {
                level: n,
                max: self.top(),
            });
        }
        Ok(())
    }
}

/// Assemble `Σ c_a·γ^{e_a}` from class-function values `c_a` attached to
/// group exponents `e_a` (the image of `[a]` in `Gal(K_n/K) = ⟨γ⟩`). Values
/// landing on the same group element accumulate.
pub fn assemble_from_class_values(
    ctx: PadicContext,
    n: u32,
    values: &[(i64, i64)],
) -> LayerElement {
    let d = crate::layer::layer_degree(ctx.p(), n) as i64;
    let mut group = vec![ctx.zero(); d as usize];
    for &(e, c) in values {
        let slot = e.rem_euclid(d) as usize;
        group[slot] = group[slot] + ctx.from_i64(c);
    }
    let group: Vec<u64> = group.into_iter().map(|s| s.value()).collect();
    LayerElement::from_group_basis(ctx, n, &group)
}

/// The integral normalization: not every class-function value lies in `pZ_p`.
pub fn is_integrally_normalized(ctx: PadicContext, values: &[i64]) -> bool {
    values.iter().any(|&v| ctx.from_i64(v).is_unit())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationCheck {
    pub label: String,
    pub level: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub checks: Vec<RelationCheck>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RelationCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "  [{}] {} (level {})",
                if c.passed { "pass" } else { "FAIL" },
                c.label,
                c.level
            )?;
        }
        Ok(())
    }
}

/// Checks the three-term relation for `1 ≤ n ≤ N−1` and, when `strict`, the
/// base relation `π(θ_1) = (a_p − 1)·θ_0`.
pub fn validate_tower(t: &ThetaTower, strict: bool) -> CheckReport {
    let mut report = CheckReport::default();
    let top = t.top();
    if strict && top >= 1 {
        let lhs = t.levels[1].project().expect("layer 1");
        let rhs = t.levels[0].scale(t.ap - t.ctx.one());
        report.checks.push(RelationCheck {
            label: "base relation pi(theta_1) = (a_p - 1) theta_0".into(),
            level: 1,
            passed: lhs == rhs,
        });
    }
    for n in 1..top {
        let lhs = t.levels[n + 1].project().expect("n + 1 ≥ 1");
        let rhs = &t.levels[n].scale(t.ap) - &t.levels[n - 1].norm_map();
        report.checks.push(RelationCheck {
            label: format!("three-term relation at n = {n}"),
            level: n + 1,
            passed: lhs == rhs,
        });
    }
    report
}

/// Seeded strict tower: `θ_0` random, then each level is a lift of the value
/// its relation prescribes plus a random element of `ker π = (ω_n)`.
pub fn generate_tower(seed: u64, ctx: PadicContext, top: usize, ap: PadicScalar) -> Result<ThetaTower> {
    if !ap.is_unit() {
        return Err(Error::NonOrdinary {
            ap: ap.value(),
            p: ctx.p(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut levels = vec![LayerElement::random(ctx, 0, &mut rng)];
    for n in 0..top {
        let target = if n == 0 {
            levels[0].scale(ap - ctx.one())
        } else {
            &levels[n].scale(ap) - &levels[n - 1].norm_map()
        };
        let layer = n as u32 + 1;
        let noise = &omega(ctx, n as u32, layer)? * &LayerElement::random(ctx, layer, &mut rng);
        levels.push(&target.lift() + &noise);
    }
    Ok(ThetaTower::new(ap, levels)?.with_seed(Some(seed)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizedTower {
    ctx: PadicContext,
    alpha: PadicScalar,
    levels: Vec<LayerElement>,
}

impl StabilizedTower {
    pub fn new(alpha: PadicScalar, levels: Vec<LayerElement>) -> Self {
        Self {
            ctx: alpha.ctx(),
            alpha,
            levels,
        }
    }

    pub fn ctx(&self) -> PadicContext {
        self.ctx
    }

    pub fn alpha(&self) -> PadicScalar {
        self.alpha
    }

    pub fn levels(&self) -> &[LayerElement] {
        &self.levels
    }

    pub fn level(&self, n: usize) -> &LayerElement {
        &self.levels[n]
    }

    pub fn top(&self) -> Option<usize> {
        self.levels.len().checked_sub(1)
    }

    pub fn tamper(&self, n: usize, delta: i64) -> Self {
        let mut out = self.clone();
        let bump = LayerElement::constant(self.ctx.from_i64(delta), n as u32);
        out.levels[n] = &out.levels[n] + &bump;
        out
    }

    pub fn level_checked(&self, n: usize) -> Result<&LayerElement> {
        self.check_level(n)?;
        Ok(&self.levels[n])
    }

    fn check_level(&self, n: usize) -> Result<()> {
        match self.top() {
            Some(top) if n <= top => Ok(()),
            top => Err(Error::LevelOutOfRange {
                level: n,
                max: top.unwrap_or(0),
            }),
        }
    }
}

/// `θ_n(f_α) = α^{-n}(θ_n − α^{-1}·ν(θ_{n-1}))` for `n ≥ 1`, and
/// `θ_0(f_α) = (1 − α^{-1})·θ_0`.
pub fn stabilize(t: &ThetaTower) -> Result<StabilizedTower> {
    let alpha = t.ap.unit_root()?;
    let alpha_inv = alpha.inv_unit()?;
    let ctx = t.ctx;
    let mut levels = Vec::with_capacity(t.levels.len());
    levels.push(t.levels[0].scale(ctx.one() - alpha_inv));
    for n in 1..t.levels.len() {
        let inner = &t.levels[n] - &t.levels[n - 1].norm_map().scale(alpha_inv);
        levels.push(inner.scale(alpha_inv.pow(n as u64)));
    }
    Ok(StabilizedTower::new(alpha, levels))
}

/// `π(θ_{n+1}(f_α)) = θ_n(f_α)` at every level; vacuous for towers of height < 2.
pub fn check_norm_compat(s: &StabilizedTower) -> CheckReport {
    let mut report = CheckReport::default();
    for n in 0..s.levels.len().saturating_sub(1) {
        report.checks.push(RelationCheck {
            label: format!("norm compatibility pi(theta_{}(f_a)) = theta_{n}(f_a)", n + 1),
            level: n + 1,
            passed: s.levels[n + 1].project().expect("n + 1 ≥ 1") == s.levels[n],
        });
    }
    report
}

/// `(θ_n, ν_{n-1,n}(θ_{n-1}))`.
pub fn two_generator_ideal(t: &ThetaTower, n: usize) -> Result<IdealHandle> {
    t.check_level(n)?;
    IdealHandle::new(
        t.ctx,
        n as u32,
        vec![t.levels[n].clone(), t.levels[n - 1].norm_map()],
    )
}

/// `(ν_{m,n}(θ_m) : 0 ≤ m ≤ n)`.
pub fn full_norm_ideal(t: &ThetaTower, n: usize) -> Result<IdealHandle> {
    t.check_level(n)?;
    let gens = (0..=n)
        .map(|m| t.levels[m].norm_to(n as u32))
        .collect::<Result<Vec<_>>>()?;
    IdealHandle::new(t.ctx, n as u32, gens)
}

fn require_valid(t: &ThetaTower, strict: bool) -> Result<()> {
    let report = validate_tower(t, strict);
    if let Some(bad) = report.failures().next() {
        return Err(Error::InvalidTower(bad.label.clone()));
    }
    Ok(())
}

/// Ideal equality `(θ_n, ν(θ_{n-1})) = (ν_{m,n}(θ_m) : m ≤ n)` on a valid tower.
pub fn verify_lemma_21(t: &ThetaTower, n: usize) -> Result<bool> {
    t.check_level(n)?;
    require_valid(t, false)?;
    two_generator_ideal(t, n)?.equals(&full_norm_ideal(t, n)?)
}

/// Explicit coefficients `(A_m, B_m)` with
/// `ν_{m,n}(θ_m) = A_m·θ_n + B_m·ν_{n-1,n}(θ_{n-1})`, indexed by `m`.
///
/// Applying `ν_{k,n}` to the relation at level `k` gives
/// `u_{k-1} = a_p·u_k − F_{k+1}·u_{k+1}` where `u_m = ν_{m,n}(θ_m)` and `F_{k+1}`
/// is any lift to layer `n` of `ν_{k,k+1}(1)` (projection formula).
pub fn lemma_21_certificate(t: &ThetaTower, n: usize) -> Result<Vec<(LayerElement, LayerElement)>> {
    t.check_level(n)?;
    let ctx = t.ctx;
    let layer = n as u32;
    let zero = LayerElement::zero(ctx, layer);
    let one = LayerElement::one(ctx, layer);
    let mut coeffs = vec![(zero.clone(), zero.clone()); n + 1];
    coeffs[n] = (one.clone(), zero.clone());
    coeffs[n - 1] = (zero, one);
    for k in (1..n).rev() {
        let mut f = norm_of_one(ctx, k as u32 + 1)?;
        while f.layer() < layer {
            f = f.lift();
        }
        let (a1, b1) = &coeffs[k + 1];
        let (a0, b0) = &coeffs[k];
        let a = &a0.scale(t.ap) - &(&f * a1);
        let b = &b0.scale(t.ap) - &(&f * b1);
        coeffs[k - 1] = (a, b);
    }
    Ok(coeffs)
}

/// Whether a certificate from [`lemma_21_certificate`] reproduces every `ν_{m,n}(θ_m)`.
pub fn check_lemma_21_certificate(
    t: &ThetaTower,
    n: usize,
    cert: &[(LayerElement, LayerElement)],
) -> Result<bool> {
    t.check_level(n)?;
    let top = &t.levels[n];
    let below = t.levels[n - 1].norm_map();
    for (m, (a, b)) in cert.iter().enumerate() {
        let expected = t.levels[m].norm_to(n as u32)?;
        if &(a * top) + &(b * &below) != expected {
            return Ok(false);
        }
    }
    Ok(cert.len() == n + 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lemma22Verdict {
    /// `(θ_n(f_α)) ⊆ (θ_n, ν(θ_{n-1}))`.
    pub inclusion_fwd: bool,
    /// `(θ_n, ν(θ_{n-1})) ⊆ (θ_n(f_α))`.
    pub inclusion_bwd: bool,
    pub equal: bool,
    /// Whether (Na) holds, i.e. whether `equal` is expected.
    pub non_anomalous: bool,
}

/// Compares `(θ_n, ν(θ_{n-1}))` with `(θ_n(f_α))` on a strict tower.
pub fn verify_lemma_22(t: &ThetaTower, n: usize) -> Result<Lemma22Verdict> {
    t.check_level(n)?;
    require_valid(t, true)?;
    let s = stabilize(t)?;
    let two = two_generator_ideal(t, n)?;
    let stab = IdealHandle::principal(s.level(n));
    let inclusion_fwd = stab.is_subset_of(&two)?;
    let inclusion_bwd = two.is_subset_of(&stab)?;
    Ok(Lemma22Verdict {
        inclusion_fwd,
        inclusion_bwd,
        equal: inclusion_fwd && inclusion_bwd,
        non_anomalous: t.non_anomalous(),
    })
}

/// Multipliers `g_m` with `θ_m = g_m·θ_m(f_α)` for `0 ≤ m ≤ n`, following the
/// induction: `g_0 = (1 − α^{-1})^{-1}` and `g_m = α^m + α^{-1}·ν(g_{m-1})`.
/// Requires (Na), so that `1 − α^{-1}` is a unit.
pub fn lemma_22_multipliers(t: &ThetaTower, n: usize) -> Result<Vec<LayerElement>> {
    if n > t.top() {
        return Err(Error::LevelOutOfRange {
            level: n,
            max: t.top(),
        });
    }
    if !t.non_anomalous() {
        return Err(Error::HypothesisViolation(
            "(Na) a_p = 1 mod p: 1 - 1/alpha is not a unit".into(),
        ));
    }
    let ctx = t.ctx;
    let alpha = t.ap.unit_root()?;
    let alpha_inv = alpha.inv_unit()?;
    let factor = (ctx.one() - alpha_inv).inv_unit()?;
    let mut out = vec![LayerElement::constant(factor, 0)];
    for m in 1..=n {
        let prev = out[m - 1].norm_map().scale(alpha_inv);
        let base = LayerElement::constant(alpha.pow(m as u64), m as u32);
        out.push(&base + &prev);
    }
    Ok(out)
}

/// `θ_n(f_α)·ι(θ_n(f_α))`, the layer-`n` image of the p-adic L-function.
pub fn lp_approx(s: &StabilizedTower, n: usize) -> Result<LayerElement> {
    s.check_level(n)?;
    let x = s.level(n);
    Ok(x * &x.iota())
}

/// Ideal equality `(θ_n(f_α)) = (ι(θ_n(f_α)))`.
pub fn check_functional_eq(s: &StabilizedTower, n: usize) -> Result<bool> {
    s.check_level(n)?;
    let x = s.level(n);
    IdealHandle::principal(x).equals(&IdealHandle::principal(&x.iota()))
}

/// Finite-layer μ: least coefficient valuation, or "at least M" for zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MuInvariant {
    Finite(u32),
    AtLeast(u32),
}

impl fmt::Display for MuInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MuInvariant::Finite(v) => write!(f, "{v}"),
            MuInvariant::AtLeast(m) => write!(f, "≥ {m}"),
        }
    }
}

pub fn mu_invariant(x: &LayerElement) -> MuInvariant {
    if x.is_zero() {
        MuInvariant::AtLeast(x.ctx().precision())
    } else {
        MuInvariant::Finite(x.min_valuation())
    }
}

#[derive(Clone, Debug)]
pub struct MainIdentityReport {
    pub n: usize,
    /// `(θ_n, ν(θ_{n-1}))^2`.
    pub squared_ideal: HowellBasis,
    pub fitting_ideal: HowellBasis,
    /// `(θ_n(f_α))^2`.
    pub stabilized_square: HowellBasis,
    pub identity_holds: bool,
    pub principal: bool,
    pub generator: Option<LayerElement>,
}

impl MainIdentityReport {
    pub fn passed(&self) -> bool {
        self.identity_holds && self.principal
    }
}

/// Checks `(θ_n, ν(θ_{n-1}))^2 = Fitt_0(P)` and principality of the square.
pub fn verify_main_identity(
    t: &ThetaTower,
    n: usize,
    presentation: &PresentationMatrix,
) -> Result<MainIdentityReport> {
    t.check_level(n)?;
    if !t.non_anomalous() {
        return Err(Error::HypothesisViolation("(Na) violated: a_p = 1 mod p".into()));
    }
    require_valid(t, true)?;
    if presentation.ctx() != t.ctx {
        return Err(Error::ContextMismatch);
    }
    if presentation.layer() as usize != n {
        return Err(Error::LayerMismatch(n as u32, presentation.layer()));
    }
    let s = stabilize(t)?;
    let squared = two_generator_ideal(t, n)?.square();
    let fitting = presentation.fitting_ideal();
    let stab_sq = IdealHandle::principal(s.level(n)).square();
    let identity_holds = squared.equals(&fitting)?;
    let generator = squared.is_principal();
    Ok(MainIdentityReport {
        n,
        squared_ideal: squared.canonical().clone(),
        fitting_ideal: fitting.canonical().clone(),
        stabilized_square: stab_sq.canonical().clone(),
        identity_holds,
        principal: generator.is_some(),
        generator,
    })
}

/// `diag(θ_n(f_α), θ_n(f_α))`, a presentation with the expected Fitting ideal.
pub fn stabilized_diagonal_presentation(t: &ThetaTower, n: usize) -> Result<PresentationMatrix> {
    if n > t.top() {
        return Err(Error::LevelOutOfRange {
            level: n,
            max: t.top(),
        });
    }
    let s = stabilize(t)?;
    PresentationMatrix::diagonal(&[s.level(n).clone(), s.level(n).clone()])
}
