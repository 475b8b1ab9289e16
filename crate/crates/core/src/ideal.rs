//! Ideals of `Λ_n^{(M)}`.
//!
//! An ideal `(g_1, …, g_r)` is, as a `Z/p^M`-module, the span of the
//! `X^i·g_j` for `0 ≤ i < p^n`. Its Howell basis is the canonical form; all
//! ideal predicates reduce to comparisons of Howell bases.

use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::layer::LayerElement;
use crate::linalg::{howell_from_rows, HowellBasis};
use crate::padic::PadicContext;

#[derive(Clone)]
pub struct IdealHandle {
    ctx: PadicContext,
    n: u32,
    generators: Vec<LayerElement>,
    canonical: OnceLock<HowellBasis>,
}

impl fmt::Debug for IdealHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IdealHandle")
            .field("ctx", &self.ctx)
            .field("n", &self.n)
            .field("generators", &self.generators)
            .finish()
    }
}

impl IdealHandle {
    pub fn new(ctx: PadicContext, n: u32, generators: Vec<LayerElement>) -> Result<Self> {
        for g in &generators {
            if g.ctx() != ctx {
                return Err(Error::ContextMismatch);
            }
            if g.layer() != n {
                return Err(Error::LayerMismatch(n, g.layer()));
            }
        }
        Ok(Self {
            ctx,
            n,
            generators,
            canonical: OnceLock::new(),
        })
    }

    /// Convenience for a non-empty generator list.
    pub fn generated_by(generators: &[LayerElement]) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| Error::Data("ideal needs at least one generator".into()))?;
        Self::new(first.ctx(), first.layer(), generators.to_vec())
    }

    pub fn principal(g: &LayerElement) -> Self {
        Self::new(g.ctx(), g.layer(), vec![g.clone()]).expect("single generator")
    }

    pub fn zero(ctx: PadicContext, n: u32) -> Self {
        Self::new(ctx, n, Vec::new()).expect("empty generator list")
    }

    pub fn unit(ctx: PadicContext, n: u32) -> Self {
        Self::principal(&LayerElement::one(ctx, n))
    }

    pub fn ctx(&self) -> PadicContext {
        self.ctx
    }

    pub fn layer(&self) -> u32 {
        self.n
    }

    pub fn generators(&self) -> &[LayerElement] {
        &self.generators
    }

    pub fn canonical(&self) -> &HowellBasis {
        self.canonical.get_or_init(|| {
            let x = LayerElement::x(self.ctx, self.n);
            let d = crate::layer::layer_degree(self.ctx.p(), self.n);
            let mut rows = Vec::with_capacity(d * self.generators.len());
            for g in &self.generators {
                let mut shifted = g.clone();
                for _ in 0..d {
                    rows.push(shifted.coeffs().to_vec());
                    shifted = &shifted * &x;
                }
            }
            howell_from_rows(self.ctx, d, rows)
        })
    }

    fn check_same(&self, other_ctx: PadicContext, other_n: u32) -> Result<()> {
        if self.ctx != other_ctx {
            return Err(Error::ContextMismatch);
        }
        if self.n != other_n {
            return Err(Error::LayerMismatch(self.n, other_n));
        }
        Ok(())
    }

    pub fn contains(&self, x: &LayerElement) -> Result<bool> {
        self.check_same(x.ctx(), x.layer())?;
        self.canonical().contains(x.coeffs())
    }

    pub fn equals(&self, other: &Self) -> Result<bool> {
        self.check_same(other.ctx, other.n)?;
        Ok(self.canonical() == other.canonical())
    }

    /// `I ⊆ J`, checked generator by generator.
    pub fn is_subset_of(&self, other: &Self) -> Result<bool> {
        self.check_same(other.ctx, other.n)?;
        for g in &self.generators {
            if !other.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn product(&self, other: &Self) -> Result<Self> {
        self.check_same(other.ctx, other.n)?;
        let mut gens = Vec::with_capacity(self.generators.len() * other.generators.len());
        for g in &self.generators {
            for h in &other.generators {
                gens.push(g * h);
            }
        }
        Self::new(self.ctx, self.n, gens)
    }

    pub fn square(&self) -> Self {
        self.product(self).expect("same layer")
    }

    /// Image under `π_{n,m}`; generated by the projected generators.
    pub fn project_to(&self, m: u32) -> Result<Self> {
        let gens = self
            .generators
            .iter()
            .map(|g| g.project_to(m))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.ctx, m, gens)
    }

    /// `m·I` for the maximal ideal `m = (p, X)`.
    pub fn maximal_times(&self) -> Self {
        let p = LayerElement::constant(self.ctx.from_u64(self.ctx.p()), self.n);
        let x = LayerElement::x(self.ctx, self.n);
        let gens = self
            .generators
            .iter()
            .flat_map(|g| [&p * g, &x * g])
            .collect();
        Self::new(self.ctx, self.n, gens).expect("same layer")
    }

    /// Minimal number of generators, `dim_{F_p} I/mI` (Nakayama).
    pub fn minimal_generator_count(&self) -> u32 {
        self.canonical().log_size() - self.maximal_times().canonical().log_size()
    }

    /// A single generator when the ideal is principal. The zero ideal is
    /// principal, generated by `0`.
    pub fn is_principal(&self) -> Option<LayerElement> {
        match self.minimal_generator_count() {
            0 => Some(LayerElement::zero(self.ctx, self.n)),
            1 => {
                // Any generator outside mI spans I/mI, hence generates I.
                let m_i = self.maximal_times();
                self.generators
                    .iter()
                    .find(|g| !m_i.contains(g).expect("same layer"))
                    .cloned()
            }
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.canonical().is_empty()
    }
}
