//! Initial Fitting ideals of finitely presented `Λ_n^{(M)}`-modules.

use crate::error::{Error, Result};
use crate::ideal::IdealHandle;
use crate::layer::LayerElement;
use crate::linalg::minors;
use crate::padic::PadicContext;

/// An `r×s` matrix presenting `coker(Λ_n^s → Λ_n^r)`: rows index generators,
/// columns index relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentationMatrix {
    ctx: PadicContext,
    n: u32,
    entries: Vec<Vec<LayerElement>>,
    cols: usize,
}

impl PresentationMatrix {
    pub fn new(
        ctx: PadicContext,
        n: u32,
        cols: usize,
        entries: Vec<Vec<LayerElement>>,
    ) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Data("presentation needs at least one row".into()));
        }
        for row in &entries {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
            for e in row {
                if e.ctx() != ctx {
                    return Err(Error::ContextMismatch);
                }
                if e.layer() != n {
                    return Err(Error::LayerMismatch(n, e.layer()));
                }
            }
        }
        Ok(Self {
            ctx,
            n,
            entries,
            cols,
        })
    }

    /// `diag(d_1, …, d_k)`, presenting `⊕ Λ_n/(d_i)`.
    pub fn diagonal(diag: &[LayerElement]) -> Result<Self> {
        let first = diag
            .first()
            .ok_or_else(|| Error::Data("empty diagonal".into()))?;
        let (ctx, n) = (first.ctx(), first.layer());
        let k = diag.len();
        let entries = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        if i == j {
                            diag[i].clone()
                        } else {
                            LayerElement::zero(ctx, n)
                        }
                    })
                    .collect()
            })
            .collect();
        Self::new(ctx, n, k, entries)
    }

    pub fn ctx(&self) -> PadicContext {
        self.ctx
    }

    pub fn layer(&self) -> u32 {
        self.n
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Vec<LayerElement>] {
        &self.entries
    }

    pub fn entry(&self, r: usize, c: usize) -> &LayerElement {
        &self.entries[r][c]
    }

    /// `Fitt_0`: the ideal of all `r×r` minors; zero when `s < r`.
    pub fn fitting_ideal(&self) -> IdealHandle {
        let r = self.rows();
        if self.cols < r {
            return IdealHandle::zero(self.ctx, self.n);
        }
        let gens = minors(&self.entries, r).expect("r ≤ s checked above");
        IdealHandle::new(self.ctx, self.n, gens).expect("minors live at the same layer")
    }

    /// Entrywise `π_{n,m}` for `m < n`.
    pub fn base_change(&self, m: u32) -> Result<Self> {
        if m >= self.n {
            return Err(Error::InvalidTarget {
                source_layer: self.n,
                target: m,
            });
        }
        let entries = self
            .entries
            .iter()
            .map(|row| row.iter().map(|e| e.project_to(m)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.ctx, m, self.cols, entries)
    }

    /// Block-diagonal sum, presenting the direct sum of the two modules.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch);
        }
        if self.n != other.n {
            return Err(Error::LayerMismatch(self.n, other.n));
        }
        let zero = LayerElement::zero(self.ctx, self.n);
        let cols = self.cols + other.cols;
        let mut entries = Vec::with_capacity(self.rows() + other.rows());
        for row in &self.entries {
            let mut r = row.clone();
            r.extend(std::iter::repeat_n(zero.clone(), other.cols));
            entries.push(r);
        }
        for row in &other.entries {
            let mut r = vec![zero.clone(); self.cols];
            r.extend(row.iter().cloned());
            entries.push(r);
        }
        Self::new(self.ctx, self.n, cols, entries)
    }
}
