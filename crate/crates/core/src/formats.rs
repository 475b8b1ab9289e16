//! JSON file formats: towers, presentations, ideals, curves and fields.
//!
//! Coefficients are plain JSON integers (negative values are reduced mod
//! `p^M`). The precision `(p, M)` travels with the tower and ideal files;
//! presentations take it from the command line or from the tower they are
//! paired with.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitting::PresentationMatrix;
use crate::ideal::IdealHandle;
use crate::layer::{layer_degree, LayerElement};
use crate::padic::PadicContext;
use crate::theta::{StabilizedTower, ThetaTower};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerFile {
    pub p: u64,
    #[serde(rename = "M")]
    pub precision: u32,
    pub ap: i64,
    pub levels: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl TowerFile {
    pub fn to_tower(&self) -> Result<ThetaTower> {
        let ctx = PadicContext::new(self.p, self.precision)?;
        let levels = self
            .levels
            .iter()
            .enumerate()
            .map(|(n, c)| exact_element(ctx, n as u32, c))
            .collect::<Result<Vec<_>>>()?;
        Ok(ThetaTower::new(ctx.from_i64(self.ap), levels)?.with_seed(self.seed))
    }

    pub fn from_tower(t: &ThetaTower) -> Self {
        let ctx = t.ctx();
        Self {
            p: ctx.p(),
            precision: ctx.precision(),
            ap: t.ap().value() as i64,
            levels: t.levels().iter().map(coeff_vec).collect(),
            seed: t.seed(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizedFile {
    pub p: u64,
    #[serde(rename = "M")]
    pub precision: u32,
    pub alpha: u64,
    pub levels: Vec<Vec<i64>>,
}

impl StabilizedFile {
    pub fn from_stabilized(s: &StabilizedTower) -> Self {
        Self {
            p: s.ctx().p(),
            precision: s.ctx().precision(),
            alpha: s.alpha().value(),
            levels: s.levels().iter().map(coeff_vec).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementFile {
    pub n: u32,
    pub coeffs: Vec<i64>,
}

impl ElementFile {
    pub fn to_element(&self, ctx: PadicContext) -> Result<LayerElement> {
        exact_element(ctx, self.n, &self.coeffs)
    }

    pub fn from_element(e: &LayerElement) -> Self {
        Self {
            n: e.layer(),
            coeffs: coeff_vec(e),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationFile {
    pub n: u32,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<ElementFile>>,
}

impl PresentationFile {
    pub fn to_presentation(&self, ctx: PadicContext) -> Result<PresentationMatrix> {
        if self.entries.len() != self.rows {
            return Err(Error::Data(format!(
                "presentation declares {} rows but has {}",
                self.rows,
                self.entries.len()
            )));
        }
        let entries = self
            .entries
            .iter()
            .map(|row| {
                if row.len() != self.cols {
                    return Err(Error::Data(format!(
                        "presentation row has {} entries, expected {}",
                        row.len(),
                        self.cols
                    )));
                }
                row.iter()
                    .map(|e| {
                        if e.n != self.n {
                            return Err(Error::Data(format!(
                                "entry at layer {} in a layer-{} presentation",
                                e.n, self.n
                            )));
                        }
                        e.to_element(ctx)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        PresentationMatrix::new(ctx, self.n, self.cols, entries)
    }

    pub fn from_presentation(p: &PresentationMatrix) -> Self {
        Self {
            n: p.layer(),
            rows: p.rows(),
            cols: p.cols(),
            entries: p
                .entries()
                .iter()
                .map(|row| row.iter().map(ElementFile::from_element).collect())
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdealFile {
    pub p: u64,
    #[serde(rename = "M")]
    pub precision: u32,
    pub n: u32,
    pub generators: Vec<Vec<i64>>,
}

impl IdealFile {
    pub fn to_ideal(&self) -> Result<IdealHandle> {
        let ctx = PadicContext::new(self.p, self.precision)?;
        let gens = self
            .generators
            .iter()
            .map(|g| exact_element(ctx, self.n, g))
            .collect::<Result<Vec<_>>>()?;
        IdealHandle::new(ctx, self.n, gens)
    }
}

/// Coefficient arrays in files must have exactly `p^n` entries.
fn exact_element(ctx: PadicContext, n: u32, coeffs: &[i64]) -> Result<LayerElement> {
    let d = layer_degree(ctx.p(), n);
    if coeffs.len() != d {
        return Err(Error::Data(format!(
            "layer {n} needs {d} coefficients, got {}",
            coeffs.len()
        )));
    }
    LayerElement::from_coeffs(ctx, n, coeffs)
}

pub fn coeff_vec(e: &LayerElement) -> Vec<i64> {
    e.coeffs().iter().map(|&c| c as i64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tower_file_parses_and_rejects_bad_lengths() {
        let json = r#"{"p":3,"M":2,"ap":2,"levels":[[1],[0,1,2]]}"#;
        let f: TowerFile = serde_json::from_str(json).unwrap();
        let t = f.to_tower().unwrap();
        assert_eq!(t.top(), 1);
        assert_eq!(TowerFile::from_tower(&t), f);

        let bad = r#"{"p":3,"M":2,"ap":2,"levels":[[1],[0,1]]}"#;
        let f: TowerFile = serde_json::from_str(bad).unwrap();
        assert!(matches!(f.to_tower(), Err(Error::Data(_))));
        let unknown = r#"{"p":3,"M":2,"ap":2,"levels":[[1]],"extra":1}"#;
        assert!(serde_json::from_str::<TowerFile>(unknown).is_err());
    }

    #[test]
    fn presentation_file_round_trip() {
        let ctx = PadicContext::new(3, 2).unwrap();
        let json = r#"{"n":1,"rows":1,"cols":2,
            "entries":[[{"n":1,"coeffs":[3,0,0]},{"n":1,"coeffs":[0,-1,0]}]]}"#;
        let f: PresentationFile = serde_json::from_str(json).unwrap();
        let p = f.to_presentation(ctx).unwrap();
        assert_eq!(p.entry(0, 1).coeff(1).value(), 8);
        let back = PresentationFile::from_presentation(&p);
        assert_eq!(back.to_presentation(ctx).unwrap(), p);

        let wrong_layer = r#"{"n":1,"rows":1,"cols":1,"entries":[[{"n":0,"coeffs":[3]}]]}"#;
        let f: PresentationFile = serde_json::from_str(wrong_layer).unwrap();
        assert!(f.to_presentation(ctx).is_err());
    }
}
