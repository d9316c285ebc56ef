use std::collections::BTreeMap;
use std::sync::Arc;

use crate::base::BaseMeasure;
use crate::color::{Color, SetExpr};
use crate::error::{invalid, Error, Result};
use crate::urn::UrnState;

const MASS_TOL: f64 = 1e-9;

/// A probability measure of the form `c·ν + Σ a_x·δ_x`.
///
/// Atoms are kept ordered so that sums over them are reproducible bit for bit.
#[derive(Debug, Clone)]
pub struct MeasureRepr {
    base_coeff: f64,
    base: Arc<BaseMeasure>,
    atoms: BTreeMap<Color, f64>,
}

impl MeasureRepr {
    pub fn new(base_coeff: f64, base: Arc<BaseMeasure>, atoms: BTreeMap<Color, f64>) -> Result<Self> {
        if base_coeff < 0.0 || atoms.values().any(|a| *a < 0.0) {
            return Err(invalid("measure coefficients must be nonnegative"));
        }
        let total = base_coeff + atoms.values().sum::<f64>();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(invalid(format!("measure has total mass {total}, not 1")));
        }
        Ok(MeasureRepr {
            base_coeff,
            base,
            atoms,
        })
    }

    /// `P_n`: `c = θ/N_n`, atoms `mass/N_n`.
    pub fn predictive(state: &UrnState) -> Self {
        let n = state.total_mass();
        MeasureRepr {
            base_coeff: state.theta() / n,
            base: state.base().clone(),
            atoms: state.atoms().iter().map(|a| (a.color, a.mass / n)).collect(),
        }
    }

    /// `P̂_n`: atoms `count/n`, no base component.
    pub fn empirical(state: &UrnState) -> Result<Self> {
        if state.steps() == 0 {
            return Err(Error::EmptyHistory);
        }
        let n = state.steps() as f64;
        Ok(MeasureRepr {
            base_coeff: 0.0,
            base: state.base().clone(),
            atoms: state.atoms().iter().map(|a| (a.color, a.count as f64 / n)).collect(),
        })
    }

    pub fn base_coeff(&self) -> f64 {
        self.base_coeff
    }

    pub fn base(&self) -> &Arc<BaseMeasure> {
        &self.base
    }

    pub fn atoms(&self) -> &BTreeMap<Color, f64> {
        &self.atoms
    }

    pub fn measure(&self, set: &SetExpr) -> f64 {
        let atoms: f64 = self
            .atoms
            .iter()
            .filter(|(c, _)| set.contains(c))
            .map(|(_, a)| a)
            .sum();
        self.base_coeff * self.base.measure(set) + atoms
    }

    /// Diffuse coefficient and atom map after folding the atoms of `ν` into the atom map.
    fn merged(&self) -> (f64, BTreeMap<Color, f64>) {
        let mut atoms = self.atoms.clone();
        let mut diffuse = self.base_coeff;
        if self.base_coeff > 0.0 {
            for (c, p) in self.base.atoms() {
                *atoms.entry(c).or_insert(0.0) += self.base_coeff * p;
                diffuse -= self.base_coeff * p;
            }
        }
        (diffuse.max(0.0), atoms)
    }
}

/// `sup_A |m1(A) − m2(A)|`, from the Hahn decomposition of `m1 − m2`.
pub fn total_variation(m1: &MeasureRepr, m2: &MeasureRepr) -> Result<f64> {
    if !Arc::ptr_eq(&m1.base, &m2.base) && m1.base != m2.base {
        return Err(Error::MismatchedBase);
    }
    let (c1, a1) = m1.merged();
    let (c2, a2) = m2.merged();
    let mut pos = (c1 - c2).max(0.0);
    let mut neg = (c2 - c1).max(0.0);
    for (color, x) in &a1 {
        let y = a2.get(color).copied().unwrap_or(0.0);
        pos += (x - y).max(0.0);
        neg += (y - x).max(0.0);
    }
    for (color, y) in &a2 {
        if !a1.contains_key(color) {
            neg += y;
        }
    }
    Ok(pos.max(neg).clamp(0.0, 1.0))
}
