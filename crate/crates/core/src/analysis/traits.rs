use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraitKind {
    Continuous,
    /// Ordered categories, handled as continuous.
    Ordinal,
    /// Exactly two distinct values.
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trait {
    pub name: String,
    pub kind: TraitKind,
    pub category: String,
    /// One entry per subject; `None` is missing.
    pub values: Vec<Option<f64>>,
}

impl Trait {
    /// Indices and values of the observed subjects.
    pub fn observed(&self) -> (Vec<usize>, Vec<f64>) {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|x| (i, x)))
            .unzip()
    }

    /// For binary traits, `true` marks the larger of the two values.
    pub fn labels(&self) -> Result<(Vec<usize>, Vec<bool>)> {
        if self.kind != TraitKind::Binary {
            return Err(Error::InvalidArgument(format!(
                "trait {} is not binary",
                self.name
            )));
        }
        let (idx, vals) = self.observed();
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok((idx, vals.iter().map(|v| *v == hi).collect()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraitTable {
    subject_ids: Vec<String>,
    traits: Vec<Trait>,
}

impl TraitTable {
    /// Each trait needs one value slot per subject and at least two observed
    /// values; binary traits must take exactly two distinct values.
    pub fn new(subject_ids: Vec<String>, traits: Vec<Trait>) -> Result<Self> {
        let n = subject_ids.len();
        for (k, t) in traits.iter().enumerate() {
            if traits[..k].iter().any(|o| o.name == t.name) {
                return Err(Error::InvalidArgument(format!(
                    "trait {} appears twice",
                    t.name
                )));
            }
            if t.values.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "trait {} has {} values for {n} subjects",
                    t.name,
                    t.values.len()
                )));
            }
            let (_, vals) = t.observed();
            if vals.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite);
            }
            if vals.len() < 2 {
                return Err(Error::InvalidArgument(format!(
                    "trait {} has fewer than two observed values",
                    t.name
                )));
            }
            if t.kind == TraitKind::Binary {
                let mut distinct = vals.clone();
                distinct.sort_by(|a, b| a.total_cmp(b));
                distinct.dedup();
                if distinct.len() != 2 {
                    return Err(Error::InvalidArgument(format!(
                        "binary trait {} takes {} distinct values",
                        t.name,
                        distinct.len()
                    )));
                }
            }
        }
        Ok(Self {
            subject_ids,
            traits,
        })
    }

    pub fn subject_ids(&self) -> &[String] {
        &self.subject_ids
    }

    pub fn traits(&self) -> &[Trait] {
        &self.traits
    }

    pub fn get(&self, name: &str) -> Option<&Trait> {
        self.traits.iter().find(|t| t.name == name)
    }
}
