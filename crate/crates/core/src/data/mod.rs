//! Tabular data model: typed attributes, immutable column storage, selectors,
//! conjunctive descriptions and their support sets.

mod binning;
mod io;
mod selector;

pub use binning::{equal_frequency_bins, Bins, Interval};
pub use io::{load_dataset, write_csv, Schema, SchemaEntry};
pub use selector::{selector_support, shares_attribute, support, Description, Predicate, Selector};

use serde::{Deserialize, Serialize};

use crate::error::DataError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttrKind {
    Nominal,
    Numeric,
}

/// Role of an attribute during mining. Hidden attributes are carried through
/// loading and serialization but are never enumerable by the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttrRole {
    Describing,
    Model,
    Hidden,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub kind: AttrKind,
    pub role: AttrRole,
}

/// Dictionary-encoded nominal column. `levels` is sorted and contains exactly
/// the observed values; `codes[i]` indexes into `levels`.
#[derive(Debug, Clone)]
pub struct NominalColumn {
    codes: Vec<u32>,
    levels: Vec<String>,
}

impl NominalColumn {
    pub fn from_values(values: &[String]) -> Self {
        let mut levels: Vec<String> = values.to_vec();
        levels.sort_unstable();
        levels.dedup();
        let codes = values
            .iter()
            .map(|v| levels.binary_search(v).expect("value is a level") as u32)
            .collect();
        NominalColumn { codes, levels }
    }

    /// Build directly from codes. Unobserved levels are compacted away so the
    /// observed-domain invariant holds.
    pub fn from_codes(codes: Vec<u32>, levels: Vec<String>) -> Self {
        let mut seen = vec![false; levels.len()];
        for &c in &codes {
            seen[c as usize] = true;
        }
        let sorted = levels.windows(2).all(|w| w[0] < w[1]);
        if sorted && seen.iter().all(|&s| s) {
            return NominalColumn { codes, levels };
        }
        let values: Vec<String> = codes
            .iter()
            .map(|&c| levels[c as usize].clone())
            .collect();
        Self::from_values(&values)
    }

    pub fn levels(&self) -> &[String] {
        &self.levels
    }

    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    pub fn code_of(&self, value: &str) -> Option<u32> {
        self.levels
            .binary_search_by(|l| l.as_str().cmp(value))
            .ok()
            .map(|i| i as u32)
    }

    pub fn value(&self, row: usize) -> &str {
        &self.levels[self.codes[row] as usize]
    }

    fn len(&self) -> usize {
        self.codes.len()
    }
}

#[derive(Debug, Clone)]
pub enum ColumnData {
    Nominal(NominalColumn),
    Numeric(Vec<f64>),
}

impl ColumnData {
    fn len(&self) -> usize {
        match self {
            ColumnData::Nominal(c) => c.len(),
            ColumnData::Numeric(v) => v.len(),
        }
    }

    pub fn kind(&self) -> AttrKind {
        match self {
            ColumnData::Nominal(_) => AttrKind::Nominal,
            ColumnData::Numeric(_) => AttrKind::Numeric,
        }
    }
}

/// Immutable column-oriented table. Safe to share across threads once built.
#[derive(Debug, Clone)]
pub struct Dataset {
    id: String,
    attributes: Vec<Attribute>,
    columns: Vec<ColumnData>,
    n: usize,
}

impl Dataset {
    pub fn new(
        id: impl Into<String>,
        parts: Vec<(Attribute, ColumnData)>,
    ) -> Result<Self, DataError> {
        if parts.is_empty() {
            return Err(DataError::EmptyDataset);
        }
        let n = parts[0].1.len();
        if n == 0 {
            return Err(DataError::EmptyDataset);
        }
        let mut names: Vec<&str> = parts.iter().map(|(a, _)| a.name.as_str()).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(DataError::DuplicateAttribute(w[0].to_string()));
        }
        let mut attributes = Vec::with_capacity(parts.len());
        let mut columns = Vec::with_capacity(parts.len());
        for (attr, col) in parts {
            if col.len() != n {
                return Err(DataError::LengthMismatch(attr.name));
            }
            if col.kind() != attr.kind {
                return Err(DataError::KindMismatch(attr.name));
            }
            if attr.role == AttrRole::Model && attr.kind != AttrKind::Numeric {
                return Err(DataError::NonNumericModelAttribute(attr.name));
            }
            attributes.push(attr);
            columns.push(col);
        }
        Ok(Dataset {
            id: id.into(),
            attributes,
            columns,
            n,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn attr_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub fn column(&self, idx: usize) -> &ColumnData {
        &self.columns[idx]
    }

    pub fn describing(&self) -> impl Iterator<Item = (usize, &Attribute)> {
        self.attributes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.role == AttrRole::Describing)
    }

    /// Borrow the named numeric columns, e.g. the model attributes.
    pub fn numeric_columns(&self, names: &[String]) -> Result<Vec<&[f64]>, DataError> {
        names
            .iter()
            .map(|name| {
                let idx = self
                    .attr_index(name)
                    .ok_or_else(|| DataError::UnknownAttribute(name.clone()))?;
                match &self.columns[idx] {
                    ColumnData::Numeric(v) => Ok(v.as_slice()),
                    ColumnData::Nominal(_) => Err(DataError::KindMismatch(name.clone())),
                }
            })
            .collect()
    }
}

/// One equality selector per observed value of each nominal describing
/// attribute, and one interval selector per equal-frequency bin of each
/// numeric describing attribute. Model and hidden attributes are excluded.
pub fn selectors_for_dataset(ds: &Dataset, bins: usize) -> Result<Vec<Selector>, DataError> {
    let mut out = Vec::new();
    for (idx, attr) in ds.describing() {
        match ds.column(idx) {
            ColumnData::Nominal(col) => {
                for level in col.levels() {
                    out.push(Selector {
                        attribute: attr.name.clone(),
                        predicate: Predicate::Equals {
                            value: level.clone(),
                        },
                    });
                }
            }
            ColumnData::Numeric(values) => {
                let binning = equal_frequency_bins(values, bins)?;
                for interval in binning.intervals {
                    out.push(Selector {
                        attribute: attr.name.clone(),
                        predicate: Predicate::Interval {
                            lo: interval.lo,
                            hi: interval.hi,
                            hi_closed: interval.hi_closed,
                        },
                    });
                }
            }
        }
    }
    Ok(out)
}
