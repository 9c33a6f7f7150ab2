//! Selectors (atomic predicates) and conjunctive descriptions.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bitset::SupportSet;
use crate::data::{AttrKind, ColumnData, Dataset};
use crate::error::DataError;

/// Atomic predicate over one attribute: nominal equality or numeric interval
/// membership. Intervals are `[lo, hi)`, or `[lo, hi]` when `hi_closed`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Predicate {
    Equals {
        value: String,
    },
    Interval {
        lo: f64,
        hi: f64,
        hi_closed: bool,
    },
}

impl Predicate {
    fn rank(&self) -> u8 {
        match self {
            Predicate::Equals { .. } => 0,
            Predicate::Interval { .. } => 1,
        }
    }
}

// Ordering is total (floats compared via total_cmp) so descriptions can be
// canonicalized and results tie-broken deterministically.
impl Ord for Predicate {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Predicate::Equals { value: a }, Predicate::Equals { value: b }) => a.cmp(b),
            (
                Predicate::Interval {
                    lo: la,
                    hi: ha,
                    hi_closed: ca,
                },
                Predicate::Interval {
                    lo: lb,
                    hi: hb,
                    hi_closed: cb,
                },
            ) => la
                .total_cmp(lb)
                .then_with(|| ha.total_cmp(hb))
                .then_with(|| ca.cmp(cb)),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Predicate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Predicate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Predicate {}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::Equals { value } => write!(f, "={value}"),
            Predicate::Interval { lo, hi, hi_closed } => {
                let close = if *hi_closed { "]" } else { ")" };
                write!(f, ":[{lo}, {hi}{close}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Selector {
    pub attribute: String,
    #[serde(flatten)]
    pub predicate: Predicate,
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.attribute, self.predicate)
    }
}

/// Conjunction of selectors, at most one per attribute, kept sorted by
/// attribute name so equality and ordering are independent of insertion order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Description {
    selectors: Vec<Selector>,
}

impl Description {
    pub fn new(mut selectors: Vec<Selector>) -> Result<Self, DataError> {
        for s in &selectors {
            if let Predicate::Interval { lo, hi, .. } = s.predicate {
                if !(lo < hi) {
                    return Err(DataError::InvalidInterval { lo, hi });
                }
            }
        }
        selectors.sort();
        if let Some(w) = selectors
            .windows(2)
            .find(|w| w[0].attribute == w[1].attribute)
        {
            return Err(DataError::DuplicateSelector(w[0].attribute.clone()));
        }
        Ok(Description { selectors })
    }

    /// The empty conjunction, true on every instance.
    pub fn empty() -> Self {
        Description {
            selectors: Vec::new(),
        }
    }

    pub fn selectors(&self) -> &[Selector] {
        &self.selectors
    }

    pub fn depth(&self) -> usize {
        self.selectors.len()
    }

    pub fn attribute_names(&self) -> impl Iterator<Item = &str> {
        self.selectors.iter().map(|s| s.attribute.as_str())
    }
}

impl TryFrom<Vec<Selector>> for Description {
    type Error = DataError;

    fn try_from(selectors: Vec<Selector>) -> Result<Self, DataError> {
        Description::new(selectors)
    }
}

impl<'de> Deserialize<'de> for Description {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let selectors = Vec::<Selector>::deserialize(deserializer)?;
        Description::new(selectors).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Description {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.selectors.is_empty() {
            return write!(f, "<all>");
        }
        for (i, s) in self.selectors.iter().enumerate() {
            if i > 0 {
                write!(f, " AND ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// True iff some attribute name occurs in both selector sets.
pub fn shares_attribute(left: &Description, right: &Description) -> bool {
    left.attribute_names()
        .any(|a| right.attribute_names().any(|b| a == b))
}

/// Support of a single selector.
pub fn selector_support(sel: &Selector, ds: &Dataset) -> Result<SupportSet, DataError> {
    let idx = ds
        .attr_index(&sel.attribute)
        .ok_or_else(|| DataError::UnknownAttribute(sel.attribute.clone()))?;
    let attr = &ds.attributes()[idx];
    match (&sel.predicate, ds.column(idx)) {
        (Predicate::Equals { value }, ColumnData::Nominal(col)) => match col.code_of(value) {
            // a value outside the observed domain matches no row
            None => Ok(SupportSet::empty(ds.n_rows())),
            Some(code) => Ok(SupportSet::from_pred(ds.n_rows(), |i| {
                col.codes()[i] == code
            })),
        },
        (Predicate::Interval { lo, hi, hi_closed }, ColumnData::Numeric(values)) => {
            let (lo, hi, hi_closed) = (*lo, *hi, *hi_closed);
            Ok(SupportSet::from_pred(ds.n_rows(), |i| {
                let v = values[i];
                lo <= v && (v < hi || (hi_closed && v <= hi))
            }))
        }
        _ => {
            debug_assert!(matches!(attr.kind, AttrKind::Nominal | AttrKind::Numeric));
            Err(DataError::KindMismatch(sel.attribute.clone()))
        }
    }
}

/// Support of a conjunction; the empty description yields the all-ones set.
pub fn support(desc: &Description, ds: &Dataset) -> Result<SupportSet, DataError> {
    let mut acc = SupportSet::full(ds.n_rows());
    for sel in desc.selectors() {
        acc = acc.intersect(&selector_support(sel, ds)?);
        if acc.is_empty() {
            break;
        }
    }
    Ok(acc)
}
