//! CSV ingestion and emission. Comma separated, header row, UTF-8, `.`
//! decimal point; attribute kinds and roles come from an out-of-band schema.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::{AttrKind, AttrRole, Attribute, ColumnData, Dataset, NominalColumn};
use crate::error::DataError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaEntry {
    pub kind: AttrKind,
    pub role: AttrRole,
}

/// Attribute name -> kind/role map supplied by the run configuration.
pub type Schema = BTreeMap<String, SchemaEntry>;

/// Load a CSV file as a dataset. Only columns named in the schema are kept,
/// in header order; every schema attribute must appear in the header.
pub fn load_dataset(path: &Path, id: &str, schema: &Schema) -> Result<Dataset, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    let header_names: Vec<&str> = headers.iter().collect();

    for name in schema.keys() {
        if !header_names.contains(&name.as_str()) {
            return Err(DataError::MissingColumn(name.clone()));
        }
    }

    // (csv column index, attribute) in header order
    let used: Vec<(usize, Attribute)> = header_names
        .iter()
        .enumerate()
        .filter_map(|(i, name)| {
            schema.get(*name).map(|entry| {
                (
                    i,
                    Attribute {
                        name: (*name).to_string(),
                        kind: entry.kind,
                        role: entry.role,
                    },
                )
            })
        })
        .collect();

    enum RawColumn {
        Nominal(Vec<String>),
        Numeric(Vec<f64>),
    }

    let mut raw: Vec<RawColumn> = used
        .iter()
        .map(|(_, a)| match a.kind {
            AttrKind::Nominal => RawColumn::Nominal(Vec::new()),
            AttrKind::Numeric => RawColumn::Numeric(Vec::new()),
        })
        .collect();

    for (row_idx, record) in reader.records().enumerate() {
        let record = record?;
        for (slot, (col_idx, attr)) in used.iter().enumerate() {
            let field = record.get(*col_idx).unwrap_or("");
            match &mut raw[slot] {
                RawColumn::Nominal(values) => values.push(field.to_string()),
                RawColumn::Numeric(values) => {
                    let parsed = field.trim().parse::<f64>().ok().filter(|v| v.is_finite());
                    match parsed {
                        Some(v) => values.push(v),
                        None => {
                            return Err(DataError::TypeMismatch {
                                column: attr.name.clone(),
                                row: row_idx,
                                value: field.to_string(),
                            })
                        }
                    }
                }
            }
        }
    }

    let parts: Vec<(Attribute, ColumnData)> = used
        .into_iter()
        .zip(raw)
        .map(|((_, attr), col)| {
            let data = match col {
                RawColumn::Nominal(values) => {
                    ColumnData::Nominal(NominalColumn::from_values(&values))
                }
                RawColumn::Numeric(values) => ColumnData::Numeric(values),
            };
            (attr, data)
        })
        .collect();

    if parts.first().is_none_or(|(_, c)| match c {
        ColumnData::Nominal(col) => col.codes().is_empty(),
        ColumnData::Numeric(v) => v.is_empty(),
    }) {
        return Err(DataError::EmptyDataset);
    }

    Dataset::new(id, parts)
}

/// Write a dataset as CSV. Floats use the shortest representation that
/// round-trips, so a rewrite of a loaded file is byte-identical.
pub fn write_csv(ds: &Dataset, path: &Path) -> Result<(), DataError> {
    let mut writer = csv::Writer::from_path(path)?;
    let names: Vec<&str> = ds.attributes().iter().map(|a| a.name.as_str()).collect();
    writer.write_record(&names)?;
    let mut record = Vec::with_capacity(names.len());
    for row in 0..ds.n_rows() {
        record.clear();
        for col in 0..ds.attributes().len() {
            match ds.column(col) {
                ColumnData::Nominal(c) => record.push(c.value(row).to_string()),
                ColumnData::Numeric(v) => record.push(format!("{}", v[row])),
            }
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}
