//! Run configuration: per-dataset schemas, the shared model attributes, and
//! the search settings.

use serde::{Deserialize, Serialize};

use rdmm_core::data::{AttrKind, AttrRole, Schema, SchemaEntry};
use rdmm_core::model::ModelClass;
use rdmm_core::search::SearchConfig;
use rdmm_core::Dataset;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub model_class: ModelClass,
    /// model attributes shared by both datasets, in model-column order
    pub model_attributes: Vec<String>,
    pub left_schema: Schema,
    pub right_schema: Schema,
    #[serde(default)]
    pub search: SearchConfig,
}

impl RunConfig {
    /// Check the schema contract before any work: the model attributes must
    /// be present in both schemas as numeric model columns, and their number
    /// must fit the model class.
    pub fn validate(&self) -> Result<Vec<String>, CliError> {
        if self.model_attributes.is_empty() {
            return Err(CliError::Input("model_attributes is empty".into()));
        }
        if self.model_attributes.len() != self.model_class.dim() {
            return Err(CliError::Input(format!(
                "model class `{}` needs {} model attributes, config names {}",
                self.model_class.name(),
                self.model_class.dim(),
                self.model_attributes.len()
            )));
        }
        for (side, schema) in [("left", &self.left_schema), ("right", &self.right_schema)] {
            for name in &self.model_attributes {
                match schema.get(name) {
                    None => {
                        return Err(CliError::Input(format!(
                            "model attribute `{name}` missing from {side} schema"
                        )))
                    }
                    Some(entry) if entry.role != AttrRole::Model => {
                        return Err(CliError::Input(format!(
                            "attribute `{name}` must have role `model` in {side} schema"
                        )))
                    }
                    Some(entry) if entry.kind != AttrKind::Numeric => {
                        return Err(CliError::Input(format!(
                            "model attribute `{name}` must be numeric in {side} schema"
                        )))
                    }
                    Some(_) => {}
                }
            }
            if !schema
                .values()
                .any(|entry| entry.role == AttrRole::Describing)
            {
                return Err(CliError::Input(format!(
                    "{side} schema has no describing attributes"
                )));
            }
        }
        self.search
            .validate(self.model_class)
            .map_err(|e| CliError::Input(e.to_string()))
    }

    /// Derive the schema of an in-memory dataset, e.g. a generated one.
    pub fn schema_of(dataset: &Dataset) -> Schema {
        dataset
            .attributes()
            .iter()
            .map(|a| {
                (
                    a.name.clone(),
                    SchemaEntry {
                        kind: a.kind,
                        role: a.role,
                    },
                )
            })
            .collect()
    }
}
