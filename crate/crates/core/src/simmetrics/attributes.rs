use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::ingest::{check_header, csv_reader, record_line};
use crate::{Error, Result};

const ATTRIBUTES_HEADER: [&str; 4] = ["node", "variable", "value", "kind"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariableKind {
    Numeric,
    Categorical,
}

impl VariableKind {
    fn as_str(self) -> &'static str {
        match self {
            VariableKind::Numeric => "numeric",
            VariableKind::Categorical => "categorical",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Variable {
    kind: VariableKind,
    /// Numeric value per node; categorical labels are stored encoded.
    values: BTreeMap<String, f64>,
    /// label -> code, categorical only.
    encoding: BTreeMap<String, f64>,
}

/// Per-node named variables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AttributeTable {
    vars: BTreeMap<String, Variable>,
}

impl AttributeTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.vars.keys().map(String::as_str)
    }

    pub fn kind(&self, variable: &str) -> Option<VariableKind> {
        self.vars.get(variable).map(|v| v.kind)
    }

    pub fn get(&self, variable: &str, node: &str) -> Option<f64> {
        self.vars.get(variable)?.values.get(node).copied()
    }

    /// Nodes carrying a value for `variable`, sorted.
    pub fn nodes(&self, variable: &str) -> Vec<&str> {
        self.vars
            .get(variable)
            .map(|v| v.values.keys().map(String::as_str).collect())
            .unwrap_or_default()
    }

    pub fn encoding(&self, variable: &str) -> Option<&BTreeMap<String, f64>> {
        self.vars
            .get(variable)
            .filter(|v| v.kind == VariableKind::Categorical)
            .map(|v| &v.encoding)
    }

    fn variable_mut(&mut self, variable: &str, kind: VariableKind) -> Result<&mut Variable> {
        let var = self
            .vars
            .entry(variable.to_string())
            .or_insert_with(|| Variable {
                kind,
                values: BTreeMap::new(),
                encoding: BTreeMap::new(),
            });
        if var.kind != kind {
            return Err(Error::Config(format!(
                "variable `{variable}` declared both numeric and categorical"
            )));
        }
        Ok(var)
    }

    fn set_value(var: &mut Variable, variable: &str, node: &str, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::Config(format!(
                "non-finite value for `{variable}` at node `{node}`"
            )));
        }
        if var.values.insert(node.to_string(), value).is_some() {
            return Err(Error::Config(format!(
                "node `{node}` has more than one value for `{variable}`"
            )));
        }
        Ok(())
    }

    pub fn insert_numeric(&mut self, variable: &str, node: &str, value: f64) -> Result<()> {
        let var = self.variable_mut(variable, VariableKind::Numeric)?;
        Self::set_value(var, variable, node, value)
    }

    /// Inserts a categorical label; `encoding` must map it and be injective.
    pub fn insert_categorical(
        &mut self,
        variable: &str,
        node: &str,
        label: &str,
        encoding: &BTreeMap<String, f64>,
    ) -> Result<()> {
        check_injective(variable, encoding)?;
        let code = *encoding.get(label).ok_or_else(|| {
            Error::Config(format!(
                "label `{label}` of `{variable}` has no declared encoding"
            ))
        })?;
        let var = self.variable_mut(variable, VariableKind::Categorical)?;
        if !var.encoding.is_empty() && var.encoding != *encoding {
            return Err(Error::Config(format!(
                "conflicting encodings for `{variable}`"
            )));
        }
        var.encoding = encoding.clone();
        Self::set_value(var, variable, node, code)
    }

    /// Values of `variable` aligned with `nodes`; `None` where missing.
    pub fn resolve(&self, variable: &str, nodes: &[String]) -> Result<Vec<Option<f64>>> {
        let var = self
            .vars
            .get(variable)
            .ok_or_else(|| Error::UnknownVariable(variable.to_string()))?;
        Ok(nodes.iter().map(|n| var.values.get(n).copied()).collect())
    }
}

fn check_injective(variable: &str, encoding: &BTreeMap<String, f64>) -> Result<()> {
    let mut seen: Vec<f64> = encoding.values().copied().collect();
    if seen.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config(format!(
            "non-finite code in encoding of `{variable}`"
        )));
    }
    seen.sort_by(f64::total_cmp);
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Config(format!(
            "encoding of `{variable}` maps two labels to the same number"
        )));
    }
    Ok(())
}

/// Picks an encoding for a categorical variable without a declared one.
///
/// Numeric-looking labels encode as themselves; two labels encode as 0 and
/// 1 in sorted order. More than two non-numeric labels need an explicit
/// ordinal encoding.
fn default_encoding(variable: &str, labels: &BTreeSet<&str>) -> Result<BTreeMap<String, f64>> {
    if let Some(parsed) = labels
        .iter()
        .map(|l| l.parse::<f64>().ok().map(|v| (l.to_string(), v)))
        .collect::<Option<BTreeMap<_, _>>>()
    {
        return Ok(parsed);
    }
    if labels.len() <= 2 {
        log::info!(
            "`{variable}`: encoding labels {:?} as 0/1 in sorted order",
            labels
        );
        return Ok(labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.to_string(), i as f64))
            .collect());
    }
    Err(Error::Config(format!(
        "categorical `{variable}` has {} labels; declare an ordinal encoding",
        labels.len()
    )))
}

/// Parses an attribute CSV (`node,variable,value,kind`).
///
/// `encodings` supplies label → number maps for categorical variables.
pub fn parse_attributes<R: Read>(
    rdr: R,
    encodings: &BTreeMap<String, BTreeMap<String, f64>>,
) -> Result<AttributeTable> {
    let mut reader = csv_reader(rdr);
    let mut table = AttributeTable::new();
    if !check_header(&mut reader, &ATTRIBUTES_HEADER)? {
        return Ok(table);
    }
    let mut categorical: BTreeMap<String, Vec<(u64, String, String)>> = BTreeMap::new();
    for record in reader.records() {
        let record = record?;
        let line = record_line(&record);
        let err = |message: String| Error::Parse { line, message };
        if record.len() != 4 {
            return Err(err(format!("expected 4 fields, found {}", record.len())));
        }
        let (node, variable, value) = (&record[0], &record[1], &record[2]);
        if node.is_empty() || variable.is_empty() {
            return Err(err("empty node or variable name".into()));
        }
        if value.is_empty() {
            // missing value
            continue;
        }
        match &record[3] {
            "numeric" => {
                let v: f64 = value
                    .parse()
                    .map_err(|_| err(format!("invalid numeric value `{value}`")))?;
                table
                    .insert_numeric(variable, node, v)
                    .map_err(|e| err(e.to_string()))?;
            }
            "categorical" => categorical.entry(variable.to_string()).or_default().push((
                line,
                node.to_string(),
                value.to_string(),
            )),
            other => return Err(err(format!("unknown kind `{other}`"))),
        }
    }
    for (variable, rows) in categorical {
        let labels: BTreeSet<&str> = rows.iter().map(|(_, _, l)| l.as_str()).collect();
        let encoding = match encodings.get(&variable) {
            Some(e) => {
                if e.len() > 2 {
                    log::warn!(
                        "`{variable}` has {} categories; ICC treats the declared codes as an ordinal scale",
                        e.len()
                    );
                }
                e.clone()
            }
            None => default_encoding(&variable, &labels)?,
        };
        for (line, node, label) in &rows {
            table
                .insert_categorical(&variable, node, label, &encoding)
                .map_err(|e| Error::Parse {
                    line: *line,
                    message: e.to_string(),
                })?;
        }
    }
    Ok(table)
}

/// Writes the table as an attribute CSV readable by [`parse_attributes`].
pub fn write_attributes<W: Write>(wtr: W, table: &AttributeTable) -> Result<()> {
    let mut w = csv::Writer::from_writer(wtr);
    w.write_record(ATTRIBUTES_HEADER)?;
    for (name, var) in &table.vars {
        for (node, value) in &var.values {
            let text = match var.kind {
                VariableKind::Numeric => value.to_string(),
                VariableKind::Categorical => var
                    .encoding
                    .iter()
                    .find(|(_, code)| *code == value)
                    .map(|(label, _)| label.clone())
                    .expect("encoded value has a label"),
            };
            w.write_record([node.as_str(), name.as_str(), &text, var.kind.as_str()])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
