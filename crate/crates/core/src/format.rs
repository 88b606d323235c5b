//! Text formats: distribution files, feature files and CSI listings.
//!
//! All three are line-oriented. `#` starts a comment that runs to the end of
//! the line; blank lines are ignored. See `docs/formats.md` for the grammar.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::domain::{DomainSchema, VarSet};
use crate::error::{Error, Result};
use crate::independence::{CsiModel, Triplet};
use crate::loglinear::{Feature, LogLinearModel};
use crate::table::JointTable;

pub const DISTRIBUTION_HEADER: &str = "csmrf-distribution";
pub const FEATURES_HEADER: &str = "csmrf-features";
pub const FORMAT_VERSION: u32 = 1;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Content lines with their 1-based line numbers, comments stripped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_header<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    expected: &str,
) -> Result<()> {
    let (n, line) = lines.next().ok_or_else(|| {
        parse_err(
            1,
            format!("empty file; expected `{expected} {FORMAT_VERSION}`"),
        )
    })?;
    let mut words = line.split_whitespace();
    if words.next() != Some(expected) {
        return Err(parse_err(
            n,
            format!("expected header `{expected} {FORMAT_VERSION}`"),
        ));
    }
    match words.next().map(str::parse::<u32>) {
        Some(Ok(FORMAT_VERSION)) if words.next().is_none() => Ok(()),
        Some(Ok(v)) => Err(parse_err(n, format!("unsupported format version {v}"))),
        _ => Err(parse_err(n, "malformed header")),
    }
}

fn parse_var(n: usize, rest: &str) -> Result<(String, usize)> {
    let words: Vec<&str> = rest.split_whitespace().collect();
    match words.as_slice() {
        [name, card] => {
            let card = card
                .parse()
                .map_err(|_| parse_err(n, format!("`{card}` is not a cardinality")))?;
            Ok((name.to_string(), card))
        }
        _ => Err(parse_err(n, "expected `var <name> <cardinality>`")),
    }
}

fn build_schema(n: usize, vars: Vec<(String, usize)>) -> Result<Arc<DomainSchema>> {
    if vars.is_empty() {
        return Err(parse_err(n, "no variables declared"));
    }
    match DomainSchema::new(vars) {
        Ok(s) => Ok(Arc::new(s)),
        Err(e @ Error::CapExceeded { .. }) => Err(e),
        Err(e) => Err(parse_err(n, e.to_string())),
    }
}

/// A parsed distribution file. Values are kept as written so that
/// normalization defects can be reported.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionFile {
    pub schema: Arc<DomainSchema>,
    pub meta: Vec<(String, String)>,
    pub values: Vec<f64>,
}

impl DistributionFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        parse_header(&mut lines, DISTRIBUTION_HEADER)?;
        let mut meta = Vec::new();
        let mut vars = Vec::new();
        let mut table_line = None;
        for (n, line) in lines.by_ref() {
            let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            match keyword {
                "meta" => {
                    let (k, v) = rest
                        .trim()
                        .split_once(char::is_whitespace)
                        .unwrap_or((rest.trim(), ""));
                    if k.is_empty() {
                        return Err(parse_err(n, "expected `meta <key> <value>`"));
                    }
                    meta.push((k.to_string(), v.trim().to_string()));
                }
                "var" => vars.push(parse_var(n, rest)?),
                "table" if rest.trim().is_empty() => {
                    table_line = Some(n);
                    break;
                }
                _ => return Err(parse_err(n, format!("unexpected `{keyword}`"))),
            }
        }
        let table_line = table_line
            .ok_or_else(|| parse_err(text.lines().count().max(1), "missing `table` section"))?;
        let schema = build_schema(table_line, vars)?;
        let mut values = Vec::with_capacity(schema.states());
        let mut last = table_line;
        for (n, line) in lines {
            last = n;
            for word in line.split_whitespace() {
                let v: f64 = word
                    .parse()
                    .map_err(|_| parse_err(n, format!("`{word}` is not a number")))?;
                if !v.is_finite() || v < 0.0 {
                    return Err(parse_err(
                        n,
                        format!(
                            "entry {} is {v}; entries must be finite and nonnegative",
                            values.len()
                        ),
                    ));
                }
                values.push(v);
            }
        }
        if values.len() != schema.states() {
            return Err(parse_err(
                last,
                format!(
                    "expected {} table entries, found {}",
                    schema.states(),
                    values.len()
                ),
            ));
        }
        Ok(DistributionFile {
            schema,
            meta,
            values,
        })
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn to_table(&self) -> Result<JointTable> {
        JointTable::normalize(self.schema.clone(), self.values.clone())
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

fn write_vars(out: &mut String, schema: &DomainSchema) {
    for v in schema.variables() {
        writeln!(out, "var {} {}", v.name, v.cardinality).unwrap();
    }
}

/// Serialize a table; values use the shortest round-tripping decimal form.
pub fn write_distribution(p: &JointTable, meta: &[(&str, &str)]) -> String {
    let mut out = format!("{DISTRIBUTION_HEADER} {FORMAT_VERSION}\n");
    for (k, v) in meta {
        writeln!(out, "meta {k} {v}").unwrap();
    }
    write_vars(&mut out, p.schema());
    out.push_str("table\n");
    for v in p.probs() {
        writeln!(out, "{v}").unwrap();
    }
    out
}

/// A parsed feature file.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureFile {
    pub schema: Arc<DomainSchema>,
    pub log_z: f64,
    pub features: Vec<(Feature, f64)>,
}

impl FeatureFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        parse_header(&mut lines, FEATURES_HEADER)?;
        let mut vars = Vec::new();
        let mut schema: Option<Arc<DomainSchema>> = None;
        let mut log_z = None;
        let mut features = Vec::new();
        for (n, line) in lines {
            let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match keyword {
                "var" if schema.is_none() => vars.push(parse_var(n, rest)?),
                "logz" => {
                    let v: f64 = rest
                        .parse()
                        .map_err(|_| parse_err(n, format!("`{rest}` is not a number")))?;
                    log_z = Some(v);
                }
                "feature" => {
                    let schema = match &schema {
                        Some(s) => s.clone(),
                        None => {
                            let s = build_schema(n, std::mem::take(&mut vars))?;
                            schema = Some(s.clone());
                            s
                        }
                    };
                    let (w, f) = rest
                        .split_once(char::is_whitespace)
                        .ok_or_else(|| parse_err(n, "expected `feature <weight> <assignment>`"))?;
                    let w: f64 = w
                        .parse()
                        .map_err(|_| parse_err(n, format!("`{w}` is not a number")))?;
                    let f = Feature::parse(&schema, f.trim())
                        .map_err(|e| parse_err(n, e.to_string()))?;
                    if f.scope().is_empty() {
                        return Err(parse_err(n, "feature with empty scope"));
                    }
                    features.push((f, w));
                }
                _ => return Err(parse_err(n, format!("unexpected `{keyword}`"))),
            }
        }
        let last = text.lines().count().max(1);
        let schema = match schema {
            Some(s) => s,
            None => build_schema(last, vars)?,
        };
        let log_z = log_z.ok_or_else(|| parse_err(last, "missing `logz`"))?;
        Ok(FeatureFile {
            schema,
            log_z,
            features,
        })
    }

    pub fn model(&self) -> Result<LogLinearModel> {
        let (features, weights) = self.features.iter().cloned().unzip();
        LogLinearModel::new(self.schema.clone(), features, weights)
    }
}

pub fn write_features(model: &LogLinearModel) -> String {
    let schema = model.schema();
    let mut out = format!("{FEATURES_HEADER} {FORMAT_VERSION}\n");
    write_vars(&mut out, schema);
    writeln!(out, "logz {}", model.log_z()).unwrap();
    for (f, w) in model.features().iter().zip(model.weights()) {
        writeln!(out, "feature {w} {}", f.render(schema)).unwrap();
    }
    out
}

/// One true triplet per line in canonical order, keeping only those whose
/// context scope lies inside `context_vars`.
pub fn write_csi_listing(ic: &CsiModel, context_vars: VarSet) -> String {
    let schema = ic.schema();
    let mut out = String::new();
    for t in ic.independences() {
        if t.context().scope().is_subset(context_vars) {
            out.push_str(&t.render(schema));
            out.push('\n');
        }
    }
    out
}

pub fn parse_csi_listing(schema: &DomainSchema, text: &str) -> Result<Vec<Triplet>> {
    content_lines(text)
        .map(|(n, line)| {
            Triplet::parse(schema, line).map_err(|e| match e {
                Error::Parse { message, .. } => parse_err(n, message),
                other => parse_err(n, other.to_string()),
            })
        })
        .collect()
}
