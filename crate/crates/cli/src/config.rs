//! Line-oriented config files:
//!
//! ```text
//! # comment
//! [echo-chain]
//! epsilon = 0.05
//! k0 = 3
//!
//! [sweep]
//! epsilon = [0.02, 0.01]
//! ```
//!
//! Keys before the first header belong to the default subcommand, if any.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::schema::{Kind, Need, Subcommand};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Real(f64),
    Str(String),
    Bool(bool),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Real(v) => write!(f, "{v}"),
            Value::Str(v) => f.write_str(v),
            Value::Bool(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Syntax,
    UnknownSection,
    UnknownKey,
    Type,
    Missing,
    Duplicate,
}

/// A config problem; `line` is 1-based, 0 for the command line or the file as a whole.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigError {
    pub error: ErrorKind,
    pub line: usize,
    pub message: String,
}

impl ConfigError {
    fn new(error: ErrorKind, line: usize, message: impl Into<String>) -> Self {
        Self { error, line, message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: {}", self.line, self.message)
        } else {
            f.write_str(&self.message)
        }
    }
}

/// One `key = value` entry with its source line.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub value: Value,
    pub raw: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub key: String,
    /// Raw text of each value, used for directory names.
    pub raw: Vec<String>,
    pub values: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub parameters: BTreeMap<String, Value>,
    pub output_dir: String,
    pub sweep: Vec<SweepAxis>,
}

/// Parsed but not yet resolved document.
#[derive(Debug, Clone, Default)]
pub struct Document {
    pub subcommand: Option<Subcommand>,
    pub header_line: usize,
    pub entries: BTreeMap<String, Entry>,
    pub sweep: Vec<(SweepAxis, usize)>,
}

enum Literal {
    Quoted(String),
    Bare(String),
    List(Vec<String>),
}

fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

fn lex(text: &str) -> Result<Literal, String> {
    let text = text.trim();
    if text.is_empty() {
        return Err("missing value".into());
    }
    if let Some(rest) = text.strip_prefix('"') {
        return match rest.strip_suffix('"') {
            Some(inner) if !inner.contains('"') => Ok(Literal::Quoted(inner.to_string())),
            _ => Err(format!("unterminated string {text}")),
        };
    }
    if let Some(rest) = text.strip_prefix('[') {
        let inner = rest.strip_suffix(']').ok_or_else(|| format!("unterminated list {text}"))?;
        let items: Vec<String> = inner.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
        if items.is_empty() {
            return Err("empty list".into());
        }
        return Ok(Literal::List(items));
    }
    Ok(Literal::Bare(text.to_string()))
}

/// Types a scalar literal for `kind`.
pub fn coerce(kind: Kind, text: &str) -> Result<Value, String> {
    let literal = lex(text)?;
    let bare = match literal {
        Literal::List(_) => return Err("a list is only allowed in [sweep]".into()),
        Literal::Quoted(s) => {
            return match kind {
                Kind::Str => Ok(Value::Str(s)),
                _ => Err(format!("expected {kind}, found string \"{s}\"")),
            }
        }
        Literal::Bare(s) => s,
    };
    let mismatch = || format!("expected {kind}, found '{bare}'");
    match kind {
        Kind::Str => Ok(Value::Str(bare.clone())),
        Kind::Bool => match bare.as_str() {
            "true" => Ok(Value::Bool(true)),
            "false" => Ok(Value::Bool(false)),
            _ => Err(mismatch()),
        },
        Kind::Int => bare.parse::<i64>().map(Value::Int).map_err(|_| mismatch()),
        Kind::Real => match bare.parse::<f64>() {
            Ok(v) if v.is_finite() && bare.bytes().any(|b| b.is_ascii_digit()) => Ok(Value::Real(v)),
            _ => Err(mismatch()),
        },
    }
}

/// Syntax, section, key and type checks. Collects every error.
pub fn parse_document(text: &str, default: Option<Subcommand>) -> (Document, Vec<ConfigError>) {
    let mut doc = Document { subcommand: default, ..Default::default() };
    let mut errors = Vec::new();
    // None: outside any section; Some(Sweep) inside [sweep].
    let mut section: Option<Subcommand> = default;
    let mut ignoring = false;
    let mut sweep_seen: Vec<String> = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let n = idx + 1;
        let line = strip_comment(raw_line).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                errors.push(ConfigError::new(ErrorKind::Syntax, n, format!("malformed section header '{line}'")));
                ignoring = true;
                continue;
            };
            match name.trim().parse::<Subcommand>() {
                Ok(Subcommand::Sweep) => {
                    section = Some(Subcommand::Sweep);
                    ignoring = false;
                }
                Ok(sub) => match doc.subcommand {
                    Some(prev) if prev != sub => {
                        errors.push(ConfigError::new(
                            ErrorKind::UnknownSection,
                            n,
                            format!("section [{sub}] conflicts with subcommand {prev}"),
                        ));
                        ignoring = true;
                    }
                    _ => {
                        doc.subcommand = Some(sub);
                        doc.header_line = n;
                        section = Some(sub);
                        ignoring = false;
                    }
                },
                Err(msg) => {
                    errors.push(ConfigError::new(ErrorKind::UnknownSection, n, msg));
                    ignoring = true;
                }
            }
            continue;
        }
        if ignoring {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            errors.push(ConfigError::new(ErrorKind::Syntax, n, format!("expected 'key = value', found '{line}'")));
            continue;
        };
        let key = key.trim();
        if key.is_empty() {
            errors.push(ConfigError::new(ErrorKind::Syntax, n, "empty key"));
            continue;
        }
        match section {
            None => errors.push(ConfigError::new(ErrorKind::Syntax, n, format!("key '{key}' outside any section"))),
            Some(Subcommand::Sweep) => {
                if sweep_seen.iter().any(|k| k == key) {
                    errors.push(ConfigError::new(ErrorKind::Duplicate, n, format!("duplicate sweep key '{key}'")));
                    continue;
                }
                sweep_seen.push(key.to_string());
                let items = match lex(value) {
                    Ok(Literal::List(items)) => items,
                    Ok(_) => vec![value.trim().to_string()],
                    Err(msg) => {
                        errors.push(ConfigError::new(ErrorKind::Syntax, n, msg));
                        continue;
                    }
                };
                // Typed against the run section once it is known.
                let axis = SweepAxis {
                    key: key.to_string(),
                    raw: items.clone(),
                    values: items.into_iter().map(Value::Str).collect(),
                };
                doc.sweep.push((axis, n));
            }
            Some(sub) => {
                let Some(param) = sub.param(key) else {
                    errors.push(ConfigError::new(ErrorKind::UnknownKey, n, format!("unknown key '{key}' for {sub}")));
                    continue;
                };
                if doc.entries.contains_key(key) {
                    errors.push(ConfigError::new(ErrorKind::Duplicate, n, format!("duplicate key '{key}'")));
                    continue;
                }
                match coerce(param.kind, value) {
                    Ok(v) => {
                        doc.entries.insert(key.to_string(), Entry { value: v, raw: value.trim().to_string(), line: n });
                    }
                    Err(msg) => errors.push(ConfigError::new(ErrorKind::Type, n, format!("{key}: {msg}"))),
                }
            }
        }
    }

    // Type the sweep values against the run section.
    match doc.subcommand {
        Some(sub) => {
            for (axis, n) in &mut doc.sweep {
                let Some(param) = sub.param(&axis.key) else {
                    errors.push(ConfigError::new(
                        ErrorKind::UnknownKey,
                        *n,
                        format!("unknown sweep key '{}' for {sub}", axis.key),
                    ));
                    continue;
                };
                let mut typed = Vec::new();
                for raw in &axis.raw {
                    match coerce(param.kind, raw) {
                        Ok(v) => typed.push(v),
                        Err(msg) => errors.push(ConfigError::new(ErrorKind::Type, *n, format!("{}: {msg}", axis.key))),
                    }
                }
                axis.values = typed;
            }
        }
        None if !doc.sweep.is_empty() => {
            errors.push(ConfigError::new(ErrorKind::Missing, 0, "a [sweep] needs a run section such as [echo-chain]"));
        }
        None => {}
    }
    (doc, errors)
}

fn rejected(errors: &[ConfigError], key: &str) -> bool {
    let flag = format!("--{}:", key.replace('_', "-"));
    let key = format!("{key}:");
    errors.iter().any(|e| e.error == ErrorKind::Type && (e.message.starts_with(&key) || e.message.starts_with(&flag)))
}

/// Fills defaults and reports missing required keys. Swept keys count as present.
pub fn resolve(doc: &Document, errors: &mut Vec<ConfigError>) -> Option<RunConfig> {
    let Some(sub) = doc.subcommand else {
        errors.push(ConfigError::new(ErrorKind::Missing, 0, "no run section (e.g. [free]) in config"));
        return None;
    };
    let mut parameters = BTreeMap::new();
    for param in sub.params() {
        if let Some(e) = doc.entries.get(param.key) {
            parameters.insert(param.key.to_string(), e.value.clone());
            continue;
        }
        match param.need {
            Need::Default(text) => {
                let v = coerce(param.kind, text).expect("schema defaults are well typed");
                parameters.insert(param.key.to_string(), v);
            }
            // A key rejected for its type is not also reported missing.
            Need::Required if !doc.sweep.iter().any(|(a, _)| a.key == param.key) && !rejected(errors, param.key) => {
                errors.push(ConfigError::new(
                    ErrorKind::Missing,
                    doc.header_line,
                    format!("missing required key '{}' ({}: {})", param.key, param.kind, param.help),
                ));
            }
            _ => {}
        }
    }
    if !errors.is_empty() {
        return None;
    }
    let output_dir = match parameters.get("output_dir") {
        Some(Value::Str(s)) => s.clone(),
        _ => "out".to_string(),
    };
    Some(RunConfig {
        subcommand: sub,
        parameters,
        output_dir,
        sweep: doc.sweep.iter().map(|(a, _)| a.clone()).collect(),
    })
}

/// Parses and resolves `text`; `default` names the subcommand for keys outside a section.
#[cfg(test)]
pub fn parse_config(text: &str, default: Option<Subcommand>) -> Result<RunConfig, Vec<ConfigError>> {
    let (doc, mut errors) = parse_document(text, default);
    match resolve(&doc, &mut errors) {
        Some(cfg) if errors.is_empty() => Ok(cfg),
        _ => Err(errors),
    }
}
