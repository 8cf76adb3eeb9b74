//! Flat `key = value` configuration text with `[section]` headers.
//!
//! ```text
//! # comment
//! [suite]
//! name = theorem1
//! space = h3
//!
//! [roots]
//! rank = 2
//! root = 1,0;1;0
//! root = 0,1;1;0
//! ```
//!
//! Keys before the first header belong to the unnamed section `""`.
//! Repeated keys are kept in order; scalar lookups return the last one.

use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

impl Entry {
    pub fn error(&self, message: &str) -> Error {
        Error::Config {
            line: self.line,
            message: format!("{}: {message}", self.key),
        }
    }

    pub fn parse<T: FromStr>(&self) -> Result<T> {
        self.value
            .parse()
            .map_err(|_| self.error(&format!("cannot parse `{}`", self.value)))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub entries: Vec<Entry>,
}

impl Section {
    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().rev().find(|e| e.key == key)
    }

    pub fn require(&self, key: &str) -> Result<&Entry> {
        self.get(key).ok_or_else(|| Error::Config {
            line: self.line,
            message: format!("section [{}] is missing `{key}`", self.name),
        })
    }

    pub fn all<'a>(&'a self, key: &'a str) -> impl Iterator<Item = &'a Entry> + 'a {
        self.entries.iter().filter(move |e| e.key == key)
    }

    /// Parsed value of `key`, or `default` when absent.
    pub fn value_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.get(key) {
            Some(e) => e.parse(),
            None => Ok(default),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConfigFile {
    pub sections: Vec<Section>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections = vec![Section::default()];
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| Error::Config {
                    line,
                    message: "unterminated section header".into(),
                })?;
                sections.push(Section {
                    name: name.trim().to_string(),
                    line,
                    entries: Vec::new(),
                });
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
                line,
                message: format!("expected `key = value`, found `{content}`"),
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::Config {
                    line,
                    message: "empty key".into(),
                });
            }
            sections.last_mut().unwrap().entries.push(Entry {
                key: key.to_string(),
                value: value.trim().to_string(),
                line,
            });
        }
        Ok(Self { sections })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// The last section with this name.
    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().rev().find(|s| s.name == name)
    }
}
