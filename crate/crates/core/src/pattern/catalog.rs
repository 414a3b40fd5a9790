//! Persistent pattern catalog: a directory of RLE files plus `manifest.json`.
//!
//! The manifest maps each name to its file, rule, claimed measurements and
//! provenance. Reference rows that have no shape in the catalog are listed
//! under `unverified`; gate blueprints are stored as opaque JSON under
//! `blueprints`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{parse_cells, parse_rle, write_rle, Pattern, RleError};
use crate::analysis::{classify_isolated, ClassifyOptions};
use crate::rule::RuleSpec;
use crate::zoo;

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("bad manifest: {0}")]
    Manifest(#[from] serde_json::Error),
    #[error("bad pattern file {path}: {source}")]
    Pattern { path: PathBuf, source: RleError },
    #[error("duplicate catalog name {0:?}")]
    Duplicate(String),
    #[error("no catalog entry named {0:?}")]
    Missing(String),
    #[error("invalid catalog name {0:?}")]
    BadName(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntryKind {
    StillLife,
    Oscillator,
    Glider,
    Gun,
    Puffer,
    PufferGun,
    /// Stationary part of a constructed gate.
    Fixture,
    Unclassified,
}

impl EntryKind {
    pub fn is_mobile(self) -> bool {
        matches!(self, EntryKind::Glider)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Searched,
    Imported,
    Constructed,
}

/// Claimed table measurements for an entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measurements {
    pub period: usize,
    pub dx: i64,
    pub dy: i64,
    pub translation: i64,
    pub volume: i64,
    pub weight: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: String,
    pub pattern: Pattern,
    pub rule: RuleSpec,
    pub kind: EntryKind,
    pub claimed: Option<Measurements>,
    pub provenance: Provenance,
    /// Set when the name was picked among several table rows with the same
    /// measurements.
    pub ambiguous: bool,
    pub note: Option<String>,
}

impl CatalogEntry {
    pub fn new(name: impl Into<String>, pattern: Pattern, rule: RuleSpec, provenance: Provenance) -> CatalogEntry {
        CatalogEntry {
            name: name.into(),
            pattern,
            rule,
            kind: EntryKind::Unclassified,
            claimed: None,
            provenance,
            ambiguous: false,
            note: None,
        }
    }

    pub fn period(&self) -> usize {
        self.claimed.map_or(1, |m| m.period)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ManifestEntry {
    name: String,
    file: String,
    rule: RuleSpec,
    kind: EntryKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    period: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    translation: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dx: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dy: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    volume: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight: Option<usize>,
    provenance: Provenance,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    ambiguous: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct Manifest {
    entries: Vec<ManifestEntry>,
    #[serde(default)]
    unverified: Vec<serde_json::Value>,
    #[serde(default)]
    blueprints: BTreeMap<String, serde_json::Value>,
}

/// Named entries (unique names, kept in insertion order) plus blueprints.
#[derive(Debug, Clone, Default)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
    blueprints: BTreeMap<String, serde_json::Value>,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.')) && !name.starts_with('.')
}

impl Catalog {
    pub fn new() -> Catalog {
        Catalog::default()
    }

    /// The shapes known to be rediscoverable by search, as `searched` entries
    /// with their table measurements.
    pub fn builtin() -> Catalog {
        let mut cat = Catalog::new();
        for (name, _) in zoo::BUILTIN_RLE {
            let row = zoo::row(name).expect("builtin names are table rows");
            let mut e = CatalogEntry::new(name, zoo::builtin(name).unwrap(), RuleSpec::diffusion(), Provenance::Searched);
            e.kind = match row.kind {
                zoo::ZooKind::Glider => EntryKind::Glider,
                _ => EntryKind::Oscillator,
            };
            let (dx, dy) = builtin_velocity(&e.pattern);
            e.claimed = Some(Measurements {
                period: row.period,
                dx,
                dy,
                translation: row.translation,
                volume: row.volume,
                weight: row.weight,
            });
            e.ambiguous = matches!(name, "g2" | "g3" | "g4");
            cat.insert(e).unwrap();
        }
        for bp in crate::gates::frozen_all() {
            let value = serde_json::to_value(&bp).expect("blueprints serialize");
            cat.set_blueprint(bp.name.as_str(), value);
        }
        cat
    }

    pub fn insert(&mut self, entry: CatalogEntry) -> Result<(), CatalogError> {
        if !valid_name(&entry.name) {
            return Err(CatalogError::BadName(entry.name));
        }
        if self.get(&entry.name).is_some() {
            return Err(CatalogError::Duplicate(entry.name));
        }
        self.entries.push(entry);
        Ok(())
    }

    /// Inserts or replaces by name.
    pub fn upsert(&mut self, entry: CatalogEntry) -> Result<(), CatalogError> {
        match self.entries.iter_mut().find(|e| e.name == entry.name) {
            Some(slot) => {
                *slot = entry;
                Ok(())
            }
            None => self.insert(entry),
        }
    }

    pub fn get(&self, name: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn require(&self, name: &str) -> Result<&CatalogEntry, CatalogError> {
        self.get(name).ok_or_else(|| CatalogError::Missing(name.to_string()))
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn blueprint(&self, name: &str) -> Option<&serde_json::Value> {
        self.blueprints.get(name)
    }

    pub fn set_blueprint(&mut self, name: &str, value: serde_json::Value) {
        self.blueprints.insert(name.to_string(), value);
    }

    pub fn blueprint_names(&self) -> impl Iterator<Item = &str> {
        self.blueprints.keys().map(String::as_str)
    }

    /// Reference table rows with no entry of the same name.
    pub fn unverified_rows(&self) -> Vec<&'static zoo::ZooRow> {
        zoo::all_rows().filter(|r| self.get(r.name).is_none()).collect()
    }

    /// Reads a catalog directory. A missing directory or manifest yields an
    /// empty catalog.
    pub fn load(dir: &Path) -> Result<Catalog, CatalogError> {
        let manifest_path = dir.join(MANIFEST);
        if !manifest_path.exists() {
            return Ok(Catalog::new());
        }
        let text = read(&manifest_path)?;
        let manifest: Manifest = serde_json::from_str(&text)?;
        let mut cat = Catalog { entries: Vec::new(), blueprints: manifest.blueprints };
        for m in manifest.entries {
            let path = dir.join(&m.file);
            let (pattern, _) = read_pattern(&path)?;
            let claimed = match (m.period, m.volume, m.weight) {
                (Some(period), Some(volume), Some(weight)) => Some(Measurements {
                    period,
                    dx: m.dx.unwrap_or(0),
                    dy: m.dy.unwrap_or(0),
                    translation: m.translation.unwrap_or(0),
                    volume,
                    weight,
                }),
                _ => None,
            };
            cat.insert(CatalogEntry {
                name: m.name,
                pattern,
                rule: m.rule,
                kind: m.kind,
                claimed,
                provenance: m.provenance,
                ambiguous: m.ambiguous,
                note: m.note,
            })?;
        }
        Ok(cat)
    }

    /// Writes every entry as `<name>.rle` plus the manifest. Files of entries
    /// no longer in the catalog are left alone.
    pub fn save(&self, dir: &Path) -> Result<(), CatalogError> {
        fs::create_dir_all(dir).map_err(|source| CatalogError::Io { path: dir.to_path_buf(), source })?;
        let mut manifest = Manifest { blueprints: self.blueprints.clone(), ..Manifest::default() };
        for e in &self.entries {
            let file = format!("{}.rle", e.name);
            let path = dir.join(&file);
            let mut text = format!("#N {}\n", e.name);
            text.push_str(&write_rle(&e.pattern, Some(&e.rule)));
            text.push('\n');
            write(&path, &text)?;
            manifest.entries.push(ManifestEntry {
                name: e.name.clone(),
                file,
                rule: e.rule,
                kind: e.kind,
                period: e.claimed.map(|m| m.period),
                translation: e.claimed.map(|m| m.translation),
                dx: e.claimed.map(|m| m.dx),
                dy: e.claimed.map(|m| m.dy),
                volume: e.claimed.map(|m| m.volume),
                weight: e.claimed.map(|m| m.weight),
                provenance: e.provenance,
                ambiguous: e.ambiguous,
                note: e.note.clone(),
            });
        }
        manifest.unverified = self
            .unverified_rows()
            .into_iter()
            .map(|r| serde_json::to_value(r).expect("table rows serialize"))
            .collect();
        let json = serde_json::to_string_pretty(&manifest)?;
        write(&dir.join(MANIFEST), &(json + "\n"))
    }
}

fn builtin_velocity(pattern: &Pattern) -> (i64, i64) {
    let report = classify_isolated(pattern, &RuleSpec::diffusion(), &ClassifyOptions::default());
    report.localization().map_or((0, 0), |r| (r.dx, r.dy))
}

fn read(path: &Path) -> Result<String, CatalogError> {
    fs::read_to_string(path).map_err(|source| CatalogError::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CatalogError> {
    fs::write(path, text).map_err(|source| CatalogError::Io { path: path.to_path_buf(), source })
}

/// Reads a `.rle` or `.cells` file (by extension; anything else is tried as
/// RLE).
pub fn read_pattern(path: &Path) -> Result<(Pattern, Option<RuleSpec>), CatalogError> {
    let text = read(path)?;
    let parsed = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("cells")) {
        parse_cells(&text).map(|p| (p, None))
    } else {
        parse_rle(&text)
    };
    parsed.map_err(|source| CatalogError::Pattern { path: path.to_path_buf(), source })
}
