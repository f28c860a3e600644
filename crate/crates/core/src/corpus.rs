//! Labeled document collections: loading, validation, deduplication,
//! stratified splitting, merging, and label profiling.
//!
//! Datasets are immutable after construction. Every operation returns a new
//! value, so datasets can be shared freely across worker threads.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hashing;

/// Canonical number of labels in the full task configuration.
pub const CANONICAL_LABEL_COUNT: usize = 35;

const BUILTIN_LABELS: &str = include_str!("../assets/builtin_labels.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    En,
    Fr,
}

impl Language {
    pub fn code(self) -> &'static str {
        match self {
            Language::En => "en",
            Language::Fr => "fr",
        }
    }

    /// Human-readable subtask name as used in result tables.
    pub fn subtask_name(self) -> &'static str {
        match self {
            Language::En => "English",
            Language::Fr => "French",
        }
    }

    pub fn parse(s: &str) -> Result<Language> {
        match s.trim().to_ascii_lowercase().as_str() {
            "en" | "english" => Ok(Language::En),
            "fr" | "french" => Ok(Language::Fr),
            other => Err(Error::Config(format!("unknown language {other:?}"))),
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    #[default]
    Original,
    Gpt3mix,
    Crawled,
    Translated,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Provenance::Original => "original",
            Provenance::Gpt3mix => "gpt3mix",
            Provenance::Crawled => "crawled",
            Provenance::Translated => "translated",
        };
        f.write_str(s)
    }
}

/// One news item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub headline: Option<String>,
    pub body: String,
    pub language: Language,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default)]
    pub provenance: Provenance,
}

impl Document {
    /// Checks per-document invariants against `registry`, normalizing empty
    /// optional fields to `None`.
    pub fn validate(mut self, registry: &LabelRegistry) -> Result<Document> {
        if self.body.trim().is_empty() {
            return Err(Error::InvalidDocument {
                id: self.id.clone(),
                message: "body is empty".into(),
            });
        }
        if self.id.is_empty() {
            return Err(Error::InvalidDocument {
                id: String::new(),
                message: "id is empty".into(),
            });
        }
        if let Some(h) = &self.headline {
            if h.trim().is_empty() {
                self.headline = None;
            }
        }
        if let Some(s) = &self.source {
            if s.trim().is_empty() {
                self.source = None;
            }
        }
        if let Some(label) = &self.label {
            if !registry.contains(label) {
                return Err(Error::InvalidDocument {
                    id: self.id.clone(),
                    message: format!("unknown label {label:?}"),
                });
            }
        }
        Ok(self)
    }

    /// Body text normalized for duplicate detection: lowercase with runs of
    /// whitespace collapsed to single spaces.
    pub fn normalized_body(&self) -> String {
        normalize_text(&self.body)
    }

    /// Text fed to classifiers: headline and body when both are present.
    pub fn classification_text(&self) -> String {
        match &self.headline {
            Some(h) => format!("{h}\n{}", self.body),
            None => self.body.clone(),
        }
    }
}

pub fn normalize_text(text: &str) -> String {
    text.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

/// The label taxonomy: name -> description, order-preserving.
///
/// Ships pre-seeded with 33 built-in task labels; the canonical 35-label
/// configuration is completed from a registry file. Registries are data, not
/// code: any label set works, which is what the unit-test corpora rely on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelRegistry {
    entries: IndexMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct RegistryFile {
    labels: Vec<RegistryEntry>,
}

#[derive(Serialize, Deserialize)]
struct RegistryEntry {
    name: String,
    description: String,
}

impl LabelRegistry {
    /// The 33 built-in task labels.
    pub fn builtin() -> LabelRegistry {
        LabelRegistry::from_json(BUILTIN_LABELS).expect("builtin label data is valid")
    }

    pub fn from_entries<I, S, T>(entries: I) -> Result<LabelRegistry>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        let mut map = IndexMap::new();
        let mut lower = HashSet::new();
        for (name, desc) in entries {
            let name: String = name.into();
            let desc: String = desc.into();
            if name.trim().is_empty() {
                return Err(Error::Config("registry label name is empty".into()));
            }
            if desc.trim().is_empty() {
                return Err(Error::Config(format!(
                    "registry label {name:?} has an empty description"
                )));
            }
            if !lower.insert(name.to_lowercase()) {
                return Err(Error::Config(format!("duplicate registry label {name:?}")));
            }
            map.insert(name, desc);
        }
        if map.is_empty() {
            return Err(Error::Config("registry has no labels".into()));
        }
        Ok(LabelRegistry { entries: map })
    }

    pub fn from_json(json: &str) -> Result<LabelRegistry> {
        let file: RegistryFile = serde_json::from_str(json)
            .map_err(|e| Error::Config(format!("invalid registry file: {e}")))?;
        LabelRegistry::from_entries(file.labels.into_iter().map(|e| (e.name, e.description)))
    }

    pub fn load(path: &Path) -> Result<LabelRegistry> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        LabelRegistry::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = RegistryFile {
            labels: self
                .entries
                .iter()
                .map(|(n, d)| RegistryEntry {
                    name: n.clone(),
                    description: d.clone(),
                })
                .collect(),
        };
        let json = serde_json::to_string_pretty(&file).expect("registry serializes");
        fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    /// Extends a copy of this registry with additional labels.
    pub fn extended<I, S, T>(&self, extra: I) -> Result<LabelRegistry>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        let base = self
            .entries
            .iter()
            .map(|(n, d)| (n.clone(), d.clone()))
            .chain(extra.into_iter().map(|(n, d)| (n.into(), d.into())));
        LabelRegistry::from_entries(base)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn description(&self, name: &str) -> Option<&str> {
        self.entries.get(name).map(String::as_str)
    }

    /// Names in registry order.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn name_vec(&self) -> Vec<String> {
        self.entries.keys().cloned().collect()
    }

    /// Case-insensitive lookup returning the canonical name.
    pub fn resolve(&self, name: &str) -> Option<&str> {
        let wanted = name.trim().to_lowercase();
        self.entries
            .keys()
            .find(|k| k.to_lowercase() == wanted)
            .map(String::as_str)
    }

    /// Position of a label in registry order.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.entries.get_index_of(name)
    }

    /// Stable content fingerprint, used as the registry id that datasets and
    /// models reference.
    pub fn fingerprint(&self) -> String {
        let mut h = 0u64;
        for (name, desc) in &self.entries {
            h ^= hashing::fnv1a_parts(0x5eed, &[name.as_bytes(), desc.as_bytes()]);
            h = h.rotate_left(17);
        }
        format!("{h:016x}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    Jsonl,
    Csv,
}

impl DataFormat {
    pub fn parse(s: &str) -> Result<DataFormat> {
        match s.trim().to_ascii_lowercase().as_str() {
            "jsonl" => Ok(DataFormat::Jsonl),
            "csv" => Ok(DataFormat::Csv),
            other => Err(Error::Config(format!("unknown data format {other:?}"))),
        }
    }

    /// Guess from a file extension, defaulting to JSON Lines.
    pub fn from_path(path: &Path) -> DataFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => DataFormat::Csv,
            _ => DataFormat::Jsonl,
        }
    }
}

/// An ordered, validated collection of documents bound to one registry.
#[derive(Debug, Clone)]
pub struct Dataset {
    name: String,
    documents: Vec<Document>,
    registry: Arc<LabelRegistry>,
}

impl Dataset {
    /// Validates every document and id-uniqueness, then freezes the dataset.
    pub fn new(
        name: impl Into<String>,
        documents: Vec<Document>,
        registry: Arc<LabelRegistry>,
    ) -> Result<Dataset> {
        let name = name.into();
        let mut seen = HashSet::with_capacity(documents.len());
        let mut validated = Vec::with_capacity(documents.len());
        for doc in documents {
            let doc = doc.validate(&registry)?;
            if !seen.insert(doc.id.clone()) {
                return Err(Error::DuplicateId {
                    id: doc.id.clone(),
                    dataset: name,
                });
            }
            validated.push(doc);
        }
        Ok(Dataset {
            name,
            documents: validated,
            registry,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn registry(&self) -> &Arc<LabelRegistry> {
        &self.registry
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn renamed(&self, name: impl Into<String>) -> Dataset {
        Dataset {
            name: name.into(),
            documents: self.documents.clone(),
            registry: Arc::clone(&self.registry),
        }
    }

    pub fn fully_labeled(&self) -> bool {
        self.documents.iter().all(|d| d.label.is_some())
    }

    /// Keeps at most one document per normalized body; first occurrence wins,
    /// order otherwise preserved.
    pub fn dedup(&self) -> Dataset {
        let mut seen = HashSet::with_capacity(self.documents.len());
        let documents = self
            .documents
            .iter()
            .filter(|d| seen.insert(d.normalized_body()))
            .cloned()
            .collect();
        Dataset {
            name: self.name.clone(),
            documents,
            registry: Arc::clone(&self.registry),
        }
    }

    /// Stratified train/validation split.
    ///
    /// Per-label validation counts are `floor(fraction * count)` topped up by
    /// largest remainder (ties broken by lexicographic label order) until the
    /// global target `round(fraction * len)` is met. Deterministic for a
    /// given seed.
    pub fn stratified_split(&self, valid_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
        if !(valid_fraction > 0.0 && valid_fraction < 1.0) {
            return Err(Error::Precondition(format!(
                "valid_fraction must be in (0,1), got {valid_fraction}"
            )));
        }
        let n = self.documents.len();
        if (valid_fraction * n as f64) < 1.0 {
            return Err(Error::Precondition(format!(
                "validation target too small: fraction {valid_fraction} of {n} documents"
            )));
        }
        let mut by_label: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, doc) in self.documents.iter().enumerate() {
            match &doc.label {
                Some(l) => by_label.entry(l.as_str()).or_default().push(i),
                None => {
                    return Err(Error::Precondition(format!(
                        "unlabeled document {:?} cannot be stratified",
                        doc.id
                    )))
                }
            }
        }
        let target = (valid_fraction * n as f64).round() as usize;

        // Largest-remainder allocation of the validation quota.
        let mut alloc: BTreeMap<&str, usize> = BTreeMap::new();
        let mut remainders: Vec<(&str, f64)> = Vec::new();
        let mut allocated = 0usize;
        for (&label, idxs) in &by_label {
            let exact = valid_fraction * idxs.len() as f64;
            let base = exact.floor() as usize;
            alloc.insert(label, base);
            allocated += base;
            remainders.push((label, exact - base as f64));
        }
        remainders.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(b.0)));
        let mut cursor = remainders.iter();
        while allocated < target {
            match cursor.next() {
                Some(&(label, _)) => {
                    let count = by_label[label].len();
                    let a = alloc.get_mut(label).unwrap();
                    if *a < count {
                        *a += 1;
                        allocated += 1;
                    }
                }
                // All remainders consumed; restart over labels with room.
                None => cursor = remainders.iter(),
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut valid_idx = Vec::with_capacity(target);
        for (&label, idxs) in &by_label {
            let mut shuffled = idxs.clone();
            shuffled.shuffle(&mut rng);
            valid_idx.extend(shuffled.into_iter().take(alloc[label]));
        }
        let valid_set: HashSet<usize> = valid_idx.iter().copied().collect();

        let mut train_docs = Vec::with_capacity(n - valid_set.len());
        let mut valid_docs = Vec::with_capacity(valid_set.len());
        for (i, doc) in self.documents.iter().enumerate() {
            if valid_set.contains(&i) {
                valid_docs.push(doc.clone());
            } else {
                train_docs.push(doc.clone());
            }
        }
        let train = Dataset {
            name: format!("{}-train", self.name),
            documents: train_docs,
            registry: Arc::clone(&self.registry),
        };
        let valid = Dataset {
            name: format!("{}-valid", self.name),
            documents: valid_docs,
            registry: Arc::clone(&self.registry),
        };
        Ok((train, valid))
    }

    /// Fractions per label over labeled documents; sums to 1.
    pub fn label_distribution(&self) -> Result<BTreeMap<String, f64>> {
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        let mut labeled = 0usize;
        for doc in &self.documents {
            if let Some(l) = &doc.label {
                *counts.entry(l.clone()).or_default() += 1;
                labeled += 1;
            }
        }
        if labeled == 0 {
            return Err(Error::EmptyDataset(format!(
                "{}: no labeled documents",
                self.name
            )));
        }
        Ok(counts
            .into_iter()
            .map(|(l, c)| (l, c as f64 / labeled as f64))
            .collect())
    }

    /// Concatenates datasets in argument order. Ids are re-namespaced by
    /// source dataset name so the merged ids stay unique.
    pub fn merge(parts: &[Dataset], dedup_after: bool) -> Result<Dataset> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Precondition("merge of zero datasets".into()))?;
        let fingerprint = first.registry.fingerprint();
        let mut documents = Vec::new();
        let mut name_counts: HashMap<&str, usize> = HashMap::new();
        let mut names = Vec::new();
        for part in parts {
            if part.registry.fingerprint() != fingerprint {
                return Err(Error::RegistryMismatch {
                    dataset: part.name.clone(),
                });
            }
            let seen = name_counts.entry(part.name.as_str()).or_insert(0);
            *seen += 1;
            let namespace = if *seen == 1 {
                part.name.clone()
            } else {
                format!("{}#{}", part.name, seen)
            };
            names.push(part.name.clone());
            for doc in &part.documents {
                let mut doc = doc.clone();
                doc.id = format!("{namespace}/{}", doc.id);
                documents.push(doc);
            }
        }
        let merged = Dataset {
            name: format!("merge({})", names.join("+")),
            documents,
            registry: Arc::clone(&first.registry),
        };
        Ok(if dedup_after { merged.dedup() } else { merged })
    }

    /// Drops documents whose source matches any excluded source
    /// (case-insensitive exact match). Documents without a source stay.
    pub fn filter_by_source(&self, excluded_sources: &[String]) -> Dataset {
        let excluded: HashSet<String> = excluded_sources
            .iter()
            .map(|s| s.trim().to_lowercase())
            .collect();
        let documents = self
            .documents
            .iter()
            .filter(|d| match &d.source {
                Some(s) => !excluded.contains(&s.trim().to_lowercase()),
                None => true,
            })
            .cloned()
            .collect();
        Dataset {
            name: self.name.clone(),
            documents,
            registry: Arc::clone(&self.registry),
        }
    }

    /// Replaces the document list, revalidating against the same registry.
    pub fn with_documents(&self, name: impl Into<String>, docs: Vec<Document>) -> Result<Dataset> {
        Dataset::new(name, docs, Arc::clone(&self.registry))
    }
}

const CSV_HEADER: [&str; 7] = [
    "id",
    "headline",
    "body",
    "language",
    "label",
    "source",
    "provenance",
];

/// Loads and validates a dataset; the dataset name is the file stem.
///
/// Rejects on the first invalid record, reporting its line number.
pub fn load_dataset(
    path: &Path,
    format: DataFormat,
    registry: Arc<LabelRegistry>,
) -> Result<Dataset> {
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("dataset")
        .to_string();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let path_str = path.display().to_string();
    let raw = match format {
        DataFormat::Jsonl => parse_jsonl(&text, &path_str)?,
        DataFormat::Csv => parse_csv(&text, &path_str)?,
    };
    if raw.is_empty() {
        return Err(Error::EmptyDataset(path_str));
    }
    let mut seen = HashSet::with_capacity(raw.len());
    let mut documents = Vec::with_capacity(raw.len());
    for (line, doc) in raw {
        if let Some(label) = &doc.label {
            if !registry.contains(label) {
                return Err(Error::UnknownLabel {
                    path: path_str,
                    line,
                    label: label.clone(),
                });
            }
        }
        let doc = doc.validate(&registry).map_err(|e| match e {
            Error::InvalidDocument { id, message } => Error::MalformedRecord {
                path: path_str.clone(),
                line,
                message: format!("document {id:?}: {message}"),
            },
            other => other,
        })?;
        if !seen.insert(doc.id.clone()) {
            return Err(Error::MalformedRecord {
                path: path_str.clone(),
                line,
                message: format!("duplicate document id {:?}", doc.id),
            });
        }
        documents.push(doc);
    }
    Ok(Dataset {
        name,
        documents,
        registry,
    })
}

fn parse_jsonl(text: &str, path: &str) -> Result<Vec<(usize, Document)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document = serde_json::from_str(line).map_err(|e| Error::MalformedRecord {
            path: path.to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push((i + 1, doc));
    }
    Ok(out)
}

fn parse_csv(text: &str, path: &str) -> Result<Vec<(usize, Document)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::MalformedRecord {
            path: path.to_string(),
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let idx: Vec<Option<usize>> = CSV_HEADER.iter().map(|h| col(h)).collect();
    for (required, pos) in [("id", idx[0]), ("body", idx[2]), ("language", idx[3])] {
        if pos.is_none() {
            return Err(Error::MalformedRecord {
                path: path.to_string(),
                line: 1,
                message: format!("missing required column {required:?}"),
            });
        }
    }
    let mut out = Vec::new();
    for (row_no, record) in reader.records().enumerate() {
        let line = row_no + 2; // header is line 1
        let record = record.map_err(|e| Error::MalformedRecord {
            path: path.to_string(),
            line,
            message: e.to_string(),
        })?;
        let field = |i: Option<usize>| -> Option<String> {
            i.and_then(|i| record.get(i))
                .filter(|s| !s.is_empty())
                .map(String::from)
        };
        let language = field(idx[3]).ok_or_else(|| Error::MalformedRecord {
            path: path.to_string(),
            line,
            message: "missing language".into(),
        })?;
        let language = Language::parse(&language).map_err(|e| Error::MalformedRecord {
            path: path.to_string(),
            line,
            message: e.to_string(),
        })?;
        let provenance = match field(idx[6]) {
            None => Provenance::Original,
            Some(p) => {
                serde_json::from_value(serde_json::Value::String(p.clone())).map_err(|_| {
                    Error::MalformedRecord {
                        path: path.to_string(),
                        line,
                        message: format!("unknown provenance {p:?}"),
                    }
                })?
            }
        };
        out.push((
            line,
            Document {
                id: field(idx[0]).unwrap_or_default(),
                headline: field(idx[1]),
                body: field(idx[2]).unwrap_or_default(),
                language,
                label: field(idx[4]),
                source: field(idx[5]),
                provenance,
            },
        ));
    }
    Ok(out)
}

pub fn save_dataset(dataset: &Dataset, path: &Path, format: DataFormat) -> Result<()> {
    let mut buf = Vec::new();
    match format {
        DataFormat::Jsonl => {
            for doc in dataset.documents() {
                serde_json::to_writer(&mut buf, doc).expect("document serializes");
                buf.push(b'\n');
            }
        }
        DataFormat::Csv => {
            let mut writer = csv::Writer::from_writer(&mut buf);
            writer.write_record(CSV_HEADER).expect("csv header");
            for doc in dataset.documents() {
                writer
                    .write_record([
                        doc.id.as_str(),
                        doc.headline.as_deref().unwrap_or(""),
                        doc.body.as_str(),
                        doc.language.code(),
                        doc.label.as_deref().unwrap_or(""),
                        doc.source.as_deref().unwrap_or(""),
                        &doc.provenance.to_string(),
                    ])
                    .expect("csv record");
            }
            writer.flush().expect("csv flush");
            drop(writer);
        }
    }
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn registry() -> Arc<LabelRegistry> {
        Arc::new(
            LabelRegistry::from_entries([
                ("Board", "This label is about boards."),
                ("Pay", "This label is about pay."),
                ("Water Stress", "This label is about water."),
                ("Accounting", "This label is about accounting."),
            ])
            .unwrap(),
        )
    }

    fn doc(id: &str, body: &str, label: Option<&str>) -> Document {
        Document {
            id: id.into(),
            headline: None,
            body: body.into(),
            language: Language::En,
            label: label.map(String::from),
            source: None,
            provenance: Provenance::Original,
        }
    }

    fn dataset(docs: Vec<Document>) -> Dataset {
        Dataset::new("test", docs, registry()).unwrap()
    }

    #[test]
    fn builtin_registry_has_33_labels() {
        let reg = LabelRegistry::builtin();
        assert_eq!(reg.len(), 33);
        assert!(reg.contains("Board"));
        assert!(reg.contains("Controversial Sourcing"));
        assert!(reg
            .description("Access to Finance")
            .unwrap()
            .starts_with("This label is about"));
        // Completing to the canonical count is config, not code.
        let full = reg
            .extended([
                ("Health & Safety", "This label is about safety."),
                ("Tax Transparency", "This label is about tax."),
            ])
            .unwrap();
        assert_eq!(full.len(), CANONICAL_LABEL_COUNT);
    }

    #[test]
    fn registry_rejects_duplicates_and_empty_descriptions() {
        assert!(LabelRegistry::from_entries([("A", "x"), ("a", "y")]).is_err());
        assert!(LabelRegistry::from_entries([("A", "  ")]).is_err());
    }

    #[test]
    fn registry_resolves_case_insensitively() {
        let reg = registry();
        assert_eq!(reg.resolve("water stress"), Some("Water Stress"));
        assert_eq!(reg.resolve("BOARD"), Some("Board"));
        assert_eq!(reg.resolve("Weather"), None);
    }

    #[test]
    fn load_rejects_unknown_label_with_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.jsonl");
        fs::write(
            &path,
            concat!(
                r#"{"id":"1","body":"a fine body","language":"en","label":"Board"}"#,
                "\n",
                r#"{"id":"2","body":"another body","language":"en","label":"Bored"}"#,
                "\n",
            ),
        )
        .unwrap();
        let err = load_dataset(&path, DataFormat::Jsonl, registry()).unwrap_err();
        match err {
            Error::UnknownLabel { line, label, .. } => {
                assert_eq!(line, 2);
                assert_eq!(label, "Bored");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn load_rejects_empty_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.jsonl");
        fs::write(&path, "").unwrap();
        let err = load_dataset(&path, DataFormat::Jsonl, registry()).unwrap_err();
        assert!(matches!(err, Error::EmptyDataset(_)));
    }

    #[test]
    fn load_three_records() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.jsonl");
        fs::write(
            &path,
            concat!(
                r#"{"id":"1","body":"first body","language":"en","label":"Board"}"#,
                "\n",
                r#"{"id":"2","body":"second body","language":"fr","label":"Pay"}"#,
                "\n",
                r#"{"id":"3","body":"third body","language":"en"}"#,
                "\n",
            ),
        )
        .unwrap();
        let ds = load_dataset(&path, DataFormat::Jsonl, registry()).unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.name(), "d");
        assert_eq!(ds.documents()[1].language, Language::Fr);
        assert_eq!(ds.documents()[2].label, None);
    }

    #[test]
    fn roundtrip_both_formats() {
        let dir = tempfile::tempdir().unwrap();
        let docs = vec![
            Document {
                id: "a".into(),
                headline: Some("Head, with comma".into()),
                body: "Body with \"quotes\" and, commas".into(),
                language: Language::En,
                label: Some("Board".into()),
                source: Some("Wire".into()),
                provenance: Provenance::Crawled,
            },
            doc("b", "plain body", None),
        ];
        let ds = dataset(docs);
        for format in [DataFormat::Jsonl, DataFormat::Csv] {
            let path = dir.path().join(match format {
                DataFormat::Jsonl => "rt.jsonl",
                DataFormat::Csv => "rt.csv",
            });
            save_dataset(&ds, &path, format).unwrap();
            let back = load_dataset(&path, format, registry()).unwrap();
            assert_eq!(back.documents(), ds.documents(), "{format:?}");
        }
    }

    #[test]
    fn dedup_exact_and_normalized() {
        let ds = dataset(vec![
            doc("1", "The Board met today", Some("Board")),
            doc("2", "The Board met today", Some("Board")),
            doc("3", "the  board MET today", Some("Pay")),
            doc("4", "different text entirely", Some("Pay")),
        ]);
        let out = ds.dedup();
        assert_eq!(out.len(), 2);
        assert_eq!(out.documents()[0].id, "1");
        assert_eq!(out.documents()[1].id, "4");
    }

    #[test]
    fn dedup_identity_and_idempotence() {
        let ds = dataset(vec![
            doc("1", "alpha text", Some("Board")),
            doc("2", "beta text", Some("Pay")),
        ]);
        let once = ds.dedup();
        assert_eq!(once.len(), 2);
        let twice = once.dedup();
        assert_eq!(once.documents(), twice.documents());
    }

    #[test]
    fn stratified_split_counts_and_determinism() {
        // 4 labels x 25 docs, fraction 0.05 -> 5 validation docs; each label
        // contributes 1 and the lexicographically first tied label gets the
        // top-up.
        let labels = ["Accounting", "Board", "Pay", "Water Stress"];
        let mut docs = Vec::new();
        for label in labels {
            for i in 0..25 {
                docs.push(doc(&format!("{label}-{i}"), &format!("{label} body {i}"), Some(label)));
            }
        }
        let ds = dataset(docs);
        let (train, valid) = ds.stratified_split(0.05, 11).unwrap();
        assert_eq!(valid.len(), 5);
        assert_eq!(train.len(), 95);
        let dist: BTreeMap<String, usize> =
            valid.documents().iter().fold(BTreeMap::new(), |mut m, d| {
                *m.entry(d.label.clone().unwrap()).or_default() += 1;
                m
            });
        assert_eq!(dist["Accounting"], 2); // lexicographically first label
        assert_eq!(dist["Board"], 1);
        assert_eq!(dist["Pay"], 1);
        assert_eq!(dist["Water Stress"], 1);

        let (_, valid2) = ds.stratified_split(0.05, 11).unwrap();
        let ids: Vec<_> = valid.documents().iter().map(|d| &d.id).collect();
        let ids2: Vec<_> = valid2.documents().iter().map(|d| &d.id).collect();
        assert_eq!(ids, ids2);

        // Different seed: same counts, membership may differ.
        let (_, valid3) = ds.stratified_split(0.05, 12).unwrap();
        let dist3: BTreeMap<String, usize> =
            valid3.documents().iter().fold(BTreeMap::new(), |mut m, d| {
                *m.entry(d.label.clone().unwrap()).or_default() += 1;
                m
            });
        assert_eq!(dist, dist3);
    }

    #[test]
    fn stratified_split_rejects_degenerate_fraction() {
        let docs = (0..10)
            .map(|i| doc(&format!("d{i}"), &format!("body {i}"), Some("Board")))
            .collect();
        let ds = dataset(docs);
        assert!(matches!(
            ds.stratified_split(0.05, 0),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            ds.stratified_split(1.5, 0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn stratified_split_rejects_unlabeled() {
        let ds = dataset(vec![
            doc("1", "labeled body", Some("Board")),
            doc("2", "unlabeled body", None),
        ]);
        assert!(matches!(
            ds.stratified_split(0.5, 0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn label_distribution_hand_counts() {
        let ds = dataset(vec![
            doc("1", "one", Some("Board")),
            doc("2", "two", Some("Board")),
            doc("3", "three", Some("Pay")),
            doc("4", "four", Some("Pay")),
            doc("5", "five (unlabeled)", None),
        ]);
        let dist = ds.label_distribution().unwrap();
        assert_eq!(dist["Board"], 0.5);
        assert_eq!(dist["Pay"], 0.5);
        let sum: f64 = dist.values().sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn label_distribution_single_and_empty() {
        let ds = dataset(vec![doc("1", "one", Some("Pay"))]);
        assert_eq!(ds.label_distribution().unwrap()["Pay"], 1.0);
        let unlabeled = dataset(vec![doc("1", "one", None)]);
        assert!(matches!(
            unlabeled.label_distribution(),
            Err(Error::EmptyDataset(_))
        ));
    }

    #[test]
    fn merge_concatenates_and_namespaces() {
        let a = Dataset::new(
            "a",
            vec![
                doc("1", "a one", Some("Board")),
                doc("2", "a two", Some("Pay")),
                doc("3", "a three", Some("Pay")),
            ],
            registry(),
        )
        .unwrap();
        let b = Dataset::new(
            "b",
            vec![doc("1", "b one", Some("Board")), doc("2", "b two", None)],
            registry(),
        )
        .unwrap();
        let merged = Dataset::merge(&[a.clone(), b], false).unwrap();
        assert_eq!(merged.len(), 5);
        assert_eq!(merged.documents()[0].id, "a/1");
        assert_eq!(merged.documents()[3].id, "b/1");

        let self_merge = Dataset::merge(&[a.clone(), a.clone()], true).unwrap();
        assert_eq!(self_merge.len(), a.len());
    }

    #[test]
    fn merge_rejects_registry_mismatch() {
        let a = dataset(vec![doc("1", "a body", Some("Board"))]);
        let other_reg = Arc::new(LabelRegistry::from_entries([("X", "desc")]).unwrap());
        let b = Dataset::new("b", vec![doc("1", "b body", Some("X"))], other_reg).unwrap();
        assert!(matches!(
            Dataset::merge(&[a, b], false),
            Err(Error::RegistryMismatch { .. })
        ));
    }

    #[test]
    fn filter_by_source_rules() {
        let mut docs = vec![
            doc("1", "one", None),
            doc("2", "two", None),
            doc("3", "three", None),
            doc("4", "four", None),
            doc("5", "five", None),
        ];
        docs[0].source = Some("Reuters".into());
        docs[1].source = Some("reuters".into());
        docs[2].source = Some("Bloomberg".into());
        // docs[3] and docs[4] have no source.
        let ds = dataset(docs);
        let out = ds.filter_by_source(&["reuters".to_string()]);
        assert_eq!(out.len(), 3);
        assert!(out.documents().iter().all(|d| d.source.as_deref() != Some("Reuters")));

        assert_eq!(ds.filter_by_source(&[]).len(), 5);
        let all = ds.filter_by_source(&["reuters".into(), "bloomberg".into()]);
        assert_eq!(all.len(), 2);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = Dataset::new(
            "dup",
            vec![doc("1", "one", None), doc("1", "uno", None)],
            registry(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateId { .. }));
    }
}
