//! Parsing, validation, and indexing of the app/API co-usage corpus.
//!
//! The corpus is two line-delimited JSON files: an API catalog (one API with
//! its functional tags per line) and an app list (one app with its
//! constituent APIs per line). Unknown fields are ignored so records can
//! carry extra metadata without breaking older readers.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{self, BufRead, Write};
use std::sync::Arc;

use serde::Deserialize;
use thiserror::Error;

use crate::ids::{ApiId, AppId, Keyword};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{file} line {line}: {reason}")]
    MalformedLine {
        file: CorpusFile,
        line: usize,
        reason: String,
    },
    #[error("duplicate identifier {id:?}")]
    DuplicateId { id: String },
    #[error("app {app} references unknown API {api}")]
    DanglingApiRef { app: AppId, api: ApiId },
    #[error("corpus has no API or no app records")]
    EmptyCorpus,
    #[error("I/O error reading corpus")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFile {
    Api,
    App,
}

impl std::fmt::Display for CorpusFile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CorpusFile::Api => f.write_str("API file"),
            CorpusFile::App => f.write_str("app file"),
        }
    }
}

/// The validated co-usage record store: the API catalog with tags, and the
/// apps with the API sets they integrate.
///
/// Every API referenced by an app exists in the catalog, every app holds a
/// nonempty deduplicated API set, and iteration order is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ecosystem {
    apis: BTreeMap<ApiId, BTreeSet<Keyword>>,
    apps: BTreeMap<AppId, BTreeSet<ApiId>>,
}

impl Ecosystem {
    /// Validates the referenced-API and nonempty-app invariants.
    pub fn new(
        apis: BTreeMap<ApiId, BTreeSet<Keyword>>,
        apps: BTreeMap<AppId, BTreeSet<ApiId>>,
    ) -> Result<Ecosystem, IngestError> {
        if apis.is_empty() || apps.is_empty() {
            return Err(IngestError::EmptyCorpus);
        }
        for (app, members) in &apps {
            if members.is_empty() {
                return Err(IngestError::MalformedLine {
                    file: CorpusFile::App,
                    line: 0,
                    reason: format!("app {app} has an empty API set"),
                });
            }
            for api in members {
                if !apis.contains_key(api) {
                    return Err(IngestError::DanglingApiRef {
                        app: app.clone(),
                        api: api.clone(),
                    });
                }
            }
        }
        Ok(Ecosystem { apis, apps })
    }

    pub fn apis(&self) -> &BTreeMap<ApiId, BTreeSet<Keyword>> {
        &self.apis
    }

    pub fn apps(&self) -> &BTreeMap<AppId, BTreeSet<ApiId>> {
        &self.apps
    }

    pub fn api_count(&self) -> usize {
        self.apis.len()
    }

    pub fn app_count(&self) -> usize {
        self.apps.len()
    }

    pub fn api_tags(&self, api: &ApiId) -> Option<&BTreeSet<Keyword>> {
        self.apis.get(api)
    }

    pub fn app_apis(&self, app: &AppId) -> Option<&BTreeSet<ApiId>> {
        self.apps.get(app)
    }

    /// A copy with one app's co-usage contribution removed. APIs stay in the
    /// catalog even if the removed app was their only user.
    pub fn without_app(&self, app: &AppId) -> Ecosystem {
        let mut apps = self.apps.clone();
        apps.remove(app);
        Ecosystem {
            apis: self.apis.clone(),
            apps,
        }
    }
}

#[derive(Deserialize)]
struct ApiRecord {
    api: String,
    tags: Vec<String>,
}

#[derive(Deserialize)]
struct AppRecord {
    app: String,
    apis: Vec<String>,
}

fn malformed(file: CorpusFile, line: usize, reason: impl Into<String>) -> IngestError {
    IngestError::MalformedLine {
        file,
        line,
        reason: reason.into(),
    }
}

/// Small string interner so repeated tags share one allocation.
#[derive(Default)]
struct Interner {
    strings: HashMap<Arc<str>, ()>,
}

impl Interner {
    fn get(&mut self, s: &str) -> Arc<str> {
        if let Some((existing, ())) = self.strings.get_key_value(s) {
            return Arc::clone(existing);
        }
        let arc: Arc<str> = Arc::from(s);
        self.strings.insert(Arc::clone(&arc), ());
        arc
    }

    fn keyword(&mut self, raw: &str) -> Result<Keyword, crate::ids::IdError> {
        let kw = Keyword::new(raw)?;
        Ok(Keyword::new(&self.get(kw.as_str())).expect("interned keyword is nonempty"))
    }
}

/// Parses and validates the two corpus streams.
///
/// Later duplicate API or app identifiers are rejected rather than merged,
/// and every app must reference only cataloged APIs.
pub fn parse_corpus(
    api_stream: impl BufRead,
    app_stream: impl BufRead,
) -> Result<Ecosystem, IngestError> {
    let mut interner = Interner::default();

    let mut apis: BTreeMap<ApiId, BTreeSet<Keyword>> = BTreeMap::new();
    for (idx, line) in api_stream.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: ApiRecord = serde_json::from_str(&line)
            .map_err(|e| malformed(CorpusFile::Api, line_no, e.to_string()))?;
        let id = ApiId::new(&record.api)
            .map_err(|e| malformed(CorpusFile::Api, line_no, e.to_string()))?;
        let mut tags = BTreeSet::new();
        for raw in &record.tags {
            let kw = interner
                .keyword(raw)
                .map_err(|e| malformed(CorpusFile::Api, line_no, e.to_string()))?;
            tags.insert(kw);
        }
        if apis.insert(id.clone(), tags).is_some() {
            return Err(IngestError::DuplicateId {
                id: id.as_str().to_owned(),
            });
        }
    }

    let mut apps: BTreeMap<AppId, BTreeSet<ApiId>> = BTreeMap::new();
    for (idx, line) in app_stream.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: AppRecord = serde_json::from_str(&line)
            .map_err(|e| malformed(CorpusFile::App, line_no, e.to_string()))?;
        let id = AppId::new(&record.app)
            .map_err(|e| malformed(CorpusFile::App, line_no, e.to_string()))?;
        if record.apis.is_empty() {
            return Err(malformed(
                CorpusFile::App,
                line_no,
                format!("app {id} references no APIs"),
            ));
        }
        let mut members = BTreeSet::new();
        for raw in &record.apis {
            let api =
                ApiId::new(raw).map_err(|e| malformed(CorpusFile::App, line_no, e.to_string()))?;
            let api = match apis.get_key_value(&api) {
                Some((existing, _)) => existing.clone(),
                None => {
                    return Err(IngestError::DanglingApiRef {
                        app: id.clone(),
                        api,
                    })
                }
            };
            members.insert(api);
        }
        if apps.insert(id.clone(), members).is_some() {
            return Err(IngestError::DuplicateId {
                id: id.as_str().to_owned(),
            });
        }
    }

    Ecosystem::new(apis, apps)
}

/// Writes an ecosystem back out in the corpus format, sorted so that
/// `parse_corpus` over the output reproduces the input exactly.
pub fn write_corpus(
    eco: &Ecosystem,
    mut api_writer: impl Write,
    mut app_writer: impl Write,
) -> io::Result<()> {
    for (api, tags) in eco.apis() {
        let tags: Vec<&str> = tags.iter().map(|k| k.as_str()).collect();
        let line = serde_json::json!({ "api": api.as_str(), "tags": tags });
        writeln!(api_writer, "{line}")?;
    }
    for (app, members) in eco.apps() {
        let members: Vec<&str> = members.iter().map(|a| a.as_str()).collect();
        let line = serde_json::json!({ "app": app.as_str(), "apis": members });
        writeln!(app_writer, "{line}")?;
    }
    Ok(())
}

/// The keyword set an app's constituent APIs collectively advertise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuerySet {
    pub app: AppId,
    pub keywords: BTreeSet<Keyword>,
    /// Apps whose combined tag set has exactly two keywords are kept out of
    /// evaluation runs.
    pub excluded_from_eval: bool,
}

/// For each app, the union of its constituent APIs' tags.
pub fn derive_query_sets(eco: &Ecosystem) -> Vec<QuerySet> {
    eco.apps()
        .iter()
        .map(|(app, members)| {
            let keywords: BTreeSet<Keyword> = members
                .iter()
                .flat_map(|api| {
                    eco.api_tags(api)
                        .expect("ecosystem invariant: app references cataloged APIs")
                        .iter()
                        .cloned()
                })
                .collect();
            QuerySet {
                app: app.clone(),
                excluded_from_eval: keywords.len() == 2,
                keywords,
            }
        })
        .collect()
}
