//! Batch commuting-probability surveys over group catalogs.
//!
//! A catalog is line-delimited JSON, one group per line:
//!
//! ```text
//! {"name":"C2","source":"cayley","table":[[0,1],[1,0]]}
//! {"name":"D4","source":"permutations","degree":4,"gens":["(1 2 3 4)","(1 3)"]}
//! {"name":"D7","source":"family","family":"dihedral","params":[7],"expected_pr":"5/14"}
//! ```
//!
//! Entries are parsed eagerly and built lazily. A survey computes each
//! group's report (through an optional on-disk cache), keeps every row in
//! input order, and collects the distinct values into a sorted spectrum.
//! Reports are identical whatever the thread count.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use parking_lot::Mutex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::{center, AlgebraError, GroupTable, Permutation, DEFAULT_ORDER_CAP};
use crate::commprob::{check_bounds, BoundContext, PrReport};
use crate::constructions::{corpus_specs, make, ConstructionError, FamilySpec};
use crate::exec::{self, Execution};
use crate::rational::Rational;

pub const CACHE_ENV: &str = "COMMPROB_CACHE_DIR";
const CACHE_MAGIC: &[u8; 4] = b"PRC1";
const CACHE_VERSION: u16 = 1;

#[derive(Debug, thiserror::Error)]
pub enum SurveyError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("entry {name:?}: {cause}")]
    Validation { name: String, cause: ValidationCause },
    #[error("invalid interval: {0}")]
    Interval(String),
    #[error("invalid filter: {0}")]
    Filter(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidationCause {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
}

// ---------------------------------------------------------------------------
// Catalog entries

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum Payload {
    Cayley {
        table: Vec<Vec<usize>>,
    },
    /// 1-based cycle notation.
    Permutations {
        degree: usize,
        gens: Vec<String>,
    },
    Family(FamilySpec),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    #[serde(flatten)]
    pub payload: Payload,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_pr: Option<Rational>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<String>,
}

/// A built entry: the table plus the family metadata, if any.
pub struct BuiltEntry {
    pub table: GroupTable,
    pub spec: Option<FamilySpec>,
}

impl CatalogEntry {
    pub fn from_family(spec: FamilySpec) -> Self {
        CatalogEntry { name: spec.label(), payload: Payload::Family(spec), expected_pr: None, tags: vec![] }
    }

    pub fn source(&self) -> &'static str {
        match self.payload {
            Payload::Cayley { .. } => "cayley",
            Payload::Permutations { .. } => "permutations",
            Payload::Family(_) => "family",
        }
    }

    pub fn build(&self) -> Result<BuiltEntry, SurveyError> {
        let fail = |cause: ValidationCause| SurveyError::Validation { name: self.name.clone(), cause };
        let (table, spec) = match &self.payload {
            Payload::Cayley { table } => (GroupTable::from_cayley(table).map_err(|e| fail(e.into()))?, None),
            Payload::Permutations { degree, gens } => {
                let gens = gens
                    .iter()
                    .map(|g| Permutation::parse_cycles(*degree, g))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| fail(e.into()))?;
                let t = GroupTable::from_permutations_capped(*degree, &gens, DEFAULT_ORDER_CAP)
                    .map_err(|e| fail(e.into()))?;
                (t, None)
            }
            Payload::Family(spec) => {
                let (t, s) = make(spec).map_err(|e| fail(e.into()))?;
                (t, Some(s))
            }
        };
        Ok(BuiltEntry { table: table.named(self.name.clone()), spec })
    }
}

/// Parses catalog text without building any group.
pub fn parse_catalog(text: &str) -> Result<Vec<CatalogEntry>, SurveyError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| SurveyError::Parse { line: i + 1, message: e.to_string() }))
        .collect()
}

/// Reads a catalog file. Groups are built later, on demand.
pub fn ingest(path: &Path) -> Result<Vec<CatalogEntry>, SurveyError> {
    parse_catalog(&fs::read_to_string(path)?)
}

/// Like [`ingest`] but builds every entry, failing on the first invalid one.
pub fn ingest_strict(path: &Path) -> Result<Vec<CatalogEntry>, SurveyError> {
    let entries = ingest(path)?;
    for e in &entries {
        e.build()?;
    }
    Ok(entries)
}

/// The built-in corpus as catalog entries.
pub fn corpus_entries(max_order: u64) -> Vec<CatalogEntry> {
    corpus_specs(max_order).into_iter().map(CatalogEntry::from_family).collect()
}

// ---------------------------------------------------------------------------
// Filters

/// Row predicate. Text form: comma-separated terms such as
/// `order<=64`, `p-group`, `p-group:7`, `odd-order`, `center-index<=8`,
/// `abelian`, `nonabelian`, `tag:NAME`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Filter {
    MaxOrder(u64),
    /// Nontrivial prime-power order, optionally for a fixed prime.
    PGroup(Option<u64>),
    OddOrder,
    /// `(G : Z(G)) ≤ n`.
    CenterIndexAtMost(u64),
    Abelian,
    Nonabelian,
    Tag(String),
    All(Vec<Filter>),
}

impl Filter {
    pub fn matches(&self, row: &SurveyRow) -> bool {
        let Some(f) = &row.facts else { return false };
        match self {
            Filter::MaxOrder(n) => f.order <= *n,
            Filter::PGroup(p) => match crate::commprob::prime_power(f.order) {
                Some((q, _)) => p.is_none_or(|p| p == q),
                None => false,
            },
            Filter::OddOrder => f.order % 2 == 1,
            Filter::CenterIndexAtMost(n) => f.order / f.center_order <= *n,
            Filter::Abelian => f.abelian,
            Filter::Nonabelian => !f.abelian,
            Filter::Tag(t) => row.tags.iter().any(|x| x == t),
            Filter::All(fs) => fs.iter().all(|x| x.matches(row)),
        }
    }
}

impl FromStr for Filter {
    type Err = SurveyError;

    fn from_str(s: &str) -> Result<Self, SurveyError> {
        let bad = || SurveyError::Filter(s.to_string());
        let terms: Vec<&str> = s.split(',').map(str::trim).filter(|t| !t.is_empty()).collect();
        if terms.len() != 1 {
            if terms.is_empty() {
                return Err(bad());
            }
            return Ok(Filter::All(terms.iter().map(|t| t.parse()).collect::<Result<_, _>>()?));
        }
        let t = terms[0];
        let num = |v: &str| v.trim().parse::<u64>().map_err(|_| bad());
        Ok(match t {
            "p-group" => Filter::PGroup(None),
            "odd-order" => Filter::OddOrder,
            "abelian" => Filter::Abelian,
            "nonabelian" => Filter::Nonabelian,
            _ => {
                if let Some(v) = t.strip_prefix("order<=") {
                    Filter::MaxOrder(num(v)?)
                } else if let Some(v) = t.strip_prefix("center-index<=") {
                    Filter::CenterIndexAtMost(num(v)?)
                } else if let Some(v) = t.strip_prefix("p-group:") {
                    Filter::PGroup(Some(num(v)?))
                } else if let Some(v) = t.strip_prefix("tag:") {
                    Filter::Tag(v.to_string())
                } else {
                    return Err(bad());
                }
            }
        })
    }
}

impl fmt::Display for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Filter::MaxOrder(n) => write!(f, "order<={n}"),
            Filter::PGroup(None) => f.write_str("p-group"),
            Filter::PGroup(Some(p)) => write!(f, "p-group:{p}"),
            Filter::OddOrder => f.write_str("odd-order"),
            Filter::CenterIndexAtMost(n) => write!(f, "center-index<={n}"),
            Filter::Abelian => f.write_str("abelian"),
            Filter::Nonabelian => f.write_str("nonabelian"),
            Filter::Tag(t) => write!(f, "tag:{t}"),
            Filter::All(fs) => {
                let parts: Vec<String> = fs.iter().map(ToString::to_string).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Cache

/// On-disk store of [`PrReport`]s keyed by a hash of the canonical table.
///
/// File layout: `PRC1`, version (u16 LE), body length (u32 LE), JSON body.
/// Unreadable or mismatched entries are treated as misses.
pub struct PrCache {
    dir: PathBuf,
    write_lock: Mutex<()>,
    hits: AtomicU64,
    misses: AtomicU64,
    discarded: AtomicU64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
    /// Corrupt or version-mismatched files that were ignored.
    pub discarded: u64,
}

impl PrCache {
    pub fn open(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(PrCache {
            dir,
            write_lock: Mutex::new(()),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
            discarded: AtomicU64::new(0),
        })
    }

    /// The cache named by an explicit directory, else by `COMMPROB_CACHE_DIR`.
    pub fn resolve(flag: Option<&Path>) -> io::Result<Option<Self>> {
        match flag.map(Path::to_path_buf).or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from)) {
            Some(dir) => Self::open(dir).map(Some),
            None => Ok(None),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// SHA-256 of the row-major table as little-endian u32s, then `context`.
    pub fn key(g: &GroupTable, context: &str) -> String {
        let mut h = Sha256::new();
        h.update((g.order() as u64).to_le_bytes());
        for &x in g.table() {
            h.update(x.to_le_bytes());
        }
        h.update(context.as_bytes());
        hex::encode(h.finalize())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.prc"))
    }

    pub fn store(&self, key: &str, report: &PrReport) -> io::Result<()> {
        let body = serde_json::to_vec(report).map_err(io::Error::other)?;
        let mut buf = Vec::with_capacity(body.len() + 10);
        buf.extend_from_slice(CACHE_MAGIC);
        buf.extend_from_slice(&CACHE_VERSION.to_le_bytes());
        buf.extend_from_slice(&(body.len() as u32).to_le_bytes());
        buf.extend_from_slice(&body);

        let _guard = self.write_lock.lock();
        let tmp = self.dir.join(format!("{key}.tmp"));
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&buf)?;
        f.sync_all()?;
        fs::rename(tmp, self.path(key))
    }

    pub fn load(&self, key: &str) -> io::Result<Option<PrReport>> {
        let bytes = match fs::read(self.path(key)) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                self.misses.fetch_add(1, Ordering::Relaxed);
                return Ok(None);
            }
            Err(e) => return Err(e),
        };
        match decode(&bytes) {
            Ok(r) => {
                self.hits.fetch_add(1, Ordering::Relaxed);
                Ok(Some(r))
            }
            Err(why) => {
                log::warn!("discarding cache entry {key}: {why}; recomputing");
                self.discarded.fetch_add(1, Ordering::Relaxed);
                self.misses.fetch_add(1, Ordering::Relaxed);
                Ok(None)
            }
        }
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            discarded: self.discarded.load(Ordering::Relaxed),
        }
    }
}

fn decode(bytes: &[u8]) -> Result<PrReport, String> {
    if bytes.len() < 10 || &bytes[..4] != CACHE_MAGIC {
        return Err("bad header".into());
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != CACHE_VERSION {
        return Err(format!("version {version}"));
    }
    let len = u32::from_le_bytes(bytes[6..10].try_into().unwrap()) as usize;
    let body = &bytes[10..];
    if body.len() != len {
        return Err(format!("body is {} bytes, header says {len}", body.len()));
    }
    serde_json::from_slice(body).map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// Survey

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum RowStatus {
    Ok,
    Failed,
}

/// Structural facts used by filters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowFacts {
    pub order: u64,
    pub k: u64,
    pub pr: Rational,
    pub abelian: bool,
    pub center_order: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyRow {
    pub name: String,
    pub source: String,
    /// Absent when the group could not be built.
    pub facts: Option<RowFacts>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<String>,
    pub status: RowStatus,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub problems: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub pr: Rational,
    pub witnesses: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SurveyStats {
    pub elapsed_ms: u128,
    pub cache: CacheStats,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyReport {
    pub filter: Option<String>,
    /// Number of groups with a computed value that pass the filter.
    pub universe: usize,
    pub rows: Vec<SurveyRow>,
    /// Strictly increasing.
    pub spectrum: Vec<SpectrumPoint>,
    #[serde(skip)]
    pub stats: SurveyStats,
}

impl SurveyReport {
    pub const CSV_HEADER: &'static str = "name,order,k,pr,status";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let (o, k, p) = match &r.facts {
                Some(f) => (f.order.to_string(), f.k.to_string(), f.pr.to_string()),
                None => Default::default(),
            };
            let status = if r.status == RowStatus::Ok { "OK" } else { "FAILED" };
            out.push_str(&format!("{},{o},{k},{p},{status}\n", crate::commprob::csv_field(&r.name)));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn failed(&self) -> impl Iterator<Item = &SurveyRow> {
        self.rows.iter().filter(|r| r.status == RowStatus::Failed)
    }
}

#[derive(Clone, Copy, Default)]
pub struct SurveyOptions<'a> {
    pub exec: Execution,
    /// Worker threads; 0 uses the global pool.
    pub jobs: usize,
    pub cache: Option<&'a PrCache>,
    /// Also evaluate the Fitting-subgroup bound (enumerates subgroups).
    pub full_bounds: bool,
}

fn survey_row(entry: &CatalogEntry, opts: &SurveyOptions<'_>) -> SurveyRow {
    let mut row = SurveyRow {
        name: entry.name.clone(),
        source: entry.source().to_string(),
        facts: None,
        tags: entry.tags.clone(),
        status: RowStatus::Ok,
        problems: vec![],
    };
    let built = match entry.build() {
        Ok(b) => b,
        Err(e) => {
            row.status = RowStatus::Failed;
            row.problems.push(e.to_string());
            return row;
        }
    };
    let g = &built.table;
    let ctx = BoundContext {
        min_degree: built.spec.as_ref().and_then(|s| s.expected_d),
        skip_fitting: !opts.full_bounds,
        ..Default::default()
    };
    let report = cached_report(g, &ctx, opts.cache);

    let z = center(g);
    row.facts = Some(RowFacts {
        order: report.order,
        k: report.k,
        pr: report.pr.clone(),
        abelian: g.is_abelian(),
        center_order: z.order() as u64,
    });
    let expectations =
        [("catalog", entry.expected_pr.as_ref()), ("family", built.spec.as_ref().and_then(|s| s.expected_pr.as_ref()))];
    for (what, v) in expectations {
        if let Some(v) = v {
            if *v != report.pr {
                row.problems.push(format!("{what} expects {v}, computed {}", report.pr));
            }
        }
    }
    for b in report.violations() {
        row.problems.push(format!("bound {} violated", b.id));
    }
    if !row.problems.is_empty() {
        row.status = RowStatus::Failed;
    }
    row
}

fn cached_report(g: &GroupTable, ctx: &BoundContext, cache: Option<&PrCache>) -> PrReport {
    let Some(cache) = cache else {
        return check_bounds(g, ctx);
    };
    let key = PrCache::key(g, &format!("d={:?};fitting={}", ctx.min_degree, !ctx.skip_fitting));
    match cache.load(&key) {
        Ok(Some(r)) => return r,
        Ok(None) => {}
        Err(e) => log::warn!("cache read failed for {key}: {e}"),
    }
    let r = check_bounds(g, ctx);
    if let Err(e) = cache.store(&key, &r) {
        log::warn!("cache write failed for {key}: {e}");
    }
    r
}

/// Computes every entry and aggregates the spectrum of rows passing `filter`.
///
/// Rows that fail to build, disagree with an expected value, or violate a
/// bound are kept and marked `FAILED`.
pub fn survey(entries: &[CatalogEntry], filter: Option<&Filter>, opts: &SurveyOptions<'_>) -> SurveyReport {
    let start = Instant::now();
    let before = opts.cache.map(PrCache::stats).unwrap_or_default();
    let rows = exec::with_jobs(opts.jobs, || exec::map_ordered(opts.exec, entries, |e| survey_row(e, opts)));
    let rows: Vec<SurveyRow> =
        rows.into_iter().filter(|r| r.facts.is_none() || filter.is_none_or(|f| f.matches(r))).collect();

    let mut spectrum: BTreeMap<Rational, Vec<String>> = BTreeMap::new();
    for r in &rows {
        if let Some(f) = &r.facts {
            spectrum.entry(f.pr.clone()).or_default().push(r.name.clone());
        }
    }
    let universe = rows.iter().filter(|r| r.facts.is_some()).count();
    let after = opts.cache.map(PrCache::stats).unwrap_or_default();
    let stats = SurveyStats {
        elapsed_ms: start.elapsed().as_millis(),
        cache: CacheStats {
            hits: after.hits - before.hits,
            misses: after.misses - before.misses,
            discarded: after.discarded - before.discarded,
        },
        failed: rows.iter().filter(|r| r.status == RowStatus::Failed).count(),
    };
    SurveyReport {
        filter: filter.map(ToString::to_string),
        universe,
        rows,
        spectrum: spectrum.into_iter().map(|(pr, witnesses)| SpectrumPoint { pr, witnesses }).collect(),
        stats,
    }
}

// ---------------------------------------------------------------------------
// Interval scans

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational, lo_closed: bool, hi_closed: bool) -> Result<Self, SurveyError> {
        if lo >= hi {
            return Err(SurveyError::Interval(format!("{lo} is not below {hi}")));
        }
        Ok(Interval { lo, hi, lo_closed, hi_closed })
    }

    pub fn open(lo: Rational, hi: Rational) -> Result<Self, SurveyError> {
        Self::new(lo, hi, false, false)
    }

    pub fn closed(lo: Rational, hi: Rational) -> Result<Self, SurveyError> {
        Self::new(lo, hi, true, true)
    }

    /// Parses `lo..hi` (open unless flags say otherwise).
    pub fn parse(text: &str, lo_closed: bool, hi_closed: bool) -> Result<Self, SurveyError> {
        let (a, b) =
            text.split_once("..").ok_or_else(|| SurveyError::Interval(format!("expected lo..hi, got {text:?}")))?;
        let parse = |s: &str| s.trim().parse::<Rational>().map_err(|e| SurveyError::Interval(e.to_string()));
        Self::new(parse(a)?, parse(b)?, lo_closed, hi_closed)
    }

    pub fn contains(&self, v: &Rational) -> bool {
        let above = if self.lo_closed { v >= &self.lo } else { v > &self.lo };
        let below = if self.hi_closed { v <= &self.hi } else { v < &self.hi };
        above && below
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Empty,
    Violated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureFinding {
    pub interval: Interval,
    pub filter: Option<String>,
    /// Groups considered: rows with a value passing both filters.
    pub universe: usize,
    pub violations: Vec<SpectrumPoint>,
    pub verdict: Verdict,
}

impl ConjectureFinding {
    /// `EMPTY (universe: N groups)` or `VIOLATED (k values; universe: N groups)`.
    pub fn summary(&self) -> String {
        match self.verdict {
            Verdict::Empty => format!("EMPTY (universe: {} groups)", self.universe),
            Verdict::Violated => {
                format!("VIOLATED ({} values; universe: {} groups)", self.violations.len(), self.universe)
            }
        }
    }
}

/// Lists every spectrum value inside `interval`, counting only rows that
/// pass `filter`. The report's own filter has already been applied.
pub fn scan_interval(report: &SurveyReport, interval: &Interval, filter: Option<&Filter>) -> ConjectureFinding {
    let mut hits: BTreeMap<Rational, Vec<String>> = BTreeMap::new();
    let mut universe = 0;
    for r in &report.rows {
        let Some(f) = &r.facts else { continue };
        if !filter.is_none_or(|x| x.matches(r)) {
            continue;
        }
        universe += 1;
        if interval.contains(&f.pr) {
            hits.entry(f.pr.clone()).or_default().push(r.name.clone());
        }
    }
    let violations: Vec<SpectrumPoint> =
        hits.into_iter().map(|(pr, witnesses)| SpectrumPoint { pr, witnesses }).collect();
    let filter = match (&report.filter, filter) {
        (Some(a), Some(b)) => Some(format!("{a},{b}")),
        (a, b) => a.clone().or_else(|| b.map(ToString::to_string)),
    };
    ConjectureFinding {
        interval: interval.clone(),
        filter,
        universe,
        verdict: if violations.is_empty() { Verdict::Empty } else { Verdict::Violated },
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn parse_entries() {
        let text = r#"
{"name":"C2","source":"cayley","table":[[0,1],[1,0]]}
{"name":"D4","source":"permutations","degree":4,"gens":["(1 2 3 4)","(1 3)"]}
{"name":"D7","source":"family","family":"dihedral","params":[7],"expected_pr":"5/14","tags":["odd"]}
"#;
        let es = parse_catalog(text).unwrap();
        assert_eq!(es.len(), 3);
        assert_eq!(es[1].build().unwrap().table.order(), 8);
        assert_eq!(es[2].expected_pr, Some(r(5, 14)));
        assert_eq!(es[2].tags, vec!["odd"]);
        let back: CatalogEntry = serde_json::from_str(&serde_json::to_string(&es[2]).unwrap()).unwrap();
        assert_eq!(back, es[2]);
    }

    #[test]
    fn parse_error_line() {
        let err = parse_catalog("\n{\"name\":\"x\"}\n").unwrap_err();
        assert!(matches!(err, SurveyError::Parse { line: 2, .. }));
    }

    #[test]
    fn filters_round_trip() {
        for s in ["order<=64", "p-group", "p-group:7", "odd-order", "center-index<=8", "abelian,tag:x"] {
            assert_eq!(s.parse::<Filter>().unwrap().to_string(), s);
        }
        assert!("bogus".parse::<Filter>().is_err());
    }

    #[test]
    fn interval_membership() {
        let open = Interval::open(r(7, 16), r(1, 2)).unwrap();
        assert!(!open.contains(&r(1, 2)));
        assert!(open.contains(&r(15, 32)));
        let closed = Interval::parse("7/16..1/2", true, true).unwrap();
        assert!(closed.contains(&r(1, 2)) && closed.contains(&r(7, 16)));
        assert_eq!(closed.to_string(), "[7/16, 1/2]");
        assert!(Interval::open(r(1, 2), r(1, 2)).is_err());
    }

    #[test]
    fn survey_small_corpus() {
        let rep = survey(&corpus_entries(8), None, &SurveyOptions::default());
        assert_eq!(rep.failed().count(), 0);
        let five_eighths = rep.spectrum.iter().find(|p| p.pr == r(5, 8)).unwrap();
        assert_eq!(five_eighths.witnesses, vec!["D4", "Dic2", "Ex2^3"]);
        let abel = survey(&corpus_entries(8), Some(&Filter::Abelian), &SurveyOptions::default());
        assert_eq!(abel.spectrum.len(), 1);
        assert_eq!(abel.spectrum[0].pr, Rational::one());
    }

    #[test]
    fn failed_rows_kept() {
        let es = parse_catalog(
            r#"{"name":"bad","source":"cayley","table":[[0,1],[0,1]]}
{"name":"wrong","source":"family","family":"cyclic","params":[3],"expected_pr":"1/2"}"#,
        )
        .unwrap();
        let rep = survey(&es, None, &SurveyOptions::default());
        assert_eq!(rep.rows.len(), 2);
        assert_eq!(rep.failed().count(), 2);
        assert!(rep.rows[0].facts.is_none());
        assert_eq!(rep.spectrum.len(), 1);
        assert!(rep.to_csv().contains("bad,,,,FAILED"));
    }

    #[test]
    fn scan_verdicts() {
        let rep = survey(&corpus_entries(16), None, &SurveyOptions::default());
        let f = scan_interval(&rep, &Interval::open(r(7, 16), r(1, 2)).unwrap(), None);
        assert_eq!(f.verdict, Verdict::Empty);
        assert_eq!(f.summary(), format!("EMPTY (universe: {} groups)", rep.universe));
        let g = scan_interval(&rep, &Interval::closed(r(1, 2), r(5, 8)).unwrap(), None);
        assert_eq!(g.verdict, Verdict::Violated);
    }
}
