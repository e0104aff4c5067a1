//! Per-sequence classification and aggregate tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assemblage::{enumerate_assemblages, parse_assemblage, Assemblage, AssemblageError, MetricReport};
use crate::linking::{link_report, EmbeddingParams, LinkReport, LinkingError};
use crate::sequence::{enumerate_canonical, Sequence, SequenceError};

/// Largest tile count for which `table` runs the full linking sweep.
pub const MAX_TABLE_TILES: usize = 12;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Assemblage(#[from] AssemblageError),
    #[error("{asm}: {source}")]
    Linking { asm: String, source: LinkingError },
    #[error("{0} is not a canonical representative")]
    NotCanonical(String),
    #[error("linking sweep limited to n <= {MAX_TABLE_TILES}, got {0}")]
    TooLarge(usize),
    #[error("curated data: {0}")]
    Curated(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    MetricNonzero,
    LinkingNonzero,
    Candidate,
    KnownConstructible,
}

impl Verdict {
    pub fn is_excluded(self) -> bool {
        matches!(self, Verdict::MetricNonzero | Verdict::LinkingNonzero)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::MetricNonzero => "metric-nonzero",
            Verdict::LinkingNonzero => "linking-nonzero",
            Verdict::Candidate => "candidate",
            Verdict::KnownConstructible => "known-constructible",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssemblageRecord {
    pub assemblage: String,
    pub metric: MetricReport,
    /// Present only when Δ = 0.
    pub link: Option<LinkReport>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceRecord {
    pub sequence: String,
    pub flap_count: usize,
    pub area: usize,
    pub delta_c: i32,
    pub symcount: usize,
    pub assemblage_count: usize,
    pub delta_zero_count: usize,
    pub assemblages: Vec<AssemblageRecord>,
}

impl SequenceRecord {
    pub fn delta_zero(&self) -> impl Iterator<Item = &AssemblageRecord> {
        self.assemblages.iter().filter(|a| a.metric.delta == 0)
    }

    pub fn count(&self, v: Verdict) -> usize {
        self.assemblages.iter().filter(|a| a.verdict == v).count()
    }
}

#[derive(Deserialize)]
struct CuratedFile {
    entries: Vec<CuratedEntry>,
}

#[derive(Deserialize)]
struct CuratedEntry {
    sequence: String,
    assemblage: String,
}

/// Assemblages shown to be reachable by hand, in the printed form of their
/// class representative.
#[derive(Debug, Clone, Default)]
pub struct CuratedSet {
    reps: BTreeSet<String>,
}

const CURATED_JSON: &str = include_str!("../data/constructible.json");

impl CuratedSet {
    pub fn builtin() -> CuratedSet {
        CuratedSet::from_json(CURATED_JSON).expect("bundled constructible data is valid")
    }

    /// Every entry must name an admissible assemblage of its (canonical) sequence.
    pub fn from_json(text: &str) -> Result<CuratedSet, ClassifyError> {
        let file: CuratedFile =
            serde_json::from_str(text).map_err(|e| ClassifyError::Curated(e.to_string()))?;
        let mut reps = BTreeSet::new();
        for e in file.entries {
            let asm = parse_assemblage(&e.assemblage)?;
            if asm.sequence().to_string() != e.sequence {
                return Err(ClassifyError::Curated(format!(
                    "{} does not spell {}",
                    e.assemblage, e.sequence
                )));
            }
            if !asm.sequence().is_canonical() {
                return Err(ClassifyError::NotCanonical(e.sequence));
            }
            if !asm.is_admissible() {
                return Err(ClassifyError::Curated(format!("{} is not admissible", e.assemblage)));
            }
            reps.insert(asm.canonical().to_string());
        }
        Ok(CuratedSet { reps })
    }

    pub fn contains(&self, asm: &Assemblage) -> bool {
        self.reps.contains(&asm.canonical().to_string())
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.reps.iter().map(String::as_str)
    }
}

/// Full record of a canonical sequence. L is computed for Δ = 0 assemblages only.
pub fn classify(
    seq: &Sequence,
    params: &EmbeddingParams,
    curated: &CuratedSet,
) -> Result<SequenceRecord, ClassifyError> {
    if !seq.is_canonical() {
        return Err(ClassifyError::NotCanonical(seq.to_string()));
    }
    let asms = enumerate_assemblages(seq);
    let assemblages = asms
        .iter()
        .map(|a| {
            let metric = a.metric_invariant();
            if metric.delta != 0 {
                return Ok(AssemblageRecord {
                    assemblage: a.to_string(),
                    metric,
                    link: None,
                    verdict: Verdict::MetricNonzero,
                });
            }
            let link = link_report(a, params)
                .map_err(|source| ClassifyError::Linking { asm: a.to_string(), source })?;
            let verdict = if link.l != 0 {
                Verdict::LinkingNonzero
            } else if curated.contains(a) {
                Verdict::KnownConstructible
            } else {
                Verdict::Candidate
            };
            Ok(AssemblageRecord { assemblage: a.to_string(), metric, link: Some(link), verdict })
        })
        .collect::<Result<Vec<_>, ClassifyError>>()?;
    Ok(SequenceRecord {
        sequence: seq.to_string(),
        flap_count: seq.flap_count(),
        area: seq.area(),
        delta_c: seq.delta_c(),
        symcount: seq.symmetry_group().len(),
        assemblage_count: asms.len(),
        delta_zero_count: assemblages.iter().filter(|a| a.metric.delta == 0).count(),
        assemblages,
    })
}

/// Records for every canonical sequence of `n` tiles, in lexicographic order.
pub fn classify_all(
    n: usize,
    params: &EmbeddingParams,
    curated: &CuratedSet,
) -> Result<Vec<SequenceRecord>, ClassifyError> {
    if n > MAX_TABLE_TILES {
        return Err(ClassifyError::TooLarge(n));
    }
    enumerate_canonical(n)?
        .par_iter()
        .map(|s| classify(s, params, curated))
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub flaps: usize,
    pub sequences: usize,
    pub assemblages: usize,
    pub delta_zero: usize,
    pub linking_nonzero: usize,
    pub candidates: usize,
    pub known: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationTable {
    pub n: usize,
    /// One row per flap count `0..=n`, including empty ones.
    pub rows: Vec<TableRow>,
}

impl ClassificationTable {
    pub fn from_records(n: usize, records: &[SequenceRecord]) -> ClassificationTable {
        let mut by_flaps: BTreeMap<usize, TableRow> =
            (0..=n).map(|f| (f, TableRow { flaps: f, ..TableRow::default() })).collect();
        for r in records {
            let row = by_flaps.get_mut(&r.flap_count).expect("flap count at most n");
            row.sequences += 1;
            row.assemblages += r.assemblage_count;
            row.delta_zero += r.delta_zero_count;
            row.linking_nonzero += r.count(Verdict::LinkingNonzero);
            row.candidates += r.count(Verdict::Candidate);
            row.known += r.count(Verdict::KnownConstructible);
        }
        ClassificationTable { n, rows: by_flaps.into_values().collect() }
    }

    pub fn total(&self) -> TableRow {
        self.rows.iter().fold(TableRow::default(), |mut t, r| {
            t.sequences += r.sequences;
            t.assemblages += r.assemblages;
            t.delta_zero += r.delta_zero;
            t.linking_nonzero += r.linking_nonzero;
            t.candidates += r.candidates;
            t.known += r.known;
            t
        })
    }
}

pub fn table(n: usize, params: &EmbeddingParams) -> Result<ClassificationTable, ClassifyError> {
    let records = classify_all(n, params, &CuratedSet::builtin())?;
    Ok(ClassificationTable::from_records(n, &records))
}

impl fmt::Display for ClassificationTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "flaps sequences assemblages delta0 lnonzero candidate known")?;
        let line = |f: &mut fmt::Formatter<'_>, label: String, r: &TableRow| {
            writeln!(
                f,
                "{label:>5} {:>9} {:>11} {:>6} {:>8} {:>9} {:>5}",
                r.sequences, r.assemblages, r.delta_zero, r.linking_nonzero, r.candidates, r.known
            )
        };
        for r in self.rows.iter().filter(|r| r.sequences > 0) {
            line(f, r.flaps.to_string(), r)?;
        }
        line(f, "total".to_string(), &self.total())
    }
}

/// One JSON object per line, one line per sequence.
pub fn export_records(records: &[SequenceRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}
