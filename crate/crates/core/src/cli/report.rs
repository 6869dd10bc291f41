use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::bfunc::IncompleteFunction;
use crate::error::Result;
use crate::esop::EsopForm;
use crate::synth::{Minimality, SearchStrategy, SynthesisResult, SynthesisStatus};

/// One benchmark row.
#[derive(Clone, Debug)]
pub struct RunRecord {
    /// Value table in hex, followed by `/<care>` when the care set is partial.
    pub id: String,
    pub num_vars: usize,
    pub strategy: SearchStrategy,
    /// `true` for R (realized), `false` for C (limit or budget exhausted).
    pub realized: bool,
    pub size_found: Option<usize>,
    pub minimality: Minimality,
    pub solver_calls: u64,
    pub conflicts: u64,
    pub elapsed_ms: f64,
    /// Realized form, re-verified by simulation when the row was built.
    pub form: Option<EsopForm>,
    /// Number of distinct minimum forms, when enumeration was requested.
    pub minimum_forms: Option<usize>,
}

impl RunRecord {
    pub fn function_id(spec: &IncompleteFunction) -> String {
        if spec.care().count_ones() == spec.care().num_bits() {
            spec.value().to_hex()
        } else {
            format!("{}/{}", spec.value().to_hex(), spec.care().to_hex())
        }
    }

    /// Builds a row from a search result, re-checking the reported forms.
    /// `enumerated` says whether the search was asked for every minimum form.
    ///
    /// # Panics
    ///
    /// Panics if a reported form does not realize `spec`; the synthesis
    /// engines guarantee that it does.
    pub fn from_result(
        spec: &IncompleteFunction,
        strategy: SearchStrategy,
        result: &SynthesisResult,
        enumerated: bool,
    ) -> Self {
        let realized = result.status == SynthesisStatus::Realized;
        for f in &result.forms {
            assert!(
                f.realizes(spec),
                "synthesized form fails verification for {}",
                Self::function_id(spec)
            );
        }
        RunRecord {
            id: Self::function_id(spec),
            num_vars: spec.num_vars(),
            strategy,
            realized,
            size_found: result.size_found,
            minimality: result.minimality,
            solver_calls: result.stats.solver_calls,
            conflicts: result.stats.conflicts_total,
            elapsed_ms: result.stats.elapsed.as_secs_f64() * 1e3,
            form: result.form().cloned(),
            minimum_forms: (enumerated && realized && result.minimality == Minimality::Proven)
                .then_some(result.forms.len()),
        }
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    id: &'a str,
    vars: usize,
    strategy: String,
    status: &'static str,
    k: Option<usize>,
    minimality: String,
    solver_calls: u64,
    conflicts: u64,
    ms: String,
}

/// A malformed input line skipped by a batch run.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ParseFailure {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, Default)]
pub struct BatchReport {
    pub rows: Vec<RunRecord>,
    pub parse_failures: Vec<ParseFailure>,
}

/// Summary values derived from the rows.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Aggregates {
    #[serde(rename = "R")]
    pub realized: usize,
    #[serde(rename = "C")]
    pub limited: usize,
    /// Mean size over realized rows.
    pub mean_k: Option<f64>,
    pub total_ms: f64,
    /// Realized rows per size.
    pub histogram: BTreeMap<usize, usize>,
}

#[derive(Serialize)]
struct JsonBlock<'a> {
    rows: usize,
    #[serde(flatten)]
    aggregates: Aggregates,
    #[serde(skip_serializing_if = "Option::is_none")]
    minimum_forms: Option<MinimumForms<'a>>,
    parse_failures: &'a [ParseFailure],
    forms: Vec<FormEntry<'a>>,
}

#[derive(Serialize)]
struct FormEntry<'a> {
    row: usize,
    id: &'a str,
    esop: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    minimum_forms: Option<usize>,
}

#[derive(Serialize)]
struct MinimumForms<'a> {
    total: usize,
    mean: f64,
    max: usize,
    max_id: &'a str,
}

impl BatchReport {
    pub fn aggregates(&self) -> Aggregates {
        let realized: Vec<&RunRecord> = self.rows.iter().filter(|r| r.realized).collect();
        let mut histogram = BTreeMap::new();
        for r in &realized {
            *histogram.entry(r.size_found.unwrap_or(0)).or_insert(0) += 1;
        }
        let size_sum: usize = realized.iter().filter_map(|r| r.size_found).sum();
        Aggregates {
            realized: realized.len(),
            limited: self.rows.len() - realized.len(),
            mean_k: (!realized.is_empty()).then(|| size_sum as f64 / realized.len() as f64),
            total_ms: self.rows.iter().map(|r| r.elapsed_ms).sum(),
            histogram,
        }
    }

    pub fn write_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        for r in &self.rows {
            w.serialize(CsvRow {
                id: &r.id,
                vars: r.num_vars,
                strategy: r.strategy.to_string(),
                status: if r.realized { "R" } else { "C" },
                k: r.size_found,
                minimality: r.minimality.to_string(),
                solver_calls: r.solver_calls,
                conflicts: r.conflicts,
                ms: format!("{:.3}", r.elapsed_ms),
            })
            .map_err(csv_error)?;
        }
        // An empty report still gets its header row.
        if self.rows.is_empty() {
            w.write_record([
                "id",
                "vars",
                "strategy",
                "status",
                "k",
                "minimality",
                "solver_calls",
                "conflicts",
                "ms",
            ])
            .map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }

    /// The aggregate block as pretty-printed JSON, including every realized
    /// form (word notation) and, when enumeration ran, minimum-form counts.
    pub fn json_string(&self) -> String {
        let counts: Vec<(&str, usize)> = self
            .rows
            .iter()
            .filter_map(|r| r.minimum_forms.map(|c| (r.id.as_str(), c)))
            .collect();
        let complete = self.rows.iter().all(|r| !r.realized || r.minimum_forms.is_some());
        let minimum_forms = (!counts.is_empty() && complete).then(|| {
            let total = counts.iter().map(|c| c.1).sum();
            // First row wins ties.
            let (max_id, max) = counts
                .iter()
                .fold(counts[0], |best, &c| if c.1 > best.1 { c } else { best });
            MinimumForms {
                total,
                mean: total as f64 / counts.len() as f64,
                max,
                max_id,
            }
        });
        let block = JsonBlock {
            rows: self.rows.len(),
            aggregates: self.aggregates(),
            minimum_forms,
            parse_failures: &self.parse_failures,
            forms: self
                .rows
                .iter()
                .enumerate()
                .filter_map(|(row, r)| {
                    r.form.as_ref().map(|f| FormEntry {
                        row,
                        id: &r.id,
                        esop: f.print_words(),
                        minimum_forms: r.minimum_forms,
                    })
                })
                .collect(),
        };
        serde_json::to_string_pretty(&block).expect("report serializes")
    }

    /// Writes the CSV to `path` and the JSON block next to it
    /// (same name, `.json` extension). Returns the JSON path.
    pub fn write_files(&self, path: &Path) -> Result<PathBuf> {
        self.write_csv(std::fs::File::create(path)?)?;
        let json_path = path.with_extension("json");
        std::fs::write(&json_path, self.json_string() + "\n")?;
        Ok(json_path)
    }
}

fn csv_error(e: csv::Error) -> crate::error::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => io.into(),
        other => std::io::Error::other(format!("{other:?}")).into(),
    }
}
