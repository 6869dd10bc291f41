use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::report::{BatchReport, ParseFailure, RunRecord};
use crate::bfunc::{npn4_representatives, IncompleteFunction, TruthTable, MAX_VARS};
use crate::error::Result;
use crate::synth::{search_minimum, SynthesisConfig};

/// Term limit used when none is given: every `n`-input function has an ESOP
/// with at most `2^n` terms (one per minterm).
pub fn default_max_terms(num_vars: usize) -> usize {
    1 << num_vars
}

/// Runs `search_minimum` on every function in parallel; rows keep input order.
///
/// With `max_terms` unset, each function gets [`default_max_terms`].
pub fn run_batch(
    specs: &[IncompleteFunction],
    config: &SynthesisConfig,
    max_terms: Option<usize>,
) -> Result<BatchReport> {
    let rows = specs
        .par_iter()
        .map(|spec| {
            let mut cfg = config.clone();
            cfg.max_terms = max_terms.unwrap_or_else(|| default_max_terms(spec.num_vars()));
            let result = search_minimum(spec, &cfg)?;
            Ok(RunRecord::from_result(spec, cfg.strategy, &result, cfg.enumerate_all))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BatchReport {
        rows,
        parse_failures: Vec::new(),
    })
}

/// `count` incompletely-specified functions. Function `i` is drawn by
/// [`IncompleteFunction::random`] from the `i`-th 64-bit output of a ChaCha8
/// stream seeded with `seed`, so a batch is a prefix of any larger batch with
/// the same seed.
pub fn random_functions(num_vars: usize, count: usize, seed: u64) -> Result<Vec<IncompleteFunction>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| IncompleteFunction::random(num_vars, rng.next_u64()))
        .collect()
}

/// The 222 NPN representatives of 4-input functions, fully specified.
pub fn npn4_functions() -> Vec<IncompleteFunction> {
    npn4_representatives()
        .into_iter()
        .map(IncompleteFunction::fully_specified)
        .collect()
}

/// Parses `<hex> <n> [<care-hex>]` lines. Blank lines and `#` comments are
/// skipped; malformed lines are collected with their 1-based line number.
pub fn parse_function_list(text: &str) -> (Vec<IncompleteFunction>, Vec<ParseFailure>) {
    let mut specs = Vec::new();
    let mut failures = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match parse_function_line(line) {
            Ok(spec) => specs.push(spec),
            Err(message) => failures.push(ParseFailure { line: i + 1, message }),
        }
    }
    (specs, failures)
}

fn parse_function_line(line: &str) -> std::result::Result<IncompleteFunction, String> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    let (hex, n, care) = match fields.as_slice() {
        [hex, n] => (*hex, *n, None),
        [hex, n, care] => (*hex, *n, Some(*care)),
        _ => return Err("expected `<hex> <num_vars> [<care-hex>]`".to_string()),
    };
    let n: usize = n.parse().map_err(|_| format!("bad variable count {n:?}"))?;
    if n > MAX_VARS {
        return Err(format!("{n} variables exceeds the maximum of {MAX_VARS}"));
    }
    let value = TruthTable::parse_hex(hex, n).map_err(|e| e.to_string())?;
    let care = match care {
        Some(c) => TruthTable::parse_hex(c, n).map_err(|e| e.to_string())?,
        None => TruthTable::ones(n).map_err(|e| e.to_string())?,
    };
    IncompleteFunction::new(value, care).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::SearchStrategy;

    #[test]
    fn random_batches_are_prefix_stable() {
        let a = random_functions(5, 10, 7).unwrap();
        let b = random_functions(5, 4, 7).unwrap();
        assert_eq!(&a[..4], &b[..]);
        assert_ne!(random_functions(5, 4, 8).unwrap(), b);
    }

    #[test]
    fn function_list_parsing() {
        let text = "0x8 2\n\n# comment\n0xZZ 2\n0x6 2 extra\n0x1 99\n0x96 3 # parity\n0x6 2 0xE\n0x6 2 0x6 0x6\n";
        let (specs, failures) = parse_function_list(text);
        assert_eq!(specs.len(), 3);
        assert_eq!(specs[2].care_count(), 3);
        assert_eq!(failures.iter().map(|f| f.line).collect::<Vec<_>>(), vec![4, 5, 6, 9]);
    }

    #[test]
    fn batch_keeps_order_and_aggregates() {
        let specs = random_functions(4, 12, 3).unwrap();
        let report = run_batch(&specs, &SynthesisConfig::new(1), None).unwrap();
        assert_eq!(report.rows.len(), 12);
        for (spec, row) in specs.iter().zip(&report.rows) {
            assert_eq!(row.id, RunRecord::function_id(spec));
            assert!(row.realized);
            assert!(row.form.as_ref().unwrap().realizes(spec));
        }
        let agg = report.aggregates();
        assert_eq!(agg.realized + agg.limited, 12);
        assert_eq!(agg.histogram.values().sum::<usize>(), agg.realized);
    }

    #[test]
    fn limited_rows_are_counted() {
        let specs = vec![IncompleteFunction::fully_specified(
            TruthTable::from_u64(3, 0x96).unwrap(),
        )];
        let cfg = SynthesisConfig::new(1).with_strategy(SearchStrategy::Upward);
        let report = run_batch(&specs, &cfg, Some(2)).unwrap();
        let agg = report.aggregates();
        assert_eq!((agg.realized, agg.limited, agg.mean_k), (0, 1, None));
        assert!(report.csv_string().contains(",C,,not-proven,"));
    }

    #[test]
    fn reports_without_timing_are_deterministic() {
        let specs = random_functions(4, 6, 11).unwrap();
        let strip = |r: BatchReport| {
            r.rows
                .into_iter()
                .map(|mut row| {
                    row.elapsed_ms = 0.0;
                    format!("{row:?}")
                })
                .collect::<Vec<_>>()
        };
        let a = run_batch(&specs, &SynthesisConfig::new(1), None).unwrap();
        let b = run_batch(&specs, &SynthesisConfig::new(1), None).unwrap();
        assert_eq!(strip(a), strip(b));
    }
}
