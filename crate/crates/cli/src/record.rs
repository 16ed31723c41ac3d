use std::collections::BTreeMap;
use std::io::Write;

use physarum_steiner::graph::Instance;
use serde::Serialize;

use crate::runner::{Algorithm, RunOutcome};

/// Percentage by which `length` exceeds `optimum`.
///
/// Not clamped: a negative value means the registry optimum is wrong.
pub fn error_percent(length: f64, optimum: f64) -> f64 {
    100.0 * (length - optimum) / optimum
}

/// One solver run. Field order is the CSV column order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub instance_name: String,
    pub vertices: usize,
    pub edges: usize,
    pub terminals: usize,
    pub algorithm: String,
    pub seed: u64,
    pub solution_length: f64,
    pub optimum: Option<f64>,
    pub error_percent: Option<f64>,
    pub fitness_evaluations: u64,
    pub realized_partitions: Option<usize>,
    /// Only filled when timing is requested, so rows stay reproducible.
    pub wall_milliseconds: Option<f64>,
}

impl RunRecord {
    pub fn new(instance: &Instance, algorithm: Algorithm, seed: u64, outcome: &RunOutcome, timing: bool) -> Self {
        let length = outcome.solution.total_length;
        Self {
            instance_name: instance.name.clone(),
            vertices: instance.graph.vertex_count(),
            edges: instance.graph.edge_count(),
            terminals: instance.terminals.len(),
            algorithm: algorithm.name().to_string(),
            seed,
            solution_length: length,
            optimum: instance.known_optimum,
            error_percent: instance.known_optimum.map(|opt| error_percent(length, opt)),
            fitness_evaluations: outcome.solution.fitness_evaluations,
            realized_partitions: outcome.realized_partitions,
            wall_milliseconds: timing.then(|| outcome.elapsed.as_secs_f64() * 1e3),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Aggregate {
    Median,
    Mean,
}

impl Aggregate {
    pub fn apply(self, values: &[f64]) -> Option<f64> {
        match self {
            Aggregate::Median => median(values),
            Aggregate::Mean => mean(values),
        }
    }
}

pub fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    Some(if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    })
}

/// Seeds of one (instance, algorithm) pair folded into a single row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateRecord {
    pub instance_name: String,
    pub vertices: usize,
    pub edges: usize,
    pub terminals: usize,
    pub algorithm: String,
    pub runs: usize,
    pub solution_length: f64,
    pub optimum: Option<f64>,
    pub error_percent: Option<f64>,
    pub fitness_evaluations: f64,
    pub realized_partitions: Option<f64>,
    pub wall_milliseconds: Option<f64>,
}

/// Groups records by (instance, algorithm), keeping first-seen order.
pub fn aggregate(records: &[RunRecord], how: Aggregate) -> Vec<AggregateRecord> {
    let mut order: Vec<(&str, &str)> = Vec::new();
    let mut groups: BTreeMap<(&str, &str), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        let key = (r.instance_name.as_str(), r.algorithm.as_str());
        groups
            .entry(key)
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let rows = &groups[&key];
            let first = rows[0];
            let pick = |f: &dyn Fn(&RunRecord) -> Option<f64>| {
                let values: Vec<f64> = rows.iter().filter_map(|r| f(r)).collect();
                how.apply(&values)
            };
            AggregateRecord {
                instance_name: first.instance_name.clone(),
                vertices: first.vertices,
                edges: first.edges,
                terminals: first.terminals,
                algorithm: first.algorithm.clone(),
                runs: rows.len(),
                solution_length: pick(&|r| Some(r.solution_length)).unwrap_or(f64::NAN),
                optimum: first.optimum,
                error_percent: pick(&|r| r.error_percent),
                fitness_evaluations: pick(&|r| Some(r.fitness_evaluations as f64)).unwrap_or(0.0),
                realized_partitions: pick(&|r| r.realized_partitions.map(|n| n as f64)),
                wall_milliseconds: pick(&|r| r.wall_milliseconds),
            }
        })
        .collect()
}

/// Mean error per algorithm: average over instances of the per-instance mean
/// over seeds. Instances without a known optimum are skipped.
pub fn mean_error_by_algorithm(records: &[RunRecord]) -> Vec<(String, Option<f64>)> {
    let per_instance = aggregate(records, Aggregate::Mean);
    let mut by_alg: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for row in &per_instance {
        let entry = by_alg.entry(row.algorithm.as_str()).or_default();
        if let Some(e) = row.error_percent {
            entry.push(e);
        }
    }
    by_alg
        .into_iter()
        .map(|(alg, errors)| (alg.to_string(), mean(&errors)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Writes rows as CSV with a header, or as one JSON object per line.
pub fn write_rows<W: Write, T: Serialize>(out: W, rows: &[T], format: Format) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(out);
            for row in rows {
                writer.serialize(row).map_err(std::io::Error::other)?;
            }
            writer.flush()
        }
        Format::Json => {
            let mut out = out;
            for row in rows {
                serde_json::to_writer(&mut out, row)?;
                out.write_all(b"\n")?;
            }
            out.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(instance: &str, alg: &str, seed: u64, length: f64, opt: Option<f64>) -> RunRecord {
        RunRecord {
            instance_name: instance.into(),
            vertices: 3,
            edges: 3,
            terminals: 2,
            algorithm: alg.into(),
            seed,
            solution_length: length,
            optimum: opt,
            error_percent: opt.map(|o| error_percent(length, o)),
            fitness_evaluations: seed * 10,
            realized_partitions: None,
            wall_milliseconds: None,
        }
    }

    #[test]
    fn error_is_relative_excess() {
        assert_eq!(error_percent(110.0, 100.0), 10.0);
        assert_eq!(error_percent(82.0, 82.0), 0.0);
        assert!(error_percent(81.0, 82.0) < 0.0);
    }

    #[test]
    fn median_and_mean() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(mean(&[1.0, 2.0, 6.0]), Some(3.0));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn mean_error_averages_instances_first() {
        let rows = vec![
            record("a", "sph", 0, 110.0, Some(100.0)),
            record("a", "sph", 1, 100.0, Some(100.0)),
            record("b", "sph", 0, 40.0, Some(40.0)),
            record("c", "sph", 0, 5.0, None),
        ];
        let summary = mean_error_by_algorithm(&rows);
        assert_eq!(summary, vec![("sph".to_string(), Some(2.5))]);
    }

    #[test]
    fn aggregate_keeps_first_seen_order() {
        let rows = vec![
            record("b", "sph", 0, 4.0, None),
            record("a", "sph", 0, 2.0, None),
            record("b", "sph", 1, 6.0, None),
        ];
        let agg = aggregate(&rows, Aggregate::Median);
        assert_eq!(agg.len(), 2);
        assert_eq!(agg[0].instance_name, "b");
        assert_eq!(agg[0].solution_length, 5.0);
        assert_eq!(agg[0].runs, 2);
    }

    #[test]
    fn csv_columns_in_record_order() {
        let mut buf = Vec::new();
        write_rows(&mut buf, &[record("a", "sph", 1, 2.0, Some(2.0))], Format::Csv).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let header = text.lines().next().unwrap();
        assert_eq!(
            header,
            "instance_name,vertices,edges,terminals,algorithm,seed,solution_length,optimum,\
             error_percent,fitness_evaluations,realized_partitions,wall_milliseconds"
        );
        assert_eq!(text.lines().nth(1).unwrap(), "a,3,3,2,sph,1,2.0,2.0,0.0,10,,");
    }
}
