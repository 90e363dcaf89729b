//! Result files.
//!
//! `metrics.csv` columns, one row per grid cell and trial:
//! `system, algorithm, k_o, k_e, k_d, tau, t, trial, relations, clients,
//! mean_path, max_path, zero_path_fraction, backhaul_gbps, consumer_gbps,
//! cdn_gbps, max_publisher_gbps, theoretical_mb, cached_mb,
//! advertised_not_cached_mb, multicast_gain, offered_gbps`.
//! Empty `k_d`, `tau`, `t` and `multicast_gain` cells mean "not applicable".
//!
//! `ecdf.csv` columns: `system, algorithm, k_o, k_e, k_d, tau, t, trial,
//! hops, fraction`.
//!
//! `manifest.toml` records the software version, seed, row counts,
//! diagnostics and the full configuration.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, System};
use super::dataset::{Metrics, ResultRow, ResultsDataset, RowKey};
use super::ecdf::EcdfPoint;
use crate::error::{Error, Result};
use crate::placement::Algorithm;

pub const METRICS_FILE: &str = "metrics.csv";
pub const ECDF_FILE: &str = "ecdf.csv";
pub const JSON_FILE: &str = "dataset.json";
pub const MANIFEST_FILE: &str = "manifest.toml";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown output format `{other}`"))),
        }
    }
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
struct MetricsRecord {
    system: System,
    algorithm: Algorithm,
    k_o: usize,
    k_e: usize,
    k_d: Option<usize>,
    tau: Option<f64>,
    t: Option<f64>,
    trial: usize,
    relations: usize,
    clients: u64,
    mean_path: f64,
    max_path: u32,
    zero_path_fraction: f64,
    backhaul_gbps: f64,
    consumer_gbps: f64,
    cdn_gbps: f64,
    max_publisher_gbps: f64,
    theoretical_mb: f64,
    cached_mb: f64,
    advertised_not_cached_mb: f64,
    multicast_gain: Option<f64>,
    offered_gbps: f64,
}

impl MetricsRecord {
    fn from_row(r: &ResultRow) -> Self {
        let (k, m) = (&r.key, &r.metrics);
        Self {
            system: k.system,
            algorithm: k.algorithm,
            k_o: k.k_o,
            k_e: k.k_e,
            k_d: k.k_d,
            tau: k.tau,
            t: k.t,
            trial: k.trial,
            relations: m.relations,
            clients: m.clients,
            mean_path: m.mean_path,
            max_path: m.max_path,
            zero_path_fraction: m.zero_path_fraction,
            backhaul_gbps: m.backhaul_gbps,
            consumer_gbps: m.consumer_gbps,
            cdn_gbps: m.cdn_gbps,
            max_publisher_gbps: m.max_publisher_gbps,
            theoretical_mb: m.theoretical_mb,
            cached_mb: m.cached_mb,
            advertised_not_cached_mb: m.advertised_not_cached_mb,
            multicast_gain: m.multicast_gain,
            offered_gbps: m.offered_gbps,
        }
    }

    fn into_row(self) -> ResultRow {
        ResultRow {
            key: RowKey {
                system: self.system,
                algorithm: self.algorithm,
                k_o: self.k_o,
                k_e: self.k_e,
                k_d: self.k_d,
                tau: self.tau,
                t: self.t,
                trial: self.trial,
            },
            metrics: Metrics {
                relations: self.relations,
                clients: self.clients,
                mean_path: self.mean_path,
                max_path: self.max_path,
                zero_path_fraction: self.zero_path_fraction,
                backhaul_gbps: self.backhaul_gbps,
                consumer_gbps: self.consumer_gbps,
                cdn_gbps: self.cdn_gbps,
                max_publisher_gbps: self.max_publisher_gbps,
                theoretical_mb: self.theoretical_mb,
                cached_mb: self.cached_mb,
                advertised_not_cached_mb: self.advertised_not_cached_mb,
                multicast_gain: self.multicast_gain,
                offered_gbps: self.offered_gbps,
            },
            ecdf: Vec::new(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct EcdfRecord {
    system: System,
    algorithm: Algorithm,
    k_o: usize,
    k_e: usize,
    k_d: Option<usize>,
    tau: Option<f64>,
    t: Option<f64>,
    trial: usize,
    hops: f64,
    fraction: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub software: String,
    pub version: String,
    pub master_seed: u64,
    pub format: Format,
    pub rows: usize,
    pub diagnostics: Vec<String>,
    pub config: ExperimentConfig,
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn csv_bytes<T: Serialize>(records: impl IntoIterator<Item = T>, header: &[&str]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header)?;
    for r in records {
        w.serialize(r)?;
    }
    w.into_inner()
        .map_err(|e| Error::io("<buffer>", e.into_error()))
}

const METRICS_HEADER: [&str; 22] = [
    "system",
    "algorithm",
    "k_o",
    "k_e",
    "k_d",
    "tau",
    "t",
    "trial",
    "relations",
    "clients",
    "mean_path",
    "max_path",
    "zero_path_fraction",
    "backhaul_gbps",
    "consumer_gbps",
    "cdn_gbps",
    "max_publisher_gbps",
    "theoretical_mb",
    "cached_mb",
    "advertised_not_cached_mb",
    "multicast_gain",
    "offered_gbps",
];

const ECDF_HEADER: [&str; 10] = [
    "system", "algorithm", "k_o", "k_e", "k_d", "tau", "t", "trial", "hops", "fraction",
];

/// Write the dataset and a manifest into `dir`, creating it if needed.
pub fn emit_results(
    dataset: &ResultsDataset,
    config: &ExperimentConfig,
    dir: impl AsRef<Path>,
    format: Format,
) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    match format {
        Format::Csv => {
            let metrics = csv_bytes(dataset.rows.iter().map(MetricsRecord::from_row), &METRICS_HEADER)?;
            write(&dir.join(METRICS_FILE), &metrics)?;
            let ecdf = csv_bytes(
                dataset.rows.iter().flat_map(|r| {
                    r.ecdf.iter().map(move |p| EcdfRecord {
                        system: r.key.system,
                        algorithm: r.key.algorithm,
                        k_o: r.key.k_o,
                        k_e: r.key.k_e,
                        k_d: r.key.k_d,
                        tau: r.key.tau,
                        t: r.key.t,
                        trial: r.key.trial,
                        hops: p.value,
                        fraction: p.fraction,
                    })
                }),
                &ECDF_HEADER,
            )?;
            write(&dir.join(ECDF_FILE), &ecdf)?;
        }
        Format::Json => {
            let text = serde_json::to_string_pretty(dataset)
                .map_err(|e| Error::Config(format!("cannot encode dataset: {e}")))?;
            write(&dir.join(JSON_FILE), text.as_bytes())?;
        }
    }
    let manifest = Manifest {
        software: env!("CARGO_PKG_NAME").to_owned(),
        version: env!("CARGO_PKG_VERSION").to_owned(),
        master_seed: config.master_seed,
        format,
        rows: dataset.rows.len(),
        diagnostics: dataset.diagnostics.clone(),
        config: config.clone(),
    };
    let text = toml::to_string(&manifest)
        .map_err(|e| Error::Config(format!("cannot encode manifest: {e}")))?;
    write(&dir.join(MANIFEST_FILE), text.as_bytes())
}

pub fn read_manifest(dir: impl AsRef<Path>) -> Result<Manifest> {
    let path = dir.as_ref().join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Rebuild a dataset from the files written by [`emit_results`].
pub fn read_results(dir: impl AsRef<Path>) -> Result<ResultsDataset> {
    let dir = dir.as_ref();
    let manifest = read_manifest(dir)?;
    let mut dataset = match manifest.format {
        Format::Json => {
            let path = dir.join(JSON_FILE);
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        }
        Format::Csv => {
            let mut rows: Vec<ResultRow> = csv::Reader::from_path(dir.join(METRICS_FILE))?
                .deserialize::<MetricsRecord>()
                .map(|r| r.map(MetricsRecord::into_row))
                .collect::<std::result::Result<_, _>>()?;
            rows.sort_by(|a, b| a.key.cmp_key(&b.key));
            for rec in csv::Reader::from_path(dir.join(ECDF_FILE))?.deserialize::<EcdfRecord>() {
                let rec = rec?;
                let key = RowKey {
                    system: rec.system,
                    algorithm: rec.algorithm,
                    k_o: rec.k_o,
                    k_e: rec.k_e,
                    k_d: rec.k_d,
                    tau: rec.tau,
                    t: rec.t,
                    trial: rec.trial,
                };
                let i = rows
                    .binary_search_by(|r| r.key.cmp_key(&key))
                    .map_err(|_| Error::Config(format!("ecdf row without metrics row: {key:?}")))?;
                rows[i].ecdf.push(EcdfPoint {
                    value: rec.hops,
                    fraction: rec.fraction,
                });
            }
            ResultsDataset {
                rows,
                diagnostics: Vec::new(),
            }
        }
    };
    dataset.diagnostics = manifest.diagnostics;
    Ok(dataset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalogue::{PopulationSource, SyntheticPopulation};

    fn config() -> ExperimentConfig {
        ExperimentConfig::new(
            "net.graphml",
            PopulationSource::Synthetic(SyntheticPopulation::Uniform { total: 100 }),
        )
    }

    fn row() -> ResultRow {
        ResultRow {
            key: RowKey {
                system: System::FcdnMulticast,
                algorithm: Algorithm::Pop,
                k_o: 2,
                k_e: 4,
                k_d: None,
                tau: Some(0.1),
                t: Some(900.0),
                trial: 3,
            },
            metrics: Metrics {
                relations: 12,
                clients: 345,
                mean_path: 1.0 / 3.0,
                max_path: 4,
                zero_path_fraction: 0.25,
                backhaul_gbps: 12.345678901,
                consumer_gbps: 10.1,
                cdn_gbps: 2.245678901,
                max_publisher_gbps: 3.3,
                theoretical_mb: 1e5,
                cached_mb: 7e4,
                advertised_not_cached_mb: 3e4,
                multicast_gain: Some(1.7),
                offered_gbps: 99.5,
            },
            ecdf: vec![],
        }
    }

    #[test]
    fn empty_dataset_gives_header_only_tables() {
        let dir = tempfile::tempdir().unwrap();
        emit_results(&ResultsDataset::default(), &config(), dir.path(), Format::Csv).unwrap();
        let metrics = fs::read_to_string(dir.path().join(METRICS_FILE)).unwrap();
        assert_eq!(metrics.lines().count(), 1);
        assert!(metrics.starts_with("system,algorithm,k_o,k_e,k_d,tau,t,trial,"));
        assert_eq!(fs::read_to_string(dir.path().join(ECDF_FILE)).unwrap().lines().count(), 1);
        assert_eq!(read_manifest(dir.path()).unwrap().rows, 0);
        assert_eq!(read_results(dir.path()).unwrap(), ResultsDataset::default());
    }

    #[test]
    fn one_row_round_trip() {
        let mut r = row();
        let mut dns = row();
        dns.key.system = System::CdnDns;
        dns.key.k_d = Some(6);
        dns.key.tau = None;
        dns.key.t = None;
        dns.metrics.multicast_gain = None;
        dns.ecdf = vec![
            EcdfPoint { value: 0.0, fraction: 0.25 },
            EcdfPoint { value: 2.0, fraction: 1.0 },
        ];
        r.metrics.mean_path = 0.1 + 0.2;
        let ds = ResultsDataset {
            rows: vec![r, dns],
            diagnostics: vec!["skipped something".into()],
        };
        let mut sorted = ds.clone();
        sorted.sort();
        for format in [Format::Csv, Format::Json] {
            let dir = tempfile::tempdir().unwrap();
            emit_results(&sorted, &config(), dir.path(), format).unwrap();
            assert_eq!(read_results(dir.path()).unwrap(), sorted, "{format:?}");
        }
        let dir = tempfile::tempdir().unwrap();
        emit_results(&sorted, &config(), dir.path(), Format::Csv).unwrap();
        let text = fs::read_to_string(dir.path().join(METRICS_FILE)).unwrap();
        let dns_line = text.lines().find(|l| l.starts_with("cdn_dns")).unwrap();
        assert!(dns_line.starts_with("cdn_dns,pop,2,4,6,,,3,12,345,"), "{dns_line}");
    }

    #[test]
    fn unwritable_destination() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("occupied");
        fs::write(&file, "x").unwrap();
        assert!(emit_results(&ResultsDataset::default(), &config(), &file, Format::Csv).is_err());
    }
}
