use std::sync::Arc;

use rayon::prelude::*;

use super::config::{ExperimentConfig, System};
use super::dataset::{Metrics, ResultRow, ResultsDataset, RowKey};
use super::ecdf::ecdf;
use super::seed::derive_rng;
use crate::capacity::{unicast_link_loads, gain, LinkLoadReport, MulticastParams, MulticastTrees};
use crate::catalogue::{
    assign_populations, generate_catalogue, generate_demand, Catalogue, DemandMatrix, Populations,
};
use crate::error::{Error, Result};
use crate::mapping::{match_dns, match_fcdn, path_lengths, RelationSet, Tier};
use crate::placement::{
    build_cache_plan, split_roles, storage_report, Algorithm, CachePlan, PlacementResult,
    Selector, StorageReport,
};
use crate::topology::{
    all_pairs_hop_distance, load_topology, require_connected, DistanceMatrix, NetworkGraph, NodeIx,
    PathTable,
};

fn algo_ix(a: Algorithm) -> u64 {
    a as u64
}

/// Everything shared by the trials of one run: topology, populations and
/// catalogue, plus the seeded per-trial inputs.
#[derive(Debug)]
pub struct Scenario {
    pub config: ExperimentConfig,
    pub graph: NetworkGraph,
    pub dist: DistanceMatrix,
    pub paths: Arc<PathTable>,
    pub populations: Populations,
    pub catalogue: Catalogue,
}

impl Scenario {
    pub fn prepare(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let graph = load_topology(&config.topology)?;
        let mut rng = derive_rng(config.master_seed, "population", &[]);
        let populations = assign_populations(&graph, &config.population, &mut rng)?;
        Self::from_parts(config, graph, populations)
    }

    /// Scenario over an in-memory graph; `config.topology` is ignored.
    pub fn from_parts(
        config: ExperimentConfig,
        graph: NetworkGraph,
        populations: Populations,
    ) -> Result<Self> {
        config.validate()?;
        let dist = all_pairs_hop_distance(&graph);
        require_connected(&graph, &dist)?;
        let paths = Arc::new(PathTable::new(&graph, &dist));
        let spec = &config.catalogue;
        let catalogue = generate_catalogue(
            spec.n,
            spec.zipf_exponent,
            &spec.bitrate_choices,
            &spec.volume_choices,
            &mut derive_rng(config.master_seed, "catalogue", &[]),
        )?;
        // Validates one positive population per vertex.
        Selector::new(&graph, &dist, &populations)?;
        Ok(Self {
            config,
            graph,
            dist,
            paths,
            populations,
            catalogue,
        })
    }

    fn selector(&self) -> Selector<'_> {
        Selector::new(&self.graph, &self.dist, &self.populations).expect("checked in from_parts")
    }

    fn placement_trial(&self, trial: usize) -> u64 {
        if self.config.fix_placement {
            0
        } else {
            trial as u64
        }
    }

    pub fn demand(&self, trial: usize) -> Result<DemandMatrix> {
        generate_demand(
            &self.catalogue,
            &self.populations,
            self.config.active_fraction,
            &mut derive_rng(self.config.master_seed, "demand", &[trial as u64]),
        )
    }

    pub fn placement(
        &self,
        algorithm: Algorithm,
        k_o: usize,
        k_e: usize,
        trial: usize,
    ) -> Result<PlacementResult> {
        let mut rng = derive_rng(
            self.config.master_seed,
            "placement",
            &[algo_ix(algorithm), k_o as u64, k_e as u64, self.placement_trial(trial)],
        );
        let selection = self.selector().select(algorithm, k_o + k_e, &mut rng)?;
        split_roles(algorithm, &selection, k_o, k_e)
    }

    pub fn ldns(&self, algorithm: Algorithm, k_d: usize, trial: usize) -> Result<Vec<NodeIx>> {
        let mut rng = derive_rng(
            self.config.master_seed,
            "ldns",
            &[algo_ix(algorithm), k_d as u64, self.placement_trial(trial)],
        );
        self.selector().select(algorithm, k_d, &mut rng)
    }

    pub fn cache_plan(&self, placement: &PlacementResult, trial: usize) -> Result<CachePlan> {
        let mut rng = derive_rng(
            self.config.master_seed,
            "cache",
            &[
                algo_ix(placement.algorithm),
                placement.k_o() as u64,
                placement.k_e() as u64,
                trial as u64,
            ],
        );
        build_cache_plan(
            placement,
            &self.catalogue,
            &self.populations,
            self.config.cache_fraction,
            &mut rng,
        )
    }

    pub fn match_fcdn(
        &self,
        placement: &PlacementResult,
        plan: &CachePlan,
        demand: &DemandMatrix,
    ) -> Result<RelationSet> {
        match_fcdn(&self.graph, placement, plan, demand, &self.dist, &self.paths)
    }

    pub fn match_dns(
        &self,
        placement: &PlacementResult,
        ldns: &[NodeIx],
        plan: &CachePlan,
        demand: &DemandMatrix,
    ) -> Result<RelationSet> {
        match_dns(&self.graph, placement, ldns, plan, demand, &self.dist, &self.paths)
    }

    /// All rows for one (algorithm, K_o, K_e, trial) unit.
    pub fn evaluate(
        &self,
        algorithm: Algorithm,
        k_o: usize,
        k_e: usize,
        trial: usize,
        demand: &DemandMatrix,
    ) -> Result<Vec<ResultRow>> {
        let cfg = &self.config;
        let placement = self.placement(algorithm, k_o, k_e, trial)?;
        let plan = self.cache_plan(&placement, trial)?;
        let storage = storage_report(&plan, &self.catalogue);
        let offered = demand.offered_gbps(&self.catalogue);
        let key = |system, k_d, tau, t| RowKey {
            system,
            algorithm,
            k_o,
            k_e,
            k_d,
            tau,
            t,
            trial,
        };
        let mut rows = Vec::new();
        let wants = |s| cfg.systems.contains(&s);

        if wants(System::FcdnUnicast) || wants(System::FcdnMulticast) {
            let rel = self.match_fcdn(&placement, &plan, demand)?;
            let uni = unicast_link_loads(&rel, &self.catalogue, &self.graph);
            let base = self.metrics(&rel, &uni, &storage, offered);
            if wants(System::FcdnUnicast) {
                rows.push(ResultRow {
                    key: key(System::FcdnUnicast, None, None, None),
                    metrics: base.metrics.clone(),
                    ecdf: base.ecdf,
                });
            }
            if wants(System::FcdnMulticast) {
                let trees = MulticastTrees::new(&rel, &self.catalogue, &self.graph);
                for &tau in &cfg.grids.tau {
                    for &t in &cfg.grids.t {
                        let params = MulticastParams::new(t, tau)?;
                        let multi = trees.loads(&params);
                        let mut m = base.metrics.clone();
                        m.backhaul_gbps = multi.total_gbps();
                        m.cdn_gbps = trees.tier_total_gbps(Tier::Cdn, &params);
                        m.consumer_gbps = m.backhaul_gbps - m.cdn_gbps;
                        m.max_publisher_gbps = multi.max_publisher_gbps();
                        m.multicast_gain = Some(gain(uni.total_gbps(), m.backhaul_gbps));
                        rows.push(ResultRow {
                            key: key(System::FcdnMulticast, None, Some(tau), Some(t)),
                            metrics: m,
                            ecdf: Vec::new(),
                        });
                    }
                }
            }
        }

        if wants(System::CdnDns) {
            for &k_d in &cfg.grids.k_d {
                if k_d > self.graph.node_count() {
                    continue;
                }
                let ldns = self.ldns(algorithm, k_d, trial)?;
                let rel = self.match_dns(&placement, &ldns, &plan, demand)?;
                let uni = unicast_link_loads(&rel, &self.catalogue, &self.graph);
                let out = self.metrics(&rel, &uni, &storage, offered);
                rows.push(ResultRow {
                    key: key(System::CdnDns, Some(k_d), None, None),
                    metrics: out.metrics,
                    ecdf: out.ecdf,
                });
            }
        }
        Ok(rows)
    }

    fn metrics(
        &self,
        rel: &RelationSet,
        loads: &LinkLoadReport,
        storage: &StorageReport,
        offered: f64,
    ) -> RowStats {
        let lengths = path_lengths(rel);
        let n = lengths.len();
        let (mean, max, zero) = if n == 0 {
            (0.0, 0, 0.0)
        } else {
            (
                lengths.iter().map(|&h| h as f64).sum::<f64>() / n as f64,
                lengths.iter().copied().max().unwrap_or(0),
                lengths.iter().filter(|&&h| h == 0).count() as f64 / n as f64,
            )
        };
        let samples: Vec<f64> = lengths.iter().map(|&h| h as f64).collect();
        let cdn: f64 = rel
            .cdn()
            .map(|r| {
                self.catalogue.item(r.item as usize).bitrate_mbps * r.clients as f64 * r.hops as f64
            })
            .fold(0.0, |acc, x| acc + x)
            / 1000.0;
        RowStats {
            metrics: Metrics {
                relations: n,
                clients: rel.consumer().map(|r| r.clients).sum(),
                mean_path: mean,
                max_path: max,
                zero_path_fraction: zero,
                backhaul_gbps: loads.total_gbps(),
                consumer_gbps: loads.total_gbps() - cdn,
                cdn_gbps: cdn,
                max_publisher_gbps: loads.max_publisher_gbps(),
                theoretical_mb: storage.theoretical_mb,
                cached_mb: storage.cached_mb,
                advertised_not_cached_mb: storage.advertised_not_cached_mb,
                multicast_gain: None,
                offered_gbps: offered,
            },
            ecdf: if samples.is_empty() {
                Vec::new()
            } else {
                ecdf(&samples).expect("non-empty")
            },
        }
    }
}

struct RowStats {
    metrics: Metrics,
    ecdf: Vec<super::ecdf::EcdfPoint>,
}

/// Run the configured sweep on all available cores.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultsDataset> {
    run_experiment_with(config, None)
}

/// Run the sweep with at most `workers` threads.
pub fn run_experiment_with(
    config: &ExperimentConfig,
    workers: Option<usize>,
) -> Result<ResultsDataset> {
    let scenario = Scenario::prepare(config.clone())?;
    run_scenario(&scenario, workers)
}

pub fn run_scenario(scenario: &Scenario, workers: Option<usize>) -> Result<ResultsDataset> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        if w == 0 {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| sweep(scenario))
}

fn sweep(scenario: &Scenario) -> Result<ResultsDataset> {
    let cfg = &scenario.config;
    let n = scenario.graph.node_count();
    let mut diagnostics = Vec::new();
    let mut cells = Vec::new();
    for &algorithm in &cfg.algorithms {
        for &k_o in &cfg.grids.k_o {
            for &k_e in &cfg.grids.k_e {
                if k_o + k_e > n {
                    diagnostics.push(format!(
                        "skipped {algorithm} K_o={k_o} K_e={k_e}: needs {} nodes, topology has {n}",
                        k_o + k_e
                    ));
                    continue;
                }
                cells.push((algorithm, k_o, k_e));
            }
        }
        if cfg.systems.contains(&System::CdnDns) {
            for &k_d in &cfg.grids.k_d {
                if k_d > n {
                    diagnostics.push(format!(
                        "skipped {algorithm} K_d={k_d}: topology has {n} nodes"
                    ));
                }
            }
        }
    }

    let demands: Vec<DemandMatrix> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| scenario.demand(t))
        .collect::<Result<_>>()?;

    let units: Vec<(Algorithm, usize, usize, usize)> = cells
        .iter()
        .flat_map(|&(a, o, e)| (0..cfg.trials).map(move |t| (a, o, e, t)))
        .collect();
    let outcomes: Vec<Result<Vec<ResultRow>>> = units
        .par_iter()
        .map(|&(a, o, e, t)| scenario.evaluate(a, o, e, t, &demands[t]))
        .collect();

    let mut rows = Vec::new();
    for (&(a, o, e, t), outcome) in units.iter().zip(outcomes) {
        match outcome {
            Ok(r) => rows.extend(r),
            Err(err) => diagnostics.push(format!(
                "failed {a} K_o={o} K_e={e} trial {t}: {err}"
            )),
        }
    }
    let mut dataset = ResultsDataset { rows, diagnostics };
    dataset.sort();
    Ok(dataset)
}
