//! Run configurations and the commands behind the CLI: channel reports,
//! Γ sweeps, Bloch point clouds and the cluster-fidelity witness.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{
    bloch_image, check_unit_interval, circuit_channel_for_mode, kraus_for_mode, ChannelMode,
    DampingParams, KrausChannel,
};
use crate::error::{Error, Result};
use crate::gates::{resource_state, Pauli};
use crate::linalg::DensityState;
use crate::mbqc::MbqcEngine;
use crate::noise::NoiseSpec;
use crate::tomography::{
    bootstrap, cluster_fidelity_terms, estimate_fidelity, kraus_to_chi, multinomial,
    outcome_probabilities, parity_expectation, process_fidelity, process_tomography, seeded_rng,
    state_from_bloch_estimate, ProbeSet, ProcessMatrix, GME_THRESHOLD,
};

pub const BOOTSTRAP_RESAMPLES: usize = 200;
pub const DEFAULT_GAMMA_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Postselection cases of a sweep: the outcome tuple that needs no
/// adaptation, and one that needs the feed-forward.
pub const SWEEP_POSTSELECTIONS: [((u8, u8), &str); 2] = [((0, 0), "no-FF"), ((0, 1), "FF")];

const SETTINGS: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

/// How the channel is realised.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Kraus,
    Circuit,
    Mbqc,
}

impl Engine {
    pub fn as_str(self) -> &'static str {
        match self {
            Engine::Kraus => "kraus",
            Engine::Circuit => "circuit",
            Engine::Mbqc => "mbqc",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kraus" => Ok(Engine::Kraus),
            "circuit" => Ok(Engine::Circuit),
            "mbqc" => Ok(Engine::Mbqc),
            other => Err(Error::invalid(format!("unknown engine '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Report,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "report" => Ok(OutputFormat::Report),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::invalid(format!("unknown format '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub mode: ChannelMode,
    pub gamma: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub engine: Engine,
    pub postselect: Option<(u8, u8)>,
    pub noise: NoiseSpec,
    pub shots: Option<u64>,
    pub seed: u64,
}

impl RunConfig {
    pub fn with_gamma(mode: ChannelMode, gamma: f64, engine: Engine) -> Self {
        Self {
            mode,
            gamma: Some(gamma),
            alpha: None,
            beta: None,
            engine,
            postselect: None,
            noise: NoiseSpec::ideal(),
            shots: None,
            seed: 0,
        }
    }

    pub fn with_angles(mode: ChannelMode, alpha: f64, beta: f64, engine: Engine) -> Self {
        Self {
            gamma: None,
            alpha: Some(alpha),
            beta: Some(beta),
            ..Self::with_gamma(mode, 0.0, engine)
        }
    }

    /// Checks the option combination and resolves the Kraus angles.
    pub fn params(&self) -> Result<DampingParams> {
        let p = match (self.gamma, self.alpha, self.beta) {
            (Some(g), None, None) => {
                if self.mode == ChannelMode::Beta {
                    return Err(Error::invalid(
                        "beta mode takes --alpha and --beta, not --gamma",
                    ));
                }
                DampingParams::from_damping(g)?
            }
            (None, Some(a), Some(b)) => DampingParams::new(a, b)?,
            (None, None, None) => {
                return Err(Error::invalid(
                    "give either --gamma or both --alpha and --beta",
                ))
            }
            _ => {
                return Err(Error::invalid(
                    "--gamma excludes --alpha/--beta, which must come together",
                ))
            }
        };
        if self.engine != Engine::Mbqc {
            if self.postselect.is_some() {
                return Err(Error::invalid("postselection needs the mbqc engine"));
            }
            if !self.noise.is_ideal() {
                return Err(Error::invalid("resource noise needs the mbqc engine"));
            }
        }
        if let Some((a, b)) = self.postselect {
            if a > 1 || b > 1 {
                return Err(Error::invalid("postselected outcomes must be 0 or 1"));
            }
        }
        self.noise.validate()?;
        if self.shots == Some(0) {
            return Err(Error::invalid("shots must be positive"));
        }
        Ok(p)
    }
}

/// Unnormalised conditional outputs of one probe; their traces are the
/// branch probabilities.
struct ProbeBranches {
    outcomes: Vec<Option<Vec<u8>>>,
    outputs: Vec<DensityState>,
}

impl ProbeBranches {
    fn kept(&self, postselect: Option<(u8, u8)>) -> impl Iterator<Item = usize> + '_ {
        self.outcomes
            .iter()
            .enumerate()
            .filter_map(move |(i, o)| match (postselect, o) {
                (Some((a, b)), Some(o)) => (o[0] == a && o[1] == b).then_some(i),
                _ => Some(i),
            })
    }
}

fn deterministic_channel(cfg: &RunConfig, p: DampingParams) -> Option<KrausChannel> {
    match cfg.engine {
        Engine::Kraus => Some(kraus_for_mode(p, cfg.mode)),
        Engine::Circuit => Some(circuit_channel_for_mode(p, cfg.mode)),
        Engine::Mbqc => None,
    }
}

fn probe_branches(
    cfg: &RunConfig,
    p: DampingParams,
    probes: &ProbeSet,
) -> Result<Vec<ProbeBranches>> {
    let channel = deterministic_channel(cfg, p);
    let engine = MbqcEngine::new(p, cfg.mode).with_noise(cfg.noise.clone());
    probes
        .states()
        .iter()
        .map(|probe| match &channel {
            Some(ch) => Ok(ProbeBranches {
                outcomes: vec![None],
                outputs: vec![ch.apply(probe)?],
            }),
            None => {
                let branches = engine.branches(probe)?;
                Ok(ProbeBranches {
                    outcomes: branches.iter().map(|b| Some(b.outcomes.clone())).collect(),
                    outputs: branches.into_iter().map(|b| b.output).collect(),
                })
            }
        })
        .collect()
}

fn exact_outputs(
    branches: &[ProbeBranches],
    postselect: Option<(u8, u8)>,
) -> Result<Vec<DensityState>> {
    branches
        .iter()
        .map(|pb| {
            let mut kept = pb.kept(postselect);
            let first = kept.next().ok_or(Error::ZeroProbability)?;
            let mut sum = pb.outputs[first].clone();
            for i in kept {
                sum = sum.add(&pb.outputs[i])?;
            }
            let w = sum.trace();
            if w <= 1e-15 {
                return Err(Error::ZeroProbability);
            }
            Ok(sum.scale(1.0 / w))
        })
        .collect()
}

/// Joint distribution of (branch, output bit) for measuring `setting` on the
/// output; index `2 * branch + bit`, bit 1 meaning eigenvalue −1.
fn setting_probabilities(pb: &ProbeBranches, setting: Pauli) -> Vec<f64> {
    let obs = setting.matrix();
    pb.outputs
        .iter()
        .flat_map(|out| {
            let w = out.trace().max(0.0);
            let e = out.expectation(&obs);
            [((w + e) / 2.0).max(0.0), ((w - e) / 2.0).max(0.0)]
        })
        .collect()
}

/// χ from per-setting counts laid out `[probe * 3 + setting]`, projected to
/// the nearest physical process.
fn chi_from_counts(
    counts: &[Vec<u64>],
    branches: &[ProbeBranches],
    probes: &ProbeSet,
    postselect: Option<(u8, u8)>,
) -> Result<ProcessMatrix> {
    let states = branches
        .iter()
        .enumerate()
        .map(|(k, pb)| {
            let kept: Vec<usize> = pb.kept(postselect).collect();
            let mut bloch = [0.0; 3];
            for (s, slot) in bloch.iter_mut().enumerate() {
                let c = &counts[3 * k + s];
                let (n0, n1) = kept
                    .iter()
                    .fold((0u64, 0u64), |(a, b), &i| (a + c[2 * i], b + c[2 * i + 1]));
                if n0 + n1 == 0 {
                    return Err(Error::ZeroProbability);
                }
                *slot = parity_expectation(&[n0, n1]);
            }
            state_from_bloch_estimate(bloch)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(process_tomography(probes, &states)?.to_physical())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchProbability {
    pub probe: String,
    pub outcomes: String,
    pub probability: f64,
}

/// Everything one channel run produces.
#[derive(Clone, Debug)]
pub struct ChannelRun {
    pub params: DampingParams,
    pub chi: ProcessMatrix,
    pub ideal: ProcessMatrix,
    pub fidelity: f64,
    pub bootstrap_sigma: Option<f64>,
    pub branch_table: Vec<BranchProbability>,
}

pub fn run_channel(cfg: &RunConfig) -> Result<ChannelRun> {
    let p = cfg.params()?;
    let probes = ProbeSet::standard();
    let branches = probe_branches(cfg, p, &probes)?;
    let ideal = kraus_to_chi(&kraus_for_mode(p, cfg.mode));

    let (chi, bootstrap_sigma) = match cfg.shots {
        None => (
            process_tomography(&probes, &exact_outputs(&branches, cfg.postselect)?)?,
            None,
        ),
        Some(shots) => {
            let counts: Vec<Vec<u64>> = branches
                .iter()
                .enumerate()
                .flat_map(|(k, pb)| {
                    SETTINGS.iter().enumerate().map(move |(s, &setting)| {
                        let probs = setting_probabilities(pb, setting);
                        multinomial(&mut seeded_rng(cfg.seed, (3 * k + s) as u64), shots, &probs)
                    })
                })
                .collect();
            let chi = chi_from_counts(&counts, &branches, &probes, cfg.postselect)?;
            let summary = bootstrap(&counts, BOOTSTRAP_RESAMPLES, cfg.seed, |draw| {
                process_fidelity(
                    &chi_from_counts(draw, &branches, &probes, cfg.postselect)?,
                    &ideal,
                )
            })?;
            (chi, Some(summary.std))
        }
    };
    let fidelity = process_fidelity(&chi, &ideal)?;

    let branch_table = branches
        .iter()
        .zip(probes.labels())
        .flat_map(|(pb, label)| {
            pb.outcomes
                .iter()
                .zip(&pb.outputs)
                .filter_map(move |(o, out)| {
                    o.as_ref().map(|o| BranchProbability {
                        probe: label.clone(),
                        outcomes: o.iter().map(|b| b.to_string()).collect(),
                        probability: round_sig(out.trace()),
                    })
                })
        })
        .collect();

    Ok(ChannelRun {
        params: p,
        chi,
        ideal,
        fidelity,
        bootstrap_sigma,
        branch_table,
    })
}

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    let v: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

fn round_matrix(m: [[f64; 4]; 4]) -> [[f64; 4]; 4] {
    m.map(|row| row.map(round_sig))
}

/// Serialised result of one channel run: the reconstructed χ next to the
/// ideal one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiReport {
    pub config: RunConfig,
    pub alpha: f64,
    pub beta: f64,
    pub chi_real: [[f64; 4]; 4],
    pub chi_imag: [[f64; 4]; 4],
    pub ideal_chi_real: [[f64; 4]; 4],
    pub ideal_chi_imag: [[f64; 4]; 4],
    pub process_fidelity: f64,
    pub bootstrap_sigma: Option<f64>,
    pub branch_probabilities: Vec<BranchProbability>,
}

impl ChiReport {
    pub fn from_run(config: &RunConfig, run: &ChannelRun) -> Self {
        Self {
            config: config.clone(),
            alpha: round_sig(run.params.alpha),
            beta: round_sig(run.params.beta),
            chi_real: round_matrix(run.chi.real_part()),
            chi_imag: round_matrix(run.chi.imag_part()),
            ideal_chi_real: round_matrix(run.ideal.real_part()),
            ideal_chi_imag: round_matrix(run.ideal.imag_part()),
            process_fidelity: round_sig(run.fidelity),
            bootstrap_sigma: run.bootstrap_sigma.map(round_sig),
            branch_probabilities: run.branch_table.clone(),
        }
    }

    /// Rebuilds χ, enforcing the process-matrix invariants.
    pub fn chi(&self) -> Result<ProcessMatrix> {
        ProcessMatrix::from_parts(&self.chi_real, &self.chi_imag)
    }

    /// Flat rows `(row, col, re, im, ideal re, ideal im)` for CSV output.
    pub fn entries(&self) -> Vec<ChiEntry> {
        (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| ChiEntry {
                row: Pauli::ALL[i].symbol().to_string(),
                col: Pauli::ALL[j].symbol().to_string(),
                re: self.chi_real[i][j],
                im: self.chi_imag[i][j],
                ideal_re: self.ideal_chi_real[i][j],
                ideal_im: self.ideal_chi_imag[i][j],
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiEntry {
    pub row: String,
    pub col: String,
    pub re: f64,
    pub im: f64,
    pub ideal_re: f64,
    pub ideal_im: f64,
}

pub fn cmd_channel(cfg: &RunConfig) -> Result<ChiReport> {
    let report = ChiReport::from_run(cfg, &run_channel(cfg)?);
    report.chi()?;
    Ok(report)
}

/// Parameter axis of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub enum SweepAxis {
    Gamma(Vec<f64>),
    /// β values at fixed α, for the β mode.
    Beta {
        alpha: f64,
        betas: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub mode: ChannelMode,
    pub axis: SweepAxis,
    pub engine: Engine,
    pub noise: NoiseSpec,
    pub shots: Option<u64>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub gamma: Option<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub s1: Option<u8>,
    pub s2: Option<u8>,
    pub label: String,
    pub fidelity: f64,
    pub sigma: Option<f64>,
}

/// Seed for grid point `index`, so points can run in any order.
fn point_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// One row per grid point and postselection case with the mbqc engine, one
/// row per grid point otherwise.
pub fn cmd_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    let points: Vec<RunConfig> = match &cfg.axis {
        SweepAxis::Gamma(grid) => {
            if grid.is_empty() {
                return Err(Error::invalid("empty Γ grid"));
            }
            grid.iter()
                .map(|&g| {
                    check_unit_interval("Γ", g)?;
                    Ok(RunConfig::with_gamma(cfg.mode, g, cfg.engine))
                })
                .collect::<Result<_>>()?
        }
        SweepAxis::Beta { alpha, betas } => {
            if betas.is_empty() {
                return Err(Error::invalid("empty β grid"));
            }
            betas
                .iter()
                .map(|&b| RunConfig::with_angles(cfg.mode, *alpha, b, cfg.engine))
                .collect()
        }
    };
    let cases: Vec<(Option<(u8, u8)>, &str)> = if cfg.engine == Engine::Mbqc {
        SWEEP_POSTSELECTIONS
            .iter()
            .map(|&(p, l)| (Some(p), l))
            .collect()
    } else {
        vec![(None, cfg.engine.as_str())]
    };
    let jobs: Vec<(usize, RunConfig, &str)> = points
        .iter()
        .flat_map(|pt| cases.iter().map(move |&(post, label)| (pt, post, label)))
        .enumerate()
        .map(|(i, (pt, post, label))| {
            let run = RunConfig {
                postselect: post,
                noise: cfg.noise.clone(),
                shots: cfg.shots,
                seed: point_seed(cfg.seed, i),
                ..pt.clone()
            };
            (i, run, label)
        })
        .collect();
    let mut rows: Vec<(usize, SweepRow)> = jobs
        .par_iter()
        .map(|(i, run, label)| {
            let out = run_channel(run)?;
            Ok((
                *i,
                SweepRow {
                    gamma: run.gamma,
                    alpha: round_sig(out.params.alpha),
                    beta: round_sig(out.params.beta),
                    s1: run.postselect.map(|p| p.0),
                    s2: run.postselect.map(|p| p.1),
                    label: label.to_string(),
                    fidelity: round_sig(out.fidelity),
                    sigma: out.bootstrap_sigma.map(round_sig),
                },
            ))
        })
        .collect::<Result<_>>()?;
    rows.sort_by_key(|(i, _)| *i);
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochRow {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub x_out: f64,
    pub y_out: f64,
    pub z_out: f64,
}

/// Uniformly distributed points on the Bloch sphere.
pub fn sphere_points(samples: usize, seed: u64) -> Vec<[f64; 3]> {
    let mut rng = seeded_rng(seed, 0);
    (0..samples)
        .map(|_| {
            let z: f64 = rng.random_range(-1.0..=1.0);
            let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let rho = (1.0 - z * z).max(0.0).sqrt();
            [rho * phi.cos(), rho * phi.sin(), z]
        })
        .collect()
}

/// Uniform sphere points and their images under the configured channel.
pub fn cmd_bloch(cfg: &RunConfig, samples: usize) -> Result<Vec<BlochRow>> {
    if samples == 0 {
        return Err(Error::invalid("samples must be at least 1"));
    }
    let p = cfg.params()?;
    let channel = deterministic_channel(cfg, p);
    let engine = MbqcEngine::new(p, cfg.mode).with_noise(cfg.noise.clone());
    sphere_points(samples, cfg.seed)
        .into_iter()
        .map(|v| {
            let out = match &channel {
                Some(ch) => bloch_image(ch, v)?,
                None => engine
                    .output(&DensityState::from_bloch(v[0], v[1], v[2]), cfg.postselect)?
                    .bloch_vector(),
            };
            Ok(BlochRow {
                x: round_sig(v[0]),
                y: round_sig(v[1]),
                z: round_sig(v[2]),
                x_out: round_sig(out[0]),
                y_out: round_sig(out[1]),
                z_out: round_sig(out[2]),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterTerm {
    pub word: String,
    pub coefficient: f64,
    pub expectation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub noise: NoiseSpec,
    pub shots: Option<u64>,
    pub seed: u64,
    pub estimated_fidelity: f64,
    pub bootstrap_sigma: Option<f64>,
    pub exact_fidelity: f64,
    pub gme: bool,
    pub terms: Vec<ClusterTerm>,
}

/// Fidelity of the (noisy) cluster with the ideal resource from the local
/// Pauli terms, exact or sampled, plus the witness verdict on the estimate.
pub fn cmd_cluster_fidelity(
    noise: &NoiseSpec,
    shots: Option<u64>,
    seed: u64,
) -> Result<ClusterReport> {
    if shots == Some(0) {
        return Err(Error::invalid("shots must be positive"));
    }
    let ideal = resource_state();
    let rho = noise.apply(&ideal)?;
    let terms = cluster_fidelity_terms();
    let exact_fidelity = rho.matrix().frobenius_inner(ideal.matrix()).re;

    let (expectations, sigma) = match shots {
        None => (
            terms
                .iter()
                .map(|t| rho.expectation(&t.word.matrix()))
                .collect::<Vec<_>>(),
            None,
        ),
        Some(n) => {
            let counts = terms
                .iter()
                .enumerate()
                .map(|(k, t)| {
                    let probs = outcome_probabilities(&rho, &t.word)?;
                    Ok(multinomial(&mut seeded_rng(seed, k as u64), n, &probs))
                })
                .collect::<Result<Vec<_>>>()?;
            let estimate = |c: &[Vec<u64>]| {
                let e: Vec<f64> = c.iter().map(|c| parity_expectation(c)).collect();
                estimate_fidelity(&terms, &e)
            };
            let sigma = bootstrap(&counts, BOOTSTRAP_RESAMPLES, seed, estimate)?.std;
            (
                counts.iter().map(|c| parity_expectation(c)).collect(),
                Some(sigma),
            )
        }
    };
    let estimated = estimate_fidelity(&terms, &expectations)?;

    Ok(ClusterReport {
        noise: noise.clone(),
        shots,
        seed,
        estimated_fidelity: round_sig(estimated),
        bootstrap_sigma: sigma.map(round_sig),
        exact_fidelity: round_sig(exact_fidelity),
        gme: estimated > GME_THRESHOLD,
        terms: terms
            .iter()
            .zip(&expectations)
            .map(|(t, &e)| ClusterTerm {
                word: t.word.to_string(),
                coefficient: t.coefficient,
                expectation: round_sig(e),
            })
            .collect(),
    })
}

/// Writes `value` as pretty JSON followed by a newline.
pub fn write_report<T: Serialize, W: Write>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Writes records as CSV with a header row.
pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
