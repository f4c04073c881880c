//! Experiment harness behind the `subgrad` binary.
//!
//! A JSON [`ExperimentConfig`] names a problem, an initialization, a step
//! schedule and budgets. The `cmd_*` functions run it and write CSV/JSON
//! artifacts into an output directory; every file is written to a temporary
//! name first and renamed into place.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{
    balancedness_drift, certified_bounds, check_chain_rule, integrate_flow,
    orthogonal_component_drift, verify, BoundCertificate, FlowStop,
};
use crate::format::to_json_string;
use crate::landscape::{
    classify_critical, landscape_report, project_to_a, CriticalTag, DEFAULT_TAU,
};
use crate::linalg::DenseMatrix;
use crate::model::{
    gen_phase_instance, gen_rpca_instance, gen_sensing_instance, rip_lower_certificate,
    PhaseInstance, RipCertificate, RpcaInstance, SensingInstance,
};
use crate::objectives::{Objective, SignPolicy};
use crate::optimizer::{
    detect_convergence, diameter_bounds, run_subgradient, ConvergenceReport, ConvergenceStatus,
    StepSchedule, Termination,
};
use crate::rng::Rng;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DIVERGED: i32 = 2;

/// Serialized problem data. `entries` holds row-major arrays: the data matrix
/// for `rpca`, one measurement vector per row for `phase`, one measurement
/// matrix per row for `sensing`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub kind: InstanceKind,
    pub dims: Vec<usize>,
    pub entries: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    Rpca,
    Phase,
    Sensing,
}

fn dims2(f: &InstanceFile) -> Result<(usize, usize)> {
    match f.dims.as_slice() {
        [m, n] => Ok((*m, *n)),
        d => Err(Error::Config(format!(
            "instance dims must be [m, n], got {d:?}"
        ))),
    }
}

impl InstanceFile {
    pub fn from_rpca(inst: &RpcaInstance) -> Self {
        let (m, n, r) = inst.dims();
        InstanceFile {
            kind: InstanceKind::Rpca,
            dims: vec![m, n],
            entries: vec![inst.m.as_slice().to_vec()],
            b: None,
            r: Some(r),
            seed: inst.provenance.as_ref().map(|p| p.seed),
        }
    }

    pub fn from_phase(inst: &PhaseInstance) -> Self {
        InstanceFile {
            kind: InstanceKind::Phase,
            dims: vec![inst.dim()],
            entries: inst.a.clone(),
            b: Some(inst.b.clone()),
            r: None,
            seed: inst.provenance.as_ref().map(|p| p.seed),
        }
    }

    pub fn from_sensing(inst: &SensingInstance) -> Self {
        let (m, n, r) = inst.dims();
        InstanceFile {
            kind: InstanceKind::Sensing,
            dims: vec![m, n],
            entries: inst.a.iter().map(|a| a.as_slice().to_vec()).collect(),
            b: Some(inst.b.clone()),
            r: Some(r),
            seed: inst.provenance.as_ref().map(|p| p.seed),
        }
    }

    /// Measurement matrices, for `sensing` instances.
    pub fn matrices(&self) -> Result<Vec<DenseMatrix>> {
        if self.kind != InstanceKind::Sensing {
            return Err(Error::Config(
                "measurement matrices need a sensing instance".into(),
            ));
        }
        let (m, n) = dims2(self)?;
        self.entries
            .iter()
            .map(|e| DenseMatrix::new(m, n, e.clone()))
            .collect()
    }

    pub fn to_objective(&self) -> Result<Objective> {
        let need_b = || {
            self.b
                .clone()
                .ok_or_else(|| Error::Config("instance is missing field `b`".into()))
        };
        let need_r = || {
            self.r
                .ok_or_else(|| Error::Config("instance is missing field `r`".into()))
        };
        match self.kind {
            InstanceKind::Rpca => {
                let (m, n) = dims2(self)?;
                let [data] = self.entries.as_slice() else {
                    return Err(Error::Config(
                        "rpca instance needs exactly one entries row".into(),
                    ));
                };
                Ok(Objective::RobustPca(RpcaInstance::new(
                    DenseMatrix::new(m, n, data.clone())?,
                    need_r()?,
                )?))
            }
            InstanceKind::Phase => Ok(Objective::RobustPhase(PhaseInstance::new(
                self.entries.clone(),
                need_b()?,
            )?)),
            InstanceKind::Sensing => Ok(Objective::RobustSensing(SensingInstance::new(
                self.matrices()?,
                need_b()?,
                need_r()?,
            )?)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    Rpca {
        m: usize,
        n: usize,
        r_true: usize,
        rank: usize,
        p: f64,
        sigma: f64,
    },
    Phase {
        n: usize,
        count: usize,
        p: f64,
        sigma: f64,
    },
    Sensing {
        m: usize,
        n: usize,
        r_true: usize,
        rank: usize,
        count: usize,
        p: f64,
        sigma: f64,
    },
    SymRankOne {
        u: Vec<f64>,
    },
    /// Inline problem data.
    Instance {
        instance: InstanceFile,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitSpec {
    Explicit {
        x: Vec<f64>,
    },
    Normal {
        scale: f64,
    },
    UniformBox {
        lo: f64,
        hi: f64,
    },
    /// `x_1` uniform in `±[lo, hi]`, the other coordinates uniform inside the
    /// wedge `|x_i| < |x_1| / (n + 1)` shrunk by `margin`.
    Wedge {
        lo: f64,
        hi: f64,
        margin: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSpec {
    pub window: usize,
    pub tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSpec {
    pub h: f64,
    pub horizon: f64,
}

fn default_tau() -> f64 {
    DEFAULT_TAU
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub seed: u64,
    pub init: InitSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<StepSchedule>,
    #[serde(default)]
    pub iterations: usize,
    #[serde(default)]
    pub policy: SignPolicy,
    /// Stored-row stride for the run CSV (0 picks the default).
    #[serde(default)]
    pub thin: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceSpec>,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flow: Option<FlowSpec>,
    #[serde(default)]
    pub trials: usize,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            e => e,
        })
    }

    fn schedule(&self) -> Result<&StepSchedule> {
        self.schedule
            .as_ref()
            .ok_or_else(|| Error::Config("missing field `schedule`".into()))
    }

    fn convergence(&self) -> ConvergenceSpec {
        self.convergence.unwrap_or(ConvergenceSpec {
            window: (self.iterations / 10).max(1),
            tol: 1e-2,
        })
    }

    fn flow_spec(&self) -> Result<FlowSpec> {
        self.flow
            .ok_or_else(|| Error::Config("missing field `flow`".into()))
    }
}

/// Problem built from a config, with the data file to emit (if any).
pub struct Problem {
    pub objective: Objective,
    pub instance: Option<InstanceFile>,
}

pub fn build_problem(spec: &ProblemSpec, seed: u64) -> Result<Problem> {
    Ok(match spec {
        ProblemSpec::Rpca {
            m,
            n,
            r_true,
            rank,
            p,
            sigma,
        } => {
            let mut inst = gen_rpca_instance(seed, *m, *n, *r_true, *p, *sigma)?;
            inst.rank = *rank;
            let file = InstanceFile::from_rpca(&inst);
            Problem {
                objective: Objective::RobustPca(RpcaInstance::new(inst.m.clone(), *rank)?),
                instance: Some(file),
            }
        }
        ProblemSpec::Phase { n, count, p, sigma } => {
            let inst = gen_phase_instance(seed, *n, *count, *p, *sigma)?;
            Problem {
                instance: Some(InstanceFile::from_phase(&inst)),
                objective: Objective::RobustPhase(inst),
            }
        }
        ProblemSpec::Sensing {
            m,
            n,
            r_true,
            rank,
            count,
            p,
            sigma,
        } => {
            let inst = gen_sensing_instance(seed, *m, *n, *r_true, *rank, *count, *p, *sigma)?;
            Problem {
                instance: Some(InstanceFile::from_sensing(&inst)),
                objective: Objective::RobustSensing(inst),
            }
        }
        ProblemSpec::SymRankOne { u } => Problem {
            objective: Objective::sym_rank_one(u.clone())?,
            instance: None,
        },
        ProblemSpec::Instance { instance } => Problem {
            objective: instance.to_objective()?,
            instance: None,
        },
    })
}

/// Initial point of dimension `dim` drawn from `rng`.
pub fn draw_init(spec: &InitSpec, dim: usize, rng: &mut Rng) -> Result<Vec<f64>> {
    match spec {
        InitSpec::Explicit { x } => {
            if x.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: x.len(),
                });
            }
            Ok(x.clone())
        }
        InitSpec::Normal { scale } => {
            Ok(rng.normal_vec(dim).into_iter().map(|v| v * scale).collect())
        }
        InitSpec::UniformBox { lo, hi } => {
            if !(lo < hi) {
                return Err(Error::Config(format!(
                    "uniform box needs lo < hi, got [{lo}, {hi}]"
                )));
            }
            Ok((0..dim).map(|_| rng.uniform_in(*lo, *hi)).collect())
        }
        InitSpec::Wedge { lo, hi, margin } => {
            if dim < 2 || !(0.0 < *lo && lo < hi) || !(0.0..1.0).contains(margin) {
                return Err(Error::Config(
                    "wedge init needs dim >= 2, 0 < lo < hi, margin in [0, 1)".into(),
                ));
            }
            let mag = rng.uniform_in(*lo, *hi);
            let x1 = if rng.bernoulli(0.5) { mag } else { -mag };
            let half = (1.0 - margin) * mag / (dim as f64 + 1.0);
            let mut x = vec![x1];
            x.extend((1..dim).map(|_| rng.uniform_in(-half, half)));
            Ok(x)
        }
    }
}

fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, &path)?;
    Ok(path)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    #[serde(flatten)]
    pub convergence: ConvergenceReport,
    pub iterations: usize,
    pub termination: Termination,
    pub final_f: f64,
    pub diameter_lower: f64,
    pub diameter_upper: f64,
    pub max_norm_bound: f64,
}

/// Outcome of one `run`: summary, optional landscape report, exit code.
pub struct RunOutcome {
    pub summary: RunSummary,
    pub exit_code: i32,
    pub files: Vec<PathBuf>,
}

/// Writes `run.csv`, `convergence.json`, plus `instance.json` for generated
/// data or `landscape.json` for the symmetric rank-one objective.
pub fn cmd_run(cfg: &ExperimentConfig, out: &Path) -> Result<RunOutcome> {
    let problem = build_problem(&cfg.problem, cfg.seed)?;
    let obj = &problem.objective;
    let mut rng = Rng::stream(cfg.seed, 1);
    let x0 = draw_init(&cfg.init, obj.dim(), &mut rng)?;
    let rec = run_subgradient(
        obj,
        &x0,
        cfg.schedule()?,
        cfg.iterations,
        cfg.policy,
        cfg.thin,
    )?;
    let conv = cfg.convergence();
    let report = detect_convergence(&rec, conv.window.min(rec.len()), conv.tol)?;
    let (lower, upper) = diameter_bounds(&rec);
    let summary = RunSummary {
        convergence: report,
        iterations: rec.len(),
        termination: rec.termination,
        final_f: obj.value(&rec.final_point)?,
        diameter_lower: lower,
        diameter_upper: upper,
        max_norm_bound: rec.bbox.max_norm(),
    };

    let mut csv = Vec::new();
    rec.write_csv(&mut csv)?;
    let mut files = vec![
        write_atomic(out, "run.csv", &csv)?,
        write_atomic(out, "convergence.json", to_json_string(&summary).as_bytes())?,
    ];
    if let Some(inst) = &problem.instance {
        files.push(write_atomic(
            out,
            "instance.json",
            to_json_string(inst).as_bytes(),
        )?);
    }
    if let Objective::SymRankOne(s) = obj {
        let report = landscape_report(s.u(), &rec.final_point, cfg.tau)?;
        files.push(write_atomic(
            out,
            "landscape.json",
            to_json_string(&report).as_bytes(),
        )?);
    }
    let exit_code = if summary.convergence.status == ConvergenceStatus::Diverged {
        EXIT_DIVERGED
    } else {
        EXIT_OK
    };
    Ok(RunOutcome {
        summary,
        exit_code,
        files,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub index: usize,
    pub x0: Vec<f64>,
    pub terminal: Vec<f64>,
    pub status: ConvergenceStatus,
    pub trailing_displacement: f64,
    pub class: CriticalTag,
    pub distance_to_plus_u: f64,
    pub distance_to_minus_u: f64,
    pub distance_to_a: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AvoidanceSummary {
    pub trials: usize,
    pub converged_to_plus_u: usize,
    pub converged_to_minus_u: usize,
    pub converged_to_a: usize,
    pub unresolved: usize,
    /// Whether every entry of `u` is nonzero.
    pub nondegenerate: bool,
    pub outcomes: Vec<TrialOutcome>,
}

/// Runs one trial per index from an initialization drawn on its own random
/// stream, so results do not depend on scheduling. A trial counts toward a
/// limit only when its trailing displacement passes the convergence test.
pub fn avoidance(cfg: &ExperimentConfig) -> Result<AvoidanceSummary> {
    let ProblemSpec::SymRankOne { u } = &cfg.problem else {
        return Err(Error::Config(
            "avoidance needs a sym_rank_one problem".into(),
        ));
    };
    let obj = Objective::sym_rank_one(u.clone())?;
    let schedule = cfg.schedule()?;
    let conv = cfg.convergence();
    let outcomes = (0..cfg.trials)
        .into_par_iter()
        .map(|i| -> Result<TrialOutcome> {
            let mut rng = Rng::stream(cfg.seed, i as u64);
            let x0 = draw_init(&cfg.init, u.len(), &mut rng)?;
            let rec = run_subgradient(
                &obj,
                &x0,
                schedule,
                cfg.iterations,
                cfg.policy,
                cfg.iterations,
            )?;
            let report = detect_convergence(&rec, conv.window.min(rec.len()), conv.tol)?;
            let x = rec.final_point;
            let class = classify_critical(u, &x, cfg.tau)?;
            let (_, d_a) = project_to_a(u, &x)?;
            let dist = |s: f64| {
                x.iter()
                    .zip(u)
                    .map(|(a, b)| (a - s * b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            };
            Ok(TrialOutcome {
                index: i,
                x0,
                status: report.status,
                trailing_displacement: report.trailing_displacement,
                class: class.tag,
                distance_to_plus_u: dist(1.0),
                distance_to_minus_u: dist(-1.0),
                distance_to_a: d_a,
                terminal: x,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut s = AvoidanceSummary {
        trials: cfg.trials,
        converged_to_plus_u: 0,
        converged_to_minus_u: 0,
        converged_to_a: 0,
        unresolved: 0,
        nondegenerate: u.iter().all(|&v| v != 0.0),
        outcomes,
    };
    for o in &s.outcomes {
        let slot = match (o.status, o.class) {
            (ConvergenceStatus::Converged, CriticalTag::GlobalMinPlus) => {
                &mut s.converged_to_plus_u
            }
            (ConvergenceStatus::Converged, CriticalTag::GlobalMinMinus) => {
                &mut s.converged_to_minus_u
            }
            (ConvergenceStatus::Converged, CriticalTag::SpuriousA) => &mut s.converged_to_a,
            _ => &mut s.unresolved,
        };
        *slot += 1;
    }
    Ok(s)
}

pub fn cmd_avoidance(cfg: &ExperimentConfig, out: &Path) -> Result<AvoidanceSummary> {
    let s = avoidance(cfg)?;
    write_atomic(out, "avoidance.json", to_json_string(&s).as_bytes())?;
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowReport {
    pub stop: FlowStop,
    pub steps: usize,
    pub h: f64,
    pub final_time: f64,
    pub final_f: f64,
    pub length: f64,
    pub energy: f64,
    pub chain_rule_defect: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub balancedness_drift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orthogonal_drift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<BoundCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_violation: Option<f64>,
}

/// Integrates the flow and checks the energy identity, the conserved
/// quantities and the certified bounds that apply to the objective.
pub fn flow_report(cfg: &ExperimentConfig) -> Result<(crate::flow::FlowRecord, FlowReport)> {
    let problem = build_problem(&cfg.problem, cfg.seed)?;
    let obj = &problem.objective;
    let mut rng = Rng::stream(cfg.seed, 1);
    let x0 = draw_init(&cfg.init, obj.dim(), &mut rng)?;
    let spec = cfg.flow_spec()?;
    let rec = integrate_flow(obj, &x0, spec.h, spec.horizon, cfg.policy)?;
    let rip: Option<RipCertificate> = match obj {
        Objective::RobustSensing(s) => Some(rip_lower_certificate(&s.a)?),
        _ => None,
    };
    let certificate = match obj {
        Objective::RobustPhase(_) => Some(certified_bounds(obj, &x0, None)?),
        Objective::RobustSensing(_) if rip.is_some_and(|c| c.c > 0.0) => {
            Some(certified_bounds(obj, &x0, rip.as_ref())?)
        }
        _ => None,
    };
    let bound_violation = certificate.as_ref().map(|c| verify(&rec, c)).transpose()?;
    let last = rec.len() - 1;
    let report = FlowReport {
        stop: rec.stop,
        steps: last,
        h: rec.h,
        final_time: rec.times[last],
        final_f: rec.f[last],
        length: rec.length[last],
        energy: rec.energy[last],
        chain_rule_defect: check_chain_rule(&rec)?,
        balancedness_drift: balancedness_drift(&rec).ok(),
        orthogonal_drift: orthogonal_component_drift(&rec).ok(),
        certificate,
        bound_violation,
    };
    Ok((rec, report))
}

/// Writes `flow.csv` and `flow_report.json`.
pub fn cmd_flow(cfg: &ExperimentConfig, out: &Path) -> Result<FlowReport> {
    let (rec, report) = flow_report(cfg)?;
    let mut csv = Vec::new();
    rec.write_csv(&mut csv)?;
    write_atomic(out, "flow.csv", &csv)?;
    write_atomic(out, "flow_report.json", to_json_string(&report).as_bytes())?;
    Ok(report)
}

/// Reads a sensing instance file (the `b` and `r` fields are optional) and
/// writes `rip.json`.
pub fn cmd_ripcheck(instance_path: &Path, out: &Path) -> Result<RipCertificate> {
    let text = fs::read_to_string(instance_path)?;
    let file: InstanceFile = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", instance_path.display())))?;
    let cert = rip_lower_certificate(&file.matrices()?)?;
    write_atomic(out, "rip.json", to_json_string(&cert).as_bytes())?;
    Ok(cert)
}

/// Presets shipped with the crate, by name.
pub const PRESETS: &[(&str, &str)] = &[
    ("fig1-rpca", include_str!("../presets/fig1-rpca.json")),
    ("fig1-phase", include_str!("../presets/fig1-phase.json")),
    ("fig1-sensing", include_str!("../presets/fig1-sensing.json")),
    ("fig2-left", include_str!("../presets/fig2-left.json")),
    ("fig2-right", include_str!("../presets/fig2-right.json")),
    (
        "avoidance-default",
        include_str!("../presets/avoidance-default.json"),
    ),
    (
        "wedge-default",
        include_str!("../presets/wedge-default.json"),
    ),
    (
        "flow-sensing-scalar",
        include_str!("../presets/flow-sensing-scalar.json"),
    ),
    (
        "flow-phase-closed-form",
        include_str!("../presets/flow-phase-closed-form.json"),
    ),
];

/// The basis-matrix instance for `ripcheck`.
pub const RIP_BASIS_INSTANCE: &str = include_str!("../presets/rip-basis.json");

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let (_, text) = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Config(format!("unknown preset `{name}`")))?;
    ExperimentConfig::from_json(text)
}
