//! Scenario files, the task pipeline and report emission.

mod emit;

use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::closedform::model_transition;
use rayon::prelude::*;

use crate::commutant::{
    bowtie_quadratic_family, commutator_norm, embed_equal_slope, gbt_linear_partner, maximal_linear_family,
    sample_points, shared_symmetry_dim, triviality_residual, CommutingFamily, FamilyConstruction, Verdict,
};
use crate::error::{Error, Result};
use crate::linalg::hermitian_eigenvalues;
use crate::models::{build_equal_slope, ModelKind, ModelSpec};
use crate::pencil::MatrixPencil;
use crate::propagator::{
    cutoff_convergence, horizon_extrapolation, transition_rows, ConvergenceTable, PropagationConfig,
};
use crate::spectra::{char_roots, default_cluster_tol, degeneracy_profile, min_gap, SecularSpec};

pub use emit::{emit, write_report, Emitted};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    VerifyCommutant,
    Spectrum,
    Propagate,
    CompareClosedForm,
    ConvergenceStudy,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::VerifyCommutant => "verify_commutant",
            Task::Spectrum => "spectrum",
            Task::Propagate => "propagate",
            Task::CompareClosedForm => "compare_closed_form",
            Task::ConvergenceStudy => "convergence_study",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Unsupported(format!("unsupported format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// File for JSON, directory for CSV; stdout when absent.
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

/// Per-task knobs. Every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaskSettings {
    /// Random `u` samples for commutator checks, uniform in `[-5, 5]`.
    pub u_samples: usize,
    /// Grid for the spectrum task.
    pub spectrum_u: Vec<f64>,
    /// Initial-state labels to propagate; all states when absent.
    pub initial_states: Option<Vec<i64>>,
    /// Horizons for extrapolation in the propagate task.
    pub extrapolate: Option<Vec<f64>>,
    /// Distance to the truncation edge below which states are left out of
    /// closed-form comparisons.
    pub compare_margin: usize,
    pub compare_tol: f64,
    pub cutoffs: Vec<usize>,
    pub probes: Vec<(i64, i64)>,
    pub commutator_tol: f64,
    pub root_tol: f64,
}

impl Default for TaskSettings {
    fn default() -> Self {
        Self {
            u_samples: 20,
            spectrum_u: vec![-3.0, -1.0, -0.5, 0.0, 0.5, 1.0, 3.0],
            initial_states: None,
            extrapolate: None,
            compare_margin: 8,
            compare_tol: 1e-3,
            cutoffs: vec![20, 40, 60],
            probes: vec![(0, 0)],
            commutator_tol: 1e-10,
            root_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    #[serde(default)]
    pub name: String,
    pub model: ModelSpec,
    pub tasks: Vec<Task>,
    #[serde(default)]
    pub propagation: PropagationConfig,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub settings: TaskSettings,
    /// Wall-clock timings break byte-for-byte reproducibility, so they are
    /// only recorded on request.
    #[serde(default)]
    pub record_timings: bool,
}

impl Scenario {
    pub fn new(model: ModelSpec, tasks: Vec<Task>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            name: String::new(),
            model,
            tasks,
            propagation: PropagationConfig::default(),
            output: OutputSpec::default(),
            seed: 0,
            settings: TaskSettings::default(),
            record_timings: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| Error::InvalidScenario(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidScenario(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.tasks.is_empty() {
            return Err(Error::InvalidScenario("task list is empty".into()));
        }
        self.model.validate()?;
        self.propagation.validate()?;
        let kind = self.model.kind();
        for &t in &self.tasks {
            let ok = match t {
                Task::VerifyCommutant => is_bordered(kind),
                Task::CompareClosedForm => kind.has_closed_form(),
                Task::ConvergenceStudy => is_truncated(kind),
                Task::Spectrum | Task::Propagate => true,
            };
            if !ok {
                return Err(Error::InvalidScenario(format!(
                    "task {} is not available for {kind:?}",
                    t.name()
                )));
            }
        }
        if let Some(states) = &self.settings.initial_states {
            if let Some(&bad) = states.iter().find(|&&l| self.model.index_of(l).is_none()) {
                return Err(Error::InvalidScenario(format!("initial state {bad} is not a basis label")));
            }
        }
        Ok(())
    }
}

fn is_bordered(kind: ModelKind) -> bool {
    matches!(kind, ModelKind::EqualSlope | ModelKind::BowTie | ModelKind::GeneralizedBowTie)
}

fn is_truncated(kind: ModelKind) -> bool {
    matches!(kind, ModelKind::Oscillator | ModelKind::LinearChain | ModelKind::Su11Sector)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrivialityEntry {
    pub member: String,
    pub residual: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutantResult {
    pub construction: FamilyConstruction,
    pub members: Vec<String>,
    /// Largest normalized commutator among members and `H`.
    pub max_commutator_norm: f64,
    pub triviality: Vec<TrivialityEntry>,
    pub symmetry_dim: usize,
    /// Equal-slope model only: roots `x` of the embedding equation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding_roots: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reconstruction_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub u: f64,
    /// Secular-equation roots, or eigenvalues when no secular equation
    /// applies at this `u`.
    pub levels: Vec<f64>,
    /// `max |root - eigenvalue|`, absent when only eigenvalues were computed.
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub rows: Vec<SpectrumRow>,
    pub max_residual: f64,
    /// Smallest adjacent eigenvalue spacing over the grid and where it occurs.
    pub min_gap: f64,
    pub min_gap_u: f64,
    /// Eigenvalue clusters `(value, multiplicity)` at `u = 0`.
    pub degeneracy_at_zero: Vec<(f64, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionResult {
    pub labels: Vec<String>,
    /// Basis indices of the propagated initial states, one per row.
    pub initial: Vec<usize>,
    pub probabilities: Vec<Vec<f64>>,
    pub row_defect: f64,
    pub col_defect: f64,
    pub max_norm_defect: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_estimate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonEntry {
    pub from: String,
    pub to: String,
    pub numeric: f64,
    pub closed_form: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonResult {
    pub entries: Vec<ComparisonEntry>,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceResult {
    pub table: ConvergenceTable,
    /// Closed-form value per probe, when the model has one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case")]
pub enum TaskResult {
    VerifyCommutant(CommutantResult),
    Spectrum(SpectrumResult),
    Propagate(TransitionResult),
    CompareClosedForm(ComparisonResult),
    ConvergenceStudy(ConvergenceResult),
}

impl TaskResult {
    pub fn task(&self) -> Task {
        match self {
            TaskResult::VerifyCommutant(_) => Task::VerifyCommutant,
            TaskResult::Spectrum(_) => Task::Spectrum,
            TaskResult::Propagate(_) => Task::Propagate,
            TaskResult::CompareClosedForm(_) => Task::CompareClosedForm,
            TaskResult::ConvergenceStudy(_) => Task::ConvergenceStudy,
        }
    }

    fn numbers(&self) -> Vec<f64> {
        match self {
            TaskResult::VerifyCommutant(r) => {
                let mut v = vec![r.max_commutator_norm];
                v.extend(r.triviality.iter().map(|t| t.residual));
                v.extend(r.embedding_roots.iter().flatten());
                v.extend(r.reconstruction_error);
                v
            }
            TaskResult::Spectrum(r) => {
                let mut v = vec![r.max_residual, r.min_gap, r.min_gap_u];
                for row in &r.rows {
                    v.push(row.u);
                    v.extend(&row.levels);
                    v.extend(row.residual);
                }
                v.extend(r.degeneracy_at_zero.iter().map(|c| c.0));
                v
            }
            TaskResult::Propagate(r) => {
                let mut v: Vec<f64> = r.probabilities.iter().flatten().copied().collect();
                v.extend([r.row_defect, r.col_defect, r.max_norm_defect]);
                v.extend(r.tail_estimate);
                v
            }
            TaskResult::CompareClosedForm(r) => {
                let mut v = vec![r.max_residual];
                for e in &r.entries {
                    v.extend([e.numeric, e.closed_form, e.residual]);
                }
                v
            }
            TaskResult::ConvergenceStudy(r) => {
                let mut v: Vec<f64> = r.table.values.iter().flatten().copied().collect();
                v.extend(&r.table.differences);
                v.extend(r.closed_form.iter().flatten());
                v
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskReport {
    /// Whether the task met its tolerance.
    pub passed: bool,
    #[serde(flatten)]
    pub result: TaskResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub schema_version: u32,
    pub name: String,
    pub seed: u64,
    pub model: ModelSpec,
    pub propagation: PropagationConfig,
    pub results: Vec<TaskReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<Vec<f64>>,
}

impl ScenarioReport {
    /// Assemble a report, refusing any non-finite number.
    pub fn new(scenario: &Scenario, results: Vec<TaskReport>, timings_ms: Option<Vec<f64>>) -> Result<Self> {
        for r in &results {
            if r.result.numbers().iter().any(|x| !x.is_finite()) {
                return Err(Error::InTask {
                    task: r.result.task().name().into(),
                    source: Box::new(Error::InvalidScenario("result contains a non-finite value".into())),
                });
            }
        }
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            name: scenario.name.clone(),
            seed: scenario.seed,
            model: scenario.model.clone(),
            propagation: scenario.propagation.clone(),
            results,
            timings_ms,
        })
    }

    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn find(&self, task: Task) -> Option<&TaskResult> {
        self.results.iter().map(|r| &r.result).find(|r| r.task() == task)
    }
}

/// Run every task of the scenario in order.
pub fn run_scenario(s: &Scenario) -> Result<ScenarioReport> {
    s.validate()?;
    let pencil: MatrixPencil<f64> = s.model.build()?;
    let mut results: Vec<TaskReport> = Vec::with_capacity(s.tasks.len());
    let mut timings = Vec::with_capacity(s.tasks.len());
    for &task in &s.tasks {
        let start = Instant::now();
        let previous = results.iter().rev().find_map(|r| match &r.result {
            TaskResult::Propagate(t) => Some(t.clone()),
            _ => None,
        });
        let report = run_task(s, &pencil, task, previous).map_err(|e| e.in_task(task.name()))?;
        timings.push(start.elapsed().as_secs_f64() * 1e3);
        results.push(report);
    }
    ScenarioReport::new(s, results, s.record_timings.then_some(timings))
}

/// Run independent scenarios concurrently; results keep the input order.
pub fn run_batch(scenarios: &[Scenario]) -> Vec<Result<ScenarioReport>> {
    scenarios.par_iter().map(run_scenario).collect()
}

fn run_task(
    s: &Scenario,
    pencil: &MatrixPencil<f64>,
    task: Task,
    previous: Option<TransitionResult>,
) -> Result<TaskReport> {
    let set = &s.settings;
    Ok(match task {
        Task::VerifyCommutant => {
            let r = verify_commutant(&s.model, pencil, &sample_points(set.u_samples, -5.0, 5.0, s.seed))?;
            TaskReport {
                passed: r.max_commutator_norm <= set.commutator_tol
                    && r.reconstruction_error.is_none_or(|e| e <= 1e-12 * pencil.scale().max(1.0)),
                result: TaskResult::VerifyCommutant(r),
            }
        }
        Task::Spectrum => {
            let r = spectrum(&s.model, pencil, &set.spectrum_u)?;
            TaskReport {
                passed: r.max_residual <= set.root_tol * pencil.scale().max(1.0),
                result: TaskResult::Spectrum(r),
            }
        }
        Task::Propagate => {
            let r = propagate(s, pencil)?;
            TaskReport {
                passed: r.row_defect <= 1e-6 && r.col_defect <= 1e-6,
                result: TaskResult::Propagate(r),
            }
        }
        Task::CompareClosedForm => {
            let numeric = match previous {
                Some(p) => p,
                None => propagate(s, pencil)?,
            };
            let r = compare(&s.model, &numeric, set.compare_margin)?;
            TaskReport {
                passed: r.max_residual <= set.compare_tol,
                result: TaskResult::CompareClosedForm(r),
            }
        }
        Task::ConvergenceStudy => {
            let table = cutoff_convergence(&s.model, &set.cutoffs, &set.probes, &s.propagation)?;
            let closed_form = if s.model.kind().has_closed_form() {
                let last = s.model.with_cutoff(*set.cutoffs.last().expect("validated"))?;
                Some(
                    set.probes
                        .iter()
                        .map(|&(i, j)| {
                            let (a, b) = (last.index_of(i), last.index_of(j));
                            model_transition(&last, a.expect("interior"), b.expect("interior"))
                        })
                        .collect::<Result<Vec<f64>>>()?,
                )
            } else {
                None
            };
            TaskReport {
                passed: table.converged,
                result: TaskResult::ConvergenceStudy(ConvergenceResult { table, closed_form }),
            }
        }
    })
}

fn real_border(pencil: &MatrixPencil<f64>, first: usize) -> Vec<f64> {
    (first..pencil.dim()).map(|k| pencil.coeff(0)[(0, k)].re).collect()
}

/// Build the commuting family of a bordered model and check it against `H`.
/// Couplings are read from the degauged pencil so phases are already gone.
pub fn verify_commutant(spec: &ModelSpec, pencil: &MatrixPencil<f64>, us: &[f64]) -> Result<CommutantResult> {
    let symmetry_dim = shared_symmetry_dim(std::slice::from_ref(pencil))?;
    let (family, h, embedding) = match spec {
        ModelSpec::EqualSlope { offsets, .. } => {
            // H(u) with slope b is the slope-one model at u' = b u.
            let p = real_border(pencil, 1);
            let emb = embed_equal_slope(&p, offsets)?;
            let family = maximal_linear_family(&emb.params[0])?;
            (family, build_equal_slope(&p, offsets, 1.0)?, Some(emb))
        }
        ModelSpec::BowTie { slopes, .. } => {
            (bowtie_quadratic_family(&real_border(pencil, 1), slopes)?, pencil.clone(), None)
        }
        ModelSpec::GeneralizedBowTie { slopes, detuning, .. } => {
            let partner = gbt_linear_partner(&real_border(pencil, 2), slopes, *detuning)?;
            let family = CommutingFamily {
                members: vec![partner],
                labels: vec!["I".into()],
                construction: FamilyConstruction::GbtMinimal,
            };
            (family, pencil.clone(), None)
        }
        _ => return Err(Error::Unsupported(format!("no commuting family for {:?}", spec.kind()))),
    };
    let mut worst = family.max_pairwise_commutator(us)?;
    let mut triviality = Vec::with_capacity(family.members.len());
    for (m, label) in family.members.iter().zip(&family.labels) {
        worst = worst.max(commutator_norm(m, &h, us)?);
        if embedding.is_none() {
            let rep = triviality_residual(m, &h)?;
            triviality.push(TrivialityEntry {
                member: label.clone(),
                residual: rep.residual,
                verdict: rep.verdict,
            });
        }
    }
    Ok(CommutantResult {
        construction: family.construction,
        members: family.labels,
        max_commutator_norm: worst,
        triviality,
        symmetry_dim,
        embedding_roots: embedding.as_ref().map(|e| e.roots.clone()),
        reconstruction_error: embedding.map(|e| e.reconstruction_error),
    })
}

fn secular_for(spec: &ModelSpec, pencil: &MatrixPencil<f64>) -> Result<Option<SecularSpec<f64>>> {
    Ok(match spec {
        ModelSpec::BowTie { slopes, .. } => Some(SecularSpec::bowtie(&real_border(pencil, 1), slopes)?),
        ModelSpec::GeneralizedBowTie { slopes, detuning, .. } => Some(SecularSpec::generalized_bowtie(
            &real_border(pencil, 2),
            slopes,
            *detuning,
        )?),
        _ => None,
    })
}

pub fn spectrum(spec: &ModelSpec, pencil: &MatrixPencil<f64>, us: &[f64]) -> Result<SpectrumResult> {
    let secular = secular_for(spec, pencil)?;
    let mut rows = Vec::with_capacity(us.len());
    let mut max_residual: f64 = 0.0;
    let (mut gap, mut gap_u) = (f64::INFINITY, 0.0);
    for &u in us {
        let g = min_gap(pencil, u);
        if g < gap {
            (gap, gap_u) = (g, u);
        }
        let eig = hermitian_eigenvalues(&pencil.eval(u));
        let roots = match &secular {
            Some(sec) if u != 0.0 => Some(char_roots(sec, u)?),
            _ => None,
        };
        match roots {
            Some(r) => {
                let res = r.iter().zip(&eig).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                max_residual = max_residual.max(res);
                rows.push(SpectrumRow {
                    u,
                    levels: r,
                    residual: Some(res),
                });
            }
            None => rows.push(SpectrumRow {
                u,
                levels: eig,
                residual: None,
            }),
        }
    }
    let degeneracy_at_zero = degeneracy_profile(pencil, 0.0, default_cluster_tol(pencil, 0.0));
    Ok(SpectrumResult {
        rows,
        max_residual,
        min_gap: if gap.is_finite() { gap } else { 0.0 },
        min_gap_u: gap_u,
        degeneracy_at_zero,
    })
}

fn propagate(s: &Scenario, pencil: &MatrixPencil<f64>) -> Result<TransitionResult> {
    let initial: Vec<usize> = match &s.settings.initial_states {
        Some(labels) => labels
            .iter()
            .map(|&l| s.model.index_of(l).expect("validated"))
            .collect(),
        None => (0..pencil.dim()).collect(),
    };
    let tm = transition_rows(pencil, &initial, &s.propagation)?;
    let tail_estimate = match &s.settings.extrapolate {
        Some(h) => Some(horizon_extrapolation(pencil, &s.propagation, h)?.tail_estimate),
        None => None,
    };
    Ok(TransitionResult {
        labels: s.model.state_names(),
        initial,
        probabilities: tm.rows_f64(),
        row_defect: tm.row_defect,
        col_defect: tm.col_defect,
        max_norm_defect: tm.max_norm_defect,
        tail_estimate,
    })
}

fn compare(spec: &ModelSpec, numeric: &TransitionResult, margin: usize) -> Result<ComparisonResult> {
    let names = spec.state_names();
    let mut entries = Vec::new();
    let mut max_residual: f64 = 0.0;
    let n = spec.dim();
    for (row, &i) in numeric.initial.iter().enumerate() {
        if !spec.is_interior(spec.label_of(i), margin) {
            continue;
        }
        for j in (0..n).filter(|&j| spec.is_interior(spec.label_of(j), margin)) {
            let closed_form = model_transition(spec, i, j)?;
            let value = numeric.probabilities[row][j];
            let residual = (value - closed_form).abs();
            max_residual = max_residual.max(residual);
            entries.push(ComparisonEntry {
                from: names[i].clone(),
                to: names[j].clone(),
                numeric: value,
                closed_form,
                residual,
            });
        }
    }
    if entries.is_empty() {
        return Err(Error::InvalidScenario(
            "no interior states to compare; lower compare_margin or raise the cutoff".into(),
        ));
    }
    Ok(ComparisonResult { entries, max_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::HalfInteger;

    fn bowtie4() -> ModelSpec {
        ModelSpec::BowTie {
            couplings: vec![1.0, 0.7, 1.3],
            slopes: vec![1.0, -1.0, 2.0],
            coupling_phases: None,
        }
    }

    #[test]
    fn bowtie_verify_and_spectrum() {
        let s = Scenario::new(bowtie4(), vec![Task::VerifyCommutant, Task::Spectrum]);
        let rep = run_scenario(&s).unwrap();
        assert!(rep.all_passed());
        let TaskResult::VerifyCommutant(c) = rep.find(Task::VerifyCommutant).unwrap() else {
            unreachable!()
        };
        assert!(c.max_commutator_norm <= 1e-10);
        assert_eq!(c.symmetry_dim, 1);
        assert_eq!(c.triviality.len(), 4);
        let TaskResult::Spectrum(sp) = rep.find(Task::Spectrum).unwrap() else {
            unreachable!()
        };
        assert!(sp.max_residual <= 1e-10);
        assert!(sp.degeneracy_at_zero.iter().any(|&(v, m)| v.abs() < 1e-9 && m == 2));
    }

    #[test]
    fn lz_compare() {
        let model = ModelSpec::Su2Spin {
            coupling: 1.0,
            spin: HalfInteger::from_twice(1),
        };
        let s = Scenario::new(model, vec![Task::Propagate, Task::CompareClosedForm]);
        let rep = run_scenario(&s).unwrap();
        let TaskResult::CompareClosedForm(c) = rep.find(Task::CompareClosedForm).unwrap() else {
            unreachable!()
        };
        assert!(c.max_residual <= 1e-3);
        assert_eq!(c.entries.len(), 4);
        assert!(rep.all_passed());
    }

    #[test]
    fn validation() {
        let empty = Scenario::new(bowtie4(), vec![]);
        assert!(matches!(run_scenario(&empty), Err(Error::InvalidScenario(_))));
        let wrong = Scenario::new(bowtie4(), vec![Task::CompareClosedForm]);
        assert!(matches!(wrong.validate(), Err(Error::InvalidScenario(_))));
        let mut old = Scenario::new(bowtie4(), vec![Task::Spectrum]);
        old.schema_version = 0;
        assert!(old.validate().is_err());
        let text = r#"{"schema_version": 1, "model": {"kind": "bow_tie", "couplings": [1], "slopes": [1]},
                       "tasks": ["spectrum"], "bogus": 1}"#;
        assert!(Scenario::from_json(text).is_err());
    }

    #[test]
    fn equal_slope_embedding_task() {
        let model = ModelSpec::EqualSlope {
            couplings: vec![1.0, 0.5, 0.3],
            offsets: vec![0.4, -1.0, 2.0],
            slope: 1.0,
            coupling_phases: None,
        };
        let rep = run_scenario(&Scenario::new(model, vec![Task::VerifyCommutant])).unwrap();
        let TaskResult::VerifyCommutant(c) = &rep.results[0].result else {
            unreachable!()
        };
        assert_eq!(c.embedding_roots.as_ref().unwrap().len(), 4);
        assert!(c.reconstruction_error.unwrap() < 1e-12);
        assert!(rep.all_passed());
    }

    #[test]
    fn non_finite_rejected() {
        let s = Scenario::new(bowtie4(), vec![Task::Spectrum]);
        let bad = TaskReport {
            passed: true,
            result: TaskResult::CompareClosedForm(ComparisonResult {
                entries: vec![],
                max_residual: f64::NAN,
            }),
        };
        assert!(ScenarioReport::new(&s, vec![bad], None).is_err());
    }
}
