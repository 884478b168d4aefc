//! Phase-diagram sweeps over relative sparsity `ρ` and measurement count
//! `m`: certify uniqueness of generated signals and overlay `min_τ J(τ)`.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::certify::{certify_general, certify_specialized, CertifyMethod, Verdict, DEFAULT_EPS};
use crate::error::{Error, Result};
use crate::linalg::{diff_operator_1d, DenseMatrix};
use crate::objectives::{ObjectiveCase, ObjectiveSpec};
use crate::par::map_indexed;
use crate::rng::{cell_seed, mix_seed};
use crate::sensing::{
    circle_mask, gaussian_matrix, tomo_system, Mask, MeasurementKind, TomoGeometry, DEFAULT_PERTURB_SCALE,
};
use crate::signals::{gen_gradient_sparse_2d, gen_signal, Grid, SignalSpec, Structure, ValueClass};
use crate::solver::FEAS_TOL;
use crate::statdim::{default_tol_tau, estimate, DEFAULT_SAMPLES};

/// Seed tags separating the streams derived from one cell seed.
const TAG_SIGNAL: u64 = 1;
const TAG_MATRIX: u64 = 2;
const TAG_STATDIM: u64 = 3;

/// `0.05, 0.10, ..., 0.95`.
pub fn default_rho_grid() -> Vec<f64> {
    (1..=19).map(|k| k as f64 * 0.05).collect()
}

fn default_trials() -> usize {
    10
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

fn default_draws() -> usize {
    3
}

fn default_method() -> CertifyMethod {
    CertifyMethod::EpsilonLp
}

fn default_perturb() -> f64 {
    DEFAULT_PERTURB_SCALE
}

fn default_eps() -> f64 {
    DEFAULT_EPS
}

fn default_feas_tol() -> f64 {
    FEAS_TOL
}

fn default_true() -> bool {
    true
}

/// Sweep description; the JSON form of `phase --config`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseConfig {
    pub objective: ObjectiveCase,
    pub class: ValueClass,
    pub structure: Structure,
    /// Signal length, or the image side for 2D.
    pub n: usize,
    #[serde(default = "default_rho_grid")]
    pub rho_grid: Vec<f64>,
    /// Measurement counts; numbers of angles for tomography.
    pub m_grid: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub measurement: MeasurementKind,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_method")]
    pub method: CertifyMethod,
    #[serde(default = "default_samples")]
    pub statdim_samples: usize,
    /// Signals averaged per `ρ` for Monte-Carlo estimates.
    #[serde(default = "default_draws")]
    pub statdim_draws: usize,
    #[serde(default = "default_true")]
    pub with_statdim: bool,
    #[serde(default = "default_perturb")]
    pub perturb_scale: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_feas_tol")]
    pub feas_tol: f64,
}

impl PhaseConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rho_grid.is_empty() || self.m_grid.is_empty() {
            return Err(Error::InvalidInput("rho and m grids must be nonempty".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidInput("trials must be >= 1".into()));
        }
        let sparse = self.structure == Structure::Sparse;
        if sparse != self.objective.is_sparse() {
            return Err(Error::InvalidInput(format!(
                "objective {:?} does not fit the {} structure",
                self.objective, self.structure
            )));
        }
        if self.objective.is_box() && self.class != ValueClass::Binary {
            return Err(Error::InvalidInput("box-constrained objectives need binary signals".into()));
        }
        if self.measurement != MeasurementKind::Gaussian && self.structure != Structure::GradientSparse2d {
            return Err(Error::InvalidInput("tomographic sweeps need 2D images".into()));
        }
        if self.m_grid.contains(&0) {
            return Err(Error::InvalidInput("m grid entries must be >= 1".into()));
        }
        Ok(())
    }

    /// Unknowns of the problem actually certified.
    fn problem(&self) -> Result<Problem> {
        Ok(match self.structure {
            Structure::Sparse => Problem { spec: ObjectiveSpec::sparse(self.objective, self.n)?, grid: None },
            Structure::GradientSparse1d => {
                Problem { spec: ObjectiveSpec::with_analysis(self.objective, diff_operator_1d(self.n)?)?, grid: None }
            }
            Structure::GradientSparse2d => {
                let grid = Grid::new(self.n, self.n, Some(&circle_mask(self.n)))?;
                Problem {
                    spec: ObjectiveSpec::with_analysis(self.objective, grid.gradient_operator())?,
                    grid: Some(grid),
                }
            }
        })
    }
}

/// Objective on the unknowns; 2D images keep only the pixels inside the
/// inscribed circle.
struct Problem {
    spec: ObjectiveSpec,
    grid: Option<Grid>,
}

impl Problem {
    fn signal(&self, cfg: &PhaseConfig, rho: f64, seed: u64) -> Result<Vec<f64>> {
        let spec = SignalSpec { n: cfg.n, rho, class: cfg.class, structure: cfg.structure, seed };
        match &self.grid {
            Some(grid) => Ok(grid.restrict(&gen_gradient_sparse_2d(&spec, Some(grid.mask()))?.pixels)),
            None => gen_signal(&spec),
        }
    }

    fn matrix(&self, cfg: &PhaseConfig, m: usize, seed: u64) -> Result<DenseMatrix> {
        match (cfg.measurement.tomo_variant(), &self.grid) {
            (None, _) => gaussian_matrix(m, self.spec.n(), seed),
            (Some(variant), Some(grid)) => {
                let geom = TomoGeometry::standard(cfg.n, m, Mask::Circle);
                let full = tomo_system(&geom, variant, cfg.perturb_scale, seed)?.matrix;
                Ok(full.select_cols(grid.active()))
            }
            (Some(_), None) => Err(Error::InvalidInput("tomography needs an image grid".into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub rho: f64,
    pub rho_index: usize,
    /// Grid value (angles for tomography).
    pub m_nominal: usize,
    pub m_index: usize,
    /// Rows actually measured.
    pub m: usize,
    pub trials: usize,
    pub successes: usize,
    pub indeterminates: usize,
}

impl CellResult {
    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatdimPoint {
    pub rho: f64,
    pub j_star: f64,
    pub stderr: f64,
    /// Mean relative sparsity of the signals used.
    pub achieved_rho: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PhaseDiagram {
    pub config: PhaseConfig,
    /// `ρ`-major, then `m`.
    pub cells: Vec<CellResult>,
    pub statdim: Vec<StatdimPoint>,
    pub wall_time_s: f64,
}

struct TrialOutcome {
    m: usize,
    verdict: Verdict,
}

fn run_trial(cfg: &PhaseConfig, problem: &Problem, ri: usize, mi: usize, t: usize) -> TrialOutcome {
    let seed = cell_seed(cfg.master_seed, ri, mi, t);
    let m_nominal = cfg.m_grid[mi];
    let attempt = || -> Result<TrialOutcome> {
        let x = problem.signal(cfg, cfg.rho_grid[ri], mix_seed(seed, &[TAG_SIGNAL]))?;
        let a = problem.matrix(cfg, m_nominal, mix_seed(seed, &[TAG_MATRIX]))?;
        let res = match cfg.method {
            CertifyMethod::Specialized => certify_specialized(&a, &problem.spec, &x, cfg.eps, cfg.feas_tol)?,
            method => certify_general(&a, &problem.spec, &x, method, cfg.eps, cfg.feas_tol)?,
        };
        Ok(TrialOutcome { m: a.rows(), verdict: res.verdict })
    };
    attempt().unwrap_or(TrialOutcome { m: 0, verdict: Verdict::Indeterminate })
}

/// One `(ρ, m)` cell from its derived seeds alone.
pub fn run_cell(cfg: &PhaseConfig, rho_index: usize, m_index: usize) -> Result<CellResult> {
    cfg.validate()?;
    let problem = cfg.problem()?;
    let outcomes: Vec<TrialOutcome> =
        (0..cfg.trials).map(|t| run_trial(cfg, &problem, rho_index, m_index, t)).collect();
    Ok(collect_cell(cfg, rho_index, m_index, &outcomes))
}

fn collect_cell(cfg: &PhaseConfig, ri: usize, mi: usize, outcomes: &[TrialOutcome]) -> CellResult {
    CellResult {
        rho: cfg.rho_grid[ri],
        rho_index: ri,
        m_nominal: cfg.m_grid[mi],
        m_index: mi,
        m: outcomes.iter().map(|o| o.m).max().unwrap_or(0),
        trials: outcomes.len(),
        successes: outcomes.iter().filter(|o| o.verdict == Verdict::Unique).count(),
        indeterminates: outcomes.iter().filter(|o| o.verdict == Verdict::Indeterminate).count(),
    }
}

/// `min_τ J(τ)` at one `ρ`: closed form on one signal for F1-F3, mean of
/// Monte-Carlo estimates over `statdim_draws` signals otherwise.
pub fn statdim_point(cfg: &PhaseConfig, rho_index: usize) -> Result<StatdimPoint> {
    let problem = cfg.problem()?;
    let rho = cfg.rho_grid[rho_index];
    let closed = cfg.objective.is_sparse();
    let draws = if closed { 1 } else { cfg.statdim_draws.max(1) };
    let (mut j, mut se2, mut achieved) = (0.0, 0.0, 0.0);
    for d in 0..draws {
        let seed = mix_seed(cfg.master_seed, &[TAG_STATDIM, rho_index as u64, d as u64]);
        let x = problem.signal(cfg, rho, seed)?;
        let est =
            estimate(&problem.spec, &x, cfg.statdim_samples, mix_seed(seed, &[TAG_STATDIM]), default_tol_tau(&x))?;
        j += est.j_star;
        se2 += est.stderr * est.stderr;
        let dx = problem.spec.d.matvec(&x);
        achieved += dx.iter().filter(|v| v.abs() > crate::objectives::ACT_TOL).count() as f64 / dx.len() as f64;
    }
    let k = draws as f64;
    Ok(StatdimPoint { rho, j_star: j / k, stderr: se2.sqrt() / k, achieved_rho: achieved / k })
}

pub fn run_phase_experiment(cfg: &PhaseConfig) -> Result<PhaseDiagram> {
    cfg.validate()?;
    let start = Instant::now();
    let problem = cfg.problem()?;
    let (nr, nm, nt) = (cfg.rho_grid.len(), cfg.m_grid.len(), cfg.trials);
    let outcomes = map_indexed(nr * nm * nt, |k| {
        let (ri, rest) = (k / (nm * nt), k % (nm * nt));
        run_trial(cfg, &problem, ri, rest / nt, rest % nt)
    });
    let cells = (0..nr * nm).map(|c| collect_cell(cfg, c / nm, c % nm, &outcomes[c * nt..(c + 1) * nt])).collect();
    let statdim = if cfg.with_statdim {
        (0..nr).map(|ri| statdim_point(cfg, ri)).collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    Ok(PhaseDiagram { config: cfg.clone(), cells, statdim, wall_time_s: start.elapsed().as_secs_f64() })
}

impl PhaseDiagram {
    pub fn cell(&self, rho_index: usize, m_index: usize) -> &CellResult {
        &self.cells[rho_index * self.config.m_grid.len() + m_index]
    }

    /// `m` where the success rate first reaches 1/2 along the grid,
    /// interpolated linearly from the cell below. `None` if never reached.
    pub fn transition(&self, rho_index: usize) -> Option<f64> {
        let nm = self.config.m_grid.len();
        let row: Vec<&CellResult> = (0..nm).map(|j| self.cell(rho_index, j)).collect();
        let j = row.iter().position(|c| c.success_rate() >= 0.5)?;
        if j == 0 {
            return Some(row[0].m as f64);
        }
        let (a, b) = (row[j - 1], row[j]);
        let (fa, fb) = (a.success_rate(), b.success_rate());
        Some(a.m as f64 + (0.5 - fa) / (fb - fa) * (b.m as f64 - a.m as f64))
    }

    /// `rho,m,trials,successes,indeterminates,statdim`.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("rho,m,trials,successes,indeterminates,statdim\n");
        for c in &self.cells {
            let sd = self.statdim.get(c.rho_index).map(|p| format!("{}", p.j_star)).unwrap_or_default();
            let _ = writeln!(out, "{},{},{},{},{},{}", c.rho, c.m, c.trials, c.successes, c.indeterminates, sd);
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    /// Plain PGM, one pixel per cell, `ρ` left to right, `m` bottom to top.
    pub fn to_pgm_string(&self, overlay: bool) -> String {
        let (nr, nm) = (self.config.rho_grid.len(), self.config.m_grid.len());
        let mut px = vec![vec![0u8; nr]; nm];
        for c in &self.cells {
            px[nm - 1 - c.m_index][c.rho_index] = (255.0 * c.success_rate()).round() as u8;
        }
        if overlay {
            for (ri, p) in self.statdim.iter().enumerate() {
                let m_of = |j: usize| self.cell(ri, j).m as f64;
                if let Some(j) =
                    (0..nm).min_by(|&a, &b| (m_of(a) - p.j_star).abs().total_cmp(&(m_of(b) - p.j_star).abs()))
                {
                    px[nm - 1 - j][ri] = 128;
                }
            }
        }
        let mut out = format!("P2\n{nr} {nm}\n255\n");
        for row in px {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Writes the diagram; with `overlay_path` also the curve-burned copy.
    pub fn write_pgm(&self, path: impl AsRef<Path>, overlay_path: Option<&Path>) -> Result<()> {
        std::fs::write(path, self.to_pgm_string(false))?;
        if let Some(p) = overlay_path {
            std::fs::write(p, self.to_pgm_string(true))?;
        }
        Ok(())
    }
}

/// One CSV row read back.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub rho: f64,
    pub m: usize,
    pub trials: usize,
    pub successes: usize,
    pub indeterminates: usize,
    pub statdim: Option<f64>,
}

pub fn read_csv_str(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == "rho,m,trials,successes,indeterminates,statdim" => {}
        _ => return Err(Error::Parse("missing phase CSV header".into())),
    }
    let bad = |l: &str| Error::Parse(format!("bad phase CSV row '{l}'"));
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').map(str::trim).collect();
            if f.len() != 6 {
                return Err(bad(l));
            }
            Ok(CsvRow {
                rho: f[0].parse().map_err(|_| bad(l))?,
                m: f[1].parse().map_err(|_| bad(l))?,
                trials: f[2].parse().map_err(|_| bad(l))?,
                successes: f[3].parse().map_err(|_| bad(l))?,
                indeterminates: f[4].parse().map_err(|_| bad(l))?,
                statdim: if f[5].is_empty() { None } else { Some(f[5].parse().map_err(|_| bad(l))?) },
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(objective: ObjectiveCase, class: ValueClass, structure: Structure, n: usize) -> PhaseConfig {
        PhaseConfig {
            objective,
            class,
            structure,
            n,
            rho_grid: vec![0.1, 0.3],
            m_grid: vec![4, 12, n],
            trials: 3,
            measurement: MeasurementKind::Gaussian,
            master_seed: 42,
            method: CertifyMethod::EpsilonLp,
            statdim_samples: 200,
            statdim_draws: 1,
            with_statdim: true,
            perturb_scale: DEFAULT_PERTURB_SCALE,
            eps: DEFAULT_EPS,
            feas_tol: FEAS_TOL,
        }
    }

    #[test]
    fn deterministic_and_cell_independent() {
        let cfg = small(ObjectiveCase::F1, ValueClass::Real, Structure::Sparse, 20);
        let a = run_phase_experiment(&cfg).unwrap();
        let b = run_phase_experiment(&cfg).unwrap();
        assert_eq!(a.to_csv_string(), b.to_csv_string());
        assert_eq!(&run_cell(&cfg, 1, 1).unwrap(), a.cell(1, 1));
        for ri in 0..2 {
            let full = a.cell(ri, 2);
            assert_eq!(full.successes, full.trials, "m = n must certify");
        }
    }

    #[test]
    fn csv_round_trip_and_pgm() {
        let cfg = small(ObjectiveCase::F4, ValueClass::Real, Structure::GradientSparse1d, 20);
        let d = run_phase_experiment(&PhaseConfig { rho_grid: vec![0.2, 0.4], m_grid: vec![5, 20], ..cfg }).unwrap();
        let rows = read_csv_str(&d.to_csv_string()).unwrap();
        assert_eq!(rows.len(), 4);
        for (r, c) in rows.iter().zip(&d.cells) {
            assert_eq!((r.m, r.trials, r.successes, r.indeterminates), (c.m, c.trials, c.successes, c.indeterminates));
        }
        let pgm = d.to_pgm_string(false);
        assert!(pgm.starts_with("P2\n2 2\n255\n"));
        // top row is the largest m, where every trial certifies
        assert_eq!(pgm.lines().nth(3).unwrap(), "255 255");
    }

    #[test]
    fn config_json_defaults() {
        let cfg: PhaseConfig = serde_json::from_str(
            r#"{"objective":"f1","class":"real","structure":"sparse","n":30,"m_grid":[5,10],"measurement":"gaussian"}"#,
        )
        .unwrap();
        assert_eq!(cfg.rho_grid.len(), 19);
        assert_eq!(cfg.trials, 10);
        assert!(cfg.validate().is_ok());
        let bad = PhaseConfig { objective: ObjectiveCase::F4, ..cfg };
        assert!(bad.validate().is_err());
    }
}
