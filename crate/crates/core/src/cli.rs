//! Command implementations behind the `nhse` binary.
//!
//! Settings are resolved in three layers: built-in defaults, then the JSON
//! config file, then command-line flags. Every command writes its primary
//! output as CSV or JSON into the output directory; `--svg` adds a figure.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::{boundary_determinant, continuum_ratio, CoefficientVariant};
use crate::error::{Error, Result};
use crate::model::{build_bdg, validate_spec, Boundary, ModelSpec};
use crate::nonbloch::{gbz_row, zak_phase, Band};
use crate::output::{fmt_f64, write_csv, write_json, Plot, Series, Style};
use crate::spectra::{classify_states, density_profile, eigen_right, eigenvalues, skin_metrics, Eigenpairs, SkinOptions, StateClass, StateRecord};
use crate::symmetry::{default_candidates, theorem_verdict, Verdict, VerdictKind, DEFAULT_TOLERANCE};

/// Optional overrides, shared by the config file and the flag parser.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Potential strength V.
    #[arg(long = "V", id = "V", allow_hyphen_values = true)]
    #[serde(rename = "V")]
    pub big_v: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Number of sites L.
    #[arg(long = "L", id = "L")]
    #[serde(rename = "L")]
    pub num_sites: Option<usize>,
    /// `obc` or `pbc`.
    #[arg(long, value_parser = parse_boundary)]
    pub boundary: Option<Boundary>,
    /// Edge window in sites.
    #[arg(long)]
    pub ell: Option<usize>,
    #[arg(long)]
    pub w_edge: Option<f64>,
    #[arg(long)]
    pub tau_skin: Option<f64>,
    /// Commutator tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Wilson loop grid size.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Number of theta values in a sweep.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Number of energies sampled for the GBZ report.
    #[arg(long)]
    pub energies: Option<usize>,
    /// Chain length for the boundary check.
    #[arg(long)]
    pub l_check: Option<usize>,
}

fn parse_boundary(s: &str) -> std::result::Result<Boundary, String> {
    match s {
        "obc" => Ok(Boundary::Obc),
        "pbc" => Ok(Boundary::Pbc),
        other => Err(format!("expected `obc` or `pbc`, got `{other}`")),
    }
}

impl Settings {
    /// Reads a JSON config file. Unknown keys are rejected.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// `other` wins wherever it is set.
    pub fn overlay(self, other: &Settings) -> Settings {
        Settings {
            t: other.t.or(self.t),
            gamma: other.gamma.or(self.gamma),
            delta: other.delta.or(self.delta),
            big_v: other.big_v.or(self.big_v),
            theta: other.theta.or(self.theta),
            num_sites: other.num_sites.or(self.num_sites),
            boundary: other.boundary.or(self.boundary),
            ell: other.ell.or(self.ell),
            w_edge: other.w_edge.or(self.w_edge),
            tau_skin: other.tau_skin.or(self.tau_skin),
            tol: other.tol.or(self.tol),
            grid: other.grid.or(self.grid),
            steps: other.steps.or(self.steps),
            energies: other.energies.or(self.energies),
            l_check: other.l_check.or(self.l_check),
        }
    }
}

/// Fully resolved settings for one command.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub skin: SkinOptions,
    pub tol: f64,
    pub grid: usize,
    pub steps: usize,
    pub num_energies: usize,
    pub l_check: usize,
    pub output_dir: PathBuf,
    pub emit_svg: bool,
}

impl RunConfig {
    pub fn resolve(config: Option<&Path>, flags: &Settings, output_dir: &Path, emit_svg: bool) -> Result<Self> {
        let file = match config {
            Some(p) => Settings::from_file(p)?,
            None => Settings::default(),
        };
        let s = file.overlay(flags);
        let d = ModelSpec::default();
        let model = validate_spec(ModelSpec {
            t: s.t.unwrap_or(d.t),
            gamma: s.gamma.unwrap_or(d.gamma),
            delta: s.delta.unwrap_or(d.delta),
            big_v: s.big_v.unwrap_or(d.big_v),
            theta: s.theta.unwrap_or(d.theta),
            num_sites: s.num_sites.unwrap_or(d.num_sites),
            boundary: s.boundary.unwrap_or(d.boundary),
        })?;
        let ds = SkinOptions::default();
        let skin = SkinOptions {
            ell: s.ell.unwrap_or(ds.ell).min(model.num_sites / 2).max(1),
            w_edge: s.w_edge.unwrap_or(ds.w_edge),
            tau_skin: s.tau_skin.unwrap_or(ds.tau_skin),
        };
        if let Some(ell) = s.ell {
            if ell < 1 || ell > model.num_sites / 2 {
                return Err(Error::InvalidWindow { ell, max: model.num_sites / 2 });
            }
        }
        let tol = s.tol.unwrap_or(DEFAULT_TOLERANCE);
        for (name, value) in [("tol", tol), ("w_edge", skin.w_edge), ("tau_skin", skin.tau_skin)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidThreshold { name, value });
            }
        }
        fs::create_dir_all(output_dir)?;
        Ok(Self {
            model,
            skin,
            tol,
            grid: s.grid.unwrap_or(4096),
            steps: s.steps.unwrap_or(24),
            num_energies: s.energies.unwrap_or(50),
            l_check: s.l_check.unwrap_or(6),
            output_dir: output_dir.to_path_buf(),
            emit_svg,
        })
    }

    pub fn with_model(model: ModelSpec, output_dir: &Path) -> Result<Self> {
        let model = validate_spec(model)?;
        let mut skin = SkinOptions::default();
        skin.ell = skin.ell.min(model.num_sites / 2).max(1);
        Ok(Self {
            model,
            skin,
            tol: DEFAULT_TOLERANCE,
            grid: 4096,
            steps: 24,
            num_energies: 50,
            l_check: 6,
            output_dir: output_dir.to_path_buf(),
            emit_svg: false,
        })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.output_dir.join(name)
    }
}

/// Eigenpairs of the configured chain, sorted by `(Re E, Im E)`.
pub fn sorted_states(spec: &ModelSpec) -> Result<Eigenpairs> {
    Ok(eigen_right(&build_bdg(spec)?)?.sorted())
}

/// `k` evenly spaced quantiles of `n` ordered items.
fn quantile_positions(n: usize, k: usize) -> Vec<usize> {
    (0..k).map(|i| ((2 * i + 1) * n) / (2 * k)).collect()
}

/// Which states `profiles` writes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Selection {
    /// `k` bulk states at evenly spaced quantiles of `Re E`.
    Bulk(usize),
    EdgeAll,
    /// Positions in the sorted spectrum.
    Indices(Vec<usize>),
}

impl std::str::FromStr for Selection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::SelectionOutOfRange(s.to_string());
        if let Some(k) = s.strip_prefix("bulk:") {
            let k: usize = k.parse().map_err(|_| bad())?;
            return if k == 0 { Err(bad()) } else { Ok(Selection::Bulk(k)) };
        }
        if s == "edge:all" {
            return Ok(Selection::EdgeAll);
        }
        let idx = s
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| bad())?;
        if idx.is_empty() {
            return Err(bad());
        }
        Ok(Selection::Indices(idx))
    }
}

pub fn select_states(records: &[StateRecord], selection: &Selection) -> Result<Vec<usize>> {
    match selection {
        Selection::Bulk(k) => {
            let bulk: Vec<usize> = records.iter().filter(|r| r.class == StateClass::Bulk).map(|r| r.index).collect();
            if *k > bulk.len() {
                return Err(Error::SelectionOutOfRange(format!("bulk:{k} with {} bulk states", bulk.len())));
            }
            Ok(quantile_positions(bulk.len(), *k).into_iter().map(|p| bulk[p]).collect())
        }
        Selection::EdgeAll => Ok(records.iter().filter(|r| r.class == StateClass::Edge).map(|r| r.index).collect()),
        Selection::Indices(idx) => {
            if let Some(bad) = idx.iter().find(|&&i| i >= records.len()) {
                return Err(Error::SelectionOutOfRange(format!("index {bad} with {} states", records.len())));
            }
            Ok(idx.clone())
        }
    }
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let pairs = sorted_states(&cfg.model)?;
    let records = classify_states(&pairs, cfg.model.num_sites, cfg.skin.ell, cfg.skin.w_edge)?;
    let csv_path = cfg.path("spectrum.csv");
    write_csv(
        &csv_path,
        &["index", "re_E", "im_E", "class", "com", "edge_weight", "pr"],
        records.iter().map(|r| {
            vec![
                r.index.to_string(),
                fmt_f64(r.energy.0),
                fmt_f64(r.energy.1),
                r.class.as_str().to_string(),
                fmt_f64(r.center_of_mass),
                fmt_f64(r.edge_weight),
                fmt_f64(r.participation_ratio),
            ]
        }),
    )?;
    let mut out = vec![csv_path];
    if cfg.emit_svg {
        let re = records.iter().map(|r| (r.index as f64, r.energy.0)).collect();
        let im = records.iter().map(|r| (r.index as f64, r.energy.1)).collect();
        let path = cfg.path("spectrum.svg");
        Plot::new(&format!("Spectrum, L = {} ({})", cfg.model.num_sites, cfg.model.boundary), "index", "E")
            .with(Series::new("Re E", re, Style::Scatter))
            .with(Series::new("Im E", im, Style::Scatter))
            .write(&path)?;
        out.push(path);
    }
    Ok(out)
}

pub fn cmd_profiles(cfg: &RunConfig, selection: &Selection) -> Result<Vec<PathBuf>> {
    let sites = cfg.model.num_sites;
    let pairs = sorted_states(&cfg.model)?;
    let records = classify_states(&pairs, sites, cfg.skin.ell, cfg.skin.w_edge)?;
    let chosen = select_states(&records, selection)?;
    let profiles = chosen
        .iter()
        .map(|&i| density_profile(&pairs.vectors[i], sites).map(|p| (i, p)))
        .collect::<Result<Vec<_>>>()?;
    let csv_path = cfg.path("profiles.csv");
    write_csv(
        &csv_path,
        &["state_index", "site", "density"],
        profiles.iter().flat_map(|(i, p)| {
            p.site_density
                .iter()
                .enumerate()
                .map(move |(n, rho)| vec![i.to_string(), (n + 1).to_string(), fmt_f64(*rho)])
        }),
    )?;
    let mut out = vec![csv_path];
    if cfg.emit_svg {
        let mut plot = Plot::new("State profiles", "site", "density");
        for (i, p) in &profiles {
            let pts = p.site_density.iter().enumerate().map(|(n, r)| ((n + 1) as f64, *r)).collect();
            let e = pairs.values[*i];
            plot = plot.with(Series::new(format!("#{i} E = {:.3}{:+.3}i", e.re, e.im), pts, Style::Line));
        }
        let path = cfg.path("profiles.svg");
        plot.write(&path)?;
        out.push(path);
    }
    Ok(out)
}

pub fn verdict_for(spec: &ModelSpec, tol: f64) -> Result<Verdict> {
    let h = build_bdg(spec)?;
    theorem_verdict(&h, &default_candidates(spec.num_sites)?, tol)
}

pub fn cmd_symmetry(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let verdict = verdict_for(&cfg.model, cfg.tol)?;
    let path = cfg.path("verdict.json");
    write_json(&path, &verdict)?;
    Ok(vec![path])
}

/// `n` bulk energies of the open chain at evenly spaced `Re E` quantiles.
pub fn bulk_energies(spec: &ModelSpec, skin: SkinOptions, n: usize) -> Result<Vec<Complex64>> {
    let open = spec.clone().with_boundary(Boundary::Obc);
    let pairs = sorted_states(&open)?;
    let records = classify_states(&pairs, open.num_sites, skin.ell, skin.w_edge)?;
    let chosen = select_states(&records, &Selection::Bulk(n))?;
    Ok(chosen.into_iter().map(|i| pairs.values[i]).collect())
}

pub fn cmd_gbz(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    if cfg.model.big_v != 0.0 {
        return Err(Error::UnsupportedPotential(cfg.model.big_v));
    }
    let energies = bulk_energies(&cfg.model, cfg.skin, cfg.num_energies)?;
    let rows = energies
        .par_iter()
        .map(|&e| gbz_row(&cfg.model, e))
        .collect::<Result<Vec<_>>>()?;
    let csv_path = cfg.path("gbz.csv");
    write_csv(
        &csv_path,
        &["re_E", "im_E", "m1", "m2", "m3", "m4", "case", "mid_gap"],
        rows.iter().map(|r| {
            let mut v = vec![fmt_f64(r.energy.0), fmt_f64(r.energy.1)];
            v.extend(r.sorted_moduli.iter().map(|m| fmt_f64(*m)));
            v.push(r.case.to_string());
            v.push(fmt_f64(r.mid_gap));
            v
        }),
    )?;
    let mut out = vec![csv_path];
    if cfg.emit_svg {
        let mut plot = Plot::new("Root moduli", "Re E", "|beta|");
        for (k, name) in ["m1", "m2", "m3", "m4"].iter().enumerate() {
            let pts = rows.iter().map(|r| (r.energy.0, r.sorted_moduli[k])).collect();
            plot = plot.with(Series::new(*name, pts, Style::Scatter));
        }
        let path = cfg.path("gbz.svg");
        plot.write(&path)?;
        out.push(path);
    }
    Ok(out)
}

pub fn cmd_zak(cfg: &RunConfig, band: Band) -> Result<Vec<PathBuf>> {
    let z = zak_phase(&cfg.model, band, cfg.grid)?;
    let path = cfg.path("zak.json");
    write_json(&path, &z)?;
    Ok(vec![path])
}

/// One point of a theta sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub step: usize,
    pub theta: f64,
    pub residual: Option<f64>,
    pub verdict: VerdictKind,
    pub skew: f64,
    pub accumulation: f64,
    pub skin_detected: bool,
}

pub fn sweep_point(base: &ModelSpec, skin: SkinOptions, tol: f64, step: usize, steps: usize) -> Result<SweepRow> {
    let theta = 2.0 * PI * step as f64 / steps as f64;
    let spec = validate_spec(ModelSpec { theta, ..base.clone() })?;
    let verdict = verdict_for(&spec, tol)?;
    let report = skin_metrics(&sorted_states(&spec)?, spec.num_sites, skin)?;
    Ok(SweepRow {
        step,
        theta,
        residual: verdict.residual,
        verdict: verdict.kind,
        skew: report.skew,
        accumulation: report.accumulation,
        skin_detected: report.skin_detected,
    })
}

pub fn theta_sweep(cfg: &RunConfig) -> Result<Vec<SweepRow>> {
    if cfg.steps < 6 {
        return Err(Error::InvalidThreshold { name: "steps", value: cfg.steps as f64 });
    }
    (0..cfg.steps)
        .into_par_iter()
        .map(|s| sweep_point(&cfg.model, cfg.skin, cfg.tol, s, cfg.steps))
        .collect()
}

pub fn cmd_sweep_theta(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let rows = theta_sweep(cfg)?;
    let csv_path = cfg.path("sweep.csv");
    write_csv(
        &csv_path,
        &["step", "theta", "residual", "verdict", "skew", "accumulation", "skin_detected"],
        rows.iter().map(|r| {
            vec![
                r.step.to_string(),
                fmt_f64(r.theta),
                r.residual.map_or_else(|| "nan".to_string(), fmt_f64),
                r.verdict.to_string(),
                fmt_f64(r.skew),
                fmt_f64(r.accumulation),
                r.skin_detected.to_string(),
            ]
        }),
    )?;
    let mut out = vec![csv_path];
    if cfg.emit_svg {
        let res = rows
            .iter()
            .filter_map(|r| r.residual.map(|x| (r.theta, x.max(1e-300).log10())))
            .collect();
        let acc = rows.iter().map(|r| (r.theta, r.accumulation)).collect();
        let path = cfg.path("sweep.svg");
        Plot::new("Theta sweep", "theta", "log10 residual / accumulation")
            .with(Series::new("log10 residual", res, Style::Line))
            .with(Series::new("accumulation", acc, Style::Line))
            .write(&path)?;
        out.push(path);
    }
    Ok(out)
}

/// One energy of the boundary check.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryRow {
    pub energy: Complex64,
    pub sites: usize,
    pub norm_det: f64,
    pub lhs_abs: f64,
    pub rhs_abs: f64,
}

pub fn boundary_rows(spec: &ModelSpec, sites: usize, variant: CoefficientVariant) -> Result<Vec<BoundaryRow>> {
    if spec.big_v != 0.0 {
        return Err(Error::UnsupportedPotential(spec.big_v));
    }
    let chain = validate_spec(spec.clone().with_sites(sites).with_boundary(Boundary::Obc))?;
    let mut energies = eigenvalues(&build_bdg(&chain)?)?;
    energies.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    energies
        .par_iter()
        .map(|&e| {
            let det = boundary_determinant(&chain, e, sites, variant)?;
            let (lhs_abs, rhs_abs) = match continuum_ratio(&chain, e, sites, variant) {
                Ok(r) => (r.lhs.norm(), r.rhs.norm()),
                Err(Error::WrongCase | Error::SingularDenominator { .. }) => (f64::NAN, f64::NAN),
                Err(e) => return Err(e),
            };
            Ok(BoundaryRow { energy: e, sites, norm_det: det.norm(), lhs_abs, rhs_abs })
        })
        .collect()
}

pub fn cmd_boundary(cfg: &RunConfig, variant: CoefficientVariant) -> Result<Vec<PathBuf>> {
    let rows = boundary_rows(&cfg.model, cfg.l_check, variant)?;
    let csv_path = cfg.path("boundary.csv");
    write_csv(
        &csv_path,
        &["re_E", "im_E", "L", "norm_det", "lhs_abs", "rhs_abs"],
        rows.iter().map(|r| {
            vec![
                fmt_f64(r.energy.re),
                fmt_f64(r.energy.im),
                r.sites.to_string(),
                fmt_f64(r.norm_det),
                fmt_f64(r.lhs_abs),
                fmt_f64(r.rhs_abs),
            ]
        }),
    )?;
    let mut out = vec![csv_path];
    if cfg.emit_svg {
        let pts = rows.iter().map(|r| (r.energy.re, r.norm_det.max(1e-300).log10())).collect();
        let path = cfg.path("boundary.svg");
        Plot::new(&format!("Boundary determinant, L = {}", cfg.l_check), "Re E", "log10 |det|")
            .with(Series::new("exact eigenvalues", pts, Style::Scatter))
            .write(&path)?;
        out.push(path);
    }
    Ok(out)
}
