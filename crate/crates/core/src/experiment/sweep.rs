use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use super::run::{assemble, build_kernel, decompose};
use super::RunConfig;
use crate::analysis::WidthReport;
use crate::pdc::SchmidtDecomposition;
use crate::sfg::{SfgSpectrum, SumGrid, TransferKernel};
use crate::{Error, Result};

/// Environment variable holding the number of sweep workers.
pub const WORKERS_ENV: &str = "SFGSIM_WORKERS";
pub const SWEEP_FILE: &str = "sweep.tsv";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    /// Waist position, mm.
    Z0,
    /// External incidence angle, degrees.
    Alpha,
    /// Pump intensity FWHM duration, fs.
    PumpDuration,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Z0 => "z0_mm",
            SweepVariable::Alpha => "alpha_deg",
            SweepVariable::PumpDuration => "pump_duration_fs",
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "z0" | "z0_mm" => Ok(SweepVariable::Z0),
            "alpha" | "alpha_deg" => Ok(SweepVariable::Alpha),
            "pump_duration" | "pump_duration_fs" => Ok(SweepVariable::PumpDuration),
            other => Err(Error::validation(
                "sweep.variable",
                format!("unknown variable `{other}` (z0, alpha, pump_duration)"),
            )),
        }
    }
}

/// Linear sweep of one variable over `steps` points from `start` to `stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn new(variable: SweepVariable, start: f64, stop: f64, steps: usize) -> Result<Self> {
        if steps < 2 {
            return Err(Error::validation("sweep.steps", "need at least 2 points"));
        }
        if !(start.is_finite() && stop.is_finite()) || start == stop {
            return Err(Error::validation(
                "sweep.start",
                "start and stop must be finite and distinct",
            ));
        }
        Ok(Self {
            variable,
            start,
            stop,
            steps,
        })
    }

    /// Angle sweep over ±10° external.
    pub fn default_alpha() -> Self {
        Self::new(SweepVariable::Alpha, -10.0, 10.0, 41).expect("valid")
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.steps - 1;
        (0..self.steps)
            .map(|i| {
                if i == n {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / n as f64
                }
            })
            .collect()
    }

    fn configure(&self, base: &RunConfig, value: f64) -> Result<RunConfig> {
        let mut file = base.file().clone();
        match self.variable {
            SweepVariable::Z0 => file.sfg.z0_mm = value,
            SweepVariable::Alpha => file.sfg.alpha_deg = value,
            SweepVariable::PumpDuration => file.pdc.pump_duration_fs = value,
        }
        RunConfig::resolve(file)
    }
}

/// What each sweep point reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Probe {
    FullSpectrum,
    /// The SFG signal at the lattice point nearest this sum wavelength.
    ValueAt {
        wavelength_nm: f64,
    },
}

#[derive(Debug, Clone)]
pub struct PointResult {
    pub schmidt_number: Option<f64>,
    pub widths: Option<WidthReport>,
    /// Reported (possibly corrected) spectrum at the probe points.
    pub spectrum: SfgSpectrum,
}

impl PointResult {
    /// `(wavelength, coherent, incoherent, total)` at the first probe point.
    pub fn first(&self) -> (f64, f64, f64, f64) {
        let s = &self.spectrum;
        (
            s.wavelengths_nm()[0],
            s.coherent()[0],
            s.incoherent()[0],
            s.total()[0],
        )
    }
}

#[derive(Debug)]
pub struct SweepPoint {
    pub value: f64,
    pub outcome: Result<PointResult>,
}

/// Worker count from [`WORKERS_ENV`], or rayon's default when unset.
pub fn worker_count() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::validation(
                WORKERS_ENV,
                format!("expected a positive integer, got `{s}`"),
            )),
        },
    }
}

fn probe_config(config: RunConfig, probe: &Probe) -> Result<RunConfig> {
    match probe {
        Probe::FullSpectrum => Ok(config),
        Probe::ValueAt { wavelength_nm } => {
            let sg = SumGrid::nearest_nm(*config.grid(), *wavelength_nm)?;
            config.with_sum_grid(sg)
        }
    }
}

fn decomposition_key(c: &RunConfig) -> String {
    format!(
        "{:?}|{:?}|{:?}|{:?}|{:?}|{:?}",
        c.file().pdc,
        c.grid(),
        c.truncation(),
        c.theta(),
        c.pump(),
        c.bbo_length_m()
    )
}

fn kernel_key(c: &RunConfig) -> String {
    format!(
        "{:?}|{:?}|{:?}",
        c.setup().geometry(),
        c.setup().effective_length_m(),
        c.sum_grid()
    )
}

/// Runs every point of `spec`. Decompositions and kernels are computed once
/// per distinct input and shared between points; failures are recorded per
/// point. Rows come back in sweep order.
pub fn run_sweep(base: &RunConfig, spec: &SweepSpec, probe: &Probe) -> Result<Vec<SweepPoint>> {
    let work = || sweep_inner(base, spec, probe);
    match worker_count()? {
        None => Ok(work()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            Ok(pool.install(work))
        }
    }
}

fn sweep_inner(base: &RunConfig, spec: &SweepSpec, probe: &Probe) -> Vec<SweepPoint> {
    let values = spec.values();
    let configs: Vec<Result<RunConfig>> = values
        .iter()
        .map(|&v| spec.configure(base, v).and_then(|c| probe_config(c, probe)))
        .collect();

    let mut dkeys = BTreeMap::new();
    let mut kkeys = BTreeMap::new();
    for c in configs.iter().flatten() {
        dkeys
            .entry(decomposition_key(c))
            .or_insert_with(|| c.clone());
        kkeys.entry(kernel_key(c)).or_insert_with(|| c.clone());
    }
    let decomps: BTreeMap<String, Arc<Result<SchmidtDecomposition>>> = dkeys
        .into_par_iter()
        .map(|(k, c)| (k, Arc::new(decompose(&c))))
        .collect();
    let kernels: BTreeMap<String, Arc<Result<TransferKernel>>> = kkeys
        .into_par_iter()
        .map(|(k, c)| (k, Arc::new(build_kernel(&c))))
        .collect();

    let outcomes: Vec<Result<PointResult>> = configs
        .into_par_iter()
        .map(|c| {
            let c = c?;
            let d = match decomps[&decomposition_key(&c)].as_ref() {
                Ok(d) => d,
                Err(e) => return Err(e.clone()),
            };
            let k = match kernels[&kernel_key(&c)].as_ref() {
                Ok(k) => k,
                Err(e) => return Err(e.clone()),
            };
            let sim = assemble(&c, d, k)?;
            Ok(PointResult {
                schmidt_number: sim.schmidt_number.ok(),
                widths: sim.widths.ok(),
                spectrum: sim.reported,
            })
        })
        .collect();
    values
        .into_iter()
        .zip(outcomes)
        .map(|(value, outcome)| SweepPoint { value, outcome })
        .collect()
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), |v| format!("{v:.10e}"))
}

/// Writes `sweep.tsv` and, for full-spectrum probes, one spectrum file per
/// successful point under `points/`.
pub fn write_sweep(
    dir: &Path,
    base: &RunConfig,
    spec: &SweepSpec,
    probe: &Probe,
    points: &[SweepPoint],
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(SWEEP_FILE);
    let mut out = String::new();
    use std::fmt::Write as _;
    let _ = writeln!(out, "# config_sha256 {}", base.hash());
    let _ = writeln!(
        out,
        "# variable {} start {} stop {} steps {}",
        spec.variable, spec.start, spec.stop, spec.steps
    );
    match probe {
        Probe::FullSpectrum => {
            let _ = writeln!(out, "# probe full_spectrum (files in points/)");
        }
        Probe::ValueAt { wavelength_nm } => {
            let _ = writeln!(out, "# probe value_at {wavelength_nm} nm");
        }
    }
    let _ = writeln!(out, "# lambda_correction {}", base.correction());
    let _ = writeln!(
        out,
        "# columns: index {} schmidt_number ratio fwhm_coherent_nm fwhm_incoherent_nm probe_wavelength_nm coherent incoherent total error",
        spec.variable
    );
    let mut paths = vec![path.clone()];
    for (i, p) in points.iter().enumerate() {
        match &p.outcome {
            Ok(r) => {
                let (l, c, inc, t) = match probe {
                    Probe::ValueAt { .. } => {
                        let (l, c, inc, t) = r.first();
                        (Some(l), Some(c), Some(inc), Some(t))
                    }
                    Probe::FullSpectrum => (None, None, None, None),
                };
                let _ = writeln!(
                    out,
                    "{i}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t-",
                    p.value,
                    opt(r.schmidt_number),
                    opt(r.widths.map(|w| w.ratio)),
                    opt(r.widths.map(|w| w.fwhm_coherent_nm)),
                    opt(r.widths.map(|w| w.fwhm_incoherent_nm)),
                    opt(l),
                    opt(c),
                    opt(inc),
                    opt(t),
                );
                if *probe == Probe::FullSpectrum {
                    let pdir = dir.join("points");
                    std::fs::create_dir_all(&pdir).map_err(|e| Error::io(&pdir, e))?;
                    let pp = pdir.join(format!("point_{i:04}.tsv"));
                    let mut buf = Vec::new();
                    let header = vec![
                        format!("config_sha256 {}", base.hash()),
                        format!("{} {}", spec.variable, p.value),
                    ];
                    r.spectrum
                        .write_table(&mut buf, &header)
                        .map_err(|e| Error::io(&pp, e))?;
                    std::fs::write(&pp, buf).map_err(|e| Error::io(&pp, e))?;
                    paths.push(pp);
                }
            }
            Err(e) => {
                let _ = writeln!(
                    out,
                    "{i}\t{}\t-\t-\t-\t-\t-\t-\t-\t-\t{}: {}",
                    p.value,
                    e.kind(),
                    e.to_string().replace(['\t', '\n'], " ")
                );
            }
        }
    }
    let mut f = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    f.write_all(out.as_bytes())
        .map_err(|e| Error::io(&path, e))?;
    Ok(paths)
}
