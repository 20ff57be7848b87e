use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ConfigFile, RunConfig};
use crate::analysis::{fringe_period, fwhm, width_ratio, WidthReport};
use crate::pdc::{schmidt_decompose, JointSpectralAmplitude, SchmidtDecomposition};
use crate::sfg::{
    apply_chirp, detection_correction, sfg_spectrum, KernelKind, SfgSpectrum, TransferKernel,
};
use crate::units::{MM, UM};
use crate::{Error, Result};

/// Half width of the wavelength band around the pump searched for fringes, nm.
pub const FRINGE_HALF_BAND_NM: f64 = 15.0;

pub const PDC_SPECTRUM_FILE: &str = "pdc_spectrum.tsv";
pub const SFG_SPECTRUM_FILE: &str = "sfg_spectrum.tsv";
pub const SUMMARY_FILE: &str = "run_summary.toml";
pub const SCHMIDT_FILE: &str = "schmidt_modes.tsv";

/// JSA and Schmidt decomposition for the PDC part of `config`.
pub fn decompose(config: &RunConfig) -> Result<SchmidtDecomposition> {
    let jsa = JointSpectralAmplitude::build(
        *config.grid(),
        config.pump(),
        config.bbo(),
        config.bbo_length_m(),
        config.theta(),
    )?;
    schmidt_decompose(&jsa, config.gamma1(), config.truncation())
}

pub fn build_kernel(config: &RunConfig) -> Result<TransferKernel> {
    TransferKernel::build(config.setup(), config.sum_grid())
}

/// Everything computed for one configuration.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub config: RunConfig,
    pub decomposition: SchmidtDecomposition,
    /// Spectrum in frequency space, without the detection correction.
    pub spectrum: SfgSpectrum,
    /// Spectrum as reported: corrected when the configuration asks for it.
    pub reported: SfgSpectrum,
    pub schmidt_number: Result<f64>,
    pub widths: Result<WidthReport>,
    pub fringe_period_nm: Result<f64>,
}

/// Runs the chirp, spectrum and analysis stages on precomputed parts.
pub fn assemble(
    config: &RunConfig,
    decomposition: &SchmidtDecomposition,
    kernel: &TransferKernel,
) -> Result<Simulation> {
    let chirped = apply_chirp(decomposition, config.gdd_fs2(), config.omega0());
    let spectrum = sfg_spectrum(&chirped, kernel)?;
    let reported = detection_correction(
        &spectrum,
        config.correction(),
        config.pump().central_wavelength_nm,
    )?;
    let lp = config.pump().central_wavelength_nm;
    Ok(Simulation {
        config: config.clone(),
        decomposition: decomposition.clone(),
        schmidt_number: decomposition.schmidt_number(),
        widths: width_ratio(&spectrum),
        fringe_period_nm: fringe_period(
            &spectrum,
            (lp - FRINGE_HALF_BAND_NM, lp + FRINGE_HALF_BAND_NM),
        ),
        spectrum,
        reported,
    })
}

pub fn simulate(config: &RunConfig) -> Result<Simulation> {
    let decomposition = decompose(config)?;
    let kernel = build_kernel(config)?;
    assemble(config, &decomposition, &kernel)
}

/// FWHM of the PDC photon-number density on the wavelength axis, nm.
pub fn pdc_fwhm_nm(decomposition: &SchmidtDecomposition) -> Result<f64> {
    fwhm(
        &decomposition.pdc_spectrum(),
        &decomposition.grid().wavelengths_nm(),
    )
}

/// Scalars written to the run summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub config_sha256: String,
    pub theta_deg: f64,
    pub n_points: usize,
    pub modes_retained: usize,
    pub effective_length_mm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub confocal_um: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schmidt_number: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pdc_fwhm_nm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub widths: Option<WidthReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fringe_period_nm: Option<f64>,
    /// Error kinds of the observables that could not be measured.
    #[serde(default)]
    pub unavailable: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub summary: Summary,
    pub config: ConfigFile,
}

impl RunSummary {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            line: super::line_of(text, e.span()),
            message: e.message().to_string(),
        })
    }
}

fn summarize(
    config: &RunConfig,
    decomposition: &SchmidtDecomposition,
    sim: Option<&Simulation>,
) -> Summary {
    let mut unavailable = Vec::new();
    let mut keep = |name: &str, r: &Result<f64>| match r {
        Ok(v) => Some(*v),
        Err(e) => {
            unavailable.push(format!("{name}: {}", e.kind()));
            None
        }
    };
    let schmidt_number = keep("schmidt_number", &decomposition.schmidt_number());
    let pdc_fwhm = keep("pdc_fwhm_nm", &pdc_fwhm_nm(decomposition));
    let fringe = sim.and_then(|s| keep("fringe_period_nm", &s.fringe_period_nm));
    let widths = sim.and_then(|s| match &s.widths {
        Ok(w) => Some(*w),
        Err(e) => {
            unavailable.push(format!("widths: {}", e.kind()));
            None
        }
    });
    let g = config.setup().geometry();
    Summary {
        config_sha256: config.hash().to_string(),
        theta_deg: config.theta().to_degrees(),
        n_points: config.grid().len(),
        modes_retained: decomposition.mode_count(),
        effective_length_mm: config.setup().effective_length_m() / MM,
        confocal_um: (g.kind == KernelKind::Gaussian).then(|| g.confocal_m / UM),
        schmidt_number,
        pdc_fwhm_nm: pdc_fwhm,
        widths,
        fringe_period_nm: fringe,
        unavailable,
    }
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<fs::File>)> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    let f = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    Ok((path, BufWriter::new(f)))
}

fn finish(path: &Path, mut w: BufWriter<fs::File>, r: std::io::Result<()>) -> Result<()> {
    r.and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

/// Header lines shared by the spectrum files.
pub fn provenance_header(config: &RunConfig) -> Vec<String> {
    let s = config.setup();
    let g = s.geometry();
    let kind = match g.kind {
        KernelKind::PlaneWave => "plane_wave",
        KernelKind::Gaussian => "gaussian",
    };
    let mut geom = format!(
        "geometry kernel={kind} material={} length_mm={} path_mm={:.9} alpha_deg={}",
        s.crystal().kind(),
        g.length_m / MM,
        s.effective_length_m() / MM,
        g.alpha.to_degrees(),
    );
    if g.kind == KernelKind::Gaussian {
        geom.push_str(&format!(
            " confocal_um={:.6} z0_mm={}",
            g.confocal_m / UM,
            g.focus_m / MM
        ));
    }
    vec![format!("config_sha256 {}", config.hash()), geom]
}

fn write_pdc(dir: &Path, config: &RunConfig, d: &SchmidtDecomposition) -> Result<PathBuf> {
    let (path, mut w) = create(dir, PDC_SPECTRUM_FILE)?;
    let spec = d.pdc_spectrum();
    let lambdas = d.grid().wavelengths_nm();
    let r = (|| {
        for h in provenance_header(config).iter().take(1) {
            writeln!(w, "# {h}")?;
        }
        writeln!(w, "# gamma1 {}", config.gamma1())?;
        writeln!(w, "# columns: wavelength_nm omega_rad_s photons_per_rad_s")?;
        for i in (0..spec.len()).rev() {
            writeln!(
                w,
                "{:.6}\t{:.12e}\t{:.10e}",
                lambdas[i],
                d.grid().omega(i),
                spec[i]
            )?;
        }
        Ok(())
    })();
    finish(&path, w, r)?;
    Ok(path)
}

fn write_summary(dir: &Path, summary: RunSummary) -> Result<PathBuf> {
    let (path, mut w) = create(dir, SUMMARY_FILE)?;
    let text = toml::to_string(&summary).expect("summary serializes");
    let r = w.write_all(text.as_bytes());
    finish(&path, w, r)?;
    Ok(path)
}

/// Files written by a run, in the order they were produced.
#[derive(Debug, Clone)]
pub struct RunFiles {
    pub paths: Vec<PathBuf>,
    pub summary: Summary,
}

/// PDC stage only: spectrum and summary.
pub fn run_pdc(config: &RunConfig, dir: &Path) -> Result<RunFiles> {
    let d = decompose(config)?;
    let summary = summarize(config, &d, None);
    let paths = vec![
        write_pdc(dir, config, &d)?,
        write_summary(
            dir,
            RunSummary {
                summary: summary.clone(),
                config: config.file().clone(),
            },
        )?,
    ];
    Ok(RunFiles { paths, summary })
}

/// Schmidt eigenvalues, gains and mode functions.
pub fn run_schmidt(config: &RunConfig, dir: &Path) -> Result<RunFiles> {
    let d = decompose(config)?;
    let summary = summarize(config, &d, None);
    let (path, w) = create(dir, SCHMIDT_FILE)?;
    let mut w = w;
    let r = writeln!(w, "# config_sha256 {}", config.hash()).and_then(|_| d.write_dump(&mut w));
    finish(&path, w, r)?;
    let paths = vec![
        path,
        write_summary(
            dir,
            RunSummary {
                summary: summary.clone(),
                config: config.file().clone(),
            },
        )?,
    ];
    Ok(RunFiles { paths, summary })
}

/// Full pipeline: PDC spectrum, SFG spectrum and summary.
pub fn run_single(config: &RunConfig, dir: &Path) -> Result<RunFiles> {
    let sim = simulate(config)?;
    write_simulation(&sim, dir)
}

pub fn write_simulation(sim: &Simulation, dir: &Path) -> Result<RunFiles> {
    let config = &sim.config;
    let summary = summarize(config, &sim.decomposition, Some(sim));
    let pdc = write_pdc(dir, config, &sim.decomposition)?;
    let (sfg, mut w) = create(dir, SFG_SPECTRUM_FILE)?;
    let mut header = provenance_header(config);
    header.push("units wavelength nm; spectra arbitrary units".into());
    let r = sim.reported.write_table(&mut w, &header);
    finish(&sfg, w, r)?;
    let sum = write_summary(
        dir,
        RunSummary {
            summary: summary.clone(),
            config: config.file().clone(),
        },
    )?;
    Ok(RunFiles {
        paths: vec![pdc, sfg, sum],
        summary,
    })
}
