//! Run configurations, the single-run pipeline, parameter sweeps and the
//! output files they produce.

mod config;
mod run;
mod sweep;

pub use config::{
    required_points, ConfigFile, GridSection, KernelName, OutputSection, PdcSection,
    PropagationSection, RunConfig, SfgSection, Theta, SUM_STEP_NM_PER_MM,
};
pub use run::{
    assemble, build_kernel, decompose, pdc_fwhm_nm, provenance_header, run_pdc, run_schmidt,
    run_single, simulate, write_simulation, RunFiles, RunSummary, Simulation, Summary,
    FRINGE_HALF_BAND_NM, PDC_SPECTRUM_FILE, SCHMIDT_FILE, SFG_SPECTRUM_FILE, SUMMARY_FILE,
};
pub use sweep::{
    run_sweep, worker_count, write_sweep, PointResult, Probe, SweepPoint, SweepSpec, SweepVariable,
    SWEEP_FILE, WORKERS_ENV,
};

/// 1-based line of the start of `span` in `text`, or 0 when unknown.
pub(crate) fn line_of(text: &str, span: Option<std::ops::Range<usize>>) -> Option<usize> {
    span.map(|r| text[..r.start.min(text.len())].matches('\n').count() + 1)
}
