use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dispersion::{phase_matching_angle, Material, MaterialKind, MaterialLibrary};
use crate::pdc::{FrequencyGrid, PumpPulse, Truncation};
use crate::sfg::{FocusGeometry, SfgSetup, SumGrid};
use crate::units::{omega_from_wavelength_nm, MM, SPEED_OF_LIGHT, UM};
use crate::{Error, Result};

use super::line_of;

const REFERENCE_CONFIG: &str = include_str!("../../data/reference.toml");

/// Largest sum-frequency sampling step, nm, for a 1 mm crystal. Scales as
/// the inverse of the path length.
pub const SUM_STEP_NM_PER_MM: f64 = 0.2;

/// Configuration file contents, as written by the user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub pdc: PdcSection,
    #[serde(default)]
    pub propagation: PropagationSection,
    pub sfg: SfgSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Theta {
    Degrees(f64),
    /// Only `"degenerate"` is accepted.
    Keyword(String),
}

impl Default for Theta {
    fn default() -> Self {
        Theta::Keyword("degenerate".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdcSection {
    pub pump_wavelength_nm: f64,
    pub pump_duration_fs: f64,
    pub bbo_length_mm: f64,
    #[serde(default)]
    pub theta: Theta,
    pub gamma1: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagationSection {
    #[serde(default)]
    pub gdd_fs2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelName {
    Gaussian,
    PlaneWave,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SfgSection {
    #[serde(default = "default_material")]
    pub material: MaterialKind,
    #[serde(default = "default_kernel")]
    pub kernel: KernelName,
    pub length_mm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub waist_um: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confocal_um: Option<f64>,
    #[serde(default)]
    pub z0_mm: f64,
    #[serde(default)]
    pub alpha_deg: f64,
    #[serde(default = "one")]
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default = "default_points")]
    pub n_points: usize,
    #[serde(default = "default_lambda_min")]
    pub lambda_min_nm: f64,
    #[serde(default = "default_lambda_max")]
    pub lambda_max_nm: f64,
    #[serde(default = "default_eps")]
    pub eps_rel: f64,
    #[serde(default = "default_max_modes")]
    pub max_modes: usize,
    #[serde(default = "yes")]
    pub auto_refine: bool,
    /// Restricts the SFG output to this sum-wavelength interval.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sum_band_nm: Option<[f64; 2]>,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            n_points: default_points(),
            lambda_min_nm: default_lambda_min(),
            lambda_max_nm: default_lambda_max(),
            eps_rel: default_eps(),
            max_modes: default_max_modes(),
            auto_refine: true,
            sum_band_nm: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: String,
    #[serde(default = "yes")]
    pub lambda_correction: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            lambda_correction: true,
        }
    }
}

fn default_material() -> MaterialKind {
    MaterialKind::LiNbO3Mgo
}
fn default_kernel() -> KernelName {
    KernelName::Gaussian
}
fn one() -> f64 {
    1.0
}
fn yes() -> bool {
    true
}
fn default_points() -> usize {
    512
}
fn default_lambda_min() -> f64 {
    1350.0
}
fn default_lambda_max() -> f64 {
    1950.0
}
fn default_eps() -> f64 {
    1e-4
}
fn default_max_modes() -> usize {
    128
}
fn default_dir() -> String {
    "out".into()
}

/// A validated configuration with every derived quantity resolved.
#[derive(Debug, Clone)]
pub struct RunConfig {
    file: ConfigFile,
    hash: String,
    pump: PumpPulse,
    bbo: Material,
    theta: f64,
    bbo_length_m: f64,
    gamma1: f64,
    gdd_fs2: f64,
    omega0: f64,
    truncation: Truncation,
    setup: SfgSetup,
    grid: FrequencyGrid,
    sum_grid: SumGrid,
}

impl RunConfig {
    /// The bundled reference configuration.
    pub fn reference() -> Self {
        Self::from_toml_str(REFERENCE_CONFIG, &[]).expect("bundled defaults are valid")
    }

    pub fn reference_text() -> &'static str {
        REFERENCE_CONFIG
    }

    /// Parses `text`, applies `key=value` overrides with dotted keys and
    /// validates the result.
    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Parse {
            line: line_of(text, e.span()),
            message: e.message().to_string(),
        })?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let file: ConfigFile = if overrides.is_empty() {
            toml::from_str(text).map_err(|e| Error::Parse {
                line: line_of(text, e.span()),
                message: e.message().to_string(),
            })?
        } else {
            ConfigFile::deserialize(table).map_err(|e| Error::Parse {
                line: None,
                message: format!("after overrides: {}", e.message()),
            })?
        };
        Self::resolve(file)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, overrides)
    }

    pub fn resolve(file: ConfigFile) -> Result<Self> {
        let p = &file.pdc;
        positive("pdc.pump_wavelength_nm", p.pump_wavelength_nm)?;
        positive("pdc.pump_duration_fs", p.pump_duration_fs)?;
        positive("pdc.bbo_length_mm", p.bbo_length_mm)?;
        if !(p.gamma1 >= 0.0 && p.gamma1.is_finite()) {
            return Err(Error::validation(
                "pdc.gamma1",
                "must be finite and nonnegative",
            ));
        }
        if !file.propagation.gdd_fs2.is_finite() {
            return Err(Error::validation("propagation.gdd_fs2", "must be finite"));
        }
        let pump = PumpPulse::new(p.pump_wavelength_nm, p.pump_duration_fs)
            .map_err(|e| Error::validation("pdc.pump_wavelength_nm", e.to_string()))?;
        let omega0 = 0.5 * pump.center_omega();

        let library = MaterialLibrary::bundled();
        let bbo = library.get(MaterialKind::Bbo)?.clone();
        let theta = match &p.theta {
            Theta::Degrees(d) => {
                if !(0.0..=90.0).contains(d) {
                    return Err(Error::validation(
                        "pdc.theta",
                        "angle must lie in [0, 90] degrees",
                    ));
                }
                d.to_radians()
            }
            Theta::Keyword(k) if k == "degenerate" => phase_matching_angle(&bbo, omega0, omega0)
                .map_err(|e| Error::validation("pdc.theta", e.to_string()))?,
            Theta::Keyword(k) => {
                return Err(Error::validation(
                    "pdc.theta",
                    format!("expected degrees or \"degenerate\", got \"{k}\""),
                ))
            }
        };

        let s = &file.sfg;
        positive("sfg.length_mm", s.length_mm)?;
        positive("sfg.beta", s.beta)?;
        if !s.z0_mm.is_finite() {
            return Err(Error::validation("sfg.z0_mm", "must be finite"));
        }
        if !(s.alpha_deg.abs() < 90.0) {
            return Err(Error::validation(
                "sfg.alpha_deg",
                "must lie strictly between -90 and 90 degrees",
            ));
        }
        let crystal = library.get(s.material)?.clone();
        let geometry = match s.kernel {
            KernelName::PlaneWave => {
                if s.waist_um.is_some() || s.confocal_um.is_some() {
                    return Err(Error::validation(
                        "sfg.kernel",
                        "plane_wave takes neither waist_um nor confocal_um",
                    ));
                }
                FocusGeometry::plane_wave(s.length_mm * MM)
            }
            KernelName::Gaussian => {
                let b = match (s.waist_um, s.confocal_um) {
                    (Some(w), None) => {
                        positive("sfg.waist_um", w)?;
                        FocusGeometry::confocal_from_waist(&crystal, w * UM, omega0)
                            .map_err(|e| Error::validation("sfg.waist_um", e.to_string()))?
                    }
                    (None, Some(b)) => {
                        positive("sfg.confocal_um", b)?;
                        b * UM
                    }
                    _ => {
                        return Err(Error::validation(
                            "sfg.waist_um",
                            "give exactly one of waist_um and confocal_um",
                        ))
                    }
                };
                FocusGeometry::gaussian(s.length_mm * MM, b, s.z0_mm * MM)
            }
        }
        .and_then(|g| g.with_alpha(s.alpha_deg.to_radians()))
        .and_then(|g| g.with_beta(s.beta))
        .map_err(|e| Error::validation("sfg", e.to_string()))?;
        let setup = SfgSetup::new(crystal, geometry, omega0)
            .map_err(|e| Error::validation("sfg", e.to_string()))?;

        let g = &file.grid;
        positive("grid.lambda_min_nm", g.lambda_min_nm)?;
        if !(g.lambda_max_nm > g.lambda_min_nm) {
            return Err(Error::validation(
                "grid.lambda_max_nm",
                "must exceed lambda_min_nm",
            ));
        }
        if g.n_points < FrequencyGrid::MIN_POINTS {
            return Err(Error::validation(
                "grid.n_points",
                format!("need at least {}", FrequencyGrid::MIN_POINTS),
            ));
        }
        if !(g.eps_rel >= 0.0 && g.eps_rel < 1.0) {
            return Err(Error::validation("grid.eps_rel", "must lie in [0, 1)"));
        }
        if g.max_modes == 0 {
            return Err(Error::validation("grid.max_modes", "must be at least 1"));
        }
        let n_points = if g.auto_refine {
            g.n_points.max(required_points(
                g.lambda_min_nm,
                g.lambda_max_nm,
                p.pump_wavelength_nm,
                setup.effective_length_m(),
            ))
        } else {
            g.n_points
        };
        let grid = FrequencyGrid::from_wavelengths_nm(n_points, g.lambda_min_nm, g.lambda_max_nm)
            .map_err(|e| Error::validation("grid", e.to_string()))?;
        let sum_grid = match g.sum_band_nm {
            None => SumGrid::full(grid),
            Some([lo, hi]) => SumGrid::window_nm(grid, lo.min(hi), lo.max(hi))
                .map_err(|e| Error::validation("grid.sum_band_nm", e.to_string()))?,
        };
        if file.output.dir.is_empty() {
            return Err(Error::validation("output.dir", "must not be empty"));
        }

        let canonical = toml::to_string(&file).expect("config serializes");
        let hash = Sha256::digest(canonical.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        Ok(Self {
            pump,
            bbo,
            theta,
            bbo_length_m: p.bbo_length_mm * MM,
            gamma1: p.gamma1,
            gdd_fs2: file.propagation.gdd_fs2,
            omega0,
            truncation: Truncation {
                eps_rel: g.eps_rel,
                max_modes: g.max_modes,
            },
            setup,
            grid,
            sum_grid,
            hash,
            file,
        })
    }

    /// Effective configuration (after overrides), as it would be written to disk.
    pub fn file(&self) -> &ConfigFile {
        &self.file
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.file).expect("config serializes")
    }

    /// SHA-256 of the canonical serialization of [`RunConfig::file`].
    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn pump(&self) -> &PumpPulse {
        &self.pump
    }

    pub fn bbo(&self) -> &Material {
        &self.bbo
    }

    /// Resolved BBO optic-axis angle, rad.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn bbo_length_m(&self) -> f64 {
        self.bbo_length_m
    }

    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }

    pub fn gdd_fs2(&self) -> f64 {
        self.gdd_fs2
    }

    /// Degenerate signal/idler frequency, half the pump frequency.
    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn setup(&self) -> &SfgSetup {
        &self.setup
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn sum_grid(&self) -> &SumGrid {
        &self.sum_grid
    }

    pub fn correction(&self) -> bool {
        self.file.output.lambda_correction
    }

    pub fn output_dir(&self) -> PathBuf {
        PathBuf::from(&self.file.output.dir)
    }

    /// Copy with a different sum grid over the same pump grid.
    pub fn with_sum_grid(&self, sum_grid: SumGrid) -> Result<Self> {
        if sum_grid.grid() != &self.grid {
            return Err(Error::GridMismatch(
                "sum grid built on a different pump grid".into(),
            ));
        }
        Ok(Self {
            sum_grid,
            ..self.clone()
        })
    }
}

fn positive(field: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(
            field,
            format!("must be positive and finite, got {x}"),
        ))
    }
}

/// Grid size for which the sum-frequency step near the pump wavelength is at
/// most [`SUM_STEP_NM_PER_MM`] divided by the path length in mm.
pub fn required_points(lambda_min_nm: f64, lambda_max_nm: f64, pump_nm: f64, path_m: f64) -> usize {
    let step_nm = SUM_STEP_NM_PER_MM * MM / path_m;
    let d_omega =
        2.0 * std::f64::consts::PI * SPEED_OF_LIGHT * step_nm * 1e-9 / (pump_nm * 1e-9).powi(2);
    let span = omega_from_wavelength_nm(lambda_min_nm) - omega_from_wavelength_nm(lambda_max_nm);
    (span / d_omega).ceil() as usize + 1
}

/// Sets `key=value` in `table`; `key` may be dotted, `value` is parsed as a
/// TOML value (falling back to a bare string) and an empty value removes
/// the key.
fn apply_override(table: &mut toml::Table, spec: &str) -> Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::validation(spec, "override must look like key=value"))?;
    let key = key.trim();
    let raw = raw.trim();
    let path: Vec<&str> = key.split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(Error::validation(key, "empty key segment"));
    }
    let mut node = table;
    for seg in &path[..path.len() - 1] {
        node = node
            .entry(seg.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| Error::validation(key, format!("`{seg}` is not a table")))?;
    }
    let leaf = path[path.len() - 1].to_string();
    if raw.is_empty() {
        node.remove(&leaf);
        return Ok(());
    }
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    node.insert(leaf, value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sfg::KernelKind;

    fn defaults_with(ov: &[&str]) -> Result<RunConfig> {
        let ov: Vec<String> = ov.iter().map(|s| s.to_string()).collect();
        RunConfig::from_toml_str(REFERENCE_CONFIG, &ov)
    }

    #[test]
    fn reference_config_inventory() {
        let c = RunConfig::reference();
        assert_eq!(c.pump().central_wavelength_nm, 800.0);
        assert_eq!(c.pump().fwhm_duration_fs, 1600.0);
        assert!((c.bbo_length_m() - 0.010).abs() < 1e-15);
        assert_eq!(c.gamma1(), 10.5);
        assert_eq!(c.gdd_fs2(), 200.0);
        assert!((c.theta().to_degrees() - 20.04).abs() < 0.02);
        let g = c.setup().geometry();
        assert_eq!(g.kind, KernelKind::Gaussian);
        assert!((g.length_m - 1e-3).abs() < 1e-15);
        assert_eq!(g.focus_m, 0.0);
        assert!((g.confocal_m / UM - 52.26).abs() < 0.1);
        assert!(c.correction());
        // refined so that the sum step at 800 nm is at most 0.2 nm
        let step = c.sum_grid().step_nm_at(omega_from_wavelength_nm(800.0));
        assert!(step <= 0.2, "{step}");
        assert_eq!(c.hash().len(), 64);
    }

    #[test]
    fn shipped_copy_matches_embedded_defaults() {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/reference.toml");
        let text = std::fs::read_to_string(path).unwrap();
        assert_eq!(text, REFERENCE_CONFIG);
    }

    #[test]
    fn both_waist_and_confocal_rejected() {
        let e = defaults_with(&["sfg.confocal_um=40"]).unwrap_err();
        assert!(
            matches!(e, Error::Validation { ref field, .. } if field == "sfg.waist_um"),
            "{e}"
        );
        let c = defaults_with(&["sfg.waist_um=", "sfg.confocal_um=40"]).unwrap();
        assert!((c.setup().geometry().confocal_m - 40.0 * UM).abs() < 1e-18);
        let e = defaults_with(&["sfg.waist_um="]).unwrap_err();
        assert!(matches!(e, Error::Validation { .. }));
    }

    #[test]
    fn gdd_defaults_to_zero() {
        let text = REFERENCE_CONFIG.replace("gdd_fs2 = 200.0", "");
        let c = RunConfig::from_toml_str(&text, &[]).unwrap();
        assert_eq!(c.gdd_fs2(), 0.0);
        let text = REFERENCE_CONFIG.replace("[propagation]\ngdd_fs2 = 200.0\n", "");
        assert_eq!(RunConfig::from_toml_str(&text, &[]).unwrap().gdd_fs2(), 0.0);
    }

    #[test]
    fn unknown_keys_report_their_line() {
        let text = REFERENCE_CONFIG.replace("gamma1 = 10.5", "gamma1 = 10.5\nwaist = 3");
        let line = text.lines().position(|l| l == "waist = 3").unwrap() + 1;
        match RunConfig::from_toml_str(&text, &[]) {
            Err(Error::Parse { line: l, .. }) => assert_eq!(l, Some(line)),
            other => panic!("expected parse error, got {other:?}"),
        }
        let broken = REFERENCE_CONFIG.replace("gamma1 = 10.5", "gamma1 = ");
        assert!(matches!(
            RunConfig::from_toml_str(&broken, &[]),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            defaults_with(&["pdc.bogus=1"]),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn validation_errors_name_the_field() {
        for (ov, field) in [
            ("sfg.length_mm=-1", "sfg.length_mm"),
            ("pdc.gamma1=-2", "pdc.gamma1"),
            ("pdc.theta=\"sideways\"", "pdc.theta"),
            ("grid.lambda_max_nm=1000", "grid.lambda_max_nm"),
            ("grid.n_points=3", "grid.n_points"),
        ] {
            match defaults_with(&[ov]) {
                Err(Error::Validation { field: f, .. }) => assert_eq!(f, field, "{ov}"),
                other => panic!("{ov}: {other:?}"),
            }
        }
    }

    #[test]
    fn overrides_apply_and_change_the_hash() {
        let base = RunConfig::reference();
        let c = defaults_with(&[
            "sfg.z0_mm=0.5",
            "pdc.theta=19.9",
            "output.lambda_correction=false",
        ])
        .unwrap();
        assert_eq!(c.setup().geometry().focus_m, 0.5 * MM);
        assert!((c.theta().to_degrees() - 19.9).abs() < 1e-12);
        assert!(!c.correction());
        assert_ne!(c.hash(), base.hash());
        assert_eq!(defaults_with(&[]).unwrap().hash(), base.hash());
        assert!(matches!(
            defaults_with(&["nonsense"]),
            Err(Error::Validation { .. })
        ));
    }

    #[test]
    fn round_trip_through_serialization() {
        let c = defaults_with(&["sfg.alpha_deg=5", "grid.sum_band_nm=[780, 820]"]).unwrap();
        let again = RunConfig::from_toml_str(&c.to_toml(), &[]).unwrap();
        assert_eq!(again.file(), c.file());
        assert_eq!(again.hash(), c.hash());
        assert_eq!(again.grid(), c.grid());
        assert!(again
            .sum_grid()
            .wavelengths_nm()
            .iter()
            .all(|&l| (780.0..=820.0).contains(&l)));
    }

    #[test]
    fn refinement_grows_with_length() {
        let a = required_points(1350.0, 1950.0, 800.0, 1e-3);
        let b = required_points(1350.0, 1950.0, 800.0, 2e-3);
        assert!(a > 700 && a < 760, "{a}");
        assert!(b >= 2 * a - 2);
        let off = defaults_with(&["grid.auto_refine=false"]).unwrap();
        assert_eq!(off.grid().len(), 512);
    }
}
