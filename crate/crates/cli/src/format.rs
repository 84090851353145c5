//! SpectrumFile JSON, the flat CSV table and the on-disk cache.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use disspec::regions::{default_params, RegionParams};
use disspec::spectrum::{ModeFailure, PointClass, SpectralPoint, Spectrum};
use disspec::Complex64;
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: &str = "1";

pub const CSV_HEADER: &str = "n,multiplicity,re_w,im_w,re_lambda,im_lambda,class,poly_residual,hankel_residual,error_radius";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub gamma: f64,
    pub n_max: usize,
    pub precision_bits: u32,
    pub tool_version: String,
    pub timestamp: String,
    pub region_params: RegionParams,
    #[serde(default)]
    pub zero_root_modes: Vec<usize>,
    #[serde(default)]
    pub failures: Vec<ModeFailure>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumFile {
    pub format_version: String,
    pub metadata: Metadata,
    pub points: Vec<SpectralPoint>,
}

/// Region parameters echoed with a spectrum: the γ-dependent defaults where
/// they exist, the unit conventions otherwise.
pub fn region_params_for(gamma: f64) -> RegionParams {
    default_params(gamma).unwrap_or_else(|_| RegionParams::unit())
}

impl SpectrumFile {
    pub fn new(s: Spectrum) -> Self {
        SpectrumFile {
            format_version: FORMAT_VERSION.to_string(),
            metadata: Metadata {
                gamma: s.gamma,
                n_max: s.n_max,
                precision_bits: s.precision_bits,
                tool_version: s.tool_version,
                timestamp: s.timestamp,
                region_params: region_params_for(s.gamma),
                zero_root_modes: s.zero_root_modes,
                failures: s.failures,
            },
            points: s.points,
        }
    }

    pub fn into_spectrum(self) -> Spectrum {
        let m = self.metadata;
        Spectrum {
            gamma: m.gamma,
            n_max: m.n_max,
            points: self.points,
            precision_bits: m.precision_bits,
            tool_version: m.tool_version,
            timestamp: m.timestamp,
            zero_root_modes: m.zero_root_modes,
            failures: m.failures,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("spectrum serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let f: SpectrumFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if f.format_version != FORMAT_VERSION {
            return Err(format!("unsupported format_version {:?}", f.format_version));
        }
        Ok(f)
    }
}

fn num(x: f64) -> String {
    ryu::Buffer::new().format(x).to_string()
}

pub fn csv_row(p: &SpectralPoint) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        p.n,
        p.multiplicity,
        num(p.w.re),
        num(p.w.im),
        num(p.lambda.re),
        num(p.lambda.im),
        p.class.as_str(),
        num(p.poly_residual),
        num(p.hankel_residual),
        num(p.error_radius)
    )
}

pub fn to_csv(points: &[SpectralPoint]) -> String {
    let mut s = String::with_capacity(96 * (points.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for p in points {
        writeln!(s, "{}", csv_row(p)).expect("write to string");
    }
    s
}

fn parse_class(s: &str) -> Result<PointClass, String> {
    match s {
        "eigenvalue" => Ok(PointClass::Eigenvalue),
        "incoming_resonance" => Ok(PointClass::IncomingResonance),
        "indeterminate" => Ok(PointClass::Indeterminate),
        other => Err(format!("unknown class {other:?}")),
    }
}

pub fn from_csv(text: &str) -> Result<Vec<SpectralPoint>, String> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err("missing or unexpected CSV header".into());
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.is_empty()) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 10 {
            return Err(format!("line {}: expected 10 fields, got {}", i + 2, f.len()));
        }
        let bad = |e: &dyn std::fmt::Display| format!("line {}: {e}", i + 2);
        let r = |k: usize| f[k].parse::<f64>().map_err(|e| bad(&e));
        out.push(SpectralPoint {
            n: f[0].parse().map_err(|e| bad(&e))?,
            multiplicity: f[1].parse().map_err(|e| bad(&e))?,
            w: Complex64::new(r(2)?, r(3)?),
            lambda: Complex64::new(r(4)?, r(5)?),
            class: parse_class(f[6]).map_err(|e| bad(&e))?,
            poly_residual: r(7)?,
            hankel_residual: r(8)?,
            error_radius: r(9)?,
        });
    }
    Ok(out)
}

/// Cached spectra, one JSON file per (γ, n_max, precision, tool version).
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: &Path) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Cache { dir: dir.to_path_buf() })
    }

    fn path(&self, gamma: f64, n_max: usize, bits: u32) -> PathBuf {
        // γ by its bit pattern so that the key is exact
        self.dir.join(format!("spectrum-{:016x}-{n_max}-{bits}-{}.json", gamma.to_bits(), disspec::spectrum::TOOL_VERSION))
    }

    pub fn load(&self, gamma: f64, n_max: usize, bits: u32) -> Option<SpectrumFile> {
        let text = fs::read_to_string(self.path(gamma, n_max, bits)).ok()?;
        let f = SpectrumFile::from_json(&text).ok()?;
        let m = &f.metadata;
        let hit = m.gamma.to_bits() == gamma.to_bits()
            && m.n_max == n_max
            && m.precision_bits == bits
            && m.tool_version == disspec::spectrum::TOOL_VERSION;
        hit.then_some(f)
    }

    pub fn store(&self, f: &SpectrumFile) -> io::Result<()> {
        let m = &f.metadata;
        let path = self.path(m.gamma, m.n_max, m.precision_bits);
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, f.to_json())?;
        fs::rename(tmp, path)
    }
}
