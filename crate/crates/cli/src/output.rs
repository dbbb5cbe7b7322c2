//! CSV diagnostics and PPM heatmaps.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sympcrit::curvature::intrinsic_gauss_curvature;
use sympcrit::flow::{flow_velocity, DiagnosticsRecord};
use sympcrit::surface::SECOND_JET_REACH;
use sympcrit::{GeomError, GraphSurface};
use thiserror::Error;

pub const CSV_HEADER: &str =
    "t,L,area,symplectic_area,min_cos_alpha,max_cos_alpha,residual_linf,dL_dt_observed,dL_dt_predicted";

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("no records to write")]
    Empty,
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> OutputError + '_ {
    move |source| OutputError::Io { path: path.to_path_buf(), source }
}

pub fn emit_csv(records: &[DiagnosticsRecord], path: &Path) -> Result<(), OutputError> {
    if records.is_empty() {
        return Err(OutputError::Empty);
    }
    let file = File::create(path).map_err(io(path))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{CSV_HEADER}").map_err(io(path))?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.t,
            r.l,
            r.area,
            r.symplectic_area,
            r.min_cos_alpha,
            r.max_cos_alpha,
            r.residual_linf,
            r.dl_dt_observed,
            r.dl_dt_predicted
        )
        .map_err(io(path))?;
    }
    w.flush().map_err(io(path))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeatmapField {
    CosAlpha,
    /// `|f⃗|`, the flow speed
    Residual,
    GaussCurvature,
}

impl HeatmapField {
    pub const ALL: [HeatmapField; 3] = [HeatmapField::CosAlpha, HeatmapField::Residual, HeatmapField::GaussCurvature];
}

impl fmt::Display for HeatmapField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HeatmapField::CosAlpha => "cos_alpha",
            HeatmapField::Residual => "residual",
            HeatmapField::GaussCurvature => "gauss_curvature",
        })
    }
}

impl FromStr for HeatmapField {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "cos_alpha" => Ok(HeatmapField::CosAlpha),
            "residual" => Ok(HeatmapField::Residual),
            "gauss_curvature" => Ok(HeatmapField::GaussCurvature),
            other => Err(format!("unknown heatmap field '{other}'")),
        }
    }
}

/// Per-node values; `None` where the stencil does not fit.
pub fn field_values(s: &GraphSurface, field: HeatmapField) -> Result<Vec<Option<f64>>, GeomError> {
    match field {
        HeatmapField::CosAlpha => (0..s.len()).map(|k| Ok(Some(s.first_jet(s.node_of(k))?.cos_alpha))).collect(),
        HeatmapField::Residual => {
            let v = flow_velocity(s)?;
            Ok(v.ambient.iter().map(|x| Some(x.norm())).collect())
        }
        HeatmapField::GaussCurvature => (0..s.len())
            .map(|k| {
                let node = s.node_of(k);
                if s.check_reach(node, SECOND_JET_REACH).is_err() {
                    return Ok(None);
                }
                intrinsic_gauss_curvature(s, node).map(Some)
            })
            .collect(),
    }
}

/// Writes a binary P6 image, one pixel per node with `y` increasing upward,
/// gray level linear between the field's min and max (black if constant, and
/// for nodes without a value). The range goes to `<path>.range.txt`.
/// Returns `(min, max)`.
pub fn emit_heatmap(s: &GraphSurface, field: HeatmapField, path: &Path) -> Result<(f64, f64), OutputError> {
    let values = field_values(s, field)?;
    let (lo, hi) = values
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 0.0) };
    let span = hi - lo;

    let (nx, ny) = (s.nx(), s.ny());
    let mut bytes = format!("P6\n{nx} {ny}\n255\n").into_bytes();
    for j in (0..ny).rev() {
        for i in 0..nx {
            let gray = match values[j * nx + i] {
                Some(v) if span > 0.0 => (255.0 * (v - lo) / span).round().clamp(0.0, 255.0) as u8,
                _ => 0,
            };
            bytes.extend_from_slice(&[gray; 3]);
        }
    }
    std::fs::write(path, &bytes).map_err(io(path))?;

    let mut side = path.as_os_str().to_owned();
    side.push(".range.txt");
    let side = PathBuf::from(side);
    std::fs::write(&side, format!("field={field}\nmin={lo}\nmax={hi}\n")).map_err(io(&side))?;
    Ok((lo, hi))
}
