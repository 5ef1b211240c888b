//! Field files and solver configuration.
//!
//! A field is stored as a CSV value table (`m_index,cell_index,value`)
//! plus a JSON metadata sidecar next to it with the same stem. Values are
//! written with 17 significant digits so that a round trip is bit-exact.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::domain::{
    conformal_exponents, EuclideanFactor, Field, GraphEdge, ManifoldFactor, ProductGrid,
    RadialGrid, RadialLayout,
};
use crate::error::{Error, Result};
use crate::solver::{RadialProblem, SolverOptions};

pub const FIELD_FORMAT: &str = "yamalab-field/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ManifoldMeta {
    Homogeneous {
        volume: f64,
        scalar_curvature: f64,
    },
    WeightedGraph {
        node_weights: Vec<f64>,
        scalar_curvature: Vec<f64>,
        /// `(a, b, conductance)` triples.
        edges: Vec<(usize, usize, f64)>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayoutMeta {
    CellCentered,
    VertexCentered,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EuclideanMeta {
    Line {
        half_extent: usize,
        spacing: f64,
    },
    Radial {
        dim: u32,
        r_max: f64,
        intervals: usize,
        layout: LayoutMeta,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldMeta {
    pub format: String,
    pub manifold: ManifoldMeta,
    pub euclidean: EuclideanMeta,
    pub created_by: String,
    pub rows: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    m_index: usize,
    cell_index: usize,
    value: f64,
}

impl ManifoldMeta {
    pub fn of(m: &ManifoldFactor) -> Self {
        match m {
            ManifoldFactor::Homogeneous(_) => ManifoldMeta::Homogeneous {
                volume: m.volume(),
                scalar_curvature: m.curvature(0),
            },
            ManifoldFactor::WeightedGraph(_) => ManifoldMeta::WeightedGraph {
                node_weights: m.node_weights(),
                scalar_curvature: m.curvatures(),
                edges: m.edges().iter().map(|e| (e.a, e.b, e.conductance)).collect(),
            },
        }
    }

    pub fn build(&self) -> Result<ManifoldFactor> {
        match self {
            ManifoldMeta::Homogeneous {
                volume,
                scalar_curvature,
            } => ManifoldFactor::homogeneous(*volume, *scalar_curvature),
            ManifoldMeta::WeightedGraph {
                node_weights,
                scalar_curvature,
                edges,
            } => ManifoldFactor::weighted_graph(
                node_weights.clone(),
                scalar_curvature.clone(),
                edges
                    .iter()
                    .map(|&(a, b, conductance)| GraphEdge { a, b, conductance })
                    .collect(),
            ),
        }
    }
}

impl EuclideanMeta {
    pub fn of(e: &EuclideanFactor) -> Self {
        match e {
            EuclideanFactor::Line(l) => EuclideanMeta::Line {
                half_extent: l.half_extent(),
                spacing: l.spacing(),
            },
            EuclideanFactor::Radial(r) => EuclideanMeta::Radial {
                dim: r.dim(),
                r_max: r.r_max(),
                intervals: r.intervals(),
                layout: match r.layout() {
                    RadialLayout::CellCentered => LayoutMeta::CellCentered,
                    RadialLayout::VertexCentered => LayoutMeta::VertexCentered,
                },
            },
        }
    }

    pub fn build(&self) -> Result<EuclideanFactor> {
        match *self {
            EuclideanMeta::Line {
                half_extent,
                spacing,
            } => EuclideanFactor::line(half_extent, spacing),
            EuclideanMeta::Radial {
                dim,
                r_max,
                intervals,
                layout,
            } => {
                let layout = match layout {
                    LayoutMeta::CellCentered => RadialLayout::CellCentered,
                    LayoutMeta::VertexCentered => RadialLayout::VertexCentered,
                };
                Ok(EuclideanFactor::Radial(RadialGrid::new(
                    dim, r_max, intervals, layout,
                )?))
            }
        }
    }
}

/// Sidecar path holding the metadata of the field stored at `path`.
pub fn metadata_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

fn format_err(path: &Path, msg: impl std::fmt::Display) -> Error {
    Error::Format(format!("{}: {msg}", path.display()))
}

pub fn save_field(u: &Field, path: &Path) -> Result<()> {
    let grid = u.grid();
    let meta = FieldMeta {
        format: FIELD_FORMAT.to_string(),
        manifold: ManifoldMeta::of(grid.manifold()),
        euclidean: EuclideanMeta::of(grid.euclid()),
        created_by: concat!("yamalab ", env!("CARGO_PKG_VERSION")).to_string(),
        rows: grid.len(),
    };
    let meta_path = metadata_path(path);
    let json = serde_json::to_string_pretty(&meta).map_err(|e| format_err(&meta_path, e))?;
    std::fs::write(&meta_path, json + "\n").map_err(|e| Error::io(&meta_path, e))?;

    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let write = |out: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(out, "m_index,cell_index,value")?;
        for i in 0..grid.node_count() {
            for (k, v) in u.fiber(i).iter().enumerate() {
                writeln!(out, "{i},{k},{v:.16e}")?;
            }
        }
        out.flush()
    };
    write(&mut out).map_err(|e| Error::io(path, e))
}

pub fn load_field(path: &Path) -> Result<Field> {
    let meta_path = metadata_path(path);
    let text = std::fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let meta: FieldMeta = serde_json::from_str(&text).map_err(|e| format_err(&meta_path, e))?;
    if meta.format != FIELD_FORMAT {
        return Err(format_err(
            &meta_path,
            format!("unknown format tag {:?}", meta.format),
        ));
    }
    let manifold = meta.manifold.build().map_err(|e| format_err(&meta_path, e))?;
    let euclid = meta.euclidean.build().map_err(|e| format_err(&meta_path, e))?;
    let grid = ProductGrid::new(manifold, euclid);
    if meta.rows != grid.len() {
        return Err(format_err(
            &meta_path,
            format!("declares {} rows for a grid of {} sites", meta.rows, grid.len()),
        ));
    }

    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => format_err(path, format!("{other:?}")),
    })?;
    let headers = reader.headers().map_err(|e| format_err(path, e))?;
    if headers != vec!["m_index", "cell_index", "value"] {
        return Err(format_err(path, format!("unexpected header {headers:?}")));
    }
    let mut values = vec![f64::NAN; grid.len()];
    let mut seen = vec![false; grid.len()];
    let mut count = 0usize;
    for row in reader.deserialize::<Row>() {
        let row = row.map_err(|e| format_err(path, e))?;
        count += 1;
        if row.m_index >= grid.node_count() || row.cell_index >= grid.cell_count() {
            return Err(format_err(
                path,
                format!("row ({}, {}) lies outside the grid", row.m_index, row.cell_index),
            ));
        }
        if !row.value.is_finite() || row.value < 0.0 {
            return Err(format_err(
                path,
                format!(
                    "value {} at ({}, {}) is not a finite nonnegative number",
                    row.value, row.m_index, row.cell_index
                ),
            ));
        }
        let idx = grid.index(row.m_index, row.cell_index);
        if seen[idx] {
            return Err(format_err(
                path,
                format!("duplicate row ({}, {})", row.m_index, row.cell_index),
            ));
        }
        seen[idx] = true;
        values[idx] = row.value;
    }
    if count != grid.len() {
        return Err(format_err(
            path,
            format!("{count} rows for a grid of {} sites", grid.len()),
        ));
    }
    Field::new(grid, values).map_err(|e| format_err(path, e))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifoldConfig {
    pub volume: f64,
    pub scalar_curvature: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimsConfig {
    pub m: u32,
    pub n: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub r_max: f64,
    /// Number of radial intervals `K`.
    pub cells: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub max_iter: Option<usize>,
    #[serde(default)]
    pub s: Option<f64>,
    #[serde(default)]
    pub s_list: Option<Vec<f64>>,
}

/// Configuration document for `minimize` and `lambda-curve`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub manifold: ManifoldConfig,
    pub dims: DimsConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverConfig,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| format_err(path, e))
    }

    pub fn problem(&self) -> Result<RadialProblem> {
        let ce = conformal_exponents(self.dims.m, self.dims.n)?;
        RadialProblem::new(
            ce,
            self.manifold.volume,
            self.manifold.scalar_curvature,
            self.grid.r_max,
            self.grid.cells,
        )
    }

    pub fn options(&self) -> SolverOptions {
        let mut opts = SolverOptions::default();
        if let Some(tol) = self.solver.tol {
            opts.tol = tol;
        }
        if let Some(max_iter) = self.solver.max_iter {
            opts.max_iter = max_iter;
        }
        opts
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn graph_grid() -> Arc<ProductGrid> {
        let m = ManifoldFactor::weighted_graph(
            vec![1.0, 0.5, 2.0],
            vec![1.0, -0.25, 3.0],
            vec![
                GraphEdge { a: 0, b: 1, conductance: 0.7 },
                GraphEdge { a: 1, b: 2, conductance: 1.3 },
            ],
        )
        .unwrap();
        ProductGrid::new(m, EuclideanFactor::line(4, 0.3).unwrap())
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.csv");
        let u = Field::from_fn(graph_grid(), |i, k| {
            if k == 0 || k == 8 {
                0.0
            } else {
                (1.0 + i as f64).sqrt() / 3.0 + (k as f64).ln_1p() * 1e-7 + f64::EPSILON
            }
        })
        .unwrap();
        save_field(&u, &path).unwrap();
        let v = load_field(&path).unwrap();
        assert_eq!(u.grid().as_ref(), v.grid().as_ref());
        let bits = |f: &Field| f.values().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&u), bits(&v));
    }

    #[test]
    fn radial_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let m = ManifoldFactor::homogeneous(4.0 * std::f64::consts::PI, 2.0).unwrap();
        let e = EuclideanFactor::Radial(RadialGrid::vertex_centered(2, 5.0, 20).unwrap());
        let grid = ProductGrid::new(m, e);
        let u = Field::from_fn(grid, |_, k| (-(k as f64) / 7.0).exp()).unwrap();
        save_field(&u, &path).unwrap();
        assert_eq!(load_field(&path).unwrap(), u);
    }

    fn saved(dir: &Path) -> PathBuf {
        let path = dir.join("f.csv");
        save_field(&Field::zeros(graph_grid()), &path).unwrap();
        path
    }

    #[test]
    fn negative_value_is_a_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = saved(dir.path());
        let text = std::fs::read_to_string(&path).unwrap();
        let text = text.replacen("0,1,0.0000000000000000e0", "0,1,-1.0", 1);
        std::fs::write(&path, text).unwrap();
        assert!(matches!(load_field(&path), Err(Error::Format(_))));
    }

    #[test]
    fn row_count_mismatch_is_a_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = saved(dir.path());
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines: Vec<&str> = text.lines().collect();
        lines.pop();
        std::fs::write(&path, lines.join("\n") + "\n").unwrap();
        assert!(matches!(load_field(&path), Err(Error::Format(_))));

        let path = saved(dir.path());
        let meta = std::fs::read_to_string(metadata_path(&path)).unwrap();
        let meta = meta.replace("\"half_extent\": 4", "\"half_extent\": 5");
        std::fs::write(metadata_path(&path), meta).unwrap();
        assert!(matches!(load_field(&path), Err(Error::Format(_))));
    }

    #[test]
    fn bad_header_and_missing_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let path = saved(dir.path());
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, text.replacen("m_index", "node", 1)).unwrap();
        assert!(matches!(load_field(&path), Err(Error::Format(_))));
        std::fs::remove_file(metadata_path(&path)).unwrap();
        assert!(matches!(load_field(&path), Err(Error::Io { .. })));
    }

    #[test]
    fn config_parses_both_forms() {
        let cfg = RunConfig::from_json(
            r#"{"manifold":{"volume":12.566370614359172,"scalar_curvature":2.0},
                "dims":{"m":2,"n":1},"grid":{"r_max":12.0,"cells":400},
                "solver":{"tol":1e-9,"max_iter":300,"s":5.0}}"#,
        )
        .unwrap();
        assert_eq!(cfg.solver.s, Some(5.0));
        assert_eq!(cfg.options().max_iter, 300);
        assert_eq!(cfg.problem().unwrap().intervals(), 400);
        let cfg = RunConfig::from_json(
            r#"{"manifold":{"volume":1.0,"scalar_curvature":1.0},
                "dims":{"m":3,"n":2},"grid":{"r_max":8.0,"cells":64},
                "solver":{"s_list":[3.0,3.2]}}"#,
        )
        .unwrap();
        assert_eq!(cfg.solver.s_list.as_deref(), Some(&[3.0, 3.2][..]));
        assert_eq!(cfg.options(), SolverOptions::default());
        assert!(RunConfig::from_json(r#"{"dims":{"m":2,"n":1}}"#).is_err());
    }
}
