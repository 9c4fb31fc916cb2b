//! Readers for external datasets.
//!
//! | kind        | file                                                        |
//! |-------------|-------------------------------------------------------------|
//! | predictors  | CSV with a header row, one observation per row              |
//! | `samples`   | CSV without header, one (possibly ragged) sample per row    |
//! | `spd`       | CSV without header, one row-major `r × r` matrix per row    |
//! | `graph`     | manifest CSV with header `file,nodes`; one edge list each   |
//! | `distances` | CSV without header holding the `n × n` distance matrix      |
//!
//! Edge lists hold `u,v` or `u,v,weight` per line with 0-indexed nodes and
//! paths relative to the manifest. Lines starting with `#` are ignored
//! everywhere.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use frechet_sdr::matfun::{self, SymMatrix};
use frechet_sdr::metrics::{DistanceMatrix, EmpiricalDistribution, MetricObject, WeightedGraph};
use frechet_sdr::Matrix;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: u64, msg: String },
    #[error("shape error: {0}")]
    Shape(String),
}

pub type Result<T, E = IngestError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResponseKind {
    Samples,
    Spd,
    Graph,
    Distances,
}

impl ResponseKind {
    pub const ALL: [ResponseKind; 4] = [Self::Samples, Self::Spd, Self::Graph, Self::Distances];

    pub fn label(self) -> &'static str {
        match self {
            Self::Samples => "samples",
            Self::Spd => "spd",
            Self::Graph => "graph",
            Self::Distances => "distances",
        }
    }
}

impl fmt::Display for ResponseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ResponseKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|k| k.label().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown response kind `{s}` (expected samples, spd, graph or distances)"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Responses {
    Objects(Vec<MetricObject>),
    /// A precomputed distance matrix; no metric is applied.
    Distances(DistanceMatrix),
}

impl Responses {
    pub fn len(&self) -> usize {
        match self {
            Responses::Objects(o) => o.len(),
            Responses::Distances(d) => d.n(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Matrix,
    pub responses: Responses,
}

/// Numeric rows with their 1-based line numbers.
type Rows = Vec<(u64, Vec<f64>)>;

fn read_rows(path: &Path, header: bool) -> Result<Rows> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(header)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let values = record
            .iter()
            .enumerate()
            .map(|(k, field)| {
                field
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| IngestError::Parse {
                        path: path.to_path_buf(),
                        line,
                        msg: format!("field {} is not a finite number: `{field}`", k + 1),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push((line, values));
    }
    Ok(rows)
}

fn csv_error(path: &Path, e: csv::Error) -> IngestError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(source) => IngestError::Io {
            path: path.to_path_buf(),
            source,
        },
        kind => IngestError::Parse {
            path: path.to_path_buf(),
            line,
            msg: format!("{kind:?}"),
        },
    }
}

fn parse_error(path: &Path, line: u64, msg: impl Into<String>) -> IngestError {
    IngestError::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

fn rectangular(path: &Path, rows: Rows) -> Result<Matrix> {
    let Some(width) = rows.first().map(|(_, r)| r.len()) else {
        return Err(parse_error(path, 0, "no data rows"));
    };
    let n = rows.len();
    let mut data = Vec::with_capacity(n * width);
    for (line, row) in rows {
        if row.len() != width {
            return Err(parse_error(
                path,
                line,
                format!("expected {width} fields, found {}", row.len()),
            ));
        }
        data.extend(row);
    }
    Ok(Matrix::from_vec(n, width, data).expect("length checked"))
}

pub fn read_predictors(path: &Path) -> Result<Matrix> {
    rectangular(path, read_rows(path, true)?)
}

pub fn read_samples(path: &Path) -> Result<Vec<EmpiricalDistribution>> {
    read_rows(path, false)?
        .into_iter()
        .map(|(line, row)| {
            EmpiricalDistribution::new(row).map_err(|e| parse_error(path, line, e.to_string()))
        })
        .collect()
}

pub fn read_spd(path: &Path) -> Result<Vec<SymMatrix>> {
    let rows = read_rows(path, false)?;
    let mut out = Vec::with_capacity(rows.len());
    for (line, row) in rows {
        let r = (row.len() as f64).sqrt().round() as usize;
        if r == 0 || r * r != row.len() {
            return Err(parse_error(
                path,
                line,
                format!("{} fields is not a square count", row.len()),
            ));
        }
        let m = Matrix::from_vec(r, r, row).expect("square length");
        let s =
            SymMatrix::new(m).map_err(|e| IngestError::Shape(format!("{}:{line}: {e}", path.display())))?;
        matfun::cholesky(&s).map_err(|e| IngestError::Shape(format!("{}:{line}: {e}", path.display())))?;
        out.push(s);
    }
    Ok(out)
}

fn read_edge_list(path: &Path, nodes: usize) -> Result<WeightedGraph> {
    let mut edges = Vec::new();
    for (line, row) in read_rows(path, false)? {
        let (u, v, w) = match row[..] {
            [u, v] => (u, v, 1.0),
            [u, v, w] => (u, v, w),
            _ => {
                return Err(parse_error(
                    path,
                    line,
                    format!("expected 2 or 3 fields, found {}", row.len()),
                ))
            }
        };
        let node = |x: f64| -> Result<usize> {
            if x >= 0.0 && x.fract() == 0.0 && (x as usize) < nodes {
                Ok(x as usize)
            } else {
                Err(parse_error(
                    path,
                    line,
                    format!("`{x}` is not a node index below {nodes}"),
                ))
            }
        };
        edges.push((node(u)?, node(v)?, w));
    }
    WeightedGraph::from_edges(nodes, &edges)
        .map_err(|e| IngestError::Shape(format!("{}: {e}", path.display())))
}

pub fn read_graphs(manifest: &Path) -> Result<Vec<WeightedGraph>> {
    let base = manifest.parent().unwrap_or(Path::new("."));
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(manifest)
        .map_err(|e| csv_error(manifest, e))?;
    let headers = reader.headers().map_err(|e| csv_error(manifest, e))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| parse_error(manifest, 1, format!("missing `{name}` column")))
    };
    let (file_col, nodes_col) = (col("file")?, col("nodes")?);
    let mut graphs = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(manifest, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let file = record.get(file_col).unwrap_or_default();
        let nodes: usize = record
            .get(nodes_col)
            .and_then(|s| s.parse().ok())
            .filter(|&n| n > 0)
            .ok_or_else(|| parse_error(manifest, line, "`nodes` must be a positive integer"))?;
        graphs.push(read_edge_list(&base.join(file), nodes)?);
    }
    Ok(graphs)
}

pub fn read_distances(path: &Path) -> Result<DistanceMatrix> {
    let m = rectangular(path, read_rows(path, false)?)?;
    let n = m.rows();
    if m.cols() != n {
        return Err(IngestError::Shape(format!(
            "distance matrix is {n} × {}",
            m.cols()
        )));
    }
    for i in 0..n {
        if m[(i, i)] != 0.0 {
            return Err(IngestError::Shape(format!(
                "diagonal entry ({i}, {i}) is not zero"
            )));
        }
        for j in 0..n {
            if m[(i, j)] < 0.0 {
                return Err(IngestError::Shape(format!("negative distance at ({i}, {j})")));
            }
            if m[(i, j)] != m[(j, i)] {
                return Err(IngestError::Shape(format!(
                    "entry ({i}, {j}) = {} differs from ({j}, {i}) = {}",
                    m[(i, j)],
                    m[(j, i)]
                )));
            }
        }
    }
    DistanceMatrix::from_entries(m, None).map_err(|e| IngestError::Shape(e.to_string()))
}

pub fn read_responses(path: &Path, kind: ResponseKind) -> Result<Responses> {
    Ok(match kind {
        ResponseKind::Samples => Responses::Objects(
            read_samples(path)?
                .into_iter()
                .map(MetricObject::Distribution)
                .collect(),
        ),
        ResponseKind::Spd => Responses::Objects(read_spd(path)?.into_iter().map(MetricObject::Spd).collect()),
        ResponseKind::Graph => {
            Responses::Objects(read_graphs(path)?.into_iter().map(MetricObject::Graph).collect())
        }
        ResponseKind::Distances => Responses::Distances(read_distances(path)?),
    })
}

pub fn ingest_dataset(predictor_path: &Path, response_path: &Path, kind: ResponseKind) -> Result<Dataset> {
    let x = read_predictors(predictor_path)?;
    let responses = read_responses(response_path, kind)?;
    if responses.len() != x.rows() {
        return Err(IngestError::Shape(format!(
            "{} predictor rows but {} responses",
            x.rows(),
            responses.len()
        )));
    }
    Ok(Dataset { x, responses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn file(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
        let path = dir.path().join(name);
        fs::write(&path, body).unwrap();
        path
    }

    #[test]
    fn predictors_with_header() {
        let dir = tempfile::tempdir().unwrap();
        let x = read_predictors(&file(&dir, "x.csv", "a,b\n1,2\n3, 4\n")).unwrap();
        assert_eq!(x, Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let err = read_predictors(&file(&dir, "x.csv", "a,b\n1,2\n3,oops\n")).unwrap_err();
        assert!(matches!(err, IngestError::Parse { line: 3, .. }), "{err}");
        let err = read_predictors(&file(&dir, "y.csv", "a,b\n1,2\n3\n")).unwrap_err();
        assert!(matches!(err, IngestError::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn ragged_samples_are_accepted() {
        let dir = tempfile::tempdir().unwrap();
        let s = read_samples(&file(&dir, "s.csv", "1,2,3\n# comment\n4,5\n6\n")).unwrap();
        assert_eq!(s.iter().map(|d| d.len()).collect::<Vec<_>>(), vec![3, 2, 1]);
    }

    #[test]
    fn flattened_identity_is_spd() {
        let dir = tempfile::tempdir().unwrap();
        let m = read_spd(&file(&dir, "m.csv", "1,0,0,1\n")).unwrap();
        assert_eq!(m[0], SymMatrix::identity(2));
        assert!(matches!(
            read_spd(&file(&dir, "bad.csv", "1,0,0\n")),
            Err(IngestError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            read_spd(&file(&dir, "asym.csv", "1,2,0,1\n")),
            Err(IngestError::Shape(_))
        ));
        assert!(matches!(
            read_spd(&file(&dir, "neg.csv", "1,0,0,-1\n")),
            Err(IngestError::Shape(_))
        ));
    }

    #[test]
    fn distance_matrix_checks() {
        let dir = tempfile::tempdir().unwrap();
        let d = read_distances(&file(&dir, "d.csv", "0,1,2\n1,0,3\n2,3,0\n")).unwrap();
        assert_eq!(d.get(1, 2), 3.0);
        let bad = [
            "0,1,2\n1,0,3\n2,4,0\n",
            "0,-1\n-1,0\n",
            "1,1\n1,0\n",
            "0,1,2\n1,0,3\n",
        ];
        for body in bad {
            assert!(
                matches!(
                    read_distances(&file(&dir, "b.csv", body)),
                    Err(IngestError::Shape(_))
                ),
                "{body}"
            );
        }
    }

    #[test]
    fn graph_manifest() {
        let dir = tempfile::tempdir().unwrap();
        file(&dir, "g0.csv", "0,1\n1,2,2.5\n");
        file(&dir, "g1.csv", "# no edges\n");
        let manifest = file(&dir, "graphs.csv", "file,nodes\ng0.csv,3\ng1.csv,3\n");
        let g = read_graphs(&manifest).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g[0].weights()[(2, 1)], 2.5);
        assert_eq!(g[1].weighted_degrees(), vec![0.0; 3]);
        file(&dir, "g2.csv", "0,3\n");
        let manifest = file(&dir, "bad.csv", "file,nodes\ng2.csv,3\n");
        assert!(matches!(
            read_graphs(&manifest),
            Err(IngestError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn dataset_sizes_must_match() {
        let dir = tempfile::tempdir().unwrap();
        let x = file(&dir, "x.csv", "a\n1\n2\n3\n");
        let s = file(&dir, "s.csv", "1,2\n3\n");
        assert!(matches!(
            ingest_dataset(&x, &s, ResponseKind::Samples),
            Err(IngestError::Shape(_))
        ));
        let s = file(&dir, "s3.csv", "1,2\n3\n4,5,6\n");
        let data = ingest_dataset(&x, &s, ResponseKind::Samples).unwrap();
        assert_eq!(data.responses.len(), 3);
        assert!(matches!(
            ingest_dataset(&dir.path().join("missing.csv"), &s, ResponseKind::Samples),
            Err(IngestError::Io { .. })
        ));
    }

    #[test]
    fn kinds_round_trip() {
        for k in ResponseKind::ALL {
            assert_eq!(k.label().parse::<ResponseKind>().unwrap(), k);
        }
        assert!("tree".parse::<ResponseKind>().is_err());
    }
}
