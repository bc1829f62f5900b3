//! Matrix ingestion (CSV and Matrix Market), dataset splitting, and the
//! structured run-report format.
//!
//! Numbers are serialized with 17 significant digits so that write -> load
//! round-trips are exact for 64-bit floats.

use crate::error::{Error, Result};
use crate::instances::{InstanceMetadata, InstancePair};
use crate::linalg::DenseMatrix;
use crate::selection::SigmaOmegaMode;
use std::fs;
use std::io::Write;
use std::path::Path;

/// Supported on-disk matrix formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    /// Comma-separated rows, '.' decimal point, optional '#' comment lines,
    /// optional single header row.
    Csv,
    /// Matrix Market `array` or `coordinate`, real/integer, general or
    /// symmetric. Coordinate data is densified.
    MatrixMarket,
}

impl std::str::FromStr for MatrixFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(MatrixFormat::Csv),
            "mm" | "mtx" | "matrix-market" => Ok(MatrixFormat::MatrixMarket),
            other => Err(Error::InvalidParameter(format!("unknown matrix format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Skip one header row (CSV only).
    pub has_header: bool,
}

/// Format a float with full round-trip precision (17 significant digits).
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Load a dense matrix from `path`.
pub fn load_matrix(path: &Path, format: MatrixFormat, options: &LoadOptions) -> Result<DenseMatrix> {
    let text = fs::read_to_string(path)?;
    let name = path.display().to_string();
    match format {
        MatrixFormat::Csv => parse_csv(&text, &name, options.has_header),
        MatrixFormat::MatrixMarket => parse_matrix_market(&text, &name),
    }
}

fn parse_err(path: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse { path: path.to_string(), line, message: message.into() }
}

fn parse_csv(text: &str, path: &str, has_header: bool) -> Result<DenseMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = 0usize;
    let mut header_skipped = !has_header;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_skipped {
            header_skipped = true;
            continue;
        }
        let mut row = Vec::new();
        for cell in line.split(',') {
            let cell = cell.trim();
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_err(path, lineno + 1, format!("non-numeric cell '{cell}'")))?;
            row.push(v);
        }
        if rows.is_empty() {
            width = row.len();
        } else if row.len() != width {
            return Err(parse_err(
                path,
                lineno + 1,
                format!("ragged row: {} cells, expected {width}", row.len()),
            ));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err(path, 1, "no data rows"));
    }
    let (m, n) = (rows.len(), width);
    DenseMatrix::from_fn(m, n, |r, c| rows[r][c])
}

fn parse_matrix_market(text: &str, path: &str) -> Result<DenseMatrix> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() < 4 || tokens[0] != "%%MatrixMarket" || tokens[1] != "matrix" {
        return Err(parse_err(path, 1, "expected '%%MatrixMarket matrix <format> <field> <symmetry>'"));
    }
    let layout = tokens[2].to_ascii_lowercase();
    let field = tokens[3].to_ascii_lowercase();
    let symmetry = tokens.get(4).map(|s| s.to_ascii_lowercase()).unwrap_or_else(|| "general".into());
    if field != "real" && field != "integer" {
        return Err(parse_err(path, 1, format!("unsupported field qualifier '{field}'")));
    }
    let symmetric = match symmetry.as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(parse_err(path, 1, format!("unsupported symmetry qualifier '{other}'"))),
    };

    // skip comments, find the size line
    let mut size_line = None;
    for (lineno, raw) in lines.by_ref() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        size_line = Some((lineno, line));
        break;
    }
    let (size_no, size_text) = size_line.ok_or_else(|| parse_err(path, 1, "missing size line"))?;
    let dims: Vec<usize> = size_text
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(path, size_no + 1, format!("bad size token '{t}'"))))
        .collect::<Result<_>>()?;

    match layout.as_str() {
        "array" => {
            if dims.len() != 2 {
                return Err(parse_err(path, size_no + 1, "array size line must be 'rows cols'"));
            }
            let (m, n) = (dims[0], dims[1]);
            let mut data = Vec::with_capacity(m * n);
            for (lineno, raw) in lines {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('%') {
                    continue;
                }
                for tok in line.split_whitespace() {
                    let v: f64 = tok.parse().map_err(|_| {
                        parse_err(path, lineno + 1, format!("non-numeric entry '{tok}'"))
                    })?;
                    data.push(v);
                }
            }
            if data.len() != m * n {
                return Err(parse_err(
                    path,
                    size_no + 1,
                    format!("expected {} entries, found {}", m * n, data.len()),
                ));
            }
            if symmetric {
                // array symmetric stores the lower triangle; not produced by
                // this crate and rarely seen for dense data
                return Err(parse_err(path, 1, "symmetric array layout is not supported"));
            }
            DenseMatrix::new(m, n, data)
        }
        "coordinate" => {
            if dims.len() != 3 {
                return Err(parse_err(path, size_no + 1, "coordinate size line must be 'rows cols nnz'"));
            }
            let (m, n, nnz) = (dims[0], dims[1], dims[2]);
            if m == 0 || n == 0 {
                return Err(Error::EmptyMatrix { rows: m, cols: n });
            }
            let mut dense = vec![0.0; m * n];
            let mut seen = 0usize;
            for (lineno, raw) in lines {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('%') {
                    continue;
                }
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(parse_err(path, lineno + 1, "coordinate entry must be 'i j value'"));
                }
                let i: usize = toks[0]
                    .parse()
                    .map_err(|_| parse_err(path, lineno + 1, format!("bad row index '{}'", toks[0])))?;
                let j: usize = toks[1]
                    .parse()
                    .map_err(|_| parse_err(path, lineno + 1, format!("bad col index '{}'", toks[1])))?;
                let v: f64 = toks[2]
                    .parse()
                    .map_err(|_| parse_err(path, lineno + 1, format!("non-numeric entry '{}'", toks[2])))?;
                if i == 0 || i > m || j == 0 || j > n {
                    return Err(parse_err(path, lineno + 1, format!("index ({i}, {j}) out of bounds")));
                }
                dense[(j - 1) * m + (i - 1)] += v;
                if symmetric && i != j {
                    dense[(i - 1) * m + (j - 1)] += v;
                }
                seen += 1;
            }
            if seen != nnz {
                return Err(parse_err(path, size_no + 1, format!("expected {nnz} entries, found {seen}")));
            }
            DenseMatrix::new(m, n, dense)
        }
        other => Err(parse_err(path, 1, format!("unsupported layout qualifier '{other}'"))),
    }
}

/// Write a matrix as CSV (one row per line, full float precision).
pub fn write_matrix_csv(path: &Path, m: &DenseMatrix) -> Result<()> {
    let mut out = String::new();
    for r in 0..m.rows() {
        let cells: Vec<String> = (0..m.cols()).map(|c| fmt_f64(m.get(r, c))).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    atomic_write(path, out.as_bytes())
}

/// Write a matrix in Matrix Market array format (real general, column-major).
pub fn write_matrix_market(path: &Path, m: &DenseMatrix) -> Result<()> {
    let mut out = String::from("%%MatrixMarket matrix array real general\n");
    out.push_str(&format!("{} {}\n", m.rows(), m.cols()));
    for c in 0..m.cols() {
        for r in 0..m.rows() {
            out.push_str(&fmt_f64(m.get(r, c)));
            out.push('\n');
        }
    }
    atomic_write(path, out.as_bytes())
}

/// Split the columns of `x` into an (A, B) pair: A takes the first
/// ceil(fraction * cols) columns, B the remainder. With `center`, each
/// output column has its mean subtracted (the CCA preprocessing; centering
/// is opt-in, never silent).
pub fn split_columns(x: &DenseMatrix, fraction: f64, center: bool) -> Result<InstancePair> {
    if x.cols() < 2 {
        return Err(Error::InvalidParameter("need at least 2 columns to split".into()));
    }
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidParameter(format!("fraction must lie in (0, 1), got {fraction}")));
    }
    let n = x.cols();
    let n_a = ((fraction * n as f64).ceil() as usize).clamp(1, n - 1);
    let a_idx: Vec<usize> = (1..=n_a).collect();
    let b_idx: Vec<usize> = (n_a + 1..=n).collect();
    let mut a = x.column_subset(&a_idx)?.into_inner();
    let mut b = x.column_subset(&b_idx)?.into_inner();
    if center {
        for m in [&mut a, &mut b] {
            for mut col in m.column_iter_mut() {
                let mean = col.iter().sum::<f64>() / col.len() as f64;
                col.add_scalar_mut(-mean);
            }
        }
    }
    Ok(InstancePair {
        a: DenseMatrix::from_dmatrix(a)?,
        b: DenseMatrix::from_dmatrix(b)?,
        metadata: InstanceMetadata {
            generator: "split".into(),
            params: vec![
                ("fraction".into(), format!("{fraction}")),
                ("center".into(), center.to_string()),
                ("cols_a".into(), n_a.to_string()),
                ("cols_b".into(), (n - n_a).to_string()),
            ],
        },
    })
}

/// Schema tag written at the top of every report.
pub const REPORT_SCHEMA: &str = "leverkit-report-v1";

/// Wall-clock timings in milliseconds; absent in dry-run reports.
#[derive(Debug, Clone, PartialEq)]
pub struct Timings {
    pub svd_ms: f64,
    pub selection_ms: f64,
    pub total_ms: f64,
}

/// Algorithm parameters recorded in a report. Unused fields stay `None` and
/// are omitted from the serialized form.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunParams {
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub k: Option<usize>,
    pub r_size: Option<usize>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub rank_tol: Option<f64>,
    pub sigma_omega_mode: Option<SigmaOmegaMode>,
}

/// One run of one algorithm on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub tool_version: String,
    pub algorithm: String,
    pub instance: String,
    pub params: RunParams,
    /// |R| fraction of the retained rank in bench experimental mode.
    pub r_fraction: Option<f64>,
    /// 1-based selected column indices in selection order.
    pub selected: Vec<usize>,
    pub objective: f64,
    /// objective / ||A A^+ B||_F^2, in [0, 1] up to rounding.
    pub objective_ratio: Option<f64>,
    pub bound: Option<f64>,
    pub thresholds_met: Option<bool>,
    pub timings: Option<Timings>,
    /// Sub-run failure, recorded per row instead of aborting a sweep.
    pub error: Option<String>,
}

impl RunReport {
    pub fn new(algorithm: &str, instance: &str) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            algorithm: algorithm.to_string(),
            instance: instance.to_string(),
            params: RunParams::default(),
            r_fraction: None,
            selected: Vec::new(),
            objective: 0.0,
            objective_ratio: None,
            bound: None,
            thresholds_met: None,
            timings: None,
            error: None,
        }
    }

    /// Stable key/value rendering. Field order is fixed; optional fields are
    /// omitted entirely so a dry-run report is still schema-valid.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        kv("schema", REPORT_SCHEMA.into());
        kv("tool_version", self.tool_version.clone());
        kv("algorithm", self.algorithm.clone());
        kv("instance", self.instance.clone());
        if let Some(v) = self.params.epsilon {
            kv("param.epsilon", fmt_f64(v));
        }
        if let Some(v) = self.params.delta {
            kv("param.delta", fmt_f64(v));
        }
        if let Some(v) = self.params.k {
            kv("param.k", v.to_string());
        }
        if let Some(v) = self.params.r_size {
            kv("param.r_size", v.to_string());
        }
        if let Some(v) = self.params.seed {
            kv("param.seed", v.to_string());
        }
        if let Some(v) = self.params.trials {
            kv("param.trials", v.to_string());
        }
        if let Some(v) = self.params.rank_tol {
            kv("param.rank_tol", fmt_f64(v));
        }
        if let Some(v) = self.params.sigma_omega_mode {
            kv("param.sigma_omega_mode", v.to_string());
        }
        if let Some(v) = self.r_fraction {
            kv("r_fraction", fmt_f64(v));
        }
        let sel: Vec<String> = self.selected.iter().map(|i| i.to_string()).collect();
        kv("selected", sel.join(","));
        kv("objective", fmt_f64(self.objective));
        if let Some(v) = self.objective_ratio {
            kv("objective_ratio", fmt_f64(v));
        }
        if let Some(v) = self.bound {
            kv("bound", fmt_f64(v));
        }
        if let Some(v) = self.thresholds_met {
            kv("thresholds_met", v.to_string());
        }
        if let Some(t) = &self.timings {
            kv("timing.svd_ms", fmt_f64(t.svd_ms));
            kv("timing.selection_ms", fmt_f64(t.selection_ms));
            kv("timing.total_ms", fmt_f64(t.total_ms));
        }
        if let Some(e) = &self.error {
            kv("error", e.clone());
        }
        out
    }

    /// Parse a rendered report back. Inverse of [`render`](Self::render) on
    /// the value level.
    pub fn parse(text: &str) -> Result<Self> {
        let mut fields = std::collections::BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once(" = ").ok_or_else(|| Error::Parse {
                path: "<report>".into(),
                line: lineno + 1,
                message: format!("expected 'key = value', got '{line}'"),
            })?;
            fields.insert(k.to_string(), v.to_string());
        }
        let get = |k: &str| fields.get(k).cloned();
        let schema = get("schema").unwrap_or_default();
        if schema != REPORT_SCHEMA {
            return Err(Error::InvalidParameter(format!(
                "unknown report schema '{schema}', expected '{REPORT_SCHEMA}'"
            )));
        }
        let parse_f64 = |k: &str| -> Result<Option<f64>> {
            match fields.get(k) {
                None => Ok(None),
                Some(v) => v.parse().map(Some).map_err(|_| {
                    Error::InvalidParameter(format!("bad float for {k}: '{v}'"))
                }),
            }
        };
        let parse_usize = |k: &str| -> Result<Option<usize>> {
            match fields.get(k) {
                None => Ok(None),
                Some(v) => v.parse().map(Some).map_err(|_| {
                    Error::InvalidParameter(format!("bad integer for {k}: '{v}'"))
                }),
            }
        };

        let selected = match get("selected") {
            Some(s) if !s.is_empty() => s
                .split(',')
                .map(|t| {
                    t.parse().map_err(|_| Error::InvalidParameter(format!("bad index '{t}'")))
                })
                .collect::<Result<Vec<usize>>>()?,
            _ => Vec::new(),
        };
        let sigma_omega_mode = match get("param.sigma_omega_mode").as_deref() {
            None => None,
            Some("proof") => Some(SigmaOmegaMode::Proof),
            Some("statement") => Some(SigmaOmegaMode::Statement),
            Some(other) => {
                return Err(Error::InvalidParameter(format!("bad sigma_omega_mode '{other}'")))
            }
        };
        let timings = match (
            parse_f64("timing.svd_ms")?,
            parse_f64("timing.selection_ms")?,
            parse_f64("timing.total_ms")?,
        ) {
            (Some(svd_ms), Some(selection_ms), Some(total_ms)) => {
                Some(Timings { svd_ms, selection_ms, total_ms })
            }
            (None, None, None) => None,
            _ => return Err(Error::InvalidParameter("partial timing fields".into())),
        };

        Ok(Self {
            tool_version: get("tool_version").unwrap_or_default(),
            algorithm: get("algorithm").unwrap_or_default(),
            instance: get("instance").unwrap_or_default(),
            params: RunParams {
                epsilon: parse_f64("param.epsilon")?,
                delta: parse_f64("param.delta")?,
                k: parse_usize("param.k")?,
                r_size: parse_usize("param.r_size")?,
                seed: fields
                    .get("param.seed")
                    .map(|v| {
                        v.parse()
                            .map_err(|_| Error::InvalidParameter(format!("bad seed '{v}'")))
                    })
                    .transpose()?,
                trials: parse_usize("param.trials")?,
                rank_tol: parse_f64("param.rank_tol")?,
                sigma_omega_mode,
            },
            r_fraction: parse_f64("r_fraction")?,
            selected,
            objective: parse_f64("objective")?.ok_or_else(|| {
                Error::InvalidParameter("report missing objective".into())
            })?,
            objective_ratio: parse_f64("objective_ratio")?,
            bound: parse_f64("bound")?,
            thresholds_met: match get("thresholds_met").as_deref() {
                None => None,
                Some("true") => Some(true),
                Some("false") => Some(false),
                Some(other) => {
                    return Err(Error::InvalidParameter(format!("bad thresholds_met '{other}'")))
                }
            },
            timings,
            error: get("error"),
        })
    }

    /// Header for the flat CSV aggregation variant.
    pub fn csv_header() -> &'static str {
        "algorithm,instance,r_fraction,k,epsilon,delta,seed,trials,r_size,selected,\
         objective,objective_ratio,bound,thresholds_met,svd_ms,selection_ms,total_ms"
    }

    /// One flat CSV row (selected indices joined by '|'; instance quoted).
    pub fn to_csv_row(&self) -> String {
        fn opt_f(v: Option<f64>) -> String {
            v.map(fmt_f64).unwrap_or_default()
        }
        fn opt_u(v: Option<usize>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        let sel: Vec<String> = self.selected.iter().map(|i| i.to_string()).collect();
        let t = self.timings.as_ref();
        [
            self.algorithm.clone(),
            format!("\"{}\"", self.instance),
            opt_f(self.r_fraction),
            opt_u(self.params.k),
            opt_f(self.params.epsilon),
            opt_f(self.params.delta),
            self.params.seed.map(|s| s.to_string()).unwrap_or_default(),
            opt_u(self.params.trials),
            opt_u(self.params.r_size),
            sel.join("|"),
            fmt_f64(self.objective),
            opt_f(self.objective_ratio),
            opt_f(self.bound),
            self.thresholds_met.map(|b| b.to_string()).unwrap_or_default(),
            opt_f(t.map(|t| t.svd_ms)),
            opt_f(t.map(|t| t.selection_ms)),
            opt_f(t.map(|t| t.total_ms)),
        ]
        .join(",")
    }
}

/// Serialize a report to `path` (written atomically: temp file + rename).
pub fn write_report(report: &RunReport, path: &Path) -> Result<()> {
    atomic_write(path, report.render().as_bytes())
}

pub fn read_report(path: &Path) -> Result<RunReport> {
    RunReport::parse(&fs::read_to_string(path)?)
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let tmp = match dir {
        Some(d) => d.join(format!(
            ".{}.tmp-{}",
            path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
            std::process::id()
        )),
        None => std::path::PathBuf::from(format!(".leverkit-tmp-{}", std::process::id())),
    };
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    fn tmpdir() -> tempfile::TempDir {
        tempfile::tempdir().unwrap()
    }

    #[test]
    fn csv_basic_and_errors() {
        let dir = tmpdir();
        let p = dir.path().join("m.csv");
        fs::write(&p, "# comment\n1,2\n3,4\n").unwrap();
        let m = load_matrix(&p, MatrixFormat::Csv, &LoadOptions::default()).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 2));
        assert_eq!(m.get(0, 1), 2.0);
        assert_eq!(m.get(1, 0), 3.0);

        fs::write(&p, "a,b\n1,2\n").unwrap();
        let m = load_matrix(&p, MatrixFormat::Csv, &LoadOptions { has_header: true }).unwrap();
        assert_eq!((m.rows(), m.cols()), (1, 2));

        fs::write(&p, "1,2\n3\n").unwrap();
        let err = load_matrix(&p, MatrixFormat::Csv, &LoadOptions::default());
        assert!(matches!(err, Err(Error::Parse { line: 2, .. })));

        fs::write(&p, "1,x\n").unwrap();
        let err = load_matrix(&p, MatrixFormat::Csv, &LoadOptions::default());
        assert!(matches!(err, Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn matrix_market_array_is_column_major() {
        let dir = tmpdir();
        let p = dir.path().join("m.mtx");
        fs::write(&p, "%%MatrixMarket matrix array real general\n2 2\n1\n3\n2\n4\n").unwrap();
        let m = load_matrix(&p, MatrixFormat::MatrixMarket, &LoadOptions::default()).unwrap();
        assert_eq!(m.get(0, 0), 1.0);
        assert_eq!(m.get(1, 0), 3.0);
        assert_eq!(m.get(0, 1), 2.0);
        assert_eq!(m.get(1, 1), 4.0);
    }

    #[test]
    fn matrix_market_coordinate_densifies_and_mirrors() {
        let dir = tmpdir();
        let p = dir.path().join("m.mtx");
        fs::write(
            &p,
            "%%MatrixMarket matrix coordinate real general\n% note\n2 3 2\n1 2 5.5\n2 3 -1\n",
        )
        .unwrap();
        let m = load_matrix(&p, MatrixFormat::MatrixMarket, &LoadOptions::default()).unwrap();
        assert_eq!(m.get(0, 1), 5.5);
        assert_eq!(m.get(1, 2), -1.0);
        assert_eq!(m.get(0, 0), 0.0);

        fs::write(
            &p,
            "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 2\n2 1 7\n",
        )
        .unwrap();
        let m = load_matrix(&p, MatrixFormat::MatrixMarket, &LoadOptions::default()).unwrap();
        assert_eq!(m.get(0, 1), 7.0);
        assert_eq!(m.get(1, 0), 7.0);

        fs::write(&p, "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n").unwrap();
        assert!(load_matrix(&p, MatrixFormat::MatrixMarket, &LoadOptions::default()).is_err());
    }

    #[test]
    fn write_load_round_trips_exactly() {
        let dir = tmpdir();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let m = DenseMatrix::from_fn(5, 3, |_, _| rng.random_range(-10.0..10.0) / 3.0).unwrap();

        let p = dir.path().join("m.csv");
        write_matrix_csv(&p, &m).unwrap();
        let back = load_matrix(&p, MatrixFormat::Csv, &LoadOptions::default()).unwrap();
        assert_eq!(m, back);

        let p = dir.path().join("m.mtx");
        write_matrix_market(&p, &m).unwrap();
        let back = load_matrix(&p, MatrixFormat::MatrixMarket, &LoadOptions::default()).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn split_examples() {
        let x = DenseMatrix::from_fn(3, 4, |r, c| (r * 4 + c) as f64).unwrap();
        let pair = split_columns(&x, 0.5, false).unwrap();
        assert_eq!(pair.a.cols(), 2);
        assert_eq!(pair.b.cols(), 2);
        assert_eq!(pair.a.get(0, 0), 0.0);
        assert_eq!(pair.b.get(0, 0), 2.0);

        let x8 = DenseMatrix::from_fn(2, 8, |r, c| (r + c) as f64).unwrap();
        let pair = split_columns(&x8, 0.25, false).unwrap();
        assert_eq!(pair.a.cols(), 2);

        let centered = split_columns(&x, 0.5, true).unwrap();
        for m in [&centered.a, &centered.b] {
            for c in 0..m.cols() {
                let sum: f64 = (0..m.rows()).map(|r| m.get(r, c)).sum();
                assert_abs_diff_eq!(sum, 0.0, epsilon = 1e-9);
            }
        }

        assert!(split_columns(&x, 0.0, false).is_err());
        assert!(split_columns(&x, 1.0, false).is_err());
    }

    #[test]
    fn split_reassembles_in_order() {
        let x = DenseMatrix::from_fn(2, 5, |r, c| (10 * r + c) as f64).unwrap();
        let pair = split_columns(&x, 0.5, false).unwrap();
        let mut cols: Vec<Vec<f64>> = Vec::new();
        for m in [&pair.a, &pair.b] {
            for c in 0..m.cols() {
                cols.push((0..m.rows()).map(|r| m.get(r, c)).collect());
            }
        }
        for (c, col) in cols.iter().enumerate() {
            for (r, v) in col.iter().enumerate() {
                assert_eq!(*v, x.get(r, c));
            }
        }
    }

    #[test]
    fn report_round_trip() {
        let mut rep = RunReport::new("gls", "lowrank(m=10,n=8,rank=3,noise=0,seed=1)");
        rep.params.epsilon = Some(0.2);
        rep.params.delta = Some(0.1);
        rep.params.k = Some(4);
        rep.params.seed = Some(42);
        rep.params.rank_tol = Some(1e-10);
        rep.params.sigma_omega_mode = Some(SigmaOmegaMode::Proof);
        rep.r_fraction = Some(0.25);
        rep.selected = vec![3, 1, 7];
        rep.objective = 1.234567890123456789;
        rep.objective_ratio = Some(0.91);
        rep.bound = Some(0.71);
        rep.thresholds_met = Some(true);
        rep.timings = Some(Timings { svd_ms: 1.5, selection_ms: 0.25, total_ms: 2.0 });

        let text = rep.render();
        let back = RunReport::parse(&text).unwrap();
        assert_eq!(rep, back);

        // dry-run variant: no timings, still valid
        rep.timings = None;
        let back = RunReport::parse(&rep.render()).unwrap();
        assert_eq!(back.timings, None);
        assert_eq!(rep, back);
    }

    #[test]
    fn report_file_round_trip_and_csv_row() {
        let dir = tmpdir();
        let p = dir.path().join("run.report");
        let mut rep = RunReport::new("greedy", "test");
        rep.selected = vec![2, 5];
        rep.objective = 0.5;
        write_report(&rep, &p).unwrap();
        let back = read_report(&p).unwrap();
        assert_eq!(rep, back);

        let row = rep.to_csv_row();
        assert!(row.starts_with("greedy,\"test\","));
        assert_eq!(row.split(',').count(), RunReport::csv_header().split(',').count());
    }
}
