//! Ramsey tables over tree catalogs and their csv, json and text forms.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use ramsey_core::catalog::TreeClass;
use ramsey_core::driver::{RamseyResult, ResultStatus};
use ramsey_core::theorems::{OracleSource, VerdictKind};

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("table has no cells")]
    Empty,
    #[error("mixed orders along one axis: {0} and {1}")]
    MixedOrders(usize, usize),
    #[error("result matrix is {got_rows}x{got_cols}, expected {rows}x{cols}")]
    Shape {
        rows: usize,
        cols: usize,
        got_rows: usize,
        got_cols: usize,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed table: {0}")]
    Malformed(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Symmetry {
    Full,
    UpperTriangular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableFormat {
    Csv,
    Json,
    Text,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Axis {
    /// Catalog index, 1-based.
    pub index: usize,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableCell {
    pub row: usize,
    pub col: usize,
    pub value: Option<usize>,
    pub status: Option<ResultStatus>,
    /// Zero-objective classes at `r - 1`.
    pub critical: Option<u64>,
    /// Minimum-objective classes at `r`.
    pub optimal: Option<u64>,
    /// Minimum objective at `r`.
    pub min: Option<u64>,
    /// Oracles whose exact value equals the cell value.
    pub sources: Vec<OracleSource>,
    pub error: Option<String>,
}

impl TableCell {
    fn from_result(row: usize, col: usize, r: &Result<RamseyResult, ramsey_core::Error>) -> Self {
        match r {
            Ok(r) => Self {
                row,
                col,
                value: Some(r.value),
                status: Some(r.status),
                critical: r.critical.as_ref().map(|c| c.count),
                optimal: r.optimal.as_ref().map(|c| c.count),
                min: r.optimal.as_ref().map(|c| c.min),
                sources: r
                    .oracles
                    .iter()
                    .filter(|v| v.kind == VerdictKind::Exact && v.value == Some(r.value))
                    .map(|v| v.source)
                    .collect(),
                error: None,
            },
            Err(e) => Self {
                row,
                col,
                value: None,
                status: None,
                critical: None,
                optimal: None,
                min: None,
                sources: Vec::new(),
                error: Some(e.to_string()),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDocument {
    pub row_order: usize,
    pub col_order: usize,
    pub symmetry: Symmetry,
    pub rows: Vec<Axis>,
    pub cols: Vec<Axis>,
    /// Sorted by (row, col) catalog index.
    pub cells: Vec<TableCell>,
}

fn axis_order(classes: &[TreeClass]) -> Result<usize, TableError> {
    let first = classes.first().ok_or(TableError::Empty)?.order;
    match classes.iter().find(|c| c.order != first) {
        Some(c) => Err(TableError::MixedOrders(first, c.order)),
        None => Ok(first),
    }
}

impl TableDocument {
    /// `results[i][j]` belongs to `rows[i]` and `cols[j]`. Inputs may come in
    /// any order; the document is sorted by catalog index.
    pub fn from_results(
        rows: &[TreeClass],
        cols: &[TreeClass],
        results: &[Vec<Result<RamseyResult, ramsey_core::Error>>],
    ) -> Result<Self, TableError> {
        let row_order = axis_order(rows)?;
        let col_order = axis_order(cols)?;
        let shape_ok = results.len() == rows.len() && results.iter().all(|r| r.len() == cols.len());
        if !shape_ok {
            return Err(TableError::Shape {
                rows: rows.len(),
                cols: cols.len(),
                got_rows: results.len(),
                got_cols: results.first().map_or(0, Vec::len),
            });
        }
        let axis = |cs: &[TreeClass]| {
            let mut a: Vec<Axis> = cs
                .iter()
                .map(|c| Axis {
                    index: c.index,
                    label: c.label(),
                })
                .collect();
            a.sort_by_key(|x| x.index);
            a
        };
        let (ra, ca) = (axis(rows), axis(cols));
        let symmetry = if row_order == col_order && ra == ca {
            Symmetry::UpperTriangular
        } else {
            Symmetry::Full
        };
        let mut cells = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            for (j, c) in cols.iter().enumerate() {
                if symmetry == Symmetry::UpperTriangular && r.index > c.index {
                    continue;
                }
                cells.push(TableCell::from_result(r.index, c.index, &results[i][j]));
            }
        }
        cells.sort_by_key(|c| (c.row, c.col));
        Ok(Self {
            row_order,
            col_order,
            symmetry,
            rows: ra,
            cols: ca,
            cells,
        })
    }

    pub fn cell(&self, row: usize, col: usize) -> Option<&TableCell> {
        let key = if self.symmetry == Symmetry::UpperTriangular && row > col {
            (col, row)
        } else {
            (row, col)
        };
        self.cells
            .binary_search_by_key(&key, |c| (c.row, c.col))
            .ok()
            .map(|i| &self.cells[i])
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    row_order: usize,
    col_order: usize,
    symmetry: Symmetry,
    row: usize,
    col: usize,
    row_label: String,
    col_label: String,
    value: Option<usize>,
    status: Option<ResultStatus>,
    critical: Option<u64>,
    optimal: Option<u64>,
    min: Option<u64>,
    sources: String,
    error: Option<String>,
}

fn source_name(s: OracleSource) -> String {
    s.to_string()
}

fn parse_source(s: &str) -> Result<OracleSource, TableError> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| TableError::Malformed(format!("unknown oracle source {s:?}")))
}

pub fn emit_table(doc: &TableDocument, format: TableFormat) -> Result<String, TableError> {
    if doc.cells.is_empty() {
        return Err(TableError::Empty);
    }
    match format {
        TableFormat::Json => Ok(serde_json::to_string_pretty(doc)? + "\n"),
        TableFormat::Csv => emit_csv(doc),
        TableFormat::Text => Ok(emit_text(doc)),
    }
}

fn emit_csv(doc: &TableDocument) -> Result<String, TableError> {
    let labels = |axis: &[Axis]| {
        axis.iter()
            .map(|a| (a.index, a.label.clone()))
            .collect::<BTreeMap<_, _>>()
    };
    let (rl, cl) = (labels(&doc.rows), labels(&doc.cols));
    let mut w = csv::Writer::from_writer(Vec::new());
    for c in &doc.cells {
        w.serialize(CsvRow {
            row_order: doc.row_order,
            col_order: doc.col_order,
            symmetry: doc.symmetry,
            row: c.row,
            col: c.col,
            row_label: rl.get(&c.row).cloned().unwrap_or_default(),
            col_label: cl.get(&c.col).cloned().unwrap_or_default(),
            value: c.value,
            status: c.status,
            critical: c.critical,
            optimal: c.optimal,
            min: c.min,
            sources: c
                .sources
                .iter()
                .map(|s| source_name(*s))
                .collect::<Vec<_>>()
                .join("+"),
            error: c.error.clone(),
        })?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| TableError::Malformed(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| TableError::Malformed(e.to_string()))
}

/// Inverse of the csv form of [`emit_table`].
pub fn parse_csv(text: &str) -> Result<TableDocument, TableError> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let mut meta = None;
    let mut rows = BTreeMap::new();
    let mut cols = BTreeMap::new();
    let mut cells = Vec::new();
    for rec in rd.deserialize::<CsvRow>() {
        let r = rec?;
        let m = (r.row_order, r.col_order, r.symmetry);
        if *meta.get_or_insert(m) != m {
            return Err(TableError::Malformed(
                "rows disagree on table metadata".into(),
            ));
        }
        rows.insert(r.row, r.row_label);
        cols.insert(r.col, r.col_label);
        let sources = r
            .sources
            .split('+')
            .filter(|s| !s.is_empty())
            .map(parse_source)
            .collect::<Result<_, _>>()?;
        cells.push(TableCell {
            row: r.row,
            col: r.col,
            value: r.value,
            status: r.status,
            critical: r.critical,
            optimal: r.optimal,
            min: r.min,
            sources,
            error: r.error,
        });
    }
    let (row_order, col_order, symmetry) = meta.ok_or(TableError::Empty)?;
    let axis = |m: BTreeMap<usize, String>| {
        m.into_iter()
            .map(|(index, label)| Axis { index, label })
            .collect()
    };
    let (rows, cols) = match symmetry {
        Symmetry::Full => (axis(rows), axis(cols)),
        Symmetry::UpperTriangular => {
            let mut all = rows;
            all.extend(cols);
            (axis(all.clone()), axis(all))
        }
    };
    cells.sort_by_key(|c| (c.row, c.col));
    Ok(TableDocument {
        row_order,
        col_order,
        symmetry,
        rows,
        cols,
        cells,
    })
}

fn cell_text(c: Option<&TableCell>) -> String {
    let Some(c) = c else {
        return String::new();
    };
    match (c.value, c.status) {
        (Some(v), Some(ResultStatus::Exact)) if c.sources.is_empty() => v.to_string(),
        (Some(v), Some(ResultStatus::Exact)) => {
            let s: Vec<String> = c.sources.iter().map(|s| source_name(*s)).collect();
            format!("{v}^{}", s.join(","))
        }
        (Some(v), _) => format!(">={v}"),
        _ => "error".into(),
    }
}

fn emit_text(doc: &TableDocument) -> String {
    let mut grid = vec![vec![String::new(); doc.cols.len() + 1]; doc.rows.len() + 1];
    grid[0][0] = format!("T{}\\T{}", doc.row_order, doc.col_order);
    for (j, c) in doc.cols.iter().enumerate() {
        grid[0][j + 1] = c.index.to_string();
    }
    for (i, r) in doc.rows.iter().enumerate() {
        grid[i + 1][0] = r.index.to_string();
        for (j, c) in doc.cols.iter().enumerate() {
            let shown = doc.symmetry == Symmetry::Full || r.index <= c.index;
            if shown {
                grid[i + 1][j + 1] = cell_text(doc.cell(r.index, c.index));
            }
        }
    }
    let width = grid.iter().flatten().map(String::len).max().unwrap_or(1);
    let mut out = String::new();
    for line in &grid {
        let cells: Vec<String> = line.iter().map(|s| format!("{s:>width$}")).collect();
        let _ = writeln!(out, "{}", cells.join(" ").trim_end());
    }
    out.push('\n');
    for a in doc
        .rows
        .iter()
        .chain(doc.cols.iter().filter(|c| !doc.rows.contains(c)))
    {
        let _ = writeln!(out, "{}", a.label);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ramsey_core::catalog::free_trees;
    use ramsey_core::driver::{compute_table, DriverOptions};

    fn small_doc() -> TableDocument {
        let cat = free_trees(4).unwrap();
        let gs: Vec<_> = cat.iter().map(|c| c.representative).collect();
        let opts = DriverOptions {
            census: true,
            ..Default::default()
        };
        let res = compute_table(&gs, &gs, &opts);
        TableDocument::from_results(&cat, &cat, &res).unwrap()
    }

    #[test]
    fn csv_round_trip() {
        let doc = small_doc();
        assert_eq!(doc.symmetry, Symmetry::UpperTriangular);
        assert_eq!(doc.cells.len(), 3);
        let text = emit_table(&doc, TableFormat::Csv).unwrap();
        assert_eq!(parse_csv(&text).unwrap(), doc);
        let json = emit_table(&doc, TableFormat::Json).unwrap();
        assert_eq!(serde_json::from_str::<TableDocument>(&json).unwrap(), doc);
    }

    #[test]
    fn permutation_stable() {
        let cat = free_trees(4).unwrap();
        let mut rev: Vec<TreeClass> = cat.iter().cloned().collect();
        rev.reverse();
        let gs: Vec<_> = rev.iter().map(|c| c.representative).collect();
        let res = compute_table(
            &gs,
            &gs,
            &DriverOptions {
                census: true,
                ..Default::default()
            },
        );
        let doc = TableDocument::from_results(&rev, &rev, &res).unwrap();
        assert_eq!(doc, small_doc());
        for f in [TableFormat::Csv, TableFormat::Json, TableFormat::Text] {
            assert_eq!(
                emit_table(&doc, f).unwrap(),
                emit_table(&small_doc(), f).unwrap()
            );
        }
    }

    #[test]
    fn empty_and_mixed_are_rejected() {
        assert!(matches!(
            TableDocument::from_results(&[], &[], &[]),
            Err(TableError::Empty)
        ));
        let mut mixed: Vec<TreeClass> = free_trees(4).unwrap().iter().cloned().collect();
        mixed.push(free_trees(5).unwrap()[0].clone());
        let res = vec![vec![]; mixed.len()];
        assert!(matches!(
            TableDocument::from_results(&mixed, &mixed, &res),
            Err(TableError::MixedOrders(4, 5))
        ));
        let doc = TableDocument {
            cells: Vec::new(),
            ..small_doc()
        };
        assert!(emit_table(&doc, TableFormat::Text).is_err());
    }

    #[test]
    fn text_marks_oracle_sources() {
        let text = emit_table(&small_doc(), TableFormat::Text).unwrap();
        assert!(text.contains("^"), "{text}");
        assert!(text.contains("T4.1"), "{text}");
    }
}
