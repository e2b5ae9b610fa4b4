use super::IngestError;
use crate::scoring::MetricRow;

const REQUIRED: [&str; 5] = ["tool", "sm", "ifn", "icp", "ned"];
/// Columns written by score tables; accepted and ignored on load.
const DERIVED: [&str; 2] = ["score", "rank"];

fn is_blank(cell: &str) -> bool {
    cell.is_empty() || cell == "-"
}

/// Parses a metric table. Blank or `-` cells become missing values; rows with
/// a missing metric are kept but are not [complete](MetricRow::is_complete).
/// Lines starting with `#` are comments.
pub fn load_metric_rows(table: &str) -> Result<Vec<MetricRow>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(table.as_bytes());

    let headers: Vec<String> = reader
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(|h| h.to_ascii_lowercase())
        .collect();
    if headers.iter().all(|h| h.is_empty()) {
        return Err(IngestError::EmptyTable);
    }
    let column = |name: &str| headers.iter().position(|h| h == name);
    let mut required = [0usize; 5];
    for (slot, name) in required.iter_mut().zip(REQUIRED) {
        *slot = column(name).ok_or_else(|| IngestError::Parse {
            line: 1,
            column: 0,
            message: format!("missing required column `{name}` (expected header tool,sm,ifn,icp,ned[,micro])"),
        })?;
    }
    let micro_col = column("micro");
    for h in &headers {
        if !REQUIRED.contains(&h.as_str()) && h != "micro" && !DERIVED.contains(&h.as_str()) {
            log::warn!("ignoring unknown column `{h}` in metric table");
        }
    }

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let cell = |i: usize| record.get(i).unwrap_or("");

        let tool = cell(required[0]);
        if tool.is_empty() {
            return Err(IngestError::Parse {
                line,
                column: required[0] + 1,
                message: "empty tool name".into(),
            });
        }
        let number = |i: usize| -> Result<Option<f64>, IngestError> {
            let raw = cell(required[i]);
            if is_blank(raw) {
                return Ok(None);
            }
            match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(Some(v)),
                _ => Err(IngestError::NonNumericCell {
                    line,
                    column: REQUIRED[i].into(),
                    value: raw.into(),
                }),
            }
        };
        let micro = match micro_col.map(cell) {
            None => None,
            Some(raw) if is_blank(raw) => None,
            Some(raw) => Some(raw.parse::<u32>().map_err(|_| IngestError::NonNumericCell {
                line,
                column: "micro".into(),
                value: raw.into(),
            })?),
        };

        let row = MetricRow {
            tool: tool.to_owned(),
            sm: number(1)?,
            ifn: number(2)?,
            icp: number(3)?,
            ned: number(4)?,
            micro,
        };
        if !row.is_complete() {
            log::info!("row `{}` has missing metrics and will not be scored", row.tool);
        }
        rows.push(row);
    }

    if rows.is_empty() {
        return Err(IngestError::EmptyTable);
    }
    Ok(rows)
}

fn csv_error(e: csv::Error) -> IngestError {
    let (line, column) = e.position().map_or((0, 0), |p| (p.line() as usize, 0));
    IngestError::Parse {
        line,
        column,
        message: e.to_string(),
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes rows with header `tool,sm,ifn,icp,ned,micro` at full precision.
pub fn save_metric_rows(rows: &[MetricRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["tool", "sm", "ifn", "icp", "ned", "micro"])
        .expect("in-memory write");
    for r in rows {
        w.write_record([
            r.tool.clone(),
            opt(r.sm),
            opt(r.ifn),
            opt(r.icp),
            opt(r.ned),
            opt(r.micro),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}
