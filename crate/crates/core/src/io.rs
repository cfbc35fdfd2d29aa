//! CSV formats: input datasets, ROC curves and simulation reports.
//!
//! Dataset columns are `pop,y,x1,..,xd` with an optional trailing `delta`.
//! `pop` is `D` or `H`; an empty or `NA` biomarker is missing.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::sample::{Label, LabeledSample, PopulationData};
use crate::simulation::ScenarioReport;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub diseased: PopulationData,
    pub healthy: PopulationData,
}

impl Dataset {
    pub fn dim(&self) -> usize {
        self.diseased.dim()
    }
}

fn parse_error(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_number(field: &str, line: u64, column: &str) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| parse_error(line, format!("column {column}: cannot parse {field:?} as a number")))?;
    if !v.is_finite() {
        return Err(parse_error(line, format!("column {column}: value {field:?} is not finite")));
    }
    Ok(v)
}

fn is_missing(field: &str) -> bool {
    let f = field.trim();
    f.is_empty() || f.eq_ignore_ascii_case("na")
}

pub fn read_dataset<R: Read>(reader: R) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let names: Vec<&str> = headers.iter().collect();
    if names.len() < 3 || names[0] != "pop" || names[1] != "y" {
        return Err(parse_error(1, "header must start with pop,y,x1"));
    }
    let has_delta = names.last() == Some(&"delta");
    let covariates = &names[2..names.len() - usize::from(has_delta)];
    if covariates.is_empty() {
        return Err(parse_error(1, "at least one covariate column x1 is required"));
    }
    for (k, name) in covariates.iter().enumerate() {
        if *name != format!("x{}", k + 1) {
            return Err(parse_error(1, format!("expected column x{}, found {name:?}", k + 1)));
        }
    }

    let mut diseased = Vec::new();
    let mut healthy = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let label = match &record[0] {
            "D" => Label::Diseased,
            "H" => Label::Healthy,
            other => return Err(parse_error(line, format!("pop must be D or H, found {other:?}"))),
        };
        let x = covariates
            .iter()
            .enumerate()
            .map(|(k, name)| parse_number(&record[k + 2], line, name))
            .collect::<Result<Vec<_>>>()?;
        let y = if is_missing(&record[1]) {
            None
        } else {
            Some(parse_number(&record[1], line, "y")?)
        };
        let y = if has_delta {
            match record[names.len() - 1].trim() {
                "1" if y.is_none() => return Err(parse_error(line, "delta is 1 but y is missing")),
                "1" => y,
                "0" => None,
                other => return Err(parse_error(line, format!("delta must be 0 or 1, found {other:?}"))),
            }
        } else {
            y
        };
        let sample = LabeledSample { y, x };
        match label {
            Label::Diseased => diseased.push(sample),
            Label::Healthy => healthy.push(sample),
        }
    }
    Ok(Dataset {
        diseased: PopulationData::new(Label::Diseased, diseased)?,
        healthy: PopulationData::new(Label::Healthy, healthy)?,
    })
}

pub fn write_dataset<W: Write>(writer: W, data: &Dataset) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["pop".to_string(), "y".to_string()];
    header.extend((1..=data.dim()).map(|k| format!("x{k}")));
    w.write_record(&header)?;
    for pop in [&data.diseased, &data.healthy] {
        for s in pop.samples() {
            let mut row = vec![pop.label().token().to_string(), s.y.map_or_else(String::new, format_full)];
            row.extend(s.x.iter().map(|&v| format_full(v)));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Seventeen significant digits: positional for moderate magnitudes,
/// scientific otherwise. Parsing the result recovers `x` exactly.
pub fn format_full(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci[sci.find('e').expect("scientific format") + 1..].parse().expect("exponent");
    if (-5..17).contains(&exp) {
        let s = format!("{:.*}", (16 - exp) as usize, x);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        sci
    }
}

/// Writes `p,roc` rows followed by a `# auc=` comment.
pub fn write_curve<W: Write>(mut writer: W, grid: &[f64], values: &[f64], auc: f64) -> Result<()> {
    if grid.len() != values.len() {
        return Err(Error::LengthMismatch {
            what: "grid and curve",
            left: grid.len(),
            right: values.len(),
        });
    }
    writeln!(writer, "p,roc")?;
    for (&p, &r) in grid.iter().zip(values) {
        writeln!(writer, "{},{}", format_full(p), format_full(r))?;
    }
    writeln!(writer, "# auc={}", format_full(auc))?;
    Ok(())
}

/// A curve file read back: grid, values and the recorded AUC if present.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveFile {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub auc: Option<f64>,
}

pub fn read_curve<R: Read>(reader: R) -> Result<CurveFile> {
    let mut text = String::new();
    let mut reader = reader;
    reader.read_to_string(&mut text)?;
    let mut out = CurveFile {
        grid: Vec::new(),
        values: Vec::new(),
        auc: None,
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i as u64 + 1, l.trim()));
    match lines.next() {
        Some((_, "p,roc")) => {}
        _ => return Err(parse_error(1, "expected header p,roc")),
    }
    for (line, l) in lines {
        if l.is_empty() {
            continue;
        }
        if let Some(comment) = l.strip_prefix('#') {
            if let Some(v) = comment.trim().strip_prefix("auc=") {
                out.auc = Some(parse_number(v, line, "auc")?);
            }
            continue;
        }
        let (p, r) = l
            .split_once(',')
            .ok_or_else(|| parse_error(line, "expected two fields"))?;
        out.grid.push(parse_number(p, line, "p")?);
        out.values.push(parse_number(r, line, "roc")?);
    }
    Ok(out)
}

/// Eighteen rows of `estimator,metric,value,value_x1000`, then comment lines
/// with the truth and clamping counts.
pub fn write_report<W: Write>(mut writer: W, report: &ScenarioReport) -> Result<()> {
    writeln!(writer, "estimator,metric,value,value_x1000")?;
    for e in &report.estimators {
        let rows = [
            ("mse", e.curve.mse),
            ("ks", e.curve.ks),
            ("sm", e.curve.sm),
            ("auc_bias", e.auc.bias),
            ("auc_rb", e.auc.rb),
            ("auc_mse", e.auc.mse),
        ];
        for (metric, v) in rows {
            writeln!(writer, "{},{metric},{},{}", e.method, format_full(v), format_full(1000.0 * v))?;
        }
    }
    writeln!(writer, "# n_rep={}", report.n_rep)?;
    writeln!(writer, "# auc_true={}", format_full(report.auc_true))?;
    writeln!(writer, "# auc_exact={}", format_full(report.auc_exact))?;
    writeln!(writer, "# sm_true={}", format_full(report.sm_true))?;
    writeln!(writer, "# clamped={}", report.clamped)?;
    writeln!(writer, "# replications_clamped={}", report.replications_clamped)?;
    Ok(())
}

/// Per-replication curves as `rep,p,roc,estimator` rows.
pub fn write_curves<W: Write>(mut writer: W, grid: &[f64], report: &ScenarioReport) -> Result<()> {
    let curves = report
        .curves
        .as_ref()
        .ok_or_else(|| Error::Config("the scenario did not retain curves".into()))?;
    writeln!(writer, "rep,p,roc,estimator")?;
    for c in curves {
        for (&p, &r) in grid.iter().zip(&c.values) {
            writeln!(writer, "{},{},{},{}", c.rep, format_full(p), format_full(r), c.method)?;
        }
    }
    Ok(())
}
