use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::optimizers::OptimizerConfig;

use super::table::{OptimizerSeries, RepetitionSummary, ResultTable, SeriesPoint};

#[derive(Serialize)]
struct Summary<'a> {
    horizon: usize,
    report_every: usize,
    repetitions: usize,
    seed: u64,
    optimum_value: Option<f64>,
    optimizers: Vec<SeriesSummary<'a>>,
}

#[derive(Serialize)]
struct SeriesSummary<'a> {
    name: &'a str,
    config: &'a OptimizerConfig,
    /// Last averaged point.
    last: Option<&'a SeriesPoint>,
    runs: &'a [RepetitionSummary],
}

/// Writes `<dir>/<name>.csv` for every optimizer (plus `<name>.rep<k>.csv`
/// per repetition when raw series were kept) and `<dir>/summary.json`.
/// Returns the paths written.
pub fn write_outputs(table: &ResultTable, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = write_csv(table, dir)?;
    let summary = dir.join("summary.json");
    let summary_data = Summary {
        horizon: table.horizon,
        report_every: table.report_every,
        repetitions: table.repetitions,
        seed: table.seed,
        optimum_value: table.optimum_value,
        optimizers: table
            .series
            .iter()
            .map(|s| SeriesSummary {
                name: &s.name,
                config: &s.config,
                last: s.averaged.last(),
                runs: &s.repetitions,
            })
            .collect(),
    };
    let json = serde_json::to_string_pretty(&summary_data).expect("summary serializes");
    fs::write(&summary, json + "\n").map_err(|e| Error::io(&summary, e))?;
    written.push(summary);
    Ok(written)
}

/// One CSV per optimizer in `dir`, with columns
/// `t,grad_sq_norm,f_value,stepsize_mean[,stepsize_1,…][,optimality_gap]`.
/// Absent values are empty fields; numbers use the shortest decimal that
/// parses back to the same `f64`.
pub fn write_csv(table: &ResultTable, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for series in &table.series {
        let path = dir.join(format!("{}.csv", series.name));
        write_series(
            &path,
            &series.averaged,
            coord_count(series),
            table.optimum_value,
        )?;
        written.push(path);
        if let Some(raw) = &series.raw {
            for (k, points) in raw.iter().enumerate() {
                let path = dir.join(format!("{}.rep{}.csv", series.name, k + 1));
                write_series(&path, points, coord_count(series), table.optimum_value)?;
                written.push(path);
            }
        }
    }
    Ok(written)
}

fn coord_count(series: &OptimizerSeries) -> usize {
    series
        .averaged
        .first()
        .and_then(|p| p.stepsize_coords.as_ref())
        .map_or(0, Vec::len)
}

fn write_series(
    path: &Path,
    points: &[SeriesPoint],
    coords: usize,
    optimum: Option<f64>,
) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    out.write_all(header(coords, optimum.is_some()).as_bytes())
        .map_err(io)?;
    let mut buf = ryu::Buffer::new();
    let mut line = String::new();
    for p in points {
        line.clear();
        line.push_str(&p.t.to_string());
        push_opt(&mut line, &mut buf, p.grad_sq_norm);
        push_opt(&mut line, &mut buf, p.f_value);
        push_opt(&mut line, &mut buf, Some(p.stepsize_mean));
        if let Some(c) = &p.stepsize_coords {
            for v in c {
                push_opt(&mut line, &mut buf, Some(*v));
            }
        }
        if let Some(fstar) = optimum {
            push_opt(&mut line, &mut buf, p.f_value.map(|f| f - fstar));
        }
        line.push('\n');
        out.write_all(line.as_bytes()).map_err(io)?;
    }
    out.flush().map_err(io)
}

fn header(coords: usize, gap: bool) -> String {
    let mut h = String::from("t,grad_sq_norm,f_value,stepsize_mean");
    for i in 1..=coords {
        h.push_str(&format!(",stepsize_{i}"));
    }
    if gap {
        h.push_str(",optimality_gap");
    }
    h.push('\n');
    h
}

fn push_opt(line: &mut String, buf: &mut ryu::Buffer, v: Option<f64>) {
    line.push(',');
    if let Some(v) = v {
        line.push_str(buf.format(v));
    }
}

/// Parses a file written by [`write_csv`]. The optimality-gap column, being
/// derived, is skipped.
pub fn read_csv(path: &Path) -> Result<Vec<SeriesPoint>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let head: Vec<&str> = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing header".into()))?
        .split(',')
        .collect();
    if head.len() < 4 || head[..4] != ["t", "grad_sq_norm", "f_value", "stepsize_mean"] {
        return Err(parse_err(1, "unexpected header".into()));
    }
    let coords = head[4..]
        .iter()
        .filter(|c| c.starts_with("stepsize_"))
        .count();
    let mut points = Vec::new();
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != head.len() {
            return Err(parse_err(lineno, format!("expected {} fields", head.len())));
        }
        let num = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                return Ok(None);
            }
            s.parse()
                .map(Some)
                .map_err(|_| parse_err(lineno, format!("bad number `{s}`")))
        };
        let t = fields[0]
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad iteration `{}`", fields[0])))?;
        let stepsize_mean =
            num(fields[3])?.ok_or_else(|| parse_err(lineno, "missing stepsize".into()))?;
        let stepsize_coords = if coords > 0 {
            let mut c = Vec::with_capacity(coords);
            for f in &fields[4..4 + coords] {
                c.push(num(f)?.ok_or_else(|| parse_err(lineno, "missing stepsize".into()))?);
            }
            Some(c)
        } else {
            None
        };
        points.push(SeriesPoint {
            t,
            grad_sq_norm: num(fields[1])?,
            f_value: num(fields[2])?,
            stepsize_mean,
            stepsize_coords,
        });
    }
    Ok(points)
}
