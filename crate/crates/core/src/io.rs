//! Dataset files.
//!
//! CSV: a header `x1,...,xd,y` and one row per point. JSON: the same data
//! plus optional metadata (mode count, seed, generator settings, ground
//! truth). Labels in files are one-based.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::{GeneratorSpec, GroundTruth};
use crate::model::{Dataset, Labeling, ModelSet, Tolerances};
use crate::solvers::SolveReport;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metadata {
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub generator: Option<GeneratorSpec>,
    pub ground_truth: Option<GroundTruth>,
}

pub fn write_csv<W: Write>(data: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (1..=data.dim()).map(|i| format!("x{i}")).collect();
    header.push("y".into());
    w.write_record(&header).map_err(csv_error)?;
    let mut row = Vec::with_capacity(data.dim() + 1);
    for (x, y) in data.points() {
        row.clear();
        // `{}` on f64 prints the shortest string that parses back exactly.
        row.extend(x.iter().map(|v| v.to_string()));
        row.push(y.to_string());
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse {
            format: "csv",
            row: 0,
            message: format!("{other:?}"),
        },
    }
}

pub fn read_csv<R: Read>(reader: R) -> Result<Dataset> {
    let mut r = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = r.headers().map_err(csv_error)?.clone();
    let cols = header.len();
    if cols < 2 {
        return Err(Error::Parse {
            format: "csv",
            row: 1,
            message: "header needs at least one regressor column and `y`".into(),
        });
    }
    let d = cols - 1;
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (k, record) in r.records().enumerate() {
        let row = k + 2;
        let record = record.map_err(|e| Error::Parse {
            format: "csv",
            row,
            message: e.to_string(),
        })?;
        if record.len() != cols {
            return Err(Error::Parse {
                format: "csv",
                row,
                message: format!("expected {cols} fields, found {}", record.len()),
            });
        }
        for (c, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                format: "csv",
                row,
                message: format!("column {} is not a number: `{field}`", c + 1),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    format: "csv",
                    row,
                    message: format!("column {} is not finite", c + 1),
                });
            }
            if c < d {
                x.push(v);
            } else {
                y.push(v);
            }
        }
    }
    Dataset::new(crate::model::Points::new(d, x)?, y)
}

#[derive(Serialize, Deserialize)]
struct TruthJson {
    models: Vec<Vec<f64>>,
    labels: Vec<usize>,
}

#[derive(Serialize, Deserialize, Default)]
struct MetadataJson {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    generator: Option<GeneratorSpec>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    ground_truth: Option<TruthJson>,
}

#[derive(Serialize, Deserialize)]
struct DatasetJson {
    d: usize,
    x: Vec<Vec<f64>>,
    y: Vec<f64>,
    #[serde(default)]
    metadata: MetadataJson,
}

pub fn write_json<W: Write>(data: &Dataset, meta: &Metadata, writer: W) -> Result<()> {
    let file = DatasetJson {
        d: data.dim(),
        x: data.x().rows().map(<[f64]>::to_vec).collect(),
        y: data.y().to_vec(),
        metadata: MetadataJson {
            n: meta.n,
            seed: meta.seed,
            generator: meta.generator.clone(),
            ground_truth: meta.ground_truth.as_ref().map(|t| TruthJson {
                models: t.models.to_rows(),
                labels: t.labeling.labels.iter().map(|l| l + 1).collect(),
            }),
        },
    };
    serde_json::to_writer_pretty(writer, &file)?;
    Ok(())
}

pub fn read_json<R: Read>(reader: R) -> Result<(Dataset, Metadata)> {
    let file: DatasetJson = serde_json::from_reader(reader)?;
    for (i, row) in file.x.iter().enumerate() {
        if row.len() != file.d {
            return Err(Error::Parse {
                format: "json",
                row: i + 1,
                message: format!("expected {} coordinates, found {}", file.d, row.len()),
            });
        }
    }
    let data = Dataset::from_rows(&file.x, file.y)?;
    let ground_truth = match file.metadata.ground_truth {
        None => None,
        Some(t) => {
            let labels = t
                .labels
                .iter()
                .enumerate()
                .map(|(i, &l)| {
                    l.checked_sub(1).ok_or(Error::Parse {
                        format: "json",
                        row: i + 1,
                        message: "ground-truth labels are one-based".into(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let truth = GroundTruth {
                models: ModelSet::from_rows(&t.models)?,
                labeling: Labeling::new(labels),
            };
            truth.labeling.validate(truth.models.n(), data.len())?;
            Some(truth)
        }
    };
    Ok((
        data,
        Metadata {
            n: file.metadata.n,
            seed: file.metadata.seed,
            generator: file.metadata.generator,
            ground_truth,
        },
    ))
}

fn is_json(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Writes JSON for `.json` paths and CSV otherwise. CSV drops the metadata.
pub fn save(path: &Path, data: &Dataset, meta: &Metadata) -> Result<()> {
    let out = BufWriter::new(File::create(path)?);
    if is_json(path) {
        write_json(data, meta, out)
    } else {
        write_csv(data, out)
    }
}

pub fn load(path: &Path) -> Result<(Dataset, Metadata)> {
    let input = BufReader::new(File::open(path)?);
    if is_json(path) {
        read_json(input)
    } else {
        Ok((read_csv(input)?, Metadata::default()))
    }
}

/// Serializes a report after checking that its cost matches its models and
/// labeling on `data`.
pub fn report_to_json(report: &SolveReport, data: &Dataset, tol: &Tolerances) -> Result<String> {
    report.validate(data, tol)?;
    Ok(serde_json::to_string_pretty(report)?)
}
