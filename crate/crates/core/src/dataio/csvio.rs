use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::path::Path;

use crate::data::{
    FeatureMeta, FeatureValue, SensitiveKind, SensitiveValue, SurvivalDataset, SurvivalRecord,
};
use crate::error::{Error, Result};

use super::schema::{DatasetSchema, FeatureKindName};

pub fn load_csv(path: impl AsRef<Path>, schema: &DatasetSchema) -> Result<SurvivalDataset> {
    let file = std::fs::File::open(path.as_ref())?;
    read_csv(std::io::BufReader::new(file), schema)
}

fn column_index(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::Schema(format!("column '{name}' not found in header")))
}

fn parse_error(row: usize, column: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        row,
        column: column.to_string(),
        message: message.into(),
    }
}

/// Parses a header-first delimited stream. Rows are numbered by file line.
pub fn read_csv<R: Read>(reader: R, schema: &DatasetSchema) -> Result<SurvivalDataset> {
    schema.validate()?;
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter_byte()?)
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let time_col = column_index(&headers, &schema.time_column)?;
    let event_col = column_index(&headers, &schema.event_column)?;
    let sens_col = column_index(&headers, &schema.sensitive_column)?;
    let feature_cols = schema
        .features
        .iter()
        .map(|f| column_index(&headers, &f.name))
        .collect::<Result<Vec<_>>>()?;

    struct Row {
        line: usize,
        time: f64,
        event: bool,
        sensitive: SensitiveValue,
        cells: Vec<String>,
    }

    let mut rows = Vec::new();
    for result in rdr.records() {
        let rec = result?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let cell = |idx: usize, name: &str| -> Result<&str> {
            match rec.get(idx) {
                Some(v) if !v.is_empty() => Ok(v),
                _ => Err(parse_error(line, name, "missing value")),
            }
        };
        let raw_time = cell(time_col, &schema.time_column)?;
        let time: f64 = raw_time
            .parse()
            .map_err(|_| parse_error(line, &schema.time_column, format!("'{raw_time}' is not a number")))?;
        if !time.is_finite() || time < 0.0 {
            return Err(parse_error(line, &schema.time_column, format!("time must be finite and >= 0, got {raw_time}")));
        }
        let event = schema
            .parse_event(cell(event_col, &schema.event_column)?)
            .map_err(|m| parse_error(line, &schema.event_column, m))?;
        let raw_sens = cell(sens_col, &schema.sensitive_column)?;
        let sensitive = match schema.sensitive_kind {
            SensitiveKind::Categorical => SensitiveValue::Label(raw_sens.to_string()),
            SensitiveKind::Continuous => SensitiveValue::Value(
                raw_sens
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_error(line, &schema.sensitive_column, format!("'{raw_sens}' is not a number")))?,
            ),
        };
        let cells = feature_cols
            .iter()
            .zip(&schema.features)
            .map(|(&idx, f)| cell(idx, &f.name).map(str::to_string))
            .collect::<Result<Vec<_>>>()?;
        rows.push(Row {
            line,
            time,
            event,
            sensitive,
            cells,
        });
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput("file has no data rows"));
    }

    let feature_meta: Vec<FeatureMeta> = schema
        .features
        .iter()
        .enumerate()
        .map(|(j, f)| match f.kind {
            FeatureKindName::Numeric => FeatureMeta::numeric(&f.name),
            FeatureKindName::Categorical => {
                let labels: BTreeSet<&str> = rows.iter().map(|r| r.cells[j].as_str()).collect();
                FeatureMeta::categorical(&f.name, labels.into_iter().map(String::from).collect())
            }
        })
        .collect();

    let mut records = Vec::with_capacity(rows.len());
    for row in rows {
        let mut features = Vec::with_capacity(row.cells.len());
        for ((cell, spec), meta) in row.cells.iter().zip(&schema.features).zip(&feature_meta) {
            let value = match &meta.kind {
                crate::data::FeatureKind::Numeric => {
                    let v: f64 = cell.parse().map_err(|_| {
                        parse_error(row.line, &spec.name, format!("'{cell}' is not a number"))
                    })?;
                    if !v.is_finite() {
                        return Err(parse_error(row.line, &spec.name, format!("'{cell}' is not finite")));
                    }
                    FeatureValue::Numeric(v)
                }
                crate::data::FeatureKind::Categorical { labels } => {
                    let code = labels.binary_search(cell).expect("label collected above");
                    FeatureValue::Category(code as u32)
                }
            };
            features.push(value);
        }
        records.push(SurvivalRecord::new(features, row.time, row.event, row.sensitive)?);
    }
    SurvivalDataset::new(records, feature_meta, schema.sensitive_meta())
}

pub fn write_csv(path: impl AsRef<Path>, dataset: &SurvivalDataset, schema: &DatasetSchema) -> Result<()> {
    let file = std::fs::File::create(path.as_ref())?;
    write_csv_to(std::io::BufWriter::new(file), dataset, schema)
}

/// Writes `dataset` in the layout `schema` reads back. A feature sharing the
/// sensitive column's name is written once.
pub fn write_csv_to<W: Write>(writer: W, dataset: &SurvivalDataset, schema: &DatasetSchema) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .delimiter(schema.delimiter_byte()?)
        .from_writer(writer);
    let sens_is_feature = dataset
        .feature_meta
        .iter()
        .any(|m| m.name == schema.sensitive_column);
    let mut header = vec![schema.time_column.clone(), schema.event_column.clone()];
    if !sens_is_feature {
        header.push(schema.sensitive_column.clone());
    }
    header.extend(dataset.feature_meta.iter().map(|m| m.name.clone()));
    wtr.write_record(&header)?;

    let censored = schema.censored_token();
    for r in &dataset.records {
        let mut row = vec![
            r.time.to_string(),
            if r.event { schema.event_value.clone() } else { censored.clone() },
        ];
        if !sens_is_feature {
            row.push(match &r.group_raw {
                SensitiveValue::Label(l) => l.clone(),
                SensitiveValue::Value(v) => v.to_string(),
            });
        }
        for (v, m) in r.features.iter().zip(&dataset.feature_meta) {
            row.push(match (v, &m.kind) {
                (FeatureValue::Category(c), crate::data::FeatureKind::Categorical { labels }) => {
                    labels[*c as usize].clone()
                }
                (v, _) => v.as_f64().to_string(),
            });
        }
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}
