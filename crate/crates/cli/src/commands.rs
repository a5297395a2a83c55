use std::path::Path;

use fairsurv::data::SurvivalDataset;
use fairsurv::dataio::{
    bundled_schema, generate_synthetic, load_csv, write_csv, DatasetSchema, FeatureKindName,
    FeatureSpec, SynthSpec,
};
use fairsurv::evalmetrics::{
    cross_validate, default_time, evaluate as evaluate_metrics, CvReport, Summary,
};
use fairsurv::fairness::{fair_calibration, GroupPartition, GroupRule};
use fairsurv::fsrf::{fit_forest, FsrfModel};
use fairsurv::{Error, Result};
use serde::Serialize;

use crate::output::{self, Table};
use crate::{
    CalibrateArgs, CvArgs, DataArgs, EvaluateArgs, Format, PredictArgs, SynthArgs, TrainArgs,
};

fn load_schema(name: &str) -> Result<DatasetSchema> {
    let path = Path::new(name);
    if path.exists() {
        return DatasetSchema::from_path(path);
    }
    bundled_schema(name).map_err(|_| {
        Error::Schema(format!("schema file '{name}' not found and no bundled schema has that name"))
    })
}

fn load(data: &DataArgs) -> Result<SurvivalDataset> {
    let schema = load_schema(&data.schema)?;
    load_csv(&data.input, &schema)
}

fn load_model(path: &Path) -> Result<FsrfModel> {
    FsrfModel::from_json(&std::fs::read_to_string(path)?)
}

/// The model's own grouping when it has one, else one derived from the data.
fn partition_for(model: &FsrfModel, dataset: &SurvivalDataset) -> Result<GroupPartition> {
    match &model.group_rule {
        Some(rule) => rule.partition(dataset),
        None => GroupRule::fit(dataset)?.partition(dataset),
    }
}

fn read_risks(path: &Path, n: usize) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut risks = Vec::with_capacity(n);
    for (line_no, line) in text.lines().enumerate() {
        let cell = line.trim();
        if cell.is_empty() {
            continue;
        }
        match cell.parse::<f64>() {
            Ok(v) if v.is_finite() => risks.push(v),
            // header line
            Err(_) if line_no == 0 => {}
            _ => {
                return Err(Error::Parse {
                    row: line_no + 1,
                    column: "risk".into(),
                    message: format!("'{cell}' is not a finite number"),
                })
            }
        }
    }
    if risks.len() != n {
        return Err(Error::Shape {
            expected: n,
            actual: risks.len(),
        });
    }
    Ok(risks)
}

#[derive(Serialize)]
struct TrainSummary {
    trees: usize,
    records: usize,
    events: usize,
    features: usize,
    criterion: fairsurv::fsrf::SplitCriterion,
    seed: u64,
    mean_depth: f64,
    max_depth: usize,
    mean_leaves: f64,
    groups: Vec<String>,
    group_sizes: Vec<usize>,
    sensitive_threshold: Option<f64>,
}

pub(crate) fn train(args: &TrainArgs) -> Result<()> {
    let dataset = load(&args.data)?;
    let rule = GroupRule::fit(&dataset)?;
    let partition = rule.partition(&dataset)?;
    let model = fit_forest(&dataset, &args.forest.params(), &partition, args.forest.seed)?
        .with_group_rule(rule);
    std::fs::write(&args.model, model.to_json()?)?;

    let depths: Vec<usize> = model.trees.iter().map(|t| t.depth()).collect();
    let n_trees = model.trees.len() as f64;
    let summary = TrainSummary {
        trees: model.trees.len(),
        records: dataset.len(),
        events: dataset.event_count(),
        features: dataset.n_features(),
        criterion: model.params.criterion,
        seed: model.seed,
        mean_depth: depths.iter().sum::<usize>() as f64 / n_trees,
        max_depth: depths.iter().copied().max().unwrap_or(0),
        mean_leaves: model.trees.iter().map(|t| t.n_leaves()).sum::<usize>() as f64 / n_trees,
        groups: partition.labels().to_vec(),
        group_sizes: partition.members().iter().map(Vec::len).collect(),
        sensitive_threshold: partition.threshold(),
    };
    let text = match args.output.format {
        Format::Json => output::json("train", &summary)?,
        Format::Table => {
            let mut t = Table::new(&["trees", "records", "events", "mean depth", "max depth", "mean leaves"]);
            t.row(vec![
                summary.trees.to_string(),
                summary.records.to_string(),
                summary.events.to_string(),
                format!("{:.1}", summary.mean_depth),
                summary.max_depth.to_string(),
                format!("{:.1}", summary.mean_leaves),
            ]);
            let mut s = t.render();
            for (label, n) in summary.groups.iter().zip(&summary.group_sizes) {
                s.push_str(&format!("group {label}: {n} records\n"));
            }
            if let Some(th) = summary.sensitive_threshold {
                s.push_str(&format!("sensitive threshold: {th}\n"));
            }
            s.push_str(&format!("model written to {}\n", args.model.display()));
            s
        }
    };
    output::emit(&args.output, &text)
}

pub(crate) fn evaluate(args: &EvaluateArgs) -> Result<()> {
    let dataset = load(&args.data)?;
    let model = load_model(&args.model)?;
    let partition = partition_for(&model, &dataset)?;
    let risks = match &args.risks {
        Some(path) => read_risks(path, dataset.len())?,
        None => model.predict_risks(&dataset)?,
    };
    let t = match args.time {
        Some(t) => t,
        None => default_time(&dataset.records)?,
    };
    let survival = model.predict_survivals(&dataset, t)?;
    let report = evaluate_metrics(&dataset.records, &risks, &survival, &partition, t, args.bins)?;
    let text = match args.output.format {
        Format::Json => output::json("metrics", &report)?,
        Format::Table => output::metrics_table(&report),
    };
    output::emit(&args.output, &text)
}

pub(crate) fn predict(args: &PredictArgs) -> Result<()> {
    let dataset = load(&args.data)?;
    let model = load_model(&args.model)?;
    let risks = model.predict_risks(&dataset)?;
    let survival = match args.time {
        Some(t) => Some(model.predict_survivals(&dataset, t)?),
        None => None,
    };
    let mut text = String::from(if survival.is_some() { "risk,survival\n" } else { "risk\n" });
    for (i, r) in risks.iter().enumerate() {
        match &survival {
            Some(s) => text.push_str(&format!("{r},{}\n", s[i])),
            None => text.push_str(&format!("{r}\n")),
        }
    }
    match &args.out {
        Some(path) => Ok(std::fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub(crate) fn cv(args: &CvArgs) -> Result<()> {
    let dataset = load(&args.data)?;
    let report = cross_validate(
        &dataset,
        &args.forest.params(),
        args.folds,
        args.forest.seed,
        args.time,
        args.bins,
    )?;
    for s in &report.skipped {
        eprintln!("warning: fold {} skipped: {}", s.fold, s.reason);
    }
    let text = match args.output.format {
        Format::Json => output::json("cv", &report)?,
        Format::Table => cv_table(&report),
    };
    output::emit(&args.output, &text)
}

fn cv_table(r: &CvReport) -> String {
    let mut t = Table::new(&["fold", "train", "test", "CI%", "C-index%", "Brier%", "td-AUC%", "FC"]);
    for f in &r.folds {
        t.row(vec![
            f.fold.to_string(),
            f.n_train.to_string(),
            f.n_test.to_string(),
            output::opt_pct(f.ci),
            output::pct(f.c_index),
            output::pct(f.brier),
            output::pct(f.td_auc),
            f.fc_verdict.clone(),
        ]);
    }
    let agg = |s: &Option<Summary>| {
        s.as_ref().map_or_else(
            || "n/a".to_string(),
            |s| format!("{} ± {}", output::pct(s.mean), output::pct(s.sd)),
        )
    };
    t.row(vec![
        "mean".into(),
        String::new(),
        String::new(),
        agg(&r.ci),
        agg(&r.c_index),
        agg(&r.brier),
        agg(&r.td_auc),
        String::new(),
    ]);
    let mut out = format!("{}-fold cross-validation, seed {}, t = {}\n\n", r.folds_requested, r.seed, r.time);
    out.push_str(&t.render());
    for s in &r.skipped {
        out.push_str(&format!("skipped fold {}: {}\n", s.fold, s.reason));
    }
    out
}

pub(crate) fn calibrate(args: &CalibrateArgs) -> Result<()> {
    let dataset = load(&args.data)?;
    let model = load_model(&args.model)?;
    let partition = partition_for(&model, &dataset)?;
    let t = match args.time {
        Some(t) => t,
        None => default_time(&dataset.records)?,
    };
    let survival = model.predict_survivals(&dataset, t)?;
    let report = fair_calibration(&dataset.records, &survival, &partition, t, args.bins)?;
    if let Some(path) = &args.plot {
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let text = if is_json {
            output::json("calibration", &report)?
        } else {
            output::calibration_csv(&report)
        };
        std::fs::write(path, text)?;
    }
    let text = match args.output.format {
        Format::Json => output::json("calibration", &report)?,
        Format::Table => output::calibration_table(&report),
    };
    output::emit(&args.output, &text)
}

pub(crate) fn synth(args: &SynthArgs) -> Result<()> {
    let spec = SynthSpec {
        n: args.n,
        group_fraction: args.group_fraction,
        hazard_ratio: args.hazard_ratio,
        censor_rate: args.censor_rate,
        n_features: args.features,
        seed: args.seed,
    };
    let dataset = generate_synthetic(&spec)?;
    let schema = DatasetSchema {
        delimiter: ",".into(),
        time_column: "time".into(),
        event_column: "event".into(),
        event_value: "1".into(),
        censored_value: Some("0".into()),
        sensitive_column: dataset.sensitive_meta.column.clone(),
        sensitive_kind: dataset.sensitive_meta.kind,
        deprived_value: dataset.sensitive_meta.deprived_value.clone(),
        sensitive_threshold: None,
        features: dataset
            .feature_meta
            .iter()
            .map(|m| FeatureSpec {
                name: m.name.clone(),
                kind: if m.is_categorical() {
                    FeatureKindName::Categorical
                } else {
                    FeatureKindName::Numeric
                },
            })
            .collect(),
    };
    write_csv(&args.out, &dataset, &schema)?;
    let schema_path = args
        .schema_out
        .clone()
        .unwrap_or_else(|| args.out.with_extension("toml"));
    std::fs::write(&schema_path, schema.to_toml()?)?;
    println!(
        "wrote {} records ({} events) to {}, schema {}",
        dataset.len(),
        dataset.event_count(),
        args.out.display(),
        schema_path.display()
    );
    Ok(())
}
