use std::fmt::Write as _;

use fairsurv::evalmetrics::MetricsReport;
use fairsurv::fairness::CalibrationReport;
use fairsurv::Result;
use serde::Serialize;

use crate::OutputArgs;

/// Version of the JSON reports; bumped on any key change.
pub(crate) const REPORT_VERSION: u32 = 1;

#[derive(Serialize)]
struct Envelope<'a, T> {
    kind: &'a str,
    version: u32,
    #[serde(flatten)]
    body: &'a T,
}

pub(crate) fn json<T: Serialize>(kind: &str, body: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&Envelope {
        kind,
        version: REPORT_VERSION,
        body,
    })?;
    s.push('\n');
    Ok(s)
}

pub(crate) fn emit(args: &OutputArgs, text: &str) -> Result<()> {
    match &args.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

pub(crate) fn pct(x: f64) -> String {
    format!("{:.2}", 100.0 * x)
}

pub(crate) fn opt_pct(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".into(), pct)
}

/// Left-aligned text table.
pub(crate) struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub(crate) fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub(crate) fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    pub(crate) fn render(&self) -> String {
        let mut width: Vec<usize> = self.header.iter().map(String::len).collect();
        for r in &self.rows {
            for (w, c) in width.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let mut out = String::new();
        for r in std::iter::once(&self.header).chain(&self.rows) {
            let line: Vec<String> = r
                .iter()
                .zip(&width)
                .map(|(c, &w)| format!("{c:<w$}"))
                .collect();
            let _ = writeln!(out, "{}", line.join("  ").trim_end());
        }
        out
    }
}

pub(crate) fn metrics_table(r: &MetricsReport) -> String {
    let mut out = format!("t = {}  records = {}\n\n", r.time, r.n);
    let mut t = Table::new(&["CI%", "FC", "C-index%", "Brier%", "td-AUC%"]);
    t.row(vec![
        opt_pct(r.ci),
        r.fc_verdict.to_string(),
        pct(r.c_index),
        pct(r.brier),
        pct(r.td_auc),
    ]);
    out.push_str(&t.render());
    out.push('\n');
    let mut g = Table::new(&["group", "n", "events", "CF%", "C-index%", "Brier%", "td-AUC%"]);
    for row in &r.per_group {
        g.row(vec![
            row.label.clone(),
            row.n.to_string(),
            row.events.to_string(),
            opt_pct(r.cf.get(row.group).copied().flatten()),
            opt_pct(row.c_index),
            opt_pct(row.brier),
            opt_pct(row.td_auc),
        ]);
    }
    out.push_str(&g.render());
    for row in &r.per_group {
        for note in &row.notes {
            let _ = writeln!(out, "note: {}: {note}", row.label);
        }
    }
    if r.brier_dropped > 0 {
        let _ = writeln!(out, "note: {} records had zero censoring weight", r.brier_dropped);
    }
    out
}

pub(crate) fn calibration_table(r: &CalibrationReport) -> String {
    let mut out = format!("t = {}  verdict: {}\n\n", r.time, r.verdict);
    let mut t = Table::new(&["group", "n", "HL", "df", "p"]);
    for g in &r.per_group {
        t.row(vec![
            g.label.clone(),
            g.n.to_string(),
            format!("{:.4}", g.hl),
            g.df.to_string(),
            format!("{:.4}", g.p_value),
        ]);
    }
    out.push_str(&t.render());
    if let Some(pairs) = &r.difference_p {
        out.push('\n');
        let mut d = Table::new(&["pair", "wilcoxon p"]);
        for p in pairs {
            let name = |g: usize| {
                r.per_group
                    .iter()
                    .find(|x| x.group == g)
                    .map_or_else(|| g.to_string(), |x| x.label.clone())
            };
            d.row(vec![
                format!("{} / {}", name(p.a), name(p.b)),
                p.p_value.map_or_else(|| "n/a".into(), |v| format!("{v:.4}")),
            ]);
        }
        out.push_str(&d.render());
    }
    out
}

/// Plot data: one row per group and bin.
pub(crate) fn calibration_csv(r: &CalibrationReport) -> String {
    let mut out = String::from("group,label,bin,n,pbar,km\n");
    for g in &r.per_group {
        for (b, bin) in g.bins.iter().enumerate() {
            let _ = writeln!(out, "{},{},{},{},{},{}", g.group, g.label, b, bin.n, bin.pbar, bin.km);
        }
    }
    out
}
