//! Report tables: Markdown and RFC-4180 CSV with fixed column order.

use std::path::{Path, PathBuf};

use super::{
    consistency, percent, reasoning_bins, resolution_table, score, task_table, GroupKey,
    DEFAULT_BINS,
};
use crate::error::{Error, Result};
use crate::harness::TrialRecord;
use crate::item::Task;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem for the CSV output.
    pub name: String,
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub notice: Option<String>,
}

impl Table {
    fn new(name: &str, title: &str, headers: Vec<String>) -> Table {
        Table {
            name: name.into(),
            title: title.into(),
            headers,
            rows: Vec::new(),
            notice: None,
        }
    }

    pub fn to_markdown(&self) -> String {
        let esc = |s: &str| s.replace('|', "\\|");
        let mut out = format!("## {}\n\n", self.title);
        if let Some(n) = &self.notice {
            out.push_str(&format!("_{n}_\n\n"));
        }
        let line = |cells: &[String]| {
            format!(
                "| {} |\n",
                cells.iter().map(|c| esc(c)).collect::<Vec<_>>().join(" | ")
            )
        };
        out.push_str(&line(&self.headers));
        out.push_str(&format!("|{}\n", "---|".repeat(self.headers.len())));
        for r in &self.rows {
            out.push_str(&line(r));
        }
        out
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Validation(format!("csv: {e}"));
        w.write_record(&self.headers).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Validation(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportOptions {
    /// Runs per unit for pass@k and agreement.
    pub k: usize,
    pub bins: usize,
    /// Grouping of the detailed score table.
    pub group_by: Vec<GroupKey>,
    /// Resolution columns shown when the store is empty.
    pub resolutions: Vec<u32>,
}

impl Default for ReportOptions {
    fn default() -> ReportOptions {
        ReportOptions {
            k: 1,
            bins: DEFAULT_BINS,
            group_by: vec![
                GroupKey::Model,
                GroupKey::Task,
                GroupKey::Variant,
                GroupKey::Resolution,
                GroupKey::Mode,
                GroupKey::Question,
            ],
            resolutions: vec![384, 768, 1152],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub notice: Option<String>,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn to_markdown(&self) -> String {
        let mut out = String::from("# Benchmark report\n\n");
        if let Some(n) = &self.notice {
            out.push_str(&format!("_{n}_\n\n"));
        }
        for t in &self.tables {
            out.push_str(&t.to_markdown());
            out.push('\n');
        }
        out
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

fn task_headers() -> Vec<String> {
    let mut h = vec!["Model".to_string()];
    h.extend(
        Task::ALL
            .iter()
            .map(|t| format!("{}. {}", t.letter(), t.title())),
    );
    h.push("Task mean".into());
    h
}

fn opt_pct(v: Option<f64>) -> String {
    v.map(percent).unwrap_or_else(|| "-".into())
}

pub fn build_report(records: &[TrialRecord], opts: &ReportOptions) -> Result<Report> {
    let notice = records.is_empty().then(|| "run store is empty".to_string());
    let mut tables = Vec::new();

    let tt = task_table(records);
    let mut acc = Table::new("accuracy_by_task", "Accuracy by task (%)", task_headers());
    let mut bias = Table::new("bias_by_task", "Bias rate by task (%)", task_headers());
    for (model, row) in &tt.models {
        let mut a = vec![model.clone()];
        let mut b = vec![model.clone()];
        for t in Task::ALL {
            a.push(opt_pct(row.accuracy.get(&t).copied()));
            b.push(opt_pct(row.bias_rate.get(&t).copied()));
        }
        a.push(opt_pct(row.accuracy_mean()));
        b.push(opt_pct(row.bias_mean()));
        acc.rows.push(a);
        bias.rows.push(b);
    }
    tables.push(acc);
    tables.push(bias);

    let rt = resolution_table(records);
    let res = if rt.resolutions.is_empty() {
        opts.resolutions.clone()
    } else {
        rt.resolutions.clone()
    };
    let mut h = vec!["Model".to_string()];
    h.extend(res.iter().map(|r| r.to_string()));
    h.push("Mean".into());
    h.push("Δ".into());
    let mut rtab = Table::new(
        "accuracy_by_resolution",
        "Accuracy by resolution (%, task mean)",
        h,
    );
    for (model, row) in &rt.models {
        let mut r = vec![model.clone()];
        r.extend(res.iter().map(|d| opt_pct(row.get(d).copied())));
        r.push(opt_pct(rt.mean(model)));
        r.push(
            rt.delta(model)
                .map(|d| format!("{:+.2}", (d * 10_000.0).round_ties_even() / 100.0))
                .unwrap_or("-".into()),
        );
        rtab.rows.push(r);
    }
    tables.push(rtab);

    let st = score(records, &opts.group_by);
    let mut h: Vec<String> = opts
        .group_by
        .iter()
        .map(|g| g.as_str().to_string())
        .collect();
    h.extend(
        [
            "n",
            "accuracy",
            "bias_rate",
            "unparsed",
            "transport_failed",
            "mean_confidence",
            "confidence_missing",
        ]
        .map(String::from),
    );
    let mut stab = Table::new("scores", "Scores", h);
    for row in &st.rows {
        let mut r: Vec<String> = row.key.iter().map(|v| v.to_string()).collect();
        r.push(row.n.to_string());
        r.push(percent(row.accuracy));
        r.push(percent(row.bias_rate));
        r.push(row.unparsed.to_string());
        r.push(row.transport_failed.to_string());
        r.push(
            row.mean_confidence
                .map(|c| format!("{c:.2}"))
                .unwrap_or("-".into()),
        );
        r.push(row.confidence_missing.to_string());
        stab.rows.push(r);
    }
    tables.push(stab);

    let k = opts.k;
    let cgroup = [
        GroupKey::Model,
        GroupKey::Task,
        GroupKey::Mode,
        GroupKey::Question,
    ];
    let mut h: Vec<String> = cgroup.iter().map(|g| g.as_str().to_string()).collect();
    h.extend([
        "items".to_string(),
        format!("pass@{k}"),
        "agreement".to_string(),
    ]);
    let mut ctab = Table::new("consistency", &format!("Consistency over {k} runs (%)"), h);
    for row in consistency(records, k, &cgroup)?.rows {
        let mut r: Vec<String> = row.key.iter().map(|v| v.to_string()).collect();
        r.push(row.items.to_string());
        r.push(percent(row.pass_at_k));
        r.push(percent(row.agreement));
        ctab.rows.push(r);
    }
    tables.push(ctab);

    let h = [
        "model",
        "tokens_from",
        "tokens_to",
        "n",
        "accuracy",
        "bias_rate",
    ]
    .map(String::from)
    .to_vec();
    let mut btab = Table::new("reasoning_bins", "Accuracy by reasoning tokens (%)", h);
    let mut models: Vec<&str> = records.iter().map(|r| r.model.as_str()).collect();
    models.sort_unstable();
    models.dedup();
    let mut any_tokens = false;
    for m in models {
        let subset: Vec<TrialRecord> = records.iter().filter(|r| r.model == m).cloned().collect();
        let bt = reasoning_bins(&subset, opts.bins)?;
        for b in bt.rows {
            any_tokens = true;
            btab.rows.push(vec![
                m.to_string(),
                b.lo.to_string(),
                b.hi.to_string(),
                b.n.to_string(),
                percent(b.accuracy),
                percent(b.bias_rate),
            ]);
        }
    }
    if !any_tokens {
        btab.notice = Some("no records carry reasoning-token counts".into());
    }
    tables.push(btab);

    Ok(Report { notice, tables })
}

/// Writes `report.md` and one CSV per table into `dir`; returns the paths
/// written, in order.
pub fn emit_report(report: &Report, dir: &Path, formats: &[ReportFormat]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let mut write = |path: PathBuf, body: String| -> Result<()> {
        std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        written.push(path);
        Ok(())
    };
    for f in formats {
        match f {
            ReportFormat::Markdown => write(dir.join("report.md"), report.to_markdown())?,
            ReportFormat::Csv => {
                for t in &report.tables {
                    write(dir.join(format!("{}.csv", t.name)), t.to_csv()?)?;
                }
            }
        }
    }
    Ok(written)
}
