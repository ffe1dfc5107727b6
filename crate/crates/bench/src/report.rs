//! Tab-separated report tables.
//!
//! Detail columns: `setting rep seed algorithm value opt opt_method
//! matched_fraction runtime_ms audits`.
//!
//! Summary columns: `setting algorithm runs total_value mean_value
//! std_err total_opt ratio matched_fraction runtime_ms audit_failures`.
//! `ratio` is `total_value / total_opt` over runs that have an optimum.
//! Missing values are written as `-`.

use std::io::{self, Write};

use dynmatch::oracle::SampleStats;

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub setting: String,
    pub rep: usize,
    pub seed: u64,
    pub algorithm: String,
    pub value: f64,
    pub opt: Option<f64>,
    pub opt_method: Option<String>,
    pub matched_fraction: f64,
    pub runtime_ms: f64,
    pub audits_pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub setting: String,
    pub algorithm: String,
    pub runs: usize,
    pub total_value: f64,
    pub mean_value: f64,
    pub std_err: f64,
    pub total_opt: Option<f64>,
    pub ratio: Option<f64>,
    pub matched_fraction: f64,
    pub runtime_ms: f64,
    pub audit_failures: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub records: Vec<RunRecord>,
    pub summary: Vec<SummaryRow>,
}

pub const DETAIL_HEADER: &str =
    "setting\trep\tseed\talgorithm\tvalue\topt\topt_method\tmatched_fraction\truntime_ms\taudits";
pub const SUMMARY_HEADER: &str = "setting\talgorithm\truns\ttotal_value\tmean_value\tstd_err\ttotal_opt\tratio\tmatched_fraction\truntime_ms\taudit_failures";

fn opt_text(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| x.to_string())
}

impl Report {
    /// Groups by (setting, algorithm) in first-appearance order.
    pub fn from_records(records: Vec<RunRecord>) -> Self {
        let mut keys: Vec<(String, String)> = Vec::new();
        for r in &records {
            let key = (r.setting.clone(), r.algorithm.clone());
            if !keys.contains(&key) {
                keys.push(key);
            }
        }
        let summary = keys
            .into_iter()
            .map(|(setting, algorithm)| {
                let group: Vec<&RunRecord> = records
                    .iter()
                    .filter(|r| r.setting == setting && r.algorithm == algorithm)
                    .collect();
                let values: Vec<f64> = group.iter().map(|r| r.value).collect();
                let stats = SampleStats::from_values(&values);
                let with_opt: Vec<&&RunRecord> = group.iter().filter(|r| r.opt.is_some()).collect();
                let (total_opt, ratio) = if with_opt.is_empty() {
                    (None, None)
                } else {
                    let o: f64 = with_opt.iter().filter_map(|r| r.opt).sum();
                    let a: f64 = with_opt.iter().map(|r| r.value).sum();
                    (Some(o), Some(if o > 0.0 { a / o } else { 1.0 }))
                };
                let n = group.len() as f64;
                SummaryRow {
                    setting,
                    algorithm,
                    runs: group.len(),
                    total_value: values.iter().sum(),
                    mean_value: stats.mean,
                    std_err: stats.std_err,
                    total_opt,
                    ratio,
                    matched_fraction: group.iter().map(|r| r.matched_fraction).sum::<f64>() / n,
                    runtime_ms: group.iter().map(|r| r.runtime_ms).sum(),
                    audit_failures: group.iter().filter(|r| !r.audits_pass).count(),
                }
            })
            .collect();
        Self { records, summary }
    }

    pub fn row(&self, setting: &str, algorithm: &str) -> Option<&SummaryRow> {
        self.summary
            .iter()
            .find(|r| r.setting == setting && r.algorithm == algorithm)
    }

    pub fn write_detail<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{DETAIL_HEADER}")?;
        for r in &self.records {
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.6}\t{:.3}\t{}",
                r.setting,
                r.rep,
                r.seed,
                r.algorithm,
                r.value,
                opt_text(r.opt),
                r.opt_method.as_deref().unwrap_or("-"),
                r.matched_fraction,
                r.runtime_ms,
                if r.audits_pass { "pass" } else { "fail" }
            )?;
        }
        Ok(())
    }

    pub fn write_summary<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{SUMMARY_HEADER}")?;
        for s in &self.summary {
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.6}\t{:.3}\t{}",
                s.setting,
                s.algorithm,
                s.runs,
                s.total_value,
                s.mean_value,
                s.std_err,
                opt_text(s.total_opt),
                opt_text(s.ratio),
                s.matched_fraction,
                s.runtime_ms,
                s.audit_failures
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(setting: &str, algorithm: &str, value: f64, opt: Option<f64>) -> RunRecord {
        RunRecord {
            setting: setting.into(),
            rep: 0,
            seed: 0,
            algorithm: algorithm.into(),
            value,
            opt,
            opt_method: opt.map(|_| "bitmask-exact".into()),
            matched_fraction: 0.5,
            runtime_ms: 1.0,
            audits_pass: true,
        }
    }

    #[test]
    fn totals_equal_the_sum_of_records() {
        let records = vec![
            rec("a", "greedy", 1.5, Some(3.0)),
            rec("a", "patient", 2.0, None),
            rec("a", "greedy", 2.25, Some(3.0)),
            rec("b", "greedy", 4.0, None),
        ];
        let report = Report::from_records(records.clone());
        assert_eq!(report.summary.len(), 3);
        for row in &report.summary {
            let sum: f64 = records
                .iter()
                .filter(|r| r.setting == row.setting && r.algorithm == row.algorithm)
                .map(|r| r.value)
                .sum();
            assert_eq!(row.total_value, sum);
        }
        let g = report.row("a", "greedy").unwrap();
        assert_eq!(g.runs, 2);
        assert_eq!(g.mean_value, 1.875);
        assert_eq!(g.ratio, Some(3.75 / 6.0));
        assert_eq!(report.row("a", "patient").unwrap().ratio, None);
    }

    #[test]
    fn tables_have_fixed_columns() {
        let report = Report::from_records(vec![rec("a", "greedy", 1.0, None)]);
        let mut detail = Vec::new();
        report.write_detail(&mut detail).unwrap();
        let detail = String::from_utf8(detail).unwrap();
        let lines: Vec<&str> = detail.lines().collect();
        assert_eq!(lines[0], DETAIL_HEADER);
        assert_eq!(lines[1].split('\t').count(), DETAIL_HEADER.split('\t').count());
        assert!(lines[1].contains("\t-\t-\t"));
        let mut summary = Vec::new();
        report.write_summary(&mut summary).unwrap();
        let summary = String::from_utf8(summary).unwrap();
        let row: Vec<&str> = summary.lines().nth(1).unwrap().split('\t').collect();
        assert_eq!(row.len(), SUMMARY_HEADER.split('\t').count());
        assert_eq!(row[3], "1");
    }
}
