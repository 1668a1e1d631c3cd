use std::io::Write;

use anyhow::Result;
use qclone::sweep::{SweepReport, SweepRow};

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref()
        .map(ToString::to_string)
        .unwrap_or_else(|| "-".into())
}

fn sci(v: &Option<f64>) -> String {
    v.map(|x| format!("{x:.2e}")).unwrap_or_else(|| "-".into())
}

fn leak_summary(row: &SweepRow) -> String {
    if row.leak_terms.is_empty() {
        return "-".into();
    }
    row.leak_terms
        .iter()
        .map(|t| format!("({},{})", t.a, t.b))
        .collect::<Vec<_>>()
        .join(" ")
}

fn status(row: &SweepRow) -> String {
    serde_json::to_value(row.status)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

pub fn write_table<W: Write>(out: &mut W, report: &SweepReport) -> Result<()> {
    writeln!(
        out,
        "{:>3} {:>2} {:<18} {:>3} {:>3} {:>3} {:<25} {:>5} {:<16} {:>9} {:>9} {:>9}  status",
        "d",
        "n",
        "subset",
        "p",
        "q",
        "g",
        "verdict",
        "mixed",
        "leak",
        "spread",
        "analytic",
        "vs_mixed"
    )?;
    for row in &report.rows {
        writeln!(
            out,
            "{:>3} {:>2} {:<18} {:>3} {:>3} {:>3} {:<25} {:>5} {:<16} {:>9} {:>9} {:>9}  {}",
            row.d,
            row.n,
            row.subset,
            opt(&row.p),
            opt(&row.q),
            opt(&row.g),
            opt(&row.verdict),
            opt(&row.maximally_mixed),
            leak_summary(row),
            sci(&row.oracle_max_distance),
            sci(&row.analytic_oracle_distance),
            sci(&row.mixed_distance),
            status(row),
        )?;
        for note in &row.notes {
            writeln!(out, "      note: {note}")?;
        }
    }
    writeln!(
        out,
        "{} rows, {} mismatches (samples={}, seed={}, tol={:e}, witness={:e})",
        report.rows.len(),
        report.mismatches(),
        report.samples,
        report.seed,
        report.tol,
        report.witness
    )?;
    Ok(())
}

pub fn write_json<W: Write>(out: &mut W, report: &SweepReport) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, report)?;
    writeln!(out)?;
    Ok(())
}

pub fn write_csv<W: Write>(out: W, report: &SweepReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "d",
        "n",
        "subset",
        "p",
        "q",
        "g",
        "verdict",
        "authorized",
        "maximally_mixed",
        "leak_terms",
        "oracle_max_distance",
        "analytic_oracle_distance",
        "mixed_distance",
        "status",
        "notes",
    ])?;
    let plain = |v: Option<String>| v.unwrap_or_default();
    for row in &report.rows {
        let leaks = row
            .leak_terms
            .iter()
            .map(|t| format!("{}:{}:{}", t.a, t.b, t.phase_exponent))
            .collect::<Vec<_>>()
            .join("|");
        w.write_record([
            row.d.to_string(),
            row.n.to_string(),
            row.subset.clone(),
            plain(row.p.map(|v| v.to_string())),
            plain(row.q.map(|v| v.to_string())),
            plain(row.g.map(|v| v.to_string())),
            plain(row.verdict.map(|v| v.to_string())),
            plain(row.authorized.map(|v| v.to_string())),
            plain(row.maximally_mixed.map(|v| v.to_string())),
            leaks,
            plain(row.oracle_max_distance.map(|v| format!("{v:e}"))),
            plain(row.analytic_oracle_distance.map(|v| format!("{v:e}"))),
            plain(row.mixed_distance.map(|v| format!("{v:e}"))),
            status(row),
            row.notes.join("; "),
        ])?;
    }
    w.flush()?;
    Ok(())
}
