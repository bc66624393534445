use std::io::Write;

use super::StudyRecord;

pub const CSV_HEADER: &str =
    "level,ndof,hmax,err_u,err_u_aug,err_post,err_proj,err_gap,eta,eoc_u,eoc_aug,eoc_post,eoc_gap";

/// Scientific notation with 12 significant digits; NaN becomes an empty cell.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:.11e}")
    }
}

fn row(r: &StudyRecord) -> String {
    let floats = [
        r.hmax, r.err_u, r.err_u_aug, r.err_post, r.err_proj, r.err_gap, r.eta, r.eoc_u, r.eoc_aug, r.eoc_post,
        r.eoc_gap,
    ];
    let mut out = format!("{},{}", r.level, r.ndof);
    for v in floats {
        out.push(',');
        out.push_str(&format_float(v));
    }
    out
}

pub fn write_csv(mut w: impl Write, records: &[StudyRecord]) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(w, "{}", row(r))?;
    }
    Ok(())
}

/// Locking runs in one table, with a leading `nu` column.
pub fn write_locking_csv(mut w: impl Write, runs: &[(f64, Vec<StudyRecord>)]) -> std::io::Result<()> {
    writeln!(w, "nu,{CSV_HEADER}")?;
    for (nu, records) in runs {
        for r in records {
            writeln!(w, "{},{}", format_float(*nu), row(r))?;
        }
    }
    Ok(())
}
