//! CSV emitters and the run manifest. All text outputs use `,` separators,
//! `.` decimals and LF line endings.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use v2n_core::link::LinkSample;
use v2n_core::{Deployment, RhoMode};

use crate::campaign::SummaryRow;

pub const SUMMARY_HEADER: &str =
    "tech,lambda_mmw,N,M,T_tr_s,mean_rate_bps,rho_var,outage_prob,ci_rate,ci_outage,n_drops";
pub const TIMESERIES_HEADER: &str = "t_s,tech,serving_rsu,snr_db,rate_bps,lost_alignment";
pub const DEPLOYMENT_HEADER: &str = "tech,id,x_m,y_m";

const NA: &str = "NA";

fn opt(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => v.to_string(),
        _ => NA.to_string(),
    }
}

pub fn write_summary<W: Write>(mut w: W, rows: &[SummaryRow], rho: RhoMode) -> io::Result<()> {
    writeln!(w, "{SUMMARY_HEADER}")?;
    for row in rows {
        let s = &row.summary;
        let point = match &row.point {
            Some(p) => format!(
                "{},{},{},{}",
                p.lambda_mmw, p.vehicle_elements, p.rsu_elements, p.t_tr_s
            ),
            None => [NA; 4].join(","),
        };
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            s.tech.label(),
            point,
            s.mean_rate_bps,
            opt(s.rho(rho)),
            s.outage_prob,
            opt(s.ci_rate),
            opt(s.ci_outage),
            s.n_drops,
        )?;
    }
    Ok(())
}

fn sample_line(s: &LinkSample) -> String {
    format!(
        "{},{},{},{},{},{}",
        s.t,
        s.tech.label(),
        s.serving_rsu.map_or_else(|| NA.to_string(), |id| id.to_string()),
        s.snr_db.0,
        s.rate_bps,
        u8::from(s.lost_alignment),
    )
}

/// One drop, LTE samples first.
pub fn write_timeseries<W: Write>(mut w: W, lte: &[LinkSample], mmw: &[LinkSample]) -> io::Result<()> {
    writeln!(w, "{TIMESERIES_HEADER}")?;
    for s in lte.iter().chain(mmw) {
        writeln!(w, "{}", sample_line(s))?;
    }
    Ok(())
}

/// Several labelled series in one file, with a leading `series` column.
pub fn write_labelled_series<W: Write>(
    mut w: W,
    series: &[(String, Vec<LinkSample>)],
) -> io::Result<()> {
    writeln!(w, "series,{TIMESERIES_HEADER}")?;
    for (label, samples) in series {
        for s in samples {
            writeln!(w, "{label},{}", sample_line(s))?;
        }
    }
    Ok(())
}

pub fn write_deployment<W: Write>(mut w: W, d: &Deployment) -> io::Result<()> {
    writeln!(w, "{DEPLOYMENT_HEADER}")?;
    for r in d.lte_rsus.iter().chain(&d.mmw_rsus) {
        writeln!(w, "{},{},{},{}", r.tech.label(), r.id, r.position.x, r.position.y)?;
    }
    Ok(())
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    let file = tmp.persist(path).map_err(|e| e.error)?;
    // Temporary files are created owner-only.
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        file.set_permissions(fs::Permissions::from_mode(0o644))?;
    }
    #[cfg(not(unix))]
    drop(file);
    Ok(())
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub root_seed: u64,
    pub version: String,
    /// File names relative to the output directory.
    pub outputs: Vec<String>,
    pub wall_clock_s: f64,
}

impl RunManifest {
    pub fn write(&self, out_dir: &Path) -> io::Result<()> {
        let mut body = serde_json::to_vec_pretty(self)?;
        body.push(b'\n');
        write_atomic(&out_dir.join("manifest.json"), &body)
    }
}

/// Creates `dir` if needed.
pub fn ensure_dir(dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dir)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::campaign::SweepPoint;
    use v2n_core::{MetricsSummary, Position, Rsu, Tech, Decibel};

    fn summary(tech: Tech) -> MetricsSummary {
        MetricsSummary {
            tech,
            mean_rate_bps: 2.5e8,
            rho_var: Some(0.4),
            rho_var_per_drop: Some(0.3),
            outage_prob: 0.0025,
            n_drops: 2,
            ci_rate: Some(1e7),
            ci_rho: None,
            ci_outage: None,
            alignment_losses: 0,
            slots: 0,
        }
    }

    #[test]
    fn summary_rows() {
        let rows = vec![
            SummaryRow { point: None, summary: summary(Tech::Lte) },
            SummaryRow {
                point: Some(SweepPoint { lambda_mmw: 30.0, vehicle_elements: 16, rsu_elements: 64, t_tr_s: 0.1 }),
                summary: summary(Tech::MmWave),
            },
        ];
        let mut buf = Vec::new();
        write_summary(&mut buf, &rows, RhoMode::PerDrop).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            format!(
                "{SUMMARY_HEADER}\nLTE,NA,NA,NA,NA,250000000,0.3,0.0025,10000000,NA,2\n\
                 mmWave,30,16,64,0.1,250000000,0.3,0.0025,10000000,NA,2\n"
            )
        );
        assert!(!text.contains('\r'));
    }

    #[test]
    fn timeseries_and_deployment() {
        let a = LinkSample {
            t: 0.1,
            tech: Tech::MmWave,
            serving_rsu: Some(4),
            snr_db: Decibel(12.5),
            rate_bps: 4.2e9,
            lost_alignment: true,
        };
        let none = LinkSample { serving_rsu: None, snr_db: Decibel(f64::NEG_INFINITY), rate_bps: 0.0, lost_alignment: false, ..a };
        let mut buf = Vec::new();
        write_timeseries(&mut buf, &[], &[a, none]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            format!("{TIMESERIES_HEADER}\n0.1,mmWave,4,12.5,4200000000,1\n0.1,mmWave,NA,-inf,0,0\n")
        );
        let d = Deployment {
            area_side_m: 1000.0,
            lte_rsus: vec![Rsu { id: 0, tech: Tech::Lte, position: Position::new(1.5, 2.0) }],
            mmw_rsus: vec![],
            lambda_lte: 4.0,
            lambda_mmw: 0.0,
        };
        let mut buf = Vec::new();
        write_deployment(&mut buf, &d).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "tech,id,x_m,y_m\nLTE,0,1.5,2\n");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
