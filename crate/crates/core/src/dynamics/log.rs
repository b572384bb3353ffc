use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::io::fmt_f64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogRow {
    pub t: f64,
    pub mass: f64,
    pub hamiltonian: f64,
    /// One entry per index in [`TrajectoryLog::sigmas`].
    pub h_norms: Vec<f64>,
    /// Largest modulus on the quadrature grid.
    pub linf: f64,
}

/// Invariants recorded along a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryLog {
    pub sigmas: Vec<f64>,
    pub rows: Vec<LogRow>,
}

impl TrajectoryLog {
    pub fn new(sigmas: Vec<f64>) -> Self {
        Self {
            sigmas,
            rows: Vec::new(),
        }
    }

    pub fn first(&self) -> Option<&LogRow> {
        self.rows.first()
    }

    pub fn last(&self) -> Option<&LogRow> {
        self.rows.last()
    }

    /// Largest `|M(t) - M(0)| / M(0)` over the log.
    pub fn relative_mass_drift(&self) -> f64 {
        let Some(m0) = self.first().map(|r| r.mass) else {
            return 0.0;
        };
        if m0 == 0.0 {
            return 0.0;
        }
        self.rows
            .iter()
            .map(|r| (r.mass - m0).abs() / m0)
            .fold(0.0, f64::max)
    }

    /// Largest `|H(t) - H(0)|` over the log.
    pub fn hamiltonian_drift(&self) -> f64 {
        let Some(h0) = self.first().map(|r| r.hamiltonian) else {
            return 0.0;
        };
        self.rows
            .iter()
            .map(|r| (r.hamiltonian - h0).abs())
            .fold(0.0, f64::max)
    }

    pub fn csv_header(&self) -> String {
        let mut cols = vec!["t".to_string(), "mass".into(), "hamiltonian".into()];
        cols.extend(self.sigmas.iter().map(|s| format!("h_norm_{s}")));
        cols.push("linf".into());
        cols.join(",")
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", self.csv_header())?;
        for row in &self.rows {
            let mut fields = vec![fmt_f64(row.t), fmt_f64(row.mass), fmt_f64(row.hamiltonian)];
            fields.extend(row.h_norms.iter().map(|x| fmt_f64(*x)));
            fields.push(fmt_f64(row.linf));
            writeln!(w, "{}", fields.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut log = TrajectoryLog::new(vec![0.1, 0.5]);
        log.rows.push(LogRow {
            t: 0.0,
            mass: 2.0,
            hamiltonian: -1.0,
            h_norms: vec![1.0, 1.5],
            linf: 3.0,
        });
        let mut buf = Vec::new();
        log.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,mass,hamiltonian,h_norm_0.1,h_norm_0.5,linf");
        assert_eq!(
            lines.next().unwrap(),
            "0.0000000000000000e0,2.0000000000000000e0,-1.0000000000000000e0,1.0000000000000000e0,1.5000000000000000e0,3.0000000000000000e0"
        );
    }
}
