use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::spectral::FlowResult;

pub const FLOW_CSV_HEADER: [&str; 8] = [
    "sweep_kind",
    "grid_value",
    "level_index",
    "energy",
    "group_id",
    "group_size",
    "n_fock",
    "converged",
];

/// One parsed row of a flow CSV.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct FlowRow {
    pub sweep_kind: String,
    pub grid_value: f64,
    pub level_index: usize,
    pub energy: f64,
    pub group_id: usize,
    pub group_size: usize,
    pub n_fock: usize,
    pub converged: bool,
}

/// Twelve significant digits.
pub fn format_value(x: f64) -> String {
    format!("{x:.11e}")
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io("<csv>", io),
        other => Error::Config(format!("csv: {other:?}")),
    }
}

pub fn write_flow_csv<W: Write>(f: &FlowResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(FLOW_CSV_HEADER).map_err(csv_err)?;
    let kind = f.sweep_kind.name();
    for (x, table) in f.grid.iter().zip(&f.tables) {
        for (level, e) in table.energies.iter().enumerate() {
            let (group_id, group_size) = table
                .group_of(level)
                .ok_or_else(|| Error::contract("degeneracy groups do not cover all levels"))?;
            w.write_record([
                kind.to_string(),
                format_value(*x),
                level.to_string(),
                format_value(*e),
                group_id.to_string(),
                group_size.to_string(),
                table.n_fock_used.to_string(),
                table.converged.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| Error::io("<csv>", e))
}

/// Writes the flow CSV to `path`.
pub fn emit_flow_csv(f: &FlowResult, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut buf = BufWriter::new(file);
    write_flow_csv(f, &mut buf).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })?;
    buf.flush().map_err(|e| Error::io(path, e))
}

pub fn read_flow_csv<R: Read>(input: R) -> Result<Vec<FlowRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_err)?;
    if header.iter().ne(FLOW_CSV_HEADER) {
        return Err(Error::Config(format!("unexpected CSV header {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

pub fn load_flow_csv(path: &Path) -> Result<Vec<FlowRow>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_flow_csv(file)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{FlowSource, SpectrumTable, SweepKind};

    fn flow() -> FlowResult {
        FlowResult {
            grid: vec![0.0, 1.0],
            tables: vec![
                SpectrumTable::new(vec![0.0, 6.2832], 1e-6, 256),
                SpectrumTable::new(vec![3.1416, 3.1416], 1e-6, 256),
            ],
            sweep_kind: SweepKind::RSweep,
            source: FlowSource::Coupling {
                omega: 6.2832,
                c: 0.0,
            },
        }
    }

    #[test]
    fn layout() {
        let mut out = Vec::new();
        write_flow_csv(&flow(), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "sweep_kind,grid_value,level_index,energy,group_id,group_size,n_fock,converged"
        );
        assert_eq!(lines.len(), 5);
        assert_eq!(
            lines[1],
            "r_sweep,0.00000000000e0,0,0.00000000000e0,0,1,256,false"
        );
        assert_eq!(
            lines[4],
            "r_sweep,1.00000000000e0,1,3.14160000000e0,0,2,256,false"
        );
    }

    #[test]
    fn round_trip() {
        let f = flow();
        let mut out = Vec::new();
        write_flow_csv(&f, &mut out).unwrap();
        let rows = read_flow_csv(out.as_slice()).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[1].energy, 6.2832);
        assert_eq!(rows[3].group_size, 2);
        assert!(read_flow_csv("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_value(16.99487123456789), "1.69948712346e1");
        assert_eq!(format_value(-0.5), "-5.00000000000e-1");
    }
}
