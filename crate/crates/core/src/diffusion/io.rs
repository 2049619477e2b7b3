//! Plain-text dumps of fields and probe readings.

use std::io::Write;

use super::grid::ScalarField;
use super::probes::ProbeSet;
use crate::error::{check_len, Result};

/// Header line `nx,ny,dx,dy`, its values, then one line per row from the bottom wall.
pub fn write_field_csv<W: Write>(mut w: W, field: &ScalarField) -> Result<()> {
    let g = field.grid;
    writeln!(w, "nx,ny,dx,dy")?;
    writeln!(w, "{},{},{},{}", g.nx, g.ny, g.dx, g.dy)?;
    for j in 0..g.ny {
        let line: Vec<String> = field.row(j).iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn write_probe_csv<W: Write>(w: W, probes: &ProbeSet, values: &[f64]) -> Result<()> {
    check_len(probes.len(), values.len())?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["probe_id", "x", "y", "s"])?;
    for (k, (&(x, y), s)) in probes.points.iter().zip(values).enumerate() {
        out.write_record(&[(k + 1).to_string(), x.to_string(), y.to_string(), s.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::Grid;

    #[test]
    fn field_dump_layout() {
        let f = ScalarField::from_fn(Grid::lf(), |x, _| x);
        let mut buf = Vec::new();
        write_field_csv(&mut buf, &f).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "nx,ny,dx,dy");
        assert_eq!(lines[1], "20,20,0.05,0.025");
        assert_eq!(lines.len(), 22);
        assert_eq!(lines[2].split(',').count(), 20);
    }

    #[test]
    fn probe_dump_layout() {
        let p = ProbeSet::default();
        let mut buf = Vec::new();
        write_probe_csv(&mut buf, &p, &[1.0; 30]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("probe_id,x,y,s\n1,0.168,0.263,1\n"));
    }
}
