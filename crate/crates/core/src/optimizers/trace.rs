use std::io::{Read, Write};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    /// 1-based.
    pub eval_index: usize,
    pub fitness: f64,
    pub hf: bool,
    pub best_so_far: f64,
}

pub fn write_trace_csv<W: Write>(w: W, trace: &[TraceEntry]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["eval_index", "fitness", "hf_flag", "best_so_far"])?;
    for e in trace {
        out.write_record(&[
            e.eval_index.to_string(),
            e.fitness.to_string(),
            u8::from(e.hf).to_string(),
            e.best_so_far.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_trace_csv<R: Read>(r: R) -> Result<Vec<TraceEntry>> {
    let mut rd = csv::Reader::from_reader(r);
    let num = |s: &str| s.parse::<f64>().map_err(|e| Error::InvalidConfig(format!("trace value {s:?}: {e}")));
    rd.records()
        .map(|rec| {
            let rec = rec?;
            if rec.len() != 4 {
                return Err(Error::InvalidConfig("trace rows need 4 columns".into()));
            }
            Ok(TraceEntry {
                eval_index: rec[0].parse().map_err(|e| Error::InvalidConfig(format!("eval_index: {e}")))?,
                fitness: num(&rec[1])?,
                hf: &rec[2] == "1",
                best_so_far: num(&rec[3])?,
            })
        })
        .collect()
}
