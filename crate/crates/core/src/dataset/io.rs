use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use super::{Dataset, DatasetMeta};
use crate::error::{Error, Result};

/// Sidecar metadata lives next to the CSV as `<stem>.meta.json`.
pub fn meta_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.json")
}

pub fn write_dataset(path: &Path, ds: &Dataset) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    let mut header: Vec<String> = (0..ds.dim()).map(|i| format!("x_{i}")).collect();
    header.push("label".into());
    w.write_record(&header)?;
    for (x, y) in ds.inputs.iter().zip(&ds.labels) {
        let mut rec: Vec<String> = x.iter().map(f64::to_string).collect();
        rec.push(y.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    let meta = serde_json::to_string_pretty(&ds.meta)?;
    std::fs::write(meta_path(path), meta + "\n")?;
    Ok(())
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    if !path.exists() {
        return Err(Error::MissingArtifact(path.display().to_string()));
    }
    let meta: DatasetMeta = serde_json::from_str(&std::fs::read_to_string(meta_path(path))?)?;
    let mut r = csv::Reader::from_path(path)?;
    let width = r.headers()?.len();
    if width < 2 {
        return Err(Error::InvalidConfig("dataset needs at least one input column".into()));
    }
    let mut inputs = Vec::new();
    let mut labels = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let vals: Vec<f64> = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| Error::InvalidConfig(format!("bad number {s:?}: {e}"))))
            .collect::<Result<_>>()?;
        labels.push(vals[width - 1]);
        inputs.push(vals[..width - 1].to_vec());
    }
    Ok(Dataset { inputs, labels, meta })
}
