//! File formats: the CGSP binary container, CSV exports, and the flat
//! key-value config/manifest format.

use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"CGSP";
pub const FORMAT_VERSION: u32 = 1;

/// Shape and payload of a generated data file: `count` realizations of a pair
/// of real arrays on an `L^d` grid, row-major, x before y.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSet {
    pub dim: u32,
    pub shape: Vec<u64>,
    /// (x, y) per realization.
    pub pairs: Vec<(Vec<f64>, Vec<f64>)>,
}

impl DataSet {
    pub fn points(&self) -> usize {
        self.shape.iter().product::<u64>() as usize
    }
}

/// Incremental writer for the binary container:
/// magic `CGSP`, version u32, dim u32, shape `dim x u64`, count u64, then per
/// realization the x array then the y array as little-endian IEEE-754 f64.
pub struct DataSetWriter {
    w: BufWriter<std::fs::File>,
    points: usize,
    expected: u64,
    written: u64,
}

impl DataSetWriter {
    pub fn create(path: &Path, dim: u32, shape: &[u64], count: u64) -> Result<Self> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        w.write_all(&MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&dim.to_le_bytes())?;
        for s in shape {
            w.write_all(&s.to_le_bytes())?;
        }
        w.write_all(&count.to_le_bytes())?;
        Ok(Self {
            w,
            points: shape.iter().product::<u64>() as usize,
            expected: count,
            written: 0,
        })
    }

    pub fn push(&mut self, x: &[f64], y: &[f64]) -> Result<()> {
        if x.len() != self.points || y.len() != self.points {
            return Err(Error::LengthMismatch {
                expected: self.points,
                got: x.len().min(y.len()),
            });
        }
        for v in x.iter().chain(y.iter()) {
            self.w.write_all(&v.to_le_bytes())?;
        }
        self.written += 1;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        if self.written != self.expected {
            return Err(Error::Format {
                what: "CGSP writer".into(),
                detail: format!("wrote {} of {} realizations", self.written, self.expected),
            });
        }
        self.w.flush()?;
        Ok(())
    }
}

/// Write a complete in-memory dataset.
pub fn write_dataset(path: &Path, data: &DataSet) -> Result<()> {
    let mut writer = DataSetWriter::create(path, data.dim, &data.shape, data.pairs.len() as u64)?;
    for (x, y) in &data.pairs {
        writer.push(x, y)?;
    }
    writer.finish()
}

pub fn read_dataset(path: &Path) -> Result<DataSet> {
    let mut r = BufReader::new(std::fs::File::open(path)?);
    let bad = |detail: &str| Error::Format {
        what: format!("CGSP file {}", path.display()),
        detail: detail.into(),
    };
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if magic != MAGIC {
        return Err(bad("wrong magic bytes"));
    }
    let version = read_u32(&mut r)?;
    if version != FORMAT_VERSION {
        return Err(bad(&format!("unsupported format version {version}")));
    }
    let dim = read_u32(&mut r)?;
    if dim == 0 || dim > 3 {
        return Err(bad(&format!("bad dimension {dim}")));
    }
    let mut shape = Vec::with_capacity(dim as usize);
    for _ in 0..dim {
        shape.push(read_u64(&mut r)?);
    }
    let count = read_u64(&mut r)? as usize;
    let points: u64 = shape.iter().product();
    if points == 0 || points > (1 << 33) || count.saturating_mul(points as usize) > (1 << 34) {
        return Err(bad("implausible shape or count"));
    }
    let mut pairs = Vec::with_capacity(count);
    for _ in 0..count {
        let x = read_f64_array(&mut r, points as usize)?;
        let y = read_f64_array(&mut r, points as usize)?;
        pairs.push((x, y));
    }
    Ok(DataSet { dim, shape, pairs })
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_f64_array(r: &mut impl Read, len: usize) -> Result<Vec<f64>> {
    let mut bytes = vec![0u8; len * 8];
    r.read_exact(&mut bytes)?;
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

/// CSV with the estimate schema `lag,value,stderr`. The lag column carries the
/// mean shell radius for field estimates.
pub fn write_curve_csv(path: &Path, radii: &[f64], values: &[f64], stderr: &[f64]) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "lag,value,stderr")?;
    for i in 0..values.len() {
        writeln!(w, "{},{},{}", radii[i], values[i], stderr[i])?;
    }
    w.flush()?;
    Ok(())
}

/// CSV export of small sequence data: `index,x,y` per realization file.
pub fn write_pair_csv(path: &Path, x: &[f64], y: &[f64]) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "index,x,y")?;
    for i in 0..x.len() {
        writeln!(w, "{},{},{}", i, x[i], y[i])?;
    }
    w.flush()?;
    Ok(())
}

/// Flat `key = value` text, one pair per line, `#` comments. Configs and run
/// manifests share this format, so a manifest can be fed back as a config.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    pub entries: Vec<(String, String)>,
}

impl KeyValues {
    pub fn set(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string();
        if let Some(slot) = self.entries.iter_mut().find(|(k, _)| k == key) {
            slot.1 = value;
        } else {
            self.entries.push((key.to_string(), value));
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn parse(text: &str, what: &str) -> Result<Self> {
        let mut out = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Format {
                what: what.into(),
                detail: format!("line {}: expected `key = value`, got `{raw}`", lineno + 1),
            })?;
            out.entries
                .push((key.trim().to_string(), value.trim().to_string()));
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &format!("config {}", path.display()))
    }

    pub fn save(&self, path: &Path, header: &[String]) -> Result<()> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        for line in header {
            writeln!(w, "# {line}")?;
        }
        for (k, v) in &self.entries {
            writeln!(w, "{k} = {v}")?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Read a one-value-per-line table file for tabulated correlation models.
pub fn read_table(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| Error::Format {
            what: format!("table {}", path.display()),
            detail: format!("line {}: not a number: `{raw}`", lineno + 1),
        })?;
        out.push(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dataset_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.cgsp");
        let data = DataSet {
            dim: 1,
            shape: vec![8],
            pairs: vec![
                (
                    vec![0.1, -2.5, 3e-300, f64::MIN_POSITIVE, 1e300, -0.0, 7.25, 9.0],
                    vec![1.0; 8],
                ),
                (vec![0.5; 8], vec![-0.25; 8]),
            ],
        };
        write_dataset(&path, &data).unwrap();
        let back = read_dataset(&path).unwrap();
        assert_eq!(back, data);
        for (a, b) in back.pairs[0].0.iter().zip(&data.pairs[0].0) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn rejects_foreign_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.cgsp");
        std::fs::write(&path, b"NOPE someotherdata").unwrap();
        assert!(matches!(read_dataset(&path), Err(Error::Format { .. })));
    }

    #[test]
    fn key_values_round_trip_and_comments() {
        let text = "# a manifest\nlength = 1024\nfamily = power-law\n\n# trailing\nseed = 42\n";
        let kv = KeyValues::parse(text, "test").unwrap();
        assert_eq!(kv.get("length"), Some("1024"));
        assert_eq!(kv.get("family"), Some("power-law"));
        assert_eq!(kv.get("seed"), Some("42"));
        assert_eq!(kv.get("missing"), None);
        assert!(KeyValues::parse("no equals sign", "test").is_err());
    }

    #[test]
    fn table_parse() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.txt");
        std::fs::write(&path, "1.0\n0.5\n# comment\n0.25\n").unwrap();
        assert_eq!(read_table(&path).unwrap(), vec![1.0, 0.5, 0.25]);
        std::fs::write(&path, "1.0\nxyz\n").unwrap();
        assert!(read_table(&path).is_err());
    }
}
