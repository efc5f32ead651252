use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use landau_core::linear::DensityTrace;
use landau_core::spectral::{snapshot, DistributionSpectrum};
use serde::Serialize;
use serde_json::ser::Formatter;

/// Floats with 17 significant digits, round-trip exact.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Compact JSON whose floats use [`fmt_f64`]. Non-finite floats become `null`.
struct FixedDigits;

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedDigits);
    value.serialize(&mut ser).expect("serializable record");
    String::from_utf8(buf).expect("utf-8 json")
}

/// Writes files under one directory and remembers each for the manifest.
pub struct Output {
    dir: PathBuf,
    files: Vec<String>,
}

impl Output {
    pub fn create(dir: &Path) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    fn open(&mut self, name: &str) -> io::Result<BufWriter<File>> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
        Ok(BufWriter::new(File::create(path)?))
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> io::Result<()> {
        let mut w = self.open(name)?;
        writeln!(w, "{}", header.join(","))?;
        for row in rows {
            writeln!(w, "{}", row.join(","))?;
        }
        w.flush()
    }

    pub fn ndjson<T: Serialize>(&mut self, name: &str, records: &[T]) -> io::Result<()> {
        let mut w = self.open(name)?;
        for r in records {
            writeln!(w, "{}", to_json(r))?;
        }
        w.flush()
    }

    pub fn snapshot(&mut self, name: &str, f: &DistributionSpectrum) -> io::Result<()> {
        let mut w = self.open(name)?;
        w.write_all(&snapshot::encode(f))?;
        w.flush()
    }

    /// A referenced file written by someone else, e.g. a sweep entry's manifest.
    pub fn register(&mut self, name: &str) {
        self.files.push(name.to_string());
    }

    pub fn traces(&mut self, name: &str, traces: &[DensityTrace]) -> io::Result<()> {
        let rows = traces.iter().flat_map(|tr| {
            tr.times
                .iter()
                .zip(&tr.values)
                .map(move |(t, v)| vec![fmt_f64(*t), tr.k.to_string(), fmt_f64(v.re), fmt_f64(v.im), fmt_f64(v.norm())])
        });
        self.csv(name, &["t", "k", "re_rho", "im_rho", "abs_rho"], rows)
    }
}
