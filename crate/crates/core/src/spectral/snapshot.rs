//! Binary field snapshots.
//!
//! Layout: magic `VEL1`, little-endian `u32 k_max`, `u32 n_eta`, `f64 eta_max`,
//! `f64 time`, then `(2 k_max + 1) * n_eta` complex values as interleaved
//! `f64` (re, im), k-major from `k = -k_max`.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::{DistributionSpectrum, FrequencyMesh};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"VEL1";

pub fn encode(f: &DistributionSpectrum) -> Vec<u8> {
    let m = f.mesh();
    let mut out = Vec::with_capacity(28 + 16 * f.values().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(m.k_max() as u32).to_le_bytes());
    out.extend_from_slice(&(m.n_eta() as u32).to_le_bytes());
    out.extend_from_slice(&m.eta_max().to_le_bytes());
    out.extend_from_slice(&f.time().to_le_bytes());
    for v in f.values() {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<DistributionSpectrum> {
    if bytes.len() < 28 || &bytes[..4] != MAGIC {
        return Err(Error::Snapshot("missing VEL1 header".into()));
    }
    let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap()) as usize;
    let f64_at = |i: usize| f64::from_le_bytes(bytes[i..i + 8].try_into().unwrap());
    let k_max = u32_at(4);
    let n_eta = u32_at(8);
    let eta_max = f64_at(12);
    let time = f64_at(20);
    let mesh = FrequencyMesh::new(k_max, eta_max, n_eta)?;
    let count = mesh.n_modes() * n_eta;
    if bytes.len() != 28 + 16 * count {
        return Err(Error::Snapshot(format!("expected {} payload bytes, found {}", 16 * count, bytes.len() - 28)));
    }
    let values = (0..count).map(|i| Complex64::new(f64_at(28 + 16 * i), f64_at(36 + 16 * i))).collect();
    DistributionSpectrum::from_values(mesh, values, time)
}

pub fn write(path: &Path, f: &DistributionSpectrum) -> std::io::Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(&encode(f))?;
    file.flush()
}

pub fn read(path: &Path) -> Result<DistributionSpectrum> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut h| h.read_to_end(&mut bytes))
        .map_err(|e| Error::Snapshot(format!("{}: {e}", path.display())))?;
    decode(&bytes)
}
