//! On-disk formats.
//!
//! Both formats start with a one-line JSON header terminated by `\n`,
//! followed by a little-endian `f64` payload.
//!
//! * `.sfn` (sampled function): header `{"dim", "J"}`, payload of
//!   interleaved `(re, im)` pairs in row-major sample order.
//! * `.dpu` (dyadic partition): header `{"kind", "J", "K_max", "dim"}`,
//!   payload of the symbols `φ_0 … φ_{K_max}` one after another, each in
//!   FFT frequency order.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, SampledFunction};
use crate::partition::{DyadicPartition, PartitionKind};

#[derive(Debug, Serialize, Deserialize)]
struct SfnHeader {
    dim: usize,
    #[serde(rename = "J")]
    j: u32,
}

#[derive(Debug, Serialize, Deserialize)]
struct DpuHeader {
    kind: PartitionKind,
    #[serde(rename = "J")]
    j: u32,
    #[serde(rename = "K_max")]
    k_max: usize,
    #[serde(default = "one")]
    dim: usize,
}

fn one() -> usize {
    1
}

fn put_header<W: Write, H: Serialize>(w: &mut W, header: &H) -> Result<()> {
    serde_json::to_writer(&mut *w, header)?;
    w.write_all(b"\n")?;
    Ok(())
}

fn take_header<R: BufRead, H: for<'de> Deserialize<'de>>(r: &mut R) -> Result<H> {
    let mut line = Vec::new();
    r.read_until(b'\n', &mut line)?;
    if line.last() != Some(&b'\n') {
        return Err(Error::Format("missing header line".into()));
    }
    Ok(serde_json::from_slice(&line)?)
}

fn take_floats<R: Read>(r: &mut R, count: usize) -> Result<Vec<f64>> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != count * 8 {
        return Err(Error::Format(format!("payload has {} bytes, expected {}", bytes.len(), count * 8)));
    }
    Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect())
}

pub fn encode_sfn<W: Write>(mut w: W, f: &SampledFunction) -> Result<()> {
    let g = f.grid();
    put_header(&mut w, &SfnHeader { dim: g.dim(), j: g.log2_samples() })?;
    let mut buf = Vec::with_capacity(16 * g.len());
    for z in f.values() {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn decode_sfn<R: Read>(r: R) -> Result<SampledFunction> {
    let mut r = BufReader::new(r);
    let h: SfnHeader = take_header(&mut r)?;
    let grid = GridSpec::new(h.dim, h.j)?;
    let raw = take_floats(&mut r, 2 * grid.len())?;
    let values = raw.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
    SampledFunction::new(grid, values)
}

pub fn encode_dpu<W: Write>(mut w: W, partition: &DyadicPartition) -> Result<()> {
    let g = partition.grid();
    put_header(
        &mut w,
        &DpuHeader { kind: partition.kind(), j: g.log2_samples(), k_max: partition.k_max(), dim: g.dim() },
    )?;
    let mut buf = Vec::with_capacity(8 * g.len() * (partition.k_max() + 1));
    for s in partition.symbols() {
        for v in s {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn decode_dpu<R: Read>(r: R) -> Result<DyadicPartition> {
    let mut r = BufReader::new(r);
    let h: DpuHeader = take_header(&mut r)?;
    let grid = GridSpec::new(h.dim, h.j)?;
    if h.k_max != grid.k_max() {
        return Err(Error::Format(format!("K_max {} does not match J = {}", h.k_max, h.j)));
    }
    let raw = take_floats(&mut r, grid.len() * (h.k_max + 1))?;
    let symbols = raw.chunks_exact(grid.len()).map(<[f64]>::to_vec).collect();
    DyadicPartition::from_symbols(grid, h.kind, symbols)
}

pub fn write_sfn(path: impl AsRef<Path>, f: &SampledFunction) -> Result<()> {
    encode_sfn(std::io::BufWriter::new(fs::File::create(path)?), f)
}

pub fn read_sfn(path: impl AsRef<Path>) -> Result<SampledFunction> {
    decode_sfn(fs::File::open(path)?)
}

pub fn write_dpu(path: impl AsRef<Path>, partition: &DyadicPartition) -> Result<()> {
    encode_dpu(std::io::BufWriter::new(fs::File::create(path)?), partition)
}

pub fn read_dpu(path: impl AsRef<Path>) -> Result<DyadicPartition> {
    decode_dpu(fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sfn_round_trip() {
        let g = GridSpec::new(2, 6).unwrap();
        let f = SampledFunction::from_fn(g, |x| Complex64::new(x[0].sin(), x[1] * 0.25));
        let mut buf = Vec::new();
        encode_sfn(&mut buf, &f).unwrap();
        assert!(buf.starts_with(br#"{"dim":2,"J":6}"#));
        assert_eq!(decode_sfn(&buf[..]).unwrap(), f);
        assert!(matches!(decode_sfn(&buf[..buf.len() - 3]), Err(Error::Format(_))));
    }

    #[test]
    fn dpu_round_trip() {
        let g = GridSpec::new(1, 8).unwrap();
        let p = DyadicPartition::build(g, PartitionKind::Radial);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.dpu");
        write_dpu(&path, &p).unwrap();
        assert_eq!(read_dpu(&path).unwrap(), p);
        let text = fs::read(&path).unwrap();
        assert!(text.starts_with(br#"{"kind":"RADIAL","J":8,"K_max":6"#));
    }
}
