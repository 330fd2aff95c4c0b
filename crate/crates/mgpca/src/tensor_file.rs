//! Binary stack files.
//!
//! Layout: the magic `MGPCA1`; the scale id as a `u32` byte length and UTF-8
//! bytes; `P` and `N` as `u64`; `N` subject ids encoded like the scale id; then
//! the `P·P·N` values as `f64`, row-major per slice with slices in subject
//! order. All integers and floats are little-endian.

use std::fs;
use std::path::Path;

use mgpca_core::TensorStack;

use crate::error::{CliError, Result};

pub const MAGIC: &[u8; 6] = b"MGPCA1";

#[derive(Debug, Clone, PartialEq)]
pub struct TensorFile {
    pub stack: TensorStack,
    pub subject_ids: Vec<String>,
}

impl TensorFile {
    pub fn new(stack: TensorStack, subject_ids: Vec<String>) -> Result<Self> {
        if subject_ids.len() != stack.subjects() {
            return Err(CliError::Data(format!(
                "{} subject ids for {} slices",
                subject_ids.len(),
                stack.subjects()
            )));
        }
        Ok(Self { stack, subject_ids })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let x = &self.stack;
        let mut out = Vec::with_capacity(64 + x.as_slice().len() * 8);
        out.extend_from_slice(MAGIC);
        put_str(&mut out, x.scale_id());
        out.extend_from_slice(&(x.nodes() as u64).to_le_bytes());
        out.extend_from_slice(&(x.subjects() as u64).to_le_bytes());
        for id in &self.subject_ids {
            put_str(&mut out, id);
        }
        for v in x.as_slice() {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> std::result::Result<Self, String> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(MAGIC.len())? != MAGIC {
            return Err("not a tensor file (bad magic)".into());
        }
        let scale_id = r.string()?;
        let p = r.u64()? as usize;
        let n = r.u64()? as usize;
        let mut subject_ids = Vec::with_capacity(n.min(1 << 20));
        for _ in 0..n {
            subject_ids.push(r.string()?);
        }
        let count = p
            .checked_mul(p)
            .and_then(|pp| pp.checked_mul(n))
            .filter(|c| c.checked_mul(8).is_some())
            .ok_or("declared sizes overflow")?;
        let rest = bytes.len() - r.pos;
        if rest != count * 8 {
            return Err(format!(
                "payload holds {rest} bytes but P = {p}, N = {n} needs {}",
                count * 8
            ));
        }
        let values: Vec<f64> = r
            .take(rest)?
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        let stack = TensorStack::new(scale_id, p, n, values).map_err(|e| e.to_string())?;
        Ok(Self { stack, subject_ids })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes()).map_err(CliError::io(path))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(CliError::io(path))?;
        Self::from_bytes(&bytes).map_err(|m| CliError::format(path, m))
    }
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    out.extend_from_slice(&(s.len() as u32).to_le_bytes());
    out.extend_from_slice(s.as_bytes());
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> std::result::Result<&'a [u8], String> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&e| e <= self.bytes.len())
            .ok_or("file ends early")?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u64(&mut self) -> std::result::Result<u64, String> {
        Ok(u64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }

    fn string(&mut self) -> std::result::Result<String, String> {
        let len = u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")) as usize;
        String::from_utf8(self.take(len)?.to_vec()).map_err(|_| "identifier is not UTF-8".into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> TensorFile {
        let values = vec![1.0, -0.5, -0.5, 2.0, 0.0, 1e-300, 1e-300, f64::MAX];
        let stack = TensorStack::new("s1_2", 2, 2, values).unwrap();
        TensorFile::new(stack, vec!["a".into(), "bé".into()]).unwrap()
    }

    #[test]
    fn bytes_round_trip() {
        let f = sample();
        let bytes = f.to_bytes();
        assert_eq!(&bytes[..6], MAGIC);
        assert_eq!(TensorFile::from_bytes(&bytes).unwrap(), f);
    }

    #[test]
    fn rejects_truncated_and_padded_payloads() {
        let bytes = sample().to_bytes();
        assert!(TensorFile::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut longer = bytes.clone();
        longer.push(0);
        assert!(TensorFile::from_bytes(&longer).is_err());
        let mut bad = bytes;
        bad[0] = b'X';
        assert!(TensorFile::from_bytes(&bad).is_err());
    }

    #[test]
    fn rejects_asymmetric_payload() {
        let mut bytes = sample().to_bytes();
        let n = bytes.len();
        // Last slice's (0,1) entry sits 3 values from the end.
        bytes[n - 24..n - 16].copy_from_slice(&7.0f64.to_le_bytes());
        assert!(TensorFile::from_bytes(&bytes).is_err());
    }
}
