//! Binary noise-path dump: a 32-byte header (magic, K, steps, seed as
//! little-endian u64 after an 8-byte magic) followed by `steps × K`
//! little-endian f64 increments, row-major.

use std::fs;
use std::path::Path;

use navslip_core::NoisePath;

use crate::atomic;
use crate::error::{AppError, Result};

pub const MAGIC: &[u8; 8] = b"NSNOISE1";
pub const HEADER_LEN: usize = 32;

pub fn encode(path: &NoisePath) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * path.increments().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(path.modes() as u64).to_le_bytes());
    out.extend_from_slice(&(path.steps() as u64).to_le_bytes());
    out.extend_from_slice(&path.seed().to_le_bytes());
    for v in path.increments() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// The format stores no step size, so the caller supplies `dt`.
pub fn decode(bytes: &[u8], dt: f64) -> Result<NoisePath> {
    if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
        return Err(AppError::Format("not a noise path dump (bad magic)".into()));
    }
    let word = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().expect("8-byte slice"));
    let (modes, steps, seed) = (word(8) as usize, word(16) as usize, word(24));
    let expected = modes
        .checked_mul(steps)
        .and_then(|n| n.checked_mul(8))
        .and_then(|n| n.checked_add(HEADER_LEN));
    if expected != Some(bytes.len()) {
        return Err(AppError::Format(format!(
            "noise dump for {steps} x {modes} has {} bytes",
            bytes.len()
        )));
    }
    let inc = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Ok(NoisePath::from_raw(modes, steps, dt, seed, inc)?)
}

pub fn write(file: &Path, path: &NoisePath) -> Result<()> {
    atomic::write_bytes(file, &encode(path))
}

pub fn read(file: &Path, dt: f64) -> Result<NoisePath> {
    let bytes = fs::read(file).map_err(|e| AppError::io(file, e))?;
    decode(&bytes, dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use navslip_core::noise::sample_path;
    use navslip_core::NoiseSpec;
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let p = sample_path(&NoiseSpec {
            m: 5,
            modes: 3,
            seed: 0xABCD,
            dt: 0.01,
            steps: 4,
        })
        .unwrap();
        let b = encode(&p);
        assert_eq!(b.len(), 32 + 8 * 12);
        assert_eq!(&b[..8], MAGIC);
        assert_eq!(b[8], 3);
        assert_eq!(b[16], 4);
        assert_eq!(u64::from_le_bytes(b[24..32].try_into().unwrap()), 0xABCD);
        // Row-major: second value is mode 1 of step 0.
        assert_eq!(f64::from_le_bytes(b[40..48].try_into().unwrap()), p.row(0)[1]);
    }

    #[test]
    fn corrupt_dumps_are_rejected() {
        let p = NoisePath::zeros(2, 2, 0.1);
        let mut b = encode(&p);
        assert!(decode(&b[..40], 0.1).is_err());
        b[0] = b'X';
        assert!(decode(&b, 0.1).is_err());
    }

    proptest! {
        #[test]
        fn roundtrip(modes in 1usize..6, steps in 1usize..20, seed in any::<u64>()) {
            let p = sample_path(&NoiseSpec { m: 5, modes, seed, dt: 1e-3, steps }).unwrap();
            let back = decode(&encode(&p), 1e-3).unwrap();
            prop_assert_eq!(back, p);
        }
    }
}
