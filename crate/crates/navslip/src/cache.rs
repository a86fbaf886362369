//! Basis cache: a JSON document holding the eigenpairs and the quadrature
//! grid, enough to rebuild the basis bit-for-bit without root finding.
//!
//! Floats are written with 17 significant digits so every value parses back
//! to the same bits; the checksum covers the canonical pair list.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use log::{info, warn};
use navslip_core::basis::{pairs_checksum, Basis, DomainSpec, EigenPair, Parity};
use navslip_core::QuadratureGrid;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::atomic;
use crate::error::{AppError, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDims {
    #[serde(rename = "Nr")]
    pub nr: usize,
    #[serde(rename = "Ntheta")]
    pub ntheta: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairRecord {
    pub n: u32,
    pub parity: String,
    pub s: f64,
    pub lambda: f64,
    #[serde(rename = "normC")]
    pub norm_c: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisCache {
    pub format_version: u32,
    pub alpha: f64,
    #[serde(rename = "K")]
    pub k: usize,
    pub grid: GridDims,
    pub pairs: Vec<PairRecord>,
    pub checksum: String,
}

impl BasisCache {
    pub fn from_basis(basis: &Basis) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            alpha: basis.domain().alpha(),
            k: basis.len(),
            grid: GridDims {
                nr: basis.grid().nr(),
                ntheta: basis.grid().ntheta(),
            },
            pairs: basis
                .pairs()
                .iter()
                .map(|p| PairRecord {
                    n: p.n,
                    parity: p.parity.as_str().to_string(),
                    s: p.s,
                    lambda: p.lambda,
                    norm_c: p.norm_c,
                    mu: p.mu,
                })
                .collect(),
            checksum: basis.checksum().to_string(),
        }
    }

    pub fn eigenpairs(&self) -> Result<Vec<EigenPair>> {
        self.pairs
            .iter()
            .map(|p| {
                let parity = Parity::parse(&p.parity)
                    .ok_or_else(|| AppError::Format(format!("unknown parity {:?} in basis cache", p.parity)))?;
                Ok(EigenPair {
                    n: p.n,
                    parity,
                    s: p.s,
                    lambda: p.lambda,
                    norm_c: p.norm_c,
                    mu: p.mu,
                })
            })
            .collect()
    }

    /// Validates the document and rebuilds the basis from it.
    pub fn to_basis(&self) -> Result<Basis> {
        if self.format_version != FORMAT_VERSION {
            return Err(AppError::Format(format!(
                "basis cache format {} is not supported (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        if self.pairs.len() != self.k {
            return Err(AppError::Format(format!(
                "basis cache declares K = {} but holds {} pairs",
                self.k,
                self.pairs.len()
            )));
        }
        let pairs = self.eigenpairs()?;
        let sum = pairs_checksum(&pairs);
        if sum != self.checksum {
            return Err(AppError::Format(format!(
                "basis cache checksum mismatch: stored {}, computed {sum}",
                self.checksum
            )));
        }
        let domain = DomainSpec::new(self.alpha)?;
        let grid = QuadratureGrid::new(self.grid.nr, self.grid.ntheta)?;
        Ok(Basis::from_pairs(domain, &pairs, grid)?)
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedDigits::default());
        self.serialize(&mut ser).expect("in-memory serialization cannot fail");
        out.push(b'\n');
        out
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        serde_json::from_slice(bytes).map_err(|e| AppError::Format(format!("basis cache: {e}")))
    }
}

/// Pretty JSON with every float in `{:.16e}` form.
#[derive(Default)]
struct FixedDigits(PrettyFormatter<'static>);

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn write(path: &Path, basis: &Basis) -> Result<()> {
    atomic::write_bytes(path, &BasisCache::from_basis(basis).to_json())
}

pub fn read(path: &Path) -> Result<Basis> {
    let bytes = fs::read(path).map_err(|e| AppError::io(path, e))?;
    BasisCache::from_json(&bytes)?.to_basis()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheOutcome {
    Hit,
    Built,
}

/// Reuses the cache at `path` when it is valid for `(k, alpha)`, otherwise
/// builds the basis and writes the cache.
pub fn load_or_build(path: &Path, k: usize, alpha: f64) -> Result<(Basis, CacheOutcome)> {
    if path.exists() {
        match read(path) {
            Ok(b) if b.len() == k && b.domain().alpha().to_bits() == alpha.to_bits() => {
                info!("basis cache hit: {} (checksum {})", path.display(), b.checksum());
                return Ok((b, CacheOutcome::Hit));
            }
            Ok(b) => info!(
                "basis cache {} is for K = {}, alpha = {}; rebuilding",
                path.display(),
                b.len(),
                b.domain().alpha()
            ),
            Err(e) => warn!("ignoring unusable basis cache {}: {e}", path.display()),
        }
    }
    let basis = Basis::build_auto(k, DomainSpec::new(alpha)?)?;
    write(path, &basis)?;
    info!(
        "basis built and cached: {} (checksum {})",
        path.display(),
        basis.checksum()
    );
    Ok((basis, CacheOutcome::Built))
}
