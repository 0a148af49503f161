//! Binary share files.
//!
//! Little-endian layout:
//!
//! ```text
//! "MLDR" | version u16 | n u16 | d u16 | q u32 | node u16
//!        | d x (generations u32, pad u32)
//!        | alpha_total x symbol u16
//! ```

use mldr_core::mldr::{MldrSystem, SystemShare};
use mldr_core::{Fe, Field};

use crate::error::{HarnessError, Result};

pub const MAGIC: &[u8; 4] = b"MLDR";
pub const VERSION: u16 = 1;
/// Largest modulus whose symbols fit in two bytes.
pub const MAX_MODULUS: u32 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShareFile {
    pub n: usize,
    pub d: usize,
    pub q: u32,
    /// 1-based.
    pub node: usize,
    /// `(generations, pad)` per level.
    pub levels: Vec<(usize, usize)>,
    pub symbols: Vec<Fe>,
}

fn format_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Format(msg.into())
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize, what: &str) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| format_err(format!("truncated share file while reading {what}")))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().expect("two bytes")))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().expect("four bytes")))
    }
}

fn narrow<T: TryFrom<usize>>(v: usize, what: &str) -> Result<T> {
    T::try_from(v).map_err(|_| format_err(format!("{what} {v} does not fit the header")))
}

impl ShareFile {
    pub fn from_share(system: &MldrSystem, share: &SystemShare) -> Self {
        let config = system.config();
        ShareFile {
            n: config.n,
            d: config.d,
            q: config.field.modulus(),
            node: share.node,
            levels: system.layouts().iter().map(|l| (l.generations, l.pad)).collect(),
            symbols: share.symbols.clone(),
        }
    }

    pub fn share(&self) -> SystemShare {
        SystemShare { node: self.node, symbols: self.symbols.clone() }
    }

    /// The system described by the header.
    pub fn system(&self) -> Result<MldrSystem> {
        Ok(MldrSystem::from_layout(self.n, self.d, Field::new(self.q)?, &self.levels)?)
    }

    /// True when both files come from the same system.
    pub fn same_system(&self, other: &ShareFile) -> bool {
        (self.n, self.d, self.q, &self.levels) == (other.n, other.d, other.q, &other.levels)
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        if self.q > MAX_MODULUS {
            return Err(format_err(format!("modulus {} exceeds {MAX_MODULUS}", self.q)));
        }
        let mut out = Vec::with_capacity(16 + 8 * self.levels.len() + 2 * self.symbols.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&narrow::<u16>(self.n, "n")?.to_le_bytes());
        out.extend_from_slice(&narrow::<u16>(self.d, "d")?.to_le_bytes());
        out.extend_from_slice(&self.q.to_le_bytes());
        out.extend_from_slice(&narrow::<u16>(self.node, "node")?.to_le_bytes());
        if self.levels.len() != self.d {
            return Err(format_err(format!("{} level entries for d = {}", self.levels.len(), self.d)));
        }
        for &(generations, pad) in &self.levels {
            out.extend_from_slice(&narrow::<u32>(generations, "generation count")?.to_le_bytes());
            out.extend_from_slice(&narrow::<u32>(pad, "pad")?.to_le_bytes());
        }
        for s in &self.symbols {
            out.extend_from_slice(&narrow::<u16>(s.value() as usize, "symbol")?.to_le_bytes());
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4, "magic")? != MAGIC {
            return Err(format_err("bad magic"));
        }
        let version = r.u16("version")?;
        if version != VERSION {
            return Err(format_err(format!("unsupported version {version}")));
        }
        let n = r.u16("n")? as usize;
        let d = r.u16("d")? as usize;
        let q = r.u32("q")?;
        let node = r.u16("node")? as usize;
        if !(2..=MAX_MODULUS).contains(&q) {
            return Err(format_err(format!("modulus {q} out of range")));
        }
        if d == 0 || d >= n || node == 0 || node > n {
            return Err(format_err(format!("inconsistent header: n={n}, d={d}, node={node}")));
        }
        let mut levels = Vec::with_capacity(d);
        for _ in 0..d {
            levels.push((r.u32("generations")? as usize, r.u32("pad")? as usize));
        }
        let generations: usize = levels.iter().map(|l| l.0).sum();
        let expected = d * generations;
        let payload = r.take(2 * expected, "payload")?;
        if r.pos != bytes.len() {
            return Err(format_err(format!("{} trailing bytes", bytes.len() - r.pos)));
        }
        let mut symbols = Vec::with_capacity(expected);
        for chunk in payload.chunks_exact(2) {
            let v = u16::from_le_bytes([chunk[0], chunk[1]]) as u32;
            if v >= q {
                return Err(format_err(format!("symbol {v} not below modulus {q}")));
            }
            symbols.push(Fe(v));
        }
        Ok(ShareFile { n, d, q, node, levels, symbols })
    }
}

/// Message bytes as field symbols, one byte per symbol.
pub fn bytes_to_symbols(field: &Field, bytes: &[u8]) -> Result<Vec<Fe>> {
    if field.modulus() <= u8::MAX as u32 {
        return Err(HarnessError::Usage(format!("modulus {} cannot hold a byte per symbol", field.modulus())));
    }
    Ok(bytes.iter().map(|&b| Fe(b as u32)).collect())
}

pub fn symbols_to_bytes(symbols: &[Fe]) -> Result<Vec<u8>> {
    symbols
        .iter()
        .map(|s| u8::try_from(s.value()).map_err(|_| format_err(format!("symbol {} is not a byte", s.value()))))
        .collect()
}
