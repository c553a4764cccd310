//! Binary field snapshots.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! magic        6 bytes  "EMLAB1"
//! dims         3 x u32  points along x, y, z
//! box_length   f64
//! time         f64
//! n_fields     u32
//! roster       n_fields x { name_len u32, name utf-8, components u32 }
//! payload      for each field, for each component: nx*ny*nz f64,
//!              real-space values with x fastest
//! ```

use std::path::Path;

use emlab::model::EMState;
use emlab::spectral::{Grid3, SpectralField};

use crate::error::{HarnessError, Result};

pub const MAGIC: &[u8; 6] = b"EMLAB1";

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotField {
    pub name: String,
    /// One real-space array per component.
    pub components: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotFile {
    pub dims: [u32; 3],
    pub box_length: f64,
    pub time: f64,
    pub fields: Vec<SnapshotField>,
}

const ROSTER: [(&str, usize); 4] = [("u", 3), ("n", 1), ("E", 3), ("B", 3)];

impl SnapshotFile {
    pub fn from_state(s: &EMState) -> Self {
        let g = s.grid();
        let n = g.points_per_axis() as u32;
        let fields = ROSTER
            .iter()
            .zip(s.fields())
            .map(|((name, _), f)| SnapshotField {
                name: name.to_string(),
                components: f.real_values(),
            })
            .collect();
        Self {
            dims: [n; 3],
            box_length: g.box_length(),
            time: s.time,
            fields,
        }
    }

    pub fn grid(&self) -> std::result::Result<Grid3, String> {
        let [nx, ny, nz] = self.dims;
        if nx != ny || ny != nz {
            return Err(format!("non-cubic dims {nx}x{ny}x{nz}"));
        }
        Grid3::new(self.box_length, nx as usize).map_err(|e| e.to_string())
    }

    /// Rebuilds the physical state; `expected` guards against loading into
    /// a different grid.
    pub fn to_state(&self, expected: Option<&Grid3>) -> std::result::Result<EMState, String> {
        let grid = self.grid()?;
        if let Some(e) = expected {
            if e.points_per_axis() != grid.points_per_axis() || e.box_length() != grid.box_length() {
                return Err(format!(
                    "dimension mismatch: snapshot is {}^3 on L = {}, expected {}^3 on L = {}",
                    grid.points_per_axis(),
                    grid.box_length(),
                    e.points_per_axis(),
                    e.box_length()
                ));
            }
        }
        let mut parts = Vec::with_capacity(ROSTER.len());
        for (name, components) in ROSTER {
            let f = self
                .fields
                .iter()
                .find(|f| f.name == name)
                .ok_or_else(|| format!("missing field `{name}`"))?;
            if f.components.len() != components {
                return Err(format!("field `{name}` has {} components, expected {components}", f.components.len()));
            }
            parts.push(SpectralField::from_real_values(grid, f.components.clone()).map_err(|e| e.to_string())?);
        }
        let mut it = parts.into_iter();
        let mut next = || it.next().expect("roster has four fields");
        Ok(EMState {
            u: next(),
            n: next(),
            e: next(),
            b: next(),
            time: self.time,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let points: usize = self.dims.iter().map(|&d| d as usize).product();
        let values: usize = self.fields.iter().map(|f| f.components.len()).sum::<usize>() * points;
        let mut out = Vec::with_capacity(64 + 8 * values);
        out.extend_from_slice(MAGIC);
        for d in self.dims {
            out.extend_from_slice(&d.to_le_bytes());
        }
        out.extend_from_slice(&self.box_length.to_le_bytes());
        out.extend_from_slice(&self.time.to_le_bytes());
        out.extend_from_slice(&(self.fields.len() as u32).to_le_bytes());
        for f in &self.fields {
            out.extend_from_slice(&(f.name.len() as u32).to_le_bytes());
            out.extend_from_slice(f.name.as_bytes());
            out.extend_from_slice(&(f.components.len() as u32).to_le_bytes());
        }
        for f in &self.fields {
            for c in &f.components {
                for v in c {
                    out.extend_from_slice(&v.to_le_bytes());
                }
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> std::result::Result<Self, String> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(6)? != MAGIC {
            return Err("bad magic, not an EMLAB1 snapshot".into());
        }
        let dims = [r.u32()?, r.u32()?, r.u32()?];
        let box_length = r.f64()?;
        let time = r.f64()?;
        let n_fields = r.u32()? as usize;
        let mut roster = Vec::new();
        for _ in 0..n_fields {
            let len = r.u32()? as usize;
            let name = std::str::from_utf8(r.take(len)?)
                .map_err(|_| "field name is not utf-8".to_string())?
                .to_string();
            roster.push((name, r.u32()? as usize));
        }
        let points = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d as usize));
        let points = points.ok_or("dims overflow")?;
        let mut fields = Vec::with_capacity(n_fields);
        for (name, components) in roster {
            let mut comps = Vec::with_capacity(components);
            for _ in 0..components {
                let raw = r.take(points.checked_mul(8).ok_or("payload overflow")?)?;
                comps.push(
                    raw.chunks_exact(8)
                        .map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes")))
                        .collect(),
                );
            }
            fields.push(SnapshotField { name, components: comps });
        }
        if r.pos != bytes.len() {
            return Err(format!("{} trailing bytes", bytes.len() - r.pos));
        }
        Ok(Self {
            dims,
            box_length,
            time,
            fields,
        })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> std::result::Result<&'a [u8], String> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| format!("truncated at byte {} (need {n} more)", self.pos))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> std::result::Result<u32, String> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn f64(&mut self) -> std::result::Result<f64, String> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

pub fn save_snapshot(state: &EMState, path: &Path) -> Result<()> {
    std::fs::write(path, SnapshotFile::from_state(state).to_bytes()).map_err(|e| HarnessError::io(path, e))
}

pub fn read_snapshot(path: &Path) -> Result<SnapshotFile> {
    let bytes = std::fs::read(path).map_err(|e| HarnessError::io(path, e))?;
    SnapshotFile::from_bytes(&bytes).map_err(|detail| HarnessError::Snapshot {
        path: path.to_path_buf(),
        detail,
    })
}

/// Loads a state, optionally insisting on a grid.
pub fn load_snapshot(path: &Path, expected: Option<&Grid3>) -> Result<EMState> {
    read_snapshot(path)?.to_state(expected).map_err(|detail| HarnessError::Snapshot {
        path: path.to_path_buf(),
        detail,
    })
}
