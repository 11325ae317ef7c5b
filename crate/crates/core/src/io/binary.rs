use std::io::{BufWriter, Read, Write};

use crate::edgegen::EdgeStore;
use crate::error::{Result, SernError};
use crate::nodegen::NodeStore;

pub const BINARY_MAGIC: [u8; 4] = *b"SERN";
pub const BINARY_VERSION: u16 = 1;
pub const HEADER_BYTES: usize = 24;
const FLAG_DISTANCES: u16 = 1;

/// Header, then `x`, `y` as f32, `from`, `to` as u32 and optionally `d` as
/// f32, all little-endian.
pub fn write_binary<W: Write>(nodes: &NodeStore, edges: &EdgeStore, out: W) -> Result<()> {
    let mut w = BufWriter::new(out);
    let flags = if edges.has_distances() { FLAG_DISTANCES } else { 0 };
    w.write_all(&BINARY_MAGIC)?;
    w.write_all(&BINARY_VERSION.to_le_bytes())?;
    w.write_all(&flags.to_le_bytes())?;
    w.write_all(&(nodes.len() as u64).to_le_bytes())?;
    w.write_all(&(edges.len() as u64).to_le_bytes())?;
    for v in nodes.xs().iter().chain(nodes.ys()) {
        w.write_all(&v.to_le_bytes())?;
    }
    for v in edges.from_ids().iter().chain(edges.to_ids()) {
        w.write_all(&v.to_le_bytes())?;
    }
    if let Some(ds) = edges.distances() {
        for v in ds {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

fn read_words<R: Read>(r: &mut R, count: usize) -> Result<Vec<[u8; 4]>> {
    let bytes = count
        .checked_mul(4)
        .ok_or_else(|| SernError::Format("array length overflows".into()))?;
    let mut raw = Vec::new();
    r.take(bytes as u64).read_to_end(&mut raw)?;
    if raw.len() != bytes {
        return Err(SernError::Format("file ends inside an array".into()));
    }
    Ok(raw.chunks_exact(4).map(|c| [c[0], c[1], c[2], c[3]]).collect())
}

pub fn read_binary<R: Read>(mut input: R) -> Result<(NodeStore, EdgeStore)> {
    let mut header = [0u8; HEADER_BYTES];
    input
        .read_exact(&mut header)
        .map_err(|_| SernError::Format("file shorter than the header".into()))?;
    if header[..4] != BINARY_MAGIC {
        return Err(SernError::Format("bad magic".into()));
    }
    let version = u16::from_le_bytes([header[4], header[5]]);
    if version != BINARY_VERSION {
        return Err(SernError::Format(format!("unsupported version {version}")));
    }
    let flags = u16::from_le_bytes([header[6], header[7]]);
    let n = u64::from_le_bytes(header[8..16].try_into().expect("8 bytes"));
    let e = u64::from_le_bytes(header[16..24].try_into().expect("8 bytes"));
    let (n, e) = (
        usize::try_from(n).map_err(|_| SernError::Format("node count too large".into()))?,
        usize::try_from(e).map_err(|_| SernError::Format("edge count too large".into()))?,
    );
    let f32s = |w: Vec<[u8; 4]>| w.into_iter().map(f32::from_le_bytes).collect::<Vec<_>>();
    let u32s = |w: Vec<[u8; 4]>| w.into_iter().map(u32::from_le_bytes).collect::<Vec<_>>();
    let xs = f32s(read_words(&mut input, n)?);
    let ys = f32s(read_words(&mut input, n)?);
    let from = u32s(read_words(&mut input, e)?);
    let to = u32s(read_words(&mut input, e)?);
    let dist = if flags & FLAG_DISTANCES != 0 {
        Some(f32s(read_words(&mut input, e)?))
    } else {
        None
    };
    let mut probe = [0u8; 1];
    if input.read(&mut probe)? != 0 {
        return Err(SernError::Format("trailing bytes after payload".into()));
    }
    let edges = EdgeStore::from_parts(from, to, dist)?;
    super::check_ids(n, &edges)?;
    Ok((NodeStore::from_coordinates(xs, ys)?, edges))
}
