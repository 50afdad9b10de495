//! Bit-packed binary files for center sets and code databases.
//!
//! ```text
//! centers: "SHC1" | u32 C | u32 q | C x ceil(q/8) bytes
//! codes:   "SHCD" | u32 N | u32 q | N x (u32 label | ceil(q/8) bytes)
//! ```
//!
//! Integers are little-endian. Within a code, bit `j` lives in byte `j / 8`
//! at position `7 - j % 8` (MSB first); `1` encodes `+1` and pad bits are 0.

use std::io::{ErrorKind, Read, Write};

use crate::code::{BinaryCode, CenterSet, CodeDatabase};
use crate::error::{Error, Result};

pub const CENTERS_MAGIC: &[u8; 4] = b"SHC1";
pub const CODES_MAGIC: &[u8; 4] = b"SHCD";

/// Packs a code into `ceil(q/8)` bytes, MSB first.
pub fn pack_bytes(code: &BinaryCode) -> Vec<u8> {
    let mut out = vec![0u8; code.q().div_ceil(8)];
    for j in 0..code.q() {
        if code.bit(j) {
            out[j / 8] |= 0x80 >> (j % 8);
        }
    }
    out
}

/// Inverse of [`pack_bytes`]. Non-zero pad bits are a format error.
pub fn unpack_bytes(bytes: &[u8], q: usize) -> Result<BinaryCode> {
    if bytes.len() != q.div_ceil(8) {
        return Err(Error::format(format!(
            "expected {} bytes for a {q}-bit code, got {}",
            q.div_ceil(8),
            bytes.len()
        )));
    }
    if !q.is_multiple_of(8) {
        let pad_mask = 0xFFu8 >> (q % 8);
        if bytes[bytes.len() - 1] & pad_mask != 0 {
            return Err(Error::format("non-zero pad bits"));
        }
    }
    BinaryCode::from_fn(q, |j| bytes[j / 8] & (0x80 >> (j % 8)) != 0)
}

pub fn write_centers<W: Write>(centers: &CenterSet, mut sink: W) -> Result<()> {
    sink.write_all(CENTERS_MAGIC)?;
    write_u32(&mut sink, centers.num_classes(), "class count")?;
    write_u32(&mut sink, centers.q(), "code length")?;
    for c in centers.iter() {
        sink.write_all(&pack_bytes(c))?;
    }
    sink.flush()?;
    Ok(())
}

pub fn read_centers<R: Read>(mut source: R) -> Result<CenterSet> {
    expect_magic(&mut source, CENTERS_MAGIC)?;
    let c = read_u32(&mut source, "class count")? as usize;
    let q = read_u32(&mut source, "code length")? as usize;
    if c == 0 {
        return Err(Error::format("class count is 0"));
    }
    if q == 0 {
        return Err(Error::format("code length is 0"));
    }
    let mut buf = vec![0u8; q.div_ceil(8)];
    let mut centers = Vec::with_capacity(c.min(1 << 16));
    for i in 0..c {
        read_exact(&mut source, &mut buf, &format!("center {i}"))?;
        centers.push(unpack_bytes(&buf, q)?);
    }
    expect_eof(&mut source)?;
    CenterSet::new(centers)
}

pub fn write_codes<W: Write>(db: &CodeDatabase, mut sink: W) -> Result<()> {
    sink.write_all(CODES_MAGIC)?;
    write_u32(&mut sink, db.len(), "record count")?;
    write_u32(&mut sink, db.q(), "code length")?;
    for (label, code) in db.iter() {
        sink.write_all(&label.to_le_bytes())?;
        sink.write_all(&pack_bytes(code))?;
    }
    sink.flush()?;
    Ok(())
}

/// Reads a code database; with `classes` given, every label must be below it.
pub fn read_codes<R: Read>(mut source: R, classes: Option<usize>) -> Result<CodeDatabase> {
    expect_magic(&mut source, CODES_MAGIC)?;
    let n = read_u32(&mut source, "record count")? as usize;
    let q = read_u32(&mut source, "code length")? as usize;
    if q == 0 {
        return Err(Error::format("code length is 0"));
    }
    let mut db = CodeDatabase::new(q)?;
    let mut buf = vec![0u8; q.div_ceil(8)];
    for i in 0..n {
        let label = read_u32(&mut source, &format!("label of record {i}"))?;
        read_exact(&mut source, &mut buf, &format!("record {i}"))?;
        db.push(label, unpack_bytes(&buf, q)?)?;
    }
    expect_eof(&mut source)?;
    if let Some(c) = classes {
        db.validate_labels(c)?;
    }
    Ok(db)
}

fn write_u32<W: Write>(sink: &mut W, value: usize, what: &str) -> Result<()> {
    let v = u32::try_from(value)
        .map_err(|_| Error::format(format!("{what} {value} does not fit in 32 bits")))?;
    sink.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn read_u32<R: Read>(source: &mut R, what: &str) -> Result<u32> {
    let mut b = [0u8; 4];
    read_exact(source, &mut b, what)?;
    Ok(u32::from_le_bytes(b))
}

fn read_exact<R: Read>(source: &mut R, buf: &mut [u8], what: &str) -> Result<()> {
    source.read_exact(buf).map_err(|e| match e.kind() {
        ErrorKind::UnexpectedEof => Error::format(format!("truncated stream while reading {what}")),
        _ => Error::Io(e),
    })
}

fn expect_magic<R: Read>(source: &mut R, magic: &[u8; 4]) -> Result<()> {
    let mut b = [0u8; 4];
    read_exact(source, &mut b, "magic")?;
    if &b != magic {
        return Err(Error::format(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&b),
            String::from_utf8_lossy(magic)
        )));
    }
    Ok(())
}

fn expect_eof<R: Read>(source: &mut R) -> Result<()> {
    let mut b = [0u8; 1];
    match source.read(&mut b)? {
        0 => Ok(()),
        _ => Err(Error::format("trailing bytes after last record")),
    }
}
