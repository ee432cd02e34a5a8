//! Binary prefix files.
//!
//! Layout: the magic bytes `SQZ1`, the prefix length as a little-endian
//! `u64`, then one signed byte per term.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::seqcore::SignSeq;

pub const MAGIC: &[u8; 4] = b"SQZ1";
pub const HEADER_LEN: usize = 12;

pub fn write_seq<W: Write>(mut out: W, seq: &SignSeq) -> Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&(seq.len() as u64).to_le_bytes())?;
    let bytes: Vec<u8> = seq.as_slice().iter().map(|&v| v as u8).collect();
    out.write_all(&bytes)?;
    out.flush()?;
    Ok(())
}

pub fn read_seq<R: Read>(mut input: R) -> Result<SignSeq> {
    let mut header = [0u8; HEADER_LEN];
    input
        .read_exact(&mut header)
        .map_err(|_| Error::Format("truncated header".into()))?;
    if &header[..4] != MAGIC {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected \"SQZ1\"",
            &header[..4]
        )));
    }
    let len = u64::from_le_bytes(header[4..].try_into().unwrap());
    let len = usize::try_from(len).map_err(|_| Error::Format("length overflows usize".into()))?;
    let mut body = Vec::new();
    input.read_to_end(&mut body)?;
    if body.len() != len {
        return Err(Error::Format(format!(
            "header declares {len} terms but body has {} bytes",
            body.len()
        )));
    }
    SignSeq::from_vec(body.into_iter().map(|b| b as i8).collect())
}

/// Write via a sibling temporary file and rename, so readers never see a
/// partially written prefix.
pub fn save(path: &Path, seq: &SignSeq) -> Result<()> {
    let tmp = tmp_path(path);
    {
        let file = File::create(&tmp)?;
        write_seq(BufWriter::new(file), seq)?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<SignSeq> {
    read_seq(BufReader::new(File::open(path)?))
}

pub(crate) fn tmp_path(path: &Path) -> std::path::PathBuf {
    let mut name = path
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".tmp");
    path.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn byte_layout() {
        let seq = SignSeq::from_vec(vec![1, -1, 0]).unwrap();
        let mut buf = Vec::new();
        write_seq(&mut buf, &seq).unwrap();
        assert_eq!(
            buf,
            [b'S', b'Q', b'Z', b'1', 3, 0, 0, 0, 0, 0, 0, 0, 1, 0xff, 0]
        );
    }

    #[test]
    fn rejects_corrupt_files() {
        assert!(matches!(read_seq(&b"SQZ"[..]), Err(Error::Format(_))));
        assert!(matches!(
            read_seq(&b"ABCD\x01\0\0\0\0\0\0\0\x01"[..]),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            read_seq(&b"SQZ1\x02\0\0\0\0\0\0\0\x01"[..]),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            read_seq(&b"SQZ1\x01\0\0\0\0\0\0\0\x05"[..]),
            Err(Error::InvalidSymbol(5))
        ));
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("z.sqz");
        let seq = SignSeq::from_vec(vec![0, 1, -1, 1]).unwrap();
        save(&path, &seq).unwrap();
        assert_eq!(fs::metadata(&path).unwrap().len(), 16);
        assert_eq!(load(&path).unwrap(), seq);
        assert!(!tmp_path(&path).exists());
    }

    proptest! {
        #[test]
        fn round_trip(v in prop::collection::vec(-1i8..=1, 1..500)) {
            let seq = SignSeq::from_vec(v).unwrap();
            let mut buf = Vec::new();
            write_seq(&mut buf, &seq).unwrap();
            prop_assert_eq!(buf.len(), HEADER_LEN + seq.len());
            prop_assert_eq!(read_seq(&buf[..]).unwrap(), seq);
        }
    }
}
