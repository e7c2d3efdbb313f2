//! Big-endian IDX files, optionally gzip-compressed.

use std::io::Read;
use std::path::Path;

use flate2::read::GzDecoder;

use super::{read_file, DatasetBundle, SourceFile};
use crate::encoders::Features;
use crate::error::{Error, Result};

const UNSIGNED_BYTE: u8 = 0x08;
const GZIP_MAGIC: [u8; 2] = [0x1f, 0x8b];

/// An unsigned-byte IDX tensor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxArray {
    pub dims: Vec<usize>,
    pub data: Vec<u8>,
}

fn format_error(path: &Path, message: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

fn decompress(path: &Path, raw: Vec<u8>) -> Result<Vec<u8>> {
    if !raw.starts_with(&GZIP_MAGIC) {
        return Ok(raw);
    }
    let mut out = Vec::new();
    GzDecoder::new(raw.as_slice())
        .read_to_end(&mut out)
        .map_err(|e| format_error(path, format!("gzip: {e}")))?;
    Ok(out)
}

/// Parses `bytes` as IDX; `path` is only used in error messages.
pub fn parse_idx(path: &Path, bytes: &[u8]) -> Result<IdxArray> {
    if bytes.len() < 4 || bytes[0] != 0 || bytes[1] != 0 {
        return Err(format_error(path, "bad IDX magic number"));
    }
    if bytes[2] != UNSIGNED_BYTE {
        return Err(format_error(
            path,
            format!("unsupported IDX element type 0x{:02x}", bytes[2]),
        ));
    }
    let rank = usize::from(bytes[3]);
    let header = 4 + 4 * rank;
    if rank == 0 || bytes.len() < header {
        return Err(format_error(path, "truncated IDX header"));
    }
    let dims: Vec<usize> = bytes[4..header]
        .chunks_exact(4)
        .map(|c| u32::from_be_bytes([c[0], c[1], c[2], c[3]]) as usize)
        .collect();
    let expected: usize = dims.iter().product();
    let body = &bytes[header..];
    if body.len() != expected {
        return Err(format_error(
            path,
            format!(
                "header declares {expected} bytes of data ({dims:?}) but file holds {}",
                body.len()
            ),
        ));
    }
    Ok(IdxArray {
        dims,
        data: body.to_vec(),
    })
}

/// Reads an IDX file and returns it with its provenance record
/// (the digest is of the file as stored, before decompression).
pub fn read_idx(path: &Path) -> Result<(IdxArray, SourceFile)> {
    let raw = read_file(path)?;
    let source = SourceFile::from_bytes(path, &raw);
    let array = parse_idx(path, &decompress(path, raw)?)?;
    Ok((array, source))
}

/// Pixels scaled to `[0, 1]` and thresholded at 0.5.
pub fn binarize_pixel(byte: u8) -> u8 {
    u8::from(f64::from(byte) / 255.0 >= 0.5)
}

/// Loads MNIST-format image and label files into binary 784-pixel features.
pub fn ingest_mnist(images: &Path, labels: &Path) -> Result<DatasetBundle> {
    let (img, img_src) = read_idx(images)?;
    let (lab, lab_src) = read_idx(labels)?;
    if img.dims.len() != 3 {
        return Err(format_error(images, "image file must have rank 3"));
    }
    if lab.dims.len() != 1 {
        return Err(format_error(labels, "label file must have rank 1"));
    }
    if img.dims[0] != lab.dims[0] {
        return Err(format_error(
            labels,
            format!("{} labels for {} images", lab.dims[0], img.dims[0]),
        ));
    }
    let pixels = img.dims[1] * img.dims[2];
    let features = img
        .data
        .chunks_exact(pixels.max(1))
        .map(|row| Features::Binary(row.iter().map(|&b| binarize_pixel(b)).collect()))
        .collect();
    let classes = lab.data.iter().copied().max().map_or(0, |m| usize::from(m) + 1).max(10);
    DatasetBundle::new(
        "mnist",
        features,
        lab.data.iter().map(|&y| usize::from(y)).collect(),
        (0..classes).map(|d| d.to_string()).collect(),
        vec![img_src, lab_src],
    )
}

#[cfg(test)]
mod tests {
    use std::io::Write;

    use flate2::write::GzEncoder;
    use flate2::Compression;

    use super::*;

    fn idx(kind: u8, dims: &[u32], data: &[u8]) -> Vec<u8> {
        let mut out = vec![0, 0, 0x08, dims.len() as u8];
        for d in dims {
            out.extend_from_slice(&d.to_be_bytes());
        }
        out[2] = kind;
        out.extend_from_slice(data);
        out
    }

    fn write(dir: &tempfile::TempDir, name: &str, bytes: &[u8]) -> std::path::PathBuf {
        let p = dir.path().join(name);
        std::fs::write(&p, bytes).unwrap();
        p
    }

    #[test]
    fn pixel_threshold() {
        assert_eq!(binarize_pixel(0), 0);
        assert_eq!(binarize_pixel(127), 0);
        assert_eq!(binarize_pixel(128), 1);
        assert_eq!(binarize_pixel(255), 1);
    }

    #[test]
    fn reads_plain_and_gzip() {
        let dir = tempfile::tempdir().unwrap();
        let mut px = vec![0u8; 8];
        px[5] = 200;
        let images = idx(0x08, &[2, 2, 2], &px);
        let labels = idx(0x08, &[2], &[3, 7]);
        let mut gz = GzEncoder::new(Vec::new(), Compression::default());
        gz.write_all(&images).unwrap();
        let gz_images = write(&dir, "img.gz", &gz.finish().unwrap());
        let plain_labels = write(&dir, "lab", &labels);
        let b = ingest_mnist(&gz_images, &plain_labels).unwrap();
        assert_eq!(b.features[0], Features::Binary(vec![0; 4]));
        assert_eq!(b.features[1], Features::Binary(vec![0, 1, 0, 0]));
        assert_eq!(b.labels, vec![3, 7]);
        assert_eq!(b.classes(), 10);
        assert_eq!(b.provenance.len(), 2);
    }

    #[test]
    fn validation_errors() {
        let dir = tempfile::tempdir().unwrap();
        let bad_magic = write(&dir, "m", &[1, 2, 3, 4, 5]);
        assert!(read_idx(&bad_magic).is_err());
        let short = write(&dir, "s", &idx(0x08, &[3, 2, 2], &[0; 11]));
        let err = read_idx(&short).unwrap_err().to_string();
        assert!(err.contains("declares 12"), "{err}");
        let wrong_type = write(&dir, "t", &idx(0x0d, &[1], &[0; 4]));
        assert!(read_idx(&wrong_type).is_err());
        let images = write(&dir, "i", &idx(0x08, &[2, 1, 1], &[0, 0]));
        let labels = write(&dir, "l", &idx(0x08, &[3], &[0, 1, 2]));
        assert!(ingest_mnist(&images, &labels).is_err());
        assert!(read_idx(&dir.path().join("missing")).is_err());
    }
}
