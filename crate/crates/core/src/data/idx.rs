//! Reader and writer for the IDX binary image format (big-endian), as used
//! by the MNIST and Fashion-MNIST distributions.
//!
//! Images load as flattened rows scaled to `[0, 1]`; labels attach as
//! ground-truth cluster ids. Files must be uncompressed (`gunzip` the
//! originals first).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::graph::Dataset;

const IMAGES_MAGIC: u32 = 0x0000_0803; // 2051
const LABELS_MAGIC: u32 = 0x0000_0801; // 2049

fn read_u32_be(reader: &mut impl Read, path: &Path, offset: &mut usize) -> Result<u32> {
    let mut buf = [0u8; 4];
    reader.read_exact(&mut buf).map_err(|e| {
        Error::Format(format!(
            "{}: failed reading 4 bytes at offset {}: {e}",
            path.display(),
            offset
        ))
    })?;
    *offset += 4;
    Ok(u32::from_be_bytes(buf))
}

/// Loads an image/label file pair into a [`Dataset`]. The image count of
/// the two files must agree.
pub fn load_idx(images_path: &Path, labels_path: &Path) -> Result<Dataset> {
    let mut offset = 0usize;
    let file = File::open(images_path).map_err(|e| {
        Error::Format(format!("{}: {e}", images_path.display()))
    })?;
    let mut reader = BufReader::new(file);
    let magic = read_u32_be(&mut reader, images_path, &mut offset)?;
    if magic != IMAGES_MAGIC {
        return Err(Error::Format(format!(
            "{}: bad image magic 0x{magic:08x} at offset 0 (expected 0x{IMAGES_MAGIC:08x})",
            images_path.display()
        )));
    }
    let count = read_u32_be(&mut reader, images_path, &mut offset)? as usize;
    let rows = read_u32_be(&mut reader, images_path, &mut offset)? as usize;
    let cols = read_u32_be(&mut reader, images_path, &mut offset)? as usize;
    let pixels = rows * cols;
    if count == 0 || pixels == 0 {
        return Err(Error::Format(format!(
            "{}: degenerate dimensions {count} x {rows} x {cols}",
            images_path.display()
        )));
    }
    let mut raw = vec![0u8; count * pixels];
    reader.read_exact(&mut raw).map_err(|e| {
        Error::Format(format!(
            "{}: truncated image data at offset {} (wanted {} bytes): {e}",
            images_path.display(),
            offset,
            count * pixels
        ))
    })?;
    let mut trailing = [0u8; 1];
    if reader.read(&mut trailing).unwrap_or(0) != 0 {
        return Err(Error::Format(format!(
            "{}: trailing bytes after {} images",
            images_path.display(),
            count
        )));
    }

    let labels = load_idx_labels(labels_path)?;
    if labels.len() != count {
        return Err(Error::Format(format!(
            "image count {} ({}) does not match label count {} ({})",
            count,
            images_path.display(),
            labels.len(),
            labels_path.display()
        )));
    }

    let mut points = Array2::zeros((count, pixels));
    for (i, chunk) in raw.chunks_exact(pixels).enumerate() {
        for (j, &b) in chunk.iter().enumerate() {
            points[[i, j]] = b as f64 / 255.0;
        }
    }
    Dataset::with_labels(points, labels)
}

fn load_idx_labels(path: &Path) -> Result<Vec<usize>> {
    let mut offset = 0usize;
    let file = File::open(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    let mut reader = BufReader::new(file);
    let magic = read_u32_be(&mut reader, path, &mut offset)?;
    if magic != LABELS_MAGIC {
        return Err(Error::Format(format!(
            "{}: bad label magic 0x{magic:08x} at offset 0 (expected 0x{LABELS_MAGIC:08x})",
            path.display()
        )));
    }
    let count = read_u32_be(&mut reader, path, &mut offset)? as usize;
    let mut raw = vec![0u8; count];
    reader.read_exact(&mut raw).map_err(|e| {
        Error::Format(format!(
            "{}: truncated label data at offset {offset} (wanted {count} bytes): {e}",
            path.display()
        ))
    })?;
    Ok(raw.into_iter().map(usize::from).collect())
}

/// Writes grayscale images (`values` in 0..=255, row = flattened image) in
/// IDX format. The counterpart of [`load_idx`], mainly for test fixtures
/// and format tooling.
pub fn write_idx_images(path: &Path, images: &[Vec<u8>], rows: u32, cols: u32) -> Result<()> {
    let pixels = (rows * cols) as usize;
    if images.iter().any(|img| img.len() != pixels) {
        return Err(Error::Input(format!(
            "every image must have exactly {pixels} pixels"
        )));
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&IMAGES_MAGIC.to_be_bytes())?;
    w.write_all(&(images.len() as u32).to_be_bytes())?;
    w.write_all(&rows.to_be_bytes())?;
    w.write_all(&cols.to_be_bytes())?;
    for img in images {
        w.write_all(img)?;
    }
    w.flush()?;
    Ok(())
}

/// Label-file counterpart of [`write_idx_images`].
pub fn write_idx_labels(path: &Path, labels: &[u8]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&LABELS_MAGIC.to_be_bytes())?;
    w.write_all(&(labels.len() as u32).to_be_bytes())?;
    w.write_all(labels)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_small_fixture() {
        let dir = tempfile::tempdir().unwrap();
        let img_path = dir.path().join("imgs.idx3");
        let lab_path = dir.path().join("labs.idx1");
        let images = vec![
            vec![0u8, 128, 255, 3, 7, 9],
            vec![10, 20, 30, 40, 50, 60],
            vec![255, 255, 0, 0, 1, 2],
        ];
        write_idx_images(&img_path, &images, 2, 3).unwrap();
        write_idx_labels(&lab_path, &[0, 1, 0]).unwrap();

        let data = load_idx(&img_path, &lab_path).unwrap();
        assert_eq!(data.len(), 3);
        assert_eq!(data.dim(), 6);
        assert_eq!(data.labels().unwrap(), &[0, 1, 0]);
        for (i, img) in images.iter().enumerate() {
            for (j, &b) in img.iter().enumerate() {
                assert_eq!(data.points()[[i, j]], b as f64 / 255.0);
            }
        }
    }

    #[test]
    fn bad_magic_is_reported_with_offset() {
        let dir = tempfile::tempdir().unwrap();
        let img_path = dir.path().join("bad.idx3");
        std::fs::write(&img_path, 42u32.to_be_bytes()).unwrap();
        let lab_path = dir.path().join("labs.idx1");
        write_idx_labels(&lab_path, &[0]).unwrap();
        let err = load_idx(&img_path, &lab_path).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("magic"), "{msg}");
        assert!(msg.contains("offset 0"), "{msg}");
    }

    #[test]
    fn truncated_file_fails_rather_than_partially_loading() {
        let dir = tempfile::tempdir().unwrap();
        let img_path = dir.path().join("trunc.idx3");
        let lab_path = dir.path().join("labs.idx1");
        write_idx_images(&img_path, &[vec![1, 2, 3, 4]], 2, 2).unwrap();
        write_idx_labels(&lab_path, &[0, 1]).unwrap();
        // Claim 2 images but provide data for 1.
        let mut bytes = std::fs::read(&img_path).unwrap();
        bytes[4..8].copy_from_slice(&2u32.to_be_bytes());
        std::fs::write(&img_path, bytes).unwrap();
        let err = load_idx(&img_path, &lab_path).unwrap_err();
        assert!(err.to_string().contains("truncated"), "{err}");
    }

    #[test]
    fn count_mismatch_between_files() {
        let dir = tempfile::tempdir().unwrap();
        let img_path = dir.path().join("imgs.idx3");
        let lab_path = dir.path().join("labs.idx1");
        write_idx_images(&img_path, &[vec![1, 2], vec![3, 4]], 1, 2).unwrap();
        write_idx_labels(&lab_path, &[0, 1, 1]).unwrap();
        let err = load_idx(&img_path, &lab_path).unwrap_err();
        assert!(err.to_string().contains("does not match"), "{err}");
    }
}
