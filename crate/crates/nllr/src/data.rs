//! Dataset loading, generation, and batching.
//!
//! Supported sources: MNIST-style IDX image/label file pairs, CIFAR-10
//! binary batches, and seeded synthetic Gaussian blobs. Pixels are scaled to
//! `[0, 1]` by dividing by 255 with no further preprocessing; labels are
//! stored as integers and turned into one-hot rows only at the loss
//! boundary.
//!
//! On top of the canonical unsigned-byte IDX files, [`write_idx`] emits the
//! format's 64-bit float element type so generated datasets survive a write
//! and re-parse bit for bit.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::rng::{self, SplitMix64};
use crate::tensor::Tensor;

/// IDX magic words: `[0, 0, dtype, rank]` big-endian, dtype `0x08` for
/// unsigned byte and `0x0E` for 64-bit float.
const IDX_MAGIC_U8_IMAGES: u32 = 0x0000_0803;
const IDX_MAGIC_F64_IMAGES: u32 = 0x0000_0E03;
const IDX_MAGIC_U8_LABELS: u32 = 0x0000_0801;

/// Bytes per CIFAR-10 record: one label byte plus 32x32 pixels in three
/// channel-major planes.
const CIFAR_RECORD: usize = 3073;

const STREAM_BLOBS: u64 = 3;
const STREAM_SPLIT: u64 = 4;

/// A labeled classification dataset.
///
/// `features` is `[n, ...]` with one leading sample dimension; `labels` has
/// one entry per sample, each below `num_classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Tensor,
    labels: Vec<usize>,
    num_classes: usize,
}

/// One sample pulled out of a [`Dataset`].
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub x: Tensor,
    pub y: usize,
}

impl Dataset {
    pub fn new(features: Tensor, labels: Vec<usize>, num_classes: usize) -> Result<Dataset> {
        let n = features.shape()[0];
        if n == 0 || labels.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if labels.len() != n {
            return Err(Error::CountMismatch {
                images: n,
                labels: labels.len(),
            });
        }
        if num_classes < 2 {
            return Err(Error::InvalidConfig(format!(
                "a classification dataset needs at least 2 classes, got {num_classes}"
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&y| y >= num_classes) {
            return Err(Error::LabelOutOfRange {
                label: bad,
                max: num_classes - 1,
            });
        }
        Ok(Dataset {
            features,
            labels,
            num_classes,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn features(&self) -> &Tensor {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    /// Per-sample feature shape (without the leading sample dimension).
    pub fn sample_shape(&self) -> &[usize] {
        &self.features.shape()[1..]
    }

    /// Number of feature values per sample.
    pub fn sample_len(&self) -> usize {
        self.sample_shape().iter().product()
    }

    pub fn sample(&self, i: usize) -> Result<Sample> {
        if i >= self.len() {
            return Err(Error::InvalidConfig(format!(
                "sample index {i} out of range for dataset of {}",
                self.len()
            )));
        }
        let stride = self.sample_len();
        let x = Tensor::new(
            self.sample_shape().to_vec(),
            self.features.data()[i * stride..(i + 1) * stride].to_vec(),
        )?;
        Ok(Sample {
            x,
            y: self.labels[i],
        })
    }

    /// Copy of the dataset restricted to `indices`, in the given order.
    pub fn gather(&self, indices: &[usize]) -> Result<Dataset> {
        if indices.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let stride = self.sample_len();
        let mut data = Vec::with_capacity(indices.len() * stride);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.len() {
                return Err(Error::InvalidPermutation {
                    detail: format!("index {i} out of range for dataset of {}", self.len()),
                });
            }
            data.extend_from_slice(&self.features.data()[i * stride..(i + 1) * stride]);
            labels.push(self.labels[i]);
        }
        let mut shape = self.features.shape().to_vec();
        shape[0] = indices.len();
        Dataset::new(Tensor::new(shape, data)?, labels, self.num_classes)
    }

    /// Reinterpret each sample under a new per-sample shape of equal length,
    /// e.g. `[28, 28]` rows-columns into `[784]` for a dense model or
    /// `[1, 28, 28]` for a convolutional one.
    pub fn reshape_samples(&self, sample_shape: Vec<usize>) -> Result<Dataset> {
        let mut shape = vec![self.len()];
        shape.extend_from_slice(&sample_shape);
        Ok(Dataset {
            features: self.features.reshape(shape)?,
            labels: self.labels.clone(),
            num_classes: self.num_classes,
        })
    }

    /// Deterministic holdout split: a seeded shuffle, then the first
    /// `len - test_count` samples for training and the rest for testing.
    pub fn split_holdout(&self, test_count: usize, seed: u64) -> Result<(Dataset, Dataset)> {
        if test_count == 0 || test_count >= self.len() {
            return Err(Error::InvalidConfig(format!(
                "holdout of {test_count} samples impossible for dataset of {}",
                self.len()
            )));
        }
        let perm = rng::seeded_permutation(self.len(), rng::derive(seed, STREAM_SPLIT));
        let (train_idx, test_idx) = perm.split_at(self.len() - test_count);
        Ok((self.gather(train_idx)?, self.gather(test_idx)?))
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Reader { bytes, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::Truncated {
                needed: self.pos + n,
                found: self.bytes.len(),
            });
        }
        let slice = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn read_u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }
}

fn parse_idx_images(bytes: &[u8]) -> Result<Tensor> {
    let mut r = Reader::new(bytes);
    let magic = r.read_u32()?;
    if magic != IDX_MAGIC_U8_IMAGES && magic != IDX_MAGIC_F64_IMAGES {
        return Err(Error::BadMagic {
            expected: IDX_MAGIC_U8_IMAGES,
            found: magic,
        });
    }
    let n = r.read_u32()? as usize;
    let rows = r.read_u32()? as usize;
    let cols = r.read_u32()? as usize;
    if n == 0 || rows == 0 || cols == 0 {
        return Err(Error::EmptyDataset);
    }
    let count = n * rows * cols;
    let data = if magic == IDX_MAGIC_U8_IMAGES {
        r.take(count)?.iter().map(|&b| b as f64 / 255.0).collect()
    } else {
        r.take(count * 8)?
            .chunks_exact(8)
            .map(|c| f64::from_be_bytes([c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7]]))
            .collect()
    };
    Tensor::new(vec![n, rows, cols], data)
}

fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<usize>> {
    let mut r = Reader::new(bytes);
    let magic = r.read_u32()?;
    if magic != IDX_MAGIC_U8_LABELS {
        return Err(Error::BadMagic {
            expected: IDX_MAGIC_U8_LABELS,
            found: magic,
        });
    }
    let n = r.read_u32()? as usize;
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    Ok(r.take(n)?.iter().map(|&b| b as usize).collect())
}

/// Load an IDX image/label file pair as a 10-class dataset with features
/// shaped `[n, rows, cols]`.
///
/// Images carry magic `0x00000803` (unsigned bytes, scaled to `[0,1]` by
/// /255) or `0x00000E03` (64-bit floats taken verbatim, as written by
/// [`write_idx`]); labels carry magic `0x00000801`. Image and label counts
/// must agree.
pub fn load_idx(images_path: &Path, labels_path: &Path) -> Result<Dataset> {
    let features = parse_idx_images(&fs::read(images_path)?)?;
    let labels = parse_idx_labels(&fs::read(labels_path)?)?;
    if features.shape()[0] != labels.len() {
        return Err(Error::CountMismatch {
            images: features.shape()[0],
            labels: labels.len(),
        });
    }
    Dataset::new(features, labels, 10)
}

fn idx_header(magic: u32, dims: &[usize]) -> Vec<u8> {
    let mut bytes = magic.to_be_bytes().to_vec();
    for &d in dims {
        bytes.extend_from_slice(&(d as u32).to_be_bytes());
    }
    bytes
}

/// Write a dataset as an IDX pair using the 64-bit float element type for
/// images, so a re-parse reproduces the feature tensor exactly. Features
/// must be `[n, rows, cols]`; labels must fit in a byte.
pub fn write_idx(ds: &Dataset, images_path: &Path, labels_path: &Path) -> Result<()> {
    let shape = ds.features().shape();
    if shape.len() != 3 {
        return Err(Error::InvalidShape {
            op: "write_idx",
            shape: shape.to_vec(),
            detail: "IDX images need [n, rows, cols] features".into(),
        });
    }
    if let Some(&bad) = ds.labels().iter().find(|&&y| y > 255) {
        return Err(Error::LabelOutOfRange { label: bad, max: 255 });
    }
    let mut images = idx_header(IDX_MAGIC_F64_IMAGES, shape);
    for &v in ds.features().data() {
        images.extend_from_slice(&v.to_be_bytes());
    }
    let mut labels = idx_header(IDX_MAGIC_U8_LABELS, &[ds.len()]);
    labels.extend(ds.labels().iter().map(|&y| y as u8));
    fs::write(images_path, images)?;
    fs::write(labels_path, labels)?;
    Ok(())
}

/// Write a dataset as a canonical unsigned-byte IDX pair, quantizing each
/// feature to `round(v * 255)`. Requires features in `[0, 1]`; exact only
/// for values on the 1/255 grid, such as those read by [`load_idx`].
pub fn write_idx_u8(ds: &Dataset, images_path: &Path, labels_path: &Path) -> Result<()> {
    let shape = ds.features().shape();
    if shape.len() != 3 {
        return Err(Error::InvalidShape {
            op: "write_idx_u8",
            shape: shape.to_vec(),
            detail: "IDX images need [n, rows, cols] features".into(),
        });
    }
    if !ds.features().data().iter().all(|&v| (0.0..=1.0).contains(&v)) {
        return Err(Error::InvalidConfig(
            "byte quantization needs features in [0, 1]".into(),
        ));
    }
    if let Some(&bad) = ds.labels().iter().find(|&&y| y > 255) {
        return Err(Error::LabelOutOfRange { label: bad, max: 255 });
    }
    let mut images = idx_header(IDX_MAGIC_U8_IMAGES, shape);
    images.extend(ds.features().data().iter().map(|&v| (v * 255.0).round() as u8));
    let mut labels = idx_header(IDX_MAGIC_U8_LABELS, &[ds.len()]);
    labels.extend(ds.labels().iter().map(|&y| y as u8));
    fs::write(images_path, images)?;
    fs::write(labels_path, labels)?;
    Ok(())
}

/// Load a CIFAR-10 binary batch: consecutive 3073-byte records of one label
/// byte and 3072 channel-major RGB pixel bytes. Features come out as
/// `[n, 3, 32, 32]` scaled to `[0, 1]`.
pub fn load_cifar10_bin(path: &Path) -> Result<Dataset> {
    let bytes = fs::read(path)?;
    if bytes.len() % CIFAR_RECORD != 0 {
        return Err(Error::BadRecordSize {
            size: bytes.len(),
            record: CIFAR_RECORD,
        });
    }
    let n = bytes.len() / CIFAR_RECORD;
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    let mut data = Vec::with_capacity(n * 3072);
    let mut labels = Vec::with_capacity(n);
    for record in bytes.chunks_exact(CIFAR_RECORD) {
        let label = record[0] as usize;
        if label > 9 {
            return Err(Error::LabelOutOfRange { label, max: 9 });
        }
        labels.push(label);
        data.extend(record[1..].iter().map(|&b| b as f64 / 255.0));
    }
    Dataset::new(Tensor::new(vec![n, 3, 32, 32], data)?, labels, 10)
}

/// Seeded Gaussian blob dataset: class `k` draws `per_class` points from an
/// isotropic unit-variance Gaussian centered at `separation * k` along axis
/// `k mod dim`, in class-major order. Larger separations give easier
/// problems.
pub fn synth_blobs(
    seed: u64,
    num_classes: usize,
    per_class: usize,
    dim: usize,
    separation: f64,
) -> Result<Dataset> {
    if num_classes < 2 || per_class == 0 || dim == 0 {
        return Err(Error::InvalidConfig(format!(
            "blob generation needs classes >= 2, samples >= 1, dim >= 1; \
             got {num_classes}, {per_class}, {dim}"
        )));
    }
    if !(separation > 0.0 && separation.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "blob separation must be finite and positive, got {separation}"
        )));
    }
    let n = num_classes * per_class;
    let mut data = Vec::with_capacity(n * dim);
    let mut labels = Vec::with_capacity(n);
    let mut stream = SplitMix64::new(rng::derive(seed, STREAM_BLOBS));
    for class in 0..num_classes {
        let axis = class % dim;
        let offset = separation * class as f64;
        for _ in 0..per_class {
            let base = data.len();
            for _ in 0..dim {
                data.push(stream.next_normal());
            }
            data[base + axis] += offset;
            labels.push(class);
        }
    }
    Dataset::new(Tensor::new(vec![n, dim], data)?, labels, num_classes)
}

/// One-hot row for class `y` out of `classes`.
pub fn one_hot(y: usize, classes: usize) -> Result<Tensor> {
    if y >= classes {
        return Err(Error::ClassOutOfRange {
            index: y,
            classes,
        });
    }
    let mut t = Tensor::zeros(&[classes]);
    t.data_mut()[y] = 1.0;
    Ok(t)
}

/// Lazy minibatch iterator over a dataset in permutation order.
///
/// Yields `ceil(n / batch_size)` chunks of `(features, labels)` covering
/// every index exactly once; the final chunk may be short.
pub struct Batches<'a> {
    dataset: &'a Dataset,
    permutation: &'a [usize],
    batch_size: usize,
    pos: usize,
}

impl<'a> Iterator for Batches<'a> {
    type Item = (Tensor, Vec<usize>);

    fn next(&mut self) -> Option<Self::Item> {
        if self.pos >= self.permutation.len() {
            return None;
        }
        let end = (self.pos + self.batch_size).min(self.permutation.len());
        let chunk = &self.permutation[self.pos..end];
        self.pos = end;
        let ds = self
            .dataset
            .gather(chunk)
            .expect("permutation validated at construction");
        let Dataset {
            features, labels, ..
        } = ds;
        Some((features, labels))
    }
}

/// Validate `permutation` as a bijection on `[0, n)` and return the lazy
/// minibatch iterator.
pub fn batches<'a>(
    dataset: &'a Dataset,
    batch_size: usize,
    permutation: &'a [usize],
) -> Result<Batches<'a>> {
    if batch_size == 0 {
        return Err(Error::InvalidConfig("batch size must be >= 1".into()));
    }
    let n = dataset.len();
    if permutation.len() != n {
        return Err(Error::InvalidPermutation {
            detail: format!("length {} does not match dataset size {n}", permutation.len()),
        });
    }
    let mut seen = vec![false; n];
    for &i in permutation {
        if i >= n {
            return Err(Error::InvalidPermutation {
                detail: format!("index {i} out of range for dataset of {n}"),
            });
        }
        if seen[i] {
            return Err(Error::InvalidPermutation {
                detail: format!("index {i} appears more than once"),
            });
        }
        seen[i] = true;
    }
    Ok(Batches {
        dataset,
        permutation,
        batch_size,
        pos: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::path::PathBuf;

    fn idx_images_fixture() -> Vec<u8> {
        let mut bytes = idx_header(IDX_MAGIC_U8_IMAGES, &[2, 2, 2]);
        bytes.extend_from_slice(&[0, 255, 0, 255, 255, 0, 255, 0]);
        bytes
    }

    fn idx_labels_fixture(labels: &[u8]) -> Vec<u8> {
        let mut bytes = idx_header(IDX_MAGIC_U8_LABELS, &[labels.len()]);
        bytes.extend_from_slice(labels);
        bytes
    }

    fn cifar_fixture(records: &[(u8, u8)]) -> Vec<u8> {
        let mut bytes = Vec::new();
        for &(label, fill) in records {
            bytes.push(label);
            bytes.extend(std::iter::repeat_n(fill, 3072));
        }
        bytes
    }

    fn write_file(dir: &tempfile::TempDir, name: &str, bytes: &[u8]) -> PathBuf {
        let p = dir.path().join(name);
        std::fs::write(&p, bytes).unwrap();
        p
    }

    #[test]
    fn idx_fixture_parses_to_unit_interval_pixels() {
        let dir = tempfile::tempdir().unwrap();
        let images = write_file(&dir, "images", &idx_images_fixture());
        let labels = write_file(&dir, "labels", &idx_labels_fixture(&[3, 7]));
        let ds = load_idx(&images, &labels).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.num_classes(), 10);
        assert_eq!(ds.features().shape(), &[2, 2, 2]);
        assert_eq!(
            ds.features().data(),
            &[0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 0.0]
        );
        assert_eq!(ds.labels(), &[3, 7]);
    }

    #[test]
    fn idx_count_mismatch_is_a_distinct_error() {
        let dir = tempfile::tempdir().unwrap();
        let images = write_file(&dir, "images", &idx_images_fixture());
        let labels = write_file(&dir, "labels", &idx_labels_fixture(&[1, 2, 3]));
        assert!(matches!(
            load_idx(&images, &labels),
            Err(Error::CountMismatch { images: 2, labels: 3 })
        ));
    }

    #[test]
    fn idx_bad_magic_is_reported_with_both_values() {
        let dir = tempfile::tempdir().unwrap();
        let mut bad = idx_images_fixture();
        bad[2] = 0x09;
        let images = write_file(&dir, "images", &bad);
        let labels = write_file(&dir, "labels", &idx_labels_fixture(&[3, 7]));
        match load_idx(&images, &labels) {
            Err(Error::BadMagic { expected, found }) => {
                assert_eq!(expected, 0x0000_0803);
                assert_eq!(found, 0x0000_0903);
            }
            other => panic!("expected bad magic, got {other:?}"),
        }
    }

    #[test]
    fn every_idx_truncation_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let full_images = idx_images_fixture();
        let full_labels = idx_labels_fixture(&[3, 7]);
        let labels_ok = write_file(&dir, "labels-ok", &full_labels);
        let images_ok = write_file(&dir, "images-ok", &full_images);
        for cut in 0..full_images.len() {
            let images = write_file(&dir, "images", &full_images[..cut]);
            let err = load_idx(&images, &labels_ok).unwrap_err();
            assert!(
                matches!(err, Error::Truncated { .. } | Error::EmptyDataset),
                "images cut at {cut}: {err:?}"
            );
        }
        for cut in 0..full_labels.len() {
            let labels = write_file(&dir, "labels", &full_labels[..cut]);
            let err = load_idx(&images_ok, &labels).unwrap_err();
            assert!(
                matches!(err, Error::Truncated { .. } | Error::EmptyDataset),
                "labels cut at {cut}: {err:?}"
            );
        }
    }

    #[test]
    fn idx_u8_round_trip_reproduces_file_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let images = write_file(&dir, "images", &idx_images_fixture());
        let labels = write_file(&dir, "labels", &idx_labels_fixture(&[3, 7]));
        let ds = load_idx(&images, &labels).unwrap();
        let images2 = dir.path().join("images2");
        let labels2 = dir.path().join("labels2");
        write_idx_u8(&ds, &images2, &labels2).unwrap();
        assert_eq!(std::fs::read(&images2).unwrap(), idx_images_fixture());
        assert_eq!(std::fs::read(&labels2).unwrap(), idx_labels_fixture(&[3, 7]));
    }

    #[test]
    fn idx_f64_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let blobs = synth_blobs(11, 3, 4, 6, 2.5).unwrap();
        let as_images = blobs.reshape_samples(vec![2, 3]).unwrap();
        let images = dir.path().join("images");
        let labels = dir.path().join("labels");
        write_idx(&as_images, &images, &labels).unwrap();
        let back = load_idx(&images, &labels).unwrap();
        assert_eq!(back.features(), as_images.features());
        assert_eq!(back.labels(), as_images.labels());
    }

    #[test]
    fn every_f64_idx_truncation_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let blobs = synth_blobs(11, 2, 2, 4, 2.5).unwrap();
        let as_images = blobs.reshape_samples(vec![2, 2]).unwrap();
        let images = dir.path().join("images");
        let labels = dir.path().join("labels");
        write_idx(&as_images, &images, &labels).unwrap();
        let full = std::fs::read(&images).unwrap();
        for cut in 0..full.len() {
            let truncated = write_file(&dir, "truncated", &full[..cut]);
            let err = load_idx(&truncated, &labels).unwrap_err();
            assert!(
                matches!(err, Error::Truncated { .. } | Error::EmptyDataset),
                "cut at {cut}: {err:?}"
            );
        }
    }

    #[test]
    fn cifar_single_record_fixture() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_file(&dir, "batch.bin", &cifar_fixture(&[(5, 128)]));
        let ds = load_cifar10_bin(&path).unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.labels(), &[5]);
        assert_eq!(ds.features().shape(), &[1, 3, 32, 32]);
        assert!(ds
            .features()
            .data()
            .iter()
            .all(|&v| (v - 128.0 / 255.0).abs() < 1e-15));
    }

    #[test]
    fn cifar_two_records_and_bad_sizes() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_file(&dir, "batch.bin", &cifar_fixture(&[(0, 0), (9, 255)]));
        let ds = load_cifar10_bin(&path).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.labels(), &[0, 9]);

        let short = write_file(&dir, "short.bin", &vec![0u8; 3072]);
        assert!(matches!(
            load_cifar10_bin(&short),
            Err(Error::BadRecordSize { size: 3072, record: 3073 })
        ));
        let empty = write_file(&dir, "empty.bin", &[]);
        assert!(matches!(load_cifar10_bin(&empty), Err(Error::EmptyDataset)));
    }

    #[test]
    fn cifar_rejects_label_beyond_nine() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_file(&dir, "batch.bin", &cifar_fixture(&[(10, 1)]));
        assert!(matches!(
            load_cifar10_bin(&path),
            Err(Error::LabelOutOfRange { label: 10, max: 9 })
        ));
    }

    #[test]
    fn every_cifar_truncation_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let full = cifar_fixture(&[(5, 77)]);
        for cut in 0..full.len() {
            let path = write_file(&dir, "batch.bin", &full[..cut]);
            let err = load_cifar10_bin(&path).unwrap_err();
            assert!(
                matches!(err, Error::BadRecordSize { .. } | Error::EmptyDataset),
                "cut at {cut}: {err:?}"
            );
        }
    }

    #[test]
    fn blobs_are_seed_deterministic_with_exact_class_counts() {
        let a = synth_blobs(42, 3, 50, 4, 2.0).unwrap();
        let b = synth_blobs(42, 3, 50, 4, 2.0).unwrap();
        assert_eq!(a, b);
        let c = synth_blobs(43, 3, 50, 4, 2.0).unwrap();
        assert_ne!(a, c);
        for class in 0..3 {
            assert_eq!(a.labels().iter().filter(|&&y| y == class).count(), 50);
        }
        assert_eq!(a.features().shape(), &[150, 4]);
    }

    #[test]
    fn blob_parameters_are_validated() {
        assert!(synth_blobs(0, 1, 10, 2, 1.0).is_err());
        assert!(synth_blobs(0, 2, 0, 2, 1.0).is_err());
        assert!(synth_blobs(0, 2, 10, 0, 1.0).is_err());
        assert!(synth_blobs(0, 2, 10, 2, 0.0).is_err());
        assert!(synth_blobs(0, 2, 10, 2, f64::NAN).is_err());
        assert!(synth_blobs(0, 2, 10, 2, f64::INFINITY).is_err());
    }

    #[test]
    fn well_separated_blobs_classify_by_nearest_centroid() {
        let train = synth_blobs(7, 2, 200, 2, 10.0).unwrap();
        let holdout = synth_blobs(8, 2, 200, 2, 10.0).unwrap();
        let dim = 2;
        let mut centroids = [[0.0f64; 2]; 2];
        for i in 0..train.len() {
            let row = &train.features().data()[i * dim..(i + 1) * dim];
            let y = train.labels()[i];
            for d in 0..dim {
                centroids[y][d] += row[d] / 200.0;
            }
        }
        let mut correct = 0;
        for i in 0..holdout.len() {
            let row = &holdout.features().data()[i * dim..(i + 1) * dim];
            let dist = |c: &[f64; 2]| {
                (0..dim).map(|d| (row[d] - c[d]).powi(2)).sum::<f64>()
            };
            let pred = if dist(&centroids[0]) <= dist(&centroids[1]) { 0 } else { 1 };
            if pred == holdout.labels()[i] {
                correct += 1;
            }
        }
        let accuracy = correct as f64 / holdout.len() as f64;
        assert!(accuracy > 0.99, "nearest-centroid accuracy {accuracy}");
    }

    #[test]
    fn one_hot_examples() {
        let t = one_hot(3, 10).unwrap();
        let mut want = [0.0; 10];
        want[3] = 1.0;
        assert_eq!(t.data(), &want[..]);
        assert_eq!(one_hot(0, 2).unwrap().data(), &[1.0, 0.0]);
        assert!(matches!(
            one_hot(2, 2),
            Err(Error::ClassOutOfRange { index: 2, classes: 2 })
        ));
    }

    #[test]
    fn batches_chunk_sizes_and_order() {
        let ds = synth_blobs(1, 5, 1, 3, 1.0).unwrap();
        let perm: Vec<usize> = (0..5).collect();
        let sizes: Vec<usize> = batches(&ds, 2, &perm)
            .unwrap()
            .map(|(f, _)| f.shape()[0])
            .collect();
        assert_eq!(sizes, vec![2, 2, 1]);

        let whole: Vec<(Tensor, Vec<usize>)> = batches(&ds, 5, &perm).unwrap().collect();
        assert_eq!(whole.len(), 1);
        assert_eq!(&whole[0].0, ds.features());
        assert_eq!(whole[0].1, ds.labels());
    }

    #[test]
    fn batches_follow_the_permutation_exactly() {
        let ds = synth_blobs(2, 2, 3, 2, 1.0).unwrap();
        let perm = vec![4, 2, 0, 5, 1, 3];
        let mut labels_seen = Vec::new();
        for (_, labels) in batches(&ds, 4, &perm).unwrap() {
            labels_seen.extend(labels);
        }
        let want: Vec<usize> = perm.iter().map(|&i| ds.labels()[i]).collect();
        assert_eq!(labels_seen, want);
    }

    #[test]
    fn batches_reject_invalid_permutations() {
        let ds = synth_blobs(3, 2, 2, 2, 1.0).unwrap();
        assert!(matches!(
            batches(&ds, 2, &[0, 1, 2]),
            Err(Error::InvalidPermutation { .. })
        ));
        assert!(matches!(
            batches(&ds, 2, &[0, 1, 2, 9]),
            Err(Error::InvalidPermutation { .. })
        ));
        assert!(matches!(
            batches(&ds, 2, &[0, 1, 1, 3]),
            Err(Error::InvalidPermutation { .. })
        ));
        assert!(batches(&ds, 0, &[0, 1, 2, 3]).is_err());
    }

    #[test]
    fn holdout_split_is_deterministic_and_disjoint() {
        let ds = synth_blobs(5, 2, 20, 3, 2.0).unwrap();
        let (train_a, test_a) = ds.split_holdout(10, 99).unwrap();
        let (train_b, test_b) = ds.split_holdout(10, 99).unwrap();
        assert_eq!(train_a, train_b);
        assert_eq!(test_a, test_b);
        assert_eq!(train_a.len(), 30);
        assert_eq!(test_a.len(), 10);
        let (_, test_c) = ds.split_holdout(10, 100).unwrap();
        assert_ne!(test_a, test_c);
        assert!(ds.split_holdout(0, 1).is_err());
        assert!(ds.split_holdout(40, 1).is_err());
    }

    #[test]
    fn dataset_validates_labels_and_counts() {
        let features = Tensor::zeros(&[2, 3]);
        assert!(Dataset::new(features.clone(), vec![0, 5], 3).is_err());
        assert!(Dataset::new(features.clone(), vec![0], 3).is_err());
        assert!(Dataset::new(features, vec![0, 2], 3).is_ok());
    }

    proptest! {
        // Concatenating all chunks always reproduces the permutation, so
        // every sample is visited exactly once per epoch.
        #[test]
        fn batches_cover_every_sample_once(
            n in 1usize..40,
            batch in 1usize..12,
            seed in 0u64..500
        ) {
            let per_class = n.div_ceil(2);
            let ds = synth_blobs(seed, 2, per_class, 2, 1.0).unwrap();
            let perm = crate::rng::seeded_permutation(ds.len(), seed);
            let mut seen = Vec::new();
            for (f, labels) in batches(&ds, batch, &perm).unwrap() {
                prop_assert_eq!(f.shape()[0], labels.len());
                seen.extend(labels);
            }
            let want: Vec<usize> = perm.iter().map(|&i| ds.labels()[i]).collect();
            prop_assert_eq!(seen, want);
        }
    }
}
