//! Voxel/image/dataset types, coordinate normalization, lattice
//! downsampling, and the on-disk CSV + manifest format.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// One subject's image. Coordinates are kept both as given (`raw_coords`)
/// and normalized so the bounding box maps onto [-1,1]^2; feature entries
/// use NaN for missing values.
#[derive(Debug, Clone)]
pub struct VoxelImage {
    pub image_id: String,
    raw_coords: Vec<[f64; 2]>,
    coords: Vec<[f64; 2]>,
    region: Vec<u8>,
    features: Vec<Vec<f64>>,
    labels: Option<Vec<bool>>,
}

impl VoxelImage {
    pub fn new(
        image_id: impl Into<String>,
        raw_coords: Vec<[f64; 2]>,
        region: Vec<u8>,
        features: Vec<Vec<f64>>,
        labels: Option<Vec<bool>>,
    ) -> Result<Self> {
        let image_id = image_id.into();
        let n = raw_coords.len();
        if n == 0 {
            return Err(Error::InvalidInput(format!(
                "image {image_id}: at least one voxel required"
            )));
        }
        if region.len() != n || features.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "image {image_id}: per-voxel lists disagree (coords {n}, region {}, features {})",
                region.len(),
                features.len()
            )));
        }
        if let Some(ref l) = labels {
            if l.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "image {image_id}: labels length {} != {n}",
                    l.len()
                )));
            }
        }
        let d = features[0].len();
        if d == 0 {
            return Err(Error::InvalidInput(format!(
                "image {image_id}: feature dimension must be >= 1"
            )));
        }
        for (j, f) in features.iter().enumerate() {
            if f.len() != d {
                return Err(Error::DimensionMismatch(format!(
                    "image {image_id}: voxel {j} has {} features, expected {d}",
                    f.len()
                )));
            }
            for &v in f {
                if v.is_infinite() {
                    return Err(Error::InvalidInput(format!(
                        "image {image_id}: voxel {j} has an infinite feature value"
                    )));
                }
            }
        }
        for (j, &r) in region.iter().enumerate() {
            if r > 1 {
                return Err(Error::InvalidInput(format!(
                    "image {image_id}: voxel {j} region flag must be 0 or 1, got {r}"
                )));
            }
        }
        let coords = normalize_coords(&raw_coords)?;
        check_distinct(&coords)?;
        Ok(Self {
            image_id,
            raw_coords,
            coords,
            region,
            features,
            labels,
        })
    }

    pub fn n_voxels(&self) -> usize {
        self.coords.len()
    }

    pub fn dim(&self) -> usize {
        self.features[0].len()
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    pub fn raw_coords(&self) -> &[[f64; 2]] {
        &self.raw_coords
    }

    pub fn region(&self) -> &[u8] {
        &self.region
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn labels(&self) -> Option<&[bool]> {
        self.labels.as_deref()
    }

    /// True when voxel j has no missing feature entries.
    pub fn is_complete(&self, j: usize) -> bool {
        self.features[j].iter().all(|v| !v.is_nan())
    }

    /// Indices of observed (non-missing) feature entries for voxel j.
    pub fn observed_indices(&self, j: usize) -> Vec<usize> {
        (0..self.dim())
            .filter(|&k| !self.features[j][k].is_nan())
            .collect()
    }

    /// Drop labels (e.g. to treat an image as a prediction target).
    pub fn without_labels(mut self) -> Self {
        self.labels = None;
        self
    }

    /// Keep voxels on every third row and every third column of the raw
    /// lattice, then re-normalize the surviving coordinates.
    pub fn downsample_third(&self) -> Result<VoxelImage> {
        let lat = lattice_indices(&self.raw_coords)?;
        if lat.n_rows < 2 {
            return Err(Error::NonLattice(format!(
                "image {}: no second distinct row to establish a lattice",
                self.image_id
            )));
        }
        if lat.n_cols < 2 {
            return Err(Error::NonLattice(format!(
                "image {}: no second distinct column to establish a lattice",
                self.image_id
            )));
        }
        let keep: Vec<usize> = (0..self.n_voxels())
            .filter(|&j| lat.rc[j].0 % 3 == 0 && lat.rc[j].1 % 3 == 0)
            .collect();
        if keep.is_empty() {
            return Err(Error::InvalidInput(format!(
                "image {}: downsampling left no voxels",
                self.image_id
            )));
        }
        VoxelImage::new(
            self.image_id.clone(),
            keep.iter().map(|&j| self.raw_coords[j]).collect(),
            keep.iter().map(|&j| self.region[j]).collect(),
            keep.iter().map(|&j| self.features[j].clone()).collect(),
            self.labels
                .as_ref()
                .map(|l| keep.iter().map(|&j| l[j]).collect()),
        )
    }
}

/// Affine per-axis map sending the bounding box onto [-1,1]^2. The box
/// center goes to the origin and extrema land exactly on +-1.
pub fn normalize_coords(raw: &[[f64; 2]]) -> Result<Vec<[f64; 2]>> {
    if raw.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "normalization needs at least 2 distinct points, got {}",
            raw.len()
        )));
    }
    for (j, c) in raw.iter().enumerate() {
        if !c[0].is_finite() || !c[1].is_finite() {
            return Err(Error::InvalidInput(format!(
                "coordinate {j} is not finite: ({}, {})",
                c[0], c[1]
            )));
        }
    }
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for c in raw {
        for a in 0..2 {
            lo[a] = lo[a].min(c[a]);
            hi[a] = hi[a].max(c[a]);
        }
    }
    for a in 0..2 {
        if hi[a] <= lo[a] {
            return Err(Error::DegenerateAxis {
                axis: if a == 0 { 'x' } else { 'y' },
                n: raw.len(),
            });
        }
    }
    let out = raw
        .iter()
        .map(|c| {
            let mut p = [0.0; 2];
            for a in 0..2 {
                let v = 2.0 * (c[a] - lo[a]) / (hi[a] - lo[a]) - 1.0;
                p[a] = v.clamp(-1.0, 1.0);
            }
            p
        })
        .collect();
    Ok(out)
}

fn check_distinct(coords: &[[f64; 2]]) -> Result<()> {
    let mut idx: Vec<usize> = (0..coords.len()).collect();
    idx.sort_by(|&a, &b| {
        coords[a][0]
            .total_cmp(&coords[b][0])
            .then(coords[a][1].total_cmp(&coords[b][1]))
    });
    for w in idx.windows(2) {
        if coords[w[0]] == coords[w[1]] {
            let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
            return Err(Error::DuplicateCoords(a, b));
        }
    }
    Ok(())
}

/// Row/column assignment of voxels on a regular lattice.
pub struct LatticeIndex {
    pub rc: Vec<(usize, usize)>,
    pub n_rows: usize,
    pub n_cols: usize,
    pub step: [f64; 2],
    pub origin: [f64; 2],
}

/// Recover lattice row/column indices from raw coordinates. Axis values
/// must sit on a uniform grid (holes allowed); anything else is rejected.
pub fn lattice_indices(raw: &[[f64; 2]]) -> Result<LatticeIndex> {
    let axis_grid = |axis: usize| -> Result<(f64, f64, usize)> {
        let mut vals: Vec<f64> = raw.iter().map(|c| c[axis]).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        let span = vals[vals.len() - 1] - vals[0];
        if vals.len() < 2 || span <= 0.0 {
            // Single distinct value: one row/column, step undefined.
            return Ok((vals[0], 1.0, 1));
        }
        let tol = 1e-9 * span.max(1.0);
        // Merge near-identical values, then find the basic step.
        let mut centers = vec![vals[0]];
        for &v in &vals[1..] {
            if v - centers[centers.len() - 1] > tol {
                centers.push(v);
            }
        }
        if centers.len() == 1 {
            return Ok((centers[0], 1.0, 1));
        }
        let mut step = f64::INFINITY;
        for w in centers.windows(2) {
            step = step.min(w[1] - w[0]);
        }
        for &c in &centers {
            let k = (c - centers[0]) / step;
            if (k - k.round()).abs() > 1e-6 {
                return Err(Error::NonLattice(format!(
                    "axis {} value {c} is not an integer multiple of the grid step {step}",
                    if axis == 0 { "x" } else { "y" }
                )));
            }
        }
        let n = ((centers[centers.len() - 1] - centers[0]) / step).round() as usize + 1;
        Ok((centers[0], step, n))
    };

    let (x0, sx, n_cols) = axis_grid(0)?;
    let (y0, sy, n_rows) = axis_grid(1)?;
    let rc = raw
        .iter()
        .map(|c| {
            let col = if n_cols == 1 {
                0
            } else {
                ((c[0] - x0) / sx).round() as usize
            };
            let row = if n_rows == 1 {
                0
            } else {
                ((c[1] - y0) / sy).round() as usize
            };
            (row, col)
        })
        .collect();
    Ok(LatticeIndex {
        rc,
        n_rows,
        n_cols,
        step: [sx, sy],
        origin: [x0, y0],
    })
}

/// A collection of images sharing one feature space.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub images: Vec<VoxelImage>,
    pub feature_names: Vec<String>,
}

impl Dataset {
    pub fn new(images: Vec<VoxelImage>, feature_names: Vec<String>) -> Result<Self> {
        let ds = Self {
            images,
            feature_names,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        if self.images.is_empty() {
            return Err(Error::InvalidInput("dataset has no images".into()));
        }
        if self.feature_names.is_empty() {
            return Err(Error::InvalidInput(
                "dataset needs at least one feature name".into(),
            ));
        }
        let mut seen = BTreeSet::new();
        for img in &self.images {
            if !seen.insert(img.image_id.clone()) {
                return Err(Error::InvalidInput(format!(
                    "duplicate image_id {:?}",
                    img.image_id
                )));
            }
            if img.dim() != self.feature_names.len() {
                return Err(Error::DimensionMismatch(format!(
                    "image {} has d={} but dataset declares {} features",
                    img.image_id,
                    img.dim(),
                    self.feature_names.len()
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }
}

#[derive(Serialize, Deserialize)]
struct ManifestImage {
    id: String,
    file: String,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    format: String,
    version: u32,
    feature_names: Vec<String>,
    images: Vec<ManifestImage>,
}

const MANIFEST_FORMAT: &str = "spatial-probit-dataset";

/// >= 17 significant digits: f64 round-trips bit-exactly through this.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Write one CSV per image plus a `manifest.toml` into `dir`.
pub fn write_dataset(ds: &Dataset, dir: &Path) -> Result<()> {
    ds.validate()?;
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut entries = Vec::new();
    for (idx, img) in ds.images.iter().enumerate() {
        let safe: String = img
            .image_id
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
            .collect();
        let file = format!("{idx:03}_{safe}.csv");
        let path = dir.join(&file);
        let mut out = String::new();
        out.push_str("x_raw,y_raw,region,label");
        for name in &ds.feature_names {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for j in 0..img.n_voxels() {
            let c = img.raw_coords[j];
            out.push_str(&fmt_f64(c[0]));
            out.push(',');
            out.push_str(&fmt_f64(c[1]));
            out.push(',');
            out.push_str(&img.region[j].to_string());
            out.push(',');
            if let Some(l) = &img.labels {
                out.push_str(if l[j] { "1" } else { "0" });
            }
            for &v in &img.features[j] {
                out.push(',');
                if !v.is_nan() {
                    out.push_str(&fmt_f64(v));
                }
            }
            out.push('\n');
        }
        let mut f = fs::File::create(&path).map_err(|e| io_err(&path, e))?;
        f.write_all(out.as_bytes()).map_err(|e| io_err(&path, e))?;
        entries.push(ManifestImage {
            id: img.image_id.clone(),
            file,
        });
    }
    let manifest = Manifest {
        format: MANIFEST_FORMAT.into(),
        version: 1,
        feature_names: ds.feature_names.clone(),
        images: entries,
    };
    let text = toml::to_string_pretty(&manifest).expect("manifest serializes");
    let mpath = dir.join("manifest.toml");
    fs::write(&mpath, text).map_err(|e| io_err(&mpath, e))?;
    Ok(())
}

/// Load a dataset from a manifest file (or a directory containing
/// `manifest.toml`).
pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let manifest_path = if path.is_dir() {
        path.join("manifest.toml")
    } else {
        path.to_path_buf()
    };
    let text = fs::read_to_string(&manifest_path).map_err(|e| io_err(&manifest_path, e))?;
    let manifest: Manifest = toml::from_str(&text).map_err(|e| Error::Parse {
        path: manifest_path.display().to_string(),
        msg: e.to_string(),
    })?;
    if manifest.format != MANIFEST_FORMAT {
        return Err(Error::Parse {
            path: manifest_path.display().to_string(),
            msg: format!("unexpected format tag {:?}", manifest.format),
        });
    }
    let dir = manifest_path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let d = manifest.feature_names.len();
    let mut images = Vec::with_capacity(manifest.images.len());
    for entry in &manifest.images {
        let path = dir.join(&entry.file);
        images.push(load_image_csv(&path, &entry.id, d)?);
    }
    Dataset::new(images, manifest.feature_names)
}

fn load_image_csv(path: &Path, id: &str, d: usize) -> Result<VoxelImage> {
    let pstr = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::Parse {
        path: pstr.clone(),
        msg: "empty file".into(),
    })?;
    let expected_cols = 4 + d;
    let header_cols = header.split(',').count();
    if header_cols != expected_cols {
        return Err(Error::Parse {
            path: pstr.clone(),
            msg: format!("header has {header_cols} columns, expected {expected_cols}"),
        });
    }

    let mut raw = Vec::new();
    let mut region = Vec::new();
    let mut features = Vec::new();
    let mut labels: Vec<Option<bool>> = Vec::new();
    for (lineno, line) in lines {
        if line.is_empty() {
            continue;
        }
        let row = lineno + 1; // 1-based, matching editors
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != expected_cols {
            return Err(Error::MalformedRow {
                path: pstr.clone(),
                row,
                msg: format!("{} fields, expected {expected_cols}", cells.len()),
            });
        }
        let parse_f = |cell: &str, what: &str| -> Result<f64> {
            cell.trim()
                .parse::<f64>()
                .map_err(|_| Error::MalformedRow {
                    path: pstr.clone(),
                    row,
                    msg: format!("cannot parse {what} from {cell:?}"),
                })
        };
        let x = parse_f(cells[0], "x_raw")?;
        let y = parse_f(cells[1], "y_raw")?;
        let r: u8 = cells[2].trim().parse().map_err(|_| Error::MalformedRow {
            path: pstr.clone(),
            row,
            msg: format!("region must be 0 or 1, got {:?}", cells[2]),
        })?;
        let label = match cells[3].trim() {
            "" => None,
            "0" => Some(false),
            "1" => Some(true),
            other => {
                return Err(Error::MalformedRow {
                    path: pstr.clone(),
                    row,
                    msg: format!("label must be empty, 0 or 1, got {other:?}"),
                })
            }
        };
        let mut f = Vec::with_capacity(d);
        for k in 0..d {
            let cell = cells[4 + k].trim();
            if cell.is_empty() {
                f.push(f64::NAN);
            } else {
                f.push(parse_f(cell, "feature")?);
            }
        }
        raw.push([x, y]);
        region.push(r);
        features.push(f);
        labels.push(label);
    }
    let n_labeled = labels.iter().filter(|l| l.is_some()).count();
    let labels = if n_labeled == 0 {
        None
    } else if n_labeled == labels.len() {
        Some(labels.into_iter().map(|l| l.unwrap()).collect())
    } else {
        return Err(Error::Parse {
            path: pstr,
            msg: format!(
                "image {id}: {n_labeled} of {} voxels labeled; label all voxels or none",
                labels.len()
            ),
        });
    };
    VoxelImage::new(id, raw, region, features, labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_image(id: &str, nx: usize, ny: usize) -> VoxelImage {
        let mut raw = Vec::new();
        let mut region = Vec::new();
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for iy in 0..ny {
            for ix in 0..nx {
                raw.push([ix as f64, iy as f64 * 2.0]);
                region.push(u8::from(ix >= nx / 2));
                features.push(vec![ix as f64, iy as f64]);
                labels.push((ix + iy) % 3 == 0);
            }
        }
        VoxelImage::new(id, raw, region, features, Some(labels)).unwrap()
    }

    #[test]
    fn normalize_corner_symmetry() {
        let out =
            normalize_coords(&[[0.0, 0.0], [10.0, 0.0], [0.0, 10.0], [10.0, 10.0]]).unwrap();
        assert_eq!(
            out,
            vec![[-1.0, -1.0], [1.0, -1.0], [-1.0, 1.0], [1.0, 1.0]]
        );
    }

    #[test]
    fn normalize_affine_identity() {
        let out = normalize_coords(&[
            [2.0, 5.0],
            [4.0, 5.0],
            [6.0, 5.0],
            [2.0, 9.0],
            [6.0, 9.0],
        ])
        .unwrap();
        assert_eq!(out[0], [-1.0, -1.0]);
        assert_eq!(out[1], [0.0, -1.0]);
        assert_eq!(out[2], [1.0, -1.0]);
        assert_eq!(out[3], [-1.0, 1.0]);
        assert_eq!(out[4], [1.0, 1.0]);
    }

    #[test]
    fn normalize_random_cloud_touches_box() {
        use rand::Rng;
        let mut rng = crate::rng::derive_rng(1, &[0xDA]);
        let raw: Vec<[f64; 2]> = (0..50)
            .map(|_| [rng.gen_range(3.0..40.0), rng.gen_range(-7.0..2.0)])
            .collect();
        let out = normalize_coords(&raw).unwrap();
        for a in 0..2 {
            let lo = out.iter().map(|c| c[a]).fold(f64::INFINITY, f64::min);
            let hi = out.iter().map(|c| c[a]).fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(lo, -1.0);
            assert_eq!(hi, 1.0);
            assert!(out.iter().all(|c| (-1.0..=1.0).contains(&c[a])));
        }
    }

    #[test]
    fn normalize_idempotent_within_tolerance() {
        use rand::Rng;
        let mut rng = crate::rng::derive_rng(2, &[0xDB]);
        let raw: Vec<[f64; 2]> = (0..30)
            .map(|_| [rng.gen_range(0.0..100.0), rng.gen_range(0.0..5.0)])
            .collect();
        let once = normalize_coords(&raw).unwrap();
        let twice = normalize_coords(&once).unwrap();
        for (a, b) in once.iter().zip(&twice) {
            assert!((a[0] - b[0]).abs() < 1e-12);
            assert!((a[1] - b[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn normalize_rejects_degenerate_axis() {
        let err = normalize_coords(&[[1.0, 2.0], [1.0, 5.0]]).unwrap_err();
        assert!(matches!(err, Error::DegenerateAxis { axis: 'x', .. }));
        assert!(normalize_coords(&[[1.0, 2.0]]).is_err());
    }

    #[test]
    fn downsample_9x9_to_3x3() {
        let img = grid_image("a", 9, 9);
        let down = img.downsample_third().unwrap();
        assert_eq!(down.n_voxels(), 9);
        // Retained voxels keep region and label bit-for-bit.
        let kept: Vec<usize> = (0..81)
            .filter(|j| (j % 9) % 3 == 0 && (j / 9) % 3 == 0)
            .collect();
        for (new_j, &old_j) in kept.iter().enumerate() {
            assert_eq!(down.region()[new_j], img.region()[old_j]);
            assert_eq!(down.labels().unwrap()[new_j], img.labels().unwrap()[old_j]);
            assert_eq!(down.features()[new_j], img.features()[old_j]);
        }
    }

    #[test]
    fn downsample_rejects_degenerate_and_irregular() {
        let err = VoxelImage::new(
            "one",
            vec![[0.0, 0.0], [1.0, 1.0]],
            vec![0, 1],
            vec![vec![1.0], vec![2.0]],
            None,
        )
        .unwrap()
        .downsample_third();
        // 2x2 lattice downsamples to a single voxel -> renormalization fails.
        assert!(err.is_err());

        let irregular = VoxelImage::new(
            "irr",
            vec![[0.0, 0.0], [1.0, 0.0], [2.7182, 0.0], [0.0, 1.0], [1.0, 1.0]],
            vec![0; 5],
            vec![vec![0.0]; 5],
            None,
        )
        .unwrap();
        assert!(matches!(
            irregular.downsample_third().unwrap_err(),
            Error::NonLattice(_)
        ));
    }

    #[test]
    fn roundtrip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let mut img1 = grid_image("img-α", 4, 5);
        // Punch in a missing value and odd floats.
        img1.features[3][1] = f64::NAN;
        img1.features[2][0] = 1.0 / 3.0;
        let img2 = grid_image("img2", 5, 4).without_labels();
        let ds = Dataset::new(vec![img1, img2], vec!["fa".into(), "fb".into()]).unwrap();
        write_dataset(&ds, dir.path()).unwrap();
        let back = load_dataset(dir.path()).unwrap();
        assert_eq!(back.feature_names, ds.feature_names);
        assert_eq!(back.images.len(), 2);
        for (a, b) in ds.images.iter().zip(&back.images) {
            assert_eq!(a.image_id, b.image_id);
            assert_eq!(a.region(), b.region());
            assert_eq!(a.labels(), b.labels());
            for j in 0..a.n_voxels() {
                for ax in 0..2 {
                    assert_eq!(
                        a.raw_coords()[j][ax].to_bits(),
                        b.raw_coords()[j][ax].to_bits()
                    );
                    assert_eq!(a.coords()[j][ax].to_bits(), b.coords()[j][ax].to_bits());
                }
                for k in 0..a.dim() {
                    let (x, y) = (a.features()[j][k], b.features()[j][k]);
                    assert!(x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()));
                }
            }
        }
    }

    #[test]
    fn missing_feature_cell_keeps_voxel() {
        let dir = tempfile::tempdir().unwrap();
        let csv = "x_raw,y_raw,region,label,f1,f2,f3,f4\n\
                   0,0,1,1,0.5,,0.25,0.125\n\
                   1,1,0,0,1,2,3,4\n";
        fs::write(dir.path().join("img.csv"), csv).unwrap();
        fs::write(
            dir.path().join("manifest.toml"),
            "format = \"spatial-probit-dataset\"\nversion = 1\n\
             feature_names = [\"f1\",\"f2\",\"f3\",\"f4\"]\n\
             [[images]]\nid = \"img\"\nfile = \"img.csv\"\n",
        )
        .unwrap();
        let ds = load_dataset(dir.path()).unwrap();
        let img = &ds.images[0];
        assert_eq!(img.n_voxels(), 2);
        assert!(img.features()[0][1].is_nan());
        assert!(!img.is_complete(0));
        assert!(img.is_complete(1));
        assert_eq!(img.observed_indices(0), vec![0, 2, 3]);
    }

    #[test]
    fn extra_field_names_offending_row() {
        let dir = tempfile::tempdir().unwrap();
        let csv = "x_raw,y_raw,region,label,f1,f2,f3,f4\n\
                   0,0,1,1,1,2,3,4\n\
                   1,1,0,0,1,2,3,4,5\n";
        fs::write(dir.path().join("img.csv"), csv).unwrap();
        fs::write(
            dir.path().join("manifest.toml"),
            "format = \"spatial-probit-dataset\"\nversion = 1\n\
             feature_names = [\"f1\",\"f2\",\"f3\",\"f4\"]\n\
             [[images]]\nid = \"img\"\nfile = \"img.csv\"\n",
        )
        .unwrap();
        match load_dataset(dir.path()).unwrap_err() {
            Error::MalformedRow { row, .. } => assert_eq!(row, 3),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn duplicate_ids_rejected() {
        let a = grid_image("same", 3, 3);
        let b = grid_image("same", 4, 3);
        assert!(Dataset::new(vec![a, b], vec!["f1".into(), "f2".into()]).is_err());
    }

    #[test]
    fn inconsistent_dim_rejected() {
        let a = grid_image("a", 3, 3); // d = 2
        assert!(Dataset::new(vec![a], vec!["f1".into()]).is_err());
    }
}
