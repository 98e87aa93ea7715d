//! Bit-exact file I/O.
//!
//! Matrix file layout: magic `PMK1`, u32 version, u32 rows, u32 cols, then
//! the payload as little-endian f64 in column-major order. Snapshot sets add
//! a `<path>.meta.json` sidecar with the time grid, parameter point and QoI
//! names. A trained model bundle is a directory holding `manifest.json` plus
//! one matrix file per basis, operator and Gram block.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use faer::{Mat, MatRef};
use serde::{Deserialize, Serialize};

use crate::data::{ObservableLift, ParameterPoint, SnapshotSet};
use crate::dmd::{GramTable, LocalRom, TrainedEnsemble};
use crate::{Error, Result};

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"PMK1";
pub const SNAPSHOT_VERSION: u32 = 1;

/// JSON sidecar stored next to a snapshot matrix file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub parameter: Vec<f64>,
    pub t0: f64,
    pub dt: f64,
    pub qoi_names: Vec<String>,
}

pub fn write_matrix_file(path: impl AsRef<Path>, m: MatRef<'_, f64>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(SNAPSHOT_MAGIC)?;
    w.write_all(&SNAPSHOT_VERSION.to_le_bytes())?;
    w.write_all(&u32::try_from(m.nrows()).map_err(|_| Error::Format("rows exceed u32".into()))?.to_le_bytes())?;
    w.write_all(&u32::try_from(m.ncols()).map_err(|_| Error::Format("cols exceed u32".into()))?.to_le_bytes())?;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            w.write_all(&m[(i, j)].to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_matrix_file(path: impl AsRef<Path>) -> Result<Mat<f64>> {
    let mut r = BufReader::new(File::open(path.as_ref())?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|_| Error::Format("truncated header".into()))?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(Error::Format(format!(
            "bad magic {:?} in {}",
            magic,
            path.as_ref().display()
        )));
    }
    let mut buf4 = [0u8; 4];
    r.read_exact(&mut buf4).map_err(|_| Error::Format("truncated header".into()))?;
    let version = u32::from_le_bytes(buf4);
    if version != SNAPSHOT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    r.read_exact(&mut buf4).map_err(|_| Error::Format("truncated header".into()))?;
    let rows = u32::from_le_bytes(buf4) as usize;
    r.read_exact(&mut buf4).map_err(|_| Error::Format("truncated header".into()))?;
    let cols = u32::from_le_bytes(buf4) as usize;
    let mut m = Mat::zeros(rows, cols);
    let mut buf8 = [0u8; 8];
    for j in 0..cols {
        for i in 0..rows {
            r.read_exact(&mut buf8)
                .map_err(|_| Error::Format("truncated payload".into()))?;
            m[(i, j)] = f64::from_le_bytes(buf8);
        }
    }
    if r.read(&mut buf8)? != 0 {
        return Err(Error::Format("trailing bytes after payload".into()));
    }
    Ok(m)
}

fn meta_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    std::path::PathBuf::from(s)
}

pub fn write_snapshot_file(path: impl AsRef<Path>, s: &SnapshotSet) -> Result<()> {
    let path = path.as_ref();
    write_matrix_file(path, s.data())?;
    let meta = SnapshotMeta {
        parameter: s.parameter().values().to_vec(),
        t0: s.t0(),
        dt: s.dt(),
        qoi_names: s.qoi_names().to_vec(),
    };
    let f = BufWriter::new(File::create(meta_path(path))?);
    serde_json::to_writer_pretty(f, &meta)?;
    Ok(())
}

pub fn read_snapshot_file(path: impl AsRef<Path>) -> Result<SnapshotSet> {
    let path = path.as_ref();
    let data = read_matrix_file(path)?;
    let f = BufReader::new(File::open(meta_path(path))?);
    let meta: SnapshotMeta = serde_json::from_reader(f)?;
    SnapshotSet::new(data, meta.t0, meta.dt, ParameterPoint::new(meta.parameter)?, meta.qoi_names)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct BundleManifest {
    format_version: u32,
    lift: ObservableLift,
    rank: usize,
    parameters: Vec<Vec<f64>>,
    t0: f64,
    dt: f64,
}

pub fn write_model_bundle(dir: impl AsRef<Path>, ensemble: &TrainedEnsemble) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let manifest = BundleManifest {
        format_version: SNAPSHOT_VERSION,
        lift: ensemble.lift().clone(),
        rank: ensemble.rank(),
        parameters: ensemble.roms().iter().map(|r| r.parameter().values().to_vec()).collect(),
        t0: ensemble.t0(),
        dt: ensemble.dt(),
    };
    let f = BufWriter::new(File::create(dir.join("manifest.json"))?);
    serde_json::to_writer_pretty(f, &manifest)?;
    for (i, rom) in ensemble.roms().iter().enumerate() {
        write_matrix_file(dir.join(format!("v_{i:03}.pmk")), rom.basis())?;
        write_matrix_file(dir.join(format!("k_{i:03}.pmk")), rom.operator())?;
        let sv = rom.singular_values();
        let mut svm = Mat::zeros(sv.len(), 1);
        for (k, v) in sv.iter().enumerate() {
            svm[(k, 0)] = *v;
        }
        write_matrix_file(dir.join(format!("sv_{i:03}.pmk")), svm.as_ref())?;
    }
    let n = ensemble.roms().len();
    for i in 0..n {
        for j in i..n {
            write_matrix_file(dir.join(format!("gram_{i:03}_{j:03}.pmk")), ensemble.gram().block(i, j))?;
        }
    }
    Ok(())
}

pub fn read_model_bundle(dir: impl AsRef<Path>) -> Result<TrainedEnsemble> {
    let dir = dir.as_ref();
    let f = BufReader::new(File::open(dir.join("manifest.json"))?);
    let manifest: BundleManifest = serde_json::from_reader(f)?;
    if manifest.format_version != SNAPSHOT_VERSION {
        return Err(Error::Format(format!(
            "unsupported bundle version {}",
            manifest.format_version
        )));
    }
    let n = manifest.parameters.len();
    let mut roms = Vec::with_capacity(n);
    for (i, p) in manifest.parameters.iter().enumerate() {
        let v = read_matrix_file(dir.join(format!("v_{i:03}.pmk")))?;
        let k = read_matrix_file(dir.join(format!("k_{i:03}.pmk")))?;
        let svm = read_matrix_file(dir.join(format!("sv_{i:03}.pmk")))?;
        let sv: Vec<f64> = (0..svm.nrows()).map(|r| svm[(r, 0)]).collect();
        roms.push(LocalRom::new(
            ParameterPoint::new(p.clone())?,
            v,
            k,
            sv,
            manifest.lift.clone(),
        )?);
    }
    let mut blocks = Vec::new();
    for i in 0..n {
        for j in i..n {
            blocks.push(read_matrix_file(dir.join(format!("gram_{i:03}_{j:03}.pmk")))?);
        }
    }
    let gram = GramTable::from_upper_blocks(n, manifest.rank, blocks)?;
    TrainedEnsemble::from_parts(roms, gram, manifest.rank, manifest.t0, manifest.dt)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_set() -> SnapshotSet {
        let mut m = Mat::zeros(3, 5);
        for j in 0..5 {
            for i in 0..3 {
                m[(i, j)] = (i as f64) + 10.0 * (j as f64) + 0.125;
            }
        }
        SnapshotSet::new(m, 0.0, 0.5, ParameterPoint::scalar(2.0).unwrap(), vec!["q".into()])
            .unwrap()
    }

    #[test]
    fn snapshot_roundtrip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.pmk");
        let s = small_set();
        write_snapshot_file(&path, &s).unwrap();
        let back = read_snapshot_file(&path).unwrap();
        assert_eq!(back.qoi_dim(), 3);
        assert_eq!(back.n_cols(), 5);
        for j in 0..5 {
            for i in 0..3 {
                assert_eq!(back.data()[(i, j)].to_bits(), s.data()[(i, j)].to_bits());
            }
        }
        assert_eq!(back.parameter(), s.parameter());
        assert_eq!(back.dt(), 0.5);
    }

    #[test]
    fn wrong_magic_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.pmk");
        std::fs::write(&path, b"NOPE\x01\x00\x00\x00").unwrap();
        match read_matrix_file(&path) {
            Err(Error::Format(_)) => {}
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn truncated_payload_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trunc.pmk");
        let s = small_set();
        write_matrix_file(&path, s.data()).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 4]).unwrap();
        assert!(matches!(read_matrix_file(&path), Err(Error::Format(_))));
    }
}
