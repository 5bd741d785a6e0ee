// SPDX-License-Identifier: Apache-2.0

//! Annotated ASTs serialized to `<dir>/<instance id>.ast`.
//!
//! Layout: 8-byte magic, little-endian `u32` format version, a CBOR manifest
//! (source hash and intel keys present at the roots), then the CBOR script.

use std::fs;
use std::io::{BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use super::{io_err, InstanceRec, StoreError};
use crate::intel::{annotate, compute_intel, IntelKey, IntelSpec};
use crate::smtlib::{content_hash, parse_script, Script};

const MAGIC: &[u8; 8] = b"SMTQAST\0";

/// Entries written with another format version are ignored.
pub const CACHE_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct Manifest {
    source_hash: String,
    intel: Vec<IntelKey>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    /// Entry valid and covering every wanted key.
    Hit,
    /// Entry valid but some keys had to be computed.
    Extended,
    /// No usable entry; parsed from source.
    Miss,
}

#[derive(Clone, Debug)]
pub struct AstCache {
    dir: PathBuf,
}

static TEMP_COUNTER: AtomicU64 = AtomicU64::new(0);

impl AstCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        AstCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn entry_path(&self, instance_id: i64) -> PathBuf {
        self.dir.join(format!("{instance_id}.ast"))
    }

    /// Annotated script of `inst` covering all `wanted` passes.
    pub fn load(
        &self,
        inst: &InstanceRec,
        wanted: &[&dyn IntelSpec],
    ) -> Result<Script, StoreError> {
        self.load_with_status(inst, wanted).map(|(s, _)| s)
    }

    pub fn load_with_status(
        &self,
        inst: &InstanceRec,
        wanted: &[&dyn IntelSpec],
    ) -> Result<(Script, CacheStatus), StoreError> {
        let bytes = fs::read(&inst.path).map_err(io_err(&inst.path))?;
        let hash = content_hash(&bytes);
        let entry = self.entry_path(inst.id);
        let cached = match read_entry(&entry) {
            Ok(Some((manifest, script))) if manifest.source_hash == hash => {
                Some((manifest, script))
            }
            Ok(_) => None,
            Err(e) => {
                log::warn!("ignoring unreadable cache entry {}: {e}", entry.display());
                None
            }
        };
        let (mut script, mut status, mut keys) = match cached {
            Some((manifest, script)) => (script, CacheStatus::Hit, manifest.intel),
            None => (
                parse_source(&inst.path, &bytes)?,
                CacheStatus::Miss,
                Vec::new(),
            ),
        };
        for spec in wanted {
            let key = spec.key();
            if keys.contains(&key) {
                continue;
            }
            for a in &mut script.assertions {
                compute_intel(a, *spec)?;
            }
            keys.retain(|k| k.name != key.name);
            keys.push(key);
            if status == CacheStatus::Hit {
                status = CacheStatus::Extended;
            }
        }
        if status != CacheStatus::Hit {
            keys.sort();
            let manifest = Manifest {
                source_hash: hash,
                intel: keys,
            };
            if let Err(e) = self.write_entry(&entry, &manifest, &script) {
                log::warn!("could not write cache entry {}: {e}", entry.display());
            }
        }
        Ok((script, status))
    }

    fn write_entry(
        &self,
        path: &Path,
        manifest: &Manifest,
        script: &Script,
    ) -> Result<(), StoreError> {
        fs::create_dir_all(&self.dir).map_err(io_err(&self.dir))?;
        let mut buf = Vec::new();
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&CACHE_FORMAT_VERSION.to_le_bytes());
        ciborium::into_writer(manifest, &mut buf)
            .map_err(|e| StoreError::Corrupt(format!("cannot encode manifest: {e}")))?;
        ciborium::into_writer(script, &mut buf)
            .map_err(|e| StoreError::Corrupt(format!("cannot encode ast: {e}")))?;
        let tmp = path.with_extension(format!(
            "tmp.{}.{}",
            std::process::id(),
            TEMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        let mut f = fs::File::create(&tmp).map_err(io_err(&tmp))?;
        f.write_all(&buf).map_err(io_err(&tmp))?;
        f.sync_all().map_err(io_err(&tmp))?;
        drop(f);
        fs::rename(&tmp, path).map_err(io_err(path))
    }
}

fn read_entry(path: &Path) -> Result<Option<(Manifest, Script)>, StoreError> {
    let file = match fs::File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(io_err(path)(e)),
    };
    let mut r = BufReader::new(file);
    let mut header = [0u8; 12];
    r.read_exact(&mut header).map_err(io_err(path))?;
    if &header[..8] != MAGIC {
        return Err(StoreError::Corrupt("bad magic".into()));
    }
    let version = u32::from_le_bytes(header[8..].try_into().expect("4 bytes"));
    if version != CACHE_FORMAT_VERSION {
        log::debug!("cache entry {} has format {version}", path.display());
        return Ok(None);
    }
    let manifest: Manifest =
        ciborium::from_reader(&mut r).map_err(|e| StoreError::Corrupt(format!("manifest: {e}")))?;
    let script: Script =
        ciborium::from_reader(&mut r).map_err(|e| StoreError::Corrupt(format!("ast: {e}")))?;
    Ok(Some((manifest, script)))
}

fn parse_source(path: &Path, bytes: &[u8]) -> Result<Script, StoreError> {
    let text = String::from_utf8_lossy(bytes);
    parse_script(&text).map_err(|error| StoreError::Parse {
        path: path.to_path_buf(),
        error,
    })
}

/// Parses and annotates `path` without touching any cache.
pub fn load_uncached(path: &Path, wanted: &[&dyn IntelSpec]) -> Result<Script, StoreError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    let mut script = parse_source(path, &bytes)?;
    for spec in wanted {
        annotate(&mut script, *spec)?;
    }
    Ok(script)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intel::{builtin_specs, IntelValue, VarCountSpec};
    use crate::smtlib::Sort;

    struct Versioned(u32);

    impl IntelSpec for Versioned {
        fn name(&self) -> &str {
            "size"
        }
        fn version(&self) -> u32 {
            self.0
        }
        fn neutral(&self) -> IntelValue {
            IntelValue::Int(0)
        }
        fn apply(&self, _: &crate::smtlib::Expr, merged: IntelValue) -> Result<IntelValue, String> {
            match merged {
                IntelValue::Int(n) => Ok(IntelValue::Int(n + i64::from(self.0))),
                _ => Err("shape".into()),
            }
        }
        fn merge(&self, a: &IntelValue, b: &IntelValue) -> IntelValue {
            match (a, b) {
                (IntelValue::Int(x), IntelValue::Int(y)) => IntelValue::Int(x + y),
                _ => IntelValue::Int(0),
            }
        }
    }

    fn instance(dir: &Path, text: &str) -> InstanceRec {
        let path = dir.join("f.smt2");
        fs::write(&path, text).unwrap();
        InstanceRec {
            id: 7,
            name: "f.smt2".into(),
            path,
            track_id: 1,
            benchmark: "b".into(),
            track: "t".into(),
        }
    }

    fn root_value(s: &Script, spec: &dyn IntelSpec) -> IntelValue {
        s.assertions[0].intel.get(&spec.key()).cloned().unwrap()
    }

    #[test]
    fn cold_then_warm() {
        let dir = tempfile::tempdir().unwrap();
        let inst = instance(dir.path(), "(declare-fun x () String)(assert (= x \"ab\"))");
        let cache = AstCache::new(dir.path().join("cache"));
        let specs = builtin_specs();
        let (cold, s1) = cache.load_with_status(&inst, &specs).unwrap();
        let (warm, s2) = cache.load_with_status(&inst, &specs).unwrap();
        assert_eq!((s1, s2), (CacheStatus::Miss, CacheStatus::Hit));
        assert!(cold.same_shape(&warm));
        for spec in &specs {
            assert_eq!(root_value(&cold, *spec), root_value(&warm, *spec));
        }
        assert_eq!(warm.declarations[0].sort, Sort::String);
    }

    #[test]
    fn modified_file_invalidates() {
        let dir = tempfile::tempdir().unwrap();
        let inst = instance(dir.path(), "(declare-fun x () String)(assert (= x x))");
        let cache = AstCache::new(dir.path().join("cache"));
        cache.load(&inst, &[&VarCountSpec]).unwrap();
        fs::write(&inst.path, "(declare-fun y () String)(assert (= y \"\"))").unwrap();
        let (s, status) = cache.load_with_status(&inst, &[&VarCountSpec]).unwrap();
        assert_eq!(status, CacheStatus::Miss);
        assert_eq!(s.declarations[0].name, "y");
    }

    #[test]
    fn version_bump_recomputes_only_that_key() {
        let dir = tempfile::tempdir().unwrap();
        let inst = instance(dir.path(), "(declare-fun x () String)(assert (= x x))");
        let cache = AstCache::new(dir.path().join("cache"));
        cache.load(&inst, &[&VarCountSpec, &Versioned(1)]).unwrap();
        let (s, status) = cache
            .load_with_status(&inst, &[&VarCountSpec, &Versioned(2)])
            .unwrap();
        assert_eq!(status, CacheStatus::Extended);
        assert_eq!(root_value(&s, &Versioned(2)), IntelValue::Int(6));
        let keys: Vec<String> = s.assertions[0]
            .intel
            .keys()
            .map(|k| k.to_string())
            .collect();
        assert_eq!(keys, ["size@2", "varcount@1"]);
        let (_, status) = cache
            .load_with_status(&inst, &[&VarCountSpec, &Versioned(2)])
            .unwrap();
        assert_eq!(status, CacheStatus::Hit);
    }

    #[test]
    fn corrupt_entry_is_a_miss() {
        let dir = tempfile::tempdir().unwrap();
        let inst = instance(dir.path(), "(assert true)");
        let cache = AstCache::new(dir.path().join("cache"));
        fs::create_dir_all(cache.dir()).unwrap();
        fs::write(cache.entry_path(inst.id), b"garbage").unwrap();
        let (_, status) = cache.load_with_status(&inst, &[&VarCountSpec]).unwrap();
        assert_eq!(status, CacheStatus::Miss);
    }

    #[test]
    fn parse_errors_propagate() {
        let dir = tempfile::tempdir().unwrap();
        let inst = instance(dir.path(), "(assert (= y 1))");
        let cache = AstCache::new(dir.path().join("cache"));
        assert!(matches!(
            cache.load(&inst, &[&VarCountSpec]),
            Err(StoreError::Parse { .. })
        ));
    }
}
