// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};

use super::{io_err, StoreError};
use crate::smtlib::translate_25_to_26;

/// Track name for files placed directly inside a benchmark directory.
pub const DEFAULT_TRACK: &str = "default";

/// Suffix appended to translated copies written next to the originals.
pub const TRANSLATED_SUFFIX: &str = ".26";

#[derive(Clone, Copy, Debug, Default)]
pub struct IngestOptions {
    /// Translate SMT-LIB 2.5 syntax; the instance then points to the copy.
    pub translate25: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScannedFile {
    pub benchmark: String,
    pub track: String,
    pub name: String,
    pub path: PathBuf,
}

fn is_instance(path: &Path) -> bool {
    path.is_file()
        && matches!(
            path.extension().and_then(|e| e.to_str()),
            Some("smt2") | Some("smt")
        )
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>, StoreError> {
    let mut entries = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        let hidden = path
            .file_name()
            .and_then(|n| n.to_str())
            .is_none_or(|n| n.starts_with('.'));
        if !hidden {
            entries.push(path);
        }
    }
    entries.sort();
    Ok(entries)
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Lists `root/<benchmark>/<track>/*.smt{,2}` and `root/<benchmark>/*.smt{,2}`
/// in name order. Deeper directories are ignored.
pub fn scan_tree(root: &Path, options: IngestOptions) -> Result<Vec<ScannedFile>, StoreError> {
    let mut out = Vec::new();
    for bench in sorted_entries(root)? {
        if !bench.is_dir() {
            continue;
        }
        let benchmark = file_name(&bench);
        for entry in sorted_entries(&bench)? {
            if entry.is_dir() {
                let track = file_name(&entry);
                for file in sorted_entries(&entry)? {
                    if is_instance(&file) {
                        out.push(scanned(&benchmark, &track, &file, options)?);
                    } else if file.is_dir() {
                        log::debug!("skipping nested directory {}", file.display());
                    }
                }
            } else if is_instance(&entry) {
                out.push(scanned(&benchmark, DEFAULT_TRACK, &entry, options)?);
            }
        }
    }
    Ok(out)
}

fn scanned(
    benchmark: &str,
    track: &str,
    file: &Path,
    options: IngestOptions,
) -> Result<ScannedFile, StoreError> {
    let name = file_name(file);
    let path = if options.translate25 {
        let text = fs::read_to_string(file).map_err(io_err(file))?;
        let copy = file.with_file_name(format!("{name}{TRANSLATED_SUFFIX}"));
        fs::write(&copy, translate_25_to_26(&text)).map_err(io_err(&copy))?;
        copy
    } else {
        file.to_path_buf()
    };
    Ok(ScannedFile {
        benchmark: benchmark.to_string(),
        track: track.to_string(),
        name,
        path,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn files_under_benchmark_get_default_track() {
        let dir = tempfile::tempdir().unwrap();
        let b = dir.path().join("joaco");
        fs::create_dir_all(b.join("deep/er")).unwrap();
        fs::write(b.join("x.smt2"), "").unwrap();
        fs::write(b.join("deep/y.smt"), "").unwrap();
        fs::write(b.join("deep/er/z.smt2"), "").unwrap();
        fs::write(dir.path().join("stray.smt2"), "").unwrap();
        let files = scan_tree(dir.path(), IngestOptions::default()).unwrap();
        let got: Vec<(&str, &str)> = files
            .iter()
            .map(|f| (f.track.as_str(), f.name.as_str()))
            .collect();
        assert_eq!(got, [("deep", "y.smt"), ("default", "x.smt2")]);
    }

    #[test]
    fn translation_writes_copies() {
        let dir = tempfile::tempdir().unwrap();
        let t = dir.path().join("b/t");
        fs::create_dir_all(&t).unwrap();
        fs::write(t.join("f.smt2"), "(assert (str.in.re x re.empty))").unwrap();
        let files = scan_tree(dir.path(), IngestOptions { translate25: true }).unwrap();
        assert_eq!(files.len(), 1);
        assert_eq!(files[0].name, "f.smt2");
        assert_eq!(
            fs::read_to_string(&files[0].path).unwrap(),
            "(assert (str.in_re x re.none))"
        );
        assert_eq!(
            fs::read_to_string(t.join("f.smt2")).unwrap(),
            "(assert (str.in.re x re.empty))"
        );
        // The copy is not picked up as an instance of its own.
        assert_eq!(
            scan_tree(dir.path(), IngestOptions::default())
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn missing_root_is_an_io_error() {
        let err = scan_tree(Path::new("/nonexistent/smtquery"), IngestOptions::default());
        assert!(matches!(err, Err(StoreError::Io { .. })));
    }
}
