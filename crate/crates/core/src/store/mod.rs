// SPDX-License-Identifier: Apache-2.0

//! Benchmark metadata, solver results and validation verdicts in an embedded
//! SQLite database, plus the on-disk cache of annotated ASTs.

mod cache;
mod ingest;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::{Mutex, MutexGuard};

use rusqlite::{params, Connection, OptionalExtension};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intel::IntelError;
use crate::smtlib::ParseError;

pub use cache::{load_uncached, AstCache, CacheStatus, CACHE_FORMAT_VERSION};
pub use ingest::{scan_tree, IngestOptions, ScannedFile, DEFAULT_TRACK, TRANSLATED_SUFFIX};

/// Bumped whenever the table layout changes.
pub const SCHEMA_VERSION: i64 = 1;

const SCHEMA: &str = "
CREATE TABLE benchmarks (
    id INTEGER PRIMARY KEY,
    name TEXT NOT NULL UNIQUE
);
CREATE TABLE tracks (
    id INTEGER PRIMARY KEY,
    name TEXT NOT NULL,
    benchmark_id INTEGER NOT NULL REFERENCES benchmarks(id),
    UNIQUE (benchmark_id, name)
);
CREATE TABLE instances (
    id INTEGER PRIMARY KEY,
    name TEXT NOT NULL,
    path TEXT NOT NULL,
    track_id INTEGER NOT NULL REFERENCES tracks(id),
    UNIQUE (track_id, name)
);
CREATE TABLE results (
    id INTEGER PRIMARY KEY,
    instance_id INTEGER NOT NULL REFERENCES instances(id),
    solver TEXT NOT NULL,
    result TEXT NOT NULL,
    time REAL NOT NULL,
    model TEXT,
    date TEXT NOT NULL
);
CREATE INDEX results_by_pair ON results (instance_id, solver COLLATE NOCASE);
CREATE TABLE validation_results (
    id INTEGER PRIMARY KEY,
    result_id INTEGER NOT NULL UNIQUE REFERENCES results(id),
    result TEXT NOT NULL,
    date TEXT NOT NULL
);
";

const TABLES: &[&str] = &[
    "validation_results",
    "results",
    "instances",
    "tracks",
    "benchmarks",
];

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("database error: {0}")]
    Sqlite(#[from] rusqlite::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("database already initialized (use --force to recreate it)")]
    SchemaExists,
    #[error("database is not initialized (run `initdb` first)")]
    NoSchema,
    #[error("database schema version {found} is not supported (expected {SCHEMA_VERSION})")]
    SchemaVersion { found: i64 },
    #[error("unknown dataset `{0}`")]
    UnknownDataset(String),
    #[error("no {what} with id {id}")]
    ForeignKeyViolation { what: &'static str, id: i64 },
    #[error("{path}: {error}")]
    Parse { path: PathBuf, error: ParseError },
    #[error(transparent)]
    Intel(#[from] IntelError),
    #[error("{0}")]
    Corrupt(String),
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchmarkRec {
    pub id: i64,
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrackRec {
    pub id: i64,
    pub name: String,
    pub benchmark_id: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceRec {
    pub id: i64,
    pub name: String,
    pub path: PathBuf,
    pub track_id: i64,
    pub benchmark: String,
    pub track: String,
}

impl InstanceRec {
    /// `benchmark:track:filename`.
    pub fn label(&self) -> String {
        format!("{}:{}:{}", self.benchmark, self.track, self.name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SolverResult {
    Satisfied,
    Unsatisfied,
    Unknown,
    Timeout,
    Crash,
}

impl SolverResult {
    pub const ALL: [SolverResult; 5] = [
        SolverResult::Satisfied,
        SolverResult::Unsatisfied,
        SolverResult::Unknown,
        SolverResult::Timeout,
        SolverResult::Crash,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SolverResult::Satisfied => "Satisfied",
            SolverResult::Unsatisfied => "Unsatisfied",
            SolverResult::Unknown => "Unknown",
            SolverResult::Timeout => "Timeout",
            SolverResult::Crash => "Crash",
        }
    }

    pub fn is_decisive(self) -> bool {
        matches!(self, SolverResult::Satisfied | SolverResult::Unsatisfied)
    }
}

impl fmt::Display for SolverResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolverResult {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SolverResult::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown solver result `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValidationKind {
    ModelValid,
    ModelInvalid,
    MajorityAgree,
    MajorityDisagree,
    Inconclusive,
}

impl ValidationKind {
    pub const ALL: [ValidationKind; 5] = [
        ValidationKind::ModelValid,
        ValidationKind::ModelInvalid,
        ValidationKind::MajorityAgree,
        ValidationKind::MajorityDisagree,
        ValidationKind::Inconclusive,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ValidationKind::ModelValid => "ModelValid",
            ValidationKind::ModelInvalid => "ModelInvalid",
            ValidationKind::MajorityAgree => "MajorityAgree",
            ValidationKind::MajorityDisagree => "MajorityDisagree",
            ValidationKind::Inconclusive => "Inconclusive",
        }
    }
}

impl fmt::Display for ValidationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ValidationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ValidationKind::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown validation result `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRec {
    pub id: i64,
    pub instance_id: i64,
    pub solver: String,
    pub result: SolverResult,
    pub time: f64,
    pub model: Option<String>,
    pub date: String,
}

/// A result about to be stored; id and date are assigned by the store.
#[derive(Clone, Debug, PartialEq)]
pub struct NewResult {
    pub instance_id: i64,
    pub solver: String,
    pub result: SolverResult,
    pub time: f64,
    pub model: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationRec {
    pub id: i64,
    pub result_id: i64,
    pub result: ValidationKind,
    pub date: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DatasetAtom {
    All,
    Set(String),
    SetTrack(String, String),
}

impl fmt::Display for DatasetAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetAtom::All => f.write_str("*"),
            DatasetAtom::Set(s) => f.write_str(s),
            DatasetAtom::SetTrack(s, t) => write!(f, "{s}:{t}"),
        }
    }
}

/// Table contents without ids and dates, for comparing two databases.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TableState {
    pub benchmarks: Vec<String>,
    pub tracks: Vec<(String, String)>,
    pub instances: Vec<(String, String)>,
    /// (instance label, solver, result, model)
    pub results: Vec<(String, String, String, Option<String>)>,
    /// (instance label, solver, validation)
    pub validations: Vec<(String, String, String)>,
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Micros, true)
}

pub struct Store {
    conn: Mutex<Connection>,
}

const INSTANCE_SELECT: &str = "
SELECT i.id, i.name, i.path, i.track_id, b.name, t.name
FROM instances i JOIN tracks t ON i.track_id = t.id JOIN benchmarks b ON t.benchmark_id = b.id";

fn instance_row(row: &rusqlite::Row<'_>) -> rusqlite::Result<InstanceRec> {
    Ok(InstanceRec {
        id: row.get(0)?,
        name: row.get(1)?,
        path: PathBuf::from(row.get::<_, String>(2)?),
        track_id: row.get(3)?,
        benchmark: row.get(4)?,
        track: row.get(5)?,
    })
}

fn result_row(row: &rusqlite::Row<'_>) -> rusqlite::Result<ResultRec> {
    let text: String = row.get(3)?;
    let result = text.parse().map_err(|e: String| {
        rusqlite::Error::FromSqlConversionFailure(3, rusqlite::types::Type::Text, e.into())
    })?;
    Ok(ResultRec {
        id: row.get(0)?,
        instance_id: row.get(1)?,
        solver: row.get(2)?,
        result,
        time: row.get(4)?,
        model: row.get(5)?,
        date: row.get(6)?,
    })
}

impl Store {
    fn from_connection(conn: Connection) -> Result<Store, StoreError> {
        conn.pragma_update(None, "foreign_keys", true)?;
        conn.busy_timeout(std::time::Duration::from_secs(30))?;
        Ok(Store {
            conn: Mutex::new(conn),
        })
    }

    fn lock(&self) -> MutexGuard<'_, Connection> {
        self.conn.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// Opens an initialized database.
    pub fn open(db: &Path) -> Result<Store, StoreError> {
        if !db.exists() {
            return Err(StoreError::NoSchema);
        }
        let store = Store::from_connection(Connection::open(db)?)?;
        match store.schema_version()? {
            0 => Err(StoreError::NoSchema),
            SCHEMA_VERSION => Ok(store),
            found => Err(StoreError::SchemaVersion { found }),
        }
    }

    /// Creates the tables in a fresh or `force`-wiped database file and
    /// ingests the benchmark tree under `root`.
    pub fn init_db(
        db: &Path,
        root: &Path,
        force: bool,
        options: IngestOptions,
    ) -> Result<Store, StoreError> {
        if let Some(dir) = db.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
        let store = Store::from_connection(Connection::open(db)?)?;
        store.create_schema(force)?;
        store.allocate_new(root, options)?;
        Ok(store)
    }

    /// Empty in-memory database with the schema in place.
    pub fn in_memory() -> Result<Store, StoreError> {
        let store = Store::from_connection(Connection::open_in_memory()?)?;
        store.create_schema(false)?;
        Ok(store)
    }

    fn schema_version(&self) -> Result<i64, StoreError> {
        let conn = self.lock();
        let version: i64 = conn.pragma_query_value(None, "user_version", |r| r.get(0))?;
        Ok(version)
    }

    fn create_schema(&self, force: bool) -> Result<(), StoreError> {
        let existing = self.schema_version()?;
        let mut conn = self.lock();
        let has_tables: bool = conn.query_row(
            "SELECT EXISTS (SELECT 1 FROM sqlite_master WHERE type = 'table' AND name = 'benchmarks')",
            [],
            |r| r.get(0),
        )?;
        if (existing != 0 || has_tables) && !force {
            return Err(StoreError::SchemaExists);
        }
        let tx = conn.transaction()?;
        for t in TABLES {
            tx.execute_batch(&format!("DROP TABLE IF EXISTS {t};"))?;
        }
        tx.execute_batch(SCHEMA)?;
        tx.pragma_update(None, "user_version", SCHEMA_VERSION)?;
        tx.commit()?;
        Ok(())
    }

    /// Inserts benchmarks, tracks and instances found under `root` that are
    /// not yet stored. Returns the number of new instances.
    pub fn allocate_new(&self, root: &Path, options: IngestOptions) -> Result<usize, StoreError> {
        let files = scan_tree(root, options)?;
        let mut conn = self.lock();
        let tx = conn.transaction()?;
        let mut added = 0;
        for f in &files {
            tx.execute(
                "INSERT OR IGNORE INTO benchmarks (name) VALUES (?1)",
                params![f.benchmark],
            )?;
            let bench_id: i64 = tx.query_row(
                "SELECT id FROM benchmarks WHERE name = ?1",
                params![f.benchmark],
                |r| r.get(0),
            )?;
            tx.execute(
                "INSERT OR IGNORE INTO tracks (name, benchmark_id) VALUES (?1, ?2)",
                params![f.track, bench_id],
            )?;
            let track_id: i64 = tx.query_row(
                "SELECT id FROM tracks WHERE benchmark_id = ?1 AND name = ?2",
                params![bench_id, f.track],
                |r| r.get(0),
            )?;
            added += tx.execute(
                "INSERT OR IGNORE INTO instances (name, path, track_id) VALUES (?1, ?2, ?3)",
                params![f.name, f.path.to_string_lossy(), track_id],
            )?;
        }
        tx.commit()?;
        Ok(added)
    }

    pub fn benchmarks(&self) -> Result<Vec<BenchmarkRec>, StoreError> {
        let conn = self.lock();
        let mut stmt = conn.prepare("SELECT id, name FROM benchmarks ORDER BY name")?;
        let rows = stmt.query_map([], |r| {
            Ok(BenchmarkRec {
                id: r.get(0)?,
                name: r.get(1)?,
            })
        })?;
        Ok(rows.collect::<Result<_, _>>()?)
    }

    pub fn tracks(&self) -> Result<Vec<TrackRec>, StoreError> {
        let conn = self.lock();
        let mut stmt = conn.prepare("SELECT id, name, benchmark_id FROM tracks ORDER BY id")?;
        let rows = stmt.query_map([], |r| {
            Ok(TrackRec {
                id: r.get(0)?,
                name: r.get(1)?,
                benchmark_id: r.get(2)?,
            })
        })?;
        Ok(rows.collect::<Result<_, _>>()?)
    }

    pub fn all_instances(&self) -> Result<Vec<InstanceRec>, StoreError> {
        let conn = self.lock();
        let mut stmt = conn.prepare(&format!(
            "{INSTANCE_SELECT} ORDER BY b.name, t.name, i.name"
        ))?;
        let rows = stmt.query_map([], instance_row)?;
        Ok(rows.collect::<Result<_, _>>()?)
    }

    pub fn instance(&self, id: i64) -> Result<Option<InstanceRec>, StoreError> {
        let conn = self.lock();
        Ok(conn
            .query_row(
                &format!("{INSTANCE_SELECT} WHERE i.id = ?1"),
                [id],
                instance_row,
            )
            .optional()?)
    }

    pub fn find_instance(
        &self,
        benchmark: &str,
        track: &str,
        name: &str,
    ) -> Result<Option<InstanceRec>, StoreError> {
        let conn = self.lock();
        Ok(conn
            .query_row(
                &format!("{INSTANCE_SELECT} WHERE b.name = ?1 AND t.name = ?2 AND i.name = ?3"),
                params![benchmark, track, name],
                instance_row,
            )
            .optional()?)
    }

    /// Instances matched by any of `atoms`, deduplicated and ordered by
    /// benchmark, track and file name.
    pub fn select_instances(&self, atoms: &[DatasetAtom]) -> Result<Vec<InstanceRec>, StoreError> {
        let all = self.all_instances()?;
        for atom in atoms {
            let known = match atom {
                DatasetAtom::All => true,
                DatasetAtom::Set(s) => self.benchmark_exists(s)?,
                DatasetAtom::SetTrack(s, t) => self.track_exists(s, t)?,
            };
            if !known {
                return Err(StoreError::UnknownDataset(atom.to_string()));
            }
        }
        Ok(all
            .into_iter()
            .filter(|i| {
                atoms.iter().any(|a| match a {
                    DatasetAtom::All => true,
                    DatasetAtom::Set(s) => &i.benchmark == s,
                    DatasetAtom::SetTrack(s, t) => &i.benchmark == s && &i.track == t,
                })
            })
            .collect())
    }

    fn benchmark_exists(&self, name: &str) -> Result<bool, StoreError> {
        let conn = self.lock();
        Ok(conn.query_row(
            "SELECT EXISTS (SELECT 1 FROM benchmarks WHERE name = ?1)",
            [name],
            |r| r.get(0),
        )?)
    }

    fn track_exists(&self, bench: &str, track: &str) -> Result<bool, StoreError> {
        let conn = self.lock();
        Ok(conn.query_row(
            "SELECT EXISTS (SELECT 1 FROM tracks t JOIN benchmarks b ON t.benchmark_id = b.id
             WHERE b.name = ?1 AND t.name = ?2)",
            [bench, track],
            |r| r.get(0),
        )?)
    }

    pub fn put_result(&self, r: &NewResult) -> Result<i64, StoreError> {
        let conn = self.lock();
        let exists: bool = conn.query_row(
            "SELECT EXISTS (SELECT 1 FROM instances WHERE id = ?1)",
            [r.instance_id],
            |row| row.get(0),
        )?;
        if !exists {
            return Err(StoreError::ForeignKeyViolation {
                what: "instance",
                id: r.instance_id,
            });
        }
        conn.execute(
            "INSERT INTO results (instance_id, solver, result, time, model, date)
             VALUES (?1, ?2, ?3, ?4, ?5, ?6)",
            params![
                r.instance_id,
                r.solver,
                r.result.as_str(),
                r.time,
                r.model,
                now()
            ],
        )?;
        Ok(conn.last_insert_rowid())
    }

    /// All results for the pair, newest first. Solver names match
    /// case-insensitively.
    pub fn get_results(
        &self,
        instance_id: i64,
        solver: &str,
    ) -> Result<Vec<ResultRec>, StoreError> {
        let conn = self.lock();
        let mut stmt = conn.prepare(
            "SELECT id, instance_id, solver, result, time, model, date FROM results
             WHERE instance_id = ?1 AND solver = ?2 COLLATE NOCASE
             ORDER BY id DESC",
        )?;
        let rows = stmt.query_map(params![instance_id, solver], result_row)?;
        Ok(rows.collect::<Result<_, _>>()?)
    }

    pub fn latest_result(
        &self,
        instance_id: i64,
        solver: &str,
    ) -> Result<Option<ResultRec>, StoreError> {
        Ok(self.get_results(instance_id, solver)?.into_iter().next())
    }

    /// Newest result per solver for one instance, ordered by solver name.
    pub fn latest_results(&self, instance_id: i64) -> Result<Vec<ResultRec>, StoreError> {
        let conn = self.lock();
        let mut stmt = conn.prepare(
            "SELECT id, instance_id, solver, result, time, model, date FROM results r
             WHERE instance_id = ?1 AND id = (
                 SELECT MAX(id) FROM results r2
                 WHERE r2.instance_id = r.instance_id AND r2.solver = r.solver COLLATE NOCASE)
             ORDER BY solver",
        )?;
        let rows = stmt.query_map([instance_id], result_row)?;
        Ok(rows.collect::<Result<_, _>>()?)
    }

    /// Distinct solver names with stored results.
    pub fn solver_names(&self) -> Result<Vec<String>, StoreError> {
        let conn = self.lock();
        let mut stmt = conn.prepare("SELECT DISTINCT solver FROM results ORDER BY solver")?;
        let rows = stmt.query_map([], |r| r.get(0))?;
        Ok(rows.collect::<Result<_, _>>()?)
    }

    /// Records the verdict for a result, replacing an earlier one.
    pub fn put_validation(&self, result_id: i64, kind: ValidationKind) -> Result<i64, StoreError> {
        let conn = self.lock();
        let exists: bool = conn.query_row(
            "SELECT EXISTS (SELECT 1 FROM results WHERE id = ?1)",
            [result_id],
            |row| row.get(0),
        )?;
        if !exists {
            return Err(StoreError::ForeignKeyViolation {
                what: "result",
                id: result_id,
            });
        }
        conn.execute(
            "INSERT INTO validation_results (result_id, result, date) VALUES (?1, ?2, ?3)
             ON CONFLICT (result_id) DO UPDATE SET result = excluded.result, date = excluded.date",
            params![result_id, kind.as_str(), now()],
        )?;
        Ok(conn.query_row(
            "SELECT id FROM validation_results WHERE result_id = ?1",
            [result_id],
            |r| r.get(0),
        )?)
    }

    pub fn get_validation(&self, result_id: i64) -> Result<Option<ValidationRec>, StoreError> {
        let conn = self.lock();
        let row = conn
            .query_row(
                "SELECT id, result_id, result, date FROM validation_results WHERE result_id = ?1",
                [result_id],
                |r| {
                    Ok((
                        r.get::<_, i64>(0)?,
                        r.get::<_, i64>(1)?,
                        r.get::<_, String>(2)?,
                        r.get::<_, String>(3)?,
                    ))
                },
            )
            .optional()?;
        row.map(|(id, result_id, kind, date)| {
            Ok(ValidationRec {
                id,
                result_id,
                result: kind.parse().map_err(StoreError::Corrupt)?,
                date,
            })
        })
        .transpose()
    }

    pub fn count_rows(&self, table: &str) -> Result<i64, StoreError> {
        if !TABLES.contains(&table) {
            return Err(StoreError::Corrupt(format!("no table `{table}`")));
        }
        let conn = self.lock();
        Ok(conn.query_row(&format!("SELECT COUNT(*) FROM {table}"), [], |r| r.get(0))?)
    }

    pub fn table_state(&self) -> Result<TableState, StoreError> {
        let conn = self.lock();
        let strings = |sql: &str| -> Result<Vec<Vec<Option<String>>>, StoreError> {
            let mut stmt = conn.prepare(sql)?;
            let n = stmt.column_count();
            let rows = stmt.query_map([], |r| {
                (0..n).map(|i| r.get::<_, Option<String>>(i)).collect()
            })?;
            Ok(rows.collect::<Result<_, _>>()?)
        };
        let s = |v: &Option<String>| v.clone().unwrap_or_default();
        let label = "b.name || ':' || t.name || ':' || i.name";
        let joins = "JOIN instances i ON r.instance_id = i.id
                     JOIN tracks t ON i.track_id = t.id JOIN benchmarks b ON t.benchmark_id = b.id";
        let mut state = TableState {
            benchmarks: strings("SELECT name FROM benchmarks")?
                .iter()
                .map(|r| s(&r[0]))
                .collect(),
            tracks: strings(
                "SELECT b.name, t.name FROM tracks t JOIN benchmarks b ON t.benchmark_id = b.id",
            )?
            .iter()
            .map(|r| (s(&r[0]), s(&r[1])))
            .collect(),
            instances: strings(&format!(
                "SELECT {label}, i.path FROM instances i JOIN tracks t ON i.track_id = t.id
                 JOIN benchmarks b ON t.benchmark_id = b.id"
            ))?
            .iter()
            .map(|r| (s(&r[0]), s(&r[1])))
            .collect(),
            results: strings(&format!(
                "SELECT {label}, r.solver, r.result, r.model FROM results r {joins}"
            ))?
            .into_iter()
            .map(|r| (s(&r[0]), s(&r[1]), s(&r[2]), r[3].clone()))
            .collect(),
            validations: strings(&format!(
                "SELECT {label}, r.solver, v.result FROM validation_results v
                 JOIN results r ON v.result_id = r.id {joins}"
            ))?
            .iter()
            .map(|r| (s(&r[0]), s(&r[1]), s(&r[2])))
            .collect(),
        };
        state.benchmarks.sort();
        state.tracks.sort();
        state.instances.sort();
        state.results.sort();
        state.validations.sort();
        Ok(state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree() -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        for b in ["alpha", "beta"] {
            for t in ["t1", "t2"] {
                let d = dir.path().join(b).join(t);
                std::fs::create_dir_all(&d).unwrap();
                for f in ["a.smt2", "b.smt2", "c.smt"] {
                    std::fs::write(d.join(f), "(check-sat)\n").unwrap();
                }
                std::fs::write(d.join("notes.txt"), "ignored").unwrap();
            }
        }
        dir
    }

    #[test]
    fn init_counts_rows() {
        let root = tree();
        let db = root.path().join("db/smtquery.db");
        let store = Store::init_db(&db, root.path(), false, IngestOptions::default()).unwrap();
        assert_eq!(store.count_rows("benchmarks").unwrap(), 2);
        assert_eq!(store.count_rows("tracks").unwrap(), 4);
        assert_eq!(store.count_rows("instances").unwrap(), 12);
        let state = store.table_state().unwrap();
        drop(store);

        assert!(matches!(
            Store::init_db(&db, root.path(), false, IngestOptions::default()),
            Err(StoreError::SchemaExists)
        ));
        let again = Store::init_db(&db, root.path(), true, IngestOptions::default()).unwrap();
        assert_eq!(again.table_state().unwrap(), state);
        assert_eq!(
            again
                .allocate_new(root.path(), IngestOptions::default())
                .unwrap(),
            0
        );
    }

    #[test]
    fn empty_root_gives_empty_tables() {
        let root = tempfile::tempdir().unwrap();
        let store = Store::in_memory().unwrap();
        assert_eq!(
            store
                .allocate_new(root.path(), IngestOptions::default())
                .unwrap(),
            0
        );
        assert_eq!(store.table_state().unwrap(), TableState::default());
    }

    #[test]
    fn allocate_new_links_only_new_files() {
        let root = tree();
        let store = Store::in_memory().unwrap();
        store
            .allocate_new(root.path(), IngestOptions::default())
            .unwrap();
        std::fs::write(root.path().join("alpha/t1/d.smt2"), "").unwrap();
        assert_eq!(
            store
                .allocate_new(root.path(), IngestOptions::default())
                .unwrap(),
            1
        );
        let d = root.path().join("gamma/only");
        std::fs::create_dir_all(&d).unwrap();
        std::fs::write(d.join("x.smt2"), "").unwrap();
        std::fs::write(d.join("y.smt2"), "").unwrap();
        assert_eq!(
            store
                .allocate_new(root.path(), IngestOptions::default())
                .unwrap(),
            2
        );
        assert_eq!(store.count_rows("benchmarks").unwrap(), 3);
        assert_eq!(store.count_rows("tracks").unwrap(), 5);
    }

    #[test]
    fn dataset_selection() {
        let root = tree();
        let store = Store::in_memory().unwrap();
        store
            .allocate_new(root.path(), IngestOptions::default())
            .unwrap();
        let all = store.select_instances(&[DatasetAtom::All]).unwrap();
        assert_eq!(all.len(), 12);
        assert_eq!(all[0].label(), "alpha:t1:a.smt2");
        let track = store
            .select_instances(&[DatasetAtom::SetTrack("beta".into(), "t2".into())])
            .unwrap();
        assert_eq!(track.len(), 3);
        assert!(track
            .iter()
            .all(|i| i.benchmark == "beta" && i.track == "t2"));
        let set = DatasetAtom::Set("alpha".into());
        assert_eq!(
            store.select_instances(&[set.clone(), set.clone()]).unwrap(),
            store.select_instances(&[set]).unwrap()
        );
        assert!(matches!(
            store.select_instances(&[DatasetAtom::Set("nope".into())]),
            Err(StoreError::UnknownDataset(_))
        ));
    }

    #[test]
    fn results_are_newest_first() {
        let root = tree();
        let store = Store::in_memory().unwrap();
        store
            .allocate_new(root.path(), IngestOptions::default())
            .unwrap();
        let inst = &store.all_instances().unwrap()[0];
        assert!(store.get_results(inst.id, "Z3").unwrap().is_empty());
        let mut r = NewResult {
            instance_id: inst.id,
            solver: "Z3".into(),
            result: SolverResult::Satisfied,
            time: 0.5,
            model: Some("(model)".into()),
        };
        let first = store.put_result(&r).unwrap();
        r.result = SolverResult::Timeout;
        r.model = None;
        let second = store.put_result(&r).unwrap();
        let got = store.get_results(inst.id, "z3").unwrap();
        assert_eq!(
            got.iter().map(|r| r.id).collect::<Vec<_>>(),
            [second, first]
        );
        assert_eq!(got[1].model.as_deref(), Some("(model)"));
        assert_eq!(store.latest_results(inst.id).unwrap().len(), 1);

        r.instance_id = 999;
        assert!(matches!(
            store.put_result(&r),
            Err(StoreError::ForeignKeyViolation { .. })
        ));

        store
            .put_validation(first, ValidationKind::MajorityAgree)
            .unwrap();
        store
            .put_validation(first, ValidationKind::ModelValid)
            .unwrap();
        assert_eq!(store.count_rows("validation_results").unwrap(), 1);
        assert_eq!(
            store.get_validation(first).unwrap().unwrap().result,
            ValidationKind::ModelValid
        );
    }
}
