// Copyright 2026 The rdfvc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Content-addressed object store with named refs.
//!
//! Layout under the repository root:
//!
//! ```text
//! HEAD                      current branch name
//! objects/ab/cdef...        object bytes, named by SHA-256 (2 + 62 hex chars)
//! refs/heads/<branch>       commit id + "\n"
//! refs/remotes/<r>/<branch> last fetched commit id of a remote branch
//! ```
//!
//! Objects are never modified once written. Ref updates go through a
//! compare-and-set and land via write-to-temp plus rename.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Mutex;

use sha2::{Digest, Sha256};
use tempfile::NamedTempFile;
use thiserror::Error;

pub const DEFAULT_BRANCH: &str = "main";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{0} exists and is not empty")]
    NotEmpty(PathBuf),
    #[error("{0} is not a repository")]
    NotARepository(PathBuf),
    #[error("unknown object {0}")]
    UnknownObject(ObjectId),
    #[error("object {0} is corrupted: content hashes to {1}")]
    Corrupt(ObjectId, ObjectId),
    #[error("malformed commit record: {0}")]
    MalformedCommit(String),
    #[error("commit references missing {what} {id}")]
    Missing { what: &'static str, id: ObjectId },
    #[error("invalid ref name {0:?}")]
    InvalidRefName(String),
    #[error("unknown ref {0}")]
    UnknownRef(String),
    #[error("ref {name} moved: expected {expected}, found {actual}")]
    StaleRef {
        name: String,
        expected: String,
        actual: String,
    },
    #[error("invalid object id {0:?}")]
    InvalidId(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_owned(),
        source,
    }
}

/// SHA-256 of an object's bytes.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjectId([u8; 32]);

impl ObjectId {
    pub fn of(bytes: &[u8]) -> Self {
        ObjectId(Sha256::digest(bytes).into())
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }
}

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", &self.to_hex()[..12])
    }
}

impl FromStr for ObjectId {
    type Err = StoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = [0u8; 32];
        if s.len() != 64 || s.bytes().any(|b| b.is_ascii_uppercase()) {
            return Err(StoreError::InvalidId(s.to_owned()));
        }
        hex::decode_to_slice(s, &mut out).map_err(|_| StoreError::InvalidId(s.to_owned()))?;
        Ok(ObjectId(out))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CommitId(pub ObjectId);

impl fmt::Display for CommitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for CommitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CommitId({:?})", self.0)
    }
}

impl FromStr for CommitId {
    type Err = StoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse().map(CommitId)
    }
}

/// One node of the commit graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommitRecord {
    pub snapshot: ObjectId,
    pub parents: Vec<CommitId>,
    pub author: String,
    pub timestamp: i64,
    pub message: String,
    pub strategy: Option<String>,
}

impl CommitRecord {
    pub fn encode(&self) -> Result<Vec<u8>, StoreError> {
        if self.parents.len() > 2 {
            return Err(StoreError::MalformedCommit(format!(
                "{} parents; at most 2 allowed",
                self.parents.len()
            )));
        }
        for (field, value) in [("author", Some(&self.author)), ("message", Some(&self.message))]
            .into_iter()
            .chain([("strategy", self.strategy.as_ref())])
        {
            if value.is_some_and(|v| v.contains(['\n', '\r'])) {
                return Err(StoreError::MalformedCommit(format!("{field} contains a line break")));
            }
        }
        if self.strategy.as_deref().is_some_and(|s| s.is_empty() || s.contains(' ')) {
            return Err(StoreError::MalformedCommit("strategy tag must be one word".into()));
        }
        let mut out = String::new();
        out.push_str(&format!("snapshot {}\n", self.snapshot));
        for p in &self.parents {
            out.push_str(&format!("parent {p}\n"));
        }
        out.push_str(&format!("author {}\n", self.author));
        out.push_str(&format!("timestamp {}\n", self.timestamp));
        if let Some(s) = &self.strategy {
            out.push_str(&format!("strategy {s}\n"));
        }
        out.push_str(&format!("message {}\n", self.message));
        Ok(out.into_bytes())
    }

    pub fn decode(bytes: &[u8]) -> Result<CommitRecord, StoreError> {
        let bad = |m: String| StoreError::MalformedCommit(m);
        let text = std::str::from_utf8(bytes).map_err(|_| bad("not UTF-8".into()))?;
        let body = text
            .strip_suffix('\n')
            .ok_or_else(|| bad("missing final newline".into()))?;
        let lines: Vec<&str> = body.split('\n').collect();
        let mut pos = 0;
        let mut field = |name: &str, optional: bool| -> Result<Option<String>, StoreError> {
            let value = lines
                .get(pos)
                .and_then(|l| l.strip_prefix(name))
                .and_then(|r| r.strip_prefix(' '));
            match value {
                Some(v) => {
                    pos += 1;
                    Ok(Some(v.to_owned()))
                }
                None if optional => Ok(None),
                None => Err(bad(format!("expected {name} on line {}", pos + 1))),
            }
        };
        let snapshot = field("snapshot", false)?.expect("required").parse()?;
        let mut parents = Vec::new();
        while let Some(p) = field("parent", true)? {
            parents.push(p.parse()?);
        }
        let author = field("author", false)?.expect("required");
        let timestamp = field("timestamp", false)?
            .expect("required")
            .parse()
            .map_err(|_| bad("timestamp is not an integer".into()))?;
        let strategy = field("strategy", true)?;
        let message = field("message", false)?.expect("required");
        if pos != lines.len() {
            return Err(bad("trailing lines".into()));
        }
        let record = CommitRecord {
            snapshot,
            parents,
            author,
            timestamp,
            message,
            strategy,
        };
        if record.encode()? != bytes {
            return Err(bad("non-canonical encoding".into()));
        }
        Ok(record)
    }
}

/// A ref path: a local branch or a remote-tracking branch.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RefName {
    Branch(String),
    Remote { remote: String, branch: String },
}

impl RefName {
    pub fn branch(name: &str) -> Result<Self, StoreError> {
        check_name(name)?;
        Ok(RefName::Branch(name.to_owned()))
    }

    pub fn remote(remote: &str, branch: &str) -> Result<Self, StoreError> {
        check_name(remote)?;
        check_name(branch)?;
        Ok(RefName::Remote {
            remote: remote.to_owned(),
            branch: branch.to_owned(),
        })
    }

    fn rel_path(&self) -> PathBuf {
        match self {
            RefName::Branch(b) => Path::new("refs/heads").join(b),
            RefName::Remote { remote, branch } => Path::new("refs/remotes").join(remote).join(branch),
        }
    }
}

impl fmt::Display for RefName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RefName::Branch(b) => write!(f, "{b}"),
            RefName::Remote { remote, branch } => write!(f, "{remote}/{branch}"),
        }
    }
}

pub fn check_name(name: &str) -> Result<(), StoreError> {
    let ok = !name.is_empty()
        && name != "."
        && name != ".."
        && name
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'.' | b'_' | b'-'));
    if ok {
        Ok(())
    } else {
        Err(StoreError::InvalidRefName(name.to_owned()))
    }
}

/// Expected current value of a ref for compare-and-set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefExpect {
    Any,
    Absent,
    Exactly(CommitId),
}

// Serializes ref compare-and-set within this process.
static REF_LOCK: Mutex<()> = Mutex::new(());

#[derive(Clone, Debug)]
pub struct ObjectStore {
    root: PathBuf,
}

impl ObjectStore {
    /// Creates the repository layout at `path`, which must be absent or an
    /// empty directory.
    pub fn init(path: impl AsRef<Path>) -> Result<ObjectStore, StoreError> {
        let root = path.as_ref().to_owned();
        if root.exists() {
            let mut entries = fs::read_dir(&root).map_err(io_err(&root))?;
            if entries.next().is_some() {
                return Err(StoreError::NotEmpty(root));
            }
        }
        for dir in ["objects", "refs/heads", "refs/remotes"] {
            let p = root.join(dir);
            fs::create_dir_all(&p).map_err(io_err(&p))?;
        }
        let store = ObjectStore { root };
        store.write_head(DEFAULT_BRANCH)?;
        Ok(store)
    }

    pub fn open(path: impl AsRef<Path>) -> Result<ObjectStore, StoreError> {
        let root = path.as_ref().to_owned();
        if !root.join("objects").is_dir() || !root.join("refs/heads").is_dir() || !root.join("HEAD").is_file() {
            return Err(StoreError::NotARepository(root));
        }
        Ok(ObjectStore { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn object_path(&self, id: &ObjectId) -> PathBuf {
        let hex = id.to_hex();
        self.root.join("objects").join(&hex[..2]).join(&hex[2..])
    }

    pub fn contains(&self, id: &ObjectId) -> bool {
        self.object_path(id).is_file()
    }

    /// Stores `bytes` under their hash. Storing the same bytes again is a no-op.
    pub fn put_blob(&self, bytes: &[u8]) -> Result<ObjectId, StoreError> {
        let id = ObjectId::of(bytes);
        self.put_object(id, bytes)?;
        Ok(id)
    }

    fn put_object(&self, id: ObjectId, bytes: &[u8]) -> Result<(), StoreError> {
        let path = self.object_path(&id);
        if path.is_file() {
            return Ok(());
        }
        let dir = path.parent().expect("fanout dir");
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        atomic_write(&path, bytes, false)
    }

    /// Copies raw object bytes received from elsewhere, checking them against
    /// the expected id first.
    pub fn import_object(&self, id: ObjectId, bytes: &[u8]) -> Result<(), StoreError> {
        let actual = ObjectId::of(bytes);
        if actual != id {
            return Err(StoreError::Corrupt(id, actual));
        }
        self.put_object(id, bytes)
    }

    pub fn get_blob(&self, id: &ObjectId) -> Result<Vec<u8>, StoreError> {
        let path = self.object_path(id);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Err(StoreError::UnknownObject(*id)),
            Err(e) => return Err(io_err(&path)(e)),
        };
        let actual = ObjectId::of(&bytes);
        if actual != *id {
            return Err(StoreError::Corrupt(*id, actual));
        }
        Ok(bytes)
    }

    pub fn write_commit(&self, record: &CommitRecord) -> Result<CommitId, StoreError> {
        let bytes = record.encode()?;
        if !self.contains(&record.snapshot) {
            return Err(StoreError::Missing {
                what: "snapshot",
                id: record.snapshot,
            });
        }
        for p in &record.parents {
            if !self.contains(&p.0) {
                return Err(StoreError::Missing {
                    what: "parent",
                    id: p.0,
                });
            }
        }
        self.put_blob(&bytes).map(CommitId)
    }

    pub fn read_commit(&self, id: &CommitId) -> Result<CommitRecord, StoreError> {
        CommitRecord::decode(&self.get_blob(&id.0)?)
    }

    pub fn read_ref(&self, name: &RefName) -> Result<CommitId, StoreError> {
        self.try_read_ref(name)?
            .ok_or_else(|| StoreError::UnknownRef(name.to_string()))
    }

    pub fn try_read_ref(&self, name: &RefName) -> Result<Option<CommitId>, StoreError> {
        let path = self.root.join(name.rel_path());
        match fs::read_to_string(&path) {
            Ok(s) => s.trim_end().parse().map(Some),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(io_err(&path)(e)),
        }
    }

    /// Points `name` at `id` if the ref currently matches `expect`.
    pub fn set_ref(&self, name: &RefName, id: CommitId, expect: RefExpect) -> Result<(), StoreError> {
        if !self.contains(&id.0) {
            return Err(StoreError::Missing { what: "commit", id: id.0 });
        }
        let _guard = REF_LOCK.lock().unwrap_or_else(|e| e.into_inner());
        let current = self.try_read_ref(name)?;
        let matches = match expect {
            RefExpect::Any => true,
            RefExpect::Absent => current.is_none(),
            RefExpect::Exactly(old) => current == Some(old),
        };
        if !matches {
            return Err(StoreError::StaleRef {
                name: name.to_string(),
                expected: match expect {
                    RefExpect::Exactly(old) => old.to_string(),
                    _ => "no ref".to_owned(),
                },
                actual: current.map_or_else(|| "no ref".to_owned(), |c| c.to_string()),
            });
        }
        let path = self.root.join(name.rel_path());
        let dir = path.parent().expect("refs dir");
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        atomic_write(&path, format!("{id}\n").as_bytes(), true)
    }

    pub fn branches(&self) -> Result<Vec<(String, CommitId)>, StoreError> {
        let dir = self.root.join("refs/heads");
        let mut out = Vec::new();
        for entry in fs::read_dir(&dir).map_err(io_err(&dir))? {
            let entry = entry.map_err(io_err(&dir))?;
            let name = entry.file_name().to_string_lossy().into_owned();
            if check_name(&name).is_err() {
                continue;
            }
            let id = self.read_ref(&RefName::Branch(name.clone()))?;
            out.push((name, id));
        }
        out.sort();
        Ok(out)
    }

    pub fn read_head(&self) -> Result<String, StoreError> {
        let path = self.root.join("HEAD");
        let head = fs::read_to_string(&path).map_err(io_err(&path))?;
        let head = head.trim_end().to_owned();
        check_name(&head)?;
        Ok(head)
    }

    pub fn write_head(&self, branch: &str) -> Result<(), StoreError> {
        check_name(branch)?;
        atomic_write(&self.root.join("HEAD"), format!("{branch}\n").as_bytes(), true)
    }

    /// Every object id in the store.
    pub fn object_ids(&self) -> Result<Vec<ObjectId>, StoreError> {
        let dir = self.root.join("objects");
        let mut out = Vec::new();
        for fan in fs::read_dir(&dir).map_err(io_err(&dir))? {
            let fan = fan.map_err(io_err(&dir))?;
            let prefix = fan.file_name().to_string_lossy().into_owned();
            if prefix.len() != 2 || !fan.path().is_dir() {
                continue;
            }
            for obj in fs::read_dir(fan.path()).map_err(io_err(&fan.path()))? {
                let obj = obj.map_err(io_err(&fan.path()))?;
                let rest = obj.file_name().to_string_lossy().into_owned();
                if let Ok(id) = format!("{prefix}{rest}").parse() {
                    out.push(id);
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// Reads a file at the repository root, `None` when absent.
    pub fn read_meta(&self, name: &str) -> Result<Option<String>, StoreError> {
        let path = self.root.join(name);
        match fs::read_to_string(&path) {
            Ok(s) => Ok(Some(s)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(io_err(&path)(e)),
        }
    }

    pub fn write_meta(&self, name: &str, contents: &str) -> Result<(), StoreError> {
        atomic_write(&self.root.join(name), contents.as_bytes(), true)
    }

    pub fn remove_meta(&self, name: &str) -> Result<(), StoreError> {
        let path = self.root.join(name);
        match fs::remove_file(&path) {
            Ok(()) => Ok(()),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(()),
            Err(e) => Err(io_err(&path)(e)),
        }
    }
}

fn atomic_write(path: &Path, bytes: &[u8], replace: bool) -> Result<(), StoreError> {
    let dir = path.parent().expect("file has a parent directory");
    let mut tmp = NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(bytes).map_err(io_err(path))?;
    tmp.as_file().sync_all().map_err(io_err(path))?;
    let result = if replace {
        tmp.persist(path).map(drop)
    } else {
        tmp.persist_noclobber(path).map(drop)
    };
    match result {
        Ok(()) => Ok(()),
        // Lost a race against an identical object write.
        Err(e) if !replace && e.error.kind() == io::ErrorKind::AlreadyExists => Ok(()),
        Err(e) => Err(io_err(path)(e.error)),
    }
}
