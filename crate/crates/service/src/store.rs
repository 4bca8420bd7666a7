//! Named scenarios kept in a single append-only JSON-lines file.
//!
//! Each line records a put or a delete. The file is replayed on open and
//! rewritten with only the live scenarios once stale lines dominate.

use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use dst_core::LockSet;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StoredScenario {
    pub id: String,
    pub name: String,
    #[serde(flatten)]
    pub locks: LockSet,
    pub created_at: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Entry {
    Put(StoredScenario),
    Delete(String),
}

#[derive(Debug)]
pub struct ScenarioStore {
    path: Option<PathBuf>,
    items: Vec<StoredScenario>,
    lines: usize,
}

impl ScenarioStore {
    /// A store that forgets everything on drop.
    pub fn in_memory() -> Self {
        ScenarioStore {
            path: None,
            items: Vec::new(),
            lines: 0,
        }
    }

    /// Opens or creates the store file. A torn final line (from a crash
    /// mid-write) is dropped; a bad line elsewhere is an error.
    pub fn open(path: impl AsRef<Path>) -> io::Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut items: Vec<StoredScenario> = Vec::new();
        if path.exists() {
            let lines: Vec<String> = BufReader::new(File::open(&path)?).lines().collect::<Result<_, _>>()?;
            let last = lines.iter().rposition(|l| !l.trim().is_empty());
            for (i, line) in lines.iter().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                match serde_json::from_str::<Entry>(line) {
                    Ok(Entry::Put(s)) => match items.iter_mut().find(|x| x.id == s.id) {
                        Some(slot) => *slot = s,
                        None => items.push(s),
                    },
                    Ok(Entry::Delete(id)) => items.retain(|x| x.id != id),
                    Err(e) if Some(i) == last => {
                        log::warn!("{}: dropping torn last line: {e}", path.display());
                    }
                    Err(e) => {
                        return Err(io::Error::new(
                            io::ErrorKind::InvalidData,
                            format!("{}:{}: {e}", path.display(), i + 1),
                        ))
                    }
                }
            }
        }
        let mut store = ScenarioStore {
            path: Some(path),
            items,
            lines: 0,
        };
        store.compact()?;
        Ok(store)
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn list(&self) -> &[StoredScenario] {
        &self.items
    }

    pub fn get(&self, id: &str) -> Option<&StoredScenario> {
        self.items.iter().find(|s| s.id == id)
    }

    pub fn insert(&mut self, s: StoredScenario) -> io::Result<()> {
        self.append(&Entry::Put(s.clone()))?;
        match self.items.iter_mut().find(|x| x.id == s.id) {
            Some(slot) => *slot = s,
            None => self.items.push(s),
        }
        self.maybe_compact()
    }

    /// Removes a scenario; returns whether it existed.
    pub fn remove(&mut self, id: &str) -> io::Result<bool> {
        if self.get(id).is_none() {
            return Ok(false);
        }
        self.append(&Entry::Delete(id.to_string()))?;
        self.items.retain(|s| s.id != id);
        self.maybe_compact()?;
        Ok(true)
    }

    fn append(&mut self, e: &Entry) -> io::Result<()> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        let mut f = OpenOptions::new().create(true).append(true).open(path)?;
        let mut line = serde_json::to_string(e).map_err(io::Error::other)?;
        line.push('\n');
        f.write_all(line.as_bytes())?;
        f.sync_data()?;
        self.lines += 1;
        Ok(())
    }

    fn maybe_compact(&mut self) -> io::Result<()> {
        if self.lines > 2 * self.items.len() + 32 {
            self.compact()?;
        }
        Ok(())
    }

    /// Rewrites the file with one put per live scenario.
    pub fn compact(&mut self) -> io::Result<()> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        let tmp = path.with_extension("tmp");
        {
            let mut f = File::create(&tmp)?;
            for s in &self.items {
                let line = serde_json::to_string(&Entry::Put(s.clone())).map_err(io::Error::other)?;
                writeln!(f, "{line}")?;
            }
            f.sync_all()?;
        }
        std::fs::rename(&tmp, path)?;
        self.lines = self.items.len();
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(id: &str, name: &str) -> StoredScenario {
        StoredScenario {
            id: id.into(),
            name: name.into(),
            locks: LockSet::new().with("Routes", "2A"),
            created_at: "2026-01-01T00:00:00Z".into(),
            note: None,
        }
    }

    #[test]
    fn survives_reopen() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scenarios.jsonl");
        let mut s = ScenarioStore::open(&path).unwrap();
        s.insert(sc("a", "first")).unwrap();
        s.insert(sc("b", "second")).unwrap();
        s.remove("a").unwrap();
        s.insert(sc("b", "renamed")).unwrap();
        drop(s);
        let s = ScenarioStore::open(&path).unwrap();
        assert_eq!(s.list(), &[sc("b", "renamed")]);
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 1);
    }

    #[test]
    fn compacts_when_stale_lines_pile_up() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.jsonl");
        let mut s = ScenarioStore::open(&path).unwrap();
        for i in 0..100 {
            s.insert(sc("x", &format!("v{i}"))).unwrap();
        }
        let lines = std::fs::read_to_string(&path).unwrap().lines().count();
        assert!(lines <= 2 + 32 + 1, "{lines}");
        assert_eq!(ScenarioStore::open(&path).unwrap().get("x").unwrap().name, "v99");
    }

    #[test]
    fn torn_last_line_is_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.jsonl");
        let mut s = ScenarioStore::open(&path).unwrap();
        s.insert(sc("a", "ok")).unwrap();
        drop(s);
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        f.write_all(b"{\"put\":{\"id\":\"b\",").unwrap();
        drop(f);
        let s = ScenarioStore::open(&path).unwrap();
        assert_eq!(s.list().len(), 1);
    }

    #[test]
    fn corrupt_middle_line_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.jsonl");
        std::fs::write(&path, "garbage\n{\"delete\":\"a\"}\n").unwrap();
        let err = ScenarioStore::open(&path).unwrap_err();
        assert!(err.to_string().contains(":1:"), "{err}");
    }
}
