//! All-or-nothing output files.
//!
//! Every output is written to a temporary file next to its destination and
//! only renamed into place by [`OutputSet::commit`]. Dropping the set
//! without committing removes the temporaries, so a failed run leaves no
//! partial files at the final paths.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use tempfile::NamedTempFile;

use crate::error::{Error, Result};

pub struct StagedOutput {
    tmp: NamedTempFile,
    dest: PathBuf,
}

impl StagedOutput {
    pub fn new(dest: impl AsRef<Path>) -> Result<Self> {
        let dest = dest.as_ref().to_path_buf();
        let dir = match dest.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        let name = dest
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let tmp = tempfile::Builder::new()
            .prefix(&format!(".{name}."))
            .suffix(".tmp")
            .tempfile_in(&dir)
            .map_err(|e| Error::io(&dest, e))?;
        Ok(StagedOutput { tmp, dest })
    }

    pub fn dest(&self) -> &Path {
        &self.dest
    }

    pub fn file(&mut self) -> &mut File {
        self.tmp.as_file_mut()
    }

    /// Run `f` with a buffered writer over the staged file.
    pub fn write_with<F>(&mut self, f: F) -> Result<()>
    where
        F: FnOnce(&mut BufWriter<&mut File>) -> Result<()>,
    {
        let dest = self.dest.clone();
        let mut w = BufWriter::new(self.tmp.as_file_mut());
        f(&mut w)?;
        w.flush().map_err(|e| Error::io(&dest, e))
    }

    pub fn commit(self) -> Result<()> {
        let dest = self.dest;
        self.tmp
            .as_file()
            .sync_all()
            .map_err(|e| Error::io(&dest, e))?;
        self.tmp
            .persist(&dest)
            .map_err(|e| Error::io(&dest, e.error))?;
        Ok(())
    }
}

/// A group of outputs that become visible together.
#[derive(Default)]
pub struct OutputSet {
    items: Vec<StagedOutput>,
}

impl OutputSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Stage `dest`; returns its index in the set.
    pub fn stage(&mut self, dest: impl AsRef<Path>) -> Result<usize> {
        self.items.push(StagedOutput::new(dest)?);
        Ok(self.items.len() - 1)
    }

    pub fn get(&mut self, i: usize) -> &mut StagedOutput {
        &mut self.items[i]
    }

    /// Stage `dest` and fill it in one step.
    pub fn write<F>(&mut self, dest: impl AsRef<Path>, f: F) -> Result<()>
    where
        F: FnOnce(&mut BufWriter<&mut File>) -> Result<()>,
    {
        let i = self.stage(dest)?;
        self.items[i].write_with(f)
    }

    pub fn commit(self) -> Result<()> {
        for it in self.items {
            it.commit()?;
        }
        Ok(())
    }
}

pub(crate) fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |e| Error::io(path, e)
}

/// Hex SHA-256 of `bytes`, logged with every run.
pub fn digest(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    #[test]
    fn commit_makes_files_visible() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.txt");
        let b = dir.path().join("b.txt");
        let mut set = OutputSet::new();
        set.write(&a, |w| w.write_all(b"one").map_err(io_err(&a))).unwrap();
        set.write(&b, |w| w.write_all(b"two").map_err(io_err(&b))).unwrap();
        assert!(!a.exists() && !b.exists());
        set.commit().unwrap();
        assert_eq!(fs::read_to_string(&a).unwrap(), "one");
        assert_eq!(fs::read_to_string(&b).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 2);
    }

    #[test]
    fn dropped_set_leaves_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.txt");
        {
            let mut set = OutputSet::new();
            set.write(&a, |w| w.write_all(b"one").map_err(io_err(&a))).unwrap();
            let r: Result<()> = set.write(dir.path().join("b.txt"), |_| Err(Error::Config("boom".into())));
            assert!(r.is_err());
        }
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn digest_is_sha256() {
        assert_eq!(
            digest(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
