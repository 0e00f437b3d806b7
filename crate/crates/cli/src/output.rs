use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

/// A failed command: message for standard error plus the exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub msg: String,
}

pub const EXIT_IO: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_DEVIATION: u8 = 3;

impl Failure {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_INVALID,
            msg: msg.into(),
        }
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        Self {
            code: EXIT_IO,
            msg: format!("{}: {err}", path.display()),
        }
    }
}

/// Core errors are all input or validation problems.
pub fn in_file(path: &Path) -> impl Fn(dmimp_core::Error) -> Failure + '_ {
    move |e| Failure::invalid(format!("{}: {e}", path.display()))
}

pub fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

/// Write through a temporary file in the target directory, then rename, so
/// readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| Failure::io(&dir, e))?;
    tmp.write_all(contents.as_bytes())
        .map_err(|e| Failure::io(path, e))?;
    tmp.persist(path).map_err(|e| Failure::io(path, e.error))?;
    Ok(())
}

/// `<dir>/<stem>_bands.<ext>` next to `path`.
pub fn sibling_with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}{suffix}"),
    };
    path.with_file_name(name)
}
