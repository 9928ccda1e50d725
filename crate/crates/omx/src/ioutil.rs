//! Small file-system helpers shared by trace and CLI output paths.

use std::path::Path;

use crate::error::Result;

/// Write a file atomically: write to `<path>.tmp` in the same directory,
/// then rename over the target. A crashed run never leaves a half-written
/// output behind.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = match path.extension() {
        Some(ext) => path.with_extension(format!("{}.tmp", ext.to_string_lossy())),
        None => path.with_extension("tmp"),
    };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
