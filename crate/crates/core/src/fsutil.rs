use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

/// Writes through a sibling temp file and renames it into place.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    write_all_atomic(&[(path.to_path_buf(), bytes.to_vec())])
}

/// Writes every file to a temp sibling first; renames only once all writes
/// succeeded. On failure the temp files are removed and no target is touched.
pub(crate) fn write_all_atomic(files: &[(PathBuf, Vec<u8>)]) -> Result<()> {
    let mut written: Vec<PathBuf> = Vec::new();
    let result = (|| {
        for (path, bytes) in files {
            let tmp = tmp_path(path);
            let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
            written.push(tmp.clone());
            f.write_all(bytes)
                .and_then(|_| f.sync_all())
                .map_err(|e| Error::io(&tmp, e))?;
        }
        Ok(())
    })();
    if let Err(e) = result {
        for tmp in &written {
            let _ = fs::remove_file(tmp);
        }
        return Err(e);
    }
    for (path, _) in files {
        let tmp = tmp_path(path);
        fs::rename(&tmp, path).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}
