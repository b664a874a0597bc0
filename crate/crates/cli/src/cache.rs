//! On-disk cache of sieved tables, keyed by kind and length.

use std::path::Path;

use wsum_core::arith::sieve;
use wsum_core::{FuncKind, FuncTable, Result};

/// Loads `kind` on `[1, n]` from `dir` when a matching file exists, otherwise
/// sieves it and stores the result. A corrupt or mismatched file is replaced.
pub fn table(dir: Option<&Path>, kind: FuncKind, n: u64) -> Result<FuncTable> {
    let Some(dir) = dir else {
        return sieve(kind, n);
    };
    let path = dir.join(format!("{}_{n}.tbl", kind.name()));
    if let Ok(t) = FuncTable::load(&path) {
        if t.kind() == kind && t.n_max() == n {
            return Ok(t);
        }
    }
    let t = sieve(kind, n)?;
    std::fs::create_dir_all(dir)?;
    // Write then rename so concurrent runs never read a half-written file.
    let tmp = dir.join(format!(".{}_{n}.{}.tmp", kind.name(), std::process::id()));
    t.save(&tmp)?;
    std::fs::rename(&tmp, &path)?;
    Ok(t)
}
