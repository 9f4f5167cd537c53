//! Fixed-format numeric output shared by the CSV and JSON writers.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

/// Version stamped into every JSON report.
pub const SCHEMA_VERSION: u32 = 1;

/// 17 significant digits in scientific notation, so reruns are byte-identical
/// and values round-trip exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_format_round_trips() {
        for v in [0.1, -1.0 / 3.0, 6.02e23, 0.0, 1e-300] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
    }
}
