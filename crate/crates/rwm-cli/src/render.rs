use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use rwm_core::Result;

/// Buffered writer for the artifact: a file when --output is given,
/// stdout otherwise. Diagnostics never go through this.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}
