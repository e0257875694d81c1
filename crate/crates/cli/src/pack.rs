//! The `pack` command, kept apart from argument parsing so tests can drive it.

use std::io::Write;
use std::path::PathBuf;

use squarepack::verifier::audit_all;
use squarepack::{Packer, PackerConfig, PlacementOutcome, RejectReason};

use crate::input::read_sequence;
use crate::record::Record;
use crate::render::render;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

#[derive(Debug, Clone, Default)]
pub struct PackOptions {
    pub input: PathBuf,
    pub verify: bool,
    pub svg: Option<PathBuf>,
    pub config: PackerConfig,
}

/// Packs the input file, writing one record per square to `log` and notes to
/// `diag`. Returns the process exit code.
pub fn pack(opts: &PackOptions, log: &mut dyn Write, diag: &mut dyn Write) -> std::io::Result<u8> {
    let heights = match read_sequence(&opts.input) {
        Ok(h) => h,
        Err(e) => {
            writeln!(diag, "error: {e}")?;
            return Ok(EXIT_INPUT);
        }
    };
    let mut packer = Packer::new(opts.config);
    let mut code = EXIT_OK;
    for (id, &h) in heights.iter().enumerate() {
        let out = packer.place(h);
        log.write_all(Record::new(id, h, &out).to_line().as_bytes())?;
        if let PlacementOutcome::Rejected { reason, detail } = &out {
            writeln!(diag, "square {id} (height {h}) rejected: {}: {detail}", reason.as_str())?;
            code = match reason {
                RejectReason::InvalidHeight => EXIT_INPUT,
                _ => EXIT_FAILED,
            };
            break;
        }
    }
    log.flush()?;
    let snap = packer.snapshot();
    writeln!(
        diag,
        "{} of {} squares placed, area {:.9}",
        snap.placements.len(),
        heights.len(),
        snap.cumulative_area
    )?;
    if let Some(path) = &opts.svg {
        if let Err(e) = svg::save(path, &render(&snap)) {
            writeln!(diag, "error: cannot write {}: {e}", path.display())?;
            return Ok(EXIT_INPUT);
        }
    }
    if opts.verify {
        let report = audit_all(&snap);
        write!(diag, "{report}")?;
        if !report.passed() && code == EXIT_OK {
            code = EXIT_FAILED;
        }
    }
    Ok(code)
}
