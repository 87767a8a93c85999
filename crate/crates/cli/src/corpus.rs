use std::path::{Path, PathBuf};

use anyhow::Result;
use serde_json::{json, Value};
use zxverify::flow::{find_flow, verify_determinism_with};
use zxverify::mbqc::{geometry, parse_pattern};

use crate::input::input_error;
use crate::{emit, Format, Opts, Status};

pub const BUNDLED: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/corpus");

/// Outcome for one corpus file next to what its sidecar expects.
struct Entry {
    name: String,
    flow: bool,
    verdict: String,
    expected: Value,
}

impl Entry {
    fn matches(&self) -> bool {
        self.expected["verdict"] == self.verdict.as_str() && self.expected["flow"] == self.flow
    }
}

/// `<name>.mc` files, sorted by name.
pub fn patterns(dir: &Path) -> Result<Vec<PathBuf>> {
    let rd = std::fs::read_dir(dir).map_err(|e| input_error(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = rd
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "mc"))
        .collect();
    files.sort();
    Ok(files)
}

/// The `<name>.expect.json` sidecar of a corpus pattern.
pub fn sidecar(path: &Path) -> PathBuf {
    path.with_extension("expect.json")
}

fn run_one(o: &Opts, path: &Path) -> Result<Entry> {
    let text = std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    let p = parse_pattern(&text).map_err(|e| input_error(format!("{}:{e}", path.display())))?;
    let side = sidecar(path);
    let expected: Value = std::fs::read_to_string(&side)
        .map_err(|e| input_error(format!("{}: {e}", side.display())))
        .and_then(|s| serde_json::from_str(&s).map_err(|e| input_error(format!("{}: {e}", side.display()))))?;
    let r = verify_determinism_with(&p, &o.determinism()).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    Ok(Entry {
        name: path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
        flow: find_flow(&geometry(&p)).is_some(),
        verdict: serde_json::to_value(r.verdict)?.as_str().unwrap_or_default().to_string(),
        expected,
    })
}

/// Verifies every pattern of a corpus, one thread per file. Succeeds iff
/// each result agrees with its sidecar.
pub fn verify_corpus(o: &Opts, dir: &Path) -> Result<Status> {
    let files = patterns(dir)?;
    if files.is_empty() {
        return Err(input_error(format!("{}: no .mc files", dir.display())));
    }
    let entries = std::thread::scope(|s| {
        let handles: Vec<_> = files.iter().map(|f| s.spawn(move || run_one(o, f))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("corpus worker panicked"))
            .collect::<Result<Vec<_>>>()
    })?;
    let ok = entries.iter().all(Entry::matches);
    match o.format {
        Format::Json => {
            let rows: Vec<Value> = entries
                .iter()
                .map(|e| {
                    json!({
                        "file": e.name,
                        "flow": e.flow,
                        "verdict": e.verdict,
                        "expected": e.expected,
                        "matches": e.matches(),
                    })
                })
                .collect();
            emit(&serde_json::to_string(&json!({ "seed": o.seed, "results": rows }))?);
        }
        _ => {
            out!("seed {}", o.seed);
            for e in &entries {
                let mark = if e.matches() { "ok" } else { "MISMATCH" };
                let flow = if e.flow { "flow" } else { "no-flow" };
                out!("{} {flow} {} {mark}", e.name, e.verdict);
            }
        }
    }
    Ok(Status::from_bool(ok))
}
