use std::fmt;
use std::io::Read;
use std::path::{Path, PathBuf};

use zxverify::diagram::Diagram;
use zxverify::mbqc::{parse_pattern, to_diagram, standardize, Pattern};

/// Anything that should end the run with exit status 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

pub fn input_error(msg: impl Into<String>) -> anyhow::Error {
    InputError(msg.into()).into()
}

pub enum Input {
    Pattern(Pattern),
    Diagram(Diagram),
}

impl Input {
    /// The pattern diagram, or the diagram itself.
    pub fn diagram(&self) -> anyhow::Result<Diagram> {
        match self {
            Input::Diagram(d) => Ok(d.clone()),
            Input::Pattern(p) => {
                let std = standardize(p).map_err(|e| input_error(e.to_string()))?;
                to_diagram(&std).map_err(|e| input_error(e.to_string()))
            }
        }
    }

    pub fn pattern(self, what: &str) -> anyhow::Result<Pattern> {
        match self {
            Input::Pattern(p) => Ok(p),
            Input::Diagram(_) => Err(input_error(format!("`{what}` needs a pattern (.mc), got a diagram"))),
        }
    }
}

fn label(path: Option<&Path>) -> String {
    path.map_or_else(|| "<stdin>".to_string(), |p| p.display().to_string())
}

pub fn read_text(path: Option<&Path>) -> anyhow::Result<String> {
    match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| input_error(format!("{}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| input_error(format!("<stdin>: {e}")))?;
            Ok(s)
        }
    }
}

/// `.zxg` files are diagram JSON; everything else, stdin included, is
/// pattern DSL.
pub fn load(path: Option<&PathBuf>) -> anyhow::Result<Input> {
    let path = path.map(PathBuf::as_path);
    let text = read_text(path)?;
    let name = label(path);
    if path.and_then(Path::extension).is_some_and(|e| e == "zxg") {
        Diagram::from_json(&text)
            .map(Input::Diagram)
            .map_err(|e| input_error(format!("{name}: {e}")))
    } else {
        parse_pattern(&text)
            .map(Input::Pattern)
            .map_err(|e| input_error(format!("{name}:{e}")))
    }
}
