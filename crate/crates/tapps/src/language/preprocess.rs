//! Script preprocessor. `@include <path>` lines splice in another script,
//! resolved relative to the including file, with cycle detection.

use std::io;
use std::path::{Component, Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PreprocessError {
    #[error("script file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("cyclic include: {}", join_chain(.0))]
    CyclicInclude(Vec<PathBuf>),
    #[error("cannot read script '{}': {reason}", path.display())]
    ReadFailure { path: PathBuf, reason: String },
    #[error("@include is missing a file path")]
    MissingIncludePath,
}

fn join_chain(chain: &[PathBuf]) -> String {
    chain
        .iter()
        .map(|p| p.display().to_string())
        .collect::<Vec<_>>()
        .join(" -> ")
}

/// A script after include expansion: the raw statement lines, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptSource {
    pub path: PathBuf,
    pub lines: Vec<String>,
}

/// Expand a script through an arbitrary path-to-text resolver.
pub fn preprocess<F>(root: &Path, reader: &mut F) -> Result<ScriptSource, PreprocessError>
where
    F: FnMut(&Path) -> io::Result<String>,
{
    let mut lines = Vec::new();
    let mut stack = Vec::new();
    expand(&lexical_normalize(root), reader, &mut stack, &mut lines)?;
    Ok(ScriptSource {
        path: root.to_path_buf(),
        lines,
    })
}

/// Expand a script from the file system.
pub fn load_script(root: &Path) -> Result<ScriptSource, PreprocessError> {
    preprocess(root, &mut |p: &Path| std::fs::read_to_string(p))
}

fn expand<F>(
    path: &Path,
    reader: &mut F,
    stack: &mut Vec<PathBuf>,
    out: &mut Vec<String>,
) -> Result<(), PreprocessError>
where
    F: FnMut(&Path) -> io::Result<String>,
{
    if let Some(idx) = stack.iter().position(|p| p == path) {
        let mut chain: Vec<PathBuf> = stack[idx..].to_vec();
        chain.push(path.to_path_buf());
        return Err(PreprocessError::CyclicInclude(chain));
    }
    let text = reader(path).map_err(|e| {
        if e.kind() == io::ErrorKind::NotFound {
            PreprocessError::FileNotFound(path.to_path_buf())
        } else {
            PreprocessError::ReadFailure {
                path: path.to_path_buf(),
                reason: e.to_string(),
            }
        }
    })?;
    stack.push(path.to_path_buf());
    for raw in text.lines() {
        match include_target(raw) {
            Some(target) => {
                let target = target?;
                let dir = path.parent().unwrap_or_else(|| Path::new(""));
                let resolved = lexical_normalize(&dir.join(target));
                expand(&resolved, reader, stack, out)?;
            }
            None => out.push(raw.to_string()),
        }
    }
    stack.pop();
    Ok(())
}

/// Recognize an `@include` line and extract its target. Surrounding double
/// quotes are tolerated. Returns None for ordinary statement lines.
fn include_target(line: &str) -> Option<Result<&str, PreprocessError>> {
    let trimmed = line.trim_start();
    let rest = trimmed.strip_prefix("@include")?;
    if !rest.is_empty() && !rest.starts_with(char::is_whitespace) {
        return None;
    }
    let mut target = rest.trim();
    if target.len() >= 2 && target.starts_with('"') && target.ends_with('"') {
        target = &target[1..target.len() - 1];
    }
    if target.is_empty() {
        Some(Err(PreprocessError::MissingIncludePath))
    } else {
        Some(Ok(target))
    }
}

/// Collapse `.` and `..` components without touching the file system, so
/// two spellings of the same file compare equal for cycle detection.
fn lexical_normalize(p: &Path) -> PathBuf {
    let mut out = PathBuf::new();
    for c in p.components() {
        match c {
            Component::CurDir => {}
            Component::ParentDir => {
                let popped = matches!(
                    out.components().next_back(),
                    Some(Component::Normal(_))
                ) && out.pop();
                if !popped {
                    out.push("..");
                }
            }
            other => out.push(other.as_os_str()),
        }
    }
    if out.as_os_str().is_empty() {
        out.push(".");
    }
    out
}
