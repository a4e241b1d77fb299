//! The virtual machine: session and environment state, and the bytecode
//! dispatcher that routes each instruction to its executor.
//!
//! Two rules shape everything here. Mutating instructions succeed
//! silently (listings come from the `show` and `describe` families), and
//! every failure is fail-safe: an instruction either completes or leaves
//! the session and environment exactly as they were.

use std::collections::BTreeMap;
use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::Command;

use indexmap::IndexMap;
use thiserror::Error;

use crate::bytecode::{decode_selector, decode_value, Bytecode, Opcode};
use crate::dataframe::{DataError, DataFrame, MultiDataFrame, RenameAxis};
use crate::persistence::{csv, session as session_file, PersistError};
use crate::plugin::{run_entry, DiscoveryResult, ParameterSet, PluginDescriptor, RunError};
use crate::value::{BinOp, CastType, CellValue};

/// Per-process settings. `starting_cwd` is fixed at startup; `cwd` moves
/// under `set cwd`, `set rcwd`, and `set ocwd`.
#[derive(Clone, Debug, PartialEq)]
pub struct Environment {
    pub cwd: PathBuf,
    starting_cwd: PathBuf,
    pub separator: char,
    pub fillin: Option<CellValue>,
    pub display_ast: bool,
}

impl Environment {
    pub fn new(starting_cwd: PathBuf) -> Environment {
        Environment {
            cwd: starting_cwd.clone(),
            starting_cwd,
            separator: ',',
            fillin: None,
            display_ast: false,
        }
    }

    pub fn starting_cwd(&self) -> &Path {
        &self.starting_cwd
    }

    /// A path from user input: absolute paths pass through, relative ones
    /// resolve against the current working directory.
    pub fn resolve(&self, path: &str) -> PathBuf {
        let p = Path::new(path);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.cwd.join(p)
        }
    }
}

/// Everything a run accumulates: frames, parameter sets, the plugin
/// inventory, and the statement history. `history` and `ast_history` are
/// index-aligned; entry i holds the i+1'th accepted statement.
#[derive(Clone)]
pub struct Session {
    pub mdf: MultiDataFrame,
    pub parameters: IndexMap<String, ParameterSet>,
    pub plugins_loaded: Vec<String>,
    pub plugins_load_failed: Vec<(String, String)>,
    pub plugin_registry: BTreeMap<String, PluginDescriptor>,
    pub history: Vec<String>,
    pub ast_history: Vec<String>,
}

impl Session {
    pub fn new(discovery: DiscoveryResult) -> Session {
        Session {
            mdf: MultiDataFrame::new(),
            parameters: IndexMap::new(),
            plugins_loaded: discovery.loaded,
            plugins_load_failed: discovery.failed,
            plugin_registry: discovery.plugins,
            history: Vec::new(),
            ast_history: Vec::new(),
        }
    }

    /// A session with no plugins at all; mostly for tests.
    pub fn empty() -> Session {
        Session::new(DiscoveryResult::default())
    }

    /// Record one accepted statement's raw text and formatted AST.
    pub fn record(&mut self, raw: &str, formatted: &str) {
        self.history.push(raw.to_string());
        self.ast_history.push(formatted.to_string());
    }
}

/// What one instruction produced: text for the user (often empty) and
/// whether session or environment state changed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExecResult {
    pub output: String,
    pub mutated: bool,
}

impl ExecResult {
    fn silent() -> ExecResult {
        ExecResult { output: String::new(), mutated: true }
    }

    fn listing(output: String) -> ExecResult {
        ExecResult { output, mutated: false }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum VmError {
    #[error("no dataframe named {0:?}")]
    UnknownDataFrame(String),
    #[error("no parameter set named {0:?}")]
    UnknownParameterSet(String),
    #[error("no plugin named {0:?}")]
    UnknownPlugin(String),
    #[error("a dataframe named {0:?} already exists")]
    DuplicateFrameName(String),
    #[error("a parameter set named {0:?} already exists")]
    DuplicateParameterName(String),
    #[error("parameter set {param:?} has no {slot} dataframe")]
    EmptySlot { param: String, slot: String },
    #[error("parameter set {0:?} has no input dataframe bound")]
    MissingInputFrame(String),
    #[error("plugin run failed: {0}")]
    PluginFailure(String),
    #[error("parameter key {0:?} cannot be changed")]
    ImmutableParameterKey(String),
    #[error("no such directory: {}", .0.display())]
    MissingDirectory(PathBuf),
    #[error("bad {what}: {got:?}")]
    BadValue { what: &'static str, got: String },
    #[error("could not start a shell: {0}")]
    SpawnFailure(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Persist(#[from] PersistError),
}

/// Execute one instruction against the session and environment.
pub fn execute(b: &Bytecode, s: &mut Session, e: &mut Environment) -> Result<ExecResult, VmError> {
    let ops = b.operands();
    match b.opcode() {
        Opcode::Cast => {
            let t = CastType::from_keyword(&ops[0])
                .ok_or_else(|| VmError::BadValue { what: "cast datatype", got: ops[0].clone() })?;
            let selector = decode_selector(&ops[1]);
            let df = s
                .mdf
                .get_mut(&ops[2])
                .ok_or_else(|| VmError::UnknownDataFrame(ops[2].clone()))?;
            df.cast_values(&selector, t)?;
            Ok(ExecResult::silent())
        }
        Opcode::DelDataframe => {
            s.mdf
                .remove(&ops[0])
                .ok_or_else(|| VmError::UnknownDataFrame(ops[0].clone()))?;
            Ok(ExecResult::silent())
        }
        Opcode::DelParam => {
            s.parameters
                .shift_remove(&ops[0])
                .ok_or_else(|| VmError::UnknownParameterSet(ops[0].clone()))?;
            Ok(ExecResult::silent())
        }
        Opcode::Describe => {
            let df = s
                .mdf
                .get(&ops[0])
                .ok_or_else(|| VmError::UnknownDataFrame(ops[0].clone()))?;
            Ok(ExecResult::listing(df.describe().to_string()))
        }
        Opcode::DuplicateFrame => {
            let copy = frame_for_copy(s, &ops[0], &ops[1])?.select_all(&ops[1]);
            s.mdf.attach(copy)?;
            Ok(ExecResult::silent())
        }
        Opcode::GreedySearch => {
            let op = decode_binop(&ops[2])?;
            let value = decode_value(&ops[3]);
            let copy = frame_for_copy(s, &ops[0], &ops[1])?.select_greedy(&ops[1], op, &value);
            s.mdf.attach(copy)?;
            Ok(ExecResult::silent())
        }
        Opcode::IdSearch => {
            let op = decode_binop(&ops[3])?;
            let value = decode_value(&ops[4]);
            let copy =
                frame_for_copy(s, &ops[0], &ops[1])?.select_by_series(&ops[1], &ops[2], op, &value)?;
            s.mdf.attach(copy)?;
            Ok(ExecResult::silent())
        }
        Opcode::LoadCsv1 | Opcode::LoadCsv2 => {
            if s.mdf.contains(&ops[1]) {
                return Err(VmError::DuplicateFrameName(ops[1].clone()));
            }
            let has_header = b.opcode() == Opcode::LoadCsv1;
            let df = csv::load_csv(&ops[0], has_header, e, &ops[1])?;
            s.mdf.attach(df)?;
            Ok(ExecResult::silent())
        }
        Opcode::LoadSession => {
            let path = e.resolve(&ops[0]);
            let data = session_file::load_session(&path)?;
            s.mdf = data.mdf;
            s.parameters = data.parameters;
            e.cwd = data.environment.cwd;
            e.separator = data.environment.separator;
            e.fillin = data.environment.fillin;
            e.display_ast = data.environment.display_ast;
            Ok(ExecResult::silent())
        }
        Opcode::MergeLabels1 | Opcode::MergeLabels2 => {
            let replace = b.opcode() == Opcode::MergeLabels2;
            let src = s
                .mdf
                .get(&ops[0])
                .ok_or_else(|| VmError::UnknownDataFrame(ops[0].clone()))?
                .clone();
            let dst = s
                .mdf
                .get_mut(&ops[1])
                .ok_or_else(|| VmError::UnknownDataFrame(ops[1].clone()))?;
            dst.merge_labels(&src, replace)?;
            Ok(ExecResult::silent())
        }
        Opcode::MergeSeries => {
            let src = s
                .mdf
                .get(&ops[1])
                .ok_or_else(|| VmError::UnknownDataFrame(ops[1].clone()))?
                .clone();
            let names = decode_selector(&ops[0]).resolve(&src)?;
            let dst = s
                .mdf
                .get_mut(&ops[2])
                .ok_or_else(|| VmError::UnknownDataFrame(ops[2].clone()))?;
            dst.merge_series(&names, &src)?;
            Ok(ExecResult::silent())
        }
        Opcode::NewDataframe => {
            if s.mdf.contains(&ops[0]) {
                return Err(VmError::DuplicateFrameName(ops[0].clone()));
            }
            let set = s
                .parameters
                .get(&ops[1])
                .ok_or_else(|| VmError::UnknownParameterSet(ops[1].clone()))?;
            let slot = match ops[2].as_str() {
                "dataframe" => &set.input_frame,
                "results" => &set.results_frame,
                other => {
                    return Err(VmError::BadValue { what: "dataframe slot", got: other.to_string() })
                }
            };
            let frame = slot.as_ref().ok_or_else(|| VmError::EmptySlot {
                param: ops[1].clone(),
                slot: ops[2].clone(),
            })?;
            let mut copy = frame.clone();
            copy.set_name(&ops[0]);
            s.mdf.attach(copy)?;
            Ok(ExecResult::silent())
        }
        Opcode::NewParam => {
            let descriptor = s
                .plugin_registry
                .get(&ops[0])
                .ok_or_else(|| VmError::UnknownPlugin(ops[0].clone()))?;
            if s.parameters.contains_key(&ops[1]) {
                return Err(VmError::DuplicateParameterName(ops[1].clone()));
            }
            let set = descriptor.default_parameters.clone();
            s.parameters.insert(ops[1].clone(), set);
            Ok(ExecResult::silent())
        }
        Opcode::PythonShell => {
            if !std::io::stdin().is_terminal() {
                return Err(VmError::SpawnFailure(
                    "standard input is not an interactive terminal".to_string(),
                ));
            }
            let shell = std::env::var("SHELL").unwrap_or_else(|_| "/bin/sh".to_string());
            let status = Command::new(&shell)
                .current_dir(&e.cwd)
                .status()
                .map_err(|err| VmError::SpawnFailure(err.to_string()))?;
            let note = if status.success() {
                String::new()
            } else {
                format!("shell exited with {status}")
            };
            Ok(ExecResult { output: note, mutated: false })
        }
        Opcode::RenameSeries | Opcode::RenameLabels => {
            let axis = if b.opcode() == Opcode::RenameSeries {
                RenameAxis::Series
            } else {
                RenameAxis::Labels
            };
            let df = s
                .mdf
                .get_mut(&ops[0])
                .ok_or_else(|| VmError::UnknownDataFrame(ops[0].clone()))?;
            df.rename(axis, &ops[1], &ops[2])?;
            Ok(ExecResult::silent())
        }
        Opcode::RunPlugin => {
            let set = s
                .parameters
                .get(&ops[0])
                .ok_or_else(|| VmError::UnknownParameterSet(ops[0].clone()))?;
            let descriptor = s
                .plugin_registry
                .get(set.plugin_name())
                .ok_or_else(|| VmError::UnknownPlugin(set.plugin_name().to_string()))?;
            let finished = match run_entry(&descriptor.entry, set, &ops[0]) {
                Ok(finished) => finished,
                Err(RunError::MissingInputFrame) => {
                    return Err(VmError::MissingInputFrame(ops[0].clone()))
                }
                Err(RunError::PluginFailure(msg)) => return Err(VmError::PluginFailure(msg)),
            };
            s.parameters.insert(ops[0].clone(), finished);
            Ok(ExecResult::silent())
        }
        Opcode::SaveCsv => {
            let df = s
                .mdf
                .get(&ops[0])
                .ok_or_else(|| VmError::UnknownDataFrame(ops[0].clone()))?;
            csv::save_csv(df, &ops[1], e)?;
            Ok(ExecResult { output: String::new(), mutated: false })
        }
        Opcode::SaveSession => {
            let path = e.resolve(&ops[0]);
            session_file::save_session(&path, s, e)?;
            Ok(ExecResult { output: String::new(), mutated: false })
        }
        Opcode::Set => exec_set(ops, s, e),
        Opcode::Show => Ok(ExecResult::listing(exec_show(ops, s, e)?)),
    }
}

/// Source frame for the select family, after checking the target name is
/// free. Borrow note: the returned reference pins `s.mdf`, so callers
/// finish with it before attaching.
fn frame_for_copy<'a>(
    s: &'a Session,
    src: &str,
    dst: &str,
) -> Result<&'a DataFrame, VmError> {
    if s.mdf.contains(dst) {
        return Err(VmError::DuplicateFrameName(dst.to_string()));
    }
    s.mdf
        .get(src)
        .ok_or_else(|| VmError::UnknownDataFrame(src.to_string()))
}

fn decode_binop(symbol: &str) -> Result<BinOp, VmError> {
    BinOp::from_symbol(symbol)
        .ok_or_else(|| VmError::BadValue { what: "comparison operator", got: symbol.to_string() })
}

fn exec_set(ops: &[String], s: &mut Session, e: &mut Environment) -> Result<ExecResult, VmError> {
    match ops[0].as_str() {
        "displayast" => {
            e.display_ast = match ops[1].as_str() {
                "true" => true,
                "false" => false,
                other => {
                    return Err(VmError::BadValue {
                        what: "displayast value (true or false)",
                        got: other.to_string(),
                    })
                }
            };
            Ok(ExecResult::silent())
        }
        "cwd" => {
            let target = PathBuf::from(&ops[1]);
            if !target.is_dir() {
                return Err(VmError::MissingDirectory(target));
            }
            e.cwd = target;
            Ok(ExecResult::silent())
        }
        "separator" => {
            let mut chars = ops[1].chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => {
                    e.separator = c;
                    Ok(ExecResult::silent())
                }
                _ => Err(VmError::BadValue { what: "separator", got: ops[1].clone() }),
            }
        }
        "fillin" => {
            e.fillin = Some(decode_value(&ops[1]));
            Ok(ExecResult::silent())
        }
        "parameter" => exec_set_parameter(s, &ops[1], &ops[2], &ops[3]),
        "rcwd" => {
            let target = e.cwd.join(&ops[1]);
            if !target.is_dir() {
                return Err(VmError::MissingDirectory(target));
            }
            e.cwd = target;
            Ok(ExecResult::silent())
        }
        "ocwd" => {
            e.cwd = e.starting_cwd.clone();
            Ok(ExecResult::silent())
        }
        other => Err(VmError::BadValue { what: "set option", got: other.to_string() }),
    }
}

/// `set parameter <key> in <param> as <value>`. The key "dataframe" binds
/// a deep copy of the named frame as the set's input; later changes to
/// the frame do not reach the set. Three keys have dedicated fields;
/// plugin_name is immutable; everything else lands in options.
fn exec_set_parameter(
    s: &mut Session,
    key: &str,
    param: &str,
    value: &str,
) -> Result<ExecResult, VmError> {
    if key == "dataframe" {
        let frame = s
            .mdf
            .get(value)
            .ok_or_else(|| VmError::UnknownDataFrame(value.to_string()))?
            .clone();
        let set = s
            .parameters
            .get_mut(param)
            .ok_or_else(|| VmError::UnknownParameterSet(param.to_string()))?;
        set.input_frame = Some(frame);
        return Ok(ExecResult::silent());
    }
    let set = s
        .parameters
        .get_mut(param)
        .ok_or_else(|| VmError::UnknownParameterSet(param.to_string()))?;
    match key {
        "plugin_name" => return Err(VmError::ImmutableParameterKey(key.to_string())),
        "analysis_name" => set.analysis_name = Some(value.to_string()),
        "analytical_method" => set.analytical_method = Some(value.to_string()),
        "narrative" => set.narrative = Some(value.to_string()),
        _ => {
            set.options.insert(key.to_string(), value.to_string());
        }
    }
    Ok(ExecResult::silent())
}

fn exec_show(ops: &[String], s: &Session, e: &Environment) -> Result<String, VmError> {
    match ops[0].as_str() {
        "asthistory" => Ok(numbered(&s.ast_history)),
        "environment" => {
            let fillin = match &e.fillin {
                Some(v) => v.render(),
                None => "(not set)".to_string(),
            };
            Ok(format!(
                "cwd: {}\ndisplay_ast: {}\nfillin: {}\nseparator: {}",
                e.cwd.display(),
                e.display_ast,
                fillin,
                e.separator
            ))
        }
        "history" => Ok(numbered(&s.history)),
        "plugin" if ops[1] == "list" => {
            let mut out = format!("Loaded plugin(s) (n = {}):", s.plugins_loaded.len());
            for name in &s.plugins_loaded {
                out.push('\n');
                out.push_str(name);
            }
            out.push_str(&format!(
                "\nFailed plugin folder(s) (n = {}):",
                s.plugins_load_failed.len()
            ));
            for (folder, reason) in &s.plugins_load_failed {
                out.push_str(&format!("\n{folder} ({reason})"));
            }
            Ok(out)
        }
        "plugin" => {
            let descriptor = s
                .plugin_registry
                .get(&ops[1])
                .ok_or_else(|| VmError::UnknownPlugin(ops[1].clone()))?;
            let m = &descriptor.manifest;
            let mut out = format!(
                "Plugin Name: {}\nRelease: {}\nDescription: {}",
                m.plugin_name, m.release, m.description
            );
            if !m.instructions.is_empty() {
                out.push_str("\nInstructions:\n");
                out.push_str(&m.instructions);
            }
            Ok(out)
        }
        "session" => {
            let frames: Vec<&str> = s.mdf.names().collect();
            let params: Vec<&str> = s.parameters.keys().map(String::as_str).collect();
            let plugins: Vec<&str> = s.plugins_loaded.iter().map(String::as_str).collect();
            Ok(format!(
                "Dataframe(s) (n = {}): {}\nParameter set(s) (n = {}): {}\nPlugin(s) loaded (n = {}): {}",
                frames.len(),
                frames.join(", "),
                params.len(),
                params.join(", "),
                plugins.len(),
                plugins.join(", ")
            ))
        }
        "dataframe" => {
            let mut out = format!("Current Dataframe(s) (n = {}):", s.mdf.len());
            for df in s.mdf.iter() {
                out.push_str(&format!(
                    "\n\nDataframe Name: {}\nSeries Names: {}\nNumber of Series: {}\nNumber of Labels (data rows): {}",
                    df.name(),
                    df.series_names().join(","),
                    df.n_series(),
                    df.n_rows()
                ));
            }
            Ok(out)
        }
        "parameter" => {
            let mut out = format!("Current Parameter Set(s) (n = {}):", s.parameters.len());
            for (name, set) in &s.parameters {
                out.push_str(&format!("\n\nParameter Set Name: {name}"));
                out.push_str(&format!("\nPlugin Name: {}", set.plugin_name()));
                if !s.plugin_registry.contains_key(set.plugin_name()) {
                    out.push_str(" (not loaded)");
                }
                if let Some(v) = &set.analysis_name {
                    out.push_str(&format!("\nAnalysis Name: {v}"));
                }
                if let Some(v) = &set.analytical_method {
                    out.push_str(&format!("\nAnalytical Method: {v}"));
                }
                if let Some(v) = &set.narrative {
                    out.push_str(&format!("\nNarrative: {v}"));
                }
                for (k, v) in &set.options {
                    out.push_str(&format!("\nOption {k}: {v}"));
                }
                match &set.input_frame {
                    Some(df) => out.push_str(&format!(
                        "\nInput Dataframe: {} ({} series, {} rows)",
                        df.name(),
                        df.n_series(),
                        df.n_rows()
                    )),
                    None => out.push_str("\nInput Dataframe: (not bound)"),
                }
                match &set.results_frame {
                    Some(df) => out.push_str(&format!(
                        "\nResults Dataframe: {} ({} series, {} rows)",
                        df.name(),
                        df.n_series(),
                        df.n_rows()
                    )),
                    None => out.push_str("\nResults Dataframe: (not produced)"),
                }
            }
            Ok(out)
        }
        other => Err(VmError::BadValue { what: "show target", got: other.to_string() }),
    }
}

fn numbered(entries: &[String]) -> String {
    entries
        .iter()
        .enumerate()
        .map(|(i, text)| format!("{}: {}", i + 1, text))
        .collect::<Vec<_>>()
        .join("\n")
}
