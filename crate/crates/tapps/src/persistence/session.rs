//! Whole-session save and load.
//!
//! The file is plain text, line oriented, and self-describing: a magic
//! version line, an `[environment]` section of key/value pairs, one
//! `[dataframe <name>]` block per frame, then one `[parameters <name>]`
//! block per parameter set. Frame data sits in the blocks as CSV, always
//! comma separated regardless of the environment's separator, with each
//! row led by its quoted label. Cell types survive the trip: text is
//! always quoted, integers are bare digits, and reals always carry a
//! decimal point or exponent, so the reader can tell them apart.
//!
//! Parameter sets reference their bound frames with `@ref <name>` when a
//! value-equal frame sits in the session store, and embed a frame block
//! (terminated by `[endframe]`) otherwise. Saving what was just loaded
//! reproduces the file byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;

use crate::dataframe::{DataFrame, MultiDataFrame};
use crate::persistence::csv::{quote_field, Cursor, RawField};
use crate::persistence::PersistError;
use crate::plugin::ParameterSet;
use crate::value::CellValue;
use crate::vm::{Environment, Session};

const MAGIC: &str = "TAPPS-SESSION v1";
const VERSION_PREFIX: &str = "TAPPS-SESSION";

/// Environment keys as stored in a session file. The starting directory
/// is process state and deliberately absent.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvSettings {
    pub cwd: PathBuf,
    pub display_ast: bool,
    pub fillin: Option<CellValue>,
    pub separator: char,
}

/// Everything a session file holds, parsed and validated. The caller
/// commits it; a load that fails leaves the running session untouched.
#[derive(Clone, Debug)]
pub struct SessionFileData {
    pub mdf: MultiDataFrame,
    pub parameters: IndexMap<String, ParameterSet>,
    pub environment: EnvSettings,
}

fn encode_cell(c: &CellValue) -> String {
    match c {
        CellValue::Text(s) => quote_field(s),
        CellValue::Int(i) => i.to_string(),
        CellValue::Real(r) => format!("{r:?}"),
    }
}

fn decode_cell(field: &RawField, line: usize) -> Result<CellValue, PersistError> {
    if field.quoted {
        return Ok(CellValue::text(&field.text));
    }
    if let Ok(i) = field.text.parse::<i64>() {
        return Ok(CellValue::Int(i));
    }
    if let Ok(r) = field.text.parse::<f64>() {
        if let Ok(cell) = CellValue::real(r) {
            return Ok(cell);
        }
    }
    Err(PersistError::FormatError {
        line,
        reason: format!("unreadable cell {:?}", field.text),
    })
}

fn frame_block(df: &DataFrame, out: &mut String) {
    let header: Vec<String> = df.series_names().iter().map(|s| quote_field(s)).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for (label, row) in df.rows() {
        let mut fields = Vec::with_capacity(row.len() + 1);
        fields.push(quote_field(label));
        fields.extend(row.iter().map(encode_cell));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
}

fn frame_binding(key: &str, frame: &Option<DataFrame>, mdf: &MultiDataFrame, out: &mut String) {
    let Some(frame) = frame else {
        return;
    };
    match mdf.get(frame.name()) {
        Some(stored) if stored == frame => {
            out.push_str(&format!("{key}: @ref {}\n", frame.name()));
        }
        _ => {
            out.push_str(&format!("{key}: @embedded {}\n", frame.name()));
            frame_block(frame, out);
            out.push_str("[endframe]\n");
        }
    }
}

/// Serialize the session's frames and parameter sets plus the current
/// environment. Plugin inventories are not written; discovery recomputes
/// them at startup.
pub fn save_session(path: &Path, session: &Session, env: &Environment) -> Result<(), PersistError> {
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    out.push_str("[environment]\n");
    out.push_str(&format!("cwd: {}\n", env.cwd.display()));
    out.push_str(&format!("display_ast: {}\n", env.display_ast));
    if let Some(fill) = &env.fillin {
        out.push_str(&format!("fillin: {}\n", encode_cell(fill)));
    }
    out.push_str(&format!("separator: {}\n", env.separator));
    for df in session.mdf.iter() {
        out.push_str(&format!("[dataframe {}]\n", df.name()));
        frame_block(df, &mut out);
        out.push_str("[end]\n");
    }
    for (name, set) in &session.parameters {
        out.push_str(&format!("[parameters {name}]\n"));
        out.push_str(&format!("plugin_name: {}\n", set.plugin_name()));
        if let Some(v) = &set.analysis_name {
            out.push_str(&format!("analysis_name: {v}\n"));
        }
        if let Some(v) = &set.analytical_method {
            out.push_str(&format!("analytical_method: {v}\n"));
        }
        if let Some(v) = &set.narrative {
            out.push_str(&format!("narrative: {v}\n"));
        }
        for (k, v) in &set.options {
            out.push_str(&format!("option {k}: {v}\n"));
        }
        frame_binding("input", &set.input_frame, &session.mdf, &mut out);
        frame_binding("results", &set.results_frame, &session.mdf, &mut out);
        out.push_str("[end]\n");
    }
    fs::write(path, out).map_err(|e| PersistError::WriteFailure {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

/// Line source with one-line pushback, so section parsers can stop at the
/// next header without consuming it.
struct Lines<'a> {
    cursor: Cursor<'a>,
    pending: Option<(usize, String)>,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Option<(usize, String)> {
        self.pending.take().or_else(|| self.cursor.read_line())
    }

    fn push_back(&mut self, line: (usize, String)) {
        debug_assert!(self.pending.is_none());
        self.pending = Some(line);
    }

    fn line(&self) -> usize {
        match &self.pending {
            Some((n, _)) => *n,
            None => self.cursor.line(),
        }
    }
}

fn bad(line: usize, reason: impl Into<String>) -> PersistError {
    PersistError::FormatError { line, reason: reason.into() }
}

fn split_kv(line: &str) -> Option<(&str, &str)> {
    let (key, rest) = line.split_once(':')?;
    Some((key, rest.strip_prefix(' ').unwrap_or(rest)))
}

/// Parse and validate a session file. Nothing is applied here; the VM
/// replaces its state only after a fully successful parse.
pub fn load_session(path: &Path) -> Result<SessionFileData, PersistError> {
    if !path.is_file() {
        return Err(PersistError::FileNotFound(path.to_path_buf()));
    }
    let text = fs::read_to_string(path).map_err(|e| PersistError::ReadFailure {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    parse_session(&text)
}

fn parse_session(text: &str) -> Result<SessionFileData, PersistError> {
    let mut lines = Lines { cursor: Cursor::new(text), pending: None };
    let Some((_, magic)) = lines.next() else {
        return Err(bad(1, "empty file"));
    };
    if magic != MAGIC {
        if magic.starts_with(VERSION_PREFIX) {
            return Err(PersistError::VersionMismatch(magic));
        }
        return Err(bad(1, "not a session file"));
    }
    match lines.next() {
        Some((_, l)) if l == "[environment]" => {}
        Some((n, l)) => return Err(bad(n, format!("expected [environment], found {l:?}"))),
        None => return Err(bad(2, "expected [environment]")),
    }
    let environment = parse_environment(&mut lines)?;
    let mut mdf = MultiDataFrame::new();
    let mut parameters: IndexMap<String, ParameterSet> = IndexMap::new();
    while let Some((n, line)) = lines.next() {
        if line.is_empty() {
            continue;
        }
        if let Some(name) = section_name(&line, "dataframe") {
            if !parameters.is_empty() {
                return Err(bad(n, "dataframe block after a parameters block"));
            }
            let df = parse_frame_block(&mut lines, "[end]", &name)?;
            mdf.attach(df)?;
        } else if let Some(name) = section_name(&line, "parameters") {
            if parameters.contains_key(&name) {
                return Err(bad(n, format!("duplicate parameters block {name:?}")));
            }
            let set = parse_param_block(&mut lines, &mdf)?;
            parameters.insert(name, set);
        } else {
            return Err(bad(n, format!("unexpected line {line:?}")));
        }
    }
    Ok(SessionFileData { mdf, parameters, environment })
}

fn section_name(line: &str, kind: &str) -> Option<String> {
    let body = line.strip_prefix('[')?.strip_suffix(']')?;
    let rest = body.strip_prefix(kind)?.strip_prefix(' ')?;
    if rest.is_empty() {
        None
    } else {
        Some(rest.to_string())
    }
}

fn parse_environment(lines: &mut Lines) -> Result<EnvSettings, PersistError> {
    let mut cwd = None;
    let mut display_ast = None;
    let mut fillin = None;
    let mut separator = None;
    while let Some((n, line)) = lines.next() {
        if line.starts_with('[') {
            lines.push_back((n, line));
            break;
        }
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = split_kv(&line) else {
            return Err(bad(n, format!("expected key: value, found {line:?}")));
        };
        match key {
            "cwd" => cwd = Some(PathBuf::from(value)),
            "display_ast" => {
                display_ast = Some(match value {
                    "true" => true,
                    "false" => false,
                    other => return Err(bad(n, format!("bad display_ast value {other:?}"))),
                })
            }
            "fillin" => fillin = Some(parse_cell_text(value, n)?),
            "separator" => {
                let mut chars = value.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => separator = Some(c),
                    _ => return Err(bad(n, format!("bad separator value {value:?}"))),
                }
            }
            other => return Err(bad(n, format!("unknown environment key {other:?}"))),
        }
    }
    let end = lines.line();
    Ok(EnvSettings {
        cwd: cwd.ok_or_else(|| bad(end, "missing environment key cwd"))?,
        display_ast: display_ast.ok_or_else(|| bad(end, "missing environment key display_ast"))?,
        fillin,
        separator: separator.ok_or_else(|| bad(end, "missing environment key separator"))?,
    })
}

/// One encoded cell standing alone (the fillin value): parse it as a
/// single one-field record.
fn parse_cell_text(value: &str, line: usize) -> Result<CellValue, PersistError> {
    let mut cursor = Cursor::new(value);
    let record = cursor.read_record(',');
    match record {
        Some(rec) if rec.fields.len() == 1 && cursor.at_end() => decode_cell(&rec.fields[0], line),
        _ => Err(bad(line, format!("expected one cell, found {value:?}"))),
    }
}

fn parse_frame_block(
    lines: &mut Lines,
    terminator: &str,
    name: &str,
) -> Result<DataFrame, PersistError> {
    debug_assert!(lines.pending.is_none(), "frame blocks follow a consumed header");
    let header_line = lines.cursor.line();
    let Some(header) = lines.cursor.read_record(',') else {
        return Err(bad(header_line, "truncated dataframe block"));
    };
    if header.is_marker(terminator) {
        return Err(bad(header.line, "missing dataframe header"));
    }
    let mut df = if header.is_blank() {
        DataFrame::new(name)
    } else {
        let series: Vec<String> = header.fields.iter().map(|f| f.text.clone()).collect();
        DataFrame::with_series(name, series)?
    };
    let width = df.n_series();
    loop {
        let row_line = lines.cursor.line();
        let Some(record) = lines.cursor.read_record(',') else {
            return Err(bad(row_line, "truncated dataframe block"));
        };
        if record.is_marker(terminator) {
            return Ok(df);
        }
        if record.is_blank() {
            continue;
        }
        if record.fields.len() != width + 1 {
            return Err(bad(
                record.line,
                format!("row has {} cells, frame has {} series", record.fields.len() - 1, width),
            ));
        }
        let label = record.fields[0].text.clone();
        let cells = record.fields[1..]
            .iter()
            .map(|f| decode_cell(f, record.line))
            .collect::<Result<Vec<_>, _>>()?;
        df.insert_row(label, cells)?;
    }
}

fn parse_param_block(
    lines: &mut Lines,
    mdf: &MultiDataFrame,
) -> Result<ParameterSet, PersistError> {
    let mut set = match lines.next() {
        Some((_, line)) if line.starts_with("plugin_name: ") => {
            ParameterSet::template(&line["plugin_name: ".len()..])
        }
        Some((n, line)) => return Err(bad(n, format!("expected plugin_name, found {line:?}"))),
        None => return Err(bad(lines.line(), "truncated parameters block")),
    };
    loop {
        let Some((n, line)) = lines.next() else {
            return Err(bad(lines.line(), "truncated parameters block"));
        };
        if line == "[end]" {
            return Ok(set);
        }
        let Some((key, value)) = split_kv(&line) else {
            return Err(bad(n, format!("unexpected line {line:?}")));
        };
        match key {
            "analysis_name" => set.analysis_name = Some(value.to_string()),
            "analytical_method" => set.analytical_method = Some(value.to_string()),
            "narrative" => set.narrative = Some(value.to_string()),
            "input" => set.input_frame = Some(parse_binding(lines, mdf, value, n)?),
            "results" => set.results_frame = Some(parse_binding(lines, mdf, value, n)?),
            _ => match key.strip_prefix("option ") {
                Some(option_key) => {
                    set.options.insert(option_key.to_string(), value.to_string());
                }
                None => return Err(bad(n, format!("unknown parameters key {key:?}"))),
            },
        }
    }
}

fn parse_binding(
    lines: &mut Lines,
    mdf: &MultiDataFrame,
    value: &str,
    line: usize,
) -> Result<DataFrame, PersistError> {
    if let Some(name) = value.strip_prefix("@ref ") {
        return mdf
            .get(name)
            .cloned()
            .ok_or_else(|| bad(line, format!("reference to unknown dataframe {name:?}")));
    }
    if let Some(name) = value.strip_prefix("@embedded ") {
        return parse_frame_block(lines, "[endframe]", name);
    }
    Err(bad(line, format!("expected @ref or @embedded, found {value:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::CellValue as V;

    fn nasty_frame(name: &str) -> DataFrame {
        let mut df = DataFrame::with_series(
            name,
            vec!["plain".into(), "weird, name".into(), "say \"hi\"".into()],
        )
        .unwrap();
        df.insert_row(
            "first",
            vec![V::Int(-7), V::real(5.0).unwrap(), V::text("two\nlines")],
        )
        .unwrap();
        df.insert_row(
            "second, with comma",
            vec![V::Int(0), V::real(1e300).unwrap(), V::text("commas, quotes \"\" and all")],
        )
        .unwrap();
        df.insert_row(
            "3",
            vec![V::text("820"), V::real(0.1 + 0.2).unwrap(), V::text("")],
        )
        .unwrap();
        df
    }

    fn rich_session() -> (Session, Environment) {
        let mut s = Session::empty();
        s.mdf.attach(nasty_frame("STI")).unwrap();
        let mut extra = DataFrame::with_series("tiny", vec!["a".into()]).unwrap();
        extra.insert_row("1", vec![V::Int(1)]).unwrap();
        s.mdf.attach(extra).unwrap();
        s.mdf.attach(DataFrame::new("hollow")).unwrap();

        let mut bound = ParameterSet::template("summarize");
        bound.analysis_name = Some("trialA".into());
        bound.analytical_method = Some("by_series".into());
        bound.input_frame = Some(s.mdf.get("STI").unwrap().clone());
        let mut results = DataFrame::with_series("p1_results", vec!["count".into()]).unwrap();
        results.insert_row("plain", vec![V::Int(2)]).unwrap();
        bound.results_frame = Some(results);
        bound.options.insert("alpha".into(), "0.05".into());
        bound.options.insert("beta".into(), "with spaces".into());
        s.parameters.insert("p1".into(), bound);

        let mut loose = ParameterSet::template("vanished");
        loose.narrative = Some("kept even though the plugin is gone".into());
        s.parameters.insert("p2".into(), loose);

        let mut e = Environment::new(std::env::temp_dir());
        e.separator = ';';
        e.display_ast = true;
        e.fillin = Some(V::text("n/a, really"));
        (s, e)
    }

    #[test]
    fn save_load_save_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let (s, e) = rich_session();
        let p1 = dir.path().join("one.txt");
        let p2 = dir.path().join("two.txt");
        save_session(&p1, &s, &e).unwrap();
        let data = load_session(&p1).unwrap();

        let mut s2 = Session::empty();
        s2.mdf = data.mdf;
        s2.parameters = data.parameters;
        let mut e2 = Environment::new(std::env::temp_dir());
        e2.cwd = data.environment.cwd;
        e2.separator = data.environment.separator;
        e2.fillin = data.environment.fillin;
        e2.display_ast = data.environment.display_ast;
        save_session(&p2, &s2, &e2).unwrap();

        let bytes1 = std::fs::read(&p1).unwrap();
        let bytes2 = std::fs::read(&p2).unwrap();
        assert_eq!(bytes1, bytes2);
        assert_eq!(s.mdf, s2.mdf);
        assert_eq!(s.parameters, s2.parameters);
    }

    #[test]
    fn round_trip_preserves_cell_types_and_bindings() {
        let dir = tempfile::tempdir().unwrap();
        let (s, e) = rich_session();
        let path = dir.path().join("sess.txt");
        save_session(&path, &s, &e).unwrap();
        let data = load_session(&path).unwrap();
        assert_eq!(data.mdf, s.mdf);
        assert_eq!(data.parameters, s.parameters);
        assert_eq!(data.environment.separator, ';');
        assert!(data.environment.display_ast);
        assert_eq!(data.environment.fillin, Some(V::text("n/a, really")));
        // The @ref binding really came back as a frame, not a marker.
        let p1 = &data.parameters["p1"];
        assert_eq!(p1.input_frame.as_ref().unwrap().name(), "STI");
        assert_eq!(p1.input_frame, s.parameters["p1"].input_frame);
        // Text "820" stayed text; 5.0 stayed real; -7 stayed integer.
        let sti = data.mdf.get("STI").unwrap();
        assert_eq!(sti.cell("3", "plain"), Some(&V::text("820")));
        assert_eq!(sti.cell("first", "weird, name"), Some(&V::real(5.0).unwrap()));
        assert_eq!(sti.cell("first", "plain"), Some(&V::Int(-7)));
    }

    #[test]
    fn reference_bindings_are_written_as_refs() {
        let dir = tempfile::tempdir().unwrap();
        let (s, e) = rich_session();
        let path = dir.path().join("sess.txt");
        save_session(&path, &s, &e).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("input: @ref STI\n"));
        assert!(text.contains("results: @embedded p1_results\n"));
        // Three stored frames plus one embedded results frame.
        assert_eq!(text.matches("[dataframe ").count(), 3);
        assert_eq!(text.matches("@embedded").count(), 1);
    }

    #[test]
    fn fresh_session_is_version_line_plus_environment() {
        let dir = tempfile::tempdir().unwrap();
        let s = Session::empty();
        let e = Environment::new(PathBuf::from("/work"));
        let path = dir.path().join("fresh.txt");
        save_session(&path, &s, &e).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(
            text,
            "TAPPS-SESSION v1\n[environment]\ncwd: /work\ndisplay_ast: false\nseparator: ,\n"
        );
        let data = load_session(&path).unwrap();
        assert!(data.mdf.is_empty());
        assert!(data.parameters.is_empty());
        assert_eq!(data.environment.fillin, None);
    }

    #[test]
    fn version_and_format_errors() {
        assert_eq!(
            parse_session("TAPPS-SESSION v9\n").unwrap_err(),
            PersistError::VersionMismatch("TAPPS-SESSION v9".into())
        );
        assert!(matches!(
            parse_session("just some text\n").unwrap_err(),
            PersistError::FormatError { line: 1, .. }
        ));
        let truncated = "TAPPS-SESSION v1\n[environment]\ncwd: /w\ndisplay_ast: false\nseparator: ,\n[dataframe X]\n\"a\"\n";
        assert!(matches!(
            parse_session(truncated).unwrap_err(),
            PersistError::FormatError { .. }
        ));
        let missing_key = "TAPPS-SESSION v1\n[environment]\ncwd: /w\n";
        let err = parse_session(missing_key).unwrap_err();
        assert!(matches!(err, PersistError::FormatError { .. }));
        assert!(err.to_string().contains("display_ast"));
    }

    #[test]
    fn unknown_reference_is_an_error() {
        let text = "TAPPS-SESSION v1\n[environment]\ncwd: /w\ndisplay_ast: false\nseparator: ,\n\
                    [parameters p]\nplugin_name: summarize\ninput: @ref ghost\n[end]\n";
        let err = parse_session(text).unwrap_err();
        assert!(err.to_string().contains("ghost"));
    }

    #[test]
    fn zero_series_frame_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = Session::empty();
        s.mdf.attach(DataFrame::new("hollow")).unwrap();
        let e = Environment::new(PathBuf::from("/w"));
        let path = dir.path().join("z.txt");
        save_session(&path, &s, &e).unwrap();
        let data = load_session(&path).unwrap();
        assert_eq!(data.mdf.get("hollow"), Some(&DataFrame::new("hollow")));
    }

    #[test]
    fn frame_labels_that_look_like_markers_survive() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = Session::empty();
        let mut df = DataFrame::with_series("tricky", vec!["x".into()]).unwrap();
        df.insert_row("[end]", vec![V::text("[endframe]")]).unwrap();
        s.mdf.attach(df.clone()).unwrap();
        let e = Environment::new(PathBuf::from("/w"));
        let path = dir.path().join("t.txt");
        save_session(&path, &s, &e).unwrap();
        let data = load_session(&path).unwrap();
        assert_eq!(data.mdf.get("tricky"), Some(&df));
    }
}
