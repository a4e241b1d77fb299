//! CSV reading and writing, RFC-4180 flavor.
//!
//! Reading is lenient: LF or CRLF record ends, quoted fields may span
//! lines and escape quotes by doubling, stray quotes inside unquoted
//! fields are literal, and an unterminated quote runs to end of input.
//! Writing is canonical: LF record ends, fields quoted only when they
//! contain the separator, a quote, a newline, or are empty.

use std::fs;

use crate::dataframe::DataFrame;
use crate::persistence::PersistError;
use crate::value::CellValue;
use crate::vm::Environment;

/// One parsed field plus whether it was quoted in the source. The quoted
/// flag lets layered formats (like session files) distinguish text from
/// numbers; plain CSV ingestion ignores it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawField {
    pub text: String,
    pub quoted: bool,
}

/// One parsed record and the 1-based line it started on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawRecord {
    pub line: usize,
    pub fields: Vec<RawField>,
}

impl RawRecord {
    /// True for an empty source line.
    pub fn is_blank(&self) -> bool {
        self.fields.is_empty()
    }

    /// True when the record is a single unquoted field equal to `word`.
    pub fn is_marker(&self, word: &str) -> bool {
        self.fields.len() == 1 && !self.fields[0].quoted && self.fields[0].text == word
    }
}

/// Streaming reader over CSV-shaped text. Hands out whole records (which
/// may span lines via quoted fields) or raw lines, tracking 1-based line
/// numbers. Scans bytes; every boundary character is ASCII, so UTF-8
/// content passes through untouched.
pub struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(text: &'a str) -> Cursor<'a> {
        Cursor { bytes: text.as_bytes(), pos: 0, line: 1 }
    }

    pub fn line(&self) -> usize {
        self.line
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.bytes.len()
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    /// Consume one raw line without its terminator; a trailing CR before
    /// the LF is stripped.
    pub fn read_line(&mut self) -> Option<(usize, String)> {
        if self.at_end() {
            return None;
        }
        let start_line = self.line;
        let start = self.pos;
        while let Some(b) = self.peek() {
            if b == b'\n' {
                break;
            }
            self.pos += 1;
        }
        let mut end = self.pos;
        if end > start && self.bytes[end - 1] == b'\r' {
            end -= 1;
        }
        let text = std::str::from_utf8(&self.bytes[start..end])
            .expect("sliced at ASCII boundaries of valid UTF-8")
            .to_string();
        if self.peek() == Some(b'\n') {
            self.pos += 1;
            self.line += 1;
        }
        Some((start_line, text))
    }

    /// Consume one record. A blank line yields a record with no fields.
    pub fn read_record(&mut self, sep: char) -> Option<RawRecord> {
        if self.at_end() {
            return None;
        }
        let mut sep_buf = [0u8; 4];
        let sep_bytes = sep.encode_utf8(&mut sep_buf).as_bytes();
        let start_line = self.line;
        let mut fields: Vec<RawField> = Vec::new();
        let mut cur: Vec<u8> = Vec::new();
        let mut quoted = false;
        let mut in_quotes = false;
        let mut any_content = false;
        while let Some(b) = self.peek() {
            if in_quotes {
                if b == b'"' {
                    if self.bytes.get(self.pos + 1) == Some(&b'"') {
                        cur.push(b'"');
                        self.pos += 2;
                    } else {
                        in_quotes = false;
                        self.pos += 1;
                    }
                } else {
                    if b == b'\n' {
                        self.line += 1;
                    }
                    cur.push(b);
                    self.pos += 1;
                }
                continue;
            }
            if b == b'\n' {
                self.pos += 1;
                self.line += 1;
                break;
            }
            if b == b'\r' && self.bytes.get(self.pos + 1) == Some(&b'\n') {
                self.pos += 2;
                self.line += 1;
                break;
            }
            if self.bytes[self.pos..].starts_with(sep_bytes) {
                fields.push(RawField { text: take_string(&mut cur), quoted });
                quoted = false;
                any_content = true;
                self.pos += sep_bytes.len();
                continue;
            }
            if b == b'"' && cur.is_empty() && !quoted {
                quoted = true;
                in_quotes = true;
                any_content = true;
                self.pos += 1;
                continue;
            }
            cur.push(b);
            any_content = true;
            self.pos += 1;
        }
        if !any_content && fields.is_empty() && cur.is_empty() {
            return Some(RawRecord { line: start_line, fields: Vec::new() });
        }
        fields.push(RawField { text: take_string(&mut cur), quoted });
        Some(RawRecord { line: start_line, fields })
    }
}

fn take_string(buf: &mut Vec<u8>) -> String {
    String::from_utf8(std::mem::take(buf)).expect("split at ASCII boundaries of valid UTF-8")
}

/// Every non-blank record in `text`.
pub fn parse_records(text: &str, sep: char) -> Vec<RawRecord> {
    let mut cursor = Cursor::new(text);
    let mut out = Vec::new();
    while let Some(rec) = cursor.read_record(sep) {
        if !rec.is_blank() {
            out.push(rec);
        }
    }
    out
}

fn needs_quoting(field: &str, sep: char) -> bool {
    field.is_empty()
        || field.contains(sep)
        || field.contains('"')
        || field.contains('\n')
        || field.contains('\r')
}

/// The field wrapped in quotes, with embedded quotes doubled.
pub fn quote_field(field: &str) -> String {
    let mut s = String::with_capacity(field.len() + 2);
    s.push('"');
    for c in field.chars() {
        if c == '"' {
            s.push('"');
        }
        s.push(c);
    }
    s.push('"');
    s
}

/// The field as written to a file: quoted only when necessary.
pub fn format_field(field: &str, sep: char) -> String {
    if needs_quoting(field, sep) {
        quote_field(field)
    } else {
        field.to_string()
    }
}

/// Read a file into a frame. All cells ingest as text; `cast` converts
/// later. With a header the first record names the series, without one
/// the series are "1".."k". Row labels are 1-based record indices. Short
/// records are padded with the environment's fillin value when set.
pub fn load_csv(
    path: &str,
    has_header: bool,
    env: &Environment,
    frame_name: &str,
) -> Result<DataFrame, PersistError> {
    let resolved = env.resolve(path);
    if !resolved.is_file() {
        return Err(PersistError::FileNotFound(resolved));
    }
    let text = fs::read_to_string(&resolved).map_err(|e| PersistError::ReadFailure {
        path: resolved.clone(),
        reason: e.to_string(),
    })?;
    let records = parse_records(&text, env.separator);
    if records.is_empty() {
        return Err(PersistError::EmptyFile(resolved));
    }
    let (series, data_start) = if has_header {
        let names = records[0].fields.iter().map(|f| f.text.clone()).collect();
        (names, 1)
    } else {
        let width = records[0].fields.len();
        ((1..=width).map(|i| i.to_string()).collect::<Vec<_>>(), 0)
    };
    let mut df = DataFrame::with_series(frame_name, series)?;
    let width = df.n_series();
    for (i, rec) in records[data_start..].iter().enumerate() {
        let mut cells: Vec<CellValue> =
            rec.fields.iter().map(|f| CellValue::text(&f.text)).collect();
        if cells.len() < width {
            match &env.fillin {
                Some(fill) => cells.resize(width, CellValue::text(fill.render())),
                None => return Err(PersistError::RaggedRow(rec.line)),
            }
        } else if cells.len() > width {
            return Err(PersistError::RaggedRow(rec.line));
        }
        df.insert_row((i + 1).to_string(), cells)?;
    }
    Ok(df)
}

/// Write a frame: a header record of series names, then one record per
/// row in stored order. Cells render canonically; row labels are not
/// written (reloading regenerates 1-based labels).
pub fn save_csv(df: &DataFrame, path: &str, env: &Environment) -> Result<(), PersistError> {
    let resolved = env.resolve(path);
    let sep = env.separator;
    let sep_str = sep.to_string();
    let mut out = String::new();
    let header: Vec<String> =
        df.series_names().iter().map(|s| format_field(s, sep)).collect();
    out.push_str(&header.join(&sep_str));
    out.push('\n');
    for (_, row) in df.rows() {
        let fields: Vec<String> =
            row.iter().map(|c| format_field(&c.render(), sep)).collect();
        out.push_str(&fields.join(&sep_str));
        out.push('\n');
    }
    fs::write(&resolved, out).map_err(|e| PersistError::WriteFailure {
        path: resolved,
        reason: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::CastType;
    use std::path::Path;

    fn env_in(dir: &Path) -> Environment {
        Environment::new(dir.to_path_buf())
    }

    fn texts(rec: &RawRecord) -> Vec<&str> {
        rec.fields.iter().map(|f| f.text.as_str()).collect()
    }

    #[test]
    fn parses_plain_records() {
        let recs = parse_records("a,b,c\n1,2,3\n", ',');
        assert_eq!(recs.len(), 2);
        assert_eq!(texts(&recs[0]), ["a", "b", "c"]);
        assert_eq!(texts(&recs[1]), ["1", "2", "3"]);
        assert_eq!(recs[1].line, 2);
    }

    #[test]
    fn quoted_fields_hide_separators_and_escape_quotes() {
        let recs = parse_records("\"a,b\",\"he said \"\"hi\"\"\"\nplain,\"\"\n", ',');
        assert_eq!(texts(&recs[0]), ["a,b", "he said \"hi\""]);
        assert!(recs[0].fields[0].quoted);
        assert_eq!(texts(&recs[1]), ["plain", ""]);
        assert!(!recs[1].fields[0].quoted);
        assert!(recs[1].fields[1].quoted);
    }

    #[test]
    fn quoted_field_spans_lines_and_line_numbers_track() {
        let recs = parse_records("\"one\ntwo\",x\nnext,y\n", ',');
        assert_eq!(recs.len(), 2);
        assert_eq!(texts(&recs[0]), ["one\ntwo", "x"]);
        assert_eq!(recs[0].line, 1);
        assert_eq!(recs[1].line, 3);
    }

    #[test]
    fn crlf_and_blank_lines() {
        let recs = parse_records("a,b\r\n\r\nc,d\r\n", ',');
        assert_eq!(recs.len(), 2);
        assert_eq!(texts(&recs[1]), ["c", "d"]);
        assert_eq!(recs[1].line, 3);
    }

    #[test]
    fn trailing_newline_adds_no_record() {
        assert_eq!(parse_records("a\n", ',').len(), 1);
        assert_eq!(parse_records("a", ',').len(), 1);
        assert_eq!(parse_records("", ',').len(), 0);
    }

    #[test]
    fn unterminated_quote_runs_to_end() {
        let recs = parse_records("\"open,still open", ',');
        assert_eq!(recs.len(), 1);
        assert_eq!(texts(&recs[0]), ["open,still open"]);
    }

    #[test]
    fn alternate_separator() {
        let recs = parse_records("a;b,c\n", ';');
        assert_eq!(texts(&recs[0]), ["a", "b,c"]);
    }

    #[test]
    fn format_field_quotes_only_when_needed() {
        assert_eq!(format_field("plain", ','), "plain");
        assert_eq!(format_field("a,b", ','), "\"a,b\"");
        assert_eq!(format_field("say \"hi\"", ','), "\"say \"\"hi\"\"\"");
        assert_eq!(format_field("two\nlines", ','), "\"two\nlines\"");
        assert_eq!(format_field("", ','), "\"\"");
        assert_eq!(format_field("a,b", ';'), "a,b");
    }

    #[test]
    fn load_with_header_names_series_and_numbers_labels() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("t.csv"), "Open,Close\n8,9\n10,11\n").unwrap();
        let env = env_in(dir.path());
        let df = load_csv("t.csv", true, &env, "T").unwrap();
        assert_eq!(df.series_names(), ["Open", "Close"]);
        assert_eq!(df.labels().collect::<Vec<_>>(), ["1", "2"]);
        assert_eq!(df.cell("2", "Close"), Some(&CellValue::text("11")));
    }

    #[test]
    fn headerless_load_numbers_series() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("t.csv"), "8,9\n10,11\n").unwrap();
        let env = env_in(dir.path());
        let df = load_csv("t.csv", false, &env, "T").unwrap();
        assert_eq!(df.series_names(), ["1", "2"]);
        assert_eq!(df.labels().collect::<Vec<_>>(), ["1", "2"]);
        assert_eq!(df.cell("1", "1"), Some(&CellValue::text("8")));
    }

    #[test]
    fn short_records_pad_with_fillin_or_fail() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("t.csv"), "a,b,c\n1,2\n").unwrap();
        let mut env = env_in(dir.path());
        assert_eq!(
            load_csv("t.csv", true, &env, "T").unwrap_err(),
            PersistError::RaggedRow(2)
        );
        env.fillin = Some(CellValue::Int(0));
        let df = load_csv("t.csv", true, &env, "T").unwrap();
        assert_eq!(df.cell("1", "c"), Some(&CellValue::text("0")));
    }

    #[test]
    fn long_records_fail_even_with_fillin() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("t.csv"), "a,b\n1,2,3\n").unwrap();
        let mut env = env_in(dir.path());
        env.fillin = Some(CellValue::Int(0));
        assert_eq!(
            load_csv("t.csv", true, &env, "T").unwrap_err(),
            PersistError::RaggedRow(2)
        );
    }

    #[test]
    fn missing_and_empty_files() {
        let dir = tempfile::tempdir().unwrap();
        let env = env_in(dir.path());
        assert!(matches!(
            load_csv("no.csv", true, &env, "T").unwrap_err(),
            PersistError::FileNotFound(_)
        ));
        std::fs::write(dir.path().join("e.csv"), "").unwrap();
        assert!(matches!(
            load_csv("e.csv", true, &env, "T").unwrap_err(),
            PersistError::EmptyFile(_)
        ));
    }

    #[test]
    fn empty_frame_saves_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let env = env_in(dir.path());
        let df = DataFrame::with_series("T", vec!["a".into(), "b".into()]).unwrap();
        save_csv(&df, "out.csv", &env).unwrap();
        let text = std::fs::read_to_string(dir.path().join("out.csv")).unwrap();
        assert_eq!(text, "a,b\n");
        let back = load_csv("out.csv", true, &env, "T").unwrap();
        assert_eq!(back, df);
    }

    #[test]
    fn save_load_cast_round_trips_mixed_cells() {
        let dir = tempfile::tempdir().unwrap();
        let env = env_in(dir.path());
        let mut df = DataFrame::with_series(
            "T",
            vec!["n".into(), "r".into(), "t".into()],
        )
        .unwrap();
        let nasty = [
            "plain",
            "a,b",
            "say \"hi\"",
            "two\nlines",
            "",
            "  padded  ",
            "naïve",
        ];
        for (i, t) in nasty.iter().enumerate() {
            df.insert_row(
                (i + 1).to_string(),
                vec![
                    CellValue::Int(i as i64 - 3),
                    CellValue::real(0.5 + i as f64).unwrap(),
                    CellValue::text(*t),
                ],
            )
            .unwrap();
        }
        save_csv(&df, "rt.csv", &env).unwrap();
        let mut back = load_csv("rt.csv", true, &env, "T").unwrap();
        back.cast_values(&crate::dataframe::SeriesSelector::Named(vec!["n".into()]), CastType::Integer)
            .unwrap();
        back.cast_values(&crate::dataframe::SeriesSelector::Named(vec!["r".into()]), CastType::Real)
            .unwrap();
        assert_eq!(back, df);
    }
}
