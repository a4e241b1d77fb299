//! Statement AST and its canonical one-line rendering.
//!
//! The rendering is the language's normal form: lowercase keywords, comma
//! separated name lists, and quotes only where a bare word would lex as
//! something else. Parsing the rendering yields an equal statement.

use std::fmt;

use crate::dataframe::{RenameAxis, SeriesSelector};
use crate::language::lexer::{is_identifier, Keyword};
use crate::value::{parse_number, BinOp, CastType, CellValue};

#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    Cast {
        selector: SeriesSelector,
        frame: String,
        datatype: CastType,
    },
    Delete(DeleteTarget),
    Describe {
        frame: String,
    },
    Load(LoadSource),
    Merge(MergeKind),
    New(NewKind),
    Rename {
        axis: RenameAxis,
        frame: String,
        old: String,
        new: String,
    },
    RunPlugin {
        param: String,
    },
    Save(SaveTarget),
    Select {
        src: String,
        dst: String,
        filter: Option<RowFilter>,
    },
    Set(SetOption),
    Shell,
    Show(ShowItem),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeleteTarget {
    DataFrame(String),
    Parameter(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoadSource {
    Csv {
        header: bool,
        path: String,
        frame: String,
    },
    Session {
        path: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MergeKind {
    Series {
        selector: SeriesSelector,
        src: String,
        dst: String,
    },
    Labels {
        replace: bool,
        src: String,
        dst: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NewKind {
    Parameter {
        plugin: String,
        name: String,
    },
    DataFrame {
        frame: String,
        param: String,
        slot: ParamSlot,
    },
}

/// Which frame of a parameter set `new … dataframe` copies out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamSlot {
    DataFrame,
    Results,
}

impl ParamSlot {
    pub fn keyword(self) -> &'static str {
        match self {
            ParamSlot::DataFrame => "dataframe",
            ParamSlot::Results => "results",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SaveTarget {
    Session { path: String },
    Csv { frame: String, path: String },
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowFilter {
    /// Keep rows where any cell satisfies the comparison.
    Greedy { op: BinOp, value: CellValue },
    /// Keep rows where the named series' cell satisfies the comparison.
    BySeries {
        series: String,
        op: BinOp,
        value: CellValue,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum SetOption {
    DisplayAst(String),
    Cwd(String),
    Separator(char),
    FillIn(CellValue),
    Parameter {
        key: String,
        param: String,
        value: String,
    },
    ParameterFrame {
        param: String,
        frame: String,
    },
    Rcwd(String),
    Ocwd,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShowItem {
    AstHistory,
    Environment,
    History,
    PluginList,
    Plugin(String),
    Session,
    DataFrame,
    Parameter,
}

/// True when the word lexes back as a plain identifier token.
fn lexes_as_identifier(s: &str) -> bool {
    is_identifier(s) && Keyword::lookup(s).is_none()
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

/// Render a name that parsed from an identifier-or-string position.
fn fmt_name(s: &str) -> String {
    if lexes_as_identifier(s) {
        s.to_string()
    } else {
        quote(s)
    }
}

/// Render a comparison value. Text goes bare only when it cannot be
/// mistaken for anything but an identifier.
pub(crate) fn fmt_value(v: &CellValue) -> String {
    match v {
        CellValue::Int(_) | CellValue::Real(_) => v.render(),
        CellValue::Text(s) => fmt_name(s),
    }
}

/// Render a set-parameter value, which is type-erased to a string: numbers
/// and identifiers go bare, anything else is quoted.
fn fmt_raw_value(s: &str) -> String {
    if lexes_as_identifier(s) || parse_number(s).is_some() {
        s.to_string()
    } else {
        quote(s)
    }
}

fn fmt_selector(sel: &SeriesSelector) -> String {
    match sel {
        SeriesSelector::All => "all".to_string(),
        SeriesSelector::Named(names) => names.join(","),
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Cast {
                selector,
                frame,
                datatype,
            } => write!(
                f,
                "cast {} in {frame} as {}",
                fmt_selector(selector),
                datatype.keyword()
            ),
            Statement::Delete(DeleteTarget::DataFrame(n)) => {
                write!(f, "delete dataframe {n}")
            }
            Statement::Delete(DeleteTarget::Parameter(n)) => {
                write!(f, "delete parameter {n}")
            }
            Statement::Describe { frame } => write!(f, "describe {frame}"),
            Statement::Load(LoadSource::Csv {
                header,
                path,
                frame,
            }) => {
                if *header {
                    write!(f, "load csv {path} as {frame}")
                } else {
                    write!(f, "load noheader csv {path} as {frame}")
                }
            }
            Statement::Load(LoadSource::Session { path }) => {
                write!(f, "load session from {path}")
            }
            Statement::Merge(MergeKind::Series { selector, src, dst }) => {
                write!(f, "merge series {} from {src} to {dst}", fmt_selector(selector))
            }
            Statement::Merge(MergeKind::Labels { replace, src, dst }) => {
                if *replace {
                    write!(f, "merge replace labels from {src} to {dst}")
                } else {
                    write!(f, "merge labels from {src} to {dst}")
                }
            }
            Statement::New(NewKind::Parameter { plugin, name }) => {
                write!(f, "new {plugin} parameter as {name}")
            }
            Statement::New(NewKind::DataFrame { frame, param, slot }) => {
                write!(f, "new {frame} dataframe from {param} {}", slot.keyword())
            }
            Statement::Rename {
                axis,
                frame,
                old,
                new,
            } => {
                let axis = match axis {
                    RenameAxis::Series => "series",
                    RenameAxis::Labels => "labels",
                };
                write!(
                    f,
                    "rename {axis} in {frame} from {} to {}",
                    fmt_name(old),
                    fmt_name(new)
                )
            }
            Statement::RunPlugin { param } => write!(f, "runplugin {param}"),
            Statement::Save(SaveTarget::Session { path }) => {
                write!(f, "save session as {path}")
            }
            Statement::Save(SaveTarget::Csv { frame, path }) => {
                write!(f, "save dataframe {frame} as csv {path}")
            }
            Statement::Select { src, dst, filter } => {
                write!(f, "select from {src} as {dst}")?;
                match filter {
                    None => Ok(()),
                    Some(RowFilter::Greedy { op, value }) => {
                        write!(f, " where {} {}", op.symbol(), fmt_value(value))
                    }
                    Some(RowFilter::BySeries { series, op, value }) => {
                        write!(f, " where {series} {} {}", op.symbol(), fmt_value(value))
                    }
                }
            }
            Statement::Set(opt) => match opt {
                SetOption::DisplayAst(v) => write!(f, "set displayast {v}"),
                SetOption::Cwd(p) => write!(f, "set cwd {p}"),
                SetOption::Separator(c) => write!(f, "set separator {c}"),
                SetOption::FillIn(v) => write!(f, "set fillin {}", fmt_value(v)),
                SetOption::Parameter { key, param, value } => {
                    write!(f, "set parameter {key} in {param} as {}", fmt_raw_value(value))
                }
                SetOption::ParameterFrame { param, frame } => {
                    write!(f, "set parameter dataframe in {param} as {frame}")
                }
                SetOption::Rcwd(p) => write!(f, "set rcwd {p}"),
                SetOption::Ocwd => write!(f, "set ocwd"),
            },
            Statement::Shell => write!(f, "pythonshell"),
            Statement::Show(item) => match item {
                ShowItem::AstHistory => write!(f, "show asthistory"),
                ShowItem::Environment => write!(f, "show environment"),
                ShowItem::History => write!(f, "show history"),
                ShowItem::PluginList => write!(f, "show plugin list"),
                ShowItem::Plugin(n) => write!(f, "show plugin {n}"),
                ShowItem::Session => write!(f, "show session"),
                ShowItem::DataFrame => write!(f, "show dataframe"),
                ShowItem::Parameter => write!(f, "show parameter"),
            },
        }
    }
}

impl Statement {
    /// Canonical source form; parses back to an equal statement.
    pub fn format(&self) -> String {
        self.to_string()
    }
}
