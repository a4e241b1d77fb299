//! The instruction set and the statement compiler.
//!
//! Each statement compiles to exactly one bytecode: an opcode plus string
//! operands. Operand counts are fixed per opcode and asserted at
//! construction, so the executor can index operands without checking.

use std::fmt;
use std::ops::RangeInclusive;

use crate::dataframe::{RenameAxis, SeriesSelector};
use crate::language::ast::{
    fmt_value, DeleteTarget, LoadSource, MergeKind, NewKind, RowFilter, SaveTarget, SetOption,
    ShowItem, Statement,
};
use crate::value::CellValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Opcode {
    Cast,
    DelDataframe,
    DelParam,
    Describe,
    DuplicateFrame,
    GreedySearch,
    IdSearch,
    LoadCsv1,
    LoadCsv2,
    LoadSession,
    MergeLabels1,
    MergeLabels2,
    MergeSeries,
    NewDataframe,
    NewParam,
    PythonShell,
    RenameSeries,
    RenameLabels,
    RunPlugin,
    SaveCsv,
    SaveSession,
    Set,
    Show,
}

impl Opcode {
    pub const ALL: [Opcode; 23] = [
        Opcode::Cast,
        Opcode::DelDataframe,
        Opcode::DelParam,
        Opcode::Describe,
        Opcode::DuplicateFrame,
        Opcode::GreedySearch,
        Opcode::IdSearch,
        Opcode::LoadCsv1,
        Opcode::LoadCsv2,
        Opcode::LoadSession,
        Opcode::MergeLabels1,
        Opcode::MergeLabels2,
        Opcode::MergeSeries,
        Opcode::NewDataframe,
        Opcode::NewParam,
        Opcode::PythonShell,
        Opcode::RenameSeries,
        Opcode::RenameLabels,
        Opcode::RunPlugin,
        Opcode::SaveCsv,
        Opcode::SaveSession,
        Opcode::Set,
        Opcode::Show,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Opcode::Cast => "cast",
            Opcode::DelDataframe => "deldataframe",
            Opcode::DelParam => "delparam",
            Opcode::Describe => "describe",
            Opcode::DuplicateFrame => "duplicateframe",
            Opcode::GreedySearch => "greedysearch",
            Opcode::IdSearch => "idsearch",
            Opcode::LoadCsv1 => "loadcsv1",
            Opcode::LoadCsv2 => "loadcsv2",
            Opcode::LoadSession => "loadsession",
            Opcode::MergeLabels1 => "mergelabels1",
            Opcode::MergeLabels2 => "mergelabels2",
            Opcode::MergeSeries => "mergeseries",
            Opcode::NewDataframe => "newdataframe",
            Opcode::NewParam => "newparam",
            Opcode::PythonShell => "pythonshell",
            Opcode::RenameSeries => "renameseries",
            Opcode::RenameLabels => "renamelabels",
            Opcode::RunPlugin => "runplugin",
            Opcode::SaveCsv => "savecsv",
            Opcode::SaveSession => "savesession",
            Opcode::Set => "set",
            Opcode::Show => "show",
        }
    }

    /// Legal operand counts. `set` and `show` are variadic because their
    /// first operand discriminates sub-forms of different widths.
    fn arity(self) -> RangeInclusive<usize> {
        match self {
            Opcode::PythonShell => 0..=0,
            Opcode::DelDataframe
            | Opcode::DelParam
            | Opcode::Describe
            | Opcode::LoadSession
            | Opcode::RunPlugin
            | Opcode::SaveSession => 1..=1,
            Opcode::DuplicateFrame
            | Opcode::LoadCsv1
            | Opcode::LoadCsv2
            | Opcode::MergeLabels1
            | Opcode::MergeLabels2
            | Opcode::NewParam
            | Opcode::SaveCsv => 2..=2,
            Opcode::Cast
            | Opcode::MergeSeries
            | Opcode::NewDataframe
            | Opcode::RenameSeries
            | Opcode::RenameLabels => 3..=3,
            Opcode::GreedySearch => 4..=4,
            Opcode::IdSearch => 5..=5,
            Opcode::Set => 1..=4,
            Opcode::Show => 1..=2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bytecode {
    opcode: Opcode,
    operands: Vec<String>,
}

impl Bytecode {
    /// Panics when the operand count is wrong for the opcode; compilation
    /// is the only producer, so a violation is a compiler bug.
    pub fn new(opcode: Opcode, operands: Vec<String>) -> Bytecode {
        assert!(
            opcode.arity().contains(&operands.len()),
            "{} takes {:?} operands, got {}",
            opcode.name(),
            opcode.arity(),
            operands.len()
        );
        Bytecode { opcode, operands }
    }

    pub fn opcode(&self) -> Opcode {
        self.opcode
    }

    pub fn operands(&self) -> &[String] {
        &self.operands
    }

    pub fn render(&self) -> String {
        let mut s = self.opcode.name().to_string();
        for op in &self.operands {
            s.push(' ');
            s.push_str(op);
        }
        s
    }
}

impl fmt::Display for Bytecode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Series-list operand: `*` stands for all series, otherwise the names
/// joined by commas.
fn selector_operand(sel: &SeriesSelector) -> String {
    match sel {
        SeriesSelector::All => "*".to_string(),
        SeriesSelector::Named(names) => names.join(","),
    }
}

/// Decode a series-list operand back into a selector.
pub fn decode_selector(operand: &str) -> SeriesSelector {
    if operand == "*" {
        SeriesSelector::All
    } else {
        SeriesSelector::Named(operand.split(',').map(str::to_string).collect())
    }
}

/// Comparison values embed their type in the operand text: numbers go bare,
/// text is quoted unless it is a plain identifier.
fn encode_value(v: &CellValue) -> String {
    fmt_value(v)
}

/// Inverse of the value encoding used by the compiler.
pub fn decode_value(operand: &str) -> CellValue {
    if operand.len() >= 2 && operand.starts_with('"') && operand.ends_with('"') {
        let inner = &operand[1..operand.len() - 1];
        CellValue::text(inner.replace("\"\"", "\""))
    } else if let Some(stripped) = operand.strip_prefix('"') {
        // Defensive: never produced by encode_value.
        CellValue::text(stripped)
    } else {
        match CellValue::parse_literal(operand) {
            CellValue::Text(s) => CellValue::text(s),
            n => n,
        }
    }
}

/// Compile one statement. The result always holds exactly one bytecode;
/// the sequence shape leaves room for future multi-instruction statements.
pub fn compile(s: &Statement) -> Vec<Bytecode> {
    vec![compile_one(s)]
}

fn compile_one(s: &Statement) -> Bytecode {
    use Opcode::*;
    match s {
        Statement::Cast {
            selector,
            frame,
            datatype,
        } => Bytecode::new(
            Cast,
            vec![
                datatype.keyword().to_string(),
                selector_operand(selector),
                frame.clone(),
            ],
        ),
        Statement::Delete(DeleteTarget::DataFrame(n)) => Bytecode::new(DelDataframe, vec![n.clone()]),
        Statement::Delete(DeleteTarget::Parameter(n)) => Bytecode::new(DelParam, vec![n.clone()]),
        Statement::Describe { frame } => Bytecode::new(Describe, vec![frame.clone()]),
        Statement::Load(LoadSource::Csv {
            header,
            path,
            frame,
        }) => Bytecode::new(
            if *header { LoadCsv1 } else { LoadCsv2 },
            vec![path.clone(), frame.clone()],
        ),
        Statement::Load(LoadSource::Session { path }) => {
            Bytecode::new(LoadSession, vec![path.clone()])
        }
        Statement::Merge(MergeKind::Series { selector, src, dst }) => Bytecode::new(
            MergeSeries,
            vec![selector_operand(selector), src.clone(), dst.clone()],
        ),
        Statement::Merge(MergeKind::Labels { replace, src, dst }) => Bytecode::new(
            if *replace { MergeLabels2 } else { MergeLabels1 },
            vec![src.clone(), dst.clone()],
        ),
        Statement::New(NewKind::Parameter { plugin, name }) => {
            Bytecode::new(NewParam, vec![plugin.clone(), name.clone()])
        }
        Statement::New(NewKind::DataFrame { frame, param, slot }) => Bytecode::new(
            NewDataframe,
            vec![frame.clone(), param.clone(), slot.keyword().to_string()],
        ),
        Statement::Rename {
            axis,
            frame,
            old,
            new,
        } => Bytecode::new(
            match axis {
                RenameAxis::Series => RenameSeries,
                RenameAxis::Labels => RenameLabels,
            },
            vec![frame.clone(), old.clone(), new.clone()],
        ),
        Statement::RunPlugin { param } => Bytecode::new(RunPlugin, vec![param.clone()]),
        Statement::Save(SaveTarget::Session { path }) => {
            Bytecode::new(SaveSession, vec![path.clone()])
        }
        Statement::Save(SaveTarget::Csv { frame, path }) => {
            Bytecode::new(SaveCsv, vec![frame.clone(), path.clone()])
        }
        Statement::Select { src, dst, filter } => match filter {
            None => Bytecode::new(DuplicateFrame, vec![src.clone(), dst.clone()]),
            Some(RowFilter::Greedy { op, value }) => Bytecode::new(
                GreedySearch,
                vec![
                    src.clone(),
                    dst.clone(),
                    op.symbol().to_string(),
                    encode_value(value),
                ],
            ),
            Some(RowFilter::BySeries { series, op, value }) => Bytecode::new(
                IdSearch,
                vec![
                    src.clone(),
                    dst.clone(),
                    series.clone(),
                    op.symbol().to_string(),
                    encode_value(value),
                ],
            ),
        },
        Statement::Set(opt) => {
            let operands = match opt {
                SetOption::DisplayAst(v) => vec!["displayast".to_string(), v.clone()],
                SetOption::Cwd(p) => vec!["cwd".to_string(), p.clone()],
                SetOption::Separator(c) => vec!["separator".to_string(), c.to_string()],
                SetOption::FillIn(v) => vec!["fillin".to_string(), encode_value(v)],
                SetOption::Parameter { key, param, value } => vec![
                    "parameter".to_string(),
                    key.clone(),
                    param.clone(),
                    value.clone(),
                ],
                SetOption::ParameterFrame { param, frame } => vec![
                    "parameter".to_string(),
                    "dataframe".to_string(),
                    param.clone(),
                    frame.clone(),
                ],
                SetOption::Rcwd(p) => vec!["rcwd".to_string(), p.clone()],
                SetOption::Ocwd => vec!["ocwd".to_string()],
            };
            Bytecode::new(Set, operands)
        }
        Statement::Shell => Bytecode::new(PythonShell, vec![]),
        Statement::Show(item) => {
            let operands = match item {
                ShowItem::AstHistory => vec!["asthistory".to_string()],
                ShowItem::Environment => vec!["environment".to_string()],
                ShowItem::History => vec!["history".to_string()],
                ShowItem::PluginList => vec!["plugin".to_string(), "list".to_string()],
                ShowItem::Plugin(n) => vec!["plugin".to_string(), n.clone()],
                ShowItem::Session => vec!["session".to_string()],
                ShowItem::DataFrame => vec!["dataframe".to_string()],
                ShowItem::Parameter => vec!["parameter".to_string()],
            };
            Bytecode::new(Show, operands)
        }
    }
}
