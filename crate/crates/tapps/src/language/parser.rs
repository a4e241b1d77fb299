//! Recursive-descent parser. Every statement begins with a unique keyword,
//! so one token of lookahead picks the production and the rest is a
//! straight walk down it.

use thiserror::Error;

use crate::dataframe::{RenameAxis, SeriesSelector};
use crate::language::ast::{
    DeleteTarget, LoadSource, MergeKind, NewKind, ParamSlot, RowFilter, SaveTarget, SetOption,
    ShowItem, Statement,
};
use crate::language::lexer::{tokenize, Keyword, LexError, Token, TokenKind};
use crate::value::{BinOp, CastType, CellValue};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("empty statement")]
    Empty,
    #[error("unknown statement '{found}' at column {column}")]
    UnknownStatement { column: usize, found: String },
    #[error("expected {expected} at column {column}, found '{found}'")]
    Unexpected {
        column: usize,
        found: String,
        expected: String,
    },
    #[error("statement ends at column {column}; expected {expected}")]
    Eof { column: usize, expected: String },
    #[error("unexpected trailing '{found}' at column {column}")]
    Trailing { column: usize, found: String },
}

/// Tokenize and parse one statement line.
pub fn parse(line: &str) -> Result<Statement, ParseError> {
    let tokens = tokenize(line)?;
    parse_statement(&tokens)
}

pub fn parse_statement(tokens: &[Token]) -> Result<Statement, ParseError> {
    let mut c = Cursor::new(tokens);
    let first = match c.bump() {
        None => return Err(ParseError::Empty),
        Some(t) => t,
    };
    let stmt = match first.kind {
        TokenKind::Keyword(Keyword::Cast) => parse_cast(&mut c)?,
        TokenKind::Keyword(Keyword::Delete) => parse_delete(&mut c)?,
        TokenKind::Keyword(Keyword::Describe) => Statement::Describe {
            frame: c.expect_ident("dataframe name")?,
        },
        TokenKind::Keyword(Keyword::Load) => parse_load(&mut c)?,
        TokenKind::Keyword(Keyword::Merge) => parse_merge(&mut c)?,
        TokenKind::Keyword(Keyword::New) => parse_new(&mut c)?,
        TokenKind::Keyword(Keyword::Rename) => parse_rename(&mut c)?,
        TokenKind::Keyword(Keyword::RunPlugin) => Statement::RunPlugin {
            param: c.expect_ident("parameter set name")?,
        },
        TokenKind::Keyword(Keyword::Save) => parse_save(&mut c)?,
        TokenKind::Keyword(Keyword::Select) => parse_select(&mut c)?,
        TokenKind::Keyword(Keyword::Set) => parse_set(&mut c)?,
        TokenKind::Keyword(Keyword::PythonShell) => Statement::Shell,
        TokenKind::Keyword(Keyword::Show) => parse_show(&mut c)?,
        _ => {
            return Err(ParseError::UnknownStatement {
                column: first.column,
                found: first.lexeme.clone(),
            });
        }
    };
    c.finish()?;
    Ok(stmt)
}

struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    fn new(toks: &'a [Token]) -> Self {
        let end_col = toks
            .last()
            .map(|t| t.column + t.lexeme.chars().count())
            .unwrap_or(1);
        Cursor {
            toks,
            pos: 0,
            end_col,
        }
    }

    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    fn peek_kw(&self) -> Option<Keyword> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Keyword(k),
                ..
            }) => Some(*k),
            _ => None,
        }
    }

    fn bump(&mut self) -> Option<&'a Token> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &str) -> Result<T, ParseError> {
        match self.peek() {
            Some(t) => Err(ParseError::Unexpected {
                column: t.column,
                found: t.lexeme.clone(),
                expected: expected.to_string(),
            }),
            None => Err(ParseError::Eof {
                column: self.end_col,
                expected: expected.to_string(),
            }),
        }
    }

    fn eat_kw(&mut self, k: Keyword) -> bool {
        if self.peek_kw() == Some(k) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, k: Keyword) -> Result<(), ParseError> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            self.fail(&format!("'{}'", k.as_str()))
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Ident => {
                self.pos += 1;
                Ok(t.lexeme.clone())
            }
            _ => self.fail(what),
        }
    }

    /// Identifier or quoted string; yields the name itself.
    fn expect_id_value(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Ident => {
                self.pos += 1;
                Ok(t.lexeme.clone())
            }
            Some(Token {
                kind: TokenKind::Str(s),
                ..
            }) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.fail(what),
        }
    }

    /// File or directory operand: any bare word qualifies.
    fn expect_path(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(t)
                if matches!(
                    t.kind,
                    TokenKind::Ident | TokenKind::Filename | TokenKind::Number
                ) =>
            {
                self.pos += 1;
                Ok(t.lexeme.clone())
            }
            _ => self.fail(what),
        }
    }

    /// Comparison value: numbers become numeric cells, everything else text.
    fn expect_value(&mut self, what: &str) -> Result<CellValue, ParseError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Number => {
                self.pos += 1;
                Ok(CellValue::parse_literal(&t.lexeme))
            }
            Some(t) if t.kind == TokenKind::Ident => {
                self.pos += 1;
                Ok(CellValue::text(&t.lexeme))
            }
            Some(Token {
                kind: TokenKind::Str(s),
                ..
            }) => {
                let v = CellValue::text(s);
                self.pos += 1;
                Ok(v)
            }
            _ => self.fail(what),
        }
    }

    fn expect_op(&mut self) -> Result<BinOp, ParseError> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Op(op),
                ..
            }) => {
                let op = *op;
                self.pos += 1;
                Ok(op)
            }
            _ => self.fail("comparison operator"),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(ParseError::Trailing {
                column: t.column,
                found: t.lexeme.clone(),
            }),
        }
    }
}

/// `all`, or one or more series names split by any delimiter.
fn parse_id_list(c: &mut Cursor) -> Result<SeriesSelector, ParseError> {
    if c.eat_kw(Keyword::All) {
        return Ok(SeriesSelector::All);
    }
    let mut names = vec![c.expect_ident("series name")?];
    while matches!(
        c.peek(),
        Some(Token {
            kind: TokenKind::Delim(_),
            ..
        })
    ) {
        c.bump();
        names.push(c.expect_ident("series name")?);
    }
    Ok(SeriesSelector::Named(names))
}

fn parse_cast(c: &mut Cursor) -> Result<Statement, ParseError> {
    let selector = parse_id_list(c)?;
    c.expect_kw(Keyword::In)?;
    let frame = c.expect_ident("dataframe name")?;
    c.expect_kw(Keyword::As)?;
    let datatype = match c.peek_kw() {
        Some(Keyword::Alpha) => CastType::Alpha,
        Some(Keyword::NonAlpha) => CastType::NonAlpha,
        Some(Keyword::Float) => CastType::Float,
        Some(Keyword::Real) => CastType::Real,
        Some(Keyword::Integer) => CastType::Integer,
        _ => return c.fail("a data type"),
    };
    c.bump();
    Ok(Statement::Cast {
        selector,
        frame,
        datatype,
    })
}

fn parse_delete(c: &mut Cursor) -> Result<Statement, ParseError> {
    if c.eat_kw(Keyword::Dataframe) {
        let name = c.expect_ident("dataframe name")?;
        Ok(Statement::Delete(DeleteTarget::DataFrame(name)))
    } else if c.eat_kw(Keyword::Parameter) {
        let name = c.expect_ident("parameter set name")?;
        Ok(Statement::Delete(DeleteTarget::Parameter(name)))
    } else {
        c.fail("'dataframe' or 'parameter'")
    }
}

fn parse_load(c: &mut Cursor) -> Result<Statement, ParseError> {
    if c.eat_kw(Keyword::Session) {
        c.expect_kw(Keyword::From)?;
        let path = c.expect_path("session file name")?;
        return Ok(Statement::Load(LoadSource::Session { path }));
    }
    let header = !c.eat_kw(Keyword::NoHeader);
    c.expect_kw(Keyword::Csv)?;
    let path = c.expect_path("CSV file name")?;
    c.expect_kw(Keyword::As)?;
    let frame = c.expect_ident("dataframe name")?;
    Ok(Statement::Load(LoadSource::Csv {
        header,
        path,
        frame,
    }))
}

fn parse_merge(c: &mut Cursor) -> Result<Statement, ParseError> {
    if c.eat_kw(Keyword::Series) {
        let selector = parse_id_list(c)?;
        c.expect_kw(Keyword::From)?;
        let src = c.expect_ident("source dataframe")?;
        c.expect_kw(Keyword::To)?;
        let dst = c.expect_ident("destination dataframe")?;
        return Ok(Statement::Merge(MergeKind::Series { selector, src, dst }));
    }
    let replace = c.eat_kw(Keyword::Replace);
    c.expect_kw(Keyword::Labels)?;
    c.expect_kw(Keyword::From)?;
    let src = c.expect_ident("source dataframe")?;
    c.expect_kw(Keyword::To)?;
    let dst = c.expect_ident("destination dataframe")?;
    Ok(Statement::Merge(MergeKind::Labels { replace, src, dst }))
}

fn parse_new(c: &mut Cursor) -> Result<Statement, ParseError> {
    let first = c.expect_ident("name")?;
    if c.eat_kw(Keyword::Parameter) {
        c.expect_kw(Keyword::As)?;
        let name = c.expect_ident("parameter set name")?;
        Ok(Statement::New(NewKind::Parameter {
            plugin: first,
            name,
        }))
    } else if c.eat_kw(Keyword::Dataframe) {
        c.expect_kw(Keyword::From)?;
        let param = c.expect_ident("parameter set name")?;
        let slot = match c.peek_kw() {
            Some(Keyword::Results) => ParamSlot::Results,
            Some(Keyword::Dataframe) => ParamSlot::DataFrame,
            _ => return c.fail("'results' or 'dataframe'"),
        };
        c.bump();
        Ok(Statement::New(NewKind::DataFrame {
            frame: first,
            param,
            slot,
        }))
    } else {
        c.fail("'parameter' or 'dataframe'")
    }
}

fn parse_rename(c: &mut Cursor) -> Result<Statement, ParseError> {
    let axis = match c.peek_kw() {
        Some(Keyword::Series) => RenameAxis::Series,
        Some(Keyword::Labels) => RenameAxis::Labels,
        _ => return c.fail("'series' or 'labels'"),
    };
    c.bump();
    c.expect_kw(Keyword::In)?;
    let frame = c.expect_ident("dataframe name")?;
    c.expect_kw(Keyword::From)?;
    let old = c.expect_id_value("original name")?;
    c.expect_kw(Keyword::To)?;
    let new = c.expect_id_value("new name")?;
    Ok(Statement::Rename {
        axis,
        frame,
        old,
        new,
    })
}

fn parse_save(c: &mut Cursor) -> Result<Statement, ParseError> {
    if c.eat_kw(Keyword::Session) {
        c.expect_kw(Keyword::As)?;
        let path = c.expect_path("session file name")?;
        Ok(Statement::Save(SaveTarget::Session { path }))
    } else if c.eat_kw(Keyword::Dataframe) {
        let frame = c.expect_ident("dataframe name")?;
        c.expect_kw(Keyword::As)?;
        c.expect_kw(Keyword::Csv)?;
        let path = c.expect_path("CSV file name")?;
        Ok(Statement::Save(SaveTarget::Csv { frame, path }))
    } else {
        c.fail("'session' or 'dataframe'")
    }
}

fn parse_select(c: &mut Cursor) -> Result<Statement, ParseError> {
    c.expect_kw(Keyword::From)?;
    let src = c.expect_ident("source dataframe")?;
    c.expect_kw(Keyword::As)?;
    let dst = c.expect_ident("new dataframe name")?;
    let filter = if c.eat_kw(Keyword::Where) {
        if matches!(
            c.peek(),
            Some(Token {
                kind: TokenKind::Op(_),
                ..
            })
        ) {
            let op = c.expect_op()?;
            let value = c.expect_value("comparison value")?;
            Some(RowFilter::Greedy { op, value })
        } else {
            let series = c.expect_ident("series name")?;
            let op = c.expect_op()?;
            let value = c.expect_value("comparison value")?;
            Some(RowFilter::BySeries { series, op, value })
        }
    } else {
        None
    };
    Ok(Statement::Select { src, dst, filter })
}

fn parse_set(c: &mut Cursor) -> Result<Statement, ParseError> {
    let opt = match c.peek_kw() {
        Some(Keyword::DisplayAst) => {
            c.bump();
            SetOption::DisplayAst(c.expect_ident("'true' or 'false'")?)
        }
        Some(Keyword::Cwd) => {
            c.bump();
            SetOption::Cwd(c.expect_path("directory path")?)
        }
        Some(Keyword::Separator) => {
            c.bump();
            let ch = match c.peek() {
                Some(Token {
                    kind: TokenKind::Delim(d),
                    ..
                }) => *d,
                Some(Token {
                    kind: TokenKind::Op(BinOp::Gt),
                    ..
                }) => '>',
                Some(Token {
                    kind: TokenKind::Op(BinOp::Lt),
                    ..
                }) => '<',
                _ => return c.fail("a separator character"),
            };
            c.bump();
            SetOption::Separator(ch)
        }
        Some(Keyword::FillIn) => {
            c.bump();
            let v = match c.peek() {
                Some(t) if t.kind == TokenKind::Number => CellValue::parse_literal(&t.lexeme),
                Some(t) if t.kind == TokenKind::Ident => CellValue::text(&t.lexeme),
                _ => return c.fail("a fill-in value"),
            };
            c.bump();
            SetOption::FillIn(v)
        }
        Some(Keyword::Parameter) => {
            c.bump();
            if c.eat_kw(Keyword::Dataframe) {
                c.expect_kw(Keyword::In)?;
                let param = c.expect_ident("parameter set name")?;
                c.expect_kw(Keyword::As)?;
                let frame = c.expect_ident("dataframe name")?;
                SetOption::ParameterFrame { param, frame }
            } else {
                let key = c.expect_ident("parameter key")?;
                c.expect_kw(Keyword::In)?;
                let param = c.expect_ident("parameter set name")?;
                c.expect_kw(Keyword::As)?;
                let value = match c.peek() {
                    Some(t)
                        if matches!(t.kind, TokenKind::Ident | TokenKind::Number) =>
                    {
                        t.lexeme.clone()
                    }
                    Some(Token {
                        kind: TokenKind::Str(s),
                        ..
                    }) => s.clone(),
                    _ => return c.fail("a parameter value"),
                };
                c.bump();
                SetOption::Parameter { key, param, value }
            }
        }
        Some(Keyword::Rcwd) => {
            c.bump();
            SetOption::Rcwd(c.expect_path("directory name")?)
        }
        Some(Keyword::Ocwd) => {
            c.bump();
            SetOption::Ocwd
        }
        _ => return c.fail("a set option"),
    };
    Ok(Statement::Set(opt))
}

fn parse_show(c: &mut Cursor) -> Result<Statement, ParseError> {
    if c.eat_kw(Keyword::Plugin) {
        let item = if c.eat_kw(Keyword::List) {
            ShowItem::PluginList
        } else {
            ShowItem::Plugin(c.expect_ident("plugin name or 'list'")?)
        };
        return Ok(Statement::Show(item));
    }
    let item = match c.peek_kw() {
        Some(Keyword::AstHistory) => ShowItem::AstHistory,
        Some(Keyword::Environment) => ShowItem::Environment,
        Some(Keyword::History) => ShowItem::History,
        Some(Keyword::Session) => ShowItem::Session,
        Some(Keyword::Dataframe) => ShowItem::DataFrame,
        Some(Keyword::Parameter) => ShowItem::Parameter,
        _ => return c.fail("a show item"),
    };
    c.bump();
    Ok(Statement::Show(item))
}
