//! Line lexer. One statement per line; tokens are keywords, identifiers,
//! numbers, filenames, quoted strings, comparison operators, and
//! single-character delimiters.

use thiserror::Error;

use crate::value::{parse_number, BinOp};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LexError {
    #[error("cannot tokenize '{fragment}' at column {column}")]
    BadFragment { column: usize, fragment: String },
    #[error("unterminated string starting at column {column}")]
    UnterminatedString { column: usize },
}

/// Reserved words. Matched case-insensitively; an identifier can never
/// collide with one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    All,
    Alpha,
    As,
    AstHistory,
    Cast,
    Csv,
    Cwd,
    Dataframe,
    Delete,
    Describe,
    DisplayAst,
    Environment,
    FillIn,
    Float,
    From,
    History,
    In,
    Integer,
    Labels,
    List,
    Load,
    Merge,
    New,
    NoHeader,
    NonAlpha,
    Ocwd,
    Parameter,
    Plugin,
    PythonShell,
    Rcwd,
    Real,
    Rename,
    Replace,
    Results,
    RunPlugin,
    Save,
    Select,
    Separator,
    Series,
    Session,
    Set,
    Show,
    To,
    Where,
}

impl Keyword {
    pub fn as_str(self) -> &'static str {
        use Keyword::*;
        match self {
            All => "all",
            Alpha => "alpha",
            As => "as",
            AstHistory => "asthistory",
            Cast => "cast",
            Csv => "csv",
            Cwd => "cwd",
            Dataframe => "dataframe",
            Delete => "delete",
            Describe => "describe",
            DisplayAst => "displayast",
            Environment => "environment",
            FillIn => "fillin",
            Float => "float",
            From => "from",
            History => "history",
            In => "in",
            Integer => "integer",
            Labels => "labels",
            List => "list",
            Load => "load",
            Merge => "merge",
            New => "new",
            NoHeader => "noheader",
            NonAlpha => "nonalpha",
            Ocwd => "ocwd",
            Parameter => "parameter",
            Plugin => "plugin",
            PythonShell => "pythonshell",
            Rcwd => "rcwd",
            Real => "real",
            Rename => "rename",
            Replace => "replace",
            Results => "results",
            RunPlugin => "runplugin",
            Save => "save",
            Select => "select",
            Separator => "separator",
            Series => "series",
            Session => "session",
            Set => "set",
            Show => "show",
            To => "to",
            Where => "where",
        }
    }

    pub fn lookup(word: &str) -> Option<Keyword> {
        use Keyword::*;
        Some(match word.to_ascii_lowercase().as_str() {
            "all" => All,
            "alpha" => Alpha,
            "as" => As,
            "asthistory" => AstHistory,
            "cast" => Cast,
            "csv" => Csv,
            "cwd" => Cwd,
            "dataframe" => Dataframe,
            "delete" => Delete,
            "describe" => Describe,
            "displayast" => DisplayAst,
            "environment" => Environment,
            "fillin" => FillIn,
            "float" => Float,
            "from" => From,
            "history" => History,
            "in" => In,
            "integer" => Integer,
            "labels" => Labels,
            "list" => List,
            "load" => Load,
            "merge" => Merge,
            "new" => New,
            "noheader" => NoHeader,
            "nonalpha" => NonAlpha,
            "ocwd" => Ocwd,
            "parameter" => Parameter,
            "plugin" => Plugin,
            "pythonshell" => PythonShell,
            "rcwd" => Rcwd,
            "real" => Real,
            "rename" => Rename,
            "replace" => Replace,
            "results" => Results,
            "runplugin" => RunPlugin,
            "save" => Save,
            "select" => Select,
            "separator" => Separator,
            "series" => Series,
            "session" => Session,
            "set" => Set,
            "show" => Show,
            "to" => To,
            "where" => Where,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident,
    Number,
    Filename,
    /// Quoted string; carries the unescaped content.
    Str(String),
    Op(BinOp),
    Delim(char),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// Raw source text, never empty. For strings this includes the quotes.
    pub lexeme: String,
    pub line: usize,
    /// 1-based character column.
    pub column: usize,
}

/// Characters that may appear inside an unquoted word. Dash, plus, dot and
/// the exponent letters keep numbers whole; dot, slashes and tilde keep
/// paths whole.
fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '.' | '/' | '\\' | '-' | '+' | '~')
}

pub fn is_identifier(word: &str) -> bool {
    let mut cs = word.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn classify(word: &str) -> Option<TokenKind> {
    let first = word.chars().next().expect("words are non-empty");
    if word.chars().count() == 1 && !first.is_alphanumeric() && first != '_' {
        return Some(TokenKind::Delim(first));
    }
    if let Some(k) = Keyword::lookup(word) {
        return Some(TokenKind::Keyword(k));
    }
    if parse_number(word).is_some() {
        return Some(TokenKind::Number);
    }
    if word.contains(['.', '/', '\\', '~']) {
        return Some(TokenKind::Filename);
    }
    if is_identifier(word) {
        return Some(TokenKind::Ident);
    }
    None
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, LexError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c == '"' {
            i += 1;
            let mut content = String::new();
            loop {
                match chars.get(i) {
                    None => {
                        return Err(LexError::UnterminatedString { column: start + 1 });
                    }
                    Some('"') if chars.get(i + 1) == Some(&'"') => {
                        content.push('"');
                        i += 2;
                    }
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some(&ch) => {
                        content.push(ch);
                        i += 1;
                    }
                }
            }
            out.push(Token {
                kind: TokenKind::Str(content),
                lexeme: chars[start..i].iter().collect(),
                line: 1,
                column: start + 1,
            });
        } else if matches!(c, '>' | '<' | '=' | '!') {
            let pair = chars
                .get(i + 1)
                .and_then(|n| BinOp::from_symbol(&format!("{c}{n}")));
            let (op, len) = match pair {
                Some(op) => (op, 2),
                None if c == '>' => (BinOp::Gt, 1),
                None if c == '<' => (BinOp::Lt, 1),
                None => {
                    return Err(LexError::BadFragment {
                        column: start + 1,
                        fragment: c.to_string(),
                    });
                }
            };
            i += len;
            out.push(Token {
                kind: TokenKind::Op(op),
                lexeme: chars[start..i].iter().collect(),
                line: 1,
                column: start + 1,
            });
        } else if is_word_char(c) {
            while i < chars.len() && is_word_char(chars[i]) {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            let kind = classify(&word).ok_or(LexError::BadFragment {
                column: start + 1,
                fragment: word.clone(),
            })?;
            out.push(Token {
                kind,
                lexeme: word,
                line: 1,
                column: start + 1,
            });
        } else {
            i += 1;
            out.push(Token {
                kind: TokenKind::Delim(c),
                lexeme: c.to_string(),
                line: 1,
                column: start + 1,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<TokenKind> {
        tokenize(text).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn load_statement_token_kinds() {
        assert_eq!(
            kinds("load csv STI_2015.csv as STI"),
            vec![
                TokenKind::Keyword(Keyword::Load),
                TokenKind::Keyword(Keyword::Csv),
                TokenKind::Filename,
                TokenKind::Keyword(Keyword::As),
                TokenKind::Ident,
            ]
        );
    }

    #[test]
    fn empty_input_gives_no_tokens() {
        assert_eq!(tokenize("").unwrap(), vec![]);
        assert_eq!(tokenize("   \t ").unwrap(), vec![]);
    }

    #[test]
    fn keywords_are_case_insensitive() {
        let upper = kinds("SELECT FROM a AS b");
        let lower = kinds("select from a as b");
        assert_eq!(upper, lower);
    }

    #[test]
    fn identifiers_keep_case() {
        let toks = tokenize("describe STI_Low").unwrap();
        assert_eq!(toks[1].lexeme, "STI_Low");
    }

    #[test]
    fn operators_single_and_double() {
        assert_eq!(
            kinds("> < >= <= == !="),
            vec![
                TokenKind::Op(BinOp::Gt),
                TokenKind::Op(BinOp::Lt),
                TokenKind::Op(BinOp::Ge),
                TokenKind::Op(BinOp::Le),
                TokenKind::Op(BinOp::Eq),
                TokenKind::Op(BinOp::Ne),
            ]
        );
        // No backtracking hazard when the line ends on a one-char operator.
        assert_eq!(kinds("<"), vec![TokenKind::Op(BinOp::Lt)]);
    }

    #[test]
    fn lone_equals_is_an_error() {
        let err = tokenize("select = 5").unwrap_err();
        assert_eq!(
            err,
            LexError::BadFragment {
                column: 8,
                fragment: "=".into()
            }
        );
    }

    #[test]
    fn numbers_are_strict() {
        assert_eq!(kinds("820"), vec![TokenKind::Number]);
        assert_eq!(kinds("-2.5e3"), vec![TokenKind::Number]);
        // Digit-free or malformed words with path characters are filenames.
        assert_eq!(kinds("2.5.3"), vec![TokenKind::Filename]);
    }

    #[test]
    fn standalone_punctuation_is_a_delimiter() {
        assert_eq!(kinds(","), vec![TokenKind::Delim(',')]);
        assert_eq!(kinds("."), vec![TokenKind::Delim('.')]);
        assert_eq!(kinds("|"), vec![TokenKind::Delim('|')]);
        assert_eq!(kinds("a,b"), vec![
            TokenKind::Ident,
            TokenKind::Delim(','),
            TokenKind::Ident,
        ]);
    }

    #[test]
    fn quoted_strings_unescape_doubled_quotes() {
        let toks = tokenize("rename series in f from \"Adj Close\" to \"say \"\"hi\"\"\"").unwrap();
        assert_eq!(toks[5].kind, TokenKind::Str("Adj Close".into()));
        assert_eq!(toks[5].lexeme, "\"Adj Close\"");
        assert_eq!(toks[7].kind, TokenKind::Str("say \"hi\"".into()));
    }

    #[test]
    fn unterminated_string_errors_with_position() {
        let err = tokenize("show \"oops").unwrap_err();
        assert_eq!(err, LexError::UnterminatedString { column: 6 });
    }

    #[test]
    fn columns_are_one_based() {
        let toks = tokenize("set rcwd data").unwrap();
        assert_eq!(toks[0].column, 1);
        assert_eq!(toks[1].column, 5);
        assert_eq!(toks[2].column, 10);
    }

    #[test]
    fn word_salad_is_rejected() {
        assert!(matches!(
            tokenize("cast a-b in f as alpha"),
            Err(LexError::BadFragment { fragment, .. }) if fragment == "a-b"
        ));
    }
}
