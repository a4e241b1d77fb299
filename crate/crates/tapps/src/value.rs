//! Scalar cell values and the comparison/cast primitives built on them.
//!
//! A cell is text, a signed integer, or a finite double. Reals are kept
//! finite everywhere: parsers and constructors reject NaN and infinities,
//! so comparisons over numeric cells are total.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

/// One cell of a data frame.
#[derive(Debug, Clone, PartialEq)]
pub enum CellValue {
    Text(String),
    Int(i64),
    Real(f64),
}

#[derive(Debug, Error, PartialEq)]
pub enum ValueError {
    #[error("real values must be finite, got {0}")]
    NonFinite(f64),
}

/// First f64 above the i64 range; used to gate float-to-int conversions.
const I64_RANGE_TOP: f64 = 9_223_372_036_854_775_808.0;

impl CellValue {
    /// Build a Real cell, rejecting NaN and infinities.
    pub fn real(v: f64) -> Result<Self, ValueError> {
        if v.is_finite() {
            Ok(CellValue::Real(v))
        } else {
            Err(ValueError::NonFinite(v))
        }
    }

    pub fn text(s: impl Into<String>) -> Self {
        CellValue::Text(s.into())
    }

    /// Canonical text rendering: integers without a decimal point, reals in
    /// their shortest round-trip decimal form, text verbatim.
    pub fn render(&self) -> String {
        match self {
            CellValue::Text(s) => s.clone(),
            CellValue::Int(i) => i.to_string(),
            CellValue::Real(r) => format!("{r}"),
        }
    }

    /// Numeric view of the cell: Int and Real directly, Text only when the
    /// whole string parses as a finite number.
    pub fn numeric_value(&self) -> Option<f64> {
        match self {
            CellValue::Int(i) => Some(*i as f64),
            CellValue::Real(r) => Some(*r),
            CellValue::Text(s) => parse_number(s),
        }
    }

    /// Interpret a raw literal or bytecode operand: integer first, then
    /// real, then text verbatim. Integral reals ("5.0", "1e5") normalize
    /// to Int so the canonical rendering re-parses to an equal value.
    pub fn parse_literal(s: &str) -> CellValue {
        if let Ok(i) = s.parse::<i64>() {
            return CellValue::Int(i);
        }
        match parse_number(s) {
            Some(v) => match int_if_integral(v) {
                Some(i) => CellValue::Int(i),
                None => CellValue::Real(v),
            },
            None => CellValue::Text(s.to_string()),
        }
    }
}

impl fmt::Display for CellValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Strict numeric parse: only digits, sign, decimal point, and exponent
/// characters are accepted, and the result must be finite. Rejects the
/// textual forms ("inf", "NaN") that `f64::from_str` would admit.
pub fn parse_number(s: &str) -> Option<f64> {
    if s.is_empty() || !s.bytes().any(|b| b.is_ascii_digit()) {
        return None;
    }
    if !s
        .bytes()
        .all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'e' | b'E' | b'+' | b'-'))
    {
        return None;
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Binary comparison operators usable in selection criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Gt,
    Lt,
    Ge,
    Le,
    Eq,
    Ne,
}

impl BinOp {
    pub const ALL: [BinOp; 6] = [BinOp::Gt, BinOp::Lt, BinOp::Ge, BinOp::Le, BinOp::Eq, BinOp::Ne];

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Gt => ">",
            BinOp::Lt => "<",
            BinOp::Ge => ">=",
            BinOp::Le => "<=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<BinOp> {
        Some(match s {
            ">" => BinOp::Gt,
            "<" => BinOp::Lt,
            ">=" => BinOp::Ge,
            "<=" => BinOp::Le,
            "==" => BinOp::Eq,
            "!=" => BinOp::Ne,
            _ => return None,
        })
    }

    /// The logically complementary operator: a row satisfies exactly one of
    /// `op` and `op.negate()` against the same value.
    pub fn negate(self) -> BinOp {
        match self {
            BinOp::Gt => BinOp::Le,
            BinOp::Le => BinOp::Gt,
            BinOp::Lt => BinOp::Ge,
            BinOp::Ge => BinOp::Lt,
            BinOp::Eq => BinOp::Ne,
            BinOp::Ne => BinOp::Eq,
        }
    }

    fn apply(self, ord: Ordering) -> bool {
        match self {
            BinOp::Gt => ord == Ordering::Greater,
            BinOp::Lt => ord == Ordering::Less,
            BinOp::Ge => ord != Ordering::Less,
            BinOp::Le => ord != Ordering::Greater,
            BinOp::Eq => ord == Ordering::Equal,
            BinOp::Ne => ord != Ordering::Equal,
        }
    }
}

impl fmt::Display for BinOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Compare two cells. Numeric when both sides have a numeric view,
/// lexicographic over the canonical renderings otherwise. Total: every
/// pair of cells compares.
pub fn compare_values(a: &CellValue, b: &CellValue, op: BinOp) -> bool {
    let ord = match (a.numeric_value(), b.numeric_value()) {
        (Some(x), Some(y)) => {
            if let (CellValue::Int(i), CellValue::Int(j)) = (a, b) {
                i.cmp(j)
            } else {
                x.partial_cmp(&y).expect("cell reals are finite")
            }
        }
        _ => a.render().cmp(&b.render()),
    };
    op.apply(ord)
}

/// Target types for the cast operation. `Float` and `Real` behave
/// identically; both variants are kept so source text round-trips.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CastType {
    Alpha,
    NonAlpha,
    Float,
    Real,
    Integer,
}

impl CastType {
    pub fn keyword(self) -> &'static str {
        match self {
            CastType::Alpha => "alpha",
            CastType::NonAlpha => "nonalpha",
            CastType::Float => "float",
            CastType::Real => "real",
            CastType::Integer => "integer",
        }
    }

    pub fn from_keyword(s: &str) -> Option<CastType> {
        Some(match s.to_ascii_lowercase().as_str() {
            "alpha" => CastType::Alpha,
            "nonalpha" => CastType::NonAlpha,
            "float" => CastType::Float,
            "real" => CastType::Real,
            "integer" => CastType::Integer,
            _ => return None,
        })
    }
}

impl fmt::Display for CastType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// Convert one cell to the target type. `None` means the cell cannot be
/// converted and should be left unchanged.
pub fn cast_cell(cell: &CellValue, t: CastType) -> Option<CellValue> {
    match t {
        CastType::Alpha => Some(CellValue::Text(cell.render())),
        CastType::Integer => match cell {
            CellValue::Int(i) => Some(CellValue::Int(*i)),
            CellValue::Real(r) => truncate_to_int(*r).map(CellValue::Int),
            CellValue::Text(s) => {
                if let Ok(i) = s.parse::<i64>() {
                    Some(CellValue::Int(i))
                } else {
                    parse_number(s).and_then(truncate_to_int).map(CellValue::Int)
                }
            }
        },
        CastType::Float | CastType::Real => match cell {
            CellValue::Int(i) => Some(CellValue::Real(*i as f64)),
            CellValue::Real(r) => Some(CellValue::Real(*r)),
            CellValue::Text(s) => parse_number(s).map(CellValue::Real),
        },
        CastType::NonAlpha => {
            let stripped: String = cell
                .render()
                .chars()
                .filter(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'))
                .collect();
            if let Ok(i) = stripped.parse::<i64>() {
                return Some(CellValue::Int(i));
            }
            let v = parse_number(&stripped)?;
            Some(match int_if_integral(v) {
                Some(i) => CellValue::Int(i),
                None => CellValue::Real(v),
            })
        }
    }
}

/// Truncate toward zero; fails outside the i64 range.
fn truncate_to_int(r: f64) -> Option<i64> {
    let t = r.trunc();
    if (-I64_RANGE_TOP..I64_RANGE_TOP).contains(&t) {
        Some(t as i64)
    } else {
        None
    }
}

fn int_if_integral(v: f64) -> Option<i64> {
    if v.fract() == 0.0 && (-I64_RANGE_TOP..I64_RANGE_TOP).contains(&v) {
        Some(v as i64)
    } else {
        None
    }
}
