//! Tokenizer and s-expression reader for SMT-LIB 2 concrete syntax.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::hash::{Hash, Hasher};

use crate::error::FrontendError;

/// 1-based line and column of a token in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl Pos {
    pub const fn new(line: u32, col: u32) -> Self {
        Pos { line, col }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// Symbol name with `|...|` quoting already removed.
    Symbol(String),
    /// Keyword without the leading colon.
    Keyword(String),
    Numeral(String),
    Decimal(String),
    /// Hex digits without the `#x` prefix.
    Hex(String),
    /// Binary digits without the `#b` prefix.
    Binary(String),
    Str(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SExprKind {
    Atom(Atom),
    List(Vec<SExpr>),
}

/// An s-expression with the position of its first character.
///
/// Equality, ordering and hashing ignore positions.
#[derive(Debug, Clone)]
pub struct SExpr {
    pub kind: SExprKind,
    pub pos: Pos,
}

impl PartialEq for SExpr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}
impl Eq for SExpr {}
impl PartialOrd for SExpr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for SExpr {
    fn cmp(&self, other: &Self) -> Ordering {
        self.kind.cmp(&other.kind)
    }
}
impl Hash for SExpr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.kind.hash(state)
    }
}

impl SExpr {
    pub fn atom(atom: Atom, pos: Pos) -> Self {
        SExpr { kind: SExprKind::Atom(atom), pos }
    }

    pub fn list(items: Vec<SExpr>, pos: Pos) -> Self {
        SExpr { kind: SExprKind::List(items), pos }
    }

    pub fn symbol(name: &str) -> Self {
        SExpr::atom(Atom::Symbol(name.to_string()), Pos::default())
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match &self.kind {
            SExprKind::Atom(Atom::Symbol(s)) => Some(s),
            _ => None,
        }
    }

    pub fn as_keyword(&self) -> Option<&str> {
        match &self.kind {
            SExprKind::Atom(Atom::Keyword(s)) => Some(s),
            _ => None,
        }
    }

    pub fn as_numeral(&self) -> Option<&str> {
        match &self.kind {
            SExprKind::Atom(Atom::Numeral(s)) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match &self.kind {
            SExprKind::List(items) => Some(items),
            _ => None,
        }
    }
}

const RESERVED: &[&str] = &[
    "!", "_", "as", "let", "exists", "forall", "match", "par", "BINARY", "DECIMAL", "HEXADECIMAL",
    "NUMERAL", "STRING",
];

fn is_simple_symbol_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c)
}

/// Whether `name` can be written without `|...|` quoting.
pub fn is_simple_symbol(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        None => false,
        Some(c) if c.is_ascii_digit() || !is_simple_symbol_char(c) => false,
        Some(_) => chars.all(is_simple_symbol_char) && !RESERVED.contains(&name),
    }
}

/// Writes a user symbol, quoting it when necessary.
pub fn write_symbol(f: &mut impl fmt::Write, name: &str) -> fmt::Result {
    if is_simple_symbol(name) {
        f.write_str(name)
    } else {
        write!(f, "|{}|", name)
    }
}

/// Returns the printed form of a user symbol.
pub fn quote_symbol(name: &str) -> String {
    let mut s = String::new();
    let _ = write_symbol(&mut s, name);
    s
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Symbol(s) => write_symbol(f, s),
            Atom::Keyword(k) => write!(f, ":{}", k),
            Atom::Numeral(n) | Atom::Decimal(n) => f.write_str(n),
            Atom::Hex(h) => write!(f, "#x{}", h),
            Atom::Binary(b) => write!(f, "#b{}", b),
            Atom::Str(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    if c == '"' {
                        f.write_str("\"\"")?;
                    } else {
                        write!(f, "{}", c)?;
                    }
                }
                f.write_str("\"")
            }
        }
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SExprKind::Atom(a) => write!(f, "{}", a),
            SExprKind::List(items) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{}", item)?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Open,
    Close,
    Atom(Atom),
}

struct Lexer<'a> {
    chars: core::iter::Peekable<core::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn pos(&self) -> Pos {
        Pos::new(self.line, self.col)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(&c) = self.chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(&c) = self.chars.peek() {
            if !pred(c) {
                break;
            }
            s.push(c);
            self.bump();
        }
        s
    }

    fn next_token(&mut self) -> Result<Option<(Token, Pos)>, FrontendError> {
        self.skip_trivia();
        let pos = self.pos();
        let c = match self.chars.peek() {
            None => return Ok(None),
            Some(&c) => c,
        };
        let tok = match c {
            '(' => {
                self.bump();
                Token::Open
            }
            ')' => {
                self.bump();
                Token::Close
            }
            '|' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return Err(FrontendError::MalformedToken { pos }),
                        Some('|') => break,
                        Some('\\') => return Err(FrontendError::MalformedToken { pos }),
                        Some(c) => s.push(c),
                    }
                }
                Token::Atom(Atom::Symbol(s))
            }
            '"' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return Err(FrontendError::MalformedToken { pos }),
                        Some('"') => {
                            if self.chars.peek() == Some(&'"') {
                                self.bump();
                                s.push('"');
                            } else {
                                break;
                            }
                        }
                        Some(c) => s.push(c),
                    }
                }
                Token::Atom(Atom::Str(s))
            }
            '#' => {
                self.bump();
                let radix = self.bump();
                let digits = self.take_while(|c| c.is_ascii_alphanumeric());
                match radix {
                    Some('b') if !digits.is_empty() && digits.chars().all(|c| c == '0' || c == '1') => {
                        Token::Atom(Atom::Binary(digits))
                    }
                    Some('x') if !digits.is_empty() && digits.chars().all(|c| c.is_ascii_hexdigit()) => {
                        Token::Atom(Atom::Hex(digits))
                    }
                    _ => return Err(FrontendError::MalformedToken { pos }),
                }
            }
            ':' => {
                self.bump();
                let name = self.take_while(is_simple_symbol_char);
                if name.is_empty() {
                    return Err(FrontendError::MalformedToken { pos });
                }
                Token::Atom(Atom::Keyword(name))
            }
            c if c.is_ascii_digit() => {
                let int = self.take_while(|c| c.is_ascii_digit());
                if int.len() > 1 && int.starts_with('0') {
                    return Err(FrontendError::MalformedToken { pos });
                }
                if self.chars.peek() == Some(&'.') {
                    self.bump();
                    let frac = self.take_while(|c| c.is_ascii_digit());
                    if frac.is_empty() {
                        return Err(FrontendError::MalformedToken { pos });
                    }
                    Token::Atom(Atom::Decimal(alloc::format!("{}.{}", int, frac)))
                } else {
                    if matches!(self.chars.peek(), Some(&c) if is_simple_symbol_char(c)) {
                        return Err(FrontendError::MalformedToken { pos });
                    }
                    Token::Atom(Atom::Numeral(int))
                }
            }
            c if is_simple_symbol_char(c) => Token::Atom(Atom::Symbol(self.take_while(is_simple_symbol_char))),
            _ => return Err(FrontendError::MalformedToken { pos }),
        };
        Ok(Some((tok, pos)))
    }
}

/// Reads every top-level s-expression in `text`.
pub fn parse_sexprs(text: &str) -> Result<Vec<SExpr>, FrontendError> {
    let mut lexer = Lexer::new(text);
    let mut stack: Vec<(Pos, Vec<SExpr>)> = Vec::new();
    let mut out = Vec::new();
    while let Some((tok, pos)) = lexer.next_token()? {
        match tok {
            Token::Open => stack.push((pos, Vec::new())),
            Token::Close => {
                let (start, items) = stack.pop().ok_or(FrontendError::UnbalancedParens { pos })?;
                let e = SExpr::list(items, start);
                match stack.last_mut() {
                    Some((_, parent)) => parent.push(e),
                    None => out.push(e),
                }
            }
            Token::Atom(a) => {
                let e = SExpr::atom(a, pos);
                match stack.last_mut() {
                    Some((_, parent)) => parent.push(e),
                    None => out.push(e),
                }
            }
        }
    }
    if let Some((pos, _)) = stack.first() {
        return Err(FrontendError::UnbalancedParens { pos: *pos });
    }
    Ok(out)
}

/// Reads exactly one s-expression.
pub fn parse_sexpr(text: &str) -> Result<SExpr, FrontendError> {
    let mut all = parse_sexprs(text)?;
    match all.len() {
        1 => Ok(all.pop().unwrap()),
        0 => Err(FrontendError::MalformedToken { pos: Pos::new(1, 1) }),
        _ => Err(FrontendError::MalformedToken { pos: all[1].pos }),
    }
}
