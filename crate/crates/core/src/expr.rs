//! Boolean/arithmetic expressions over named values.
//!
//! Used for `where`/`given` clauses in effect scripts, guards and updates of
//! rule-based atomic models, safety predicates and ground-variable bindings.
//! Name resolution is left to an [`Env`]: a bare name the environment does not
//! know evaluates to the enumerated symbol of the same spelling.

use std::cmp::Ordering;
use std::fmt;

use crate::lexer::{tokenize, LexError, Pos, Tok, Token};
use crate::value::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
            CmpOp::Le => "<=",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Literal {
    Int(i64),
    Bool(bool),
    /// Quoted string; evaluates to the symbol with the same text.
    Str(String),
}

impl Literal {
    pub fn to_value(&self) -> Value {
        match self {
            Literal::Int(i) => Value::Int(*i),
            Literal::Bool(b) => Value::Bool(*b),
            Literal::Str(s) => Value::Sym(s.clone()),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Int(i) => write!(f, "{i}"),
            Literal::Bool(b) => write!(f, "{b}"),
            Literal::Str(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Lit(Literal, Pos),
    /// Possibly dotted name, e.g. `cmd`, `MsgBtn.dest`, `time`.
    Name(Vec<String>, Pos),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
    Arith(ArithOp, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

const KEYWORDS: &[&str] = &["and", "or", "not", "true", "false"];

pub fn is_reserved(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

impl Expr {
    pub fn name(path: &str) -> Expr {
        Expr::Name(path.split('.').map(str::to_string).collect(), Pos::default())
    }

    pub fn int(v: i64) -> Expr {
        Expr::Lit(Literal::Int(v), Pos::default())
    }

    pub fn bool(v: bool) -> Expr {
        Expr::Lit(Literal::Bool(v), Pos::default())
    }

    /// Expression that evaluates to `v`.
    pub fn value(v: &Value) -> Expr {
        match v {
            Value::Int(i) => Expr::int(*i),
            Value::Bool(b) => Expr::bool(*b),
            Value::Sym(s) if is_plain_ident(s) => Expr::name(s),
            Value::Sym(s) => Expr::Lit(Literal::Str(s.clone()), Pos::default()),
        }
    }

    pub fn cmp(op: CmpOp, a: Expr, b: Expr) -> Expr {
        Expr::Cmp(op, Box::new(a), Box::new(b))
    }

    pub fn and(a: Expr, b: Expr) -> Expr {
        Expr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Expr, b: Expr) -> Expr {
        Expr::Or(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Expr) -> Expr {
        Expr::Not(Box::new(a))
    }

    fn prec(&self) -> u8 {
        match self {
            Expr::Or(..) => 1,
            Expr::And(..) => 2,
            Expr::Not(..) => 3,
            Expr::Cmp(..) => 4,
            Expr::Arith(..) => 5,
            Expr::Lit(..) | Expr::Name(..) => 6,
        }
    }

    /// Every name referenced, with its position.
    pub fn names(&self) -> Vec<(&[String], Pos)> {
        let mut out = Vec::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names<'a>(&'a self, out: &mut Vec<(&'a [String], Pos)>) {
        match self {
            Expr::Lit(..) => {}
            Expr::Name(p, pos) => out.push((p.as_slice(), *pos)),
            Expr::Not(a) => a.collect_names(out),
            Expr::Cmp(_, a, b) | Expr::Arith(_, a, b) | Expr::And(a, b) | Expr::Or(a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
        }
    }

    /// Comparison nodes, for type checking against declarations.
    pub fn comparisons(&self) -> Vec<(CmpOp, &Expr, &Expr)> {
        let mut out = Vec::new();
        fn walk<'a>(e: &'a Expr, out: &mut Vec<(CmpOp, &'a Expr, &'a Expr)>) {
            match e {
                Expr::Cmp(op, a, b) => {
                    out.push((*op, a, b));
                    walk(a, out);
                    walk(b, out);
                }
                Expr::Arith(_, a, b) | Expr::And(a, b) | Expr::Or(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Expr::Not(a) => walk(a, out),
                Expr::Lit(..) | Expr::Name(..) => {}
            }
        }
        walk(self, &mut out);
        out
    }

    pub fn parse(src: &str) -> Result<Expr, ExprParseError> {
        let toks = tokenize(src)?;
        let mut cur = Cursor::new(&toks);
        let e = cur.expr()?;
        cur.expect(&Tok::Eof, "end of expression")?;
        Ok(e)
    }

    pub fn eval(&self, env: &dyn Env) -> Result<Value, EvalError> {
        self.eval_num(env)?.into_value()
    }

    pub fn eval_bool(&self, env: &dyn Env) -> Result<bool, EvalError> {
        match self.eval_num(env)? {
            Val::Bool(b) => Ok(b),
            other => Err(EvalError::Type(format!("expected bool, got {}", other.kind()))),
        }
    }

    fn eval_num(&self, env: &dyn Env) -> Result<Val, EvalError> {
        Ok(match self {
            Expr::Lit(l, _) => Val::from(l.to_value()),
            Expr::Name(path, _) => {
                if path.len() == 1 && path[0] == "time" {
                    if let Some((n, d)) = env.time() {
                        return Ok(Val::Num(n as i128, d as i128));
                    }
                }
                match env.lookup(path) {
                    Some(v) => Val::from(v),
                    None if path.len() == 1 => Val::Sym(path[0].clone()),
                    None => return Err(EvalError::Unresolved(path.join("."))),
                }
            }
            Expr::Not(a) => Val::Bool(!a.eval_bool(env)?),
            Expr::And(a, b) => Val::Bool(a.eval_bool(env)? && b.eval_bool(env)?),
            Expr::Or(a, b) => Val::Bool(a.eval_bool(env)? || b.eval_bool(env)?),
            Expr::Arith(op, a, b) => {
                let (x, y) = (a.eval_num(env)?, b.eval_num(env)?);
                match (x, y) {
                    (Val::Num(an, ad), Val::Num(bn, bd)) => {
                        let num = match op {
                            ArithOp::Add => an * bd + bn * ad,
                            ArithOp::Sub => an * bd - bn * ad,
                        };
                        Val::normalized(num, ad * bd)
                    }
                    (x, y) => return Err(EvalError::Type(format!("arithmetic on {} and {}", x.kind(), y.kind()))),
                }
            }
            Expr::Cmp(op, a, b) => {
                let (x, y) = (a.eval_num(env)?, b.eval_num(env)?);
                let ord = x.compare(&y);
                Val::Bool(match op {
                    CmpOp::Eq => ord == Some(Ordering::Equal),
                    CmpOp::Ne => ord != Some(Ordering::Equal),
                    _ => {
                        let ord = match (&x, &y) {
                            (Val::Num(..), Val::Num(..)) => ord.unwrap(),
                            _ => {
                                return Err(EvalError::Type(format!(
                                    "ordering comparison between {} and {}",
                                    x.kind(),
                                    y.kind()
                                )))
                            }
                        };
                        match op {
                            CmpOp::Lt => ord == Ordering::Less,
                            CmpOp::Gt => ord == Ordering::Greater,
                            CmpOp::Le => ord != Ordering::Greater,
                            CmpOp::Ge => ord != Ordering::Less,
                            CmpOp::Eq | CmpOp::Ne => unreachable!(),
                        }
                    }
                })
            }
        })
    }
}

pub fn is_plain_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !is_reserved(s)
}

/// Name lookup for expression evaluation.
pub trait Env {
    fn lookup(&self, path: &[String]) -> Option<Value>;

    /// Current simulation time as an exact ratio, when available.
    fn time(&self) -> Option<(i64, i64)> {
        None
    }
}

/// Environment that knows no names.
pub struct EmptyEnv;

impl Env for EmptyEnv {
    fn lookup(&self, _path: &[String]) -> Option<Value> {
        None
    }
}

impl<F: Fn(&[String]) -> Option<Value>> Env for F {
    fn lookup(&self, path: &[String]) -> Option<Value> {
        self(path)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unresolved name `{0}`")]
    Unresolved(String),
    #[error("type error: {0}")]
    Type(String),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExprParseError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("{pos}: expected {expected}, found {found}")]
    Syntax { pos: Pos, expected: String, found: String },
}

impl ExprParseError {
    pub fn pos(&self) -> Pos {
        match self {
            ExprParseError::Lex(e) => e.pos,
            ExprParseError::Syntax { pos, .. } => *pos,
        }
    }
}

#[derive(Clone, Debug)]
enum Val {
    Bool(bool),
    Num(i128, i128),
    Sym(String),
}

impl From<Value> for Val {
    fn from(v: Value) -> Self {
        match v {
            Value::Bool(b) => Val::Bool(b),
            Value::Int(i) => Val::Num(i as i128, 1),
            Value::Sym(s) => Val::Sym(s),
        }
    }
}

impl Val {
    fn normalized(num: i128, den: i128) -> Val {
        fn gcd(a: i128, b: i128) -> i128 {
            if b == 0 {
                a.abs()
            } else {
                gcd(b, a % b)
            }
        }
        let g = gcd(num, den).max(1);
        let (n, d) = (num / g, den / g);
        if d < 0 {
            Val::Num(-n, -d)
        } else {
            Val::Num(n, d)
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Val::Bool(_) => "bool",
            Val::Num(..) => "number",
            Val::Sym(_) => "symbol",
        }
    }

    fn compare(&self, other: &Val) -> Option<Ordering> {
        match (self, other) {
            (Val::Bool(a), Val::Bool(b)) => Some(a.cmp(b)),
            (Val::Num(an, ad), Val::Num(bn, bd)) => Some((an * bd).cmp(&(bn * ad))),
            (Val::Sym(a), Val::Sym(b)) => Some(a.cmp(b)),
            _ => None,
        }
    }

    fn into_value(self) -> Result<Value, EvalError> {
        match self {
            Val::Bool(b) => Ok(Value::Bool(b)),
            Val::Sym(s) => Ok(Value::Sym(s)),
            Val::Num(n, 1) => i64::try_from(n).map(Value::Int).map_err(|_| EvalError::Type("integer overflow".into())),
            Val::Num(n, d) => Err(EvalError::Type(format!("non-integer value {n}/{d}"))),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
            if e.prec() < min_prec {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Lit(l, _) => {
                if let Literal::Int(i) = l {
                    if *i < 0 {
                        return write!(f, "-{}", i.unsigned_abs());
                    }
                }
                write!(f, "{l}")
            }
            Expr::Name(p, _) => f.write_str(&p.join(".")),
            Expr::Or(a, b) => {
                child(f, a, 1)?;
                f.write_str(" or ")?;
                child(f, b, 2)
            }
            Expr::And(a, b) => {
                child(f, a, 2)?;
                f.write_str(" and ")?;
                child(f, b, 3)
            }
            Expr::Not(a) => {
                f.write_str("not ")?;
                child(f, a, 3)
            }
            Expr::Cmp(op, a, b) => {
                child(f, a, 5)?;
                write!(f, " {} ", op.symbol())?;
                child(f, b, 5)
            }
            Expr::Arith(op, a, b) => {
                child(f, a, 5)?;
                f.write_str(match op {
                    ArithOp::Add => " + ",
                    ArithOp::Sub => " - ",
                })?;
                child(f, b, 6)
            }
        }
    }
}

/// Token cursor with the expression grammar; the effect-script parser builds
/// on it.
pub(crate) struct Cursor<'a> {
    toks: &'a [Token],
    at: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(toks: &'a [Token]) -> Self {
        Cursor { toks, at: 0 }
    }

    pub(crate) fn peek(&self) -> &'a Token {
        &self.toks[self.at.min(self.toks.len() - 1)]
    }

    pub(crate) fn bump(&mut self) -> &'a Token {
        let t = self.peek();
        if self.at < self.toks.len() - 1 {
            self.at += 1;
        }
        t
    }

    pub(crate) fn error(&self, expected: impl Into<String>) -> ExprParseError {
        let t = self.peek();
        ExprParseError::Syntax { pos: t.pos, expected: expected.into(), found: t.tok.to_string() }
    }

    pub(crate) fn expect(&mut self, tok: &Tok, what: &str) -> Result<Pos, ExprParseError> {
        if &self.peek().tok == tok {
            Ok(self.bump().pos)
        } else {
            Err(self.error(what))
        }
    }

    pub(crate) fn is_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    pub(crate) fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.is_keyword(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect_keyword(&mut self, kw: &str) -> Result<Pos, ExprParseError> {
        if self.is_keyword(kw) {
            Ok(self.bump().pos)
        } else {
            Err(self.error(format!("`{kw}`")))
        }
    }

    /// Identifier that is not an expression keyword.
    pub(crate) fn ident(&mut self, what: &str) -> Result<(String, Pos), ExprParseError> {
        match &self.peek().tok {
            Tok::Ident(s) if !is_reserved(s) => {
                let t = self.bump();
                Ok((s.clone(), t.pos))
            }
            _ => Err(self.error(what)),
        }
    }

    pub(crate) fn expr(&mut self) -> Result<Expr, ExprParseError> {
        let mut lhs = self.and_expr()?;
        while self.eat_keyword("or") {
            let rhs = self.and_expr()?;
            lhs = Expr::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Expr, ExprParseError> {
        let mut lhs = self.not_expr()?;
        while self.eat_keyword("and") {
            let rhs = self.not_expr()?;
            lhs = Expr::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> Result<Expr, ExprParseError> {
        if self.eat_keyword("not") {
            return Ok(Expr::not(self.not_expr()?));
        }
        self.cmp_expr()
    }

    fn cmp_expr(&mut self) -> Result<Expr, ExprParseError> {
        let lhs = self.arith()?;
        let op = match self.peek().tok {
            Tok::Eq => CmpOp::Eq,
            Tok::Ne => CmpOp::Ne,
            Tok::Lt => CmpOp::Lt,
            Tok::Gt => CmpOp::Gt,
            Tok::Le => CmpOp::Le,
            Tok::Ge => CmpOp::Ge,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.arith()?;
        Ok(Expr::cmp(op, lhs, rhs))
    }

    fn arith(&mut self) -> Result<Expr, ExprParseError> {
        let mut lhs = self.atom()?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => ArithOp::Add,
                Tok::Minus => ArithOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.atom()?;
            lhs = Expr::Arith(op, Box::new(lhs), Box::new(rhs));
        }
    }

    /// A literal value (for set-lists): integer, optionally negative, quoted
    /// string, bool, or bare symbol.
    pub(crate) fn literal_value(&mut self) -> Result<(Literal, Option<String>, Pos), ExprParseError> {
        let t = self.peek();
        let pos = t.pos;
        match &t.tok {
            Tok::Int(i) => {
                self.bump();
                Ok((Literal::Int(*i), None, pos))
            }
            Tok::Minus => {
                self.bump();
                match self.peek().tok {
                    Tok::Int(i) => {
                        self.bump();
                        Ok((Literal::Int(-i), None, pos))
                    }
                    _ => Err(self.error("integer")),
                }
            }
            Tok::Str(s) => {
                self.bump();
                Ok((Literal::Str(s.clone()), None, pos))
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok((Literal::Bool(s == "true"), None, pos))
            }
            Tok::Ident(s) if !is_reserved(s) => {
                self.bump();
                Ok((Literal::Str(s.clone()), Some(s.clone()), pos))
            }
            _ => Err(self.error("literal value")),
        }
    }

    fn atom(&mut self) -> Result<Expr, ExprParseError> {
        let t = self.peek();
        let pos = t.pos;
        match &t.tok {
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Int(i) => {
                self.bump();
                Ok(Expr::Lit(Literal::Int(*i), pos))
            }
            Tok::Minus => {
                self.bump();
                match self.peek().tok {
                    Tok::Int(i) => {
                        self.bump();
                        Ok(Expr::Lit(Literal::Int(-i), pos))
                    }
                    _ => Err(self.error("integer after `-`")),
                }
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Expr::Lit(Literal::Str(s.clone()), pos))
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok(Expr::Lit(Literal::Bool(s == "true"), pos))
            }
            Tok::Ident(s) if !is_reserved(s) => {
                self.bump();
                let mut path = vec![s.clone()];
                while self.peek().tok == Tok::Dot {
                    self.bump();
                    let (seg, _) = self.ident("name after `.`")?;
                    path.push(seg);
                }
                Ok(Expr::Name(path, pos))
            }
            _ => Err(self.error("expression")),
        }
    }
}
