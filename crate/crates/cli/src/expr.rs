//! The expression grammar used by algebra files and reports.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' uint)?
//! atom   := rational | ident | '(' expr ')' | '-' atom
//! ```
//!
//! Identifiers are `del`, `lam`, or a generator name; juxtaposition is
//! not multiplication; whitespace is insignificant. Every additive term
//! may reference at most one generator, at multiplicity one.


use lcas_core::poly::{Poly, Rational, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

fn err<T>(line: u32, col: u32, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, col, message: message.into() })
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: u32,
    col: u32,
}

fn lex(src: &str) -> Result<(Vec<Token>, (u32, u32)), ParseError> {
    let mut out = Vec::new();
    let mut line = 1u32;
    let mut col = 1u32;
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let mut advance = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                advance(&mut chars);
            }
            '0'..='9' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        s.push(advance(&mut chars));
                    } else {
                        break;
                    }
                }
                out.push(Token { tok: Tok::Int(s), line: tline, col: tcol });
            }
            'A'..='Z' | 'a'..='z' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        s.push(advance(&mut chars));
                    } else {
                        break;
                    }
                }
                out.push(Token { tok: Tok::Ident(s), line: tline, col: tcol });
            }
            _ => {
                let tok = match c {
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '/' => Tok::Slash,
                    '^' => Tok::Caret,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    other => return err(tline, tcol, format!("unexpected character `{other}`")),
                };
                advance(&mut chars);
                out.push(Token { tok, line: tline, col: tcol });
            }
        }
    }
    Ok((out, (line, col)))
}

/// Parsed expression node, annotated with its source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprAst {
    pub node: ExprNode,
    pub line: u32,
    pub col: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprNode {
    Rational(Rational),
    Variable(Var),
    Generator(usize),
    Add(Box<ExprAst>, Box<ExprAst>),
    Sub(Box<ExprAst>, Box<ExprAst>),
    Mul(Box<ExprAst>, Box<ExprAst>),
    Pow(Box<ExprAst>, u32),
    Neg(Box<ExprAst>),
}

struct Parser<'a> {
    tokens: Vec<Token>,
    eof: (u32, u32),
    pos: usize,
    generators: &'a [String],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn here(&self) -> (u32, u32) {
        self.peek().map(|t| (t.line, t.col)).unwrap_or(self.eof)
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        self.pos += 1;
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek().map(|t| &t.tok) == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<ExprAst, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let (line, col) = self.here();
            if self.eat(&Tok::Plus) {
                let rhs = self.term()?;
                lhs = ExprAst { node: ExprNode::Add(Box::new(lhs), Box::new(rhs)), line, col };
            } else if self.eat(&Tok::Minus) {
                let rhs = self.term()?;
                lhs = ExprAst { node: ExprNode::Sub(Box::new(lhs), Box::new(rhs)), line, col };
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<ExprAst, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let (line, col) = self.here();
            if self.eat(&Tok::Star) {
                let rhs = self.factor()?;
                lhs = ExprAst { node: ExprNode::Mul(Box::new(lhs), Box::new(rhs)), line, col };
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<ExprAst, ParseError> {
        let base = self.atom()?;
        let (line, col) = self.here();
        if self.eat(&Tok::Caret) {
            let (eline, ecol) = self.here();
            match self.peek().map(|t| t.tok.clone()) {
                Some(Tok::Int(s)) => {
                    self.bump();
                    let exp: u32 = s
                        .parse()
                        .map_err(|_| ParseError {
                            line: eline,
                            col: ecol,
                            message: format!("exponent `{s}` is too large"),
                        })?;
                    Ok(ExprAst { node: ExprNode::Pow(Box::new(base), exp), line, col })
                }
                _ => err(eline, ecol, "expected a non-negative integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<ExprAst, ParseError> {
        let (line, col) = self.here();
        match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::Int(s)) => {
                self.bump();
                // a rational literal is INT or INT '/' INT
                let numer: Rational = s.parse().expect("digits");
                if self.eat(&Tok::Slash) {
                    let (dline, dcol) = self.here();
                    match self.peek().map(|t| t.tok.clone()) {
                        Some(Tok::Int(d)) => {
                            self.bump();
                            let denom: Rational = d.parse().expect("digits");
                            if denom == lcas_core::poly::rat_int(0) {
                                return err(dline, dcol, "zero denominator");
                            }
                            Ok(ExprAst {
                                node: ExprNode::Rational(numer / denom),
                                line,
                                col,
                            })
                        }
                        _ => err(dline, dcol, "expected a denominator"),
                    }
                } else {
                    Ok(ExprAst { node: ExprNode::Rational(numer), line, col })
                }
            }
            Some(Tok::Ident(name)) => {
                self.bump();
                match name.as_str() {
                    "del" => Ok(ExprAst { node: ExprNode::Variable(Var::Del), line, col }),
                    "lam" => Ok(ExprAst { node: ExprNode::Variable(Var::Lam), line, col }),
                    _ => match self.generators.iter().position(|g| g == &name) {
                        Some(k) => Ok(ExprAst { node: ExprNode::Generator(k), line, col }),
                        None => err(line, col, format!("unknown identifier `{name}`")),
                    },
                }
            }
            Some(Tok::LParen) => {
                self.bump();
                let inner = self.expr()?;
                let (cline, ccol) = self.here();
                if self.eat(&Tok::RParen) {
                    Ok(inner)
                } else {
                    err(cline, ccol, "expected `)`")
                }
            }
            Some(Tok::Minus) => {
                self.bump();
                let inner = self.atom()?;
                Ok(ExprAst { node: ExprNode::Neg(Box::new(inner)), line, col })
            }
            _ => err(line, col, "expected a number, identifier, `(` or `-`"),
        }
    }
}

/// A module-valued expression: a scalar polynomial in `(del, lam)` plus
/// one coefficient polynomial per generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinExpr {
    pub scalar: Poly,
    pub coeffs: Vec<Poly>,
}

impl LinExpr {
    fn constant(n: usize, p: Poly) -> LinExpr {
        LinExpr { scalar: p, coeffs: vec![Poly::zero(); n] }
    }

    fn has_generator(&self) -> bool {
        self.coeffs.iter().any(|p| !p.is_zero())
    }
}

fn lower(ast: &ExprAst, n: usize) -> Result<LinExpr, ParseError> {
    match &ast.node {
        ExprNode::Rational(r) => Ok(LinExpr::constant(n, Poly::constant(r.clone()))),
        ExprNode::Variable(v) => Ok(LinExpr::constant(n, Poly::var(*v))),
        ExprNode::Generator(k) => {
            let mut e = LinExpr::constant(n, Poly::zero());
            e.coeffs[*k] = Poly::one();
            Ok(e)
        }
        ExprNode::Add(a, b) => {
            let (a, b) = (lower(a, n)?, lower(b, n)?);
            Ok(LinExpr {
                scalar: &a.scalar + &b.scalar,
                coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect(),
            })
        }
        ExprNode::Sub(a, b) => {
            let (a, b) = (lower(a, n)?, lower(b, n)?);
            Ok(LinExpr {
                scalar: &a.scalar - &b.scalar,
                coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect(),
            })
        }
        ExprNode::Mul(a, b) => {
            let (a, b) = (lower(a, n)?, lower(b, n)?);
            match (a.has_generator(), b.has_generator()) {
                (true, true) => err(ast.line, ast.col, "two generators multiplied"),
                (true, false) => Ok(LinExpr {
                    scalar: &a.scalar * &b.scalar,
                    coeffs: a.coeffs.iter().map(|p| p * &b.scalar).collect(),
                }),
                (false, _) => Ok(LinExpr {
                    scalar: &a.scalar * &b.scalar,
                    coeffs: b.coeffs.iter().map(|p| p * &a.scalar).collect(),
                }),
            }
        }
        ExprNode::Pow(a, e) => {
            let a = lower(a, n)?;
            if a.has_generator() {
                match e {
                    1 => Ok(a),
                    _ => err(ast.line, ast.col, "generator raised to a power other than 1"),
                }
            } else {
                Ok(LinExpr::constant(n, a.scalar.pow(*e)))
            }
        }
        ExprNode::Neg(a) => {
            let a = lower(a, n)?;
            Ok(LinExpr {
                scalar: -&a.scalar,
                coeffs: a.coeffs.iter().map(|p| -p).collect(),
            })
        }
    }
}

/// Parses one expression against a generator list and validates the
/// one-generator-per-term rule (surfaced as positioned errors).
pub fn parse_expr(src: &str, generators: &[String]) -> Result<ExprAst, ParseError> {
    let (tokens, eof) = lex(src)?;
    let mut parser = Parser { tokens, eof, pos: 0, generators };
    let ast = parser.expr()?;
    if let Some(extra) = parser.peek() {
        return err(extra.line, extra.col, "unexpected trailing input");
    }
    lower(&ast, generators.len())?;
    Ok(ast)
}

/// Parses and lowers in one step; most callers want the linear form.
pub fn parse_lin_expr(src: &str, generators: &[String]) -> Result<LinExpr, ParseError> {
    let (tokens, eof) = lex(src)?;
    let mut parser = Parser { tokens, eof, pos: 0, generators };
    let ast = parser.expr()?;
    if let Some(extra) = parser.peek() {
        return err(extra.line, extra.col, "unexpected trailing input");
    }
    lower(&ast, generators.len())
}

/// Renders `coeff * generator` so that it reparses to the same value.
pub fn render_term(coeff: &Poly, generator: &str) -> String {
    if coeff.is_zero() {
        return "0".into();
    }
    if coeff.is_one() {
        return generator.to_string();
    }
    let text = coeff.to_string();
    if coeff.num_terms() == 1 {
        if text == "-1" {
            format!("-{generator}")
        } else {
            format!("{text}*{generator}")
        }
    } else {
        format!("({text})*{generator}")
    }
}

/// Renders a coordinate vector as a sum of terms in the grammar.
pub fn render_element(coeffs: &[Poly], generators: &[String]) -> String {
    let mut parts = Vec::new();
    for (c, g) in coeffs.iter().zip(generators) {
        if !c.is_zero() {
            parts.push(render_term(c, g));
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        let mut out = parts[0].clone();
        for p in &parts[1..] {
            if let Some(rest) = p.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
        out
    }
}
