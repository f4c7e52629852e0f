//! Recursive-descent parser for profile expressions.
//!
//! Grammar, in order of loosening precedence:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-'? power
//! power  := atom ('^' factor)?
//! atom   := number | 'y' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
//! func   := 'sin' | 'cos' | 'tan' | 'exp' | 'ln' | 'sqrt'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-y^2`
//! reads as `-(y^2)`. Numbers are unsigned decimal literals with an optional
//! fraction and exponent; a leading `-` always parses as unary negation.

use super::{BinOp, Expr, ParseError, UnaryFn};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok {
    Num(f64),
    Var,
    Pi,
    Euler,
    Func(UnaryFn),
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
}

impl Tok {
    fn describe(self) -> &'static str {
        match self {
            Tok::Num(_) => "number",
            Tok::Var => "'y'",
            Tok::Pi => "'pi'",
            Tok::Euler => "'e'",
            Tok::Func(_) => "function name",
            Tok::LParen => "'('",
            Tok::RParen => "')'",
            Tok::Plus => "'+'",
            Tok::Minus => "'-'",
            Tok::Star => "'*'",
            Tok::Slash => "'/'",
            Tok::Caret => "'^'",
        }
    }
}

/// Parses an expression in the single variable `y`.
///
/// The grammar is documented at module level. `pi` and `e` parse to their
/// `f64` constants. Errors report the byte offset of the offending token.
pub fn parse_expression(input: &str) -> Result<Expr, ParseError> {
    let tokens = tokenize(input)?;
    if tokens.is_empty() {
        return Err(ParseError::Empty);
    }
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        end: input.len(),
    };
    let expr = parser.expr()?;
    match parser.peek() {
        None => Ok(expr),
        Some((_, at)) => Err(ParseError::Syntax {
            pos: at,
            message: "unexpected trailing input".to_string(),
        }),
    }
}

fn tokenize(input: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = input.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                tokens.push((Tok::Plus, i));
                i += 1;
            }
            '-' => {
                tokens.push((Tok::Minus, i));
                i += 1;
            }
            '*' => {
                tokens.push((Tok::Star, i));
                i += 1;
            }
            '/' => {
                tokens.push((Tok::Slash, i));
                i += 1;
            }
            '^' => {
                tokens.push((Tok::Caret, i));
                i += 1;
            }
            '(' => {
                tokens.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                tokens.push((Tok::RParen, i));
                i += 1;
            }
            '0'..='9' => {
                let (tok, next) = lex_number(input, i)?;
                tokens.push((tok, i));
                i = next;
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let name = &input[start..i];
                let tok = match name {
                    "y" => Tok::Var,
                    "pi" => Tok::Pi,
                    "e" => Tok::Euler,
                    "sin" => Tok::Func(UnaryFn::Sin),
                    "cos" => Tok::Func(UnaryFn::Cos),
                    "tan" => Tok::Func(UnaryFn::Tan),
                    "exp" => Tok::Func(UnaryFn::Exp),
                    "ln" => Tok::Func(UnaryFn::Ln),
                    "sqrt" => Tok::Func(UnaryFn::Sqrt),
                    _ => {
                        return Err(ParseError::UnknownIdentifier {
                            name: name.to_string(),
                            pos: start,
                        })
                    }
                };
                tokens.push((tok, start));
            }
            _ => {
                return Err(ParseError::Syntax {
                    pos: i,
                    message: format!("unexpected character '{c}'"),
                })
            }
        }
    }
    Ok(tokens)
}

fn lex_number(input: &str, start: usize) -> Result<(Tok, usize), ParseError> {
    let bytes = input.as_bytes();
    let mut i = start;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        if i >= bytes.len() || !bytes[i].is_ascii_digit() {
            return Err(ParseError::Syntax {
                pos: i.min(bytes.len()),
                message: "expected digit after decimal point".to_string(),
            });
        }
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
    }
    // Consume an exponent only when it is complete; otherwise a trailing 'e'
    // lexes as the Euler constant and the parser rejects the adjacency.
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            j += 1;
        }
        if j < bytes.len() && bytes[j].is_ascii_digit() {
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            i = j;
        }
    }
    let text = &input[start..i];
    match text.parse::<f64>() {
        Ok(value) => Ok((Tok::Num(value), i)),
        Err(_) => Err(ParseError::Syntax {
            pos: start,
            message: format!("invalid number literal '{text}'"),
        }),
    }
}

struct Parser<'a> {
    tokens: &'a [(Tok, usize)],
    pos: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<(Tok, usize)> {
        self.tokens.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<(Tok, usize)> {
        let tok = self.peek();
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        match self.bump() {
            Some((tok, _)) if tok == want => Ok(()),
            Some((tok, at)) => Err(ParseError::Syntax {
                pos: at,
                message: format!("expected {}, found {}", want.describe(), tok.describe()),
            }),
            None => Err(ParseError::Syntax {
                pos: self.end,
                message: format!("expected {}, found end of input", want.describe()),
            }),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some((tok, _)) = self.peek() {
            let op = match tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        while let Some((tok, _)) = self.peek() {
            let op = match tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if let Some((Tok::Minus, _)) = self.peek() {
            self.bump();
            let inner = self.power()?;
            return Ok(Expr::Unary(UnaryFn::Neg, Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if let Some((Tok::Caret, _)) = self.peek() {
            self.bump();
            let exponent = self.factor()?;
            return Ok(Expr::Binary(
                BinOp::Pow,
                Box::new(base),
                Box::new(exponent),
            ));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.bump() {
            Some((Tok::Num(value), _)) => Ok(Expr::Const(value)),
            Some((Tok::Var, _)) => Ok(Expr::Var),
            Some((Tok::Pi, _)) => Ok(Expr::Const(std::f64::consts::PI)),
            Some((Tok::Euler, _)) => Ok(Expr::Const(std::f64::consts::E)),
            Some((Tok::Func(func), _)) => {
                self.expect(Tok::LParen)?;
                let arg = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(Expr::Unary(func, Box::new(arg)))
            }
            Some((Tok::LParen, _)) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Some((tok, at)) => Err(ParseError::Syntax {
                pos: at,
                message: format!("expected a value, found {}", tok.describe()),
            }),
            None => Err(ParseError::Syntax {
                pos: self.end,
                message: "expected a value, found end of input".to_string(),
            }),
        }
    }
}
