//! Parser for rational-function expressions such as `(x1^2 - 3/5*x2)/(x1 + 1)`.

use thiserror::Error;

use orbitlab_core::exact_numbers::{parse_rational, ExactRational};
use orbitlab_core::poly::RatFunc;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprErrorKind {
    Syntax,
    UnknownVariable,
    NonIntegerExponent,
    DivisionByZero,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at column {column} (token `{token}`)")]
pub struct ExprError {
    pub kind: ExprErrorKind,
    /// 1-based character column inside the expression.
    pub column: usize,
    pub token: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    column: usize,
}

impl Token {
    fn text(&self) -> String {
        match &self.tok {
            Tok::Num(s) | Tok::Ident(s) => s.clone(),
            Tok::Op(c) => c.to_string(),
            Tok::End => "<end>".to_string(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<Token>, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            out.push(Token { tok: Tok::Num(chars[start..i].iter().collect()), column });
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), column });
        } else if "+-*/^()".contains(c) {
            out.push(Token { tok: Tok::Op(c), column });
            i += 1;
        } else {
            return Err(ExprError {
                kind: ExprErrorKind::Syntax,
                column,
                token: c.to_string(),
                message: "unexpected character".into(),
            });
        }
    }
    out.push(Token { tok: Tok::End, column: chars.len() + 1 });
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, kind: ExprErrorKind, tok: &Token, message: &str) -> ExprError {
        ExprError { kind, column: tok.column, token: tok.text(), message: message.into() }
    }

    fn expr(&mut self) -> Result<RatFunc, ExprError> {
        let mut acc = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = self.peek().tok {
            self.next();
            let rhs = self.term()?;
            acc = if c == '+' { acc.add(&rhs) } else { acc.sub(&rhs) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFunc, ExprError> {
        let mut acc = self.unary()?;
        while let Tok::Op(c @ ('*' | '/')) = self.peek().tok {
            let op = self.next();
            let rhs = self.unary()?;
            acc = if c == '*' {
                acc.mul(&rhs)
            } else {
                acc.div(&rhs).ok_or_else(|| self.err(ExprErrorKind::DivisionByZero, &op, "division by zero"))?
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RatFunc, ExprError> {
        match self.peek().tok {
            Tok::Op('-') => {
                self.next();
                Ok(self.unary()?.neg())
            }
            Tok::Op('+') => {
                self.next();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RatFunc, ExprError> {
        let base = self.atom()?;
        if self.peek().tok != Tok::Op('^') {
            return Ok(base);
        }
        let caret = self.next();
        let exp = self.exponent()?;
        base.pow(exp).ok_or_else(|| self.err(ExprErrorKind::DivisionByZero, &caret, "zero raised to a negative power"))
    }

    fn exponent(&mut self) -> Result<i32, ExprError> {
        let mut sign = 1;
        let mut parens = 0;
        loop {
            match self.peek().tok {
                Tok::Op('(') => {
                    self.next();
                    parens += 1;
                }
                Tok::Op('-') => {
                    self.next();
                    sign = -sign;
                }
                Tok::Op('+') => {
                    self.next();
                }
                _ => break,
            }
        }
        let tok = self.next();
        let value = match &tok.tok {
            Tok::Num(s) if s.chars().all(|c| c.is_ascii_digit()) => {
                s.parse::<i32>().map_err(|_| self.err(ExprErrorKind::NonIntegerExponent, &tok, "exponent out of range"))?
            }
            Tok::Num(_) | Tok::Ident(_) => {
                return Err(self.err(ExprErrorKind::NonIntegerExponent, &tok, "exponent must be an integer literal"))
            }
            _ => return Err(self.err(ExprErrorKind::Syntax, &tok, "expected an exponent")),
        };
        for _ in 0..parens {
            let close = self.next();
            if close.tok != Tok::Op(')') {
                return Err(self.err(ExprErrorKind::NonIntegerExponent, &close, "exponent must be an integer literal"));
            }
        }
        Ok(sign * value)
    }

    fn atom(&mut self) -> Result<RatFunc, ExprError> {
        let tok = self.next();
        let n = self.vars.len();
        match &tok.tok {
            Tok::Num(s) => {
                let q = parse_rational(s).map_err(|_| self.err(ExprErrorKind::Syntax, &tok, "malformed number"))?;
                Ok(RatFunc::constant(n, q))
            }
            Tok::Ident(name) => match self.vars.iter().position(|v| v == name) {
                Some(i) => Ok(RatFunc::var(n, i)),
                None => Err(self.err(ExprErrorKind::UnknownVariable, &tok, "unknown variable")),
            },
            Tok::Op('(') => {
                let inner = self.expr()?;
                let close = self.next();
                if close.tok != Tok::Op(')') {
                    return Err(self.err(ExprErrorKind::Syntax, &close, "expected `)`"));
                }
                Ok(inner)
            }
            _ => Err(self.err(ExprErrorKind::Syntax, &tok, "expected a number, variable or `(`")),
        }
    }
}

/// Parses an expression in the given variables.
pub fn parse_expr(src: &str, vars: &[&str]) -> Result<RatFunc, ExprError> {
    let tokens = lex(src)?;
    let mut p = Parser { tokens, pos: 0, vars };
    let value = p.expr()?;
    let rest = p.peek().clone();
    if rest.tok != Tok::End {
        return Err(p.err(ExprErrorKind::Syntax, &rest, "unexpected token"));
    }
    Ok(value)
}

/// Parses a constant expression such as `-3/4` or `2^10`.
pub fn parse_constant(src: &str) -> Result<ExactRational, ExprError> {
    let f = parse_expr(src, &[])?;
    match f.numerator().as_constant() {
        Some(q) => Ok(q / f.denominator().as_constant().expect("constant denominator")),
        None => unreachable!("no variables in scope"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use orbitlab_core::exact_numbers::{rat, ratio};
    use orbitlab_core::poly::Evaluation;
    use proptest::prelude::*;

    #[test]
    fn parses_and_evaluates() {
        let f = parse_expr("(x1^2 - 3/5*x2)/(x1 + 1)", &["x1", "x2"]).unwrap();
        assert_eq!(f.eval(&[rat(2), rat(5)]), Evaluation::Value(ratio(1, 3)));
        let g = parse_expr("-x1^2", &["x1"]).unwrap();
        assert_eq!(g.eval(&[rat(3)]), Evaluation::Value(rat(-9)));
        let h = parse_expr("x1^(-2) + 0.5", &["x1"]).unwrap();
        assert_eq!(h.eval(&[rat(2)]), Evaluation::Value(ratio(3, 4)));
        assert_eq!(parse_constant("-3/4").unwrap(), ratio(-3, 4));
    }

    #[test]
    fn error_kinds_and_columns() {
        let e = parse_expr("x1^1.5", &["x1"]).unwrap_err();
        assert_eq!((e.kind, e.column, e.token.as_str()), (ExprErrorKind::NonIntegerExponent, 4, "1.5"));
        let e = parse_expr("x1 + y", &["x1"]).unwrap_err();
        assert_eq!((e.kind, e.column, e.token.as_str()), (ExprErrorKind::UnknownVariable, 6, "y"));
        let e = parse_expr("x1 + * 2", &["x1"]).unwrap_err();
        assert_eq!((e.kind, e.column), (ExprErrorKind::Syntax, 6));
        let e = parse_expr("(x1", &["x1"]).unwrap_err();
        assert_eq!(e.kind, ExprErrorKind::Syntax);
        let e = parse_expr("1/0", &[]).unwrap_err();
        assert_eq!(e.kind, ExprErrorKind::DivisionByZero);
        let e = parse_expr("x1^x1", &["x1"]).unwrap_err();
        assert_eq!(e.kind, ExprErrorKind::NonIntegerExponent);
    }

    proptest! {
        #[test]
        fn random_expressions_round_trip(
            terms in prop::collection::vec((-20i64..=20, 1i64..=6, 0u32..=3, 0u32..=2), 1..5),
            den in prop::collection::vec((-5i64..=5, 0u32..=2), 1..3),
        ) {
            let names = ["x1", "x2"];
            let num_src: Vec<String> = terms.iter().map(|(n, d, a, b)| format!("({n}/{d})*x1^{a}*x2^{b}")).collect();
            let den_src: Vec<String> = den.iter().map(|(c, a)| format!("{c}*x2^{a}")).collect();
            let src = format!("({}) / ({} + 7)", num_src.join(" + "), den_src.join(" - "));
            let f = match parse_expr(&src, &names) {
                Ok(f) => f,
                Err(e) => {
                    prop_assert_eq!(e.kind, ExprErrorKind::DivisionByZero);
                    return Ok(());
                }
            };
            let again = parse_expr(&f.render(&names), &names).unwrap();
            prop_assert_eq!(again, f);
        }
    }

    #[test]
    fn render_round_trip() {
        for src in ["x1+1", "1/(x1-2)", "(x1^2 - 3/5*x2)/(2*x1 + 1)", "-7/3", "x1*x2^3 - x2"] {
            let f = parse_expr(src, &["x1", "x2"]).unwrap();
            let text = f.render(&["x1", "x2"]);
            assert_eq!(parse_expr(&text, &["x1", "x2"]).unwrap(), f, "{src} -> {text}");
        }
    }
}
