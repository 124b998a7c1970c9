//! Line-oriented, indentation-significant parser for the loop language.

use crate::algebra::{parse_rational, Rational};

use super::ast::{Assign, Cond, DistKind, Draw, Expr, IfBlock, Program, Rhs, Stmt};
use super::ParseError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(Rational),
    Define,
    Colon,
    Semi,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(r) => format!("`{r}`"),
            Tok::Define => "`:=`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
        }
    }
}

struct Line {
    number: usize,
    indent: usize,
    toks: Vec<(Tok, usize)>,
    end_col: usize,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

fn lex_line(number: usize, text: &str, offset: usize) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = offset + i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push((Tok::Ident(chars[start..i].iter().collect()), col));
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value = parse_rational(&text)
                .ok_or_else(|| err(number, col, format!("malformed number `{text}`")))?;
            toks.push((Tok::Num(value), col));
            continue;
        }
        let tok = match c {
            ':' if chars.get(i + 1) == Some(&'=') => {
                i += 1;
                Tok::Define
            }
            ':' => Tok::Colon,
            ';' => Tok::Semi,
            ',' => Tok::Comma,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            other => return Err(err(number, col, format!("unexpected character `{other}`"))),
        };
        toks.push((tok, col));
        i += 1;
    }
    Ok(toks)
}

fn split_lines(src: &str) -> Result<Vec<Line>, ParseError> {
    let mut lines = Vec::new();
    let mut indent_char: Option<char> = None;
    for (idx, raw) in src.lines().enumerate() {
        let number = idx + 1;
        let code = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        if code.trim().is_empty() {
            continue;
        }
        let lead: Vec<char> = code.chars().take_while(|c| *c == ' ' || *c == '\t').collect();
        if let Some(&first) = lead.first() {
            if lead.iter().any(|c| *c != first) || indent_char.is_some_and(|c| c != first) {
                return Err(err(number, 1, "mixed tabs and spaces in indentation"));
            }
            indent_char = Some(first);
        }
        let toks = lex_line(number, &code[lead.len()..], lead.len())?;
        lines.push(Line {
            number,
            indent: lead.len(),
            toks,
            end_col: code.trim_end().chars().count() + 1,
        });
    }
    Ok(lines)
}

struct Cursor<'a> {
    line: &'a Line,
    pos: usize,
    next_draw: &'a mut usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.line.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.line
            .toks
            .get(self.pos)
            .map(|(_, c)| *c)
            .unwrap_or(self.line.end_col)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.line.toks.len()
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.line.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        err(self.line.number, self.col(), message)
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {}", t.describe())),
            None => self.error(format!("expected {wanted}, found end of line")),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn starts_operand(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Ident(_) | Tok::Num(_) | Tok::LParen | Tok::Minus)
        )
    }

    /// Operand after a binary operator; a missing one is reported at the operator.
    fn operand(
        &mut self,
        op_col: usize,
        op: &str,
        parse: fn(&mut Self) -> Result<Expr, ParseError>,
    ) -> Result<Expr, ParseError> {
        if !self.starts_operand() {
            return Err(err(
                self.line.number,
                op_col,
                format!("operator `{op}` is missing its right operand"),
            ));
        }
        parse(self)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let col = self.col();
            if self.eat(&Tok::Plus) {
                let rhs = self.operand(col, "+", Self::term)?;
                lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
            } else if self.eat(&Tok::Minus) {
                let rhs = self.operand(col, "-", Self::term)?;
                lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let col = self.col();
            if self.eat(&Tok::Star) {
                let rhs = self.operand(col, "*", Self::unary)?;
                lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
            } else if self.eat(&Tok::Slash) {
                let rhs = self.operand(col, "/", Self::unary)?;
                match rhs.as_constant() {
                    Some(d) if !num_traits::Zero::is_zero(&d) => {
                        lhs = Expr::Div(Box::new(lhs), d);
                    }
                    Some(_) => return Err(err(self.line.number, col, "division by zero")),
                    None => {
                        return Err(err(
                            self.line.number,
                            col,
                            "division is only allowed by numeric constants",
                        ))
                    }
                }
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let col = self.col();
        if self.eat(&Tok::Minus) {
            let inner = self.operand(col, "-", Self::unary)?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        let col = self.col();
        if self.eat(&Tok::Caret) {
            return match self.bump() {
                Some(Tok::Num(r)) if r.is_integer() && r >= Rational::from_integer(0.into()) => {
                    let e: u32 = r
                        .to_integer()
                        .try_into()
                        .map_err(|_| err(self.line.number, col, "exponent too large"))?;
                    Ok(Expr::Pow(Box::new(base), e))
                }
                Some(_) => Err(err(self.line.number, col, "exponent must be a natural number")),
                None => Err(err(
                    self.line.number,
                    col,
                    "operator `^` is missing its exponent",
                )),
            };
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let col = self.col();
        match self.bump() {
            Some(Tok::Num(r)) => Ok(Expr::Num(r)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                if self.peek() == Some(&Tok::LParen) {
                    self.pos += 1;
                    self.draw(name, col)
                } else {
                    Ok(Expr::Ident(name))
                }
            }
            _ => {
                self.pos -= 1;
                Err(self.unexpected("an expression"))
            }
        }
    }

    fn draw(&mut self, name: String, col: usize) -> Result<Expr, ParseError> {
        let (kind, arity) = match name.as_str() {
            "u" | "rand" => (DistKind::Uniform, 2),
            "g" | "gauss" => (DistKind::Normal, 2),
            "b" | "bern" => (DistKind::Bernoulli, 1),
            "d" => (DistKind::Discrete, 0),
            _ => return Err(err(self.line.number, col, format!("unknown distribution `{name}`"))),
        };
        let mut args = Vec::new();
        loop {
            args.push(self.expr()?);
            if kind == DistKind::Discrete {
                self.expect(Tok::Colon)?;
                args.push(self.expr()?);
            }
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RParen)?;
        if arity > 0 && args.len() != arity {
            return Err(err(
                self.line.number,
                col,
                format!("`{name}` takes {arity} argument(s), found {}", args.len()),
            ));
        }
        let id = *self.next_draw;
        *self.next_draw += 1;
        Ok(Expr::Draw(Box::new(Draw {
            id,
            kind,
            surface: name,
            args,
        })))
    }

    fn assign(&mut self) -> Result<Assign, ParseError> {
        let line = self.line.number;
        let var = self.ident()?;
        if matches!(var.as_str(), "while" | "if" | "else" | "true" | "flip") {
            return Err(err(line, self.line.toks[self.pos - 1].1, format!("`{var}` is a keyword")));
        }
        self.expect(Tok::Define)?;
        let first = self.expr()?;
        if self.eat(&Tok::LBracket) {
            let prob = self.expr()?;
            self.expect(Tok::RBracket)?;
            let otherwise = self.expr()?;
            return Ok(Assign {
                var,
                rhs: Rhs::Branch {
                    prob,
                    then: first,
                    otherwise,
                },
                line,
            });
        }
        Ok(Assign {
            var,
            rhs: Rhs::Det(first),
            line,
        })
    }

    /// `assign (; assign)* [;]` up to the end of the line.
    fn assign_list(&mut self) -> Result<Vec<Assign>, ParseError> {
        let mut out = vec![self.assign()?];
        while self.eat(&Tok::Semi) {
            if self.at_end() {
                break;
            }
            out.push(self.assign()?);
        }
        if !self.at_end() {
            return Err(self.unexpected("`;` or end of line"));
        }
        Ok(out)
    }
}

fn is_keyword_line(line: &Line, kw: &str) -> bool {
    matches!(line.toks.first(), Some((Tok::Ident(s), _)) if s == kw)
        && !matches!(line.toks.get(1), Some((Tok::Define, _)))
}

struct Parser {
    lines: Vec<Line>,
    pos: usize,
    next_draw: usize,
}

impl Parser {
    fn cursor(&mut self, idx: usize) -> Cursor<'_> {
        Cursor {
            line: &self.lines[idx],
            pos: 0,
            next_draw: &mut self.next_draw,
        }
    }

    fn assign_line(&mut self, idx: usize) -> Result<Vec<Assign>, ParseError> {
        self.cursor(idx).assign_list()
    }

    fn program(&mut self) -> Result<Program, ParseError> {
        let mut inits = Vec::new();
        loop {
            let Some(line) = self.lines.get(self.pos) else {
                let last = self.lines.last().map_or(1, |l| l.number + 1);
                return Err(err(last, 1, "missing `while true:` loop header"));
            };
            if line.indent != 0 {
                return Err(err(line.number, 1, "unexpected indentation before the loop"));
            }
            if is_keyword_line(line, "while") {
                break;
            }
            let idx = self.pos;
            self.pos += 1;
            inits.extend(self.assign_line(idx)?);
        }
        let header = self.pos;
        self.pos += 1;
        {
            let mut c = self.cursor(header);
            c.pos = 1;
            match c.bump() {
                Some(Tok::Ident(t)) if t == "true" => {}
                _ => {
                    c.pos -= 1;
                    return Err(c.unexpected("`true`"));
                }
            }
            c.expect(Tok::Colon)?;
            if !c.at_end() {
                return Err(c.unexpected("end of line after `while true:`"));
            }
        }
        let header_line = self.lines[header].number;
        let Some(first) = self.lines.get(self.pos) else {
            return Err(err(header_line + 1, 1, "loop body is empty"));
        };
        let body_indent = first.indent;
        if body_indent == 0 {
            return Err(err(first.number, 1, "loop body must be indented"));
        }
        let mut body = Vec::new();
        while self.pos < self.lines.len() {
            let line = &self.lines[self.pos];
            if line.indent != body_indent {
                return Err(err(line.number, 1, "inconsistent indentation in loop body"));
            }
            if is_keyword_line(line, "if") {
                body.push(Stmt::If(self.if_block(body_indent)?));
            } else if is_keyword_line(line, "else") {
                return Err(err(line.number, 1, "`else` without a matching `if`"));
            } else {
                let idx = self.pos;
                self.pos += 1;
                body.extend(self.assign_line(idx)?.into_iter().map(Stmt::Assign));
            }
        }
        Ok(Program { inits, body })
    }

    fn if_block(&mut self, indent: usize) -> Result<IfBlock, ParseError> {
        let idx = self.pos;
        self.pos += 1;
        let line_no = self.lines[idx].number;
        let (cond, inline) = {
            let mut c = self.cursor(idx);
            c.pos = 1;
            let cond = match c.peek() {
                Some(Tok::Ident(s)) if s == "flip" => {
                    c.pos += 1;
                    c.expect(Tok::LParen)?;
                    let e = c.expr()?;
                    c.expect(Tok::RParen)?;
                    Cond::Flip(e)
                }
                Some(Tok::Ident(_)) => Cond::Var(c.ident()?),
                _ => return Err(c.unexpected("`flip(...)` or a variable")),
            };
            c.expect(Tok::Colon)?;
            let inline = if c.at_end() { None } else { Some(c.assign_list()?) };
            (cond, inline)
        };
        let then_body = match inline {
            Some(a) => a,
            None => self.block(indent, line_no)?,
        };
        let Some(else_line) = self.lines.get(self.pos) else {
            return Err(err(line_no, 1, "`if` block without `else:`"));
        };
        if else_line.indent != indent || !is_keyword_line(else_line, "else") {
            return Err(err(else_line.number, 1, "expected `else:` closing the `if` block"));
        }
        let eidx = self.pos;
        self.pos += 1;
        let else_no = self.lines[eidx].number;
        let inline = {
            let mut c = self.cursor(eidx);
            c.pos = 1;
            c.expect(Tok::Colon)?;
            if c.at_end() {
                None
            } else {
                Some(c.assign_list()?)
            }
        };
        let else_body = match inline {
            Some(a) => a,
            None => self.block(indent, else_no)?,
        };
        Ok(IfBlock {
            cond,
            then_body,
            else_body,
            line: line_no,
        })
    }

    fn block(&mut self, outer: usize, opener: usize) -> Result<Vec<Assign>, ParseError> {
        let Some(first) = self.lines.get(self.pos) else {
            return Err(err(opener + 1, 1, "expected an indented block"));
        };
        let inner = first.indent;
        if inner <= outer {
            return Err(err(first.number, 1, "expected an indented block"));
        }
        let mut out = Vec::new();
        while let Some(line) = self.lines.get(self.pos) {
            if line.indent <= outer {
                break;
            }
            if line.indent != inner {
                return Err(err(line.number, 1, "inconsistent indentation in block"));
            }
            if is_keyword_line(line, "if") {
                return Err(err(line.number, 1, "nested `if` blocks are not supported"));
            }
            let idx = self.pos;
            self.pos += 1;
            out.extend(self.assign_line(idx)?);
        }
        Ok(out)
    }
}

/// Parses program text into its syntax tree.
pub fn parse(text: &str) -> Result<Program, ParseError> {
    let lines = split_lines(text)?;
    let mut p = Parser {
        lines,
        pos: 0,
        next_draw: 0,
    };
    p.program()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial() {
        let p = parse("x := 0\nwhile true:\n    x := x + 1 [p] x\n").unwrap();
        assert_eq!(p.inits.len(), 1);
        assert_eq!(p.body.len(), 1);
        assert!(matches!(&p.body[0], Stmt::Assign(Assign { rhs: Rhs::Branch { .. }, .. })));
        assert_eq!(p.params(), vec!["p".to_string()]);
    }

    #[test]
    fn dangling_operator() {
        let e = parse("x := x +").unwrap_err();
        assert_eq!((e.line, e.column), (1, 8));
        let e = parse("x := 0\nwhile true:\n    x := x *\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 12));
    }

    #[test]
    fn semicolons_and_comments() {
        let p = parse("x := 0; y := 1  # two inits\nwhile true:\n\tx := x+2 [1/2] x\n\ty := x^2\n")
            .unwrap();
        assert_eq!(p.inits.len(), 2);
        assert_eq!(p.body.len(), 2);
    }

    #[test]
    fn mixed_indentation_rejected() {
        let e = parse("x := 0\nwhile true:\n    x := x\n\tx := x\n").unwrap_err();
        assert_eq!(e.line, 4);
    }

    #[test]
    fn draws_and_division() {
        let p = parse("x := 0\nwhile true:\n    x := x + u(0, 1) + d(1:1/2, 0:1/2) - gauss(0,1)/2\n")
            .unwrap();
        assert_eq!(p.draws().len(), 3);
        let e = parse("x := 0\nwhile true:\n    x := 1/x\n").unwrap_err();
        assert_eq!(e.column, 11);
    }

    #[test]
    fn if_blocks() {
        let src = "x := 0\nwhile true:\n    if flip(1/2):\n        x := x + 1\n    else:\n        x := x - 1\n";
        let p = parse(src).unwrap();
        assert!(p.has_multipath());
        assert_eq!(p.render(), src);
        let e = parse("x := 0\nwhile true:\n    if flip(1/2):\n        x := x + 1\n").unwrap_err();
        assert_eq!(e.line, 3);
    }

    #[test]
    fn decimals_and_keywords() {
        let p = parse("x := 0.25\nwhile true:\n    x := x\n").unwrap();
        match &p.inits[0].rhs {
            Rhs::Det(Expr::Num(r)) => assert_eq!(*r, crate::algebra::rational::rat(1, 4)),
            other => panic!("{other:?}"),
        }
        assert!(parse("while := 0\nwhile true:\n    x := x\n").is_err());
    }
}
