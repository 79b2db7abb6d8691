//! Text DSL for operator expressions.

use num::bigint::BigInt;
use num::{BigRational, Complex, One, Zero};
use thiserror::Error;

use super::{OperatorExpr, Scalar};
use crate::fock::{GenKind, Generator, ModeIndex, Sector, SectorConfig};

pub const GRAMMAR: &str = r#"expr   := term { ("+" | "-") term } ;
term   := [ scalar ] gen { gen } | scalar ;
gen    := ("b+" | "b-") "[" sector "," serial "]" ;
sector := "11" | "12" | "21" | "22" ;
serial := positive decimal integer ;
scalar := decimal [ "i" ] | "(" decimal "," decimal ")" ;
"#;

/// 1-based line and column of a source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownSector,
    SerialOutOfRange,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {}, column {}: {message}", .span.line, .span.column)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: Span,
    pub message: String,
}

/// Parsed expression plus the source position of every generator.
#[derive(Debug, Clone, PartialEq)]
pub struct SpannedExpr {
    pub expr: OperatorExpr,
    pub generator_spans: Vec<Vec<Span>>,
}

impl SpannedExpr {
    /// Checks serials against `cfg`, reporting the first offending position.
    pub fn bind(self, cfg: &SectorConfig) -> Result<OperatorExpr, ParseError> {
        for (term, spans) in self.expr.terms().iter().zip(&self.generator_spans) {
            for (g, span) in term.gens.iter().zip(spans) {
                if g.mode.validate(cfg).is_err() {
                    return Err(ParseError {
                        kind: ParseErrorKind::SerialOutOfRange,
                        span: *span,
                        message: format!(
                            "serial {} out of range, sector {} has {} modes",
                            g.mode.serial,
                            g.mode.sector,
                            cfg.count(g.mode.sector)
                        ),
                    });
                }
            }
        }
        Ok(self.expr)
    }
}

pub fn parse(text: &str) -> Result<OperatorExpr, ParseError> {
    parse_spanned(text).map(|s| s.expr)
}

pub fn parse_spanned(text: &str) -> Result<SpannedExpr, ParseError> {
    let mut p = Parser::new(text);
    p.expr()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            src: text.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn span(&self) -> Span {
        Span {
            line: self.line,
            column: self.col,
        }
    }

    fn error<T>(
        &self,
        kind: ParseErrorKind,
        span: Span,
        message: impl Into<String>,
    ) -> Result<T, ParseError> {
        Err(ParseError {
            kind,
            span,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<u8> {
        self.src.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.bump();
        }
    }

    fn expect(&mut self, want: u8) -> Result<(), ParseError> {
        self.skip_ws();
        let span = self.span();
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            Some(c) => self.error(
                ParseErrorKind::Syntax,
                span,
                format!("expected '{}', found '{}'", want as char, c as char),
            ),
            None => self.error(
                ParseErrorKind::Syntax,
                span,
                format!("expected '{}', found end of input", want as char),
            ),
        }
    }

    fn at_gen(&self) -> bool {
        self.peek() == Some(b'b') && matches!(self.peek_at(1), Some(b'+') | Some(b'-'))
    }

    fn expr(&mut self) -> Result<SpannedExpr, ParseError> {
        let mut expr = OperatorExpr::zero();
        let mut spans = Vec::new();
        self.skip_ws();
        if self.peek().is_none() {
            return self.error(ParseErrorKind::Syntax, self.span(), "empty expression");
        }
        let mut negate = false;
        if let Some(c @ (b'+' | b'-')) = self.peek() {
            self.bump();
            negate = c == b'-';
        }
        loop {
            let (mut scalar, gens, gen_spans) = self.term()?;
            if negate {
                scalar = -scalar;
            }
            expr.push_term(scalar, gens);
            spans.push(gen_spans);
            self.skip_ws();
            match self.peek() {
                None => break,
                Some(b'+') => {
                    self.bump();
                    negate = false;
                }
                Some(b'-') => {
                    self.bump();
                    negate = true;
                }
                Some(c) => {
                    return self.error(
                        ParseErrorKind::Syntax,
                        self.span(),
                        format!("expected '+', '-' or end of input, found '{}'", c as char),
                    )
                }
            }
        }
        Ok(SpannedExpr {
            expr,
            generator_spans: spans,
        })
    }

    fn term(&mut self) -> Result<(Scalar, Vec<Generator>, Vec<Span>), ParseError> {
        self.skip_ws();
        let start = self.span();
        let scalar = match self.peek() {
            Some(b'(') => Some(self.pair_scalar()?),
            Some(c) if c.is_ascii_digit() => Some(self.real_scalar()?),
            _ => None,
        };
        let mut gens = Vec::new();
        let mut spans = Vec::new();
        loop {
            self.skip_ws();
            if !self.at_gen() {
                break;
            }
            spans.push(self.span());
            gens.push(self.generator()?);
        }
        if scalar.is_none() && gens.is_empty() {
            let found = match self.peek() {
                Some(c) => format!("'{}'", c as char),
                None => "end of input".into(),
            };
            return self.error(
                ParseErrorKind::Syntax,
                start,
                format!("expected scalar or generator, found {found}"),
            );
        }
        let one = Complex::new(BigRational::one(), BigRational::zero());
        Ok((scalar.unwrap_or(one), gens, spans))
    }

    fn decimal(&mut self) -> Result<BigRational, ParseError> {
        self.skip_ws();
        let span = self.span();
        let mut negative = false;
        if self.peek() == Some(b'-') {
            negative = true;
            self.bump();
        }
        let mut digits = String::new();
        while let Some(c) = self.peek().filter(u8::is_ascii_digit) {
            digits.push(c as char);
            self.bump();
        }
        if digits.is_empty() {
            return self.error(ParseErrorKind::Syntax, span, "expected decimal number");
        }
        let mut scale = 0usize;
        if self.peek() == Some(b'.') && matches!(self.peek_at(1), Some(c) if c.is_ascii_digit()) {
            self.bump();
            while let Some(c) = self.peek().filter(u8::is_ascii_digit) {
                digits.push(c as char);
                scale += 1;
                self.bump();
            }
        }
        let numer: BigInt = digits.parse().expect("ascii digits");
        let denom = num::pow(BigInt::from(10), scale);
        let value = BigRational::new(numer, denom);
        Ok(if negative { -value } else { value })
    }

    fn real_scalar(&mut self) -> Result<Scalar, ParseError> {
        let v = self.decimal()?;
        if self.peek() == Some(b'i') {
            self.bump();
            Ok(Complex::new(BigRational::zero(), v))
        } else {
            Ok(Complex::new(v, BigRational::zero()))
        }
    }

    fn pair_scalar(&mut self) -> Result<Scalar, ParseError> {
        self.expect(b'(')?;
        let re = self.decimal()?;
        self.expect(b',')?;
        let im = self.decimal()?;
        self.expect(b')')?;
        Ok(Complex::new(re, im))
    }

    fn generator(&mut self) -> Result<Generator, ParseError> {
        self.bump();
        let kind = match self.bump() {
            Some(b'+') => GenKind::Create,
            _ => GenKind::Annihilate,
        };
        self.expect(b'[')?;
        self.skip_ws();
        let sector_span = self.span();
        let sector_text = self.integer_text();
        let Some(sector) = Sector::from_label(&sector_text) else {
            return self.error(
                ParseErrorKind::UnknownSector,
                sector_span,
                format!("unknown sector '{sector_text}', sector must be 11|12|21|22"),
            );
        };
        self.expect(b',')?;
        self.skip_ws();
        let serial_span = self.span();
        let serial_text = self.integer_text();
        let serial: usize = match serial_text.parse() {
            Ok(v) if v >= 1 => v,
            _ => {
                return self.error(
                    ParseErrorKind::Syntax,
                    serial_span,
                    format!("serial must be a positive integer, found '{serial_text}'"),
                )
            }
        };
        self.expect(b']')?;
        Ok(Generator {
            kind,
            mode: ModeIndex::new(sector, serial),
        })
    }

    fn integer_text(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(u8::is_ascii_digit) {
            s.push(c as char);
            self.bump();
        }
        s
    }
}
