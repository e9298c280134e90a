//! Expression grammar for series and forms.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' '-'? integer)?
//! atom   := integer | z<k> | w<k> | dz<k> | dw<k> | '(' expr ')'
//! ```
//!
//! `*` between forms is the wedge product. Division and negative exponents
//! are accepted only for functions with nonzero constant term.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::forms::{generator_bit, Form};
use crate::ring::{Rational, RingSpec, TruncatedSeries, VarKind};

pub fn parse_series(text: &str, ring: RingSpec) -> Result<TruncatedSeries> {
    let form = parse_form(text, ring)?;
    if form.terms().any(|(mask, _)| mask != 0) {
        return Err(Error::Shape {
            expected: "function".into(),
            found: format!("form `{form}`"),
        });
    }
    Ok(form.function_part())
}

pub fn parse_form(text: &str, ring: RingSpec) -> Result<Form> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        ring,
    };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(v.form)
}

struct Value {
    form: Form,
    /// Untruncated degree when the value is a single literal monomial.
    literal_degree: Option<u32>,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ring: RingSpec,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Parse {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Value> {
        let mut acc = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = Value {
                form: if op == b'+' {
                    &acc.form + &rhs.form
                } else {
                    &acc.form - &rhs.form
                },
                literal_degree: None,
            };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Value> {
        let mut acc = self.unary()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            let offset = self.pos;
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == b'*' {
                let literal_degree = match (acc.literal_degree, rhs.literal_degree) {
                    (Some(a), Some(b)) => Some(self.check_degree(a + b, offset)?),
                    _ => None,
                };
                Value {
                    form: acc.form.wedge(&rhs.form),
                    literal_degree,
                }
            } else {
                let inv = self.invert(&rhs.form, offset)?;
                let literal_degree = match (acc.literal_degree, rhs.literal_degree) {
                    (Some(a), Some(0)) => Some(a),
                    _ => None,
                };
                Value {
                    form: acc.form.mul_function(&inv),
                    literal_degree,
                }
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Value> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                let v = self.unary()?;
                Ok(Value {
                    form: -&v.form,
                    literal_degree: v.literal_degree,
                })
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Value> {
        let start = {
            self.skip_ws();
            self.pos
        };
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let negative = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        self.skip_ws();
        let digits_at = self.pos;
        let k = self.integer()?;
        let k: u32 = k.try_into().map_err(|_| Error::Parse {
            offset: digits_at,
            message: "exponent too large".into(),
        })?;
        let literal_degree = match base.literal_degree {
            Some(d) if !negative => Some(self.check_degree(d * k, start)?),
            Some(0) => Some(0),
            _ => None,
        };
        let form = if negative {
            let inv = self.invert(&base.form, start)?;
            Form::function(inv.pow(k))
        } else {
            let mut acc = Form::one(self.ring);
            for _ in 0..k {
                acc = acc.wedge(&base.form);
            }
            acc
        };
        Ok(Value {
            form,
            literal_degree,
        })
    }

    fn atom(&mut self) -> Result<Value> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(Value {
                    form: Form::function(TruncatedSeries::constant(
                        self.ring,
                        Rational::from_integer(n),
                    )),
                    literal_degree: Some(0),
                })
            }
            Some(b'z' | b'w' | b'd') => self.variable(),
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn variable(&mut self) -> Result<Value> {
        let start = self.pos;
        let differential = self.src[self.pos] == b'd';
        if differential {
            self.pos += 1;
        }
        let kind = match self.src.get(self.pos) {
            Some(b'z') => VarKind::Z,
            Some(b'w') => VarKind::W,
            _ => return Err(self.error("expected `z` or `w`")),
        };
        self.pos += 1;
        let digits_at = self.pos;
        if !self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            return Err(self.error("expected a variable index"));
        }
        let index = self.integer()?;
        let index = usize::try_from(index)
            .ok()
            .filter(|&i| i >= 1 && i <= self.ring.num_vars())
            .ok_or_else(|| Error::Parse {
                offset: digits_at,
                message: format!("variable index must lie in 1..={}", self.ring.num_vars()),
            })?;
        if differential {
            Ok(Value {
                form: Form::term(
                    generator_bit(self.ring, kind, index),
                    TruncatedSeries::one(self.ring),
                ),
                literal_degree: Some(0),
            })
        } else {
            let degree = self.check_degree(1, start)?;
            Ok(Value {
                form: Form::function(TruncatedSeries::var(self.ring, kind, index)),
                literal_degree: Some(degree),
            })
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("validated digits"))
    }

    fn check_degree(&self, degree: u32, offset: usize) -> Result<u32> {
        if degree > self.ring.truncation() {
            Err(Error::DegreeOverflow {
                offset,
                degree,
                truncation: self.ring.truncation(),
            })
        } else {
            Ok(degree)
        }
    }

    fn invert(&self, form: &Form, offset: usize) -> Result<TruncatedSeries> {
        if form.terms().any(|(mask, _)| mask != 0) {
            return Err(Error::Parse {
                offset,
                message: "only functions can be inverted".into(),
            });
        }
        form.function_part()
            .invert_unit()
            .map_err(|_| Error::Parse {
                offset,
                message: "divisor has zero constant term".into(),
            })
    }
}
