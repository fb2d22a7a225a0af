use std::collections::BTreeSet;

use super::ast::{Formula, HealthOp, Term, VarName};
use super::lexer::{lex, Spanned, Tok};
use super::ParseError;
use crate::models::{Event, NonNegRat, TimedTrace};

const KEYWORDS: [&str; 5] = ["true", "false", "eps", "exists", "II"];

pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, furthest: None };
    let f = p.formula();
    let f = f.and_then(|f| p.expect(Tok::Eof, "end of input").map(|_| f));
    f.map_err(|()| p.furthest.take().expect("failures are recorded"))
}

/// Parses a term on its own, e.g. `tr ^ <a>`.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, furthest: None };
    let t = p.term();
    let t = t.and_then(|t| p.expect(Tok::Eof, "end of input").map(|_| t));
    t.map_err(|()| p.furthest.take().expect("failures are recorded"))
}

type PResult<T> = Result<T, ()>;

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    furthest: Option<ParseError>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    /// Records that one of `expected` was wanted here. The error kept is the
    /// one furthest into the input; expectations at the same position merge.
    fn fail<T>(&mut self, expected: &[&str]) -> PResult<T> {
        self.fail_with(expected, None)
    }

    fn fail_with<T>(&mut self, expected: &[&str], found: Option<String>) -> PResult<T> {
        let here = &self.toks[self.pos];
        let found = found.unwrap_or_else(|| here.tok.to_string());
        let at = (here.line, here.col);
        let expected: BTreeSet<String> = expected.iter().map(|s| s.to_string()).collect();
        match &mut self.furthest {
            Some(e) if (e.line, e.col) > at => {}
            Some(e) if (e.line, e.col) == at => e.expected.extend(expected),
            slot => *slot = Some(ParseError { line: at.0, col: at.1, found, expected }),
        }
        Err(())
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            self.fail(&[what])
        }
    }

    fn formula(&mut self) -> PResult<Formula> {
        let p = self.seq()?;
        if !self.eat(&Tok::Par) {
            return Ok(p);
        }
        let m = self.seq()?;
        self.expect(Tok::Par, "`||`")?;
        let q = self.seq()?;
        Ok(Formula::Par(Box::new(p), Box::new(m), Box::new(q)))
    }

    fn seq(&mut self) -> PResult<Formula> {
        let mut p = self.cond()?;
        while self.eat(&Tok::Semi) {
            p = p.seq(self.cond()?);
        }
        Ok(p)
    }

    fn cond(&mut self) -> PResult<Formula> {
        let p = self.implies()?;
        if !self.eat(&Tok::CondOpen) {
            return Ok(p);
        }
        let b = self.formula()?;
        self.expect(Tok::CondClose, "`|>`")?;
        let q = self.cond()?;
        Ok(Formula::Cond(Box::new(p), Box::new(b), Box::new(q)))
    }

    fn implies(&mut self) -> PResult<Formula> {
        let p = self.or()?;
        if self.eat(&Tok::Implies) {
            let q = self.implies()?;
            return Ok(Formula::Implies(Box::new(p), Box::new(q)));
        }
        Ok(p)
    }

    fn or(&mut self) -> PResult<Formula> {
        let mut p = self.and()?;
        while self.eat(&Tok::Or) {
            p = p.or(self.and()?);
        }
        Ok(p)
    }

    fn and(&mut self) -> PResult<Formula> {
        let mut p = self.unary()?;
        while self.eat(&Tok::And) {
            p = p.and(self.unary()?);
        }
        Ok(p)
    }

    fn unary(&mut self) -> PResult<Formula> {
        if self.eat(&Tok::Not) {
            return Ok(Formula::Not(Box::new(self.unary()?)));
        }
        if let Tok::Ident(name) = self.peek() {
            if let Some(h) = HealthOp::from_keyword(name) {
                self.bump();
                return Ok(self.unary()?.apply(h));
            }
            if name == "exists" {
                self.bump();
                let x = self.var_name()?;
                self.expect(Tok::Dot, "`.`")?;
                let body = self.formula()?;
                return Ok(Formula::Exists(x, Box::new(body)));
            }
        }
        self.postfix()
    }

    fn postfix(&mut self) -> PResult<Formula> {
        let mut p = self.primary()?;
        while self.eat(&Tok::LBracket) {
            let mut terms = vec![self.term()?];
            while self.eat(&Tok::Comma) {
                terms.push(self.term()?);
            }
            self.expect(Tok::Slash, "`/`")?;
            let mut vars = vec![self.var_name()?];
            while self.eat(&Tok::Comma) {
                vars.push(self.var_name()?);
            }
            if terms.len() != vars.len() {
                return self.fail_with(
                    &["as many variables as terms"],
                    Some(format!("{} terms for {} variables", terms.len(), vars.len())),
                );
            }
            self.expect(Tok::RBracket, "`]`")?;
            p = Formula::Subst(Box::new(p), terms, vars);
        }
        Ok(p)
    }

    fn primary(&mut self) -> PResult<Formula> {
        let start = self.pos;
        if let Ok(f) = self.comparison() {
            return Ok(f);
        }
        self.pos = start;
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(name) if name == "true" => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Ident(name) if name == "false" => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(name) if name == "II" => {
                self.bump();
                Ok(Formula::Skip)
            }
            Tok::Ident(name) if is_definition_name(&name) => {
                self.bump();
                Ok(Formula::Named(name))
            }
            Tok::Ident(_) | Tok::Indexed(_) => {
                let x = self.var_name()?;
                if self.eat(&Tok::Assign) {
                    return Ok(Formula::Assign(x, self.term()?));
                }
                Ok(Formula::Var(x))
            }
            _ => self.fail(&["formula"]),
        }
    }

    /// `s = t` or `s <= t`.
    fn comparison(&mut self) -> PResult<Formula> {
        let lhs = self.term()?;
        let eq = match self.peek() {
            Tok::Eq => true,
            Tok::Le => false,
            _ => return self.fail(&["`=`", "`<=`"]),
        };
        self.bump();
        let rhs = self.term()?;
        Ok(if eq { Formula::Eq(lhs, rhs) } else { Formula::Le(lhs, rhs) })
    }

    fn var_name(&mut self) -> PResult<VarName> {
        match self.peek().clone() {
            Tok::Ident(name) if is_variable_name(&name) => {
                self.bump();
                Ok(VarName(name))
            }
            Tok::Indexed(name) => {
                self.bump();
                Ok(VarName(name))
            }
            _ => self.fail(&["variable"]),
        }
    }

    fn term(&mut self) -> PResult<Term> {
        let mut t = self.atom()?;
        loop {
            if self.eat(&Tok::Caret) {
                t = Term::Concat(Box::new(t), Box::new(self.atom()?));
            } else if self.eat(&Tok::Minus) {
                t = Term::Minus(Box::new(t), Box::new(self.atom()?));
            } else {
                return Ok(t);
            }
        }
    }

    fn atom(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Ident(name) if name == "eps" => {
                self.bump();
                Ok(Term::Eps)
            }
            Tok::Ident(name) if name == "true" || name == "false" => {
                self.bump();
                Ok(Term::Bool(name == "true"))
            }
            Tok::Ident(_) | Tok::Indexed(_) => Ok(Term::Var(self.var_name()?)),
            Tok::Int(n) => {
                self.bump();
                match i64::try_from(n) {
                    Ok(n) => Ok(Term::Int(n)),
                    Err(_) => self.fail_with(&["integer literal"], Some("integer out of range".into())),
                }
            }
            Tok::Minus if matches!(self.peek_at(1), Tok::Int(_)) => {
                self.bump();
                let Tok::Int(n) = self.bump() else { unreachable!() };
                match i64::try_from(-(i128::from(n))) {
                    Ok(n) => Ok(Term::Int(n)),
                    Err(_) => self.fail_with(&["integer literal"], Some("integer out of range".into())),
                }
            }
            Tok::Str(s) => match s.parse::<NonNegRat>() {
                Ok(r) => {
                    self.bump();
                    Ok(Term::Rat(r))
                }
                Err(e) => self.fail_with(&["rational literal \"p/q\""], Some(e.to_string())),
            },
            Tok::Sym(s) => {
                self.bump();
                Ok(Term::Sym(s))
            }
            Tok::Json(s) => match serde_json::from_str::<TimedTrace>(&s) {
                Ok(t) => {
                    self.bump();
                    Ok(Term::Timed(t))
                }
                Err(e) => self.fail_with(&["timed-trace literal"], Some(e.to_string())),
            },
            Tok::Lt => {
                self.bump();
                let mut events = Vec::new();
                if self.eat(&Tok::Gt) {
                    return Ok(Term::Seq(events));
                }
                loop {
                    match self.peek().clone() {
                        Tok::Ident(e) if !e.ends_with('\'') => {
                            self.bump();
                            events.push(Event::new(e));
                        }
                        _ => return self.fail(&["event"]),
                    }
                    if self.eat(&Tok::Gt) {
                        return Ok(Term::Seq(events));
                    }
                    self.expect(Tok::Comma, "`,`")?;
                }
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => self.fail(&["term"]),
        }
    }
}

/// Uppercase names other than the keywords refer to definitions.
fn is_definition_name(name: &str) -> bool {
    name.starts_with(|c: char| c.is_ascii_uppercase())
        && !name.ends_with('\'')
        && HealthOp::from_keyword(name).is_none()
        && !KEYWORDS.contains(&name)
}

fn is_variable_name(name: &str) -> bool {
    !name.starts_with(|c: char| c.is_ascii_uppercase())
        && !KEYWORDS.contains(&name.trim_end_matches('\''))
}
