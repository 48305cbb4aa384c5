//! Recursive-descent parser producing unvalidated statements.

use super::ast::{parse_probability, Atom, Builtin, Formula, Literal, Probability, Term};
use super::lexer::{syntax, tokenize, Pos, Tok};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum DeclKind {
    Random,
    External,
}

#[derive(Clone, Debug)]
pub(crate) enum Statement {
    Decl {
        kind: DeclKind,
        predicate: String,
        arity: usize,
        line: usize,
    },
    Random {
        probability: Option<Probability>,
        head: Atom,
        body: Formula,
        line: usize,
    },
    Rule {
        head: Atom,
        body: Formula,
        line: usize,
    },
    Constraint {
        body: Formula,
        line: usize,
    },
}

pub(crate) struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    anonymous: usize,
}

impl Parser {
    pub(crate) fn new(text: &str) -> Result<Self> {
        Ok(Parser {
            toks: tokenize(text)?,
            at: 0,
            anonymous: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.at + k).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn unexpected(&self, wanted: &str) -> crate::error::Error {
        syntax(
            self.pos(),
            format!("expected {wanted}, found {}", self.peek().describe()),
        )
    }

    pub(crate) fn at_end(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub(crate) fn statements(&mut self) -> Result<Vec<Statement>> {
        let mut out = Vec::new();
        while !self.at_end() {
            out.push(self.statement()?);
        }
        Ok(out)
    }

    fn statement(&mut self) -> Result<Statement> {
        let line = self.pos().line;
        match (self.peek().clone(), self.peek_at(1).clone()) {
            (Tok::Ident(kw), next) if (kw == "random" || kw == "external") => {
                let kind = if kw == "random" {
                    DeclKind::Random
                } else {
                    DeclKind::External
                };
                match next {
                    Tok::Ident(_) => {
                        self.bump();
                        let predicate = self.ident()?;
                        self.expect(&Tok::Slash)?;
                        let arity = self.natural()?;
                        self.expect(&Tok::Dot)?;
                        Ok(Statement::Decl {
                            kind,
                            predicate,
                            arity,
                            line,
                        })
                    }
                    Tok::LParen => {
                        self.bump();
                        self.bump();
                        let predicate = self.ident()?;
                        self.expect(&Tok::Comma)?;
                        let arity = self.natural()?;
                        self.expect(&Tok::RParen)?;
                        self.expect(&Tok::Dot)?;
                        Ok(Statement::Decl {
                            kind,
                            predicate,
                            arity,
                            line,
                        })
                    }
                    _ => self.rule(line),
                }
            }
            (Tok::If, _) => {
                self.bump();
                let body = self.disjunction()?;
                self.expect(&Tok::Dot)?;
                Ok(Statement::Constraint { body, line })
            }
            (Tok::Number(_), Tok::Prob | Tok::Slash) | (Tok::Var(_), Tok::Prob) => {
                let probability = self.probability()?;
                self.expect(&Tok::Prob)?;
                let head = self.relational_atom()?;
                let body = if self.eat(&Tok::If) {
                    self.disjunction()?
                } else {
                    Formula::truth()
                };
                self.expect(&Tok::Dot)?;
                Ok(Statement::Random {
                    probability,
                    head,
                    body,
                    line,
                })
            }
            _ => self.rule(line),
        }
    }

    fn rule(&mut self, line: usize) -> Result<Statement> {
        let head = self.relational_atom()?;
        let body = if self.eat(&Tok::If) {
            self.disjunction()?
        } else {
            Formula::truth()
        };
        self.expect(&Tok::Dot)?;
        Ok(Statement::Rule { head, body, line })
    }

    fn probability(&mut self) -> Result<Option<Probability>> {
        let pos = self.pos();
        match self.bump() {
            Tok::Var(v) if v == "_" => Ok(None),
            Tok::Number(n) => {
                let text = if self.eat(&Tok::Slash) {
                    match self.bump() {
                        Tok::Number(d) => format!("{n}/{d}"),
                        _ => return Err(syntax(pos, "malformed probability")),
                    }
                } else {
                    n
                };
                parse_probability(&text)
                    .map(Some)
                    .ok_or_else(|| syntax(pos, format!("malformed probability `{text}`")))
            }
            _ => Err(syntax(pos, "expected a probability or `_`")),
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn natural(&mut self) -> Result<usize> {
        let pos = self.pos();
        match self.bump() {
            Tok::Number(n) => n
                .parse()
                .map_err(|_| syntax(pos, format!("expected an arity, found `{n}`"))),
            other => Err(syntax(
                pos,
                format!("expected an arity, found {}", other.describe()),
            )),
        }
    }

    fn term(&mut self) -> Result<Term> {
        let pos = self.pos();
        match self.bump() {
            Tok::Ident(s) => Ok(Term::constant(&s)),
            Tok::Var(s) if s == "_" => {
                self.anonymous += 1;
                Ok(Term::var(&format!("_G{}", self.anonymous)))
            }
            Tok::Var(s) => Ok(Term::var(&s)),
            Tok::Number(s) if !s.contains('.') => Ok(Term::constant(&s)),
            other => Err(syntax(
                pos,
                format!("expected a term, found {}", other.describe()),
            )),
        }
    }

    pub(crate) fn relational_atom(&mut self) -> Result<Atom> {
        let name = self.ident()?;
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) {
            loop {
                args.push(self.term()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(&Tok::RParen)?;
        }
        Ok(Atom::new(&name, args))
    }

    /// An atom or a builtin comparison.
    fn atom(&mut self) -> Result<Atom> {
        let lhs = match self.peek() {
            Tok::Ident(_) => {
                let a = self.relational_atom()?;
                if !matches!(self.peek(), Tok::Eq | Tok::Neq) {
                    return Ok(a);
                }
                if a.arity() > 0 {
                    return Err(self.unexpected("`,` or `.`"));
                }
                Term::Const(super::ast::Constant::new(&*a.predicate))
            }
            _ => self.term()?,
        };
        let op = match self.peek() {
            Tok::Eq => Builtin::Equals,
            Tok::Neq => Builtin::NotEquals,
            _ => return Err(self.unexpected("`=` or `\\=`")),
        };
        self.bump();
        let rhs = self.term()?;
        Ok(Atom::builtin(op, lhs, rhs))
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut alts = vec![self.conjunction()?];
        while self.eat(&Tok::Semi) {
            alts.push(self.conjunction()?);
        }
        Ok(if alts.len() == 1 {
            alts.pop().unwrap()
        } else {
            Formula::Or(alts)
        })
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut items = Vec::new();
        loop {
            match self.item()? {
                Formula::And(xs) => items.extend(xs),
                x => items.push(x),
            }
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Formula::And(items)
        })
    }

    fn item(&mut self) -> Result<Formula> {
        if self.eat(&Tok::Not) {
            if *self.peek() == Tok::LParen {
                return Err(syntax(self.pos(), "negation applies to atoms only"));
            }
            return Ok(Formula::Lit(Literal::neg(self.atom()?)));
        }
        if self.eat(&Tok::LParen) {
            let inner = self.disjunction()?;
            self.expect(&Tok::RParen)?;
            return Ok(inner);
        }
        Ok(Formula::Lit(Literal::pos(self.atom()?)))
    }

    /// `indep(A, B, [Z1, ..., Zn])`, optionally followed by `.`.
    pub(crate) fn query(&mut self) -> Result<(Atom, Atom, Vec<Atom>)> {
        let pos = self.pos();
        if self.ident()? != "indep" {
            return Err(syntax(pos, "expected `indep(A, B, [Z...])`"));
        }
        self.expect(&Tok::LParen)?;
        let a = self.relational_atom()?;
        self.expect(&Tok::Comma)?;
        let b = self.relational_atom()?;
        self.expect(&Tok::Comma)?;
        self.expect(&Tok::LBracket)?;
        let mut zs = Vec::new();
        if !self.eat(&Tok::RBracket) {
            loop {
                zs.push(self.relational_atom()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(&Tok::RBracket)?;
        }
        self.expect(&Tok::RParen)?;
        self.eat(&Tok::Dot);
        if !self.at_end() {
            return Err(self.unexpected("end of query"));
        }
        Ok((a, b, zs))
    }
}
