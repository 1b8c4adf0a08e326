use crate::error::{Diagnostic, ErrorCode};
use crate::parser::ast::{Arg, DeclKeyword, Group, LamBinder, SDecl, SKind, STerm};
use crate::parser::lexer::{tokenize, Tok, Token};
use crate::parser::Span;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    eof: Span,
}

type PResult<T> = Result<T, Diagnostic>;

fn starts_atom(t: &Tok) -> bool {
    matches!(
        t,
        Tok::Ident(_)
            | Tok::Underscore
            | Tok::LParen
            | Tok::SetOmega
            | Tok::Level
            | Tok::LZero
            | Tok::Refl
            | Tok::TT
            | Tok::Unit
            | Tok::Empty
            | Tok::Bool
            | Tok::True
            | Tok::False
    )
}

impl Parser {
    fn new(file: &str, src: &str) -> PResult<Parser> {
        let toks = tokenize(file, src)?;
        let eof = toks
            .last()
            .map(|t| t.span.clone())
            .unwrap_or_else(|| Span::new(file, 1, 1));
        Ok(Parser { toks, pos: 0, eof })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    fn span(&self) -> Span {
        self.toks
            .get(self.pos)
            .map(|t| t.span.clone())
            .unwrap_or_else(|| self.eof.clone())
    }

    fn at(&self, t: &Tok) -> bool {
        self.peek() == Some(t)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.at(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        let found = match self.peek() {
            Some(t) => t.to_string(),
            None => "end of input".to_string(),
        };
        Err(Diagnostic::new(
            ErrorCode::Syntax,
            self.span(),
            format!("expected {expected}, found {found}"),
        ))
    }

    fn expect(&mut self, t: &Tok) -> PResult<()> {
        if self.eat(t) {
            Ok(())
        } else {
            self.error(&t.to_string())
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.error("an identifier"),
        }
    }

    fn binder_name(&mut self) -> PResult<String> {
        if self.eat(&Tok::Underscore) {
            Ok("_".to_string())
        } else {
            self.ident()
        }
    }

    /// At `(` or `{`: does a binder group `(@flat? x y : A)` start here?
    fn group_ahead(&self) -> bool {
        if !matches!(self.peek(), Some(Tok::LParen | Tok::LBrace)) {
            return false;
        }
        let mut k = 1;
        if self.peek_at(k) == Some(&Tok::AtFlat) {
            return true;
        }
        let mut names = 0;
        while matches!(self.peek_at(k), Some(Tok::Ident(_) | Tok::Underscore)) {
            k += 1;
            names += 1;
        }
        names > 0 && self.peek_at(k) == Some(&Tok::Colon)
    }

    fn group(&mut self) -> PResult<Group> {
        let implicit = self.at(&Tok::LBrace);
        self.pos += 1;
        let crisp = self.eat(&Tok::AtFlat);
        let mut names = vec![self.binder_name()?];
        while matches!(self.peek(), Some(Tok::Ident(_) | Tok::Underscore)) {
            names.push(self.binder_name()?);
        }
        self.expect(&Tok::Colon)?;
        let ty = self.term()?;
        self.expect(if implicit { &Tok::RBrace } else { &Tok::RParen })?;
        Ok(Group {
            names,
            ty,
            implicit,
            crisp,
        })
    }

    fn term(&mut self) -> PResult<STerm> {
        let sp = self.span();
        match self.peek() {
            Some(Tok::Backslash) => {
                self.pos += 1;
                let mut bs = Vec::new();
                loop {
                    match self.peek() {
                        Some(Tok::Ident(_) | Tok::Underscore) => bs.push(LamBinder {
                            name: self.binder_name()?,
                            implicit: false,
                            crisp: false,
                        }),
                        Some(Tok::LBrace | Tok::LParen) => {
                            let implicit = self.at(&Tok::LBrace);
                            self.pos += 1;
                            let crisp = self.eat(&Tok::AtFlat);
                            if !implicit && !crisp {
                                return self.error("`@flat`");
                            }
                            let name = self.binder_name()?;
                            self.expect(if implicit { &Tok::RBrace } else { &Tok::RParen })?;
                            bs.push(LamBinder {
                                name,
                                implicit,
                                crisp,
                            });
                        }
                        _ => break,
                    }
                }
                if bs.is_empty() {
                    return self.error("a binder");
                }
                self.expect(&Tok::Dot)?;
                let body = self.term()?;
                Ok(STerm::new(sp, SKind::Lam(bs, body)))
            }
            Some(Tok::Let) => {
                self.pos += 1;
                self.expect(&Tok::Con)?;
                let name = self.binder_name()?;
                self.expect(&Tok::Equals)?;
                let scrutinee = self.term()?;
                let motive = if self.eat(&Tok::Return) {
                    Some(self.term()?)
                } else {
                    None
                };
                self.expect(&Tok::In)?;
                let body = self.term()?;
                Ok(STerm::new(
                    sp,
                    SKind::LetCon {
                        name,
                        scrutinee,
                        motive,
                        body,
                    },
                ))
            }
            _ if self.group_ahead() => {
                let mut groups = Vec::new();
                while self.group_ahead() {
                    groups.push(self.group()?);
                }
                if self.eat(&Tok::Arrow) {
                    let cod = self.term()?;
                    return Ok(STerm::new(sp, SKind::Pi(groups, cod)));
                }
                if self.at(&Tok::Star) {
                    let single = groups.len() == 1
                        && groups[0].names.len() == 1
                        && !groups[0].implicit
                        && !groups[0].crisp;
                    if single {
                        self.pos += 1;
                        let g = groups.pop().unwrap();
                        let cod = self.prod()?;
                        return Ok(STerm::new(
                            sp,
                            SKind::Sigma(g.names.into_iter().next().unwrap(), g.ty, cod),
                        ));
                    }
                }
                self.error("`->`")
            }
            _ => {
                let lhs = self.prod()?;
                if self.eat(&Tok::Arrow) {
                    let rhs = self.term()?;
                    Ok(STerm::new(sp, SKind::Arrow(lhs, rhs)))
                } else {
                    Ok(lhs)
                }
            }
        }
    }

    fn prod(&mut self) -> PResult<STerm> {
        let sp = self.span();
        if self.group_ahead() {
            // `(x : A) * B` nested to the right of `*`
            let g = self.group()?;
            if g.names.len() != 1 || g.implicit || g.crisp {
                return self.error("a single explicit binder before `*`");
            }
            self.expect(&Tok::Star)?;
            let cod = self.prod()?;
            return Ok(STerm::new(
                sp,
                SKind::Sigma(g.names.into_iter().next().unwrap(), g.ty, cod),
            ));
        }
        let lhs = self.eq()?;
        if self.eat(&Tok::Star) {
            let rhs = self.prod()?;
            Ok(STerm::new(sp, SKind::Prod(lhs, rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn eq(&mut self) -> PResult<STerm> {
        let sp = self.span();
        let lhs = self.lub()?;
        if self.eat(&Tok::Equals) {
            let rhs = self.lub()?;
            let ty = if self.eat(&Tok::Colon) {
                Some(self.lub()?)
            } else {
                None
            };
            Ok(STerm::new(sp, SKind::Eq(lhs, rhs, ty)))
        } else {
            Ok(lhs)
        }
    }

    fn lub(&mut self) -> PResult<STerm> {
        let sp = self.span();
        let mut lhs = self.app()?;
        while self.eat(&Tok::Lub) {
            let rhs = self.app()?;
            lhs = STerm::new(sp.clone(), SKind::Lub(lhs, rhs));
        }
        Ok(lhs)
    }

    fn app(&mut self) -> PResult<STerm> {
        let sp = self.span();
        let mut head = match self.peek() {
            Some(Tok::Set) => {
                self.pos += 1;
                SKind::Set(self.atom()?)
            }
            Some(Tok::LSuc) => {
                self.pos += 1;
                SKind::LSuc(self.atom()?)
            }
            Some(Tok::Flat) => {
                self.pos += 1;
                SKind::Flat(self.atom()?)
            }
            Some(Tok::Con) => {
                self.pos += 1;
                SKind::Con(self.atom()?)
            }
            Some(Tok::Fst) => {
                self.pos += 1;
                SKind::Fst(self.atom()?)
            }
            Some(Tok::Snd) => {
                self.pos += 1;
                SKind::Snd(self.atom()?)
            }
            Some(Tok::Absurd) => {
                self.pos += 1;
                SKind::Absurd(self.atom()?, self.atom()?)
            }
            Some(Tok::Id) => {
                self.pos += 1;
                SKind::Id(self.atom()?, self.atom()?, self.atom()?)
            }
            Some(Tok::IdElim) => {
                self.pos += 1;
                SKind::IdElim(self.atom()?, self.atom()?, self.atom()?)
            }
            Some(Tok::BoolElim) => {
                self.pos += 1;
                SKind::BoolElim(self.atom()?, self.atom()?, self.atom()?, self.atom()?)
            }
            _ => *self.atom()?.kind,
        };
        loop {
            let arg = match self.peek() {
                Some(Tok::LBrace) => {
                    self.pos += 1;
                    let arg = if matches!(self.peek(), Some(Tok::Ident(_)))
                        && self.peek_at(1) == Some(&Tok::Assign)
                    {
                        let x = self.ident()?;
                        self.pos += 1;
                        Arg::Named(x, self.term()?)
                    } else {
                        Arg::Implicit(self.term()?)
                    };
                    self.expect(&Tok::RBrace)?;
                    arg
                }
                Some(t) if starts_atom(t) => Arg::Explicit(self.atom()?),
                _ => break,
            };
            head = SKind::App(STerm::new(sp.clone(), head), arg);
        }
        Ok(STerm::new(sp, head))
    }

    fn atom(&mut self) -> PResult<STerm> {
        let sp = self.span();
        let kind = match self.peek() {
            Some(Tok::Ident(x)) => {
                let x = x.clone();
                self.pos += 1;
                SKind::Var(x)
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.term()?;
                if self.eat(&Tok::Comma) {
                    let u = self.term()?;
                    self.expect(&Tok::RParen)?;
                    SKind::Pair(t, u)
                } else {
                    self.expect(&Tok::RParen)?;
                    return Ok(t);
                }
            }
            Some(t) => {
                let k = match t {
                    Tok::Underscore => SKind::Hole,
                    Tok::SetOmega => SKind::SetOmega,
                    Tok::Level => SKind::Level,
                    Tok::LZero => SKind::LZero,
                    Tok::Refl => SKind::Refl,
                    Tok::TT => SKind::TT,
                    Tok::Unit => SKind::Unit,
                    Tok::Empty => SKind::Empty,
                    Tok::Bool => SKind::Bool,
                    Tok::True => SKind::True,
                    Tok::False => SKind::False,
                    _ => return self.error("a term"),
                };
                self.pos += 1;
                k
            }
            None => return self.error("a term"),
        };
        Ok(STerm::new(sp, kind))
    }

    fn decl(&mut self) -> PResult<SDecl> {
        let span = self.span();
        let keyword = match self.peek() {
            Some(Tok::Def) => DeclKeyword::Def,
            Some(Tok::Postulate) => DeclKeyword::Postulate,
            Some(Tok::Rewrite) => DeclKeyword::Rewrite,
            _ => return self.error("`def`, `postulate` or `rewrite`"),
        };
        self.pos += 1;
        let name_span = self.span();
        let name = self.ident()?;
        let mut d = SDecl {
            keyword,
            span,
            name,
            name_span,
            binders: Vec::new(),
            ty: None,
            body: None,
        };
        if keyword == DeclKeyword::Rewrite {
            return Ok(d);
        }
        while matches!(self.peek(), Some(Tok::LParen | Tok::LBrace)) {
            if !self.group_ahead() {
                return self.error("a binder `(x : A)`");
            }
            d.binders.push(self.group()?);
        }
        self.expect(&Tok::Colon)?;
        d.ty = Some(self.term()?);
        if keyword == DeclKeyword::Def {
            self.expect(&Tok::Assign)?;
            d.body = Some(self.term()?);
        }
        Ok(d)
    }
}

/// Parse a whole `.cohtt` file.
pub fn parse_module(file: &str, src: &str) -> Result<Vec<SDecl>, Diagnostic> {
    let mut p = Parser::new(file, src)?;
    let mut out = Vec::new();
    while p.peek().is_some() {
        out.push(p.decl()?);
    }
    Ok(out)
}

/// Parse a single term, rejecting empty input and trailing tokens.
pub fn parse_term(file: &str, src: &str) -> Result<STerm, Diagnostic> {
    let mut p = Parser::new(file, src)?;
    if p.peek().is_none() {
        return Err(Diagnostic::new(ErrorCode::Syntax, p.span(), "empty input"));
    }
    let t = p.term()?;
    if p.peek().is_some() {
        return p.error("end of input");
    }
    Ok(t)
}
