use std::collections::BTreeMap;

use super::{
    Component, Expr, LocalConstraint, ModelError, PartialConfiguration, PrioritySet, System,
    Transition,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Sym(char),
    Assign,
    Arrow,
    Eof,
}

/// Tokenizer shared by the model and DFA formats. `#` and `//` start
/// line comments.
pub(crate) struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

fn ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '.' || c == '\'' || c == '♯'
}

impl Lexer {
    pub(crate) fn new(text: &str) -> Result<Lexer, ModelError> {
        let mut toks = Vec::new();
        let mut chars = text.chars().peekable();
        let (mut line, mut col) = (1usize, 1usize);
        while let Some(&c) = chars.peek() {
            let (l0, c0) = (line, col);
            let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
                let c = chars.next().unwrap();
                if c == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                c
            };
            if c.is_whitespace() {
                bump(&mut chars);
            } else if c == '#' {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    bump(&mut chars);
                }
            } else if c == '/' {
                bump(&mut chars);
                if chars.peek() != Some(&'/') {
                    return Err(syntax(l0, c0, "unexpected `/`"));
                }
                while chars.peek().is_some_and(|&c| c != '\n') {
                    bump(&mut chars);
                }
            } else if ident_char(c) {
                let mut s = String::new();
                while chars.peek().is_some_and(|&c| ident_char(c)) {
                    s.push(bump(&mut chars));
                }
                toks.push((Tok::Ident(s), l0, c0));
            } else if c == ':' {
                bump(&mut chars);
                if chars.peek() != Some(&'=') {
                    return Err(syntax(l0, c0, "expected `:=`"));
                }
                bump(&mut chars);
                toks.push((Tok::Assign, l0, c0));
            } else if c == '-' {
                bump(&mut chars);
                if chars.peek() == Some(&'>') {
                    bump(&mut chars);
                    toks.push((Tok::Arrow, l0, c0));
                } else {
                    toks.push((Tok::Sym('-'), l0, c0));
                }
            } else if "{};@=<()!&|,".contains(c) {
                bump(&mut chars);
                toks.push((Tok::Sym(c), l0, c0));
            } else {
                return Err(syntax(l0, c0, &format!("unexpected character `{c}`")));
            }
        }
        toks.push((Tok::Eof, line, col));
        Ok(Lexer { toks, pos: 0 })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    pub(crate) fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    pub(crate) fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> ModelError {
        let (_, line, column) = self.toks[self.pos];
        ModelError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    pub(crate) fn expect_sym(&mut self, c: char) -> Result<(), ModelError> {
        if self.peek() == &Tok::Sym(c) {
            self.next();
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`, found {}", describe(self.peek()))))
        }
    }

    pub(crate) fn eat_sym(&mut self, c: char) -> bool {
        if self.peek() == &Tok::Sym(c) {
            self.next();
            true
        } else {
            false
        }
    }

    pub(crate) fn ident(&mut self) -> Result<String, ModelError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            t => Err(self.error(format!("expected identifier, found {}", describe(&t)))),
        }
    }

    pub(crate) fn keyword(&mut self, kw: &str) -> Result<(), ModelError> {
        if self.at_keyword(kw) {
            self.next();
            Ok(())
        } else {
            Err(self.error(format!("expected `{kw}`, found {}", describe(self.peek()))))
        }
    }

    pub(crate) fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    /// Identifiers up to (and consuming) the next `;`.
    pub(crate) fn ident_list(&mut self) -> Result<Vec<String>, ModelError> {
        let mut out = Vec::new();
        while !self.eat_sym(';') {
            out.push(self.ident()?);
        }
        Ok(out)
    }

    pub(crate) fn expect_eof(&self) -> Result<(), ModelError> {
        if self.peek() == &Tok::Eof {
            Ok(())
        } else {
            Err(self.error(format!("trailing input: {}", describe(self.peek()))))
        }
    }
}

fn syntax(line: usize, column: usize, message: &str) -> ModelError {
    ModelError::Syntax {
        line,
        column,
        message: message.to_string(),
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::Assign => "`:=`".into(),
        Tok::Arrow => "`->`".into(),
        Tok::Eof => "end of input".into(),
    }
}

const RESERVED: [&str; 5] = ["and", "or", "not", "true", "false"];

struct RawTransition {
    label: String,
    from: String,
    to: String,
    guard: RawExpr,
    sets: Vec<(String, RawExpr)>,
}

#[derive(Clone)]
enum RawExpr {
    Const(bool),
    Var(String),
    Not(Box<RawExpr>),
    And(Box<RawExpr>, Box<RawExpr>),
    Or(Box<RawExpr>, Box<RawExpr>),
}

struct RawComponent {
    name: String,
    locations: Vec<String>,
    vars: Vec<String>,
    init: Option<(String, Vec<(String, bool)>)>,
    transitions: Vec<RawTransition>,
}

type RawRisk = Vec<(String, String, Vec<(String, bool)>)>;

/// Parses a model document into a validated [`System`].
pub fn parse_system(text: &str) -> Result<System, ModelError> {
    let mut lx = Lexer::new(text)?;
    lx.keyword("system")?;
    lx.expect_sym('{')?;
    let mut declared: Option<Vec<String>> = None;
    let mut comps = Vec::new();
    let mut prios = Vec::new();
    let mut risks: Vec<RawRisk> = Vec::new();
    while !lx.eat_sym('}') {
        let kw = lx.ident()?;
        match kw.as_str() {
            "interactions" => {
                if declared.is_some() {
                    return Err(lx.error("duplicate `interactions` declaration"));
                }
                declared = Some(lx.ident_list()?);
            }
            "component" => comps.push(parse_component(&mut lx)?),
            "priority" => {
                let lo = lx.ident()?;
                lx.expect_sym('<')?;
                let hi = lx.ident()?;
                lx.expect_sym(';')?;
                prios.push((lo, hi));
            }
            "risk" => {
                risks.push(parse_risk(&mut lx)?);
                lx.eat_sym(';');
            }
            other => return Err(lx.error(format!("unexpected `{other}`"))),
        }
    }
    lx.expect_eof()?;
    build(declared, comps, prios, risks)
}

fn parse_component(lx: &mut Lexer) -> Result<RawComponent, ModelError> {
    let name = lx.ident()?;
    lx.expect_sym('{')?;
    let mut c = RawComponent {
        name,
        locations: Vec::new(),
        vars: Vec::new(),
        init: None,
        transitions: Vec::new(),
    };
    while !lx.eat_sym('}') {
        let kw = lx.ident()?;
        match kw.as_str() {
            "locations" => c.locations.extend(lx.ident_list()?),
            "vars" => {
                for v in lx.ident_list()? {
                    if RESERVED.contains(&v.as_str()) || v == "0" || v == "1" {
                        return Err(lx.error(format!("reserved variable name `{v}`")));
                    }
                    c.vars.push(v);
                }
            }
            "init" => {
                let loc = lx.ident()?;
                let vals = parse_valuation(lx)?;
                lx.expect_sym(';')?;
                c.init = Some((loc, vals));
            }
            "on" => {
                let label = lx.ident()?;
                if lx.peek() == &Tok::Sym('(') {
                    return Err(ModelError::DataTransfer(label));
                }
                lx.keyword("from")?;
                let from = lx.ident()?;
                lx.keyword("to")?;
                let to = lx.ident()?;
                let guard = if lx.at_keyword("when") {
                    lx.next();
                    parse_or(lx)?
                } else {
                    RawExpr::Const(true)
                };
                let mut sets = Vec::new();
                if lx.at_keyword("set") {
                    lx.next();
                    while !lx.eat_sym(';') {
                        let v = lx.ident()?;
                        if lx.next() != Tok::Assign {
                            return Err(lx.error("expected `:=`"));
                        }
                        sets.push((v, parse_or(lx)?));
                    }
                } else {
                    lx.expect_sym(';')?;
                }
                c.transitions.push(RawTransition {
                    label,
                    from,
                    to,
                    guard,
                    sets,
                });
            }
            other => return Err(lx.error(format!("unexpected `{other}` in component"))),
        }
    }
    Ok(c)
}

fn parse_bit(lx: &mut Lexer) -> Result<bool, ModelError> {
    match lx.ident()?.as_str() {
        "0" | "false" => Ok(false),
        "1" | "true" => Ok(true),
        other => Err(lx.error(format!("expected 0 or 1, found `{other}`"))),
    }
}

/// Zero or more `v=0|1` items.
fn parse_valuation(lx: &mut Lexer) -> Result<Vec<(String, bool)>, ModelError> {
    let mut out = Vec::new();
    while matches!(lx.peek(), Tok::Ident(_)) && lx.peek_at(1) == &Tok::Sym('=') {
        let v = lx.ident()?;
        lx.expect_sym('=')?;
        out.push((v, parse_bit(lx)?));
    }
    Ok(out)
}

fn parse_risk(lx: &mut Lexer) -> Result<RawRisk, ModelError> {
    lx.expect_sym('{')?;
    let mut out = Vec::new();
    loop {
        let comp = lx.ident()?;
        lx.expect_sym('@')?;
        let loc = lx.ident()?;
        out.push((comp, loc, parse_valuation(lx)?));
        if lx.eat_sym('}') {
            return Ok(out);
        }
        lx.expect_sym('&')?;
    }
}

fn parse_or(lx: &mut Lexer) -> Result<RawExpr, ModelError> {
    let mut e = parse_and(lx)?;
    while lx.eat_sym('|') || eat_kw(lx, "or") {
        e = RawExpr::Or(Box::new(e), Box::new(parse_and(lx)?));
    }
    Ok(e)
}

fn parse_and(lx: &mut Lexer) -> Result<RawExpr, ModelError> {
    let mut e = parse_unary(lx)?;
    while lx.eat_sym('&') || eat_kw(lx, "and") {
        e = RawExpr::And(Box::new(e), Box::new(parse_unary(lx)?));
    }
    Ok(e)
}

fn parse_unary(lx: &mut Lexer) -> Result<RawExpr, ModelError> {
    if lx.eat_sym('!') || eat_kw(lx, "not") {
        return Ok(RawExpr::Not(Box::new(parse_unary(lx)?)));
    }
    if lx.eat_sym('(') {
        let e = parse_or(lx)?;
        lx.expect_sym(')')?;
        return Ok(e);
    }
    let s = lx.ident()?;
    Ok(match s.as_str() {
        "0" | "false" => RawExpr::Const(false),
        "1" | "true" => RawExpr::Const(true),
        _ => RawExpr::Var(s),
    })
}

fn eat_kw(lx: &mut Lexer, kw: &str) -> bool {
    if lx.at_keyword(kw) {
        lx.next();
        true
    } else {
        false
    }
}

fn resolve_expr(e: &RawExpr, c: &RawComponent) -> Result<Expr, ModelError> {
    Ok(match e {
        RawExpr::Const(b) => Expr::Const(*b),
        RawExpr::Var(v) => Expr::Var(var_index(c, v)?),
        RawExpr::Not(a) => Expr::not(resolve_expr(a, c)?),
        RawExpr::And(a, b) => Expr::and(resolve_expr(a, c)?, resolve_expr(b, c)?),
        RawExpr::Or(a, b) => Expr::or(resolve_expr(a, c)?, resolve_expr(b, c)?),
    })
}

fn var_index(c: &RawComponent, v: &str) -> Result<usize, ModelError> {
    c.vars
        .iter()
        .position(|x| x == v)
        .ok_or_else(|| ModelError::UnknownVariable {
            component: c.name.clone(),
            variable: v.to_string(),
        })
}

fn loc_index(c: &RawComponent, l: &str) -> Result<usize, ModelError> {
    c.locations
        .iter()
        .position(|x| x == l)
        .ok_or_else(|| ModelError::UnknownLocation {
            component: c.name.clone(),
            location: l.to_string(),
        })
}

fn pack(c: &RawComponent, vals: &[(String, bool)]) -> Result<Vec<(usize, bool)>, ModelError> {
    vals.iter()
        .map(|(v, b)| Ok((var_index(c, v)?, *b)))
        .collect()
}

fn build(
    declared: Option<Vec<String>>,
    comps: Vec<RawComponent>,
    prios: Vec<(String, String)>,
    risks: Vec<RawRisk>,
) -> Result<System, ModelError> {
    let strict = declared.is_some();
    let mut interactions = declared.unwrap_or_default();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    for (i, s) in interactions.iter().enumerate() {
        if index.insert(s.clone(), i).is_some() {
            return Err(ModelError::Duplicate {
                kind: "interaction",
                name: s.clone(),
            });
        }
    }
    let mut components = Vec::with_capacity(comps.len());
    for rc in &comps {
        let mut comp = Component::new(rc.name.clone(), rc.locations.clone(), rc.vars.clone());
        let (init_loc, init_vals) = rc.init.clone().unwrap_or_else(|| {
            (
                rc.locations.first().cloned().unwrap_or_default(),
                Vec::new(),
            )
        });
        if rc.locations.is_empty() {
            return Err(ModelError::NoLocations {
                component: rc.name.clone(),
            });
        }
        comp.initial_location = loc_index(rc, &init_loc)?;
        comp.initial_valuation = pack(rc, &init_vals)?
            .into_iter()
            .fold(0, |acc, (v, b)| acc | (b as u64) << v);
        for t in &rc.transitions {
            let label = match index.get(&t.label) {
                Some(&i) => i,
                None if strict => return Err(ModelError::UnknownInteraction(t.label.clone())),
                None => {
                    interactions.push(t.label.clone());
                    index.insert(t.label.clone(), interactions.len() - 1);
                    interactions.len() - 1
                }
            };
            let mut update: Vec<Expr> = (0..rc.vars.len()).map(Expr::Var).collect();
            for (v, e) in &t.sets {
                update[var_index(rc, v)?] = resolve_expr(e, rc)?;
            }
            comp.transitions.push(Transition {
                source: loc_index(rc, &t.from)?,
                guard: resolve_expr(&t.guard, rc)?,
                label,
                update,
                destination: loc_index(rc, &t.to)?,
            });
        }
        components.push(comp);
    }
    let lookup = |s: &str| {
        index
            .get(s)
            .copied()
            .ok_or_else(|| ModelError::UnknownInteraction(s.to_string()))
    };
    let mut priorities = PrioritySet::new();
    for (lo, hi) in &prios {
        priorities.insert(lookup(lo)?, lookup(hi)?);
    }
    let mut risk_states = Vec::new();
    for r in risks {
        let mut constraints = vec![None; comps.len()];
        for (cname, loc, vals) in r {
            let ci = comps
                .iter()
                .position(|c| c.name == cname)
                .ok_or_else(|| ModelError::UnknownComponent(cname.clone()))?;
            let rc = &comps[ci];
            if constraints[ci].is_some() {
                return Err(ModelError::Duplicate {
                    kind: "risk constraint on component",
                    name: cname,
                });
            }
            constraints[ci] = Some(LocalConstraint {
                location: loc_index(rc, &loc)?,
                valuation: pack(rc, &vals)?,
            });
        }
        risk_states.push(PartialConfiguration { constraints });
    }
    System::new(components, interactions, priorities, risk_states)
}
