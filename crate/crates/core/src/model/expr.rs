use std::fmt;

/// Boolean formula over the variables of a single component.
///
/// Variables are referenced by their index in the component's declaration
/// list, so an `Expr` is only meaningful together with its component.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(bool),
    Var(usize),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(index: usize) -> Expr {
        Expr::Var(index)
    }

    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn and(a: Expr, b: Expr) -> Expr {
        Expr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Expr, b: Expr) -> Expr {
        Expr::Or(Box::new(a), Box::new(b))
    }

    /// Evaluates under a valuation packed as a bit mask (bit `i` = variable `i`).
    pub fn eval(&self, valuation: u64) -> bool {
        match self {
            Expr::Const(b) => *b,
            Expr::Var(i) => valuation >> i & 1 == 1,
            Expr::Not(e) => !e.eval(valuation),
            Expr::And(a, b) => a.eval(valuation) && b.eval(valuation),
            Expr::Or(a, b) => a.eval(valuation) || b.eval(valuation),
        }
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Expr::Const(true))
    }

    /// Largest variable index mentioned, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Not(e) => e.max_var(),
            Expr::And(a, b) | Expr::Or(a, b) => a.max_var().max(b.max_var()),
        }
    }

    /// Renders the formula with the given variable names. Parentheses are
    /// emitted only where needed to reproduce the same tree when re-parsed.
    pub fn display<'a>(&'a self, names: &'a [String]) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, names }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Or(..) => 1,
            Expr::And(..) => 2,
            _ => 3,
        }
    }
}

pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    names: &'a [String],
}

impl ExprDisplay<'_> {
    fn write(&self, e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match e {
            Expr::Const(true) => write!(f, "1"),
            Expr::Const(false) => write!(f, "0"),
            Expr::Var(i) => match self.names.get(*i) {
                Some(n) => write!(f, "{n}"),
                None => write!(f, "v{i}"),
            },
            Expr::Not(inner) => {
                write!(f, "!")?;
                self.child(inner, 3, f)
            }
            Expr::And(a, b) => {
                self.child(a, 2, f)?;
                write!(f, " & ")?;
                self.child(b, 3, f)
            }
            Expr::Or(a, b) => {
                self.child(a, 1, f)?;
                write!(f, " | ")?;
                self.child(b, 2, f)
            }
        }
    }

    fn child(&self, e: &Expr, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if e.precedence() < min {
            write!(f, "(")?;
            self.write(e, f)?;
            write!(f, ")")
        } else {
            self.write(e, f)
        }
    }
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.expr, f)
    }
}
