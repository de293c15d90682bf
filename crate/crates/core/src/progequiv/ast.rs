//! Conditions and expressions of the program language.

use crate::mpoly::MPoly;

/// Propositional formula over atoms `Q = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cond {
    Atom(MPoly),
    Not(Box<Cond>),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Poly(MPoly),
    Fail,
    If(Cond, Box<Expr>, Box<Expr>),
}

impl Cond {
    pub fn not(c: Cond) -> Cond {
        Cond::Not(Box::new(c))
    }

    pub fn and(a: Cond, b: Cond) -> Cond {
        Cond::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Cond, b: Cond) -> Cond {
        Cond::Or(Box::new(a), Box::new(b))
    }

    /// The formula `0 = 0`.
    pub fn truth(template: &MPoly) -> Cond {
        Cond::Atom(MPoly::zero(template.ctx(), template.nvars()))
    }

    pub fn is_literal(&self) -> bool {
        match self {
            Cond::Atom(_) => true,
            Cond::Not(c) => matches!(**c, Cond::Atom(_)),
            _ => false,
        }
    }

    /// Value at a point given as element codes.
    pub fn eval(&self, point: &[u32]) -> bool {
        match self {
            Cond::Atom(q) => q.eval_codes(point) == 0,
            Cond::Not(c) => !c.eval(point),
            Cond::And(a, b) => a.eval(point) && b.eval(point),
            Cond::Or(a, b) => a.eval(point) || b.eval(point),
        }
    }

    /// Negation normal form: negations only directly above atoms.
    pub fn nnf(&self) -> Cond {
        self.nnf_signed(true)
    }

    fn nnf_signed(&self, positive: bool) -> Cond {
        match (self, positive) {
            (Cond::Atom(_), true) => self.clone(),
            (Cond::Atom(_), false) => Cond::not(self.clone()),
            (Cond::Not(c), _) => c.nnf_signed(!positive),
            (Cond::And(a, b), true) => Cond::and(a.nnf_signed(true), b.nnf_signed(true)),
            (Cond::And(a, b), false) => Cond::or(a.nnf_signed(false), b.nnf_signed(false)),
            (Cond::Or(a, b), true) => Cond::or(a.nnf_signed(true), b.nnf_signed(true)),
            (Cond::Or(a, b), false) => Cond::and(a.nnf_signed(false), b.nnf_signed(false)),
        }
    }

    pub fn atoms<'a>(&'a self, out: &mut Vec<&'a MPoly>) {
        match self {
            Cond::Atom(q) => out.push(q),
            Cond::Not(c) => c.atoms(out),
            Cond::And(a, b) | Cond::Or(a, b) => {
                a.atoms(out);
                b.atoms(out);
            }
        }
    }

    pub fn map_polys(&self, f: &mut impl FnMut(&MPoly) -> MPoly) -> Cond {
        match self {
            Cond::Atom(q) => Cond::Atom(f(q)),
            Cond::Not(c) => Cond::not(c.map_polys(f)),
            Cond::And(a, b) => Cond::and(a.map_polys(f), b.map_polys(f)),
            Cond::Or(a, b) => Cond::or(a.map_polys(f), b.map_polys(f)),
        }
    }

    pub fn display_with(&self, names: &[String]) -> String {
        match self {
            Cond::Atom(q) => format!("{} = 0", q.display_with(names)),
            Cond::Not(c) => format!("!({})", c.display_with(names)),
            Cond::And(a, b) => format!("({} & {})", a.display_with(names), b.display_with(names)),
            Cond::Or(a, b) => format!("({} | {})", a.display_with(names), b.display_with(names)),
        }
    }
}

impl Expr {
    pub fn if_(c: Cond, t: Expr, e: Expr) -> Expr {
        Expr::If(c, Box::new(t), Box::new(e))
    }

    /// Value at a point, `None` when evaluation reaches `fail`.
    pub fn eval(&self, point: &[u32]) -> Option<u32> {
        match self {
            Expr::Poly(p) => Some(p.eval_codes(point)),
            Expr::Fail => None,
            Expr::If(c, t, e) => {
                if c.eval(point) {
                    t.eval(point)
                } else {
                    e.eval(point)
                }
            }
        }
    }

    pub fn fails_at(&self, point: &[u32]) -> bool {
        match self {
            Expr::Poly(_) => false,
            Expr::Fail => true,
            Expr::If(c, t, e) => {
                if c.eval(point) {
                    t.fails_at(point)
                } else {
                    e.fails_at(point)
                }
            }
        }
    }

    pub fn fail_count(&self) -> usize {
        match self {
            Expr::Poly(_) => 0,
            Expr::Fail => 1,
            Expr::If(_, t, e) => t.fail_count() + e.fail_count(),
        }
    }

    pub fn conditional_count(&self) -> usize {
        match self {
            Expr::If(_, t, e) => 1 + t.conditional_count() + e.conditional_count(),
            _ => 0,
        }
    }

    /// Number of nodes, the size measure behind the length caps.
    pub fn size(&self) -> usize {
        match self {
            Expr::If(_, t, e) => 1 + t.size() + e.size(),
            _ => 1,
        }
    }

    pub fn conditions<'a>(&'a self, out: &mut Vec<&'a Cond>) {
        if let Expr::If(c, t, e) = self {
            out.push(c);
            t.conditions(out);
            e.conditions(out);
        }
    }

    pub fn polys<'a>(&'a self, out: &mut Vec<&'a MPoly>) {
        match self {
            Expr::Poly(p) => out.push(p),
            Expr::Fail => {}
            Expr::If(c, t, e) => {
                c.atoms(out);
                t.polys(out);
                e.polys(out);
            }
        }
    }

    pub fn map_polys(&self, f: &mut impl FnMut(&MPoly) -> MPoly) -> Expr {
        match self {
            Expr::Poly(p) => Expr::Poly(f(p)),
            Expr::Fail => Expr::Fail,
            Expr::If(c, t, e) => Expr::if_(c.map_polys(f), t.map_polys(f), e.map_polys(f)),
        }
    }

    pub fn display_with(&self, names: &[String]) -> String {
        let sub = |e: &Expr| match e {
            Expr::If(..) => format!("({})", e.display_with(names)),
            _ => e.display_with(names),
        };
        match self {
            Expr::Poly(p) => p.display_with(names),
            Expr::Fail => "fail".to_string(),
            Expr::If(c, t, e) => format!("if {} then {} else {}", c.display_with(names), sub(t), sub(e)),
        }
    }
}
