//! A small arithmetic expression tree for branch weights and maps given in
//! configuration files. Variables are the physical coordinates `z_0..z_{d-1}`.

use std::ops;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expr {
    Var(usize),
    Real(f64),
    Complex([f64; 2]),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Powi(Box<Expr>, i32),
    /// Principal branch of `base^exponent`.
    Powf(Box<Expr>, f64),
    Exp(Box<Expr>),
    /// Substitutes `inner[i]` for `z_i` in `outer`.
    Compose { outer: Box<Expr>, inner: Vec<Expr> },
}

impl Expr {
    pub fn var(i: usize) -> Self {
        Expr::Var(i)
    }

    pub fn real(x: f64) -> Self {
        Expr::Real(x)
    }

    pub fn complex(c: Complex64) -> Self {
        Expr::Complex([c.re, c.im])
    }

    pub fn powi(self, n: i32) -> Self {
        Expr::Powi(Box::new(self), n)
    }

    pub fn powf(self, s: f64) -> Self {
        Expr::Powf(Box::new(self), s)
    }

    pub fn exp(self) -> Self {
        Expr::Exp(Box::new(self))
    }

    pub fn compose(self, inner: Vec<Expr>) -> Self {
        Expr::Compose {
            outer: Box::new(self),
            inner,
        }
    }

    /// Largest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Var(i) => Some(*i),
            Expr::Real(_) | Expr::Complex(_) => None,
            Expr::Add(xs) | Expr::Mul(xs) => xs.iter().filter_map(Expr::max_var).max(),
            Expr::Sub(a, b) | Expr::Div(a, b) => a.max_var().max(b.max_var()),
            Expr::Neg(a) | Expr::Powi(a, _) | Expr::Powf(a, _) | Expr::Exp(a) => a.max_var(),
            Expr::Compose { inner, .. } => inner.iter().filter_map(Expr::max_var).max(),
        }
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        match self {
            Expr::Var(i) => z.get(*i).copied().unwrap_or(Complex64::new(f64::NAN, f64::NAN)),
            Expr::Real(x) => Complex64::new(*x, 0.0),
            Expr::Complex([re, im]) => Complex64::new(*re, *im),
            Expr::Add(xs) => xs.iter().map(|x| x.eval(z)).sum(),
            Expr::Mul(xs) => xs.iter().map(|x| x.eval(z)).product(),
            Expr::Sub(a, b) => a.eval(z) - b.eval(z),
            Expr::Div(a, b) => a.eval(z) / b.eval(z),
            Expr::Neg(a) => -a.eval(z),
            Expr::Powi(a, n) => a.eval(z).powi(*n),
            Expr::Powf(a, s) => a.eval(z).powf(*s),
            Expr::Exp(a) => a.eval(z).exp(),
            Expr::Compose { outer, inner } => {
                let args: Vec<Complex64> = inner.iter().map(|e| e.eval(z)).collect();
                outer.eval(&args)
            }
        }
    }
}

impl From<f64> for Expr {
    fn from(x: f64) -> Self {
        Expr::Real(x)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $build:expr) => {
        impl ops::$trait for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $build(self, rhs)
            }
        }
        impl ops::$trait<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                $build(self, Expr::Real(rhs))
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::Add(vec![a, b]));
binop!(Mul, mul, |a, b| Expr::Mul(vec![a, b]));
binop!(Sub, sub, |a, b| Expr::Sub(Box::new(a), Box::new(b)));
binop!(Div, div, |a, b| Expr::Div(Box::new(a), Box::new(b)));

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}
