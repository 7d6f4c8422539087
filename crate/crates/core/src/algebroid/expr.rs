//! Analytic field expressions.
//!
//! Expressions are parsed with `meval` and evaluated against a small,
//! thread-safe context: named coordinates, the constants `pi` and `e`, and
//! the functions `sin cos tan asin acos atan sinh cosh tanh exp ln log sqrt
//! abs` plus `atan2(y, x)` and `pow(x, y)`.

use std::fmt;
use std::sync::Arc;

use meval::{ContextProvider, FuncEvalError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("cannot parse `{source_text}`: {message}")]
    Parse { source_text: String, message: String },
    #[error("`{source_text}` does not evaluate with variables {variables:?}: {message}")]
    Unbound { source_text: String, variables: Vec<String>, message: String },
}

/// An expression as written in an input file: a formula or a number.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExprSource {
    Number(f64),
    Text(String),
}

impl ExprSource {
    pub fn text(&self) -> String {
        match self {
            ExprSource::Number(v) => format!("{v}"),
            ExprSource::Text(s) => s.clone(),
        }
    }
}

impl From<&str> for ExprSource {
    fn from(s: &str) -> Self {
        ExprSource::Text(s.to_string())
    }
}

impl From<f64> for ExprSource {
    fn from(v: f64) -> Self {
        ExprSource::Number(v)
    }
}

type ScalarFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A real function of a point, shareable across threads.
#[derive(Clone)]
pub struct Field(Arc<ScalarFn>);

impl Field {
    pub fn new(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Field(Arc::new(f))
    }

    pub fn constant(c: f64) -> Self {
        Field::new(move |_| c)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.0)(x)
    }

    /// Parses `source` as a function of the named coordinates.
    pub fn parse(source: &ExprSource, variables: &[String]) -> Result<Self, ExprError> {
        let text = source.text();
        let expr: meval::Expr = text
            .parse()
            .map_err(|e: meval::Error| ExprError::Parse { source_text: text.clone(), message: e.to_string() })?;
        let names: Arc<[String]> = variables.into();
        let zeros = vec![0.0; names.len()];
        expr.eval_with_context(Coordinates { names: &names, values: &zeros }).map_err(|e| ExprError::Unbound {
            source_text: text.clone(),
            variables: variables.to_vec(),
            message: e.to_string(),
        })?;
        Ok(Field::new(move |x| {
            expr.eval_with_context(Coordinates { names: &names, values: x }).unwrap_or(f64::NAN)
        }))
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Field(..)")
    }
}

/// `x1, …, xn`, plus `x, y, z` when `n ≤ 3`.
pub fn coordinate_names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

struct Coordinates<'a> {
    names: &'a [String],
    values: &'a [f64],
}

impl ContextProvider for Coordinates<'_> {
    fn get_var(&self, name: &str) -> Option<f64> {
        if let Some(i) = self.names.iter().position(|n| n == name) {
            return self.values.get(i).copied();
        }
        if self.names.len() <= 3 && self.names.first().is_some_and(|n| n.starts_with('x')) {
            if let Some(i) = ["x", "y", "z"].iter().position(|&n| n == name) {
                return self.values.get(i).copied();
            }
        }
        match name {
            "pi" => Some(std::f64::consts::PI),
            "e" => Some(std::f64::consts::E),
            _ => None,
        }
    }

    fn eval_func(&self, name: &str, args: &[f64]) -> Result<f64, FuncEvalError> {
        let one = |f: fn(f64) -> f64| match args {
            [a] => Ok(f(*a)),
            _ => Err(FuncEvalError::NumberArgs(1)),
        };
        let two = |f: fn(f64, f64) -> f64| match args {
            [a, b] => Ok(f(*a, *b)),
            _ => Err(FuncEvalError::NumberArgs(2)),
        };
        match name {
            "sin" => one(f64::sin),
            "cos" => one(f64::cos),
            "tan" => one(f64::tan),
            "asin" => one(f64::asin),
            "acos" => one(f64::acos),
            "atan" => one(f64::atan),
            "sinh" => one(f64::sinh),
            "cosh" => one(f64::cosh),
            "tanh" => one(f64::tanh),
            "exp" => one(f64::exp),
            "ln" | "log" => one(f64::ln),
            "sqrt" => one(f64::sqrt),
            "abs" => one(f64::abs),
            "atan2" => two(f64::atan2),
            "pow" => two(f64::powf),
            _ => Err(FuncEvalError::UnknownFunction),
        }
    }
}
