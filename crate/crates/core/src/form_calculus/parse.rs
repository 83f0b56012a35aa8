use std::sync::Arc;

use super::expr::Expr;
use crate::cover_nerve::LogBranches;
use crate::error::{Error, Result};
use crate::exact_algebra::{parse_gaussian, parse_rational, Scalar};

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { pos, msg: msg.into() })
}

/// Split `name(arg, arg, ...)` at top-level commas.
fn call(src: &str, base: usize) -> Result<(&str, Vec<(usize, &str)>)> {
    let open = src.find('(').ok_or(Error::Parse { pos: base, msg: "expected '('".into() })?;
    if !src.ends_with(')') {
        return err(base + src.len(), "expected ')'");
    }
    let name = src[..open].trim();
    let body = &src[open + 1..src.len() - 1];
    let mut args = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (k, ch) in body.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                args.push((base + open + 1 + start, &body[start..k]));
                start = k + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return err(base + open + 1 + k, "unbalanced ')'");
        }
    }
    if depth != 0 {
        return err(base + src.len(), "unbalanced '('");
    }
    if !body.trim().is_empty() {
        args.push((base + open + 1 + start, &body[start..]));
    }
    Ok((name, args))
}

fn shift(e: Error, base: usize) -> Error {
    match e {
        Error::Parse { pos, msg } => Error::Parse { pos: pos + base, msg },
        other => other,
    }
}

fn parse_at(src: &str, base: usize, branches: &[Arc<LogBranches>]) -> Result<Expr> {
    let lead = src.len() - src.trim_start().len();
    let src = src.trim();
    let base = base + lead;
    let (name, args) = call(src, base)?;
    let one = |k: usize| -> Result<(usize, &str)> {
        if args.len() != k {
            return err(base, format!("{} takes {} argument(s)", name, k));
        }
        Ok(args[0])
    };
    let int_arg = |(p, s): (usize, &str)| -> Result<i64> {
        s.trim().parse().map_err(|_| Error::Parse { pos: p, msg: "expected an integer".into() })
    };
    Ok(match name {
        "const" => {
            if args.len() != 2 {
                return err(base, "const takes 2 arguments");
            }
            let c = parse_gaussian(args[0].1).map_err(|e| shift(e, args[0].0))?;
            Expr::Const(Scalar::new(c, int_arg(args[1])? as i32))
        }
        "var" => Expr::Var(one(1)?.1.trim().to_string()),
        "rat" => {
            let (p, s) = one(1)?;
            Expr::Rat(Arc::new(parse_rational(s).map_err(|e| shift(e, p))?))
        }
        "logabs" => {
            let (p, s) = one(1)?;
            Expr::LogAbs(Arc::new(parse_rational(s).map_err(|e| shift(e, p))?))
        }
        "log" => {
            if args.len() != 2 {
                return err(base, "log takes 2 arguments");
            }
            let f = parse_rational(args[0].1).map_err(|e| shift(e, args[0].0))?;
            let k = int_arg(args[1])? as usize;
            let b = branches
                .iter()
                .find(|b| b.function() == &f)
                .ok_or(Error::Parse { pos: args[0].0, msg: format!("no branches registered for {}", f) })?;
            if k >= b.cover().n() {
                return err(args[1].0, "sector index out of range");
            }
            Expr::Log(b.clone(), k)
        }
        "int" => {
            let (p, s) = one(1)?;
            Expr::Int(Box::new(parse_at(s, p, branches)?))
        }
        "conj" => {
            let (p, s) = one(1)?;
            Expr::Conj(Box::new(parse_at(s, p, branches)?))
        }
        "pow" => {
            if args.len() != 2 {
                return err(base, "pow takes 2 arguments");
            }
            let e = parse_at(args[0].1, args[0].0, branches)?;
            Expr::Pow(Box::new(e), int_arg(args[1])? as i32)
        }
        "sum" | "prod" => {
            let v = args.iter().map(|(p, s)| parse_at(s, *p, branches)).collect::<Result<Vec<_>>>()?;
            if name == "sum" {
                Expr::Sum(v)
            } else {
                Expr::Prod(v)
            }
        }
        other => return err(base, format!("unknown node '{}'", other)),
    })
}

/// Parse the canonical text of an expression; log nodes resolve against `branches`.
pub fn parse_expr(src: &str, branches: &[Arc<LogBranches>]) -> Result<Expr> {
    parse_at(src, 0, branches)
}
