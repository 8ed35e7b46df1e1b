use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// An MLLu formula. Children of both connectives are kept in port order;
/// duality reverses them.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Formula {
    Var(u32),
    DualVar(u32),
    Tensor(Vec<Formula>),
    Par(Vec<Formula>),
}

pub fn dual(f: &Formula) -> Formula {
    match f {
        Formula::Var(x) => Formula::DualVar(*x),
        Formula::DualVar(x) => Formula::Var(*x),
        Formula::Tensor(cs) => Formula::Par(cs.iter().rev().map(dual).collect()),
        Formula::Par(cs) => Formula::Tensor(cs.iter().rev().map(dual).collect()),
    }
}

pub fn formula_depth(f: &Formula) -> usize {
    match f {
        Formula::Var(_) | Formula::DualVar(_) => 1,
        Formula::Tensor(cs) | Formula::Par(cs) => {
            1 + cs.iter().map(formula_depth).max().unwrap_or(0)
        }
    }
}

impl Formula {
    pub fn tensor(cs: impl Into<Vec<Formula>>) -> Self {
        Formula::Tensor(cs.into())
    }

    pub fn par(cs: impl Into<Vec<Formula>>) -> Self {
        Formula::Par(cs.into())
    }

    /// The Boolean type `P(~a, ~a, T(a, a))` over `a`.
    pub fn boolean(a: &Formula) -> Self {
        let na = dual(a);
        Formula::Par(vec![
            na.clone(),
            na,
            Formula::Tensor(vec![a.clone(), a.clone()]),
        ])
    }

    pub fn depth(&self) -> usize {
        formula_depth(self)
    }

    pub fn dual(&self) -> Self {
        dual(self)
    }

    /// Number of nodes of the formula tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::DualVar(_) => 1,
            Formula::Tensor(cs) | Formula::Par(cs) => {
                1 + cs.iter().map(Formula::size).sum::<usize>()
            }
        }
    }

    pub fn vars(&self, out: &mut Vec<u32>) {
        match self {
            Formula::Var(x) | Formula::DualVar(x) => {
                if !out.contains(x) {
                    out.push(*x)
                }
            }
            Formula::Tensor(cs) | Formula::Par(cs) => cs.iter().for_each(|c| c.vars(out)),
        }
    }

    /// Replaces the variable `x` by `a` (and `~x` by the dual of `a`).
    pub fn substitute(&self, x: u32, a: &Formula) -> Formula {
        match self {
            Formula::Var(y) if *y == x => a.clone(),
            Formula::DualVar(y) if *y == x => dual(a),
            Formula::Var(_) | Formula::DualVar(_) => self.clone(),
            Formula::Tensor(cs) => Formula::Tensor(cs.iter().map(|c| c.substitute(x, a)).collect()),
            Formula::Par(cs) => Formula::Par(cs.iter().map(|c| c.substitute(x, a)).collect()),
        }
    }

    pub fn rename(&self, map: &dyn Fn(u32) -> u32) -> Formula {
        match self {
            Formula::Var(x) => Formula::Var(map(*x)),
            Formula::DualVar(x) => Formula::DualVar(map(*x)),
            Formula::Tensor(cs) => Formula::Tensor(cs.iter().map(|c| c.rename(map)).collect()),
            Formula::Par(cs) => Formula::Par(cs.iter().map(|c| c.rename(map)).collect()),
        }
    }
}

/// `0 -> a`, `25 -> z`, `26 -> a1`, ...
pub fn var_name(x: u32) -> String {
    let letter = (b'a' + (x % 26) as u8) as char;
    match x / 26 {
        0 => letter.to_string(),
        k => format!("{letter}{k}"),
    }
}

pub fn parse_var_name(s: &str) -> Option<u32> {
    let mut chars = s.chars();
    let c = chars.next()?;
    if !c.is_ascii_lowercase() {
        return None;
    }
    let rest = chars.as_str();
    let k: u32 = if rest.is_empty() {
        0
    } else if rest.starts_with('0') {
        return None;
    } else {
        rest.parse().ok()?
    };
    k.checked_mul(26)?.checked_add(c as u32 - 'a' as u32)
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Var(x) => write!(f, "{}", var_name(*x)),
            Formula::DualVar(x) => write!(f, "~{}", var_name(*x)),
            Formula::Tensor(cs) | Formula::Par(cs) => {
                let head = if matches!(self, Formula::Tensor(_)) {
                    'T'
                } else {
                    'P'
                };
                write!(f, "{head}(")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("formula syntax error at offset {pos}: {msg}")]
pub struct FormulaParseError {
    pub pos: usize,
    pub msg: String,
}

impl FromStr for Formula {
    type Err = FormulaParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let f = parse_at(&bytes, &mut pos)?;
        if pos != bytes.len() {
            return Err(FormulaParseError {
                pos,
                msg: "trailing input".into(),
            });
        }
        Ok(f)
    }
}

fn parse_at(s: &[char], pos: &mut usize) -> Result<Formula, FormulaParseError> {
    let err = |pos: usize, msg: &str| FormulaParseError {
        pos,
        msg: msg.to_string(),
    };
    match s.get(*pos) {
        Some('~') => {
            *pos += 1;
            match parse_at(s, pos)? {
                Formula::Var(x) => Ok(Formula::DualVar(x)),
                _ => Err(err(*pos, "negation applies to variables only")),
            }
        }
        Some(&c @ ('T' | 'P')) => {
            *pos += 1;
            if s.get(*pos) != Some(&'(') {
                return Err(err(*pos, "expected '('"));
            }
            *pos += 1;
            let mut cs = vec![parse_at(s, pos)?];
            while s.get(*pos) == Some(&',') {
                *pos += 1;
                cs.push(parse_at(s, pos)?);
            }
            if s.get(*pos) != Some(&')') {
                return Err(err(*pos, "expected ')'"));
            }
            *pos += 1;
            if cs.len() < 2 {
                return Err(err(*pos, "connectives need at least two children"));
            }
            Ok(if c == 'T' {
                Formula::Tensor(cs)
            } else {
                Formula::Par(cs)
            })
        }
        Some(_) => {
            let start = *pos;
            while s.get(*pos).is_some_and(|c| c.is_ascii_alphanumeric()) {
                *pos += 1;
            }
            let name: String = s[start..*pos].iter().collect();
            parse_var_name(&name)
                .map(Formula::Var)
                .ok_or_else(|| err(start, "bad variable name"))
        }
        None => Err(err(*pos, "unexpected end of input")),
    }
}

/// Renames variables to 0, 1, ... in order of first occurrence, flipping
/// polarities so that every variable first occurs positively.
pub fn alpha_normalize(fs: &[Formula]) -> Vec<Formula> {
    fn visit(f: &Formula, seen: &mut Vec<(u32, bool)>) {
        match f {
            Formula::Var(x) | Formula::DualVar(x) => {
                if !seen.iter().any(|(y, _)| y == x) {
                    seen.push((*x, matches!(f, Formula::DualVar(_))));
                }
            }
            Formula::Tensor(cs) | Formula::Par(cs) => cs.iter().for_each(|c| visit(c, seen)),
        }
    }
    fn apply(f: &Formula, seen: &[(u32, bool)]) -> Formula {
        let lookup = |x: &u32| {
            let i = seen.iter().position(|(y, _)| y == x).unwrap();
            (i as u32, seen[i].1)
        };
        match f {
            Formula::Var(x) => match lookup(x) {
                (i, false) => Formula::Var(i),
                (i, true) => Formula::DualVar(i),
            },
            Formula::DualVar(x) => match lookup(x) {
                (i, false) => Formula::DualVar(i),
                (i, true) => Formula::Var(i),
            },
            Formula::Tensor(cs) => Formula::Tensor(cs.iter().map(|c| apply(c, seen)).collect()),
            Formula::Par(cs) => Formula::Par(cs.iter().map(|c| apply(c, seen)).collect()),
        }
    }
    let mut seen = Vec::new();
    for f in fs {
        visit(f, &mut seen);
    }
    fs.iter().map(|f| apply(f, &seen)).collect()
}

type Bindings = std::collections::HashMap<u32, Formula>;

fn resolve(f: &Formula, s: &Bindings) -> Formula {
    match f {
        Formula::Var(x) => s.get(x).map_or_else(|| f.clone(), |g| resolve(g, s)),
        Formula::DualVar(x) => s.get(x).map_or_else(|| f.clone(), |g| dual(&resolve(g, s))),
        Formula::Tensor(cs) => Formula::Tensor(cs.iter().map(|c| resolve(c, s)).collect()),
        Formula::Par(cs) => Formula::Par(cs.iter().map(|c| resolve(c, s)).collect()),
    }
}

fn unify(a: &Formula, b: &Formula, s: &mut Bindings) -> bool {
    let (a, b) = (resolve(a, s), resolve(b, s));
    match (&a, &b) {
        _ if a == b => true,
        (Formula::Var(x), Formula::Var(y)) => bind(*x.max(y), Formula::Var(*x.min(y)), s),
        (Formula::Var(x), t) | (t, Formula::Var(x)) => bind(*x, t.clone(), s),
        (Formula::DualVar(x), t) | (t, Formula::DualVar(x)) => bind(*x, dual(t), s),
        (Formula::Tensor(xs), Formula::Tensor(ys)) | (Formula::Par(xs), Formula::Par(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| unify(x, y, s))
        }
        _ => false,
    }
}

fn bind(x: u32, t: Formula, s: &mut Bindings) -> bool {
    let mut vs = Vec::new();
    t.vars(&mut vs);
    if vs.contains(&x) {
        return false;
    }
    s.insert(x, t);
    true
}

/// The most general `A` such that an instance of `f` is the Boolean type
/// over `A`, if there is one.
pub fn boolean_instance(f: &Formula) -> Option<Formula> {
    let Formula::Par(cs) = f else { return None };
    let [x, y, Formula::Tensor(ts)] = cs.as_slice() else {
        return None;
    };
    let [u, v] = ts.as_slice() else { return None };
    let mut s = Bindings::new();
    let ok = unify(u, v, &mut s) && unify(x, &dual(u), &mut s) && unify(y, &dual(u), &mut s);
    ok.then(|| resolve(u, &s))
}
