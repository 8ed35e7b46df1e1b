//! The term syntax of descriptions:
//!
//! ```text
//! ax_p
//! tensor_w^{i1,...,ik}(t1,...,tk)
//! par_w^{i1,...,ik}(t)
//! cut(t1,t2)            cut^{i,j}(t1,t2)
//! ```
//!
//! Every subterm denotes a sequent: an ordered list of indexed formula
//! occurrences, each sitting on a principal port. An axiom contributes two
//! occurrences sharing its index; a tensor consumes the k-th listed index
//! from its k-th premise; a par consumes all listed indices from its single
//! premise. A plain `cut` joins the last occurrence of each side.

use std::collections::HashSet;

use super::net::{LinkSort, NetBuilder, Port, ProofNet};
use super::NetError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Ax(String),
    Tensor {
        index: String,
        premises: Vec<String>,
        subterms: Vec<Term>,
    },
    Par {
        index: String,
        premises: Vec<String>,
        subterm: Box<Term>,
    },
    Cut {
        indices: Option<(String, String)>,
        left: Box<Term>,
        right: Box<Term>,
    },
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, NetError> {
        Err(NetError::Description {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), NetError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn ident(&mut self) -> Result<String, NetError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'\'')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an identifier");
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    /// `_p` or `_{p}`
    fn subscript(&mut self) -> Result<String, NetError> {
        self.expect(b'_')?;
        if self.eat(b'{') {
            let id = self.ident()?;
            self.expect(b'}')?;
            Ok(id)
        } else {
            self.ident()
        }
    }

    fn index_list(&mut self) -> Result<Vec<String>, NetError> {
        self.expect(b'^')?;
        self.expect(b'{')?;
        let mut out = vec![self.ident()?];
        while self.eat(b',') {
            out.push(self.ident()?);
        }
        self.expect(b'}')?;
        Ok(out)
    }

    fn args(&mut self) -> Result<Vec<Term>, NetError> {
        self.expect(b'(')?;
        let mut out = vec![self.term()?];
        while self.eat(b',') {
            out.push(self.term()?);
        }
        self.expect(b')')?;
        Ok(out)
    }

    fn term(&mut self) -> Result<Term, NetError> {
        let head = self.ident()?;
        match head.as_str() {
            "ax" => Ok(Term::Ax(self.subscript()?)),
            "tensor" | "par" => {
                let index = self.subscript()?;
                let premises = self.index_list()?;
                let at = self.pos;
                let mut subterms = self.args()?;
                if premises.len() < 2 {
                    return Err(NetError::Description {
                        pos: at,
                        msg: format!("{head} needs at least 2 premises"),
                    });
                }
                if head == "tensor" {
                    Ok(Term::Tensor {
                        index,
                        premises,
                        subterms,
                    })
                } else {
                    if subterms.len() != 1 {
                        return Err(NetError::Description {
                            pos: at,
                            msg: "par takes exactly one subterm".into(),
                        });
                    }
                    Ok(Term::Par {
                        index,
                        premises,
                        subterm: Box::new(subterms.pop().unwrap()),
                    })
                }
            }
            "cut" => {
                let indices = if self.peek() == Some(b'^') {
                    let list = self.index_list()?;
                    if list.len() != 2 {
                        return self.err("cut names exactly two indices");
                    }
                    Some((list[0].clone(), list[1].clone()))
                } else {
                    None
                };
                let at = self.pos;
                let mut args = self.args()?;
                if args.len() != 2 {
                    return Err(NetError::Description {
                        pos: at,
                        msg: "cut takes exactly two subterms".into(),
                    });
                }
                let right = args.pop().unwrap();
                let left = args.pop().unwrap();
                Ok(Term::Cut {
                    indices,
                    left: Box::new(left),
                    right: Box::new(right),
                })
            }
            other => self.err(format!("unknown rule '{other}'")),
        }
    }
}

pub fn parse_term(text: &str) -> Result<Term, NetError> {
    let mut lx = Lexer {
        src: text.as_bytes(),
        pos: 0,
    };
    let t = lx.term()?;
    lx.skip_ws();
    if lx.pos != lx.src.len() {
        return lx.err("trailing input");
    }
    Ok(t)
}

struct Occ {
    name: String,
    port: Port,
}

struct Build {
    b: NetBuilder,
    introduced: HashSet<String>,
}

impl Build {
    fn fresh(&mut self, name: &str) -> Result<(), NetError> {
        if !self.introduced.insert(name.to_string()) {
            return Err(NetError::Index(format!("index '{name}' introduced twice")));
        }
        Ok(())
    }

    fn take(&self, seq: &mut Vec<Occ>, name: &str) -> Result<Port, NetError> {
        match seq.iter().position(|o| o.name == name) {
            Some(i) => Ok(seq.remove(i).port),
            None if self.introduced.contains(name) => Err(NetError::Index(format!(
                "index '{name}' is not available here (used too often or out of scope)"
            ))),
            None => Err(NetError::Index(format!(
                "index '{name}' is never introduced"
            ))),
        }
    }

    fn take_last(&self, seq: &mut Vec<Occ>) -> Result<Port, NetError> {
        seq.pop()
            .map(|o| o.port)
            .ok_or_else(|| NetError::Index("cut on an empty sequent".into()))
    }

    fn term(&mut self, t: &Term) -> Result<Vec<Occ>, NetError> {
        match t {
            Term::Ax(p) => {
                self.fresh(p)?;
                let l = self.b.ax();
                Ok(vec![
                    Occ {
                        name: p.clone(),
                        port: Port::new(l, 0),
                    },
                    Occ {
                        name: p.clone(),
                        port: Port::new(l, 1),
                    },
                ])
            }
            Term::Tensor {
                index,
                premises,
                subterms,
            } => {
                if premises.len() != subterms.len() {
                    return Err(NetError::Index(format!(
                        "tensor_{index} lists {} indices for {} subterms",
                        premises.len(),
                        subterms.len()
                    )));
                }
                let mut seqs = Vec::new();
                for s in subterms {
                    seqs.push(self.term(s)?);
                }
                self.fresh(index)?;
                let l = self.b.add_link(LinkSort::Tensor(premises.len() as u32));
                let mut rest = Vec::new();
                for (k, (name, mut seq)) in premises.iter().zip(seqs).enumerate() {
                    let p = self.take(&mut seq, name)?;
                    self.b.connect(Port::new(l, k as u32 + 1), p);
                    rest.extend(seq);
                }
                rest.push(Occ {
                    name: index.clone(),
                    port: Port::principal(l),
                });
                Ok(rest)
            }
            Term::Par {
                index,
                premises,
                subterm,
            } => {
                let mut seq = self.term(subterm)?;
                self.fresh(index)?;
                let l = self.b.add_link(LinkSort::Par(premises.len() as u32));
                for (k, name) in premises.iter().enumerate() {
                    let p = self.take(&mut seq, name)?;
                    self.b.connect(Port::new(l, k as u32 + 1), p);
                }
                seq.push(Occ {
                    name: index.clone(),
                    port: Port::principal(l),
                });
                Ok(seq)
            }
            Term::Cut {
                indices,
                left,
                right,
            } => {
                let mut ls = self.term(left)?;
                let mut rs = self.term(right)?;
                let (a, b) = match indices {
                    Some((i, j)) => (self.take(&mut ls, i)?, self.take(&mut rs, j)?),
                    None => (self.take_last(&mut ls)?, self.take_last(&mut rs)?),
                };
                self.b.connect(a, b);
                ls.extend(rs);
                Ok(ls)
            }
        }
    }
}

pub fn term_to_net(t: &Term) -> Result<ProofNet, NetError> {
    let mut st = Build {
        b: NetBuilder::new(),
        introduced: HashSet::new(),
    };
    let seq = st.term(t)?;
    let mut b = st.b;
    for o in seq {
        b.conclude(o.port);
    }
    b.finish()
}

/// Builds the proof net induced by a description; conclusions follow the
/// order of the outermost sequent.
pub fn parse_description(text: &str) -> Result<ProofNet, NetError> {
    term_to_net(&parse_term(text)?)
}
