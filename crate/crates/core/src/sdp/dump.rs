//! Plain-text dump of a [`HermitianSdp`] for debugging and exchange.
//!
//! The format is line oriented and whitespace separated:
//!
//! ```text
//! chanent-sdp 1
//! sense minimize|maximize
//! constant <c0>
//! blocks <count>
//! block <name> <dim>            (one line per block)
//! objective <block> <nnz>       (one section per block)
//! <row> <col> <re> <im>         (nnz lines, both triangles)
//! constraints <count>
//! constraint <rhs> <terms>
//! term <block> <nnz>
//! <row> <col> <re> <im>
//! ```
//!
//! Floats use Rust's shortest round-trip representation, so a dump parses
//! back to an identical problem. Whitespace in block names becomes `_`.

use std::fmt::Write;

use super::{HermitianSdp, Sense, SparseHermitian};
use crate::error::{Error, Result};
use crate::linalg::c;

pub fn dump(p: &HermitianSdp) -> String {
    let mut s = String::new();
    let sense = match p.sense {
        Sense::Minimize => "minimize",
        Sense::Maximize => "maximize",
    };
    let _ = writeln!(s, "chanent-sdp 1\nsense {sense}\nconstant {:?}\nblocks {}", p.constant, p.blocks.len());
    for b in &p.blocks {
        let name: String = b.name.chars().map(|ch| if ch.is_whitespace() { '_' } else { ch }).collect();
        let _ = writeln!(s, "block {} {}", if name.is_empty() { "_".into() } else { name }, b.dim);
    }
    let write_mat = |s: &mut String, m: &SparseHermitian| {
        for &(i, j, v) in m.entries() {
            let _ = writeln!(s, "{i} {j} {:?} {:?}", v.re, v.im);
        }
    };
    for (k, m) in p.objective.iter().enumerate() {
        let _ = writeln!(s, "objective {k} {}", m.nnz());
        write_mat(&mut s, m);
    }
    let _ = writeln!(s, "constraints {}", p.constraints.len());
    for con in &p.constraints {
        let _ = writeln!(s, "constraint {:?} {}", con.rhs, con.terms.len());
        for (b, m) in &con.terms {
            let _ = writeln!(s, "term {b} {}", m.nnz());
            write_mat(&mut s, m);
        }
    }
    s
}

struct Lines<'a> {
    it: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next(&mut self, keyword: &str, fields: usize) -> Result<Vec<&'a str>> {
        loop {
            let (no, line) = self.it.next().ok_or_else(|| Error::Parse(format!("unexpected end, expected '{keyword}'")))?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.is_empty() {
                continue;
            }
            let ok = if keyword.is_empty() { toks.len() == fields } else { toks[0] == keyword && toks.len() == fields + 1 };
            if !ok {
                return Err(Error::Parse(format!("line {}: expected '{keyword}' with {fields} fields", no + 1)));
            }
            return Ok(if keyword.is_empty() { toks } else { toks[1..].to_vec() });
        }
    }
}

fn num<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse(format!("bad number '{s}'")))
}

fn read_mat(lines: &mut Lines, dim: usize, nnz: usize) -> Result<SparseHermitian> {
    let mut e = Vec::with_capacity(nnz);
    for _ in 0..nnz {
        let t = lines.next("", 4)?;
        e.push((num(t[0])?, num(t[1])?, c(num(t[2])?, num(t[3])?)));
    }
    Ok(SparseHermitian::from_triplets(dim, e))
}

pub fn parse_dump(text: &str) -> Result<HermitianSdp> {
    let mut lines = Lines { it: text.lines().enumerate() };
    let head = lines.next("chanent-sdp", 1)?;
    if head[0] != "1" {
        return Err(Error::Parse(format!("unsupported dump version {}", head[0])));
    }
    let sense = match lines.next("sense", 1)?[0] {
        "minimize" => Sense::Minimize,
        "maximize" => Sense::Maximize,
        other => return Err(Error::Parse(format!("unknown sense '{other}'"))),
    };
    let mut p = HermitianSdp::new(sense);
    p.constant = num(lines.next("constant", 1)?[0])?;
    let nb: usize = num(lines.next("blocks", 1)?[0])?;
    for _ in 0..nb {
        let t = lines.next("block", 2)?;
        p.add_block(t[0], num(t[1])?);
    }
    for k in 0..nb {
        let t = lines.next("objective", 2)?;
        if num::<usize>(t[0])? != k {
            return Err(Error::Parse("objective sections out of order".into()));
        }
        p.objective[k] = read_mat(&mut lines, p.blocks[k].dim, num(t[1])?)?;
    }
    let m: usize = num(lines.next("constraints", 1)?[0])?;
    for _ in 0..m {
        let t = lines.next("constraint", 2)?;
        let rhs = num(t[0])?;
        let nt: usize = num(t[1])?;
        let mut terms = Vec::with_capacity(nt);
        for _ in 0..nt {
            let t = lines.next("term", 2)?;
            let b: usize = num(t[0])?;
            let dim = p.blocks.get(b).ok_or_else(|| Error::Parse(format!("term refers to missing block {b}")))?.dim;
            terms.push((b, read_mat(&mut lines, dim, num(t[1])?)?));
        }
        p.add_constraint(terms, rhs);
    }
    p.validate()?;
    Ok(p)
}
