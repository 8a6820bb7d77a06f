// SPDX-License-Identifier: Apache-2.0
//! ISCAS bench reader and writer.
//!
//! The grammar is whitespace-insensitive, so statements may share a line:
//!
//! ```text
//! INPUT(a) INPUT(b) OUTPUT(c)
//! c = AND(a, b)   # comment
//! ```

use std::collections::HashMap;
use std::fmt::Write;

use super::{GateId, GateKind, Netlist};
use crate::error::NetlistError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Eq,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = match line.find('#') {
            Some(p) => &line[..p],
            None => line,
        };
        let mut chars = line.char_indices().peekable();
        while let Some((col, c)) = chars.next() {
            let simple = match c {
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                ',' => Some(Tok::Comma),
                '=' => Some(Tok::Eq),
                _ => None,
            };
            if let Some(tok) = simple {
                out.push(Token {
                    tok,
                    line: lineno + 1,
                    column: col + 1,
                });
                continue;
            }
            if c.is_whitespace() {
                continue;
            }
            let mut ident = String::from(c);
            while let Some(&(_, d)) = chars.peek() {
                if d.is_whitespace() || "(),=".contains(d) {
                    break;
                }
                ident.push(d);
                chars.next();
            }
            out.push(Token {
                tok: Tok::Ident(ident),
                line: lineno + 1,
                column: col + 1,
            });
        }
    }
    out
}

struct Name {
    text: String,
    line: usize,
    column: usize,
}

enum Stmt {
    Input(Name),
    Output(Name),
    Gate(Name, GateKind, Vec<Name>),
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn error(&self, message: impl Into<String>) -> NetlistError {
        let (line, column) = self
            .toks
            .get(self.pos)
            .map(|t| (t.line, t.column))
            .unwrap_or(self.end);
        NetlistError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), NetlistError> {
        match self.toks.get(self.pos) {
            Some(t) if t.tok == tok => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    fn ident(&mut self) -> Result<Name, NetlistError> {
        match self.toks.get(self.pos) {
            Some(Token {
                tok: Tok::Ident(s),
                line,
                column,
            }) => {
                let name = Name {
                    text: s.clone(),
                    line: *line,
                    column: *column,
                };
                self.pos += 1;
                Ok(name)
            }
            _ => Err(self.error("expected signal name")),
        }
    }

    fn statement(&mut self) -> Result<Stmt, NetlistError> {
        let head = self.ident()?;
        let upper = head.text.to_ascii_uppercase();
        if (upper == "INPUT" || upper == "OUTPUT")
            && matches!(self.toks.get(self.pos).map(|t| &t.tok), Some(Tok::LParen))
        {
            self.expect(Tok::LParen, "'('")?;
            let name = self.ident()?;
            self.expect(Tok::RParen, "')'")?;
            return Ok(if upper == "INPUT" {
                Stmt::Input(name)
            } else {
                Stmt::Output(name)
            });
        }
        self.expect(Tok::Eq, "'='")?;
        let kw_pos = self.pos;
        let kw = self.ident()?;
        let kind = GateKind::from_keyword(&kw.text).ok_or_else(|| {
            self.pos = kw_pos;
            self.error(format!("unknown gate type '{}'", kw.text))
        })?;
        self.expect(Tok::LParen, "'('")?;
        let mut args = vec![self.ident()?];
        loop {
            match self.toks.get(self.pos).map(|t| &t.tok) {
                Some(Tok::Comma) => {
                    self.pos += 1;
                    args.push(self.ident()?);
                }
                Some(Tok::RParen) => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.error("expected ',' or ')'")),
            }
        }
        Ok(Stmt::Gate(head, kind, args))
    }
}

/// Parses bench text into a validated, levelized, scan-transformed netlist.
pub fn parse_bench(text: &str) -> Result<Netlist, NetlistError> {
    parse_bench_named(text, "")
}

/// Same as [`parse_bench`], naming the resulting netlist.
pub fn parse_bench_named(text: &str, name: &str) -> Result<Netlist, NetlistError> {
    let toks = tokenize(text);
    let last_line = text.lines().count().max(1);
    let mut parser = Parser {
        toks,
        pos: 0,
        end: (last_line, text.lines().last().map_or(1, |l| l.len() + 1)),
    };
    let mut stmts = Vec::new();
    while parser.pos < parser.toks.len() {
        stmts.push(parser.statement()?);
    }

    let mut ids: HashMap<String, GateId> = HashMap::new();
    let mut names = Vec::new();
    let mut define = |n: &Name, names: &mut Vec<String>| -> Result<GateId, NetlistError> {
        if ids.contains_key(&n.text) {
            return Err(NetlistError::DuplicateDefinition {
                name: n.text.clone(),
                line: n.line,
                column: n.column,
            });
        }
        let id = names.len();
        ids.insert(n.text.clone(), id);
        names.push(n.text.clone());
        Ok(id)
    };
    let mut inputs = Vec::new();
    for s in &stmts {
        if let Stmt::Input(n) = s {
            inputs.push(define(n, &mut names)?);
        }
    }
    for s in &stmts {
        if let Stmt::Gate(n, _, _) = s {
            define(n, &mut names)?;
        }
    }

    let lookup = |n: &Name| -> Result<GateId, NetlistError> {
        ids.get(&n.text)
            .copied()
            .ok_or_else(|| NetlistError::UndefinedSignal {
                name: n.text.clone(),
                line: n.line,
                column: n.column,
            })
    };
    let mut kinds_fanins = vec![(GateKind::Input, Vec::new()); names.len()];
    let mut outputs = Vec::new();
    for s in &stmts {
        match s {
            Stmt::Input(_) => {}
            Stmt::Output(n) => outputs.push(lookup(n)?),
            Stmt::Gate(n, kind, args) => {
                let fanins = args.iter().map(lookup).collect::<Result<Vec<_>, _>>()?;
                kinds_fanins[ids[&n.text]] = (*kind, fanins);
            }
        }
    }
    Netlist::from_parts(name, kinds_fanins, names, inputs, outputs)
}

/// Writes a netlist as bench text. Scan cells are written back as flip-flops,
/// so the output reparses to the same netlist with the same ids.
pub fn emit_bench(netlist: &Netlist) -> String {
    let mut out = String::new();
    if !netlist.name.is_empty() {
        let _ = writeln!(out, "# {}", netlist.name);
    }
    let _ = writeln!(
        out,
        "# {} inputs, {} outputs, {} flip-flops, {} gates\n",
        netlist.declared_inputs().len(),
        netlist.declared_outputs().len(),
        netlist.scan_cells().len(),
        netlist.len()
    );
    for &i in netlist.declared_inputs() {
        let _ = writeln!(out, "INPUT({})", netlist.gate_name(i));
    }
    out.push('\n');
    for &o in netlist.declared_outputs() {
        let _ = writeln!(out, "OUTPUT({})", netlist.gate_name(o));
    }
    out.push('\n');
    let mut scan_driver = vec![None; netlist.len()];
    for c in netlist.scan_cells() {
        scan_driver[c.pseudo_input] = Some(c.pseudo_output);
    }
    for g in netlist.gates() {
        if let Some(d) = scan_driver[g.id] {
            let _ = writeln!(
                out,
                "{} = DFF({})",
                netlist.gate_name(g.id),
                netlist.gate_name(d)
            );
        } else if !g.is_input() {
            let args: Vec<&str> = g.fanins.iter().map(|&f| netlist.gate_name(f)).collect();
            let _ = writeln!(
                out,
                "{} = {}({})",
                netlist.gate_name(g.id),
                g.kind.keyword(),
                args.join(", ")
            );
        }
    }
    out
}
