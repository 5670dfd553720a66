//! Line-oriented program format.
//!
//! ```text
//! registers 8
//! R1 = add(x0, LR[2:4]{0.5,1.0,-2.0,0.25})
//! R0 = SinRF{0.1,1.0,2.0,-0.5}(R1, R1)
//! MVLR[4]{0.0,1.0,0.0,0.0,0.0}
//! ```
//!
//! The last line is `MVLR[r]{...}` or `MVLR none`. Blank lines and lines
//! starting with `#` are ignored. Coefficients are written in shortest
//! round-trip form so `parse(print(p)) == p`.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::primitives::{BasicFn, FunctionKind, FunctionSite, TerminalKind, TerminalSite};

use super::{Function, Instruction, MvlrHead, Operand, Program};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn write_coeffs(out: &mut String, coeffs: &[f64]) {
    out.push('{');
    for (i, c) in coeffs.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{c:?}");
    }
    out.push('}');
}

fn write_operand(out: &mut String, op: &Operand) {
    match op {
        Operand::Register(r) => {
            let _ = write!(out, "R{r}");
        }
        Operand::Input(i) => {
            let _ = write!(out, "x{i}");
        }
        Operand::Terminal(t) => {
            let _ = write!(out, "{}[{}:{}]", t.kind.name(), t.alpha, t.beta);
            write_coeffs(out, &t.coeffs);
        }
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = format!("R{} = ", self.dest);
        match &self.func {
            Function::Basic(b) => s.push_str(b.name()),
            Function::Tunable(site) => {
                s.push_str(site.kind.name());
                write_coeffs(&mut s, &site.omega);
            }
        }
        s.push('(');
        write_operand(&mut s, &self.op1);
        s.push_str(", ");
        write_operand(&mut s, &self.op2);
        s.push(')');
        f.write_str(&s)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "registers {}", self.register_count)?;
        for ins in &self.instructions {
            writeln!(f, "{ins}")?;
        }
        match &self.head {
            Some(h) => {
                let mut s = format!("MVLR[{}]", h.inputs);
                write_coeffs(&mut s, &h.coeffs);
                writeln!(f, "{s}")
            }
            None => writeln!(f, "MVLR none"),
        }
    }
}

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

type Res<T> = Result<T, String>;

impl<'a> Cursor<'a> {
    fn new(s: &'a str) -> Self {
        Self { s, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.s[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.s.len() - trimmed.len();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Res<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(format!("expected `{token}` at `{}`", self.rest()))
        }
    }

    fn ident(&mut self) -> Res<&'a str> {
        self.skip_ws();
        let len = self
            .rest()
            .find(|c: char| !c.is_ascii_alphanumeric() && c != '_')
            .unwrap_or(self.rest().len());
        if len == 0 {
            return Err(format!("expected a name at `{}`", self.rest()));
        }
        let id = &self.rest()[..len];
        self.pos += len;
        Ok(id)
    }

    fn number<T: FromStr>(&mut self) -> Res<T> {
        self.skip_ws();
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '.' || c == '-' || c == '+'))
            .unwrap_or(self.rest().len());
        let tok = &self.rest()[..len];
        let v = tok
            .parse::<T>()
            .map_err(|_| format!("invalid number `{tok}`"))?;
        self.pos += len;
        Ok(v)
    }

    fn coeffs(&mut self) -> Res<Vec<f64>> {
        self.expect("{")?;
        let mut out = Vec::new();
        if self.eat("}") {
            return Ok(out);
        }
        loop {
            out.push(self.number::<f64>()?);
            if self.eat("}") {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }

    fn range(&mut self) -> Res<(usize, usize)> {
        self.expect("[")?;
        let a = self.number()?;
        self.expect(":")?;
        let b = self.number()?;
        self.expect("]")?;
        Ok((a, b))
    }

    fn done(&mut self) -> Res<()> {
        self.skip_ws();
        if self.rest().is_empty() {
            Ok(())
        } else {
            Err(format!("unexpected trailing `{}`", self.rest()))
        }
    }
}

fn index_after(id: &str, prefix: char) -> Option<usize> {
    let rest = id.strip_prefix(prefix)?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

fn parse_operand(c: &mut Cursor<'_>) -> Res<Operand> {
    let id = c.ident()?;
    if let Some(r) = index_after(id, 'R') {
        return Ok(Operand::Register(r));
    }
    if let Some(i) = index_after(id, 'x') {
        return Ok(Operand::Input(i));
    }
    let kind: TerminalKind = id.parse().map_err(|e| format!("{e}"))?;
    let (alpha, beta) = c.range()?;
    let coeffs = c.coeffs()?;
    Ok(Operand::Terminal(TerminalSite {
        kind,
        alpha,
        beta,
        coeffs,
    }))
}

fn parse_instruction(line: &str) -> Res<Instruction> {
    let mut c = Cursor::new(line);
    let dest_id = c.ident()?;
    let dest = index_after(dest_id, 'R').ok_or_else(|| format!("bad destination `{dest_id}`"))?;
    c.expect("=")?;
    let fname = c.ident()?;
    let func = if let Ok(b) = fname.parse::<BasicFn>() {
        Function::Basic(b)
    } else {
        let kind: FunctionKind = fname
            .parse()
            .map_err(|_| format!("unknown function `{fname}`"))?;
        Function::Tunable(FunctionSite {
            kind,
            omega: c.coeffs()?,
        })
    };
    c.expect("(")?;
    let op1 = parse_operand(&mut c)?;
    c.expect(",")?;
    let op2 = parse_operand(&mut c)?;
    c.expect(")")?;
    c.done()?;
    Ok(Instruction {
        dest,
        func,
        op1,
        op2,
    })
}

fn parse_head(line: &str) -> Res<Option<MvlrHead>> {
    let mut c = Cursor::new(line);
    c.expect("MVLR")?;
    if c.eat("none") {
        c.done()?;
        return Ok(None);
    }
    c.expect("[")?;
    let inputs = c.number()?;
    c.expect("]")?;
    let coeffs = c.coeffs()?;
    c.done()?;
    Ok(Some(MvlrHead { inputs, coeffs }))
}

impl FromStr for Program {
    type Err = ParseError;

    /// Parses the text format. Only syntax is checked here; use
    /// [`Program::validate`] for feature-dependent checks.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |line: usize, message: String| ParseError { line, message };
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (ln, first) = lines
            .next()
            .ok_or_else(|| err(1, "empty program text".into()))?;
        let register_count = first
            .strip_prefix("registers")
            .and_then(|r| r.trim().parse::<usize>().ok())
            .ok_or_else(|| err(ln, "expected `registers <count>`".into()))?;

        let mut instructions = Vec::new();
        let mut head = None;
        let mut saw_head = false;
        for (ln, line) in lines {
            if saw_head {
                return Err(err(ln, "content after the MVLR line".into()));
            }
            if line.starts_with("MVLR") {
                head = parse_head(line).map_err(|m| err(ln, m))?;
                saw_head = true;
            } else {
                instructions.push(parse_instruction(line).map_err(|m| err(ln, m))?);
            }
        }
        if !saw_head {
            return Err(err(s.lines().count().max(1), "missing MVLR line".into()));
        }
        let program = Program {
            instructions,
            register_count,
            head,
        };
        // Register-only structure can be checked without knowing the width.
        program
            .validate(usize::MAX)
            .map_err(|e| err(ln, e.to_string()))?;
        Ok(program)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# comment
registers 8
R1 = add(x0, LR[2:4]{0.5,1.0,-2.0,0.25})
R0 = SinRF{0.1,1.0,2.0,-0.5}(R1, R1)
R3 = mul(1stDLR[0:2]{1e-7,2.0,3.5}, PeakLoc[5:9]{0.0,1.0})
MVLR[4]{0.0,1.0,0.0,0.0,0.0}
";

    #[test]
    fn parses_sample() {
        let p: Program = SAMPLE.parse().unwrap();
        assert_eq!(p.register_count, 8);
        assert_eq!(p.len(), 3);
        assert_eq!(p.head.as_ref().unwrap().inputs, 4);
        match &p.instructions[0].op2 {
            Operand::Terminal(t) => {
                assert_eq!(t.kind, TerminalKind::Lr);
                assert_eq!((t.alpha, t.beta), (2, 4));
            }
            other => panic!("unexpected {other:?}"),
        }
        let again: Program = p.to_string().parse().unwrap();
        assert_eq!(again, p);
    }

    #[test]
    fn no_head_round_trip() {
        let text = "registers 2\nR0 = ln(x3, R1)\nMVLR none\n";
        let p: Program = text.parse().unwrap();
        assert!(p.head.is_none());
        assert_eq!(p.to_string(), text);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = "registers 2\nR0 = add(x0, x1)\nR0 = frob(x0, x1)\nMVLR none"
            .parse::<Program>()
            .unwrap_err();
        assert_eq!(e.line, 3);
        let e = "registers 2\nR0 = add(x0, x1)\n"
            .parse::<Program>()
            .unwrap_err();
        assert!(e.message.contains("MVLR"));
        let e = "registers 2\nR5 = add(x0, x1)\nMVLR none"
            .parse::<Program>()
            .unwrap_err();
        assert!(e.message.contains("R5"));
    }
}
