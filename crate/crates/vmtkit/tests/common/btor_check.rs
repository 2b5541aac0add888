//! A standalone BTOR2 well-formedness checker: line syntax, id ordering,
//! operand references and sort agreement for every operator.

use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum S {
    Bv(u32),
    Array(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Sort,
    Value,
    State,
    Other,
}

struct Checker {
    sorts: HashMap<usize, S>,
    nodes: HashMap<usize, (usize, Kind)>,
    inits: Vec<usize>,
    nexts: Vec<usize>,
    last: usize,
}

fn num(tok: Option<&&str>, what: &str) -> Result<i64, String> {
    tok.ok_or_else(|| format!("missing {}", what))?.parse::<i64>().map_err(|_| format!("bad {}", what))
}

impl Checker {
    fn sort(&self, id: i64) -> Result<S, String> {
        usize::try_from(id)
            .ok()
            .and_then(|i| self.sorts.get(&i).copied())
            .ok_or_else(|| format!("{} is not a sort", id))
    }

    fn width(&self, sid: usize) -> Result<u32, String> {
        match self.sorts[&sid] {
            S::Bv(w) => Ok(w),
            S::Array(..) => Err("expected a bit-vector sort".into()),
        }
    }

    /// Sort id of an operand; negative ids are bit-wise negations.
    fn operand(&self, id: i64) -> Result<usize, String> {
        let (sid, kind) =
            *self.nodes.get(&(id.unsigned_abs() as usize)).ok_or_else(|| format!("undefined operand {}", id))?;
        if !matches!(kind, Kind::Value | Kind::State) {
            return Err(format!("operand {} is not a value", id));
        }
        if id < 0 && !matches!(self.sorts[&sid], S::Bv(_)) {
            return Err(format!("negated operand {} is not a bit-vector", id));
        }
        Ok(sid)
    }

    fn same(&self, a: usize, b: usize) -> bool {
        self.sorts[&a] == self.sorts[&b]
    }

    fn line(&mut self, line: &str) -> Result<(), String> {
        let code = line.split(';').next().unwrap_or("").trim();
        if code.is_empty() {
            return Ok(());
        }
        let toks: Vec<&str> = code.split_whitespace().collect();
        let id = num(toks.first(), "id")?;
        if id <= 0 || id as usize <= self.last {
            return Err(format!("id {} is not increasing", id));
        }
        let id = id as usize;
        self.last = id;
        let op = *toks.get(1).ok_or("missing operator")?;
        let arg = |i: usize, what: &str| num(toks.get(i), what);
        if op == "sort" {
            let s = match *toks.get(2).ok_or("missing sort kind")? {
                "bitvec" => {
                    let w = arg(3, "width")?;
                    if w < 1 {
                        return Err("zero width".into());
                    }
                    S::Bv(w as u32)
                }
                "array" => {
                    self.sort(arg(3, "index sort")?)?;
                    self.sort(arg(4, "element sort")?)?;
                    S::Array(arg(3, "")? as usize, arg(4, "")? as usize)
                }
                k => return Err(format!("unknown sort kind {}", k)),
            };
            self.sorts.insert(id, s);
            self.nodes.insert(id, (id, Kind::Sort));
            return Ok(());
        }
        let flag = |w: u32| -> Result<(), String> {
            if w == 1 {
                Ok(())
            } else {
                Err(format!("{} needs a width-1 operand", op))
            }
        };
        match op {
            "bad" | "constraint" | "fair" | "output" => {
                let a = self.operand(arg(2, "operand")?)?;
                if op != "output" {
                    flag(self.width(a)?)?;
                }
                self.nodes.insert(id, (0, Kind::Other));
                return Ok(());
            }
            "justice" => {
                let n = arg(2, "count")?;
                for i in 0..n as usize {
                    flag(self.width(self.operand(arg(3 + i, "operand")?)?)?)?;
                }
                self.nodes.insert(id, (0, Kind::Other));
                return Ok(());
            }
            _ => {}
        }
        let sid = arg(2, "sort")?;
        self.sort(sid)?;
        let sid = sid as usize;
        let kind = match op {
            "input" => Kind::Value,
            "state" => Kind::State,
            "zero" | "one" | "ones" => {
                self.width(sid)?;
                Kind::Value
            }
            "const" | "constd" | "consth" => {
                let w = self.width(sid)?;
                let lit = *toks.get(3).ok_or("missing literal")?;
                let ok = match op {
                    "const" => lit.len() == w as usize && lit.chars().all(|c| c == '0' || c == '1'),
                    "consth" => {
                        lit.chars().all(|c| c.is_ascii_hexdigit()) && lit.len() as u32 * 4 < w + 4 && !lit.is_empty()
                    }
                    _ => {
                        let digits = lit.strip_prefix('-').unwrap_or(lit);
                        !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit()) && {
                            let v: u128 = digits.parse().map_err(|_| "constant too large")?;
                            w >= 128 || v < 1u128 << w || (lit.starts_with('-') && v <= 1u128 << (w - 1))
                        }
                    }
                };
                if !ok {
                    return Err(format!("bad literal {} for width {}", lit, w));
                }
                Kind::Value
            }
            "init" | "next" => {
                let st = arg(3, "state")?;
                let (ssid, kind) = *self.nodes.get(&(st as usize)).ok_or("undefined state")?;
                if kind != Kind::State || st < 0 {
                    return Err(format!("{} target {} is not a state", op, st));
                }
                let list = if op == "init" { &mut self.inits } else { &mut self.nexts };
                if list.contains(&(st as usize)) {
                    return Err(format!("second {} for state {}", op, st));
                }
                list.push(st as usize);
                let v = self.operand(arg(4, "value")?)?;
                let const_array = matches!(self.sorts[&ssid], S::Array(_, e) if self.same(e, v)) && op == "init";
                if !self.same(ssid, sid) || !(self.same(v, sid) || const_array) {
                    return Err(format!("{} sorts disagree", op));
                }
                Kind::Other
            }
            "not" | "inc" | "dec" | "neg" => {
                let a = self.operand(arg(3, "operand")?)?;
                self.width(a)?;
                if !self.same(a, sid) {
                    return Err(format!("{} result sort differs", op));
                }
                Kind::Value
            }
            "redand" | "redor" | "redxor" => {
                self.width(self.operand(arg(3, "operand")?)?)?;
                flag(self.width(sid)?)?;
                Kind::Value
            }
            "uext" | "sext" => {
                let a = self.width(self.operand(arg(3, "operand")?)?)?;
                let n = arg(4, "extension")?;
                if n < 0 || self.width(sid)? != a + n as u32 {
                    return Err(format!("{} width mismatch", op));
                }
                Kind::Value
            }
            "slice" => {
                let a = self.width(self.operand(arg(3, "operand")?)?)? as i64;
                let (u, l) = (arg(4, "upper")?, arg(5, "lower")?);
                if !(0 <= l && l <= u && u < a) || self.width(sid)? as i64 != u - l + 1 {
                    return Err("slice bounds".into());
                }
                Kind::Value
            }
            "iff" | "implies" => {
                let a = self.operand(arg(3, "operand")?)?;
                let b = self.operand(arg(4, "operand")?)?;
                flag(self.width(a)?)?;
                flag(self.width(b)?)?;
                flag(self.width(sid)?)?;
                Kind::Value
            }
            "eq" | "neq" => {
                let a = self.operand(arg(3, "operand")?)?;
                let b = self.operand(arg(4, "operand")?)?;
                if !self.same(a, b) {
                    return Err(format!("{} operands differ in sort", op));
                }
                flag(self.width(sid)?)?;
                Kind::Value
            }
            "ugt" | "ugte" | "ult" | "ulte" | "sgt" | "sgte" | "slt" | "slte" => {
                let a = self.operand(arg(3, "operand")?)?;
                let b = self.operand(arg(4, "operand")?)?;
                self.width(a)?;
                if !self.same(a, b) {
                    return Err(format!("{} operands differ in sort", op));
                }
                flag(self.width(sid)?)?;
                Kind::Value
            }
            "and" | "nand" | "nor" | "or" | "xnor" | "xor" | "add" | "mul" | "sub" | "udiv" | "urem" | "sdiv"
            | "srem" | "smod" | "sll" | "srl" | "sra" | "rol" | "ror" => {
                let a = self.operand(arg(3, "operand")?)?;
                let b = self.operand(arg(4, "operand")?)?;
                self.width(a)?;
                if !self.same(a, b) || !self.same(a, sid) {
                    return Err(format!("{} operand sorts differ", op));
                }
                Kind::Value
            }
            "concat" => {
                let a = self.width(self.operand(arg(3, "operand")?)?)?;
                let b = self.width(self.operand(arg(4, "operand")?)?)?;
                if self.width(sid)? != a + b {
                    return Err("concat width".into());
                }
                Kind::Value
            }
            "ite" => {
                flag(self.width(self.operand(arg(3, "condition")?)?)?)?;
                let a = self.operand(arg(4, "operand")?)?;
                let b = self.operand(arg(5, "operand")?)?;
                if !self.same(a, sid) || !self.same(b, sid) {
                    return Err("ite branch sorts".into());
                }
                Kind::Value
            }
            "read" => {
                let arr = self.operand(arg(3, "array")?)?;
                let idx = self.operand(arg(4, "index")?)?;
                match self.sorts[&arr] {
                    S::Array(i, e) if self.same(i, idx) && self.same(e, sid) => {}
                    _ => return Err("read sorts".into()),
                }
                Kind::Value
            }
            "write" => {
                let arr = self.operand(arg(3, "array")?)?;
                let idx = self.operand(arg(4, "index")?)?;
                let val = self.operand(arg(5, "value")?)?;
                match self.sorts[&arr] {
                    S::Array(i, e) if self.same(i, idx) && self.same(e, val) && self.same(arr, sid) => {}
                    _ => return Err("write sorts".into()),
                }
                Kind::Value
            }
            other => return Err(format!("unknown operator {}", other)),
        };
        self.nodes.insert(id, (sid, kind));
        Ok(())
    }
}

/// Checks a BTOR2 model; the error names the offending line.
pub fn check_btor(text: &str) -> Result<(), String> {
    let mut c = Checker { sorts: HashMap::new(), nodes: HashMap::new(), inits: Vec::new(), nexts: Vec::new(), last: 0 };
    for (i, line) in text.lines().enumerate() {
        c.line(line).map_err(|e| format!("line {}: {}: {}", i + 1, e, line))?;
    }
    Ok(())
}
