//! Deterministic tree-walking interpreter.

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::ast::*;

/// Value read from an `int` variable that was never written.
pub const UNINIT_INT: i32 = 0x7FFF_0001;

pub const DEFAULT_STEP_LIMIT: u64 = 10_000_000;

const MAX_CALL_DEPTH: usize = 512;
const MAX_OUTPUT_BYTES: usize = 1 << 20;
const DEADLINE_CHECK_MASK: u64 = 0xFFFF;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuntimeErrorKind {
    DivisionByZero,
    InputExhausted,
    InputMismatch,
    FormatMismatch,
    StackOverflow,
    OutputLimit,
}

impl fmt::Display for RuntimeErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RuntimeErrorKind::DivisionByZero => "division by zero",
            RuntimeErrorKind::InputExhausted => "input exhausted",
            RuntimeErrorKind::InputMismatch => "input does not match format",
            RuntimeErrorKind::FormatMismatch => "bad printf directive or argument",
            RuntimeErrorKind::StackOverflow => "call depth exceeded",
            RuntimeErrorKind::OutputLimit => "output limit exceeded",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    RuntimeError(RuntimeErrorKind),
    StepLimitExceeded,
    /// The caller's wall-clock deadline passed mid-run.
    DeadlineExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionResult {
    /// Everything printed up to the point where execution stopped.
    pub stdout: String,
    pub status: Status,
    /// Set when some variable was read before being written.
    pub uninit_read: bool,
    pub steps: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub step_limit: u64,
    pub deadline: Option<Instant>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            step_limit: DEFAULT_STEP_LIMIT,
            deadline: None,
        }
    }
}

pub fn interpret(program: &Program, stdin: &str, step_limit: u64) -> ExecutionResult {
    interpret_with(
        program,
        stdin,
        Limits {
            step_limit,
            deadline: None,
        },
    )
}

pub fn interpret_with(program: &Program, stdin: &str, limits: Limits) -> ExecutionResult {
    let mut m = Machine {
        program,
        input: stdin.as_bytes(),
        in_pos: 0,
        out: String::new(),
        steps: 0,
        limits,
        uninit_read: false,
        depth: 0,
    };
    let status = match program.function_index("main") {
        None => Status::Ok,
        Some(main) => match m.call(main, Vec::new()) {
            Ok(_) => Status::Ok,
            Err(Stop::Runtime(k)) => Status::RuntimeError(k),
            Err(Stop::Steps) => Status::StepLimitExceeded,
            Err(Stop::Deadline) => Status::DeadlineExceeded,
        },
    };
    ExecutionResult {
        stdout: m.out,
        status,
        uninit_read: m.uninit_read,
        steps: m.steps,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Int(i32),
    Float(f64),
}

impl Value {
    fn as_f64(self) -> f64 {
        match self {
            Value::Int(v) => v as f64,
            Value::Float(v) => v,
        }
    }

    fn as_i32(self) -> i32 {
        match self {
            Value::Int(v) => v,
            // saturating, NaN becomes 0
            Value::Float(v) => v as i32,
        }
    }

    fn truthy(self) -> bool {
        match self {
            Value::Int(v) => v != 0,
            Value::Float(v) => v != 0.0,
        }
    }

    fn convert(self, ty: Type) -> Value {
        match ty {
            Type::Int => Value::Int(self.as_i32()),
            Type::Float => Value::Float(self.as_f64()),
            Type::Void => self,
        }
    }

    fn sentinel(ty: Type) -> Value {
        match ty {
            Type::Float => Value::Float(f64::NAN),
            _ => Value::Int(UNINIT_INT),
        }
    }
}

enum Stop {
    Runtime(RuntimeErrorKind),
    Steps,
    Deadline,
}

enum Flow {
    Normal,
    Break,
    Continue,
    Return(Option<Value>),
}

type Exec<T> = Result<T, Stop>;

struct Machine<'a> {
    program: &'a Program,
    input: &'a [u8],
    in_pos: usize,
    out: String,
    steps: u64,
    limits: Limits,
    uninit_read: bool,
    depth: usize,
}

type Frame = Vec<Option<Value>>;

impl<'a> Machine<'a> {
    fn tick(&mut self) -> Exec<()> {
        self.steps += 1;
        if self.steps > self.limits.step_limit {
            return Err(Stop::Steps);
        }
        if self.steps & DEADLINE_CHECK_MASK == 0 {
            if let Some(d) = self.limits.deadline {
                if Instant::now() >= d {
                    return Err(Stop::Deadline);
                }
            }
        }
        Ok(())
    }

    fn call(&mut self, func: usize, args: Vec<Value>) -> Exec<Value> {
        if self.depth >= MAX_CALL_DEPTH {
            return Err(Stop::Runtime(RuntimeErrorKind::StackOverflow));
        }
        let f = &self.program.functions[func];
        let mut frame: Frame = vec![None; f.frame_size];
        for (p, a) in f.params.iter().zip(args) {
            frame[self.program.vars[p.id].slot] = Some(a.convert(p.ty));
        }
        self.depth += 1;
        let flow = self.block(&f.body, &mut frame);
        self.depth -= 1;
        match flow? {
            Flow::Return(Some(v)) => Ok(v.convert(f.ret)),
            _ if f.ret == Type::Void => Ok(Value::Int(0)),
            _ => {
                self.uninit_read = true;
                Ok(Value::sentinel(f.ret))
            }
        }
    }

    fn block(&mut self, b: &'a Block, frame: &mut Frame) -> Exec<Flow> {
        for s in &b.stmts {
            match self.stmt(s, frame)? {
                Flow::Normal => {}
                other => return Ok(other),
            }
        }
        Ok(Flow::Normal)
    }

    fn stmt(&mut self, s: &'a Stmt, frame: &mut Frame) -> Exec<Flow> {
        self.tick()?;
        match s {
            Stmt::Decl { ty, vars } => {
                for d in vars {
                    let slot = self.program.vars[d.id].slot;
                    frame[slot] = match &d.init {
                        Some(e) => Some(self.expr(e, frame)?.convert(*ty)),
                        None => None,
                    };
                }
            }
            Stmt::Expr(e) => {
                self.expr(e, frame)?;
            }
            Stmt::If {
                cond,
                then_block,
                else_block,
            } => {
                if self.expr(cond, frame)?.truthy() {
                    return self.block(then_block, frame);
                } else if let Some(b) = else_block {
                    return self.block(b, frame);
                }
            }
            Stmt::While { cond, body } => loop {
                self.tick()?;
                if !self.expr(cond, frame)?.truthy() {
                    break;
                }
                match self.block(body, frame)? {
                    Flow::Break => break,
                    Flow::Return(v) => return Ok(Flow::Return(v)),
                    Flow::Normal | Flow::Continue => {}
                }
            },
            Stmt::For { init, cond, step, body } => {
                if let Some(e) = init {
                    self.expr(e, frame)?;
                }
                loop {
                    self.tick()?;
                    if let Some(c) = cond {
                        if !self.expr(c, frame)?.truthy() {
                            break;
                        }
                    }
                    match self.block(body, frame)? {
                        Flow::Break => break,
                        Flow::Return(v) => return Ok(Flow::Return(v)),
                        Flow::Normal | Flow::Continue => {}
                    }
                    if let Some(e) = step {
                        self.expr(e, frame)?;
                    }
                }
            }
            Stmt::Return(e) => {
                let v = match e {
                    Some(e) => Some(self.expr(e, frame)?),
                    None => None,
                };
                return Ok(Flow::Return(v));
            }
            Stmt::Break => return Ok(Flow::Break),
            Stmt::Continue => return Ok(Flow::Continue),
            Stmt::Printf { format, args } => {
                let mut values = Vec::with_capacity(args.len());
                for a in args {
                    values.push(self.expr(a, frame)?);
                }
                let text = format_printf(format, &values).map_err(Stop::Runtime)?;
                if self.out.len() + text.len() > MAX_OUTPUT_BYTES {
                    return Err(Stop::Runtime(RuntimeErrorKind::OutputLimit));
                }
                self.out.push_str(&text);
            }
            Stmt::Scanf { format, args } => self.scanf(format, args, frame)?,
            Stmt::Block(b) => return self.block(b, frame),
        }
        Ok(Flow::Normal)
    }

    fn read_var(&mut self, r: &VarRef, frame: &Frame) -> Value {
        let info = &self.program.vars[r.decl];
        match frame[info.slot] {
            Some(v) => v,
            None => {
                self.uninit_read = true;
                Value::sentinel(info.ty)
            }
        }
    }

    fn write_var(&mut self, r: &VarRef, v: Value, frame: &mut Frame) -> Value {
        let info = &self.program.vars[r.decl];
        let v = v.convert(info.ty);
        frame[info.slot] = Some(v);
        v
    }

    fn expr(&mut self, e: &'a Expr, frame: &mut Frame) -> Exec<Value> {
        self.tick()?;
        Ok(match e {
            Expr::Int(v) => Value::Int(*v),
            Expr::Float(v) => Value::Float(*v),
            Expr::Var(r) => self.read_var(r, frame),
            Expr::Unary { op, expr } => {
                let v = self.expr(expr, frame)?;
                match (op, v) {
                    (UnaryOp::Neg, Value::Int(x)) => Value::Int(x.wrapping_neg()),
                    (UnaryOp::Neg, Value::Float(x)) => Value::Float(-x),
                    (UnaryOp::Not, v) => Value::Int(!v.truthy() as i32),
                }
            }
            Expr::Cast { ty, expr } => self.expr(expr, frame)?.convert(*ty),
            Expr::IncDec { op, target } => {
                let old = self.read_var(target, frame);
                let delta = if op.is_increment() { 1 } else { -1 };
                let new = match old {
                    Value::Int(x) => Value::Int(x.wrapping_add(delta)),
                    Value::Float(x) => Value::Float(x + delta as f64),
                };
                let new = self.write_var(target, new, frame);
                if op.is_prefix() {
                    new
                } else {
                    old
                }
            }
            Expr::Binary { op, lhs, rhs } => match op {
                BinOp::And => {
                    let l = self.expr(lhs, frame)?.truthy();
                    Value::Int((l && self.expr(rhs, frame)?.truthy()) as i32)
                }
                BinOp::Or => {
                    let l = self.expr(lhs, frame)?.truthy();
                    Value::Int((l || self.expr(rhs, frame)?.truthy()) as i32)
                }
                _ => {
                    let l = self.expr(lhs, frame)?;
                    let r = self.expr(rhs, frame)?;
                    binary(*op, l, r).map_err(Stop::Runtime)?
                }
            },
            Expr::Assign { op, target, value } => {
                let v = self.expr(value, frame)?;
                let v = match op.binop() {
                    None => v,
                    Some(b) => {
                        let cur = self.read_var(target, frame);
                        binary(b, cur, v).map_err(Stop::Runtime)?
                    }
                };
                self.write_var(target, v, frame)
            }
            Expr::Call { name, args } => {
                let mut values = Vec::with_capacity(args.len());
                for a in args {
                    values.push(self.expr(a, frame)?);
                }
                let func = self
                    .program
                    .function_index(name)
                    .expect("calls are checked during resolution");
                self.call(func, values)?
            }
        })
    }

    fn skip_ws(&mut self) {
        while self.in_pos < self.input.len() && self.input[self.in_pos].is_ascii_whitespace() {
            self.in_pos += 1;
        }
    }

    fn scanf(&mut self, format: &str, args: &[VarRef], frame: &mut Frame) -> Exec<()> {
        let fmt = format.as_bytes();
        let mut i = 0;
        let mut next_arg = 0;
        while i < fmt.len() {
            let c = fmt[i];
            if c.is_ascii_whitespace() {
                self.skip_ws();
                i += 1;
                continue;
            }
            if c != b'%' {
                if self.in_pos >= self.input.len() {
                    return Err(Stop::Runtime(RuntimeErrorKind::InputExhausted));
                }
                if self.input[self.in_pos] != c {
                    return Err(Stop::Runtime(RuntimeErrorKind::InputMismatch));
                }
                self.in_pos += 1;
                i += 1;
                continue;
            }
            i += 1;
            if fmt.get(i) == Some(&b'%') {
                self.skip_ws();
                if self.input.get(self.in_pos) != Some(&b'%') {
                    return Err(Stop::Runtime(RuntimeErrorKind::InputMismatch));
                }
                self.in_pos += 1;
                i += 1;
                continue;
            }
            while i < fmt.len() && matches!(fmt[i], b'l' | b'h' | b'L') {
                i += 1;
            }
            let conv = *fmt.get(i).ok_or(Stop::Runtime(RuntimeErrorKind::FormatMismatch))?;
            i += 1;
            let target = args.get(next_arg).ok_or(Stop::Runtime(RuntimeErrorKind::FormatMismatch))?;
            next_arg += 1;
            self.skip_ws();
            if self.in_pos >= self.input.len() {
                return Err(Stop::Runtime(RuntimeErrorKind::InputExhausted));
            }
            let rest = &self.input[self.in_pos..];
            let (value, used) = match conv {
                b'd' | b'i' | b'u' => scan_int(rest).map(|(v, n)| (Value::Int(v), n)),
                b'f' | b'e' | b'g' => scan_float(rest).map(|(v, n)| (Value::Float(v), n)),
                _ => return Err(Stop::Runtime(RuntimeErrorKind::FormatMismatch)),
            }
            .ok_or(Stop::Runtime(RuntimeErrorKind::InputMismatch))?;
            self.in_pos += used;
            self.write_var(target, value, frame);
        }
        Ok(())
    }
}

fn binary(op: BinOp, l: Value, r: Value) -> Result<Value, RuntimeErrorKind> {
    use BinOp::*;
    if let (Value::Int(a), Value::Int(b)) = (l, r) {
        return Ok(Value::Int(match op {
            Add => a.wrapping_add(b),
            Sub => a.wrapping_sub(b),
            Mul => a.wrapping_mul(b),
            Div | Rem if b == 0 => return Err(RuntimeErrorKind::DivisionByZero),
            Div => a.wrapping_div(b),
            Rem => a.wrapping_rem(b),
            Lt => (a < b) as i32,
            Le => (a <= b) as i32,
            Gt => (a > b) as i32,
            Ge => (a >= b) as i32,
            Eq => (a == b) as i32,
            Ne => (a != b) as i32,
            And | Or => unreachable!("short-circuit operators are evaluated lazily"),
        }));
    }
    let (a, b) = (l.as_f64(), r.as_f64());
    Ok(match op {
        Add => Value::Float(a + b),
        Sub => Value::Float(a - b),
        Mul => Value::Float(a * b),
        Div => Value::Float(a / b),
        Rem => Value::Float(a % b),
        Lt => Value::Int((a < b) as i32),
        Le => Value::Int((a <= b) as i32),
        Gt => Value::Int((a > b) as i32),
        Ge => Value::Int((a >= b) as i32),
        Eq => Value::Int((a == b) as i32),
        Ne => Value::Int((a != b) as i32),
        And | Or => unreachable!("short-circuit operators are evaluated lazily"),
    })
}

fn scan_int(s: &[u8]) -> Option<(i32, usize)> {
    let mut n = 0;
    let neg = match s.first() {
        Some(b'-') => {
            n = 1;
            true
        }
        Some(b'+') => {
            n = 1;
            false
        }
        _ => false,
    };
    let start = n;
    let mut acc: i64 = 0;
    while n < s.len() && s[n].is_ascii_digit() {
        acc = (acc * 10 + (s[n] - b'0') as i64).min(1 << 40);
        n += 1;
    }
    if n == start {
        return None;
    }
    let v = if neg { -acc } else { acc };
    Some((v as i32, n))
}

fn scan_float(s: &[u8]) -> Option<(f64, usize)> {
    let mut n = 0;
    if matches!(s.first(), Some(b'-') | Some(b'+')) {
        n = 1;
    }
    let digits_start = n;
    while n < s.len() && s[n].is_ascii_digit() {
        n += 1;
    }
    if n < s.len() && s[n] == b'.' {
        n += 1;
        while n < s.len() && s[n].is_ascii_digit() {
            n += 1;
        }
    }
    if n == digits_start || (n == digits_start + 1 && s[digits_start] == b'.') {
        return None;
    }
    if n < s.len() && (s[n] == b'e' || s[n] == b'E') {
        let mut m = n + 1;
        if m < s.len() && (s[m] == b'-' || s[m] == b'+') {
            m += 1;
        }
        if m < s.len() && s[m].is_ascii_digit() {
            while m < s.len() && s[m].is_ascii_digit() {
                m += 1;
            }
            n = m;
        }
    }
    let text = std::str::from_utf8(&s[..n]).ok()?;
    text.parse().ok().map(|v| (v, n))
}

/// Renders a printf format string against already-evaluated arguments.
pub fn format_printf(format: &str, args: &[Value]) -> Result<String, RuntimeErrorKind> {
    let mut out = String::new();
    let chars: Vec<char> = format.chars().collect();
    let mut i = 0;
    let mut next = 0;
    while i < chars.len() {
        if chars[i] != '%' {
            out.push(chars[i]);
            i += 1;
            continue;
        }
        i += 1;
        if chars.get(i) == Some(&'%') {
            out.push('%');
            i += 1;
            continue;
        }
        let (mut left, mut zero, mut plus, mut space) = (false, false, false, false);
        while let Some(&c) = chars.get(i) {
            match c {
                '-' => left = true,
                '0' => zero = true,
                '+' => plus = true,
                ' ' => space = true,
                _ => break,
            }
            i += 1;
        }
        let mut width = 0usize;
        while let Some(d) = chars.get(i).and_then(|c| c.to_digit(10)) {
            width = width * 10 + d as usize;
            i += 1;
        }
        let mut precision = None;
        if chars.get(i) == Some(&'.') {
            i += 1;
            let mut p = 0usize;
            while let Some(d) = chars.get(i).and_then(|c| c.to_digit(10)) {
                p = p * 10 + d as usize;
                i += 1;
            }
            precision = Some(p);
        }
        while matches!(chars.get(i), Some('l') | Some('h') | Some('L')) {
            i += 1;
        }
        let conv = *chars.get(i).ok_or(RuntimeErrorKind::FormatMismatch)?;
        i += 1;
        let arg = *args.get(next).ok_or(RuntimeErrorKind::FormatMismatch)?;
        next += 1;
        let sign_of = |neg: bool| {
            if neg {
                "-"
            } else if plus {
                "+"
            } else if space {
                " "
            } else {
                ""
            }
        };
        let (sign, body, numeric) = match conv {
            'd' | 'i' => {
                let v = arg.as_i32() as i64;
                let mut digits = v.unsigned_abs().to_string();
                if let Some(p) = precision {
                    while digits.len() < p {
                        digits.insert(0, '0');
                    }
                }
                (sign_of(v < 0), digits, precision.is_none())
            }
            'u' => (sign_of(false), (arg.as_i32() as u32).to_string(), precision.is_none()),
            'x' => ("", format!("{:x}", arg.as_i32() as u32), precision.is_none()),
            'c' => ("", char::from_u32(arg.as_i32() as u32 & 0xFF).unwrap_or('?').to_string(), false),
            'f' | 'F' => {
                let v = arg.as_f64();
                let p = precision.unwrap_or(6);
                if v.is_nan() {
                    (sign_of(v.is_sign_negative()), "nan".to_string(), false)
                } else if v.is_infinite() {
                    (sign_of(v < 0.0), "inf".to_string(), false)
                } else {
                    let text = format!("{:.*}", p, v.abs());
                    (sign_of(v.is_sign_negative()), text, true)
                }
            }
            _ => return Err(RuntimeErrorKind::FormatMismatch),
        };
        let len = sign.len() + body.chars().count();
        if width > len {
            let pad = width - len;
            if left {
                out.push_str(sign);
                out.push_str(&body);
                out.extend(std::iter::repeat_n(' ', pad));
            } else if zero && numeric {
                out.push_str(sign);
                out.extend(std::iter::repeat_n('0', pad));
                out.push_str(&body);
            } else {
                out.extend(std::iter::repeat_n(' ', pad));
                out.push_str(sign);
                out.push_str(&body);
            }
        } else {
            out.push_str(sign);
            out.push_str(&body);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    fn run(src: &str, input: &str) -> ExecutionResult {
        interpret(&parse(src).unwrap(), input, DEFAULT_STEP_LIMIT)
    }

    #[test]
    fn printf_directives() {
        let f = |fmt: &str, a: &[Value]| format_printf(fmt, a).unwrap();
        assert_eq!(f("%d|%5d|%-3d|%03d", &[Value::Int(7), Value::Int(-42), Value::Int(1), Value::Int(5)]), "7|  -42|1  |005");
        assert_eq!(f("%02d:%02d:%02d", &[Value::Int(1), Value::Int(2), Value::Int(30)]), "01:02:30");
        assert_eq!(f("%f %.2f", &[Value::Float(1.5), Value::Float(2.0 / 3.0)]), "1.500000 0.67");
        assert_eq!(f("%f", &[Value::Float(f64::NAN)]), "nan");
        assert_eq!(f("100%%", &[]), "100%");
        assert_eq!(format_printf("%d %d", &[Value::Int(1)]), Err(RuntimeErrorKind::FormatMismatch));
    }

    #[test]
    fn integer_semantics() {
        let r = run("int main(){ int a; a = 2147483647; a = a + 1; printf(\"%d %d %d\", a, -7 / 2, -7 % 2); return 0; }", "");
        assert_eq!(r.stdout, "-2147483648 -3 -1");
        assert_eq!(r.status, Status::Ok);
    }

    #[test]
    fn division_by_zero_keeps_prior_output() {
        let r = run("int main(){ int a; a = 0; printf(\"x\"); printf(\"%d\", 1 / a); return 0; }", "");
        assert_eq!(r.stdout, "x");
        assert_eq!(r.status, Status::RuntimeError(RuntimeErrorKind::DivisionByZero));
    }

    #[test]
    fn scanf_tokens_and_exhaustion() {
        let src = "int main(){ int a, b; float c; scanf(\"%d%d\", &a, &b); scanf(\"%f\", &c); printf(\"%d %.1f\", a + b, c); return 0; }";
        let r = run(src, "  3\n4 2.5 ");
        assert_eq!((r.stdout.as_str(), r.status), ("7 2.5", Status::Ok));
        let r = run(src, "3");
        assert_eq!(r.status, Status::RuntimeError(RuntimeErrorKind::InputExhausted));
        let r = run(src, "3 x");
        assert_eq!(r.status, Status::RuntimeError(RuntimeErrorKind::InputMismatch));
    }

    #[test]
    fn uninitialized_reads_use_sentinels() {
        let r = run("int main(){ int a; float f; printf(\"%d %f\", a, f); return 0; }", "");
        assert_eq!(r.stdout, format!("{UNINIT_INT} nan"));
        assert!(r.uninit_read);
    }

    #[test]
    fn step_limit_and_empty_program() {
        let r = run("int main(){ while (1) { } return 0; }", "");
        assert_eq!(r.status, Status::StepLimitExceeded);
        let r = run("int main(){ return 0; }", "");
        assert_eq!((r.stdout.as_str(), r.status), ("", Status::Ok));
    }

    #[test]
    fn calls_recursion_and_control_flow() {
        let src = "int fact(int n){ if (n <= 1) { return 1; } return n * fact(n - 1); }
                   int main(){ int i, s; s = 0; for (i = 0; i < 10; i++) { if (i == 2) { continue; } if (i == 5) { break; } s += i; }
                   printf(\"%d %d\", fact(5), s); return 0; }";
        assert_eq!(run(src, "").stdout, "120 8");
        let r = run("int f(int n){ return f(n + 1); } int main(){ f(0); return 0; }", "");
        assert_eq!(r.status, Status::RuntimeError(RuntimeErrorKind::StackOverflow));
    }

    #[test]
    fn mixed_arithmetic_and_casts() {
        let r = run("int main(){ int s, n; float a; s = 7; n = 2; a = (float) s / n; printf(\"%.2f %d\", a, s / n); return 0; }", "");
        assert_eq!(r.stdout, "3.50 3");
    }
}
