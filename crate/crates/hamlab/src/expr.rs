//! Closed-form scalar expressions.
//!
//! Grammar (usual precedence, `^` right-associative and binding tighter
//! than unary minus):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom (('^' | '**') unary)?
//! atom   := number | name | func '(' expr ')' | '(' expr ')'
//! func   := sin | cos | tan | exp | log | sqrt | sinh | cosh | tanh
//! ```
//!
//! `pi` is a constant. Other names are resolved against the variable list
//! given to [`Expr::parse`]. Expressions differentiate symbolically and
//! compile to a small stack program for evaluation.

use std::collections::HashMap;
use std::fmt;

use crate::HamError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
    Tanh,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" | "ln" => Func::Log,
            "sqrt" => Func::Sqrt,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
        }
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Exp => x.exp(),
            Func::Log => x.ln(),
            Func::Sqrt => x.sqrt(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Tanh => x.tanh(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Const(f64),
    Var(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

use Node::*;

fn c(v: f64) -> Node {
    Const(v)
}

fn neg(a: Node) -> Node {
    match a {
        Const(v) => Const(-v),
        Neg(inner) => *inner,
        other => Neg(Box::new(other)),
    }
}

fn add(a: Node, b: Node) -> Node {
    match (a, b) {
        (Const(x), Const(y)) => Const(x + y),
        (Const(z), other) | (other, Const(z)) if z == 0.0 => other,
        (a, Neg(b)) => sub(a, *b),
        (a, b) => Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Node, b: Node) -> Node {
    match (a, b) {
        (Const(x), Const(y)) => Const(x - y),
        (other, Const(z)) if z == 0.0 => other,
        (Const(z), other) if z == 0.0 => neg(other),
        (a, b) => Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Node, b: Node) -> Node {
    match (a, b) {
        (Const(x), Const(y)) => Const(x * y),
        (Const(z), _) | (_, Const(z)) if z == 0.0 => Const(0.0),
        (Const(o), other) | (other, Const(o)) if o == 1.0 => other,
        (Const(m), other) | (other, Const(m)) if m == -1.0 => neg(other),
        (a, b) => Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Node, b: Node) -> Node {
    match (a, b) {
        (Const(x), Const(y)) if y != 0.0 => Const(x / y),
        (Const(z), _) if z == 0.0 => Const(0.0),
        (other, Const(o)) if o == 1.0 => other,
        (a, b) => Div(Box::new(a), Box::new(b)),
    }
}

fn pow(a: Node, b: Node) -> Node {
    match (a, b) {
        (Const(x), Const(y)) => Const(x.powf(y)),
        (_, Const(z)) if z == 0.0 => Const(1.0),
        (other, Const(o)) if o == 1.0 => other,
        (a, b) => Pow(Box::new(a), Box::new(b)),
    }
}

fn call(f: Func, a: Node) -> Node {
    match a {
        Const(v) => Const(f.apply(v)),
        other => Call(f, Box::new(other)),
    }
}

impl Node {
    fn depends_on(&self, var: usize) -> bool {
        match self {
            Const(_) => false,
            Var(v) => *v == var,
            Neg(a) | Call(_, a) => a.depends_on(var),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Pow(a, b) => a.depends_on(var) || b.depends_on(var),
        }
    }

    fn derivative(&self, var: usize) -> Node {
        if !self.depends_on(var) {
            return c(0.0);
        }
        match self {
            Const(_) => c(0.0),
            Var(v) => c(if *v == var { 1.0 } else { 0.0 }),
            Neg(a) => neg(a.derivative(var)),
            Add(a, b) => add(a.derivative(var), b.derivative(var)),
            Sub(a, b) => sub(a.derivative(var), b.derivative(var)),
            Mul(a, b) => add(
                mul(a.derivative(var), (**b).clone()),
                mul((**a).clone(), b.derivative(var)),
            ),
            Div(a, b) => div(
                sub(
                    mul(a.derivative(var), (**b).clone()),
                    mul((**a).clone(), b.derivative(var)),
                ),
                pow((**b).clone(), c(2.0)),
            ),
            Pow(a, b) => {
                if let Const(k) = **b {
                    mul(mul(c(k), pow((**a).clone(), c(k - 1.0))), a.derivative(var))
                } else {
                    // d(a^b) = a^b (b' ln a + b a'/a)
                    mul(
                        self.clone(),
                        add(
                            mul(b.derivative(var), call(Func::Log, (**a).clone())),
                            div(mul((**b).clone(), a.derivative(var)), (**a).clone()),
                        ),
                    )
                }
            }
            Call(f, a) => {
                let inner = (**a).clone();
                let outer = match f {
                    Func::Sin => call(Func::Cos, inner),
                    Func::Cos => neg(call(Func::Sin, inner)),
                    Func::Tan => div(c(1.0), pow(call(Func::Cos, inner), c(2.0))),
                    Func::Exp => call(Func::Exp, inner),
                    Func::Log => div(c(1.0), inner),
                    Func::Sqrt => div(c(0.5), call(Func::Sqrt, inner)),
                    Func::Sinh => call(Func::Cosh, inner),
                    Func::Cosh => call(Func::Sinh, inner),
                    Func::Tanh => sub(c(1.0), pow(call(Func::Tanh, inner), c(2.0))),
                };
                mul(outer, a.derivative(var))
            }
        }
    }

    fn eval(&self, vars: &[f64]) -> f64 {
        match self {
            Const(v) => *v,
            Var(i) => vars[*i],
            Neg(a) => -a.eval(vars),
            Add(a, b) => a.eval(vars) + b.eval(vars),
            Sub(a, b) => a.eval(vars) - b.eval(vars),
            Mul(a, b) => a.eval(vars) * b.eval(vars),
            Div(a, b) => a.eval(vars) / b.eval(vars),
            Pow(a, b) => power(a.eval(vars), b.eval(vars)),
            Call(f, a) => f.apply(a.eval(vars)),
        }
    }

    fn write(&self, names: &[String], out: &mut String) {
        match self {
            Const(v) => {
                if *v < 0.0 {
                    out.push_str(&format!("({v})"))
                } else {
                    out.push_str(&format!("{v}"))
                }
            }
            Var(i) => out.push_str(&names[*i]),
            Neg(a) => {
                out.push_str("(-");
                a.write(names, out);
                out.push(')');
            }
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Pow(a, b) => {
                let op = match self {
                    Add(..) => " + ",
                    Sub(..) => " - ",
                    Mul(..) => "*",
                    Div(..) => "/",
                    _ => "^",
                };
                out.push('(');
                a.write(names, out);
                out.push_str(op);
                b.write(names, out);
                out.push(')');
            }
            Call(f, a) => {
                out.push_str(f.name());
                out.push('(');
                a.write(names, out);
                out.push(')');
            }
        }
    }
}

fn power(base: f64, exponent: f64) -> f64 {
    if exponent.fract() == 0.0 && exponent.abs() <= i32::MAX as f64 {
        base.powi(exponent as i32)
    } else {
        base.powf(exponent)
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Token>, String> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value = text.parse::<f64>().map_err(|_| format!("bad number `{text}`"))?;
            out.push(Token::Num(value));
        } else if ch.is_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if ch == '*' && chars.get(i + 1) == Some(&'*') {
            out.push(Token::Op('^'));
            i += 2;
        } else if "+-*/^".contains(ch) {
            out.push(Token::Op(ch));
            i += 1;
        } else if ch == '(' {
            out.push(Token::LParen);
            i += 1;
        } else if ch == ')' {
            out.push(Token::RParen);
            i += 1;
        } else {
            return Err(format!("unexpected character `{ch}`"));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a [&'a str],
    aliases: &'a [(&'a str, usize)],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Node, String> {
        let mut lhs = self.term()?;
        while let Some(Token::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' { add(lhs, rhs) } else { sub(lhs, rhs) };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, String> {
        let mut lhs = self.unary()?;
        while let Some(Token::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' { mul(lhs, rhs) } else { div(lhs, rhs) };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, String> {
        match self.peek() {
            Some(Token::Op('-')) => {
                self.pos += 1;
                Ok(neg(self.unary()?))
            }
            Some(Token::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node, String> {
        let base = self.atom()?;
        if let Some(Token::Op('^')) = self.peek() {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(pow(base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, String> {
        match self.next() {
            Some(Token::Num(v)) => Ok(c(v)),
            Some(Token::LParen) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Token::RParen) => Ok(inner),
                    _ => Err("missing `)`".into()),
                }
            }
            Some(Token::Ident(name)) => {
                if let Some(f) = Func::from_name(&name) {
                    if self.next() != Some(Token::LParen) {
                        return Err(format!("`{name}` must be followed by `(`"));
                    }
                    let arg = self.expr()?;
                    if self.next() != Some(Token::RParen) {
                        return Err("missing `)`".into());
                    }
                    return Ok(call(f, arg));
                }
                if name == "pi" {
                    return Ok(c(std::f64::consts::PI));
                }
                let alias = || self.aliases.iter().find(|(a, _)| *a == name).map(|(_, i)| *i);
                match self.vars.iter().position(|v| *v == name).or_else(alias) {
                    Some(i) => Ok(Var(i)),
                    None => Err(format!("unknown variable `{name}` (known: {})", self.vars.join(", "))),
                }
            }
            Some(tok) => Err(format!("unexpected token {tok:?}")),
            None => Err("unexpected end of input".into()),
        }
    }
}

// ---------------------------------------------------------------------------
// Compiled programs
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Const(f64),
    Var(u32),
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    PowI(i32),
    Call(Func),
}

const STACK: usize = 48;

/// Postfix program for one expression.
#[derive(Debug, Clone, PartialEq)]
struct Program {
    ops: Vec<Op>,
    depth: usize,
}

impl Program {
    fn compile(node: &Node) -> Program {
        fn emit(node: &Node, ops: &mut Vec<Op>, depth: usize, max: &mut usize) {
            *max = (*max).max(depth + 1);
            match node {
                Const(v) => ops.push(Op::Const(*v)),
                Var(i) => ops.push(Op::Var(*i as u32)),
                Neg(a) => {
                    emit(a, ops, depth, max);
                    ops.push(Op::Neg);
                }
                Call(f, a) => {
                    emit(a, ops, depth, max);
                    ops.push(Op::Call(*f));
                }
                Pow(a, b) if matches!(**b, Const(k) if k.fract() == 0.0 && k.abs() < 64.0) => {
                    emit(a, ops, depth, max);
                    let Const(k) = **b else { unreachable!() };
                    ops.push(Op::PowI(k as i32));
                }
                Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Pow(a, b) => {
                    emit(a, ops, depth, max);
                    emit(b, ops, depth + 1, max);
                    ops.push(match node {
                        Add(..) => Op::Add,
                        Sub(..) => Op::Sub,
                        Mul(..) => Op::Mul,
                        Div(..) => Op::Div,
                        _ => Op::Pow,
                    });
                }
            }
        }
        let mut ops = Vec::new();
        let mut depth = 0;
        emit(node, &mut ops, 0, &mut depth);
        Program { ops, depth }
    }

    #[inline]
    pub fn eval(&self, vars: &[f64]) -> f64 {
        if self.depth <= STACK {
            self.run(vars, &mut [0.0f64; STACK])
        } else {
            self.run(vars, &mut vec![0.0; self.depth])
        }
    }

    #[inline]
    fn run(&self, vars: &[f64], stack: &mut [f64]) -> f64 {
        let mut top = 0usize;
        for op in &self.ops {
            match *op {
                Op::Const(v) => {
                    stack[top] = v;
                    top += 1;
                }
                Op::Var(i) => {
                    stack[top] = vars[i as usize];
                    top += 1;
                }
                Op::Neg => stack[top - 1] = -stack[top - 1],
                Op::PowI(k) => stack[top - 1] = stack[top - 1].powi(k),
                Op::Call(f) => stack[top - 1] = f.apply(stack[top - 1]),
                Op::Add | Op::Sub | Op::Mul | Op::Div | Op::Pow => {
                    top -= 1;
                    let b = stack[top];
                    let a = &mut stack[top - 1];
                    *a = match *op {
                        Op::Add => *a + b,
                        Op::Sub => *a - b,
                        Op::Mul => *a * b,
                        Op::Div => *a / b,
                        _ => power(*a, b),
                    };
                }
            }
        }
        stack[0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Slot {
    Const(u64),
    Var(u32),
    Neg(u32),
    Add(u32, u32),
    Sub(u32, u32),
    Mul(u32, u32),
    Div(u32, u32),
    Pow(u32, u32),
    PowI(u32, i32),
    Call(Func, u32),
}

/// Several expressions over the same variables, evaluated together with
/// shared subexpressions computed once.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprBundle {
    slots: Vec<Slot>,
    outputs: Vec<u32>,
}

impl ExprBundle {
    pub fn new(exprs: &[&Expr]) -> ExprBundle {
        fn intern(node: &Node, slots: &mut Vec<Slot>, seen: &mut HashMap<Slot, u32>) -> u32 {
            let slot = match node {
                Const(v) => Slot::Const(v.to_bits()),
                Var(i) => Slot::Var(*i as u32),
                Neg(a) => Slot::Neg(intern(a, slots, seen)),
                Call(f, a) => Slot::Call(*f, intern(a, slots, seen)),
                Pow(a, b) if matches!(**b, Const(k) if k.fract() == 0.0 && k.abs() < 64.0) => {
                    let Const(k) = **b else { unreachable!() };
                    Slot::PowI(intern(a, slots, seen), k as i32)
                }
                Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Pow(a, b) => {
                    let (x, y) = (intern(a, slots, seen), intern(b, slots, seen));
                    match node {
                        Add(..) => Slot::Add(x, y),
                        Sub(..) => Slot::Sub(x, y),
                        Mul(..) => Slot::Mul(x, y),
                        Div(..) => Slot::Div(x, y),
                        _ => Slot::Pow(x, y),
                    }
                }
            };
            *seen.entry(slot).or_insert_with(|| {
                slots.push(slot);
                (slots.len() - 1) as u32
            })
        }
        let mut slots = Vec::new();
        let mut seen = HashMap::new();
        let outputs = exprs.iter().map(|e| intern(&e.node, &mut slots, &mut seen)).collect();
        ExprBundle { slots, outputs }
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    /// Number of distinct subexpressions.
    pub fn size(&self) -> usize {
        self.slots.len()
    }

    /// Writes the value of expression `k` to `out[k]`. `scratch` is resized
    /// as needed and may be reused between calls.
    pub fn eval(&self, vars: &[f64], scratch: &mut Vec<f64>, out: &mut [f64]) {
        scratch.resize(self.slots.len(), 0.0);
        for i in 0..self.slots.len() {
            let r = |j: u32| scratch[j as usize];
            let v = match self.slots[i] {
                Slot::Const(bits) => f64::from_bits(bits),
                Slot::Var(j) => vars[j as usize],
                Slot::Neg(a) => -r(a),
                Slot::Add(a, b) => r(a) + r(b),
                Slot::Sub(a, b) => r(a) - r(b),
                Slot::Mul(a, b) => r(a) * r(b),
                Slot::Div(a, b) => r(a) / r(b),
                Slot::Pow(a, b) => power(r(a), r(b)),
                Slot::PowI(a, k) => r(a).powi(k),
                Slot::Call(f, a) => f.apply(r(a)),
            };
            scratch[i] = v;
        }
        for (o, k) in out.iter_mut().zip(&self.outputs) {
            *o = scratch[*k as usize];
        }
    }
}

/// A parsed expression over a fixed list of variable names.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    source: String,
    names: Vec<String>,
    node: Node,
    program: Program,
}

impl Expr {
    pub fn parse(source: &str, vars: &[&str]) -> Result<Expr, HamError> {
        Expr::parse_with_aliases(source, vars, &[])
    }

    /// Like [`Expr::parse`], with extra names mapped to variable indices.
    pub fn parse_with_aliases(source: &str, vars: &[&str], aliases: &[(&str, usize)]) -> Result<Expr, HamError> {
        let err = |message: String| HamError::Parse { input: source.to_string(), message };
        let tokens = tokenize(source).map_err(err)?;
        let mut parser = Parser { tokens, pos: 0, vars, aliases };
        let node = parser.expr().map_err(err)?;
        if parser.pos != parser.tokens.len() {
            return Err(err(format!("trailing input at token {}", parser.pos + 1)));
        }
        Ok(Expr::from_node(source.to_string(), vars.iter().map(|v| v.to_string()).collect(), node))
    }

    fn from_node(source: String, names: Vec<String>, node: Node) -> Expr {
        let program = Program::compile(&node);
        Expr { source, names, node, program }
    }

    pub fn constant(value: f64, vars: &[&str]) -> Expr {
        Expr::from_node(format!("{value}"), vars.iter().map(|v| v.to_string()).collect(), c(value))
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.node, Const(_))
    }

    /// `true` unless the expression mentions variable `index`.
    pub fn independent_of(&self, index: usize) -> bool {
        !self.node.depends_on(index)
    }

    /// Symbolic partial derivative with respect to variable `index`.
    pub fn derivative(&self, index: usize) -> Expr {
        let node = self.node.derivative(index);
        let mut text = String::new();
        node.write(&self.names, &mut text);
        Expr::from_node(text, self.names.clone(), node)
    }

    /// Compiled evaluation; `vars` follows the declared variable order.
    #[inline]
    pub fn eval(&self, vars: &[f64]) -> f64 {
        self.program.eval(vars)
    }

    /// Tree-walking evaluation, used to cross-check the compiler.
    pub fn eval_tree(&self, vars: &[f64]) -> f64 {
        self.node.eval(vars)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(src: &str) -> Expr {
        Expr::parse(src, &["t", "x", "y"]).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        let v = [0.5, 2.0, 3.0];
        assert_eq!(e("1 + 2*3").eval(&v), 7.0);
        assert_eq!(e("-x^2").eval(&v), -4.0);
        assert_eq!(e("2^3^2").eval(&v), 512.0);
        assert_eq!(e("x**2 / y").eval(&v), 4.0 / 3.0);
        assert_eq!(e("(x - y) - 1").eval(&v), -2.0);
        assert_eq!(e("2^-1").eval(&v), 0.5);
        assert_eq!(e("1.5e1 + .5").eval(&v), 15.5);
        assert!((e("sin(pi/2)*cos(0)").eval(&v) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn parse_errors() {
        for bad in ["x +", "sin x", "(x", "z", "x $ y", "x y"] {
            assert!(matches!(Expr::parse(bad, &["t", "x", "y"]), Err(HamError::Parse { .. })), "{bad}");
        }
    }

    #[test]
    fn derivatives_match_central_differences() {
        let exprs = [
            "sin(x)*t + y^2/2",
            "exp(-x^2)*cos(3*y) - tanh(t*x)",
            "sqrt(1 + x^2 + y^2) + log(2 + sin(x*y))",
            "x^y + (x - y)/(1 + t^2) + cosh(y)*sinh(x) + tan(x/4)",
        ];
        let at = [0.3, 0.7, -0.4];
        for src in exprs {
            let f = e(src);
            for var in 0..3 {
                let d = f.derivative(var);
                let h = 1e-6;
                let mut lo = at;
                let mut hi = at;
                lo[var] -= h;
                hi[var] += h;
                let fd = (f.eval(&hi) - f.eval(&lo)) / (2.0 * h);
                assert!((d.eval(&at) - fd).abs() < 1e-7, "{src} d/d{var}: {} vs {fd}", d.eval(&at));
                assert!((d.eval(&at) - d.eval_tree(&at)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn derivative_simplifies_constants() {
        let f = e("3*x + 2");
        assert!(f.derivative(1).is_constant());
        assert_eq!(f.derivative(1).eval(&[0.0; 3]), 3.0);
        assert!(f.derivative(2).is_constant());
        assert!(f.independent_of(0));
    }

    #[test]
    fn deep_expressions_use_a_heap_stack() {
        let src = (0..80).map(|_| "(1 + ").collect::<String>() + "x" + &")".repeat(80);
        let f = e(&src);
        assert_eq!(f.eval(&[0.0, 1.0, 0.0]), 81.0);
        let right_heavy = (0..80).map(|i| format!("{i}*")).collect::<String>() + "(x";
        assert!(Expr::parse(&right_heavy, &["t", "x", "y"]).is_err());
    }

    #[test]
    fn bundles_share_subexpressions() {
        let f = e("sin(x)*tanh(y) + t");
        let (fx, fy) = (f.derivative(1), f.derivative(2));
        let bundle = ExprBundle::new(&[&f, &fx, &fy]);
        assert!(bundle.size() < 3 * 8);
        let vars = [0.3, 1.2, -0.4];
        let mut scratch = Vec::new();
        let mut out = [0.0; 3];
        bundle.eval(&vars, &mut scratch, &mut out);
        assert_eq!(out, [f.eval(&vars), fx.eval(&vars), fy.eval(&vars)]);
    }
}
