//! Random well-formed programs for property tests.
//!
//! Generated programs read every option in `main`, use helper functions
//! without recursion, and only contain loops guarded by a shift register of
//! booleans, so every run terminates within the declared bound.

use std::fmt::Write as _;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::lang::{parse, Program};

#[derive(Clone, Copy, Debug)]
pub struct GenConfig {
    pub max_options: usize,
    pub max_helpers: usize,
    pub max_depth: usize,
    pub max_block: usize,
    pub locals: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_options: 4, max_helpers: 2, max_depth: 3, max_block: 4, locals: 2 }
    }
}

struct Gen<'a> {
    rng: &'a mut StdRng,
    cfg: GenConfig,
    out: String,
    guards: usize,
    helpers: Vec<(String, usize)>,
}

impl Gen<'_> {
    fn indent(&mut self, depth: usize) {
        for _ in 0..depth + 1 {
            self.out.push_str("    ");
        }
    }

    fn expr(&mut self, vars: &[String], depth: usize) -> String {
        let roll = self.rng.random_range(0..10);
        if depth == 0 || roll < 5 {
            if vars.is_empty() || roll == 0 {
                return if self.rng.random_bool(0.5) { "true".into() } else { "false".into() };
            }
            return vars[self.rng.random_range(0..vars.len())].clone();
        }
        match roll {
            5 | 6 => format!("!{}", self.atom(vars, depth - 1)),
            7 | 8 => format!("{} && {}", self.atom(vars, depth - 1), self.atom(vars, depth - 1)),
            _ => format!("{} || {}", self.atom(vars, depth - 1), self.atom(vars, depth - 1)),
        }
    }

    fn atom(&mut self, vars: &[String], depth: usize) -> String {
        let e = self.expr(vars, depth);
        if e.contains(' ') {
            format!("({e})")
        } else {
            e
        }
    }

    fn work(&mut self) -> String {
        let whole = self.rng.random_range(0..60);
        match self.rng.random_range(0..4) {
            0 => format!("{whole}.5"),
            1 => format!("{whole}.25"),
            _ => format!("{}", whole + 1),
        }
    }

    fn block(&mut self, vars: &[String], locals: &[String], depth: usize) {
        let n = self.rng.random_range(1..=self.cfg.max_block);
        for _ in 0..n {
            self.stmt(vars, locals, depth);
        }
    }

    fn stmt(&mut self, vars: &[String], locals: &[String], depth: usize) {
        let nested = depth < self.cfg.max_depth;
        let roll = self.rng.random_range(0..10);
        match roll {
            0..=2 => {
                let w = self.work();
                self.indent(depth);
                let _ = writeln!(self.out, "work({w});");
            }
            3 | 4 if !locals.is_empty() => {
                let v = locals[self.rng.random_range(0..locals.len())].clone();
                let e = self.expr(vars, 2);
                self.indent(depth);
                let _ = writeln!(self.out, "{v} := {e};");
            }
            5 | 6 if nested => {
                let c = self.expr(vars, 2);
                self.indent(depth);
                let _ = writeln!(self.out, "if ({c}) {{");
                self.block(vars, locals, depth + 1);
                if self.rng.random_bool(0.5) {
                    self.indent(depth);
                    self.out.push_str("} else {\n");
                    self.block(vars, locals, depth + 1);
                }
                self.indent(depth);
                self.out.push_str("}\n");
            }
            7 if nested => {
                let id = self.guards;
                self.guards += 1;
                let len = self.rng.random_range(1..=3);
                let regs: Vec<String> = (0..len).map(|k| format!("g{id}_{k}")).collect();
                for r in &regs {
                    self.indent(depth);
                    let _ = writeln!(self.out, "{r} := true;");
                }
                let c = self.atom(vars, 1);
                let bound = len + self.rng.random_range(0..3);
                self.indent(depth);
                let _ = writeln!(self.out, "while ({} && {c}) bound {bound} {{", regs[len - 1]);
                self.block(vars, locals, depth + 1);
                for k in (1..len).rev() {
                    self.indent(depth + 1);
                    let _ = writeln!(self.out, "{} := {};", regs[k], regs[k - 1]);
                }
                self.indent(depth + 1);
                let _ = writeln!(self.out, "{} := false;", regs[0]);
                self.indent(depth);
                self.out.push_str("}\n");
            }
            8 if !self.helpers.is_empty() => {
                let (name, arity) = self.helpers[self.rng.random_range(0..self.helpers.len())].clone();
                let args: Vec<String> = (0..arity).map(|_| self.expr(vars, 1)).collect();
                self.indent(depth);
                let _ = writeln!(self.out, "call {name}({});", args.join(", "));
            }
            _ => {
                let w = self.work();
                self.indent(depth);
                let _ = writeln!(self.out, "work({w});");
            }
        }
    }

    fn function(&mut self, name: &str, params: Vec<String>, prelude: Vec<(String, String)>) {
        let _ = writeln!(self.out, "fn {name}({}) {{", params.join(", "));
        let mut vars = params;
        for (v, init) in &prelude {
            self.indent(0);
            let _ = writeln!(self.out, "{v} := {init};");
            vars.push(v.clone());
        }
        let locals: Vec<String> = (0..self.cfg.locals).map(|k| format!("x{k}")).collect();
        for l in &locals {
            self.indent(0);
            let _ = writeln!(self.out, "{l} := false;");
        }
        vars.extend(locals.iter().cloned());
        self.block(&vars, &locals, 0);
        self.out.push_str("}\n\n");
    }
}

/// Source text of a random program; the same seed yields the same text.
pub fn generate_source(seed: u64, cfg: GenConfig) -> String {
    let mut rng = StdRng::seed_from_u64(seed);
    let n_opts = rng.random_range(0..=cfg.max_options);
    let n_helpers = rng.random_range(0..=cfg.max_helpers);
    let names: Vec<String> = (0..n_opts).map(|i| ((b'A' + i as u8) as char).to_string()).collect();
    let mut g = Gen { rng: &mut rng, cfg, out: String::new(), guards: 0, helpers: Vec::new() };
    if !names.is_empty() {
        let _ = writeln!(g.out, "options {};\n", names.join(", "));
    }
    for h in 0..n_helpers {
        let arity = g.rng.random_range(0..=2);
        let params: Vec<String> = (0..arity).map(|k| format!("p{k}")).collect();
        let name = format!("f{h}");
        g.function(&name, params, Vec::new());
        g.helpers.push((name, arity));
    }
    let prelude = names.iter().map(|o| (format!("o{}", o.to_lowercase()), format!("opt(\"{o}\")"))).collect();
    g.function("main", Vec::new(), prelude);
    g.out
}

pub fn generate(seed: u64, cfg: GenConfig) -> Program {
    let src = generate_source(seed, cfg);
    parse(&src).unwrap_or_else(|e| panic!("generated program does not parse: {e}\n{src}"))
}
