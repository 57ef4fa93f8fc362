//! Pretty-printer producing canonical `.ccl` source.

use std::fmt::Write;

use super::ast::{Expr, Stmt, StmtKind};
use super::program::Program;

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Or(..) => 1,
        Expr::And(..) => 2,
        Expr::Not(_) => 3,
        Expr::Var(_) | Expr::Lit(_) => 4,
    }
}

fn write_expr(out: &mut String, e: &Expr, min: u8) {
    let paren = prec(e) < min;
    if paren {
        out.push('(');
    }
    match e {
        Expr::Var(v) => out.push_str(v),
        Expr::Lit(b) => out.push_str(if *b { "true" } else { "false" }),
        Expr::Not(inner) => {
            out.push('!');
            write_expr(out, inner, 3);
        }
        Expr::And(a, b) | Expr::Or(a, b) => {
            let p = prec(e);
            write_expr(out, a, p);
            out.push_str(if p == 1 { " || " } else { " && " });
            // operators associate to the left
            write_expr(out, b, p + 1);
        }
    }
    if paren {
        out.push(')');
    }
}

pub fn expr_to_string(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, 0);
    s
}

fn write_block(out: &mut String, block: &[Stmt], indent: usize) {
    for s in block {
        write_stmt(out, s, indent);
    }
}

fn write_stmt(out: &mut String, s: &Stmt, indent: usize) {
    let pad = "    ".repeat(indent);
    match &s.kind {
        StmtKind::OptionRead { var, option } => {
            let _ = writeln!(out, "{pad}{var} := opt(\"{option}\");");
        }
        StmtKind::Assign { var, expr } => {
            let _ = writeln!(out, "{pad}{var} := {};", expr_to_string(expr));
        }
        StmtKind::If { cond, then_branch, else_branch } => {
            let _ = writeln!(out, "{pad}if ({}) {{", expr_to_string(cond));
            write_block(out, then_branch, indent + 1);
            if else_branch.is_empty() {
                let _ = writeln!(out, "{pad}}}");
            } else {
                let _ = writeln!(out, "{pad}}} else {{");
                write_block(out, else_branch, indent + 1);
                let _ = writeln!(out, "{pad}}}");
            }
        }
        StmtKind::While { cond, bound, body } => {
            let _ = writeln!(out, "{pad}while ({}) bound {bound} {{", expr_to_string(cond));
            write_block(out, body, indent + 1);
            let _ = writeln!(out, "{pad}}}");
        }
        StmtKind::Work { cost } => {
            let _ = writeln!(out, "{pad}work({cost});");
        }
        StmtKind::Call { callee, args } => {
            let args: Vec<String> = args.iter().map(expr_to_string).collect();
            let _ = writeln!(out, "{pad}call {callee}({});", args.join(", "));
        }
        StmtKind::Return => {
            let _ = writeln!(out, "{pad}return;");
        }
    }
}

/// Renders a program; parsing the result yields an equal program.
pub fn print(program: &Program) -> String {
    let mut out = String::new();
    let names: Vec<&str> = program.options().iter().collect();
    let _ = writeln!(out, "options {};", names.join(", "));
    for f in program.functions() {
        let _ = writeln!(out, "\nfn {}({}) {{", f.name, f.params.join(", "));
        write_block(&mut out, &f.body, 1);
        let _ = writeln!(out, "}}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    #[test]
    fn minimal_parentheses() {
        let e = Expr::and(Expr::or(Expr::var("a"), Expr::var("b")), Expr::negate(Expr::var("c")));
        assert_eq!(expr_to_string(&e), "(a || b) && !c");
        let e = Expr::and(Expr::var("a"), Expr::and(Expr::var("b"), Expr::var("c")));
        assert_eq!(expr_to_string(&e), "a && (b && c)");
        let e = Expr::negate(Expr::and(Expr::var("a"), Expr::Lit(true)));
        assert_eq!(expr_to_string(&e), "!(a && true)");
    }

    #[test]
    fn round_trip_keeps_structure() {
        let src = "options A, B;\nfn main() { a := opt(\"A\"); b := opt(\"B\");\n  if (a || !b && a) { work(0.25); } else if (b) { call f(a && b); }\n  while (a) bound 4 { a := false; } return; }\nfn f(p) { if (p) { work(3); } }";
        let p = parse(src).unwrap();
        let text = print(&p);
        let q = parse(&text).unwrap();
        assert_eq!(p, q);
        assert_eq!(print(&q), text);
    }
}
