//! Canonical pretty-printer: sorted declarations, two-space indentation,
//! links hoisted to the top level with qualified ids. `parse(render(p))`
//! is structurally equal to `p`, and rendering is a fixed point: a second
//! parse/render cycle reproduces the text byte for byte.

use std::fmt::Write as _;

use crate::diag::Diagnostic;
use crate::error::AnalysisError;
use crate::model::{validate_platform, Component, Platform, Role};
use crate::txn::Transaction;

pub fn render(p: &Platform) -> Result<String, AnalysisError> {
    let errors: Vec<Diagnostic> = validate_platform(p)
        .into_iter()
        .filter(Diagnostic::is_error)
        .collect();
    if !errors.is_empty() {
        return Err(AnalysisError::NotValidated(errors));
    }

    let p = p.canonical();
    let mut out = String::new();
    let _ = writeln!(out, "platform {} {{", p.name);
    for c in &p.components {
        component(&mut out, c, 1);
    }
    for l in &p.links {
        let _ = writeln!(out, "  link {} -> {};", l.from, l.to);
    }
    for sc in &p.symmetries {
        let members: Vec<&str> = sc.members.iter().map(|m| m.as_str()).collect();
        let _ = writeln!(out, "  symmetry {} {{ {} }}", sc.name, members.join(", "));
    }
    for app in &p.applications {
        let _ = writeln!(out, "  application {} {{", app.name);
        for t in &app.transactions {
            transaction(&mut out, t, 2);
        }
        let _ = writeln!(out, "  }}");
    }
    let _ = writeln!(out, "}}");
    Ok(out)
}

fn component(out: &mut String, c: &Component, depth: usize) {
    let pad = "  ".repeat(depth);
    if c.role == Role::Composite {
        let _ = writeln!(out, "{pad}composite {} {{", c.name);
        for child in &c.children {
            component(out, child, depth + 1);
        }
        let _ = writeln!(out, "{pad}}}");
        return;
    }

    let mut attrs: Vec<String> = Vec::new();
    if !c.services.is_empty() {
        let names: Vec<&str> = c.services.iter().map(|s| s.as_str()).collect();
        attrs.push(format!("service {};", names.join(", ")));
    }
    if let Some(cap) = c.capacity {
        attrs.push(format!("capacity {cap} Bps;"));
    }
    if let Some(cls) = &c.classification {
        let mut line = format!(
            "class {} {}",
            cls.origin.keyword(),
            cls.complexity.keyword()
        );
        if !cls.notes.is_empty() {
            let _ = write!(line, " \"{}\"", escape(&cls.notes));
        }
        line.push(';');
        attrs.push(line);
    }

    if attrs.is_empty() {
        let _ = writeln!(out, "{pad}{} {};", c.role.as_str(), c.name);
    } else {
        let _ = writeln!(out, "{pad}{} {} {{", c.role.as_str(), c.name);
        for a in attrs {
            let _ = writeln!(out, "{pad}  {a}");
        }
        let _ = writeln!(out, "{pad}}}");
    }
}

fn transaction(out: &mut String, t: &Transaction, depth: usize) {
    let pad = "  ".repeat(depth);
    let hops: Vec<&str> = t.path.iter().map(|c| c.as_str()).collect();
    let mut line = format!(
        "{pad}transaction {}: {} uses {}",
        t.name,
        hops.join(" -> "),
        t.service
    );
    if t.rate > 0 {
        let _ = write!(line, " rate {}/s", t.rate);
    }
    if t.payload > 0 {
        let _ = write!(line, " size {}B", t.payload);
    }
    line.push(';');
    let _ = writeln!(out, "{line}");
}

fn escape(s: &str) -> String {
    s.chars()
        .flat_map(|c| match c {
            '"' => vec!['\\', '"'],
            '\\' => vec!['\\', '\\'],
            '\n' => vec!['\\', 'n'],
            '\t' => vec!['\\', 't'],
            c => vec![c],
        })
        .collect()
}
