//! Interactive session: variable bindings, scalar mode, the filter oracle,
//! and line evaluation.

use std::collections::HashMap;
use std::sync::Arc;

use continuum::rational::Mode;
use continuum::smooth::Expr;
use continuum::ultrapower::{FilterOracle, Hyper, Strategy};
use continuum::FermatReal;

use crate::errors::{CliError, CliResult};
use crate::parse::Parser;
use crate::plot::{emit_plot, PlotFormat};
use crate::render;

/// A user-defined smooth function with its original variable names.
#[derive(Debug, Clone)]
pub struct NamedFunc {
    pub expr: Arc<Expr>,
    pub var_names: Vec<String>,
}

/// What a name can be bound to.
#[derive(Debug, Clone)]
pub enum Binding {
    Value(FermatReal),
    Hyp(Hyper),
    Func(NamedFunc),
}

/// Evaluation result of one line.
pub enum Outcome {
    Bind(Binding),
    Bool(bool),
    Verdict(bool),
    FileWritten(String),
}

pub struct Session {
    pub mode: Mode,
    pub oracle: FilterOracle,
    pub format: PlotFormat,
    pub transcript: bool,
    bindings: HashMap<String, Binding>,
}

impl Session {
    pub fn new(mode: Mode, strategy: Strategy, format: PlotFormat, transcript: bool) -> Session {
        Session {
            mode,
            oracle: FilterOracle::new(strategy),
            format,
            transcript,
            bindings: HashMap::new(),
        }
    }

    pub fn lookup(&self, name: &str) -> Option<&Binding> {
        self.bindings.get(name)
    }

    fn bind(&mut self, name: &str, binding: Binding) {
        self.bindings.insert(name.to_string(), binding);
    }

    /// Evaluates one input line and returns the lines to print.
    pub fn eval_line(&mut self, line: &str) -> CliResult<Vec<String>> {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            return Ok(Vec::new());
        }
        // Audit dump of every dominance query answered so far.
        if trimmed == "oraclelog" {
            return Ok(self.oracle.log_lines().lines().map(String::from).collect());
        }
        // `plot(delta, x) > file`: split off the redirect target first; the
        // path is not part of the token grammar.
        if trimmed.starts_with("plot") {
            if let Some((call, path)) = split_redirect(trimmed) {
                let mut parser = Parser::new(call, self)?;
                let written = parser.run_plot(path.trim())?;
                parser.finish()?;
                return Ok(self.render_outcome(trimmed, "ans", Outcome::FileWritten(written)));
            }
        }
        let (name, rest) = match split_assignment(trimmed) {
            Some((name, rest)) => (name, rest),
            None => ("ans", trimmed),
        };
        let mut parser = Parser::new(rest, self)?;
        let outcome = parser.run_statement()?;
        parser.finish()?;
        if let Outcome::Bind(binding) = &outcome {
            self.bind(name, binding.clone());
        }
        Ok(self.render_outcome(trimmed, name, outcome))
    }

    fn render_outcome(&self, input: &str, name: &str, outcome: Outcome) -> Vec<String> {
        let payload = match outcome {
            Outcome::Bind(Binding::Value(x)) => render::fermat_string(&x),
            Outcome::Bind(Binding::Hyp(h)) => render::hyper_string(&h),
            Outcome::Bind(Binding::Func(f)) => format!(
                "Inline function: {name}({}) = {}",
                f.var_names.join(","),
                continuum::smooth::to_text_named(&f.expr, &f.var_names)
            ),
            Outcome::Bool(b) => b.to_string(),
            Outcome::Verdict(v) => if v { "dominant" } else { "rejected" }.to_string(),
            Outcome::FileWritten(path) => format!("wrote {path}"),
        };
        if self.transcript {
            vec![
                format!(">> {input}"),
                format!("{name} = "),
                payload,
                String::new(),
            ]
        } else {
            vec![payload]
        }
    }

    pub(crate) fn emit_plot_file(
        &self,
        x: &FermatReal,
        delta: &continuum::Rational,
        samples: usize,
        path: &str,
    ) -> CliResult<String> {
        emit_plot(x, delta, samples, self.format, path)?;
        Ok(path.to_string())
    }
}

/// Splits `name = rest`, rejecting `==` and other operators.
fn split_assignment(line: &str) -> Option<(&str, &str)> {
    let eq = line.find('=')?;
    if line.as_bytes().get(eq + 1) == Some(&b'=') || eq == 0 {
        return None;
    }
    // `<=`, `>=`, `~=` are comparisons, not assignments.
    match line.as_bytes()[eq - 1] {
        b'<' | b'>' | b'~' => return None,
        _ => {}
    }
    let name = line[..eq].trim();
    if !name.is_empty()
        && name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
        && name.chars().all(|c| c.is_ascii_alphanumeric())
    {
        Some((name, line[eq + 1..].trim()))
    } else {
        None
    }
}

/// Splits `call > path` at the first top-level `>` (outside parentheses and
/// quotes, not part of `>=`).
fn split_redirect(line: &str) -> Option<(&str, &str)> {
    let bytes = line.as_bytes();
    let mut depth = 0i32;
    let mut quoted = false;
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'\'' => quoted = !quoted,
            b'(' if !quoted => depth += 1,
            b')' if !quoted => depth -= 1,
            b'>' if !quoted && depth == 0 && bytes.get(i + 1) != Some(&b'=') => {
                return Some((&line[..i], &line[i + 1..]));
            }
            _ => {}
        }
        i += 1;
    }
    None
}

impl From<CliError> for Vec<String> {
    fn from(e: CliError) -> Vec<String> {
        vec![format!("error: {e}")]
    }
}
