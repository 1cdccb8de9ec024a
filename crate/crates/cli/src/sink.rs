//! Human and JSON-lines output.
//!
//! JSON-lines records carry a `record` field naming their kind:
//! `header`, `note`, `value`, `check`, `trace`, `criterion`, `summary`.

use std::io::Write;
use std::time::Instant;

use clap::ValueEnum;
use nlogic::report::Report;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// Writes one line to stdout; a closed pipe ends the process quietly.
fn line(args: std::fmt::Arguments<'_>) {
    let mut out = std::io::stdout().lock();
    if writeln!(out, "{args}").is_err() {
        std::process::exit(0);
    }
}

macro_rules! line {
    ($($t:tt)*) => {
        line(format_args!($($t)*))
    };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    JsonLines,
}

/// Content hash over labelled inputs.
pub fn digest(inputs: &[(String, String)]) -> String {
    let mut h = Sha256::new();
    for (label, text) in inputs {
        h.update(label.as_bytes());
        h.update([0]);
        h.update(text.as_bytes());
        h.update([0]);
    }
    let hex: String = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

pub struct Sink {
    format: Format,
    timing: bool,
    start: Instant,
    checks: usize,
    failures: usize,
}

impl Sink {
    pub fn new(format: Format, timing: bool) -> Sink {
        Sink { format, timing, start: Instant::now(), checks: 0, failures: 0 }
    }

    fn emit(&self, v: Value) {
        line(format_args!("{v}"));
    }

    pub fn header(&self, command: &str, inputs: &[(String, String)]) {
        let d = digest(inputs);
        let labels: Vec<&str> = inputs.iter().map(|(l, _)| l.as_str()).collect();
        match self.format {
            Format::Human => line!("# nlogic {command} [{}] {d}", labels.join(", ")),
            Format::JsonLines => self.emit(json!({"record": "header", "command": command, "inputs": labels, "digest": d})),
        }
    }

    pub fn note(&self, text: impl AsRef<str>) {
        match self.format {
            Format::Human => line!("note: {}", text.as_ref()),
            Format::JsonLines => self.emit(json!({"record": "note", "text": text.as_ref()})),
        }
    }

    /// A named result. Multi-line values print as an indented block.
    pub fn value(&self, key: &str, value: impl AsRef<str>) {
        let v = value.as_ref();
        match self.format {
            Format::Human if v.contains('\n') => {
                line!("{key}:");
                for line in v.lines() {
                    line!("  {line}");
                }
            }
            Format::Human => line!("{key}: {v}"),
            Format::JsonLines => self.emit(json!({"record": "value", "key": key, "value": v})),
        }
    }

    pub fn check(&mut self, report: &str, id: &str, pass: bool, witness: Option<&str>) {
        self.checks += 1;
        self.failures += !pass as usize;
        match self.format {
            Format::Human => {
                let tag = if pass { "PASS" } else { "FAIL" };
                match witness {
                    Some(w) => line!("[{tag}] {id} -- {w}"),
                    None => line!("[{tag}] {id}"),
                }
            }
            Format::JsonLines => {
                self.emit(json!({"record": "check", "report": report, "id": id, "pass": pass, "witness": witness}))
            }
        }
    }

    pub fn report(&mut self, rep: &Report) {
        if self.format == Format::Human {
            line!("== {} ==", rep.title);
        }
        for n in &rep.notes {
            self.note(n);
        }
        for c in &rep.checks {
            self.check(&rep.title, &c.id, c.pass, c.witness.as_deref());
        }
    }

    pub fn trace(&self, index: usize, rule: &str, position: &str, system: &str) {
        match self.format {
            Format::Human => line!("{index:>3}  {rule:<5} {position:<8} {system}"),
            Format::JsonLines => self.emit(
                json!({"record": "trace", "index": index, "rule": rule, "position": position, "system": system}),
            ),
        }
    }

    pub fn criterion(&mut self, r: &nlogic::acceptance::CriterionResult) {
        self.checks += 1;
        self.failures += !r.pass as usize;
        match self.format {
            Format::Human => {
                let tag = if r.pass { "PASS" } else { "FAIL" };
                let time = if self.timing { format!(" ({:.3}s)", r.seconds) } else { String::new() };
                line!("[{tag}] {:>2} {}{time}: {}", r.id, r.name, r.detail);
            }
            Format::JsonLines => {
                let mut v = json!({"record": "criterion", "id": r.id, "name": r.name, "pass": r.pass,
                    "detail": r.detail, "limit_seconds": r.limit_seconds});
                if self.timing {
                    v["seconds"] = json!(r.seconds);
                }
                self.emit(v)
            }
        }
    }

    /// Closing line; returns the exit code.
    pub fn finish(&self) -> u8 {
        let pass = self.failures == 0;
        let secs = self.start.elapsed().as_secs_f64();
        match self.format {
            Format::Human => {
                let verdict = if pass { "PASS" } else { "FAIL" };
                let time = if self.timing { format!(" in {secs:.3}s") } else { String::new() };
                line!("result: {verdict} ({} checks, {} failed){time}", self.checks, self.failures);
            }
            Format::JsonLines => {
                let mut v = json!({"record": "summary", "pass": pass, "checks": self.checks, "failures": self.failures});
                if self.timing {
                    v["seconds"] = json!(secs);
                }
                self.emit(v)
            }
        }
        if pass {
            0
        } else {
            1
        }
    }
}
