//! Pass/fail check lists shared by the verifiers.

use crate::frame::ClassReport;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub id: String,
    pub pass: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub title: String,
    pub notes: Vec<String>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Report {
        Report { title: title.into(), ..Report::default() }
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    /// Starts an aggregated check; failures are counted and the first witness kept.
    pub fn tally(&mut self, id: impl Into<String>) -> Tally<'_> {
        Tally { report: self, id: id.into(), failures: 0, first: None }
    }

    pub fn push(&mut self, id: impl Into<String>, pass: bool, witness: Option<String>) {
        self.checks.push(Check { id: id.into(), pass, witness });
    }

    pub fn absorb(&mut self, class: &ClassReport) {
        for r in &class.records {
            self.push(format!("{}:{}", class.class, r.id), r.pass, r.witness.clone());
        }
    }

    pub fn render(&self) -> String {
        let mut out = format!("== {} ==\n", self.title);
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        for c in &self.checks {
            out.push_str(&format!("[{}] {}", if c.pass { "PASS" } else { "FAIL" }, c.id));
            if let Some(w) = &c.witness {
                out.push_str(&format!(" -- {w}"));
            }
            out.push('\n');
        }
        out
    }
}

pub struct Tally<'a> {
    report: &'a mut Report,
    id: String,
    failures: usize,
    first: Option<String>,
}

impl Tally<'_> {
    pub fn expect(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(witness());
            }
        }
    }

    pub fn finish(self) {
        let witness = self.first.map(|w| {
            if self.failures > 1 {
                format!("{} failures, first: {w}", self.failures)
            } else {
                w
            }
        });
        self.report.push(self.id, self.failures == 0, witness);
    }
}
