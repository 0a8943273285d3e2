//! Report assembly. Every rendering starts with the same header (command,
//! certified claim anchor, seed, guard) so reruns with identical inputs are
//! byte-identical; nothing time- or path-dependent is ever emitted.

use clap::ValueEnum;
use serde_json::{json, Value};
use xilab_core::SizeGuard;

use crate::CmdFail;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
    Dot,
}

/// One command's result in every format it supports. `pass` drives the exit
/// code; the claim anchor names the statement the report certifies (the
/// anchor table lives in docs/claims.md).
pub struct Report {
    pub command: String,
    pub claim: &'static str,
    pub pass: bool,
    pub text: String,
    pub json: Value,
    pub csv: Option<String>,
    pub dot: Option<String>,
}

impl Report {
    pub fn new(command: impl Into<String>, claim: &'static str) -> Report {
        Report {
            command: command.into(),
            claim,
            pass: true,
            text: String::new(),
            json: Value::Null,
            csv: None,
            dot: None,
        }
    }

    pub fn line(&mut self, line: impl AsRef<str>) {
        self.text.push_str(line.as_ref());
        self.text.push('\n');
    }

    pub fn render(&self, format: Format, seed: u64, guard: &SizeGuard) -> Result<String, CmdFail> {
        match format {
            Format::Text => {
                let mut out = self.header(seed, guard);
                out.push_str(&self.text);
                out.push_str(if self.pass {
                    "result: pass\n"
                } else {
                    "result: fail\n"
                });
                Ok(out)
            }
            Format::Json => {
                let value = json!({
                    "command": self.command,
                    "claim": self.claim,
                    "seed": seed,
                    "guard": {
                        "max_morphisms": guard.max_morphisms,
                        "max_total_elements": guard.max_total_elements,
                    },
                    "pass": self.pass,
                    "report": self.json,
                });
                let mut out = serde_json::to_string_pretty(&value)
                    .map_err(|e| CmdFail::Internal(format!("report serialization: {e}")))?;
                out.push('\n');
                Ok(out)
            }
            Format::Csv => {
                let body = self.csv.as_ref().ok_or_else(|| {
                    CmdFail::Usage(format!(
                        "{} has no tabular form; use text or json",
                        self.command
                    ))
                })?;
                let mut out = format!(
                    "# command={} claim={} seed={} pass={}\n",
                    self.command, self.claim, seed, self.pass
                );
                out.push_str(body);
                Ok(out)
            }
            Format::Dot => self.dot.clone().ok_or_else(|| {
                CmdFail::Usage(format!(
                    "{} has no graph form; use text or json",
                    self.command
                ))
            }),
        }
    }

    fn header(&self, seed: u64, guard: &SizeGuard) -> String {
        format!(
            "# xilab {}\n# claim: {}\n# seed: {}\n# guard: morphisms<={} elements<={}\n",
            self.command, self.claim, seed, guard.max_morphisms, guard.max_total_elements
        )
    }
}
