//! Report rendering: a human-readable text mode and a line-delimited
//! structured mode with stable field names.

use clap::ValueEnum;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

/// Numbers in structured records carry 17 significant digits so they
/// round-trip losslessly through text.
pub fn sf(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Emitter {
    format: Format,
}

impl Emitter {
    pub fn new(format: Format) -> Self {
        Emitter { format }
    }

    /// Emit one record. Structured mode prints `record key=value ...`;
    /// text mode prints an aligned variant of the same fields.
    pub fn kv(&mut self, record: &str, fields: &[(&str, String)]) {
        match self.format {
            Format::Structured => {
                let mut line = String::from(record);
                for (k, v) in fields {
                    let needs_quote = v.contains(' ') || v.contains('"');
                    if needs_quote {
                        line.push_str(&format!(" {k}={v:?}"));
                    } else {
                        line.push_str(&format!(" {k}={v}"));
                    }
                }
                println!("{line}");
            }
            Format::Text => {
                let body =
                    fields.iter().map(|(k, v)| format!("{k} = {v}")).collect::<Vec<_>>().join(", ");
                println!("[{record}] {body}");
            }
        }
    }
}
