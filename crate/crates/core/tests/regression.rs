//! Bit-for-bit regression of the named reference states against the table
//! stored in tests/data/named_states.txt.
//!
//! Regenerate the table with
//! `REGENERATE_NAMED_TABLE=1 cargo test -p evenodd --test regression`
//! and review the diff before committing it.

use evenodd::oracle::{self, NamedState};

fn render(label: &str, spec: &NamedState) -> String {
    let state = oracle::make_named(spec).expect("constructible");
    let amps = state.amplitudes().expect("pure");
    let mut out = format!("{label} n={}\n", state.n());
    for (idx, z) in amps.iter().enumerate() {
        out.push_str(&format!("{idx:04b} {:+.16e} {:+.16e}\n", z.re, z.im));
    }
    out
}

fn full_table() -> String {
    let entries: Vec<(&str, NamedState)> = vec![
        ("bell-psi-plus", NamedState::Bell),
        ("ghz-3", NamedState::Ghz { n: 3 }),
        ("ghz-4", NamedState::Ghz { n: 4 }),
        ("w-3", NamedState::W { n: 3 }),
        ("w-4", NamedState::W { n: 4 }),
    ];
    let mut table = String::new();
    for (label, spec) in &entries {
        table.push_str(&render(label, spec));
        table.push('\n');
    }
    table
}

#[test]
fn named_state_table_matches_stored_bytes() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/named_states.txt");
    let table = full_table();
    if std::env::var_os("REGENERATE_NAMED_TABLE").is_some() {
        std::fs::write(path, &table).expect("table written");
        return;
    }
    let stored = std::fs::read_to_string(path).expect("stored regression table");
    assert_eq!(table, stored, "named-state amplitudes drifted from the stored table");
}
