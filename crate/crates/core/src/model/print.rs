use std::fmt::{self, Write};

use super::{Expr, System};

pub(super) fn write_system(s: &System, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    writeln!(f, "system {{")?;
    writeln!(f, "  interactions {};", s.interactions().join(" "))?;
    for c in s.components() {
        writeln!(f, "  component {} {{", c.name)?;
        writeln!(f, "    locations {};", c.locations.join(" "))?;
        if !c.variables.is_empty() {
            writeln!(f, "    vars {};", c.variables.join(" "))?;
        }
        write!(f, "    init {}", c.locations[c.initial_location])?;
        for (i, v) in c.variables.iter().enumerate() {
            write!(f, " {v}={}", c.initial_valuation >> i & 1)?;
        }
        writeln!(f, ";")?;
        for t in &c.transitions {
            let mut line = format!(
                "    on {} from {} to {}",
                s.interaction_name(t.label),
                c.locations[t.source],
                c.locations[t.destination]
            );
            if t.guard != Expr::Const(true) {
                write!(line, " when {}", t.guard.display(&c.variables))?;
            }
            let sets: Vec<String> = (0..c.variables.len())
                .filter(|&v| !t.is_identity_update(v))
                .map(|v| format!("{}:={}", c.variables[v], t.update[v].display(&c.variables)))
                .collect();
            if !sets.is_empty() {
                write!(line, " set {}", sets.join(" "))?;
            }
            writeln!(f, "{line};")?;
        }
        writeln!(f, "  }}")?;
    }
    for (lo, hi) in s.priorities().iter() {
        writeln!(
            f,
            "  priority {} < {};",
            s.interaction_name(lo),
            s.interaction_name(hi)
        )?;
    }
    for r in s.risk_states() {
        let parts: Vec<String> = r
            .constraints
            .iter()
            .enumerate()
            .filter_map(|(ci, k)| {
                let k = k.as_ref()?;
                let c = s.component(ci);
                let mut p = format!("{}@{}", c.name, c.locations[k.location]);
                for &(v, b) in &k.valuation {
                    let _ = write!(p, " {}={}", c.variables[v], b as u8);
                }
                Some(p)
            })
            .collect();
        writeln!(f, "  risk {{ {} }}", parts.join(" & "))?;
    }
    writeln!(f, "}}")
}
