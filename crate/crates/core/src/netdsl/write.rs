use std::fmt::Write;

use super::{AnalysisKind, NetworkDocument, QNET_VERSION};
use crate::matrix::ComplexMatrix;
use crate::uncertainty::Family;

/// Canonical `qnet.json` bytes: two-space indentation, one matrix row per
/// line, names in sorted order and fields in the fixed order
/// `qnet_version, components, chains, uncertainties, analyses`; component
/// fields `modes, channels, S, C_minus, C_plus, Omega_minus, Omega_plus`;
/// uncertainty fields `target, kind, <binding>, parameters`; analysis fields
/// `kind, target, uncertainty, at | grid, margin`. Numbers use the shortest
/// representation that parses back to the same double.
pub fn serialize_document(doc: &NetworkDocument) -> Vec<u8> {
    let mut w = String::new();
    w.push_str("{\n");
    let _ = writeln!(w, "  \"qnet_version\": {QNET_VERSION},");

    w.push_str("  \"components\": {");
    for (i, (name, g)) in doc.components.iter().enumerate() {
        sep(&mut w, i);
        let _ = writeln!(w, "    {}: {{", string(name));
        let _ = writeln!(w, "      \"modes\": {},", g.n_modes);
        let _ = writeln!(w, "      \"channels\": {},", g.m_channels);
        let fields = [
            ("S", &g.scattering),
            ("C_minus", &g.coupling.c_minus),
            ("C_plus", &g.coupling.c_plus),
            ("Omega_minus", &g.hamiltonian.omega_minus),
            ("Omega_plus", &g.hamiltonian.omega_plus),
        ];
        matrices(&mut w, &fields, 6);
        w.push_str("    }");
    }
    close(&mut w, !doc.components.is_empty(), '}', 2);
    w.push_str(",\n");

    w.push_str("  \"chains\": {");
    for (i, (name, members)) in doc.chains.iter().enumerate() {
        sep(&mut w, i);
        let list: Vec<String> = members.iter().map(|m| string(m)).collect();
        let _ = write!(w, "    {}: [{}]", string(name), list.join(", "));
    }
    close(&mut w, !doc.chains.is_empty(), '}', 2);
    w.push_str(",\n");

    w.push_str("  \"uncertainties\": {");
    for (i, (name, decl)) in doc.uncertainties.iter().enumerate() {
        sep(&mut w, i);
        let _ = writeln!(w, "    {}: {{", string(name));
        let _ = writeln!(w, "      \"target\": {},", string(&decl.target));
        match decl.ubox.family() {
            Family::CavityGammaDelta { channel, mode } => {
                w.push_str("      \"kind\": \"cavity_gamma_delta\",\n");
                let _ = writeln!(w, "      \"channel\": {channel},");
                let _ = writeln!(w, "      \"mode\": {mode},");
            }
            Family::GenericAdditive { directions } => {
                w.push_str("      \"kind\": \"generic_additive\",\n");
                w.push_str("      \"directions\": [");
                for (j, d) in directions.iter().enumerate() {
                    sep(&mut w, j);
                    w.push_str("        {\n");
                    let fields = [
                        ("C_minus", &d.coupling.c_minus),
                        ("C_plus", &d.coupling.c_plus),
                        ("Omega_minus", &d.hamiltonian.omega_minus),
                        ("Omega_plus", &d.hamiltonian.omega_plus),
                    ];
                    matrices(&mut w, &fields, 10);
                    w.push_str("        }");
                }
                close(&mut w, !directions.is_empty(), ']', 6);
                w.push_str(",\n");
            }
        }
        w.push_str("      \"parameters\": [");
        let params = decl.ubox.parameters();
        for (j, p) in params.iter().enumerate() {
            sep(&mut w, j);
            let _ = write!(
                w,
                "        {{\"name\": {}, \"lower\": {}, \"upper\": {}}}",
                string(&p.name),
                number(p.lower),
                number(p.upper)
            );
        }
        close(&mut w, !params.is_empty(), ']', 6);
        w.push_str("\n    }");
    }
    close(&mut w, !doc.uncertainties.is_empty(), '}', 2);
    w.push_str(",\n");

    w.push_str("  \"analyses\": [");
    for (i, a) in doc.analyses.iter().enumerate() {
        sep(&mut w, i);
        let _ = write!(
            w,
            "    {{\"kind\": {}, \"target\": {}",
            string(a.kind.as_str()),
            string(&a.target)
        );
        if let Some(u) = &a.uncertainty {
            let _ = write!(w, ", \"uncertainty\": {}", string(u));
        }
        match a.kind {
            AnalysisKind::Decompose | AnalysisKind::Verify => {
                let at: Vec<String> =
                    a.at.iter()
                        .map(|(k, v)| format!("{}: {}", string(k), number(*v)))
                        .collect();
                let _ = write!(w, ", \"at\": {{{}}}", at.join(", "));
            }
            AnalysisKind::Sweep => {
                let _ = write!(w, ", \"grid\": {}, \"margin\": {}", a.grid, number(a.margin));
            }
            AnalysisKind::Validate | AnalysisKind::Statespace => {}
        }
        w.push('}');
    }
    close(&mut w, !doc.analyses.is_empty(), ']', 2);
    w.push_str("\n}\n");
    w.into_bytes()
}

fn sep(w: &mut String, i: usize) {
    w.push_str(if i == 0 { "\n" } else { ",\n" });
}

fn close(w: &mut String, nonempty: bool, bracket: char, indent: usize) {
    if nonempty {
        w.push('\n');
        w.push_str(&" ".repeat(indent));
    }
    w.push(bracket);
}

fn matrices(w: &mut String, fields: &[(&str, &ComplexMatrix)], indent: usize) {
    let pad = " ".repeat(indent);
    for (k, (name, m)) in fields.iter().enumerate() {
        let _ = write!(w, "{pad}{}: ", string(name));
        matrix(w, m, indent);
        w.push_str(if k + 1 == fields.len() { "\n" } else { ",\n" });
    }
}

fn matrix(w: &mut String, m: &ComplexMatrix, indent: usize) {
    if m.rows() == 0 {
        w.push_str("[]");
        return;
    }
    w.push('[');
    for i in 0..m.rows() {
        w.push_str(if i == 0 { "\n" } else { ",\n" });
        let entries: Vec<String> = m
            .row(i)
            .iter()
            .map(|z| format!("[{}, {}]", number(z.re), number(z.im)))
            .collect();
        let _ = write!(w, "{}  [{}]", " ".repeat(indent), entries.join(", "));
    }
    let _ = write!(w, "\n{}]", " ".repeat(indent));
}

/// `Debug` for `f64` is the shortest round-trip form; integral values drop
/// the trailing `.0`.
fn number(x: f64) -> String {
    let s = format!("{x:?}");
    match s.strip_suffix(".0") {
        Some(int) => int.to_string(),
        None => s,
    }
}

fn string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
