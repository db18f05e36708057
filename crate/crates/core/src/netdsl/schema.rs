use std::collections::{BTreeMap, BTreeSet};

use super::json::{self, Member, Node, Pos, Value};
use super::{Analysis, AnalysisKind, NetworkDocument, ParseDiagnostic, UncertaintyDecl, QNET_VERSION};
use crate::dup;
use crate::matrix::{c64, ComplexMatrix};
use crate::slh::{Coupling, DiagnosticKind, Hamiltonian, SlhModel};
use crate::uncertainty::{Direction, Family, Parameter, UncertaintyBox};

const COMPONENT_FIELDS: [&str; 7] = [
    "modes",
    "channels",
    "S",
    "C_minus",
    "C_plus",
    "Omega_minus",
    "Omega_plus",
];
const DIRECTION_FIELDS: [&str; 4] = ["C_minus", "C_plus", "Omega_minus", "Omega_plus"];
const MAX_SIZE: usize = 1 << 16;

/// Parses and validates a `qnet.json` document. Syntax errors stop at the
/// first one; every schema and model error is collected.
pub fn parse_document(text: &[u8], tol: f64) -> Result<NetworkDocument, Vec<ParseDiagnostic>> {
    if !(tol >= 0.0) {
        return Err(vec![ParseDiagnostic::error(
            Pos::START,
            "INVALID_VALUE",
            format!("tolerance must be nonnegative, got {tol}"),
        )]);
    }
    if text.starts_with(&[0xEF, 0xBB, 0xBF]) {
        return Err(vec![ParseDiagnostic::error(
            Pos::START,
            "ENCODING",
            "byte order mark is not allowed",
        )]);
    }
    let text = match std::str::from_utf8(text) {
        Ok(t) => t,
        Err(e) => {
            let valid = std::str::from_utf8(&text[..e.valid_up_to()]).unwrap_or_default();
            return Err(vec![ParseDiagnostic::error(
                end_pos(valid),
                "ENCODING",
                "input is not valid UTF-8",
            )]);
        }
    };
    let root = json::parse(text).map_err(|e| vec![ParseDiagnostic::error(e.pos, "SYNTAX", e.message)])?;
    let mut cx = Checker { tol, diags: Vec::new() };
    let doc = cx.document(&root);
    if cx.diags.is_empty() {
        Ok(doc)
    } else {
        cx.diags.sort_by_key(|d| d.pos());
        Err(cx.diags)
    }
}

fn end_pos(text: &str) -> Pos {
    let mut pos = Pos::START;
    for c in text.chars() {
        if c == '\n' {
            pos.line += 1;
            pos.column = 1;
        } else {
            pos.column += 1;
        }
    }
    pos
}

struct Checker {
    tol: f64,
    diags: Vec<ParseDiagnostic>,
}

type Fields<'n> = BTreeMap<&'n str, &'n Member>;

impl Checker {
    fn err(&mut self, pos: Pos, code: &'static str, message: impl Into<String>) {
        self.diags.push(ParseDiagnostic::error(pos, code, message));
    }

    fn object<'n>(&mut self, n: &'n Node, what: &str) -> Option<&'n [Member]> {
        match &n.value {
            Value::Object(m) => Some(m),
            v => {
                self.err(
                    n.pos,
                    "TYPE",
                    format!("{what} must be an object, found {}", v.type_name()),
                );
                None
            }
        }
    }

    fn array<'n>(&mut self, n: &'n Node, what: &str) -> Option<&'n [Node]> {
        match &n.value {
            Value::Array(a) => Some(a),
            v => {
                self.err(
                    n.pos,
                    "TYPE",
                    format!("{what} must be an array, found {}", v.type_name()),
                );
                None
            }
        }
    }

    /// Members of a map-like object, rejecting repeated keys.
    fn unique_members<'n>(&mut self, members: &'n [Member], what: &str) -> Vec<&'n Member> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for m in members {
            if seen.insert(m.key.as_str()) {
                out.push(m);
            } else {
                self.err(
                    m.key_pos,
                    "DUPLICATE_NAME",
                    format!("{what} `{}` declared twice", m.key),
                );
            }
        }
        out
    }

    fn fields<'n>(&mut self, n: &'n Node, what: &str, required: &[&str], optional: &[&str]) -> Option<Fields<'n>> {
        let members = self.object(n, what)?;
        let mut out = Fields::new();
        for m in self.unique_members(members, "field") {
            if required.contains(&m.key.as_str()) || optional.contains(&m.key.as_str()) {
                out.insert(m.key.as_str(), m);
            } else {
                self.err(
                    m.key_pos,
                    "UNKNOWN_FIELD",
                    format!("unknown field `{}` in {what}", m.key),
                );
            }
        }
        for r in required {
            if !out.contains_key(r) {
                self.err(n.pos, "MISSING_FIELD", format!("{what} is missing field `{r}`"));
            }
        }
        Some(out)
    }

    fn number(&mut self, n: &Node, what: &str) -> Option<f64> {
        match n.value {
            Value::Number(x) if x.is_finite() => Some(x),
            Value::Number(_) => {
                self.err(n.pos, "NON_FINITE", format!("{what} is out of floating-point range"));
                None
            }
            ref v => {
                self.err(
                    n.pos,
                    "TYPE",
                    format!("{what} must be a number, found {}", v.type_name()),
                );
                None
            }
        }
    }

    fn uint(&mut self, n: &Node, what: &str) -> Option<usize> {
        let x = self.number(n, what)?;
        if x.fract() != 0.0 || x < 0.0 || x > MAX_SIZE as f64 {
            self.err(
                n.pos,
                "INVALID_VALUE",
                format!("{what} must be an integer in 0..={MAX_SIZE}, got {x}"),
            );
            return None;
        }
        Some(x as usize)
    }

    fn string<'n>(&mut self, n: &'n Node, what: &str) -> Option<&'n str> {
        match &n.value {
            Value::String(s) => Some(s),
            v => {
                self.err(
                    n.pos,
                    "TYPE",
                    format!("{what} must be a string, found {}", v.type_name()),
                );
                None
            }
        }
    }

    /// `[[[re, im], ...], ...]`. An empty outer array stands for zero rows
    /// of the expected width.
    fn matrix(&mut self, n: &Node, what: &str, expected: Option<(usize, usize)>) -> Option<ComplexMatrix> {
        let rows = self.array(n, what)?;
        let mut data = Vec::new();
        let mut width = None;
        let mut ok = true;
        for row in rows {
            let Some(entries) = self.array(row, &format!("row of {what}")) else {
                ok = false;
                continue;
            };
            match width {
                None => width = Some(entries.len()),
                Some(w) if w != entries.len() => {
                    self.err(
                        row.pos,
                        "DIMENSION",
                        format!("{what} has rows of length {w} and {}", entries.len()),
                    );
                    ok = false;
                    continue;
                }
                _ => {}
            }
            for e in entries {
                match &e.value {
                    Value::Array(pair) if pair.len() == 2 => {
                        let re = self.number(&pair[0], &format!("entry of {what}"));
                        let im = self.number(&pair[1], &format!("entry of {what}"));
                        match (re, im) {
                            (Some(re), Some(im)) => data.push(c64(re, im)),
                            _ => ok = false,
                        }
                    }
                    _ => {
                        self.err(e.pos, "TYPE", format!("entry of {what} must be a [re, im] pair"));
                        ok = false;
                    }
                }
            }
        }
        if !ok {
            return None;
        }
        let shape = match (rows.len(), width, expected) {
            (0, _, Some((0, c))) => (0, c),
            (r, w, _) => (r, w.unwrap_or(0)),
        };
        if let Some(e) = expected {
            if shape != e {
                self.err(
                    n.pos,
                    "DIMENSION",
                    format!("{what} is {}x{}, expected {}x{}", shape.0, shape.1, e.0, e.1),
                );
                return None;
            }
        }
        Some(ComplexMatrix::from_vec(shape.0, shape.1, data).expect("shape matches entry count"))
    }

    fn hamiltonian_checks(&mut self, h: &Hamiltonian, minus_pos: Pos, plus_pos: Pos, what: &str) -> bool {
        let diags = h.validate(self.tol);
        for d in &diags {
            let pos = match d.kind {
                DiagnosticKind::Symmetry => plus_pos,
                _ => minus_pos,
            };
            self.err(pos, d.kind.code(), format!("{what}: {}", d));
        }
        diags.is_empty()
    }

    fn document(&mut self, root: &Node) -> NetworkDocument {
        let mut doc = NetworkDocument::default();
        let Some(f) = self.fields(
            root,
            "document",
            &["qnet_version", "components"],
            &["chains", "uncertainties", "analyses"],
        ) else {
            return doc;
        };
        if let Some(v) = f.get("qnet_version") {
            match v.value.value {
                Value::Number(x) if x == QNET_VERSION as f64 => {}
                Value::Number(x) => self.err(
                    v.value.pos,
                    "VERSION",
                    format!("unsupported qnet_version {x}, expected {QNET_VERSION}"),
                ),
                ref other => self.err(
                    v.value.pos,
                    "TYPE",
                    format!("qnet_version must be a number, found {}", other.type_name()),
                ),
            }
        }
        let mut bad_components = BTreeSet::new();
        if let Some(c) = f.get("components") {
            if let Some(members) = self.object(&c.value, "components") {
                for m in self.unique_members(members, "component") {
                    match self.component(m) {
                        Some(g) => {
                            doc.components.insert(m.key.clone(), g);
                        }
                        None => {
                            bad_components.insert(m.key.clone());
                        }
                    }
                }
            }
        }
        let mut bad_chains = BTreeSet::new();
        if let Some(c) = f.get("chains") {
            if let Some(members) = self.object(&c.value, "chains") {
                for m in self.unique_members(members, "chain") {
                    if doc.components.contains_key(&m.key) || bad_components.contains(&m.key) {
                        self.err(
                            m.key_pos,
                            "DUPLICATE_NAME",
                            format!("`{}` names both a component and a chain", m.key),
                        );
                        continue;
                    }
                    match self.chain(m, &doc, &bad_components) {
                        Some(list) => {
                            doc.chains.insert(m.key.clone(), list);
                        }
                        None => {
                            bad_chains.insert(m.key.clone());
                        }
                    }
                }
            }
        }
        let known =
            |doc: &NetworkDocument, name: &str| doc.components.contains_key(name) || doc.chains.contains_key(name);
        let unresolved = |name: &str| bad_components.contains(name) || bad_chains.contains(name);
        let mut bad_boxes = BTreeSet::new();
        if let Some(u) = f.get("uncertainties") {
            if let Some(members) = self.object(&u.value, "uncertainties") {
                for m in self.unique_members(members, "uncertainty") {
                    match self.uncertainty(m, &doc, &known, &unresolved) {
                        Some(decl) => {
                            doc.uncertainties.insert(m.key.clone(), decl);
                        }
                        None => {
                            bad_boxes.insert(m.key.clone());
                        }
                    }
                }
            }
        }
        if let Some(a) = f.get("analyses") {
            if let Some(items) = self.array(&a.value, "analyses") {
                for item in items {
                    if let Some(an) = self.analysis(item, &doc, &known, &unresolved, &bad_boxes) {
                        doc.analyses.push(an);
                    }
                }
            }
        }
        doc
    }

    fn component(&mut self, m: &Member) -> Option<SlhModel> {
        let what = format!("component `{}`", m.key);
        let f = self.fields(&m.value, &what, &COMPONENT_FIELDS, &[])?;
        if f.len() != COMPONENT_FIELDS.len() {
            return None;
        }
        let n = self.uint(&f["modes"].value, "modes");
        let ch = self.uint(&f["channels"].value, "channels");
        let size = |r: Option<usize>, c: Option<usize>| r.zip(c);
        let s = self.matrix(&f["S"].value, &format!("{what} S"), size(ch, ch));
        let cm = self.matrix(&f["C_minus"].value, &format!("{what} C_minus"), size(ch, n));
        let cp = self.matrix(&f["C_plus"].value, &format!("{what} C_plus"), size(ch, n));
        let om = self.matrix(&f["Omega_minus"].value, &format!("{what} Omega_minus"), size(n, n));
        let op = self.matrix(&f["Omega_plus"].value, &format!("{what} Omega_plus"), size(n, n));
        let (n, ch) = (n?, ch?);
        let (s, cm, cp, om, op) = (s?, cm?, cp?, om?, op?);
        let mut ok = true;
        let u = dup::is_unitary(&s, self.tol).expect("square by construction");
        if !u.unitary {
            self.err(
                f["S"].value.pos,
                "UNITARITY",
                format!("{what}: scattering matrix is not unitary (deviation {:e})", u.deviation),
            );
            ok = false;
        }
        let h = Hamiltonian::new(om, op);
        ok &= self.hamiltonian_checks(&h, f["Omega_minus"].value.pos, f["Omega_plus"].value.pos, &what);
        if !ok {
            return None;
        }
        let g = SlhModel::new(s, Coupling::new(cm, cp), h).expect("shapes checked");
        debug_assert_eq!((g.n_modes, g.m_channels), (n, ch));
        Some(g)
    }

    fn chain(&mut self, m: &Member, doc: &NetworkDocument, bad: &BTreeSet<String>) -> Option<Vec<String>> {
        let items = self.array(&m.value, &format!("chain `{}`", m.key))?;
        if items.is_empty() {
            self.err(m.value.pos, "INVALID_VALUE", format!("chain `{}` is empty", m.key));
            return None;
        }
        let mut names = Vec::new();
        let mut ok = true;
        let mut first: Option<(&str, usize, usize)> = None;
        for item in items {
            let Some(name) = self.string(item, "chain member") else {
                ok = false;
                continue;
            };
            names.push(name.to_string());
            let Some(g) = doc.components.get(name) else {
                if !bad.contains(name) {
                    self.err(
                        item.pos,
                        "DANGLING_REFERENCE",
                        format!("chain `{}` references unknown component `{name}`", m.key),
                    );
                }
                ok = false;
                continue;
            };
            match first {
                None => first = Some((name, g.n_modes, g.m_channels)),
                Some((f, n, ch)) if (n, ch) != (g.n_modes, g.m_channels) => {
                    self.err(
                        item.pos,
                        "DIMENSION",
                        format!(
                            "chain `{}`: `{name}` ({} modes, {} channels) cannot cascade with `{f}` ({n} modes, {ch} channels)",
                            m.key, g.n_modes, g.m_channels
                        ),
                    );
                    ok = false;
                }
                _ => {}
            }
        }
        ok.then_some(names)
    }

    fn target<'n>(
        &mut self,
        node: &'n Node,
        doc: &NetworkDocument,
        known: &dyn Fn(&NetworkDocument, &str) -> bool,
        unresolved: &dyn Fn(&str) -> bool,
    ) -> Option<&'n str> {
        let name = self.string(node, "target")?;
        if known(doc, name) {
            Some(name)
        } else {
            if !unresolved(name) {
                self.err(
                    node.pos,
                    "DANGLING_REFERENCE",
                    format!("unknown component or chain `{name}`"),
                );
            }
            None
        }
    }

    fn uncertainty(
        &mut self,
        m: &Member,
        doc: &NetworkDocument,
        known: &dyn Fn(&NetworkDocument, &str) -> bool,
        unresolved: &dyn Fn(&str) -> bool,
    ) -> Option<UncertaintyDecl> {
        let what = format!("uncertainty `{}`", m.key);
        let kind = match &m.value.value {
            Value::Object(members) => members.iter().find(|x| x.key == "kind").map(|x| &x.value),
            _ => None,
        };
        let kind_str = match kind.map(|k| &k.value) {
            Some(Value::String(s)) => Some(s.as_str()),
            _ => None,
        };
        let binding: &[&str] = match kind_str {
            Some("cavity_gamma_delta") => &["channel", "mode"],
            Some("generic_additive") => &["directions"],
            _ => &[],
        };
        let mut required = vec!["target", "kind", "parameters"];
        required.extend_from_slice(binding);
        let optional: &[&str] = if binding.is_empty() {
            &["channel", "mode", "directions"]
        } else {
            &[]
        };
        let f = self.fields(&m.value, &what, &required, optional)?;
        let kind_node = &f.get("kind")?.value;
        let kind_str = self.string(kind_node, "kind")?;
        if binding.is_empty() {
            self.err(
                kind_node.pos,
                "INVALID_VALUE",
                format!("unknown uncertainty kind `{kind_str}`, expected cavity_gamma_delta or generic_additive"),
            );
            return None;
        }
        let target = self.target(&f.get("target")?.value, doc, known, unresolved);
        let params = self.parameters(&f.get("parameters")?.value);
        let (target, params) = (target?, params?);
        let (n, ch) = doc.target_size(target)?;
        let family = if kind_str == "cavity_gamma_delta" {
            let channel = self.uint(&f.get("channel")?.value, "channel");
            let mode = self.uint(&f.get("mode")?.value, "mode");
            let mut ok = true;
            if let Some(c) = channel.filter(|&c| c >= ch) {
                self.err(
                    f["channel"].value.pos,
                    "INVALID_VALUE",
                    format!("channel {c} outside 0..{ch}"),
                );
                ok = false;
            }
            if let Some(md) = mode.filter(|&md| md >= n) {
                self.err(
                    f["mode"].value.pos,
                    "INVALID_VALUE",
                    format!("mode {md} outside 0..{n}"),
                );
                ok = false;
            }
            let (channel, mode) = (channel?, mode?);
            if !ok {
                return None;
            }
            Family::CavityGammaDelta { channel, mode }
        } else {
            let dnode = &f.get("directions")?.value;
            let items = self.array(dnode, "directions")?;
            let mut dirs = Vec::new();
            let mut ok = true;
            for item in items {
                match self.direction(item, n, ch) {
                    Some(d) => dirs.push(d),
                    None => ok = false,
                }
            }
            if !ok {
                return None;
            }
            if dirs.len() != params.len() {
                self.err(
                    dnode.pos,
                    "INVALID_VALUE",
                    format!("{} directions for {} parameters", dirs.len(), params.len()),
                );
                return None;
            }
            Family::GenericAdditive { directions: dirs }
        };
        match UncertaintyBox::new(params, family) {
            Ok(ubox) => Some(UncertaintyDecl {
                target: target.to_string(),
                ubox,
            }),
            Err(e) => {
                self.err(f["parameters"].value.pos, "INVALID_VALUE", format!("{what}: {e}"));
                None
            }
        }
    }

    fn parameters(&mut self, node: &Node) -> Option<Vec<Parameter>> {
        let items = self.array(node, "parameters")?;
        let mut out = Vec::new();
        let mut ok = true;
        let mut names = BTreeSet::new();
        for item in items {
            let Some(f) = self.fields(item, "parameter", &["name", "lower", "upper"], &[]) else {
                ok = false;
                continue;
            };
            let name = f.get("name").and_then(|m| self.string(&m.value, "name"));
            let lower = f.get("lower").and_then(|m| self.number(&m.value, "lower"));
            let upper = f.get("upper").and_then(|m| self.number(&m.value, "upper"));
            let (Some(name), Some(lower), Some(upper)) = (name, lower, upper) else {
                ok = false;
                continue;
            };
            if !names.insert(name) {
                self.err(
                    f["name"].value.pos,
                    "DUPLICATE_NAME",
                    format!("parameter `{name}` declared twice"),
                );
                ok = false;
                continue;
            }
            if lower > upper {
                self.err(
                    item.pos,
                    "INVALID_VALUE",
                    format!("parameter `{name}` has lower bound {lower} above upper bound {upper}"),
                );
                ok = false;
                continue;
            }
            out.push(Parameter::new(name, lower, upper));
        }
        ok.then_some(out)
    }

    fn direction(&mut self, node: &Node, n: usize, ch: usize) -> Option<Direction> {
        let f = self.fields(node, "direction", &DIRECTION_FIELDS, &[])?;
        if f.len() != DIRECTION_FIELDS.len() {
            return None;
        }
        let cm = self.matrix(&f["C_minus"].value, "direction C_minus", Some((ch, n)));
        let cp = self.matrix(&f["C_plus"].value, "direction C_plus", Some((ch, n)));
        let om = self.matrix(&f["Omega_minus"].value, "direction Omega_minus", Some((n, n)));
        let op = self.matrix(&f["Omega_plus"].value, "direction Omega_plus", Some((n, n)));
        let h = Hamiltonian::new(om?, op?);
        let (cm, cp) = (cm?, cp?);
        if !self.hamiltonian_checks(&h, f["Omega_minus"].value.pos, f["Omega_plus"].value.pos, "direction") {
            return None;
        }
        Some(Direction {
            coupling: Coupling::new(cm, cp),
            hamiltonian: h,
        })
    }

    fn analysis(
        &mut self,
        node: &Node,
        doc: &NetworkDocument,
        known: &dyn Fn(&NetworkDocument, &str) -> bool,
        unresolved: &dyn Fn(&str) -> bool,
        bad_boxes: &BTreeSet<String>,
    ) -> Option<Analysis> {
        let kind_node = match &node.value {
            Value::Object(members) => members.iter().find(|x| x.key == "kind").map(|x| &x.value),
            _ => None,
        };
        let kind = match kind_node.map(|k| &k.value) {
            Some(Value::String(s)) => AnalysisKind::parse(s),
            _ => None,
        };
        let (required, optional): (&[&str], &[&str]) = match kind {
            Some(AnalysisKind::Validate | AnalysisKind::Statespace) => (&["kind", "target"], &[]),
            Some(AnalysisKind::Decompose | AnalysisKind::Verify) => (&["kind", "target", "uncertainty"], &["at"]),
            Some(AnalysisKind::Sweep) => (&["kind", "target", "uncertainty"], &["grid", "margin"]),
            None => (&["kind", "target"], &["uncertainty", "at", "grid", "margin"]),
        };
        let f = self.fields(node, "analysis", required, optional)?;
        let kind_node = &f.get("kind")?.value;
        let kind_str = self.string(kind_node, "kind")?;
        let Some(kind) = kind else {
            self.err(
                kind_node.pos,
                "INVALID_VALUE",
                format!(
                    "unknown analysis kind `{kind_str}`, expected validate, statespace, decompose, verify or sweep"
                ),
            );
            return None;
        };
        let target = self.target(&f.get("target")?.value, doc, known, unresolved)?;
        let mut an = Analysis::new(kind, target);
        if !kind.needs_uncertainty() {
            return Some(an);
        }
        let unode = &f.get("uncertainty")?.value;
        let uname = self.string(unode, "uncertainty")?;
        let Some(decl) = doc.uncertainties.get(uname) else {
            if !bad_boxes.contains(uname) {
                self.err(
                    unode.pos,
                    "DANGLING_REFERENCE",
                    format!("unknown uncertainty `{uname}`"),
                );
            }
            return None;
        };
        if decl.target != target {
            self.err(
                unode.pos,
                "BINDING",
                format!("uncertainty `{uname}` is bound to `{}`, not `{target}`", decl.target),
            );
            return None;
        }
        an.uncertainty = Some(uname.to_string());
        let mut ok = true;
        if let Some(at) = f.get("at") {
            if let Some(members) = self.object(&at.value, "at") {
                for m in self.unique_members(members, "parameter") {
                    if !decl.ubox.parameters().iter().any(|p| p.name == m.key) {
                        self.err(
                            m.key_pos,
                            "DANGLING_REFERENCE",
                            format!("uncertainty `{uname}` has no parameter `{}`", m.key),
                        );
                        ok = false;
                    } else if let Some(v) = self.number(&m.value, "parameter value") {
                        an.at.push((m.key.clone(), v));
                    } else {
                        ok = false;
                    }
                }
                if members.len() != an.at.len() {
                    ok = false;
                }
            } else {
                ok = false;
            }
        }
        if let Some(g) = f.get("grid") {
            match self.uint(&g.value, "grid") {
                Some(v) if v >= 2 => an.grid = v,
                Some(v) => {
                    self.err(
                        g.value.pos,
                        "INVALID_VALUE",
                        format!("grid must be at least 2, got {v}"),
                    );
                    ok = false;
                }
                None => ok = false,
            }
        }
        if let Some(mg) = f.get("margin") {
            match self.number(&mg.value, "margin") {
                Some(v) if v >= 0.0 => an.margin = v,
                Some(v) => {
                    self.err(
                        mg.value.pos,
                        "INVALID_VALUE",
                        format!("margin must be nonnegative, got {v}"),
                    );
                    ok = false;
                }
                None => ok = false,
            }
        }
        ok.then_some(an)
    }
}
