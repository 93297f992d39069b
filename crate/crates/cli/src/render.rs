use std::fmt::Write as _;
use std::io::{self, Write};

use clap::ValueEnum;
use serde::Serialize;

use polya::biquad::RamificationProfile;
use polya::quadratic::{Classification, FundamentalUnit, OracleReport};
use polya::verify::{ContrastReport, PollackPair, TableRow, TheoremReport};
use polya::{BiquadraticField, PolyaReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Something emitted as one JSON line, one CSV row or a text block.
pub trait Record: Serialize {
    fn header() -> &'static [&'static str];
    fn row(&self) -> Vec<String>;
    fn text(&self) -> String;
}

pub fn emit<R: Record>(records: &[R], format: Format, out: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Json => {
            for r in records {
                serde_json::to_writer(&mut *out, r)?;
                writeln!(out)?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(R::header())?;
            for r in records {
                w.write_record(r.row())?;
            }
            w.flush()?;
        }
        Format::Text => {
            for r in records {
                writeln!(out, "{}", r.text())?;
            }
        }
    }
    out.flush()
}

fn json<T: Serialize + ?Sized>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn field_name(f: &BiquadraticField) -> String {
    let [a, b, _] = f.kernels;
    format!("Q(√{a}, √{b})")
}

fn profile_text(p: &RamificationProfile) -> String {
    let parts: Vec<String> = p.entries.iter().map(|(l, e)| format!("e_{l} = {e}")).collect();
    format!("{} (∏e = {})", parts.join(", "), p.product)
}

fn unit_text(u: &FundamentalUnit) -> String {
    format!("{u} (norm {:+})", u.norm)
}

#[derive(Debug, Serialize)]
pub struct QuadraticOutput {
    pub d: i64,
    pub zantema: Classification,
    pub case_label: String,
    pub oracle: OracleReport,
    pub unit: Option<FundamentalUnit>,
    pub agree: Option<bool>,
}

impl Record for QuadraticOutput {
    fn header() -> &'static [&'static str] {
        &["d", "verdict", "case", "oracle_verdict", "unit", "unit_norm", "agree", "oracle_checks"]
    }

    fn row(&self) -> Vec<String> {
        vec![
            self.d.to_string(),
            json(&self.zantema.verdict).trim_matches('"').into(),
            self.case_label.clone(),
            json(&self.oracle.verdict).trim_matches('"').into(),
            opt(self.unit.as_ref()),
            opt(self.unit.as_ref().map(|u| u.norm)),
            opt(self.agree),
            json(&self.oracle.checks),
        ]
    }

    fn text(&self) -> String {
        let mut s = format!("Q(√{}): {:?} ({})\n", self.d, self.zantema.verdict, self.case_label);
        let checks: Vec<String> = self
            .oracle
            .checks
            .iter()
            .map(|c| {
                let state = match c.principal {
                    Some(true) => "principal",
                    Some(false) => "not principal",
                    None => "undecided",
                };
                format!("{} {state}", c.prime)
            })
            .collect();
        let _ = writeln!(s, "  oracle: {:?} (ramified primes: {})", self.oracle.verdict, checks.join(", "));
        if let Some(u) = &self.unit {
            let _ = writeln!(s, "  fundamental unit: {}", unit_text(u));
        }
        match self.agree {
            Some(true) => s.push_str("  classification and oracle agree"),
            Some(false) => s.push_str("  DISAGREEMENT between classification and oracle"),
            None => s.push_str("  oracle undecided"),
        }
        s
    }
}

/// A full report, or what was known when a budget ran out.
#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum AnalyzeOutput {
    Done(Box<PolyaReport>),
    Partial { field: BiquadraticField, profile: RamificationProfile, undecided: String },
}

impl Record for AnalyzeOutput {
    fn header() -> &'static [&'static str] {
        &[
            "kernels", "product_e", "h_order", "index_factor", "h1_order", "po_order", "po_structure",
            "unit_norms", "units", "h_basis", "undecided",
        ]
    }

    fn row(&self) -> Vec<String> {
        match self {
            AnalyzeOutput::Done(r) => vec![
                json(&r.field.kernels),
                r.profile.product.to_string(),
                r.h_order.to_string(),
                r.index_factor.to_string(),
                r.h1_order.to_string(),
                r.po_order.to_string(),
                r.po_structure.to_string(),
                json(&r.unit_norms),
                json(&r.units),
                json(&r.h_basis),
                String::new(),
            ],
            AnalyzeOutput::Partial { field, profile, undecided } => {
                let mut row = vec![json(&field.kernels), profile.product.to_string()];
                row.resize(10, String::new());
                row.push(undecided.clone());
                row
            }
        }
    }

    fn text(&self) -> String {
        match self {
            AnalyzeOutput::Done(r) => polya_text(r),
            AnalyzeOutput::Partial { field, profile, undecided } => format!(
                "{}: kernels {:?}\n  ramification: {}\n  undecided: {undecided}",
                field_name(field),
                field.kernels,
                profile_text(profile)
            ),
        }
    }
}

fn polya_text(r: &PolyaReport) -> String {
    let mut s = format!("{}: kernels {:?}\n", field_name(&r.field), r.field.kernels);
    let _ = writeln!(s, "  ramification: {}", profile_text(&r.profile));
    for u in &r.units {
        let _ = writeln!(s, "  unit of Q(√{}): {}", u.d, unit_text(u));
    }
    let gens: Vec<String> = r.h_generators.iter().map(|c| c.to_string()).collect();
    let basis: Vec<String> = r.h_basis.iter().map(|c| c.to_string()).collect();
    let _ = writeln!(s, "  generators: {}", gens.join(", "));
    let _ = writeln!(s, "  H = ⟨{}⟩, |H| = {}, index {}, |H¹| = {}", basis.join(", "), r.h_order, r.index_factor, r.h1_order);
    let _ = write!(s, "  Po order {}, structure {}", r.po_order, r.po_structure);
    s
}

impl Record for TheoremReport {
    fn header() -> &'static [&'static str] {
        &[
            "theorem", "p", "q", "r", "hypotheses_ok", "kernels", "product_e", "h_order", "index_factor",
            "h1_order", "po_order", "unit_norms", "epsilon", "epsilon_in_allowed_set", "claim_matches",
            "epsilon_witness", "anomalies", "violations", "undecided",
        ]
    }

    fn row(&self) -> Vec<String> {
        let f = self.field.as_ref();
        vec![
            self.theorem.to_string(),
            self.triple.p.to_string(),
            self.triple.q.to_string(),
            opt(self.triple.r),
            self.hypotheses_ok.to_string(),
            opt(f.map(|f| json(&f.field.kernels))),
            opt(f.map(|f| f.profile.product)),
            opt(f.map(|f| f.h_order)),
            opt(f.map(|f| f.index_factor)),
            opt(f.map(|f| f.h1_order)),
            opt(f.map(|f| f.po_order)),
            opt(f.map(|f| json(&f.unit_norms))),
            opt(self.epsilon_witness.as_ref().map(|w| w.epsilon)),
            opt(self.epsilon_in_allowed_set),
            self.claim_matches.to_string(),
            opt(self.epsilon_witness.as_ref().map(json)),
            json(&self.anomalies),
            json(&self.violations),
            opt(self.undecided.as_ref()),
        ]
    }

    fn text(&self) -> String {
        let mut s = format!("{} {}", self.theorem, self.triple);
        if !self.hypotheses_ok {
            let failed = self.hypotheses.failed().join(", ");
            let _ = write!(s, ": hypotheses fail ({failed})");
        }
        if let Some(f) = &self.field {
            let _ = write!(s, "\n{}", polya_text(f).lines().map(|l| format!("  {l}")).collect::<Vec<_>>().join("\n"));
        }
        if let Some(w) = &self.epsilon_witness {
            let _ = write!(
                s,
                "\n  ε-witness for d = {}: {}, m = {}, n = {}, ε = {}, η = {} (allowed: {})",
                w.d,
                w.case_label,
                w.m,
                w.n,
                w.epsilon,
                w.eta,
                opt(self.epsilon_in_allowed_set)
            );
        }
        if self.field.is_some() {
            let _ = write!(s, "\n  claim Po ≅ Z/2: {}", if self.claim_matches { "matches" } else { "does not match" });
        }
        for a in &self.anomalies {
            let _ = write!(s, "\n  anomaly: {a}");
        }
        for v in &self.violations {
            let _ = write!(s, "\n  VIOLATION: {v}");
        }
        if let Some(u) = &self.undecided {
            let _ = write!(s, "\n  undecided: {u}");
        }
        s
    }
}

impl Record for TableRow {
    fn header() -> &'static [&'static str] {
        &["row", "ok", "hypotheses_ok", "po_order", "h1_order", "product_e", "unit_norms", "anomalies"]
    }

    fn row(&self) -> Vec<String> {
        let f = self.report.field.as_ref();
        vec![
            json(&self.row),
            self.ok.to_string(),
            self.report.hypotheses_ok.to_string(),
            opt(f.map(|f| f.po_order)),
            opt(f.map(|f| f.h1_order)),
            opt(f.map(|f| f.profile.product)),
            opt(f.map(|f| json(&f.unit_norms))),
            json(&self.report.anomalies),
        ]
    }

    fn text(&self) -> String {
        let [a, b, c] = self.row;
        format!(
            "({a}, {b}, {c}): {} Po order {}",
            if self.ok { "ok" } else { "FAIL" },
            opt(self.report.po_order())
        )
    }
}

impl Record for PollackPair {
    fn header() -> &'static [&'static str] {
        &["r", "p", "q"]
    }

    fn row(&self) -> Vec<String> {
        vec![self.r.to_string(), self.p.to_string(), self.q.to_string()]
    }

    fn text(&self) -> String {
        format!("r = {}: p = {} (≡ 3 mod 4), q = {} (≡ 1 mod 4), both non-residues", self.r, self.p, self.q)
    }
}

impl Record for ContrastReport {
    fn header() -> &'static [&'static str] {
        &["p", "q", "r", "po_order", "expected_po_order", "matches", "anomalies"]
    }

    fn row(&self) -> Vec<String> {
        vec![
            self.triple.p.to_string(),
            self.triple.q.to_string(),
            opt(self.triple.r),
            self.field.po_order.to_string(),
            self.expected_po_order.to_string(),
            self.matches.to_string(),
            json(&self.anomalies),
        ]
    }

    fn text(&self) -> String {
        format!(
            "{}\n{}",
            self.triple,
            polya_text(&self.field).lines().map(|l| format!("  {l}")).collect::<Vec<_>>().join("\n")
        ) + if self.matches { "\n  Pólya as expected" } else { "\n  anomaly: expected a Pólya field" }
    }
}
