//! Structured and text renderings of a verification.
//!
//! The structured form is versioned by [`SCHEMA`]; every rational is an
//! exact fraction string. The text form renders the same structure.

use std::fmt::Write as _;

use serde::Serialize;

use crate::affine::{fmt_q, Affine};
use crate::catalog::CheckOutcome;
use crate::crossing::ProfileReport;
use crate::document::ProfileDocument;
use crate::feasibility::{ConstraintSystem, FeasibilityResult, Relation, Rule, Sample};
use crate::verify::Verification;

pub const SCHEMA: &str = "hamsix-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Feasible,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstraintEntry {
    pub relation: Relation,
    pub text: String,
    pub form: Affine,
    pub rule: Rule,
    pub site: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explanation: Option<&'static str>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateTerm {
    pub multiplier: String,
    #[serde(flatten)]
    pub constraint: ConstraintEntry,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateEntry {
    /// The combined form; always a constant.
    pub combination: String,
    pub terms: Vec<CertificateTerm>,
    pub rules: Vec<Rule>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalizationEntry {
    pub parameter: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructuredReport {
    pub schema: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    pub verdict: Verdict,
    pub checked: bool,
    pub profile: ProfileDocument,
    pub run: ProfileReport,
    pub normalization: Option<NormalizationEntry>,
    pub constraints: Vec<ConstraintEntry>,
    pub sample: Option<Sample>,
    pub certificate: Option<CertificateEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub golden: Option<Vec<CheckOutcome>>,
}

fn entry(rel: Relation, c: &crate::feasibility::Constraint, explain: bool) -> ConstraintEntry {
    ConstraintEntry {
        relation: rel,
        text: format!("{} {} 0", c.form, rel.symbol()),
        form: c.form.clone(),
        rule: c.tag.rule,
        site: c.tag.site.clone(),
        explanation: explain.then(|| c.tag.rule.explanation()),
    }
}

fn constraint_entries(sys: &ConstraintSystem, explain: bool) -> Vec<ConstraintEntry> {
    sys.iter().map(|(rel, c)| entry(rel, c, explain)).collect()
}

impl StructuredReport {
    pub fn new(v: &Verification, explain: bool) -> Self {
        let certificate = match &v.result {
            FeasibilityResult::Feasible { .. } => None,
            FeasibilityResult::Infeasible { certificate } => Some(CertificateEntry {
                combination: certificate.combination(&v.system).to_string(),
                terms: certificate
                    .support(&v.system)
                    .into_iter()
                    .map(|(rel, c, m)| CertificateTerm {
                        multiplier: fmt_q(m),
                        constraint: entry(rel, c, explain),
                    })
                    .collect(),
                rules: certificate.rules(&v.system),
            }),
        };
        StructuredReport {
            schema: SCHEMA,
            source: None,
            verdict: if v.is_feasible() {
                Verdict::Feasible
            } else {
                Verdict::Infeasible
            },
            checked: v.checked,
            profile: ProfileDocument::from_profile(&v.profile),
            run: v.report.clone(),
            normalization: v.normalization.as_ref().map(|(p, q)| NormalizationEntry {
                parameter: p.to_string(),
                value: fmt_q(q),
            }),
            constraints: constraint_entries(&v.system, explain),
            sample: v.result.sample().cloned(),
            certificate,
            golden: None,
        }
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = Some(source.into());
        self
    }

    pub fn with_golden(mut self, golden: Vec<CheckOutcome>) -> Self {
        self.golden = Some(golden);
        self
    }

    pub fn golden_passed(&self) -> bool {
        self.golden.as_ref().is_none_or(|g| g.iter().all(|c| c.passed))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let r = &self.run;
        if let Some(src) = &self.source {
            let _ = writeln!(s, "profile: {src}");
        }
        let verdict = match self.verdict {
            Verdict::Feasible => "feasible",
            Verdict::Infeasible => "infeasible",
        };
        let _ = writeln!(s, "verdict: {verdict}{}", if self.checked { "" } else { " (CHECK FAILED)" });
        let b = |v: Option<i64>| v.map_or("-".to_string(), |b| b.to_string());
        let _ = writeln!(
            s,
            "b_min: {}  b_max: {}  twist: {}  euler closes: {}",
            b(r.b_min),
            b(r.b_max),
            r.twist,
            r.euler_closes
        );
        let _ = writeln!(s, "intervals:");
        for i in &r.intervals {
            let _ = writeln!(
                s,
                "  {} [{}{}] on {}: e = {}, omega = {}",
                i.index,
                i.gap,
                if i.zero_length { " = 0" } else { "" },
                i.space,
                i.euler.render(i.space),
                i.omega.render(i.space)
            );
        }
        if !r.walls.is_empty() {
            let _ = writeln!(s, "walls:");
        }
        for w in &r.walls {
            let class = match &w.dual_class {
                Some(c) => format!(", dual class {}{}", c.render(w.space_below), if w.solved { " (solved)" } else { "" }),
                None => String::new(),
            };
            let chern = match w.normal_cherns {
                Some((p, m)) => format!(", normal Chern numbers ({p}, {m})"),
                None => String::new(),
            };
            let _ = writeln!(
                s,
                "  {} index {} {}: {} -> {}{class}{chern}",
                w.index, w.morse_index, w.kind, w.space_below, w.space_above
            );
        }
        if let Some(n) = &self.normalization {
            let _ = writeln!(s, "normalization: {} = {}", n.parameter, n.value);
        }
        let _ = writeln!(s, "constraints:");
        for c in &self.constraints {
            let _ = writeln!(s, "  {:<32} [{}] {}", c.text, c.rule, c.site);
            if let Some(e) = c.explanation {
                let _ = writeln!(s, "  {:<32}   {e}", "");
            }
        }
        if let Some(sample) = &self.sample {
            let _ = writeln!(s, "sample: {sample}");
        }
        if let Some(cert) = &self.certificate {
            let _ = writeln!(s, "certificate (combination = {}):", cert.combination);
            for t in &cert.terms {
                let _ = writeln!(s, "  {:>6} x ({})  [{}] {}", t.multiplier, t.constraint.text, t.constraint.rule, t.constraint.site);
                if let Some(e) = t.constraint.explanation {
                    let _ = writeln!(s, "           {e}");
                }
            }
            let rules: Vec<&str> = cert.rules.iter().map(|r| r.key()).collect();
            let _ = writeln!(s, "obstructing rules: {}", rules.join(", "));
        }
        if let Some(golden) = &self.golden {
            let _ = writeln!(s, "expected outcome:");
            for c in golden {
                let _ = writeln!(
                    s,
                    "  {} {} ({}): {}",
                    if c.passed { "ok  " } else { "FAIL" },
                    c.expected.expectation,
                    c.expected.source,
                    c.detail
                );
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossing::{Extremum, Profile, Wall};
    use crate::verify::{verify, Normalize};

    #[test]
    fn json_uses_fraction_strings() {
        let p = Profile::new(Extremum::point(), vec![Wall::surface(0, None)], Extremum::point());
        let v = verify(&p, &Normalize::Pin(crate::affine::Param::Gap(0), crate::affine::frac(1, 2))).unwrap();
        let r = StructuredReport::new(&v, false);
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["schema"], SCHEMA);
        assert_eq!(json["verdict"], "feasible");
        assert_eq!(json["sample"]["t0"], "1/2");
        assert_eq!(json["normalization"]["value"], "1/2");
        assert!(json["run"]["intervals"].as_array().unwrap().len() == 2);
    }

    #[test]
    fn text_lists_certificate_rules() {
        let p = Profile::new(Extremum::point(), vec![], Extremum::point());
        let v = verify(&p, &Normalize::default()).unwrap();
        let text = StructuredReport::new(&v, true).to_text();
        assert!(text.contains("verdict: infeasible"));
        assert!(text.contains("obstructing rules: euler-closing"));
        assert!(text.contains(Rule::EulerClosing.explanation()));
    }
}
