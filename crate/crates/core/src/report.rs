//! Output shared by every checker: a list of named checks, each with a
//! verdict and human-readable detail, plus enough metadata to reproduce the
//! run.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Outcome of a single check or of a whole report.
///
/// Ordered so that folding a collection is `max`: one FAIL makes the run
/// FAIL, otherwise one PARTIAL makes it PARTIAL.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Partial,
    Fail,
}

impl Verdict {
    /// Process exit code reported by the command line tool: 0 pass, 1 fail,
    /// 2 partial. Code 3 is reserved for malformed input.
    pub fn exit_code(self) -> u8 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Partial => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Partial => "PARTIAL",
            Verdict::Fail => "FAIL",
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    /// Stable identifier of the condition checked, e.g. `edge-degrees`.
    pub id: String,
    pub verdict: Verdict,
    /// One-line explanation of the verdict.
    pub detail: String,
    /// Where in the input the verdict was decided, empty when global.
    /// Sorted, so reports are byte-stable across runs.
    pub locations: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    /// SHA-256 of the input bytes the run consumed.
    pub input_digest: String,
    pub checks: Vec<Check>,
    /// Machine-readable witness for the overall verdict, when one exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<String>,
}

impl Report {
    pub fn new(input_digest: impl Into<String>) -> Report {
        Report {
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            input_digest: input_digest.into(),
            checks: Vec::new(),
            certificate: None,
        }
    }

    pub fn push(
        &mut self,
        id: impl Into<String>,
        verdict: Verdict,
        detail: impl Into<String>,
        mut locations: Vec<String>,
    ) {
        locations.sort();
        self.checks.push(Check {
            id: id.into(),
            verdict,
            detail: detail.into(),
            locations,
        });
    }

    pub fn overall(&self) -> Verdict {
        self.checks
            .iter()
            .map(|c| c.verdict)
            .max()
            .unwrap_or(Verdict::Pass)
    }

    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Full<'a> {
            tool_version: &'a str,
            input_digest: &'a str,
            overall: Verdict,
            checks: &'a [Check],
            #[serde(skip_serializing_if = "Option::is_none")]
            certificate: &'a Option<String>,
        }
        let full = Full {
            tool_version: &self.tool_version,
            input_digest: &self.input_digest,
            overall: self.overall(),
            checks: &self.checks,
            certificate: &self.certificate,
        };
        serde_json::to_string_pretty(&full).expect("report serializes")
    }
}

/// Hex SHA-256 of raw input bytes, the form stored in [`Report::input_digest`].
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for b in out {
        use std::fmt::Write;
        write!(hex, "{b:02x}").expect("hex write");
    }
    hex
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folding_prefers_fail_over_partial_over_pass() {
        let mut r = Report::new("0".repeat(64));
        assert_eq!(r.overall(), Verdict::Pass);
        r.push("a", Verdict::Pass, "fine", vec![]);
        assert_eq!(r.overall(), Verdict::Pass);
        r.push("b", Verdict::Partial, "unknown corner", vec![]);
        assert_eq!(r.overall(), Verdict::Partial);
        r.push("c", Verdict::Fail, "bad", vec![]);
        assert_eq!(r.overall(), Verdict::Fail);
        assert_eq!(r.overall().exit_code(), 1);
    }

    #[test]
    fn verdict_serialization_is_uppercase() {
        assert_eq!(serde_json::to_string(&Verdict::Pass).unwrap(), "\"PASS\"");
        assert_eq!(
            serde_json::from_str::<Verdict>("\"PARTIAL\"").unwrap(),
            Verdict::Partial
        );
    }

    #[test]
    fn digest_matches_known_vector() {
        // SHA-256 of the empty string and of "abc" are standard test vectors.
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn locations_are_sorted_on_insert() {
        let mut r = Report::new(sha256_hex(b"x"));
        r.push(
            "order",
            Verdict::Pass,
            "",
            vec!["cube 2".into(), "cube 0".into(), "cube 1".into()],
        );
        assert_eq!(r.checks[0].locations, vec!["cube 0", "cube 1", "cube 2"]);
    }
}
