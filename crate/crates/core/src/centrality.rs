//! Per-node score vectors, their provenance, and the scores file format.
//!
//! A scores file is a block of `#`-prefixed `key value` header lines followed
//! by one `node score` line per node:
//!
//! ```text
//! # method psp-harmonic
//! # measure harmonic
//! # phi 0.8
//! 0 0.41666666666666663
//! 1 0.5
//! ```

use std::fmt::{self, Write as _};
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Harmonic,
    Betweenness,
}

impl Measure {
    pub fn as_str(self) -> &'static str {
        match self {
            Measure::Harmonic => "harmonic",
            Measure::Betweenness => "betweenness",
        }
    }

    /// Smallest node count for which the measure is defined.
    pub fn min_nodes(self) -> usize {
        match self {
            Measure::Harmonic => 2,
            Measure::Betweenness => 3,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "harmonic" => Ok(Measure::Harmonic),
            "betweenness" => Ok(Measure::Betweenness),
            _ => Err(Error::InvalidParameter(format!("unknown measure `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "harmonic")]
    Harmonic,
    #[serde(rename = "brandes")]
    Brandes,
    #[serde(rename = "naive-betweenness")]
    NaiveBetweenness,
    #[serde(rename = "psp-harmonic")]
    PspHarmonic,
    #[serde(rename = "psp-betweenness")]
    PspBetweenness,
    #[serde(rename = "mc-harmonic")]
    McHarmonic,
    #[serde(rename = "mc-betweenness")]
    McBetweenness,
    #[serde(rename = "exact-harmonic")]
    ExactHarmonic,
    #[serde(rename = "exact-betweenness")]
    ExactBetweenness,
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::Harmonic,
        Method::Brandes,
        Method::NaiveBetweenness,
        Method::PspHarmonic,
        Method::PspBetweenness,
        Method::McHarmonic,
        Method::McBetweenness,
        Method::ExactHarmonic,
        Method::ExactBetweenness,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Harmonic => "harmonic",
            Method::Brandes => "brandes",
            Method::NaiveBetweenness => "naive-betweenness",
            Method::PspHarmonic => "psp-harmonic",
            Method::PspBetweenness => "psp-betweenness",
            Method::McHarmonic => "mc-harmonic",
            Method::McBetweenness => "mc-betweenness",
            Method::ExactHarmonic => "exact-harmonic",
            Method::ExactBetweenness => "exact-betweenness",
        }
    }

    pub fn measure(self) -> Measure {
        match self {
            Method::Harmonic | Method::PspHarmonic | Method::McHarmonic | Method::ExactHarmonic => {
                Measure::Harmonic
            }
            _ => Measure::Betweenness,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method `{s}`")))
    }
}

/// How a score vector was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

impl Provenance {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            phi: None,
            samples: None,
            seed: None,
            runtime_ms: None,
        }
    }

    /// `phi` for PSP methods, the sample count for Monte Carlo, empty otherwise.
    pub fn phi_or_samples(&self) -> String {
        match (self.phi, self.samples) {
            (Some(phi), _) => phi.to_string(),
            (None, Some(r)) => r.to_string(),
            _ => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityVector {
    pub measure: Measure,
    pub provenance: Provenance,
    pub scores: Vec<f64>,
}

impl CentralityVector {
    pub fn new(method: Method, scores: Vec<f64>) -> Self {
        Self {
            measure: method.measure(),
            provenance: Provenance::new(method),
            scores,
        }
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn method(&self) -> Method {
        self.provenance.method
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.provenance.phi = Some(phi);
        self
    }

    pub fn with_samples(mut self, samples: u64, seed: u64) -> Self {
        self.provenance.samples = Some(samples);
        self.provenance.seed = Some(seed);
        self
    }

    /// Serializes to the scores file format. Scores are written in shortest
    /// round-trip form so re-reading is bit-exact.
    pub fn to_scores_file(&self) -> String {
        let p = &self.provenance;
        let mut out = String::new();
        let _ = writeln!(out, "# method {}", p.method);
        let _ = writeln!(out, "# measure {}", self.measure);
        if let Some(phi) = p.phi {
            let _ = writeln!(out, "# phi {phi}");
        }
        if let Some(r) = p.samples {
            let _ = writeln!(out, "# samples {r}");
        }
        if let Some(seed) = p.seed {
            let _ = writeln!(out, "# seed {seed}");
        }
        if let Some(ms) = p.runtime_ms {
            let _ = writeln!(out, "# runtime_ms {ms}");
        }
        for (node, score) in self.scores.iter().enumerate() {
            let _ = writeln!(out, "{node} {score}");
        }
        out
    }

    pub fn parse_scores_file(text: &str) -> Result<Self> {
        let mut method = None;
        let mut measure = None;
        let mut provenance_fields: Vec<(String, String, usize)> = Vec::new();
        let mut scores = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(header) = trimmed.strip_prefix('#') {
                let mut words = header.split_whitespace();
                let (Some(key), Some(value)) = (words.next(), words.next()) else {
                    continue;
                };
                match key {
                    "method" => method = Some(value.parse::<Method>()?),
                    "measure" => measure = Some(value.parse::<Measure>()?),
                    _ => provenance_fields.push((key.to_string(), value.to_string(), line)),
                }
                continue;
            }
            let mut words = trimmed.split_whitespace();
            let (Some(node), Some(score), None) = (words.next(), words.next(), words.next()) else {
                return Err(Error::Parse {
                    line,
                    message: "expected `node score`".into(),
                });
            };
            let node: usize = node.parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid node `{node}`"),
            })?;
            if node != scores.len() {
                return Err(Error::Parse {
                    line,
                    message: format!("expected node {}, found {node}", scores.len()),
                });
            }
            let score: f64 = score.parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid score `{score}`"),
            })?;
            scores.push(score);
        }

        let method = method.ok_or_else(|| Error::Parse {
            line: 1,
            message: "missing `# method` header".into(),
        })?;
        let mut provenance = Provenance::new(method);
        for (key, value, line) in provenance_fields {
            let bad = || Error::Parse {
                line,
                message: format!("invalid value `{value}` for `{key}`"),
            };
            match key.as_str() {
                "phi" => provenance.phi = Some(value.parse().map_err(|_| bad())?),
                "samples" => provenance.samples = Some(value.parse().map_err(|_| bad())?),
                "seed" => provenance.seed = Some(value.parse().map_err(|_| bad())?),
                "runtime_ms" => provenance.runtime_ms = Some(value.parse().map_err(|_| bad())?),
                _ => {}
            }
        }
        Ok(Self {
            measure: measure.unwrap_or(method.measure()),
            provenance,
            scores,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_scores_file())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_scores_file(&fs::read_to_string(path)?)
    }
}
