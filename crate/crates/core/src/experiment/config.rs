use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::benchmark::BenchmarkSpec;
use crate::error::{Error, Result};
use crate::gramian::{Centering, GramianMethod, PerturbationSets};
use crate::matlib::ResonancePolicy;
use crate::reduce::{ProjectionKind, Ranking};
use crate::system::{Quadrature, TimeGrid};

/// Reduced orders to evaluate, ascending and without duplicates.
///
/// Parsed from a JSON list or from text such as `"1..100"` (inclusive),
/// `"5"` or `"1..10,20,30"`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orders(Vec<usize>);

impl Orders {
    pub fn new(mut v: Vec<usize>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::Config("order list is empty".into()));
        }
        if v.contains(&0) {
            return Err(Error::Config("reduced orders start at 1".into()));
        }
        v.sort_unstable();
        v.dedup();
        Ok(Self(v))
    }

    pub fn range(from: usize, to: usize) -> Result<Self> {
        Self::new((from..=to).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn max(&self) -> usize {
        *self.0.last().expect("nonempty")
    }
}

impl FromStr for Orders {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("cannot parse orders {s:?}"));
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if let Some((a, b)) = part.split_once("..") {
                let b = b.strip_prefix('=').unwrap_or(b);
                let a: usize = a.trim().parse().map_err(|_| bad())?;
                let b: usize = b.trim().parse().map_err(|_| bad())?;
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            } else {
                out.push(part.parse().map_err(|_| bad())?);
            }
        }
        Orders::new(out)
    }
}

impl fmt::Display for Orders {
    /// Collapses consecutive runs into `a..b`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.0.len() {
            let start = self.0[i];
            let mut j = i;
            while j + 1 < self.0.len() && self.0[j + 1] == self.0[j] + 1 {
                j += 1;
            }
            parts.push(if j > i { format!("{start}..{}", self.0[j]) } else { start.to_string() });
            i = j + 1;
        }
        f.write_str(&parts.join(","))
    }
}

impl Serialize for Orders {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Orders {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            List(Vec<usize>),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::List(v) => Orders::new(v),
            Repr::Text(s) => s.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub spec: BenchmarkSpec,
    pub grid: TimeGrid,
    pub gramians: Vec<GramianMethod>,
    pub projection: ProjectionKind,
    pub orders: Orders,
    pub perturb: PerturbationSets,
    pub noise_seed: u64,
    pub output_dir: PathBuf,
    pub quadrature: Quadrature,
    pub centering: Centering,
    pub resonance: ResonancePolicy,
    pub ranking: Ranking,
    /// Also write the system matrices and Gramians as CSV.
    pub write_matrices: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            spec: BenchmarkSpec::default(),
            grid: TimeGrid { step: 0.01, count: 100, substeps: Default::default() },
            gramians: GramianMethod::ALL.to_vec(),
            projection: ProjectionKind::DirectTruncationLeft,
            orders: Orders::range(1, 100).expect("static range"),
            perturb: PerturbationSets::default(),
            noise_seed: 1,
            output_dir: PathBuf::from("crossgram-out"),
            quadrature: Quadrature::Rectangle,
            centering: Centering::SteadyState,
            resonance: ResonancePolicy::Perturb,
            ranking: Ranking::Scores,
            write_matrices: true,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        self.grid.validate()?;
        self.perturb.validate()?;
        if self.gramians.is_empty() {
            return Err(Error::Config("no Gramian variant selected".into()));
        }
        for (i, g) in self.gramians.iter().enumerate() {
            if self.gramians[..i].contains(g) {
                return Err(Error::Config(format!("Gramian variant {} listed twice", g.name())));
            }
        }
        Ok(())
    }
}
