//! Class-distribution statistics for classifier training sets: per-class
//! weights, focal loss, the imbalance ratio and replication plans that bring
//! every class up to a target count.

use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use indexmap::IndexMap;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered `(class, count)` pairs with unique names and at least one
/// positive count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(String, u64)>", into = "Vec<(String, u64)>")]
pub struct ClassDistribution {
    classes: Vec<(String, u64)>,
}

impl TryFrom<Vec<(String, u64)>> for ClassDistribution {
    type Error = Error;

    fn try_from(classes: Vec<(String, u64)>) -> Result<Self> {
        Self::new(classes)
    }
}

impl From<ClassDistribution> for Vec<(String, u64)> {
    fn from(d: ClassDistribution) -> Self {
        d.classes
    }
}

#[derive(Debug, Deserialize)]
struct CsvRow {
    class: String,
    count: u64,
}

impl ClassDistribution {
    pub fn new(classes: Vec<(String, u64)>) -> Result<Self> {
        if !classes.iter().any(|(_, n)| *n > 0) {
            return Err(Error::EmptyDistribution);
        }
        let mut seen = HashSet::new();
        for (name, _) in &classes {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateClass(name.clone()));
            }
        }
        Ok(Self { classes })
    }

    /// Reads a CSV with header `class,count`.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let rows = rdr
            .deserialize::<CsvRow>()
            .map(|r| r.map(|r| (r.class, r.count)))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(rows)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(file)
    }

    pub fn classes(&self) -> &[(String, u64)] {
        &self.classes
    }

    pub fn count(&self, class: &str) -> Option<u64> {
        self.classes
            .iter()
            .find(|(n, _)| n == class)
            .map(|(_, c)| *c)
    }

    pub fn total(&self) -> u64 {
        self.classes.iter().map(|(_, c)| c).sum()
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    fn require_positive(&self) -> Result<()> {
        match self.classes.iter().find(|(_, c)| *c == 0) {
            Some((name, _)) => Err(Error::ZeroCount(name.clone())),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightScheme {
    Uniform,
    /// `1 / f`
    Inverse,
    /// `1 / √f`
    InverseSqrt,
    /// `1 / ∛f`
    InverseCbrt,
}

impl WeightScheme {
    pub const ALL: [WeightScheme; 4] = [
        WeightScheme::Uniform,
        WeightScheme::Inverse,
        WeightScheme::InverseSqrt,
        WeightScheme::InverseCbrt,
    ];

    pub fn weight(self, count: u64) -> f64 {
        let f = count as f64;
        match self {
            WeightScheme::Uniform => 1.0,
            WeightScheme::Inverse => 1.0 / f,
            WeightScheme::InverseSqrt => 1.0 / f.sqrt(),
            WeightScheme::InverseCbrt => 1.0 / f.cbrt(),
        }
    }
}

impl std::str::FromStr for WeightScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "inverse" => Ok(Self::Inverse),
            "inverse_sqrt" => Ok(Self::InverseSqrt),
            "inverse_cbrt" => Ok(Self::InverseCbrt),
            other => Err(Error::InvalidParameter(format!(
                "unknown weight scheme {other:?}"
            ))),
        }
    }
}

/// Raw per-class weights in distribution order; not renormalized.
pub fn class_weights(d: &ClassDistribution, scheme: WeightScheme) -> Result<IndexMap<String, f64>> {
    if scheme != WeightScheme::Uniform {
        d.require_positive()?;
    }
    Ok(d.classes
        .iter()
        .map(|(name, c)| (name.clone(), scheme.weight(*c)))
        .collect())
}

/// `-(1 - p)^γ ln p`.
pub fn focal_loss(p_t: f64, gamma: f64) -> Result<f64> {
    if !(p_t > 0.0 && p_t <= 1.0) {
        return Err(Error::ProbabilityDomain(p_t));
    }
    if !(gamma >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "gamma must be >= 0, got {gamma}"
        )));
    }
    if p_t == 1.0 {
        return Ok(0.0);
    }
    Ok(-(1.0 - p_t).powf(gamma) * p_t.ln())
}

/// Majority count over minority count.
pub fn imbalance_ratio(d: &ClassDistribution) -> Result<f64> {
    d.require_positive()?;
    let max = d.classes.iter().map(|(_, c)| *c).max().expect("non-empty");
    let min = d.classes.iter().map(|(_, c)| *c).min().expect("non-empty");
    Ok(max as f64 / min as f64)
}

/// Full replications plus a partial copy of `remainder` samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Replication {
    pub copies: u64,
    pub remainder: u64,
}

impl Replication {
    pub fn total(&self, count: u64) -> u64 {
        self.copies * count + self.remainder
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpsamplePlan {
    pub target_class: String,
    pub target: u64,
    pub classes: IndexMap<String, Replication>,
}

/// Replicates every class up to the count of `target_class`.
pub fn upsample_plan(d: &ClassDistribution, target_class: &str) -> Result<UpsamplePlan> {
    let target = d
        .count(target_class)
        .ok_or_else(|| Error::UnknownClass(target_class.to_string()))?;
    d.require_positive()?;
    let classes = d
        .classes
        .iter()
        .map(|(name, f)| {
            // classes larger than the target keep a single copy
            let copies = (target / f).max(1);
            let remainder = target.saturating_sub(copies * f);
            (name.clone(), Replication { copies, remainder })
        })
        .collect();
    Ok(UpsamplePlan {
        target_class: target_class.to_string(),
        target,
        classes,
    })
}

/// Which samples fill the partial copy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum RemainderSelection {
    /// The first `remainder` samples in dataset order.
    #[default]
    Leading,
    /// A seeded random subset, returned in ascending order.
    Seeded { seed: u64 },
}

/// Sample indices (into a class of `count` items) used for the partial copy.
pub fn remainder_indices(count: u64, remainder: u64, selection: RemainderSelection) -> Vec<u64> {
    let remainder = remainder.min(count);
    match selection {
        RemainderSelection::Leading => (0..remainder).collect(),
        RemainderSelection::Seeded { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut idx: Vec<u64> = sample(&mut rng, count as usize, remainder as usize)
                .into_iter()
                .map(|i| i as u64)
                .collect();
            idx.sort_unstable();
            idx
        }
    }
}

/// The twelve-class red blood cell dataset used as the reference example.
pub fn reference_distribution() -> ClassDistribution {
    let classes = [
        ("Normal", 6286),
        ("Macrocyte", 687),
        ("Microcyte", 459),
        ("Spherocyte", 3445),
        ("Target cell", 2703),
        ("Stomatocyte", 1991),
        ("Ovalocyte", 2137),
        ("Teardrop", 305),
        ("Burr cell", 783),
        ("Schistocyte", 861),
        ("Hypochromia", 1036),
        ("Uncategorised", 182),
    ];
    ClassDistribution::new(classes.iter().map(|&(n, c)| (n.to_string(), c)).collect())
        .expect("reference distribution is valid")
}
