use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::btnet::WeightedNetwork;
use crate::error::{Error, Result};

use super::Graph;

/// Empirical distribution over a sorted support.
///
/// In the plain form `probs` are probability masses summing to 1. In the
/// cumulative form `probs[i]` is `P(X >= support[i])`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Distribution {
    pub support: Vec<f64>,
    pub probs: Vec<f64>,
    pub cumulative: bool,
    pub rescaled: bool,
}

impl Distribution {
    /// Mass function of the observed integer values.
    pub fn from_counts(values: impl IntoIterator<Item = u64>) -> Self {
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        let mut n = 0u64;
        for v in values {
            *counts.entry(v).or_default() += 1;
            n += 1;
        }
        Distribution {
            support: counts.keys().map(|k| *k as f64).collect(),
            probs: counts.values().map(|c| *c as f64 / n as f64).collect(),
            cumulative: false,
            rescaled: false,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    /// `sum x P(x)` of the plain form.
    pub fn mean(&self) -> Result<f64> {
        if self.cumulative {
            return Err(Error::invalid("mean is defined on the non-cumulative form"));
        }
        Ok(self.support.iter().zip(&self.probs).map(|(x, p)| x * p).sum())
    }

    /// Complementary cumulative form `P(X >= x)`, summed from the tail.
    pub fn to_cumulative(&self) -> Distribution {
        if self.cumulative {
            return self.clone();
        }
        let mut probs = vec![0.0; self.probs.len()];
        let mut acc = 0.0;
        for i in (0..self.probs.len()).rev() {
            acc += self.probs[i];
            probs[i] = acc.min(1.0);
        }
        Distribution {
            support: self.support.clone(),
            probs,
            cumulative: true,
            rescaled: self.rescaled,
        }
    }

    /// `P(X >= x)` at an arbitrary `x`.
    pub fn tail(&self, x: f64) -> f64 {
        let c = self.to_cumulative();
        let i = c.support.partition_point(|s| *s < x);
        c.probs.get(i).copied().unwrap_or(0.0)
    }
}

fn finish(dist: Distribution, cumulative: bool) -> Distribution {
    if cumulative {
        dist.to_cumulative()
    } else {
        dist
    }
}

/// Degree distribution over every node of `graph`, isolated ones included.
pub fn degree_distribution(graph: &Graph, cumulative: bool) -> Distribution {
    finish(Distribution::from_counts(graph.degrees().into_values().map(|d| d as u64)), cumulative)
}

pub fn weight_distribution(net: &WeightedNetwork, cumulative: bool) -> Distribution {
    finish(Distribution::from_counts(net.weights().values().copied()), cumulative)
}

/// Distribution of `X / <x>`.
///
/// The rescaled variable keeps each probability mass and moves it to
/// `x / <x>`. Written as a density this is `<x> P(<x> u)`: the `<x>` factor
/// is the Jacobian of the change of variable, so masses are left unchanged.
/// The result has mean 1 and is invariant under scaling the data.
pub fn rescale(dist: &Distribution) -> Result<Distribution> {
    if dist.cumulative {
        return Err(Error::invalid("rescale expects the non-cumulative form"));
    }
    let mean = dist.mean()?;
    if !(mean > 0.0) || !mean.is_finite() {
        return Err(Error::invalid(format!("rescale needs a positive mean, got {mean}")));
    }
    Ok(Distribution {
        support: dist.support.iter().map(|x| x / mean).collect(),
        probs: dist.probs.clone(),
        cumulative: false,
        rescaled: true,
    })
}

/// `x,p` rows.
pub fn write_distribution<W: std::io::Write>(sink: W, dist: &Distribution) -> Result<()> {
    let mut w = crate::csvio::csv_writer(sink);
    w.write_record(["x", "p"])?;
    for (x, p) in dist.support.iter().zip(&dist.probs) {
        w.write_record([x.to_string(), p.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
