use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gap::BitString;
use crate::linalg::CMatrix;

/// Allowed deviation of a distribution's total mass from 1.
pub const MASS_TOL: f64 = 1e-12;

/// A probability distribution over binary strings.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: BTreeMap<BitString, f64>,
}

impl Distribution {
    pub fn new(probs: BTreeMap<BitString, f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::input("distribution has no support"));
        }
        if let Some((y, p)) = probs.iter().find(|(_, p)| !(**p >= 0.0) || !p.is_finite()) {
            return Err(Error::input(format!("probability {p} for `{y}`")));
        }
        let total: f64 = probs.values().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::input(format!("probabilities sum to {total}")));
        }
        Ok(Distribution { probs })
    }

    /// The distribution with `weights[y]` on the `width`-bit string `y`;
    /// weights are renormalized and zero weights dropped.
    pub fn from_weights(width: usize, weights: &[f64]) -> Result<Self> {
        if weights.len() != 1usize << width {
            return Err(Error::dims(format!("{} weights for {width}-bit strings", weights.len())));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::input("weights have no positive mass"));
        }
        let probs = weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > 0.0)
            .map(|(y, w)| (BitString::from_u64(y as u64, width), w / total))
            .collect();
        Distribution::new(probs)
    }

    pub fn uniform(width: usize) -> Self {
        Distribution::from_weights(width, &vec![1.0; 1 << width]).expect("uniform weights")
    }

    pub fn point_mass(y: BitString) -> Self {
        Distribution {
            probs: BTreeMap::from([(y, 1.0)]),
        }
    }

    pub fn prob(&self, y: &BitString) -> f64 {
        self.probs.get(y).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BitString, f64)> {
        self.probs.iter().map(|(y, p)| (y, *p))
    }

    pub fn support_len(&self) -> usize {
        self.probs.len()
    }

    /// Dense weight vector indexed by `width`-bit strings.
    pub fn dense(&self, width: usize) -> Result<Vec<f64>> {
        let mut out = vec![0.0; 1 << width];
        for (y, p) in &self.probs {
            if y.len() != width {
                return Err(Error::input(format!("`{y}` is not a {width}-bit string")));
            }
            out[y.to_u64() as usize] += p;
        }
        Ok(out)
    }

    /// Total-variation distance `½ Σ |p(y) − q(y)|`.
    pub fn total_variation(&self, other: &Distribution) -> f64 {
        let keys: std::collections::BTreeSet<&BitString> =
            self.probs.keys().chain(other.probs.keys()).collect();
        0.5 * keys.into_iter().map(|y| (self.prob(y) - other.prob(y)).abs()).sum::<f64>()
    }
}

impl Serialize for Distribution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_map(self.probs.iter().map(|(y, p)| (bit_key(y), p)))
    }
}

fn bit_key(y: &BitString) -> String {
    y.bits().iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// A floating density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(pub CMatrix);

impl DensityMatrix {
    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix(CMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0))
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m = &self.0;
        let part = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..m.nrows())
                .map(|r| (0..m.ncols()).map(|c| f(&m[(r, c)])).collect())
                .collect()
        };
        let mut st = s.serialize_struct("DensityMatrix", 2)?;
        st.serialize_field("re", &part(|z| z.re))?;
        st.serialize_field("im", &part(|z| z.im))?;
        st.end()
    }
}

/// Alice's strategy: a distribution over classical messages (CQRG) or a
/// density operator (QRG, MQRG).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Strategy {
    Distribution(Distribution),
    Density(DensityMatrix),
}
