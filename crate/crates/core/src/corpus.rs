//! Named test functions on `[0,1]^d` and a few network sequences used by the
//! audits and the learner experiments.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relu_net::{Layer, Network, SparseMatrix};

/// A function registered by name: `zero`, `zeta:M'`, `affine:a,b`, `sqrt`,
/// `cusp` or `net:<file>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CorpusFn {
    Zero,
    /// `scale · ϱ(1 − M′ Σ x_i)`.
    Zeta { m_prime: f64, scale: f64 },
    /// `a · Σ x_i + b`.
    Affine { a: f64, b: f64 },
    /// `√x₁`.
    Sqrt,
    /// `|2x₁ − 1|^{1/2}`.
    Cusp,
    Net { network: Network },
}

impl CorpusFn {
    /// Parses a corpus name; `net:` paths are read from disk.
    pub fn parse(name: &str) -> Result<Self> {
        let bad = || Error::InvalidParams(format!("unknown corpus function {name:?}"));
        let number = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
        match name.split_once(':') {
            None => match name {
                "zero" => Ok(CorpusFn::Zero),
                "sqrt" => Ok(CorpusFn::Sqrt),
                "cusp" => Ok(CorpusFn::Cusp),
                _ => Err(bad()),
            },
            Some(("zeta", m)) => {
                let m_prime = number(m)?;
                if !(m_prime >= 1.0 && m_prime.is_finite()) {
                    return Err(Error::InvalidParams(format!("ζ needs M′ ≥ 1, got {m_prime}")));
                }
                Ok(CorpusFn::Zeta { m_prime, scale: 1.0 })
            }
            Some(("affine", ab)) => {
                let (a, b) = ab.split_once(',').ok_or_else(bad)?;
                Ok(CorpusFn::Affine { a: number(a)?, b: number(b)? })
            }
            Some(("net", path)) => Self::from_network_file(Path::new(path)),
            _ => Err(bad()),
        }
    }

    pub fn from_network_file(path: &Path) -> Result<Self> {
        let network = Network::from_json(&std::fs::read_to_string(path)?)?;
        if network.output_dim() != 1 {
            return Err(Error::InvalidNetwork(format!(
                "{} has output dimension {}",
                path.display(),
                network.output_dim()
            )));
        }
        Ok(CorpusFn::Net { network })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            CorpusFn::Zero => 0.0,
            CorpusFn::Zeta { m_prime, scale } => scale * (1.0 - m_prime * x.iter().sum::<f64>()).max(0.0),
            CorpusFn::Affine { a, b } => a * x.iter().sum::<f64>() + b,
            CorpusFn::Sqrt => x[0].max(0.0).sqrt(),
            CorpusFn::Cusp => (2.0 * x[0] - 1.0).abs().sqrt(),
            CorpusFn::Net { network } => network.eval_scalar(x),
        }
    }

    /// Whether difference quotients over adjacent lattice pairs give `Lip` exactly
    /// (up to the breakpoints falling on the lattice).
    pub fn is_piecewise_affine(&self) -> bool {
        !matches!(self, CorpusFn::Sqrt | CorpusFn::Cusp)
    }

    /// Input dimension the function requires, if fixed.
    pub fn input_dim(&self) -> Option<usize> {
        match self {
            CorpusFn::Net { network } => Some(network.input_dim()),
            _ => None,
        }
    }
}

impl fmt::Display for CorpusFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusFn::Zero => f.write_str("zero"),
            CorpusFn::Zeta { m_prime, scale } if *scale == 1.0 => write!(f, "zeta:{m_prime}"),
            CorpusFn::Zeta { m_prime, scale } => write!(f, "{scale}*zeta:{m_prime}"),
            CorpusFn::Affine { a, b } => write!(f, "affine:{a},{b}"),
            CorpusFn::Sqrt => f.write_str("sqrt"),
            CorpusFn::Cusp => f.write_str("cusp"),
            CorpusFn::Net { network } => write!(f, "net{:?}", network.architecture()),
        }
    }
}

/// Partial sums `F_m = Σ_{j=0}^{m} 2^{−j} · ϱ(x₁ − c_j)` with `c_j = 1/2 − 2^{−j−2}`,
/// for `m` in `ms`. Each `F_m` is a one-hidden-layer network with `m + 1`
/// neurons and weights in `[−1/2, 1]`; successive differences have sup norm
/// `2^{−m−1}(1/2 + 2^{−m−3})`.
pub fn geometric_ramp_sequence(d: usize, ms: std::ops::RangeInclusive<u32>) -> Result<Vec<Network>> {
    if d == 0 {
        return Err(Error::InvalidParams("d must be at least 1".into()));
    }
    ms.map(|m| {
        let width = m as usize + 1;
        let first = SparseMatrix::new(width, d, (0..width).map(|j| (j, 0, 1.0)).collect())?;
        let bias = (0..width).map(|j| -(0.5 - 2f64.powi(-(j as i32) - 2))).collect();
        let out = SparseMatrix::new(1, width, (0..width).map(|j| (0, j, 2f64.powi(-(j as i32)))).collect())?;
        Network::new(vec![Layer::new(first, bias)?, Layer::linear(out)])
    })
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_names() {
        assert_eq!(CorpusFn::parse("zeta:3").unwrap(), CorpusFn::Zeta { m_prime: 3.0, scale: 1.0 });
        assert_eq!(CorpusFn::parse("affine:2,-1").unwrap(), CorpusFn::Affine { a: 2.0, b: -1.0 });
        assert_eq!(CorpusFn::parse("sqrt").unwrap(), CorpusFn::Sqrt);
        assert!(CorpusFn::parse("zeta:0.5").is_err());
        assert!(CorpusFn::parse("affine:1").is_err());
        assert!(CorpusFn::parse("bogus").is_err());
        assert!(CorpusFn::parse("net:/nonexistent/file.json").is_err());
        for name in ["zeta:3", "affine:2,-1", "sqrt", "cusp", "zero"] {
            assert_eq!(CorpusFn::parse(name).unwrap().to_string(), name);
        }
    }

    #[test]
    fn evaluation() {
        let z = CorpusFn::parse("zeta:2").unwrap();
        assert_eq!(z.eval(&[0.0]), 1.0);
        assert_eq!(z.eval(&[0.5]), 0.0);
        assert_eq!(CorpusFn::parse("zeta:1").unwrap().eval(&[0.25, 0.25]), 0.5);
        assert_eq!(CorpusFn::Cusp.eval(&[0.5]), 0.0);
        assert_eq!(CorpusFn::Cusp.eval(&[1.0]), 1.0);
        assert_eq!(CorpusFn::parse("affine:2,-1").unwrap().eval(&[0.25, 0.5]), 0.5);
    }

    #[test]
    fn network_file_round_trip() {
        let dir = std::env::temp_dir().join(format!("nnapprox-corpus-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("net.json");
        let net = geometric_ramp_sequence(1, 2..=2).unwrap().remove(0);
        std::fs::write(&path, net.to_json().unwrap()).unwrap();
        let f = CorpusFn::parse(&format!("net:{}", path.display())).unwrap();
        assert_eq!(f.eval(&[0.9]), net.realize(&[0.9]).unwrap()[0]);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn ramp_sequence_differences() {
        let nets = geometric_ramp_sequence(1, 0..=5).unwrap();
        for (m, w) in nets.windows(2).enumerate() {
            let diff = (w[1].eval_scalar(&[1.0]) - w[0].eval_scalar(&[1.0])).abs();
            let expect = 2f64.powi(-(m as i32) - 1) * (0.5 + 2f64.powi(-(m as i32) - 3));
            assert!((diff - expect).abs() < 1e-15, "m={m}: {diff} vs {expect}");
            assert_eq!(w[0].weight_count(), 2 * (m + 1) + m + 1);
        }
    }
}
