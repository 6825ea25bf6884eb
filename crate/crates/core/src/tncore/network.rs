//! Contraction by leg labels, for networks too irregular for positional pairs.

use crate::error::{Error, Result};
use crate::tncore::{DenseTensor, Scalar};

/// A tensor whose axes carry names. Legs with equal names are summed when two
/// labelled tensors are contracted.
#[derive(Clone, Debug)]
pub struct Labeled<S> {
    pub tensor: DenseTensor<S>,
    pub labels: Vec<String>,
}

impl<S: Scalar> Labeled<S> {
    pub fn new<L: Into<String>>(tensor: DenseTensor<S>, labels: impl IntoIterator<Item = L>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() != tensor.rank() {
            return Err(Error::Shape(format!(
                "{} labels for a rank-{} tensor",
                labels.len(),
                tensor.rank()
            )));
        }
        for (k, l) in labels.iter().enumerate() {
            if labels[..k].contains(l) {
                return Err(Error::InvalidArgument(format!("duplicate leg label {l}")));
            }
        }
        Ok(Self { tensor, labels })
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Sums over every label the two tensors share.
    pub fn contract(&self, other: &Self) -> Result<Self> {
        let pairs: Vec<(usize, usize)> = self
            .labels
            .iter()
            .enumerate()
            .filter_map(|(i, l)| other.position(l).map(|j| (i, j)))
            .collect();
        let tensor = self.tensor.contract(&other.tensor, &pairs)?;
        let labels = self
            .labels
            .iter()
            .enumerate()
            .filter(|(i, _)| !pairs.iter().any(|p| p.0 == *i))
            .map(|(_, l)| l.clone())
            .chain(
                other
                    .labels
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| !pairs.iter().any(|p| p.1 == *j))
                    .map(|(_, l)| l.clone()),
            )
            .collect();
        Ok(Self { tensor, labels })
    }

    /// Permutes the legs into the given label order.
    pub fn into_order<L: AsRef<str>>(&self, order: &[L]) -> Result<DenseTensor<S>> {
        if order.len() != self.labels.len() {
            return Err(Error::Shape(format!(
                "requested {} legs from a tensor with legs {:?}",
                order.len(),
                self.labels
            )));
        }
        let perm = order
            .iter()
            .map(|l| {
                self.position(l.as_ref())
                    .ok_or_else(|| Error::InvalidArgument(format!("no leg named {}", l.as_ref())))
            })
            .collect::<Result<Vec<_>>>()?;
        self.tensor.permute(&perm)
    }
}

/// Contracts a list of labelled tensors left to right.
pub fn contract_all<S: Scalar>(parts: &[Labeled<S>]) -> Result<Labeled<S>> {
    let (first, rest) = parts
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("empty network".into()))?;
    rest.iter().try_fold(first.clone(), |acc, t| acc.contract(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_of_matrices_is_matrix_product() {
        let a = DenseTensor::new(vec![2, 2], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = DenseTensor::new(vec![2, 2], vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let la = Labeled::new(a.clone(), ["i", "k"]).unwrap();
        let lb = Labeled::new(b.clone(), ["k", "j"]).unwrap();
        let c = contract_all(&[la, lb]).unwrap();
        assert_eq!(c.into_order(&["i", "j"]).unwrap(), a.contract(&b, &[(1, 0)]).unwrap());
        let t = c.into_order(&["j", "i"]).unwrap();
        assert_eq!(t.get(&[0, 1]), 4.0);
    }

    #[test]
    fn label_errors() {
        let a = DenseTensor::<f64>::zeros(&[2, 2]);
        assert!(Labeled::new(a.clone(), ["x"]).is_err());
        assert!(Labeled::new(a.clone(), ["x", "x"]).is_err());
        let l = Labeled::new(a, ["x", "y"]).unwrap();
        assert!(l.into_order(&["x", "z"]).is_err());
    }
}
