#![allow(dead_code)]

use eigenlocal::{DenseTensor, Scalar, C64};

pub fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Reference contraction: one explicit index loop per output entry.
pub fn naive_contract<S: Scalar>(a: &DenseTensor<S>, b: &DenseTensor<S>, pairs: &[(usize, usize)]) -> DenseTensor<S> {
    let free_a: Vec<usize> = (0..a.rank()).filter(|k| !pairs.iter().any(|p| p.0 == *k)).collect();
    let free_b: Vec<usize> = (0..b.rank()).filter(|k| !pairs.iter().any(|p| p.1 == *k)).collect();
    let mut out_shape: Vec<usize> = free_a.iter().map(|&k| a.shape()[k]).collect();
    out_shape.extend(free_b.iter().map(|&k| b.shape()[k]));
    let inner: Vec<usize> = pairs.iter().map(|p| a.shape()[p.0]).collect();
    let inner_total: usize = inner.iter().product();
    DenseTensor::from_fn(&out_shape, |idx| {
        let mut ia = vec![0; a.rank()];
        let mut ib = vec![0; b.rank()];
        for (slot, &k) in free_a.iter().enumerate() {
            ia[k] = idx[slot];
        }
        for (slot, &k) in free_b.iter().enumerate() {
            ib[k] = idx[free_a.len() + slot];
        }
        let mut sum = S::zero();
        for flat in 0..inner_total {
            let mut rem = flat;
            for (p, &len) in pairs.iter().zip(&inner).rev() {
                ia[p.0] = rem % len;
                ib[p.1] = rem % len;
                rem /= len;
            }
            sum = sum + a.get(&ia) * b.get(&ib);
        }
        sum
    })
}
