//! The polynomials `b_k(λ)` of the uniform large-`n` expansion of `P(n, λn)`:
//! `b_0 = 1`, `b_k = λ(1-λ) b'_{k-1} + (2k-1) λ b_{k-1}`.

use crate::error::{domain, Result};

/// Largest index whose coefficients fit in `i128`.
pub const BK_MAX_INDEX: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BkPolynomial {
    pub k: usize,
    /// Coefficients in ascending powers of λ.
    pub coeffs: Vec<i128>,
}

impl BkPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|&c| c != 0)
            .unwrap_or(0)
    }

    /// Horner evaluation.
    pub fn eval(&self, lambda: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * lambda + c as f64)
    }
}

/// `b_0, …, b_{k_max}` with exact integer coefficients.
pub fn bk_polynomials(k_max: usize) -> Result<Vec<BkPolynomial>> {
    if k_max > BK_MAX_INDEX {
        return Err(domain(
            "bk_polynomials",
            format!("k_max={k_max} exceeds {BK_MAX_INDEX}, coefficients would overflow"),
        ));
    }
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(BkPolynomial {
        k: 0,
        coeffs: vec![1],
    });
    for k in 1..=k_max {
        let prev = &out[k - 1].coeffs;
        // [λ^i] b_k = i c_i + (2k - i) c_{i-1}
        let mut next = vec![0i128; prev.len() + 1];
        for (i, slot) in next.iter_mut().enumerate() {
            let own = prev.get(i).map_or(0, |&c| i as i128 * c);
            let lower = if i > 0 {
                (2 * k as i128 - i as i128) * prev[i - 1]
            } else {
                0
            };
            *slot = own + lower;
        }
        out.push(BkPolynomial { k, coeffs: next });
    }
    Ok(out)
}
