//! Bernstein-basis evaluation of polynomial distortions.
//!
//! In the power basis `h(p) = Σ c_j p^j` the complement `1 - h(p)` loses all
//! significant digits as `p → 1` (a parallel system of six has
//! `1 - h = (1-p)^6`). In the Bernstein basis both `h` and `1 - h` are sums
//! of nonnegative terms for coherent systems, so they stay accurate on the
//! whole unit interval. Coefficients are converted exactly in integer
//! arithmetic and rounded once.

use crate::numeric::{binomial, Prob};

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct BernsteinForm {
    degree: usize,
    b: Vec<f64>,
    one_minus_b: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

/// Integer Bernstein numerators `e_i` with `b_i = e_i / C(D, i)`.
fn numerators(power: &[i128], degree: usize) -> Vec<i128> {
    (0..=degree)
        .map(|i| {
            (0..=i)
                .filter(|&j| j < power.len())
                .map(|j| binomial(degree - j, i - j) * power[j])
                .sum()
        })
        .collect()
}

impl BernsteinForm {
    /// `h = base + theta * part`, both given as power-basis integer
    /// coefficients.
    pub fn new(base: &[i128], part: &[i128], theta: f64) -> Self {
        let degree = base.len().max(part.len()).saturating_sub(1).max(1);
        let ea = numerators(base, degree);
        let eb = numerators(part, degree);
        let c: Vec<i128> = (0..=degree).map(|i| binomial(degree, i)).collect();
        let ratio = |num: i128, den: i128| num as f64 / den as f64;

        let b = (0..=degree)
            .map(|i| ratio(ea[i], c[i]) + theta * ratio(eb[i], c[i]))
            .collect();
        let one_minus_b = (0..=degree)
            .map(|i| ratio(c[i] - ea[i], c[i]) - theta * ratio(eb[i], c[i]))
            .collect();
        let first = |e: &[i128], i: usize| ratio(e[i + 1] * c[i] - e[i] * c[i + 1], c[i] * c[i + 1]);
        let d1 = (0..degree)
            .map(|i| first(&ea, i) + theta * first(&eb, i))
            .collect();
        let second = |e: &[i128], i: usize| {
            let num =
                e[i + 2] * c[i] * c[i + 1] - 2 * e[i + 1] * c[i] * c[i + 2] + e[i] * c[i + 1] * c[i + 2];
            ratio(num, c[i] * c[i + 1] * c[i + 2])
        };
        let d2 = (0..degree.saturating_sub(1))
            .map(|i| second(&ea, i) + theta * second(&eb, i))
            .collect();
        BernsteinForm {
            degree,
            b,
            one_minus_b,
            d1,
            d2,
        }
    }

    fn basis(degree: usize, pr: &Prob) -> impl Iterator<Item = f64> + '_ {
        (0..=degree)
            .map(move |i| binomial(degree, i) as f64 * pr.p.powi(i as i32) * pr.q.powi((degree - i) as i32))
    }

    fn dot(coef: &[f64], degree: usize, pr: &Prob) -> f64 {
        coef.iter().zip(Self::basis(degree, pr)).map(|(c, w)| c * w).sum()
    }

    pub fn value(&self, pr: &Prob) -> f64 {
        Self::dot(&self.b, self.degree, pr)
    }

    pub fn complement(&self, pr: &Prob) -> f64 {
        Self::dot(&self.one_minus_b, self.degree, pr)
    }

    pub fn d1(&self, pr: &Prob) -> f64 {
        self.degree as f64 * Self::dot(&self.d1, self.degree - 1, pr)
    }

    pub fn d2(&self, pr: &Prob) -> f64 {
        if self.degree < 2 {
            return 0.0;
        }
        let d = self.degree as f64;
        d * (d - 1.0) * Self::dot(&self.d2, self.degree - 2, pr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_complement_is_exact_near_one() {
        // 1 - (1-p)^6 in the power basis
        let power: Vec<i128> = (0..=6)
            .map(|j| {
                if j == 0 {
                    0
                } else {
                    -binomial(6, j) * (-1i128).pow(j as u32)
                }
            })
            .collect();
        let form = BernsteinForm::new(&power, &[], 0.0);
        let pr = Prob::from_complement(1e-3);
        let comp = form.complement(&pr);
        assert!((comp / 1e-18 - 1.0).abs() < 1e-12, "{comp}");
        assert!((form.d1(&pr) / (6.0 * 1e-15) - 1.0).abs() < 1e-12);
        assert!((form.d2(&pr) / (-30.0 * 1e-12) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn theta_part_matches_power_basis() {
        // 2p² - p³ - θ p³(1-p)³ with θ = 0.7
        let form = BernsteinForm::new(&[0, 0, 2, -1], &[0, 0, 0, -1, 3, -3, 1], 0.7);
        for p in [0.1, 0.5, 0.8] {
            let pr = Prob::new(p);
            let expect = 2.0 * p * p - p.powi(3) - 0.7 * p.powi(3) * (1.0 - p).powi(3);
            assert!((form.value(&pr) - expect).abs() < 1e-15);
            assert!((form.complement(&pr) - (1.0 - expect)).abs() < 1e-15);
        }
    }
}
