use crate::copulas::{Copula, CopulaFamily};
use crate::error::{Error, Result};
use crate::numeric::{binomial, Flag, Flagged, Prob};

use super::bernstein::BernsteinForm;
use super::structure::Structure;

/// Points closer than this to 0 or 1 are clamped before evaluating the
/// `H` and `R` functionals, and the result is flagged.
pub const ENDPOINT_CLAMP: f64 = 1e-9;

const MONOTONE_GRID: usize = 10_000;
const MONOTONE_SLACK: f64 = 1e-12;

/// Dual distortion `h(p) = Σ_j c_j K_j(p)`, where `K_j` is the copula with
/// `j` coordinates at `p` and the others at one.
#[derive(Clone, Debug, PartialEq)]
pub struct Distortion {
    coefficients: Vec<i64>,
    copula: Copula,
    kernel: Kernel,
}

#[derive(Clone, Debug, PartialEq)]
enum Kernel {
    /// Independence and FGM give polynomials in `p`.
    Bernstein(BernsteinForm),
    /// Archimedean families are summed term by term.
    Exchangeable,
}

/// `h`, `1 - h`, `h'` and `h''` at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistortionValue {
    pub h: f64,
    pub complement: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Builds `h` from minimal path sets by inclusion–exclusion: every nonempty
/// subfamily of path sets with union `U` adds `(-1)^{|subfamily|+1}` to the
/// coefficient of `K_{|U|}`.
pub fn build_distortion(structure: &Structure, copula: &Copula) -> Result<Distortion> {
    if copula.dim() != structure.n() {
        return Err(Error::DimensionMismatch {
            expected: structure.n(),
            actual: copula.dim(),
        });
    }
    let masks = structure.masks();
    let subfamilies = 1usize << masks.len();
    let mut unions = vec![0u32; subfamilies];
    let mut coefficients = vec![0i64; structure.n() + 1];
    for family in 1..subfamilies {
        let low = family.trailing_zeros() as usize;
        unions[family] = unions[family & (family - 1)] | masks[low];
        let sign = if family.count_ones() % 2 == 1 { 1 } else { -1 };
        coefficients[unions[family].count_ones() as usize] += sign;
    }
    Distortion::from_coefficients(coefficients, *copula)
}

/// `h_{k|n}(p) = Σ_{j=k}^{n} C(n,j) p^j (1-p)^{n-j}` for i.i.d. components,
/// expanded into the coefficient form.
pub fn kofn_distortion(k: usize, n: usize) -> Result<Distortion> {
    if k == 0 || k > n || n > super::MAX_COMPONENTS {
        return Err(Error::IndexOutOfRange(format!("k = {k}, n = {n}")));
    }
    let mut coefficients = vec![0i64; n + 1];
    for (j, c) in coefficients.iter_mut().enumerate().skip(k) {
        let mut acc = 0i128;
        for i in k..=j {
            let sign = if (j - i) % 2 == 0 { 1 } else { -1 };
            acc += sign * binomial(n, i) * binomial(n - i, j - i);
        }
        *c = acc as i64;
    }
    Distortion::from_coefficients(coefficients, Copula::independence(n))
}

impl Distortion {
    /// Validates `h(0) = 0`, `h(1) = 1` and monotonicity on a fine grid.
    pub fn from_coefficients(coefficients: Vec<i64>, copula: Copula) -> Result<Self> {
        if coefficients.len() != copula.dim() + 1 {
            return Err(Error::DimensionMismatch {
                expected: copula.dim() + 1,
                actual: coefficients.len(),
            });
        }
        if coefficients[0] != 0 {
            return Err(Error::InvalidDistortion("h(0) != 0".into()));
        }
        if coefficients.iter().sum::<i64>() != 1 {
            return Err(Error::InvalidDistortion("h(1) != 1".into()));
        }
        let kernel = match polynomial_form(&coefficients, &copula) {
            Some(form) => Kernel::Bernstein(form),
            None => Kernel::Exchangeable,
        };
        let d = Distortion {
            coefficients,
            copula,
            kernel,
        };
        let mut prev = 0.0;
        for i in 1..=MONOTONE_GRID {
            let h = d.at(&Prob::new(i as f64 / MONOTONE_GRID as f64)).h;
            if h < prev - MONOTONE_SLACK {
                return Err(Error::InvalidDistortion(format!(
                    "h decreases near p = {}",
                    i as f64 / MONOTONE_GRID as f64
                )));
            }
            prev = h;
        }
        Ok(d)
    }

    /// Nonzero `(j, c_j)` pairs.
    pub fn coefficients(&self) -> Vec<(usize, i64)> {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(j, &c)| (j, c))
            .collect()
    }

    pub fn copula(&self) -> &Copula {
        &self.copula
    }

    /// Full evaluation at a probability carried with its complement.
    pub fn at(&self, pr: &Prob) -> DistortionValue {
        match &self.kernel {
            Kernel::Bernstein(form) => DistortionValue {
                h: form.value(pr),
                complement: form.complement(pr),
                d1: form.d1(pr),
                d2: form.d2(pr),
            },
            Kernel::Exchangeable => {
                let mut out = DistortionValue {
                    h: 0.0,
                    complement: 0.0,
                    d1: 0.0,
                    d2: 0.0,
                };
                for (j, c) in self.coefficients() {
                    let parts = self.copula.parts(pr, j);
                    let c = c as f64;
                    out.h += c * parts.value;
                    out.complement += c * parts.complement;
                    out.d1 += c * parts.d1;
                    out.d2 += c * parts.d2;
                }
                out
            }
        }
    }

    pub fn h_eval(&self, p: f64) -> Result<f64> {
        check_closed(p)?;
        Ok(self.at(&Prob::new(p)).h.clamp(0.0, 1.0))
    }

    /// `1 - h(p)` without cancellation.
    pub fn h_complement(&self, p: f64) -> Result<f64> {
        check_closed(p)?;
        Ok(self.at(&Prob::new(p)).complement.clamp(0.0, 1.0))
    }

    /// `h'(p)` from the closed-form derivatives of `K_j`.
    pub fn h_deriv(&self, p: f64) -> Result<f64> {
        check_open(p)?;
        Ok(self.at(&Prob::new(p)).d1)
    }

    /// `h'(p)` by central differences with step `max(1e-6, 1e-6·min(p, 1-p))`.
    /// Kept as an independent route for checking [`Distortion::h_deriv`].
    pub fn h_deriv_fd(&self, p: f64) -> Result<f64> {
        check_open(p)?;
        let step = f64::max(1e-6, 1e-6 * p.min(1.0 - p)).min(p.min(1.0 - p) / 2.0);
        let up = self.at(&Prob::new(p + step)).h;
        let dn = self.at(&Prob::new(p - step)).h;
        Ok((up - dn) / (2.0 * step))
    }

    pub fn h_second_deriv(&self, p: f64) -> Result<f64> {
        check_open(p)?;
        Ok(self.at(&Prob::new(p)).d2)
    }

    /// `H(p) = p h'(p) / h(p)`.
    pub fn hazard_transfer(&self, p: f64) -> Result<Flagged> {
        self.clamped(p, |d, pr| hazard_transfer(pr, &d.at(pr)))
    }

    /// `R(p) = (1 - p) h'(p) / (1 - h(p))`.
    pub fn rev_hazard_transfer(&self, p: f64) -> Result<Flagged> {
        self.clamped(p, |d, pr| rev_hazard_transfer(pr, &d.at(pr)))
    }

    /// `H'(p)`, from `h''` in closed form.
    pub fn hazard_transfer_deriv(&self, p: f64) -> Result<Flagged> {
        self.clamped(p, |d, pr| {
            let v = d.at(pr);
            let big_h = hazard_transfer(pr, &v);
            big_h.map(|hh| hh / pr.p * (1.0 + pr.p * v.d2 / v.d1 - hh))
        })
    }

    /// `R'(p)`, from `h''` in closed form.
    pub fn rev_hazard_transfer_deriv(&self, p: f64) -> Result<Flagged> {
        self.clamped(p, |d, pr| {
            let v = d.at(pr);
            let big_r = rev_hazard_transfer(pr, &v);
            big_r.map(|rr| rr / pr.q * (rr - 1.0 + pr.q * v.d2 / v.d1))
        })
    }

    /// `(1 - p) H'(p) / H(p)`.
    pub fn hazard_transfer_elasticity(&self, p: f64) -> Result<Flagged> {
        self.clamped(p, |d, pr| {
            let v = d.at(pr);
            let big_h = hazard_transfer(pr, &v);
            big_h.map(|hh| pr.q / pr.p * (1.0 + pr.p * v.d2 / v.d1 - hh))
        })
    }

    /// `p R'(p) / R(p)`.
    pub fn rev_hazard_transfer_elasticity(&self, p: f64) -> Result<Flagged> {
        self.clamped(p, |d, pr| {
            let v = d.at(pr);
            let big_r = rev_hazard_transfer(pr, &v);
            big_r.map(|rr| pr.p / pr.q * (rr - 1.0 + pr.q * v.d2 / v.d1))
        })
    }

    fn clamped(&self, p: f64, f: impl Fn(&Self, &Prob) -> Fallible) -> Result<Flagged> {
        check_open(p)?;
        let (pr, boundary) = if p < ENDPOINT_CLAMP {
            (Prob::new(ENDPOINT_CLAMP), true)
        } else if 1.0 - p < ENDPOINT_CLAMP {
            (Prob::from_complement(ENDPOINT_CLAMP), true)
        } else {
            (Prob::new(p), false)
        };
        let out = match f(self, &pr) {
            Fallible::Value(v) if boundary => Flagged::flagged(v, Flag::Boundary),
            Fallible::Value(v) => Flagged::from(v),
            Fallible::Flag(flag) => Flagged::flagged(
                if flag == Flag::Underflow {
                    f64::INFINITY
                } else {
                    f64::NAN
                },
                flag,
            ),
        };
        Ok(out)
    }

    /// Evaluates `H` at a probability carried with its complement, without
    /// clamping. Used by quadrature, which never touches the endpoints.
    pub(crate) fn hazard_transfer_at(&self, pr: &Prob) -> f64 {
        match hazard_transfer(pr, &self.at(pr)) {
            Fallible::Value(v) => v,
            Fallible::Flag(_) => f64::NAN,
        }
    }

    pub(crate) fn rev_hazard_transfer_at(&self, pr: &Prob) -> f64 {
        match rev_hazard_transfer(pr, &self.at(pr)) {
            Fallible::Value(v) => v,
            Fallible::Flag(_) => f64::NAN,
        }
    }
}

enum Fallible {
    Value(f64),
    Flag(Flag),
}

impl Fallible {
    fn map(self, f: impl FnOnce(f64) -> f64) -> Fallible {
        match self {
            Fallible::Value(v) => Fallible::Value(f(v)),
            other => other,
        }
    }
}

fn ratio(num: f64, den: f64) -> Fallible {
    if den > 0.0 {
        Fallible::Value(num / den)
    } else if num == 0.0 {
        Fallible::Flag(Flag::Indeterminate)
    } else {
        Fallible::Flag(Flag::Underflow)
    }
}

fn hazard_transfer(pr: &Prob, v: &DistortionValue) -> Fallible {
    ratio(pr.p * v.d1, v.h)
}

fn rev_hazard_transfer(pr: &Prob, v: &DistortionValue) -> Fallible {
    ratio(pr.q * v.d1, v.complement)
}

fn polynomial_form(coefficients: &[i64], copula: &Copula) -> Option<BernsteinForm> {
    let mut base: Vec<i128> = Vec::new();
    let mut part: Vec<i128> = Vec::new();
    let mut theta = 0.0;
    for (j, &c) in coefficients.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let (kb, kp, t) = copula.polynomial(j)?;
        theta = t;
        accumulate(&mut base, &kb, c as i128);
        accumulate(&mut part, &kp, c as i128);
    }
    if matches!(copula.family(), CopulaFamily::Independence) {
        part.clear();
    }
    Some(BernsteinForm::new(&base, &part, theta))
}

fn accumulate(into: &mut Vec<i128>, poly: &[i128], scale: i128) {
    if into.len() < poly.len() {
        into.resize(poly.len(), 0);
    }
    for (acc, &c) in into.iter_mut().zip(poly) {
        *acc += scale * c;
    }
}

fn check_closed(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::OutOfDomain {
            what: "p",
            value: p,
            domain: "[0, 1]",
        })
    }
}

fn check_open(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfDomain {
            what: "p",
            value: p,
            domain: "(0, 1)",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copulas::CopulaFamily;

    fn fgm(theta: f64) -> Copula {
        Copula::new(CopulaFamily::Fgm { theta }, 3).unwrap()
    }

    fn grid(n: usize) -> impl Iterator<Item = f64> {
        (0..=n).map(move |i| i as f64 / n as f64)
    }

    #[test]
    fn series_independent_is_cube() {
        let d = build_distortion(&Structure::series(3).unwrap(), &Copula::independence(3)).unwrap();
        assert_eq!(d.coefficients(), vec![(3, 1)]);
        for p in grid(100) {
            assert!((d.h_eval(p).unwrap() - p.powi(3)).abs() < 1e-15);
        }
        assert_eq!(d.h_eval(0.5).unwrap(), 0.125);
        assert!((d.h_deriv(0.5).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn fgm_example_polynomial() {
        let s = Structure::new(3, vec![vec![1, 2], vec![1, 3]]).unwrap();
        for theta in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            let d = build_distortion(&s, &fgm(theta)).unwrap();
            assert_eq!(d.coefficients(), vec![(2, 2), (3, -1)]);
            for p in grid(1000) {
                let expect = 2.0 * p * p - p.powi(3) - theta * p.powi(3) * (1.0 - p).powi(3);
                assert!((d.h_eval(p).unwrap() - expect).abs() < 1e-14);
            }
        }
        let d = build_distortion(&s, &fgm(1.0)).unwrap();
        assert!((d.h_eval(0.5).unwrap() - 0.359375).abs() < 1e-15);
    }

    #[test]
    fn two_out_of_three() {
        let s = Structure::k_out_of_n(2, 3).unwrap();
        let d = build_distortion(&s, &Copula::independence(3)).unwrap();
        assert_eq!(d.coefficients(), vec![(2, 3), (3, -2)]);
        let k = kofn_distortion(2, 3).unwrap();
        assert_eq!(k.coefficients(), vec![(2, 3), (3, -2)]);
    }

    #[test]
    fn kofn_endpoints() {
        for n in 1..=8 {
            let series = kofn_distortion(n, n).unwrap();
            assert_eq!(series.coefficients(), vec![(n, 1)]);
            let parallel = kofn_distortion(1, n).unwrap();
            for p in [0.1f64, 0.4, 0.9] {
                let expect = 1.0 - (1.0 - p).powi(n as i32);
                assert!((parallel.h_eval(p).unwrap() - expect).abs() < 1e-14);
            }
        }
        assert!(kofn_distortion(0, 3).is_err());
        assert!(kofn_distortion(4, 3).is_err());
    }

    #[test]
    fn gumbel_series_power_law() {
        for (m, theta) in [(3usize, 2.0f64), (4, 2.0), (5, 3.0)] {
            let c = Copula::new(CopulaFamily::GumbelHougaard { theta }, m).unwrap();
            let d = build_distortion(&Structure::series(m).unwrap(), &c).unwrap();
            let a = (m as f64).powf(1.0 / theta);
            for p in [0.01, 0.25, 0.5, 0.99] {
                assert!((d.h_eval(p).unwrap() - p.powf(a)).abs() < 1e-15);
            }
        }
        let c = Copula::new(CopulaFamily::GumbelHougaard { theta: 2.0 }, 3).unwrap();
        let d = build_distortion(&Structure::series(3).unwrap(), &c).unwrap();
        let s3 = 3f64.sqrt();
        let expect = s3 * 0.25f64.powf(s3 - 1.0);
        assert!((d.h_deriv(0.25).unwrap() - expect).abs() < 1e-14);
        assert!((expect - 0.6278).abs() < 1e-4);
    }

    #[test]
    fn transfer_functionals() {
        let cube = kofn_distortion(3, 3).unwrap();
        for p in [0.001, 0.2, 0.7, 0.999] {
            assert!((cube.hazard_transfer(p).unwrap().value - 3.0).abs() < 1e-13);
            assert!(cube.hazard_transfer_elasticity(p).unwrap().value.abs() < 1e-9);
        }
        let c = Copula::new(CopulaFamily::GumbelHougaard { theta: 2.0 }, 4).unwrap();
        let d = build_distortion(&Structure::series(4).unwrap(), &c).unwrap();
        let a = 2.0f64;
        for p in [0.01, 0.3, 0.9, 0.999] {
            let expect = a * (1.0 - p) * p.powf(a - 1.0) / (1.0 - p.powf(a));
            let got = d.rev_hazard_transfer(p).unwrap().value;
            assert!(
                (got - expect).abs() < 1e-12 * expect.abs().max(1.0),
                "{p}: {got} {expect}"
            );
        }
    }

    #[test]
    fn fgm_ratio_at_zero_is_two_thirds() {
        let s = Structure::new(3, vec![vec![1, 2], vec![1, 3]]).unwrap();
        let d1 = build_distortion(&s, &fgm(1.0)).unwrap();
        let d2 = kofn_distortion(3, 3).unwrap();
        let r = d1.hazard_transfer(1e-12).unwrap();
        assert_eq!(r.flag, Some(Flag::Boundary));
        let ratio = r.value / d2.hazard_transfer(1e-12).unwrap().value;
        assert!((ratio - 2.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let s = Structure::new(3, vec![vec![1, 2], vec![1, 3]]).unwrap();
        let cases = vec![
            build_distortion(&s, &fgm(-0.6)).unwrap(),
            kofn_distortion(2, 5).unwrap(),
            build_distortion(
                &s,
                &Copula::new(CopulaFamily::ClaytonOakes { theta: 1.3 }, 3).unwrap(),
            )
            .unwrap(),
        ];
        for d in &cases {
            for p in [0.05, 0.3, 0.5, 0.8, 0.95] {
                let exact = d.h_deriv(p).unwrap();
                let fd = d.h_deriv_fd(p).unwrap();
                assert!((exact - fd).abs() < 1e-8, "{p}: {exact} vs {fd}");
                let step = 1e-5;
                let hd = d.hazard_transfer_deriv(p).unwrap().value;
                let hfd = (d.hazard_transfer(p + step).unwrap().value
                    - d.hazard_transfer(p - step).unwrap().value)
                    / (2.0 * step);
                assert!(
                    (hd - hfd).abs() < 1e-6 * (1.0 + hd.abs()),
                    "H' at {p}: {hd} vs {hfd}"
                );
                let rd = d.rev_hazard_transfer_deriv(p).unwrap().value;
                let rfd = (d.rev_hazard_transfer(p + step).unwrap().value
                    - d.rev_hazard_transfer(p - step).unwrap().value)
                    / (2.0 * step);
                assert!(
                    (rd - rfd).abs() < 1e-6 * (1.0 + rd.abs()),
                    "R' at {p}: {rd} vs {rfd}"
                );
            }
        }
    }

    #[test]
    fn domain_errors() {
        let d = kofn_distortion(2, 3).unwrap();
        assert!(d.h_eval(-0.1).is_err());
        assert!(d.h_eval(1.1).is_err());
        assert!(d.h_deriv(0.0).is_err());
        assert!(d.hazard_transfer(1.0).is_err());
        assert_eq!(d.h_eval(0.0).unwrap(), 0.0);
        assert_eq!(d.h_eval(1.0).unwrap(), 1.0);
    }

    #[test]
    fn dimension_mismatch() {
        let s = Structure::series(3).unwrap();
        assert!(matches!(
            build_distortion(&s, &Copula::independence(4)),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
