#![allow(dead_code)]

use coherent_age::{Copula, CopulaFamily, Distribution, Structure, System};

pub fn system(structure: Structure, family: CopulaFamily, margin: Distribution) -> System {
    let n = structure.n();
    System::new(structure, Copula::new(family, n).unwrap(), margin).unwrap()
}

pub fn paths(n: usize, p: &[&[usize]]) -> Structure {
    Structure::new(n, p.iter().map(|s| s.to_vec()).collect()).unwrap()
}

pub fn bridge() -> Structure {
    paths(3, &[&[1, 2], &[1, 3]])
}

/// Twelve (structure, copula, margin) triples covering every family.
pub fn golden_corpus() -> Vec<(&'static str, System)> {
    use CopulaFamily::*;
    let exp = |r| Distribution::exponential(r).unwrap();
    let lfr = |a, b| Distribution::linear_failure_rate(a, b).unwrap();
    let wei = |k, s| Distribution::weibull(k, s).unwrap();
    let kofn = |k, n| Structure::k_out_of_n(k, n).unwrap();
    vec![
        (
            "bridge fgm(1) lfr(1,1)",
            system(bridge(), Fgm { theta: 1.0 }, lfr(1.0, 1.0)),
        ),
        (
            "series3 indep lfr(2,1)",
            system(kofn(3, 3), Independence, lfr(2.0, 1.0)),
        ),
        (
            "series4 gumbel(2) exp(3)",
            system(kofn(4, 4), GumbelHougaard { theta: 2.0 }, exp(3.0)),
        ),
        (
            "series2 gumbel(2) exp(2)",
            system(kofn(2, 2), GumbelHougaard { theta: 2.0 }, exp(2.0)),
        ),
        (
            "2-of-3 indep weibull(2,1)",
            system(kofn(2, 3), Independence, wei(2.0, 1.0)),
        ),
        (
            "parallel3 clayton(2) exp(1)",
            system(kofn(1, 3), ClaytonOakes { theta: 2.0 }, exp(1.0)),
        ),
        (
            "1|23 fgm(-0.5) weibull(0.7,2)",
            system(paths(3, &[&[1], &[2, 3]]), Fgm { theta: -0.5 }, wei(0.7, 2.0)),
        ),
        (
            "12|34 gumbel(1.5) lfr(0.5,2)",
            system(
                paths(4, &[&[1, 2], &[3, 4]]),
                GumbelHougaard { theta: 1.5 },
                lfr(0.5, 2.0),
            ),
        ),
        (
            "2-of-4 clayton(0.5) weibull(1.5,1)",
            system(kofn(2, 4), ClaytonOakes { theta: 0.5 }, wei(1.5, 1.0)),
        ),
        (
            "12|13|234 indep exp(0.5)",
            system(paths(4, &[&[1, 2], &[1, 3], &[2, 3, 4]]), Independence, exp(0.5)),
        ),
        (
            "parallel2 gumbel(3) weibull(3,1)",
            system(kofn(1, 2), GumbelHougaard { theta: 3.0 }, wei(3.0, 1.0)),
        ),
        (
            "3-of-5 clayton(1) exp(2)",
            system(kofn(3, 5), ClaytonOakes { theta: 1.0 }, exp(2.0)),
        ),
    ]
}
