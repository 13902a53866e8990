use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest component count a structure may have.
pub const MAX_COMPONENTS: usize = 30;

/// Largest number of minimal path sets; inclusion–exclusion enumerates
/// `2^paths - 1` subfamilies.
pub const MAX_PATH_SETS: usize = 20;

/// A coherent structure: `n` components and its minimal path sets, with
/// components numbered from one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawStructure", into = "RawStructure")]
pub struct Structure {
    n: usize,
    paths: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawStructure {
    pub n: usize,
    pub paths: Vec<Vec<usize>>,
}

impl Structure {
    pub fn new(n: usize, paths: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 || n > MAX_COMPONENTS {
            return Err(Error::NotCoherent(format!(
                "component count {n} must be in 1..={MAX_COMPONENTS}"
            )));
        }
        if paths.is_empty() {
            return Err(Error::NotCoherent("no path sets".into()));
        }
        if paths.len() > MAX_PATH_SETS {
            return Err(Error::TooManyPathSets(paths.len()));
        }
        let mut normalized = Vec::with_capacity(paths.len());
        for path in &paths {
            if path.is_empty() {
                return Err(Error::NotCoherent("empty path set".into()));
            }
            let mut sorted = path.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::NotCoherent(format!("path {path:?} repeats a component")));
            }
            if let Some(&bad) = sorted.iter().find(|&&c| c == 0 || c > n) {
                return Err(Error::NotCoherent(format!(
                    "component {bad} in path {path:?} is outside 1..={n}"
                )));
            }
            normalized.push(sorted);
        }
        let s = Structure { n, paths: normalized };
        let masks = s.masks();
        for (i, &a) in masks.iter().enumerate() {
            for (k, &b) in masks.iter().enumerate() {
                if i != k && a & b == a {
                    return Err(Error::NotCoherent(format!(
                        "path {:?} is contained in path {:?}; path sets must be minimal",
                        s.paths[i], s.paths[k]
                    )));
                }
            }
        }
        let covered = masks.iter().fold(0u32, |acc, m| acc | m);
        if covered != full_mask(n) {
            let missing: Vec<usize> = (1..=n).filter(|c| covered & (1 << (c - 1)) == 0).collect();
            return Err(Error::NotCoherent(format!(
                "components {missing:?} are irrelevant"
            )));
        }
        Ok(s)
    }

    pub fn series(n: usize) -> Result<Self> {
        Structure::new(n, vec![(1..=n).collect()])
    }

    pub fn parallel(n: usize) -> Result<Self> {
        Structure::new(n, (1..=n).map(|c| vec![c]).collect())
    }

    /// All `k`-subsets of the components as minimal path sets.
    pub fn k_out_of_n(k: usize, n: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::IndexOutOfRange(format!("k = {k} with n = {n}")));
        }
        let paths = (0u32..1 << n)
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| (1..=n).filter(|c| m & (1 << (c - 1)) != 0).collect())
            .collect();
        Structure::new(n, paths)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn paths(&self) -> &[Vec<usize>] {
        &self.paths
    }

    /// Path sets as bitmasks over zero-based component indices.
    pub fn masks(&self) -> Vec<u32> {
        self.paths
            .iter()
            .map(|p| p.iter().fold(0u32, |m, &c| m | 1 << (c - 1)))
            .collect()
    }

    /// System state given which components work.
    pub fn works(&self, working: u32) -> bool {
        self.masks().iter().any(|&m| m & !working == 0)
    }
}

pub(crate) fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

impl TryFrom<RawStructure> for Structure {
    type Error = Error;

    fn try_from(raw: RawStructure) -> Result<Self> {
        Structure::new(raw.n, raw.paths)
    }
}

impl From<Structure> for RawStructure {
    fn from(s: Structure) -> Self {
        RawStructure {
            n: s.n,
            paths: s.paths,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_minimal_and_irrelevant() {
        assert!(matches!(
            Structure::new(3, vec![vec![1], vec![1, 2], vec![3]]),
            Err(Error::NotCoherent(_))
        ));
        assert!(matches!(
            Structure::new(3, vec![vec![1, 2]]),
            Err(Error::NotCoherent(_))
        ));
        assert!(Structure::new(3, vec![vec![1, 4], vec![2, 3]]).is_err());
        assert!(Structure::new(3, vec![vec![1, 1, 2], vec![3]]).is_err());
        assert!(Structure::new(2, vec![vec![1, 2], vec![2, 1]]).is_err());
        assert!(Structure::new(2, vec![]).is_err());
    }

    #[test]
    fn too_many_path_sets() {
        // 3-out-of-7 has 35 minimal path sets
        assert!(matches!(
            Structure::k_out_of_n(3, 7),
            Err(Error::TooManyPathSets(35))
        ));
    }

    #[test]
    fn k_out_of_n_paths() {
        let s = Structure::k_out_of_n(2, 3).unwrap();
        assert_eq!(s.paths(), &[vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert!(s.works(0b011));
        assert!(!s.works(0b100));
        assert_eq!(Structure::series(3).unwrap().paths(), &[vec![1, 2, 3]]);
        assert_eq!(Structure::parallel(2).unwrap().paths().len(), 2);
    }

    #[test]
    fn json_round_trip() {
        let s: Structure = serde_json::from_str(r#"{"n":3,"paths":[[1,2],[1,3]]}"#).unwrap();
        assert_eq!(s.n(), 3);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<Structure>(&text).unwrap(), s);
        assert!(serde_json::from_str::<Structure>(r#"{"n":3,"paths":[[1,2]]}"#).is_err());
    }
}
