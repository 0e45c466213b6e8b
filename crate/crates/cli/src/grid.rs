//! Parameter grids: comma-separated values and inclusive ranges.

use katona::search::{Params, Score, TheoremId};
use katona::{Error, Result};

/// Parses `4`, `4..12`, `2,4,6` or `1..3,8` into distinct sorted values.
pub fn parse_range(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in s.split(',') {
        let item = item.trim();
        let num = |t: &str| -> Result<usize> {
            t.trim().parse().map_err(|_| Error::Parse(format!("bad number `{t}` in `{s}`")))
        };
        match item.split_once("..") {
            Some((a, b)) => {
                let b = b.strip_prefix('=').unwrap_or(b);
                let (a, b) = (num(a)?, num(b)?);
                if a > b {
                    return Err(Error::Parse(format!("empty range `{item}`")));
                }
                out.extend(a..=b);
            }
            None => out.push(num(item)?),
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Parses a comma-separated list of rationals such as `1,2,5/2`.
pub fn parse_scores(s: &str) -> Result<Vec<Score>> {
    let mut out: Vec<Score> = s.split(',').map(str::parse).collect::<Result<_>>()?;
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Parses one tuple of lengths, `2,3,4`.
pub fn parse_tuple(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::Parse(format!("bad length `{t}` in `{s}`"))))
        .collect()
}

#[derive(Clone, Debug, Default)]
pub struct GridSpec {
    pub n: Option<Vec<usize>>,
    pub k: Option<Vec<usize>>,
    pub l: Option<Vec<usize>>,
    pub s: Option<Vec<usize>>,
    pub r: Option<Vec<usize>>,
    pub q: Option<Vec<usize>>,
    pub c: Option<Vec<Score>>,
    pub ls: Vec<Vec<usize>>,
}

impl GridSpec {
    /// Every combination of the given values, in lexicographic order of
    /// (n, k, l, s, r, q, c, ls). Parameters the theorem does not read are
    /// rejected so typos do not silently multiply the grid.
    pub fn points(&self, id: TheoremId) -> Result<Vec<Params>> {
        let used = id.params().join(" ");
        let reads = |name: &str| used.split([' ', ',', '|']).any(|p| p == name);
        for (name, given) in [
            ("n", self.n.is_some()),
            ("k", self.k.is_some()),
            ("l", self.l.is_some()),
            ("s", self.s.is_some()),
            ("r", self.r.is_some()),
            ("q", self.q.is_some()),
            ("c", self.c.is_some()),
            ("ls", !self.ls.is_empty()),
        ] {
            if given && !reads(name) {
                return Err(Error::Domain(format!("{id} does not take --{name} (it reads {used})")));
            }
        }
        for (name, vals) in [("n", &self.n), ("k", &self.k), ("l", &self.l), ("s", &self.s), ("r", &self.r), ("q", &self.q)] {
            if vals.as_ref().is_some_and(Vec::is_empty) {
                return Err(Error::Domain(format!("--{name} is empty")));
            }
        }
        let opt = |v: &Option<Vec<usize>>| -> Vec<Option<usize>> {
            v.as_ref().map_or(vec![None], |v| v.iter().copied().map(Some).collect())
        };
        let cs: Vec<Option<Score>> = self.c.as_ref().map_or(vec![None], |v| v.iter().copied().map(Some).collect());
        let lss: Vec<Option<Vec<usize>>> =
            if self.ls.is_empty() { vec![None] } else { self.ls.iter().cloned().map(Some).collect() };
        let mut out = Vec::new();
        for n in opt(&self.n) {
            for k in opt(&self.k) {
                for l in opt(&self.l) {
                    for s in opt(&self.s) {
                        for r in opt(&self.r) {
                            for q in opt(&self.q) {
                                for c in &cs {
                                    for ls in &lss {
                                        out.push(Params { n, k, l, s, r, q, c: *c, ls: ls.clone() });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("4..7").unwrap(), vec![4, 5, 6, 7]);
        assert_eq!(parse_range("4..=5,9,4").unwrap(), vec![4, 5, 9]);
        assert_eq!(parse_range("3").unwrap(), vec![3]);
        assert!(parse_range("7..4").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn scores() {
        let c = parse_scores("5/2,1,2").unwrap();
        assert_eq!(c, vec![Score::integer(1), Score::integer(2), Score::new(5, 2)]);
    }

    #[test]
    fn grid_product_and_unused_flags() {
        let spec = GridSpec { n: Some(vec![6, 7]), k: Some(vec![2, 3]), ..GridSpec::default() };
        let pts = spec.points(TheoremId::CircularEkr).unwrap();
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[1].to_string(), "n=6 k=3");
        assert!(spec.points(TheoremId::CircularSperner).is_err());
    }
}
