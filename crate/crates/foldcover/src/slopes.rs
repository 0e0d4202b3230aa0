//! Slopes on boundary tori and the intersection counts derived from them.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SlopeError {
    #[error("slope {0}/{1} is not a primitive pair")]
    NotPrimitive(i64, i64),
    #[error("cannot parse slope `{0}`")]
    BadSlope(String),
    #[error("torus {k}: surface {i} has curve count {c}, need a positive even number")]
    BadCurveCount { k: usize, i: usize, c: u64 },
    #[error("torus {k}: the two slopes coincide")]
    EqualSlopes { k: usize },
    #[error("torus {k}, surface {i}: d = {d} is not even and at least 2")]
    BadD { k: usize, i: usize, d: u64 },
    #[error("surface index must be 1 or 2, got {0}")]
    BadSurface(usize),
    #[error("torus index {0} out of range")]
    BadTorus(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Primitive integer pair up to sign, stored with `p >= 0` and `q = 1` when
/// `p = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Slope {
    p: i64,
    q: i64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

impl Slope {
    pub fn new(p: i64, q: i64) -> Result<Self, SlopeError> {
        if gcd(p.unsigned_abs(), q.unsigned_abs()) != 1 {
            return Err(SlopeError::NotPrimitive(p, q));
        }
        let (p, q) = if p < 0 || (p == 0 && q < 0) { (-p, -q) } else { (p, q) };
        Ok(Slope { p, q })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Slope {
    type Err = SlopeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SlopeError::BadSlope(s.to_string());
        let (p, q) = s.split_once('/').ok_or_else(bad)?;
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        Slope::new(p, q)
    }
}

/// |p q' - p' q|
pub fn slope_intersection(a: Slope, b: Slope) -> u64 {
    (a.p as i128 * b.q as i128 - b.p as i128 * a.q as i128).unsigned_abs() as u64
}

/// Index of the lattice spanned by `m1*l1` and `m2*l2`.
pub fn cusp_cover_index(m1: u64, m2: u64, l1: Slope, l2: Slope) -> Result<u64, SlopeError> {
    if l1 == l2 {
        return Err(SlopeError::EqualSlopes { k: 0 });
    }
    Ok(m1 * m2 * slope_intersection(l1, l2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorusData {
    pub slopes: [Slope; 2],
    pub counts: [u64; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeSystem {
    tori: Vec<TorusData>,
}

impl SlopeSystem {
    pub fn new(tori: Vec<TorusData>) -> Result<Self, SlopeError> {
        for (idx, t) in tori.iter().enumerate() {
            let k = idx + 1;
            for i in 0..2 {
                let c = t.counts[i];
                if c == 0 || c % 2 != 0 {
                    return Err(SlopeError::BadCurveCount { k, i: i + 1, c });
                }
            }
            if t.slopes[0] == t.slopes[1] {
                return Err(SlopeError::EqualSlopes { k });
            }
        }
        Ok(SlopeSystem { tori })
    }

    pub fn torus_count(&self) -> usize {
        self.tori.len()
    }

    pub fn torus(&self, k: usize) -> Result<&TorusData, SlopeError> {
        self.tori.get(k.wrapping_sub(1)).ok_or(SlopeError::BadTorus(k))
    }

    fn check_surface(i: usize) -> Result<usize, SlopeError> {
        match i {
            1 | 2 => Ok(i - 1),
            _ => Err(SlopeError::BadSurface(i)),
        }
    }

    /// Intersections of one curve of surface `i` on torus `k` with all the
    /// curves of the other surface there.
    pub fn d_ik(&self, i: usize, k: usize) -> Result<u64, SlopeError> {
        let ii = Self::check_surface(i)?;
        let t = self.torus(k)?;
        let d = slope_intersection(t.slopes[0], t.slopes[1]) * t.counts[1 - ii];
        if d < 2 || d % 2 != 0 {
            return Err(SlopeError::BadD { k, i, d });
        }
        Ok(d)
    }

    pub fn d_i(&self, i: usize) -> Result<u64, SlopeError> {
        let mut acc = 1;
        for k in 1..=self.tori.len() {
            acc = lcm(acc, self.d_ik(i, k)?);
        }
        Ok(acc)
    }

    pub fn d_list(&self, i: usize) -> Result<Vec<u64>, SlopeError> {
        (1..=self.tori.len()).map(|k| self.d_ik(i, k)).collect()
    }

    pub fn intersection_count(&self, k: usize) -> Result<u64, SlopeError> {
        let t = self.torus(k)?;
        Ok(t.counts[0] * t.counts[1] * slope_intersection(t.slopes[0], t.slopes[1]))
    }

    /// Counted from surface `i`'s side: its curves times their `d_ik`.
    pub fn total_cusp_ends(&self, i: usize) -> Result<u64, SlopeError> {
        let ii = Self::check_surface(i)?;
        let mut total = 0;
        for (idx, t) in self.tori.iter().enumerate() {
            total += t.counts[ii] * self.d_ik(i, idx + 1)?;
        }
        Ok(total)
    }

    /// `torus <k> s1=<p>/<q> c1=<int> s2=<p>/<q> c2=<int>` per line; `#`
    /// starts a comment. Tori must appear in order 1, 2, ...
    pub fn parse(text: &str) -> Result<Self, SlopeError> {
        let mut tori = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap().trim();
            if content.is_empty() {
                continue;
            }
            let err = |msg: String| SlopeError::Parse { line, msg };
            let mut toks = content.split_whitespace();
            if toks.next() != Some("torus") {
                return Err(err("expected `torus`".into()));
            }
            let k: usize = toks
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| err("missing torus index".into()))?;
            if k != tori.len() + 1 {
                return Err(err(format!("torus {k} out of order")));
            }
            let (mut s1, mut s2, mut c1, mut c2) = (None, None, None, None);
            for tok in toks {
                let (key, val) = tok.split_once('=').ok_or_else(|| err(format!("bad field `{tok}`")))?;
                match key {
                    "s1" => s1 = Some(val.parse::<Slope>()?),
                    "s2" => s2 = Some(val.parse::<Slope>()?),
                    "c1" => c1 = Some(val.parse::<u64>().map_err(|_| err(format!("bad count `{val}`")))?),
                    "c2" => c2 = Some(val.parse::<u64>().map_err(|_| err(format!("bad count `{val}`")))?),
                    _ => return Err(err(format!("unknown field `{key}`"))),
                }
            }
            match (s1, c1, s2, c2) {
                (Some(s1), Some(c1), Some(s2), Some(c2)) => tori.push(TorusData { slopes: [s1, s2], counts: [c1, c2] }),
                _ => return Err(err("need s1, c1, s2, c2".into())),
            }
        }
        SlopeSystem::new(tori)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(p: i64, q: i64) -> Slope {
        Slope::new(p, q).unwrap()
    }

    #[test]
    fn intersection_examples() {
        assert_eq!(slope_intersection(s(1, 0), s(0, 1)), 1);
        assert_eq!(slope_intersection(s(1, 2), s(3, 4)), 2);
        assert_eq!(slope_intersection(s(1, 2), s(1, 2)), 0);
    }

    #[test]
    fn normalisation() {
        assert_eq!(s(-1, 2), s(1, -2));
        assert_eq!(s(0, -1), s(0, 1));
        assert!(Slope::new(2, 4).is_err());
        assert!(Slope::new(0, 0).is_err());
    }

    #[test]
    fn lcm_examples() {
        assert_eq!(lcm(2, 4), 4);
        assert_eq!(lcm(2, 6), 6);
        assert_eq!(lcm(4, 6), 12);
    }

    #[test]
    fn cusp_index() {
        assert_eq!(cusp_cover_index(3, 5, s(1, 0), s(0, 1)).unwrap(), 15);
        assert_eq!(cusp_cover_index(1, 1, s(1, 2), s(3, 4)).unwrap(), 2);
        assert!(cusp_cover_index(1, 1, s(1, 2), s(1, 2)).is_err());
    }

    #[test]
    fn odd_count_rejected() {
        let t = TorusData { slopes: [s(1, 0), s(0, 1)], counts: [2, 1] };
        assert!(SlopeSystem::new(vec![t]).is_err());
    }

    #[test]
    fn parse_file() {
        let sys = SlopeSystem::parse("# demo\ntorus 1 s1=1/0 c1=2 s2=0/1 c2=2\n").unwrap();
        assert_eq!(sys.d_ik(1, 1).unwrap(), 2);
        assert_eq!(sys.d_ik(2, 1).unwrap(), 2);
        assert_eq!(sys.intersection_count(1).unwrap(), 4);
        assert_eq!(sys.total_cusp_ends(1).unwrap(), sys.total_cusp_ends(2).unwrap());
    }
}
