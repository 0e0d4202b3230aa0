use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use crate::slopes::lcm;
use crate::words::{SurfacePresentation, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("spec field `{field}`: {reason}")]
pub struct SpecError {
    pub field: String,
    pub reason: String,
}

fn bad(field: impl Into<String>, reason: impl Into<String>) -> SpecError {
    SpecError { field: field.into(), reason: reason.into() }
}

/// Which gadget family the construction uses, fixed by the boundary count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Case {
    /// Even number of boundary components.
    OneEven,
    /// Odd number, at least three.
    OneOdd,
    /// A single boundary component.
    Two,
}

impl Case {
    pub fn for_boundary_count(nb: usize) -> Case {
        if nb == 1 {
            Case::Two
        } else if nb % 2 == 0 {
            Case::OneEven
        } else {
            Case::OneOdd
        }
    }

    /// Extra copies of the peripheral word each base-size gadget adds.
    pub fn delta(self) -> u64 {
        match self {
            Case::OneEven => 1,
            Case::OneOdd => 2,
            Case::Two => 4,
        }
    }

    /// Spine length of a gadget at its smallest size.
    pub fn base_size(self) -> u64 {
        self.delta() + 1
    }

    pub fn tag(self) -> &'static str {
        match self {
            Case::OneEven => "case1-even",
            Case::OneOdd => "case1-odd",
            Case::Two => "case2",
        }
    }
}

/// Input to the construction: the surface, the per-torus `d` values and the
/// words to contain, exclude, and connect.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverSpec {
    pub pres: SurfacePresentation,
    pub d: Vec<u64>,
    pub w: Vec<Word>,
    pub y: Vec<Word>,
    /// Indexed by boundary `b - 1`.
    pub tau: Vec<Word>,
    /// Keyed by `(k, p, q)` with `1 <= q < d_k`; missing entries are trivial.
    pub sigma: BTreeMap<(usize, usize, usize), Word>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    genus: usize,
    boundary: Vec<usize>,
    d: Vec<u64>,
    #[serde(default)]
    w: Vec<String>,
    #[serde(default)]
    y: Vec<String>,
    #[serde(default)]
    tau: Vec<String>,
    #[serde(default)]
    sigma: BTreeMap<String, String>,
}

impl CoverSpec {
    pub fn new(
        pres: SurfacePresentation,
        d: Vec<u64>,
        w: Vec<Word>,
        y: Vec<Word>,
        tau: Vec<Word>,
        sigma: BTreeMap<(usize, usize, usize), Word>,
    ) -> Result<Self, SpecError> {
        let nb = pres.boundary_count();
        if d.len() != pres.layout().len() {
            return Err(bad("d", format!("{} entries for {} tori", d.len(), pres.layout().len())));
        }
        for (i, &dk) in d.iter().enumerate() {
            if dk < 2 || dk % 2 != 0 {
                return Err(bad("d", format!("torus {}: {dk} is not even and at least 2", i + 1)));
            }
        }
        if tau.len() > nb {
            return Err(bad("tau", format!("{} entries for {nb} boundary components", tau.len())));
        }
        let mut tau = tau;
        tau.resize(nb, Word::empty());
        for &(k, p, q) in sigma.keys() {
            if k == 0 || k > d.len() || p == 0 || p > pres.layout()[k - 1] || q == 0 || q as u64 >= d[k - 1] {
                return Err(bad("sigma", format!("key {k},{p},{q} out of range")));
            }
        }
        if Case::for_boundary_count(nb) != Case::Two && pres.genus() == 0 {
            return Err(bad("genus", "genus 0 needs at least one handle for the gadget loops"));
        }
        for (i, y) in y.iter().enumerate() {
            if y.is_empty() {
                return Err(bad("y", format!("entry {} is the identity", i + 1)));
            }
        }
        let size = pres.alphabet().size() as u32;
        let all = w.iter().chain(&y).chain(&tau).chain(sigma.values());
        for word in all {
            if word.letters().iter().any(|l| l.gen >= size) {
                return Err(bad("words", "letter outside the alphabet"));
            }
        }
        Ok(CoverSpec { pres, d, w, y, tau, sigma })
    }

    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        let raw: RawSpec = serde_json::from_str(text).map_err(|e| bad("json", e.to_string()))?;
        let pres = SurfacePresentation::new(raw.genus, raw.boundary).map_err(|e| bad("boundary", e.to_string()))?;
        let a = pres.alphabet();
        let parse_list = |field: &str, list: &[String]| -> Result<Vec<Word>, SpecError> {
            list.iter()
                .enumerate()
                .map(|(i, s)| a.parse_word(s).map_err(|e| bad(format!("{field}[{i}]"), e.to_string())))
                .collect()
        };
        let w = parse_list("w", &raw.w)?;
        let y = parse_list("y", &raw.y)?;
        let tau = parse_list("tau", &raw.tau)?;
        let mut sigma = BTreeMap::new();
        for (key, val) in &raw.sigma {
            let field = format!("sigma[{key}]");
            let parts: Vec<usize> = key
                .split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|_| bad(&field, "key must be `k,p,q`"))?;
            if parts.len() != 3 {
                return Err(bad(&field, "key must be `k,p,q`"));
            }
            let word = a.parse_word(val).map_err(|e| bad(&field, e.to_string()))?;
            sigma.insert((parts[0], parts[1], parts[2]), word);
        }
        CoverSpec::new(pres, raw.d, w, y, tau, sigma)
    }

    pub fn to_json(&self) -> String {
        let a = self.pres.alphabet();
        let words = |ws: &[Word]| -> Vec<serde_json::Value> { ws.iter().map(|w| a.render(w).into()).collect() };
        let sigma: serde_json::Map<String, serde_json::Value> = self
            .sigma
            .iter()
            .map(|(&(k, p, q), w)| (format!("{k},{p},{q}"), a.render(w).into()))
            .collect();
        let v = serde_json::json!({
            "genus": self.pres.genus(),
            "boundary": self.pres.layout(),
            "d": self.d,
            "w": words(&self.w),
            "y": words(&self.y),
            "tau": words(&self.tau),
            "sigma": sigma,
        });
        serde_json::to_string_pretty(&v).unwrap()
    }

    pub fn case(&self) -> Case {
        Case::for_boundary_count(self.pres.boundary_count())
    }

    pub fn d_i(&self) -> u64 {
        self.d.iter().fold(1, |acc, &x| lcm(acc, x))
    }

    pub fn d_ik(&self, k: usize) -> u64 {
        self.d[k - 1]
    }

    pub fn tau(&self, b: usize) -> &Word {
        &self.tau[b - 1]
    }

    pub fn sigma(&self, k: usize, p: usize, q: usize) -> Word {
        if q == 0 {
            return Word::empty();
        }
        self.sigma.get(&(k, p, q)).cloned().unwrap_or_default()
    }

    /// `(k, p, boundary index)` for every boundary component.
    pub fn boundaries(&self) -> Vec<(usize, usize, usize)> {
        self.pres
            .torus_positions()
            .into_iter()
            .map(|(k, p)| (k, p, self.pres.boundary_index(k, p).unwrap()))
            .collect()
    }

    /// Word from the base to the `q`-th marked point of boundary `(k, p)`:
    /// `inv(s_{q-1}) ... inv(s_0) tau_b`, for `1 <= q <= d_k`.
    pub fn marked_prefix(&self, k: usize, p: usize, q: usize) -> Word {
        let b = self.pres.boundary_index(k, p).unwrap();
        let mut w = Word::empty();
        for j in (0..q).rev() {
            w = w.concat(&self.sigma(k, p, j).inverse());
        }
        w.concat(self.tau(b))
    }

    /// The connecting word for marked points `q` and `q+1` with power
    /// `n * d_i / d_k` of the peripheral word.
    pub fn z_word(&self, n: u64, k: usize, p: usize, q: usize) -> Result<Word, SpecError> {
        if k == 0 || k > self.d.len() || p == 0 || p > self.pres.layout()[k - 1] {
            return Err(bad("k,p", format!("({k},{p}) out of range")));
        }
        let dk = self.d_ik(k);
        if q == 0 || q as u64 >= dk {
            return Err(bad("q", format!("{q} outside 1..{dk}")));
        }
        let b = self.pres.boundary_index(k, p).unwrap();
        let x = self.pres.peripheral_word(b).unwrap();
        let power = (n * self.d_i() / dk) as i64;
        let t = self.tau(b);
        let conj = t.concat(&x.pow(power)).concat(&t.inverse());
        let mut tail = Word::empty();
        for j in 0..=q {
            tail = tail.concat(&self.sigma(k, p, j));
        }
        let mut head = Word::empty();
        for j in (0..q).rev() {
            head = head.concat(&self.sigma(k, p, j).inverse());
        }
        Ok(head.concat(&conj).concat(&tail))
    }

    /// Target wrapping parameters must be even and positive.
    pub fn check_nstar(&self, nstar: u64) -> Result<(), SpecError> {
        if nstar % 2 != 0 {
            return Err(bad("nstar", format!("{nstar} is odd")));
        }
        if nstar == 0 {
            return Err(bad("nstar", "must be positive"));
        }
        Ok(())
    }
}
