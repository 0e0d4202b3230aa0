//! Permutation-representation oracle and the certificate it produces for a
//! finished cover graph. Nothing here reads pipeline bookkeeping: every check
//! is recomputed from the graph and the spec.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::pipeline::CoverSpec;
use crate::stallings::{Edge, LabeledGraph};
use crate::words::{Alphabet, Letter, SurfacePresentation, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("graph is not regular")]
    NotRegular,
    #[error("graph is not connected")]
    NotConnected,
    #[error("covered genus {0} is not a non-negative integer")]
    BadGenus(String),
}

/// Action of each generator on `0..m`, with the base vertex at point 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermRep {
    alphabet: Alphabet,
    fwd: Vec<Vec<u32>>,
    inv: Vec<Vec<u32>>,
    /// Graph vertex -> point.
    point_of: Vec<usize>,
}

impl PermRep {
    pub fn new(alphabet: Alphabet, perms: Vec<Vec<u32>>) -> Result<Self, CoverError> {
        let m = perms.first().map_or(1, |p| p.len());
        let mut inv = Vec::with_capacity(perms.len());
        for p in &perms {
            if p.len() != m {
                return Err(CoverError::NotRegular);
            }
            let mut q = vec![u32::MAX; m];
            for (i, &t) in p.iter().enumerate() {
                if t as usize >= m || q[t as usize] != u32::MAX {
                    return Err(CoverError::NotRegular);
                }
                q[t as usize] = i as u32;
            }
            inv.push(q);
        }
        let rep = PermRep { alphabet, fwd: perms, inv, point_of: (0..m).collect() };
        if !rep.is_transitive() {
            return Err(CoverError::NotConnected);
        }
        Ok(rep)
    }

    pub fn degree(&self) -> usize {
        self.point_of.len()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn perm(&self, gen: u32) -> &[u32] {
        &self.fwd[gen as usize]
    }

    /// Point assigned to a vertex of the graph this was built from.
    pub fn point_of(&self, vertex: usize) -> usize {
        self.point_of[vertex]
    }

    #[inline]
    pub fn apply_letter(&self, pt: usize, l: Letter) -> usize {
        if l.inv {
            self.inv[l.gen as usize][pt] as usize
        } else {
            self.fwd[l.gen as usize][pt] as usize
        }
    }

    /// Image of `pt` under the word, letters applied left to right.
    pub fn act(&self, w: &Word, pt: usize) -> usize {
        w.letters().iter().fold(pt, |p, &l| self.apply_letter(p, l))
    }

    pub fn word_perm(&self, w: &Word) -> Vec<usize> {
        (0..self.degree()).map(|p| self.act(w, p)).collect()
    }

    pub fn is_transitive(&self) -> bool {
        let m = self.degree();
        let mut seen = vec![false; m];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(p) = stack.pop() {
            for g in 0..self.fwd.len() {
                for q in [self.fwd[g][p] as usize, self.inv[g][p] as usize] {
                    if !seen[q] {
                        seen[q] = true;
                        count += 1;
                        stack.push(q);
                    }
                }
            }
        }
        count == m
    }

    /// Cycle lengths of the word's permutation, ordered by smallest point.
    pub fn cycle_type(&self, w: &Word) -> Vec<usize> {
        cycle_lengths(&self.word_perm(w))
    }

    /// The regular graph this action defines, base at point 0.
    pub fn to_graph(&self) -> LabeledGraph {
        let mut edges = Vec::new();
        for (g, p) in self.fwd.iter().enumerate() {
            for (i, &t) in p.iter().enumerate() {
                edges.push(Edge { from: i, to: t as usize, gen: g as u32 });
            }
        }
        LabeledGraph::from_parts(self.alphabet.clone(), self.degree(), 0, edges).unwrap()
    }
}

pub fn cycle_lengths(perm: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for s in 0..perm.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut c = s;
        while !seen[c] {
            seen[c] = true;
            len += 1;
            c = perm[c];
        }
        out.push(len);
    }
    out
}

/// Reads generator actions off a regular connected graph. The base becomes
/// point 0; other vertices keep their relative order.
pub fn to_perm_rep(g: &LabeledGraph) -> Result<PermRep, CoverError> {
    if !g.is_regular() {
        return Err(CoverError::NotRegular);
    }
    let m = g.vertex_count();
    let base = g.base();
    let point_of: Vec<usize> = (0..m)
        .map(|v| match v.cmp(&base) {
            std::cmp::Ordering::Equal => 0,
            std::cmp::Ordering::Less => v + 1,
            std::cmp::Ordering::Greater => v,
        })
        .collect();
    let mut perms = vec![vec![0u32; m]; g.generator_count()];
    for e in g.edges() {
        perms[e.gen as usize][point_of[e.from]] = point_of[e.to] as u32;
    }
    let mut rep = PermRep::new(g.alphabet().clone(), perms)?;
    rep.point_of = point_of;
    Ok(rep)
}

pub fn oracle_member(rep: &PermRep, w: &Word) -> bool {
    rep.act(w, 0) == 0
}

/// The word acts as one cycle through every point.
pub fn oracle_power_free(rep: &PermRep, x: &Word) -> bool {
    let m = rep.degree();
    let mut p = 0;
    for steps in 1..=m {
        p = rep.act(x, p);
        if p == 0 {
            return steps == m;
        }
    }
    false
}

/// Cycle type of each peripheral word, boundary order.
pub fn boundary_components(rep: &PermRep, pres: &SurfacePresentation) -> Vec<Vec<usize>> {
    pres.peripheral_words().iter().map(|x| rep.cycle_type(x)).collect()
}

/// Euler characteristic of the degree-`m` cover and the genus of the cover
/// surface given its boundary count.
pub fn euler_data(pres: &SurfacePresentation, m: u64, cover_boundary: u64) -> Result<(i64, u64), CoverError> {
    let chi = m as i64 * (2 - 2 * pres.genus() as i64 - pres.boundary_count() as i64);
    let twice = 2 - chi - cover_boundary as i64;
    if twice < 0 || twice % 2 != 0 {
        return Err(CoverError::BadGenus(format!("{}/2", twice)));
    }
    Ok((chi, (twice / 2) as u64))
}

/// Orbit distance along the peripheral word's cycle between the lifts of
/// consecutive marked points, for each boundary `(k, p)`. The arc from the
/// last lift back to the first is reported one short, since that arc's end
/// lies before the starting fibre point it reaches. `None` when lifts are
/// missing, coincide, or sit on different cycles.
pub fn wrapping_numbers(rep: &PermRep, spec: &CoverSpec) -> Vec<((usize, usize), Option<Vec<u64>>)> {
    let m = rep.degree();
    let mut out = Vec::new();
    for (k, p, b) in spec.boundaries() {
        let x = spec.pres.peripheral_word(b).unwrap();
        let dk = spec.d_ik(k) as usize;
        let lifts: Vec<usize> = (1..=dk).map(|q| rep.act(&spec.marked_prefix(k, p, q), 0)).collect();
        // Position of every point along the cycle through the first lift.
        let mut pos = vec![usize::MAX; m];
        let mut c = lifts[0];
        let mut i = 0;
        while pos[c] == usize::MAX {
            pos[c] = i;
            i += 1;
            c = rep.act(&x, c);
        }
        let cycle_len = i;
        let ok = lifts.iter().all(|&l| pos[l] != usize::MAX)
            && {
                let mut ps: Vec<usize> = lifts.iter().map(|&l| pos[l]).collect();
                ps.sort_unstable();
                ps.windows(2).all(|w| w[0] != w[1])
            };
        if !ok {
            out.push(((k, p), None));
            continue;
        }
        let mut nums = Vec::with_capacity(dk);
        for q in 0..dk {
            let a = pos[lifts[q]];
            let b = pos[lifts[(q + 1) % dk]];
            let dist = (b + cycle_len - a) % cycle_len;
            if q + 1 < dk {
                nums.push(dist as u64);
            } else {
                let e = if dist == 0 { cycle_len } else { dist };
                nums.push(e as u64 - 1);
            }
        }
        out.push(((k, p), Some(nums)));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverCertificate {
    pub degree: usize,
    pub nstar: u64,
    pub d_i: u64,
    pub checks: Vec<Check>,
    pub boundary_cycles: Vec<Vec<usize>>,
    pub wrapping: Vec<((usize, usize), Option<Vec<u64>>)>,
    pub euler: Option<(i64, u64)>,
}

impl CoverCertificate {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn to_text(&self) -> String {
        let verdict = |b: bool| if b { "pass" } else { "fail" };
        let mut s = String::new();
        write!(s, "cert degree={} nstar={} d={}", self.degree, self.nstar, self.d_i).unwrap();
        for c in &self.checks {
            write!(s, " {}={}", c.name, verdict(c.pass)).unwrap();
        }
        writeln!(s, " overall={}", verdict(self.passed())).unwrap();
        for c in &self.checks {
            if c.detail.is_empty() {
                writeln!(s, "cert {}={}", c.name, verdict(c.pass)).unwrap();
            } else {
                writeln!(s, "cert {}={} {}", c.name, verdict(c.pass), c.detail).unwrap();
            }
        }
        for (b, cyc) in self.boundary_cycles.iter().enumerate() {
            let lens: Vec<String> = cyc.iter().map(|l| l.to_string()).collect();
            writeln!(s, "cert boundary b={} cycles={}", b + 1, lens.join(",")).unwrap();
        }
        for ((k, p), nums) in &self.wrapping {
            match nums {
                Some(n) => {
                    let ns: Vec<String> = n.iter().map(|x| x.to_string()).collect();
                    writeln!(s, "cert wrapping k={k} p={p} numbers={}", ns.join(",")).unwrap();
                }
                None => writeln!(s, "cert wrapping k={k} p={p} numbers=none").unwrap(),
            }
        }
        if let Some((chi, genus)) = self.euler {
            writeln!(s, "cert euler chi={chi} genus={genus}").unwrap();
        }
        s
    }
}

/// Words used to cross-check graph tracing against the permutation action.
pub fn random_words(alphabet: &Alphabet, count: usize, max_len: usize, seed: u64) -> Vec<Word> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = alphabet.size() as u32;
    (0..count)
        .map(|_| {
            let len = rng.gen_range(0..=max_len);
            Word::new((0..len).map(|_| Letter { gen: rng.gen_range(0..k), inv: rng.gen_bool(0.5) }))
        })
        .collect()
}

/// Runs every check on `g` as a candidate cover for `spec` at `nstar`.
pub fn verify_certificate(g: &LabeledGraph, spec: &CoverSpec, nstar: u64) -> CoverCertificate {
    let d_i = spec.d_i();
    let m = g.vertex_count();
    let mut checks = Vec::new();
    let mut cert = CoverCertificate {
        degree: m,
        nstar,
        d_i,
        checks: Vec::new(),
        boundary_cycles: Vec::new(),
        wrapping: Vec::new(),
        euler: None,
    };
    let same_alphabet = g.alphabet() == spec.pres.alphabet();
    let rep = if same_alphabet { to_perm_rep(g) } else { Err(CoverError::NotRegular) };
    checks.push(Check {
        name: "property0",
        pass: rep.is_ok(),
        detail: match &rep {
            Ok(_) => String::new(),
            Err(e) if same_alphabet => e.to_string(),
            Err(_) => "alphabet differs from the spec".into(),
        },
    });
    let expected = nstar * d_i + 1;
    checks.push(Check {
        name: "property1",
        pass: m as u64 == expected,
        detail: if m as u64 == expected { String::new() } else { format!("expected {expected} vertices") },
    });
    let rep = match rep {
        Ok(r) => r,
        Err(_) => {
            for name in ["property2", "property3", "property4", "property5", "boundary", "euler", "even_spacing", "agreement"] {
                checks.push(Check { name, pass: false, detail: "no permutation action".into() });
            }
            cert.checks = checks;
            return cert;
        }
    };
    let a = spec.pres.alphabet();

    let missing_w: Vec<usize> = spec.w.iter().enumerate().filter(|(_, w)| !oracle_member(&rep, w)).map(|(i, _)| i + 1).collect();
    checks.push(Check {
        name: "property2",
        pass: missing_w.is_empty(),
        detail: if missing_w.is_empty() { String::new() } else { format!("w not contained: {missing_w:?}") },
    });

    let mut missing_z = Vec::new();
    for (k, p, _) in spec.boundaries() {
        for q in 1..spec.d_ik(k) as usize {
            let z = spec.z_word(nstar, k, p, q).unwrap();
            if !oracle_member(&rep, &z) {
                missing_z.push(format!("{k},{p},{q}"));
            }
        }
    }
    checks.push(Check {
        name: "property3",
        pass: missing_z.is_empty(),
        detail: if missing_z.is_empty() { String::new() } else { format!("z not contained: {}", missing_z.join(" ")) },
    });

    let peripheral = spec.pres.peripheral_words();
    let short: Vec<usize> =
        peripheral.iter().enumerate().filter(|(_, x)| !oracle_power_free(&rep, x)).map(|(i, _)| i + 1).collect();
    checks.push(Check {
        name: "property4",
        pass: short.is_empty(),
        detail: if short.is_empty() { String::new() } else { format!("short peripheral cycles on boundaries {short:?}") },
    });

    let closed_y: Vec<usize> = spec.y.iter().enumerate().filter(|(_, y)| oracle_member(&rep, y)).map(|(i, _)| i + 1).collect();
    checks.push(Check {
        name: "property5",
        pass: closed_y.is_empty(),
        detail: if closed_y.is_empty() { String::new() } else { format!("y closed: {closed_y:?}") },
    });

    let cycles = boundary_components(&rep, &spec.pres);
    let cover_boundary: usize = cycles.iter().map(|c| c.len()).sum();
    let nb = spec.pres.boundary_count();
    checks.push(Check {
        name: "boundary",
        pass: cover_boundary == nb,
        detail: format!("components={cover_boundary} base={nb}"),
    });
    cert.boundary_cycles = cycles;

    match euler_data(&spec.pres, m as u64, cover_boundary as u64) {
        Ok(e) => {
            cert.euler = Some(e);
            checks.push(Check { name: "euler", pass: true, detail: format!("chi={} genus={}", e.0, e.1) });
        }
        Err(e) => checks.push(Check { name: "euler", pass: false, detail: e.to_string() }),
    }

    let wrapping = wrapping_numbers(&rep, spec);
    let mut spacing_ok = true;
    for ((k, _), nums) in &wrapping {
        let want = nstar * d_i / spec.d_ik(*k);
        match nums {
            Some(n) if n.iter().all(|&x| x == want) => {}
            _ => spacing_ok = false,
        }
    }
    checks.push(Check { name: "even_spacing", pass: spacing_ok, detail: String::new() });
    cert.wrapping = wrapping;

    let words = random_words(a, 500, 30, m as u64);
    let disagree = if g.is_folded() {
        words.iter().filter(|w| g.is_member(w) != oracle_member(&rep, w)).count()
    } else {
        words.len()
    };
    checks.push(Check {
        name: "agreement",
        pass: disagree == 0,
        detail: if disagree == 0 { String::new() } else { format!("{disagree} of 500 words disagree") },
    });

    cert.checks = checks;
    cert
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc3() -> LabeledGraph {
        let a = Alphabet::surface(1, 2).unwrap();
        let mut edges = Vec::new();
        for v in 0..3 {
            edges.push(Edge { from: v, to: (v + 1) % 3, gen: 0 });
            edges.push(Edge { from: v, to: v, gen: 1 });
            edges.push(Edge { from: v, to: v, gen: 2 });
        }
        LabeledGraph::from_parts(a, 3, 0, edges).unwrap()
    }

    #[test]
    fn perm_rep_basics() {
        let g = cyc3();
        let rep = to_perm_rep(&g).unwrap();
        assert_eq!(rep.perm(0), &[1, 2, 0]);
        let a = g.alphabet().clone();
        assert_eq!(rep.word_perm(&Word::new(a.parse_word("a1").unwrap().letters().iter().copied().chain([Letter::neg(0)]))), vec![0, 1, 2]);
        assert!(oracle_power_free(&rep, &a.parse_word("a1").unwrap()));
        assert!(!oracle_power_free(&rep, &a.parse_word("b1").unwrap()));
        assert!(oracle_member(&rep, &Word::empty()));
    }

    #[test]
    fn trivial_cover() {
        let a = Alphabet::surface(1, 2).unwrap();
        let mut g = LabeledGraph::new(a.clone());
        for gen in 0..3 {
            g = g.add_loop(&Word::gen(gen));
        }
        let rep = to_perm_rep(&g).unwrap();
        assert_eq!(rep.degree(), 1);
        let pres = SurfacePresentation::new(1, vec![1, 1]).unwrap();
        let b = boundary_components(&rep, &pres);
        assert_eq!(b.iter().map(|c| c.len()).sum::<usize>(), 2);
    }

    #[test]
    fn euler_examples() {
        let p = SurfacePresentation::new(1, vec![1, 1]).unwrap();
        assert_eq!(euler_data(&p, 5, 2).unwrap(), (-10, 5));
        assert_eq!(euler_data(&p, 1, 2).unwrap(), (-2, 1));
        let p = SurfacePresentation::new(1, vec![1]).unwrap();
        assert_eq!(euler_data(&p, 3, 1).unwrap(), (-3, 2));
        assert!(euler_data(&p, 3, 2).is_err());
    }

    #[test]
    fn round_trip_through_graph() {
        let g = cyc3();
        let rep = to_perm_rep(&g).unwrap();
        assert_eq!(rep.to_graph().canonical_form(), g.canonical_form());
    }
}
