//! Free-group words over a surface alphabet, and the peripheral words of a
//! surface with boundary.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("malformed exponent in `{0}`")]
    BadExponent(String),
    #[error("invalid alphabet: {0}")]
    BadAlphabet(String),
    #[error("boundary index {b} out of range 1..={nb}")]
    BoundaryOutOfRange { b: usize, nb: usize },
    #[error("torus {k} with position {p} is not in the boundary layout")]
    BadTorusPosition { k: usize, p: usize },
}

/// A generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: u32,
    pub inv: bool,
}

impl Letter {
    pub fn pos(gen: u32) -> Self {
        Letter { gen, inv: false }
    }

    pub fn neg(gen: u32) -> Self {
        Letter { gen, inv: true }
    }

    pub fn inverse(self) -> Self {
        Letter { gen: self.gen, inv: !self.inv }
    }
}

/// A freely reduced word. Every constructor reduces.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn gen(gen: u32) -> Self {
        Word(vec![Letter::pos(gen)])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::new(self.0.iter().chain(other.0.iter()).copied())
    }

    /// `self^k` for any integer `k`.
    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let n = k.unsigned_abs() as usize;
        Word::new(std::iter::repeat(base.0.iter().copied()).take(n).flatten())
    }

    /// First and last letters are not mutually inverse.
    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.0.first(), self.0.last()) {
            (Some(a), Some(b)) => self.0.len() == 1 || *a != b.inverse(),
            _ => true,
        }
    }

    /// Distinct generators occurring in the word, in index order.
    pub fn support(&self) -> Vec<u32> {
        let mut g: Vec<u32> = self.0.iter().map(|l| l.gen).collect();
        g.sort_unstable();
        g.dedup();
        g
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word::new(iter)
    }
}

/// Generator names. Surface alphabets are `a1 b1 .. ag bg x1 .. x_{nb-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    names: Vec<String>,
    genus: usize,
    boundary_count: usize,
}

impl Alphabet {
    pub fn surface(genus: usize, boundary_count: usize) -> Result<Self, WordError> {
        if boundary_count == 0 {
            return Err(WordError::BadAlphabet("a surface alphabet needs at least one boundary".into()));
        }
        if boundary_count == 1 && genus == 0 {
            return Err(WordError::BadAlphabet("genus 0 with one boundary has an empty alphabet".into()));
        }
        let mut names = Vec::with_capacity(2 * genus + boundary_count - 1);
        for i in 1..=genus {
            names.push(format!("a{i}"));
            names.push(format!("b{i}"));
        }
        for j in 1..boundary_count {
            names.push(format!("x{j}"));
        }
        Ok(Alphabet { names, genus, boundary_count })
    }

    /// An alphabet with no surface structure (genus and boundary count 0).
    pub fn free<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, WordError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || n.contains(char::is_whitespace) || n.contains('^') {
                return Err(WordError::BadAlphabet(format!("bad generator name `{n}`")));
            }
            if names[..i].contains(n) {
                return Err(WordError::BadAlphabet(format!("duplicate generator `{n}`")));
            }
        }
        if names.is_empty() {
            return Err(WordError::BadAlphabet("empty alphabet".into()));
        }
        Ok(Alphabet { names, genus: 0, boundary_count: 0 })
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// Number of boundary components; 0 for free alphabets.
    pub fn boundary_count(&self) -> usize {
        self.boundary_count
    }

    pub fn is_surface(&self) -> bool {
        self.boundary_count > 0
    }

    pub fn name(&self, gen: u32) -> &str {
        &self.names[gen as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index(&self, name: &str) -> Option<u32> {
        self.names.iter().position(|n| n == name).map(|i| i as u32)
    }

    /// Generator `a_i`, 1-based.
    pub fn a(&self, i: usize) -> u32 {
        debug_assert!(i >= 1 && i <= self.genus);
        (2 * (i - 1)) as u32
    }

    pub fn b(&self, i: usize) -> u32 {
        debug_assert!(i >= 1 && i <= self.genus);
        (2 * i - 1) as u32
    }

    /// Generator `x_j` for `1 <= j < nb`.
    pub fn x(&self, j: usize) -> u32 {
        debug_assert!(j >= 1 && j < self.boundary_count);
        (2 * self.genus + j - 1) as u32
    }

    fn parse_letter(&self, tok: &str) -> Result<(Letter, i64), WordError> {
        let (head, exp) = match tok.split_once('^') {
            Some((h, e)) => {
                let e: i64 = e.parse().map_err(|_| WordError::BadExponent(tok.to_string()))?;
                if e == 0 {
                    return Err(WordError::BadExponent(tok.to_string()));
                }
                (h, e)
            }
            None => (tok, 1),
        };
        if let Some(g) = self.index(head) {
            return Ok((Letter::pos(g), exp));
        }
        // Capitalised name means inverse: A1 = a1^-1.
        let mut chars = head.chars();
        if let Some(c) = chars.next() {
            if c.is_uppercase() {
                let lowered: String = c.to_lowercase().chain(chars).collect();
                if let Some(g) = self.index(&lowered) {
                    return Ok((Letter::neg(g), exp));
                }
            }
        }
        Err(WordError::UnknownLetter(head.to_string()))
    }

    /// Whitespace separated letters; `A1` or `a1^-1` for inverses, `a1^3`
    /// for powers, `1` or an empty string for the identity.
    pub fn parse_word(&self, s: &str) -> Result<Word, WordError> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let (l, e) = self.parse_letter(tok)?;
            let l = if e < 0 { l.inverse() } else { l };
            for _ in 0..e.unsigned_abs() {
                letters.push(l);
            }
        }
        Ok(Word::new(letters))
    }

    pub fn render(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        // Runs of one letter render as a power.
        let mut parts: Vec<String> = Vec::new();
        let ls = w.letters();
        let mut i = 0;
        while i < ls.len() {
            let mut j = i;
            while j < ls.len() && ls[j] == ls[i] {
                j += 1;
            }
            let run = (j - i) as i64;
            let e = if ls[i].inv { -run } else { run };
            let name = self.name(ls[i].gen);
            parts.push(if e == 1 { name.to_string() } else { format!("{name}^{e}") });
            i = j;
        }
        parts.join(" ")
    }

    pub fn display<'a>(&'a self, w: &'a Word) -> WordDisplay<'a> {
        WordDisplay { alphabet: self, word: w }
    }
}

pub struct WordDisplay<'a> {
    alphabet: &'a Alphabet,
    word: &'a Word,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.alphabet.render(self.word))
    }
}

/// Surface of genus `g` whose boundary components are grouped by torus:
/// torus `k` carries `layout[k-1]` consecutive boundary indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfacePresentation {
    alphabet: Alphabet,
    layout: Vec<usize>,
}

impl SurfacePresentation {
    pub fn new(genus: usize, layout: Vec<usize>) -> Result<Self, WordError> {
        let nb: usize = layout.iter().sum();
        let alphabet = Alphabet::surface(genus, nb)?;
        Ok(SurfacePresentation { alphabet, layout })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn genus(&self) -> usize {
        self.alphabet.genus
    }

    pub fn boundary_count(&self) -> usize {
        self.alphabet.boundary_count
    }

    pub fn layout(&self) -> &[usize] {
        &self.layout
    }

    /// `b_{k-1} + p`, with `k` and `p` 1-based.
    pub fn boundary_index(&self, k: usize, p: usize) -> Result<usize, WordError> {
        if k == 0 || k > self.layout.len() || p == 0 || p > self.layout[k - 1] {
            return Err(WordError::BadTorusPosition { k, p });
        }
        Ok(self.layout[..k - 1].iter().sum::<usize>() + p)
    }

    /// All `(k, p)` pairs in boundary order.
    pub fn torus_positions(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, &c) in self.layout.iter().enumerate() {
            for p in 1..=c {
                out.push((i + 1, p));
            }
        }
        out
    }

    /// `[a1,b1]...[ag,bg]` with `[a,b] = a b a^-1 b^-1`.
    pub fn commutator_product(&self) -> Word {
        let a = &self.alphabet;
        let mut letters = Vec::new();
        for i in 1..=a.genus {
            letters.push(Letter::pos(a.a(i)));
            letters.push(Letter::pos(a.b(i)));
            letters.push(Letter::neg(a.a(i)));
            letters.push(Letter::neg(a.b(i)));
        }
        Word::new(letters)
    }

    /// `x_b` for `b < nb`; the last boundary reads `C x1 ... x_{nb-1}`.
    pub fn peripheral_word(&self, b: usize) -> Result<Word, WordError> {
        let nb = self.boundary_count();
        if b == 0 || b > nb {
            return Err(WordError::BoundaryOutOfRange { b, nb });
        }
        if b < nb {
            return Ok(Word::gen(self.alphabet.x(b)));
        }
        let mut w = self.commutator_product();
        for j in 1..nb {
            w = w.concat(&Word::gen(self.alphabet.x(j)));
        }
        Ok(w)
    }

    pub fn peripheral_words(&self) -> Vec<Word> {
        (1..=self.boundary_count()).map(|b| self.peripheral_word(b).unwrap()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_cancels() {
        let a = Alphabet::surface(1, 1).unwrap();
        let w = a.parse_word("a1 b1 b1^-1 a1^-1").unwrap();
        assert!(w.is_empty());
        let w = a.parse_word("a1 A1 b1").unwrap();
        assert_eq!(a.render(&w), "b1");
    }

    #[test]
    fn surface_names() {
        let a = Alphabet::surface(2, 3).unwrap();
        assert_eq!(a.names(), &["a1", "b1", "a2", "b2", "x1", "x2"]);
        assert!(Alphabet::surface(0, 1).is_err());
    }

    #[test]
    fn last_peripheral_word() {
        let s = SurfacePresentation::new(1, vec![1, 1]).unwrap();
        let w = s.peripheral_word(2).unwrap();
        assert_eq!(s.alphabet().render(&w), "a1 b1 a1^-1 b1^-1 x1");
        assert_eq!(s.alphabet().render(&s.alphabet().parse_word("a1^2").unwrap()), "a1^2");
        let s = SurfacePresentation::new(2, vec![1]).unwrap();
        assert_eq!(s.peripheral_word(1).unwrap().len(), 8);
    }

    #[test]
    fn boundary_index_layout() {
        let s = SurfacePresentation::new(1, vec![2, 0, 3]).unwrap();
        assert_eq!(s.boundary_index(1, 2).unwrap(), 2);
        assert_eq!(s.boundary_index(3, 1).unwrap(), 3);
        assert!(s.boundary_index(2, 1).is_err());
    }

    #[test]
    fn powers() {
        let a = Alphabet::surface(1, 2).unwrap();
        let w = a.parse_word("a1 x1").unwrap();
        assert_eq!(w.pow(3).len(), 6);
        assert!(w.pow(2).concat(&w.pow(-2)).is_empty());
        assert_eq!(a.parse_word("x1^3").unwrap().len(), 3);
    }
}
