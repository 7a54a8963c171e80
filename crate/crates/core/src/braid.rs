//! Braid words and the combinatorics of their closures.
//!
//! Strands are numbered `1..=n` at the top of the braid. A letter
//! `(k, +1)` is the positive crossing `σ_k` of strands in positions `k`
//! and `k + 1`; `(k, -1)` is its inverse.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub index: usize,
    pub sign: i8,
}

impl Letter {
    pub fn new(index: usize, sign: i8) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        Letter { index, sign }
    }

    pub fn inverse(self) -> Self {
        Letter { index: self.index, sign: -self.sign }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<Letter>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<Letter>) -> Result<Self> {
        if strands == 0 {
            return Err(Error::StrandOutOfRange { k: 0, n: 0 });
        }
        for l in &letters {
            if l.index == 0 || l.index >= strands || (l.sign != 1 && l.sign != -1) {
                return Err(Error::StrandOutOfRange { k: l.index, n: strands });
            }
        }
        Ok(BraidWord { strands, letters })
    }

    /// Builds a braid from signed generator indices, e.g. `[1, -2]` for `σ₁σ₂⁻¹`.
    pub fn from_signed(strands: usize, word: &[i64]) -> Result<Self> {
        let letters = word
            .iter()
            .map(|&k| {
                if k == 0 {
                    Err(Error::BraidParse { token: "0".into(), reason: "generator index 0".into() })
                } else {
                    Ok(Letter::new(k.unsigned_abs() as usize, if k > 0 { 1 } else { -1 }))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(strands, letters)
    }

    pub fn trivial(strands: usize) -> Self {
        assert!(strands >= 1);
        BraidWord { strands, letters: vec![] }
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Reversed word with every sign flipped.
    pub fn inverse(&self) -> BraidWord {
        BraidWord {
            strands: self.strands,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// The word `self` followed by `other`. Both must have the same strand count.
    pub fn concat(&self, other: &BraidWord) -> BraidWord {
        assert_eq!(self.strands, other.strands);
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        BraidWord { strands: self.strands, letters }
    }

    /// Signed-integer form of the word, as accepted by [`parse_braid`].
    pub fn to_text(&self) -> String {
        self.letters
            .iter()
            .map(|l| (l.index as i64 * l.sign as i64).to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Underlying permutation of the braid.
    ///
    /// `perm[i - 1]` is the bottom position reached by the strand that starts
    /// at top position `i`, reading letters left to right. With this
    /// convention the permutation of a concatenation `B B'` is
    /// `perm(B') ∘ perm(B)`.
    pub fn permutation(&self) -> Vec<usize> {
        let mut at: Vec<usize> = (1..=self.strands).collect(); // position -> strand
        for l in &self.letters {
            at.swap(l.index - 1, l.index);
        }
        let mut perm = vec![0; self.strands];
        for (pos, &strand) in at.iter().enumerate() {
            perm[strand - 1] = pos + 1;
        }
        perm
    }

    pub fn components(&self) -> ComponentData {
        link_components(self)
    }

    /// Self-linking number of the closure, defined only for knots.
    pub fn self_linking(&self) -> Result<i64> {
        let cd = self.components();
        if cd.r != 1 {
            return Err(Error::Unsupported(format!(
                "self-linking number requested for a {}-component link",
                cd.r
            )));
        }
        Ok(cd.total_writhe - self.strands as i64)
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1 ∈ B{}", self.strands);
        }
        for l in &self.letters {
            write!(f, "σ{}", l.index)?;
            if l.sign < 0 {
                write!(f, "⁻¹")?;
            }
        }
        Ok(())
    }
}

/// Parses whitespace- or comma-separated nonzero integers into a braid word.
///
/// Without `strands`, the strand count is one more than the largest
/// generator index (or 1 for the empty word).
pub fn parse_braid(text: &str, strands: Option<usize>) -> Result<BraidWord> {
    let mut word = Vec::new();
    for tok in text.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
        let k: i64 = tok.parse().map_err(|_| Error::BraidParse {
            token: tok.to_string(),
            reason: "not an integer".into(),
        })?;
        if k == 0 {
            return Err(Error::BraidParse { token: tok.to_string(), reason: "generator index 0".into() });
        }
        word.push((tok, k));
    }
    let n = match strands {
        Some(n) if n >= 1 => n,
        Some(_) => {
            return Err(Error::BraidParse { token: "--strands".into(), reason: "strand count must be positive".into() })
        }
        None => word.iter().map(|(_, k)| k.unsigned_abs() as usize).max().unwrap_or(0) + 1,
    };
    let mut letters = Vec::with_capacity(word.len());
    for (tok, k) in word {
        let idx = k.unsigned_abs() as usize;
        if idx >= n {
            return Err(Error::BraidParse {
                token: tok.to_string(),
                reason: format!("|k| must be below the strand count {n}"),
            });
        }
        letters.push(Letter::new(idx, if k > 0 { 1 } else { -1 }));
    }
    BraidWord::new(n, letters)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentData {
    /// Number of link components.
    pub r: usize,
    /// `alpha[i - 1]` is the component (1-based) of strand `i`.
    pub alpha: Vec<usize>,
    /// Minimal strand of each component, indexed by component - 1.
    pub leading: Vec<usize>,
    /// Signed self-crossings of each component, indexed by component - 1.
    pub writhe: Vec<i64>,
    pub total_writhe: i64,
}

impl ComponentData {
    pub fn component_of(&self, strand: usize) -> usize {
        self.alpha[strand - 1]
    }

    pub fn is_leading(&self, strand: usize) -> bool {
        self.leading[self.component_of(strand) - 1] == strand
    }

    /// Writhe of the component that strand `i` belongs to.
    pub fn writhe_of_strand(&self, strand: usize) -> i64 {
        self.writhe[self.component_of(strand) - 1]
    }
}

/// Components of the closure: cycles of the permutation, numbered by
/// increasing minimal strand.
pub fn link_components(b: &BraidWord) -> ComponentData {
    let n = b.strands();
    let perm = b.permutation();
    let mut alpha = vec![0usize; n];
    let mut leading = Vec::new();
    for start in 1..=n {
        if alpha[start - 1] != 0 {
            continue;
        }
        leading.push(start);
        let c = leading.len();
        let mut s = start;
        while alpha[s - 1] == 0 {
            alpha[s - 1] = c;
            s = perm[s - 1];
        }
    }
    let r = leading.len();

    let mut writhe = vec![0i64; r];
    let mut total = 0i64;
    let mut at: Vec<usize> = (1..=n).collect();
    for l in b.letters() {
        let (s1, s2) = (at[l.index - 1], at[l.index]);
        total += l.sign as i64;
        if alpha[s1 - 1] == alpha[s2 - 1] {
            writhe[alpha[s1 - 1] - 1] += l.sign as i64;
        }
        at.swap(l.index - 1, l.index);
    }

    ComponentData { r, alpha, leading, writhe, total_writhe: total }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let t = parse_braid("", Some(1)).unwrap();
        assert_eq!(t.strands(), 1);
        assert!(t.is_empty());

        let s = parse_braid("1", Some(2)).unwrap();
        assert_eq!(s.letters(), &[Letter::new(1, 1)]);

        let k1 = parse_braid("1 -2 1 -2 -3 2 3 3 3", None).unwrap();
        assert_eq!(k1.strands(), 4);
        assert_eq!(k1.len(), 9);
        assert_eq!(k1.letters()[4], Letter::new(3, -1));
        assert_eq!(k1.to_text(), "1 -2 1 -2 -3 2 3 3 3");

        assert_eq!(parse_braid("1,-2, 1", None).unwrap().len(), 3);
        assert_eq!(parse_braid("", None).unwrap().strands(), 1);
    }

    #[test]
    fn parse_errors_name_token() {
        for (text, strands, bad) in [("1 0 2", None, "0"), ("1 x", None, "x"), ("1 2", Some(2), "2"), ("-3", Some(3), "-3")] {
            match parse_braid(text, strands) {
                Err(Error::BraidParse { token, .. }) => assert_eq!(token, bad),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn permutation_examples() {
        assert_eq!(BraidWord::trivial(1).permutation(), vec![1]);
        assert_eq!(parse_braid("1", None).unwrap().permutation(), vec![2, 1]);
        assert_eq!(parse_braid("-1", None).unwrap().permutation(), vec![2, 1]);
        assert_eq!(parse_braid("1 1", None).unwrap().permutation(), vec![1, 2]);
        // σ1σ2: strand 1 goes to 3, 2 to 1, 3 to 2
        assert_eq!(parse_braid("1 2", None).unwrap().permutation(), vec![3, 1, 2]);
    }

    #[test]
    fn component_examples() {
        let s = parse_braid("1", None).unwrap().components();
        assert_eq!((s.r, s.alpha.clone(), s.leading.clone(), s.writhe.clone()), (1, vec![1, 1], vec![1], vec![1]));

        let t = BraidWord::trivial(1).components();
        assert_eq!((t.r, t.alpha.clone(), t.leading.clone(), t.writhe.clone()), (1, vec![1], vec![1], vec![0]));

        let h = parse_braid("1 1", None).unwrap().components();
        assert_eq!((h.r, h.alpha.clone(), h.leading.clone(), h.writhe.clone()), (2, vec![1, 2], vec![1, 2], vec![0, 0]));
        assert_eq!(h.total_writhe, 2);
        assert!(h.is_leading(2));
    }

    #[test]
    fn component_numbering_by_minimal_strand() {
        // closure of σ2 in B3: {1} and {2,3}
        let c = parse_braid("2", Some(3)).unwrap().components();
        assert_eq!(c.alpha, vec![1, 2, 2]);
        assert_eq!(c.leading, vec![1, 2]);
        assert_eq!(c.writhe, vec![0, 1]);
    }

    #[test]
    fn self_linking_examples() {
        assert_eq!(BraidWord::trivial(1).self_linking().unwrap(), -1);
        assert_eq!(parse_braid("-1", None).unwrap().self_linking().unwrap(), -3);
        assert_eq!(parse_braid("1", None).unwrap().self_linking().unwrap(), -1);
        let k1 = parse_braid("1 -2 1 -2 -3 2 3 3 3", None).unwrap();
        assert_eq!(k1.self_linking().unwrap(), -1);
        assert!(matches!(parse_braid("1 1", None).unwrap().self_linking(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(parse_braid("1", None).unwrap().inverse().to_text(), "-1");
        assert_eq!(parse_braid("1 -2", None).unwrap().inverse().to_text(), "2 -1");
        assert!(BraidWord::trivial(3).inverse().is_empty());
    }
}
