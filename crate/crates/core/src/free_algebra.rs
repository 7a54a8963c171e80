//! The graded noncommutative free unital algebra over [`CoeffPoly`].
//!
//! Coefficients are central; generators never commute with each other.
//! Terms are kept sorted by word length, then lexicographically by
//! generator, so two equal polynomials always have identical term lists.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Signed;
use rayon::prelude::*;

use rustc_hash::FxHashMap;

use crate::coeff::{subscript, CoeffPoly, RingDescriptor};
use crate::flat::{self, FTerm};
use crate::error::{Error, Result, EXPANSION_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A,
    B,
    C,
    E,
}

impl Family {
    pub fn degree(self) -> i32 {
        match self {
            Family::A => 0,
            Family::B | Family::C => 1,
            Family::E => 2,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Family::A => 'a',
            Family::B => 'b',
            Family::C => 'c',
            Family::E => 'e',
        }
    }

    fn from_letter(c: &str) -> Option<Self> {
        match c {
            "a" => Some(Family::A),
            "b" => Some(Family::B),
            "c" => Some(Family::C),
            "e" => Some(Family::E),
            _ => None,
        }
    }
}

/// A generator `a_ij`, `b_ij`, `c_ij` or `e_ij`.
///
/// Index 0 is reserved for the idle strand used to extract the Φ matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenId {
    pub family: Family,
    pub i: u16,
    pub j: u16,
}

impl GenId {
    pub const fn new(family: Family, i: u16, j: u16) -> Self {
        GenId { family, i, j }
    }

    pub const fn a(i: u16, j: u16) -> Self {
        Self::new(Family::A, i, j)
    }
    pub const fn b(i: u16, j: u16) -> Self {
        Self::new(Family::B, i, j)
    }
    pub const fn c(i: u16, j: u16) -> Self {
        Self::new(Family::C, i, j)
    }
    pub const fn e(i: u16, j: u16) -> Self {
        Self::new(Family::E, i, j)
    }

    pub fn degree(&self) -> i32 {
        self.family.degree()
    }

    /// Machine name, e.g. `a_1_2`.
    pub fn name(&self) -> String {
        format!("{}_{}_{}", self.family.letter(), self.i, self.j)
    }

    pub fn parse(name: &str) -> Option<GenId> {
        let mut parts = name.split('_');
        let family = Family::from_letter(parts.next()?)?;
        let i = parts.next()?.parse().ok()?;
        let j = parts.next()?.parse().ok()?;
        if parts.next().is_some() {
            return None;
        }
        Some(GenId { family, i, j })
    }

    /// Display name such as `a₁₂`, or `c` when `bare` is set.
    pub fn pretty(&self, bare: bool) -> String {
        let mut s = self.family.letter().to_string();
        if bare {
            return s;
        }
        if self.i < 10 && self.j < 10 {
            s.push_str(&subscript(self.i as usize));
            s.push_str(&subscript(self.j as usize));
        } else {
            s.push_str(&format!("_{{{},{}}}", self.i, self.j));
        }
        s
    }
}

/// A monomial word in the generators, ordered by length then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<GenId>);

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn degree(&self) -> i32 {
        self.0.iter().map(|g| g.degree()).sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degree {
    Homogeneous(i32),
    Inhomogeneous,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NcPoly {
    ring: RingDescriptor,
    terms: BTreeMap<Word, CoeffPoly>,
}

impl NcPoly {
    pub fn zero(ring: RingDescriptor) -> Self {
        NcPoly { ring, terms: BTreeMap::new() }
    }

    pub fn one(ring: RingDescriptor) -> Self {
        Self::constant(CoeffPoly::one(ring))
    }

    pub fn constant(c: CoeffPoly) -> Self {
        Self::term(c, Word::empty())
    }

    pub fn gen(ring: RingDescriptor, g: GenId) -> Self {
        Self::term(CoeffPoly::one(ring), Word(vec![g]))
    }

    pub fn term(c: CoeffPoly, w: Word) -> Self {
        let mut p = NcPoly::zero(c.ring());
        if !c.is_zero() {
            p.terms.insert(w, c);
        }
        p
    }

    pub fn from_terms<I>(ring: RingDescriptor, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (CoeffPoly, Word)>,
    {
        let mut p = NcPoly::zero(ring);
        for (c, w) in terms {
            if c.ring() != ring {
                return Err(Error::RingMismatch(c.ring().to_string(), ring.to_string()));
            }
            p.add_term(w, c);
        }
        Ok(p)
    }

    /// Wraps an already canonical term map (no zero coefficients).
    pub(crate) fn from_canonical(ring: RingDescriptor, terms: BTreeMap<Word, CoeffPoly>) -> Self {
        debug_assert!(terms.values().all(|c| !c.is_zero() && c.ring() == ring));
        NcPoly { ring, terms }
    }

    fn add_term(&mut self, w: Word, c: CoeffPoly) {
        use std::collections::btree_map::Entry;
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = &*o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn ring(&self) -> RingDescriptor {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Word, &CoeffPoly)> {
        self.terms.iter()
    }

    pub fn coeff_of(&self, w: &Word) -> Option<&CoeffPoly> {
        self.terms.get(w)
    }

    pub fn constant_term(&self) -> CoeffPoly {
        self.terms.get(&Word::empty()).cloned().unwrap_or_else(|| CoeffPoly::zero(self.ring))
    }

    pub fn generators(&self) -> BTreeSet<GenId> {
        self.terms.keys().flat_map(|w| w.0.iter().copied()).collect()
    }

    pub fn contains(&self, g: GenId) -> bool {
        self.terms.keys().any(|w| w.0.contains(&g))
    }

    pub fn try_add(&self, other: &NcPoly) -> Result<NcPoly> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &NcPoly) -> Result<NcPoly> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &NcPoly) -> Result<NcPoly> {
        self.check_ring(other)?;
        if self.len() * other.len() > 16 {
            if let (Some(x), Some(y)) = (flat::flatten(self), flat::flatten(other)) {
                if let Some(p) = flat::sum_of_products(self.ring, &[(&x, &y)]) {
                    return Ok(p);
                }
            }
        }
        let mut out = NcPoly::zero(self.ring);
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                out.add_term(w1.concat(w2), c1 * c2);
            }
        }
        Ok(out)
    }

    fn check_ring(&self, other: &NcPoly) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring.to_string(), other.ring.to_string()));
        }
        Ok(())
    }

    /// Multiplies every coefficient by the central element `c`.
    pub fn scale(&self, c: &CoeffPoly) -> NcPoly {
        let mut out = NcPoly::zero(self.ring);
        for (w, x) in &self.terms {
            out.add_term(w.clone(), x * c);
        }
        out
    }

    pub fn degree_of(&self) -> Result<Degree> {
        let mut degs = self.terms.keys().map(|w| w.degree());
        let first = degs
            .next()
            .ok_or_else(|| Error::Unsupported("degree of the zero polynomial".into()))?;
        if degs.all(|d| d == first) {
            Ok(Degree::Homogeneous(first))
        } else {
            Ok(Degree::Inhomogeneous)
        }
    }

    /// Applies a coefficient map to every coefficient, keeping words.
    pub fn map_coeffs<F>(&self, target: RingDescriptor, mut f: F) -> Result<NcPoly>
    where
        F: FnMut(&CoeffPoly) -> Result<CoeffPoly>,
    {
        let mut out = NcPoly::zero(target);
        for (w, c) in &self.terms {
            let c2 = f(c)?;
            if c2.ring() != target {
                return Err(Error::RingMismatch(c2.ring().to_string(), target.to_string()));
            }
            out.add_term(w.clone(), c2);
        }
        Ok(out)
    }

    /// Human-readable rendering; generator names are bare letters when `bare`.
    pub fn pretty_with(&self, bare: bool) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut pieces: Vec<(bool, String)> = Vec::new();
        for (w, c) in &self.terms {
            let word: String = w.0.iter().map(|g| g.pretty(bare)).collect();
            if w.is_empty() {
                let mut consts: Vec<(String, bool, String)> = c
                    .terms()
                    .map(|(e, k)| {
                        let key = CoeffPoly::monomial(c.ring(), 1, e.to_vec()).unwrap().pretty();
                        (key, k.is_negative(), CoeffPoly::monomial(c.ring(), k.abs(), e.to_vec()).unwrap().pretty())
                    })
                    .collect();
                consts.sort();
                pieces.extend(consts.into_iter().map(|(_, neg, body)| (neg, body)));
            } else if c.len() == 1 {
                let (e, k) = c.terms().next().unwrap();
                let mono = CoeffPoly::monomial(c.ring(), k.abs(), e.to_vec()).unwrap();
                let m = if mono.is_one() { String::new() } else { mono.pretty() };
                pieces.push((k.is_negative(), format!("{m}{word}")));
            } else {
                pieces.push((false, format!("({}){word}", c.pretty())));
            }
        }
        let mut out = String::new();
        for (k, (neg, body)) in pieces.into_iter().enumerate() {
            match (k, neg) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            out.push_str(&body);
        }
        out
    }
}

impl fmt::Display for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty_with(false))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $try:ident) => {
        impl $tr<&NcPoly> for &NcPoly {
            type Output = NcPoly;
            fn $m(self, rhs: &NcPoly) -> NcPoly {
                self.$try(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<NcPoly> for NcPoly {
            type Output = NcPoly;
            fn $m(self, rhs: NcPoly) -> NcPoly {
                (&self).$m(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &NcPoly {
    type Output = NcPoly;
    fn neg(self) -> NcPoly {
        NcPoly { ring: self.ring, terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect() }
    }
}

impl Neg for NcPoly {
    type Output = NcPoly;
    fn neg(self) -> NcPoly {
        -&self
    }
}

/// Square matrix of [`NcPoly`] entries, indexed from 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NcMatrix {
    n: usize,
    ring: RingDescriptor,
    entries: Vec<NcPoly>,
}

impl NcMatrix {
    pub fn zero(ring: RingDescriptor, n: usize) -> Self {
        NcMatrix { n, ring, entries: vec![NcPoly::zero(ring); n * n] }
    }

    pub fn identity(ring: RingDescriptor, n: usize) -> Self {
        let mut m = Self::zero(ring, n);
        for i in 0..n {
            m.set(i, i, NcPoly::one(ring));
        }
        m
    }

    pub fn from_fn<F>(ring: RingDescriptor, n: usize, mut f: F) -> Self
    where
        F: FnMut(usize, usize) -> NcPoly,
    {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let p = f(i, j);
                assert_eq!(p.ring(), ring);
                entries.push(p);
            }
        }
        NcMatrix { n, ring, entries }
    }

    pub fn from_rows(ring: RingDescriptor, rows: Vec<Vec<NcPoly>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::Unsupported(format!("row of length {} in {n}×{n} matrix", row.len())));
            }
            entries.extend(row);
        }
        Ok(NcMatrix { n, ring, entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn ring(&self) -> RingDescriptor {
        self.ring
    }

    pub fn get(&self, i: usize, j: usize) -> &NcPoly {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: NcPoly) {
        self.entries[i * self.n + j] = p;
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.ring, self.n)
    }

    fn check(&self, other: &NcMatrix) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Unsupported(format!("dimension mismatch {} vs {}", self.n, other.n)));
        }
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring.to_string(), other.ring.to_string()));
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &NcMatrix) -> Result<NcMatrix> {
        self.check(other)?;
        let n = self.n;
        let fx: Option<Vec<Vec<FTerm>>> = self.entries.iter().map(flat::flatten).collect();
        let fy: Option<Vec<Vec<FTerm>>> = other.entries.iter().map(flat::flatten).collect();
        let entries: Vec<NcPoly> = (0..n * n)
            .into_par_iter()
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                if let (Some(fx), Some(fy)) = (&fx, &fy) {
                    let pairs: Vec<(&[FTerm], &[FTerm])> =
                        (0..n).map(|k| (fx[i * n + k].as_slice(), fy[k * n + j].as_slice())).collect();
                    if let Some(p) = flat::sum_of_products(self.ring, &pairs) {
                        return p;
                    }
                }
                let mut acc = NcPoly::zero(self.ring);
                for k in 0..n {
                    let (x, y) = (self.get(i, k), other.get(k, j));
                    if x.is_zero() || y.is_zero() {
                        continue;
                    }
                    acc = &acc + &(x * y);
                }
                acc
            })
            .collect();
        Ok(NcMatrix { n, ring: self.ring, entries })
    }

    pub fn try_add(&self, other: &NcMatrix) -> Result<NcMatrix> {
        self.check(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(x, y)| x + y).collect();
        Ok(NcMatrix { n: self.n, ring: self.ring, entries })
    }

    pub fn try_sub(&self, other: &NcMatrix) -> Result<NcMatrix> {
        self.check(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(x, y)| x - y).collect();
        Ok(NcMatrix { n: self.n, ring: self.ring, entries })
    }

    /// Entrywise map, possibly into another ring.
    pub fn try_map<F>(&self, target: RingDescriptor, f: F) -> Result<NcMatrix>
    where
        F: Fn(&NcPoly) -> Result<NcPoly> + Sync,
    {
        let entries = self.entries.par_iter().map(&f).collect::<Result<Vec<_>>>()?;
        if let Some(bad) = entries.iter().find(|p| p.ring() != target) {
            return Err(Error::RingMismatch(bad.ring().to_string(), target.to_string()));
        }
        Ok(NcMatrix { n: self.n, ring: target, entries })
    }

    pub fn rows(&self) -> impl Iterator<Item = &[NcPoly]> {
        self.entries.chunks(self.n.max(1))
    }
}

macro_rules! forward_matop {
    ($tr:ident, $m:ident, $try:ident) => {
        impl $tr<&NcMatrix> for &NcMatrix {
            type Output = NcMatrix;
            fn $m(self, rhs: &NcMatrix) -> NcMatrix {
                self.$try(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
    };
}

forward_matop!(Add, add, try_add);
forward_matop!(Sub, sub, try_sub);
forward_matop!(Mul, mul, try_mul);

impl Neg for &NcMatrix {
    type Output = NcMatrix;
    fn neg(self) -> NcMatrix {
        NcMatrix { n: self.n, ring: self.ring, entries: self.entries.iter().map(|p| -p).collect() }
    }
}

impl fmt::Display for NcMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|p| p.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// A unital algebra endomorphism given by generator images.
///
/// Generators without an image are fixed. When `tilde_perm` is set, the
/// coefficient variables `μ̃_i` are permuted as `μ̃_i ↦ μ̃_{perm[i]}`;
/// otherwise coefficients are fixed.
#[derive(Debug, Clone)]
pub struct GenSubstitution {
    ring: RingDescriptor,
    images: BTreeMap<GenId, NcPoly>,
    tilde_perm: Option<Vec<usize>>,
    domain: Option<Vec<Family>>,
    flat_images: OnceLock<Option<FxHashMap<GenId, Vec<FTerm>>>>,
}

impl PartialEq for GenSubstitution {
    fn eq(&self, other: &Self) -> bool {
        (self.ring, &self.images, &self.tilde_perm, &self.domain) == (other.ring, &other.images, &other.tilde_perm, &other.domain)
    }
}

impl Eq for GenSubstitution {}

impl GenSubstitution {
    pub fn identity(ring: RingDescriptor) -> Self {
        GenSubstitution { ring, images: BTreeMap::new(), tilde_perm: None, domain: None, flat_images: OnceLock::new() }
    }

    /// Restricts the substitution to polynomials in the given families.
    pub fn with_domain(mut self, families: &[Family]) -> Self {
        self.domain = Some(families.to_vec());
        self
    }

    pub fn with_tilde_perm(mut self, perm: Vec<usize>) -> Self {
        assert_eq!(perm.len(), self.ring.tilde);
        self.tilde_perm = Some(perm);
        self
    }

    pub fn ring(&self) -> RingDescriptor {
        self.ring
    }

    pub fn tilde_perm(&self) -> Option<&[usize]> {
        self.tilde_perm.as_deref()
    }

    pub fn domain(&self) -> Option<&[Family]> {
        self.domain.as_deref()
    }

    pub fn set(&mut self, g: GenId, image: NcPoly) {
        assert_eq!(image.ring(), self.ring);
        self.flat_images = OnceLock::new();
        if image == NcPoly::gen(self.ring, g) {
            self.images.remove(&g);
        } else {
            self.images.insert(g, image);
        }
    }

    pub fn image(&self, g: GenId) -> NcPoly {
        self.images.get(&g).cloned().unwrap_or_else(|| NcPoly::gen(self.ring, g))
    }

    /// Generators with a nontrivial image.
    pub fn moved(&self) -> impl Iterator<Item = (&GenId, &NcPoly)> {
        self.images.iter()
    }

    fn map_coeff(&self, c: &CoeffPoly) -> CoeffPoly {
        match &self.tilde_perm {
            Some(p) => c.permute_tilde(p),
            None => c.clone(),
        }
    }

    pub fn apply(&self, x: &NcPoly) -> Result<NcPoly> {
        if x.ring() != self.ring {
            return Err(Error::RingMismatch(x.ring().to_string(), self.ring.to_string()));
        }
        if let Some(dom) = &self.domain {
            if let Some(g) = x.generators().into_iter().find(|g| !dom.contains(&g.family)) {
                return Err(Error::Unsupported(format!("substitution is not defined on {}", g.name())));
            }
        }
        let bound = x.terms().try_fold(0u64, |acc, (w, _)| {
            let t = w.0.iter().try_fold(1u64, |t, g| t.checked_mul(self.images.get(g).map_or(1, |img| img.len() as u64)))?;
            acc.checked_add(t)
        });
        if bound.map_or(true, |b| b > EXPANSION_LIMIT) {
            return Err(Error::TooLarge(format!("substituting into {} terms", x.len())));
        }
        if let Some(p) = self.apply_flat(x) {
            return Ok(p);
        }
        let mut out = NcPoly::zero(self.ring);
        for (w, c) in x.terms() {
            let mut acc = NcPoly::constant(self.map_coeff(c));
            for g in &w.0 {
                match self.images.get(g) {
                    Some(img) => acc = &acc * img,
                    None => {
                        let mut next = NcPoly::zero(self.ring);
                        for (w2, c2) in acc.terms {
                            next.terms.insert(w2.concat(&Word(vec![*g])), c2);
                        }
                        acc = next;
                    }
                }
            }
            for (w2, c2) in acc.terms {
                out.add_term(w2, c2);
            }
        }
        Ok(out)
    }

    fn apply_flat(&self, x: &NcPoly) -> Option<NcPoly> {
        let images = self
            .flat_images
            .get_or_init(|| self.images.iter().map(|(g, p)| Some((*g, flat::flatten(p)?))).collect())
            .as_ref()?;
        let mut total = flat::Acc::new();
        for (w, c) in x.terms() {
            let mut cur: Vec<FTerm> = flat::flatten_coeff(&self.map_coeff(c))?
                .into_iter()
                .map(|(exps, c)| FTerm::new(Default::default(), exps, c))
                .collect();
            for g in &w.0 {
                match images.get(g) {
                    Some(img) => {
                        let mut acc = flat::Acc::new();
                        for t in &cur {
                            for y in img {
                                acc.add_product(t, y, 1);
                            }
                        }
                        cur = acc.into_terms()?;
                    }
                    None => {
                        let code = flat::encode_word(std::slice::from_ref(g))?[0];
                        cur.iter_mut().for_each(|t| t.push(code))
                    }
                }
            }
            for t in &cur {
                total.add(t);
            }
        }
        total.into_poly(self.ring)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &GenSubstitution) -> Result<GenSubstitution> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring.to_string(), other.ring.to_string()));
        }
        let keys: BTreeSet<GenId> = self.images.keys().chain(other.images.keys()).copied().collect();
        let mut out = GenSubstitution::identity(self.ring);
        out.domain = match (&self.domain, &other.domain) {
            (Some(a), Some(b)) => Some(a.iter().filter(|f| b.contains(f)).copied().collect()),
            (Some(a), None) => Some(a.clone()),
            (None, b) => b.clone(),
        };
        let imgs: Vec<(GenId, NcPoly)> = keys
            .into_par_iter()
            .map(|g| Ok((g, self.apply(&other.image(g))?)))
            .collect::<Result<_>>()?;
        for (g, p) in imgs {
            out.set(g, p);
        }
        out.tilde_perm = match (&self.tilde_perm, &other.tilde_perm) {
            (None, None) => None,
            (Some(a), None) => Some(a.clone()),
            (None, Some(b)) => Some(b.clone()),
            (Some(a), Some(b)) => Some(b.iter().map(|&i| a[i]).collect()),
        };
        if let Some(p) = &out.tilde_perm {
            if p.iter().enumerate().all(|(i, &x)| i == x) {
                out.tilde_perm = None;
            }
        }
        Ok(out)
    }

    /// Images in a new coefficient ring, via a coefficient map that must not
    /// depend on `μ̃` ordering (the permutation is dropped).
    pub fn map_coeffs<F>(&self, target: RingDescriptor, f: F) -> Result<GenSubstitution>
    where
        F: Fn(&CoeffPoly) -> Result<CoeffPoly>,
    {
        let mut out = GenSubstitution::identity(target);
        out.domain = self.domain.clone();
        for (g, img) in &self.images {
            out.set(*g, img.map_coeffs(target, &f)?);
        }
        Ok(out)
    }

    /// True when every generator in `gens` is fixed and no coefficient moves.
    pub fn is_identity_on(&self, gens: &[GenId]) -> bool {
        self.tilde_perm.is_none() && gens.iter().all(|g| !self.images.contains_key(g))
    }
}
