//! Exact arithmetic in the commutative coefficient rings
//! `ℤ[λ_j^{±1}, μ_j^{±1}][U, V]` and their variants.
//!
//! Exponent vectors are dense, laid out as
//! `(λ_1, …, λ_r, μ_1, …, μ_r, U, V, μ̃_0, …, μ̃_{t-1})`, where the `U, V`
//! slots exist unless the mode is [`UvMode::Absent`] and the `μ̃` slots
//! are only used while computing the braid action.
//!
//! ## Text form
//!
//! A polynomial prints as its terms in increasing lexicographic order of
//! exponent vectors, joined by `+` without spaces. A term is a signed
//! integer followed by `*`-separated factors `name` or `name^exp`, with
//! names `l<j>`, `m<j>`, `U`, `V` and `t<i>`. Zero-exponent factors are
//! omitted on output and accepted on input. The zero polynomial is `0`.
//!
//! ```text
//! 1*U+1*m1+1*l1+1*l1*m1*V
//! -1*l1^-1*m1^-1
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UvMode {
    /// `U, V` with non-negative exponents.
    Polynomial,
    /// `U^{±1}, V^{±1}`.
    Laurent,
    /// No `U, V` variables.
    Absent,
}

impl UvMode {
    pub fn name(self) -> &'static str {
        match self {
            UvMode::Polynomial => "polynomial",
            UvMode::Laurent => "laurent",
            UvMode::Absent => "absent",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "polynomial" => Some(UvMode::Polynomial),
            "laurent" => Some(UvMode::Laurent),
            "absent" => Some(UvMode::Absent),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RingDescriptor {
    pub r: usize,
    pub uv: UvMode,
    pub tilde: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    /// `λ_j`, 1-based.
    Lambda(usize),
    /// `μ_j`, 1-based.
    Mu(usize),
    U,
    V,
    /// `μ̃_i`, 0-based strand label.
    MuTilde(usize),
}

impl Var {
    pub fn name(self) -> String {
        match self {
            Var::Lambda(j) => format!("l{j}"),
            Var::Mu(j) => format!("m{j}"),
            Var::U => "U".into(),
            Var::V => "V".into(),
            Var::MuTilde(i) => format!("t{i}"),
        }
    }
}

impl RingDescriptor {
    pub fn new(r: usize, uv: UvMode) -> Self {
        RingDescriptor { r, uv, tilde: 0 }
    }

    /// `ℤ[μ̃_0^{±1}, …, μ̃_{t-1}^{±1}]`.
    pub fn tilde_only(t: usize) -> Self {
        RingDescriptor { r: 0, uv: UvMode::Absent, tilde: t }
    }

    fn uv_slots(&self) -> usize {
        if self.uv == UvMode::Absent {
            0
        } else {
            2
        }
    }

    pub fn nvars(&self) -> usize {
        2 * self.r + self.uv_slots() + self.tilde
    }

    pub fn index(&self, v: Var) -> Option<usize> {
        match v {
            Var::Lambda(j) if (1..=self.r).contains(&j) => Some(j - 1),
            Var::Mu(j) if (1..=self.r).contains(&j) => Some(self.r + j - 1),
            Var::U if self.uv != UvMode::Absent => Some(2 * self.r),
            Var::V if self.uv != UvMode::Absent => Some(2 * self.r + 1),
            Var::MuTilde(i) if i < self.tilde => Some(2 * self.r + self.uv_slots() + i),
            _ => None,
        }
    }

    pub fn var(&self, idx: usize) -> Var {
        let r = self.r;
        let uv = self.uv_slots();
        if idx < r {
            Var::Lambda(idx + 1)
        } else if idx < 2 * r {
            Var::Mu(idx - r + 1)
        } else if idx < 2 * r + uv {
            if idx == 2 * r {
                Var::U
            } else {
                Var::V
            }
        } else {
            assert!(idx < self.nvars(), "variable index {idx} out of range");
            Var::MuTilde(idx - 2 * r - uv)
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        (0..self.nvars()).map(|i| self.var(i))
    }

    /// Whether a variable may carry negative exponents.
    pub fn is_laurent(&self, v: Var) -> bool {
        match v {
            Var::U | Var::V => self.uv == UvMode::Laurent,
            _ => true,
        }
    }

    fn check_exps(&self, exps: &[i32]) -> Result<()> {
        if exps.len() != self.nvars() {
            return Err(Error::Internal(format!("exponent vector of length {} in {self}", exps.len())));
        }
        if self.uv == UvMode::Polynomial && (exps[2 * self.r] < 0 || exps[2 * self.r + 1] < 0) {
            return Err(Error::NotInvertible("U or V in polynomial mode".into()));
        }
        Ok(())
    }
}

impl fmt::Display for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ring(r={}, uv={}, tilde={})", self.r, self.uv.name(), self.tilde)
    }
}

fn check_same(a: &RingDescriptor, b: &RingDescriptor) -> Result<()> {
    if a != b {
        Err(Error::RingMismatch(a.to_string(), b.to_string()))
    } else {
        Ok(())
    }
}

/// A Laurent polynomial with integer coefficients, in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoeffPoly {
    ring: RingDescriptor,
    terms: BTreeMap<Vec<i32>, BigInt>,
}

impl CoeffPoly {
    pub fn zero(ring: RingDescriptor) -> Self {
        CoeffPoly { ring, terms: BTreeMap::new() }
    }

    pub fn one(ring: RingDescriptor) -> Self {
        Self::constant(ring, 1)
    }

    pub fn constant(ring: RingDescriptor, c: i64) -> Self {
        let mut p = Self::zero(ring);
        if c != 0 {
            p.terms.insert(vec![0; ring.nvars()], BigInt::from(c));
        }
        p
    }

    /// `c · x^e` for a single monomial given by its exponent vector.
    pub fn monomial(ring: RingDescriptor, c: impl Into<BigInt>, exps: Vec<i32>) -> Result<Self> {
        ring.check_exps(&exps)?;
        let c = c.into();
        let mut p = Self::zero(ring);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        Ok(p)
    }

    /// `v^e`. Panics if `v` is not a variable of `ring` or if `e < 0` for a
    /// non-Laurent variable.
    pub fn var_pow(ring: RingDescriptor, v: Var, e: i32) -> Self {
        let idx = ring.index(v).unwrap_or_else(|| panic!("{} is not a variable of {ring}", v.name()));
        assert!(e >= 0 || ring.is_laurent(v), "negative power of {} in {ring}", v.name());
        let mut exps = vec![0; ring.nvars()];
        exps[idx] = e;
        let mut p = Self::zero(ring);
        p.terms.insert(exps, BigInt::one());
        p
    }

    pub fn var(ring: RingDescriptor, v: Var) -> Self {
        Self::var_pow(ring, v, 1)
    }

    pub fn from_terms<I>(ring: RingDescriptor, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i32>, BigInt)>,
    {
        let mut p = Self::zero(ring);
        for (e, c) in terms {
            ring.check_exps(&e)?;
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// From distinct exponent vectors in increasing order with nonzero
    /// coefficients.
    pub(crate) fn from_sorted(ring: RingDescriptor, terms: Vec<(Vec<i32>, BigInt)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 < w[1].0) && terms.iter().all(|(e, c)| !c.is_zero() && ring.check_exps(e).is_ok()));
        CoeffPoly { ring, terms: terms.into_iter().collect() }
    }

    fn add_term(&mut self, exps: Vec<i32>, c: BigInt) {
        use std::collections::btree_map::Entry;
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
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

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical (lexicographic) order.
    pub fn terms(&self) -> impl Iterator<Item = (&[i32], &BigInt)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    /// The constant value, if the polynomial has no variable part.
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Inverse of a unit: `±` a single monomial whose negated exponents are
    /// allowed in this ring.
    pub fn unit_inverse(&self) -> Option<CoeffPoly> {
        if self.terms.len() != 1 {
            return None;
        }
        let (e, c) = self.terms.iter().next().unwrap();
        if !(c.is_one() || (-c).is_one()) {
            return None;
        }
        let inv: Vec<i32> = e.iter().map(|x| -x).collect();
        self.ring.check_exps(&inv).ok()?;
        let mut p = Self::zero(self.ring);
        p.terms.insert(inv, c.clone());
        Some(p)
    }

    pub fn is_unit(&self) -> bool {
        self.unit_inverse().is_some()
    }

    pub fn try_add(&self, other: &CoeffPoly) -> Result<CoeffPoly> {
        check_same(&self.ring, &other.ring)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &CoeffPoly) -> Result<CoeffPoly> {
        check_same(&self.ring, &other.ring)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &CoeffPoly) -> Result<CoeffPoly> {
        check_same(&self.ring, &other.ring)?;
        let mut out = Self::zero(self.ring);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<i32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, k: &BigInt) -> CoeffPoly {
        if k.is_zero() {
            return Self::zero(self.ring);
        }
        CoeffPoly { ring: self.ring, terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect() }
    }

    pub fn pow(&self, e: u32) -> CoeffPoly {
        let mut out = Self::one(self.ring);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Componentwise minima of the `U` and `V` exponents over all terms.
    pub fn min_uv_exponents(&self) -> Result<(i32, i32)> {
        if self.is_zero() {
            return Err(Error::Unsupported("min_uv_exponents of the zero polynomial".into()));
        }
        let (iu, iv) = match (self.ring.index(Var::U), self.ring.index(Var::V)) {
            (Some(u), Some(v)) => (u, v),
            _ => return Ok((0, 0)),
        };
        let mu = self.terms.keys().map(|e| e[iu]).min().unwrap();
        let mv = self.terms.keys().map(|e| e[iv]).min().unwrap();
        Ok((mu, mv))
    }

    /// Exponent of `v` in every term, as `(min, max)`; `None` for zero.
    pub fn exponent_range(&self, v: Var) -> Option<(i32, i32)> {
        let idx = self.ring.index(v)?;
        let min = self.terms.keys().map(|e| e[idx]).min()?;
        let max = self.terms.keys().map(|e| e[idx]).max()?;
        Some((min, max))
    }

    /// Ring homomorphism into `map.target` given by the images of every
    /// source variable.
    pub fn substitute(&self, map: &CoeffMap) -> Result<CoeffPoly> {
        check_same(&self.ring, &map.source)?;
        let mut out = CoeffPoly::zero(map.target);
        let mut cache: BTreeMap<(usize, i32), CoeffPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut term = CoeffPoly::constant(map.target, 1).scale(c);
            for (idx, &x) in e.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                if !cache.contains_key(&(idx, x)) {
                    let p = map.power(idx, x)?;
                    cache.insert((idx, x), p);
                }
                term = &term * &cache[&(idx, x)];
            }
            for (e2, c2) in term.terms {
                out.add_term(e2, c2);
            }
        }
        Ok(out)
    }

    /// Evaluates in `ℤ/p` with `values[i]` the image of variable `i`.
    pub fn eval_mod(&self, p: u64, values: &[u64]) -> Result<u64> {
        if values.len() != self.ring.nvars() {
            return Err(Error::Unassigned(format!("expected {} values, got {}", self.ring.nvars(), values.len())));
        }
        let pb = BigInt::from(p);
        let mut acc = 0u64;
        for (e, c) in &self.terms {
            let c = (c % &pb + &pb) % &pb;
            let mut t = c.to_u64().unwrap();
            for (idx, &x) in e.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                let base = values[idx] % p;
                let base = if x < 0 {
                    if base == 0 {
                        return Err(Error::NotInvertible(self.ring.var(idx).name()));
                    }
                    mod_inverse(base, p)
                } else {
                    base
                };
                t = mul_mod(t, pow_mod(base, x.unsigned_abs() as u64, p), p);
            }
            acc = (acc + t) % p;
        }
        Ok(acc)
    }

    /// Permutes the `μ̃` variables: `μ̃_i ↦ μ̃_{perm[i]}`.
    pub fn permute_tilde(&self, perm: &[usize]) -> CoeffPoly {
        let t = self.ring.tilde;
        assert_eq!(perm.len(), t);
        if t == 0 {
            return self.clone();
        }
        let base = self.ring.nvars() - t;
        let mut out = CoeffPoly::zero(self.ring);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            for i in 0..t {
                e2[base + perm[i]] = e[base + i];
            }
            out.terms.insert(e2, c.clone());
        }
        out
    }

    /// Canonical text form (see module docs).
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                out.push('+');
            }
            out.push_str(&c.to_string());
            for (idx, &x) in e.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                out.push('*');
                out.push_str(&self.ring.var(idx).name());
                if x != 1 {
                    out.push('^');
                    out.push_str(&x.to_string());
                }
            }
        }
        out
    }

    /// Parses the canonical text form.
    pub fn parse(ring: RingDescriptor, text: &str) -> Result<CoeffPoly> {
        let err = |reason: &str| Error::CoeffParse { text: text.to_string(), reason: reason.to_string() };
        let text_t = text.trim();
        if text_t == "0" {
            return Ok(CoeffPoly::zero(ring));
        }
        let mut out = CoeffPoly::zero(ring);
        for term in split_terms(text_t) {
            let mut factors = term.split('*');
            let c: BigInt = factors
                .next()
                .filter(|s| !s.is_empty())
                .ok_or_else(|| err("empty term"))?
                .parse()
                .map_err(|_| err("term must start with an integer coefficient"))?;
            let mut exps = vec![0; ring.nvars()];
            for f in factors {
                let (name, e) = match f.split_once('^') {
                    Some((n, e)) => (n, e.parse::<i32>().map_err(|_| err("bad exponent"))?),
                    None => (f, 1),
                };
                let v = parse_var(name).ok_or_else(|| err(&format!("unknown variable {name:?}")))?;
                let idx = ring.index(v).ok_or_else(|| err(&format!("{name} is not a variable of {ring}")))?;
                exps[idx] += e;
            }
            ring.check_exps(&exps).map_err(|_| err("negative U/V exponent in polynomial mode"))?;
            out.add_term(exps, c);
        }
        Ok(out)
    }

    /// Human-readable rendering with terms sorted by their monomial text,
    /// e.g. `U + λ + λμV + μ`.
    pub fn pretty(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut terms: Vec<(String, &BigInt)> = self.terms.iter().map(|(e, c)| (pretty_monomial(&self.ring, e), c)).collect();
        terms.sort_by(|x, y| x.0.cmp(&y.0));
        let mut out = String::new();
        for (k, (mono, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if mono.is_empty() {
                out.push_str(&abs.to_string());
            } else {
                if !abs.is_one() {
                    out.push_str(&abs.to_string());
                }
                out.push_str(&mono);
            }
        }
        out
    }
}

fn split_terms(s: &str) -> Vec<&str> {
    // '+' separates terms except directly after '^' (never emitted, but be lenient).
    let mut parts = Vec::new();
    let mut start = 0;
    let b = s.as_bytes();
    for i in 0..b.len() {
        if b[i] == b'+' && i > 0 && b[i - 1] != b'^' {
            parts.push(s[start..i].trim());
            start = i + 1;
        }
    }
    parts.push(s[start..].trim());
    parts
}

fn parse_var(name: &str) -> Option<Var> {
    match name {
        "U" => return Some(Var::U),
        "V" => return Some(Var::V),
        _ => {}
    }
    let (head, num) = name.split_at(1.min(name.len()));
    let k: usize = num.parse().ok()?;
    match head {
        "l" if k >= 1 => Some(Var::Lambda(k)),
        "m" if k >= 1 => Some(Var::Mu(k)),
        "t" => Some(Var::MuTilde(k)),
        _ => None,
    }
}

const SUPERSCRIPT: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
const SUBSCRIPT: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];

pub(crate) fn superscript(x: i64) -> String {
    let mut s = String::new();
    if x < 0 {
        s.push('⁻');
    }
    for d in x.unsigned_abs().to_string().bytes() {
        s.push(SUPERSCRIPT[(d - b'0') as usize]);
    }
    s
}

pub(crate) fn subscript(x: usize) -> String {
    x.to_string().bytes().map(|d| SUBSCRIPT[(d - b'0') as usize]).collect()
}

fn pretty_monomial(ring: &RingDescriptor, e: &[i32]) -> String {
    let mut s = String::new();
    for (idx, &x) in e.iter().enumerate() {
        if x == 0 {
            continue;
        }
        let v = ring.var(idx);
        match v {
            Var::Lambda(j) => {
                s.push('λ');
                if ring.r > 1 {
                    s.push_str(&subscript(j));
                }
            }
            Var::Mu(j) => {
                s.push('μ');
                if ring.r > 1 {
                    s.push_str(&subscript(j));
                }
            }
            Var::U => s.push('U'),
            Var::V => s.push('V'),
            Var::MuTilde(i) => {
                s.push_str("μ̃");
                s.push_str(&subscript(i));
            }
        }
        if x != 1 {
            s.push_str(&superscript(x as i64));
        }
    }
    s
}

impl fmt::Display for CoeffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $try:ident) => {
        impl $tr<&CoeffPoly> for &CoeffPoly {
            type Output = CoeffPoly;
            fn $m(self, rhs: &CoeffPoly) -> CoeffPoly {
                self.$try(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<CoeffPoly> for CoeffPoly {
            type Output = CoeffPoly;
            fn $m(self, rhs: CoeffPoly) -> CoeffPoly {
                (&self).$m(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &CoeffPoly {
    type Output = CoeffPoly;
    fn neg(self) -> CoeffPoly {
        CoeffPoly { ring: self.ring, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }
}

impl Neg for CoeffPoly {
    type Output = CoeffPoly;
    fn neg(self) -> CoeffPoly {
        -&self
    }
}

/// Images of every variable of `source` as polynomials over `target`.
#[derive(Debug, Clone)]
pub struct CoeffMap {
    pub source: RingDescriptor,
    pub target: RingDescriptor,
    images: Vec<Option<CoeffPoly>>,
}

impl CoeffMap {
    /// A map with no images assigned yet.
    pub fn new(source: RingDescriptor, target: RingDescriptor) -> Self {
        CoeffMap { source, target, images: vec![None; source.nvars()] }
    }

    /// Sends every variable that also exists in `target` to itself.
    pub fn retaining(source: RingDescriptor, target: RingDescriptor) -> Self {
        let mut m = Self::new(source, target);
        for (i, v) in source.vars().enumerate() {
            if target.index(v).is_some() {
                m.images[i] = Some(CoeffPoly::var(target, v));
            }
        }
        m
    }

    pub fn set(&mut self, v: Var, image: CoeffPoly) -> &mut Self {
        let idx = self.source.index(v).unwrap_or_else(|| panic!("{} is not a variable of {}", v.name(), self.source));
        assert_eq!(image.ring, self.target);
        self.images[idx] = Some(image);
        self
    }

    pub fn with(mut self, v: Var, image: CoeffPoly) -> Self {
        self.set(v, image);
        self
    }

    fn power(&self, idx: usize, e: i32) -> Result<CoeffPoly> {
        let v = self.source.var(idx);
        let img = self.images[idx].as_ref().ok_or_else(|| Error::Unassigned(v.name()))?;
        if e >= 0 {
            Ok(img.pow(e as u32))
        } else {
            let inv = img.unit_inverse().ok_or_else(|| Error::NotInvertible(v.name()))?;
            Ok(inv.pow(e.unsigned_abs()))
        }
    }
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    r
}

/// Inverse in `ℤ/p` for prime `p` (Fermat).
pub(crate) fn mod_inverse(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}
