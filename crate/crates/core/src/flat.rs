//! Allocation-light arithmetic for large products.
//!
//! A polynomial is flattened into terms `(word, exponents, integer)` with
//! generators packed into `u16` codes and machine-size coefficients, then
//! summed in a hash map. Callers fall back to the exact `BigInt` path when
//! a coefficient does not fit.
//!
//! Sums with many intermediate terms are evaluated in several passes, each
//! keeping only the output keys whose hash falls in
//! the pass. Every output word belongs to exactly one pass, so each pass's
//! totals are final and memory stays bounded.


use num_bigint::BigInt;
use num_traits::ToPrimitive;
use hashbrown::HashTable;
use smallvec::SmallVec;

use crate::coeff::{CoeffPoly, RingDescriptor};
use crate::free_algebra::{Family, GenId, NcPoly, Word};

pub(crate) type WordBuf = SmallVec<[u16; 24]>;
pub(crate) type ExpBuf = SmallVec<[i16; 8]>;

/// Bound on coefficients so that one product fits comfortably in `i128`.
const LIMIT: i128 = 1 << 62;

/// Bound on input exponents so that a sum of two stays inside `i16`.
const EXP_LIMIT: i32 = 1 << 13;

/// Sums with at most this many products go straight into one table.
const DIRECT: usize = 1 << 17;

/// Products recorded per pass of a large sum.
const PASS_CAPACITY: usize = 1 << 24;

/// Target size of one partition within a pass.
const PARTITION: usize = 1 << 15;

const BUCKETS: usize = 4096;

fn encode(g: &GenId) -> u16 {
    debug_assert!(g.i < 128 && g.j < 128);
    let f = match g.family {
        Family::A => 0,
        Family::B => 1,
        Family::C => 2,
        Family::E => 3,
    };
    (f << 14) | (g.i << 7) | g.j
}

fn decode(x: u16) -> GenId {
    let family = match x >> 14 {
        0 => Family::A,
        1 => Family::B,
        2 => Family::C,
        _ => Family::E,
    };
    GenId::new(family, (x >> 7) & 0x7f, x & 0x7f)
}

pub(crate) fn encode_word(w: &[GenId]) -> Option<WordBuf> {
    w.iter().map(|g| (g.i < 128 && g.j < 128).then(|| encode(g))).collect()
}

/// Multiplier of the rolling word hash; `h(a·b) = h(a)·B^{|b|} + h(b)`.
const B: u64 = 0x9e37_79b9_7f4a_7c15;

fn word_hash(w: &[u16]) -> (u64, u64) {
    w.iter().fold((0, 1), |(h, p), &x| (h.wrapping_mul(B).wrapping_add(x as u64 + 1), p.wrapping_mul(B)))
}

/// Linear in the exponents, so the hash of a product is a sum.
fn exp_hash(e: &[i16]) -> u64 {
    e.iter().enumerate().fold(0u64, |h, (i, &x)| {
        let r = (i as u64 * 2 + 1).wrapping_mul(0xc2b2_ae3d_27d4_eb4f);
        h.wrapping_add((x as i64 as u64).wrapping_mul(r))
    })
}

fn finish(hw: u64, he: u64) -> u64 {
    let mut x = hw ^ he.rotate_left(29);
    x ^= x >> 33;
    x = x.wrapping_mul(0xff51_afd7_ed55_8ccd);
    x ^= x >> 33;
    x = x.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    x ^ (x >> 33)
}

#[derive(Debug, Clone)]
pub(crate) struct FTerm {
    pub word: WordBuf,
    pub exps: ExpBuf,
    pub c: i128,
    hw: u64,
    pw: u64,
    he: u64,
}

impl PartialEq for FTerm {
    fn eq(&self, other: &Self) -> bool {
        (&self.word, &self.exps, self.c) == (&other.word, &other.exps, other.c)
    }
}

impl Eq for FTerm {}

impl FTerm {
    pub fn new(word: WordBuf, exps: ExpBuf, c: i128) -> Self {
        let (hw, pw) = word_hash(&word);
        let he = exp_hash(&exps);
        FTerm { word, exps, c, hw, pw, he }
    }

    pub fn push(&mut self, code: u16) {
        self.word.push(code);
        self.hw = self.hw.wrapping_mul(B).wrapping_add(code as u64 + 1);
        self.pw = self.pw.wrapping_mul(B);
    }
}

pub(crate) fn flatten_coeff(c: &CoeffPoly) -> Option<Vec<(ExpBuf, i128)>> {
    c.terms()
        .map(|(e, x)| {
            let v = x.to_i128().filter(|v| v.abs() < LIMIT)?;
            let exps = e.iter().map(|&k| (k.abs() < EXP_LIMIT).then_some(k as i16)).collect::<Option<_>>()?;
            Some((exps, v))
        })
        .collect()
}

pub(crate) fn flatten(p: &NcPoly) -> Option<Vec<FTerm>> {
    let mut out = Vec::with_capacity(p.len());
    for (w, c) in p.terms() {
        let word = encode_word(&w.0)?;
        for (exps, v) in flatten_coeff(c)? {
            out.push(FTerm::new(word.clone(), exps, v));
        }
    }
    Some(out)
}

#[derive(Clone, Copy)]
struct Slot {
    hash: u64,
    off: u32,
    wlen: u16,
    len: u16,
    c: i128,
}

/// Hash accumulator keyed by a word and an exponent vector.
///
/// A key is passed as up to three word pieces and two exponent vectors to
/// add, with its hash precomputed from the pieces. Keys are copied into one
/// arena only when new.
#[derive(Default)]
pub(crate) struct Acc {
    arena: Vec<u16>,
    table: HashTable<Slot>,
    overflow: bool,
}

fn key_eq(stored: &[u16], wlen: usize, parts: [&[u16]; 3], ea: &[i16], eb: &[i16]) -> bool {
    if wlen != parts[0].len() + parts[1].len() + parts[2].len() || stored.len() != wlen + ea.len() {
        return false;
    }
    let (w, e) = stored.split_at(wlen);
    let (w0, rest) = w.split_at(parts[0].len());
    let (w1, w2) = rest.split_at(parts[1].len());
    w0 == parts[0] && w1 == parts[1] && w2 == parts[2] && e.iter().zip(ea.iter().zip(eb)).all(|(&s, (a, b))| s == a.wrapping_add(*b) as u16)
}

impl Acc {
    pub fn new() -> Self {
        Self::default()
    }

    fn add_hashed(&mut self, h: u64, parts: [&[u16]; 3], ea: &[i16], eb: &[i16], c: i128) {
        if c == 0 {
            return;
        }
        let arena = &self.arena;
        let found = self.table.find_mut(h, |s| {
            s.hash == h && key_eq(&arena[s.off as usize..s.off as usize + s.len as usize], s.wlen as usize, parts, ea, eb)
        });
        if let Some(s) = found {
            match s.c.checked_add(c) {
                Some(v) if v.abs() < LIMIT => s.c = v,
                _ => self.overflow = true,
            }
            return;
        }
        let wlen = parts.iter().map(|p| p.len()).sum::<usize>();
        let (Ok(off), Ok(len), Ok(wlen)) =
            (u32::try_from(self.arena.len()), u16::try_from(wlen + ea.len()), u16::try_from(wlen))
        else {
            self.overflow = true;
            return;
        };
        for p in parts {
            self.arena.extend_from_slice(p);
        }
        for (a, b) in ea.iter().zip(eb) {
            match a.checked_add(*b) {
                Some(e) => self.arena.push(e as u16),
                None => self.overflow = true,
            }
        }
        self.table.insert_unique(h, Slot { hash: h, off, wlen, len, c }, |s| s.hash);
    }

    pub fn add(&mut self, t: &FTerm) {
        let zero = vec![0i16; t.exps.len()];
        self.add_hashed(finish(t.hw, t.he), [&t.word, &[], &[]], &t.exps, &zero, t.c);
    }

    /// Adds `sign · x · y`.
    pub fn add_product(&mut self, x: &FTerm, y: &FTerm, sign: i128) {
        let h = finish(x.hw.wrapping_mul(y.pw).wrapping_add(y.hw), x.he.wrapping_add(y.he));
        match x.c.checked_mul(y.c).and_then(|v| v.checked_mul(sign)) {
            Some(v) => self.add_hashed(h, [&x.word, &y.word, &[]], &x.exps, &y.exps, v),
            None => self.overflow = true,
        }
    }

    /// Moves the nonzero terms to `out` and empties the table, keeping its
    /// allocation; `None` if a coefficient overflowed.
    fn drain_into(&mut self, out: &mut Vec<FTerm>) -> Option<()> {
        if self.overflow {
            return None;
        }
        for s in self.table.drain().filter(|s| s.c != 0) {
            let k = &self.arena[s.off as usize..s.off as usize + s.len as usize];
            let (w, e) = k.split_at(s.wlen as usize);
            out.push(FTerm::new(SmallVec::from_slice(w), e.iter().map(|&x| x as i16).collect(), s.c));
        }
        self.arena.clear();
        Some(())
    }

    pub fn into_terms(self) -> Option<Vec<FTerm>> {
        if self.overflow {
            return None;
        }
        let arena = self.arena;
        Some(
            self.table
                .into_iter()
                .filter(|s| s.c != 0)
                .map(|s| {
                    let k = &arena[s.off as usize..s.off as usize + s.len as usize];
                    let (w, e) = k.split_at(s.wlen as usize);
                    FTerm::new(SmallVec::from_slice(w), e.iter().map(|&x| x as i16).collect(), s.c)
                })
                .collect(),
        )
    }

    pub fn into_poly(self, ring: RingDescriptor) -> Option<NcPoly> {
        terms_to_poly(ring, self.into_terms()?)
    }
}

pub(crate) fn terms_to_poly(ring: RingDescriptor, mut terms: Vec<FTerm>) -> Option<NcPoly> {
    // Codes sort like the generators they stand for, so sorting by
    // (length, codes, exponents) is the canonical order.
    terms.retain(|t| t.c != 0);
    terms.sort_unstable_by(|x, y| {
        (x.word.len(), &x.word[..], &x.exps[..]).cmp(&(y.word.len(), &y.word[..], &y.exps[..]))
    });
    let mut out = Vec::new();
    let mut k = 0;
    while k < terms.len() {
        let mut coeffs: Vec<(Vec<i32>, BigInt)> = Vec::new();
        let mut last: Option<(&ExpBuf, i128)> = None;
        let mut e = k;
        while e < terms.len() && terms[e].word == terms[k].word {
            let t = &terms[e];
            last = match last {
                Some((x, c)) if *x == t.exps => Some((x, c.checked_add(t.c)?)),
                Some((x, c)) => {
                    if c != 0 {
                        coeffs.push((x.iter().map(|&v| v as i32).collect(), BigInt::from(c)));
                    }
                    Some((&t.exps, t.c))
                }
                None => Some((&t.exps, t.c)),
            };
            e += 1;
        }
        if let Some((x, c)) = last.filter(|&(_, c)| c != 0) {
            coeffs.push((x.iter().map(|&v| v as i32).collect(), BigInt::from(c)));
        }
        if !coeffs.is_empty() {
            out.push((Word(terms[k].word.iter().map(|&x| decode(x)).collect()), CoeffPoly::from_sorted(ring, coeffs)));
        }
        k = e;
    }
    Some(NcPoly::from_canonical(ring, out.into_iter().collect()))
}

/// One summand `sign · coeff · prefix · y · suffix` for every term `y` of `ys`.
pub(crate) struct Sandwich<'a> {
    prefix: &'a [u16],
    exps: ExpBuf,
    c: i128,
    ys: &'a [FTerm],
    suffix: &'a [u16],
    hp: u64,
    hs: u64,
    ps: u64,
    he: u64,
}

impl<'a> Sandwich<'a> {
    pub fn new(prefix: &'a [u16], coeff: &(ExpBuf, i128), ys: &'a [FTerm], suffix: &'a [u16], sign: i128) -> Option<Self> {
        let (hp, _) = word_hash(prefix);
        let (hs, ps) = word_hash(suffix);
        let c = coeff.1.checked_mul(sign)?;
        Some(Sandwich { prefix, he: exp_hash(&coeff.0), exps: coeff.0.clone(), c, ys, suffix, hp, hs, ps })
    }

    fn hash(&self, y: &FTerm) -> u64 {
        let hw = self.hp.wrapping_mul(y.pw).wrapping_add(y.hw).wrapping_mul(self.ps).wrapping_add(self.hs);
        finish(hw, self.he.wrapping_add(y.he))
    }
}

fn bucket(h: u64) -> usize {
    (h >> 52) as usize % BUCKETS
}

#[derive(Clone, Copy, Default)]
struct Rec {
    h: u64,
    job: u32,
    y: u32,
}

/// Sums all sandwiches exactly; `None` on coefficient overflow.
///
/// Large sums are split into passes by the top hash bits. Within a pass the
/// products are recorded as `(hash, job, term)`, counting-sorted by further
/// hash bits, and each small partition is summed in its own table.
pub(crate) fn sum_sandwiches(ring: RingDescriptor, jobs: &[Sandwich<'_>]) -> Option<NcPoly> {
    let total: usize = jobs.iter().map(|j| j.ys.len()).sum();
    let mut out = Vec::new();
    let mut acc = Acc::new();
    if total <= DIRECT || jobs.len() > u32::MAX as usize {
        for j in jobs {
            for y in j.ys {
                acc.add_hashed(j.hash(y), [j.prefix, &y.word, j.suffix], &j.exps, &y.exps, j.c.checked_mul(y.c)?);
            }
        }
        acc.drain_into(&mut out)?;
        return terms_to_poly(ring, out);
    }

    let pass_of: Vec<usize> = if total <= PASS_CAPACITY {
        vec![0; BUCKETS]
    } else {
        let mut counts = vec![0usize; BUCKETS];
        for j in jobs {
            for y in j.ys {
                counts[bucket(j.hash(y))] += 1;
            }
        }
        let mut pass = vec![0; BUCKETS];
        let (mut cur, mut fill) = (0, 0);
        for b in 0..BUCKETS {
            if fill > 0 && fill + counts[b] > PASS_CAPACITY {
                cur += 1;
                fill = 0;
            }
            pass[b] = cur;
            fill += counts[b];
        }
        pass
    };
    let passes = pass_of.iter().max().map_or(1, |m| m + 1);

    let mut recs = Vec::new();
    let mut sorted = Vec::new();
    for p in 0..passes {
        recs.clear();
        for (ji, j) in jobs.iter().enumerate() {
            for (yi, y) in j.ys.iter().enumerate() {
                let h = j.hash(y);
                if passes == 1 || pass_of[bucket(h)] == p {
                    recs.push(Rec { h, job: ji as u32, y: yi as u32 });
                }
            }
        }
        let bits = (recs.len() / PARTITION).max(1).next_power_of_two().trailing_zeros().min(16);
        let part = |h: u64| ((h >> 20) & ((1 << bits) - 1)) as usize;
        let mut start = vec![0usize; (1 << bits) + 1];
        for r in &recs {
            start[part(r.h) + 1] += 1;
        }
        for i in 0..1 << bits {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        sorted.resize(recs.len(), Rec::default());
        for r in &recs {
            let k = part(r.h);
            sorted[fill[k]] = *r;
            fill[k] += 1;
        }
        for k in 0..1 << bits {
            for r in &sorted[start[k]..start[k + 1]] {
                let j = &jobs[r.job as usize];
                let y = &j.ys[r.y as usize];
                acc.add_hashed(r.h, [j.prefix, &y.word, j.suffix], &j.exps, &y.exps, j.c.checked_mul(y.c)?);
            }
            acc.drain_into(&mut out)?;
        }
    }
    terms_to_poly(ring, out)
}

/// `Σ_k xs[k] · ys[k]`.
pub(crate) fn sum_of_products(ring: RingDescriptor, pairs: &[(&[FTerm], &[FTerm])]) -> Option<NcPoly> {
    let jobs: Vec<Sandwich<'_>> = pairs
        .iter()
        .flat_map(|(xs, ys)| {
            xs.iter().map(move |x| Sandwich::new(&x.word, &(x.exps.clone(), x.c), ys, &[], 1))
        })
        .collect::<Option<_>>()?;
    sum_sandwiches(ring, &jobs)
}
