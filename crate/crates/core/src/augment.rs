//! Counting augmentations to `(ℤ/p, 0)`.
//!
//! An augmentation sends every positive-degree generator to 0, the base
//! ring variables to fixed units, and the degree-0 generators `a_ij` to
//! arbitrary field elements, subject to `ε(∂g) = 0` for every degree-1
//! generator `g`.

use rayon::prelude::*;

use crate::braid::BraidWord;
use crate::braid_action::{action_ring, phi_generator, phi_matrices_tilde};
use crate::coeff::{mod_inverse, mul_mod, pow_mod, UvMode, Var};
use crate::dga::FilteredDga;
use crate::error::{Error, Result};
use crate::free_algebra::{Family, GenId, NcPoly};

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn residue(x: i64, p: u64) -> u64 {
    x.rem_euclid(p as i64) as u64
}

/// A DGA together with a prime and images of all base ring variables.
#[derive(Debug, Clone)]
pub struct AugmentationProblem {
    dga: FilteredDga,
    p: u64,
    /// Residues of the ring variables, in the ring's variable order.
    values: Vec<u64>,
}

impl AugmentationProblem {
    /// `lambda[j-1]` and `mu[j-1]` are the images of `λ_j, μ_j`; `uv` gives
    /// `(U, V)` when the DGA still carries them.
    pub fn new(dga: &FilteredDga, p: u64, lambda: &[i64], mu: &[i64], uv: Option<(i64, i64)>) -> Result<Self> {
        if !is_prime(p) || p >= 1 << 31 {
            return Err(Error::NotPrime(p));
        }
        let ring = dga.ring();
        let r = ring.r;
        if lambda.len() != r {
            return Err(Error::Unassigned(format!("{} λ value(s) for {r} component(s)", lambda.len())));
        }
        if mu.len() != r {
            return Err(Error::Unassigned(format!("{} μ value(s) for {r} component(s)", mu.len())));
        }
        let mut values = vec![0; ring.nvars()];
        for j in 1..=r {
            values[ring.index(Var::Lambda(j)).unwrap()] = residue(lambda[j - 1], p);
            values[ring.index(Var::Mu(j)).unwrap()] = residue(mu[j - 1], p);
        }
        match (ring.uv, uv) {
            (UvMode::Absent, None) => {}
            (UvMode::Absent, Some(_)) => {
                return Err(Error::Unsupported(format!("U and V given for a {} DGA without them", dga.provenance())))
            }
            (_, None) => return Err(Error::Unassigned("U and V".into())),
            (_, Some((u, v))) => {
                values[ring.index(Var::U).unwrap()] = residue(u, p);
                values[ring.index(Var::V).unwrap()] = residue(v, p);
            }
        }
        for (idx, &x) in values.iter().enumerate() {
            let var = ring.var(idx);
            if x == 0 && ring.is_laurent(var) {
                return Err(Error::NotInvertible(format!("{} ↦ 0 mod {p}", var.name())));
            }
        }
        Ok(AugmentationProblem { dga: dga.clone(), p, values })
    }

    pub fn dga(&self) -> &FilteredDga {
        &self.dga
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Residues of the base ring variables in the ring's variable order.
    pub fn values(&self) -> &[u64] {
        &self.values
    }
}

/// `Σ coeff·Π x_var = 0` over `ℤ/p`.
#[derive(Debug, Clone)]
struct Constraint {
    terms: Vec<(u64, Vec<usize>)>,
    constant: u64,
}

impl Constraint {
    fn holds(&self, x: &[u64], p: u64) -> bool {
        let mut acc = self.constant;
        for (c, vars) in &self.terms {
            let mut t = *c;
            for &v in vars {
                t = mul_mod(t, x[v], p);
            }
            acc += t;
            if acc >= p {
                acc -= p;
            }
        }
        acc == 0
    }
}

/// Constraints over the enumerated variables, indexed by the level at
/// which their last variable is assigned.
struct Compiled {
    p: u64,
    levels: usize,
    by_level: Vec<Vec<Constraint>>,
    /// Degree-0 generators that occur in no constraint.
    free: usize,
    infeasible: bool,
}

fn compile(prob: &AugmentationProblem) -> Result<Compiled> {
    let d = &prob.dga;
    let p = prob.p;
    let a_gens: Vec<GenId> = d.generators().filter(|g| g.degree() == 0).collect();
    let index_of = |g: &GenId| a_gens.binary_search(g).ok();

    for g in d.generators().filter(|g| g.degree() == 2) {
        for (w, _) in d.d(g).terms() {
            let positive = w.0.iter().filter(|h| h.degree() > 0).count();
            if positive != 1 || w.0.iter().any(|h| h.degree() > 1) {
                return Err(Error::Internal(format!(
                    "∂{} has a term with {positive} positive-degree generators",
                    g.name()
                )));
            }
        }
    }

    let mut raw: Vec<Constraint> = Vec::new();
    for g in d.generators().filter(|g| g.degree() == 1) {
        let mut terms: std::collections::BTreeMap<Vec<usize>, u64> = Default::default();
        for (w, c) in d.d(g).terms() {
            let vars = w
                .0
                .iter()
                .map(|h| {
                    index_of(h).ok_or_else(|| Error::Internal(format!("∂{} contains {} of positive degree", g.name(), h.name())))
                })
                .collect::<Result<Vec<_>>>()?;
            let c = c.eval_mod(p, &prob.values)?;
            let e = terms.entry(vars).or_insert(0);
            *e = (*e + c) % p;
        }
        let constant = terms.remove(&Vec::new()).unwrap_or(0);
        let terms: Vec<_> = terms.into_iter().filter(|(_, c)| *c != 0).map(|(v, c)| (c, v)).collect();
        raw.push(Constraint { terms, constant });
    }

    let mut infeasible = false;
    raw.retain(|c| {
        if c.terms.is_empty() {
            infeasible |= c.constant != 0;
            false
        } else {
            true
        }
    });

    // Greedy order: take the constraint with the fewest unplaced variables.
    let nvars = a_gens.len();
    let mut pos = vec![usize::MAX; nvars];
    let mut order = 0;
    let var_sets: Vec<Vec<usize>> = raw
        .iter()
        .map(|c| {
            let mut v: Vec<usize> = c.terms.iter().flat_map(|(_, vs)| vs.iter().copied()).collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    loop {
        let next = var_sets
            .iter()
            .map(|vs| vs.iter().filter(|&&v| pos[v] == usize::MAX).copied().collect::<Vec<_>>())
            .filter(|u| !u.is_empty())
            .min_by_key(|u| u.len());
        match next {
            Some(unplaced) => {
                for v in unplaced {
                    pos[v] = order;
                    order += 1;
                }
            }
            None => break,
        }
    }
    let levels = order;
    let free = nvars - levels;

    let mut by_level = vec![Vec::new(); levels];
    for (c, vs) in raw.into_iter().zip(&var_sets) {
        let level = vs.iter().map(|&v| pos[v]).max().expect("nonempty");
        let terms = c.terms.into_iter().map(|(k, vars)| (k, vars.into_iter().map(|v| pos[v]).collect())).collect();
        by_level[level].push(Constraint { terms, constant: c.constant });
    }
    for cs in &mut by_level {
        cs.sort_by_key(|c| c.terms.len());
    }
    Ok(Compiled { p, levels, by_level, free, infeasible })
}

impl Compiled {
    fn ok_at(&self, level: usize, x: &[u64]) -> bool {
        self.by_level[level].iter().all(|c| c.holds(x, self.p))
    }

    fn dfs(&self, level: usize, x: &mut Vec<u64>) -> u64 {
        if level == self.levels {
            return 1;
        }
        let mut n = 0;
        for v in 0..self.p {
            x[level] = v;
            if self.ok_at(level, x) {
                n += self.dfs(level + 1, x);
            }
        }
        n
    }

    fn count(&self) -> u64 {
        if self.infeasible {
            return 0;
        }
        let p = self.p;
        let split = self.levels.min(2);
        let prefixes: Vec<Vec<u64>> = match split {
            0 => vec![vec![]],
            1 => (0..p).map(|a| vec![a]).collect(),
            _ => (0..p).flat_map(|a| (0..p).map(move |b| vec![a, b])).collect(),
        };
        prefixes
            .into_par_iter()
            .map(|pre| {
                let mut x = vec![0; self.levels];
                for (l, &v) in pre.iter().enumerate() {
                    x[l] = v;
                    if !self.ok_at(l, &x) {
                        return 0;
                    }
                }
                self.dfs(split, &mut x)
            })
            .sum()
    }
}

fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let threads = std::env::var("TDGA_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()).filter(|&n| n > 0);
    match threads.and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(f),
        None => f(),
    }
}

/// Number of augmentations. Respects `TDGA_THREADS`.
pub fn count_augmentations(prob: &AugmentationProblem) -> Result<u64> {
    let c = compile(prob)?;
    let base = with_pool(|| c.count());
    if base == 0 {
        return Ok(0);
    }
    (0..c.free)
        .try_fold(base, |acc, _| acc.checked_mul(c.p))
        .ok_or_else(|| Error::Unsupported("augmentation count exceeds 64 bits".into()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitRow {
    pub lambda: Vec<u64>,
    pub mu: Vec<u64>,
    pub uv: Option<(u64, u64)>,
    pub count: u64,
}

/// Counts for every assignment of units of `ℤ/p` to `λ_j, μ_j` (and `U, V`
/// when present), in odometer order with the last variable fastest.
pub fn count_augmentations_all_units(dga: &FilteredDga, p: u64) -> Result<Vec<UnitRow>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let r = dga.ring().r;
    let slots = 2 * r + if dga.ring().uv == UvMode::Absent { 0 } else { 2 };
    let mut tuple = vec![1u64; slots];
    let mut rows = Vec::new();
    loop {
        let lambda: Vec<u64> = tuple[..r].to_vec();
        let mu: Vec<u64> = tuple[r..2 * r].to_vec();
        let uv = (slots > 2 * r).then(|| (tuple[2 * r], tuple[2 * r + 1]));
        let signed = |v: &[u64]| v.iter().map(|&x| x as i64).collect::<Vec<_>>();
        let prob = AugmentationProblem::new(dga, p, &signed(&lambda), &signed(&mu), uv.map(|(u, v)| (u as i64, v as i64)))?;
        rows.push(UnitRow { lambda, mu, uv, count: count_augmentations(&prob)? });

        let mut k = slots;
        loop {
            if k == 0 {
                return Ok(rows);
            }
            k -= 1;
            tuple[k] += 1;
            if tuple[k] < p {
                break;
            }
            tuple[k] = 1;
        }
    }
}

/// Reference counter: tries every assignment of the degree-0 generators and
/// evaluates each `∂g` term by term from the symbolic differential.
pub fn count_augmentations_naive(prob: &AugmentationProblem) -> Result<u64> {
    let d = &prob.dga;
    let p = prob.p;
    let a_gens: Vec<GenId> = d.generators().filter(|g| g.degree() == 0).collect();
    let total = (0..a_gens.len()).try_fold(1u64, |acc, _| acc.checked_mul(p)).filter(|&t| t <= 1 << 30).ok_or_else(|| {
        Error::Unsupported(format!("{p}^{} assignments are too many to enumerate", a_gens.len()))
    })?;
    let ones: Vec<GenId> = d.generators().filter(|g| g.degree() == 1).collect();
    let mut x = vec![0u64; a_gens.len()];
    let mut count = 0;
    for idx in 0..total {
        let mut rest = idx;
        for v in x.iter_mut() {
            *v = rest % p;
            rest /= p;
        }
        let mut ok = true;
        'gens: for g in &ones {
            let mut acc = 0;
            for (w, c) in d.d(*g).terms() {
                let mut t = c.eval_mod(p, &prob.values)?;
                for h in &w.0 {
                    t = match a_gens.iter().position(|a| a == h) {
                        Some(k) => mul_mod(t, x[k], p),
                        None => 0,
                    };
                }
                acc = (acc + t) % p;
            }
            if acc != 0 {
                ok = false;
                break 'gens;
            }
        }
        count += u64::from(ok);
    }
    Ok(count)
}

/// `Σ c·Π x[v]` over `ℤ/p`, variables indexed by `i·n + j` (0-based strands).
type Compiled1 = Vec<(u64, Vec<usize>)>;

fn eval1(f: &Compiled1, x: &[u64], p: u64) -> u64 {
    let mut acc = 0;
    for (c, vars) in f {
        let mut t = *c;
        for &v in vars {
            t = mul_mod(t, x[v], p);
        }
        acc = (acc + t) % p;
    }
    acc
}

fn compile1(poly: &NcPoly, n: usize, p: u64, tilde: &[u64]) -> Result<Compiled1> {
    let mut out = Vec::new();
    for (w, c) in poly.terms() {
        let c = c.eval_mod(p, tilde)?;
        if c == 0 {
            continue;
        }
        let vars = w
            .0
            .iter()
            .map(|g| match g.family {
                Family::A if g.i >= 1 && g.j >= 1 => Ok((g.i as usize - 1) * n + g.j as usize - 1),
                _ => Err(Error::Internal(format!("{} in a braid action image", g.name()))),
            })
            .collect::<Result<Vec<_>>>()?;
        out.push((c, vars));
    }
    Ok(out)
}

/// One letter `s_t`: the images `φ_{s_t}(a_ij)` and the entries of `Φ^R_{s_t}`,
/// with coefficients already evaluated under `ε_{t-1}`.
struct EvalStep {
    images: Vec<Compiled1>,
    phi_r: Vec<Compiled1>,
}

/// Counts augmentations of the DGA of `b` specialized at `(U, V) = uv`
/// without expanding the DGA symbolically.
///
/// An assignment `ε` of the `a_ij` is pushed through the word one letter at a
/// time, `ε_t = ε_{t-1} ∘ φ_{s_t}`, which yields `ε(φ_B(a_ij)) = ε_ℓ(a_ij)` and
/// `ε(Φ^R_B) = ε_0(Φ^R_{s_1}) ⋯ ε_{ℓ-1}(Φ^R_{s_ℓ})`. The constraints are then
/// `ε(∂b_ij) = 0` and `ε(∂c_ij) = 0` read off the matrix equations. Intended
/// as an independent check of [`count_augmentations`] and for braids whose
/// DGA is too large to write out.
pub fn count_augmentations_braid(b: &BraidWord, p: u64, lambda: &[i64], mu: &[i64], uv: (i64, i64)) -> Result<u64> {
    if !is_prime(p) || p >= 1 << 31 {
        return Err(Error::NotPrime(p));
    }
    let cd = b.components();
    let (n, r) = (b.strands(), cd.r);
    if lambda.len() != r || mu.len() != r {
        return Err(Error::Unassigned(format!("{} λ and {} μ value(s) for {r} component(s)", lambda.len(), mu.len())));
    }
    let lam: Vec<u64> = lambda.iter().map(|&x| residue(x, p)).collect();
    let mus: Vec<u64> = mu.iter().map(|&x| residue(x, p)).collect();
    if let Some(j) = (0..r).find(|&j| lam[j] == 0 || mus[j] == 0) {
        return Err(Error::NotInvertible(format!("λ_{0} or μ_{0} ↦ 0 mod {p}", j + 1)));
    }
    let (u, v) = (residue(uv.0, p), residue(uv.1, p));
    let vars = n * (n - 1);
    let total = (0..vars).try_fold(1u64, |acc, _| acc.checked_mul(p)).filter(|&t| t <= 1 << 34).ok_or_else(|| {
        Error::Unsupported(format!("{p}^{vars} assignments are too many to enumerate"))
    })?;

    let mu_of = |i: usize| mus[cd.component_of(i + 1) - 1];
    let diag: Vec<u64> = (0..n)
        .map(|i| {
            if !cd.is_leading(i + 1) {
                return 1;
            }
            let w = cd.writhe_of_strand(i + 1);
            let m = if w < 0 { mod_inverse(mu_of(i), p) } else { mu_of(i) };
            mul_mod(lam[cd.component_of(i + 1) - 1], pow_mod(m, w.unsigned_abs(), p), p)
        })
        .collect();
    let diag_inv: Vec<u64> = diag.iter().map(|&d| mod_inverse(d, p)).collect();

    let ring = action_ring(n);
    let mut tilde = vec![1u64; ring.nvars()];
    for i in 0..n {
        tilde[ring.index(Var::MuTilde(i + 1)).expect("tilde variable")] = mu_of(i);
    }
    let mut steps = Vec::with_capacity(b.letters().len());
    for l in b.letters() {
        let phi = phi_generator(l.index, l.sign, n)?;
        let mut images = vec![Vec::new(); n * n];
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                let img = phi.apply(&NcPoly::gen(ring, GenId::a(i as u16 + 1, j as u16 + 1)))?;
                images[i * n + j] = compile1(&img, n, p, &tilde)?;
            }
        }
        let (_, _, rs) = phi_matrices_tilde(&BraidWord::new(n, vec![*l])?)?;
        let phi_r = (0..n * n).map(|k| compile1(rs.get(k / n, k % n), n, p, &tilde)).collect::<Result<Vec<_>>>()?;
        steps.push(EvalStep { images, phi_r });
        // ε_t(μ̃_i) = ε_{t-1}(μ̃_{τ(i)}) for the transposition τ of this letter
        let (k, kk) = (ring.index(Var::MuTilde(l.index)).unwrap(), ring.index(Var::MuTilde(l.index + 1)).unwrap());
        tilde.swap(k, kk);
    }

    // value of the entry (i, j) of A, A^U or A^V at the a-values `x`
    let a_entry = |x: &[u64], i: usize, j: usize, wu: u64, wv: u64| -> u64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => mul_mod(wu, x[i * n + j], p),
            std::cmp::Ordering::Greater => mul_mod(mul_mod(wv, mu_of(j), p), x[i * n + j], p),
            std::cmp::Ordering::Equal => (wu + mul_mod(wv, mu_of(i), p)) % p,
        }
    };

    let check = |x0: &[u64], hist: &mut Vec<Vec<u64>>| -> bool {
        hist.truncate(0);
        hist.push(x0.to_vec());
        for st in &steps {
            let cur = hist.last().unwrap();
            let mut next = vec![0; n * n];
            for (k, f) in st.images.iter().enumerate() {
                if k / n != k % n {
                    next[k] = eval1(f, cur, p);
                }
            }
            hist.push(next);
        }
        let fin = hist.last().unwrap();
        // ∂B = -𝝀^{-1}A𝝀 + φ_B(A)
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                let lhs = mul_mod(mul_mod(diag_inv[i], a_entry(x0, i, j, 1, 1), p), diag[j], p);
                if lhs != a_entry(fin, i, j, 1, 1) {
                    return false;
                }
            }
        }
        // Φ^R_B, then ∂C = A^V 𝝀 + A^U Φ^R
        let mut rm: Vec<u64> = (0..n * n).map(|k| u64::from(k / n == k % n)).collect();
        for (t, st) in steps.iter().enumerate() {
            let e: Vec<u64> = st.phi_r.iter().map(|f| eval1(f, &hist[t], p)).collect();
            let mut prod = vec![0; n * n];
            for i in 0..n {
                for k in 0..n {
                    let x = rm[i * n + k];
                    if x != 0 {
                        for j in 0..n {
                            prod[i * n + j] = (prod[i * n + j] + mul_mod(x, e[k * n + j], p)) % p;
                        }
                    }
                }
            }
            rm = prod;
        }
        for i in 0..n {
            for j in 0..n {
                let mut acc = mul_mod(a_entry(x0, i, j, 1, v), diag[j], p);
                for k in 0..n {
                    acc = (acc + mul_mod(a_entry(x0, i, k, u, 1), rm[k * n + j], p)) % p;
                }
                if acc != 0 {
                    return false;
                }
            }
        }
        true
    };

    let block = p.pow(vars.min(6) as u32);
    let count = with_pool(|| {
        (0..total.div_ceil(block))
            .into_par_iter()
            .map(|blk| {
                let mut x = vec![0u64; n * n];
                let mut hist = Vec::with_capacity(steps.len() + 1);
                let mut found = 0u64;
                for idx in blk * block..((blk + 1) * block).min(total) {
                    let mut rest = idx;
                    for i in 0..n {
                        for j in (0..n).filter(|&j| j != i) {
                            x[i * n + j] = rest % p;
                            rest /= p;
                        }
                    }
                    if check(&x, &mut hist) {
                        found += 1;
                    }
                }
                found
            })
            .sum()
    });
    Ok(count)
}
