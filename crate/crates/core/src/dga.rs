//! The filtered knot contact homology DGA of a braid closure.
//!
//! Generators are `a_ij, b_ij` (`i ≠ j`) in degrees 0 and 1 and `c_ij, e_ij`
//! in degrees 1 and 2. The differential is stored on generators only and
//! extended by `∂(xy) = (∂x)y + (-1)^{|x|} x(∂y)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::braid::{BraidWord, ComponentData};
use crate::braid_action::{dga_ring, PhiData};
use crate::coeff::{CoeffMap, CoeffPoly, RingDescriptor, UvMode, Var};
use crate::error::{Error, Result};
use crate::flat::{self, FTerm};
use crate::free_algebra::{Degree, Family, GenId, GenSubstitution, NcMatrix, NcPoly, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Minus,
    Hat,
    DoubleHat,
    Unfiltered,
    Infinity,
    Transformed,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::Minus => "minus",
            Provenance::Hat => "hat",
            Provenance::DoubleHat => "doublehat",
            Provenance::Unfiltered => "unfiltered",
            Provenance::Infinity => "infinity",
            Provenance::Transformed => "transformed",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "minus" => Provenance::Minus,
            "hat" => Provenance::Hat,
            "doublehat" => Provenance::DoubleHat,
            "unfiltered" => Provenance::Unfiltered,
            "infinity" => Provenance::Infinity,
            "transformed" => Provenance::Transformed,
            _ => return None,
        })
    }

    fn symbol(self) -> &'static str {
        match self {
            Provenance::Minus | Provenance::Transformed => "∂⁻",
            Provenance::Hat => "∂̂",
            Provenance::DoubleHat => "∂̂̂",
            Provenance::Unfiltered => "∂",
            Provenance::Infinity => "∂^∞",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The standard generator list for `n` strands, in canonical order.
pub fn standard_generators(n: usize) -> Vec<GenId> {
    let n = n as u16;
    let mut out = Vec::new();
    for fam in [Family::A, Family::B, Family::C, Family::E] {
        for i in 1..=n {
            for j in 1..=n {
                if i == j && matches!(fam, Family::A | Family::B) {
                    continue;
                }
                out.push(GenId::new(fam, i, j));
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct FilteredDga {
    braid: BraidWord,
    components: ComponentData,
    ring: RingDescriptor,
    differential: BTreeMap<GenId, NcPoly>,
    provenance: Provenance,
    flat_d: OnceLock<Option<FxHashMap<GenId, Vec<FTerm>>>>,
}

impl PartialEq for FilteredDga {
    fn eq(&self, other: &Self) -> bool {
        (&self.braid, &self.components, self.ring, &self.differential, self.provenance)
            == (&other.braid, &other.components, other.ring, &other.differential, other.provenance)
    }
}

impl Eq for FilteredDga {}

impl FilteredDga {
    /// Assembles a DGA from its parts. Every generator must have an entry
    /// (possibly zero) and every differential must use only listed
    /// generators and the given ring.
    pub fn from_parts(
        braid: BraidWord,
        components: ComponentData,
        ring: RingDescriptor,
        differential: BTreeMap<GenId, NcPoly>,
        provenance: Provenance,
    ) -> Result<FilteredDga> {
        for (g, p) in &differential {
            if p.ring() != ring {
                return Err(Error::RingMismatch(p.ring().to_string(), ring.to_string()));
            }
            if let Some(h) = p.generators().into_iter().find(|h| !differential.contains_key(h)) {
                return Err(Error::Document(format!("∂{} uses {} which is not a generator", g.name(), h.name())));
            }
        }
        Ok(FilteredDga { braid, components, ring, differential, provenance, flat_d: OnceLock::new() })
    }

    pub fn braid(&self) -> &BraidWord {
        &self.braid
    }

    pub fn components(&self) -> &ComponentData {
        &self.components
    }

    pub fn ring(&self) -> RingDescriptor {
        self.ring
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Generators in canonical order.
    pub fn generators(&self) -> impl Iterator<Item = GenId> + '_ {
        self.differential.keys().copied()
    }

    pub fn has_generator(&self, g: GenId) -> bool {
        self.differential.contains_key(&g)
    }

    /// `∂g`; panics if `g` is not a generator.
    pub fn d(&self, g: GenId) -> &NcPoly {
        self.differential.get(&g).unwrap_or_else(|| panic!("{} is not a generator", g.name()))
    }

    pub fn differential(&self) -> &BTreeMap<GenId, NcPoly> {
        &self.differential
    }

    /// `∂x`, extended from generators by the graded Leibniz rule.
    pub fn apply_d(&self, x: &NcPoly) -> NcPoly {
        if let Some(p) = self.apply_d_flat(x) {
            return p;
        }
        let mut terms: Vec<(CoeffPoly, Word)> = Vec::new();
        for (w, c) in x.terms() {
            let mut deg = 0;
            for (pos, g) in w.0.iter().enumerate() {
                let dg = self.d(*g);
                let sign = if deg % 2 == 0 { c.clone() } else { -c };
                deg += g.degree();
                for (w2, c2) in dg.terms() {
                    let mut word = Vec::with_capacity(w.len() + w2.len());
                    word.extend_from_slice(&w.0[..pos]);
                    word.extend_from_slice(&w2.0);
                    word.extend_from_slice(&w.0[pos + 1..]);
                    terms.push((&sign * c2, Word(word)));
                }
            }
        }
        NcPoly::from_terms(self.ring, terms).expect("ring checked on construction")
    }

    fn apply_d_flat(&self, x: &NcPoly) -> Option<NcPoly> {
        let fd = self
            .flat_d
            .get_or_init(|| self.differential.iter().map(|(g, p)| Some((*g, flat::flatten(p)?))).collect())
            .as_ref()?;
        let mut inputs = Vec::with_capacity(x.len());
        for (w, c) in x.terms() {
            inputs.push((w, flat::encode_word(&w.0)?, flat::flatten_coeff(c)?));
        }
        let mut jobs = Vec::new();
        for (w, code, cs) in &inputs {
            let mut deg = 0;
            for (pos, g) in w.0.iter().enumerate() {
                let sign = if deg % 2 == 0 { 1 } else { -1 };
                deg += g.degree();
                let dg = fd.get(g)?;
                for c in cs {
                    jobs.push(flat::Sandwich::new(&code[..pos], c, dg, &code[pos + 1..], sign)?);
                }
            }
        }
        flat::sum_sandwiches(self.ring, &jobs)
    }

    pub fn render_text(&self) -> String {
        let bare = self.braid.strands() == 1;
        let sym = self.provenance.symbol();
        let mut out = String::new();
        for (g, p) in &self.differential {
            out.push_str(&format!("{sym}{} = {}\n", g.pretty(bare), p.pretty_with(bare)));
        }
        out
    }
}

/// The matrices the differential is assembled from.
#[derive(Debug, Clone)]
pub struct DgaMatrices {
    pub a: NcMatrix,
    pub a_u: NcMatrix,
    pub a_v: NcMatrix,
    pub b: NcMatrix,
    pub b_u: NcMatrix,
    pub b_v: NcMatrix,
    pub c: NcMatrix,
    pub e: NcMatrix,
    pub lambda: NcMatrix,
    pub lambda_inv: NcMatrix,
}

#[derive(Clone, Copy)]
enum Weight {
    One,
    U,
    V,
}

/// `M_ij = x_ij` above the diagonal and `μ_{α(j)} x_ij` below, with the
/// given extra weight on one side; diagonal as supplied.
fn weighted_matrix(
    ring: RingDescriptor,
    cd: &ComponentData,
    fam: Family,
    upper: Weight,
    lower: Weight,
    diag: impl Fn(usize) -> NcPoly,
) -> NcMatrix {
    let n = cd.alpha.len();
    let w = |wt: Weight| match wt {
        Weight::One => CoeffPoly::one(ring),
        Weight::U => CoeffPoly::var(ring, Var::U),
        Weight::V => CoeffPoly::var(ring, Var::V),
    };
    NcMatrix::from_fn(ring, n, |i, j| {
        let g = NcPoly::gen(ring, GenId::new(fam, i as u16 + 1, j as u16 + 1));
        match i.cmp(&j) {
            std::cmp::Ordering::Less => g.scale(&w(upper)),
            std::cmp::Ordering::Greater => g.scale(&(&CoeffPoly::var(ring, Var::Mu(cd.component_of(j + 1))) * &w(lower))),
            std::cmp::Ordering::Equal => diag(i + 1),
        }
    })
}

/// `𝝀_ii = λ_{α(i)} μ_{α(i)}^{w}` on leading strands, 1 elsewhere.
fn lambda_entry(ring: RingDescriptor, cd: &ComponentData, i: usize, inverse: bool) -> CoeffPoly {
    if !cd.is_leading(i) {
        return CoeffPoly::one(ring);
    }
    let comp = cd.component_of(i);
    let w = cd.writhe_of_strand(i) as i32;
    let s = if inverse { -1 } else { 1 };
    &CoeffPoly::var_pow(ring, Var::Lambda(comp), s) * &CoeffPoly::var_pow(ring, Var::Mu(comp), s * w)
}

pub fn build_matrices(b: &BraidWord) -> DgaMatrices {
    let cd = b.components();
    let ring = dga_ring(&cd);
    let n = b.strands();
    let one = CoeffPoly::one(ring);
    let mu = |i: usize| CoeffPoly::var(ring, Var::Mu(cd.component_of(i)));
    let uu = CoeffPoly::var(ring, Var::U);
    let vv = CoeffPoly::var(ring, Var::V);
    let zero = |_| NcPoly::zero(ring);

    let a = weighted_matrix(ring, &cd, Family::A, Weight::One, Weight::One, |i| NcPoly::constant(&one + &mu(i)));
    let a_u = weighted_matrix(ring, &cd, Family::A, Weight::U, Weight::One, |i| NcPoly::constant(&uu + &mu(i)));
    let a_v = weighted_matrix(ring, &cd, Family::A, Weight::One, Weight::V, |i| NcPoly::constant(&one + &(&mu(i) * &vv)));
    let bm = weighted_matrix(ring, &cd, Family::B, Weight::One, Weight::One, zero);
    let b_u = weighted_matrix(ring, &cd, Family::B, Weight::U, Weight::One, zero);
    let b_v = weighted_matrix(ring, &cd, Family::B, Weight::One, Weight::V, zero);
    let c = NcMatrix::from_fn(ring, n, |i, j| NcPoly::gen(ring, GenId::c(i as u16 + 1, j as u16 + 1)));
    let e = NcMatrix::from_fn(ring, n, |i, j| NcPoly::gen(ring, GenId::e(i as u16 + 1, j as u16 + 1)));
    let diag = |inverse: bool| {
        NcMatrix::from_fn(ring, n, |i, j| {
            if i == j {
                NcPoly::constant(lambda_entry(ring, &cd, i + 1, inverse))
            } else {
                NcPoly::zero(ring)
            }
        })
    };
    DgaMatrices { a, a_u, a_v, b: bm, b_u, b_v, c, e, lambda: diag(false), lambda_inv: diag(true) }
}

/// Writes `∂M = rhs` into `out`, undoing the `μ_{α(j)}` weight below the
/// diagonal for `a`/`b` families. Diagonal entries of `rhs` must vanish
/// for those families.
fn read_off(out: &mut BTreeMap<GenId, NcPoly>, cd: &ComponentData, fam: Family, rhs: &NcMatrix) -> Result<()> {
    let ring = rhs.ring();
    let n = rhs.dim();
    for i in 0..n {
        for j in 0..n {
            let g = GenId::new(fam, i as u16 + 1, j as u16 + 1);
            let entry = rhs.get(i, j);
            match fam {
                Family::A | Family::B if i == j => {
                    if !entry.is_zero() {
                        return Err(Error::Internal(format!("diagonal entry ({},{}) of ∂{} is {entry}", i + 1, j + 1, fam.letter())));
                    }
                }
                Family::A | Family::B if i > j => {
                    let inv = CoeffPoly::var_pow(ring, Var::Mu(cd.component_of(j + 1)), -1);
                    out.insert(g, entry.scale(&inv));
                }
                _ => {
                    out.insert(g, entry.clone());
                }
            }
        }
    }
    Ok(())
}

fn mm(x: &NcMatrix, y: &NcMatrix) -> Result<NcMatrix> {
    x.try_mul(y)
}

/// The filtered DGA `(𝒜_n, ∂⁻)` of the closure of `b`.
pub fn build_filtered_dga(b: &BraidWord) -> Result<FilteredDga> {
    let phi = PhiData::compute(b)?;
    build_filtered_dga_with(b, &phi)
}

pub fn build_filtered_dga_with(b: &BraidWord, phi: &PhiData) -> Result<FilteredDga> {
    let cd = b.components();
    let ring = dga_ring(&cd);
    let m = build_matrices(b);

    // Φ^L·A·Φ^R is taken entrywise as φ_B(A); see `phi_relation_holds`.
    let d_b = (&-&mm(&mm(&m.lambda_inv, &m.a)?, &m.lambda)?) + &phi_of(phi, &m.a)?;
    let d_c = &mm(&m.a_v, &m.lambda)? + &mm(&m.a_u, &phi.phi_r)?;
    let d_e = &(&(&mm(&m.b_v, &phi.phi_r_inv)? + &mm(&m.b_u, &m.lambda_inv)?) - &mm(&mm(&phi.phi_l, &m.c)?, &m.lambda_inv)?)
        + &mm(&mm(&m.lambda_inv, &m.c)?, &phi.phi_r_inv)?;

    let mut diff = BTreeMap::new();
    read_off(&mut diff, &cd, Family::A, &NcMatrix::zero(ring, b.strands()))?;
    read_off(&mut diff, &cd, Family::B, &d_b)?;
    read_off(&mut diff, &cd, Family::C, &d_c)?;
    read_off(&mut diff, &cd, Family::E, &d_e)?;
    FilteredDga::from_parts(b.clone(), cd, ring, diff, Provenance::Minus)
}

/// The unfiltered DGA computed directly from its own matrix equations
/// (`A` in place of `A^U, A^V` and `B` in place of `B^U, B^V`), over
/// `ℤ[λ^{±1}, μ^{±1}]`.
pub fn build_unfiltered_dga(b: &BraidWord) -> Result<FilteredDga> {
    let cd = b.components();
    let target = RingDescriptor::new(cd.r, UvMode::Absent);
    let map = CoeffMap::retaining(dga_ring(&cd), target);
    let to = |x: &NcMatrix| x.try_map(target, |p| p.map_coeffs(target, |c| c.substitute(&map)));

    let phi = PhiData::compute(b)?;
    let m = build_matrices(b);
    let (a, bm, c, lam, lam_inv) = (to(&m.a)?, to(&m.b)?, to(&m.c)?, to(&m.lambda)?, to(&m.lambda_inv)?);
    let (pl, pr, pr_inv) = (to(&phi.phi_l)?, to(&phi.phi_r)?, to(&phi.phi_r_inv)?);
    let phi_a = to(&phi_of(&phi, &m.a)?)?;

    let d_b = (&-&mm(&mm(&lam_inv, &a)?, &lam)?) + &phi_a;
    let d_c = &mm(&a, &lam)? + &mm(&a, &pr)?;
    let d_e = &(&(&mm(&bm, &pr_inv)? + &mm(&bm, &lam_inv)?) - &mm(&mm(&pl, &c)?, &lam_inv)?) + &mm(&mm(&lam_inv, &c)?, &pr_inv)?;

    let mut diff = BTreeMap::new();
    read_off(&mut diff, &cd, Family::A, &NcMatrix::zero(target, b.strands()))?;
    read_off(&mut diff, &cd, Family::B, &d_b)?;
    read_off(&mut diff, &cd, Family::C, &d_c)?;
    read_off(&mut diff, &cd, Family::E, &d_e)?;
    FilteredDga::from_parts(b.clone(), cd, target, diff, Provenance::Unfiltered)
}

/// `φ_B(A)` entrywise. `φ_B` fixes `μ_j` once `μ̃_i = μ_{α(i)}`.
pub fn phi_of(phi: &PhiData, a: &NcMatrix) -> Result<NcMatrix> {
    a.try_map(a.ring(), |p| phi.phi.apply(p))
}

/// Checks `φ_B(A) = Φ^L_B · A · Φ^R_B`.
///
/// Since `(Φ^L_B)^{-1}` is verified to be a two-sided inverse, this is
/// checked in the equivalent form `(Φ^L_B)^{-1} · φ_B(A) = A · Φ^R_B`, which
/// avoids the large cancellations of the triple product.
pub fn phi_relation_holds(phi: &PhiData, m: &DgaMatrices) -> Result<bool> {
    phi.check_inverses()?;
    let lhs = mm(&phi.phi_l_inv, &phi_of(phi, &m.a)?)?;
    let rhs = mm(&m.a, &phi.phi_r)?;
    Ok(lhs == rhs)
}

/// `φ_B(A) = Φ^L_B · A · Φ^R_B` by direct triple product. Exact but slow
/// for long braids; meant for small cases and cross-checks.
pub fn phi_relation_holds_direct(phi: &PhiData, m: &DgaMatrices) -> Result<bool> {
    Ok(phi_of(phi, &m.a)? == mm(&mm(&phi.phi_l, &m.a)?, &phi.phi_r)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorCheck {
    pub generator: GenId,
    pub d_squared_zero: bool,
    /// `∂g` is zero or homogeneous of degree `|g| - 1`.
    pub degree_ok: bool,
    /// No negative `U`/`V` exponent in `∂g` (polynomial mode only).
    pub filtration_ok: bool,
}

impl GeneratorCheck {
    pub fn passed(&self) -> bool {
        self.d_squared_zero && self.degree_ok && self.filtration_ok
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub checks: Vec<GeneratorCheck>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }

    pub fn failures(&self) -> impl Iterator<Item = &GeneratorCheck> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{:<8} ∂²=0:{} degree:{} filtration:{}",
                c.generator.name(),
                ok(c.d_squared_zero),
                ok(c.degree_ok),
                ok(c.filtration_ok)
            )?;
        }
        Ok(())
    }
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAIL"
    }
}

/// Checks `∂² = 0`, the degree drop and (in polynomial mode) the filtration
/// on every generator.
pub fn verify_dga(d: &FilteredDga) -> VerifyReport {
    let gens: Vec<GenId> = d.generators().collect();
    let checks = gens
        .par_iter()
        .map(|&g| {
            let dg = d.d(g);
            let degree_ok = dg.is_zero() || dg.degree_of().ok() == Some(Degree::Homogeneous(g.degree() - 1));
            let filtration_ok = d.ring.uv != UvMode::Polynomial
                || dg.terms().all(|(_, c)| c.min_uv_exponents().map(|(u, v)| u >= 0 && v >= 0).unwrap_or(true));
            let d_squared_zero = d.apply_d(dg).is_zero();
            GeneratorCheck { generator: g, d_squared_zero, degree_ok, filtration_ok }
        })
        .collect();
    VerifyReport { checks }
}

fn map_dga(d: &FilteredDga, map: &CoeffMap, provenance: Provenance) -> Result<FilteredDga> {
    let target = map.target;
    let diff = d
        .differential
        .iter()
        .map(|(g, p)| Ok((*g, p.map_coeffs(target, |c| c.substitute(map))?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    FilteredDga::from_parts(d.braid.clone(), d.components.clone(), target, diff, provenance)
}

/// Sets `(U, V)` to integers. `(0,1)`, `(0,0)` and `(1,1)` give the hat,
/// double-hat and unfiltered DGAs; other values are tagged `transformed`.
/// Passing `None` for both returns the input unchanged; partial
/// specialization is not supported.
pub fn specialize(d: &FilteredDga, u: Option<i64>, v: Option<i64>) -> Result<FilteredDga> {
    let (u, v) = match (u, v) {
        (None, None) => return Ok(d.clone()),
        (Some(u), Some(v)) => (u, v),
        _ => return Err(Error::Unsupported("specializing only one of U, V".into())),
    };
    if d.ring.uv != UvMode::Polynomial {
        return Err(Error::Unsupported(format!("specializing a {} DGA", d.provenance)));
    }
    let target = RingDescriptor::new(d.ring.r, UvMode::Absent);
    let map = CoeffMap::retaining(d.ring, target)
        .with(Var::U, CoeffPoly::constant(target, u))
        .with(Var::V, CoeffPoly::constant(target, v));
    let tag = match (u, v) {
        (0, 1) => Provenance::Hat,
        (0, 0) => Provenance::DoubleHat,
        (1, 1) => Provenance::Unfiltered,
        _ => Provenance::Transformed,
    };
    map_dga(d, &map, tag)
}

/// Named specializations accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Specialization {
    Minus,
    Hat,
    DoubleHat,
    Unfiltered,
}

impl Specialization {
    pub fn name(self) -> &'static str {
        match self {
            Specialization::Minus => "minus",
            Specialization::Hat => "hat",
            Specialization::DoubleHat => "doublehat",
            Specialization::Unfiltered => "unfiltered",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "minus" => Specialization::Minus,
            "hat" => Specialization::Hat,
            "doublehat" => Specialization::DoubleHat,
            "unfiltered" => Specialization::Unfiltered,
            _ => return None,
        })
    }

    pub fn uv(self) -> (Option<i64>, Option<i64>) {
        match self {
            Specialization::Minus => (None, None),
            Specialization::Hat => (Some(0), Some(1)),
            Specialization::DoubleHat => (Some(0), Some(0)),
            Specialization::Unfiltered => (Some(1), Some(1)),
        }
    }

    pub fn apply(self, d: &FilteredDga) -> Result<FilteredDga> {
        let (u, v) = self.uv();
        specialize(d, u, v)
    }
}

/// `∂^∞`: Laurent `U, V` with `λ ↦ λ U^{-(sl+1)/2} V^{(sl+1)/2}`. Knots only.
pub fn infinity_dga(b: &BraidWord) -> Result<FilteredDga> {
    if b.components().r != 1 {
        return Err(Error::Unsupported("infinity version of a multi-component link".into()));
    }
    let sl = b.self_linking()?;
    infinity_from(&build_filtered_dga(b)?, sl)
}

pub fn infinity_from(d: &FilteredDga, sl: i64) -> Result<FilteredDga> {
    if d.components.r != 1 {
        return Err(Error::Unsupported("infinity version of a multi-component link".into()));
    }
    if d.provenance != Provenance::Minus {
        return Err(Error::Unsupported(format!("infinity version of a {} DGA", d.provenance)));
    }
    if (sl + 1) % 2 != 0 {
        return Err(Error::Internal(format!("self-linking number {sl} of a knot is even")));
    }
    let s = ((sl + 1) / 2) as i32;
    let target = RingDescriptor::new(1, UvMode::Laurent);
    let lam = &(&CoeffPoly::var(target, Var::Lambda(1)) * &CoeffPoly::var_pow(target, Var::U, -s))
        * &CoeffPoly::var_pow(target, Var::V, s);
    let map = CoeffMap::retaining(d.ring, target).with(Var::Lambda(1), lam);
    map_dga(d, &map, Provenance::Infinity)
}

/// Splits `image = u·g + v` with `u` a unit and `v` free of `g`.
fn elementary_parts(d: &FilteredDga, g: GenId, image: &NcPoly) -> Result<(CoeffPoly, NcPoly)> {
    if image.ring() != d.ring {
        return Err(Error::RingMismatch(image.ring().to_string(), d.ring.to_string()));
    }
    let gw = Word(vec![g]);
    let u = image
        .coeff_of(&gw)
        .cloned()
        .ok_or_else(|| Error::NotElementary(format!("image of {} has no {} term", g.name(), g.name())))?;
    if !u.is_unit() {
        return Err(Error::NotElementary(format!("coefficient {u} of {} is not a unit", g.name())));
    }
    let v = image - &NcPoly::term(u.clone(), gw);
    if v.contains(g) {
        return Err(Error::NotElementary(format!("remainder {v} contains {}", g.name())));
    }
    if let Some(h) = v.generators().into_iter().find(|h| !d.has_generator(*h)) {
        return Err(Error::NotElementary(format!("{} is not a generator", h.name())));
    }
    if !v.is_zero() && v.degree_of()? != Degree::Homogeneous(g.degree()) {
        return Err(Error::NotElementary(format!("remainder {v} does not have degree {}", g.degree())));
    }
    Ok((u, v))
}

/// Conjugates the differential by the elementary automorphism
/// `Ψ: g ↦ image`, returning `∂' = Ψ ∂ Ψ⁻¹` so that `Ψ` is a DGA
/// isomorphism from the input to the output.
pub fn apply_tame_substitution(d: &FilteredDga, g: GenId, image: &NcPoly) -> Result<FilteredDga> {
    if !d.has_generator(g) {
        return Err(Error::NotElementary(format!("{} is not a generator", g.name())));
    }
    let (u, v) = elementary_parts(d, g, image)?;
    let u_inv = u.unit_inverse().expect("checked unit");

    let mut psi = GenSubstitution::identity(d.ring);
    psi.set(g, image.clone());
    let old_g = (&NcPoly::gen(d.ring, g) - &v).scale(&u_inv);

    let diff = d
        .differential
        .par_iter()
        .map(|(h, dh)| {
            let pre = if *h == g { d.apply_d(&old_g) } else { dh.clone() };
            Ok((*h, psi.apply(&pre)?))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    FilteredDga::from_parts(d.braid.clone(), d.components.clone(), d.ring, diff, Provenance::Transformed)
}

/// Removes a canceling pair with `∂(high) = u·low`, `u` a unit.
///
/// Neither generator may appear in any other differential, and `∂(low)`
/// must vanish.
pub fn destabilize(d: &FilteredDga, high: GenId, low: GenId) -> Result<FilteredDga> {
    for x in [high, low] {
        if !d.has_generator(x) {
            return Err(Error::Destabilize(format!("{} is not a generator", x.name())));
        }
    }
    if high == low {
        return Err(Error::Destabilize("the pair must consist of two distinct generators".into()));
    }
    if high.degree() != low.degree() + 1 {
        return Err(Error::Destabilize(format!("degrees {} and {} do not differ by one", high.degree(), low.degree())));
    }
    let dh = d.d(high);
    let mut terms = dh.terms();
    let ok_form = match (terms.next(), terms.next()) {
        (Some((w, c)), None) => w.0 == [low] && c.is_unit(),
        _ => false,
    };
    if !ok_form {
        return Err(Error::Destabilize(format!("∂{} = {dh} is not a unit multiple of {}", high.name(), low.name())));
    }
    if !d.d(low).is_zero() {
        return Err(Error::Destabilize(format!("∂{} is nonzero", low.name())));
    }
    for (g, p) in &d.differential {
        if *g == high {
            continue;
        }
        for x in [high, low] {
            if p.contains(x) {
                return Err(Error::Destabilize(format!("{} occurs in ∂{}", x.name(), g.name())));
            }
        }
    }
    let mut diff = d.differential.clone();
    diff.remove(&high);
    diff.remove(&low);
    FilteredDga::from_parts(d.braid.clone(), d.components.clone(), d.ring, diff, d.provenance)
}

/// `c · x` as a polynomial in `d`'s ring, for building tame images.
pub fn scaled(ring: RingDescriptor, c: i64, g: GenId) -> NcPoly {
    NcPoly::gen(ring, g).scale(&CoeffPoly::one(ring).scale(&BigInt::from(c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::parse_braid;

    fn ring1() -> RingDescriptor {
        RingDescriptor::new(1, UvMode::Polynomial)
    }

    fn cv(v: Var) -> CoeffPoly {
        CoeffPoly::var(ring1(), v)
    }

    fn unknot_c() -> CoeffPoly {
        let (l, m, u, v) = (cv(Var::Lambda(1)), cv(Var::Mu(1)), cv(Var::U), cv(Var::V));
        &(&(&u + &l) + &(&(&l * &m) * &v)) + &m
    }

    #[test]
    fn generator_counts() {
        assert_eq!(standard_generators(1), vec![GenId::c(1, 1), GenId::e(1, 1)]);
        assert_eq!(standard_generators(2).len(), 12);
        assert_eq!(standard_generators(4).len(), 12 + 12 + 16 + 16);
    }

    #[test]
    fn trivial_braid_dga() {
        let d = build_filtered_dga(&BraidWord::trivial(1)).unwrap();
        assert_eq!(d.generators().count(), 2);
        assert_eq!(*d.d(GenId::c(1, 1)), NcPoly::constant(unknot_c()));
        assert!(d.d(GenId::e(1, 1)).is_zero());
        assert!(verify_dga(&d).all_pass());
        assert_eq!(d.render_text(), "∂⁻c = U + λ + λμV + μ\n∂⁻e = 0\n");
    }

    #[test]
    fn sigma1_matrices_and_lambda() {
        let m = build_matrices(&parse_braid("1", None).unwrap());
        let r = ring1();
        let lm = &cv(Var::Lambda(1)) * &cv(Var::Mu(1));
        assert_eq!(*m.lambda.get(0, 0), NcPoly::constant(lm));
        assert!(m.lambda.get(1, 1) == &NcPoly::one(r));
        let expected_av21 = NcPoly::gen(r, GenId::a(2, 1)).scale(&(&cv(Var::Mu(1)) * &cv(Var::V)));
        assert_eq!(*m.a_v.get(1, 0), expected_av21);
        assert_eq!(*m.b_u.get(0, 1), NcPoly::gen(r, GenId::b(1, 2)).scale(&cv(Var::U)));
        assert!(m.b.get(0, 0).is_zero());
    }

    #[test]
    fn two_component_lambda() {
        let m = build_matrices(&parse_braid("1 1", None).unwrap());
        let r = m.lambda.ring();
        assert_eq!(r.r, 2);
        assert_eq!(*m.lambda.get(0, 0), NcPoly::constant(CoeffPoly::var(r, Var::Lambda(1))));
        assert_eq!(*m.lambda.get(1, 1), NcPoly::constant(CoeffPoly::var(r, Var::Lambda(2))));
    }

    #[test]
    fn sigma1_sample_differentials() {
        let d = build_filtered_dga(&parse_braid("1", None).unwrap()).unwrap();
        let r = ring1();
        let (l, m, v) = (cv(Var::Lambda(1)), cv(Var::Mu(1)), cv(Var::V));
        let a12 = NcPoly::gen(r, GenId::a(1, 2));
        let c11 = NcPoly::constant(&(&l * &m) + &(&(&l * &m.pow(2)) * &v)) - a12.scale(&m);
        assert_eq!(*d.d(GenId::c(1, 1)), c11);
        let g = |x| NcPoly::gen(r, x);
        let e22 = &(&(&g(GenId::b(2, 1)).scale(&(&m * &v)) - &g(GenId::c(1, 2))) + &g(GenId::c(2, 1)))
            + &(&g(GenId::c(2, 2)) * &a12);
        assert_eq!(*d.d(GenId::e(2, 2)), e22);
        assert!(verify_dga(&d).all_pass());
    }

    #[test]
    fn sigma1_inverse_c11() {
        let d = build_filtered_dga(&parse_braid("-1", None).unwrap()).unwrap();
        let r = ring1();
        let expected = &NcPoly::constant(
            &(&cv(Var::Lambda(1)) * &CoeffPoly::var_pow(r, Var::Mu(1), -1)) + &(&cv(Var::Lambda(1)) * &cv(Var::V)),
        ) + &NcPoly::gen(r, GenId::a(1, 2)).scale(&cv(Var::U));
        assert_eq!(*d.d(GenId::c(1, 1)), expected);
    }

    #[test]
    fn specializations_of_trivial_braid() {
        let d = build_filtered_dga(&BraidWord::trivial(1)).unwrap();
        let t = RingDescriptor::new(1, UvMode::Absent);
        let (l, m) = (CoeffPoly::var(t, Var::Lambda(1)), CoeffPoly::var(t, Var::Mu(1)));
        let hat = specialize(&d, Some(0), Some(1)).unwrap();
        assert_eq!(hat.provenance(), Provenance::Hat);
        assert_eq!(*hat.d(GenId::c(1, 1)), NcPoly::constant(&(&l + &(&l * &m)) + &m));
        let dh = specialize(&d, Some(0), Some(0)).unwrap();
        assert_eq!(*dh.d(GenId::c(1, 1)), NcPoly::constant(&l + &m));
        assert_eq!(dh.render_text(), "∂̂̂c = λ + μ\n∂̂̂e = 0\n");
        assert!(specialize(&d, Some(0), None).is_err());
        assert_eq!(specialize(&d, None, None).unwrap(), d);
    }

    #[test]
    fn infinity_examples() {
        let s1 = parse_braid("1", None).unwrap();
        let inf = infinity_dga(&s1).unwrap();
        let base = build_filtered_dga(&s1).unwrap();
        let t = RingDescriptor::new(1, UvMode::Laurent);
        let lifted = map_dga(&base, &CoeffMap::retaining(base.ring(), t), Provenance::Infinity).unwrap();
        assert_eq!(inf, lifted);

        let si = parse_braid("-1", None).unwrap();
        let inf = infinity_dga(&si).unwrap();
        let l_uv = &(&CoeffPoly::var(t, Var::Lambda(1)) * &CoeffPoly::var(t, Var::U)) * &CoeffPoly::var_pow(t, Var::V, -1);
        let c11 = inf.d(GenId::c(1, 1));
        // λμ⁻¹ ↦ λUV⁻¹μ⁻¹
        let expected = &l_uv * &CoeffPoly::var_pow(t, Var::Mu(1), -1);
        assert_eq!(c11.constant_term().terms().next().map(|(e, _)| e.to_vec()), expected.terms().next().map(|(e, _)| e.to_vec()));
        assert!(verify_dga(&inf).all_pass());

        assert!(matches!(infinity_dga(&parse_braid("1 1", None).unwrap()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn single_tame_move_on_sigma1() {
        let d = build_filtered_dga(&parse_braid("1", None).unwrap()).unwrap();
        let r = d.ring();
        let minv = CoeffPoly::var_pow(r, Var::Mu(1), -1);
        let img = &NcPoly::gen(r, GenId::c(1, 2)) - &NcPoly::gen(r, GenId::c(1, 1)).scale(&minv);
        let d2 = apply_tame_substitution(&d, GenId::c(1, 2), &img).unwrap();
        assert_eq!(*d2.d(GenId::c(1, 2)), NcPoly::constant(unknot_c()));
        assert!(verify_dga(&d2).all_pass());

        // and back
        let back_img = &NcPoly::gen(r, GenId::c(1, 2)) + &NcPoly::gen(r, GenId::c(1, 1)).scale(&minv);
        let d3 = apply_tame_substitution(&d2, GenId::c(1, 2), &back_img).unwrap();
        assert_eq!(d3.differential(), d.differential());

        let id = apply_tame_substitution(&d, GenId::c(1, 2), &NcPoly::gen(r, GenId::c(1, 2))).unwrap();
        assert_eq!(id.differential(), d.differential());
    }

    #[test]
    fn tame_move_errors() {
        let d = build_filtered_dga(&parse_braid("1", None).unwrap()).unwrap();
        let r = d.ring();
        let g = |x| NcPoly::gen(r, x);
        let one_plus_mu = &CoeffPoly::one(r) + &CoeffPoly::var(r, Var::Mu(1));
        assert!(matches!(apply_tame_substitution(&d, GenId::c(1, 2), &g(GenId::c(1, 2)).scale(&one_plus_mu)), Err(Error::NotElementary(_))));
        assert!(matches!(apply_tame_substitution(&d, GenId::c(1, 2), &g(GenId::c(1, 1))), Err(Error::NotElementary(_))));
        let with_g = &g(GenId::c(1, 2)) + &(&g(GenId::c(1, 2)) * &g(GenId::a(1, 2)));
        assert!(matches!(apply_tame_substitution(&d, GenId::c(1, 2), &with_g), Err(Error::NotElementary(_))));
        let wrong_degree = &g(GenId::c(1, 2)) + &g(GenId::a(1, 2));
        assert!(matches!(apply_tame_substitution(&d, GenId::c(1, 2), &wrong_degree), Err(Error::NotElementary(_))));
    }

    #[test]
    fn destabilize_errors() {
        let d = build_filtered_dga(&parse_braid("1", None).unwrap()).unwrap();
        // ∂c11 = λμ + λμ²V - μa12 has extra terms
        assert!(matches!(destabilize(&d, GenId::c(1, 1), GenId::a(1, 2)), Err(Error::Destabilize(_))));
        assert!(matches!(destabilize(&d, GenId::e(1, 1), GenId::a(1, 2)), Err(Error::Destabilize(_))));

        // hand-made DGA with ∂x = (1+μ)y and ∂x = y + extra
        let r = ring1();
        let (x, y, z) = (GenId::c(1, 1), GenId::a(1, 2), GenId::a(2, 1));
        let mk = |dx: NcPoly| {
            let mut diff = BTreeMap::new();
            diff.insert(x, dx);
            diff.insert(y, NcPoly::zero(r));
            diff.insert(z, NcPoly::zero(r));
            FilteredDga::from_parts(BraidWord::trivial(2), BraidWord::trivial(2).components(), r, diff, Provenance::Transformed).unwrap()
        };
        let one_plus_mu = &CoeffPoly::one(r) + &CoeffPoly::var(r, Var::Mu(1));
        assert!(destabilize(&mk(NcPoly::gen(r, y).scale(&one_plus_mu)), x, y).is_err());
        assert!(destabilize(&mk(&NcPoly::gen(r, y) + &NcPoly::gen(r, z)), x, y).is_err());
        let good = destabilize(&mk(NcPoly::gen(r, y).scale(&CoeffPoly::var(r, Var::Mu(1)))), x, y).unwrap();
        assert_eq!(good.generators().collect::<Vec<_>>(), vec![z]);
    }

    #[test]
    fn unfiltered_matches_specialization() {
        for w in ["1", "-1", "1 1", "1 -2 1"] {
            let b = parse_braid(w, None).unwrap();
            let spec = specialize(&build_filtered_dga(&b).unwrap(), Some(1), Some(1)).unwrap();
            let direct = build_unfiltered_dga(&b).unwrap();
            assert_eq!(spec.differential(), direct.differential(), "{w}");
        }
    }

    #[test]
    fn leibniz_sign() {
        let d = build_filtered_dga(&parse_braid("1", None).unwrap()).unwrap();
        let r = d.ring();
        let (c11, c12) = (NcPoly::gen(r, GenId::c(1, 1)), NcPoly::gen(r, GenId::c(1, 2)));
        let lhs = d.apply_d(&(&c11 * &c12));
        let rhs = &(&d.apply_d(&c11) * &c12) - &(&c11 * &d.apply_d(&c12));
        assert_eq!(lhs, rhs);
    }
}
