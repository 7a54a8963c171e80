//! The braid group action on the degree-0 subalgebra and the matrices
//! `Φ^L_B`, `Φ^R_B` it induces.
//!
//! All action computations happen over `ℤ[μ̃_0^{±1}, …, μ̃_n^{±1}]`, with
//! `μ̃_i` a commutative coefficient per strand. Strand 0 is the idle extra
//! strand used to read off the Φ matrices; it is never touched by the braid.
//! The closed-link form replaces `μ̃_i` by `μ_{α(i)}`.

use crate::braid::{BraidWord, ComponentData, Letter};
use crate::coeff::{CoeffMap, CoeffPoly, RingDescriptor, UvMode, Var};
use crate::error::{Error, Result};
use crate::free_algebra::{Family, GenId, GenSubstitution, NcMatrix, NcPoly, Word};

fn a(ring: RingDescriptor, i: u16, j: u16) -> NcPoly {
    NcPoly::gen(ring, GenId::a(i, j))
}

fn aa(ring: RingDescriptor, i: u16, j: u16, k: u16, l: u16) -> NcPoly {
    NcPoly::term(CoeffPoly::one(ring), Word(vec![GenId::a(i, j), GenId::a(k, l)]))
}

/// `φ_{σ_k}^{sign}` on the algebra generated by `a_ij` for `i ≠ j` in `strands`.
fn phi_letter(ring: RingDescriptor, strands: &[u16], k: u16, sign: i8) -> GenSubstitution {
    let kk = k + 1;
    // t = μ̃_k μ̃_{k+1}^{-1}
    let t = &CoeffPoly::var(ring, Var::MuTilde(k as usize)) * &CoeffPoly::var_pow(ring, Var::MuTilde(kk as usize), -1);
    let mut s = GenSubstitution::identity(ring).with_domain(&[Family::A]);
    for &i in strands {
        for &j in strands {
            if i == j {
                continue;
            }
            let img = if sign > 0 {
                match (i, j) {
                    (i, j) if i == k && j == kk => -a(ring, kk, k),
                    (i, j) if i == kk && j == k => -a(ring, k, kk).scale(&t),
                    (i, j) if j == kk => a(ring, i, k),
                    (i, j) if i == kk => a(ring, k, j),
                    (i, j) if j == k && i < k => &a(ring, i, kk) - &aa(ring, i, k, k, kk),
                    (i, j) if j == k => &a(ring, i, kk) - &aa(ring, i, k, k, kk).scale(&t),
                    (i, j) if i == k => &a(ring, kk, j) - &aa(ring, kk, k, k, j),
                    _ => continue,
                }
            } else {
                match (i, j) {
                    (i, j) if i == kk && j == k => -a(ring, k, kk),
                    (i, j) if i == k && j == kk => -a(ring, kk, k).scale(&t),
                    (i, j) if j == k => a(ring, i, kk),
                    (i, j) if i == k => a(ring, kk, j),
                    (i, j) if j == kk && i < k => &a(ring, i, k) - &aa(ring, i, kk, kk, k).scale(&t),
                    (i, j) if j == kk => &a(ring, i, k) - &aa(ring, i, kk, kk, k),
                    (i, j) if i == kk => &a(ring, k, j) - &aa(ring, k, kk, kk, j),
                    _ => continue,
                }
            };
            s.set(GenId::a(i, j), img);
        }
    }
    let mut perm: Vec<usize> = (0..ring.tilde).collect();
    perm.swap(k as usize, kk as usize);
    s.with_tilde_perm(perm)
}

/// The ring `ℤ[μ̃_0^{±1}, …, μ̃_n^{±1}]` the action is computed over.
pub fn action_ring(n: usize) -> RingDescriptor {
    RingDescriptor::tilde_only(n + 1)
}

fn strand_labels(n: usize, extended: bool) -> Vec<u16> {
    let lo = if extended { 0 } else { 1 };
    (lo..=n as u16).collect()
}

/// `φ_{σ_k}` (sign `+1`) or its inverse (sign `-1`) on `n` strands, over
/// [`action_ring`]`(n)`.
pub fn phi_generator(k: usize, sign: i8, n: usize) -> Result<GenSubstitution> {
    if k == 0 || k >= n {
        return Err(Error::StrandOutOfRange { k, n });
    }
    Ok(phi_letter(action_ring(n), &strand_labels(n, false), k as u16, sign))
}

fn compose_word(letters: &[Letter], n: usize, extended: bool) -> Result<GenSubstitution> {
    let ring = action_ring(n);
    let labels = strand_labels(n, extended);
    let mut acc = GenSubstitution::identity(ring).with_domain(&[Family::A]);
    // φ_B = φ_{first} ∘ ⋯ ∘ φ_{last}. Folding from the right substitutes one
    // letter into the accumulated images instead of multiplying them.
    for l in letters.iter().rev() {
        let step = phi_letter(ring, &labels, l.index as u16, l.sign);
        acc = step.compose(&acc)?;
    }
    Ok(acc)
}

/// `φ_B` before identifying `μ̃_i` with `μ_{α(i)}`.
pub fn phi_braid(b: &BraidWord) -> Result<GenSubstitution> {
    compose_word(b.letters(), b.strands(), false)
}

/// Coefficient map `μ̃_i ↦ μ_{α(i)}` into `target`; `μ̃_0` has no image.
pub fn elimination_map(components: &ComponentData, target: RingDescriptor) -> CoeffMap {
    let n = components.alpha.len();
    let mut m = CoeffMap::new(action_ring(n), target);
    for i in 1..=n {
        m.set(Var::MuTilde(i), CoeffPoly::var(target, Var::Mu(components.component_of(i))));
    }
    m
}

/// The default ring for a braid's DGA: `ℤ[λ^{±1}, μ^{±1}][U, V]`.
pub fn dga_ring(components: &ComponentData) -> RingDescriptor {
    RingDescriptor::new(components.r, UvMode::Polynomial)
}

/// `φ_B` with `μ̃_i = μ_{α(i)}`, over `target`.
pub fn eliminate(phi: &GenSubstitution, components: &ComponentData, target: RingDescriptor) -> Result<GenSubstitution> {
    let map = elimination_map(components, target);
    phi.map_coeffs(target, |c| c.substitute(&map))
}

/// Reads `(Φ^L, Φ^R)` off the action on the braid with an idle strand 0,
/// still over [`action_ring`].
pub(crate) fn phi_matrices_tilde(b: &BraidWord) -> Result<(GenSubstitution, NcMatrix, NcMatrix)> {
    let n = b.strands();
    let ring = action_ring(n);
    let ext = compose_word(b.letters(), n, true)?;

    let mut left = vec![vec![Vec::new(); n]; n];
    let mut right = vec![vec![Vec::new(); n]; n];
    for i in 1..=n as u16 {
        let img = ext.apply(&a(ring, i, 0))?;
        for (w, c) in img.terms() {
            let (last, prefix) = w.0.split_last().ok_or_else(|| Error::Internal(format!("constant term in φ'(a_{i}0)")))?;
            if last.family != Family::A || last.j != 0 || last.i == 0 || prefix.iter().any(|g| g.i == 0 || g.j == 0) {
                return Err(Error::Internal(format!("term {w:?} of φ'(a_{i}0) does not end in a_j0")));
            }
            left[i as usize - 1][last.i as usize - 1].push((c.clone(), Word(prefix.to_vec())));
        }
        let img = ext.apply(&a(ring, 0, i))?;
        for (w, c) in img.terms() {
            let (first, rest) = w.0.split_first().ok_or_else(|| Error::Internal(format!("constant term in φ'(a_0{i})")))?;
            if first.family != Family::A || first.i != 0 || first.j == 0 || rest.iter().any(|g| g.i == 0 || g.j == 0) {
                return Err(Error::Internal(format!("term {w:?} of φ'(a_0{i}) does not start with a_0j")));
            }
            right[first.j as usize - 1][i as usize - 1].push((c.clone(), Word(rest.to_vec())));
        }
    }

    let collect = |m: Vec<Vec<Vec<(CoeffPoly, Word)>>>| -> Result<NcMatrix> {
        let rows = m
            .into_iter()
            .map(|row| row.into_iter().map(|t| NcPoly::from_terms(ring, t)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        NcMatrix::from_rows(ring, rows)
    };
    let (left, right) = (collect(left)?, collect(right)?);

    // restriction of the extended action to strands 1..n is φ_B itself
    let mut phi = GenSubstitution::identity(ring).with_domain(&[Family::A]);
    for (g, img) in ext.moved() {
        if g.i != 0 && g.j != 0 {
            phi.set(*g, img.clone());
        }
    }
    if let Some(p) = ext.tilde_perm() {
        if p[0] != 0 {
            return Err(Error::Internal("braid moved the idle strand".into()));
        }
        phi = phi.with_tilde_perm(p.to_vec());
    }
    Ok((phi, left, right))
}

/// `((Φ^L_B)^{-1}, (Φ^R_B)^{-1})` over [`action_ring`], built by prepending
/// letters: `Φ^L_{sB} = φ_s(Φ^L_B)·Φ^L_s` and `Φ^R_{sB} = Φ^R_s·φ_s(Φ^R_B)`.
/// Each letter's inverse comes from the group law `(Φ^L_s)^{-1} = φ_s(Φ^L_{s^{-1}})`.
fn inverse_matrices_tilde(b: &BraidWord) -> Result<(NcMatrix, NcMatrix)> {
    let n = b.strands();
    let ring = action_ring(n);
    let labels = strand_labels(n, false);
    let mut l_inv = NcMatrix::identity(ring, n);
    let mut r_inv = NcMatrix::identity(ring, n);
    for l in b.letters().iter().rev() {
        let step = phi_letter(ring, &labels, l.index as u16, l.sign);
        let (_, ls, rs) = phi_matrices_tilde(&BraidWord::new(n, vec![l.inverse()])?)?;
        let under = |m: &NcMatrix| m.try_map(ring, |p| step.apply(p));
        l_inv = under(&ls)?.try_mul(&under(&l_inv)?)?;
        r_inv = under(&r_inv)?.try_mul(&under(&rs)?)?;
    }
    Ok((l_inv, r_inv))
}

fn eliminate_matrix(m: &NcMatrix, map: &CoeffMap) -> Result<NcMatrix> {
    m.try_map(map.target, |p| {
        p.map_coeffs(map.target, |c| {
            c.substitute(map).map_err(|e| match e {
                Error::Unassigned(v) => Error::Internal(format!("{v} appears in a Φ matrix")),
                other => other,
            })
        })
    })
}

/// `(Φ^L_B, Φ^R_B)` over `ℤ[λ^{±1}, μ^{±1}][U, V]`.
pub fn phi_matrices(b: &BraidWord) -> Result<(NcMatrix, NcMatrix)> {
    let cd = b.components();
    let map = elimination_map(&cd, dga_ring(&cd));
    let (_, l, r) = phi_matrices_tilde(b)?;
    Ok((eliminate_matrix(&l, &map)?, eliminate_matrix(&r, &map)?))
}

/// Everything the DGA construction needs from the braid action.
#[derive(Debug, Clone)]
pub struct PhiData {
    pub braid: BraidWord,
    /// `φ_B` over `ℤ[μ̃^{±1}]`.
    pub phi_tilde: GenSubstitution,
    /// `φ_B` with `μ̃_i = μ_{α(i)}`.
    pub phi: GenSubstitution,
    pub phi_l: NcMatrix,
    pub phi_r: NcMatrix,
    pub phi_l_inv: NcMatrix,
    pub phi_r_inv: NcMatrix,
}

impl PhiData {
    /// Computes the action and Φ matrices with their inverses, unchecked.
    pub fn compute(b: &BraidWord) -> Result<PhiData> {
        let cd = b.components();
        let ring = dga_ring(&cd);
        let map = elimination_map(&cd, ring);

        let (phi_tilde, l, r) = phi_matrices_tilde(b)?;
        let phi_l = eliminate_matrix(&l, &map)?;
        let phi_r = eliminate_matrix(&r, &map)?;
        let phi = eliminate(&phi_tilde, &cd, ring)?;

        let (li, ri) = inverse_matrices_tilde(b)?;
        let phi_l_inv = eliminate_matrix(&li, &map)?;
        let phi_r_inv = eliminate_matrix(&ri, &map)?;

        Ok(PhiData { braid: b.clone(), phi_tilde, phi, phi_l, phi_r, phi_l_inv, phi_r_inv })
    }

    /// As `compute`, then fails with an internal error unless all four
    /// inverse products are the identity.
    pub fn compute_checked(b: &BraidWord) -> Result<PhiData> {
        let data = Self::compute(b)?;
        data.check_inverses()?;
        Ok(data)
    }

    pub fn check_inverses(&self) -> Result<()> {
        let checks = [
            ("Φ^L·Φ^L_inv", self.phi_l.try_mul(&self.phi_l_inv)?),
            ("Φ^L_inv·Φ^L", self.phi_l_inv.try_mul(&self.phi_l)?),
            ("Φ^R·Φ^R_inv", self.phi_r.try_mul(&self.phi_r_inv)?),
            ("Φ^R_inv·Φ^R", self.phi_r_inv.try_mul(&self.phi_r)?),
        ];
        for (name, m) in checks {
            if !m.is_identity() {
                return Err(Error::Internal(format!("{name} ≠ Id for braid {}", self.braid.to_text())));
            }
        }
        Ok(())
    }
}

/// `(Φ^L_B)^{-1}, (Φ^R_B)^{-1}`, verified on both sides.
pub fn phi_matrix_inverses(b: &BraidWord) -> Result<(NcMatrix, NcMatrix)> {
    let d = PhiData::compute_checked(b)?;
    Ok((d.phi_l_inv, d.phi_r_inv))
}
