//! Shared corpus and polynomial helpers for the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use tdga_core::braid::{parse_braid, BraidWord};
use tdga_core::braid_action::{phi_braid, phi_matrices, PhiData};
use tdga_core::coeff::{CoeffPoly, RingDescriptor};
use tdga_core::augment::{count_augmentations, count_augmentations_all_units, count_augmentations_naive, AugmentationProblem};
use tdga_core::dga::{apply_tame_substitution, build_filtered_dga, build_matrices, destabilize, infinity_dga, phi_relation_holds, specialize, FilteredDga, Specialization};
use tdga_core::free_algebra::{GenId, NcMatrix, NcPoly, Word};

pub const K1: &str = "1 -2 1 -2 -3 2 3 3 3";
pub const K2: &str = "1 -2 1 -2 3 3 3 2 -3";

/// Every word of length at most `max_len` in `B_n`.
pub fn all_words(n: usize, max_len: usize) -> Vec<BraidWord> {
    let letters: Vec<i64> = (1..n as i64).flat_map(|k| [k, -k]).collect();
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<i64>| {
                letters.iter().map(move |&l| {
                    let mut x = w.clone();
                    x.push(l);
                    x
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out.into_iter().map(|w| BraidWord::from_signed(n, &w).unwrap()).collect()
}

/// Seeded random words with `2 ≤ n ≤ 4` strands and length at most 10.
pub fn random_words(seed: u64, count: usize) -> Vec<BraidWord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(2..=4usize);
            let len = rng.gen_range(0..=10usize);
            let w: Vec<i64> = (0..len)
                .map(|_| {
                    let k = rng.gen_range(1..n) as i64;
                    if rng.gen_bool(0.5) {
                        k
                    } else {
                        -k
                    }
                })
                .collect();
            BraidWord::from_signed(n, &w).unwrap()
        })
        .collect()
}

/// `Σ coeff · word` from `(coefficient text, space-separated generator names)`.
pub fn poly(ring: RingDescriptor, terms: &[(&str, &str)]) -> NcPoly {
    let terms = terms.iter().map(|(c, w)| {
        let word = w.split_whitespace().map(|g| GenId::parse(g).unwrap()).collect();
        (CoeffPoly::parse(ring, c).unwrap(), Word(word))
    });
    NcPoly::from_terms(ring, terms).unwrap()
}

pub fn gen(ring: RingDescriptor, name: &str) -> NcPoly {
    NcPoly::gen(ring, GenId::parse(name).unwrap())
}

fn golden_poly(ring: RingDescriptor, v: &Value) -> NcPoly {
    let pairs: Vec<(String, String)> = serde_json::from_value(v.clone()).unwrap();
    let refs: Vec<(&str, &str)> = pairs.iter().map(|(c, w)| (c.as_str(), w.as_str())).collect();
    poly(ring, &refs)
}

/// Entries of the σ₁ golden file that the computed DGA does not reproduce.
pub fn sigma1_mismatches() -> Vec<String> {
    let golden: Value = serde_json::from_str(include_str!("../golden/sigma1.json")).unwrap();
    let b = parse_braid(golden["braid"].as_str().unwrap(), None).unwrap();
    let d = build_filtered_dga(&b).unwrap();
    let ring = d.ring();
    let m = build_matrices(&b);
    let (phi_l, phi_r) = phi_matrices(&b).unwrap();
    let computed: [(&str, &NcMatrix); 8] = [
        ("phi_l", &phi_l),
        ("phi_r", &phi_r),
        ("lambda", &m.lambda),
        ("a", &m.a),
        ("a_u", &m.a_u),
        ("a_v", &m.a_v),
        ("b_u", &m.b_u),
        ("b_v", &m.b_v),
    ];
    let mut bad = Vec::new();
    for (name, mat) in computed {
        let rows = golden["matrices"][name].as_array().unwrap();
        for (i, row) in rows.iter().enumerate() {
            for (j, entry) in row.as_array().unwrap().iter().enumerate() {
                if golden_poly(ring, entry) != *mat.get(i, j) {
                    bad.push(format!("{name}[{},{}] = {}", i + 1, j + 1, mat.get(i, j)));
                }
            }
        }
    }
    let diff = golden["differential"].as_object().unwrap();
    if diff.len() != d.differential().len() {
        bad.push(format!("{} differentials, expected {}", d.differential().len(), diff.len()));
    }
    for (name, v) in diff {
        let g = GenId::parse(name).unwrap();
        if !d.has_generator(g) || golden_poly(ring, v) != *d.d(g) {
            bad.push(format!("∂{name} = {}", if d.has_generator(g) { d.d(g).to_string() } else { "missing".into() }));
        }
    }
    bad
}

/// The eight automorphisms taking the σ₁ DGA to a stabilized unknot DGA,
/// in the order they are applied.
pub const SIGMA1_MOVES: [(&str, &[(&str, &str)]); 8] = [
    ("e_1_2", &[("1", "e_1_2"), ("-1", "b_1_2 c_1_2"), ("-1*l1^-1*m1^-1", "c_1_2 c_1_2")]),
    ("c_2_1", &[("1", "c_2_1"), ("-1*m1*V", "b_2_1"), ("1", "c_1_2"), ("-1", "c_2_2 a_1_2")]),
    ("b_1_2", &[("1", "b_1_2"), ("-1*m1^-1", "c_2_2"), ("1*l1^-1*m1^-2", "c_1_1")]),
    ("b_2_1", &[("1", "b_2_1"), ("1*m1^-1", "c_1_1"), ("-1*l1", "c_2_2")]),
    (
        "e_1_1",
        &[("1", "e_1_1"), ("1*l1^-1*m1^-2", "c_2_2 c_1_1"), ("-1*m1^-1", "e_1_2"), ("-1*l1^-1*m1^-1", "e_2_2"), ("1*V", "e_2_1")],
    ),
    ("c_1_2", &[("1", "c_1_2"), ("-1*m1^-1", "c_1_1")]),
    ("a_2_1", &[("1", "a_2_1"), ("-1*V+-1*m1^-1", "")]),
    ("a_1_2", &[("1", "a_1_2"), ("1*l1+1*l1*m1*V", "")]),
];

/// The differential after all eight moves; generators not listed map to 0.
pub const SIGMA1_REDUCED: [(&str, &[(&str, &str)]); 6] = [
    ("c_1_1", &[("-1*m1", "a_1_2")]),
    ("c_1_2", &[("1*U+1*l1+1*l1*m1*V+1*m1", "")]),
    ("c_2_2", &[("1*m1", "a_2_1")]),
    ("e_1_2", &[("-1*m1", "b_1_2")]),
    ("e_2_1", &[("1*l1^-1", "b_2_1")]),
    ("e_2_2", &[("1", "c_2_1")]),
];

/// `(high, low)` canceling pairs removed after the moves.
pub const SIGMA1_PAIRS: [(&str, &str); 5] =
    [("c_1_1", "a_1_2"), ("c_2_2", "a_2_1"), ("e_1_2", "b_1_2"), ("e_2_1", "b_2_1"), ("e_2_2", "c_2_1")];

pub struct TameRun {
    /// The σ₁ DGA followed by the result of each move.
    pub moves: Vec<FilteredDga>,
    /// The result of each destabilization.
    pub destabilized: Vec<FilteredDga>,
}

pub fn sigma1_tame_run() -> TameRun {
    let mut d = build_filtered_dga(&parse_braid("1", None).unwrap()).unwrap();
    let ring = d.ring();
    let mut moves = vec![d.clone()];
    for (g, image) in SIGMA1_MOVES {
        d = apply_tame_substitution(&d, GenId::parse(g).unwrap(), &poly(ring, image)).unwrap();
        moves.push(d.clone());
    }
    let mut destabilized = Vec::new();
    for (hi, lo) in SIGMA1_PAIRS {
        d = destabilize(&d, GenId::parse(hi).unwrap(), GenId::parse(lo).unwrap()).unwrap();
        destabilized.push(d.clone());
    }
    TameRun { moves, destabilized }
}

/// Generators whose differential after the moves differs from [`SIGMA1_REDUCED`].
pub fn sigma1_reduced_mismatches(d: &FilteredDga) -> Vec<String> {
    let ring = d.ring();
    d.generators()
        .filter(|&g| {
            let want = SIGMA1_REDUCED.iter().find(|(n, _)| GenId::parse(n) == Some(g)).map_or(NcPoly::zero(ring), |(_, t)| poly(ring, t));
            *d.d(g) != want
        })
        .map(|g| format!("∂{} = {}", g.name(), d.d(g)))
        .collect()
}

/// Hat count at `(λ, μ) = (−1, 1)` over `ℤ/3`.
pub fn hat_count_unknot_point(d: &FilteredDga) -> u64 {
    let hat = specialize(d, Some(0), Some(1)).unwrap();
    count_augmentations(&AugmentationProblem::new(&hat, 3, &[-1], &[1], None).unwrap()).unwrap()
}

fn word(n: usize, w: &[i64]) -> BraidWord {
    BraidWord::from_signed(n, w).unwrap()
}

/// Braid relations, distant commutation and `φ_{σ_k}∘φ_{σ_k}⁻¹ = id` on
/// `n` strands; returns the relations that fail.
pub fn braid_relation_failures(n: usize) -> Vec<String> {
    let mut pairs = Vec::new();
    for k in 1..n as i64 {
        pairs.push((vec![k, -k], vec![]));
        pairs.push((vec![-k, k], vec![]));
        if k + 1 < n as i64 {
            pairs.push((vec![k, k + 1, k], vec![k + 1, k, k + 1]));
            pairs.push((vec![-k, -(k + 1), -k], vec![-(k + 1), -k, -(k + 1)]));
        }
        for l in k + 2..n as i64 {
            pairs.push((vec![k, l], vec![l, k]));
            pairs.push((vec![k, -l], vec![-l, k]));
        }
    }
    pairs
        .into_iter()
        .filter(|(x, y)| phi_braid(&word(n, x)).unwrap() != phi_braid(&word(n, y)).unwrap())
        .map(|(x, y)| format!("n={n}: {x:?} ≠ {y:?}"))
        .collect()
}

/// Checks both inverse pairs and `φ_B(A) = Φ^L·A·Φ^R` for `b`.
pub fn phi_identities(b: &BraidWord) -> Result<(), String> {
    let phi = PhiData::compute(b).map_err(|e| e.to_string())?;
    phi.check_inverses().map_err(|e| e.to_string())?;
    match phi_relation_holds(&phi, &build_matrices(b)) {
        Ok(true) => Ok(()),
        Ok(false) => Err(format!("φ_B(A) ≠ Φ^L·A·Φ^R for {}", b.to_text())),
        Err(e) => Err(e.to_string()),
    }
}

/// All tuples of nonzero residues mod `p` of length `k`.
pub fn unit_tuples(p: u64, k: usize) -> Vec<Vec<i64>> {
    (0..k).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter().flat_map(|t| (1..p as i64).map(move |x| [t.clone(), vec![x]].concat())).collect()
    })
}

/// Compares the optimized counter with the naive evaluator on the hat,
/// double-hat and unfiltered DGAs of each braid, at every unit assignment
/// of `λ_j, μ_j`.
pub fn oracle_mismatches(braids: &[BraidWord], primes: &[u64]) -> Vec<String> {
    let mut bad = Vec::new();
    for b in braids {
        let d = build_filtered_dga(b).unwrap();
        let r = d.ring().r;
        for s in [Specialization::Hat, Specialization::DoubleHat, Specialization::Unfiltered] {
            let sd = s.apply(&d).unwrap();
            for &p in primes {
                for t in unit_tuples(p, 2 * r) {
                    let prob = AugmentationProblem::new(&sd, p, &t[..r], &t[r..], None).unwrap();
                    let (fast, slow) = (count_augmentations(&prob).unwrap(), count_augmentations_naive(&prob).unwrap());
                    if fast != slow {
                        bad.push(format!("{} {} p={p} {t:?}: {fast} vs {slow}", b.to_text(), s.name()));
                    }
                }
            }
        }
    }
    bad
}

/// Specializations whose all-units tables must agree for `x` and `y`, or
/// the first one that differs.
pub fn tables_agree(x: &str, y: &str, p: u64) -> Result<(), String> {
    let dx = build_filtered_dga(&parse_braid(x, None).unwrap()).unwrap();
    let dy = build_filtered_dga(&parse_braid(y, None).unwrap()).unwrap();
    for s in [Specialization::Hat, Specialization::DoubleHat, Specialization::Unfiltered] {
        let tx = count_augmentations_all_units(&s.apply(&dx).unwrap(), p).unwrap();
        let ty = count_augmentations_all_units(&s.apply(&dy).unwrap(), p).unwrap();
        if tx != ty {
            return Err(format!("{} tables of {x:?} and {y:?} differ", s.name()));
        }
    }
    Ok(())
}

/// Whether the infinity DGAs of `x` and `y` have the same all-units table.
pub fn infinity_tables_agree(x: &str, y: &str, p: u64) -> Result<(), String> {
    let tx = count_augmentations_all_units(&infinity_dga(&parse_braid(x, None).unwrap()).unwrap(), p).unwrap();
    let ty = count_augmentations_all_units(&infinity_dga(&parse_braid(y, None).unwrap()).unwrap(), p).unwrap();
    if tx.len() != ty.len() || tx != ty {
        return Err(format!("infinity tables of {x:?} and {y:?} differ"));
    }
    Ok(())
}
