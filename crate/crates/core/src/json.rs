//! JSON forms of polynomials, matrices and DGA documents.
//!
//! A polynomial is a list of `{coeff, word}` objects with the coefficient in
//! the text form of [`CoeffPoly::to_text`] and the word as generator names.
//! A matrix is a list of rows of polynomials.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::braid::{parse_braid, ComponentData};
use crate::coeff::{CoeffPoly, RingDescriptor, UvMode};
use crate::dga::{FilteredDga, Provenance};
use crate::error::{Error, Result};
use crate::free_algebra::{GenId, NcMatrix, NcPoly, Word};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    pub coeff: String,
    pub word: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorDoc {
    pub name: String,
    pub degree: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingDoc {
    pub r: usize,
    pub uv_mode: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentsDoc {
    pub r: usize,
    pub alpha: Vec<usize>,
    pub leading: Vec<usize>,
    pub writhe: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgaDocument {
    pub braid: String,
    pub strands: usize,
    pub components: ComponentsDoc,
    pub ring: RingDoc,
    pub generators: Vec<GeneratorDoc>,
    pub differential: Map<String, Value>,
    pub provenance: String,
}

fn doc_err(msg: impl Into<String>) -> Error {
    Error::Document(msg.into())
}

pub fn poly_terms(p: &NcPoly) -> Vec<TermDoc> {
    p.terms()
        .map(|(w, c)| TermDoc { coeff: c.to_text(), word: w.0.iter().map(|g| g.name()).collect() })
        .collect()
}

pub fn poly_to_value(p: &NcPoly) -> Value {
    serde_json::to_value(poly_terms(p)).expect("plain data")
}

pub fn poly_from_value(ring: RingDescriptor, v: &Value) -> Result<NcPoly> {
    let terms: Vec<TermDoc> = serde_json::from_value(v.clone()).map_err(|e| doc_err(format!("polynomial: {e}")))?;
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        let c = CoeffPoly::parse(ring, &t.coeff)?;
        let word = t
            .word
            .iter()
            .map(|n| GenId::parse(n).ok_or_else(|| doc_err(format!("unknown generator name {n:?}"))))
            .collect::<Result<Vec<_>>>()?;
        out.push((c, Word(word)));
    }
    NcPoly::from_terms(ring, out)
}

pub fn matrix_to_value(m: &NcMatrix) -> Value {
    Value::Array(m.rows().map(|row| Value::Array(row.iter().map(poly_to_value).collect())).collect())
}

pub fn matrix_from_value(ring: RingDescriptor, v: &Value) -> Result<NcMatrix> {
    let rows = v.as_array().ok_or_else(|| doc_err("matrix must be an array of rows"))?;
    let rows = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| doc_err("matrix row must be an array"))?
                .iter()
                .map(|x| poly_from_value(ring, x))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    NcMatrix::from_rows(ring, rows)
}

impl DgaDocument {
    pub fn from_dga(d: &FilteredDga) -> DgaDocument {
        let cd = d.components();
        let ring = d.ring();
        let mut differential = Map::new();
        for (g, p) in d.differential() {
            differential.insert(g.name(), poly_to_value(p));
        }
        DgaDocument {
            braid: d.braid().to_text(),
            strands: d.braid().strands(),
            components: ComponentsDoc {
                r: cd.r,
                alpha: cd.alpha.clone(),
                leading: cd.leading.clone(),
                writhe: cd.writhe.clone(),
            },
            ring: RingDoc { r: ring.r, uv_mode: ring.uv.name().to_string() },
            generators: d.generators().map(|g| GeneratorDoc { name: g.name(), degree: g.degree() }).collect(),
            differential,
            provenance: d.provenance().name().to_string(),
        }
    }

    pub fn to_dga(&self) -> Result<FilteredDga> {
        let braid = parse_braid(&self.braid, Some(self.strands))?;
        let cd: ComponentData = braid.components();
        let given = &self.components;
        if (given.r, &given.alpha, &given.leading, &given.writhe) != (cd.r, &cd.alpha, &cd.leading, &cd.writhe) {
            return Err(doc_err(format!("components do not match braid {:?}", self.braid)));
        }
        let uv = UvMode::from_name(&self.ring.uv_mode).ok_or_else(|| doc_err(format!("unknown uv_mode {:?}", self.ring.uv_mode)))?;
        if self.ring.r != cd.r {
            return Err(doc_err(format!("ring has {} components, braid closure has {}", self.ring.r, cd.r)));
        }
        let ring = RingDescriptor::new(cd.r, uv);
        let provenance =
            Provenance::from_name(&self.provenance).ok_or_else(|| doc_err(format!("unknown provenance {:?}", self.provenance)))?;

        let mut diff = BTreeMap::new();
        for gd in &self.generators {
            let g = GenId::parse(&gd.name).ok_or_else(|| doc_err(format!("unknown generator name {:?}", gd.name)))?;
            if g.degree() != gd.degree {
                return Err(doc_err(format!("{} listed with degree {}", gd.name, gd.degree)));
            }
            let v = self.differential.get(&gd.name).ok_or_else(|| doc_err(format!("no differential for {}", gd.name)))?;
            if diff.insert(g, poly_from_value(ring, v)?).is_some() {
                return Err(doc_err(format!("{} listed twice", gd.name)));
            }
        }
        if let Some(extra) = self.differential.keys().find(|k| GenId::parse(k).map_or(true, |g| !diff.contains_key(&g))) {
            return Err(doc_err(format!("differential given for unlisted generator {extra}")));
        }
        FilteredDga::from_parts(braid, cd, ring, diff, provenance)
    }
}

/// Pretty-printed JSON document of `d`.
pub fn dga_to_json(d: &FilteredDga) -> String {
    serde_json::to_string_pretty(&DgaDocument::from_dga(d)).expect("plain data")
}

pub fn dga_from_json(text: &str) -> Result<FilteredDga> {
    let doc: DgaDocument = serde_json::from_str(text).map_err(|e| doc_err(e.to_string()))?;
    doc.to_dga()
}
