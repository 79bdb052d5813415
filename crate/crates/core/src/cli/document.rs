//! JSON exchange format for weighted graphs and isogenies. Weights travel as
//! exact fraction strings; `partner: null` marks a tail.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::arith::{CurveClass, Rational, TargetProfile};
use crate::category::Isogeny;
use crate::error::{Error, Result};
use crate::graph::{Flag, Vertex, WGraph};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileDoc {
    pub dim_v: u32,
    pub kappa: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexDoc {
    pub id: u64,
    pub genus: u32,
    pub beta: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlagDoc {
    pub id: u64,
    pub vertex: u64,
    pub weight: String,
    pub partner: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub profile: ProfileDoc,
    pub vertices: Vec<VertexDoc>,
    pub flags: Vec<FlagDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Value>,
}

fn doc_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Document { path: path.into(), message: message.into() }
}

fn json_err(e: serde_json::Error) -> Error {
    doc_err(format!("line {} column {}", e.line(), e.column()), e.to_string())
}

/// Fraction strings only: `p` or `p/q`, no decimals or exponents.
fn parse_weight(path: &str, s: &str) -> Result<Rational> {
    let ok = !s.is_empty()
        && s.split('/').count() <= 2
        && s.split('/').all(|p| !p.is_empty() && p.trim_start_matches('-').bytes().all(|b| b.is_ascii_digit()));
    if !ok {
        return Err(doc_err(path, format!("bad fraction `{s}`")));
    }
    s.parse::<Rational>().map_err(|e| doc_err(path, e.to_string()))
}

impl GraphDocument {
    pub fn parse(text: &str) -> Result<GraphDocument> {
        serde_json::from_str(text).map_err(json_err)
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }

    pub fn from_graph(g: &WGraph) -> GraphDocument {
        GraphDocument {
            profile: ProfileDoc { dim_v: g.profile.dim_v, kappa: g.profile.kappa.clone() },
            vertices: g
                .vertices
                .iter()
                .enumerate()
                .map(|(i, v)| VertexDoc { id: i as u64, genus: v.genus, beta: v.class.0.clone() })
                .collect(),
            flags: g
                .flags
                .iter()
                .enumerate()
                .map(|(i, f)| FlagDoc {
                    id: i as u64,
                    vertex: f.vertex as u64,
                    weight: f.weight.to_string(),
                    partner: (f.partner != i).then_some(f.partner as u64),
                    label: f.label.clone(),
                })
                .collect(),
            meta: None,
        }
    }

    /// Vertices and flags are renumbered in document order.
    pub fn to_graph(&self) -> Result<WGraph> {
        let profile = TargetProfile::new(self.profile.dim_v, self.profile.kappa.clone());
        let mut vid = HashMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if vid.insert(v.id, i).is_some() {
                return Err(doc_err(format!("vertices[{i}].id"), format!("duplicate vertex id {}", v.id)));
            }
            if v.beta.len() != profile.rank() {
                return Err(doc_err(
                    format!("vertices[{i}].beta"),
                    format!("class has {} coordinates, profile has rank {}", v.beta.len(), profile.rank()),
                ));
            }
        }
        let mut fid = HashMap::new();
        for (i, f) in self.flags.iter().enumerate() {
            if fid.insert(f.id, i).is_some() {
                return Err(doc_err(format!("flags[{i}].id"), format!("duplicate flag id {}", f.id)));
            }
        }
        for (i, f) in self.flags.iter().enumerate() {
            if let Some(p) = f.partner.filter(|p| !fid.contains_key(p)) {
                return Err(doc_err(format!("flags[{i}].partner"), format!("flag {} has dangling partner {p}", f.id)));
            }
        }
        let mut flags = Vec::with_capacity(self.flags.len());
        for (i, f) in self.flags.iter().enumerate() {
            let vertex = *vid
                .get(&f.vertex)
                .ok_or_else(|| doc_err(format!("flags[{i}].vertex"), format!("flag {} points at missing vertex {}", f.id, f.vertex)))?;
            let weight = parse_weight(&format!("flags[{i}].weight"), &f.weight)?;
            if !weight.is_positive() || weight > Rational::one() {
                return Err(doc_err(format!("flags[{i}].weight"), format!("weight {weight} outside (0, 1]")));
            }
            let partner = match f.partner {
                None => i,
                Some(p) => {
                    let j = fid[&p];
                    if j == i {
                        return Err(doc_err(format!("flags[{i}].partner"), format!("flag {} is its own partner; tails use null", f.id)));
                    }
                    if self.flags[j].partner != Some(f.id) {
                        return Err(doc_err(
                            format!("flags[{i}].partner"),
                            format!("involution violated: partner {p} of flag {} does not point back", f.id),
                        ));
                    }
                    if !weight.is_one() {
                        return Err(doc_err(format!("flags[{i}].weight"), format!("edge flag {} has weight {weight}", f.id)));
                    }
                    if f.label.is_some() {
                        return Err(doc_err(format!("flags[{i}].label"), format!("edge flag {} carries a label", f.id)));
                    }
                    j
                }
            };
            flags.push(Flag { vertex, partner, weight, label: f.label.clone() });
        }
        let g = WGraph {
            profile,
            vertices: self.vertices.iter().map(|v| Vertex { genus: v.genus, class: CurveClass(v.beta.clone()) }).collect(),
            flags,
        };
        if let Some(v) = g.validate().first() {
            return Err(doc_err("flags", v.to_string()));
        }
        Ok(g)
    }
}

pub fn parse_graph(text: &str) -> Result<WGraph> {
    GraphDocument::parse(text)?.to_graph()
}

pub fn serialize_graph(g: &WGraph) -> String {
    GraphDocument::from_graph(g).to_text()
}

/// An isogeny as two graph documents plus index maps in document order:
/// `flag_inj[k]` is the source flag hit by target flag `k`, `vertex_surj[v]`
/// the target vertex of source vertex `v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsogenyDocument {
    pub source: GraphDocument,
    pub target: GraphDocument,
    pub flag_inj: Vec<usize>,
    pub vertex_surj: Vec<usize>,
}

impl IsogenyDocument {
    pub fn parse(text: &str) -> Result<IsogenyDocument> {
        serde_json::from_str(text).map_err(json_err)
    }

    pub fn from_isogeny(i: &Isogeny) -> IsogenyDocument {
        IsogenyDocument {
            source: GraphDocument::from_graph(&i.source),
            target: GraphDocument::from_graph(&i.target),
            flag_inj: i.flag_inj.clone(),
            vertex_surj: i.vertex_surj.clone(),
        }
    }

    pub fn to_isogeny(&self) -> Result<Isogeny> {
        let source = self.source.to_graph()?;
        let target = self.target.to_graph()?;
        if self.flag_inj.len() != target.flags.len() {
            return Err(doc_err("flag_inj", format!("{} entries for {} target flags", self.flag_inj.len(), target.flags.len())));
        }
        if self.vertex_surj.len() != source.vertices.len() {
            return Err(doc_err(
                "vertex_surj",
                format!("{} entries for {} source vertices", self.vertex_surj.len(), source.vertices.len()),
            ));
        }
        if let Some(k) = self.flag_inj.iter().position(|&f| f >= source.flags.len()) {
            return Err(doc_err(format!("flag_inj[{k}]"), format!("no source flag {}", self.flag_inj[k])));
        }
        if let Some(k) = self.vertex_surj.iter().position(|&v| v >= target.vertices.len()) {
            return Err(doc_err(format!("vertex_surj[{k}]"), format!("no target vertex {}", self.vertex_surj[k])));
        }
        Ok(Isogeny { source, target, flag_inj: self.flag_inj.clone(), vertex_surj: self.vertex_surj.clone() })
    }

    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }
}
