//! Canonical JSON encodings for graphs and reports.
//!
//! Graph files look like
//!
//! ```json
//! { "vertices": [ { "id": 0, "potential": "0" } ],
//!   "edges": [ { "id": 0, "u": 0, "v": 0, "w_re": "1", "w_im": "0" } ] }
//! ```
//!
//! Rationals are `"p/q"` or integer strings. A missing potential is 0. When no
//! edge carries `w_re` or `w_im` the weights are all 1 (plain adjacency);
//! otherwise every edge needs at least one part and an absent part is 0.
//! Output is canonical: records sorted by id, object keys sorted, rationals in
//! lowest terms.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::graph::{Multigraph, SchrodingerWeights};
use crate::number::{format_rational, parse_rational, GaussianRational, Rational};
use num::Zero;

#[derive(Deserialize)]
#[serde(untagged)]
enum RationalRepr {
    Text(String),
    Int(i64),
}

impl RationalRepr {
    fn parse(&self) -> Result<Rational> {
        match self {
            RationalRepr::Text(s) => parse_rational(s),
            RationalRepr::Int(i) => Ok(crate::number::rat(*i)),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexIn {
    id: usize,
    #[serde(default)]
    potential: Option<RationalRepr>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeIn {
    id: usize,
    u: usize,
    v: usize,
    #[serde(default)]
    w_re: Option<RationalRepr>,
    #[serde(default)]
    w_im: Option<RationalRepr>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphIn {
    vertices: Vec<VertexIn>,
    edges: Vec<EdgeIn>,
}

#[derive(Serialize)]
struct VertexOut {
    id: usize,
    potential: String,
}

#[derive(Serialize)]
struct EdgeOut {
    id: usize,
    u: usize,
    v: usize,
    w_re: String,
    w_im: String,
}

#[derive(Serialize)]
struct GraphOut {
    vertices: Vec<VertexOut>,
    edges: Vec<EdgeOut>,
}

/// Record positions sorted by id; ids must be exactly `0..len`.
fn dense_ids(ids: impl Iterator<Item = usize>, what: &str) -> Result<Vec<usize>> {
    let ids: Vec<usize> = ids.collect();
    let mut order: Vec<usize> = (0..ids.len()).collect();
    order.sort_by_key(|&i| ids[i]);
    if order.iter().enumerate().any(|(k, &i)| ids[i] != k) {
        return Err(Error::InvalidGraph(format!(
            "{what} ids must be distinct and dense in 0..{}",
            ids.len()
        )));
    }
    Ok(order)
}

pub fn graph_from_json(text: &str) -> Result<(Multigraph, SchrodingerWeights)> {
    let parsed: GraphIn = serde_json::from_str(text)?;
    let vorder = dense_ids(parsed.vertices.iter().map(|v| v.id), "vertex")?;
    let eorder = dense_ids(parsed.edges.iter().map(|e| e.id), "edge")?;
    let n = vorder.len();

    let mut potential = Vec::with_capacity(n);
    for &i in &vorder {
        potential.push(match &parsed.vertices[i].potential {
            Some(p) => p.parse()?,
            None => Rational::zero(),
        });
    }

    let weighted = parsed
        .edges
        .iter()
        .any(|e| e.w_re.is_some() || e.w_im.is_some());
    let mut pairs = Vec::with_capacity(eorder.len());
    let mut weights = Vec::with_capacity(eorder.len());
    for (id, &i) in eorder.iter().enumerate() {
        let e = &parsed.edges[i];
        pairs.push((e.u, e.v));
        let w = match (&e.w_re, &e.w_im) {
            (None, None) if weighted => return Err(Error::MissingWeight(id)),
            (None, None) => GaussianRational::from_ints(1, 0),
            (re, im) => GaussianRational::new(
                re.as_ref()
                    .map(RationalRepr::parse)
                    .transpose()?
                    .unwrap_or_else(Rational::zero),
                im.as_ref()
                    .map(RationalRepr::parse)
                    .transpose()?
                    .unwrap_or_else(Rational::zero),
            ),
        };
        weights.push(w);
    }
    let g = Multigraph::new(n, &pairs)?;
    let w = SchrodingerWeights::new(weights, potential)?;
    Ok((g, w))
}

pub fn graph_to_value(g: &Multigraph, w: &SchrodingerWeights) -> Value {
    let out = GraphOut {
        vertices: (0..g.vertex_count())
            .map(|v| VertexOut {
                id: v,
                potential: format_rational(w.potential(v)),
            })
            .collect(),
        edges: g
            .edges()
            .iter()
            .enumerate()
            .map(|(id, e)| EdgeOut {
                id,
                u: e.u,
                v: e.v,
                w_re: format_rational(&w.weight(id).re),
                w_im: format_rational(&w.weight(id).im),
            })
            .collect(),
    };
    serde_json::to_value(out).expect("graph serializes")
}

/// Canonical pretty-printed graph JSON (trailing newline included).
pub fn graph_to_json(g: &Multigraph, w: &SchrodingerWeights) -> String {
    to_canonical_string(&graph_to_value(g, w))
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_canonical_string(v: &Value) -> String {
    // serde_json's default map is ordered by key, so this is canonical.
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::ratio;

    #[test]
    fn defaults_and_canonical_output() {
        let text = r#"{"edges":[{"id":1,"u":1,"v":0,"w_re":"2/4"},{"id":0,"u":0,"v":1,"w_re":"1"}],
                       "vertices":[{"id":1,"potential":"-6/3"},{"id":0}]}"#;
        let (g, w) = graph_from_json(text).unwrap();
        assert_eq!(g.edge_pairs(), vec![(0, 1), (1, 0)]);
        assert_eq!(w.weight(0), &GaussianRational::from_ints(1, 0));
        assert_eq!(
            w.weight(1),
            &GaussianRational::new(ratio(1, 2), Rational::zero())
        );
        assert_eq!(w.potential(1), &ratio(-2, 1));
        let out = graph_to_json(&g, &w);
        assert!(out.contains("\"w_re\": \"1/2\""));
        assert!(out.contains("\"potential\": \"-2\""));
        let (g2, w2) = graph_from_json(&out).unwrap();
        assert_eq!((g, w), (g2, w2));
    }

    #[test]
    fn rejects_bad_inputs() {
        let sparse = r#"{"vertices":[{"id":0},{"id":2}],"edges":[]}"#;
        assert!(matches!(
            graph_from_json(sparse),
            Err(Error::InvalidGraph(_))
        ));
        let bad_rat = r#"{"vertices":[{"id":0,"potential":"1/0"}],"edges":[]}"#;
        assert!(matches!(
            graph_from_json(bad_rat),
            Err(Error::MalformedRational(_))
        ));
        let zero = r#"{"vertices":[{"id":0}],"edges":[{"id":0,"u":0,"v":0,"w_re":"0"}]}"#;
        assert!(matches!(graph_from_json(zero), Err(Error::ZeroWeight(0))));
        let dangling = r#"{"vertices":[{"id":0}],"edges":[{"id":0,"u":0,"v":3}]}"#;
        assert!(matches!(
            graph_from_json(dangling),
            Err(Error::InvalidGraph(_))
        ));
        let partial = r#"{"vertices":[{"id":0},{"id":1}],
                          "edges":[{"id":0,"u":0,"v":1,"w_re":"2"},{"id":1,"u":0,"v":1}]}"#;
        assert!(matches!(
            graph_from_json(partial),
            Err(Error::MissingWeight(1))
        ));
        assert!(matches!(graph_from_json("{"), Err(Error::Json(_))));
    }
}
