//! Graphviz output for weighted graphs.

use std::fmt::Write;

use super::WGraph;

pub fn to_dot(g: &WGraph) -> String {
    let mut s = String::from("graph G {\n  node [shape=circle];\n");
    for (v, vert) in g.vertices.iter().enumerate() {
        let _ = writeln!(s, "  v{v} [label=\"g={}, β={}\"];", vert.genus, vert.class);
    }
    for t in g.tails() {
        let f = &g.flags[t];
        let label = match &f.label {
            Some(l) => format!("{l}: w={}", f.weight),
            None => format!("w={}", f.weight),
        };
        let _ = writeln!(s, "  t{t} [shape=plaintext, label=\"{label}\"];");
        let _ = writeln!(s, "  v{} -- t{t};", f.vertex);
    }
    for (a, b) in g.edges() {
        let _ = writeln!(s, "  v{} -- v{};", g.flags[a].vertex, g.flags[b].vertex);
    }
    s.push_str("}\n");
    s
}
