use super::*;
use crate::arith::Rational;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv: Vec<&str> = std::iter::once("wsm").chain(args.iter().copied()).collect();
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn temp_file(name: &str, body: &str) -> String {
    let dir = std::env::temp_dir().join(format!("wsm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn two_vertex() -> WGraph {
    let mut g = WGraph::new(TargetProfile::point());
    let a = g.add_vertex(0, CurveClass(vec![]));
    let b = g.add_vertex(0, CurveClass(vec![]));
    g.add_labeled_tail(a, Rational::one(), "1");
    g.add_labeled_tail(a, Rational::one(), "2");
    g.add_labeled_tail(b, Rational::one(), "3");
    g.add_labeled_tail(b, Rational::one(), "4");
    g.add_edge(a, b);
    g
}

#[test]
fn document_round_trip() {
    let mut g = two_vertex();
    g.flags[0].weight = Rational::new(1, 3);
    let text = serialize_graph(&g);
    assert!(text.contains("\"1/3\""));
    assert_eq!(parse_graph(&text).unwrap(), g);
    assert_eq!(serialize_graph(&parse_graph(&text).unwrap()), text);

    let mut doc = GraphDocument::from_graph(&g);
    doc.meta = Some(json!({ "name": "x", "tags": [1, 2] }));
    let t = doc.to_text();
    assert_eq!(GraphDocument::parse(&t).unwrap().to_text(), t);
}

#[test]
fn document_errors_are_positioned() {
    let g = two_vertex();
    let mut doc = GraphDocument::from_graph(&g);
    doc.flags[4].partner = Some(17);
    match doc.to_graph() {
        Err(Error::Document { path, message }) => {
            assert_eq!(path, "flags[4].partner");
            assert!(message.contains("17"));
        }
        other => panic!("{other:?}"),
    }

    let mut doc = GraphDocument::from_graph(&g);
    doc.flags[4].partner = Some(0);
    assert!(matches!(doc.to_graph(), Err(Error::Document { path, .. }) if path == "flags[4].partner"));

    let mut doc = GraphDocument::from_graph(&g);
    doc.flags[1].weight = "0.5".into();
    assert!(matches!(doc.to_graph(), Err(Error::Document { path, .. }) if path == "flags[1].weight"));

    let bad = GraphDocument::parse("{\"profile\": {\"dim_v\": 0, \"kappa\": []},\n \"vertices\": 3}");
    assert!(matches!(bad, Err(Error::Document { path, .. }) if path.starts_with("line 2")));
}

#[test]
fn command_examples() {
    let (code, out, _) = call(&["classify", "--from", "1,1,1", "--to", "3/5,3/5,3/5"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("isomorphism"));

    let (code, out, _) = call(&["--format", "json", "chambers", "--n", "2"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["count"], 2);

    let (code, out, _) = call(&["--format", "json", "path", "--from", "1,1,1", "--to", "2/5,2/5,2/5"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["breakpoints"].as_array().unwrap().len(), 1);
    assert_eq!(v["breakpoints"][0]["lambda"], "1/6");
    let (_, out, _) = call(&["path", "--from", "1,1,1", "--to", "2/5,2/5,2/5"]);
    assert!(out.starts_with("lambda 1/6"));
}

#[test]
fn exit_codes() {
    let (code, _, err) = call(&["classify", "--from", "1,1", "--to", "1,1,1"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error[mismatch]"));
    let (code, _, _) = call(&["frobnicate"]);
    assert_eq!(code, 1);
    let (code, _, err) = call(&["validate", "--graph", "/nonexistent/graph.json"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error[usage]"));
    let f = temp_file("dangling.json", &{
        let mut d = GraphDocument::from_graph(&two_vertex());
        d.flags[5].partner = Some(99);
        d.to_text()
    });
    let (code, _, err) = call(&["validate", "--graph", &f]);
    assert_eq!(code, 2);
    assert!(err.contains("error[document]") && err.contains("99"));
}

#[test]
fn graph_commands() {
    let f = temp_file("two.json", &serialize_graph(&two_vertex()));
    let (code, out, _) = call(&["validate", "--graph", &f]);
    assert_eq!(code, 0);
    assert!(out.starts_with("valid") && out.contains("vdim        0"));

    let (code, out, _) = call(&["reduce", "--graph", &f, "--to", "1,1,1/2,1/2"]);
    assert_eq!(code, 0);
    let g = parse_graph(&out).unwrap();
    assert_eq!(g.vertices.len(), 1);

    let (_, out, _) = call(&["cut", "--graph", &f, "--flag", "4"]);
    let cut = parse_graph(&out).unwrap();
    assert_eq!(cut.n_components(), 2);
    let cf = temp_file("cut.json", &out);
    let (_, out, _) = call(&["glue", "--graph", &cf, "--tail", "#4", "--other-tail", "#5"]);
    assert_eq!(parse_graph(&out).unwrap(), two_vertex());

    let mut light = two_vertex();
    light.flags[0].weight = Rational::new(1, 3);
    light.flags[1].weight = Rational::new(1, 2);
    let lf = temp_file("light.json", &serialize_graph(&light));
    let (code, out, _) = call(&["combine", "--graph", &lf, "--tails", "1,2"]);
    assert_eq!(code, 0);
    let merged = parse_graph(&out).unwrap();
    assert_eq!(merged.flags[merged.tail_with_label("1+2").unwrap()].weight, Rational::new(5, 6));
    let (code, _, err) = call(&["combine", "--graph", &f, "--tails", "1,2"]);
    assert_eq!(code, 2);
    assert!(err.contains("weight-overflow"));
    let (code, _, err) = call(&["combine", "--graph", &f, "--tails", "1,3"]);
    assert_eq!(code, 2);
    assert!(err.contains("not-colocated"));

    let (_, out, _) = call(&["forget", "--graph", &f, "--tail", "4"]);
    assert_eq!(parse_graph(&out).unwrap().vertices.len(), 1);

    let (_, out, _) = call(&["--format", "json", "stabilize", "--graph", &f]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["trace"].as_array().unwrap().len(), 0);

    let (_, out, _) = call(&["dot", "--graph", &f]);
    assert!(out.starts_with("graph G {"));
}

#[test]
fn strata_and_dimension_commands() {
    let (code, out, _) = call(&["--format", "json", "strata", "--weights", "1,1,1,1", "--max-edges", "1"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["count"], 4);
    for s in v["strata"].as_array().unwrap() {
        let doc: GraphDocument = serde_json::from_value(s["graph"].clone()).unwrap();
        assert_eq!(doc.to_graph().unwrap().edges().len() as u64, s["codim"].as_u64().unwrap());
    }
    let (_, out, _) = call(&["poset", "--weights", "1,1,1,1", "--dot"]);
    assert!(out.contains("label=\"0/1\"") && out.contains("label=\"1/0\""));
    assert_eq!(out.matches("->").count(), 3);

    let (_, out, _) = call(&["dim", "--profile", "P3", "--beta", "1"]);
    assert_eq!(out.trim(), "4");
    let (_, out, _) = call(&["gate", "--profile", "P3", "--beta", "1", "--weights", "1,1", "--insertions", "1:3,2:3"]);
    assert!(out.starts_with("passes"));
    let (_, out, _) = call(&["gate", "--profile", "P3", "--beta", "1", "--weights", "1,1", "--insertions", "1:3:1,2:3"]);
    assert!(out.starts_with("fails(+1)"));
    let (code, _, err) = call(&["gate", "--profile", "P3", "--beta", "1", "--weights", "1,1", "--insertions", "1:3,1:3"]);
    assert_eq!(code, 2);
    assert!(err.contains("duplicate-label"));
}

#[test]
fn walls_command() {
    let (_, out, _) = call(&["walls", "--weights", "1/2,1/2,1/3"]);
    assert!(out.contains("on walls {1,2}"));
    let (_, out, _) = call(&["--format", "json", "walls", "--weights", "1,1,1", "--between", "1/3,1/3,1/3"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["crossed"].as_array().unwrap().len(), 4);
}
