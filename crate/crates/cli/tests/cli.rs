use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn dforest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dforest")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

struct Work {
    dir: TempDir,
}

impl Work {
    fn new() -> Self {
        Work { dir: TempDir::new().unwrap() }
    }

    fn file(&self, name: &str, body: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        fs::write(&p, body).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const TWO_CYCLES: &str = "0 1\n1 2\n2 0\n3 4\n4 5\n5 3\n";
const JOINED: &str = "0 1\n1 2\n2 0\n3 4\n4 5\n5 3\n2 3\n";

fn build(w: &Work, graph: &Path, name: &str, method: &str) -> PathBuf {
    let out = w.path(name);
    let o = dforest(&["build", "--graph", s(graph), "--out", s(&out), "--method", method]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn random_edges(n: u32, m: usize, seed: u64) -> String {
    // small LCG, enough for a deterministic test graph
    let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut out = String::new();
    for _ in 0..m {
        x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let u = (x >> 33) as u32 % n;
        x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let v = (x >> 33) as u32 % n;
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

#[test]
fn query_two_cycles() {
    let w = Work::new();
    let g = w.file("g.txt", TWO_CYCLES);
    let idx = build(&w, &g, "g.idx", "bottomup");
    let o = dforest(&["query", "--index", s(&idx), "--q", "0", "--k", "1", "--l", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().next(), Some("0 1 2"));

    let o = dforest(&["query", "--index", s(&idx), "--q", "4", "--k", "2", "--l", "0"]);
    assert_eq!(stdout(&o).lines().next(), Some("(empty)"));

    let o = dforest(&["query", "--index", s(&idx), "--q", "0", "--k", "1", "--l", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["size"], 3);
    assert_eq!(v["community"], serde_json::json!(["0", "1", "2"]));
}

#[test]
fn unknown_vertex_exits_3() {
    let w = Work::new();
    let g = w.file("g.txt", TWO_CYCLES);
    let idx = build(&w, &g, "g.idx", "bottomup");
    let o = dforest(&["query", "--index", s(&idx), "--q", "nope", "--k", "1", "--l", "1"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn strongly_connected_query_splits_joined_cycles() {
    let w = Work::new();
    let g = w.file("g.txt", JOINED);
    let idx = build(&w, &g, "g.idx", "bottomup");
    let o = dforest(&["query", "--index", s(&idx), "--q", "0", "--k", "1", "--l", "1"]);
    assert_eq!(stdout(&o).lines().next(), Some("0 1 2 3 4 5"));
    let o = dforest(&["query", "--index", s(&idx), "--q", "0", "--k", "1", "--l", "1", "--scsd", "--graph", s(&g)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().next(), Some("0 1 2"));
    let o = dforest(&["query", "--index", s(&idx), "--q", "4", "--k", "1", "--l", "1", "--scsd", "--graph", s(&g)]);
    assert_eq!(stdout(&o).lines().next(), Some("3 4 5"));
}

#[test]
fn builders_write_identical_files() {
    let w = Work::new();
    for (i, body) in [TWO_CYCLES.to_string(), JOINED.to_string(), random_edges(60, 400, 7)].iter().enumerate() {
        let g = w.file(&format!("g{i}.txt"), body);
        let a = build(&w, &g, &format!("a{i}.idx"), "topdown");
        let b = build(&w, &g, &format!("b{i}.idx"), "bottomup");
        assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap(), "graph {i}");
    }
}

#[test]
fn corrupt_index_exits_2() {
    let w = Work::new();
    let g = w.file("g.txt", TWO_CYCLES);
    let idx = build(&w, &g, "g.idx", "bottomup");
    let mut bytes = fs::read(&idx).unwrap();
    bytes[0] ^= 0x40;
    fs::write(&idx, &bytes).unwrap();
    let o = dforest(&["query", "--index", s(&idx), "--q", "0", "--k", "1", "--l", "1"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("code 1"));

    bytes[0] ^= 0x40;
    bytes.truncate(bytes.len() - 3);
    fs::write(&idx, &bytes).unwrap();
    let o = dforest(&["dump", "--index", s(&idx)]);
    assert_eq!(code(&o), 2);

    let o = dforest(&["query", "--index", s(&w.path("missing.idx")), "--q", "0", "--k", "1", "--l", "1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn maintain_insert_on_path_matches_rebuild() {
    let w = Work::new();
    let g = w.file("path.txt", "0 1\n1 2\n");
    let idx = build(&w, &g, "path.idx", "bottomup");
    let ops = w.file("ops.txt", "+ 2 0\n");
    let out = w.path("after.idx");
    let graph_out = w.path("after.txt");
    let o = dforest(&[
        "maintain", "--index", s(&idx), "--graph", s(&g), "--ops", s(&ops),
        "--check-rebuild", "--out", s(&out), "--graph-out", s(&graph_out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = dforest(&["query", "--index", s(&out), "--q", "1", "--k", "1", "--l", "1"]);
    assert_eq!(stdout(&o).lines().next(), Some("0 1 2"));

    let fresh = build(&w, &graph_out, "fresh.idx", "topdown");
    assert_eq!(fs::read(fresh).unwrap(), fs::read(out).unwrap());
}

#[test]
fn malformed_update_stream_persists_nothing() {
    let w = Work::new();
    let g = w.file("g.txt", TWO_CYCLES);
    let idx = build(&w, &g, "g.idx", "bottomup");
    let before = fs::read(&idx).unwrap();
    let ops = w.file("ops.txt", "+ 0 3\n+ 1\n");
    let o = dforest(&["maintain", "--index", s(&idx), "--graph", s(&g), "--ops", s(&ops)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert_eq!(fs::read(&idx).unwrap(), before);
}

#[test]
fn maintain_handles_vertex_churn_in_place() {
    let w = Work::new();
    let g = w.file("g.txt", &random_edges(40, 200, 3));
    let idx = build(&w, &g, "g.idx", "bottomup");
    let ops = w.file("ops.txt", "# churn\n+v x\n+ x 0\n+ 0 x\n-v 5\n- 0 x\n+ 7 8\n-v x\n");
    let o = dforest(&["maintain", "--index", s(&idx), "--graph", s(&g), "--ops", s(&ops), "--check-rebuild"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("op ")).count(), 7);
    let o = dforest(&["query", "--index", s(&idx), "--q", "5", "--k", "0", "--l", "0"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn bench_with_no_queries_prints_header_only() {
    let w = Work::new();
    let g = w.file("g.txt", TWO_CYCLES);
    let o = dforest(&["bench", "--graph", s(&g), "--queries", "0"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "query,size,idx_us,oracle_us,nodes_visited\n");
}

#[test]
fn bench_is_seeded() {
    let w = Work::new();
    let g = w.file("g.txt", &random_edges(300, 3000, 11));
    let run = |seed: &str| {
        let o = dforest(&["bench", "--graph", s(&g), "--queries", "25", "--k", "3", "--seed", seed]);
        assert_eq!(code(&o), 0);
        let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
        rdr.records()
            .map(|r| {
                let r = r.unwrap();
                // timings vary; the queries and their answers must not
                (r[0].to_string(), r[1].to_string(), r[4].to_string())
            })
            .collect::<Vec<_>>()
    };
    let a = run("5");
    assert_eq!(a.len(), 25);
    assert_eq!(a, run("5"));
    assert_ne!(a, run("6"));
}

#[test]
fn bench_falls_back_when_core_is_empty() {
    let w = Work::new();
    let g = w.file("g.txt", TWO_CYCLES);
    let o = dforest(&["bench", "--graph", s(&g), "--queries", "4", "--k", "8"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    assert_eq!(stdout(&o).lines().count(), 5);
}

#[test]
fn verify_passes_on_small_graphs() {
    let w = Work::new();
    let tri = w.file("tri.txt", "a b\nb c\nc a\n");
    let idx = build(&w, &tri, "tri.idx", "topdown");
    let o = dforest(&["verify", "--graph", s(&tri), "--index", s(&idx)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("PASS"));

    for seed in 0..30 {
        let g = w.file(&format!("r{seed}.txt"), &random_edges(40 + 5 * seed as u32, 300, seed));
        let o = dforest(&["verify", "--graph", s(&g)]);
        assert_eq!(code(&o), 0, "seed {seed}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn verify_rejects_a_stale_index() {
    let w = Work::new();
    let g = w.file("g.txt", TWO_CYCLES);
    let other = w.file("h.txt", JOINED);
    let idx = build(&w, &other, "h.idx", "bottomup");
    let o = dforest(&["verify", "--graph", s(&g), "--index", s(&idx)]);
    assert_eq!(code(&o), 4);
}

#[test]
fn gzip_input_and_json_build_summary() {
    use std::io::Write;
    let w = Work::new();
    let p = w.path("g.txt.gz");
    let mut enc = flate2::write::GzEncoder::new(fs::File::create(&p).unwrap(), flate2::Compression::default());
    enc.write_all(TWO_CYCLES.as_bytes()).unwrap();
    enc.finish().unwrap();
    let out = w.path("g.idx");
    let o = dforest(&["build", "--graph", s(&p), "--out", s(&out), "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["n"], 6);
    assert_eq!(v["m"], 6);
    assert_eq!(v["kmax"], 1);
}

#[test]
fn verify_on_bit_flipped_index_exits_2() {
    let w = Work::new();
    let g = w.file("g.txt", TWO_CYCLES);
    let idx = build(&w, &g, "g.idx", "bottomup");
    let mut bytes = fs::read(&idx).unwrap();
    bytes[5] ^= 0x01;
    fs::write(&idx, &bytes).unwrap();
    let o = dforest(&["verify", "--graph", s(&g), "--index", s(&idx)]);
    assert_eq!(code(&o), 2);
}

#[test]
fn maintain_long_stream_matches_rebuild() {
    let w = Work::new();
    let g = w.file("g.txt", &random_edges(80, 500, 21));
    let idx = build(&w, &g, "g.idx", "bottomup");
    let mut ops = String::new();
    let mut inserted = Vec::new();
    for (i, line) in random_edges(80, 1000, 99).lines().enumerate() {
        // every third op deletes an edge inserted earlier so deletions do real work
        match inserted.pop() {
            Some(old) if i % 3 == 0 => ops.push_str(&format!("- {old}\n")),
            prev => {
                inserted.extend(prev);
                ops.push_str(&format!("+ {line}\n"));
                inserted.push(line.to_string());
            }
        }
    }
    let ops = w.file("ops.txt", &ops);
    let o = dforest(&["maintain", "--index", s(&idx), "--graph", s(&g), "--ops", s(&ops), "--check-rebuild"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("1000 updates"));
}
