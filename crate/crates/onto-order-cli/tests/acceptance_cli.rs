//! CLI acceptance: golden outputs for the fixtures, exit-code contract, and
//! criterion 7 (byte-identical outputs at any thread count).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use onto_order::ingest::render_tsv;
use onto_order::oracle;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_onto-order")
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn write_g1(dir: &Path) -> PathBuf {
    let path = dir.join("g1.tsv");
    fs::write(&path, oracle::fixture_g1_tsv()).unwrap();
    path
}

#[test]
fn census_golden_on_g1() {
    let dir = tmp_dir("census");
    let g1 = write_g1(&dir);
    let csv = stdout_of(&["census", "-i", g1.to_str().unwrap()]);
    assert_eq!(
        csv,
        "definition,count\ninstance,7\nsubsuper,4\nclassclass,0\nany,9\n"
    );
}

#[test]
fn min_order_golden_on_g1() {
    let dir = tmp_dir("min-order");
    let g1 = write_g1(&dir);
    let csv = stdout_of(&[
        "min-order",
        "-i",
        g1.to_str().unwrap(),
        "--def",
        "instance",
        "--max-level",
        "4",
    ]);
    assert_eq!(csv, "level,count\n1,7\n2,5\n3,4\n4,3\n");
}

#[test]
fn split_order_and_loops_golden_on_g1() {
    let dir = tmp_dir("split-loops");
    let g1 = write_g1(&dir);
    let pairs = stdout_of(&["split-order", "-i", g1.to_str().unwrap(), "--raw"]);
    assert_eq!(pairs, "c,s,case\nQ5,Q5,self\nQ11,Q1,C\n");
    // One round of exclusion removes nothing on G1.
    let reduced = stdout_of(&["split-order", "-i", g1.to_str().unwrap()]);
    assert_eq!(reduced, "c,s,case\nQ5,Q5,self\nQ11,Q1,C\n");
    let loops = stdout_of(&["loops", "-i", g1.to_str().unwrap()]);
    assert_eq!(
        loops,
        "kind,members,edges\nself-direct,Q5,Q5 P31 Q5\ntwo-hop,Q6;Q7,Q6 P31 Q7;Q7 P31 Q6\n"
    );
}

#[test]
fn orders_golden_on_g2() {
    let dir = tmp_dir("orders");
    let g2 = dir.join("g2.tsv");
    fs::write(&g2, oracle::fixture_g2_tsv()).unwrap();
    let conflicts = stdout_of(&["orders", "-i", g2.to_str().unwrap(), "--conflicts-only"]);
    assert_eq!(
        conflicts,
        "entity,orders,witness\nQ903,1;2,Q903-P31->Q24017414@2;Q903-P31->Q24017465@3\n"
    );
}

#[test]
fn exit_codes() {
    // No arguments: usage error.
    let out = run(&[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    // Unreadable input: data error.
    let out = run(&["census", "-i", "/nonexistent/graph.tsv"]);
    assert_eq!(out.status.code(), Some(2));
    // Bad flag combination: usage error.
    let dir = tmp_dir("exit-codes");
    let g1 = write_g1(&dir);
    let out = run(&["min-order", "-i", g1.to_str().unwrap(), "--max-level", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn ntriples_ingest_matches_tsv() {
    let dir = tmp_dir("nt");
    let g1 = write_g1(&dir);
    let nt = dir.join("g1.nt");
    let mut text = String::new();
    for e in oracle::fixture_g1_edges() {
        text.push_str(&format!(
            "<http://www.wikidata.org/entity/{}> <http://www.wikidata.org/prop/direct/{}> <http://www.wikidata.org/entity/{}> .\n",
            e.subject, e.kind, e.object
        ));
    }
    // A label and an ignorable triple round out the format.
    text.push_str("<http://www.wikidata.org/entity/Q5> <http://www.w3.org/2000/01/rdf-schema#label> \"self-typed\"@en .\n");
    text.push_str("<http://www.wikidata.org/entity/Q5> <http://www.wikidata.org/prop/direct/P50> <http://www.wikidata.org/entity/Q1> .\n");
    fs::write(&nt, text).unwrap();

    let from_nt = stdout_of(&["census", "-i", nt.to_str().unwrap()]);
    let from_tsv = stdout_of(&["census", "-i", g1.to_str().unwrap()]);
    assert_eq!(from_nt, from_tsv);
}

#[test]
fn emit_fixes_pipeline() {
    let dir = tmp_dir("emit-fixes");
    let g1 = write_g1(&dir);
    let loops_csv = dir.join("loops.csv");
    let out = run(&[
        "loops",
        "-i",
        g1.to_str().unwrap(),
        "-o",
        loops_csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let batch = stdout_of(&[
        "emit-fixes",
        "--loops",
        loops_csv.to_str().unwrap(),
        "-i",
        g1.to_str().unwrap(),
    ]);
    assert_eq!(batch, "-Q5\tP31\tQ5\n-Q6\tP31\tQ7\n");

    let keep = dir.join("keep.txt");
    fs::write(&keep, "Q5\nQ6\nQ7\n").unwrap();
    let batch = stdout_of(&[
        "emit-fixes",
        "--loops",
        loops_csv.to_str().unwrap(),
        "--keep",
        keep.to_str().unwrap(),
    ]);
    assert_eq!(batch, "");
}

#[test]
fn diff_golden() {
    let dir = tmp_dir("diff");
    let a = dir.join("a.txt");
    let b = dir.join("b.txt");
    fs::write(&a, "Q1\nQ3\nQ100\n").unwrap();
    fs::write(&b, "Q3\nQ5\n").unwrap();
    let csv = stdout_of(&["diff", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(
        csv,
        "which,entity\nonly_a,Q1\nonly_a,Q100\nonly_b,Q5\nboth,Q3\n"
    );
}

#[test]
fn metaclass_findings_flow() {
    let dir = tmp_dir("metaclass");
    let g2 = dir.join("g2.tsv");
    fs::write(&g2, oracle::fixture_g2_tsv()).unwrap();
    let edges = dir.join("meta.tsv");
    fs::write(&edges, "Q901\tP8225\tQ902\n").unwrap();
    let findings = dir.join("findings.csv");
    let out = run(&[
        "orders",
        "-i",
        g2.to_str().unwrap(),
        "--metaclass-edges",
        edges.to_str().unwrap(),
        "--metaclass-out",
        findings.to_str().unwrap(),
        "-o",
        dir.join("orders.csv").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = fs::read_to_string(&findings).unwrap();
    assert!(csv.contains("Q901,P8225,Q902,violation"));
}

/// Criterion 7: identical inputs and argv produce byte-identical outputs at
/// any thread count.
#[test]
fn criterion_7_determinism_across_thread_counts() {
    let dir = tmp_dir("determinism");
    let input = dir.join("medium.tsv");
    let spec = oracle::ScaleSpec::bench(1000);
    let edges = oracle::scale_edges(&spec);
    let mut labels = rustc_hash::FxHashMap::default();
    labels.insert(
        onto_order::ids::q(1),
        "the first class, with a \"quoted, comma\" label".to_owned(),
    );
    fs::write(&input, render_tsv(&edges, &labels)).unwrap();

    let mut reference: Option<Vec<(String, Vec<u8>)>> = None;
    for threads in ["1", "2", "8"] {
        let out_dir = dir.join(format!("out-{threads}"));
        let out = run(&[
            "all",
            "-i",
            input.to_str().unwrap(),
            "-o",
            out_dir.to_str().unwrap(),
            "--threads",
            threads,
        ]);
        assert!(
            out.status.success(),
            "all --threads {threads}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(&out_dir)
            .unwrap()
            .map(|entry| {
                let entry = entry.unwrap();
                (
                    entry.file_name().to_string_lossy().into_owned(),
                    fs::read(entry.path()).unwrap(),
                )
            })
            .collect();
        files.sort();
        assert!(files.len() >= 10, "expected the full report set");
        match &reference {
            None => reference = Some(files),
            Some(expected) => {
                for ((name_a, bytes_a), (name_b, bytes_b)) in expected.iter().zip(&files) {
                    assert_eq!(name_a, name_b);
                    assert_eq!(
                        bytes_a, bytes_b,
                        "{name_a} differs between thread counts"
                    );
                }
                assert_eq!(expected.len(), files.len());
            }
        }
    }

    // Repeated stdout invocations are byte-identical too.
    let first = stdout_of(&["split-order", "-i", input.to_str().unwrap(), "--threads", "1"]);
    let second = stdout_of(&["split-order", "-i", input.to_str().unwrap(), "--threads", "8"]);
    assert_eq!(first, second);
    println!("criterion 7 PASS: byte-identical outputs at thread counts 1, 2, 8");
}

/// The full repair workflow: detect loops, emit the batch, apply it to the
/// dump, and show the high-minimum-order classes disappearing via `diff`.
#[test]
fn loop_fix_workflow_reduces_min_order() {
    let dir = tmp_dir("workflow");
    let g = dir.join("g.tsv");
    // Q1 ∈ Q2 ∈ Q3, and Q3 is an instance of itself, so Q3 saturates every
    // minimum-order level.
    fs::write(&g, "Q1\tP31\tQ2\nQ2\tP31\tQ3\nQ3\tP31\tQ3\n").unwrap();
    let gs = g.to_str().unwrap();

    let before = stdout_of(&["min-order", "-i", gs, "--def", "instance", "--members", "6"]);
    assert_eq!(before, "entity,level,label\nQ3,6,\n");

    let members = stdout_of(&["loops", "-i", gs, "--members-only"]);
    assert_eq!(members, "member\nQ3\n");
    let seeds = dir.join("members.txt");
    fs::write(&seeds, &members).unwrap();
    let affected = stdout_of(&["loops", "-i", gs, "--affected", "--seeds", seeds.to_str().unwrap()]);
    assert_eq!(affected, "class,label\nQ3,\n");

    let loops_csv = dir.join("loops.csv");
    fs::write(&loops_csv, stdout_of(&["loops", "-i", gs])).unwrap();
    let batch = stdout_of(&["emit-fixes", "--loops", loops_csv.to_str().unwrap(), "-i", gs]);
    assert_eq!(batch, "-Q3\tP31\tQ3\n");

    // Apply the batch: drop the removed statements from the dump.
    let removed: Vec<String> = batch
        .lines()
        .filter_map(|l| l.strip_prefix('-'))
        .map(str::to_owned)
        .collect();
    let fixed: String = fs::read_to_string(&g)
        .unwrap()
        .lines()
        .filter(|line| !removed.iter().any(|r| r == line))
        .map(|line| format!("{line}\n"))
        .collect();
    let g2 = dir.join("g-fixed.tsv");
    fs::write(&g2, fixed).unwrap();

    let after = stdout_of(&[
        "min-order",
        "-i",
        g2.to_str().unwrap(),
        "--def",
        "instance",
        "--members",
        "6",
    ]);
    assert_eq!(after, "entity,level,label\n");

    let before_path = dir.join("before.csv");
    let after_path = dir.join("after.csv");
    fs::write(&before_path, &before).unwrap();
    fs::write(&after_path, &after).unwrap();
    let d = stdout_of(&[
        "diff",
        before_path.to_str().unwrap(),
        after_path.to_str().unwrap(),
    ]);
    assert_eq!(d, "which,entity\nonly_a,Q3\n");
}

/// The spill path produces the same raw pair stream as the in-memory path.
#[test]
fn spill_matches_in_memory() {
    let dir = tmp_dir("spill");
    let g1 = write_g1(&dir);
    let in_memory = stdout_of(&["split-order", "-i", g1.to_str().unwrap(), "--raw"]);
    let spill_dir = dir.join("runs");
    let spilled = stdout_of(&[
        "split-order",
        "-i",
        g1.to_str().unwrap(),
        "--raw",
        "--spill-dir",
        spill_dir.to_str().unwrap(),
        "--spill-run-size",
        "1",
    ]);
    assert_eq!(in_memory, spilled);
}
