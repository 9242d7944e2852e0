use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn obie(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_obie"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const PASSAGE: &str = "Shantiniketan at Prince Street offers excellent accommodation for the guests. \
    Comprising of 6 blocks and 56 deluxe rooms, Shantiniketan offers a decent stay along with \
    delectable delights of the Princess Café.";

#[test]
fn extract_then_query() {
    let dir = tempfile::tempdir().unwrap();
    let ttl = dir.path().join("g.ttl");
    let o = obie(&["extract", "corpus/train", "corpus/holdout", "-o", ttl.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stderr(&o).lines().filter(|l| l.contains(" a Hotel with ")).count(), 12);

    let q = obie(&[
        "query",
        ttl.to_str().unwrap(),
        "SELECT ?h ?d WHERE { ?h a :Hotel . ?h :distfromairport ?d }",
    ]);
    assert!(q.status.success(), "{}", stderr(&q));
    let out = stdout(&q);
    assert_eq!(out.lines().next(), Some("?h\t?d"));
    assert!(out.contains(":Marigold\t12.0"), "{out}");
    assert_eq!(out.lines().count(), 7);
}

#[test]
fn extract_is_byte_identical_across_modes() {
    let a = obie(&["extract", "corpus/train", "corpus/holdout"]);
    let b = obie(&["--sequential", "extract", "corpus/holdout", "corpus/train"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn single_document_views() {
    let dir = tempfile::tempdir().unwrap();
    let doc = write(dir.path(), "s.txt", PASSAGE);
    let doc = doc.to_str().unwrap();

    let t = obie(&["triples", doc]);
    assert_eq!(
        stdout(&t),
        "0: (Shantiniketan, offers, guests)\n1: (Shantiniketan, offers, delights)\n"
    );
    let th = obie(&["theme", doc]);
    assert_eq!(stdout(&th), "theme=Shantiniketan\nrelaxed=false\nsubjects=Shantiniketan\nmaxoccur=Shantiniketan\n");
    let d = obie(&["--format", "tsv", "domain", doc]);
    assert!(stdout(&d).starts_with("domain\thotel\nrule\tlexicon\n"), "{}", stdout(&d));
}

#[test]
fn sidecar_trees_drive_triples() {
    let dir = tempfile::tempdir().unwrap();
    let doc = write(dir.path(), "o.txt", "Oberoi is located in Bangalore");
    let trees = write(
        dir.path(),
        "o.trees",
        "(S (NP (NNP Oberoi)) (VP (VBZ is) (VP (VBN located) (PP (IN in) (NP (NNP Bangalore))))))\n",
    );
    let o = obie(&["--format", "tsv", "triples", doc.to_str().unwrap(), "--trees", trees.to_str().unwrap()]);
    assert_eq!(stdout(&o), "0\tOberoi\tlocated\tBangalore\n");

    let bad = write(dir.path(), "bad.trees", "(S (NP");
    let o = obie(&["triples", doc.to_str().unwrap(), "--trees", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("tree 1"), "{}", stderr(&o));
}

#[test]
fn eval_reports_and_lists_missing_documents() {
    let o = obie(&["eval", "corpus/train.gold", "corpus/train"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("Accuracy (Average) = 100.00%"));

    let dir = tempfile::tempdir().unwrap();
    let mut gold = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/train.gold")).unwrap();
    gold.push_str("\ndoc nowhere\ndomain hotel\ntheme Nowhere\nattr numrooms 3\n");
    let g = write(dir.path(), "g.gold", &gold);
    let o = obie(&["--format", "tsv", "eval", g.to_str().unwrap(), "corpus/train"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nowhere: no input document"));
    assert!(stdout(&o).contains("#average\t100.00"));
}

#[test]
fn eval_surfaces_a_disagreeing_printed_average() {
    let o = obie(&["eval", "corpus/holdout.gold", "corpus/holdout", "--expect-average", "97.00"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("note: recomputed average 97.22"), "{}", stdout(&o));
}

#[test]
fn input_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let rules = write(dir.path(), "r.rules", "medium numrooms \"[n] rooms\"\nsimple spa \"spa\"\n");
    let o = obie(&["--rules", rules.to_str().unwrap(), "extract", "corpus/train"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let unknown = write(dir.path(), "u.rules", "medium nosuch \"[n] rooms\"\n");
    let o = obie(&["--rules", unknown.to_str().unwrap(), "extract", "corpus/train"]);
    assert_eq!(o.status.code(), Some(1));

    let o = obie(&["--hint", "airport", "extract", "corpus/train"]);
    assert_eq!(o.status.code(), Some(1));

    let o = obie(&["extract", "no/such/file.txt"]);
    assert_eq!(o.status.code(), Some(1));

    let ttl = write(dir.path(), "g.ttl", "@prefix : <http://example.org/obie#> .\n:a :b :c .\n");
    let o = obie(&["query", ttl.to_str().unwrap(), "SELECT ?x WHERE { ?x :b }"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("column"), "{}", stderr(&o));
}

#[test]
fn empty_directory_gives_empty_graph() {
    let dir = tempfile::tempdir().unwrap();
    let o = obie(&["extract", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    assert!(!stdout(&o).contains(" a :"));
}

#[test]
fn derived_lexicons_match_the_bundled_ones() {
    for domain in ["hotel", "hospital"] {
        let o = obie(&[
            "--schema",
            &format!("data/{domain}.schema"),
            "lexicon",
            "derive",
            "--domain",
            domain,
            "--seed",
            &format!("data/{domain}-seed.lexicon"),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        let bundled = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("data/{domain}.lexicon"))).unwrap();
        assert_eq!(stdout(&o), bundled);
    }
}
