use std::path::Path;
use std::process::{Command, Output};

fn aspl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aspl")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(aspl(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(aspl(&["generate", "--model", "xyz", "--out", "g.txt"]).status.code(), Some(1));
    assert_eq!(aspl(&["--help"]).status.code(), Some(0));
    assert_eq!(aspl(&["--version"]).status.code(), Some(0));
}

#[test]
fn missing_input_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.csv");
    let result = aspl(&["measure", "--in", "/nonexistent/graph.txt", "--out", path(&out)]);
    assert_eq!(result.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn disconnected_input_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("g.txt");
    std::fs::write(&input, "0 1\n2 3\n").unwrap();
    let out = dir.path().join("o.csv");
    let result = aspl(&["optimize", "--in", path(&input), "--strategy", "degree", "--budget", "1", "--out", path(&out)]);
    assert_eq!(result.status.code(), Some(3));
    let result = aspl(&[
        "optimize", "--in", path(&input), "--lcc", "--strategy", "degree", "--budget", "1", "--out", path(&out),
    ]);
    // the LCC is a single edge, too small to optimize
    assert_eq!(result.status.code(), Some(3));
}

#[test]
fn generate_measure_optimize_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("ba.txt");
    let result = aspl(&["generate", "--model", "ba", "--n", "200", "--seed", "9", "--out", path(&graph)]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    assert!(String::from_utf8_lossy(&result.stderr).contains("\"seed\":9"));

    let measures = dir.path().join("m.csv");
    assert!(aspl(&["measure", "--in", path(&graph), "--h", "3", "--out", path(&measures)]).status.success());
    let text = std::fs::read_to_string(&measures).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("node_id,degree,betweenness,accessibility_h"));
    assert_eq!(lines.count(), 200);

    let trajectory = dir.path().join("t.csv");
    let args = [
        "optimize", "--in", path(&graph), "--strategy", "acc1", "--budget", "4", "--seed", "3", "--out", path(&trajectory),
    ];
    assert!(aspl(&args).status.success());
    let first = std::fs::read(&trajectory).unwrap();
    assert!(aspl(&args).status.success());
    assert_eq!(std::fs::read(&trajectory).unwrap(), first);

    let text = String::from_utf8(first).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 5);
    let aspl_after: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(aspl_after.windows(2).all(|w| w[1] <= w[0]));
    assert!(dir.path().join("t.csv.manifest.json").exists());
}

#[test]
fn waxman_coordinates_follow_the_lcc() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("wax.txt");
    let coords = dir.path().join("xy.csv");
    let result = aspl(&[
        "generate", "--model", "wax", "--n", "600", "--seed", "2", "--lcc", "--out", path(&graph), "--coords-out",
        path(&coords),
    ]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let g = aspl_core::load_edge_list(&graph).unwrap();
    let rows = std::fs::read_to_string(&coords).unwrap().lines().count() - 1;
    assert_eq!(rows, g.node_count());
}

#[test]
fn ingest_airports_writes_lcc() {
    let dir = tempfile::tempdir().unwrap();
    let routes = dir.path().join("routes.dat");
    std::fs::write(
        &routes,
        "AA,1,JFK,1,LAX,2,,0,738\nAA,1,LAX,2,JFK,1,,0,738\nAA,1,LAX,2,SFO,3,,0,738\nBB,2,CDG,4,ORY,5,,0,320\nbroken\n",
    )
    .unwrap();
    let out = dir.path().join("air.txt");
    let labels = dir.path().join("labels.csv");
    let result = aspl(&["ingest-airports", "--routes", path(&routes), "--out", path(&out), "--labels-out", path(&labels)]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let g = aspl_core::load_edge_list(&out).unwrap();
    assert_eq!((g.node_count(), g.edge_count()), (3, 2));
    assert_eq!(std::fs::read_to_string(&labels).unwrap().lines().count(), 4);

    let strict = aspl(&["ingest-airports", "--routes", path(&routes), "--strict", "--out", path(&out)]);
    assert_eq!(strict.status.code(), Some(2));
}
