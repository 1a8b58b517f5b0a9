//! End-to-end coverage of the command layer and every external file
//! surface: dataset CSV, index container, batch result stream, stats CSV,
//! and the contour SVG.

use std::fs;
use std::path::PathBuf;

use mrtop::cli::{
    cmd_batch, cmd_build, cmd_contours, cmd_dump, cmd_gen, cmd_prep, cmd_stats,
    format_result_line, BatchConfig, BatchMode, CliError,
};
use mrtop::index::deserialize_index;
use mrtop::ingest::{gen_synthetic, load_csv, write_csv, Distribution};

struct TempDir(PathBuf);

impl TempDir {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!(
            "mrtop-test-{tag}-{}-{}",
            std::process::id(),
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .unwrap()
                .as_nanos()
        ));
        fs::create_dir_all(&dir).unwrap();
        TempDir(dir)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

fn write_dataset(dir: &TempDir, name: &str, n: usize, dist: Distribution, seed: u64) -> PathBuf {
    let d = gen_synthetic(n, dist, seed).unwrap();
    let path = dir.path(name);
    write_csv(&d, &path).unwrap();
    path
}

#[test]
fn build_report_and_reloadable_index() {
    let dir = TempDir::new("build");
    let input = write_dataset(&dir, "d.csv", 1000, Distribution::Uniform, 7);
    let out = dir.path("d.idx");
    let report = cmd_build(&input, 3, 0.5, &out, true).unwrap();
    assert_eq!(report.n, 1000);
    assert!(report.hull >= 2);
    assert!(report.pruned <= report.n);
    assert!(report.vertices >= report.hull);

    let idx = deserialize_index(fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(idx.k, 3);
    assert_eq!(idx.tau, 0.5);
    assert_eq!(idx.hull.len(), report.hull);
    // pockets observed on this dataset respect the nominal 2k-1 budget
    assert!(idx.concavities.iter().all(|c| c.len() <= 5));

    let dump = cmd_dump(&out).unwrap();
    assert!(dump.starts_with("k-polygon index: k=3 tau=0.5"));
    assert_eq!(
        dump.matches("\nhull[").count(),
        report.hull,
        "one dump row per hull vertex"
    );
}

#[test]
fn build_is_byte_identical_across_runs() {
    let dir = TempDir::new("det");
    let input = write_dataset(&dir, "d.csv", 400, Distribution::Anticorrelated, 21);
    let a = dir.path("a.idx");
    let b = dir.path("b.idx");
    cmd_build(&input, 4, 0.5, &a, true).unwrap();
    cmd_build(&input, 4, 0.5, &b, true).unwrap();
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn build_rejects_k_beyond_dataset() {
    let dir = TempDir::new("badk");
    let input = write_dataset(&dir, "d.csv", 5, Distribution::Uniform, 1);
    let err = cmd_build(&input, 9, 0.5, &dir.path("x.idx"), true).unwrap_err();
    assert_eq!(err.exit_code(), 4);
}

fn batch_cfg(mode: BatchMode, queries: PathBuf) -> BatchConfig {
    BatchConfig {
        mode,
        queries,
        index: None,
        input: None,
        k: 1,
        tau: None,
        strict: true,
        shuffle: None,
        workers: 2,
    }
}

fn parse_stream_line(line: &str) -> (String, Vec<(f64, f64)>) {
    let (id, rest) = line.split_once(';').unwrap();
    let intervals = rest
        .split(';')
        .filter(|s| !s.is_empty())
        .map(|part| {
            let fields: Vec<&str> = part.split(',').collect();
            (fields[0].parse().unwrap(), fields[1].parse().unwrap())
        })
        .collect();
    (id.to_string(), intervals)
}

#[test]
fn batch_modes_produce_matching_streams() {
    let dir = TempDir::new("batch");
    let input = write_dataset(&dir, "d.csv", 600, Distribution::Correlated, 33);
    let queries = write_dataset(&dir, "q.csv", 40, Distribution::Uniform, 34);
    let index_path = dir.path("d.idx");
    cmd_build(&input, 5, 0.5, &index_path, true).unwrap();

    let mut cfg = batch_cfg(BatchMode::Index, queries.clone());
    cfg.index = Some(index_path);
    cfg.k = 5;
    let (via_index, timing) = cmd_batch(&cfg).unwrap();
    assert_eq!(timing.queries, 40);

    let mut cfg = batch_cfg(BatchMode::Oracle, queries.clone());
    cfg.input = Some(input.clone());
    cfg.k = 5;
    let (via_oracle, _) = cmd_batch(&cfg).unwrap();

    let mut cfg = batch_cfg(BatchMode::Wang, queries);
    cfg.input = Some(input);
    cfg.k = 5;
    cfg.shuffle = Some(77); // baselines are order-sensitive; results must not be
    let (via_wang, _) = cmd_batch(&cfg).unwrap();

    assert_eq!(via_index.len(), via_oracle.len());
    assert_eq!(via_index.len(), via_wang.len());
    for i in 0..via_index.len() {
        let (ia, ra) = &via_index[i];
        let (ib, rb) = &via_oracle[i];
        let (ic, rc) = &via_wang[i];
        assert_eq!(ia, ib);
        assert_eq!(ia, ic);
        let la = format_result_line(ia, ra);
        let lb = format_result_line(ib, rb);
        let lc = format_result_line(ic, rc);
        let (_, xs) = parse_stream_line(&la);
        let (_, ys) = parse_stream_line(&lb);
        let (_, zs) = parse_stream_line(&lc);
        assert_eq!(xs.len(), ys.len(), "{la} vs {lb}");
        assert_eq!(xs.len(), zs.len(), "{la} vs {lc}");
        for ((x, y), z) in xs.iter().zip(ys.iter()).zip(zs.iter()) {
            assert!((x.0 - y.0).abs() < 1e-9 && (x.1 - y.1).abs() < 1e-9);
            assert!((x.0 - z.0).abs() < 1e-9 && (x.1 - z.1).abs() < 1e-9);
        }
    }
}

#[test]
fn batch_empty_query_file_gives_empty_stream() {
    let dir = TempDir::new("empty");
    let input = write_dataset(&dir, "d.csv", 50, Distribution::Uniform, 2);
    let queries = dir.path("q.csv");
    fs::write(&queries, "id,a1,a2\n").unwrap();
    let mut cfg = batch_cfg(BatchMode::Oracle, queries);
    cfg.input = Some(input);
    let (results, timing) = cmd_batch(&cfg).unwrap();
    assert!(results.is_empty());
    assert_eq!(timing.queries, 0);
}

#[test]
fn batch_detects_tau_mismatch() {
    let dir = TempDir::new("tau");
    let input = write_dataset(&dir, "d.csv", 80, Distribution::Uniform, 3);
    let queries = write_dataset(&dir, "q.csv", 3, Distribution::Uniform, 4);
    let index_path = dir.path("d.idx");
    cmd_build(&input, 2, 0.5, &index_path, true).unwrap();
    let mut cfg = batch_cfg(BatchMode::Index, queries);
    cfg.index = Some(index_path);
    cfg.tau = Some(1.0);
    let err = cmd_batch(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 5);
}

#[test]
fn batch_missing_files_are_reported() {
    let dir = TempDir::new("missing");
    let queries = write_dataset(&dir, "q.csv", 3, Distribution::Uniform, 4);
    let mut cfg = batch_cfg(BatchMode::Index, queries);
    cfg.index = Some(dir.path("nope.idx"));
    assert!(cmd_batch(&cfg).is_err());
}

#[test]
fn stats_csv_shape_and_determinism() {
    let dir = TempDir::new("stats");
    let input = write_dataset(&dir, "d.csv", 300, Distribution::Anticorrelated, 9);
    let out_a = dir.path("a.csv");
    let out_b = dir.path("b.csv");
    let rows = cmd_stats(&input, (1, 10), 0.5, &out_a).unwrap();
    cmd_stats(&input, (1, 10), 0.5, &out_b).unwrap();
    assert_eq!(fs::read(&out_a).unwrap(), fs::read(&out_b).unwrap());

    let text = fs::read_to_string(&out_a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,ch,ds"));
    let parsed: Vec<(usize, usize, usize)> = lines
        .map(|l| {
            let f: Vec<usize> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (f[0], f[1], f[2])
        })
        .collect();
    assert_eq!(parsed, rows);
    assert_eq!(parsed.len(), 10);
    for (k, ch, ds) in parsed {
        assert!(ch >= 2);
        assert!(ds >= ch);
        assert!(ds <= (2 * k - 1) * ch, "k={k}: ds={ds} ch={ch}");
    }
}

#[test]
fn stats_on_single_tuple_dataset() {
    let dir = TempDir::new("stats1");
    let input = dir.path("one.csv");
    fs::write(&input, "id,a1,a2\nsolo,0.4,0.7\n").unwrap();
    let rows = cmd_stats(&input, (1, 1), 0.5, &dir.path("s.csv")).unwrap();
    assert_eq!(rows, vec![(1, 2, 2)]);
}

#[test]
fn contours_svg_structure() {
    let dir = TempDir::new("svg");
    let input = write_dataset(&dir, "d.csv", 200, Distribution::Anticorrelated, 12);
    let out = dir.path("c.svg");
    let svg = cmd_contours(&input, (1, 4), 0.5, &out, true).unwrap();
    assert_eq!(svg, fs::read_to_string(&out).unwrap());
    assert_eq!(svg.matches("<polyline").count(), 8); // 4 contours + 4 hulls
    let plain = cmd_contours(&input, (1, 4), 0.5, &out, false).unwrap();
    assert_eq!(plain.matches("<polyline").count(), 4);

    let err = cmd_contours(&input, (3, 2), 0.5, &out, false).unwrap_err();
    assert!(matches!(err, CliError::EmptyKRange));
}

#[test]
fn gen_and_prep_round_trip() {
    let dir = TempDir::new("genprep");
    let gen_path = dir.path("g.csv");
    cmd_gen(200, Distribution::Correlated, 5, &gen_path).unwrap();
    let gen_again = dir.path("g2.csv");
    cmd_gen(200, Distribution::Correlated, 5, &gen_again).unwrap();
    assert_eq!(fs::read(&gen_path).unwrap(), fs::read(&gen_again).unwrap());

    // raw data with duplicates and values outside (0,1]
    let raw = dir.path("raw.csv");
    fs::write(&raw, "id,a1,a2\na,5,40\nb,5,17\nc,2,40\nd,9,3\n").unwrap();
    let prepped = dir.path("prepped.csv");
    cmd_prep(&raw, &prepped).unwrap();
    let d = load_csv(&prepped).unwrap();
    assert_eq!(d.len(), 4);
    let mut a1: Vec<f64> = d.tuples.iter().map(|t| t.a1).collect();
    a1.sort_by(|x, y| x.partial_cmp(y).unwrap());
    assert!(a1.windows(2).all(|w| w[0] < w[1]), "ties must be gone");
    assert!(d.tuples.iter().all(|t| t.a1 > 0.0 && t.a1 <= 1.0 + 1e-6));
    // the per-attribute maximum maps to 1
    assert!(d.tuples.iter().any(|t| (t.a1 - 1.0).abs() < 1e-12));
}

#[test]
fn ingest_error_exit_code() {
    let dir = TempDir::new("exit");
    let bad = dir.path("bad.csv");
    fs::write(&bad, "x,-3,2\n").unwrap();
    let err = cmd_build(&bad, 1, 0.5, &dir.path("x.idx"), true).unwrap_err();
    assert_eq!(err.exit_code(), 3);
}
