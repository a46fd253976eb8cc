//! Acceptance suite. Prints one line per criterion and exits nonzero if any
//! criterion fails.

use std::collections::BTreeMap;
use std::f64::consts::{SQRT_2, TAU};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use srank_core::learn::{
    build_classifiers, class_distances, cross_validate, rank_pairs, subsample, LabeledDataset,
    PairsByClass, PersistenceConfig,
};
use srank_core::spatial::{
    analyze_points, csr_baseline, i_org, i_ph, label_components, point_set_g_ph,
    poisson_realizations, represent, Connectivity, FieldConfig, GridField, PersistenceCdfs,
    PlanarPoints, Representation,
};
use srank_core::{
    betti_at_scale, build_vr_filtration, homology_at_scale_oracle, interleaving_distance,
    lp_distance, pairwise_dissimilarity, reduce_and_pair, stable_rank, AxiomSample, Bar, Barcode,
    Contour, DensitySpec, Metric, PointCloud, StableRank, Truncation,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_barcode(r: &mut ChaCha8Rng) -> Barcode {
    let n = r.random_range(0..15);
    let bars: Vec<Bar> = (0..n)
        .map(|_| {
            let k = r.random_range(0..2);
            let b = r.random_range(0.0..3.0);
            if r.random_bool(0.1) {
                Bar::essential(b, k)
            } else {
                Bar::new(b, b + r.random_range(0.01..3.0), k)
            }
        })
        .collect();
    Barcode::new(bars, 6.5).unwrap()
}

fn random_density(r: &mut ChaCha8Rng) -> DensitySpec {
    let m = r.random_range(2..10);
    let mut grid = vec![0.0];
    for _ in 1..m {
        grid.push(grid.last().unwrap() + r.random_range(0.05..2.0));
    }
    let values = (0..m).map(|_| r.random_range(0.05..5.0)).collect();
    DensitySpec::new(grid, values, None).unwrap()
}

fn contour_kinds(seed: u64) -> Vec<(String, Contour)> {
    let mut r = rng(seed);
    let mut kinds = vec![
        ("standard".to_string(), Contour::Standard),
        ("power(1.5)".to_string(), Contour::power(1.5).unwrap()),
        ("power(2)".to_string(), Contour::power(2.0).unwrap()),
        (
            "mult(0.5)".to_string(),
            Contour::multiplicative(0.5).unwrap(),
        ),
        ("mult(2)".to_string(), Contour::multiplicative(2.0).unwrap()),
    ];
    for i in 0..3 {
        kinds.push((
            format!("density#{i}"),
            Contour::from_density(random_density(&mut r)),
        ));
    }
    kinds
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let mut mismatches = 0;
    for _ in 0..200 {
        let n = r.random_range(1..=7);
        let pts = (0..n)
            .map(|_| vec![r.random::<f64>(), r.random::<f64>()])
            .collect();
        let d = pairwise_dissimilarity(&PointCloud::new(pts).unwrap(), Metric::Euclidean).unwrap();
        let f = build_vr_filtration(&d, 2, 2.0).unwrap();
        let bc = reduce_and_pair(&f);
        for _ in 0..20 {
            let t = r.random_range(0.0..SQRT_2);
            for k in 0..=1 {
                if betti_at_scale(&bc, k, t) != homology_at_scale_oracle(&f, k, t) {
                    mismatches += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        mismatches == 0 && elapsed < Duration::from_secs(60),
        format!("{mismatches} mismatches over 200 clouds x 20 scales x 2 degrees in {elapsed:.2?}"),
    )
}

fn unit_square() -> Outcome {
    let pts = vec![
        vec![0.0, 0.0],
        vec![1.0, 0.0],
        vec![1.0, 1.0],
        vec![0.0, 1.0],
    ];
    let d = pairwise_dissimilarity(&PointCloud::new(pts).unwrap(), Metric::Euclidean).unwrap();
    let bc = reduce_and_pair(&build_vr_filtration(&d, 2, 2.0).unwrap());
    let h1 = bc.degree(1);
    let h1_ok = h1.len() == 1
        && (h1[0].birth - 1.0).abs() <= 1e-12
        && (h1[0].death - SQRT_2).abs() <= 1e-12;
    let h0 = bc.degree(0);
    let finite: Vec<&Bar> = h0.iter().filter(|b| !b.is_essential()).collect();
    let h0_ok = h0.len() == 4
        && finite.len() == 3
        && finite.iter().all(|b| b.birth == 0.0 && b.death == 1.0)
        && h0.iter().any(|b| b.is_essential() && b.birth == 0.0);
    outcome(
        h1_ok && h0_ok,
        format!("H0 = {:?}, H1 = {:?}", bars(h0), bars(h1)),
    )
}

fn bars(bs: &[Bar]) -> Vec<(f64, f64)> {
    bs.iter().map(|b| (b.birth, b.death)).collect()
}

fn axiom_suite() -> Outcome {
    let mut r = rng(3);
    let samples: Vec<AxiomSample> = (0..10_000)
        .map(|_| {
            let (a, b): (f64, f64) = (r.random_range(0.0..10.0), r.random_range(0.0..10.0));
            let (e, t): (f64, f64) = (r.random_range(0.0..5.0), r.random_range(0.0..5.0));
            AxiomSample::new(a.min(b), a.max(b), e.min(t), e.max(t))
        })
        .collect();
    let mut failed = Vec::new();
    for (name, c) in contour_kinds(30) {
        if !c.check_axioms(&samples).unwrap() {
            let bad = samples
                .iter()
                .filter(|s| !c.check_axioms(&[**s]).unwrap())
                .count();
            failed.push(format!("{name} violates the axioms on {bad}/10000 samples"));
        }
    }
    let flat = Contour::from_density(DensitySpec::constant(1.0, 3.0).unwrap());
    let worst = (0..1000)
        .map(|_| {
            let (v, e) = (r.random_range(0.0..20.0), r.random_range(0.0..10.0));
            (flat.evaluate(v, e).unwrap() - Contour::Standard.evaluate(v, e).unwrap()).abs()
        })
        .fold(0.0, f64::max);
    if worst > 1e-9 {
        failed.push(format!(
            "constant density differs from standard by {worst:e}"
        ));
    }
    if failed.is_empty() {
        outcome(
            true,
            format!("8 contour kinds x 10000 samples; constant density within {worst:e}"),
        )
    } else {
        outcome(false, failed.join("; "))
    }
}

fn stable_rank_fixtures() -> Outcome {
    let bc = Barcode::new(
        [
            Bar::new(0.0, 2.0, 0),
            Bar::new(0.0, 1.0, 0),
            Bar::new(1.0, 3.0, 0),
        ],
        5.0,
    )
    .unwrap();
    let s = stable_rank(&bc, 0, &Contour::Standard, Truncation::CapAtMaxScale);
    let fixture = [(0.0, 3.0), (1.0, 2.0), (2.5, 0.0)]
        .iter()
        .all(|&(e, v)| s.eval(e) == v);
    let mut r = rng(4);
    let mut bad = 0;
    for _ in 0..100 {
        let bc = random_barcode(&mut r);
        for (_, c) in contour_kinds(40) {
            for k in 0..2 {
                if stable_rank(&bc, k, &c, Truncation::CapAtMaxScale).eval(0.0)
                    != bc.degree(k).len() as f64
                {
                    bad += 1;
                }
            }
        }
    }
    outcome(
        fixture && bad == 0,
        format!(
            "fixture (3, 2, 0) = ({}, {}, {}); {bad} count mismatches at 0",
            s.eval(0.0),
            s.eval(1.0),
            s.eval(2.5)
        ),
    )
}

fn metric_suite() -> Outcome {
    let mut r = rng(5);
    let rank = |r: &mut ChaCha8Rng| {
        let bc = random_barcode(r);
        stable_rank(
            &bc,
            r.random_range(0..2),
            &Contour::Standard,
            Truncation::CapAtMaxScale,
        )
    };
    let metrics: [(&str, &dyn Fn(&StableRank, &StableRank) -> f64); 3] = [
        ("L1", &|a, b| lp_distance(a, b, 1.0).unwrap()),
        ("L2", &|a, b| lp_distance(a, b, 2.0).unwrap()),
        ("interleaving", &interleaving_distance),
    ];
    let mut failures = Vec::new();
    for _ in 0..100 {
        let (f, g, h) = (rank(&mut r), rank(&mut r), rank(&mut r));
        for (name, d) in metrics {
            if d(&f, &f) != 0.0
                || d(&f, &g).to_bits() != d(&g, &f).to_bits()
                || d(&f, &h) > d(&f, &g) + d(&g, &h) + 1e-9
            {
                failures.push(name);
            }
        }
    }
    let f = StableRank::new(vec![1.0], vec![2.0, 0.0]).unwrap();
    let g = StableRank::new(vec![1.5], vec![2.0, 0.0]).unwrap();
    let (l1, l2, di) = (
        lp_distance(&f, &g, 1.0).unwrap(),
        lp_distance(&f, &g, 2.0).unwrap(),
        interleaving_distance(&f, &g),
    );
    let fixture = l1 == 1.0 && (l2 - SQRT_2).abs() <= 1e-12 && (di - 0.5).abs() <= 1e-12;
    outcome(
        failures.is_empty() && fixture,
        format!(
            "{} axiom failures over 100 triples; fixture L1 = {l1}, L2 = {l2}, interleaving = {di}",
            failures.len()
        ),
    )
}

fn csr_self_consistency() -> Outcome {
    let start = Instant::now();
    let (mut iph, mut iorg) = (0.0, 0.0);
    let seeds = 5;
    for s in 0..seeds {
        let baseline = csr_baseline(100.0, (1.0, 1.0), 100, &Contour::Standard, 1000 + s).unwrap();
        let tests = poisson_realizations(100.0, (1.0, 1.0), 100, 2000 + s).unwrap();
        let (mut a, mut b) = (0.0, 0.0);
        for p in &tests {
            a += i_ph(&point_set_g_ph(p, &Contour::Standard).unwrap(), &baseline).i_ph;
            b += i_org(p, 1000).unwrap().value;
        }
        iph += a / tests.len() as f64;
        iorg += b / tests.len() as f64;
    }
    iph /= seeds as f64;
    iorg /= seeds as f64;
    let elapsed = start.elapsed();
    outcome(
        (iph - 0.5).abs() <= 0.05
            && (iorg - 0.5).abs() <= 0.10
            && elapsed < Duration::from_secs(600),
        format!("I_PH = {iph:.4}, I_org = {iorg:.4} in {elapsed:.2?}"),
    )
}

const GRID: usize = 256;
const CLOUDS: usize = 100;
const SALT: usize = 10;

/// `CLOUDS` 3x3 blocks at uniform random cells of a periodic grid, redrawn when
/// they would touch an earlier block, plus `SALT` single cells each placed one
/// empty cell away from a randomly chosen block.
fn salted_field(seed: u64) -> (GridField, GridField) {
    let mut r = rng(seed);
    let wrap = |a: usize, d: isize| (a as isize + d).rem_euclid(GRID as isize) as usize;
    let cheb = |a: (usize, usize), b: (usize, usize)| {
        let dx = a.0.abs_diff(b.0).min(GRID - a.0.abs_diff(b.0));
        let dy = a.1.abs_diff(b.1).min(GRID - a.1.abs_diff(b.1));
        dx.max(dy)
    };
    let mut centers: Vec<(usize, usize)> = Vec::new();
    while centers.len() < CLOUDS {
        let c = (r.random_range(0..GRID), r.random_range(0..GRID));
        if centers.iter().all(|&o| cheb(o, c) > 3) {
            centers.push(c);
        }
    }
    let mut field = GridField::zeros(GRID, GRID, 1.0 / GRID as f64, true).unwrap();
    for &(x, y) in &centers {
        for dx in -1..=1 {
            for dy in -1..=1 {
                field.set(wrap(x, dx), wrap(y, dy), r.random_range(0.5..1.0));
            }
        }
    }
    let clean = field.clone();
    let mut salt: Vec<(usize, usize)> = Vec::new();
    while salt.len() < SALT {
        let host = centers[r.random_range(0..CLOUDS)];
        let (dx, dy) = [(3, 0), (-3, 0), (0, 3), (0, -3)][r.random_range(0..4)];
        let s = (wrap(host.0, dx), wrap(host.1, dy));
        let clear =
            centers.iter().all(|&o| cheb(o, s) >= 3) && salt.iter().all(|&o| cheb(o, s) >= 2);
        if clear {
            salt.push(s);
            field.set(s.0, s.1, r.random_range(0.1..0.5));
        }
    }
    (clean, field)
}

fn robustness() -> Outcome {
    let cfg = FieldConfig {
        min_size: 1,
        representation: Representation::Centroid,
        ..FieldConfig::default()
    };
    let baselines: BTreeMap<usize, PersistenceCdfs> = [CLOUDS, CLOUDS + SALT]
        .into_iter()
        .map(|n| {
            (
                n,
                csr_baseline(n as f64, (1.0, 1.0), 100, &Contour::Standard, 77).unwrap(),
            )
        })
        .collect();
    let indices = |f: &GridField| {
        let cs = label_components(f, 0.0, 1, Connectivity::Four);
        let pts: PlanarPoints = represent(&cs, Representation::Centroid, 0).unwrap();
        let n = pts.len();
        let rep = analyze_points(pts, cs.len(), &cfg, Some(&baselines[&n]))
            .unwrap()
            .report;
        (rep.i_org.unwrap(), rep.i_ph.unwrap())
    };
    let (mut d_org, mut d_ph) = (0.0, 0.0);
    for seed in 0..20 {
        let (clean, salted) = salted_field(500 + seed);
        let (o0, p0) = indices(&clean);
        let (o1, p1) = indices(&salted);
        d_org += (o1 - o0).abs() / 20.0;
        d_ph += (p1 - p0).abs() / 20.0;
    }
    outcome(
        d_ph < d_org,
        format!("mean |dI_PH| = {d_ph:.4} vs mean |dI_org| = {d_org:.4}"),
    )
}

fn circle_class(r: &mut ChaCha8Rng, centers: &[(f64, f64, f64)], n: usize) -> PointCloud {
    let pts = (0..n)
        .map(|_| {
            if r.random_bool(0.1) {
                return vec![r.random_range(-1.5..1.5), r.random_range(-1.5..1.5)];
            }
            let (cx, cy, rad) = centers[r.random_range(0..centers.len())];
            let a = r.random::<f64>() * TAU;
            let j = 0.08 * rad;
            vec![
                cx + rad * a.cos() + r.random_range(-j..j),
                cy + rad * a.sin() + r.random_range(-j..j),
            ]
        })
        .collect();
    PointCloud::new(pts).unwrap()
}

fn classification() -> Outcome {
    let mut r = rng(8);
    let classes = [
        ("circle", circle_class(&mut r, &[(0.0, 0.0, 1.2)], 1000)),
        (
            "two_circles",
            circle_class(&mut r, &[(-0.7, 0.0, 0.6), (0.7, 0.0, 0.6)], 1000),
        ),
        (
            "noise",
            PointCloud::new(
                (0..1000)
                    .map(|_| vec![r.random_range(-1.5..1.5), r.random_range(-1.5..1.5)])
                    .collect(),
            )
            .unwrap(),
        ),
    ];
    let cfg = PersistenceConfig::default();
    let pairs_with = |c1: &Contour| -> PairsByClass {
        classes
            .iter()
            .enumerate()
            .map(|(i, (label, cloud))| {
                let ds = LabeledDataset::new(*label, *label, cloud.clone()).unwrap();
                let samples = subsample(&ds, 100, 20, 80 + i as u64).unwrap();
                (
                    label.to_string(),
                    rank_pairs(&samples, &Contour::Standard, c1, &cfg).unwrap(),
                )
            })
            .collect()
    };
    let pairs = pairs_with(&Contour::Standard);
    let acc = cross_validate(&pairs, 10, 8, 9).unwrap().accuracy;

    let mut pool: Vec<_> = pairs.values().flatten().cloned().collect();
    let labels: Vec<&String> = pairs
        .iter()
        .flat_map(|(l, v)| std::iter::repeat_n(l, v.len()))
        .collect();
    let mut control = 0.0;
    for s in 0..5 {
        pool.shuffle(&mut rng(900 + s));
        let mut shuffled = PairsByClass::new();
        for (l, p) in labels.iter().zip(&pool) {
            shuffled.entry((*l).clone()).or_default().push(p.clone());
        }
        control += cross_validate(&shuffled, 10, 8, 9 + s).unwrap().accuracy / 5.0;
    }

    let swapped = pairs_with(&Contour::power(2.0).unwrap());
    let (ca, ta) = build_classifiers(&pairs, 8, 3).unwrap();
    let (cb, tb) = build_classifiers(&swapped, 8, 3).unwrap();
    let (mut h0_same, mut h1_changed) = (true, false);
    for label in ca.keys() {
        for (x, y) in ta[label].iter().zip(&tb[label]) {
            for c in ca.keys() {
                let (a0, a1) = class_distances(x, &ca[c]);
                let (b0, b1) = class_distances(y, &cb[c]);
                h0_same &= a0.to_bits() == b0.to_bits();
                h1_changed |= a1 != b1;
            }
        }
    }
    outcome(
        acc >= 0.9 && (control - 1.0 / 3.0).abs() <= 0.15 && h0_same && h1_changed,
        format!(
            "accuracy {acc:.3}, shuffled control {control:.3}, H0 distances identical after H1 contour swap: {h0_same}, H1 distances changed: {h1_changed}"
        ),
    )
}

fn srank(args: &[String]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_srank"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "srank {}: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr).trim()
        ))
    }
}

fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut files = BTreeMap::new();
    for e in fs::read_dir(dir).unwrap() {
        let path = e.unwrap().path();
        files.insert(path.clone(), fs::read(&path).unwrap());
    }
    files
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let s = |p: &Path| p.to_str().unwrap().to_string();
    let mut r = rng(10);

    let pts: Vec<String> = (0..60)
        .map(|_| {
            let a = r.random::<f64>() * TAU;
            format!(
                "{},{}",
                a.cos() + r.random_range(-0.1..0.1),
                a.sin() + r.random_range(-0.1..0.1)
            )
        })
        .collect();
    fs::write(root.join("ring.csv"), pts.join("\n")).unwrap();
    let blob: Vec<String> = (0..60)
        .map(|_| format!("{},{}", r.random::<f64>(), r.random::<f64>()))
        .collect();
    fs::write(root.join("blob.csv"), blob.join("\n")).unwrap();
    fs::write(
        root.join("datasets.json"),
        r#"[{"id": "r", "label": "ring", "csv_path": "ring.csv"}, {"id": "b", "label": "blob", "csv_path": "blob.csv"}]"#,
    )
    .unwrap();
    let (field, _) = salted_field(1);
    let rows: Vec<String> = (0..GRID)
        .map(|y| {
            (0..GRID)
                .map(|x| field.get(x, y).to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    fs::write(root.join("field.csv"), rows.join("\n")).unwrap();

    let out = |name: &str| s(&root.join(name));
    let a = |xs: &[&str]| xs.iter().map(|x| x.to_string()).collect::<Vec<String>>();
    let runs: Vec<(String, Vec<String>)> = vec![
        (
            "barcode".into(),
            a(&[
                "barcode",
                "--points",
                &out("ring.csv"),
                "--out",
                &out("o_barcode"),
            ]),
        ),
        (
            "stablerank".into(),
            a(&[
                "stablerank",
                "--barcode",
                &out("o_barcode/barcode.json"),
                "--contour-h1",
                "power:2",
                "--normalize",
                "--out",
                &out("o_sr"),
            ]),
        ),
        (
            "stablerank-raw".into(),
            a(&[
                "stablerank",
                "--points",
                &out("blob.csv"),
                "--out",
                &out("o_sr2"),
            ]),
        ),
        (
            "dist".into(),
            a(&[
                "dist",
                &out("o_sr/h0.csv"),
                &out("o_sr/h1.csv"),
                &out("o_sr2/h1.csv"),
                "--metric",
                "interleaving",
                "--out",
                &out("o_dist"),
            ]),
        ),
        (
            "classify".into(),
            a(&[
                "classify",
                "--manifest",
                &out("datasets.json"),
                "--folds",
                "4",
                "--train",
                "4",
                "--sample-size",
                "30",
                "--reps",
                "8",
                "--seed",
                "5",
                "--out",
                &out("o_classify"),
            ]),
        ),
        (
            "spatial".into(),
            a(&[
                "spatial",
                "--field",
                &out("field.csv"),
                "--cell-size",
                &(1.0 / GRID as f64).to_string(),
                "--min-size",
                "1",
                "--represent",
                "random:0.2",
                "--realizations",
                "20",
                "--seed",
                "6",
                "--out",
                &out("o_spatial"),
            ]),
        ),
        (
            "poisson-baseline".into(),
            a(&[
                "poisson-baseline",
                "--lambda",
                "60",
                "--realizations",
                "20",
                "--seed",
                "7",
                "--out",
                &out("o_baseline"),
            ]),
        ),
    ];
    let mut differing = Vec::new();
    for (name, args) in &runs {
        let target = PathBuf::from(args.iter().skip_while(|x| *x != "--out").nth(1).unwrap());
        let mut snaps = Vec::new();
        for _ in 0..2 {
            if let Err(e) = srank(args) {
                return outcome(false, e);
            }
            snaps.push(snapshot(&target));
        }
        if snaps[0] != snaps[1] || snaps[0].is_empty() {
            differing.push(name.clone());
        }
    }
    outcome(
        differing.is_empty(),
        if differing.is_empty() {
            format!("{} command runs byte-identical on re-run", runs.len())
        } else {
            format!("outputs differ for {}", differing.join(", "))
        },
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("oracle equivalence", oracle_equivalence),
        ("unit-square barcode", unit_square),
        ("contour axioms", axiom_suite),
        ("stable-rank fixtures", stable_rank_fixtures),
        ("metric properties", metric_suite),
        ("CSR self-consistency", csr_self_consistency),
        ("robustness to salting", robustness),
        ("classification", classification),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        println!(
            "[{}] criterion {}: {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
        if !o.pass {
            failed += 1;
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
