//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits nonzero if any criterion fails.

use std::collections::{HashMap, HashSet};
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ripsapprox::barycentric::OrderComplex;
use ripsapprox::cubical::{ActiveVertexMap, CubicalComplex, Face};
use ripsapprox::lattice::{Ladder, ShiftSequence};
use ripsapprox::persistence::{
    coning_oracle, cubical_betti, reduce, reduce_pairs, reduced_betti, rips_filtration,
    tower_barcode,
};
use ripsapprox::pipeline::compare;
use ripsapprox::tower::{
    active_face_bound, build_tower, cubical_size_bound, snapshots, stream_stats,
    survival_experiment, tower_size_bound, Mode, Snapshot, Tower, TowerConfig,
};
use ripsapprox::{Error, Metric, PointCloud};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn uniform_cloud(n: usize, d: usize, seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = (0..n)
        .map(|_| (0..d).map(|_| rng.gen::<f64>()).collect())
        .collect();
    PointCloud::new(pts).expect("distinct random points")
}

fn tower(cloud: &PointCloud, mode: Mode, k: usize, seed: u64) -> Tower {
    build_tower(
        cloud,
        &TowerConfig {
            mode,
            k,
            seed,
            ..TowerConfig::default()
        },
    )
    .expect("tower builds")
}

fn approximation(metric: Metric) -> Outcome {
    let mut configs = 0;
    let mut worst: f64 = 0.0;
    for n in [5usize, 10, 15, 20, 25] {
        for d in [2usize, 3] {
            for seed in 0..5u64 {
                let cloud = uniform_cloud(n, d, 1000 * seed + 10 * n as u64 + d as u64);
                let c = compare(&cloud, metric, 1, seed, 10_000_000).map_err(|e| e.to_string())?;
                for cert in &c.certificates {
                    worst = worst.max(cert.achieved.value() / c.claimed);
                    ensure(cert.pass, || {
                        format!(
                            "n={n} d={d} seed={seed} H{}: c* = {} exceeds {}",
                            cert.dim,
                            cert.achieved.value(),
                            c.claimed
                        )
                    })?;
                }
                configs += 1;
            }
        }
    }
    Ok(format!(
        "{configs} configurations, dimensions 0 and 1, worst c*/claim = {worst:.4}"
    ))
}

fn size_bounds() -> Outcome {
    let mut streams = 0;
    let mut stirling_checked = 0;
    for i in 0..120u64 {
        let n = 3 + (i as usize % 18);
        let d = 2 + (i as usize / 3) % 3;
        let mode = if i % 2 == 0 {
            Mode::Simplicial
        } else {
            Mode::Cubical
        };
        let k = (i as usize / 2) % (d + 1);
        let cloud = uniform_cloud(n, d, 77 + i);
        let t = tower(&cloud, mode, k, i);
        let stats = stream_stats(&t.stream);
        ensure(stats.passed(), || {
            format!("stream {i}: audit failed {:?}", stats.audits)
        })?;
        let active = t.active_face_count() as u128;
        ensure(active <= active_face_bound(n, d), || {
            format!("stream {i}: {active} active faces > n·3^d")
        })?;
        let total = t.stream.include_count() as u128;
        match mode {
            Mode::Cubical => {
                ensure(total <= cubical_size_bound(n, d), || {
                    format!("stream {i}: {total} cells > n·6^d")
                })?;
                ensure(stats.active_faces == Some(active as u64), || {
                    format!(
                        "stream {i}: stream activity {:?} != builder {active}",
                        stats.active_faces
                    )
                })?;
            }
            Mode::Simplicial => {
                if let Some(bound) = tower_size_bound(n, d, k) {
                    ensure(total <= bound, || {
                        format!("stream {i}: {total} simplices > {bound}")
                    })?;
                    stirling_checked += 1;
                }
            }
        }
        streams += 1;
    }
    Ok(format!(
        "{streams} streams, zero violations ({stirling_checked} simplicial streams with k+2 <= d)"
    ))
}

fn scale_count() -> Outcome {
    let mut runs = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..100u64 {
        let n = rng.gen_range(2..20);
        let d = rng.gen_range(1..4);
        let spread_out: f64 = [1.0, 10.0, 1000.0][i as usize % 3];
        let pts = (0..n)
            .map(|j| {
                let s = if j == 0 { spread_out } else { 1.0 };
                (0..d).map(|_| s * rng.gen::<f64>()).collect()
            })
            .collect();
        let cloud = PointCloud::new(pts).map_err(|e| e.to_string())?;
        let spread = cloud.spread(Metric::LInf).map_err(|e| e.to_string())?;
        let bound = ((3 * d) as f64 * spread).log2().ceil() as usize + 1;
        for mode in [Mode::Simplicial, Mode::Cubical] {
            let t = tower(&cloud, mode, 1, i);
            let count = t.stream.scale_count();
            ensure(count <= bound, || {
                format!("run {i}: {count} scale events > ceil(log2(3dΔ)) + 1 = {bound}")
            })?;
            runs += 1;
        }
    }
    Ok(format!(
        "{runs} runs, scale events within ceil(log2(3dΔ)) + 1"
    ))
}

fn survival() -> Outcome {
    let trials = 2000u64;
    let mut lines = Vec::new();
    for k in [1usize, 2, 4] {
        let r = survival_experiment(8, k, trials, 2025 + k as u64).map_err(|e| e.to_string())?;
        for j in 1..=12usize {
            let p0 = (k as f64 / 2f64.powi(j as i32)).min(1.0);
            let sigma = (p0 * (1.0 - p0) / trials as f64).sqrt();
            ensure(r.tail(j) <= p0 + 3.0 * sigma, || {
                format!("k={k}: P(Y > {j}) = {} > {p0} + 3σ", r.tail(j))
            })?;
        }
        let mean_bound = if k == 1 {
            2.0 + 3.0 * (2.0 / trials as f64).sqrt()
        } else {
            3.0 * (k as f64).log2()
        };
        ensure(r.mean() <= mean_bound, || {
            format!("k={k}: mean {} > {mean_bound}", r.mean())
        })?;
        lines.push(format!("k={k} mean {:.3}", r.mean()));
    }
    Ok(format!("d=8, {trials} trials each: {}", lines.join(", ")))
}

fn random_face(rng: &mut ChaCha8Rng, d: usize, s: u32) -> Face {
    Face {
        scale: s,
        anchor: (0..d).map(|_| rng.gen_range(-40..40)).collect(),
        mask: rng.gen_range(0..1u32 << d),
    }
}

fn lattice_lemmas() -> Outcome {
    const CASES: usize = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    // Voronoi containment, exact in units of λ/2 where α_s/2 = 2^s.
    for case in 0..CASES {
        let d = rng.gen_range(1..=6);
        let s = rng.gen_range(0..12);
        let ladder = Ladder::build(1.0, s + 1, d, &ShiftSequence::Seeded(rng.gen()))
            .map_err(|e| e.to_string())?;
        let z: Vec<i64> = (0..d).map(|_| rng.gen_range(-1000..1000)).collect();
        let v = ripsapprox::GridVertex { scale: s, z };
        let y = ladder.vertex_map(&v);
        let x = ladder.frame(s).position(&v.z);
        let c = ladder.frame(s + 1).position(&y.z);
        let (h, hy) = (1i64 << s, 1i64 << (s + 1));
        for i in 0..d {
            ensure(c[i] - hy <= x[i] - h && x[i] + h <= c[i] + hy, || {
                format!("case {case}: cell of {v:?} escapes the cell of its image")
            })?;
        }
    }
    let mut checked = [0usize; 3];
    for case in 0..CASES {
        let d = rng.gen_range(1..=5);
        let s = rng.gen_range(0..10);
        let ladder = Ladder::build(1.0, s + 1, d, &ShiftSequence::Seeded(rng.gen()))
            .map_err(|e| e.to_string())?;
        let f = random_face(&mut rng, d, s);
        let e = ladder.face_map(&f);
        // Claim 1: the vertex images form exactly the vertex set of a face.
        let images: HashSet<Vec<i64>> = f
            .vertices()
            .into_iter()
            .map(|z| ladder.vertex_map(&ripsapprox::GridVertex { scale: s, z }).z)
            .collect();
        let corners: HashSet<Vec<i64>> = e.vertices().into_iter().collect();
        ensure(images == corners, || {
            format!("case {case}: vertex images of {f:?} are not a face")
        })?;
        checked[0] += 1;
        // Claim 2: every face of the image lifts.
        let subs = f.subfaces();
        let lifted: HashSet<Face> = subs.iter().map(|g| ladder.face_map(g)).collect();
        for e1 in e.subfaces() {
            ensure(lifted.contains(&e1), || {
                format!("case {case}: face {e1:?} of g(f) has no preimage")
            })?;
        }
        checked[1] += 1;
        // Claim 3: opposite facets of the image lift to opposite facets.
        let ff = f.facets();
        let ef = e.facets();
        for pair in ef.chunks(2) {
            let found = ff.chunks(2).any(|q| {
                let (a, b) = (ladder.face_map(&q[0]), ladder.face_map(&q[1]));
                (a == pair[0] && b == pair[1]) || (a == pair[1] && b == pair[0])
            });
            ensure(found, || {
                format!("case {case}: opposite facets {pair:?} do not lift")
            })?;
        }
        checked[2] += 1;
    }
    Ok(format!(
        "{CASES} containment cases; face-map claims 1-3 on {}/{}/{} faces",
        checked[0], checked[1], checked[2]
    ))
}

/// Faces of a simplicial snapshot at scale `s`, by live vertex id.
fn labels(t: &Tower, snap: &Snapshot, s: u32) -> Result<HashMap<usize, Face>, String> {
    let records: HashMap<usize, &ripsapprox::tower::FaceRecord> =
        t.faces.iter().map(|r| (r.id, r)).collect();
    let mut out = HashMap::new();
    for simplex in snap.of_dim(0) {
        let id = simplex[0];
        let rec = records
            .get(&id)
            .ok_or_else(|| format!("vertex {id} has no face"))?;
        let mut f = rec.face.clone();
        for _ in rec.scale..s {
            f = t.ladder.face_map(&f);
        }
        out.insert(id, f);
    }
    Ok(out)
}

fn snapshot_at(snaps: &[Snapshot], alpha: f64) -> &Snapshot {
    snaps
        .iter()
        .rev()
        .find(|s| s.alpha <= alpha)
        .expect("the first scale is always present")
}

fn independent_complex(t: &Tower, cloud: &PointCloud, s: u32) -> Result<CubicalComplex, String> {
    let active = ActiveVertexMap::locate(t.ladder.frame(s), cloud);
    CubicalComplex::from_active(&active).map_err(|e| e.to_string())
}

fn reconstruction() -> Outcome {
    let mut instances = 0;
    let mut scales = 0;
    let mut acyclic: HashSet<(usize, u32)> = HashSet::new();
    for i in 0..60u64 {
        let n = 4 + (i as usize % 9);
        let d = 2 + (i as usize % 2);
        let k = 1 + (i as usize / 2) % d;
        let cloud = uniform_cloud(n, d, 500 + i);
        let t = tower(&cloud, Mode::Simplicial, k, i);
        let snaps = snapshots(&t.stream).map_err(|e| e.to_string())?;
        for s in 0..=t.ladder.top() {
            let snap = snapshot_at(&snaps, t.ladder.frame(s).alpha());
            let lab = labels(&t, snap, s)?;
            let distinct: HashSet<&Face> = lab.values().collect();
            ensure(distinct.len() == lab.len(), || {
                format!("instance {i} scale {s}: labels collide")
            })?;
            let replayed: HashSet<Vec<Face>> = snap
                .simplices
                .iter()
                .map(|simplex| {
                    let mut fs: Vec<Face> = simplex.iter().map(|v| lab[v].clone()).collect();
                    fs.sort();
                    fs
                })
                .collect();
            let u = independent_complex(&t, &cloud, s)?;
            let oc = OrderComplex::build(&u, k);
            let expected: HashSet<Vec<Face>> = oc
                .simplices()
                .iter()
                .map(|simplex| {
                    let mut fs = oc.flag(simplex).faces;
                    fs.sort();
                    fs
                })
                .collect();
            ensure(replayed == expected, || {
                format!(
                    "instance {i} scale {s}: replay has {} simplices, order complex {}",
                    replayed.len(),
                    expected.len()
                )
            })?;
            for f in u.active_faces() {
                if acyclic.insert((f.dim(), f.mask)) {
                    let sd = OrderComplex::of_face(f, f.dim());
                    let b = reduced_betti(sd.simplices());
                    ensure(b.iter().all(|&x| x == 0), || {
                        format!("sd({f:?}) has Betti {b:?}")
                    })?;
                }
            }
            scales += 1;
        }
        instances += 1;
    }
    Ok(format!(
        "{instances} instances, {scales} scales reconstructed; sd acyclic for {} face shapes",
        acyclic.len()
    ))
}

fn trimmed(mut b: Vec<usize>) -> Vec<usize> {
    while b.last() == Some(&0) {
        b.pop();
    }
    b
}

fn equivalence() -> Outcome {
    let mut instances = 0;
    let mut scales = 0;
    for i in 0..55u64 {
        let n = 4 + (i as usize % 10);
        let d = 2 + (i as usize % 2);
        let cloud = uniform_cloud(n, d, 900 + i);
        let simp = tower(&cloud, Mode::Simplicial, d, i);
        let cube = tower(&cloud, Mode::Cubical, d, i);
        let xs = snapshots(&simp.stream).map_err(|e| e.to_string())?;
        let us = snapshots(&cube.stream).map_err(|e| e.to_string())?;
        for s in 0..=simp.ladder.top() {
            let alpha = simp.ladder.frame(s).alpha();
            let u = independent_complex(&simp, &cloud, s)?;
            let cb = trimmed(cubical_betti(&u).map_err(|e| e.to_string())?);
            let xb = trimmed(reduced_betti(&snapshot_at(&xs, alpha).simplices));
            ensure(cb == xb, || {
                format!("instance {i} scale {s}: cubical {cb:?} vs simplicial {xb:?}")
            })?;
            let counts: Vec<usize> = (0..=u.max_dim().unwrap_or(0))
                .map(|p| u.faces_of_dim(p).len())
                .collect();
            let replayed = snapshot_at(&us, alpha).count_by_dim();
            ensure(replayed == counts, || {
                format!("instance {i} scale {s}: cubical stream {replayed:?} vs complex {counts:?}")
            })?;
            scales += 1;
        }
        instances += 1;
    }
    Ok(format!(
        "{instances} instances, {scales} scales with equal reduced Betti numbers"
    ))
}

fn cross_validation() -> Outcome {
    let mut seeds = 0;
    let mut intervals = 0;
    for seed in 0..30u64 {
        let n = 4 + (seed as usize % 7);
        let k = 1 + (seed as usize % 2);
        let cloud = uniform_cloud(n, 2, 300 + seed);
        let t = tower(&cloud, Mode::Simplicial, k, seed);
        let ranks = tower_barcode(&t.stream, k).map_err(|e| e.to_string())?;
        let coned = coning_oracle(&t.stream, k, 1_000_000).map_err(|e| e.to_string())?;
        ensure(ranks == coned, || {
            format!(
                "seed {seed}: rank formula\n{}coning\n{}",
                ranks.to_text(),
                coned.to_text()
            )
        })?;
        intervals += ranks.len();
        seeds += 1;
    }
    let mut prefixes = 0;
    for seed in 0..12u64 {
        let cloud = uniform_cloud(4 + seed as usize % 4, 2, 40 + seed);
        let f = rips_filtration(&cloud, Metric::L2, 2, 100_000).map_err(|e| e.to_string())?;
        for len in 1..=f.len() {
            let prefix = f.prefix(len);
            let pairs = reduce_pairs(&prefix);
            let mut counts: Vec<usize> = Vec::new();
            for &b in &pairs.essential {
                let p = prefix.simplices()[b].0.len() - 1;
                if counts.len() <= p {
                    counts.resize(p + 1, 0);
                }
                counts[p] += 1;
            }
            counts[0] -= 1;
            let simplices: Vec<Vec<usize>> =
                prefix.simplices().iter().map(|(s, _)| s.clone()).collect();
            let betti = reduced_betti(&simplices);
            ensure(trimmed(counts.clone()) == trimmed(betti.clone()), || {
                format!("seed {seed} prefix {len}: pairs give {counts:?}, Betti {betti:?}")
            })?;
            prefixes += 1;
        }
    }
    Ok(format!(
        "{seeds} seeds agree ({intervals} intervals); {prefixes} filtration prefixes match Betti numbers"
    ))
}

fn determinism() -> Outcome {
    let mut runs = 0;
    for seed in 0..6u64 {
        let cloud = uniform_cloud(12, 2 + seed as usize % 2, seed);
        for mode in [Mode::Simplicial, Mode::Cubical] {
            let a = tower(&cloud, mode, 2, seed).stream.to_text();
            let b = tower(&cloud, mode, 2, seed).stream.to_text();
            ensure(a == b, || format!("seed {seed} {mode}: streams differ"))?;
            if mode == Mode::Simplicial {
                let parsed = ripsapprox::EventStream::parse(&a).map_err(|e| e.to_string())?;
                let x = tower_barcode(&parsed, 1)
                    .map_err(|e| e.to_string())?
                    .to_text();
                let y = tower_barcode(&parsed, 1)
                    .map_err(|e| e.to_string())?
                    .to_text();
                ensure(x == y, || format!("seed {seed}: tower barcodes differ"))?;
            }
            runs += 1;
        }
        let r1 = reduce(
            &rips_filtration(&cloud, Metric::L2, 1, 100_000).map_err(|e| e.to_string())?,
            1,
        );
        let r2 = reduce(
            &rips_filtration(&cloud, Metric::L2, 1, 100_000).map_err(|e| e.to_string())?,
            1,
        );
        ensure(r1.to_text() == r2.to_text(), || {
            format!("seed {seed}: Rips barcodes differ")
        })?;
    }
    Ok(format!(
        "{runs} stream pairs and their barcodes byte-identical"
    ))
}

fn smoke() -> Outcome {
    let cloud = uniform_cloud(200, 6, 2024);
    let budget = Duration::from_secs(60);
    let guard = 10_000_000u64;
    let config = |mode| TowerConfig {
        mode,
        k: 2,
        seed: 1,
        guard_cells: guard,
        ..TowerConfig::default()
    };

    let start = Instant::now();
    let t = build_tower(&cloud, &config(Mode::Cubical)).map_err(|e| e.to_string())?;
    let stats = stream_stats(&t.stream);
    let elapsed = start.elapsed();
    ensure(stats.passed(), || {
        format!("cubical audits failed: {:?}", stats.audits)
    })?;
    ensure(elapsed < budget, || {
        format!("cubical pipeline took {elapsed:?}")
    })?;
    let cells = t.stream.include_count();

    // The k = 2 skeleton of the simplicial tower does not fit under the
    // guardrail for this input; it must be refused cleanly within budget.
    let start = Instant::now();
    let simplicial = build_tower(&cloud, &config(Mode::Simplicial));
    let refused = start.elapsed();
    let note = match simplicial {
        Err(Error::Guardrail { limit, .. }) => {
            ensure(refused < budget, || {
                format!("guardrail refusal took {refused:?}")
            })?;
            format!(
                "simplicial k=2 refused at {limit} inclusions in {:.1}s",
                refused.as_secs_f64()
            )
        }
        Ok(t) => {
            let stats = stream_stats(&t.stream);
            let total = start.elapsed();
            ensure(stats.passed() && total < budget, || {
                "simplicial pipeline failed".into()
            })?;
            format!(
                "simplicial k=2 {} inclusions in {:.1}s",
                t.stream.include_count(),
                total.as_secs_f64()
            )
        }
        Err(e) => return Err(e.to_string()),
    };
    Ok(format!(
        "n=200 d=6: cubical tower + stats {cells} cells in {:.2}s; {note}",
        elapsed.as_secs_f64()
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("approximation factor, L-infinity", || {
            approximation(Metric::LInf)
        }),
        ("approximation factor, Euclidean", || {
            approximation(Metric::L2)
        }),
        ("size bounds", size_bounds),
        ("scale-ladder count", scale_count),
        ("collapse statistics", survival),
        ("lattice lemmas", lattice_lemmas),
        ("complex reconstruction", reconstruction),
        ("cubical-simplicial equivalence", equivalence),
        ("barcode cross-validation", cross_validation),
        ("determinism", determinism),
        ("smoke budget", smoke),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {:>2} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {:>2} {name}: {detail} ({secs:.1}s)", i + 1);
            }
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
