//! Acceptance gate: end-to-end checks of the library's headline behaviors,
//! run as one sequential program so the expensive simulation tables are
//! shared between criteria. Prints one PASS or FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::collections::{BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use anm::discovery::{brute_force, gds, infer_direction, resit, Direction};
use anm::graph::{count_dags, cpdag, enumerate_dags, Dag, Pdag};
use anm::hsic::{hsic_pvalue, HsicOptions, PvalueMethod};
use anm::identifiability::{
    default_grid, max_abs_residual, ode_residual, sample_xy, AnmTriple, Family,
};
use anm::metrics::{shd, sid, sid_oracle};
use anm::pairs::{load_pairs, rank_and_curve};
use anm::regression::RegressionMethod;
use anm::rng::{derive_rng, derive_seed, rng_from_seed};
use anm::score::{score_graph, LAMBDA_DEFAULT};
use anm::sim::{random_dag, random_dag_with_prob, sample_nonlinear_sem, simulate, Regime, SimConfig};

const REPS: usize = 100;

type Verdict = Result<String, String>;

fn main() {
    let t0 = Instant::now();
    let tables = run_tables();
    let mut failures = 0;
    let mut report = |n: u32, name: &str, res: Verdict| match res {
        Ok(detail) => println!("criterion {n} PASS ({name}): {detail}"),
        Err(detail) => {
            failures += 1;
            println!("criterion {n} FAIL ({name}): {detail}");
        }
    };
    report(1, "linear non-gaussian recovery at p=4", criterion_1(&tables));
    report(2, "nonlinear gaussian recovery at p=4", criterion_2(&tables));
    report(3, "bivariate identifiability", criterion_3());
    report(4, "hsic gamma calibration", criterion_4());
    report(5, "intervention distance oracle agreement", criterion_5());
    report(6, "dag enumeration counts", criterion_6());
    report(7, "cpdag vs enumeration-union oracle", criterion_7());
    report(8, "reversibility residual", criterion_8());
    report(9, "score search exactness ordering", criterion_9(&tables));
    report(10, "cause-effect pairs accuracy", criterion_10());
    eprintln!("acceptance finished in {:.0?}", t0.elapsed());
    if failures > 0 {
        eprintln!("{failures} criteria failed");
        std::process::exit(1);
    }
}

#[derive(Default)]
struct TableRun {
    bf_shd: Vec<usize>,
    gds_shd: Vec<usize>,
    resit_shd: Vec<usize>,
    random_shd: Vec<usize>,
    /// Replicates where brute force <= greedy <= resit-graph score failed.
    ordering_violations: Vec<String>,
}

struct Tables {
    linear: TableRun,
    nonlinear: TableRun,
}

/// 100 replicates per regime at p=4, n=100. Every method sees the same
/// dataset per replicate; the seed scheme matches the benchmark harness so
/// these numbers reproduce a `bench` run with seed 0.
fn run_tables() -> Tables {
    Tables {
        linear: run_regime(Regime::LinearNongauss, true),
        nonlinear: run_regime(Regime::NonlinearGauss, false),
    }
}

fn run_regime(regime: Regime, with_random: bool) -> TableRun {
    let rm = match regime {
        Regime::LinearNongauss => RegressionMethod::Linear,
        Regime::NonlinearGauss => RegressionMethod::Kernel,
    };
    let rtag = match regime {
        Regime::LinearNongauss => 0u64,
        Regime::NonlinearGauss => 1,
    };
    let mut run = TableRun::default();
    for rep in 0..REPS {
        let tags = |salt: u64| [salt, rtag, 4, 100, rep as u64];
        let cfg = SimConfig {
            p: 4,
            n: 100,
            regime,
            seed: derive_seed(0, &tags(10)),
            edge_prob: None,
        };
        let (truth, data, _) = simulate(&cfg).expect("simulate");
        let truth_pdag = Pdag::from(&truth);
        let dist = |g: &Dag| shd(&truth_pdag, &Pdag::from(g)).expect("shd");

        let bf = brute_force(&data, rm, LAMBDA_DEFAULT).expect("brute force");
        let gd = gds(&data, rm, LAMBDA_DEFAULT, derive_seed(0, &tags(11))).expect("gds");
        let rs = resit(&data, rm, 0.05).expect("resit");
        run.bf_shd.push(dist(&bf.graph));
        run.gds_shd.push(dist(&gd.graph));
        run.resit_shd.push(dist(&rs.graph));
        if with_random {
            let q: f64 = derive_rng(0, &tags(12)).gen();
            let rnd = random_dag_with_prob(4, q, derive_seed(0, &tags(13))).expect("random dag");
            run.random_shd.push(dist(&rnd));
        }

        let bf_score = bf.score.as_ref().expect("bf score").total;
        let gds_score = gd.score.as_ref().expect("gds score").total;
        let resit_score =
            score_graph(&data, &rs.graph, rm, LAMBDA_DEFAULT).expect("resit score").total;
        if !(bf_score <= gds_score && gds_score <= resit_score) {
            run.ordering_violations.push(format!(
                "{} rep {rep}: brute_force {bf_score:.6}, gds {gds_score:.6}, resit {resit_score:.6}",
                regime.name()
            ));
        }
        if rep % 10 == 9 {
            eprint!(".");
        }
    }
    eprintln!(" {} replicates done", regime.name());
    run
}

fn mean(xs: &[usize]) -> f64 {
    xs.iter().sum::<usize>() as f64 / xs.len() as f64
}

fn criterion_1(tables: &Tables) -> Verdict {
    let bf = mean(&tables.linear.bf_shd);
    let gd = mean(&tables.linear.gds_shd);
    let rs = mean(&tables.linear.resit_shd);
    let rn = mean(&tables.linear.random_shd);
    let detail = format!(
        "mean dag-shd over {REPS} replicates: brute_force {bf:.2} (<= 1.2), gds {gd:.2} (<= 1.4), resit {rs:.2} (<= 2.0), random {rn:.2} (in [3.0, 6.0])"
    );
    if bf <= 1.2 && gd <= 1.4 && rs <= 2.0 && (3.0..=6.0).contains(&rn) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_2(tables: &Tables) -> Verdict {
    let bf = mean(&tables.nonlinear.bf_shd);
    let rs = mean(&tables.nonlinear.resit_shd);
    let detail = format!(
        "mean dag-shd over {REPS} replicates: brute_force {bf:.2} (<= 2.0), resit {rs:.2} (<= 2.6)"
    );
    if bf <= 2.0 && rs <= 2.6 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Nonlinear-Gaussian pairs orient; linear-Gaussian pairs accept both
/// directions, the empirically visible face of the reversibility theory.
fn criterion_3() -> Verdict {
    let g = Dag::from_edges(2, &[(0, 1)]).unwrap();
    let mut oriented = 0;
    for seed in 0..100u64 {
        let (data, _) = sample_nonlinear_sem(&g, 500, seed).map_err(|e| e.to_string())?;
        let v = infer_direction(data.column(0), data.column(1), RegressionMethod::Kernel)
            .map_err(|e| e.to_string())?;
        if v.decision == Direction::XCausesY {
            oriented += 1;
        }
    }
    let t = AnmTriple::linear_gaussian(0.8, 0.0, 1.0, 0.5).unwrap();
    let mut both = 0;
    for seed in 0..100u64 {
        let (x, y) = sample_xy(&t, 500, seed).map_err(|e| e.to_string())?;
        let v = infer_direction(&x, &y, RegressionMethod::Linear).map_err(|e| e.to_string())?;
        if v.p_forward > 0.05 && v.p_backward > 0.05 {
            both += 1;
        }
    }
    let detail = format!(
        "nonlinear-gaussian n=500 oriented {oriented}/100 (>= 90); linear-gaussian both directions accepted {both}/100 (>= 80)"
    );
    if oriented >= 90 && both >= 80 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Gamma p-values against a 10,000-shuffle permutation null on mixed
/// dependence strengths, plus uniformity of the gamma p-value under
/// independence.
fn criterion_4() -> Verdict {
    let mut band = Vec::new();
    for k in 0..50u64 {
        let mut rng = rng_from_seed(4000 + k);
        let n = 100;
        let c = 0.30 * (k as f64 + 1.0) / 50.0;
        let x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|&xi| {
                let e: f64 = StandardNormal.sample(&mut rng);
                let m = match k % 3 {
                    0 => xi,
                    1 => xi * xi,
                    _ => (2.0 * xi).sin(),
                };
                c * m + e
            })
            .collect();
        let xs = [&x[..]];
        let ys = [&y[..]];
        let gamma = hsic_pvalue(&xs, &ys, &HsicOptions::default()).map_err(|e| e.to_string())?;
        let perm = hsic_pvalue(
            &xs,
            &ys,
            &HsicOptions {
                method: PvalueMethod::Permutation { b: 10_000, seed: 77 + k },
                bandwidths: None,
            },
        )
        .map_err(|e| e.to_string())?;
        if (0.01..=0.99).contains(&gamma.p_value) {
            band.push((gamma.p_value - perm.p_value).abs());
        }
    }
    band.sort_by(f64::total_cmp);
    if band.len() < 10 {
        return Err(format!("only {} of 50 cases landed in p in [0.01, 0.99]", band.len()));
    }
    let median = band[band.len() / 2];

    let mut ps = Vec::new();
    for rep in 0..500u64 {
        let mut rng = rng_from_seed(5000 + rep);
        let x: Vec<f64> = (0..200).map(|_| StandardNormal.sample(&mut rng)).collect();
        let y: Vec<f64> = (0..200).map(|_| StandardNormal.sample(&mut rng)).collect();
        let g = hsic_pvalue(&[&x[..]], &[&y[..]], &HsicOptions::default())
            .map_err(|e| e.to_string())?;
        ps.push(g.p_value);
    }
    let ks_p = ks_uniform_pvalue(&mut ps);

    let detail = format!(
        "median |gamma - permutation| = {median:.4} over {} mixed cases (<= 0.02); null uniformity ks p = {ks_p:.3} (> 0.01)",
        band.len()
    );
    if median <= 0.02 && ks_p > 0.01 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Asymptotic Kolmogorov-Smirnov p-value against Uniform(0, 1).
fn ks_uniform_pvalue(ps: &mut [f64]) -> f64 {
    ps.sort_by(f64::total_cmp);
    let n = ps.len() as f64;
    let mut d = 0.0f64;
    for (i, p) in ps.iter().enumerate() {
        d = d.max((p - i as f64 / n).abs()).max(((i as f64 + 1.0) / n - p).abs());
    }
    let z = d * n.sqrt();
    let mut pval = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        pval += 2.0 * (-1.0f64).powi(k - 1) * (-2.0 * kf * kf * z * z).exp();
    }
    pval.clamp(0.0, 1.0)
}

fn criterion_5() -> Verdict {
    let mut disagreements = 0;
    let mut checked = 0;
    for i in 0..200u64 {
        let p = 2 + (i % 4) as usize;
        let g = random_dag(p, derive_seed(600, &[i])).unwrap();
        let h = random_dag(p, derive_seed(601, &[i])).unwrap();
        let graphical = sid(&g, &h).map_err(|e| e.to_string())?;
        let oracle = sid_oracle(&g, &h, 5, derive_seed(602, &[i])).map_err(|e| e.to_string())?;
        if graphical.bad_pairs != oracle.bad_pairs {
            disagreements += 1;
        }
        checked += 1;
    }
    let detail =
        format!("graphical vs simulation oracle on {checked} instances (p = 2..5, 5 trials each): {disagreements} disagreements");
    if disagreements == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_6() -> Verdict {
    let expected = [1usize, 3, 25, 543, 29281];
    let mut got = Vec::new();
    for p in 1..=5usize {
        got.push(enumerate_dags(p).map_err(|e| e.to_string())?.len());
    }
    let big = count_dags(7).map_err(|e| e.to_string())?;
    let detail = format!("counts for p = 1..5: {got:?}; count-only p = 7: {big}");
    if got == expected && big == 1_138_779_265 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

type Signature = (BTreeSet<(usize, usize)>, BTreeSet<(usize, usize, usize)>);

fn skeleton_and_immoralities(g: &Dag) -> Signature {
    let mut skeleton = BTreeSet::new();
    for (i, j) in g.edges() {
        skeleton.insert((i.min(j), i.max(j)));
    }
    let mut immoralities = BTreeSet::new();
    for k in 0..g.p() {
        let pa = g.parents_of(k).to_vec();
        for a in 0..pa.len() {
            for b in a + 1..pa.len() {
                let (i, j) = (pa[a], pa[b]);
                if !skeleton.contains(&(i, j)) {
                    immoralities.insert((i, k, j));
                }
            }
        }
    }
    (skeleton, immoralities)
}

/// Groups all 543 DAGs on 4 nodes by (skeleton, immoralities) and unions
/// each group's edges into a partially directed graph; that oracle must
/// reproduce `cpdag` on every member.
fn criterion_7() -> Verdict {
    let all = enumerate_dags(4).map_err(|e| e.to_string())?;
    let mut groups: HashMap<Signature, Vec<usize>> = HashMap::new();
    for (idx, g) in all.iter().enumerate() {
        groups.entry(skeleton_and_immoralities(g)).or_default().push(idx);
    }
    let class_count = groups.len();
    let mut mismatches = 0;
    for members in groups.values() {
        let mut directed = Vec::new();
        let mut undirected = Vec::new();
        let (skeleton, _) = skeleton_and_immoralities(&all[members[0]]);
        for &(i, j) in &skeleton {
            let forward = members
                .iter()
                .filter(|&&m| all[m].parents_of(j).contains(i))
                .count();
            if forward == members.len() {
                directed.push((i, j));
            } else if forward == 0 {
                directed.push((j, i));
            } else {
                undirected.push((i, j));
            }
        }
        let oracle = Pdag::from_parts(4, &directed, &undirected).map_err(|e| e.to_string())?;
        for &m in members {
            if cpdag(&all[m]) != oracle {
                mismatches += 1;
            }
        }
    }
    let detail =
        format!("all 543 dags on 4 nodes ({class_count} equivalence classes): {mismatches} mismatches");
    if mismatches == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn residual_max(t: &AnmTriple) -> Result<(f64, usize), String> {
    let grid = default_grid(t).map_err(|e| e.to_string())?;
    let points = ode_residual(t, &grid).map_err(|e| e.to_string())?;
    Ok(max_abs_residual(&points))
}

fn criterion_8() -> Verdict {
    let lin = AnmTriple::linear_gaussian(0.8, 0.0, 1.0, 0.5).unwrap();
    let (lin_max, lin_adm) = residual_max(&lin)?;

    let cubic = AnmTriple::from_families(
        &[0.0, 1.0, 0.0, 0.3],
        &Family::Gaussian { mean: 0.0, variance: 1.0 },
        &Family::Gaussian { mean: 0.0, variance: 0.5 },
    )
    .map_err(|e| e.to_string())?;
    let (cubic_max, _) = residual_max(&cubic)?;

    let matched = AnmTriple::log_mix_lin_exp_pair(
        -1.0,
        0.0,
        [-1.0, 1.0, 2.0, 0.0],
        [-1.0, 1.0, 1.0, 0.0],
    )
    .map_err(|e| e.to_string())?;
    let (matched_max, _) = residual_max(&matched)?;

    let perturbed = AnmTriple::log_mix_lin_exp_pair(
        -1.0,
        0.0,
        [-1.0, 1.1, 2.0, 0.0],
        [-1.0, 1.0, 1.0, 0.0],
    )
    .map_err(|e| e.to_string())?;
    let (perturbed_max, _) = residual_max(&perturbed)?;

    let detail = format!(
        "linear-gaussian max |r| = {lin_max:.2e} on {lin_adm} admissible points (< 1e-8); cubic {cubic_max:.2e} (> 1e-7); matched exponential pair {matched_max:.2e} (< 1e-6); 10% rate perturbation {perturbed_max:.2e} (>= 1e-3)"
    );
    if lin_max < 1e-8
        && lin_adm == 441
        && cubic_max > 1e-7
        && matched_max < 1e-6
        && perturbed_max >= 1e-3
    {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_9(tables: &Tables) -> Verdict {
    let violations: Vec<&String> = tables
        .linear
        .ordering_violations
        .iter()
        .chain(&tables.nonlinear.ordering_violations)
        .collect();
    let detail = format!(
        "brute_force <= gds <= resit-graph score on {} replicates: {} violations{}",
        2 * REPS,
        violations.len(),
        if violations.is_empty() {
            String::new()
        } else {
            format!(" (first: {})", violations[0])
        }
    );
    if violations.is_empty() {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_10() -> Verdict {
    let dir = std::env::var_os("ANM_PAIRS_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/pairs"));
    if !dir.join("pairmeta.txt").exists() {
        return Ok(format!(
            "skipped: no cause-effect pairs dataset at {} (set ANM_PAIRS_DIR to run)",
            dir.display()
        ));
    }
    let records = load_pairs(&dir).map_err(|e| e.to_string())?;
    let curve = rank_and_curve(&records, RegressionMethod::Kernel).map_err(|e| e.to_string())?;
    let last = curve.points.last().ok_or("empty curve")?;
    let detail = format!(
        "full-decision-rate weighted accuracy = {:.3} on {} ranked pairs (in [0.60, 0.84])",
        last.accuracy,
        curve.points.len()
    );
    if (0.60..=0.84).contains(&last.accuracy) {
        Ok(detail)
    } else {
        Err(detail)
    }
}
