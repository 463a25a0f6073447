//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits with a
//! failure status if any criterion fails.

mod common;

use std::sync::Mutex;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use sqrect::corpus;
use sqrect::cuts::{
    decompose_monotone_cuts, is_strictly_monotonic, is_sum_of_monotone_cuts, recompose, WeightedCut,
};
use sqrect::dumbbell::Dumbbell;
use sqrect::exact::{int, rat, Rational};
use sqrect::grid::GridComplex;
use sqrect::layout::{place, validate_layout, LayoutReport, DEFAULT_SAMPLES};
use sqrect::oracle::{brute_force_optimal, certify_with, DEFAULT_PATH_CAP};
use sqrect::phi::{
    is_minimal_compatible, iterate_phi, iterations_to_uniform, minimal_preimage, mu, phi,
};
use sqrect::solver::{solve_optimal, ModulusResult, SolveOptions};
use sqrect::vector::{Leaner, WeightVector};

const MAX_TILES: usize = 8000;

/// Solved instances kept for the layout criterion.
type Solved = Vec<(String, GridComplex, ModulusResult)>;

struct Outcome {
    passed: bool,
    detail: String,
}

fn report(id: usize, title: &str, started: Instant, o: &Outcome) {
    let status = if o.passed { "PASS" } else { "FAIL" };
    println!(
        "{status} criterion {id}: {title}: {} ({:.1}s)",
        o.detail,
        started.elapsed().as_secs_f64()
    );
}

fn solve(c: &GridComplex, exact: bool) -> ModulusResult {
    solve_optimal(
        c,
        &SolveOptions {
            exact,
            ..Default::default()
        },
    )
    .expect("solver converges")
}

fn dumbbell_suite() -> Vec<(String, Dumbbell)> {
    let mut chosen: Vec<(String, Dumbbell)> = Vec::new();
    let mut per_height = [0usize; 4];
    for (i, d) in corpus::dumbbell_corpus(2024, 400, 40)
        .into_iter()
        .enumerate()
    {
        let n = d.bar_height() as usize;
        if per_height[n] < 8 && !d.middle_tiles().is_empty() {
            per_height[n] += 1;
            chosen.push((format!("random dumbbell {i}"), d));
        }
    }
    chosen.push(("diamond dumbbell".into(), corpus::diamond_dumbbell()));
    chosen.push(("domino dumbbell".into(), corpus::domino_dumbbell()));
    chosen
}

fn middle_uniformity(solved: &Mutex<Solved>) -> Outcome {
    let suite = dumbbell_suite();
    let jobs: Vec<(String, Dumbbell)> = suite
        .iter()
        .flat_map(|(name, d)| {
            (0..=2u32)
                .map(move |k| (format!("{name} level {k}"), d.subdivide_times(k)))
                .filter(|(_, s)| s.complex().len() <= MAX_TILES)
        })
        .collect();
    let results: Vec<(String, f64, usize, bool)> = jobs
        .par_iter()
        .map(|(name, d)| {
            let r = solve(d.complex(), false);
            let rep = d.check_virtually_bar_uniform(&r.rho, 1e-7);
            solved
                .lock()
                .unwrap()
                .push((name.clone(), d.complex().clone(), r));
            (
                name.clone(),
                rep.max_deviation / rep.height,
                rep.qualifying_tiles.len(),
                rep.passed(),
            )
        })
        .collect();
    let failures: Vec<&(String, f64, usize, bool)> = results.iter().filter(|r| !r.3).collect();
    for f in &failures {
        println!("  {}: relative deviation {:e}", f.0, f.1);
    }
    let worst = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let middle: usize = results.iter().map(|r| r.2).sum();
    Outcome {
        passed: failures.is_empty() && suite.len() >= 22,
        detail: format!(
            "{} dumbbells, {} solves, {} middle tiles, worst relative deviation {:.1e}",
            suite.len(),
            results.len(),
            middle,
            worst
        ),
    }
}

fn whole_bar() -> Outcome {
    let d = corpus::diamond_dumbbell();
    let mut lines = Vec::new();
    let mut passed = true;
    for k in 1..=3 {
        let s = d.subdivide_times(k);
        let r = solve(s.complex(), false);
        let rep = s.check_uniform_on(s.bar().tiles().collect(), &r.rho, 1e-7);
        passed &= rep.passed();
        lines.push(format!("level {k}: {:.1e}", rep.max_deviation / rep.height));
    }
    Outcome {
        passed,
        detail: format!("relative deviation on the whole bar, {}", lines.join(", ")),
    }
}

fn oracle_equivalence(solved: &Mutex<Solved>) -> Outcome {
    let corpus = corpus::quadrilateral_corpus(31, 240, 10);
    let gaps: Vec<(f64, f64)> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let r = solve(c, true);
            let b = brute_force_optimal(c, DEFAULT_PATH_CAP).expect("small instance");
            let w = r
                .rho
                .values()
                .iter()
                .zip(b.rho.values())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            let gap = (r.modulus - b.modulus).abs();
            if gap > 1e-8 || w > 1e-7 {
                println!(
                    "  quadrilateral {i} {:?}: modulus gap {gap:e}, weight gap {w:e}",
                    c.tiles()
                );
            }
            solved
                .lock()
                .unwrap()
                .push((format!("quadrilateral {i}"), c.clone(), r));
            (gap, w)
        })
        .collect();
    let m = gaps.iter().map(|g| g.0).fold(0.0, f64::max);
    let w = gaps.iter().map(|g| g.1).fold(0.0, f64::max);
    Outcome {
        passed: m <= 1e-8 && w <= 1e-7,
        detail: format!(
            "{} quadrilaterals, worst modulus gap {m:.1e}, worst weight gap {w:.1e}",
            gaps.len()
        ),
    }
}

fn rectangle_law(solved: &Mutex<Solved>) -> Outcome {
    let mut worst_m: f64 = 0.0;
    let mut worst_w: f64 = 0.0;
    for cols in 1..=6i64 {
        for rows in 1..=6i64 {
            let c = GridComplex::rectangle(cols, rows).unwrap();
            let r = solve(&c, true);
            worst_m = worst_m.max((r.modulus - rows as f64 / cols as f64).abs());
            for v in r.rho.values() {
                worst_w = worst_w.max((v - 1.0 / rows as f64).abs());
            }
            solved
                .lock()
                .unwrap()
                .push((format!("{cols} x {rows} rectangle"), c, r));
        }
    }
    Outcome {
        passed: worst_m <= 1e-9 && worst_w <= 1e-8,
        detail: format!(
            "36 rectangles, worst modulus error {worst_m:.1e}, worst weight error {worst_w:.1e}"
        ),
    }
}

fn random_vector(rng: &mut StdRng, n: usize) -> WeightVector {
    loop {
        let comps: Vec<Rational> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.25) {
                    int(0)
                } else {
                    rat(rng.gen_range(0..10), rng.gen_range(1..7))
                }
            })
            .collect();
        if let Ok(x) = WeightVector::new(comps) {
            return x;
        }
    }
}

/// Runs every check on `x`, returning the names of those that fail.
fn phi_checks(x: &WeightVector, r: &Rational) -> Vec<&'static str> {
    let n = x.len();
    let h = x.height();
    let w = WeightVector::uniform(n, &h);
    let img = phi(x);
    let y = &img.y;
    let mut failed = Vec::new();
    if y.height() != h {
        failed.push("height");
    }
    if phi(&x.scaled(r)).y != y.scaled(r) {
        failed.push("homogeneity");
    }
    if (*x == w && *y != w) || (*x != w && y.area() >= x.area()) {
        failed.push("area decrease");
    }
    if !is_minimal_compatible(x, y) || img.blocked_leaners.len() != y.leaners().len() {
        failed.push("certificate");
    }
    let own = x.leaners();
    if !img.blocked_leaners.iter().all(|(l, b)| {
        own.contains(&Leaner {
            index: *b,
            direction: l.direction,
        })
    }) {
        failed.push("leaner inheritance");
    }
    match minimal_preimage(y) {
        Ok(m)
            if phi(&m).y == *y && m.area() <= x.area() && ((m.area() == x.area()) == (m == *x)) => {
        }
        _ => failed.push("minimal preimage"),
    }
    if iterate_phi(x, n - 1) != w {
        failed.push("n - 1 iterations");
    }
    if iterate_phi(x, 3 * n) != w {
        failed.push("3n iterations");
    }
    if iterations_to_uniform(x, 3 * n) != Some(mu(x).mu) {
        failed.push("iterations = mu");
    }
    failed
}

fn phi_suite() -> Outcome {
    let per_n: Vec<(usize, usize, Vec<String>)> = (2..=12usize)
        .into_par_iter()
        .map(|n| {
            let mut rng = StdRng::seed_from_u64(1000 + n as u64);
            let mut failures = Vec::new();
            for _ in 0..1000 {
                let x = random_vector(&mut rng, n);
                let r = rat(rng.gen_range(1..20), rng.gen_range(1..20));
                for name in phi_checks(&x, &r) {
                    failures.push(format!("n = {n}: {name} fails for x = {x}, r = {r}"));
                }
            }
            (n, 1000, failures)
        })
        .collect();
    let total: usize = per_n.iter().map(|p| p.1).sum();
    let failures: Vec<&String> = per_n.iter().flat_map(|p| &p.2).collect();
    for f in failures.iter().take(20) {
        println!("  {f}");
    }
    Outcome {
        passed: failures.is_empty(),
        detail: format!(
            "{total} vectors for n = 2..12, {} failed checks",
            failures.len()
        ),
    }
}

fn random_cut_sum(rng: &mut StdRng) -> (usize, usize, Vec<Vec<Rational>>) {
    let (n, m) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
    let cuts: Vec<WeightedCut> = (0..rng.gen_range(1..8))
        .map(|_| {
            let mut rows = vec![rng.gen_range(1..=n)];
            for _ in 1..m {
                let last = *rows.last().unwrap() as i64;
                rows.push((last + rng.gen_range(-1..=1)).clamp(1, n as i64) as usize);
            }
            WeightedCut {
                coefficient: rat(rng.gen_range(1..9), rng.gen_range(1..5)),
                rows,
            }
        })
        .collect();
    (n, m, recompose(n, m, &cuts))
}

fn monotone_cuts() -> Outcome {
    let mut rng = StdRng::seed_from_u64(41);
    let mut matrices = 0;
    let mut failures = Vec::new();
    while matrices < 600 {
        let (n, m, cols) = if matrices % 3 == 0 {
            // random small integer matrices, kept when they pass the predicate
            let (n, m) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
            let cols: Vec<Vec<Rational>> = (0..m)
                .map(|_| (0..n).map(|_| int(rng.gen_range(0..3))).collect())
                .collect();
            if !is_sum_of_monotone_cuts(&cols) {
                continue;
            }
            (n, m, cols)
        } else {
            random_cut_sum(&mut rng)
        };
        matrices += 1;
        match decompose_monotone_cuts(&cols) {
            Ok(cuts)
                if recompose(n, m, &cuts) == cols
                    && cuts.iter().all(|c| is_strictly_monotonic(&c.rows)) => {}
            _ => failures.push(format!("round trip fails for {cols:?}")),
        }
    }
    let mut extensions = 0;
    let mut inputs: Vec<WeightVector> = (1..=4usize)
        .flat_map(|n| (1..=4).flat_map(move |h| common::compositions(h, n)))
        .map(|c| WeightVector::new(c.into_iter().map(|v| int(v as i64)).collect()).unwrap())
        .collect();
    inputs.extend((0..60).map(|i| random_vector(&mut rng, 1 + i % 4)));
    for x in &inputs {
        for m in 1..=4usize {
            extensions += 1;
            let ext = sqrect::phi::extend_rectangle(x, m);
            let cols: Vec<Vec<Rational>> = ext.iter().map(|c| c.components().to_vec()).collect();
            let qp = common::extension_qp(x, m);
            let exact = qp.solve(20_000).exact;
            if !is_sum_of_monotone_cuts(&cols) || exact.as_deref() != Some(&cols.concat()[..]) {
                failures.push(format!(
                    "extension of {x} to {m} columns differs from the program: {:?}",
                    exact
                ));
            }
        }
    }
    for f in failures.iter().take(20) {
        println!("  {f}");
    }
    Outcome {
        passed: failures.is_empty(),
        detail: format!(
            "{matrices} round trips, {extensions} extensions, {} failures",
            failures.len()
        ),
    }
}

fn certified(c: &GridComplex, r: &ModulusResult) -> bool {
    let gap_cap = if c.len() <= 12 { 20_000 } else { 0 };
    r.feasibility_residual <= 1e-9 && certify_with(c, r, 1e-7, gap_cap).passed(1e-8)
}

fn layouts(solved: Solved) -> Outcome {
    let results: Vec<(String, Option<LayoutReport>)> = solved
        .par_iter()
        .map(|(name, c, r)| {
            if !certified(c, r) {
                return (name.clone(), None);
            }
            (
                name.clone(),
                Some(validate_layout(&place(c, r), 1e-9, DEFAULT_SAMPLES)),
            )
        })
        .collect();
    let mut failed = 0;
    let mut uncertified = 0;
    let mut exact = 0;
    let (mut area, mut overlap): (f64, f64) = (0.0, 0.0);
    for (name, rep) in &results {
        let Some(rep) = rep else {
            uncertified += 1;
            println!("  {name}: not certified optimal");
            continue;
        };
        area = area.max(rep.area_residual);
        overlap = overlap.max(rep.max_overlap);
        exact += usize::from(rep.exact_ok == Some(true));
        if !rep.passed() {
            failed += 1;
            println!("  {name}: {rep:?}");
        }
    }
    Outcome {
        passed: failed == 0 && uncertified == 0,
        detail: format!(
            "{} layouts ({exact} exact), worst area residual {area:.1e}, worst overlap {overlap:.1e}, {failed} invalid",
            results.len()
        ),
    }
}

fn main() {
    let start = Instant::now();
    let solved = Mutex::new(Vec::new());
    let mut all = true;
    let mut run = |id: usize, title: &str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        report(id, title, t, &o);
        all &= o.passed;
    };
    run(
        1,
        "dumbbell bars are uniform away from the balls",
        &mut || middle_uniformity(&solved),
    );
    run(
        2,
        "diamond dumbbell has a constant bar at levels 1-3",
        &mut whole_bar,
    );
    run(
        3,
        "cutting-plane solver matches the exhaustive program",
        &mut || oracle_equivalence(&solved),
    );
    run(4, "rectangle moduli and uniform weights", &mut || {
        rectangle_law(&solved)
    });
    run(5, "skinny cut function, exact", &mut phi_suite);
    run(
        6,
        "monotone cut round trip and rectangle extension",
        &mut monotone_cuts,
    );
    let solved = std::mem::take(&mut *solved.lock().unwrap());
    run(7, "squared rectangle layouts validate", &mut || {
        layouts(solved.clone())
    });
    println!("total {:.1}s", start.elapsed().as_secs_f64());
    if !all {
        std::process::exit(1);
    }
}
