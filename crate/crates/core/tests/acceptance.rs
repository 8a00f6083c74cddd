//! Acceptance criteria. Runs without the libtest harness and prints one
//! PASS/FAIL line per criterion; the exit status is nonzero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use cha_core::complexity::{Family, Space, assemble_report, complexity_value};
use cha_core::measures::{RadialDensity, assemble_measures};
use cha_core::pipeline::{
    CacheKey, SolutionCache, SweepConfig, TableId, compute_cell, default_golden_path, load_golden, reproduce_table,
    run_sweep,
};
use cha_core::radial::{QuantumState, SUPPORTED_STATES, node_count};

const PROPERTY_RADII: [f64; 7] = [0.1, 0.5, 1.0, 5.0, 10.0, 50.0, 100.0];
const BBM_BOUND: f64 = 6.43419;
const STAM_BOUND: f64 = 51.2477;
const NORMALIZATION_TOL: f64 = 1e-6;
const ONICESCU_RENYI2_TOL: f64 = 1e-6;
const FACTORIZATION_TOL: f64 = 1e-10;
const AFFINE_TOL: f64 = 1e-12;
const FREE_LIMIT_TOL: f64 = 3e-3;
const KINETIC_TOL: f64 = 5e-3;
const SCAN_STEP: f64 = 0.25;
/// Relative change below which consecutive scan points count as flat.
const SCAN_FLAT: f64 = 1e-6;

struct Outcome {
    pass: bool,
    detail: String,
}

fn state(label: &str) -> QuantumState {
    label.parse().expect("valid state label")
}

fn table_criterion(which: &[TableId], cache: &SolutionCache) -> Outcome {
    let golden = match load_golden(&default_golden_path()) {
        Ok(g) => g,
        Err(e) => {
            return Outcome {
                pass: false,
                detail: format!("golden data: {e}"),
            };
        }
    };
    let cfg = SweepConfig::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for &t in which {
        match reproduce_table(t, &golden, &cfg, cache) {
            Ok(cmp) => {
                pass &= cmp.passed();
                let bad: Vec<String> = cmp
                    .cells
                    .iter()
                    .filter(|c| !c.pass)
                    .map(|c| format!("{} r_c={} {} {:.3}%", c.state, c.r_c, c.space, 100.0 * c.relative_deviation))
                    .collect();
                let worst = cmp.worst().map(|c| 100.0 * c.relative_deviation).unwrap_or(f64::NAN);
                let mut s = format!(
                    "table {t}: {}/{} cells within {:.1}%, worst {worst:.4}%",
                    cmp.cells.iter().filter(|c| c.pass).count(),
                    cmp.cells.len(),
                    100.0 * t.tolerance()
                );
                if !bad.is_empty() {
                    s.push_str(&format!(" [outside: {}]", bad.join("; ")));
                }
                if !cmp.failures.is_empty() {
                    s.push_str(&format!(" [{} cells failed to compute]", cmp.failures.len()));
                }
                parts.push(s);
            }
            Err(e) => {
                pass = false;
                parts.push(format!("table {t}: {e}"));
            }
        }
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

/// Free-atom 1s position Rényi entropy ln π − 3 ln α / (1 − α).
fn free_1s_renyi_r(alpha: f64) -> f64 {
    PI.ln() - 3.0 * alpha.ln() / (1.0 - alpha)
}

/// Brute-force ∫ ρ^α d³r for ρ = e^{−2r}/π on a fine midpoint grid.
fn brute_1s_renyi_r(alpha: f64) -> f64 {
    let n = 400_000;
    let r_max = 60.0;
    let h = r_max / n as f64;
    let sum: f64 = (0..n)
        .map(|i| {
            let r = (i as f64 + 0.5) * h;
            4.0 * PI * r * r * ((-2.0 * r).exp() / PI).powf(alpha)
        })
        .sum();
    (sum * h).ln() / (1.0 - alpha)
}

/// Solves C = E_r e^{R_r(α)} for α on (0, 1) with E_r = 1/(8π).
fn infer_alpha(c: f64) -> f64 {
    let target = (c * 8.0 * PI).ln();
    let (mut lo, mut hi) = (0.05, 0.95);
    // R_r(α) decreases with α
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if free_1s_renyi_r(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn criterion_table_ii(cache: &SolutionCache) -> Outcome {
    let brute = brute_1s_renyi_r(0.6);
    let closed = free_1s_renyi_r(0.6);
    let alpha = infer_alpha(5.76468568);
    let oracle_ok = (brute - closed).abs() < 1e-6 && (alpha - 0.6).abs() < 1e-6;
    let table = table_criterion(&[TableId::II], cache);
    Outcome {
        pass: oracle_ok && table.pass,
        detail: format!(
            "inferred alpha {alpha:.9} (brute-force R_r(3/5) {brute:.9} vs closed form {closed:.9}); {}",
            table.detail
        ),
    }
}

/// Counts the alternating extrema of a sequence, ignoring flat stretches.
fn extrema(rc: &[f64], v: &[f64]) -> Vec<(bool, f64, f64)> {
    let mut kept: Vec<(f64, f64)> = vec![(rc[0], v[0])];
    for (&x, &y) in rc.iter().zip(v).skip(1) {
        let last = kept.last().unwrap().1;
        if (y - last).abs() > SCAN_FLAT * last.abs() {
            kept.push((x, y));
        }
    }
    let mut out = Vec::new();
    for w in kept.windows(3) {
        let (a, b, c) = (w[0].1, w[1].1, w[2].1);
        if b > a && b > c {
            out.push((true, w[1].0, b));
        } else if b < a && b < c {
            out.push((false, w[1].0, b));
        }
    }
    out
}

fn criterion_extrema(cache: &SolutionCache) -> Outcome {
    let n = ((40.0 - 0.5) / SCAN_STEP).round() as usize;
    let cfg = SweepConfig {
        states: vec![state("2s")],
        rc_values: (0..=n).map(|k| 0.5 + k as f64 * SCAN_STEP).collect(),
        b_values: vec![1.0],
        ..SweepConfig::default()
    };
    let outcome = match run_sweep(&cfg, cache) {
        Ok(o) if o.failures.is_empty() => o,
        Ok(o) => {
            return Outcome {
                pass: false,
                detail: format!("{} scan cells failed", o.failures.len()),
            };
        }
        Err(e) => {
            return Outcome {
                pass: false,
                detail: e.to_string(),
            };
        }
    };
    let rc: Vec<f64> = outcome.records.iter().map(|r| r.report.r_c).collect();
    let v: Vec<f64> = outcome
        .records
        .iter()
        .map(|r| r.report.get(Family::ES, Space::Position, 1.0).unwrap())
        .collect();
    let ex = extrema(&rc, &v);
    let shape_ok = ex.len() == 2
        && ex[0].0
        && (3.0..=6.0).contains(&ex[0].1)
        && ex[0].2 > 3.0
        && !ex[1].0
        && (8.0..=12.0).contains(&ex[1].1)
        && ex[1].2 < 2.35;
    let listing: Vec<String> = ex
        .iter()
        .map(|(is_max, x, y)| format!("{} at r_c={x} value {y:.6}", if *is_max { "max" } else { "min" }))
        .collect();
    Outcome {
        pass: shape_ok,
        detail: format!("{} extrema: {}", ex.len(), listing.join(", ")),
    }
}

fn criterion_free_limit(cache: &SolutionCache) -> Outcome {
    let cfg = SweepConfig::default();
    let rec = match compute_cell(state("1s"), 100.0, &cfg, cache) {
        Ok(r) => r,
        Err(e) => {
            return Outcome {
                pass: false,
                detail: e.to_string(),
            };
        }
    };
    let m = &rec.measures;
    let checks = [
        ("S_r", m.s_r, 4.14473),
        ("S_p", m.s_p, 2.4218),
        ("R_r", m.r_r, 4.97592),
        ("R_p", m.r_p, 1.23727),
        ("I_r", m.i_r, 4.0),
        ("I_p", m.i_p, 12.0),
        ("E_r", m.e_r, 0.0397887),
        ("E_p", m.e_p, 0.20898),
    ];
    let mut pass = true;
    let mut worst = (0.0, "");
    for (name, got, want) in checks {
        let dev = ((got - want) / want).abs();
        pass &= dev <= FREE_LIMIT_TOL;
        if dev > worst.0 {
            worst = (dev, name);
        }
    }
    Outcome {
        pass,
        detail: format!(
            "8 scalars within {:.1}%, worst {} at {:.4}%",
            100.0 * FREE_LIMIT_TOL,
            worst.1,
            100.0 * worst.0
        ),
    }
}

fn property_cfg() -> SweepConfig {
    SweepConfig {
        states: SUPPORTED_STATES.iter().map(|s| state(s)).collect(),
        rc_values: PROPERTY_RADII.to_vec(),
        b_values: vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0, 2.0],
        ..SweepConfig::default()
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn criterion_properties(cache: &SolutionCache) -> (Outcome, Outcome) {
    let cfg = property_cfg();
    let mut violations: Vec<String> = Vec::new();
    let mut kinetic_worst = (0.0, String::new());
    let mut kinetic_failures = 0;
    let mut cells = 0;
    for &st in &cfg.states {
        let mut last_energy = f64::INFINITY;
        for &rc in &cfg.rc_values {
            let tag = format!("{st} r_c={rc}");
            let key = CacheKey::new(st, rc, &cfg.solver, &cfg.momentum);
            let sol = match cache.get_or_compute(&key, &cfg.solver, &cfg.momentum) {
                Ok(s) => s,
                Err(e) => {
                    violations.push(format!("{tag}: {e}"));
                    kinetic_failures += 1;
                    continue;
                }
            };
            cells += 1;
            let rd = RadialDensity::from_position(&sol.radial);
            let pd = RadialDensity::from_momentum(&sol.momentum);
            if (rd.mass() - 1.0).abs() > NORMALIZATION_TOL || (sol.momentum.norm() - 1.0).abs() > NORMALIZATION_TOL {
                violations.push(format!("{tag}: norms {} {}", rd.mass(), sol.momentum.norm()));
            }
            let nodes = node_count(&sol.radial);
            if nodes != st.radial_nodes() {
                violations.push(format!("{tag}: {nodes} nodes"));
            }
            if !(sol.radial.energy < last_energy) {
                violations.push(format!("{tag}: energy {} not below {last_energy}", sol.radial.energy));
            }
            last_energy = sol.radial.energy;
            let m = match assemble_measures(&sol.radial, &sol.momentum, cfg.alpha, cfg.beta) {
                Ok(m) => m,
                Err(e) => {
                    violations.push(format!("{tag}: {e}"));
                    continue;
                }
            };
            if m.s_t < BBM_BOUND {
                violations.push(format!("{tag}: S_t = {}", m.s_t));
            }
            for (sp, i, s) in [("r", m.i_r, m.s_r), ("p", m.i_p, m.s_p)] {
                if i * (2.0 * s / 3.0).exp() < STAM_BOUND {
                    violations.push(format!("{tag}: Fisher-Shannon product in {sp} below bound"));
                }
            }
            for (sp, dens, e) in [("r", &rd, m.e_r), ("p", &pd, m.e_p)] {
                match dens.renyi(2.0) {
                    Ok(r2) if rel((-r2).exp(), e) <= ONICESCU_RENYI2_TOL => {}
                    other => violations.push(format!("{tag}: E_{sp} vs Renyi-2 {other:?}")),
                }
            }
            let report = match assemble_report(&m, &cfg.b_values) {
                Ok(r) => r,
                Err(e) => {
                    violations.push(format!("{tag}: {e}"));
                    continue;
                }
            };
            for family in Family::ALL {
                for &b in &cfg.b_values {
                    let c = |s| report.get(family, s, b).unwrap();
                    let prod = c(Space::Position) * c(Space::Momentum);
                    if rel(c(Space::Total), prod) > FACTORIZATION_TOL {
                        violations.push(format!("{tag}: C_t != C_r C_p for {family} b={b}"));
                    }
                }
                for space in Space::ALL {
                    let (a, d) = cha_core::complexity::factors(&m, family, space);
                    let base = report.get(family, space, 0.0).unwrap();
                    if rel(base, a) > AFFINE_TOL {
                        violations.push(format!("{tag}: {family}{space} at b=0"));
                    }
                    for &b in &cfg.b_values {
                        let v = report.get(family, space, b).unwrap();
                        let expect = complexity_value(base, d, b).unwrap();
                        if rel(v, expect) > AFFINE_TOL {
                            violations.push(format!("{tag}: {family}{space} not affine in b"));
                        }
                    }
                }
            }
            let dev = rel(m.p2_momentum, m.p2);
            if dev > KINETIC_TOL {
                kinetic_failures += 1;
            }
            if dev > kinetic_worst.0 {
                kinetic_worst = (dev, tag.clone());
            }
        }
    }
    let props = Outcome {
        pass: violations.is_empty() && cells == 56,
        detail: if violations.is_empty() {
            format!("{cells} cells, all properties hold")
        } else {
            format!("{cells} cells, {} violations: {}", violations.len(), violations.join("; "))
        },
    };
    let kinetic = Outcome {
        pass: kinetic_failures == 0 && cells == 56,
        detail: format!(
            "{cells} cells, {kinetic_failures} outside {:.1}%, worst {:.4}% at {}",
            100.0 * KINETIC_TOL,
            100.0 * kinetic_worst.0,
            kinetic_worst.1
        ),
    };
    (props, kinetic)
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cache = SolutionCache::in_memory();
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    results.push((1, "Table I reproduction", table_criterion(&[TableId::I], &cache)));
    results.push((2, "Table II reproduction", criterion_table_ii(&cache)));
    results.push((3, "Table III reproduction and cited references", table_criterion(&[TableId::III, TableId::IIIRef], &cache)));
    results.push((4, "Table IV reproduction", table_criterion(&[TableId::IV], &cache)));
    results.push((5, "2s nodal-state extrema", criterion_extrema(&cache)));
    results.push((6, "free-atom limit", criterion_free_limit(&cache)));
    let (props, kinetic) = criterion_properties(&cache);
    results.push((7, "property suite", props));
    results.push((8, "cross-space kinetic check", kinetic));

    let mut all = true;
    for (n, name, o) in &results {
        all &= o.pass;
        println!("{} criterion {n} ({name}): {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!(
        "{} of {} criteria passed in {:.1} s",
        results.iter().filter(|r| r.2.pass).count(),
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if all { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
