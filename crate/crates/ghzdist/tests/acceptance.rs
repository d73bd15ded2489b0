//! Acceptance suite: one test per release criterion, each printing a single
//! verdict line (run with `-- --nocapture` to see the PASS lines too).
//!
//! Criteria are asserted exactly as stated, at the stated tolerances. Where
//! the mathematics refuses a claim, the test fails honestly rather than
//! weakening the check; the verdict line carries the evidence.

use std::time::Instant;

use ghzdist::activation::{
    seesaw_estimate, single_kraus_dominance_check, to_float, verify_filter_identity,
    witness_consistency,
};
use ghzdist::channels::{jamiolkowski_of_map, theta_sol, SeparableMap};
use ghzdist::depolarize::{delta_closed, delta_protocol};
use ghzdist::exactmat::{partial_transpose, psd_check, rank, RMatrix, SubsystemShape};
use ghzdist::lemmas::{half_lambda_cone, verify_unique_solution, LambdaParam};
use ghzdist::pptgen::ppt_crosscheck;
use ghzdist::qcore::{all_zero_state, ghz_projector, max_mixed, shifts_state, shifts_upb};
use ghzdist::rat::{parse_rat, rat, Rat};
use ghzdist::sampling;
use num_traits::{One, Zero};

#[test]
fn criterion_01_depolarization_identities_and_route_agreement() {
    let started = Instant::now();
    let mut identity_failures = Vec::new();
    let mut first_disagreement: Option<(usize, usize)> = None;
    let mut agreements = 0usize;
    for n in 2..=5usize {
        let d = 1usize << n;
        let eye = RMatrix::identity(d);
        let phi = ghz_projector(n).unwrap();
        for (label, m) in [("identity", &eye), ("ghz", &phi)] {
            if &delta_closed(m, n).unwrap() != m || &delta_protocol(m, n).unwrap() != m {
                identity_failures.push(format!("n={n} {label}"));
            }
        }
        let mut rng = sampling::rng(0xacc0_0100 + n as u64);
        for i in 0..25 {
            let rho = sampling::state(&mut rng, d);
            if delta_closed(&rho, n).unwrap() == delta_protocol(&rho, n).unwrap() {
                agreements += 1;
            } else {
                if first_disagreement.is_none() {
                    first_disagreement = Some((n, i));
                }
                // one counterexample settles the clause for this n
                break;
            }
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    let pass = identity_failures.is_empty() && first_disagreement.is_none();
    let line = format!(
        "criterion 1: {} — fixed points {}; closed form vs protocol mixture: {} ({elapsed:.1}s, target < 10s)",
        if pass { "PASS" } else { "FAIL" },
        if identity_failures.is_empty() {
            "hold for N=2..5 on both routes".to_string()
        } else {
            format!("broken at {identity_failures:?}")
        },
        match first_disagreement {
            None => format!("agree on all random states ({agreements} checked)"),
            Some((n, i)) => format!(
                "disagree at n={n} random index {i}; the branch mixture dephases without \
                 averaging conjugate sectors, so it fixes the family basis but is not the \
                 projection onto it"
            ),
        }
    );
    println!("{line}");
    assert!(pass, "{line}");
}

#[test]
fn criterion_02_jamiolkowski_of_depolarization_is_the_solution_point() {
    let mut bad = Vec::new();
    for n in 2..=4usize {
        let theta = jamiolkowski_of_map(1 << n, |e| delta_closed(e, n)).unwrap();
        if theta != theta_sol(n).unwrap() {
            bad.push(n);
        }
    }
    let pass = bad.is_empty();
    let line = format!(
        "criterion 2: {} — Jamiolkowski operator of the depolarization equals the solution point for N=2..4{}",
        if pass { "PASS" } else { "FAIL" },
        if pass { String::new() } else { format!(" (mismatch at N={bad:?})") }
    );
    println!("{line}");
    assert!(pass, "{line}");
}

#[test]
fn criterion_03_symbolic_ppt_agrees_with_direct_partial_transposes() {
    let mut disagreements = Vec::new();
    let mut checked = 0usize;
    for n in [2usize, 3] {
        let mut rng = sampling::rng(0xacc0_0300 + n as u64);
        for i in 0..50 {
            let coeffs = sampling::theta_coeffs(&mut rng, n, 4, 3).unwrap();
            let rep = ppt_crosscheck(&coeffs).unwrap();
            checked += rep.subsets.len();
            if !rep.routes_agree {
                disagreements.push((n, i));
            }
        }
    }
    let pass = disagreements.is_empty();
    let line = format!(
        "criterion 3: {} — symbolic vs direct PPT verdicts on 100 random coefficient matrices, {checked} subset checks, {} disagreements",
        if pass { "PASS" } else { "FAIL" },
        disagreements.len()
    );
    println!("{line}");
    assert!(pass, "{line}");
}

#[test]
fn criterion_04_reduced_system_uniqueness_with_certificates() {
    let lambdas = ["51/100", "3/4", "9/10", "99/100"];
    let mut failed = Vec::new();
    let mut lines = Vec::new();
    for n in [2usize, 3, 4] {
        for l in lambdas {
            let started = Instant::now();
            let lam = LambdaParam::new(parse_rat(l).unwrap()).unwrap();
            let rep = verify_unique_solution(n, &lam).unwrap();
            let elapsed = started.elapsed().as_secs_f64();
            if !rep.pass {
                let missing = rep
                    .certificates
                    .iter()
                    .filter(|(_, c)| c.is_none())
                    .map(|(t, _)| t.clone())
                    .collect::<Vec<_>>();
                failed.push(format!(
                    "n={n} lambda={l}: unique={} missing certificates={missing:?}",
                    rep.enumeration_unique
                ));
            }
            lines.push(format!("n={n} lambda={l} {:.1}s", elapsed));
        }
    }
    let pass = failed.is_empty();
    let line = format!(
        "criterion 4: {} — single-point enumeration plus 20 certificates for N in {{2,3,4}} x 4 lambdas (target < 60s each; {}){}",
        if pass { "PASS" } else { "FAIL" },
        lines.join(", "),
        if pass {
            String::new()
        } else {
            format!(
                "; at N=2 the region is a segment (a second vertex satisfies every row), so \
                 uniqueness and five upper/lower bounds have no certificate: {failed:?}"
            )
        }
    );
    println!("{line}");
    assert!(pass, "{line}");
}

#[test]
fn criterion_05_half_lambda_cone_structure() {
    let n2 = half_lambda_cone(2).unwrap();
    let n3 = half_lambda_cone(3).unwrap();
    let generators_match = n2.vertex_is_sol_only && n2.rays_match_claimed;
    let coincide = n2.polyhedron.vertices == n3.polyhedron.vertices
        && n2.polyhedron.rays == n3.polyhedron.rays;
    let fixed_output = n2.fixed_output_vertices_ok
        && n2.fixed_output_rays_ok
        && n3.fixed_output_vertices_ok
        && n3.fixed_output_rays_ok;
    let pass = generators_match && coincide && fixed_output;
    let line = format!(
        "criterion 5: {} — N=2 generator classes {}: {} vertices/{} rays (claimed 1/3, and two claimed classes violate the sign constraints); N=3 coincidence {}: N=3 is a strict sub-cone ({} vertex/{} rays); fixed-output property {} for every vertex and ray at both sizes",
        if pass { "PASS" } else { "FAIL" },
        if generators_match { "match" } else { "do not match" },
        n2.polyhedron.vertices.len(),
        n2.polyhedron.rays.len(),
        if coincide { "holds" } else { "fails" },
        n3.polyhedron.vertices.len(),
        n3.polyhedron.rays.len(),
        if fixed_output { "holds" } else { "fails" },
    );
    println!("{line}");
    assert!(pass, "{line}");
}

#[test]
fn criterion_06_filter_identity_on_random_triples() {
    let h_dims = [2usize, 2];
    let mut rng = sampling::rng(0xacc0_0600);
    let mut failures = 0usize;
    let mut nus = std::collections::BTreeSet::new();
    for _ in 0..20 {
        let rho = sampling::state(&mut rng, 16);
        let sigma = sampling::state(&mut rng, 4);
        let zs: Vec<RMatrix> = (0..10)
            .map(|_| sampling::symmetric_matrix(&mut rng, 4, 4, 3))
            .collect();
        let rep = verify_filter_identity(&rho, &sigma, &h_dims, &zs).unwrap();
        if !rep.pass {
            failures += 1;
        }
        if let Some(nu) = rep.nu {
            nus.insert(ghzdist::rat::fmt_rat(&nu));
        }
    }
    let pass = failures == 0 && !nus.is_empty();
    let line = format!(
        "criterion 6: {} — contraction identity exact on 20 random triples x 10 Z each at N=2; nu values {:?}; {failures} failures",
        if pass { "PASS" } else { "FAIL" },
        nus.iter().collect::<Vec<_>>()
    );
    println!("{line}");
    assert!(pass, "{line}");
}

#[test]
fn criterion_07_witness_consistency() {
    let mut rng = sampling::rng(0xacc0_0700);
    let mut checked = 0usize;
    let mut bad = 0usize;
    for n in [2usize, 3] {
        for dh in [2usize, 3] {
            for _ in 0..5 {
                let rho = sampling::state(&mut rng, dh << n);
                let sigma = sampling::symmetric_matrix(&mut rng, dh, 4, 3);
                let lam = LambdaParam::new(rat(2, 3)).unwrap();
                let (_, _, equal) = witness_consistency(&rho, n, &lam, &sigma).unwrap();
                checked += 1;
                if !equal {
                    bad += 1;
                }
            }
        }
    }
    let pass = checked >= 20 && bad == 0;
    let line = format!(
        "criterion 7: {} — witness contraction equals direct evaluation exactly on {checked} random instances; {bad} mismatches",
        if pass { "PASS" } else { "FAIL" }
    );
    println!("{line}");
    assert!(pass, "{line}");
}

#[test]
fn criterion_08_shifts_state_facts() {
    let sigma = shifts_state();
    let unit_trace = sigma.trace() == Rat::one();
    let rank_ok = rank(&sigma) == 4;
    let upb = shifts_upb();
    let orthogonal = upb.iter().all(|v| {
        let col = RMatrix::col_vec(v);
        (&sigma * &col).is_zero_matrix()
    });
    let shape = SubsystemShape::qubits(3);
    let mut ppt_ok = true;
    for party in 0..3 {
        let pt = partial_transpose(&sigma, &shape, &[party]).unwrap();
        ppt_ok &= psd_check(&pt).unwrap().is_psd();
    }
    let pass = unit_trace && rank_ok && orthogonal && ppt_ok;
    let line = format!(
        "criterion 8: {} — shifts state: unit trace {unit_trace}, rank-4 {rank_ok}, orthogonal to all 4 basis vectors {orthogonal}, positive partial transpose on all three cuts {ppt_ok}",
        if pass { "PASS" } else { "FAIL" }
    );
    println!("{line}");
    assert!(pass, "{line}");
}

#[test]
fn criterion_09_single_kraus_dominance() {
    let mut rng = sampling::rng(0xacc0_0900);
    let mut checked = 0usize;
    let mut violations = 0usize;
    let mut attempts = 0usize;
    while checked < 10 && attempts < 60 {
        attempts += 1;
        let rho = sampling::state(&mut rng, 4);
        let terms = 2 + (attempts % 2);
        let kraus: Vec<Vec<RMatrix>> = (0..terms)
            .map(|_| (0..2).map(|_| sampling::matrix(&mut rng, 2, 2, 2, 2)).collect())
            .collect();
        let omega = match SeparableMap::new(kraus) {
            Ok(m) => m,
            Err(_) => continue,
        };
        match single_kraus_dominance_check(&rho, &omega) {
            Ok(rep) => {
                checked += 1;
                if !rep.holds {
                    violations += 1;
                }
            }
            Err(_) => continue, // zero-weight draw
        }
    }
    let pass = checked >= 10 && violations == 0;
    let line = format!(
        "criterion 9: {} — multi-term fidelity never beat the best single term on {checked} random separable maps; {violations} violations",
        if pass { "PASS" } else { "FAIL" }
    );
    println!("{line}");
    assert!(pass, "{line}");
}

// plain-f64 brute force over product filters, independent of the library path
fn grid_best_n2(rho: &[[f64; 4]; 4]) -> f64 {
    let phi: [[f64; 4]; 4] = {
        let mut p = [[0.0; 4]; 4];
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            p[i][j] = 0.5;
        }
        p
    };
    let grid = [-1.0f64, -0.5, 0.0, 0.5, 1.0];
    let mut mats = Vec::new();
    for a in grid {
        for b in grid {
            for c in grid {
                for d in grid {
                    if a != 0.0 || b != 0.0 || c != 0.0 || d != 0.0 {
                        mats.push([[a, b], [c, d]]);
                    }
                }
            }
        }
    }
    let mut best = 0.0f64;
    for m1 in &mats {
        for m2 in &mats {
            // k = m1 (x) m2, filtered = k rho k^T
            let mut k = [[0.0f64; 4]; 4];
            for i in 0..2 {
                for j in 0..2 {
                    for p in 0..2 {
                        for q in 0..2 {
                            k[2 * i + p][2 * j + q] = m1[i][j] * m2[p][q];
                        }
                    }
                }
            }
            let mut krho = [[0.0f64; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    for l in 0..4 {
                        krho[i][j] += k[i][l] * rho[l][j];
                    }
                }
            }
            let mut filtered = [[0.0f64; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    for l in 0..4 {
                        filtered[i][j] += krho[i][l] * k[j][l];
                    }
                }
            }
            let weight: f64 = (0..4).map(|i| filtered[i][i]).sum();
            if weight <= 1e-12 {
                continue;
            }
            let mut num = 0.0f64;
            for i in 0..4 {
                for j in 0..4 {
                    num += phi[i][j] * filtered[j][i];
                }
            }
            best = best.max(num / weight);
        }
    }
    best
}

#[test]
fn criterion_10_seesaw_reference_values() {
    let mut notes = Vec::new();
    let mut pass = true;

    for n in [2usize, 3] {
        let r = seesaw_estimate(&to_float(&ghz_projector(n).unwrap()), n, 6, 2, 41).unwrap();
        let ok = r.best >= 1.0 - 1e-6 && r.best <= 1.0 + 1e-9 && r.monotone_ok;
        pass &= ok;
        notes.push(format!("ghz n={n}: {:.9} ({})", r.best, if ok { "ok" } else { "BAD" }));
    }

    let r = seesaw_estimate(&to_float(&all_zero_state(2).unwrap()), 2, 8, 3, 42).unwrap();
    let ok = (r.best - 0.5).abs() <= 1e-6 && r.monotone_ok;
    pass &= ok;
    notes.push(format!("all-zero: {:.9} ({})", r.best, if ok { "ok" } else { "BAD" }));

    let mm = max_mixed(2).unwrap();
    let r = seesaw_estimate(&to_float(&mm), 2, 8, 4, 43).unwrap();
    let mut rho_arr = [[0.0f64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let v = mm.at(i, j);
            rho_arr[i][j] = if v.is_zero() { 0.0 } else { 0.25 };
        }
    }
    let grid = grid_best_n2(&rho_arr);
    let ok = (r.best - 0.5).abs() <= 1e-6 && (grid - 0.5).abs() <= 1e-9 && r.monotone_ok;
    pass &= ok;
    notes.push(format!(
        "max-mixed: seesaw {:.9}, grid {:.9} ({})",
        r.best,
        grid,
        if ok { "ok" } else { "BAD" }
    ));

    let line = format!(
        "criterion 10: {} — seesaw reference values within tolerance, monotone per sweep: {}",
        if pass { "PASS" } else { "FAIL" },
        notes.join("; ")
    );
    println!("{line}");
    assert!(pass, "{line}");
}
