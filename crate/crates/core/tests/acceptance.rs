//! Acceptance gate. Each test prints one PASS/FAIL line straight to stderr
//! (bypassing the test harness capture) and then asserts.

use std::io::Write;
use std::time::{Duration, Instant};

use acs6::char_class::euler_number_lemma22;
use acs6::cstruct::{
    common_line, equivalent, j_from_octonion, j_from_octonion_projective, quaternion_coordinate_form,
    random_structure, recover_x, restrict, CStructError, R6_BASIS,
};
use acs6::degree::{degree_on_rp7, mapping_degree, power_map_preimages, DegreeConfig, MapFamily};
use acs6::homotopy::{pi_j_s6, pi_xg};
use acs6::sphere::{
    random_imaginary_unit, random_tangent_vector, random_unit_octonion, sample_rng, SampleScalar,
};
use acs6::twistor::{
    companion, fiber_count_rp7, random_so7_haar, rp7_section, section_distance, so7_act, thm33_lift_identity,
    triality_cube, twistor_evaluate, Canonical, TwistorPoint,
};
use acs6::{Octonion, Rational, Scalar};

type Q = Rational;

fn report(n: u32, name: &str, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    let line = format!("acceptance {n} {verdict} {name}: {detail}\n");
    let _ = std::io::stderr().write_all(line.as_bytes());
}

fn general_octonion(seed: u64, i: u64) -> [Octonion<Q>; 3] {
    let mut rng = sample_rng(seed, i);
    std::array::from_fn(|_| {
        let k = Q::from_i64(rand::Rng::random_range(&mut rng, 1i64..=3));
        random_unit_octonion::<Q, _>(&mut rng).scale(&k)
    })
}

#[test]
fn criterion_1_algebra_identities() {
    let start = Instant::now();
    let mut failures = 0;
    for i in 0..1000 {
        let [x, y, z] = general_octonion(101, i);
        let ok = x.mul(&y).norm_sq() == x.norm_sq() * y.norm_sq()
            && x.mul(&x.mul(&y)) == x.mul(&x).mul(&y)
            && y.mul(&x).mul(&x) == y.mul(&x.mul(&x))
            && x.mul(&y).mul(&z.mul(&x)) == x.mul(&y.mul(&z).mul(&x))
            && x.mul(&y.mul(&x.mul(&z))) == x.mul(&y).mul(&x).mul(&z)
            && z.mul(&x).mul(&y).mul(&x) == z.mul(&x.mul(&y.mul(&x)));
        failures += usize::from(!ok);
    }
    let elapsed = start.elapsed();
    let ok = failures == 0 && elapsed < Duration::from_secs(10);
    report(
        1,
        "norm multiplicativity, alternativity, Moufang on 1000 exact triples",
        ok,
        &format!("{failures} failures in {elapsed:.2?} (limit 10 s)"),
    );
    assert!(ok);
}

/// `J(v)` for each basis vector of `R⁶`, straight from `(e₁(vx))x̄ / |x|²`.
fn structure_columns(x: &Octonion<Q>) -> Vec<Vec<Q>> {
    let e1 = Octonion::<Q>::basis(1);
    let n = x.norm_sq();
    R6_BASIS
        .iter()
        .map(|&k| {
            restrict(
                &e1.mul(&Octonion::basis(k).mul(x))
                    .mul(&x.conjugate())
                    .scale(&(Q::from_i64(1) / n.clone())),
            )
        })
        .collect()
}

#[test]
fn criterion_2_complex_structures_on_r6() -> Result<(), CStructError> {
    let mut round_trip = 0;
    let mut classification = 0;
    let mut blocks = 0;
    for i in 0..500 {
        let mut rng = sample_rng(202, i);
        let x: Octonion<Q> = random_unit_octonion(&mut rng);
        let j = j_from_octonion(&x)?;
        let columns = structure_columns(&x);
        let oracle_ok = (0..6).all(|c| (0..6).all(|r| j.matrix().get(r, c) == &columns[c][r]));
        if !oracle_ok || j_from_octonion_projective(&recover_x(&j)?)? != j {
            round_trip += 1;
        }
        let (c, s) = Q::random_circle_point(&mut rng);
        let rotated = Octonion::complex(c, s, 1).mul(&x);
        let y: Octonion<Q> = random_unit_octonion(&mut rng);
        let phase = y.mul(&x.conjugate());
        let y_in_orbit = (2..8).all(|k| phase.coord(k) == &Q::from_i64(0));
        if !equivalent(&x, &rotated)? || equivalent(&x, &y)? != y_in_orbit {
            classification += 1;
        }
        match quaternion_coordinate_form(&x) {
            Ok(form) if form.agrees_on_a && form.agrees_on_complement => {}
            Err(CStructError::DegenerateX) => {}
            _ => blocks += 1,
        }
    }
    let mut worst = 0.0f64;
    let mut line_failures = 0;
    for i in 0..500 {
        let mut rng = sample_rng(203, i);
        let (j1, j2) = (random_structure(&mut rng), random_structure(&mut rng));
        match common_line(&j1, &j2) {
            Ok(line) => {
                // Independent check: both structures send u to the same vector.
                let u = &line.line.u;
                let d = j1
                    .apply(u)
                    .iter()
                    .zip(j2.apply(u))
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                worst = worst.max(d).max(line.residual);
                if line.kernel_dim != 2 {
                    line_failures += 1;
                }
            }
            Err(_) => line_failures += 1,
        }
    }
    let ok = round_trip == 0 && classification == 0 && blocks == 0 && line_failures == 0 && worst < 1e-9;
    report(
        2,
        "J_x round trip, equivalence, block form (500 exact); common line (500 float)",
        ok,
        &format!(
            "round trip {round_trip}, classification {classification}, blocks {blocks}, common line {line_failures} failures; residual {worst:e} (< 1e-9)"
        ),
    );
    assert!(ok);
    Ok(())
}

#[test]
fn criterion_3_circle_invariance() {
    let mut failures = 0;
    for i in 0..1000 {
        let mut rng = sample_rng(303, i);
        let p: Octonion<Q> = random_imaginary_unit(&mut rng);
        let x: Octonion<Q> = random_unit_octonion(&mut rng);
        let (c, s) = Q::random_circle_point(&mut rng);
        let v = random_tangent_vector(&mut rng, &p);
        let t = TwistorPoint::new(p.clone(), x.clone()).unwrap();
        let rotated = t.rotate(&c, &s);
        // Oracle: (p(v y))ȳ with y = (c + p s)x, computed directly.
        let y = (Octonion::real_scalar(c.clone()) + p.scale(&s)).mul(&x);
        let direct = p.mul(&v.mul(&y)).mul(&y.conjugate());
        let base = p.mul(&v.mul(&x)).mul(&x.conjugate());
        let ok = twistor_evaluate(&t) == twistor_evaluate(&rotated) && direct == base;
        failures += usize::from(!ok);
    }
    let ok = failures == 0;
    report(
        3,
        "S¹-invariance on 1000 exact (p, x, θ, v) samples",
        ok,
        &format!("{failures} failures"),
    );
    assert!(ok);
}

#[test]
fn criterion_4_euler_number() {
    let trace = euler_number_lemma22().unwrap();
    let checks = [
        (
            trace.tensor_formula.as_str(),
            "c_1(τ_1)^2 + c_1(τ_1) c_1(τ_2) + c_2(τ_2)",
        ),
        (trace.c1_perp.as_str(), "-a"),
        (trace.c2_perp.as_str(), "a^2"),
        (trace.normal_c2.as_str(), "a^2"),
    ];
    let mismatches: Vec<String> = checks
        .iter()
        .filter(|(got, want)| got != want)
        .map(|(got, want)| format!("{got:?} ≠ {want:?}"))
        .collect();
    let ok = mismatches.is_empty() && trace.euler_number == 1;
    report(
        4,
        "c_2(τ_1 ⊗ τ_2), c(τ⊥), c_2(N) and Euler number",
        ok,
        &format!("euler number {}; mismatches {:?}", trace.euler_number, mismatches),
    );
    assert!(ok);
}

#[test]
fn criterion_5_degrees() {
    let start = Instant::now();
    let config = DegreeConfig::default();
    assert_eq!(config.trials, 3);
    let seed = 505;
    let mut problems = Vec::new();
    let mut found = Vec::new();
    let expect = |name: &str, want: i64, rp7: bool, problems: &mut Vec<String>, found: &mut Vec<String>| {
        let map: MapFamily = name.parse().unwrap();
        let run = if rp7 { degree_on_rp7 } else { mapping_degree };
        match run(&map, seed, &config) {
            Ok(r) => {
                found.push(format!("{name}:{}", r.degree));
                let good = if rp7 {
                    r.degree.abs() == want
                } else {
                    r.degree == want
                };
                if !good || r.trials.len() != 3 {
                    problems.push(format!("{name} gave {}", r.degree));
                }
                if let MapFamily::Power(k) = map {
                    for t in &r.trials {
                        let target = Octonion::from_slice(&t.target);
                        let roots = power_map_preimages(&target, k).unwrap();
                        let all_found = roots.len() == t.preimages.len()
                            && roots.iter().all(|w| {
                                t.preimages
                                    .iter()
                                    .any(|p| Octonion::from_slice(&p.point).max_abs_diff(w) < 1e-6)
                            });
                        if !all_found {
                            problems.push(format!("{name}: preimages differ from the oracle"));
                        }
                    }
                }
            }
            Err(e) => problems.push(format!("{name}: {e}")),
        }
    };
    for (name, want) in [
        ("identity", 1),
        ("squaring", 2),
        ("conjugation", -1),
        ("theta-circle", 0),
        ("cylinder-loop", 2),
    ] {
        expect(name, want, false, &mut problems, &mut found);
    }
    expect("rp7-cube", 3, true, &mut problems, &mut found);
    for k in 1..=6 {
        expect(&format!("power:{k}"), k, false, &mut problems, &mut found);
    }
    let elapsed = start.elapsed();
    let ok = problems.is_empty() && elapsed < Duration::from_secs(120);
    report(
        5,
        "mapping degrees, 3 agreeing trials each",
        ok,
        &format!(
            "{} in {elapsed:.2?} (limit 120 s); problems {problems:?}",
            found.join(" ")
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_6_companions_and_cubes() {
    let mut worst_companion = 0.0f64;
    let mut worst_section = 0.0f64;
    let mut companion_failures = 0;
    for i in 0..200 {
        let mut rng = sample_rng(606, i);
        let l = random_so7_haar(&mut rng);
        let c = match companion(&l) {
            Ok(c) => c,
            Err(_) => {
                companion_failures += 1;
                continue;
            }
        };
        worst_companion = worst_companion.max(c.residual);
        let points: Vec<Octonion<f64>> = (0..20).map(|_| random_imaginary_unit(&mut rng)).collect();
        match section_distance(&so7_act(&l, Canonical), &rp7_section(&c.a).unwrap(), &points) {
            Ok((_, d)) => worst_section = worst_section.max(d),
            Err(_) => companion_failures += 1,
        }
    }
    let mut cube_failures = 0;
    for i in 0..500 {
        let mut rng = sample_rng(607, i);
        let x: Octonion<Q> = random_unit_octonion(&mut rng);
        let p: Octonion<Q> = random_imaginary_unit(&mut rng);
        let v = random_tangent_vector(&mut rng, &p);
        // Oracle: c(x) acting on J^cn, written out with x w x̄ directly.
        let xb = x.conjugate();
        let c = |w: &Octonion<Q>| x.mul(w).mul(&xb);
        let c_inv = |w: &Octonion<Q>| xb.mul(w).mul(&x);
        let acted = c(&c_inv(&p).mul(&c_inv(&v)));
        let x3 = x.mul(&x).mul(&x);
        let cube = p.mul(&v.mul(&x3)).mul(&x3.conjugate());
        let consistent = match triality_cube(&x, &p, &v) {
            Ok(r) => r.matches_cube == (acted == cube) && r.matches_cube,
            Err(_) => acted == cube,
        };
        cube_failures += usize::from(!consistent);
    }
    let mut fiber_failures = 0;
    for i in 0..100 {
        let mut rng = sample_rng(608, i);
        let x = Octonion::from_slice(&f64::random_unit_vector(&mut rng, 8));
        fiber_failures += usize::from(fiber_count_rp7(&x) != Ok(3));
    }
    let ok = companion_failures == 0
        && worst_companion < 1e-9
        && worst_section < 1e-9
        && cube_failures == 0
        && fiber_failures == 0;
    report(
        6,
        "companions (200 float), section identity (20 points), cube (500 exact), fiber count (100)",
        ok,
        &format!(
            "isotopy residual {worst_companion:e}, section residual {worst_section:e}, companion failures {companion_failures}, cube failures {cube_failures}, fiber failures {fiber_failures}"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_7_lift_identity() {
    let mut failures = 0;
    for i in 0..500 {
        let mut rng = sample_rng(707, i);
        let p: Octonion<Q> = random_imaginary_unit(&mut rng);
        let (c, s) = Q::random_circle_point(&mut rng);
        let x = Octonion::complex(c.clone(), s.clone(), 1);
        let lift = (Octonion::real_scalar(c.clone()) - p.scale(&s)).mul(&x);
        let direct = twistor_evaluate(&TwistorPoint::new(p.clone(), x).unwrap());
        let lifted = twistor_evaluate(&TwistorPoint::new(p.clone(), lift).unwrap());
        let ok = thm33_lift_identity(&c, &s, &p) == Ok(true) && direct == lifted;
        failures += usize::from(!ok);
    }
    let ok = failures == 0;
    report(
        7,
        "lift identity on 500 exact samples",
        ok,
        &format!("{failures} failures"),
    );
    assert!(ok);
}

#[test]
fn criterion_8_homotopy_strings() {
    let mut rows = vec![
        (pi_j_s6(1).unwrap().to_string(), "ℤ/2".to_string()),
        (pi_xg(1, 1).unwrap().to_string(), "ℤ".to_string()),
        (pi_xg(1, 2).unwrap().to_string(), "ℤ ⊕ ℤ/2".to_string()),
    ];
    for k in 2..=20i64 {
        rows.push((
            pi_j_s6(k).unwrap().to_string(),
            format!("π_{k}(S⁷) ⊕ π_{}(S⁷)", k + 6),
        ));
    }
    for g in [0i64, 2, 3, 5] {
        rows.push((
            pi_xg(g, 1).unwrap().to_string(),
            format!("ℤ/{}", (2 - 2 * g).abs()),
        ));
    }
    let mismatches: Vec<&(String, String)> = rows.iter().filter(|(got, want)| got != want).collect();
    let ok = mismatches.is_empty();
    report(
        8,
        "π_k of almost complex structures on S⁶ and X_g",
        ok,
        &format!("{} strings checked; mismatches {mismatches:?}", rows.len()),
    );
    assert!(ok);
}
