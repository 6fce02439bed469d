//! Acceptance criteria 1 to 9, one PASS/FAIL line each. Runs as a plain binary so the
//! lines appear in `cargo test` output.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use ghat::action::check_representation;
use ghat::cocycle::{small_coboundary, small_coboundary_constant, trivialize_1cocycle, vanish2_explicit, TwistedAction};
use ghat::crossed::CrossedProduct;
use ghat::double::{double_from_commuting, DoubleDual, QuantumDouble};
use ghat::group::{Group, DEFAULT_ORDER_CAP};
use ghat::instances::*;
use ghat::linalg::*;
use ghat::model::{lambda_from_matrix_units, matrix_units_from_lambda, model_representation, MatrixUnitSystem};
use ghat::numerics::*;
use ghat::rep::Dual;
use ghat::twisted::{untwisted_comparison, TwistedCrossedProduct};
use ghat::verify::run_verify_suite;

const ALL: [&str; 7] = ["Z2", "Z3", "Z4", "S3", "D4", "Q8", "S4"];
const VERIFY: [&str; 6] = ["Z2", "Z3", "Z4", "S3", "D4", "Q8"];

/// Worst residual against a bound, with failures collected as text.
#[derive(Default)]
struct Tally {
    worst: f64,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, what: impl std::fmt::Display, residual: f64, bound: f64) {
        if residual.is_nan() || residual >= bound {
            self.failures.push(format!("{what}: {residual:.3e} (bound {bound:.1e})"));
        }
        if !residual.is_nan() {
            self.worst = self.worst.max(residual);
        }
    }

    fn require(&mut self, what: impl std::fmt::Display, ok: bool) {
        if !ok {
            self.failures.push(what.to_string());
        }
    }

    fn merge(&mut self, other: Tally) {
        self.worst = self.worst.max(other.worst);
        self.failures.extend(other.failures);
    }
}

fn dual(name: &str, seed: u64) -> Arc<Dual> {
    let g = Group::builtin(name, DEFAULT_ORDER_CAP).expect("builtin group");
    Arc::new(Dual::compute(&g, seed, 1e-9).expect("irreps"))
}

/// Same irreps, intertwiner bases drawn with another seed.
fn reseeded(d: &Dual, seed: u64) -> Arc<Dual> {
    let mats = d.irreps.iter().map(|r| r.matrices.clone()).collect();
    Arc::new(Dual::from_matrices(&d.group, mats, seed, d.tol).expect("same irreps"))
}

/// Runs `f` on every group concurrently and merges the tallies.
fn per_group(groups: &[&str], f: impl Fn(&str) -> Tally + Sync) -> Tally {
    let parts: Vec<Tally> = std::thread::scope(|s| {
        let hs: Vec<_> = groups.iter().map(|g| s.spawn(|| f(g))).collect();
        hs.into_iter().map(|h| h.join().expect("criterion thread")).collect()
    });
    let mut t = Tally::default();
    for p in parts {
        t.merge(p);
    }
    t
}

fn irreps() -> Tally {
    let mut t = Tally::default();
    for name in ALL {
        let g = Group::builtin(name, DEFAULT_ORDER_CAP).unwrap();
        let start = Instant::now();
        let d = Dual::compute(&g, 0, 1e-9);
        let secs = start.elapsed().as_secs_f64();
        let d = match d {
            Ok(d) => d,
            Err(e) => {
                t.require(format!("{name}: {e}"), false);
                continue;
            }
        };
        if name == "S4" {
            t.require(format!("S4 took {secs:.2}s"), secs < 10.0);
        }
        let sq: usize = d.dims().iter().map(|x| x * x).sum();
        t.require(format!("{name}: Σ dπ² = {sq} ≠ {}", g.order), sq == g.order);
        t.require(format!("{name}: class count"), d.num_classes() == g.conjugacy_classes().len());
        t.check(format!("{name}: irrep report"), d.check_irreps().max_residual(), 1e-9);
        // direct recomputation of the homomorphism, unitarity and character relations
        let mut worst: f64 = 0.0;
        for r in &d.irreps {
            for a in 0..g.order {
                let m = &r.matrices[a];
                worst = worst.max((m.adjoint() * m - eye(r.dim)).norm());
                for b in 0..g.order {
                    worst = worst.max((m * &r.matrices[b] - &r.matrices[g.mul(a, b)]).norm());
                }
            }
        }
        for r in &d.irreps {
            for s in &d.irreps {
                let ip: C64 = (0..g.order)
                    .map(|x| r.matrices[x].trace().conj() * s.matrices[x].trace())
                    .sum::<C64>()
                    / g.order as f64;
                let want = if r.class_index == s.class_index { 1.0 } else { 0.0 };
                worst = worst.max((ip - want).norm());
            }
        }
        t.check(format!("{name}: direct irrep relations"), worst, 1e-9);
    }
    t
}

fn calculus() -> Tally {
    per_group(&ALL, |name| {
        let mut t = Tally::default();
        let base = dual(name, 0);
        for seed in [0, 1] {
            let d = reseeded(&base, seed);
            let c = d.check_calculus();
            t.check(format!("{name}/{seed}: onb orthonormality"), c.orthonormality, 1e-8);
            t.check(format!("{name}/{seed}: onb completeness"), c.completeness, 1e-8);
            t.check(format!("{name}/{seed}: intertwining"), c.intertwining, 1e-8);
            t.check(format!("{name}/{seed}: Σ_k T_(π_k, π̄_k)"), c.dual_sum, 1e-8);
            t.check(format!("{name}/{seed}: T̃ relation"), c.frobenius, 1e-8);
            t.check(format!("{name}/{seed}: recoupling unitarity"), c.recoupling, 1e-8);
            t.require(format!("{name}/{seed}: dimension count"), c.dimension_count_ok);
        }
        t
    })
}

fn model() -> Tally {
    per_group(&ALL, |name| {
        let mut t = Tally::default();
        let d = dual(name, 0);
        let lam = model_representation(&d);
        let rep = check_representation(&d, &lam);
        t.check(format!("{name}: representation"), rep.max_residual(), 1e-9);
        t.check(format!("{name}: λ* = λ_bar"), rep.conjugate_adjoint, 1e-9);
        t.check(format!("{name}: commutation"), rep.commutation, 1e-9);
        let mut tr: f64 = 0.0;
        for (p, i, j) in d.coefficient_labels() {
            let want = if p == 0 && i == j { 1.0 } else { 0.0 };
            let e = lam.entry(p, i, j);
            // normalized trace computed here rather than through the library
            let got = e.trace() / e.nrows() as f64;
            tr = tr.max((got - want).norm());
        }
        t.check(format!("{name}: τ(λ_(π_ij))"), tr, 1e-9);
        let std = MatrixUnitSystem::standard(&d);
        let back = matrix_units_from_lambda(&d, &lam, std.get(0, 0));
        let units = back.units.iter().zip(&std.units).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        t.check(format!("{name}: matrix units from λ"), units, 1e-9);
        t.check(format!("{name}: λ from matrix units"), lam.max_distance(&lambda_from_matrix_units(&d, &std)), 1e-9);
        t
    })
}

/// S4 is left out: a dense basis of its level-one crossed product does not fit in memory.
fn crossed() -> Tally {
    per_group(&VERIFY, |name| {
        let mut t = Tally::default();
        let d = dual(name, 0);
        let alpha = model_action(&d);
        let cp = match CrossedProduct::build(&alpha, 1e-9) {
            Ok(c) => c,
            Err(e) => {
                t.require(format!("{name}: {e}"), false);
                return t;
            }
        };
        let n = cp.n;
        let rep = cp.report();
        t.require(format!("{name}: dimension {} ≠ N²|G|", rep.basis_rank), rep.basis_rank == n * n * d.order());
        t.check(format!("{name}: implementing"), rep.implementing, 1e-9);
        let e = cp.jones_projection();
        let want = eye(n) / re(d.order() as f64);
        t.check(format!("{name}: E_M(e) = 1/|G|"), dist2(&cp.conditional_expectation(&e), &want), 1e-10);
        let mut r = rng(41);
        for k in 0..50 {
            let coeffs: Vec<CMat> = d.coefficient_labels().iter().map(|_| random_matrix(&mut r, n, n)).collect();
            let a = cp.from_coefficients(&coeffs);
            if k < 10 {
                let back = cp.expand(&a).unwrap();
                let err = back.iter().zip(&coeffs).map(|(x, y)| dist2(x, y)).fold(0.0, f64::max);
                t.check(format!("{name}: expansion round trip"), err, 1e-10);
            }
            let b = cp.push_down(&a).unwrap();
            t.check(format!("{name}: push-down sample {k}"), dist2(&(&a * &e), &(cp.embed(&b) * &e)), 1e-10);
        }
        t.require(format!("{name}: dual fixed points"), cp.dual_fixed_point_dimension() == n * n);
        let rc = cp.relative_commutant_report();
        let per: usize = rc.per_class.iter().sum();
        t.require(format!("{name}: relative commutant {} vs {per}", rc.dimension), rc.dimension == per);
        t
    })
}

/// `|G|⁻¹ max(Σ_{π,ρ} dπ²dρ²√(dπdρ), Σ_π dπ³√dπ)`.
fn constant_oracle(dims: &[usize]) -> f64 {
    let g: usize = dims.iter().map(|d| d * d).sum();
    let mut pair = 0.0;
    let mut single = 0.0;
    for &a in dims {
        let a = a as f64;
        single += a * a * a * a.sqrt();
        for &b in dims {
            let b = b as f64;
            pair += a * a * b * b * (a * b).sqrt();
        }
    }
    pair.max(single) / g as f64
}

fn cohomology() -> Tally {
    per_group(&VERIFY, |name| {
        let mut t = Tally::default();
        let d0 = dual(name, 0);
        let d1 = reseeded(&d0, 1);
        for k in 0..25u64 {
            let (alpha, _, w) = coboundary_instance(&d0, 100 + k);
            match trivialize_1cocycle(&alpha, &w, k) {
                Ok(v) => {
                    let mut worst = (v.adjoint() * &v - eye(v.nrows())).norm();
                    for pi in 0..d0.num_classes() {
                        let rebuilt = kron(&v, &eye(d0.d(pi))) * alpha.apply(pi, &v.adjoint());
                        worst = worst.max(dist2(&rebuilt, w.get(pi)));
                    }
                    t.check(format!("{name}: trivialize instance {k}"), worst, 1e-8);
                }
                Err(e) => t.require(format!("{name}: trivialize instance {k}: {e}"), false),
            }
            let (ta, f) = product_form_instance(&d0, 200 + k);
            let ta1 = TwistedAction {
                alpha: ghat::action::DualAction { dual: d1.clone(), n: ta.alpha.n, maps: ta.alpha.maps.clone() },
                u: ta.u.clone(),
            };
            match (vanish2_explicit(&ta, &f), vanish2_explicit(&ta1, &f)) {
                (Ok(a), Ok(b)) => {
                    t.check(format!("{name}: ∂(W*) = U instance {k}"), ta.boundary_residual(&a.w), 1e-8);
                    t.check(format!("{name}: ∂(W*) = U instance {k}, second ONB"), ta1.boundary_residual(&b.w), 1e-8);
                    t.check(format!("{name}: W across ONBs instance {k}"), a.w.max_distance(&b.w), 1e-8);
                }
                (Err(e), _) | (_, Err(e)) => t.require(format!("{name}: vanish instance {k}: {e}"), false),
            }
        }
        let mut last = f64::INFINITY;
        for eps in [1e-1, 1e-2, 1e-3] {
            let (ta, k) = model_cocycle_instance(&d0, 7, Some(eps));
            match small_coboundary(&ta, &k, 7) {
                Ok(s) => {
                    t.require(format!("{name}: ‖w̄ − 1‖₂ = {:.3e} grew at δ = {:.1e}", s.distance, s.delta), s.distance <= last);
                    last = s.distance;
                    t.check(format!("{name}: small coboundary residual"), s.residual, 1e-8);
                    t.require(format!("{name}: ‖f² − f‖₂ > Cδ"), s.f_defect <= s.constant * s.delta);
                }
                Err(e) => t.require(format!("{name}: small coboundary: {e}"), false),
            }
        }
        let c = small_coboundary_constant(&d0);
        t.check(format!("{name}: constant C"), (c - constant_oracle(&d0.dims())).abs(), 1e-12);
        t
    })
}

fn double() -> Tally {
    per_group(&["Z2", "S3"], |name| {
        let mut t = Tally::default();
        let d = dual(name, 0);
        let dd = DoubleDual::build(d.clone(), DEFAULT_ORDER_CAP).unwrap();
        let lam = model_representation(&d);
        let actions = [
            ("trivial", ghat::action::DualAction::trivial(dd.dual.clone(), 1)),
            ("model", double_from_commuting(&dd, &lam, &lam, 1e-9).unwrap()),
        ];
        for (label, a) in actions {
            let qd = QuantumDouble::build(&dd, &a, 1e-9).unwrap();
            let rep = qd.report();
            t.check(format!("{name}/{label}: w representation"), rep.representation.max_residual(), 1e-8);
            t.check(format!("{name}/{label}: β_(g,g) invariance"), rep.invariance, 1e-8);
            t.require(
                format!("{name}/{label}: dim N {} vs fixed points {}", rep.dimension, rep.fixed_dimension),
                rep.dimension == rep.fixed_dimension,
            );
            if let Some(amb) = rep.ambient_fixed_dimension {
                t.require(format!("{name}/{label}: ambient fixed points {amb}"), amb == rep.dimension);
            }
        }
        t
    })
}

fn twisted() -> Tally {
    per_group(&ALL, |name| {
        let mut t = Tally::default();
        let d = dual(name, 0);
        let (alpha, _, ta) = perturbed_twisted(&d, 3);
        let tcp = TwistedCrossedProduct::build(&ta, 1e-9).unwrap();
        let rep = tcp.report();
        t.check(format!("{name}: twisted product invariants"), rep.max_residual(), 1e-9);
        t.check(format!("{name}: U identity"), rep.conjugate_identity.max(rep.conjugate_identity_intermediate), 1e-9);
        let plain = TwistedCrossedProduct::build(&TwistedAction::untwisted(&alpha), 1e-9).unwrap();
        let cp = CrossedProduct::build(&alpha, 1e-9).unwrap();
        t.check(format!("{name}: U = 1 structure constants"), untwisted_comparison(&plain, &cp), 1e-8);
        t
    })
}

fn numerics() -> Tally {
    let mut t = Tally::default();
    let mut r = rng(2024);
    for k in 0..100 {
        let (f, delta) = sample_near_projection(&mut r, 3 + k % 6, 1e-2);
        match nearest_projection(&f, delta) {
            Ok(p) => {
                let dist = dist2(&f, &p.p);
                t.require(format!("projection {k}: {dist:.3e} ≥ 6δ^(1/4)"), dist < 6.0 * delta.powf(0.25));
                t.check(format!("projection {k}: p² = p"), (&p.p * &p.p - &p.p).norm(), 1e-9);
            }
            Err(e) => t.require(format!("projection {k}: {e}"), false),
        }
    }
    for k in 0..100 {
        let (u, delta) = sample_near_unitary(&mut r, 2 + k % 6, 1e-3);
        match nearest_unitary(&u, delta) {
            Ok(v) => {
                let dist = dist2(&u, &v.v);
                let op = u.clone().singular_values().max();
                t.require(format!("unitary {k}: {dist:.3e} ≥ (3 + ‖u‖)δ"), dist < (3.0 + op) * delta);
                t.check(format!("unitary {k}: v*v = 1"), unitarity_residual(&v.v), 1e-9);
            }
            Err(e) => t.require(format!("unitary {k}: {e}"), false),
        }
    }
    for k in 0..100 {
        let size = 2 + k % 3;
        let (units, x) = sample_near_commutant(&mut r, size, 2, 1e-3);
        let eps = size as f64 * commutator_with_units(&units, &x) * 1.0001 + 1e-15;
        let got = dist2(&relative_commutant_expectation(&units, &x), &x);
        t.require(format!("relative commutant {k}: {got:.3e} ≥ ε = {eps:.3e}"), got < eps);
    }
    t
}

fn verify() -> Tally {
    let mut t = Tally::default();
    let groups: Vec<String> = VERIFY.iter().map(|s| s.to_string()).collect();
    let start = Instant::now();
    let a = run_verify_suite(&groups, 0, 1e-9);
    let secs = start.elapsed().as_secs_f64();
    t.worst = secs;
    t.require(format!("verify took {secs:.1}s"), secs < 60.0);
    for c in a.failures() {
        t.require(format!("verify: {} failed ({:.3e})", c.check, c.residual), false);
    }
    let b = run_verify_suite(&groups, 0, 1e-9);
    t.require("verify output differs between runs", a.body() == b.body());
    t
}

type Criterion = (&'static str, fn() -> Tally);

fn main() -> ExitCode {
    // libtest passes flags such as --nocapture or a filter; only a filter is honoured
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let criteria: [Criterion; 9] = [
        ("irrep completeness", irreps),
        ("intertwiner calculus", calculus),
        ("model representation", model),
        ("crossed product", crossed),
        ("cohomology", cohomology),
        ("quantum double", double),
        ("twisted crossed product", twisted),
        ("approximation bounds", numerics),
        ("verify suite", verify),
    ];
    let mut ok = true;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let label = format!("criterion {}", i + 1);
        if let Some(fl) = &filter {
            if !label.contains(fl.as_str()) && !name.contains(fl.as_str()) {
                continue;
            }
        }
        let start = Instant::now();
        let t = f();
        let secs = start.elapsed().as_secs_f64();
        let status = if t.failures.is_empty() { "PASS" } else { "FAIL" };
        let worst = if i == 8 { format!("runtime {:.1}s", t.worst) } else { format!("worst {:.3e}", t.worst) };
        println!("{label}: {status}  {name:<24} {worst}  ({secs:.1}s)");
        for msg in t.failures.iter().take(10) {
            println!("    {msg}");
        }
        ok &= t.failures.is_empty();
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
