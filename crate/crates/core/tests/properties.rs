//! Property tests for the invariants of each module. Proptest runs from a
//! fixed seed so statistical checks are reproducible.

use fermisig::cli::{
    parse_domain_spec, run_command, to_json, BoundarySpec, Command, ConformalSpec, DomainSpec, DomainSpecFile,
    FactorSpec, FlatSpec, GraphSpec, ReportDocument, RunOptions,
};
use fermisig::dirac::{evolve_massless, km_regular, slice_norm, GammaAlgebra, Grid, SpinorField, C64};
use fermisig::expr::{BinOp, Expression, Func, Node, Var};
use fermisig::geometry::{
    cell_area, diamond_curvature_integral, random_simple_domain, validate_domain, volume, volume_estimate,
    ConformalDomain, ConformalFactor, Domain, FlatDomain, GraphDomain, Point, Polyline, RegionSelector,
    SimpleDomain, ValidatedDomain, VolumeMethod,
};
use fermisig::inverse::{
    bound_spacelike, bound_timelike, cell_diagonal_curves, localized_hs_norm, reconstruct_volume_density,
};
use fermisig::geometry::conformal_curve_length;
use fermisig::sigop::{
    build_conformal, build_flat_massless, build_massive_galerkin, build_massive_kernel, build_simple,
    HermitianOperator,
};
use fermisig::quad::QuadratureSpec;
use fermisig::spectral::{odd_trace, spectrum, trace_power};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use rand::Rng;
use std::f64::consts::PI;

fn config(cases: u32) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(0x5eed), failure_persistence: None, ..Config::default() }
}

fn simple_strategy() -> impl Strategy<Value = SimpleDomain> {
    (any::<u64>(), 0u64..1000, 1usize..6, 0.5f64..3.0).prop_map(|(s, k, c, b)| random_simple_domain(s, k, c, b))
}

/// A non-timelike polyline from 0 to 0 over `[0, b]` on one side of the
/// axis, never touching it in the interior.
fn boundary(b: f64, xs: &[f64], heights: &[f64], sign: f64) -> Polyline {
    let mut xv = vec![0.0];
    let mut tv = vec![0.0];
    for (&x, &a) in xs.iter().zip(heights) {
        let (xp, hp) = (*xv.last().unwrap(), tv.last().unwrap() * sign);
        let dx = x - xp;
        let cap = x.min(b - x);
        let h = (a * cap).clamp((hp - dx).max(0.0), (hp + dx).min(cap));
        xv.push(x);
        tv.push(sign * h);
    }
    xv.push(b);
    tv.push(0.0);
    Polyline::new(xv, tv)
}

fn graph_strategy() -> impl Strategy<Value = GraphDomain> {
    (0.5f64..3.0, prop::collection::vec((0.02f64..0.98, 0.2f64..1.0, 0.0f64..1.0), 1..5)).prop_map(|(b, v)| {
        let mut v = v;
        v.sort_by(|a, c| a.0.total_cmp(&c.0));
        v.dedup_by(|a, c| (a.0 - c.0).abs() < 1e-3);
        let xs: Vec<f64> = v.iter().map(|p| p.0 * b).collect();
        let up: Vec<f64> = v.iter().map(|p| p.1).collect();
        let lo: Vec<f64> = v.iter().map(|p| p.2).collect();
        GraphDomain::new(b, boundary(b, &xs, &up, 1.0), boundary(b, &xs, &lo, -1.0))
    })
}

fn validated_simple(s: &SimpleDomain) -> ValidatedDomain {
    validate_domain(Domain::Simple(s.clone())).unwrap()
}

fn conformal_on(base: FlatDomain, f: &str) -> ValidatedDomain {
    validate_domain(Domain::Conformal(ConformalDomain { base, factor: ConformalFactor::expression(f).unwrap() }))
        .unwrap()
}

fn sorted_abs(v: &[f64]) -> Vec<f64> {
    let mut a: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    a.sort_by(|x, y| y.total_cmp(x));
    a
}

// ---------------------------------------------------------------- geometry

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn domains_lie_in_the_bounding_diamond(s in simple_strategy(), g in graph_strategy(), seed in any::<u64>()) {
        let mut r = fermisig::rng::stream(seed, 0);
        for d in [validated_simple(&s), validate_domain(Domain::Graph(g)).unwrap()] {
            let b = d.b();
            for _ in 0..400 {
                let p = Point::new(b * (r.random::<f64>() - 0.5), b * r.random::<f64>());
                if d.contains(p) {
                    prop_assert!(p.t.abs() < p.x.min(b - p.x) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn cell_areas_sum_to_the_volume(s in simple_strategy()) {
        let d = validated_simple(&s);
        let k = s.cells();
        let total: f64 = (0..k).flat_map(|a| (0..k).map(move |c| (a, c))).map(|(a, c)| cell_area(&d, a, c).unwrap()).sum();
        let exact = volume(&d, &RegionSelector::Whole, VolumeMethod::Exact).unwrap();
        prop_assert!((total - exact).abs() <= 1e-12 * exact);
    }

    #[test]
    fn exact_and_monte_carlo_volumes_agree(s in simple_strategy(), seed in any::<u64>()) {
        let d = validated_simple(&s);
        let exact = volume(&d, &RegionSelector::Whole, VolumeMethod::Exact).unwrap();
        let mc = volume_estimate(&d, &RegionSelector::Whole, VolumeMethod::MonteCarlo { samples: 20_000, seed }).unwrap();
        prop_assert!((mc.value - exact).abs() <= 3.0 * mc.std_error + 1e-12 * exact, "{} vs {exact} ± {}", mc.value, mc.std_error);
    }

    #[test]
    fn causal_sets_match_point_containment(g in graph_strategy(), a in 0.1f64..0.9, c in -0.9f64..0.9) {
        let d = validate_domain(Domain::Graph(g.clone())).unwrap();
        let b = d.b();
        let x = a * b;
        let t = g.lower.eval(x) + (0.5 + 0.5 * c) * (g.upper.eval(x) - g.lower.eval(x));
        let region = RegionSelector::CausalSet { point: Point::new(t, x) };
        let exact = volume(&d, &region, VolumeMethod::Exact).unwrap();
        let n = 100;
        let h = b / n as f64;
        let mut count = 0.0;
        for i in 0..n {
            for j in 0..n {
                let p = Point::from_uw((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
                if d.contains(p) && p.causal(&Point::new(t, x)) {
                    count += 0.5 * h * h;
                }
            }
        }
        // boundary pixels: perimeter / h of them, each of area h^2 / 2
        prop_assert!((count - exact).abs() <= 4.0 * b * h, "{count} vs {exact}");
    }

    #[test]
    fn flat_factor_has_no_curvature(s in simple_strategy(), p in (0.0f64..1.0, 0.0f64..1.0), q in (0.0f64..1.0, 0.0f64..1.0)) {
        let d = conformal_on(FlatDomain::Simple(s.clone()), "1");
        let b = d.b();
        let (z1, z2) = (Point::from_uw(p.0 * b, p.1 * b), Point::from_uw(q.0 * b, q.1 * b));
        if let Ok(r) = diamond_curvature_integral(&d, z1, z2) {
            prop_assert_eq!(r, 0.0);
        }
    }
}

// ------------------------------------------------------------------- dirac

#[test]
fn gamma_algebra_identities() {
    let (g0, g1, gam) = (GammaAlgebra::gamma0(), GammaAlgebra::gamma1(), GammaAlgebra::pseudo_scalar());
    let id = nalgebra::Matrix2::<C64>::identity();
    let c = |x: f64| C64::new(x, 0.0);
    assert_eq!(g0 * g0, id);
    assert_eq!(g1 * g1, -id);
    assert_eq!(g0 * g1 + g1 * g0, nalgebra::Matrix2::zeros());
    // Γ anticommutes with both and squares to one
    assert_eq!(gam * gam, id);
    assert_eq!(gam * g0 + g0 * gam, nalgebra::Matrix2::zeros());
    assert_eq!(gam * g1 + g1 * gam, nalgebra::Matrix2::zeros());
    assert_eq!(GammaAlgebra::chi_l() + GammaAlgebra::chi_r(), id);
    assert_eq!((GammaAlgebra::chi_l() - GammaAlgebra::chi_r()) * c(-1.0), gam);
}

#[test]
fn regular_propagator_is_continuous_at_the_light_cone() {
    let (m, t) = (1.7, 0.4);
    let at = |eps: f64| km_regular(m, t, t - eps);
    let d1 = (at(1e-6) - at(1e-7)).norm();
    let d2 = (at(1e-7) - at(1e-8)).norm();
    assert!(d2 < 0.2 * d1 + 1e-14, "{d1} {d2}");
    assert!(at(1e-8).norm() > 0.0 && at(1e-8).norm().is_finite());
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn massless_evolution_conserves_the_slice_norm(n in 32usize..200, shift in 0usize..8, seed in any::<u64>()) {
        let g = Grid::new(n, 1.0);
        let mut f = SpinorField::zeros(g);
        let mut r = fermisig::rng::stream(seed, 1);
        // support well inside, so shifted data stays on the grid
        for i in n / 4..3 * n / 4 {
            f.left[i] = C64::new(r.random(), r.random());
            f.right[i] = C64::new(r.random(), r.random());
        }
        let e = evolve_massless(&f, shift as f64 * g.h());
        prop_assert!((slice_norm(&e) - slice_norm(&f)).abs() <= 1e-12 * slice_norm(&f));
    }
}

// ------------------------------------------------------------------- sigop

proptest! {
    #![proptest_config(config(6))]

    #[test]
    fn grid_spectra_converge_to_the_exact_one(s in simple_strategy()) {
        let d = validated_simple(&s);
        let exact = sorted_abs(&spectrum(&build_simple(&d).unwrap()).unwrap().eigenvalues);
        let grid = sorted_abs(&spectrum(&build_flat_massless(&d, 1024).unwrap()).unwrap().eigenvalues);
        for i in 0..exact.len().min(10) {
            // eigenvalues far below the top one are not resolved relative to it
            if exact[i] > 1e-3 * exact[0] {
                prop_assert!((grid[i] - exact[i]).abs() <= 0.02 * exact[i], "{i}: {} vs {}", grid[i], exact[i]);
            }
        }
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn massless_matrices_are_hermitian_chiral_and_bounded(g in graph_strategy(), n in 8usize..48) {
        let flat = validate_domain(Domain::Graph(g.clone())).unwrap();
        let conf = conformal_on(FlatDomain::Graph(g), "1 + 0.2*sin(x)*cos(t)");
        for (d, is_flat) in [(flat, true), (conf, false)] {
            let op = if is_flat { build_flat_massless(&d, n).unwrap() } else { build_conformal(&d, n).unwrap() };
            let h = op.dense();
            prop_assert_eq!(&h, &h.adjoint());
            for i in 0..n {
                for j in 0..n {
                    prop_assert_eq!(h[(i, j)], C64::new(0.0, 0.0));
                    prop_assert_eq!(h[(n + i, n + j)], C64::new(0.0, 0.0));
                }
            }
            if is_flat {
                let top = h.iter().map(|z| z.norm()).fold(0.0, f64::max);
                prop_assert!(top / op.grid.h() <= 1.0 / (4.0 * PI) + 1e-15);
            }
        }
    }
}

#[test]
fn massive_operator_is_continuous_in_the_mass() {
    let d = ValidatedDomain::triangle(1.0);
    let q = QuadratureSpec::gauss(8, 2);
    let h0 = build_massive_kernel(&d, 0.0, 24, &q).unwrap().dense();
    let dist = |m: f64| (build_massive_kernel(&d, m, 24, &q).unwrap().dense() - &h0).norm();
    let (a, b) = (dist(0.05), dist(0.1));
    assert!(b / a > 1.8 && b / a < 2.2, "{a} {b}");
}

// ---------------------------------------------------------------- spectral

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn trace_routes_and_pairing_agree(s in simple_strategy(), n in 8usize..64) {
        let d = validated_simple(&s);
        let simple = build_simple(&d).unwrap();
        let grid = build_flat_massless(&d, n).unwrap();
        for q in [1, 2] {
            let a = trace_power(&simple, q).unwrap();
            prop_assert!((a.from_eigenvalues - a.from_matrix).abs() <= 1e-10 * a.from_matrix);
            let b = trace_power(&grid, q).unwrap();
            prop_assert!((b.from_eigenvalues - b.from_matrix).abs() <= 1e-10 * b.from_matrix.max(f64::MIN_POSITIVE));
        }
        for r in [spectrum(&simple).unwrap(), spectrum(&grid).unwrap()] {
            prop_assert!(r.pairing_defect <= 1e-12);
        }
        let r = spectrum(&grid).unwrap();
        let top = r.largest();
        let bound = (2 * n) as f64 * (r.pairing_defect + f64::EPSILON * top) * top * top;
        prop_assert!(odd_trace(&grid, 3).abs() <= bound, "{} > {bound}", odd_trace(&grid, 3));
    }

    #[test]
    fn top_singular_vector_is_positive(s in simple_strategy()) {
        let t = build_simple(&validated_simple(&s)).unwrap().t;
        let k = t.nrows();
        // T T^T and T^T T irreducible: every cell index reachable through included cells
        let gram = &t * t.transpose() + t.transpose() * &t;
        let mut seen = vec![false; k];
        let mut stack = vec![0];
        while let Some(i) = stack.pop() {
            if !std::mem::replace(&mut seen[i], true) {
                stack.extend((0..k).filter(|&j| gram[(i, j)] > 0.0 && !seen[j]));
            }
        }
        prop_assume!(seen.iter().all(|&v| v));
        let svd = t.clone().svd(true, true);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
        if k > 1 {
            prop_assert!(svd.singular_values[order[0]] > svd.singular_values[order[1]] * (1.0 + 1e-9));
        }
        let u = svd.u.unwrap().column(order[0]).into_owned();
        let sign = if u.sum() >= 0.0 { 1.0 } else { -1.0 };
        prop_assert!(u.iter().all(|&v| sign * v >= -1e-12), "{u}");
    }
}

#[test]
fn galerkin_estimates_increase_with_the_basis() {
    let d = ValidatedDomain::triangle(1.0);
    let mut prev = 0.0;
    for k in 1..=6 {
        let top = spectrum(&build_massive_galerkin(&d, 1.0, k).unwrap()).unwrap().largest();
        assert!(top >= prev - 1e-12, "k = {k}: {top} < {prev}");
        prev = top;
    }
}

#[test]
fn column_variation_is_bounded_under_refinement() {
    let d = validate_domain(Domain::Graph(GraphDomain::new(
        1.0,
        Polyline::new(vec![0.0, 0.3, 0.6, 1.0], vec![0.0, 0.2, 0.3, 0.0]),
        Polyline::new(vec![0.0, 0.5, 1.0], vec![0.0, -0.25, 0.0]),
    )))
    .unwrap();
    let mut tv = Vec::new();
    for n in [32, 64, 128, 256] {
        let op = build_flat_massless(&d, n).unwrap();
        let h = op.dense();
        let mut worst: f64 = 0.0;
        for j in 0..2 * n {
            let col: Vec<f64> = (0..2 * n).map(|i| h[(i, j)].re / op.grid.h()).collect();
            worst = worst.max(col.windows(2).map(|w| (w[1] - w[0]).abs()).sum());
        }
        tv.push(worst);
    }
    // an indicator column jumps at most twice
    assert!(tv.iter().all(|&v| v <= 2.0 / (4.0 * PI) + 1e-12), "{tv:?}");
}

// ----------------------------------------------------------------- inverse

proptest! {
    #![proptest_config(config(100))]

    #[test]
    fn length_bounds_hold(s in simple_strategy()) {
        let d = validated_simple(&s);
        let r = spectrum(&build_simple(&d).unwrap()).unwrap();
        let (tl, sl) = cell_diagonal_curves(&s);
        let (mut sup_t, mut sup_s) = (0.0f64, 0.0f64);
        for c in &tl {
            let b = bound_timelike(&r, &d, c).unwrap();
            prop_assert!(b.margin >= -1e-9);
            sup_t = sup_t.max(b.length);
        }
        for c in &sl {
            let b = bound_spacelike(&r, &d, c).unwrap();
            prop_assert!(b.margin >= -1e-9);
            sup_s = sup_s.max(conformal_curve_length(&d, c).unwrap().length);
        }
        prop_assert!(sup_t <= sup_s + 1e-12);
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn localisation_is_additive(g in graph_strategy(), n in 16usize..96, cut in 0.05f64..0.95, i in (0.0f64..0.5, 0.5f64..1.0)) {
        let d = validate_domain(Domain::Graph(g)).unwrap();
        let b = d.b();
        let op = build_flat_massless(&d, n).unwrap();
        let left = (i.0 * b, i.1 * b);
        let whole = localized_hs_norm(&op, left, (0.0, b)).unwrap();
        let parts = localized_hs_norm(&op, left, (0.0, cut * b)).unwrap() + localized_hs_norm(&op, left, (cut * b, b)).unwrap();
        prop_assert!((whole - parts).abs() <= 1e-13 * whole.max(f64::MIN_POSITIVE));
    }
}

proptest! {
    #![proptest_config(config(6))]

    #[test]
    fn reconstruction_recovers_the_volume(s in simple_strategy()) {
        let d = validated_simple(&s);
        let f = reconstruct_volume_density(&build_flat_massless(&d, 512).unwrap(), 8).unwrap();
        let a = f.assess(&d).unwrap();
        prop_assert!((a.recovered_volume - a.true_volume).abs() <= 0.03 * a.true_volume, "{a:?}");
    }
}

// --------------------------------------------------------------------- cli

fn node_strategy() -> impl Strategy<Value = Node> {
    let leaf = prop_oneof![
        (0.0f64..1e3).prop_map(Node::Num),
        (1e-9f64..1e-5).prop_map(Node::Num),
        Just(Node::Var(Var::T)),
        Just(Node::Var(Var::X)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let unary = prop_oneof![
            Just(Func::Sin),
            Just(Func::Cos),
            Just(Func::Exp),
            Just(Func::Log),
            Just(Func::Sqrt),
            Just(Func::Abs)
        ];
        let bin = prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul), Just(BinOp::Div), Just(BinOp::Pow)];
        prop_oneof![
            inner.clone().prop_map(|a| Node::Neg(Box::new(a))),
            (bin, inner.clone(), inner.clone()).prop_map(|(op, a, b)| Node::Bin(op, Box::new(a), Box::new(b))),
            (unary, inner.clone()).prop_map(|(f, a)| Node::Call(f, vec![a])),
            (prop::bool::ANY, inner.clone(), inner).prop_map(|(mx, a, b)| Node::Call(if mx { Func::Max } else { Func::Min }, vec![a, b])),
        ]
    })
}

fn spec_strategy() -> impl Strategy<Value = DomainSpecFile> {
    let exprs = prop_oneof![Just("min(x, B - x)"), Just("0.5*min(x, B - x)"), Just("0.25*sin(pi*x/B)*B/pi")];
    prop_oneof![
        simple_strategy().prop_map(|s| DomainSpecFile::new(DomainSpec::Simple(s))),
        graph_strategy().prop_map(|g| DomainSpecFile::new(DomainSpec::Graph(GraphSpec {
            b: g.b,
            upper: BoundarySpec::Polyline(g.upper),
            lower: BoundarySpec::Polyline(g.lower),
            samples: None,
        }))),
        (0.5f64..3.0, exprs, 3usize..40).prop_map(|(b, e, n)| DomainSpecFile::new(DomainSpec::Graph(GraphSpec {
            b,
            upper: BoundarySpec::Expression(e.replace('B', &format!("{b:?}"))),
            lower: BoundarySpec::Polyline(Polyline::zero(b)),
            samples: Some(n),
        }))),
        (simple_strategy(), 0.0f64..0.5).prop_map(|(s, a)| DomainSpecFile::new(DomainSpec::Conformal(ConformalSpec {
            base: FlatSpec::Simple(s),
            f: FactorSpec::Expression(format!("1 + {a:?}*sin(x)*exp(-t^2)")),
        }))),
    ]
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn expressions_survive_print_and_parse(node in node_strategy()) {
        let text = node.to_string();
        let parsed = Expression::parse(&text).unwrap();
        prop_assert_eq!(parsed.root(), &node);
    }

    #[test]
    fn specs_survive_print_and_parse(spec in spec_strategy()) {
        prop_assert_eq!(parse_domain_spec(&spec.to_json()).unwrap(), spec);
    }
}

proptest! {
    #![proptest_config(config(8))]

    #[test]
    fn reports_are_deterministic(s in simple_strategy(), seed in any::<u64>()) {
        let spec = DomainSpecFile::new(DomainSpec::Simple(s));
        let o = RunOptions { seed, samples: 2000, q: 1, n: Some(16), ..RunOptions::default() };
        let a = to_json(&run_command(Command::Traces, Some(&spec), &o).unwrap());
        let b = to_json(&run_command(Command::Traces, Some(&spec), &o).unwrap());
        prop_assert_eq!(&a, &b);
        // 17 significant digits: the JSON reads back to the same document
        let back: ReportDocument = serde_json::from_str(&a).unwrap();
        prop_assert_eq!(to_json(&back), a);
    }
}
