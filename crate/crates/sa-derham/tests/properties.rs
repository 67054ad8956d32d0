use proptest::prelude::*;

use sa_derham::chain::Chain;
use sa_derham::complex::{subdivided_interval, OrientedSimplex, Simplex};
use sa_derham::function::SAFunction;
use sa_derham::minimal::MinimalForm;
use sa_derham::pa::PAForm;
use sa_derham::poly::Poly;
use sa_derham::quadrature::{monomial_integral, rule};
use sa_derham::random::{random_chain, random_complex, random_minimal, random_poly, seeded};
use sa_derham::rational::{format_q, parse_q, qr, to_f64, Q};

fn exact_integral(coeffs: &[i64], a: &Q, b: &Q) -> f64 {
    // ∫_a^b Σ cᵢ xⁱ dx by the antiderivative, in exact arithmetic.
    let power = |x: &Q, n: usize| (0..n).fold(qr(1, 1), |acc, _| acc * x);
    let total: Q = coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| qr(c, i as i64 + 1) * (power(b, i + 1) - power(a, i + 1)))
        .fold(qr(0, 1), |acc, t| acc + t);
    to_f64(&total)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn boundary_twice_is_zero(seed in any::<u64>(), dim in 1usize..=4, terms in 1usize..5) {
        let mut rng = seeded(seed);
        let k = random_complex(&mut rng, dim);
        let degree = 1 + (seed as usize) % dim;
        let chain = random_chain(&mut rng, &k, degree, terms);
        prop_assert!(chain.boundary().boundary().is_zero());
    }

    #[test]
    fn stokes_holds_for_polynomial_forms(seed in any::<u64>(), dim in 1usize..=3) {
        let mut rng = seeded(seed);
        let k = random_complex(&mut rng, dim);
        let degree = (seed as usize / 7) % dim;
        let mu = random_minimal(&mut rng, &k, degree, 3, 2);
        let gamma = random_chain(&mut rng, &k, degree + 1, 2);
        let lhs = mu.coboundary().pair(&gamma).unwrap();
        let rhs = mu.pair(&gamma.boundary()).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn coboundary_of_coboundary_pairs_to_zero(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let k = random_complex(&mut rng, 3);
        let alpha = PAForm::from_minimal(&random_minimal(&mut rng, &k, 0, 3, 2));
        let gamma = random_chain(&mut rng, &k, 2, 3);
        prop_assert!(alpha.coboundary().coboundary().pair(&gamma).unwrap().abs() <= 1e-10);
    }

    #[test]
    fn line_integrals_match_antiderivatives(coeffs in prop::collection::vec(-5i64..=5, 1..6), pieces in 1usize..4, lo in -3i64..=0, len in 1i64..=3) {
        let (a, b) = (qr(lo, 1), qr(lo + len, 2));
        let k = subdivided_interval(a.clone(), b.clone(), pieces);
        let p = Poly::from_terms(1, coeffs.iter().enumerate().map(|(i, &c)| (vec![i as u32], qr(c, 1))));
        let form = MinimalForm::generator(&k, vec![SAFunction::polynomial(&k, p), SAFunction::coordinate(&k, 0)]);
        let value = form.pair(&Chain::fundamental(&k).unwrap()).unwrap();
        let expected = exact_integral(&coeffs, &a, &b);
        prop_assert!((value - expected).abs() <= 1e-10 * (1.0 + expected.abs()), "{value} vs {expected}");
    }

    #[test]
    fn pairing_is_linear_in_the_chain(seed in any::<u64>(), c in -3i64..=3) {
        let mut rng = seeded(seed);
        let k = random_complex(&mut rng, 2);
        let mu = random_minimal(&mut rng, &k, 1, 2, 2);
        let (g1, g2) = (random_chain(&mut rng, &k, 1, 2), random_chain(&mut rng, &k, 1, 2));
        let lhs = mu.pair(&g1.add(&g2.scale(c))).unwrap();
        let rhs = mu.pair(&g1).unwrap() + c as f64 * mu.pair(&g2).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
    }

    #[test]
    fn product_rule_for_degree_zero_forms(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let k = random_complex(&mut rng, 2);
        let n = k.ambient_dim();
        let (f, g) = (random_poly(&mut rng, n, 2), random_poly(&mut rng, n, 2));
        let lam = |p: &Poly| PAForm::from_minimal(&MinimalForm::generator(&k, vec![SAFunction::polynomial(&k, p.clone())]));
        let (a, b) = (lam(&f), lam(&g));
        let lhs = lam(&f.mul(&g)).coboundary();
        let rhs = a.coboundary().wedge(&b).unwrap().add(&a.wedge(&b.coboundary()).unwrap()).unwrap();
        // Wedge products are stratified, so probe with identity simplices.
        let edges: Vec<(Simplex, i64)> = k.simplices_of_dim(1).take(4).cloned().zip([1, -2, 3, 1]).collect();
        let gamma = Chain::combination(&k, 1, edges);
        let (l, r) = (lhs.pair(&gamma).unwrap(), rhs.pair(&gamma).unwrap());
        prop_assert!((l - r).abs() <= 1e-9 * (1.0 + l.abs()), "{l} vs {r}");
    }

    #[test]
    fn quadrature_is_exact_on_monomials(dim in 1usize..=3, exps in prop::collection::vec(0u32..=6, 3)) {
        let exps: Vec<u32> = exps.into_iter().take(dim).collect();
        let degree: u32 = exps.iter().sum();
        let r = rule(dim, degree);
        let approx: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.iter().zip(&exps).map(|(v, &e)| v.powi(e as i32)).product::<f64>()).sum();
        prop_assert!((approx - monomial_integral(&exps)).abs() <= 1e-12);
    }

    #[test]
    fn rationals_round_trip_through_text(n in -1000i64..1000, d in 1i64..1000) {
        let x = qr(n, d);
        prop_assert_eq!(parse_q(&format_q(&x)).unwrap(), x);
    }

    #[test]
    fn reversed_simplex_negates_pairing(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let k = random_complex(&mut rng, 2);
        let mu = random_minimal(&mut rng, &k, 1, 2, 1);
        let edge = k.simplices_of_dim(1).next().unwrap().clone();
        let plus = Chain::simplex(&k, &OrientedSimplex::positive(edge.clone()));
        let minus = Chain::simplex(&k, &OrientedSimplex::new(Simplex::new(edge.to_vec()), -1));
        prop_assert!((mu.pair(&plus).unwrap() + mu.pair(&minus).unwrap()).abs() <= 1e-12);
    }
}
