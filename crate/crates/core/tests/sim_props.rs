use ltlbc::poly::{Polynomial, VectorField};
use ltlbc::problem::{Problem, EXAMPLE1};
use ltlbc::sim::integrate;
use proptest::prelude::*;

fn final_state(f: &VectorField, x0: &[f64], horizon: f64, h: f64) -> Vec<f64> {
    let t = integrate(f, x0, horizon, h, None).unwrap();
    assert!((t.times.last().unwrap() - horizon).abs() < 1e-9);
    t.states.last().unwrap().clone()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Observed order from three step sizes halving each time.
fn observed_order(f: &VectorField, x0: &[f64], horizon: f64, h: f64) -> f64 {
    let a = final_state(f, x0, horizon, h);
    let b = final_state(f, x0, horizon, h / 2.0);
    let c = final_state(f, x0, horizon, h / 4.0);
    (dist(&a, &b) / dist(&b, &c)).log2()
}

#[test]
fn convergence_order_on_example_field() {
    let p = Problem::parse(EXAMPLE1).unwrap();
    for x0 in [[0.5, 0.5], [-1.0, 1.0], [1.2, -0.5]] {
        let order = observed_order(&p.system.field, &x0, 2.0, 0.1);
        assert!(order >= 3.5, "order {order} from {x0:?}");
    }
}

fn oscillator() -> VectorField {
    let names = ["x".to_string(), "y".to_string()];
    VectorField::new(vec![
        Polynomial::parse("y", &names).unwrap(),
        Polynomial::parse("-x", &names).unwrap(),
    ])
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn oscillator_matches_closed_form(x in -2.0f64..2.0, y in -2.0f64..2.0, t in 0.5f64..6.0) {
        let h = t / (t / 0.01).round();
        let end = final_state(&oscillator(), &[x, y], t, h);
        let exact = [x * t.cos() + y * t.sin(), -x * t.sin() + y * t.cos()];
        prop_assert!(dist(&end, &exact) <= 1e-8 * (1.0 + x.abs() + y.abs()));
    }

    #[test]
    fn domain_exit_stops_on_boundary(x in -0.5f64..0.5, y in -0.5f64..0.5) {
        // the unit disk contains the start; the rotation keeps |x| constant
        // while a drift pushes it out
        let names = ["x".to_string(), "y".to_string()];
        let f = VectorField::new(vec![
            Polynomial::parse("1", &names).unwrap(),
            Polynomial::parse("0", &names).unwrap(),
        ]).unwrap();
        let disk = ltlbc::region::Region::from_ineqs(vec![
            Polynomial::parse("1 - x^2 - y^2", &names).unwrap(),
        ]).unwrap();
        let t = integrate(&f, &[x, y], 5.0, 0.01, Some(&disk)).unwrap();
        prop_assert!(t.exited);
        let last = t.states.last().unwrap();
        let r2 = last[0] * last[0] + last[1] * last[1];
        prop_assert!((r2 - 1.0).abs() < 1e-6, "r^2 = {}", r2);
    }
}
