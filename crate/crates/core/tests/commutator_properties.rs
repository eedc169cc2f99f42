use channel_spectra::commutator::{commutator_ia, QuadraticObservable, Var};
use nalgebra::{Matrix4, Vector4};
use proptest::prelude::*;

fn observable() -> impl Strategy<Value = QuadraticObservable> {
    (prop::collection::vec(-2.0f64..2.0, 16), prop::collection::vec(-2.0f64..2.0, 4), -2.0f64..2.0)
        .prop_map(|(q, l, c)| QuadraticObservable::new(Matrix4::from_vec(q), Vector4::from_vec(l), c))
}

fn diff(a: &QuadraticObservable, b: &QuadraticObservable) -> f64 {
    a.add(&b.scale(-1.0)).max_abs_coefficient()
}

proptest! {
    #[test]
    fn antisymmetry(f in observable(), g in observable()) {
        prop_assert!(diff(&commutator_ia(&f, &g), &commutator_ia(&g, &f).scale(-1.0)) < 1e-12);
    }

    #[test]
    fn bilinearity(f in observable(), g in observable(), h in observable(), s in -3.0f64..3.0) {
        let lhs = commutator_ia(&f.add(&g.scale(s)), &h);
        let rhs = commutator_ia(&f, &h).add(&commutator_ia(&g, &h).scale(s));
        prop_assert!(diff(&lhs, &rhs) < 1e-11);
    }

    // translation invariance in x₁: no x₁² term for any A
    #[test]
    fn no_x1_squared(a in observable(), b in 0.0f64..5.0, w in 0.1f64..5.0) {
        let c = commutator_ia(&QuadraticObservable::h0(b, w), &a);
        prop_assert!(c.coefficient(Var::X1, Var::X1).abs() < 1e-12);
    }
}

// Weyl symbols of quadratics bracket exactly like their classical symbols:
// check against a finite-difference Poisson bracket at random points.
#[test]
fn matches_classical_poisson_bracket() {
    let f = QuadraticObservable::h0(1.7, 2.3);
    let g = QuadraticObservable::from_terms(&[(0.4, &[Var::X1, Var::P2]), (1.1, &[Var::X2, Var::X2]), (-0.3, &[Var::P1])]).unwrap();
    let c = commutator_ia(&f, &g);
    let eval = |o: &QuadraticObservable, z: &Vector4<f64>| (z.transpose() * o.quad() * z)[0] + o.lin().dot(z) + o.constant();
    let grad = |o: &QuadraticObservable, z: &Vector4<f64>| {
        Vector4::from_fn(|i, _| {
            let h = 1e-5;
            let mut zp = *z;
            let mut zm = *z;
            zp[i] += h;
            zm[i] -= h;
            (eval(o, &zp) - eval(o, &zm)) / (2.0 * h)
        })
    };
    for z in [Vector4::new(0.3, -1.2, 0.7, 2.0), Vector4::new(-2.0, 0.1, 1.5, -0.4)] {
        let (gf, gg) = (grad(&f, &z), grad(&g, &z));
        let pb = gf[0] * gg[2] + gf[1] * gg[3] - gf[2] * gg[0] - gf[3] * gg[1];
        assert!((eval(&c, &z) + pb).abs() < 1e-7);
    }
}
