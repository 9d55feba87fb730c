//! Invariants of generator functions and transition matrices.

use nalgebra::DMatrix;
use paramarkov::matfun::{
    frac_power_neg_gen, matrix_function, transition_markov, transition_para, transition_semi, Generator,
    MittagLeffler,
};
use proptest::prelude::*;

/// Dense irreducible generator: every off-diagonal rate is positive.
fn generator() -> impl Strategy<Value = Generator> {
    (2usize..=6).prop_flat_map(|n| {
        prop::collection::vec(0.05f64..3.0, n * n).prop_map(move |v| {
            let mut m = DMatrix::from_row_slice(n, n, &v);
            for i in 0..n {
                m[(i, i)] = 0.0;
                let s: f64 = m.row(i).iter().sum();
                m[(i, i)] = -s;
            }
            Generator::new(m).unwrap()
        })
    })
}

/// Left null vector of `G`, normalised to a probability vector.
fn stationary(g: &Generator) -> DMatrix<f64> {
    let svd = g.matrix().transpose().svd(true, true);
    let v_t = svd.v_t.unwrap();
    let k = svd.singular_values.imin();
    let row = v_t.row(k);
    let s: f64 = row.iter().sum();
    DMatrix::from_iterator(1, g.dim(), row.iter().map(|v| v / s))
}

fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.abs().max()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn markov_semigroup(g in generator(), s in 0.0f64..2.0, t in 0.0f64..2.0) {
        let ps = transition_markov(&g, s).unwrap().entries;
        let pt = transition_markov(&g, t).unwrap().entries;
        let pst = transition_markov(&g, s + t).unwrap().entries;
        prop_assert!(max_abs(&(ps * pt - pst)) < 1e-10);
    }

    #[test]
    fn stationary_law_is_preserved(g in generator(), nu in 0.2f64..=1.0, t in 0.1f64..4.0) {
        let pi = stationary(&g);
        for p in [transition_semi(&g, nu, t).unwrap(), transition_para(&g, nu, t).unwrap()] {
            prop_assert!(max_abs(&(&pi * &p.entries - &pi)) < 1e-9);
        }
    }

    #[test]
    fn square_root_of_generator_squares_back(g in generator()) {
        let b = frac_power_neg_gen(&g, 0.5).unwrap();
        let scale = max_abs(g.matrix());
        prop_assert!(max_abs(&(&b * &b + g.matrix())) < 1e-9 * scale);
    }

    #[test]
    fn fractional_power_commutes_with_generator(g in generator(), nu in 0.1f64..1.0) {
        let b = frac_power_neg_gen(&g, nu).unwrap();
        let scale = max_abs(g.matrix()) * max_abs(&b);
        prop_assert!(max_abs(&(&b * g.matrix() - g.matrix() * &b)) < 1e-10 * scale.max(1.0));
    }

    #[test]
    fn power_of_a_power(g in generator(), a in 0.3f64..1.0, b in 0.3f64..1.0) {
        // −(−(−(−G)^a)^b) = −(−G)^{ab}: (−G)^a is again minus a generator
        let ga = Generator::new(frac_power_neg_gen(&g, a).unwrap()).unwrap();
        let gab = frac_power_neg_gen(&ga, b).unwrap();
        let direct = frac_power_neg_gen(&g, a * b).unwrap();
        prop_assert!(max_abs(&(gab - &direct)) < 1e-8 * max_abs(&direct).max(1.0));
    }

    #[test]
    fn similarity_invariance(g in generator(), nu in 0.3f64..1.0, seed in prop::collection::vec(-0.4f64..0.4, 36)) {
        // f(S A S⁻¹) = S f(A) S⁻¹ with S = I + small perturbation
        let n = g.dim();
        let s = DMatrix::identity(n, n) + DMatrix::from_fn(n, n, |i, j| seed[i * 6 + j]);
        let Some(s_inv) = s.clone().try_inverse() else { return Ok(()) };
        let cond = max_abs(&s) * max_abs(&s_inv);
        prop_assume!(cond < 50.0);
        let a = g.matrix().clone();
        let f = MittagLeffler(nu);
        let lhs = matrix_function(&(&s * &a * &s_inv), &f).unwrap();
        let rhs = &s * matrix_function(&a, &f).unwrap() * &s_inv;
        prop_assert!(max_abs(&(lhs - rhs)) < 1e-9 * cond * cond);
    }
}
