use dpdelta::exactnum::{PiecewisePolynomial, Poly, QuadExt, Rational};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-10_000i64..10_000, 1i64..5_000).prop_map(|(n, d)| Rational::new(n, d))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    rational().prop_filter("nonzero", |r| !r.is_zero())
}

fn quad(d: u64) -> impl Strategy<Value = QuadExt> {
    (rational(), rational()).prop_map(move |(r, s)| QuadExt::new(r, s, d).unwrap())
}

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(rational(), 1..5).prop_map(Poly::new)
}

proptest! {
    #[test]
    fn rational_inverse(x in nonzero_rational()) {
        prop_assert_eq!(&x * &x.recip().unwrap(), Rational::one());
    }

    #[test]
    fn rational_parse_round_trip(x in rational()) {
        prop_assert_eq!(x.to_string().parse::<Rational>().unwrap(), x);
    }

    #[test]
    fn quad_inverse(x in quad(3).prop_filter("nonzero", |x| !x.is_zero())) {
        let one = QuadExt::from(Rational::one());
        prop_assert_eq!(&x * &x.inverse().unwrap(), one);
    }

    #[test]
    fn conjugation_is_multiplicative(x in quad(3), y in quad(3)) {
        prop_assert_eq!((&x * &y).conj(), &x.conj() * &y.conj());
        prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
    }

    #[test]
    fn quad_parse_round_trip(x in quad(7)) {
        prop_assert_eq!(x.to_string().parse::<QuadExt>().unwrap(), x.clone());
    }

    #[test]
    fn ordering_respects_addition(x in quad(2), y in quad(2), z in quad(2)) {
        prop_assert_eq!(x.cmp(&y), (&x + &z).cmp(&(&y + &z)));
    }

    #[test]
    fn integral_splits(p in poly(), q in poly(), lo in rational(), w1 in 1i64..50, w2 in 1i64..50) {
        let mid = &lo + &Rational::new(w1, 7);
        let hi = &mid + &Rational::new(w2, 11);
        let f = PiecewisePolynomial::new(vec![lo.clone(), mid.clone(), hi.clone()], vec![p, q]).unwrap();
        let cut = &lo + &Rational::new(w1 + w2, 31);
        let whole = f.integrate(&lo, &hi).unwrap();
        let split = f.integrate(&lo, &cut).unwrap() + f.integrate(&cut, &hi).unwrap();
        prop_assert_eq!(&whole, &split);
        prop_assert_eq!(whole, f.integrate_all());
    }

    #[test]
    fn antiderivative_inverts_derivative(p in poly()) {
        prop_assert_eq!(p.antiderivative().derivative(), p);
    }
}
