//! Property tests: arithmetic laws against an independent exact-rational
//! oracle, canonical-form stability, square-root round trips and the norm
//! cubing law of the cubic map.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use proptest::prelude::*;

use padic_dyn_core::{CubicMap, Norm, Padic, PadicError, Prime};

const PRIMES: [u64; 5] = [2, 3, 5, 7, 13];

/// Deterministic large-scale round trip: p-adic arithmetic agrees with exact
/// rational arithmetic on 10^4 seeded pairs.
#[test]
fn round_trip_ten_thousand_pairs() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xD1CE);
    for i in 0..10_000 {
        let pv = PRIMES[i % PRIMES.len()];
        let p = Prime::new(pv).unwrap();
        let n1: i64 = rng.random_range(-1_000_000..=1_000_000);
        let d1: i64 = rng.random_range(1..=10_000);
        let n2: i64 = rng.random_range(-1_000_000..=1_000_000);
        let d2: i64 = rng.random_range(1..=10_000);
        let x = Padic::from_rational(n1, d1, p, 32).unwrap();
        let y = Padic::from_rational(n2, d2, p, 32).unwrap();
        let rx = rat(n1, d1);
        let ry = rat(n2, d2);
        if let Ok(s) = x.add(&y) {
            assert_eq!(s, expand(&(rx.clone() + ry.clone()), p, 32), "add #{i}");
        }
        if let Ok(d) = x.sub(&y) {
            assert_eq!(d, expand(&(rx.clone() - ry.clone()), p, 32), "sub #{i}");
        }
        let z = x.mul(&y).unwrap();
        assert_eq!(z, expand(&(rx.clone() * ry.clone()), p, 32), "mul #{i}");
        if n2 != 0 {
            let q = x.div(&y).unwrap();
            assert_eq!(q, expand(&(rx / ry), p, 32), "div #{i}");
        }
    }
}

fn prime_strategy() -> impl Strategy<Value = Prime> {
    prop::sample::select(PRIMES.to_vec()).prop_map(|p| Prime::new(p).unwrap())
}

fn rational_strategy() -> impl Strategy<Value = (i64, i64)> {
    (
        prop_oneof![Just(0i64), -1_000_000i64..1_000_000i64],
        prop_oneof![1i64..10_000i64, Just(1i64)],
    )
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Expansion of an exact rational, used as the oracle side of round trips.
fn expand(r: &BigRational, p: Prime, precision: usize) -> Padic {
    let n = r.numer().to_i64().expect("oracle numerator fits i64");
    let d = r.denom().to_i64().expect("oracle denominator fits i64");
    Padic::from_rational(n, d, p, precision).unwrap()
}

/// p-adic valuation of a nonzero exact rational.
fn rational_valuation(r: &BigRational, p: Prime) -> i64 {
    let pb = BigInt::from(p.value());
    let mut v = 0i64;
    let mut n = r.numer().abs();
    while (&n % &pb).is_zero() {
        n /= &pb;
        v += 1;
    }
    let mut d = r.denom().abs();
    while (&d % &pb).is_zero() {
        d /= &pb;
        v -= 1;
    }
    v
}

fn assert_canonical(x: &Padic) {
    if !x.is_zero() {
        assert_ne!(x.digit(0), 0, "canonical form violated: {x}");
    }
}

proptest! {
    #[test]
    fn ultrametric_inequality((n1, d1) in rational_strategy(),
                              (n2, d2) in rational_strategy(),
                              p in prime_strategy()) {
        let x = Padic::from_rational(n1, d1, p, 32).unwrap();
        let y = Padic::from_rational(n2, d2, p, 32).unwrap();
        match x.add(&y) {
            Ok(s) => prop_assert!(s.norm() <= x.norm().max(y.norm())),
            // Total cancellation: the sum is below resolution, hence below max.
            Err(PadicError::PrecisionExhausted) => {}
            Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
        }
    }

    #[test]
    fn distinct_norms_subtract_sharply((n1, d1) in rational_strategy(),
                                       (n2, d2) in rational_strategy(),
                                       p in prime_strategy()) {
        let x = Padic::from_rational(n1, d1, p, 32).unwrap();
        let y = Padic::from_rational(n2, d2, p, 32).unwrap();
        prop_assume!(x.norm() != y.norm());
        let d = x.sub(&y).unwrap();
        prop_assert_eq!(d.norm(), x.norm().max(y.norm()));
    }

    #[test]
    fn norm_is_multiplicative((n1, d1) in rational_strategy(),
                              (n2, d2) in rational_strategy(),
                              p in prime_strategy()) {
        let x = Padic::from_rational(n1, d1, p, 32).unwrap();
        let y = Padic::from_rational(n2, d2, p, 32).unwrap();
        let prod = x.mul(&y).unwrap();
        prop_assert_eq!(prod.norm(), x.norm().times(y.norm()));
        if !y.is_zero() {
            let quot = x.div(&y).unwrap();
            prop_assert_eq!(quot.norm(), x.norm().over(y.norm()).unwrap());
        }
    }

    #[test]
    fn arithmetic_round_trips_through_exact_rationals(
        (n1, d1) in rational_strategy(),
        (n2, d2) in rational_strategy(),
        p in prime_strategy(),
    ) {
        let x = Padic::from_rational(n1, d1, p, 32).unwrap();
        let y = Padic::from_rational(n2, d2, p, 32).unwrap();
        let rx = rat(n1, d1);
        let ry = rat(n2, d2);

        let sum = rx.clone() + ry.clone();
        match x.add(&y) {
            Ok(s) => {
                prop_assert_eq!(&s, &expand(&sum, p, 32));
                assert_canonical(&s);
            }
            Err(PadicError::PrecisionExhausted) => {
                // Only legitimate when the exact sum really is deeper than
                // the shared digit window above the smaller valuation.
                prop_assert!(!sum.is_zero());
                let va = rational_valuation(&rx, p).min(rational_valuation(&ry, p));
                prop_assert!(rational_valuation(&sum, p) >= va + 32);
            }
            Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
        }

        let prod = rx.clone() * ry.clone();
        let z = x.mul(&y).unwrap();
        prop_assert_eq!(&z, &expand(&prod, p, 32));
        assert_canonical(&z);

        if !ry.is_zero() {
            let quot = rx.clone() / ry.clone();
            let z = x.div(&y).unwrap();
            prop_assert_eq!(&z, &expand(&quot, p, 32));
            assert_canonical(&z);
        }
    }

    #[test]
    fn sqrt_round_trips_on_squares((n, d) in rational_strategy(),
                                   p in prime_strategy()) {
        prop_assume!(n != 0);
        let y = Padic::from_rational(n, d, p, 32).unwrap();
        let x = y.mul(&y).unwrap();
        let root = padic_dyn_core::sqrt(&x).unwrap();
        let back = root.mul(&root).unwrap();
        prop_assert_eq!(back, x);
        // Canonical branch.
        if p.value() == 2 {
            prop_assert_eq!(root.digit(1), 0, "2-adic root not on the 1 mod 4 branch");
        } else {
            prop_assert!(root.digit(0) <= p.value() / 2);
        }
    }

    #[test]
    fn escape_region_cubes_norms((n, _d) in rational_strategy(), p in prime_strategy()) {
        prop_assume!(n != 0);
        // |a| < 1 regime with a = p: any |x| > 1 cubes its norm.
        let map = CubicMap::from_rational(p, p.value() as i64, 1, 32).unwrap();
        let x = Padic::from_rational(n, 1, p, 32).unwrap().shifted(-12).unwrap();
        prop_assert!(x.norm() > Norm::ONE);
        let image = map.eval(&x).unwrap();
        let e = x.norm().exponent().unwrap();
        prop_assert_eq!(image.norm(), Norm::Finite(3 * e));
    }
}
