use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Zero};

use super::CertifiedReal;
use crate::error::{Error, Result};

/// Certified prefix of the simple continued fraction of a real number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContinuedFraction {
    partial_quotients: Vec<BigInt>,
    convergents: Vec<(BigInt, BigInt)>,
}

impl ContinuedFraction {
    pub fn from_quotients(partial_quotients: Vec<BigInt>) -> Self {
        let mut convergents = Vec::with_capacity(partial_quotients.len());
        // (p_{k-2}, q_{k-2}) = (0, 1), (p_{k-1}, q_{k-1}) = (1, 0)
        let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
        let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
        for a in &partial_quotients {
            let p = a * &p1 + &p0;
            let q = a * &q1 + &q0;
            p0 = std::mem::replace(&mut p1, p.clone());
            q0 = std::mem::replace(&mut q1, q.clone());
            convergents.push((p, q));
        }
        ContinuedFraction {
            partial_quotients,
            convergents,
        }
    }

    /// Every partial quotient that is the same for all points of `x`,
    /// up to `max_depth` of them.
    pub fn certified_prefix(x: &CertifiedReal, max_depth: usize) -> Self {
        // Run the Euclidean algorithm on both endpoints in lockstep; the
        // reals between them share exactly the common prefix.
        let (mut ln, mut ld) = split(x.lower());
        let (mut hn, mut hd) = split(x.upper());
        let mut quotients = Vec::new();
        while quotients.len() < max_depth {
            let a = ln.div_floor(&ld);
            if a != hn.div_floor(&hd) {
                break;
            }
            let lr = &ln - &a * &ld;
            let hr = &hn - &a * &hd;
            quotients.push(a);
            if lr.is_zero() || hr.is_zero() {
                break;
            }
            (ln, ld) = (ld, lr);
            (hn, hd) = (hd, hr);
        }
        Self::from_quotients(quotients)
    }

    pub fn partial_quotients(&self) -> &[BigInt] {
        &self.partial_quotients
    }

    /// Convergents `(p_k, q_k)`; they satisfy `q_k = a_k q_{k-1} + q_{k-2}`.
    pub fn convergents(&self) -> &[(BigInt, BigInt)] {
        &self.convergents
    }

    pub fn len(&self) -> usize {
        self.partial_quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partial_quotients.is_empty()
    }
}

fn split(q: num_rational::BigRational) -> (BigInt, BigInt) {
    let (n, d) = q.into_raw();
    (n, d)
}

/// The first `depth` partial quotients of `x`, each certified for every
/// point of the enclosure.
///
/// Fails with a precision error naming the first index that could not be
/// certified.
pub fn continued_fraction_of(x: &CertifiedReal, depth: usize) -> Result<ContinuedFraction> {
    let cf = ContinuedFraction::certified_prefix(x, depth);
    if cf.len() < depth {
        return Err(Error::precision(
            format!("partial quotient {} of the continued fraction is not certified", cf.len()),
            x.precision_bits(),
        ));
    }
    Ok(cf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn golden(bits: u32) -> CertifiedReal {
        let five = CertifiedReal::from_i64(5, bits).sqrt().unwrap();
        (&five + &CertifiedReal::from_i64(1, bits))
            .checked_div(&CertifiedReal::from_i64(2, bits))
            .unwrap()
    }

    #[test]
    fn golden_ratio_is_all_ones() {
        let cf = continued_fraction_of(&golden(128), 5).unwrap();
        assert_eq!(cf.partial_quotients(), ints(&[1, 1, 1, 1, 1]).as_slice());
        let q: Vec<_> = cf.convergents().iter().map(|c| c.1.clone()).collect();
        assert_eq!(q, ints(&[1, 1, 2, 3, 5]));
    }

    #[test]
    fn sqrt2_expansion() {
        let x = CertifiedReal::from_i64(2, 128).sqrt().unwrap();
        let cf = continued_fraction_of(&x, 4).unwrap();
        assert_eq!(cf.partial_quotients(), ints(&[1, 2, 2, 2]).as_slice());
        assert_eq!(cf.convergents()[3], (BigInt::from(17), BigInt::from(12)));
    }

    #[test]
    fn negative_value() {
        // -sqrt 2 = [-2; 1, 1, 2, 2, ...]
        let x = -CertifiedReal::from_i64(2, 128).sqrt().unwrap();
        let cf = continued_fraction_of(&x, 5).unwrap();
        assert_eq!(cf.partial_quotients(), ints(&[-2, 1, 1, 2, 2]).as_slice());
    }

    #[test]
    fn depth_beyond_precision_names_index() {
        let err = continued_fraction_of(&golden(16), 40).unwrap_err();
        match err {
            Error::Precision { what, bits } => {
                assert_eq!(bits, 16);
                assert!(what.contains("partial quotient"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn exact_rational_terminates() {
        let x = CertifiedReal::from_rational(&BigRational::new(3.into(), 2.into()), 64);
        assert_eq!(
            ContinuedFraction::certified_prefix(&x, 10).partial_quotients(),
            ints(&[1, 2]).as_slice()
        );
        assert!(continued_fraction_of(&x, 3).is_err());
    }

    #[test]
    fn stable_under_precision_doubling() {
        let cf1 = ContinuedFraction::certified_prefix(&golden(200), 1000);
        let cf2 = ContinuedFraction::certified_prefix(&golden(400), 1000);
        assert!(cf1.len() > 100);
        assert_eq!(cf1.partial_quotients(), &cf2.partial_quotients()[..cf1.len()]);
    }

    proptest! {
        #[test]
        fn convergent_recurrence(n in 2u64..100_000, bits in 64u32..400) {
            let x = CertifiedReal::from_integer(&BigInt::from(n), bits).sqrt().unwrap();
            let cf = ContinuedFraction::certified_prefix(&x, 60);
            let a = cf.partial_quotients();
            let c = cf.convergents();
            for k in 2..cf.len() {
                prop_assert_eq!(&c[k].1, &(&a[k] * &c[k - 1].1 + &c[k - 2].1));
                prop_assert_eq!(&c[k].0, &(&a[k] * &c[k - 1].0 + &c[k - 2].0));
            }
            // Prefix certified at one precision survives at twice the precision.
            let wider = ContinuedFraction::certified_prefix(
                &CertifiedReal::from_integer(&BigInt::from(n), 2 * bits).sqrt().unwrap(), 60);
            prop_assert!(wider.len() >= cf.len() || wider.len() == 60);
            let k = cf.len().min(wider.len());
            prop_assert_eq!(&cf.partial_quotients()[..k], &wider.partial_quotients()[..k]);
        }
    }
}
