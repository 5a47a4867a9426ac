//! Zeta and Möbius transforms over the subset lattice of `0..n`.

use std::ops::{AddAssign, SubAssign};

/// In place: `f(U) <- sum_{K ⊆ U} f(K)`.
pub fn zeta_subsets<T>(f: &mut [T])
where
    T: Clone + for<'a> AddAssign<&'a T>,
{
    let n = f.len().trailing_zeros();
    assert_eq!(f.len(), 1usize << n, "length must be a power of two");
    for bit in 0..n {
        let b = 1usize << bit;
        for m in 0..f.len() {
            if m & b != 0 {
                let lo = f[m ^ b].clone();
                f[m] += &lo;
            }
        }
    }
}

/// In place: inverse of [`zeta_subsets`].
pub fn mobius_subsets<T>(f: &mut [T])
where
    T: Clone + for<'a> SubAssign<&'a T>,
{
    let n = f.len().trailing_zeros();
    assert_eq!(f.len(), 1usize << n, "length must be a power of two");
    for bit in 0..n {
        let b = 1usize << bit;
        for m in 0..f.len() {
            if m & b != 0 {
                let lo = f[m ^ b].clone();
                f[m] -= &lo;
            }
        }
    }
}

/// In place: `f(U) <- prod_{K ⊆ U} f(K)`, the multiplicative zeta transform.
pub fn zeta_product<T>(f: &mut [T])
where
    T: Clone + for<'a> std::ops::MulAssign<&'a T>,
{
    let n = f.len().trailing_zeros();
    assert_eq!(f.len(), 1usize << n, "length must be a power of two");
    for bit in 0..n {
        let b = 1usize << bit;
        for m in 0..f.len() {
            if m & b != 0 {
                let lo = f[m ^ b].clone();
                f[m] *= &lo;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn mobius_inverts_zeta(v in prop::collection::vec(-1000i64..1000, 16)) {
            let mut f = v.clone();
            zeta_subsets(&mut f);
            for (u, fu) in f.iter().enumerate() {
                let direct: i64 = (0..16).filter(|k| k & u == *k).map(|k| v[k]).sum();
                prop_assert_eq!(*fu, direct);
            }
            mobius_subsets(&mut f);
            prop_assert_eq!(f, v);
        }
    }

    #[test]
    fn product_transform() {
        let mut f = vec![2i64, 3, 5, 7];
        zeta_product(&mut f);
        assert_eq!(f, vec![2, 6, 10, 2 * 3 * 5 * 7]);
    }
}
