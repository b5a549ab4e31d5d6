use super::is_prime;
use crate::error::{Error, Result};

pub fn digit_sum(p: u64, mut m: u64) -> u64 {
    let mut s = 0;
    while m > 0 {
        s += m % p;
        m /= p;
    }
    s
}

/// ord_p(p^m / m!) via Legendre.
fn ord_pm_over_fact(p: u64, m: u64) -> u64 {
    (m * (p - 2) + digit_sum(p, m)) / (p - 1)
}

/// The Mazur number [n] = min_{m >= n} ord_p(p^m/m!).
pub fn mazur_number(p: u64, n: i64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n <= 0 {
        return Err(Error::InvalidArgument(format!("mazur number needs n >= 1, got {n}")));
    }
    let n = n as u64;
    let hi = (4 * n).max(4 * p * (n + 1));
    Ok((n..=hi).map(|m| ord_pm_over_fact(p, m)).min().unwrap())
}

/// e(i) = [i] for i >= 1, and 0 otherwise.
pub fn pd_exponent(p: u64, i: i64) -> u64 {
    if i <= 0 {
        0
    } else {
        mazur_number(p, i).expect("pd_exponent needs a prime")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MazurTable {
    pub p: u64,
    /// values[n - 1] = [n]
    pub values: Vec<u64>,
}

impl MazurTable {
    pub fn new(p: u64, max: u64) -> Result<Self> {
        let values = (1..=max as i64)
            .map(|n| mazur_number(p, n))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { p, values })
    }

    pub fn get(&self, n: u64) -> Option<u64> {
        if n == 0 {
            return None;
        }
        self.values.get(n as usize - 1).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(mazur_number(3, 1).unwrap(), 1);
        assert_eq!(mazur_number(3, 4).unwrap(), 3);
        assert_eq!(mazur_number(2, 5).unwrap(), 1);
        assert_eq!(pd_exponent(5, 2), 2);
        assert_eq!(pd_exponent(2, 4), 1);
        assert_eq!(pd_exponent(7, -3), 0);
        assert_eq!(mazur_number(3, 5).unwrap(), 4);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(mazur_number(4, 3), Err(Error::NotPrime(4)));
        assert!(mazur_number(3, 0).is_err());
    }

    #[test]
    fn table_for_three() {
        let t = MazurTable::new(3, 4).unwrap();
        assert_eq!(t.values, vec![1, 2, 2, 3]);
    }

    #[test]
    fn subadditive() {
        for p in [2, 3, 5] {
            for i in -20..=20 {
                for j in -20..=20 {
                    assert!(pd_exponent(p, i) + pd_exponent(p, j) >= pd_exponent(p, i + j));
                }
            }
        }
    }
}
