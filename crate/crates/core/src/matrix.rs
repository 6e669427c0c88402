//! Small dense integer matrices for the action on `H_1(F_n; Z)`.

use serde::Serialize;

/// Square matrix with `i128` entries and overflow-checked arithmetic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct IntMatrix {
    n: usize,
    rows: Vec<Vec<i128>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("integer overflow in matrix arithmetic")]
pub struct Overflow;

impl IntMatrix {
    pub fn zero(n: usize) -> IntMatrix {
        IntMatrix {
            n,
            rows: vec![vec![0; n]; n],
        }
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zero(n);
        for i in 0..n {
            m.rows[i][i] = 1;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<i128>>) -> IntMatrix {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        IntMatrix { n, rows }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<i128>] {
        &self.rows
    }

    pub fn get(&self, row: usize, col: usize) -> i128 {
        self.rows[row][col]
    }

    pub(crate) fn set(&mut self, row: usize, col: usize, v: i128) {
        self.rows[row][col] = v;
    }

    pub fn checked_mul(&self, other: &IntMatrix) -> Result<IntMatrix, Overflow> {
        assert_eq!(self.n, other.n);
        let mut out = IntMatrix::zero(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                let a = self.rows[i][k];
                if a == 0 {
                    continue;
                }
                for j in 0..self.n {
                    let t = a.checked_mul(other.rows[k][j]).ok_or(Overflow)?;
                    out.rows[i][j] = out.rows[i][j].checked_add(t).ok_or(Overflow)?;
                }
            }
        }
        Ok(out)
    }

    pub fn checked_pow(&self, mut e: u32) -> Result<IntMatrix, Overflow> {
        let mut base = self.clone();
        let mut acc = IntMatrix::identity(self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn minus_identity(&self) -> IntMatrix {
        let mut m = self.clone();
        for i in 0..self.n {
            m.rows[i][i] -= 1;
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.iter().all(|&x| x == 0))
    }

    pub fn is_identity(&self) -> bool {
        *self == IntMatrix::identity(self.n)
    }

    /// `(A - I)^n == 0`.
    pub fn is_unipotent(&self) -> Result<bool, Overflow> {
        Ok(self.minus_identity().checked_pow(self.n as u32)?.is_zero())
    }

    pub fn trace(&self) -> i128 {
        (0..self.n).map(|i| self.rows[i][i]).sum()
    }

    /// Fraction-free Gaussian elimination.
    pub fn determinant(&self) -> Result<i128, Overflow> {
        let n = self.n;
        if n == 0 {
            return Ok(1);
        }
        let mut a = self.rows.clone();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&r| a[r][k] != 0) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return Ok(0),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let x = a[i][j].checked_mul(a[k][k]).ok_or(Overflow)?;
                    let y = a[i][k].checked_mul(a[k][j]).ok_or(Overflow)?;
                    a[i][j] = (x - y) / prev;
                }
            }
            prev = a[k][k];
        }
        Ok(sign * a[n - 1][n - 1])
    }

    /// Coefficients `c_0..c_n` of `det(xI - A)`, lowest degree first
    /// (Faddeev–LeVerrier; every division is exact over the integers).
    pub fn characteristic_polynomial(&self) -> Result<Vec<i128>, Overflow> {
        let n = self.n;
        let mut coeffs = vec![0i128; n + 1];
        coeffs[n] = 1;
        let mut m = IntMatrix::zero(n);
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I
            let mut next = self.checked_mul(&m)?;
            for i in 0..n {
                next.rows[i][i] = next.rows[i][i]
                    .checked_add(coeffs[n - k + 1])
                    .ok_or(Overflow)?;
            }
            let am = self.checked_mul(&next)?;
            coeffs[n - k] = -am.trace() / k as i128;
            m = next;
        }
        Ok(coeffs)
    }

    /// Max `sum_i |a_ij|` over columns; submultiplicative and bounds the
    /// spectral radius from above.
    pub fn column_norm(&self) -> i128 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.rows[i][j].abs()).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&x| x as f64).collect())
            .collect()
    }
}

/// Integer polynomial helpers, coefficients lowest degree first.
pub(crate) mod poly {
    pub fn trim(mut p: Vec<i128>) -> Vec<i128> {
        while p.len() > 1 && *p.last().unwrap() == 0 {
            p.pop();
        }
        p
    }

    /// Exact division by a monic polynomial; `None` if the remainder is
    /// nonzero.
    pub fn divide_exact(p: &[i128], d: &[i128]) -> Option<Vec<i128>> {
        let p = trim(p.to_vec());
        let d = trim(d.to_vec());
        debug_assert_eq!(*d.last().unwrap(), 1);
        if p.len() < d.len() {
            return if p.iter().all(|&x| x == 0) { Some(vec![0]) } else { None };
        }
        let mut rem = p.clone();
        let mut q = vec![0i128; p.len() - d.len() + 1];
        for i in (0..q.len()).rev() {
            let c = rem[i + d.len() - 1];
            q[i] = c;
            if c != 0 {
                for (j, &dj) in d.iter().enumerate() {
                    rem[i + j] -= c * dj;
                }
            }
        }
        if rem.iter().all(|&x| x == 0) {
            Some(trim(q))
        } else {
            None
        }
    }

    pub fn mul(a: &[i128], b: &[i128]) -> Vec<i128> {
        let mut out = vec![0i128; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        trim(out)
    }

    fn euler_phi(m: u64) -> u64 {
        let mut result = m;
        let mut x = m;
        let mut p = 2;
        while p * p <= x {
            if x % p == 0 {
                while x % p == 0 {
                    x /= p;
                }
                result -= result / p;
            }
            p += 1;
        }
        if x > 1 {
            result -= result / x;
        }
        result
    }

    /// The `m`-th cyclotomic polynomial.
    pub fn cyclotomic(m: u64) -> Vec<i128> {
        let mut num = vec![0i128; m as usize + 1];
        num[0] = -1;
        num[m as usize] = 1;
        let mut denom = vec![1i128];
        for d in 1..m {
            if m % d == 0 {
                denom = mul(&denom, &cyclotomic(d));
            }
        }
        divide_exact(&num, &denom).expect("x^m - 1 is divisible by its proper cyclotomic factors")
    }

    /// Whether a monic integer polynomial is a product of cyclotomic
    /// polynomials, i.e. all its roots are roots of unity.
    pub fn is_cyclotomic_product(p: &[i128]) -> bool {
        let mut rest = trim(p.to_vec());
        let degree = rest.len() as u64 - 1;
        // phi(m) <= degree forces m <= 2 degree^2 + 2
        let bound = 2 * degree * degree + 2;
        for m in 1..=bound {
            if euler_phi(m) > degree {
                continue;
            }
            let c = cyclotomic(m);
            while rest.len() >= c.len() {
                match divide_exact(&rest, &c) {
                    Some(q) => rest = q,
                    None => break,
                }
            }
        }
        rest == vec![1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_and_charpoly() {
        let fib = IntMatrix::from_rows(vec![vec![0, 1], vec![1, 1]]);
        assert_eq!(fib.determinant().unwrap(), -1);
        // x^2 - x - 1
        assert_eq!(fib.characteristic_polynomial().unwrap(), vec![-1, -1, 1]);
        let m = IntMatrix::from_rows(vec![vec![2, 0, 1], vec![1, 3, 0], vec![0, 1, 1]]);
        assert_eq!(m.determinant().unwrap(), 7);
        let cp = m.characteristic_polynomial().unwrap();
        assert_eq!(cp[0], -7);
        assert_eq!(cp[2], -m.trace());
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(poly::cyclotomic(1), vec![-1, 1]);
        assert_eq!(poly::cyclotomic(4), vec![1, 0, 1]);
        assert_eq!(poly::cyclotomic(6), vec![1, -1, 1]);
        assert!(poly::is_cyclotomic_product(&[1, -2, 1]));
        assert!(poly::is_cyclotomic_product(&[1, 1, 1]));
        assert!(!poly::is_cyclotomic_product(&[-1, -1, 1]));
        // (x^2+1)(x+1)
        assert!(poly::is_cyclotomic_product(&[1, 1, 1, 1]));
    }

    #[test]
    fn unipotence() {
        let t = IntMatrix::from_rows(vec![vec![1, 0], vec![1, 1]]);
        assert!(t.is_unipotent().unwrap());
        let p = IntMatrix::from_rows(vec![vec![0, 1], vec![1, 0]]);
        assert!(!p.is_unipotent().unwrap());
        assert!(p.checked_pow(2).unwrap().is_identity());
    }
}
