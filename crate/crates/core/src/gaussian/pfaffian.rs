use nalgebra::{ComplexField, DMatrix};

/// Pfaffian of an antisymmetric matrix by Parlett-Reid tridiagonalization
/// with partial pivoting. Each row/column exchange flips the sign.
pub fn pfaffian<T: ComplexField + Copy>(m: &DMatrix<T>) -> T {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "pfaffian needs a square matrix");
    if n % 2 == 1 {
        return T::zero();
    }
    let mut a = m.clone();
    let mut pf = T::one();
    let mut k = 0;
    while k + 1 < n {
        let mut kp = k + 1;
        let mut best = a[(k + 1, k)].modulus();
        for i in k + 2..n {
            let v = a[(i, k)].modulus();
            if v > best {
                best = v;
                kp = i;
            }
        }
        if kp != k + 1 {
            a.swap_rows(k + 1, kp);
            a.swap_columns(k + 1, kp);
            pf = -pf;
        }
        let piv = a[(k, k + 1)];
        if piv == T::zero() {
            return T::zero();
        }
        pf *= piv;
        if k + 2 < n {
            let tau: Vec<T> = (k + 2..n).map(|j| a[(k, j)] / piv).collect();
            let col: Vec<T> = (k + 2..n).map(|i| a[(i, k + 1)]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    a[(i, j)] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
        k += 2;
    }
    pf
}
