use nalgebra::DMatrix;
use num_complex::Complex64;

pub(crate) type CMat = DMatrix<Complex64>;

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Determinant by LU with partial pivoting. An empty matrix has determinant 1.
pub(crate) fn det(m: &CMat) -> Complex64 {
    if m.nrows() == 0 {
        return c(1.0);
    }
    m.clone().lu().determinant()
}

/// Eigenvalues of a Hermitian matrix, ascending. Only the lower triangle is read.
pub(crate) fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let eig = m.clone().symmetric_eigenvalues();
    let mut v: Vec<f64> = eig.iter().copied().collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

pub(crate) fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Number of inversions in an index list.
pub(crate) fn inversions(list: &[usize]) -> usize {
    let mut n = 0;
    for (a, x) in list.iter().enumerate() {
        n += list[a + 1..].iter().filter(|y| *y < x).count();
    }
    n
}

/// Sign of the permutation that sorts `list` ascending, counted by inversions.
pub(crate) fn sort_sign(list: &[usize]) -> f64 {
    if inversions(list) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Binary entropy in nats; zero at the endpoints.
pub(crate) fn binary_entropy(p: f64) -> f64 {
    let mut s = 0.0;
    for x in [p, 1.0 - p] {
        if x > 0.0 {
            s -= x * x.ln();
        }
    }
    s
}

/// Von Neumann entropy of a spectrum of probabilities; entries below 1e-14 are dropped.
pub(crate) fn spectrum_entropy(probs: impl IntoIterator<Item = f64>) -> f64 {
    probs
        .into_iter()
        .filter(|&p| p > 1e-14)
        .map(|p| -p * p.ln())
        .sum()
}

/// Iterate over all `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        // rightmost position that can still move
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
