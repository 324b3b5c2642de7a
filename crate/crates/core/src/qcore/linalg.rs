//! Index kernels and Hermitian eigen helpers.

use nalgebra::DMatrix;

use crate::scalar::{czero, modulus, Cx, Real};

/// Bit mask of `qubit` in an `n`-qubit big-endian index.
pub(crate) fn qubit_mask(n: usize, qubit: usize) -> usize {
    1 << (n - 1 - qubit)
}

/// Full-register offsets for every local index over `targets`.
pub(crate) fn local_offsets(n: usize, targets: &[usize]) -> Vec<usize> {
    let k = targets.len();
    (0..1usize << k)
        .map(|s| {
            (0..k)
                .filter(|&j| (s >> (k - 1 - j)) & 1 == 1)
                .map(|j| qubit_mask(n, targets[j]))
                .sum()
        })
        .collect()
}

/// Packs the bits of `index` at the non-target positions into a compact index.
pub(crate) fn compress_index(n: usize, index: usize, targets: &[usize]) -> usize {
    let mut out = 0;
    for q in 0..n {
        if targets.contains(&q) {
            continue;
        }
        out = (out << 1) | ((index & qubit_mask(n, q)) != 0) as usize;
    }
    out
}

/// Applies a `2^k x 2^k` matrix to the `targets` of an `n`-qubit amplitude vector.
pub(crate) fn apply_on_qubits<T: Real>(
    n: usize,
    amps: &[Cx<T>],
    op: &DMatrix<Cx<T>>,
    targets: &[usize],
) -> Vec<Cx<T>> {
    let offsets = local_offsets(n, targets);
    let target_mask: usize = targets.iter().map(|&q| qubit_mask(n, q)).sum();
    let sub = offsets.len();
    let mut out = vec![czero(); amps.len()];
    let mut buf = vec![czero(); sub];
    for base in (0..amps.len()).filter(|b| b & target_mask == 0) {
        for (s, off) in offsets.iter().enumerate() {
            buf[s] = amps[base | off];
        }
        for (r, off) in offsets.iter().enumerate() {
            let mut acc = czero();
            for (c, b) in buf.iter().enumerate() {
                acc += op[(r, c)] * *b;
            }
            out[base | off] = acc;
        }
    }
    out
}

/// Contracts `⟨bra|` on `targets`, returning the unnormalized remainder on the other qubits.
pub(crate) fn contract_on_qubits<T: Real>(
    n: usize,
    amps: &[Cx<T>],
    bra: &[Cx<T>],
    targets: &[usize],
) -> Vec<Cx<T>> {
    let offsets = local_offsets(n, targets);
    let target_mask: usize = targets.iter().map(|&q| qubit_mask(n, q)).sum();
    let mut out = vec![czero(); 1 << (n - targets.len())];
    for base in (0..amps.len()).filter(|b| b & target_mask == 0) {
        let mut acc = czero();
        for (s, off) in offsets.iter().enumerate() {
            acc += bra[s].conj() * amps[base | off];
        }
        out[compress_index(n, base, targets)] = acc;
    }
    out
}

/// Hermitian part `(M + M†)/2`.
pub(crate) fn hermitian_part<T: Real>(m: &DMatrix<Cx<T>>) -> DMatrix<Cx<T>> {
    (m + m.adjoint()) * Cx::new(T::lit(0.5), T::zero())
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues ascending.
pub(crate) fn hermitian_eigen<T: Real>(m: &DMatrix<Cx<T>>) -> (Vec<T>, DMatrix<Cx<T>>) {
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Ascending eigenvalues of the Hermitian part of `m`.
pub(crate) fn hermitian_eigenvalues<T: Real>(m: &DMatrix<Cx<T>>) -> Vec<T> {
    let mut values: Vec<T> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    values
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub(crate) fn hermitian_map<T: Real>(m: &DMatrix<Cx<T>>, f: impl Fn(T) -> T) -> DMatrix<Cx<T>> {
    let (values, vectors) = hermitian_eigen(m);
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        values.len(),
        values.into_iter().map(|v| Cx::new(f(v), T::zero())),
    ));
    &vectors * diag * vectors.adjoint()
}

/// PSD square root with negative eigenvalues clamped to zero.
pub(crate) fn psd_sqrt<T: Real>(m: &DMatrix<Cx<T>>) -> DMatrix<Cx<T>> {
    hermitian_map(m, |v| if v > T::zero() { v.sqrt() } else { T::zero() })
}

/// Largest absolute entry.
pub(crate) fn max_abs<T: Real>(m: &DMatrix<Cx<T>>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(modulus(*z)))
}

/// Mixed-radix digits of `index` for factor dimensions `dims` (first factor most significant).
pub(crate) fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
    out
}

pub(crate) fn undigits(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}
