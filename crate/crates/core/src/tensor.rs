//! Dense labeled tensors.
//!
//! Data is stored row-major over the index order given by `labels`. All
//! contractions are label driven: two tensors are summed over every label
//! they share.

use crate::error::{Error, Result};
use faer::{Mat, MatRef};
use num_complex::Complex64;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    labels: Vec<String>,
    shape: Vec<usize>,
    data: Vec<C64>,
}

impl Tensor {
    pub fn new<S: Into<String>>(labels: Vec<S>, shape: Vec<usize>, data: Vec<C64>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() != shape.len() {
            return Err(Error::Structure(format!(
                "{} labels for {} dimensions",
                labels.len(),
                shape.len()
            )));
        }
        let len: usize = shape.iter().product();
        if len != data.len() {
            return Err(Error::Structure(format!("shape {shape:?} needs {len} entries, got {}", data.len())));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::Structure(format!("duplicate label {l:?}")));
            }
        }
        Ok(Tensor { labels, shape, data })
    }

    pub fn zeros<S: Into<String>>(labels: Vec<S>, shape: Vec<usize>) -> Result<Self> {
        let len = shape.iter().product();
        Self::new(labels, shape, vec![ZERO; len])
    }

    pub fn scalar(v: C64) -> Self {
        Tensor { labels: vec![], shape: vec![], data: vec![v] }
    }

    /// Builds a tensor by evaluating `f` on every multi-index.
    pub fn from_fn<S: Into<String>>(
        labels: Vec<S>,
        shape: Vec<usize>,
        mut f: impl FnMut(&[usize]) -> C64,
    ) -> Result<Self> {
        let len: usize = shape.iter().product();
        let mut data = Vec::with_capacity(len);
        let mut idx = vec![0usize; shape.len()];
        for _ in 0..len {
            data.push(f(&idx));
            increment(&mut idx, &shape);
        }
        Self::new(labels, shape, data)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn dim(&self, label: &str) -> Option<usize> {
        self.position(label).map(|p| self.shape[p])
    }

    pub fn get(&self, idx: &[usize]) -> C64 {
        self.data[flat_index(idx, &self.shape)]
    }

    /// Value of a rank-0 tensor.
    pub fn as_scalar(&self) -> Option<C64> {
        (self.rank() == 0).then(|| self.data[0])
    }

    pub fn relabel(&mut self, from: &str, to: &str) -> Result<()> {
        if from == to {
            return Ok(());
        }
        if self.position(to).is_some() {
            return Err(Error::Structure(format!("label {to:?} already present")));
        }
        let p = self
            .position(from)
            .ok_or_else(|| Error::Structure(format!("no label {from:?}")))?;
        self.labels[p] = to.to_string();
        Ok(())
    }

    pub fn with_label(mut self, from: &str, to: &str) -> Result<Self> {
        self.relabel(from, to)?;
        Ok(self)
    }

    /// Reorders indices to `order`, which must be a permutation of the labels.
    pub fn permuted(&self, order: &[&str]) -> Result<Tensor> {
        if order.len() != self.rank() {
            return Err(Error::Structure(format!("permutation {order:?} does not match {:?}", self.labels)));
        }
        let perm: Vec<usize> = order
            .iter()
            .map(|l| self.position(l).ok_or_else(|| Error::Structure(format!("no label {l:?}"))))
            .collect::<Result<_>>()?;
        Ok(self.permute_axes(&perm))
    }

    /// `perm[k]` is the old axis that becomes axis `k`.
    pub(crate) fn permute_axes(&self, perm: &[usize]) -> Tensor {
        if perm.iter().enumerate().all(|(k, &p)| k == p) {
            return self.clone();
        }
        let shape: Vec<usize> = perm.iter().map(|&p| self.shape[p]).collect();
        let labels: Vec<String> = perm.iter().map(|&p| self.labels[p].clone()).collect();
        let old_strides = strides(&self.shape);
        let s: Vec<usize> = perm.iter().map(|&p| old_strides[p]).collect();
        let mut data = Vec::with_capacity(self.data.len());
        let mut idx = vec![0usize; shape.len()];
        let mut off = 0usize;
        for _ in 0..self.data.len() {
            data.push(self.data[off]);
            // odometer increment, tracking the source offset
            let mut k = shape.len();
            while k > 0 {
                k -= 1;
                idx[k] += 1;
                off += s[k];
                if idx[k] < shape[k] {
                    break;
                }
                off -= s[k] * shape[k];
                idx[k] = 0;
            }
        }
        Tensor { labels, shape, data }
    }

    pub fn scale(&mut self, factor: C64) {
        for v in &mut self.data {
            *v *= factor;
        }
    }

    pub fn conj(&self) -> Tensor {
        Tensor {
            labels: self.labels.clone(),
            shape: self.shape.clone(),
            data: self.data.iter().map(|v| v.conj()).collect(),
        }
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise difference after aligning `other` to this label order.
    pub fn max_abs_diff(&self, other: &Tensor) -> Result<f64> {
        let order: Vec<&str> = self.labels.iter().map(String::as_str).collect();
        let o = other.permuted(&order)?;
        if o.shape != self.shape {
            return Err(Error::Structure("shape mismatch".into()));
        }
        Ok(self.data.iter().zip(&o.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    pub(crate) fn from_parts(labels: Vec<String>, shape: Vec<usize>, data: Vec<C64>) -> Tensor {
        debug_assert_eq!(shape.iter().product::<usize>(), data.len());
        Tensor { labels, shape, data }
    }
}

pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * shape[k + 1];
    }
    s
}

pub(crate) fn flat_index(idx: &[usize], shape: &[usize]) -> usize {
    idx.iter().zip(shape).fold(0, |acc, (&i, &d)| acc * d + i)
}

fn increment(idx: &mut [usize], shape: &[usize]) {
    for k in (0..shape.len()).rev() {
        idx[k] += 1;
        if idx[k] < shape[k] {
            return;
        }
        idx[k] = 0;
    }
}

/// Row-major `m x k` times `k x n`.
pub(crate) fn matmul(a: &[C64], b: &[C64], m: usize, k: usize, n: usize) -> Vec<C64> {
    if m == 0 || n == 0 {
        return vec![];
    }
    if k == 0 {
        return vec![ZERO; m * n];
    }
    if m * k * n <= 4096 {
        let mut out = vec![ZERO; m * n];
        for i in 0..m {
            let row = &mut out[i * n..(i + 1) * n];
            for p in 0..k {
                let av = a[i * k + p];
                if av == ZERO {
                    continue;
                }
                let brow = &b[p * n..(p + 1) * n];
                for (o, bv) in row.iter_mut().zip(brow) {
                    *o += av * bv;
                }
            }
        }
        return out;
    }
    let am = MatRef::from_row_major_slice(a, m, k);
    let bm = MatRef::from_row_major_slice(b, k, n);
    let c: Mat<C64> = am * bm;
    to_row_major(c.as_ref())
}

pub(crate) fn to_row_major(m: MatRef<'_, C64>) -> Vec<C64> {
    let (r, c) = (m.nrows(), m.ncols());
    let mut out = Vec::with_capacity(r * c);
    for i in 0..r {
        for j in 0..c {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// Sums over every label shared by `a` and `b`.
///
/// The result carries `a`'s surviving labels followed by `b`'s, each in their
/// original order. Tensors with no shared labels produce the outer product.
pub fn contract(a: &Tensor, b: &Tensor) -> Result<Tensor> {
    let mut shared = Vec::new();
    for (pa, l) in a.labels.iter().enumerate() {
        if let Some(pb) = b.position(l) {
            if a.shape[pa] != b.shape[pb] {
                return Err(Error::Contract(format!(
                    "label {l:?} has dimension {} vs {}",
                    a.shape[pa], b.shape[pb]
                )));
            }
            shared.push((pa, pb));
        }
    }
    let free_a: Vec<usize> = (0..a.rank()).filter(|p| !shared.iter().any(|s| s.0 == *p)).collect();
    let free_b: Vec<usize> = (0..b.rank()).filter(|p| !shared.iter().any(|s| s.1 == *p)).collect();

    let perm_a: Vec<usize> = free_a.iter().copied().chain(shared.iter().map(|s| s.0)).collect();
    let perm_b: Vec<usize> = shared.iter().map(|s| s.1).chain(free_b.iter().copied()).collect();
    let ap = a.permute_axes(&perm_a);
    let bp = b.permute_axes(&perm_b);

    let m: usize = free_a.iter().map(|&p| a.shape[p]).product();
    let k: usize = shared.iter().map(|s| a.shape[s.0]).product();
    let n: usize = free_b.iter().map(|&p| b.shape[p]).product();
    let data = matmul(&ap.data, &bp.data, m, k, n);

    let labels = free_a
        .iter()
        .map(|&p| a.labels[p].clone())
        .chain(free_b.iter().map(|&p| b.labels[p].clone()))
        .collect();
    let shape = free_a
        .iter()
        .map(|&p| a.shape[p])
        .chain(free_b.iter().map(|&p| b.shape[p]))
        .collect();
    Ok(Tensor { labels, shape, data })
}

/// Result of [`svd_split`].
#[derive(Debug, Clone)]
pub struct Split {
    /// Left isometry, labels `left_labels ++ [bond]`.
    pub left: Tensor,
    /// `S V^dagger`, labels `[bond] ++ remaining labels`.
    pub right: Tensor,
    pub singular_values: Vec<f64>,
    /// Square root of the summed squares of the discarded singular values.
    pub truncation_error: f64,
}

/// Truncated SVD of a dense matrix, keeping at most `max_bond` values above
/// `tol * s_max`. Always keeps at least one value.
pub(crate) struct TruncatedSvd {
    pub u: Vec<C64>,
    pub s: Vec<f64>,
    pub vh: Vec<C64>,
    pub kept: usize,
    pub discarded: f64,
}

pub(crate) fn truncated_svd(a: &[C64], m: usize, n: usize, max_bond: usize, tol: f64) -> Result<TruncatedSvd> {
    let mat = MatRef::from_row_major_slice(a, m, n);
    let svd = mat.thin_svd().map_err(|e| Error::Linalg(format!("svd: {e:?}")))?;
    let r = m.min(n);
    let s: Vec<f64> = (0..r).map(|i| svd.S()[i].re).collect();
    let smax = s.first().copied().unwrap_or(0.0);
    let mut kept = s.iter().take_while(|&&v| v > tol * smax && v > 0.0).count();
    kept = kept.min(max_bond.max(1)).max(1);
    let discarded = s[kept..].iter().map(|v| v * v).sum::<f64>().sqrt();
    let u = svd.U();
    let v = svd.V();
    let mut uo = Vec::with_capacity(m * kept);
    for i in 0..m {
        for j in 0..kept {
            uo.push(u[(i, j)]);
        }
    }
    let mut vh = Vec::with_capacity(kept * n);
    for j in 0..kept {
        for i in 0..n {
            vh.push(v[(i, j)].conj());
        }
    }
    Ok(TruncatedSvd { u: uo, s: s[..kept].to_vec(), vh, kept, discarded })
}

/// Splits `t` into two factors joined by a new index `bond`.
///
/// The bond dimension is the number of singular values above
/// `tol * s_max`, capped at `max_bond`.
pub fn svd_split(t: &Tensor, left_labels: &[&str], bond: &str, max_bond: usize, tol: f64) -> Result<Split> {
    if left_labels.is_empty() || left_labels.len() >= t.rank() {
        return Err(Error::Split(format!(
            "left labels {left_labels:?} must be a nonempty strict subset of {:?}",
            t.labels
        )));
    }
    if max_bond == 0 {
        return Err(Error::Split("max_bond must be positive".into()));
    }
    let mut left_axes = Vec::with_capacity(left_labels.len());
    for l in left_labels {
        let p = t.position(l).ok_or_else(|| Error::Split(format!("no label {l:?}")))?;
        if left_axes.contains(&p) {
            return Err(Error::Split(format!("label {l:?} repeated")));
        }
        left_axes.push(p);
    }
    let right_axes: Vec<usize> = (0..t.rank()).filter(|p| !left_axes.contains(p)).collect();
    let perm: Vec<usize> = left_axes.iter().chain(&right_axes).copied().collect();
    let tp = t.permute_axes(&perm);
    let m: usize = left_axes.iter().map(|&p| t.shape[p]).product();
    let n: usize = right_axes.iter().map(|&p| t.shape[p]).product();
    let svd = truncated_svd(&tp.data, m, n, max_bond, tol)?;
    let k = svd.kept;

    let mut right = svd.vh;
    for j in 0..k {
        for v in &mut right[j * n..(j + 1) * n] {
            *v *= svd.s[j];
        }
    }
    let mut ll: Vec<String> = left_axes.iter().map(|&p| t.labels[p].clone()).collect();
    ll.push(bond.to_string());
    let mut ls: Vec<usize> = left_axes.iter().map(|&p| t.shape[p]).collect();
    ls.push(k);
    let mut rl = vec![bond.to_string()];
    rl.extend(right_axes.iter().map(|&p| t.labels[p].clone()));
    let mut rs = vec![k];
    rs.extend(right_axes.iter().map(|&p| t.shape[p]));
    Ok(Split {
        left: Tensor::new(ll, ls, svd.u)?,
        right: Tensor::new(rl, rs, right)?,
        singular_values: svd.s,
        truncation_error: svd.discarded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn random(labels: Vec<&str>, shape: Vec<usize>, rng: &mut ChaCha8Rng) -> Tensor {
        Tensor::from_fn(labels, shape, |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).unwrap()
    }

    #[test]
    fn identity_contraction() {
        let a = Tensor::new(vec!["i", "j"], vec![2, 2], vec![c(1.0), c(0.0), c(0.0), c(1.0)]).unwrap();
        let b = Tensor::new(vec!["j"], vec![2], vec![c(3.0), c(4.0)]).unwrap();
        let r = contract(&a, &b).unwrap();
        assert_eq!(r.labels(), ["i"]);
        assert_eq!(r.data(), &[c(3.0), c(4.0)]);
    }

    #[test]
    fn outer_product_concatenates_shapes() {
        let a = Tensor::new(vec!["a"], vec![2], vec![c(1.0), c(2.0)]).unwrap();
        let b = Tensor::new(vec!["b"], vec![3], vec![c(1.0), c(10.0), c(100.0)]).unwrap();
        let r = contract(&a, &b).unwrap();
        assert_eq!(r.shape(), [2, 3]);
        assert_eq!(r.get(&[1, 2]), c(200.0));
    }

    #[test]
    fn shared_label_matches_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random(vec!["x", "s", "y"], vec![3, 4, 2], &mut rng);
        let b = random(vec!["z", "s", "w"], vec![2, 4, 5], &mut rng);
        let r = contract(&a, &b).unwrap();
        assert_eq!(r.labels(), ["x", "y", "z", "w"]);
        for x in 0..3 {
            for y in 0..2 {
                for z in 0..2 {
                    for w in 0..5 {
                        let mut want = ZERO;
                        for s in 0..4 {
                            want += a.get(&[x, s, y]) * b.get(&[z, s, w]);
                        }
                        assert!((r.get(&[x, y, z, w]) - want).norm() < 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = Tensor::zeros(vec!["i"], vec![2]).unwrap();
        let b = Tensor::zeros(vec!["i"], vec![3]).unwrap();
        assert!(matches!(contract(&a, &b), Err(Error::Contract(_))));
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(Tensor::zeros(vec!["i", "i"], vec![2, 2]).is_err());
        assert!(Tensor::new(vec!["i"], vec![3], vec![ZERO; 2]).is_err());
    }

    #[test]
    fn rank_one_split_has_bond_one() {
        let u = [1.0, 2.0, -1.0];
        let v = [0.5, 3.0];
        let t = Tensor::from_fn(vec!["a", "b"], vec![3, 2], |i| c(u[i[0]] * v[i[1]])).unwrap();
        let s = svd_split(&t, &["a"], "k", 8, 1e-14).unwrap();
        assert_eq!(s.left.dim("k"), Some(1));
        assert!(s.truncation_error < 1e-14);
    }

    #[test]
    fn truncated_identity_error_is_sqrt_two() {
        let t = Tensor::from_fn(vec!["a", "b"], vec![4, 4], |i| c(if i[0] == i[1] { 1.0 } else { 0.0 })).unwrap();
        let s = svd_split(&t, &["a"], "k", 2, 0.0).unwrap();
        assert_eq!(s.left.dim("k"), Some(2));
        assert!((s.truncation_error - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn lossless_split_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = random(vec!["a", "b", "c"], vec![2, 3, 4], &mut rng);
        let s = svd_split(&t, &["a"], "k", usize::MAX, 0.0).unwrap();
        let back = contract(&s.left, &s.right).unwrap();
        assert!(t.max_abs_diff(&back).unwrap() < 1e-12);
        // left factor is an isometry
        let gram = contract(&s.left.conj().with_label("k", "k2").unwrap(), &s.left).unwrap();
        for i in 0..gram.shape()[0] {
            for j in 0..gram.shape()[1] {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((gram.get(&[i, j]) - c(want)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn bad_split_sets() {
        let t = Tensor::zeros(vec!["a", "b"], vec![2, 2]).unwrap();
        assert!(matches!(svd_split(&t, &[], "k", 2, 0.0), Err(Error::Split(_))));
        assert!(matches!(svd_split(&t, &["a", "b"], "k", 2, 0.0), Err(Error::Split(_))));
    }

    #[test]
    fn permute_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let t = random(vec!["a", "b", "c"], vec![2, 3, 4], &mut rng);
        let p = t.permuted(&["c", "a", "b"]).unwrap();
        assert_eq!(p.get(&[3, 1, 2]), t.get(&[1, 2, 3]));
        assert!(t.max_abs_diff(&p).unwrap() == 0.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn contraction_is_bilinear(seed in any::<u64>(), alpha in -2.0f64..2.0) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let a1 = random(vec!["i", "s"], vec![3, 2], &mut rng);
                let a2 = random(vec!["i", "s"], vec![3, 2], &mut rng);
                let b = random(vec!["s", "j"], vec![2, 4], &mut rng);
                let mut sum = a1.clone();
                for (x, y) in sum.data_mut().iter_mut().zip(a2.data()) {
                    *x = *x * alpha + y;
                }
                let lhs = contract(&sum, &b).unwrap();
                let mut rhs = contract(&a1, &b).unwrap();
                rhs.scale(c(alpha));
                let r2 = contract(&a2, &b).unwrap();
                for (x, y) in rhs.data_mut().iter_mut().zip(r2.data()) {
                    *x += y;
                }
                prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
            }

            #[test]
            fn disjoint_contraction_commutes(seed in any::<u64>()) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let a = random(vec!["a", "b"], vec![2, 3], &mut rng);
                let b = random(vec!["c"], vec![4], &mut rng);
                let ab = contract(&a, &b).unwrap();
                let ba = contract(&b, &a).unwrap();
                prop_assert!(ab.max_abs_diff(&ba).unwrap() < 1e-14);
            }

            #[test]
            fn lossless_split_on_random_inputs(seed in any::<u64>(), d0 in 1usize..5, d1 in 1usize..5, d2 in 1usize..5) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let t = random(vec!["a", "b", "c"], vec![d0, d1, d2], &mut rng);
                let s = svd_split(&t, &["b"], "k", usize::MAX, 0.0).unwrap();
                let back = contract(&s.left, &s.right).unwrap();
                prop_assert!(t.max_abs_diff(&back).unwrap() < 1e-12);
            }
        }
    }
}

