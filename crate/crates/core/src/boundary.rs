//! Square-lattice networks and their approximate contraction by sweeping a
//! boundary chain (an MPS) across the columns.
//!
//! Cells carry the labels `up`, `down`, `left`, `right`. The chain runs down
//! the rows; each chain site has labels `up`, `phys`, `down` where `phys`
//! faces the not-yet-absorbed columns to the right.

use crate::error::{Error, Result};
use crate::tensor::{matmul, truncated_svd, Tensor, C64, ONE, ZERO};
use faer::MatRef;

pub const UP: &str = "up";
pub const DOWN: &str = "down";
pub const LEFT: &str = "left";
pub const RIGHT: &str = "right";
pub const PHYS: &str = "phys";

/// A cell stored in `(left, up, down, right)` order.
#[derive(Debug, Clone)]
pub struct Cell {
    pub left: usize,
    pub up: usize,
    pub down: usize,
    pub right: usize,
    pub data: Vec<C64>,
}

impl Cell {
    pub fn new(left: usize, up: usize, down: usize, right: usize, data: Vec<C64>) -> Self {
        assert_eq!(left * up * down * right, data.len());
        Cell { left, up, down, right, data }
    }

    /// Accepts any tensor whose labels are a subset of the four directions;
    /// absent directions get dimension one.
    pub fn from_tensor(t: &Tensor) -> Result<Self> {
        for l in t.labels() {
            if ![UP, DOWN, LEFT, RIGHT].contains(&l.as_str()) {
                return Err(Error::Structure(format!("unexpected cell label {l:?}")));
            }
        }
        let mut labels: Vec<String> = t.labels().to_vec();
        let mut shape = t.shape().to_vec();
        for d in [LEFT, UP, DOWN, RIGHT] {
            if t.position(d).is_none() {
                labels.push(d.to_string());
                shape.push(1);
            }
        }
        let full = Tensor::new(labels, shape, t.data().to_vec())?;
        let p = full.permuted(&[LEFT, UP, DOWN, RIGHT])?;
        let s = p.shape().to_vec();
        Ok(Cell::new(s[0], s[1], s[2], s[3], p.into_data()))
    }

    pub fn to_tensor(&self) -> Tensor {
        Tensor::from_parts(
            vec![LEFT.into(), UP.into(), DOWN.into(), RIGHT.into()],
            vec![self.left, self.up, self.down, self.right],
            self.data.clone(),
        )
    }
}

/// A rows x cols grid of cells in row-major order.
#[derive(Debug, Clone)]
pub struct GridNetwork {
    rows: usize,
    cols: usize,
    cells: Vec<Cell>,
}

impl GridNetwork {
    pub fn new(rows: usize, cols: usize, cells: Vec<Tensor>) -> Result<Self> {
        let cells = cells.iter().map(Cell::from_tensor).collect::<Result<Vec<_>>>()?;
        Self::from_cells(rows, cols, cells)
    }

    pub fn from_cells(rows: usize, cols: usize, cells: Vec<Cell>) -> Result<Self> {
        if rows == 0 || cols == 0 || cells.len() != rows * cols {
            return Err(Error::Structure(format!("{} cells for a {rows}x{cols} grid", cells.len())));
        }
        let g = GridNetwork { rows, cols, cells };
        for r in 0..rows {
            for c in 0..cols {
                let cell = g.cell(r, c);
                if r == 0 && cell.up != 1 || r + 1 == rows && cell.down != 1 {
                    return Err(Error::Structure(format!("open vertical boundary at ({r},{c})")));
                }
                if c == 0 && cell.left != 1 || c + 1 == cols && cell.right != 1 {
                    return Err(Error::Structure(format!("open horizontal boundary at ({r},{c})")));
                }
                if c + 1 < cols && cell.right != g.cell(r, c + 1).left {
                    return Err(Error::Structure(format!("bond mismatch right of ({r},{c})")));
                }
                if r + 1 < rows && cell.down != g.cell(r + 1, c).up {
                    return Err(Error::Structure(format!("bond mismatch below ({r},{c})")));
                }
            }
        }
        Ok(g)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn cell(&self, r: usize, c: usize) -> &Cell {
        &self.cells[r * self.cols + c]
    }

    pub fn column(&self, c: usize) -> Vec<Cell> {
        (0..self.rows).map(|r| self.cell(r, c).clone()).collect()
    }

    /// Swaps the roles of rows and columns (and of up/left, down/right).
    pub fn transposed(&self) -> GridNetwork {
        let mut cells = Vec::with_capacity(self.cells.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                let cell = self.cell(r, c);
                // (left, up, down, right) -> new (left=up, up=left, down=right, right=down)
                let mut data = vec![ZERO; cell.data.len()];
                let (l, u, d, rt) = (cell.left, cell.up, cell.down, cell.right);
                for il in 0..l {
                    for iu in 0..u {
                        for id in 0..d {
                            for ir in 0..rt {
                                let src = ((il * u + iu) * d + id) * rt + ir;
                                let dst = ((iu * l + il) * rt + ir) * d + id;
                                data[dst] = cell.data[src];
                            }
                        }
                    }
                }
                cells.push(Cell::new(u, l, rt, d, data));
            }
        }
        GridNetwork { rows: self.cols, cols: self.rows, cells }
    }

    /// Exact contraction by brute-force sequential tensor contraction.
    /// Only feasible for small grids; used as a reference.
    pub fn contract_dense(&self) -> Result<C64> {
        let mut acc = Tensor::scalar(ONE);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let cell = self.cell(r, c);
                let mut t = cell.to_tensor();
                // give every bond a unique name so neighbours contract
                t.relabel(LEFT, &format!("h{r}_{c}"))?;
                t.relabel(RIGHT, &format!("h{r}_{}", c + 1))?;
                t.relabel(UP, &format!("v{r}_{c}"))?;
                t.relabel(DOWN, &format!("v{}_{c}", r + 1))?;
                acc = crate::tensor::contract(&acc, &t)?;
            }
        }
        // boundary indices all have dimension one
        Ok(acc.data().iter().copied().sum())
    }
}

/// One chain site in `(up, phys, down)` order.
#[derive(Debug, Clone)]
struct Site {
    up: usize,
    phys: usize,
    down: usize,
    data: Vec<C64>,
}

/// Boundary MPS swept across a grid from left to right.
#[derive(Debug, Clone)]
pub struct BoundaryChain {
    sites: Vec<Site>,
    max_bond: usize,
    tol: f64,
    log_scale: f64,
    truncation_error: f64,
    zero: bool,
}

/// Outcome of a full grid contraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridValue {
    /// Value divided by `exp(log_scale)`.
    pub mantissa: C64,
    pub log_scale: f64,
    /// Sum of relative truncation errors over every truncation step.
    pub truncation_error: f64,
    /// `|mantissa|` relative to the same closing contraction taken over
    /// absolute values; values near machine precision indicate exact
    /// cancellation.
    pub cancellation: f64,
}

impl GridValue {
    pub fn value(&self) -> C64 {
        if self.mantissa == ZERO {
            return ZERO;
        }
        self.mantissa * self.log_scale.exp()
    }
}

impl BoundaryChain {
    /// A chain of `rows` sites with all dimensions one and value one.
    pub fn trivial(rows: usize, max_bond: usize, tol: f64) -> Self {
        let sites = (0..rows).map(|_| Site { up: 1, phys: 1, down: 1, data: vec![ONE] }).collect();
        BoundaryChain { sites, max_bond: max_bond.max(1), tol, log_scale: 0.0, truncation_error: 0.0, zero: false }
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn max_bond(&self) -> usize {
        self.max_bond
    }

    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    pub fn truncation_error(&self) -> f64 {
        self.truncation_error
    }

    /// Bond dimensions between consecutive sites.
    pub fn bond_dims(&self) -> Vec<usize> {
        self.sites.windows(2).map(|w| w[0].down).collect()
    }

    pub fn site_tensors(&self) -> Vec<Tensor> {
        self.sites
            .iter()
            .map(|s| {
                Tensor::from_parts(
                    vec![UP.into(), PHYS.into(), DOWN.into()],
                    vec![s.up, s.phys, s.down],
                    s.data.clone(),
                )
            })
            .collect()
    }

    /// Absorbs one column of cells, then canonicalizes, truncates to
    /// `max_bond` and moves the overall scale into `log_scale`.
    pub fn absorb(&mut self, column: &[Cell]) -> Result<()> {
        self.absorb_exact(column)?;
        if self.zero {
            return Ok(());
        }
        self.left_orthogonalize()?;
        self.truncate_sweep()?;
        Ok(())
    }

    fn absorb_exact(&mut self, column: &[Cell]) -> Result<()> {
        if column.len() != self.sites.len() {
            return Err(Error::Structure(format!("column of {} cells for chain of {}", column.len(), self.sites.len())));
        }
        for (k, (site, cell)) in self.sites.iter_mut().zip(column).enumerate() {
            if site.phys != cell.left {
                return Err(Error::Contract(format!("row {k}: chain phys {} vs cell left {}", site.phys, cell.left)));
            }
            let (a, p, b) = (site.up, site.phys, site.down);
            let (u, d, q) = (cell.up, cell.down, cell.right);
            // site (a,p,b) -> (a,b,p)
            let mut s = vec![ZERO; a * b * p];
            for ia in 0..a {
                for ip in 0..p {
                    for ib in 0..b {
                        s[(ia * b + ib) * p + ip] = site.data[(ia * p + ip) * b + ib];
                    }
                }
            }
            // (a b) x p  times  p x (u d q)
            let t = matmul(&s, &cell.data, a * b, p, u * d * q);
            // t[a,b,u,d,q] -> new[a,u,q,b,d]
            let mut out = vec![ZERO; t.len()];
            for ia in 0..a {
                for ib in 0..b {
                    for iu in 0..u {
                        for id in 0..d {
                            let src = (((ia * b + ib) * u + iu) * d + id) * q;
                            for iq in 0..q {
                                let dst = (((ia * u + iu) * q + iq) * b + ib) * d + id;
                                out[dst] = t[src + iq];
                            }
                        }
                    }
                }
            }
            *site = Site { up: a * u, phys: q, down: b * d, data: out };
        }
        Ok(())
    }

    /// QR sweep from the first to the last site; afterwards every site but
    /// the last is a left isometry.
    pub fn left_orthogonalize(&mut self) -> Result<()> {
        let n = self.sites.len();
        for k in 0..n.saturating_sub(1) {
            let (up, phys, down) = (self.sites[k].up, self.sites[k].phys, self.sites[k].down);
            let m = up * phys;
            let mat = MatRef::from_row_major_slice(&self.sites[k].data, m, down);
            let qr = mat.qr();
            let q = qr.compute_thin_Q();
            let r = qr.thin_R();
            let rank = q.ncols();
            self.sites[k] = Site { up, phys, down: rank, data: crate::tensor::to_row_major(q.as_ref()) };
            let rdata = crate::tensor::to_row_major(r);
            let next = &mut self.sites[k + 1];
            let data = matmul(&rdata, &next.data, rank, next.up, next.phys * next.down);
            next.up = rank;
            next.data = data;
        }
        Ok(())
    }

    /// SVD sweep from the last site back to the first, truncating each bond.
    /// Assumes the orthogonality center sits on the last site.
    fn truncate_sweep(&mut self) -> Result<()> {
        let n = self.sites.len();
        for k in (1..n).rev() {
            let (up, phys, down) = (self.sites[k].up, self.sites[k].phys, self.sites[k].down);
            let svd = truncated_svd(&self.sites[k].data, up, phys * down, self.max_bond, self.tol)?;
            let norm = (svd.s.iter().map(|v| v * v).sum::<f64>() + svd.discarded * svd.discarded).sqrt();
            if norm == 0.0 {
                self.zero = true;
                return Ok(());
            }
            self.truncation_error += svd.discarded / norm;
            let kept = svd.kept;
            self.sites[k] = Site { up: kept, phys, down, data: svd.vh };
            // U S folded into the previous site's down bond
            let mut us = svd.u;
            for i in 0..up {
                for j in 0..kept {
                    us[i * kept + j] *= svd.s[j];
                }
            }
            let prev = &mut self.sites[k - 1];
            let data = matmul(&prev.data, &us, prev.up * prev.phys, prev.down, kept);
            prev.down = kept;
            prev.data = data;
        }
        let first = &mut self.sites[0];
        let norm = first.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            self.zero = true;
            return Ok(());
        }
        for v in &mut first.data {
            *v /= norm;
        }
        self.log_scale += norm.ln();
        Ok(())
    }

    /// Maximum deviation from the identity of `A A^dagger` over the
    /// `(phys, down)` indices, for every site except the first. Holds after
    /// each absorption.
    pub fn right_isometry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for s in self.sites.iter().skip(1) {
            let cols = s.phys * s.down;
            for i in 0..s.up {
                for j in 0..s.up {
                    let mut acc = ZERO;
                    for x in 0..cols {
                        acc += s.data[i * cols + x] * s.data[j * cols + x].conj();
                    }
                    let want = if i == j { ONE } else { ZERO };
                    worst = worst.max((acc - want).norm());
                }
            }
        }
        worst
    }

    /// Maximum deviation from the identity of `A^dagger A` over `(up, phys)`
    /// for every site but the last.
    pub fn left_isometry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let n = self.sites.len();
        for s in self.sites.iter().take(n.saturating_sub(1)) {
            let rows = s.up * s.phys;
            for i in 0..s.down {
                for j in 0..s.down {
                    let mut acc = ZERO;
                    for x in 0..rows {
                        acc += s.data[x * s.down + i].conj() * s.data[x * s.down + j];
                    }
                    let want = if i == j { ONE } else { ZERO };
                    worst = worst.max((acc - want).norm());
                }
            }
        }
        worst
    }

    /// Contracts the chain against a final column whose `right` bonds are
    /// all of dimension one.
    pub fn close(&self, column: &[Cell]) -> Result<GridValue> {
        if column.len() != self.sites.len() {
            return Err(Error::Structure("closing column length mismatch".into()));
        }
        if self.zero {
            return Ok(GridValue { mantissa: ZERO, log_scale: 0.0, truncation_error: self.truncation_error, cancellation: 0.0 });
        }
        // env[a, u]: chain bond a, column bond u
        let mut env = vec![ONE];
        let (mut ea, mut eu) = (1usize, 1usize);
        // the same contraction over absolute values, for the cancellation estimate
        let mut abs_env = vec![1.0f64];
        for (site, cell) in self.sites.iter().zip(column) {
            if cell.right != 1 {
                return Err(Error::Structure("closing column has open right bonds".into()));
            }
            if site.phys != cell.left || site.up != ea || cell.up != eu {
                return Err(Error::Contract("closing column dimension mismatch".into()));
            }
            let (a, p, b) = (site.up, site.phys, site.down);
            let (u, d) = (cell.up, cell.down);
            // tmp[u, p, b] = sum_a env[a,u] site[a,p,b]
            let mut env_t = vec![ZERO; u * a];
            for ia in 0..a {
                for iu in 0..u {
                    env_t[iu * a + ia] = env[ia * u + iu];
                }
            }
            let tmp = matmul(&env_t, &site.data, u, a, p * b);
            // out[b, d] = sum_{u,p} tmp[u,p,b] cell[p,u,d]
            let mut out = vec![ZERO; b * d];
            for iu in 0..u {
                for ip in 0..p {
                    for ib in 0..b {
                        let tv = tmp[(iu * p + ip) * b + ib];
                        if tv == ZERO {
                            continue;
                        }
                        let crow = &cell.data[(ip * u + iu) * d..(ip * u + iu) * d + d];
                        for (id, cv) in crow.iter().enumerate() {
                            out[ib * d + id] += tv * cv;
                        }
                    }
                }
            }
            env = out;
            ea = b;
            eu = d;

            let mut abs_tmp = vec![0.0f64; u * p * b];
            for iu in 0..u {
                for ia in 0..a {
                    let e = abs_env[ia * u + iu];
                    if e == 0.0 {
                        continue;
                    }
                    for x in 0..p * b {
                        abs_tmp[iu * p * b + x] += e * site.data[ia * p * b + x].norm();
                    }
                }
            }
            let mut abs_out = vec![0.0f64; b * d];
            for iu in 0..u {
                for ip in 0..p {
                    for ib in 0..b {
                        let tv = abs_tmp[(iu * p + ip) * b + ib];
                        if tv == 0.0 {
                            continue;
                        }
                        for id in 0..d {
                            abs_out[ib * d + id] += tv * cell.data[(ip * u + iu) * d + id].norm();
                        }
                    }
                }
            }
            abs_env = abs_out;
        }
        let mantissa = env[0];
        let cancellation = if abs_env[0] > 0.0 { mantissa.norm() / abs_env[0] } else { 0.0 };
        Ok(GridValue { mantissa, log_scale: self.log_scale, truncation_error: self.truncation_error, cancellation })
    }
}

/// Contracts the whole grid, absorbing columns left to right and closing
/// against the last one.
pub fn contract_grid(net: &GridNetwork, max_bond: usize, tol: f64) -> Result<GridValue> {
    let mut chain = BoundaryChain::trivial(net.rows(), max_bond, tol);
    for c in 0..net.cols() - 1 {
        chain.absorb(&net.column(c))?;
    }
    chain.close(&net.column(net.cols() - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_grid(rows: usize, cols: usize, bond: usize, seed: u64) -> GridNetwork {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cells = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let l = if c == 0 { 1 } else { bond };
                let rt = if c + 1 == cols { 1 } else { bond };
                let u = if r == 0 { 1 } else { bond };
                let d = if r + 1 == rows { 1 } else { bond };
                let data = (0..l * u * d * rt)
                    .map(|_| C64::new(rng.gen_range(0.0..1.0), rng.gen_range(-0.3..0.3)))
                    .collect();
                cells.push(Cell::new(l, u, d, rt, data));
            }
        }
        GridNetwork::from_cells(rows, cols, cells).unwrap()
    }

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn all_ones_unit_bonds() {
        let cells = (0..4).map(|_| Cell::new(1, 1, 1, 1, vec![ONE])).collect();
        let g = GridNetwork::from_cells(2, 2, cells).unwrap();
        let v = contract_grid(&g, 4, 1e-14).unwrap();
        assert!((v.value() - ONE).norm() < 1e-14);
    }

    #[test]
    fn exact_bond_matches_dense() {
        let g = random_grid(3, 3, 2, 5);
        let dense = g.contract_dense().unwrap();
        let v = contract_grid(&g, 512, 1e-14).unwrap();
        assert!(rel(v.value(), dense) < 1e-10, "{} vs {}", v.value(), dense);
        assert!(v.truncation_error < 1e-12);
    }

    #[test]
    fn bond_one_truncates() {
        let g = random_grid(3, 3, 2, 5);
        let exact = contract_grid(&g, 512, 1e-14).unwrap().value();
        let v = contract_grid(&g, 1, 1e-14).unwrap();
        let dev = rel(v.value(), exact);
        assert!(dev > 0.0);
        assert!(v.truncation_error > 0.0);
        // error estimate within two orders of magnitude of the observed deviation
        assert!(v.truncation_error * 100.0 > dev, "err {} dev {}", v.truncation_error, dev);
    }

    #[test]
    fn transpose_invariance() {
        let g = random_grid(3, 4, 2, 9);
        let a = contract_grid(&g, 512, 1e-14).unwrap().value();
        let b = contract_grid(&g.transposed(), 512, 1e-14).unwrap().value();
        assert!(rel(a, b) < 1e-10);
    }

    #[test]
    fn canonical_form_after_absorb() {
        let g = random_grid(5, 3, 2, 1);
        let mut chain = BoundaryChain::trivial(5, 3, 1e-14);
        chain.absorb(&g.column(0)).unwrap();
        chain.absorb(&g.column(1)).unwrap();
        assert!(chain.right_isometry_defect() < 1e-12);
        assert!(chain.bond_dims().iter().all(|&b| b <= 3));
        chain.left_orthogonalize().unwrap();
        assert!(chain.left_isometry_defect() < 1e-12);
    }

    #[test]
    fn single_row_and_column() {
        let g = random_grid(1, 4, 3, 2);
        let v = contract_grid(&g, 2, 1e-14).unwrap();
        assert!(rel(v.value(), g.contract_dense().unwrap()) < 1e-12);
        let g = random_grid(4, 1, 3, 2);
        let v = contract_grid(&g, 2, 1e-14).unwrap();
        assert!(rel(v.value(), g.contract_dense().unwrap()) < 1e-12);
    }

    #[test]
    fn mismatched_bonds_rejected() {
        let cells = vec![Cell::new(1, 1, 1, 2, vec![ONE; 2]), Cell::new(3, 1, 1, 1, vec![ONE; 3])];
        assert!(GridNetwork::from_cells(1, 2, cells).is_err());
    }

    #[test]
    fn from_tensor_fills_missing_directions() {
        let t = Tensor::new(vec![RIGHT], vec![2], vec![ONE, ONE]).unwrap();
        let c = Cell::from_tensor(&t).unwrap();
        assert_eq!((c.left, c.up, c.down, c.right), (1, 1, 1, 2));
    }
}
