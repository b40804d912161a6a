use std::sync::Arc;

use ndarray::{Array2, Axis};

use super::{NnError, ParamId, ParamSet};

pub const LAYER_NORM_EPS: f64 = 1e-5;

/// Handle to a value recorded on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(usize);

/// Incoming neighbour lists in CSR form: the sources feeding node `i` are
/// `sources[offsets[i]..offsets[i + 1]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Neighbourhood {
    offsets: Vec<usize>,
    sources: Vec<u32>,
}

impl Neighbourhood {
    /// Builds the incoming lists for `num_nodes` nodes from `(src, dst)` pairs.
    pub fn from_edges(num_nodes: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut lists: Vec<Vec<u32>> = vec![Vec::new(); num_nodes];
        for (s, d) in edges {
            lists[d as usize].push(s);
        }
        let mut offsets = Vec::with_capacity(num_nodes + 1);
        let mut sources = Vec::new();
        offsets.push(0);
        for l in lists {
            sources.extend(l);
            offsets.push(sources.len());
        }
        Neighbourhood { offsets, sources }
    }

    pub fn num_nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn num_edges(&self) -> usize {
        self.sources.len()
    }

    pub fn incoming(&self, i: usize) -> &[u32] {
        &self.sources[self.offsets[i]..self.offsets[i + 1]]
    }
}

enum Op {
    Leaf,
    Param(ParamId),
    Embed { param: ParamId, rows: Vec<usize> },
    MatMul(Var, Var),
    MatMulT(Var, Var),
    Add(Var, Var),
    Scale(Var, f64),
    MeanAggregate(Var, Arc<Neighbourhood>),
    LayerNorm { x: Var, gain: Var, bias: Var, xhat: Array2<f64>, inv_std: Vec<f64> },
    Relu(Var),
    GatherRows(Var, Vec<usize>),
    SoftmaxRows(Var),
    CrossEntropy(Var, Vec<usize>),
    SoftmaxCrossEntropy { logits: Var, labels: Vec<usize>, probs: Array2<f64> },
    Sum(Var),
}

struct Node {
    value: Array2<f64>,
    op: Op,
}

/// Records a forward computation so that [`Tape::backward`] can push
/// gradients back into the parameter slots it read from.
#[derive(Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

fn shape(a: &Array2<f64>) -> (usize, usize) {
    a.dim()
}

impl Tape {
    pub fn new() -> Self {
        Tape::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, v: Var) -> &Array2<f64> {
        &self.nodes[v.0].value
    }

    /// The single entry of a 1×1 value.
    pub fn scalar(&self, v: Var) -> f64 {
        self.value(v)[[0, 0]]
    }

    fn push(&mut self, value: Array2<f64>, op: Op) -> Var {
        self.nodes.push(Node { value, op });
        Var(self.nodes.len() - 1)
    }

    pub fn constant(&mut self, value: Array2<f64>) -> Var {
        self.push(value, Op::Leaf)
    }

    pub fn param(&mut self, params: &ParamSet, id: ParamId) -> Var {
        self.push(params.value(id).clone(), Op::Param(id))
    }

    /// Rows of an embedding table, one per index.
    pub fn embed(&mut self, params: &ParamSet, id: ParamId, rows: &[usize]) -> Result<Var, NnError> {
        let table = params.value(id);
        let (n, d) = shape(table);
        let mut out = Array2::zeros((rows.len(), d));
        for (i, &r) in rows.iter().enumerate() {
            if r >= n {
                return Err(NnError::Index { op: "embed", index: r, len: n });
            }
            out.row_mut(i).assign(&table.row(r));
        }
        Ok(self.push(
            out,
            Op::Embed {
                param: id,
                rows: rows.to_vec(),
            },
        ))
    }

    fn check(&self, op: &'static str, ok: bool, a: Var, b: Var) -> Result<(), NnError> {
        if ok {
            Ok(())
        } else {
            Err(NnError::Shape {
                op,
                left: shape(self.value(a)),
                right: shape(self.value(b)),
            })
        }
    }

    /// `a · b`
    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var, NnError> {
        self.check("matmul", self.value(a).ncols() == self.value(b).nrows(), a, b)?;
        let v = self.value(a).dot(self.value(b));
        Ok(self.push(v, Op::MatMul(a, b)))
    }

    /// `a · bᵀ`
    pub fn matmul_t(&mut self, a: Var, b: Var) -> Result<Var, NnError> {
        self.check("matmul_t", self.value(a).ncols() == self.value(b).ncols(), a, b)?;
        let v = self.value(a).dot(&self.value(b).t());
        Ok(self.push(v, Op::MatMulT(a, b)))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var, NnError> {
        self.check("add", self.value(a).dim() == self.value(b).dim(), a, b)?;
        let v = self.value(a) + self.value(b);
        Ok(self.push(v, Op::Add(a, b)))
    }

    pub fn scale(&mut self, a: Var, c: f64) -> Var {
        let v = self.value(a) * c;
        self.push(v, Op::Scale(a, c))
    }

    /// Row `i` of the result is the mean of the rows of `x` listed as
    /// incoming to `i`, or zero when there are none.
    pub fn mean_aggregate(&mut self, x: Var, nb: Arc<Neighbourhood>) -> Result<Var, NnError> {
        let xv = self.value(x);
        if nb.num_nodes() != xv.nrows() {
            return Err(NnError::Shape {
                op: "mean_aggregate",
                left: shape(xv),
                right: (nb.num_nodes(), xv.ncols()),
            });
        }
        let mut out = Array2::zeros(xv.dim());
        for i in 0..nb.num_nodes() {
            let inc = nb.incoming(i);
            if inc.is_empty() {
                continue;
            }
            let mut row = out.row_mut(i);
            for &j in inc {
                row += &xv.row(j as usize);
            }
            row *= 1.0 / inc.len() as f64;
        }
        Ok(self.push(out, Op::MeanAggregate(x, nb)))
    }

    /// Per-row normalisation to zero mean and unit variance, followed by a
    /// learned `1×d` gain and bias.
    pub fn layer_norm(&mut self, x: Var, gain: Var, bias: Var) -> Result<Var, NnError> {
        let d = self.value(x).ncols();
        self.check("layer_norm", self.value(gain).dim() == (1, d), x, gain)?;
        self.check("layer_norm", self.value(bias).dim() == (1, d), x, bias)?;
        let xv = self.value(x);
        let mut xhat = xv.clone();
        let mut inv_std = Vec::with_capacity(xv.nrows());
        for mut row in xhat.rows_mut() {
            let mean = row.sum() / d as f64;
            row -= mean;
            let var = row.iter().map(|v| v * v).sum::<f64>() / d as f64;
            let s = 1.0 / (var + LAYER_NORM_EPS).sqrt();
            row *= s;
            inv_std.push(s);
        }
        let out = &xhat * &self.value(gain).row(0) + &self.value(bias).row(0);
        Ok(self.push(
            out,
            Op::LayerNorm {
                x,
                gain,
                bias,
                xhat,
                inv_std,
            },
        ))
    }

    pub fn relu(&mut self, a: Var) -> Var {
        let v = self.value(a).mapv(|x| x.max(0.0));
        self.push(v, Op::Relu(a))
    }

    pub fn gather_rows(&mut self, x: Var, rows: &[usize]) -> Result<Var, NnError> {
        let xv = self.value(x);
        let mut out = Array2::zeros((rows.len(), xv.ncols()));
        for (i, &r) in rows.iter().enumerate() {
            if r >= xv.nrows() {
                return Err(NnError::Index {
                    op: "gather_rows",
                    index: r,
                    len: xv.nrows(),
                });
            }
            out.row_mut(i).assign(&xv.row(r));
        }
        Ok(self.push(out, Op::GatherRows(x, rows.to_vec())))
    }

    pub fn softmax_rows(&mut self, a: Var) -> Var {
        let v = softmax_rows(self.value(a));
        self.push(v, Op::SoftmaxRows(a))
    }

    fn check_labels(&self, op: &'static str, p: Var, labels: &[usize]) -> Result<(), NnError> {
        let (n, k) = shape(self.value(p));
        if labels.len() != n {
            return Err(NnError::Shape {
                op,
                left: (n, k),
                right: (labels.len(), 1),
            });
        }
        if let Some(&l) = labels.iter().find(|&&l| l >= k) {
            return Err(NnError::Index { op, index: l, len: k });
        }
        Ok(())
    }

    /// Mean negative log-probability of each row's label, given
    /// row-stochastic `p`.
    pub fn cross_entropy(&mut self, p: Var, labels: &[usize]) -> Result<Var, NnError> {
        self.check_labels("cross_entropy", p, labels)?;
        let pv = self.value(p);
        let loss = -labels.iter().enumerate().map(|(i, &l)| pv[[i, l]].ln()).sum::<f64>() / labels.len() as f64;
        Ok(self.push(Array2::from_elem((1, 1), loss), Op::CrossEntropy(p, labels.to_vec())))
    }

    /// `cross_entropy(softmax_rows(logits))` computed in log space.
    pub fn softmax_cross_entropy(&mut self, logits: Var, labels: &[usize]) -> Result<Var, NnError> {
        self.check_labels("softmax_cross_entropy", logits, labels)?;
        let sv = self.value(logits);
        let mut loss = 0.0;
        for (i, &l) in labels.iter().enumerate() {
            let row = sv.row(i);
            let m = row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
            let lse = m + row.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
            loss += lse - row[l];
        }
        loss /= labels.len() as f64;
        let probs = softmax_rows(sv);
        Ok(self.push(
            Array2::from_elem((1, 1), loss),
            Op::SoftmaxCrossEntropy {
                logits,
                labels: labels.to_vec(),
                probs,
            },
        ))
    }

    pub fn sum(&mut self, a: Var) -> Var {
        let s = self.value(a).sum();
        self.push(Array2::from_elem((1, 1), s), Op::Sum(a))
    }

    /// Reverse pass from a 1×1 `loss`, accumulating into the gradient slots
    /// of every parameter the computation read.
    pub fn backward(&self, loss: Var, params: &mut ParamSet) -> Result<(), NnError> {
        if self.value(loss).dim() != (1, 1) {
            return Err(NnError::Shape {
                op: "backward",
                left: self.value(loss).dim(),
                right: (1, 1),
            });
        }
        let mut grads: Vec<Option<Array2<f64>>> = (0..self.nodes.len()).map(|_| None).collect();
        grads[loss.0] = Some(Array2::ones((1, 1)));

        fn acc(grads: &mut [Option<Array2<f64>>], v: Var, g: Array2<f64>) {
            match &mut grads[v.0] {
                Some(existing) => *existing += &g,
                slot @ None => *slot = Some(g),
            }
        }

        for idx in (0..=loss.0).rev() {
            let Some(g) = grads[idx].take() else { continue };
            let node = &self.nodes[idx];
            match &node.op {
                Op::Leaf => {}
                Op::Param(id) => *params.grad_mut(*id) += &g,
                Op::Embed { param, rows } => {
                    let slot = params.grad_mut(*param);
                    for (i, &r) in rows.iter().enumerate() {
                        let mut dst = slot.row_mut(r);
                        dst += &g.row(i);
                    }
                }
                Op::MatMul(a, b) => {
                    let ga = g.dot(&self.value(*b).t());
                    let gb = self.value(*a).t().dot(&g);
                    acc(&mut grads, *a, ga);
                    acc(&mut grads, *b, gb);
                }
                Op::MatMulT(a, b) => {
                    let ga = g.dot(self.value(*b));
                    let gb = g.t().dot(self.value(*a));
                    acc(&mut grads, *a, ga);
                    acc(&mut grads, *b, gb);
                }
                Op::Add(a, b) => {
                    acc(&mut grads, *a, g.clone());
                    acc(&mut grads, *b, g);
                }
                Op::Scale(a, c) => acc(&mut grads, *a, g * *c),
                Op::MeanAggregate(x, nb) => {
                    let mut gx = Array2::zeros(self.value(*x).dim());
                    for i in 0..nb.num_nodes() {
                        let inc = nb.incoming(i);
                        if inc.is_empty() {
                            continue;
                        }
                        let gi = &g.row(i) * (1.0 / inc.len() as f64);
                        for &j in inc {
                            let mut dst = gx.row_mut(j as usize);
                            dst += &gi;
                        }
                    }
                    acc(&mut grads, *x, gx);
                }
                Op::LayerNorm {
                    x,
                    gain,
                    bias,
                    xhat,
                    inv_std,
                } => {
                    let gain_row = self.value(*gain).row(0).to_owned();
                    let d = xhat.ncols() as f64;
                    let dgain = (&g * xhat).sum_axis(Axis(0)).insert_axis(Axis(0));
                    let dbias = g.sum_axis(Axis(0)).insert_axis(Axis(0));
                    let dxhat = &g * &gain_row;
                    let mut gx = Array2::zeros(xhat.dim());
                    for i in 0..xhat.nrows() {
                        let dh = dxhat.row(i);
                        let h = xhat.row(i);
                        let s1 = dh.sum();
                        let s2 = dh.dot(&h);
                        let mut out = gx.row_mut(i);
                        for k in 0..h.len() {
                            out[k] = inv_std[i] / d * (d * dh[k] - s1 - h[k] * s2);
                        }
                    }
                    acc(&mut grads, *x, gx);
                    acc(&mut grads, *gain, dgain);
                    acc(&mut grads, *bias, dbias);
                }
                Op::Relu(a) => {
                    let mask = self.value(*a).mapv(|v| if v > 0.0 { 1.0 } else { 0.0 });
                    acc(&mut grads, *a, g * mask);
                }
                Op::GatherRows(x, rows) => {
                    let mut gx = Array2::zeros(self.value(*x).dim());
                    for (i, &r) in rows.iter().enumerate() {
                        let mut dst = gx.row_mut(r);
                        dst += &g.row(i);
                    }
                    acc(&mut grads, *x, gx);
                }
                Op::SoftmaxRows(a) => {
                    let p = &node.value;
                    let mut ga = &g * p;
                    for (mut row, prow) in ga.rows_mut().into_iter().zip(p.rows()) {
                        let s = row.sum();
                        row.scaled_add(-s, &prow);
                    }
                    acc(&mut grads, *a, ga);
                }
                Op::CrossEntropy(p, labels) => {
                    let pv = self.value(*p);
                    let c = g[[0, 0]] / labels.len() as f64;
                    let mut gp = Array2::zeros(pv.dim());
                    for (i, &l) in labels.iter().enumerate() {
                        gp[[i, l]] = -c / pv[[i, l]];
                    }
                    acc(&mut grads, *p, gp);
                }
                Op::SoftmaxCrossEntropy { logits, labels, probs } => {
                    let c = g[[0, 0]] / labels.len() as f64;
                    let mut gs = probs.clone();
                    for (i, &l) in labels.iter().enumerate() {
                        gs[[i, l]] -= 1.0;
                    }
                    gs *= c;
                    acc(&mut grads, *logits, gs);
                }
                Op::Sum(a) => {
                    let ga = Array2::from_elem(self.value(*a).dim(), g[[0, 0]]);
                    acc(&mut grads, *a, ga);
                }
            }
        }
        Ok(())
    }
}

/// Numerically stable row-wise softmax.
pub fn softmax_rows(s: &Array2<f64>) -> Array2<f64> {
    let mut out = s.clone();
    for mut row in out.rows_mut() {
        let m = row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        row.mapv_inplace(|v| (v - m).exp());
        let z = row.sum();
        row /= z;
    }
    out
}
