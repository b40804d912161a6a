//! Dense 2-D tensors with a reverse-mode tape, the Adam optimiser and a
//! binary parameter checkpoint.

mod adam;
mod checkpoint;
mod tape;

pub use adam::{AdamConfig, AdamState};
pub use checkpoint::{read_checkpoint, write_checkpoint, CheckpointError, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use tape::{softmax_rows, Neighbourhood, Tape, Var, LAYER_NORM_EPS};

use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NnError {
    #[error("{op}: incompatible shapes {left:?} and {right:?}")]
    Shape {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("{op}: index {index} out of range for length {len}")]
    Index { op: &'static str, index: usize, len: usize },
}

pub type ParamId = usize;

/// A parameter value with its gradient slot.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub data: Array2<f64>,
    pub grad: Array2<f64>,
}

impl Tensor {
    pub fn new(data: Array2<f64>) -> Self {
        let grad = Array2::zeros(data.dim());
        Tensor { data, grad }
    }

    pub fn shape(&self) -> (usize, usize) {
        self.data.dim()
    }
}

/// Named, ordered collection of trainable tensors.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamSet {
    names: Vec<String>,
    tensors: Vec<Tensor>,
}

impl ParamSet {
    pub fn new() -> Self {
        ParamSet::default()
    }

    pub fn add(&mut self, name: impl Into<String>, data: Array2<f64>) -> ParamId {
        let name = name.into();
        assert!(!self.names.contains(&name), "duplicate parameter `{name}`");
        self.names.push(name);
        self.tensors.push(Tensor::new(data));
        self.tensors.len() - 1
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn id(&self, name: &str) -> Option<ParamId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn value(&self, id: ParamId) -> &Array2<f64> {
        &self.tensors[id].data
    }

    pub fn value_mut(&mut self, id: ParamId) -> &mut Array2<f64> {
        &mut self.tensors[id].data
    }

    pub fn grad(&self, id: ParamId) -> &Array2<f64> {
        &self.tensors[id].grad
    }

    pub fn grad_mut(&mut self, id: ParamId) -> &mut Array2<f64> {
        &mut self.tensors[id].grad
    }

    pub fn tensors(&self) -> &[Tensor] {
        &self.tensors
    }

    pub fn zero_grad(&mut self) {
        for t in &mut self.tensors {
            t.grad.fill(0.0);
        }
    }

    pub fn num_scalars(&self) -> usize {
        self.tensors.iter().map(|t| t.data.len()).sum()
    }
}

/// Glorot/Xavier uniform initialisation for a `rows × cols` weight.
pub fn glorot_uniform(rng: &mut impl Rng, rows: usize, cols: usize) -> Array2<f64> {
    let limit = (6.0 / (rows + cols) as f64).sqrt();
    let dist = Uniform::new_inclusive(-limit, limit).expect("finite bounds");
    Array2::from_shape_simple_fn((rows, cols), || dist.sample(rng))
}

pub fn standard_normal(rng: &mut impl Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_simple_fn((rows, cols), || StandardNormal.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const FD_EPS: f64 = 1e-5;

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / (a.abs() + b.abs()).max(1e-8)
    }

    /// Compares tape gradients with central differences for every scalar of
    /// every parameter.
    fn check_gradients(params: &mut ParamSet, f: &dyn Fn(&mut Tape, &ParamSet) -> Var) {
        params.zero_grad();
        let mut tape = Tape::new();
        let loss = f(&mut tape, params);
        tape.backward(loss, params).unwrap();
        for id in 0..params.len() {
            let (r, c) = params.value(id).dim();
            for i in 0..r {
                for j in 0..c {
                    let orig = params.value(id)[[i, j]];
                    params.value_mut(id)[[i, j]] = orig + FD_EPS;
                    let mut t = Tape::new();
                    let l = f(&mut t, params);
                    let up = t.scalar(l);
                    params.value_mut(id)[[i, j]] = orig - FD_EPS;
                    let mut t = Tape::new();
                    let l = f(&mut t, params);
                    let down = t.scalar(l);
                    params.value_mut(id)[[i, j]] = orig;
                    let numeric = (up - down) / (2.0 * FD_EPS);
                    let analytic = params.grad(id)[[i, j]];
                    assert!(
                        rel_err(numeric, analytic) < 1e-4 || (numeric - analytic).abs() < 1e-9,
                        "{}[{i},{j}]: numeric {numeric} analytic {analytic}",
                        params.names()[id]
                    );
                }
            }
        }
    }

    #[test]
    fn softmax_of_equal_scores_is_uniform() {
        let p = softmax_rows(&array![[2.0, 2.0, 2.0, 2.0]]);
        for v in p.iter() {
            assert!((v - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn softmax_rows_are_positive_and_normalised() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = standard_normal(&mut rng, 6, 5) * 30.0;
        let p = softmax_rows(&s);
        for row in p.rows() {
            assert!((row.sum() - 1.0).abs() < 1e-12);
            assert!(row.iter().all(|&v| v > 0.0));
        }
    }

    #[test]
    fn cross_entropy_of_one_hot_is_zero() {
        let mut tape = Tape::new();
        let p = tape.constant(array![[0.0, 1.0, 0.0]]);
        let l = tape.cross_entropy(p, &[1]).unwrap();
        assert_eq!(tape.scalar(l), 0.0);
    }

    #[test]
    fn layer_norm_of_two_values() {
        let mut tape = Tape::new();
        let x = tape.constant(array![[1.0, 3.0]]);
        let g = tape.constant(array![[1.0, 1.0]]);
        let b = tape.constant(array![[0.0, 0.0]]);
        let y = tape.layer_norm(x, g, b).unwrap();
        let expect = 1.0 / (1.0 + LAYER_NORM_EPS).sqrt();
        assert!((tape.value(y)[[0, 0]] + expect).abs() < 1e-12);
        assert!((tape.value(y)[[0, 1]] - expect).abs() < 1e-12);
        assert!((expect - 1.0).abs() < 1e-5);
    }

    #[test]
    fn relu_gradient_is_a_step() {
        let mut params = ParamSet::new();
        let x = params.add("x", array![[-1.0, 2.0]]);
        let mut tape = Tape::new();
        let v = tape.param(&params, x);
        let r = tape.relu(v);
        let s = tape.sum(r);
        tape.backward(s, &mut params).unwrap();
        assert_eq!(params.grad(x), &array![[0.0, 1.0]]);
    }

    #[test]
    fn fused_softmax_cross_entropy_gradient_is_p_minus_onehot() {
        let mut params = ParamSet::new();
        let s = params.add("s", array![[0.3, -1.2, 2.0]]);
        let mut tape = Tape::new();
        let sv = tape.param(&params, s);
        let l = tape.softmax_cross_entropy(sv, &[2]).unwrap();
        tape.backward(l, &mut params).unwrap();
        let mut expect = softmax_rows(params.value(s));
        expect[[0, 2]] -= 1.0;
        for (a, b) in params.grad(s).iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-15);
        }

        // the composed form agrees with the fused one
        let mut composed = params.clone();
        composed.zero_grad();
        let mut tape = Tape::new();
        let sv = tape.param(&composed, s);
        let p = tape.softmax_rows(sv);
        let l2 = tape.cross_entropy(p, &[2]).unwrap();
        tape.backward(l2, &mut composed).unwrap();
        for (a, b) in composed.grad(s).iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn shapes_and_labels_are_checked() {
        let mut tape = Tape::new();
        let a = tape.constant(Array2::zeros((2, 3)));
        let b = tape.constant(Array2::zeros((2, 3)));
        assert!(matches!(tape.matmul(a, b), Err(NnError::Shape { .. })));
        assert!(tape.matmul_t(a, b).is_ok());
        let p = tape.softmax_rows(a);
        assert!(matches!(tape.cross_entropy(p, &[0, 3]), Err(NnError::Index { .. })));
        assert!(matches!(tape.cross_entropy(p, &[0]), Err(NnError::Shape { .. })));
    }

    #[test]
    fn disconnected_loss_leaves_gradients_zero() {
        let mut params = ParamSet::new();
        let w = params.add("w", array![[1.0, 2.0]]);
        let mut tape = Tape::new();
        let _ = tape.param(&params, w);
        let c = tape.constant(array![[5.0]]);
        tape.backward(c, &mut params).unwrap();
        assert_eq!(params.grad(w), &array![[0.0, 0.0]]);
    }

    #[test]
    fn every_op_passes_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut params = ParamSet::new();
        let emb = params.add("emb", standard_normal(&mut rng, 5, 4));
        let w = params.add("w", glorot_uniform(&mut rng, 4, 4));
        let u = params.add("u", glorot_uniform(&mut rng, 4, 3));
        let gain = params.add("gain", Array2::ones((1, 4)) + standard_normal(&mut rng, 1, 4) * 0.1);
        let bias = params.add("bias", standard_normal(&mut rng, 1, 4) * 0.1);
        let nb = std::sync::Arc::new(Neighbourhood::from_edges(6, [(0, 1), (2, 1), (3, 4), (5, 0), (1, 5), (1, 1)]));

        let f = move |t: &mut Tape, p: &ParamSet| {
            let x = t.embed(p, emb, &[0, 3, 1, 4, 3, 2]).unwrap();
            let wv = t.param(p, w);
            let h = t.matmul_t(x, wv).unwrap();
            let m = t.mean_aggregate(x, nb.clone()).unwrap();
            let h = t.add(h, m).unwrap();
            let gv = t.param(p, gain);
            let bv = t.param(p, bias);
            let h = t.layer_norm(h, gv, bv).unwrap();
            let h = t.relu(h);
            let h = t.scale(h, 0.7);
            let a = t.gather_rows(h, &[0, 2, 5]).unwrap();
            let b = t.gather_rows(h, &[1, 3]).unwrap();
            let s = t.matmul_t(a, b).unwrap();
            let uv = t.param(p, u);
            let extra = t.matmul(a, uv).unwrap();
            let extra = t.sum(extra);
            let pr = t.softmax_rows(s);
            let ce = t.cross_entropy(pr, &[1, 0, 1]).unwrap();
            let fused = t.softmax_cross_entropy(s, &[0, 0, 1]).unwrap();
            let l = t.add(ce, fused).unwrap();
            let l = t.add(l, extra).unwrap();
            l
        };
        check_gradients(&mut params, &f);
    }
}
