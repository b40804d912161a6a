//! Independent reference checks: a dense RGCN forward pass, brute-force
//! mapping enumeration, finite-difference gradients and mutation
//! preservation over the bundled corpus.

use std::time::Instant;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::corpus::Corpus;
use crate::graph::{Edge, ProgramGraph, Relation, NUM_RELATIONS};
use crate::lang::{interpret, normalize_output, Program, TestSuite, DEFAULT_STEP_LIMIT};
use crate::mapper::{enumerate_mappings, joint_probability, ModelConfig, ModelParams, Side};
use crate::mutate::{apply_config, MutationConfig};
use crate::nn::{Tape, LAYER_NORM_EPS};
use crate::util::mix_seed;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

/// Random graph with `n` nodes, random kinds below `kinds`, random edges of
/// every relation and `vars` variable nodes.
pub fn random_graph(rng: &mut impl Rng, n: usize, vars: usize, kinds: u16) -> ProgramGraph {
    let nodes: Vec<u16> = (0..n).map(|_| rng.random_range(0..kinds)).collect();
    let mut edges = Vec::new();
    for _ in 0..rng.random_range(0..=3 * n) {
        edges.push(Edge {
            src: rng.random_range(0..n) as u32,
            dst: rng.random_range(0..n) as u32,
            rel: Relation::ALL[rng.random_range(0..NUM_RELATIONS)],
        });
    }
    let mut all: Vec<u32> = (0..n as u32).collect();
    for i in 0..vars.min(n) {
        let j = rng.random_range(i..n);
        all.swap(i, j);
    }
    let var_nodes: Vec<u32> = all[..vars.min(n)].to_vec();
    ProgramGraph {
        nodes,
        var_names: (0..var_nodes.len()).map(|i| format!("v{i}")).collect(),
        var_nodes,
        edges,
    }
}

/// Encoder output computed with dense per-relation adjacency matrices and
/// explicit loops, without the autodiff tape.
pub fn dense_encode(graph: &ProgramGraph, side: Side, model: &ModelParams) -> Array2<f64> {
    let n = graph.num_nodes();
    let d = model.config.hidden;
    let value = |name: &str| model.params.value(model.params.id(name).expect("parameter exists")).clone();
    let table = value("embedding");
    let mut x = Array2::zeros((n, d));
    for (i, &k) in graph.nodes.iter().enumerate() {
        x.row_mut(i).assign(&table.row(k as usize));
    }
    let mut adj = vec![Array2::<f64>::zeros((n, n)); NUM_RELATIONS];
    for e in &graph.edges {
        if model.config.edges.enabled(e.rel.family()) {
            adj[e.rel as usize][[e.dst as usize, e.src as usize]] += 1.0;
        }
    }
    for s in 0..model.config.steps {
        let prefix = format!("{}.{s}", side.label());
        let root = value(&format!("{prefix}.root"));
        let gain = value(&format!("{prefix}.ln_gain"));
        let bias = value(&format!("{prefix}.ln_bias"));
        let mut next = Array2::zeros((n, d));
        for i in 0..n {
            let mut pre = vec![0.0; d];
            for a in 0..d {
                for b in 0..d {
                    pre[a] += root[[a, b]] * x[[i, b]];
                }
            }
            for (r, a_r) in adj.iter().enumerate() {
                let degree: f64 = a_r.row(i).sum();
                if degree == 0.0 {
                    continue;
                }
                let w = value(&format!("{prefix}.rel{r}"));
                for j in 0..n {
                    let c = a_r[[i, j]] / degree;
                    if c == 0.0 {
                        continue;
                    }
                    for a in 0..d {
                        for b in 0..d {
                            pre[a] += c * w[[a, b]] * x[[j, b]];
                        }
                    }
                }
            }
            let mean = pre.iter().sum::<f64>() / d as f64;
            let var = pre.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / d as f64;
            let inv = 1.0 / (var + LAYER_NORM_EPS).sqrt();
            for a in 0..d {
                let y = (pre[a] - mean) * inv * gain[[0, a]] + bias[[0, a]];
                next[[i, a]] = y.max(0.0);
            }
        }
        x = next;
    }
    x
}

fn random_model(rng: &mut ChaCha8Rng, d: usize) -> ModelParams {
    let cfg = ModelConfig {
        hidden: d,
        ..ModelConfig::default()
    };
    let mut m = ModelParams::init(cfg, rng).expect("valid config");
    // perturb the layer-norm parameters away from their identity start
    let names: Vec<String> = m.params.names().to_vec();
    for (id, name) in names.iter().enumerate() {
        if name.ends_with("ln_gain") || name.ends_with("ln_bias") {
            m.params.value_mut(id).mapv_inplace(|v| v + rng.random_range(-0.5..0.5));
        }
    }
    m
}

/// Largest absolute deviation between the tape encoder and
/// [`dense_encode`] over `cases` random graphs.
pub fn rgcn_oracle_deviation(cases: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let d = rng.random_range(1..=8);
        let model = random_model(&mut rng, d);
        let n = rng.random_range(1..=20);
        let g = random_graph(&mut rng, n, 1, model.vocab.len() as u16);
        for side in [Side::Buggy, Side::Correct] {
            let fast = crate::mapper::rgcn_encode(&g, side, &model).expect("kinds inside vocab");
            let slow = dense_encode(&g, side, &model);
            for (a, b) in fast.iter().zip(slow.iter()) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    worst
}

/// Every assignment of `p`, sorted by joint probability (descending) with
/// ties in lexicographic column order.
pub fn brute_force_mappings(p: &Array2<f64>) -> Vec<(Vec<usize>, f64)> {
    let (rows, cols) = p.dim();
    if cols == 0 && rows > 0 {
        return Vec::new();
    }
    let total = cols.pow(rows as u32);
    let mut all: Vec<(Vec<usize>, f64)> = (0..total)
        .map(|mut code| {
            let mut a = vec![0; rows];
            for slot in a.iter_mut().rev() {
                *slot = code % cols;
                code /= cols;
            }
            let prob = joint_probability(p, &a);
            (a, prob)
        })
        .collect();
    all.sort_by(|x, y| y.1.total_cmp(&x.1).then_with(|| x.0.cmp(&y.0)));
    all
}

/// Random row-stochastic matrix. Entries are drawn from a small set of
/// weights half of the time so that ties occur.
pub fn random_stochastic(rng: &mut impl Rng, rows: usize, cols: usize) -> Array2<f64> {
    let coarse = rng.random_bool(0.5);
    let mut p = Array2::from_shape_fn((rows, cols), |_| {
        if coarse {
            rng.random_range(1..=3) as f64
        } else {
            rng.random_range(0.01..1.0)
        }
    });
    for mut row in p.rows_mut() {
        let s = row.sum();
        row.mapv_inplace(|v| v / s);
    }
    p
}

/// Number of random matrices (up to 3×3) whose enumeration order differs
/// from the brute-force order.
pub fn enumeration_mismatches(cases: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..cases)
        .filter(|_| {
            let (rows, cols) = (rng.random_range(1..=3), rng.random_range(1..=3));
            let p = random_stochastic(&mut rng, rows, cols);
            let fast: Vec<Vec<usize>> = enumerate_mappings(&p).map(|(c, _)| c).collect();
            let slow: Vec<Vec<usize>> = brute_force_mappings(&p).into_iter().map(|(c, _)| c).collect();
            fast != slow
        })
        .count()
}

/// Cross-entropy of the model's scores for one labelled pair.
pub fn pair_loss(model: &ModelParams, buggy: &ProgramGraph, correct: &ProgramGraph, labels: &[usize]) -> f64 {
    let gb = model.input(buggy).expect("kinds inside vocab");
    let gc = model.input(correct).expect("kinds inside vocab");
    let mut tape = Tape::new();
    let s = model.scores_on(&mut tape, &gb, &gc).expect("shapes agree");
    let loss = tape.softmax_cross_entropy(s, labels).expect("labels in range");
    tape.scalar(loss)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientCheck {
    /// `‖g − g_fd‖ / (‖g‖ + ‖g_fd‖)` over every parameter.
    pub relative_error: f64,
    /// `‖g‖` of the backward pass.
    pub norm: f64,
    /// Some coordinate's forward and backward one-sided differences
    /// disagree, so a ReLU kink lies within `eps` of the point.
    pub near_kink: bool,
}

/// Compares the backward-pass gradient of the pair loss with central
/// differences of step `eps`.
pub fn gradient_relative_error(
    model: &mut ModelParams,
    buggy: &ProgramGraph,
    correct: &ProgramGraph,
    labels: &[usize],
    eps: f64,
) -> GradientCheck {
    let gb = model.input(buggy).unwrap();
    let gc = model.input(correct).unwrap();
    let mut tape = Tape::new();
    let s = model.scores_on(&mut tape, &gb, &gc).unwrap();
    let loss = tape.softmax_cross_entropy(s, labels).unwrap();
    let base = tape.scalar(loss);
    model.params.zero_grad();
    tape.backward(loss, &mut model.params).unwrap();
    let mut diff = 0.0;
    let mut norm_a = 0.0;
    let mut norm_n = 0.0;
    let mut near_kink = false;
    for id in 0..model.params.len() {
        let analytic = model.params.grad(id).clone();
        let (r, c) = analytic.dim();
        for i in 0..r {
            for j in 0..c {
                let orig = model.params.value(id)[[i, j]];
                model.params.value_mut(id)[[i, j]] = orig + eps;
                let up = pair_loss(model, buggy, correct, labels);
                model.params.value_mut(id)[[i, j]] = orig - eps;
                let down = pair_loss(model, buggy, correct, labels);
                model.params.value_mut(id)[[i, j]] = orig;
                let numeric = (up - down) / (2.0 * eps);
                let (fwd, bwd) = ((up - base) / eps, (base - down) / eps);
                near_kink |= (fwd - bwd).abs() > KINK_TOLERANCE * (1.0 + numeric.abs());
                let a = analytic[[i, j]];
                diff += (a - numeric).powi(2);
                norm_a += a * a;
                norm_n += numeric * numeric;
            }
        }
    }
    model.params.zero_grad();
    let denom = norm_a.sqrt() + norm_n.sqrt();
    GradientCheck {
        relative_error: if denom == 0.0 { 0.0 } else { diff.sqrt() / denom },
        norm: norm_a.sqrt(),
        near_kink,
    }
}

/// Slope jump between one-sided differences taken as a kink.
pub const KINK_TOLERANCE: f64 = 1e-2;

/// Minimum gradient norm of an instance used by [`gradient_errors`].
pub const MIN_GRADIENT_NORM: f64 = 1e-6;

/// Gradient relative error of each random small model and graph pair.
/// Instances where the loss is not differentiable within `eps` or whose
/// gradient vanishes are redrawn, since finite differences there measure
/// the kink or roundoff rather than the gradient.
pub fn gradient_errors(cases: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < cases {
        let d = rng.random_range(4..=8);
        let mut model = random_model(&mut rng, d);
        let kinds = model.vocab.len() as u16;
        let (nb, nc) = (rng.random_range(4..=10), rng.random_range(4..=10));
        let (vb, vc) = (rng.random_range(1..=3), rng.random_range(2..=3));
        let gb = random_graph(&mut rng, nb, vb, kinds);
        let gc = random_graph(&mut rng, nc, vc, kinds);
        let labels: Vec<usize> = (0..gb.num_vars()).map(|_| rng.random_range(0..gc.num_vars())).collect();
        let check = gradient_relative_error(&mut model, &gb, &gc, &labels, 1e-5);
        if check.norm >= MIN_GRADIENT_NORM && !check.near_kink {
            out.push(check.relative_error);
        }
    }
    out
}

pub fn gradient_check(cases: usize, seed: u64) -> f64 {
    gradient_errors(cases, seed).into_iter().fold(0.0, f64::max)
}

/// Output and pass/fail of every case.
pub fn case_outcomes(program: &Program, suite: &TestSuite, step_limit: u64) -> Vec<(bool, String)> {
    suite
        .cases()
        .iter()
        .map(|c| {
            let r = interpret(program, &c.input, step_limit);
            let ok = r.status == crate::lang::Status::Ok && normalize_output(&r.stdout) == normalize_output(&c.expected);
            (ok, r.stdout)
        })
        .collect()
}

/// Mutants (program × configuration) whose per-case results differ from
/// the original, as `(program id, config id)`, and the number checked.
pub fn mutation_mismatches(corpus: &Corpus, seed: u64) -> (Vec<(String, u8)>, usize) {
    let mut bad = Vec::new();
    let mut checked = 0;
    for (index, (a, p)) in corpus.programs().enumerate() {
        let before = case_outcomes(&p.program, &a.suite, DEFAULT_STEP_LIMIT);
        for mc in MutationConfig::all() {
            let mutant = apply_config(&p.program, mc, mix_seed(seed, &[index as u64, mc.id() as u64])).program;
            checked += 1;
            if case_outcomes(&mutant, &a.suite, DEFAULT_STEP_LIMIT) != before {
                bad.push((p.id.clone(), mc.id()));
            }
        }
    }
    (bad, checked)
}

fn timed(name: &str, f: impl FnOnce() -> (bool, String)) -> CheckResult {
    let t = Instant::now();
    let (passed, detail) = f();
    CheckResult {
        name: name.to_string(),
        passed,
        detail,
        seconds: t.elapsed().as_secs_f64(),
    }
}

/// All reference checks with the default sizes.
pub fn run_all(corpus: &Corpus, seed: u64) -> Vec<CheckResult> {
    vec![
        timed("rgcn-dense-oracle", || {
            let dev = rgcn_oracle_deviation(50, seed);
            (dev < 1e-9, format!("max abs deviation {dev:.3e} over 50 graphs"))
        }),
        timed("enumeration-brute-force", || {
            let bad = enumeration_mismatches(100, seed);
            (bad == 0, format!("{bad} of 100 matrices out of order"))
        }),
        timed("finite-differences", || {
            let err = gradient_check(10, seed);
            (err < 1e-4, format!("worst relative error {err:.3e} over 10 instances"))
        }),
        timed("mutation-preservation", || {
            let (bad, checked) = mutation_mismatches(corpus, seed);
            (bad.is_empty(), format!("{} of {checked} mutants changed behaviour", bad.len()))
        }),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn dense_oracle_matches_on_a_path_graph() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let model = random_model(&mut rng, 2);
        let g = ProgramGraph {
            nodes: vec![0, 1, 2],
            edges: vec![
                Edge { src: 0, dst: 1, rel: Relation::ChildFwd },
                Edge { src: 1, dst: 2, rel: Relation::ChildFwd },
                Edge { src: 1, dst: 0, rel: Relation::ChildBack },
                Edge { src: 2, dst: 1, rel: Relation::ChildBack },
            ],
            var_nodes: vec![2],
            var_names: vec!["x".into()],
        };
        let fast = crate::mapper::rgcn_encode(&g, Side::Correct, &model).unwrap();
        let slow = dense_encode(&g, Side::Correct, &model);
        assert!(fast.iter().zip(slow.iter()).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn brute_force_order() {
        let p = array![[0.6, 0.4], [0.7, 0.3]];
        let probs: Vec<f64> = brute_force_mappings(&p).into_iter().map(|(_, q)| q).collect();
        assert_eq!(probs.len(), 4);
        assert!(probs.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(enumeration_mismatches(20, 1), 0);
    }

    #[test]
    fn small_gradient_check() {
        assert!(gradient_check(1, 3) < 1e-4);
    }
}
