//! Reverse-mode differentiation over matrix-valued primitives.
//!
//! Every primitive appends one node holding its forward value. Calling
//! [`GradTape::backward`] walks the nodes in reverse exactly once and
//! accumulates adjoints, so any [`Var`] recorded on the tape (parameters and
//! inputs alike) can be queried for its gradient afterwards.

use std::sync::atomic::{AtomicU64, Ordering};

use super::tensor::{matmul_into, relu_scalar, Tensor2};
use crate::error::{Error, Result};

static NEXT_TAPE_ID: AtomicU64 = AtomicU64::new(1);

/// Handle to a value recorded on a [`GradTape`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Var {
    tape: u64,
    idx: usize,
}

#[derive(Clone, Copy, Debug)]
enum Op {
    Leaf,
    MatMul(usize, usize),
    /// `x + b` with a single-row `b` broadcast over the rows of `x`.
    AddRow(usize, usize),
    Add(usize, usize),
    Sub(usize, usize),
    Relu(usize),
    Tanh(usize),
    MeanSquare(usize),
    Sum(usize),
}

struct Node {
    value: Tensor2,
    op: Op,
}

/// Records primitive operations in execution order.
pub struct GradTape {
    id: u64,
    nodes: Vec<Node>,
    macs: u64,
    relu_pattern: Vec<bool>,
    relu_margin: f64,
}

impl Default for GradTape {
    fn default() -> Self {
        Self::new()
    }
}

impl GradTape {
    pub fn new() -> Self {
        GradTape {
            id: NEXT_TAPE_ID.fetch_add(1, Ordering::Relaxed),
            nodes: Vec::new(),
            macs: 0,
            relu_pattern: Vec::new(),
            relu_margin: f64::INFINITY,
        }
    }

    fn push(&mut self, value: Tensor2, op: Op) -> Var {
        self.nodes.push(Node { value, op });
        Var {
            tape: self.id,
            idx: self.nodes.len() - 1,
        }
    }

    fn node_index(&self, v: Var) -> Result<usize> {
        if v.tape != self.id || v.idx >= self.nodes.len() {
            return Err(Error::NotOnTape);
        }
        Ok(v.idx)
    }

    fn node(&self, v: Var) -> Result<&Node> {
        Ok(&self.nodes[self.node_index(v)?])
    }

    pub fn value(&self, v: Var) -> Result<&Tensor2> {
        Ok(&self.node(v)?.value)
    }

    /// Number of recorded operations, leaves included.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Multiply-accumulates performed by recorded matrix products.
    pub fn macs(&self) -> u64 {
        self.macs
    }

    /// Sign of every ReLU pre-activation seen so far (`true` = positive).
    pub fn relu_pattern(&self) -> &[bool] {
        &self.relu_pattern
    }

    /// Smallest `|pre-activation|` over all ReLU inputs so far.
    pub fn relu_margin(&self) -> f64 {
        self.relu_margin
    }

    pub fn leaf(&mut self, value: Tensor2) -> Var {
        self.push(value, Op::Leaf)
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let (av, bv) = (&self.node(a)?.value, &self.node(b)?.value);
        if av.cols() != bv.rows() {
            return Err(Error::Shape {
                op: "matmul",
                left: av.shape_str(),
                right: bv.shape_str(),
            });
        }
        let mut out = Tensor2::zeros(av.rows(), bv.cols());
        matmul_into(av, bv, &mut out);
        self.macs += (av.rows() * av.cols() * bv.cols()) as u64;
        Ok(self.push(out, Op::MatMul(a.idx, b.idx)))
    }

    pub fn add_row(&mut self, x: Var, b: Var) -> Result<Var> {
        let (xv, bv) = (&self.node(x)?.value, &self.node(b)?.value);
        if bv.rows() != 1 || bv.cols() != xv.cols() {
            return Err(Error::Shape {
                op: "add_row",
                left: xv.shape_str(),
                right: bv.shape_str(),
            });
        }
        let mut out = xv.clone();
        for r in 0..out.rows() {
            for (o, &bj) in out.row_slice_mut(r).iter_mut().zip(bv.data()) {
                *o += bj;
            }
        }
        Ok(self.push(out, Op::AddRow(x.idx, b.idx)))
    }

    /// `x·W + b` for a batch of row vectors.
    pub fn affine(&mut self, x: Var, w: Var, b: Var) -> Result<Var> {
        let xw = self.matmul(x, w)?;
        self.add_row(xw, b)
    }

    fn same_shape(&self, op: &'static str, a: Var, b: Var) -> Result<(&Tensor2, &Tensor2)> {
        let (av, bv) = (&self.node(a)?.value, &self.node(b)?.value);
        if av.shape() != bv.shape() {
            return Err(Error::Shape {
                op,
                left: av.shape_str(),
                right: bv.shape_str(),
            });
        }
        Ok((av, bv))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        let (av, bv) = self.same_shape("add", a, b)?;
        let data = av.data().iter().zip(bv.data()).map(|(x, y)| x + y).collect();
        let out = Tensor2::from_vec(av.rows(), av.cols(), data)?;
        Ok(self.push(out, Op::Add(a.idx, b.idx)))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var> {
        let (av, bv) = self.same_shape("sub", a, b)?;
        let data = av.data().iter().zip(bv.data()).map(|(x, y)| x - y).collect();
        let out = Tensor2::from_vec(av.rows(), av.cols(), data)?;
        Ok(self.push(out, Op::Sub(a.idx, b.idx)))
    }

    pub fn relu(&mut self, x: Var) -> Result<Var> {
        let xv = &self.nodes[self.node_index(x)?].value;
        let out = xv.map(relu_scalar);
        let mut margin = self.relu_margin;
        self.relu_pattern.extend(xv.data().iter().map(|&v| {
            margin = margin.min(v.abs());
            v > 0.0
        }));
        self.relu_margin = margin;
        Ok(self.push(out, Op::Relu(x.idx)))
    }

    pub fn tanh(&mut self, x: Var) -> Result<Var> {
        let out = self.node(x)?.value.map(f64::tanh);
        Ok(self.push(out, Op::Tanh(x.idx)))
    }

    /// Mean of squared entries, as a 1x1 value.
    pub fn mean_square(&mut self, x: Var) -> Result<Var> {
        let xv = &self.node(x)?.value;
        let n = xv.data().len().max(1) as f64;
        let s: f64 = xv.data().iter().map(|v| v * v).sum();
        Ok(self.push(Tensor2::row(&[s / n]), Op::MeanSquare(x.idx)))
    }

    /// Sum of entries, as a 1x1 value.
    pub fn sum(&mut self, x: Var) -> Result<Var> {
        let s: f64 = self.node(x)?.value.data().iter().sum();
        Ok(self.push(Tensor2::row(&[s]), Op::Sum(x.idx)))
    }

    /// Back-propagates from a scalar `loss`.
    pub fn backward(&self, loss: Var) -> Result<Gradients> {
        let root = self.node(loss)?;
        if root.value.shape() != (1, 1) {
            return Err(Error::Shape {
                op: "backward",
                left: root.value.shape_str(),
                right: "1x1".into(),
            });
        }
        let mut grads: Vec<Tensor2> = self
            .nodes
            .iter()
            .map(|n| Tensor2::zeros(n.value.rows(), n.value.cols()))
            .collect();
        grads[loss.idx].data_mut()[0] = 1.0;

        for idx in (0..=loss.idx).rev() {
            let op = self.nodes[idx].op;
            if matches!(op, Op::Leaf) {
                continue;
            }
            // Split so the upstream adjoint can be read while inputs are written.
            let (lower, upper) = grads.split_at_mut(idx);
            let g = &upper[0];
            if g.data().iter().all(|&v| v == 0.0) {
                continue;
            }
            match op {
                Op::Leaf => {}
                Op::MatMul(a, b) => {
                    let av = &self.nodes[a].value;
                    let bv = &self.nodes[b].value;
                    let (rows, n, m) = (av.rows(), av.cols(), bv.cols());
                    // dA += dC · Bᵀ
                    {
                        let ga = lower[a].data_mut();
                        for r in 0..rows {
                            let g_row = g.row_slice(r);
                            for i in 0..n {
                                let b_row = bv.row_slice(i);
                                let mut acc = 0.0;
                                for (gj, bj) in g_row.iter().zip(b_row) {
                                    acc += gj * bj;
                                }
                                ga[r * n + i] += acc;
                            }
                        }
                    }
                    // dB += Aᵀ · dC
                    let gb = lower[b].data_mut();
                    for r in 0..rows {
                        let a_row = av.row_slice(r);
                        let g_row = g.row_slice(r);
                        for (i, &ai) in a_row.iter().enumerate() {
                            if ai == 0.0 {
                                continue;
                            }
                            let dst = &mut gb[i * m..(i + 1) * m];
                            for (d, gj) in dst.iter_mut().zip(g_row) {
                                *d += ai * gj;
                            }
                        }
                    }
                }
                Op::AddRow(x, b) => {
                    accumulate(&mut lower[x], g);
                    let gb = lower[b].data_mut();
                    for r in 0..g.rows() {
                        for (d, gj) in gb.iter_mut().zip(g.row_slice(r)) {
                            *d += gj;
                        }
                    }
                }
                Op::Add(a, b) => {
                    accumulate(&mut lower[a], g);
                    accumulate(&mut lower[b], g);
                }
                Op::Sub(a, b) => {
                    accumulate(&mut lower[a], g);
                    for (d, gj) in lower[b].data_mut().iter_mut().zip(g.data()) {
                        *d -= gj;
                    }
                }
                Op::Relu(x) => {
                    let xv = &self.nodes[x].value;
                    for ((d, gj), &xi) in lower[x].data_mut().iter_mut().zip(g.data()).zip(xv.data()) {
                        if xi > 0.0 {
                            *d += gj;
                        }
                    }
                }
                Op::Tanh(x) => {
                    let yv = &self.nodes[idx].value;
                    for ((d, gj), &yi) in lower[x].data_mut().iter_mut().zip(g.data()).zip(yv.data()) {
                        *d += gj * (1.0 - yi * yi);
                    }
                }
                Op::MeanSquare(x) => {
                    let xv = &self.nodes[x].value;
                    let n = xv.data().len().max(1) as f64;
                    let scale = 2.0 * g.data()[0] / n;
                    for (d, &xi) in lower[x].data_mut().iter_mut().zip(xv.data()) {
                        *d += scale * xi;
                    }
                }
                Op::Sum(x) => {
                    let g0 = g.data()[0];
                    for d in lower[x].data_mut() {
                        *d += g0;
                    }
                }
            }
        }
        Ok(Gradients { tape: self.id, grads })
    }
}

fn accumulate(dst: &mut Tensor2, g: &Tensor2) {
    for (d, gj) in dst.data_mut().iter_mut().zip(g.data()) {
        *d += gj;
    }
}

/// Adjoints produced by one backward pass.
pub struct Gradients {
    tape: u64,
    grads: Vec<Tensor2>,
}

impl Gradients {
    pub fn get(&self, v: Var) -> Result<&Tensor2> {
        if v.tape != self.tape {
            return Err(Error::NotOnTape);
        }
        self.grads.get(v.idx).ok_or(Error::NotOnTape)
    }
}

/// Gradient of the scalar `loss` with respect to each of `params`.
pub fn reverse_grad(tape: &GradTape, loss: Var, params: &[Var]) -> Result<Vec<Tensor2>> {
    let grads = tape.backward(loss)?;
    params.iter().map(|&p| grads.get(p).cloned()).collect()
}
