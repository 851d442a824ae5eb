use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::config::ModelConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    pub ln1_g: Array1<f64>,
    pub ln1_b: Array1<f64>,
    pub wq: Array2<f64>,
    pub bq: Array1<f64>,
    pub wk: Array2<f64>,
    pub bk: Array1<f64>,
    pub wv: Array2<f64>,
    pub bv: Array1<f64>,
    pub wo: Array2<f64>,
    pub bo: Array1<f64>,
    pub ln2_g: Array1<f64>,
    pub ln2_b: Array1<f64>,
    pub w1: Array2<f64>,
    pub b1: Array1<f64>,
    pub w2: Array2<f64>,
    pub b2: Array1<f64>,
}

/// Every trainable tensor of the model. Gradients and optimizer moments use
/// the same type.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    /// Token embeddings, also the output weights of the mask heads.
    pub tok_emb: Array2<f64>,
    pub pos_emb: Array2<f64>,
    pub prompt_emb: Array2<f64>,
    pub layers: Vec<LayerParams>,
    pub lnf_g: Array1<f64>,
    pub lnf_b: Array1<f64>,
    /// `[CLS]` head, `classes x d`.
    pub cls_w: Array2<f64>,
    pub cls_b: Array1<f64>,
}

/// Name and shape of one tensor, in [`Params::tensors`] order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorInfo {
    pub name: String,
    pub shape: Vec<usize>,
}

impl Params {
    pub fn zeros(cfg: &ModelConfig, vocab: usize, classes: usize, learnable: usize) -> Self {
        let d = cfg.d_model;
        let ff = cfg.d_ff;
        let layer = LayerParams {
            ln1_g: Array1::zeros(d),
            ln1_b: Array1::zeros(d),
            wq: Array2::zeros((d, d)),
            bq: Array1::zeros(d),
            wk: Array2::zeros((d, d)),
            bk: Array1::zeros(d),
            wv: Array2::zeros((d, d)),
            bv: Array1::zeros(d),
            wo: Array2::zeros((d, d)),
            bo: Array1::zeros(d),
            ln2_g: Array1::zeros(d),
            ln2_b: Array1::zeros(d),
            w1: Array2::zeros((d, ff)),
            b1: Array1::zeros(ff),
            w2: Array2::zeros((ff, d)),
            b2: Array1::zeros(d),
        };
        Params {
            tok_emb: Array2::zeros((vocab, d)),
            pos_emb: Array2::zeros((cfg.max_len, d)),
            prompt_emb: Array2::zeros((learnable, d)),
            layers: vec![layer; cfg.n_layers],
            lnf_g: Array1::zeros(d),
            lnf_b: Array1::zeros(d),
            cls_w: Array2::zeros((classes, d)),
            cls_b: Array1::zeros(classes),
        }
    }

    /// Gaussian weights, zero biases, unit layer-norm gains.
    pub fn init<R: Rng>(
        cfg: &ModelConfig,
        vocab: usize,
        classes: usize,
        learnable: usize,
        rng: &mut R,
    ) -> Self {
        let mut p = Self::zeros(cfg, vocab, classes, learnable);
        let normal = Normal::new(0.0, cfg.init_std).expect("valid std");
        let prompt_normal = Normal::new(0.0, 0.02).expect("valid std");
        let mut fill = |a: &mut [f64], dist: &Normal<f64>| {
            for x in a.iter_mut() {
                *x = dist.sample(rng);
            }
        };
        fill(slice_mut(&mut p.tok_emb), &normal);
        fill(slice_mut(&mut p.pos_emb), &normal);
        fill(slice_mut(&mut p.prompt_emb), &prompt_normal);
        for l in &mut p.layers {
            l.ln1_g.fill(1.0);
            l.ln2_g.fill(1.0);
            fill(slice_mut(&mut l.wq), &normal);
            fill(slice_mut(&mut l.wk), &normal);
            fill(slice_mut(&mut l.wv), &normal);
            fill(slice_mut(&mut l.wo), &normal);
            fill(slice_mut(&mut l.w1), &normal);
            fill(slice_mut(&mut l.w2), &normal);
        }
        p.lnf_g.fill(1.0);
        fill(slice_mut(&mut p.cls_w), &normal);
        p
    }

    pub fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        z.fill(0.0);
        z
    }

    pub fn fill(&mut self, value: f64) {
        for (_, t) in self.tensors_mut() {
            t.fill(value);
        }
    }

    /// All tensors as flat row-major slices, in a fixed order.
    pub fn tensors(&self) -> Vec<(String, &[f64])> {
        let mut out: Vec<(String, &[f64])> = vec![
            ("tok_emb".into(), slice(&self.tok_emb)),
            ("pos_emb".into(), slice(&self.pos_emb)),
            ("prompt_emb".into(), slice(&self.prompt_emb)),
        ];
        for (i, l) in self.layers.iter().enumerate() {
            let parts: [(&str, &[f64]); 16] = [
                ("ln1_g", slice1(&l.ln1_g)),
                ("ln1_b", slice1(&l.ln1_b)),
                ("wq", slice(&l.wq)),
                ("bq", slice1(&l.bq)),
                ("wk", slice(&l.wk)),
                ("bk", slice1(&l.bk)),
                ("wv", slice(&l.wv)),
                ("bv", slice1(&l.bv)),
                ("wo", slice(&l.wo)),
                ("bo", slice1(&l.bo)),
                ("ln2_g", slice1(&l.ln2_g)),
                ("ln2_b", slice1(&l.ln2_b)),
                ("w1", slice(&l.w1)),
                ("b1", slice1(&l.b1)),
                ("w2", slice(&l.w2)),
                ("b2", slice1(&l.b2)),
            ];
            out.extend(parts.into_iter().map(|(n, s)| (format!("layers.{i}.{n}"), s)));
        }
        out.push(("lnf_g".into(), slice1(&self.lnf_g)));
        out.push(("lnf_b".into(), slice1(&self.lnf_b)));
        out.push(("cls_w".into(), slice(&self.cls_w)));
        out.push(("cls_b".into(), slice1(&self.cls_b)));
        out
    }

    /// Mutable counterpart of [`tensors`](Self::tensors), same order.
    pub fn tensors_mut(&mut self) -> Vec<(String, &mut [f64])> {
        let mut out: Vec<(String, &mut [f64])> = vec![
            ("tok_emb".into(), slice_mut(&mut self.tok_emb)),
            ("pos_emb".into(), slice_mut(&mut self.pos_emb)),
            ("prompt_emb".into(), slice_mut(&mut self.prompt_emb)),
        ];
        for (i, l) in self.layers.iter_mut().enumerate() {
            let parts: [(&str, &mut [f64]); 16] = [
                ("ln1_g", slice1_mut(&mut l.ln1_g)),
                ("ln1_b", slice1_mut(&mut l.ln1_b)),
                ("wq", slice_mut(&mut l.wq)),
                ("bq", slice1_mut(&mut l.bq)),
                ("wk", slice_mut(&mut l.wk)),
                ("bk", slice1_mut(&mut l.bk)),
                ("wv", slice_mut(&mut l.wv)),
                ("bv", slice1_mut(&mut l.bv)),
                ("wo", slice_mut(&mut l.wo)),
                ("bo", slice1_mut(&mut l.bo)),
                ("ln2_g", slice1_mut(&mut l.ln2_g)),
                ("ln2_b", slice1_mut(&mut l.ln2_b)),
                ("w1", slice_mut(&mut l.w1)),
                ("b1", slice1_mut(&mut l.b1)),
                ("w2", slice_mut(&mut l.w2)),
                ("b2", slice1_mut(&mut l.b2)),
            ];
            out.extend(parts.into_iter().map(|(n, s)| (format!("layers.{i}.{n}"), s)));
        }
        out.push(("lnf_g".into(), slice1_mut(&mut self.lnf_g)));
        out.push(("lnf_b".into(), slice1_mut(&mut self.lnf_b)));
        out.push(("cls_w".into(), slice_mut(&mut self.cls_w)));
        out.push(("cls_b".into(), slice1_mut(&mut self.cls_b)));
        out
    }

    pub fn shapes(&self) -> Vec<TensorInfo> {
        let mut out = vec![
            info("tok_emb", self.tok_emb.shape()),
            info("pos_emb", self.pos_emb.shape()),
            info("prompt_emb", self.prompt_emb.shape()),
        ];
        for (i, l) in self.layers.iter().enumerate() {
            let parts: [(&str, &[usize]); 16] = [
                ("ln1_g", l.ln1_g.shape()),
                ("ln1_b", l.ln1_b.shape()),
                ("wq", l.wq.shape()),
                ("bq", l.bq.shape()),
                ("wk", l.wk.shape()),
                ("bk", l.bk.shape()),
                ("wv", l.wv.shape()),
                ("bv", l.bv.shape()),
                ("wo", l.wo.shape()),
                ("bo", l.bo.shape()),
                ("ln2_g", l.ln2_g.shape()),
                ("ln2_b", l.ln2_b.shape()),
                ("w1", l.w1.shape()),
                ("b1", l.b1.shape()),
                ("w2", l.w2.shape()),
                ("b2", l.b2.shape()),
            ];
            out.extend(parts.into_iter().map(|(n, s)| info(&format!("layers.{i}.{n}"), s)));
        }
        out.push(info("lnf_g", self.lnf_g.shape()));
        out.push(info("lnf_b", self.lnf_b.shape()));
        out.push(info("cls_w", self.cls_w.shape()));
        out.push(info("cls_b", self.cls_b.shape()));
        out
    }

    pub fn count(&self) -> usize {
        self.tensors().iter().map(|(_, t)| t.len()).sum()
    }

    pub fn all_finite(&self) -> bool {
        self.tensors()
            .iter()
            .all(|(_, t)| t.iter().all(|x| x.is_finite()))
    }

    /// Sum of squares over every tensor.
    pub fn sq_norm(&self) -> f64 {
        self.tensors()
            .iter()
            .flat_map(|(_, t)| t.iter())
            .map(|x| x * x)
            .sum()
    }

    /// Reads coordinate `k` of the flattened parameter vector.
    pub fn get_flat(&self, mut k: usize) -> f64 {
        for (_, t) in self.tensors() {
            if k < t.len() {
                return t[k];
            }
            k -= t.len();
        }
        panic!("flat index out of range");
    }

    pub fn set_flat(&mut self, mut k: usize, value: f64) {
        for (_, t) in self.tensors_mut() {
            if k < t.len() {
                t[k] = value;
                return;
            }
            k -= t.len();
        }
        panic!("flat index out of range");
    }

    /// Name of the tensor holding flat coordinate `k`.
    pub fn flat_name(&self, mut k: usize) -> String {
        for (name, t) in self.tensors() {
            if k < t.len() {
                return name;
            }
            k -= t.len();
        }
        panic!("flat index out of range");
    }

    /// `self += scale * other`.
    pub fn add_scaled(&mut self, other: &Params, scale: f64) {
        let src = other.tensors();
        for ((_, dst), (_, s)) in self.tensors_mut().into_iter().zip(src) {
            for (d, v) in dst.iter_mut().zip(s) {
                *d += scale * v;
            }
        }
    }
}

fn info(name: &str, shape: &[usize]) -> TensorInfo {
    TensorInfo {
        name: name.to_string(),
        shape: shape.to_vec(),
    }
}

fn slice(a: &Array2<f64>) -> &[f64] {
    a.as_slice().expect("standard layout")
}

fn slice1(a: &Array1<f64>) -> &[f64] {
    a.as_slice().expect("standard layout")
}

fn slice_mut(a: &mut Array2<f64>) -> &mut [f64] {
    a.as_slice_mut().expect("standard layout")
}

fn slice1_mut(a: &mut Array1<f64>) -> &mut [f64] {
    a.as_slice_mut().expect("standard layout")
}
