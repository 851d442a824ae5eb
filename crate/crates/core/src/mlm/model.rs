use ndarray::{s, Array1, Array2, ArrayView1, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::config::ModelConfig;
use super::params::{LayerParams, Params};
use super::vocab::{self, Vocab};
use crate::corpus::Instance;
use crate::prompt::RenderedInput;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MlmError {
    #[error("token `{0}` is not in the vocabulary")]
    OutOfVocabulary(String),
    #[error("sequence of {len} tokens exceeds the maximum length {max}")]
    Overlength { len: usize, max: usize },
    #[error("learnable token {index} does not exist (model has {count})")]
    UnknownLearnable { index: usize, count: usize },
    #[error("empty label vocabulary")]
    EmptySubset,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite loss at batch instance {index}")]
    NonFiniteLoss { index: usize },
    #[error("invalid model config: {0}")]
    Config(String),
}

/// One position of encoder input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputToken {
    Vocab(usize),
    Learnable(usize),
}

/// A framed, id-mapped sequence: `[CLS] ... [SEP]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedInput {
    pub tokens: Vec<InputToken>,
    /// Mask positions in framed coordinates.
    pub mask_positions: Vec<usize>,
}

/// What a training example is scored against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    /// Gold phrase at each mask; `candidates[j]` are vocab ids of V_j and
    /// `gold[j]` indexes into it.
    Masks {
        candidates: Vec<Vec<usize>>,
        gold: Vec<usize>,
    },
    /// Gold class index for the `[CLS]` head.
    Class(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    pub input: EncodedInput,
    pub target: Target,
}

/// The desk-scale encoder with tied mask heads and a `[CLS]` head.
#[derive(Debug, Clone, PartialEq)]
pub struct TinyMlm {
    pub config: ModelConfig,
    pub vocab: Vocab,
    /// Classes of the `[CLS]` head, in head-row order.
    pub classes: Vec<String>,
    pub params: Params,
}

struct LnCache {
    xhat: Array2<f64>,
    inv_std: Array1<f64>,
}

struct BlockCache {
    ln1: LnCache,
    a: Array2<f64>,
    q: Array2<f64>,
    k: Array2<f64>,
    v: Array2<f64>,
    probs: Vec<Array2<f64>>,
    o: Array2<f64>,
    ln2: LnCache,
    b: Array2<f64>,
    u: Array2<f64>,
    gu: Array2<f64>,
}

struct ForwardCache {
    blocks: Vec<BlockCache>,
    lnf: LnCache,
    hidden: Array2<f64>,
}

const GELU_C: f64 = 0.797_884_560_802_865_4; // sqrt(2 / pi)
const GELU_A: f64 = 0.044_715;

fn gelu(x: f64) -> f64 {
    0.5 * x * (1.0 + (GELU_C * (x + GELU_A * x * x * x)).tanh())
}

fn gelu_grad(x: f64) -> f64 {
    let t = (GELU_C * (x + GELU_A * x * x * x)).tanh();
    0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * GELU_C * (1.0 + 3.0 * GELU_A * x * x)
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

fn log_softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + logits.iter().map(|l| (l - max).exp()).sum::<f64>().ln();
    logits.iter().map(|l| l - lse).collect()
}

fn softmax_rows(m: &mut Array2<f64>) {
    for mut row in m.rows_mut() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|x| (x - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|x| x / sum);
    }
}

fn layer_norm(x: &Array2<f64>, g: &Array1<f64>, b: &Array1<f64>, eps: f64) -> (Array2<f64>, LnCache) {
    let d = x.ncols() as f64;
    let mut xhat = x.clone();
    let mut inv_std = Array1::zeros(x.nrows());
    for (i, mut row) in xhat.rows_mut().into_iter().enumerate() {
        let mean = row.sum() / d;
        row.mapv_inplace(|v| v - mean);
        let var = row.iter().map(|v| v * v).sum::<f64>() / d;
        let is = 1.0 / (var + eps).sqrt();
        row.mapv_inplace(|v| v * is);
        inv_std[i] = is;
    }
    let y = &xhat * g + b;
    (y, LnCache { xhat, inv_std })
}

fn layer_norm_backward(
    dy: &Array2<f64>,
    cache: &LnCache,
    g: &Array1<f64>,
    dg: &mut Array1<f64>,
    db: &mut Array1<f64>,
) -> Array2<f64> {
    *dg += &(dy * &cache.xhat).sum_axis(Axis(0));
    *db += &dy.sum_axis(Axis(0));
    let dxhat = dy * g;
    let d = dy.ncols() as f64;
    let mut dx = Array2::zeros(dy.raw_dim());
    for i in 0..dy.nrows() {
        let dxh = dxhat.row(i);
        let xh = cache.xhat.row(i);
        let mean_dxh = dxh.sum() / d;
        let mean_dxh_xh = dxh.dot(&xh) / d;
        let is = cache.inv_std[i];
        let mut out = dx.row_mut(i);
        for k in 0..dy.ncols() {
            out[k] = is * (dxh[k] - mean_dxh - xh[k] * mean_dxh_xh);
        }
    }
    dx
}

fn block_forward(p: &LayerParams, x: &Array2<f64>, cfg: &ModelConfig) -> (Array2<f64>, BlockCache) {
    let n = x.nrows();
    let d = cfg.d_model;
    let dh = cfg.head_dim();
    let scale = 1.0 / (dh as f64).sqrt();
    let (a, ln1) = layer_norm(x, &p.ln1_g, &p.ln1_b, cfg.layer_norm_eps);
    let q = a.dot(&p.wq) + &p.bq;
    let k = a.dot(&p.wk) + &p.bk;
    let v = a.dot(&p.wv) + &p.bv;
    let mut o = Array2::zeros((n, d));
    let mut probs = Vec::with_capacity(cfg.n_heads);
    for h in 0..cfg.n_heads {
        let cols = s![.., h * dh..(h + 1) * dh];
        let mut scores = q.slice(cols).dot(&k.slice(cols).t()) * scale;
        softmax_rows(&mut scores);
        o.slice_mut(cols).assign(&scores.dot(&v.slice(cols)));
        probs.push(scores);
    }
    let x1 = x + &(o.dot(&p.wo) + &p.bo);
    let (b, ln2) = layer_norm(&x1, &p.ln2_g, &p.ln2_b, cfg.layer_norm_eps);
    let u = b.dot(&p.w1) + &p.b1;
    let gu = u.mapv(gelu);
    let out = &x1 + &(gu.dot(&p.w2) + &p.b2);
    (
        out,
        BlockCache {
            ln1,
            a,
            q,
            k,
            v,
            probs,
            o,
            ln2,
            b,
            u,
            gu,
        },
    )
}

fn block_backward(
    p: &LayerParams,
    g: &mut LayerParams,
    c: &BlockCache,
    dout: Array2<f64>,
    cfg: &ModelConfig,
) -> Array2<f64> {
    let dh = cfg.head_dim();
    let scale = 1.0 / (dh as f64).sqrt();

    // out = x1 + gelu(LN2(x1) W1 + b1) W2 + b2
    g.w2 += &c.gu.t().dot(&dout);
    g.b2 += &dout.sum_axis(Axis(0));
    let dgu = dout.dot(&p.w2.t());
    let mut du = dgu;
    du.zip_mut_with(&c.u, |d, &u| *d *= gelu_grad(u));
    g.w1 += &c.b.t().dot(&du);
    g.b1 += &du.sum_axis(Axis(0));
    let db = du.dot(&p.w1.t());
    let dx1 = dout + layer_norm_backward(&db, &c.ln2, &p.ln2_g, &mut g.ln2_g, &mut g.ln2_b);

    // x1 = x + attn(LN1(x)) Wo + bo
    g.wo += &c.o.t().dot(&dx1);
    g.bo += &dx1.sum_axis(Axis(0));
    let do_ = dx1.dot(&p.wo.t());
    let mut dq = Array2::zeros(c.q.raw_dim());
    let mut dk = Array2::zeros(c.k.raw_dim());
    let mut dv = Array2::zeros(c.v.raw_dim());
    for h in 0..cfg.n_heads {
        let cols = s![.., h * dh..(h + 1) * dh];
        let probs = &c.probs[h];
        let doh = do_.slice(cols);
        dv.slice_mut(cols).assign(&probs.t().dot(&doh));
        let dp = doh.dot(&c.v.slice(cols).t());
        let mut ds = &dp * probs;
        let row_sums = ds.sum_axis(Axis(1));
        for (i, mut row) in ds.rows_mut().into_iter().enumerate() {
            let pr = probs.row(i);
            for (j, x) in row.iter_mut().enumerate() {
                *x -= pr[j] * row_sums[i];
            }
        }
        ds *= scale;
        dq.slice_mut(cols).assign(&ds.dot(&c.k.slice(cols)));
        dk.slice_mut(cols).assign(&ds.t().dot(&c.q.slice(cols)));
    }
    g.wq += &c.a.t().dot(&dq);
    g.bq += &dq.sum_axis(Axis(0));
    g.wk += &c.a.t().dot(&dk);
    g.bk += &dk.sum_axis(Axis(0));
    g.wv += &c.a.t().dot(&dv);
    g.bv += &dv.sum_axis(Axis(0));
    let da = dq.dot(&p.wq.t()) + dk.dot(&p.wk.t()) + dv.dot(&p.wv.t());
    dx1 + layer_norm_backward(&da, &c.ln1, &p.ln1_g, &mut g.ln1_g, &mut g.ln1_b)
}

/// Losses below this probability are clamped.
pub const PROB_FLOOR: f64 = 1e-12;

impl TinyMlm {
    /// A freshly initialized model. All randomness comes from `seed`.
    pub fn new(
        config: ModelConfig,
        vocab: Vocab,
        classes: Vec<String>,
        learnable: usize,
        seed: u64,
    ) -> Result<Self, MlmError> {
        config.check().map_err(MlmError::Config)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = Params::init(&config, vocab.len(), classes.len(), learnable, &mut rng);
        Ok(TinyMlm {
            config,
            vocab,
            classes,
            params,
        })
    }

    /// A model whose parameters are all zero except unit layer-norm gains.
    pub fn zeroed(
        config: ModelConfig,
        vocab: Vocab,
        classes: Vec<String>,
        learnable: usize,
    ) -> Result<Self, MlmError> {
        config.check().map_err(MlmError::Config)?;
        let mut params = Params::zeros(&config, vocab.len(), classes.len(), learnable);
        for l in &mut params.layers {
            l.ln1_g.fill(1.0);
            l.ln2_g.fill(1.0);
        }
        params.lnf_g.fill(1.0);
        Ok(TinyMlm {
            config,
            vocab,
            classes,
            params,
        })
    }

    /// Sets the embedding of every multi-word entry whose words are all in
    /// the vocabulary to the mean of those words' embeddings. Returns how
    /// many entries changed.
    pub fn init_phrases_from_words(&mut self) -> usize {
        let mut changed = 0;
        for id in vocab::RESERVED.len()..self.vocab.len() {
            let entry = self.vocab.entry(id);
            if !entry.contains(' ') {
                continue;
            }
            let ids: Option<Vec<usize>> = entry.split(' ').map(|w| self.vocab.id(w)).collect();
            let Some(ids) = ids else {
                continue;
            };
            let mut mean = Array1::zeros(self.config.d_model);
            for &w in &ids {
                mean += &self.params.tok_emb.row(w);
            }
            mean /= ids.len() as f64;
            self.params.tok_emb.row_mut(id).assign(&mean);
            changed += 1;
        }
        changed
    }

    pub fn n_learnable(&self) -> usize {
        self.params.prompt_emb.nrows()
    }

    pub fn param_count(&self) -> usize {
        self.params.count()
    }

    pub fn expected_param_count(&self) -> usize {
        self.config
            .param_count(self.vocab.len(), self.classes.len(), self.n_learnable())
    }

    fn word_id(&self, token: &str) -> Result<usize, MlmError> {
        self.vocab
            .id(token)
            .ok_or_else(|| MlmError::OutOfVocabulary(token.to_string()))
    }

    /// Vocab ids of a list of label phrases.
    pub fn phrase_ids<S: AsRef<str>>(&self, phrases: &[S]) -> Result<Vec<usize>, MlmError> {
        phrases.iter().map(|p| self.word_id(p.as_ref())).collect()
    }

    fn check_len(&self, len: usize) -> Result<(), MlmError> {
        if len > self.config.max_len {
            return Err(MlmError::Overlength {
                len,
                max: self.config.max_len,
            });
        }
        Ok(())
    }

    /// Maps a rendered prompt to framed ids.
    pub fn encode_prompt(&self, input: &RenderedInput) -> Result<EncodedInput, MlmError> {
        let n = input.tokens.len() + 2;
        self.check_len(n)?;
        let mut tokens = Vec::with_capacity(n);
        tokens.push(InputToken::Vocab(vocab::CLS));
        let mut masks = input.mask_positions.iter().peekable();
        let mut learn = input.learnable_positions.iter().peekable();
        for (i, tok) in input.tokens.iter().enumerate() {
            if masks.peek().is_some_and(|&&m| m == i) {
                masks.next();
                tokens.push(InputToken::Vocab(vocab::MASK));
            } else if let Some(&&(_, index)) = learn.peek().filter(|&&&(p, _)| p == i) {
                learn.next();
                if index >= self.n_learnable() {
                    return Err(MlmError::UnknownLearnable {
                        index,
                        count: self.n_learnable(),
                    });
                }
                tokens.push(InputToken::Learnable(index));
            } else {
                tokens.push(InputToken::Vocab(self.word_id(tok)?));
            }
        }
        tokens.push(InputToken::Vocab(vocab::SEP));
        Ok(EncodedInput {
            tokens,
            mask_positions: input.mask_positions.iter().map(|p| p + 1).collect(),
        })
    }

    /// Baseline input: `[CLS]` sentence with entity markers `[SEP]`.
    pub fn encode_marked(&self, instance: &Instance) -> Result<EncodedInput, MlmError> {
        let n = instance.tokens.len() + 6;
        self.check_len(n)?;
        let mut tokens = Vec::with_capacity(n);
        tokens.push(InputToken::Vocab(vocab::CLS));
        for (i, tok) in instance.tokens.iter().enumerate() {
            if i == instance.subj.start {
                tokens.push(InputToken::Vocab(vocab::SUBJ_START));
            }
            if i == instance.obj.start {
                tokens.push(InputToken::Vocab(vocab::OBJ_START));
            }
            tokens.push(InputToken::Vocab(self.word_id(tok)?));
            if i + 1 == instance.subj.end {
                tokens.push(InputToken::Vocab(vocab::SUBJ_END));
            }
            if i + 1 == instance.obj.end {
                tokens.push(InputToken::Vocab(vocab::OBJ_END));
            }
        }
        tokens.push(InputToken::Vocab(vocab::SEP));
        Ok(EncodedInput {
            tokens,
            mask_positions: Vec::new(),
        })
    }

    fn embed(&self, input: &EncodedInput) -> Result<Array2<f64>, MlmError> {
        self.check_len(input.tokens.len())?;
        let d = self.config.d_model;
        let mut x = Array2::zeros((input.tokens.len(), d));
        for (i, t) in input.tokens.iter().enumerate() {
            let emb = match *t {
                InputToken::Vocab(id) => {
                    if id >= self.vocab.len() {
                        return Err(MlmError::Shape(format!("token id {id} out of range")));
                    }
                    self.params.tok_emb.row(id)
                }
                InputToken::Learnable(k) => {
                    if k >= self.n_learnable() {
                        return Err(MlmError::UnknownLearnable {
                            index: k,
                            count: self.n_learnable(),
                        });
                    }
                    self.params.prompt_emb.row(k)
                }
            };
            x.row_mut(i).assign(&(&emb + &self.params.pos_emb.row(i)));
        }
        Ok(x)
    }

    fn forward(&self, input: &EncodedInput) -> Result<ForwardCache, MlmError> {
        let mut x = self.embed(input)?;
        let mut blocks = Vec::with_capacity(self.params.layers.len());
        for layer in &self.params.layers {
            let (next, cache) = block_forward(layer, &x, &self.config);
            blocks.push(cache);
            x = next;
        }
        let (hidden, lnf) = layer_norm(
            &x,
            &self.params.lnf_g,
            &self.params.lnf_b,
            self.config.layer_norm_eps,
        );
        Ok(ForwardCache {
            blocks,
            lnf,
            hidden,
        })
    }

    /// Final hidden vectors, one row per framed input position.
    pub fn encode(&self, input: &EncodedInput) -> Result<Array2<f64>, MlmError> {
        Ok(self.forward(input)?.hidden)
    }

    /// Hidden vectors for a rendered prompt (framed with `[CLS]`/`[SEP]`).
    pub fn encode_rendered(&self, input: &RenderedInput) -> Result<Array2<f64>, MlmError> {
        self.encode(&self.encode_prompt(input)?)
    }

    /// Logits `e_v . h` for each candidate id.
    pub fn mask_logits(&self, hidden: ArrayView1<f64>, candidates: &[usize]) -> Result<Vec<f64>, MlmError> {
        if candidates.is_empty() {
            return Err(MlmError::EmptySubset);
        }
        if hidden.len() != self.config.d_model {
            return Err(MlmError::Shape(format!(
                "hidden has {} dims, model has {}",
                hidden.len(),
                self.config.d_model
            )));
        }
        candidates
            .iter()
            .map(|&id| {
                if id >= self.vocab.len() {
                    Err(MlmError::Shape(format!("candidate id {id} out of range")))
                } else {
                    Ok(self.params.tok_emb.row(id).dot(&hidden))
                }
            })
            .collect()
    }

    /// Softmax over the candidate set using the tied token embeddings.
    pub fn mask_distribution(&self, hidden: ArrayView1<f64>, candidates: &[usize]) -> Result<Vec<f64>, MlmError> {
        Ok(softmax(&self.mask_logits(hidden, candidates)?))
    }

    /// `softmax(W h + b)` over the baseline classes.
    pub fn cls_head(&self, hidden_cls: ArrayView1<f64>) -> Result<Vec<f64>, MlmError> {
        if hidden_cls.len() != self.config.d_model {
            return Err(MlmError::Shape(format!(
                "hidden has {} dims, model has {}",
                hidden_cls.len(),
                self.config.d_model
            )));
        }
        let logits = self.params.cls_w.dot(&hidden_cls) + &self.params.cls_b;
        Ok(softmax(logits.as_slice().expect("contiguous")))
    }

    /// Per-mask candidate distributions for an encoded prompt.
    pub fn mask_distributions(
        &self,
        input: &EncodedInput,
        candidates: &[Vec<usize>],
    ) -> Result<Vec<Vec<f64>>, MlmError> {
        if candidates.len() != input.mask_positions.len() {
            return Err(MlmError::Shape(format!(
                "{} candidate sets for {} masks",
                candidates.len(),
                input.mask_positions.len()
            )));
        }
        let hidden = self.encode(input)?;
        input
            .mask_positions
            .iter()
            .zip(candidates)
            .map(|(&pos, cand)| self.mask_distribution(hidden.row(pos), cand))
            .collect()
    }

    /// Loss of one example; with `grads`, accumulates head-parameter gradients
    /// and the gradient of the hidden states, all scaled by `scale`.
    fn head_loss(
        &self,
        hidden: &Array2<f64>,
        ex: &Example,
        grads: Option<(&mut Params, &mut Array2<f64>, f64)>,
    ) -> Result<f64, MlmError> {
        let floor = PROB_FLOOR.ln();
        match &ex.target {
            Target::Masks { candidates, gold } => {
                let masks = &ex.input.mask_positions;
                if candidates.len() != masks.len() || gold.len() != masks.len() {
                    return Err(MlmError::Shape(format!(
                        "{} candidate sets and {} gold phrases for {} masks",
                        candidates.len(),
                        gold.len(),
                        masks.len()
                    )));
                }
                let mut loss = 0.0;
                let mut grads = grads;
                for ((&pos, cand), &g) in masks.iter().zip(candidates).zip(gold) {
                    if g >= cand.len() {
                        return Err(MlmError::Shape(format!("gold index {g} out of range")));
                    }
                    let h = hidden.row(pos);
                    let logp = log_softmax(&self.mask_logits(h, cand)?);
                    loss -= logp[g].max(floor);
                    let Some((gp, dh, scale)) = grads.as_mut() else {
                        continue;
                    };
                    if logp[g] < floor {
                        continue;
                    }
                    for (k, &id) in cand.iter().enumerate() {
                        let dl = (logp[k].exp() - if k == g { 1.0 } else { 0.0 }) * *scale;
                        dh.row_mut(pos)
                            .scaled_add(dl, &self.params.tok_emb.row(id));
                        gp.tok_emb.row_mut(id).scaled_add(dl, &h);
                    }
                }
                Ok(loss)
            }
            Target::Class(y) => {
                let y = *y;
                if y >= self.classes.len() {
                    return Err(MlmError::Shape(format!("class index {y} out of range")));
                }
                let h = hidden.row(0);
                let logits = self.params.cls_w.dot(&h) + &self.params.cls_b;
                let logp = log_softmax(logits.as_slice().expect("contiguous"));
                let loss = -logp[y].max(floor);
                if let Some((gp, dh, scale)) = grads {
                    if logp[y] >= floor {
                        let mut dl: Array1<f64> = logp.iter().map(|l| l.exp()).collect();
                        dl[y] -= 1.0;
                        dl *= scale;
                        for (c, &v) in dl.iter().enumerate() {
                            gp.cls_w.row_mut(c).scaled_add(v, &h);
                        }
                        gp.cls_b += &dl;
                        dh.row_mut(0).scaled_add(1.0, &self.params.cls_w.t().dot(&dl));
                    }
                }
                Ok(loss)
            }
        }
    }

    /// Mean loss over a batch, without gradients.
    pub fn loss(&self, batch: &[Example]) -> Result<f64, MlmError> {
        if batch.is_empty() {
            return Err(MlmError::Shape("empty batch".into()));
        }
        let mut total = 0.0;
        for (index, ex) in batch.iter().enumerate() {
            let cache = self.forward(&ex.input)?;
            let l = self.head_loss(&cache.hidden, ex, None)?;
            if !l.is_finite() {
                return Err(MlmError::NonFiniteLoss { index });
            }
            total += l;
        }
        Ok(total / batch.len() as f64)
    }

    /// Mean loss over a batch and its exact gradient for every parameter.
    pub fn loss_and_gradients(&self, batch: &[Example]) -> Result<(f64, Params), MlmError> {
        if batch.is_empty() {
            return Err(MlmError::Shape("empty batch".into()));
        }
        let scale = 1.0 / batch.len() as f64;
        let mut grads = self.params.zeros_like();
        let mut total = 0.0;
        for (index, ex) in batch.iter().enumerate() {
            let cache = self.forward(&ex.input)?;
            let mut dh = Array2::zeros(cache.hidden.raw_dim());
            let l = self.head_loss(&cache.hidden, ex, Some((&mut grads, &mut dh, scale)))?;
            if !l.is_finite() {
                return Err(MlmError::NonFiniteLoss { index });
            }
            total += l;
            self.backward_from_hidden(&ex.input, &cache, dh, &mut grads);
        }
        Ok((total * scale, grads))
    }

    fn backward_from_hidden(
        &self,
        input: &EncodedInput,
        cache: &ForwardCache,
        dh: Array2<f64>,
        grads: &mut Params,
    ) {
        let mut dx = layer_norm_backward(
            &dh,
            &cache.lnf,
            &self.params.lnf_g,
            &mut grads.lnf_g,
            &mut grads.lnf_b,
        );
        for (l, bc) in cache.blocks.iter().enumerate().rev() {
            dx = block_backward(&self.params.layers[l], &mut grads.layers[l], bc, dx, &self.config);
        }
        for (i, t) in input.tokens.iter().enumerate() {
            let row = dx.row(i);
            match *t {
                InputToken::Vocab(id) => grads.tok_emb.row_mut(id).scaled_add(1.0, &row),
                InputToken::Learnable(k) => grads.prompt_emb.row_mut(k).scaled_add(1.0, &row),
            }
            grads.pos_emb.row_mut(i).scaled_add(1.0, &row);
        }
    }
}
