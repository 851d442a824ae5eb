//! Seeded synthetic corpora with known structure.
//!
//! Each class of a task spec gets a profile read off its rule: the label
//! phrase of the unary predicate on each entity picks the entity type, and
//! the phrase of the binary predicate is spelled out between the entities.
//! A sentence looks like
//!
//! ```text
//! [prefix] <subj name> <relation words> <obj name> [suffix] .
//! ```
//!
//! where the optional suffix may mention a third entity of any type used by
//! the spec. Classes that share entity types can only be told apart by the
//! relation words.
//!
//! Generation order is class by class in spec order, then instance by
//! instance; per instance the draws are subject name, object name, prefix,
//! suffix, distractor name, noise coin, and (if the coin hits) the wrong label.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Dataset, Instance, Span};
use crate::dsl::{Role, TaskSpec};

/// Entity types and relation phrase that a class's sentences realize.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassProfile {
    pub class: String,
    pub subj_type: Option<String>,
    pub obj_type: Option<String>,
    pub relation: Option<String>,
}

pub fn class_profiles(spec: &TaskSpec) -> Vec<ClassProfile> {
    spec.classes
        .iter()
        .map(|class| {
            let mut profile = ClassProfile {
                class: class.clone(),
                subj_type: None,
                obj_type: None,
                relation: None,
            };
            for c in spec.rule(class).map(|r| r.conjuncts.as_slice()).unwrap_or(&[]) {
                let Some(p) = spec.predicate(&c.predicate) else {
                    continue;
                };
                match p.slots.as_slice() {
                    [Role::Subj] => profile.subj_type = Some(c.phrase.clone()),
                    [Role::Obj] => profile.obj_type = Some(c.phrase.clone()),
                    _ if p.arity == 2 => profile.relation = Some(c.phrase.clone()),
                    _ => {}
                }
            }
            profile
        })
        .collect()
}

const PREFIXES: [&[&str]; 4] = [
    &[],
    &["reports", "say"],
    &["in", "1990", ","],
    &["according", "to", "records", ","],
];

const NO_RELATION_CUE: &str = "and";

fn known_names(kind: &str) -> Option<&'static [&'static str]> {
    let names: &[&str] = match kind {
        "person" => &[
            "Mark Twain", "Ada Lovelace", "Alan Turing", "Marie Curie", "Grace Hopper",
            "Niels Bohr", "Emmy Noether", "John Smith", "Maria Garcia", "Li Wei",
            "Omar Haddad", "Sara Berg",
        ],
        "organization" => &[
            "Acme Corp", "Globex", "Initech", "Umbrella Group", "Hooli", "Vandelay Industries",
            "Cyberdyne Systems", "Wonka Foods", "Tyrell Labs", "Soylent Inc",
        ],
        "city" => &[
            "Paris", "Berlin", "Lagos", "Osaka", "Lima", "Toronto", "Mumbai", "Cairo",
            "Oslo", "Denver",
        ],
        "country" => &[
            "France", "Germany", "Nigeria", "Japan", "Peru", "Canada", "India", "Egypt",
            "Norway", "Brazil",
        ],
        "state or province" => &[
            "Florida", "Ontario", "Bavaria", "Texas", "Quebec", "Kerala", "Queensland", "Ohio",
        ],
        _ => return None,
    };
    Some(names)
}

/// Candidate names for an entity of the given type, as token lists. Types
/// outside the built-in lexicon get eight generated single-token names.
pub fn entity_names(kind: Option<&str>) -> Vec<Vec<String>> {
    let kind = kind.unwrap_or("entity");
    match known_names(kind) {
        Some(names) => names
            .iter()
            .map(|n| n.split(' ').map(str::to_string).collect())
            .collect(),
        None => {
            let stem: String = kind
                .chars()
                .map(|c| if c.is_alphanumeric() { c } else { '_' })
                .collect();
            (1..=8).map(|k| vec![format!("{stem}_{k}")]).collect()
        }
    }
}

fn suffixes() -> [&'static [&'static str]; 3] {
    [&["."], &[",", "officials", "said", "."], &[",", "near"]]
}

fn cue(profile: &ClassProfile) -> Vec<String> {
    match &profile.relation {
        Some(r) => r.split(' ').map(str::to_string).collect(),
        None => vec![NO_RELATION_CUE.to_string()],
    }
}

fn distractor_pool(profiles: &[ClassProfile]) -> Vec<Vec<String>> {
    let mut kinds: Vec<Option<&str>> = Vec::new();
    for p in profiles {
        for k in [p.subj_type.as_deref(), p.obj_type.as_deref()] {
            if !kinds.contains(&k) {
                kinds.push(k);
            }
        }
    }
    kinds.into_iter().flat_map(entity_names).collect()
}

/// Every word a synthetic corpus for `spec` can contain.
pub fn synthetic_vocabulary(spec: &TaskSpec) -> Vec<String> {
    let profiles = class_profiles(spec);
    let mut words: Vec<String> = Vec::new();
    let mut add = |w: &str| {
        if !words.iter().any(|x| x == w) {
            words.push(w.to_string());
        }
    };
    for p in PREFIXES.iter().chain(suffixes().iter()) {
        p.iter().for_each(|w| add(w));
    }
    add(".");
    for p in &profiles {
        cue(p).iter().for_each(|w| add(w));
    }
    for name in distractor_pool(&profiles) {
        name.iter().for_each(|w| add(w));
    }
    add("the");
    for p in &profiles {
        for kind in [&p.subj_type, &p.obj_type].into_iter().flatten() {
            kind.split(' ').for_each(&mut add);
        }
    }
    words
}

fn mention<R: Rng>(kind: Option<&str>, name: &[String], rng: &mut R) -> Vec<String> {
    let mut out = Vec::new();
    if let Some(kind) = kind {
        if rng.random::<bool>() {
            out.push("the".to_string());
            out.extend(kind.split(' ').map(str::to_string));
        }
    }
    out.extend(name.iter().cloned());
    out
}

/// Unlabeled sentences for masked-word pretraining. Each sentence follows a
/// uniformly drawn class profile, and each entity mention is introduced by
/// `the <type>` with probability one half, so the text carries which names
/// are of which type. Draw order per sentence: profile, subject, object,
/// prefix, subject article coin, object article coin.
pub fn pretraining_text(spec: &TaskSpec, n_sentences: usize, seed: u64) -> Vec<Vec<String>> {
    let profiles = class_profiles(spec);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n_sentences);
    if profiles.is_empty() {
        return out;
    }
    for _ in 0..n_sentences {
        let profile = profiles.choose(&mut rng).expect("profiles");
        let subj_names = entity_names(profile.subj_type.as_deref());
        let obj_names = entity_names(profile.obj_type.as_deref());
        let subj = subj_names.choose(&mut rng).expect("names");
        let obj = obj_names.choose(&mut rng).expect("names");
        let prefix = PREFIXES[rng.random_range(0..PREFIXES.len())];
        let mut tokens: Vec<String> = prefix.iter().map(|w| w.to_string()).collect();
        tokens.extend(mention(profile.subj_type.as_deref(), subj, &mut rng));
        tokens.extend(cue(profile));
        tokens.extend(mention(profile.obj_type.as_deref(), obj, &mut rng));
        tokens.push(".".to_string());
        out.push(tokens);
    }
    out
}

/// Draws `n_per_class` sentences per class. A `noise_rate` fraction of
/// instances (per-instance coin) gets a uniformly drawn wrong label.
pub fn generate_synthetic(spec: &TaskSpec, n_per_class: usize, seed: u64, noise_rate: f64) -> Dataset {
    let profiles = class_profiles(spec);
    let distractors = distractor_pool(&profiles);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut instances = Vec::with_capacity(profiles.len() * n_per_class);
    for (ci, profile) in profiles.iter().enumerate() {
        let subj_names = entity_names(profile.subj_type.as_deref());
        let obj_names = entity_names(profile.obj_type.as_deref());
        let cue = cue(profile);
        for i in 0..n_per_class {
            let subj = subj_names.choose(&mut rng).expect("names").clone();
            let mut obj = obj_names.choose(&mut rng).expect("names").clone();
            while obj == subj {
                obj = obj_names.choose(&mut rng).expect("names").clone();
            }
            let prefix = PREFIXES[rng.random_range(0..PREFIXES.len())];
            let suffix_choice = rng.random_range(0..suffixes().len());
            let third = distractors.choose(&mut rng).expect("names");

            let mut tokens: Vec<String> = prefix.iter().map(|w| w.to_string()).collect();
            let s = Span::new(tokens.len(), tokens.len() + subj.len());
            tokens.extend(subj);
            tokens.extend(cue.iter().cloned());
            let o = Span::new(tokens.len(), tokens.len() + obj.len());
            tokens.extend(obj);
            tokens.extend(suffixes()[suffix_choice].iter().map(|w| w.to_string()));
            if suffix_choice == 2 {
                tokens.extend(third.iter().cloned());
                tokens.push(".".to_string());
            }

            let mut label = profile.class.clone();
            if rng.random::<f64>() < noise_rate && profiles.len() > 1 {
                let mut k = rng.random_range(0..profiles.len() - 1);
                if k >= ci {
                    k += 1;
                }
                label = profiles[k].class.clone();
            }
            instances.push(Instance::new(format!("syn-{seed}-{ci}-{i}"), tokens, s, o, label));
        }
    }
    Dataset {
        split: "synthetic".to_string(),
        classes: spec.classes.clone(),
        instances,
    }
}
