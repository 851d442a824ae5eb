//! Recursive-descent parser for `.ptr` rule files.
//!
//! The grammar is line-insensitive; whitespace separates tokens and `#`
//! starts a comment running to the end of the line.
//!
//! ```text
//! file       := item*
//! item       := predicate | classes | rule
//! predicate  := "predicate" NAME "{" field* "}"
//! field      := "template" ":" tmpl_token* ";"
//!             | "labels" ":" [phrase ("," phrase)* [","]] ";"
//! classes    := "classes" "{" [class ("," class)* [","]] "}"
//! rule       := ["reversed"] "rule" class "=" conjunct ("&" conjunct)* ";"
//! conjunct   := NAME "(" phrase ")"
//! tmpl_token := "<text>" | "<subj>" | "<obj>" | "[MASK]" | "[L" DIGITS "]"
//!             | STRING | WORD
//! phrase     := STRING | WORD+            (bare words joined by one space)
//! class      := STRING | CLASSCHAR+
//! NAME       := [A-Za-z_][A-Za-z0-9_]*
//! CLASSCHAR  := [A-Za-z0-9_:/.'+-]
//! STRING     := '"' ( [^"\\\n] | '\"' | '\\' )* '"'
//! ```
//!
//! A bare phrase word is any run of characters other than whitespace and
//! `, ; ( ) { } " & = #`. Template words additionally allow `, ( ) & =`.

use thiserror::Error;

use super::types::{Conjunct, Pos, Predicate, Role, Rule, SourceMap, TaskSpec, TemplateElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("input is not valid UTF-8")]
    InvalidUtf8,
    #[error("duplicate predicate `{0}`")]
    DuplicatePredicate(String),
    #[error("duplicate class `{0}`")]
    DuplicateClass(String),
    #[error("duplicate rule for class `{0}`")]
    DuplicateRule(String),
    #[error("rule for undeclared class `{0}`")]
    UndeclaredClass(String),
    #[error("rule references undeclared predicate `{0}`")]
    UndeclaredPredicate(String),
    #[error("phrase `{phrase}` is not a label of predicate `{predicate}`")]
    UndeclaredPhrase { predicate: String, phrase: String },
    #[error("class without rule: `{0}`")]
    ClassWithoutRule(String),
}

/// A located parse failure.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {kind}")]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ParseErrorKind,
}

type PResult<T> = Result<T, ParseError>;

/// Parses a task specification from raw bytes.
pub fn parse_task_spec_bytes(source: &[u8]) -> PResult<TaskSpec> {
    match std::str::from_utf8(source) {
        Ok(text) => parse_task_spec(text),
        Err(e) => {
            let prefix = &source[..e.valid_up_to()];
            let text = String::from_utf8_lossy(prefix);
            let line = text.matches('\n').count() + 1;
            let col = text.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
            Err(ParseError {
                pos: Pos { line, col },
                kind: ParseErrorKind::InvalidUtf8,
            })
        }
    }
}

/// Parses a task specification.
///
/// Besides syntax, this rejects duplicate declarations, rules that name an
/// unknown class, predicate or phrase, and classes that have no rule. The
/// remaining invariants are checked by [`validate`](super::validate).
pub fn parse_task_spec(source: &str) -> PResult<TaskSpec> {
    let raw = Parser::new(source).file()?;
    resolve(raw)
}

struct RawPredicate {
    name: String,
    pos: Pos,
    template: Vec<TemplateElement>,
    labels: Vec<String>,
}

struct RawConjunct {
    predicate: String,
    phrase: String,
    pos: Pos,
}

struct RawRule {
    class: String,
    pos: Pos,
    reversed: bool,
    conjuncts: Vec<RawConjunct>,
}

#[derive(Default)]
struct RawFile {
    predicates: Vec<RawPredicate>,
    classes: Vec<(String, Pos)>,
    rules: Vec<RawRule>,
}

fn err<T>(pos: Pos, kind: ParseErrorKind) -> PResult<T> {
    Err(ParseError { pos, kind })
}

fn resolve(raw: RawFile) -> PResult<TaskSpec> {
    let mut source = SourceMap::default();
    let mut predicates: Vec<Predicate> = Vec::new();
    for p in raw.predicates {
        if source.predicates.contains_key(&p.name) {
            return err(p.pos, ParseErrorKind::DuplicatePredicate(p.name));
        }
        source.predicates.insert(p.name.clone(), p.pos);
        predicates.push(Predicate::new(p.name, p.template, p.labels));
    }

    let mut classes = Vec::new();
    for (class, pos) in raw.classes {
        if source.classes.contains_key(&class) {
            return err(pos, ParseErrorKind::DuplicateClass(class));
        }
        source.classes.insert(class.clone(), pos);
        classes.push(class);
    }

    let mut rules = Vec::new();
    for r in raw.rules {
        if !source.classes.contains_key(&r.class) {
            return err(r.pos, ParseErrorKind::UndeclaredClass(r.class));
        }
        if source.rules.contains_key(&r.class) {
            return err(r.pos, ParseErrorKind::DuplicateRule(r.class));
        }
        let mut conjuncts = Vec::with_capacity(r.conjuncts.len());
        for c in r.conjuncts {
            let Some(pred) = predicates.iter().find(|p| p.name == c.predicate) else {
                return err(c.pos, ParseErrorKind::UndeclaredPredicate(c.predicate));
            };
            if !pred.has_label(&c.phrase) {
                return err(
                    c.pos,
                    ParseErrorKind::UndeclaredPhrase {
                        predicate: c.predicate,
                        phrase: c.phrase,
                    },
                );
            }
            conjuncts.push(Conjunct::new(c.predicate, c.phrase));
        }
        source.rules.insert(r.class.clone(), r.pos);
        rules.push(Rule {
            class_label: r.class,
            conjuncts,
            reversed: r.reversed,
        });
    }

    for class in &classes {
        if !source.rules.contains_key(class) {
            return err(
                source.classes[class],
                ParseErrorKind::ClassWithoutRule(class.clone()),
            );
        }
    }

    let mut spec = TaskSpec::new(predicates, classes, rules);
    spec.source = source;
    Ok(spec)
}

const PHRASE_STOP: &[char] = &[',', ';', '(', ')', '{', '}', '"', '&', '=', '#'];
const TEMPLATE_STOP: &[char] = &[';', '"', '#', '{', '}'];

fn is_class_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || "_:/.'+-".contains(c)
}

struct Parser {
    chars: Vec<char>,
    idx: usize,
    line: usize,
    col: usize,
}

impl Parser {
    fn new(source: &str) -> Self {
        Parser {
            chars: source.chars().collect(),
            idx: 0,
            line: 1,
            col: 1,
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.idx).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.idx += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> PResult<T> {
        err(self.pos(), ParseErrorKind::Syntax(msg.into()))
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn expect(&mut self, want: char) -> PResult<()> {
        self.skip_trivia();
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            Some(c) => self.syntax(format!("expected `{want}`, found `{c}`")),
            None => self.syntax(format!("expected `{want}`, found end of input")),
        }
    }

    fn eat(&mut self, want: char) -> bool {
        self.skip_trivia();
        if self.peek() == Some(want) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn name(&mut self) -> PResult<String> {
        self.skip_trivia();
        let mut out = String::new();
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            Some(c) => return self.syntax(format!("expected identifier, found `{c}`")),
            None => return self.syntax("expected identifier, found end of input"),
        }
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                out.push(c);
                self.bump();
            } else {
                break;
            }
        }
        Ok(out)
    }

    fn string(&mut self) -> PResult<String> {
        let start = self.pos();
        self.bump(); // opening quote
        let mut out = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => {
                    return err(start, ParseErrorKind::Syntax("unterminated string".into()))
                }
                Some('"') => return Ok(out),
                Some('\\') => match self.bump() {
                    Some('"') => out.push('"'),
                    Some('\\') => out.push('\\'),
                    _ => return self.syntax("invalid escape in string"),
                },
                Some(c) => out.push(c),
            }
        }
    }

    fn class_name(&mut self) -> PResult<String> {
        self.skip_trivia();
        match self.peek() {
            Some('"') => self.string(),
            Some(c) if is_class_char(c) => {
                let mut out = String::new();
                while let Some(c) = self.peek() {
                    if is_class_char(c) {
                        out.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                Ok(out)
            }
            Some(c) => self.syntax(format!("expected class name, found `{c}`")),
            None => self.syntax("expected class name, found end of input"),
        }
    }

    /// Reads one whitespace-delimited bare word; stops at any `stop` char.
    fn bare_word(&mut self, stop: &[char]) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            if c.is_whitespace() || stop.contains(&c) {
                break;
            }
            out.push(c);
            self.bump();
        }
        out
    }

    fn phrase(&mut self) -> PResult<String> {
        self.skip_trivia();
        if self.peek() == Some('"') {
            return self.string();
        }
        let mut words: Vec<String> = Vec::new();
        loop {
            self.skip_trivia();
            match self.peek() {
                Some(c) if !PHRASE_STOP.contains(&c) => words.push(self.bare_word(PHRASE_STOP)),
                _ => break,
            }
        }
        if words.is_empty() {
            return match self.peek() {
                Some(c) => self.syntax(format!("expected label phrase, found `{c}`")),
                None => self.syntax("expected label phrase, found end of input"),
            };
        }
        Ok(words.join(" "))
    }

    fn file(&mut self) -> PResult<RawFile> {
        let mut file = RawFile::default();
        loop {
            self.skip_trivia();
            if self.peek().is_none() {
                return Ok(file);
            }
            let pos = self.pos();
            let kw = self.name()?;
            match kw.as_str() {
                "predicate" => file.predicates.push(self.predicate(pos)?),
                "classes" => self.classes(&mut file.classes)?,
                "rule" => file.rules.push(self.rule(false)?),
                "reversed" => {
                    let kw = self.name()?;
                    if kw != "rule" {
                        return err(pos, ParseErrorKind::Syntax("expected `rule` after `reversed`".into()));
                    }
                    file.rules.push(self.rule(true)?);
                }
                other => {
                    return err(
                        pos,
                        ParseErrorKind::Syntax(format!(
                            "expected `predicate`, `classes` or `rule`, found `{other}`"
                        )),
                    )
                }
            }
        }
    }

    fn predicate(&mut self, pos: Pos) -> PResult<RawPredicate> {
        let name = self.name()?;
        self.expect('{')?;
        let mut template = None;
        let mut labels = None;
        loop {
            if self.eat('}') {
                break;
            }
            let field_pos = self.pos();
            let field = self.name()?;
            self.expect(':')?;
            match field.as_str() {
                "template" if template.is_none() => template = Some(self.template()?),
                "labels" if labels.is_none() => labels = Some(self.labels()?),
                "template" | "labels" => {
                    return err(field_pos, ParseErrorKind::Syntax(format!("duplicate field `{field}`")))
                }
                other => {
                    return err(field_pos, ParseErrorKind::Syntax(format!("unknown field `{other}`")))
                }
            }
        }
        let Some(template) = template else {
            return err(pos, ParseErrorKind::Syntax(format!("predicate `{name}` has no template")));
        };
        let Some(labels) = labels else {
            return err(pos, ParseErrorKind::Syntax(format!("predicate `{name}` has no labels")));
        };
        Ok(RawPredicate {
            name,
            pos,
            template,
            labels,
        })
    }

    fn template(&mut self) -> PResult<Vec<TemplateElement>> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia();
            let pos = self.pos();
            match self.peek() {
                Some(';') => {
                    self.bump();
                    return Ok(out);
                }
                None => return self.syntax("unterminated template, expected `;`"),
                Some('"') => {
                    let text = self.string()?;
                    if text.trim().is_empty() || text.chars().any(char::is_whitespace) {
                        return err(
                            pos,
                            ParseErrorKind::Syntax("literal word must be one non-empty word".into()),
                        );
                    }
                    out.push(TemplateElement::Word { text });
                }
                Some(c) if TEMPLATE_STOP.contains(&c) => {
                    return self.syntax(format!("unexpected `{c}` in template"))
                }
                Some(_) => {
                    let tok = self.bare_word(TEMPLATE_STOP);
                    out.push(template_token(&tok).map_err(|m| ParseError {
                        pos,
                        kind: ParseErrorKind::Syntax(m),
                    })?);
                }
            }
        }
    }

    fn labels(&mut self) -> PResult<Vec<String>> {
        let mut out = Vec::new();
        loop {
            if self.eat(';') {
                return Ok(out);
            }
            out.push(self.phrase()?);
            if !self.eat(',') {
                self.expect(';')?;
                return Ok(out);
            }
        }
    }

    fn classes(&mut self, out: &mut Vec<(String, Pos)>) -> PResult<()> {
        self.expect('{')?;
        loop {
            if self.eat('}') {
                return Ok(());
            }
            self.skip_trivia();
            let pos = self.pos();
            out.push((self.class_name()?, pos));
            if !self.eat(',') {
                self.expect('}')?;
                return Ok(());
            }
        }
    }

    fn rule(&mut self, reversed: bool) -> PResult<RawRule> {
        self.skip_trivia();
        let class_pos = self.pos();
        let class = self.class_name()?;
        self.expect('=')?;
        let mut conjuncts = Vec::new();
        loop {
            self.skip_trivia();
            let cpos = self.pos();
            let predicate = self.name()?;
            self.expect('(')?;
            let phrase = self.phrase()?;
            self.expect(')')?;
            conjuncts.push(RawConjunct {
                predicate,
                phrase,
                pos: cpos,
            });
            if !self.eat('&') {
                break;
            }
        }
        self.expect(';')?;
        Ok(RawRule {
            class,
            pos: class_pos,
            reversed,
            conjuncts,
        })
    }
}

fn template_token(tok: &str) -> Result<TemplateElement, String> {
    Ok(match tok {
        "<text>" => TemplateElement::Text,
        "<subj>" => TemplateElement::Entity { role: Role::Subj },
        "<obj>" => TemplateElement::Entity { role: Role::Obj },
        "[MASK]" => TemplateElement::Mask,
        _ if tok.starts_with("[L") && tok.ends_with(']') && tok.len() > 3 => {
            let digits = &tok[2..tok.len() - 1];
            if !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(format!("malformed learnable token `{tok}`"));
            }
            let index = digits
                .parse()
                .map_err(|_| format!("learnable index out of range in `{tok}`"))?;
            TemplateElement::Learnable { index }
        }
        _ if tok.starts_with('<') && tok.ends_with('>') => {
            return Err(format!("unknown placeholder `{tok}`"))
        }
        _ if tok.starts_with('[') && tok.ends_with(']') => {
            return Err(format!("unknown marker `{tok}`; quote it to use it as a word"))
        }
        _ => TemplateElement::Word {
            text: tok.to_string(),
        },
    })
}

/// True when `word` can be printed bare in a template without changing meaning.
pub(crate) fn template_word_is_bare(word: &str) -> bool {
    !word.is_empty()
        && !word.chars().any(|c| c.is_whitespace() || TEMPLATE_STOP.contains(&c) || c == '\\')
        && matches!(template_token(word), Ok(TemplateElement::Word { .. }))
}

pub(crate) fn class_is_bare(class: &str) -> bool {
    !class.is_empty() && class.chars().all(is_class_char)
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNARY: &str = r#"
        predicate subj_type {
            template: the [MASK] <subj>;
            labels: person, organization;
        }
        classes { a, b }
        rule a = subj_type(person);
        rule b = subj_type(organization);
    "#;

    #[test]
    fn unary_predicate_has_arity_one() {
        let spec = parse_task_spec(UNARY).unwrap();
        let p = spec.predicate("subj_type").unwrap();
        assert_eq!(p.arity, 1);
        assert_eq!(p.slots, vec![Role::Subj]);
        assert_eq!(
            p.template.iter().filter(|e| **e == TemplateElement::Mask).count(),
            1
        );
        assert_eq!(p.label_words, vec!["person", "organization"]);
        assert_eq!(spec.composition_order, vec!["subj_type"]);
    }

    #[test]
    fn bare_multiword_phrase_is_joined() {
        let src = r#"
            predicate rel { template: <subj> [MASK] <obj>; labels: 's parent   was, was born in; }
            classes { p }
            rule p = rel('s parent was);
        "#;
        let spec = parse_task_spec(src).unwrap();
        assert_eq!(spec.predicates[0].label_words, vec!["'s parent was", "was born in"]);
        assert_eq!(spec.rules[0].conjuncts[0].phrase, "'s parent was");
        assert_eq!(spec.predicates[0].arity, 2);
    }

    #[test]
    fn class_without_rule_is_rejected() {
        let src = "predicate f { template: [MASK] <subj>; labels: x; }\nclasses { a, b }\n";
        let e = parse_task_spec(src).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::ClassWithoutRule("a".into()));
        assert_eq!(e.pos, Pos { line: 2, col: 11 });
        assert!(e.to_string().contains("class without rule"));
    }

    #[test]
    fn undeclared_references() {
        let base = "predicate f { template: [MASK] <subj>; labels: x; }\nclasses { a }\n";
        let e = parse_task_spec(&format!("{base}rule a = g(x);")).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UndeclaredPredicate("g".into()));
        let e = parse_task_spec(&format!("{base}rule a = f(y);")).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::UndeclaredPhrase { .. }));
        let e = parse_task_spec(&format!("{base}rule zz = f(x);")).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UndeclaredClass("zz".into()));
        let e = parse_task_spec(&format!("{base}rule a = f(x);\nrule a = f(x);")).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateRule("a".into()));
    }

    #[test]
    fn duplicates_are_rejected() {
        let e = parse_task_spec(
            "predicate f { template: [MASK]; labels: x; }\npredicate f { template: [MASK]; labels: x; }",
        )
        .unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicatePredicate("f".into()));
        assert_eq!(e.pos.line, 2);
        let e = parse_task_spec("classes { a, a }").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateClass("a".into()));
    }

    #[test]
    fn syntax_errors_carry_location() {
        let e = parse_task_spec("predicate f {\n  template: [MASK] <who>;\n}").unwrap_err();
        assert_eq!(e.pos, Pos { line: 2, col: 20 });
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
        let e = parse_task_spec("rule").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
        let e = parse_task_spec("classes { \"open }").unwrap_err();
        assert!(e.to_string().contains("unterminated string"));
    }

    #[test]
    fn template_tokens() {
        let spec = parse_task_spec(
            "predicate f { template: <text> [L0] \"[MASK]\" was [MASK] to <obj> [L12]; labels: x; }",
        )
        .unwrap();
        let t = &spec.predicates[0].template;
        assert_eq!(t[0], TemplateElement::Text);
        assert_eq!(t[1], TemplateElement::Learnable { index: 0 });
        assert_eq!(t[2], TemplateElement::word("[MASK]"));
        assert_eq!(t[6], TemplateElement::entity(Role::Obj));
        assert_eq!(t[7], TemplateElement::Learnable { index: 12 });
    }

    #[test]
    fn reversed_rules_and_quoted_classes() {
        let src = r#"
            predicate f { template: <subj> [MASK] <obj>; labels: related; }
            classes { "Cause-Effect(e1,e2)", org:member_of }
            rule "Cause-Effect(e1,e2)" = f(related);
            reversed rule org:member_of = f("related");
        "#;
        let spec = parse_task_spec(src).unwrap();
        assert_eq!(spec.classes[0], "Cause-Effect(e1,e2)");
        assert!(!spec.rules[0].reversed);
        assert!(spec.rules[1].reversed);
    }

    #[test]
    fn invalid_utf8_is_located() {
        let e = parse_task_spec_bytes(b"classes {\n ab\xff }").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::InvalidUtf8);
        assert_eq!(e.pos, Pos { line: 2, col: 4 });
    }
}
