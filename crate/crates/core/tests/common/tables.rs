//! Verbalizer rows of the bundled TACRED-style and SemEval-style specs,
//! one per class.

use ptr_rules::prompt::PromptSchema;

pub const TACRED_ROWS: [(&str, &str, &str, &str); 14] = [
    ("per:country_of_birth", "person", "was born in", "country"),
    ("per:stateorprovince_of_birth", "person", "was born in", "state"),
    ("per:city_of_birth", "person", "was born in", "city"),
    ("per:employee_of", "person", "'s employee was", "organization"),
    ("per:parents", "person", "'s parent was", "person"),
    ("per:age", "person", "'s age was", "number"),
    ("org:founded_by", "organization", "was founded by", "person"),
    ("org:country_of_headquarters", "organization", "was located in", "country"),
    ("org:stateorprovince_of_headquarters", "organization", "was located in", "state"),
    ("org:city_of_headquarters", "organization", "was located in", "city"),
    ("org:number_of_employees/members", "organization", "'s employer has", "number"),
    ("org:members", "organization", "'s member was", "organization"),
    ("org:parents", "organization", "'s parent was", "organization"),
    ("no_relation", "entity", "is irrelevant to", "entity"),
];

pub const SEMEVAL_ROWS: [(&str, &str, &str, &str); 10] = [
    ("Member-Collection(e1,e2)", "member", "related", "collection"),
    ("Entity-Origin(e1,e2)", "entity", "related", "origin"),
    ("Cause-Effect(e1,e2)", "cause", "related", "effect"),
    ("Component-Whole(e1,e2)", "component", "related", "whole"),
    ("Product-Producer(e1,e2)", "product", "related", "producer"),
    ("Instrument-Agency(e1,e2)", "instrument", "related", "agency"),
    ("Entity-Destination(e1,e2)", "entity", "related", "destination"),
    ("Content-Container(e1,e2)", "content", "related", "container"),
    ("Message-Topic(e1,e2)", "message", "related", "topic"),
    ("Other", "mention", "irrelevant", "mention"),
];

pub fn check_rows(schema: &PromptSchema, rows: &[(&str, &str, &str, &str)]) {
    assert_eq!(schema.classes.len(), rows.len());
    for (class, m1, m2, m3) in rows {
        let c = schema.class_index(class).unwrap_or_else(|| panic!("missing {class}"));
        assert_eq!(schema.class_phrases(c), vec![*m1, *m2, *m3], "{class}");
    }
}
