use corpkit::corpus::Document;
use corpkit::token::tokenize;
use corpkit::variant::{classify, classify_text, je_ratio, marker_votes, split_corpus, ClassifierConfig, MarkerLexicon, Variant};
use proptest::prelude::*;

fn label(text: &str) -> Variant {
    classify_text(text, &MarkerLexicon::default(), &ClassifierConfig::default()).label
}

#[test]
fn vote_examples() {
    let lex = MarkerLexicon::default();
    assert_eq!(marker_votes(&tokenize("ko uslov ko"), &lex), (3, 0));
    assert_eq!(marker_votes(&tokenize("tko uvjet"), &lex), (0, 2));
    assert_eq!(marker_votes(&tokenize("ko tko što šta"), &lex), (2, 2));
}

#[test]
fn ratio_examples() {
    assert_eq!(je_ratio("eee"), 0.0);
    assert_eq!(je_ratio("je"), 1.0);
    assert_eq!(je_ratio("dijete sedi"), 1.0 / 3.0);
    assert_eq!(je_ratio("JE je"), 1.0);
    assert_eq!(je_ratio("bez slova"), 0.0);
}

#[test]
fn decision_rule() {
    assert_eq!(label("ko zna šta radi"), Variant::Serbian);
    assert_eq!(label("tko zna što radi"), Variant::Croatian);
    // no markers, Ijekavian ratio above the threshold
    assert_eq!(label("dijete mlijeko vrijeme sede mene te"), Variant::Croatian);
    // nothing at all: tie goes to Serbian
    assert_eq!(label("mama tata"), Variant::Serbian);
}

#[test]
fn mixed_fixture_splits_six_four() {
    let texts = [
        "ko je to bio", "šta radiš", "uslov za rad", "uopšte ne znam", "to bilo tako", "sada ili nikad",
        "tko je to bio", "što radiš", "uvjet za rad", "uopće ne znam",
    ];
    let docs: Vec<Document> = texts.iter().enumerate().map(|(i, t)| Document::new(format!("d{i}"), *t)).collect();
    let (sr, hr) = split_corpus(docs, &MarkerLexicon::default(), &ClassifierConfig::default()).unwrap();
    assert_eq!((sr.len(), hr.len()), (6, 4));
    assert!(sr.windows(2).all(|w| w[0].id < w[1].id));
    let (a, b) = split_corpus(Vec::new(), &MarkerLexicon::default(), &ClassifierConfig::default()).unwrap();
    assert!(a.is_empty() && b.is_empty());
}

#[test]
fn lexicon_file_format() {
    let lex = MarkerLexicon::parse_tsv("# hr\tsr\ntko\tko\nvlak\tvoz\n").unwrap();
    assert_eq!(marker_votes(&tokenize("voz i vlak i voz"), &lex), (2, 1));
    assert!(MarkerLexicon::parse_tsv("isti\tisti\n").is_err());
}

const WORDS: [&str; 12] = ["dijete", "sedi", "ko", "tko", "šta", "što", "mleko", "mlijeko", "rad", "uslov", "uvjet", "je"];

proptest! {
    #[test]
    fn more_serbian_markers_never_turn_serbian_croatian(
        base in prop::collection::vec(0usize..WORDS.len(), 0..40),
        extra in prop::collection::vec(0usize..4, 1..10),
    ) {
        let lex = MarkerLexicon::default();
        let cfg = ClassifierConfig::default();
        let text: Vec<&str> = base.iter().map(|&i| WORDS[i]).collect();
        let before = classify(&Document::new("a", text.join(" ")), &lex, &cfg);
        let sr_forms = ["ko", "šta", "uslov", "uopšte"];
        let mut more = text.clone();
        more.extend(extra.iter().map(|&i| sr_forms[i]));
        let after = classify(&Document::new("a", more.join(" ")), &lex, &cfg);
        prop_assert!(before.label != Variant::Serbian || after.label == Variant::Serbian);
        prop_assert!((0.0..=1.0).contains(&before.je_ratio));
    }
}
