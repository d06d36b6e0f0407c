use std::fs;

use corpkit::dissertation::{
    locate_by_prefix, process_dissertations, read_metadata, write_jsonl, DissertationRecord, RunOptions, SectionPatterns,
};

const INLINE: &str = "Naslov\n\nRezime\nOva teza ispituje\nsušu i prinos.\n\nKljučne reči: suša, prinos\nNaučna oblast: Agronomija\n\nAbstract\nThis thesis examines\ndrought and yield.\n\nKey words: drought, yield\nScientific field: Agronomy\n\n1. Uvod\n";

fn record(id: &str) -> DissertationRecord {
    DissertationRecord {
        id: id.into(),
        dc_language: "srp".into(),
        dc_rights_license: "CC BY 4.0".into(),
        fulltext_url: Some(format!("https://example.org/{id}.pdf")),
        ..Default::default()
    }
}

#[test]
fn locator_handles_wrapping_and_case() {
    let text = "Uvod.\nOVA teza\n  ispituje sušu i\nprinos kukuruza u Srbiji.";
    let loc = locate_by_prefix(text, "Ova teza ispituje sušu i prinos kukuruza").unwrap();
    assert_eq!(loc.byte, 6);
    assert_eq!(loc.char, 6);
    assert_eq!(locate_by_prefix(text, "Potpuno drugačiji tekst ovde stoji sada"), None);
}

#[test]
fn run_over_directory() {
    let dir = tempfile::tempdir().unwrap();
    let texts = dir.path().join("texts");
    fs::create_dir(&texts).unwrap();
    let digital = "Tekst prve strane. ".repeat(60);

    let mut recs = Vec::new();
    // paired
    fs::write(texts.join("a.txt"), INLINE).unwrap();
    fs::write(texts.join("a.p10.txt"), &digital).unwrap();
    recs.push(record("a"));
    // partial: English part missing
    fs::write(texts.join("b.txt"), INLINE.split("Abstract").next().unwrap()).unwrap();
    fs::write(texts.join("b.p10.txt"), &digital).unwrap();
    recs.push(record("b"));
    // scanned: probe too short, not a candidate
    fs::write(texts.join("c.txt"), INLINE).unwrap();
    fs::write(texts.join("c.p10.txt"), "  \n ").unwrap();
    recs.push(record("c"));
    // all rights reserved
    fs::write(texts.join("d.p10.txt"), &digital).unwrap();
    recs.push(DissertationRecord { dc_rights_license: "All rights reserved".into(), ..record("d") });
    // candidate without a full text file
    fs::write(texts.join("e.p10.txt"), &digital).unwrap();
    recs.push(record("e"));

    let meta = dir.path().join("meta.jsonl");
    let mut buf = Vec::new();
    write_jsonl(&mut buf, &recs).unwrap();
    fs::write(&meta, buf).unwrap();

    let out = process_dissertations(read_metadata(&meta).unwrap(), &texts, &SectionPatterns::default(), &RunOptions::default()).unwrap();
    assert_eq!(out.candidates, 3);
    assert_eq!((out.paired, out.partial, out.failed), (1, 1, 1));
    assert_eq!(out.pairs[0].id, "a");
    assert_eq!(out.pairs[0].sr_abstract, "Ova teza ispituje\nsušu i prinos.");
    assert_eq!(out.pairs[0].en_keywords.as_deref().unwrap(), ["drought", "yield"]);
    let b = out.records.iter().find(|r| r.id == "b").unwrap();
    assert_eq!(b.abstract_sr.as_deref(), Some("Ova teza ispituje\nsušu i prinos."));
    assert_eq!(b.keywords_from_text.as_deref().unwrap(), ["suša", "prinos"]);
    assert_eq!(b.abstract_en, None);
    let c = out.records.iter().find(|r| r.id == "c").unwrap();
    assert_eq!((c.need_ocr, c.abstract_sr.as_deref()), (Some(true), None));
    let reported: Vec<&str> = out.report.iter().map(|r| r.id.as_str()).collect();
    assert_eq!(reported, ["b", "e"]);
    assert!(out.report[1].reason.contains("not found"));
}

#[test]
fn missing_enrichment_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    // no probe file, so need_ocr cannot be derived
    let err = process_dissertations(vec![record("x")], dir.path(), &SectionPatterns::default(), &RunOptions::default())
        .unwrap_err();
    assert_eq!(err.to_string(), "record x: missing enrichment field need_ocr");
}

#[test]
fn pattern_directory_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    SectionPatterns::write_defaults(dir.path()).unwrap();
    fs::write(dir.path().join("abstract.sr.txt"), "(?mi)^[ \\t]*kratak[ \\t]+sadržaj[ \\t]*:?\n").unwrap();
    let p = SectionPatterns::load_dir(dir.path()).unwrap();
    let text = "Kratak sadržaj\nTekst teze.\nNaučna oblast: Fizika\n";
    let b = corpkit::dissertation::extract_inline(
        text,
        &p,
        corpkit::dissertation::DocLang::Sr,
        None,
        &Default::default(),
    )
    .unwrap();
    assert_eq!(b.abstract_text, "Tekst teze.");
    fs::write(dir.path().join("keywords.en.txt"), "([unclosed\n").unwrap();
    assert!(SectionPatterns::load_dir(dir.path()).is_err());
}
