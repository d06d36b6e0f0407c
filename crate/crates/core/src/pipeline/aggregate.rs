use std::io::Write;

use crate::corpus::{load_corpus, write_jsonl_doc, Document, Lang, LoadOptions, OnMalformed};
use crate::dedup::{DedupReport, Deduplicator};
use crate::error::Result;
use crate::variant::{classify_stream, is_serbian, MarkerLexicon};

use super::config::{PipelineConfig, SourceSpec};
use super::output::{io_err, OutputSet};

#[derive(Debug, Clone)]
pub struct AggregateSummary {
    pub report: DedupReport,
    pub docs_in: u64,
    pub docs_kept: u64,
    pub shingles: usize,
}

fn load_opts(cfg: &PipelineConfig, src: &SourceSpec, source_name: &str) -> LoadOptions {
    LoadOptions {
        format: src.format.into(),
        on_malformed: if cfg.skip_malformed {
            OnMalformed::Skip
        } else {
            OnMalformed::Fail
        },
        allow_empty: true,
        source: None,
        force_source: Some(source_name.to_string()),
        lang: Some(src.lang),
    }
}

/// Build the umbrella corpus: split mixed sources, deduplicate everything
/// in configured order, write the kept documents and the share report.
pub fn aggregate(cfg: &PipelineConfig) -> Result<AggregateSummary> {
    cfg.validate()?;
    let lexicon = match &cfg.markers {
        Some(p) => MarkerLexicon::load(p)?,
        None => MarkerLexicon::default(),
    };
    // fail fast on unreadable sources
    for s in &cfg.sources {
        load_corpus(&s.path, &load_opts(cfg, s, &s.name))?;
    }

    let mut outputs = OutputSet::new();
    let corpus_out = outputs.stage(&cfg.output.corpus)?;
    let mut dedup = Deduplicator::new(cfg.dedup)?;
    let (mut docs_in, mut docs_kept) = (0u64, 0u64);
    {
        let staged = outputs.get(corpus_out);
        let dest = staged.dest().to_path_buf();
        let mut w = std::io::BufWriter::with_capacity(1 << 20, staged.file());
        let mut feed = |doc: Document, dedup: &mut Deduplicator| -> Result<()> {
            docs_in += 1;
            if dedup.process(&doc).kept {
                docs_kept += 1;
                write_jsonl_doc(&mut w, &doc).map_err(io_err(&dest))?;
            }
            Ok(())
        };

        for src in &cfg.sources {
            if !src.split {
                log::info!("dedup: source {}", src.name);
                dedup.declare_source(&src.name);
                for doc in load_corpus(&src.path, &load_opts(cfg, src, &src.name))? {
                    feed(doc?, &mut dedup)?;
                }
                continue;
            }
            // two passes over the same source keep memory flat; the
            // Serbian half is deduplicated first
            for (half, keep_serbian, lang) in [("sr", true, Lang::Sr), ("hr", false, Lang::Hr)] {
                let name = format!("{}-{half}", src.name);
                log::info!("dedup: source {name} (split of {})", src.name);
                dedup.declare_source(&name);
                let docs = load_corpus(&src.path, &load_opts(cfg, src, &name))?;
                classify_stream(docs, &lexicon, &cfg.classifier, |mut doc, verdict| {
                    if is_serbian(&verdict) == keep_serbian {
                        doc.lang = lang;
                        feed(doc, &mut dedup)?;
                    }
                    Ok(())
                })?;
            }
        }
        w.flush().map_err(io_err(&dest))?;
    }
    let shingles = dedup.index().len();
    let report = dedup.finish();
    let report_path = cfg.output.report.clone();
    outputs.write(&report_path, |w| report.write_csv(w))?;
    outputs.commit()?;
    Ok(AggregateSummary {
        report,
        docs_in,
        docs_kept,
        shingles,
    })
}

