use xgenre::corpus::{build_scenario, Corpus, Document, Genre, ScenarioSpec};
use xgenre::harness::synth::{generate, SynthConfig};
use xgenre::harness::{run_on_corpus, run_scenario, HarnessError, ModelKind, Report, Resources, RunConfig, TrainedModel};

fn data(docs: usize, seed: u64) -> xgenre::harness::synth::SynthData {
    generate(&SynthConfig {
        docs,
        seed,
        ..SynthConfig::default()
    })
}

fn cfg(model: ModelKind, features: &str) -> RunConfig {
    RunConfig {
        model,
        features: features.into(),
        epochs: 20,
        ..RunConfig::default()
    }
}

/// Same corpus with every document matching `touch` given different text.
fn scramble(corpus: &Corpus, touch: impl Fn(&Document) -> bool) -> Corpus {
    let docs = corpus
        .documents()
        .iter()
        .map(|d| {
            if touch(d) {
                Document::new(d.id.clone(), d.genre.clone(), d.label, format!("zzq {} qqz", d.text.len())).unwrap()
            } else {
                d.clone()
            }
        })
        .collect();
    Corpus::new(docs, corpus.provenance()).unwrap()
}

#[test]
fn runs_are_deterministic() {
    let d = data(300, 5);
    for model in [ModelKind::Logreg, ModelKind::Nb, ModelKind::DualLm] {
        let c = RunConfig { seed: 9, ..cfg(model, "w1,c3") };
        let (a, _) = run_on_corpus(&c, &d.corpus).unwrap();
        let (b, _) = run_on_corpus(&c, &d.corpus).unwrap();
        assert_eq!(a.to_kv(), b.to_kv(), "{model}");
    }
}

#[test]
fn fit_ignores_validation_documents() {
    let d = data(300, 6);
    let c = cfg(ModelKind::Logreg, "w1,lexF");
    let res = Resources::default();

    let cross = ScenarioSpec::cross_genre([Genre::News], Genre::Twitter, 0);
    let a = run_scenario(&c, &d.corpus, &cross, &res).unwrap();
    let altered = scramble(&d.corpus, |doc| doc.genre == Genre::Twitter);
    let b = run_scenario(&c, &altered, &cross, &res).unwrap();
    assert_eq!(a.report.fit, b.report.fit);

    let within = ScenarioSpec::in_domain(Genre::News, xgenre::corpus::Fraction::one_tenth(), 3);
    let (_, valid) = build_scenario(&d.corpus, &within).unwrap();
    let valid_ids: Vec<String> = valid.iter().map(|v| v.id.clone()).collect();
    let a = run_scenario(&c, &d.corpus, &within, &res).unwrap();
    let altered = scramble(&d.corpus, |doc| valid_ids.contains(&doc.id));
    let b = run_scenario(&c, &altered, &within, &res).unwrap();
    assert_eq!(a.report.fit, b.report.fit);

    let not_valid = scramble(&d.corpus, |doc| doc.genre == Genre::News && !valid_ids.contains(&doc.id));
    let b = run_scenario(&c, &not_valid, &within, &res).unwrap();
    assert_ne!(a.report.fit, b.report.fit);
}

#[test]
fn model_directories_round_trip() {
    let d = data(200, 7);
    let docs = d.corpus.documents();
    let clusters = Resources::clusters_from(&d.embeddings, &RunConfig { k: Some(8), ..RunConfig::default() }).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    for (i, (model, features)) in [
        (ModelKind::Logreg, "best-trad"),
        (ModelKind::Nb, "all"),
        (ModelKind::DualLm, ""),
    ]
    .into_iter()
    .enumerate()
    {
        let c = cfg(model, if features.is_empty() { "w1" } else { features });
        let m = TrainedModel::train(model, docs, &c, Some(&clusters)).unwrap();
        let dir = tmp.path().join(i.to_string());
        m.save(&dir).unwrap();
        let back = TrainedModel::load(&dir).unwrap();
        assert_eq!(back.fingerprint(), m.fingerprint(), "{model}");
        for doc in docs.iter().take(40) {
            assert_eq!(back.predict_one(doc).unwrap(), m.predict_one(doc).unwrap());
        }
    }
}

#[test]
fn missing_cluster_source_is_a_config_error() {
    let d = data(100, 8);
    let c = cfg(ModelKind::Logreg, "best-trad");
    assert!(matches!(run_on_corpus(&c, &d.corpus), Err(HarnessError::Config(_))));
    let c = RunConfig {
        embeddings: Some("/no/such/embeddings.txt".into()),
        ..c
    };
    assert!(matches!(c.check(), Err(HarnessError::Config(_))));
}

#[test]
fn report_survives_kv() {
    let d = data(240, 9);
    let (report, outcomes) = run_on_corpus(&cfg(ModelKind::Nb, "w1"), &d.corpus).unwrap();
    assert_eq!(outcomes.len(), 4);
    let back = Report::from_kv(&report.to_kv()).unwrap();
    assert_eq!(back.to_table(), report.to_table());
    for o in &outcomes {
        let r = &o.report;
        assert_eq!(r.accuracy, r.correct as f64 / r.valid_size as f64);
        assert_eq!(o.predictions.len(), r.valid_size);
    }
}

#[test]
fn ensemble_members_are_reported() {
    let d = data(300, 10);
    let c = RunConfig {
        scenario: "cross-genre:twitter".parse().unwrap(),
        ..cfg(ModelKind::Ensemble, "w1,c3")
    };
    let (report, _) = run_on_corpus(&c, &d.corpus).unwrap();
    let row = &report.rows[0];
    let names: Vec<&str> = row.members.iter().map(|m| m.name.as_str()).collect();
    assert_eq!(names, ["logreg", "nb", "dual-lm"]);
    assert!(row.accuracy > 0.8, "{}", row.accuracy);
}

/// Mean of percentages given in hundredths, rounded half away from zero,
/// in integer arithmetic.
fn oracle_mean(cells: &[i64]) -> String {
    let n = cells.len() as i64;
    let sum: i64 = cells.iter().sum();
    let q = (2 * sum + n) / (2 * n);
    format!("{}.{:02}", q / 100, q % 100)
}

#[test]
fn table_averages_come_from_cells() {
    use xgenre::harness::{macro_average, round_half_away};
    let rows: [&[i64]; 4] = [
        &[5328, 5099, 5120],
        &[5355, 5300, 5311],
        &[6501, 6349, 6630],
        &[5589, 5710, 5580],
    ];
    for cells in rows {
        let pct: Vec<f64> = cells.iter().map(|&c| c as f64 / 100.0).collect();
        assert_eq!(round_half_away(macro_average(&pct).unwrap(), 2), oracle_mean(cells));
    }
    assert_eq!(oracle_mean(&[5328, 5099, 5120]), "51.82");
    assert_eq!(oracle_mean(&[6501, 6349, 6630]), "64.93");
}
