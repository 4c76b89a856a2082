use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Corpus, CorpusError, Document, Genre, Label};

/// An exact fraction strictly between 0 and 1.
///
/// Parses either a decimal (`0.1`) or a ratio (`1/10`); decimals are read
/// exactly, so `ceil(0.1 * 20000)` is 2000 and not 2001.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fraction {
    num: u64,
    den: u64,
}

impl Fraction {
    pub fn new(num: u64, den: u64) -> Result<Self, CorpusError> {
        if num == 0 || num >= den {
            return Err(CorpusError::InvalidFraction(format!("{num}/{den}")));
        }
        Ok(Self { num, den })
    }

    pub fn one_tenth() -> Self {
        Self { num: 1, den: 10 }
    }

    /// `ceil(self * n)`.
    pub fn ceil_of(&self, n: usize) -> usize {
        let prod = self.num as u128 * n as u128;
        prod.div_ceil(self.den as u128) as usize
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Fraction {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CorpusError::InvalidFraction(s.to_owned());
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n = n.trim().parse().map_err(|_| bad())?;
            let d = d.trim().parse().map_err(|_| bad())?;
            return Fraction::new(n, d).map_err(|_| bad());
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if !int.trim_start_matches('0').is_empty() || frac.len() > 18 || frac.is_empty() {
            return Err(bad());
        }
        if !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let num: u64 = frac.parse().map_err(|_| bad())?;
        Fraction::new(num, 10u64.pow(frac.len() as u32)).map_err(|_| bad())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioMode {
    InDomain,
    CrossGenre,
}

/// Which genres train and which genre validates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioSpec {
    pub name: String,
    pub mode: ScenarioMode,
    pub train_genres: BTreeSet<Genre>,
    pub valid_genre: Genre,
    pub valid_fraction: Fraction,
    pub seed: u64,
}

impl ScenarioSpec {
    pub fn in_domain(genre: Genre, valid_fraction: Fraction, seed: u64) -> Self {
        Self {
            name: format!("{} (90-10)", genre.short()),
            mode: ScenarioMode::InDomain,
            train_genres: BTreeSet::from([genre.clone()]),
            valid_genre: genre,
            valid_fraction,
            seed,
        }
    }

    pub fn cross_genre(train: impl IntoIterator<Item = Genre>, valid: Genre, seed: u64) -> Self {
        let train_genres: BTreeSet<Genre> = train.into_iter().collect();
        let name = format!(
            "{} | {}",
            train_genres
                .iter()
                .map(Genre::short)
                .collect::<Vec<_>>()
                .join("+"),
            valid.short()
        );
        Self {
            name,
            mode: ScenarioMode::CrossGenre,
            train_genres,
            valid_genre: valid,
            valid_fraction: Fraction::one_tenth(),
            seed,
        }
    }

    /// The three in-domain and three cross-genre scenarios over News,
    /// Twitter and YouTube.
    pub fn standard_six(seed: u64) -> Vec<ScenarioSpec> {
        use Genre::*;
        let genres = [News, Twitter, YouTube];
        let mut out: Vec<ScenarioSpec> = genres
            .iter()
            .map(|g| ScenarioSpec::in_domain(g.clone(), Fraction::one_tenth(), seed))
            .collect();
        for held_out in &genres {
            let train = genres.iter().filter(|g| *g != held_out).cloned();
            out.push(ScenarioSpec::cross_genre(train, held_out.clone(), seed));
        }
        out
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        match self.mode {
            ScenarioMode::InDomain => {
                if self.train_genres.len() != 1 || !self.train_genres.contains(&self.valid_genre) {
                    return Err(CorpusError::InvalidScenario(format!(
                        "{}: in-domain scenario must train on its validation genre only",
                        self.name
                    )));
                }
            }
            ScenarioMode::CrossGenre => {
                if self.train_genres.is_empty() || self.train_genres.contains(&self.valid_genre) {
                    return Err(CorpusError::InvalidScenario(format!(
                        "{}: cross-genre scenario must not train on its validation genre",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Per-label validation quotas: floor of the proportional share, with the
/// remainder handed out by largest fractional part (ties go to `F`).
fn stratified_quotas(per_label: &[usize; 2], n_valid: usize) -> [usize; 2] {
    let total: usize = per_label.iter().sum();
    let mut quota = [0usize; 2];
    let mut rem = [0u128; 2];
    for i in 0..2 {
        let exact = n_valid as u128 * per_label[i] as u128;
        quota[i] = (exact / total as u128) as usize;
        rem[i] = exact % total as u128;
    }
    let mut left = n_valid - quota.iter().sum::<usize>();
    let mut order = [0usize, 1];
    order.sort_by(|&a, &b| rem[b].cmp(&rem[a]).then(a.cmp(&b)));
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        if quota[i] < per_label[i] {
            quota[i] += 1;
            left -= 1;
        }
    }
    quota
}

/// Splits labelled documents into train and validation parts.
///
/// The validation part has `ceil(valid_fraction * docs.len())` documents,
/// drawn per label by a seeded shuffle so that each label's share is within
/// one document of proportional. Both outputs keep input order.
pub fn split_in_domain(
    docs: &[Document],
    valid_fraction: Fraction,
    seed: u64,
) -> Result<(Vec<Document>, Vec<Document>), CorpusError> {
    if docs.is_empty() {
        return Err(CorpusError::EmptyInput);
    }
    let mut by_label: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, d) in docs.iter().enumerate() {
        match d.label {
            Some(Label::F) => by_label[0].push(i),
            Some(Label::M) => by_label[1].push(i),
            None => return Err(CorpusError::UnlabelledDocument(d.id.clone())),
        }
    }

    let n_valid = valid_fraction.ceil_of(docs.len());
    let quotas = stratified_quotas(&[by_label[0].len(), by_label[1].len()], n_valid);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_valid = vec![false; docs.len()];
    for (idx, quota) in by_label.iter_mut().zip(quotas) {
        idx.shuffle(&mut rng);
        for &i in &idx[..quota] {
            in_valid[i] = true;
        }
    }

    let (mut train, mut valid) = (Vec::new(), Vec::with_capacity(n_valid));
    for (d, v) in docs.iter().zip(in_valid) {
        if v {
            valid.push(d.clone());
        } else {
            train.push(d.clone());
        }
    }
    Ok((train, valid))
}

/// Materializes a scenario's train and validation sets. Unlabelled documents
/// never enter either side.
pub fn build_scenario(
    corpus: &Corpus,
    spec: &ScenarioSpec,
) -> Result<(Vec<Document>, Vec<Document>), CorpusError> {
    spec.validate()?;
    if corpus.is_empty() {
        return Err(CorpusError::EmptyInput);
    }
    for g in spec.train_genres.iter().chain([&spec.valid_genre]) {
        if corpus.labelled_in(g).next().is_none() {
            return Err(CorpusError::MissingGenre(g.clone()));
        }
    }
    match spec.mode {
        ScenarioMode::InDomain => {
            let docs: Vec<Document> = corpus.labelled_in(&spec.valid_genre).cloned().collect();
            split_in_domain(&docs, spec.valid_fraction, spec.seed)
        }
        ScenarioMode::CrossGenre => {
            let labelled = corpus.documents().iter().filter(|d| d.label.is_some());
            let train = labelled
                .clone()
                .filter(|d| spec.train_genres.contains(&d.genre))
                .cloned()
                .collect();
            let valid = labelled
                .filter(|d| d.genre == spec.valid_genre)
                .cloned()
                .collect();
            Ok((train, valid))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn docs(n: usize, genre: Genre) -> Vec<Document> {
        (0..n)
            .map(|i| {
                let label = if i % 3 == 0 { Label::M } else { Label::F };
                Document::new(format!("{genre}-{i}"), genre.clone(), Some(label), "tekst").unwrap()
            })
            .collect()
    }

    #[test]
    fn fraction_parsing() {
        assert_eq!("0.1".parse::<Fraction>().unwrap(), Fraction::new(1, 10).unwrap());
        assert_eq!("1/10".parse::<Fraction>().unwrap(), Fraction::new(1, 10).unwrap());
        assert_eq!(".25".parse::<Fraction>().unwrap(), Fraction::new(25, 100).unwrap());
        for bad in ["0", "1", "1.0", "0.", "-0.1", "2/1", "abc", "0/5"] {
            assert!(bad.parse::<Fraction>().is_err(), "{bad}");
        }
    }

    #[test]
    fn table_one_in_domain_sizes() {
        for (total, train, valid) in [(1832, 1648, 184), (20000, 18000, 2000), (14744, 13269, 1475)] {
            let (t, v) = split_in_domain(&docs(total, Genre::News), Fraction::one_tenth(), 7).unwrap();
            assert_eq!((t.len(), v.len()), (train, valid), "total {total}");
        }
    }

    #[test]
    fn unlabelled_and_empty_inputs_fail() {
        assert!(matches!(
            split_in_domain(&[], Fraction::one_tenth(), 0),
            Err(CorpusError::EmptyInput)
        ));
        let d = Document::new("u", Genre::News, None, "x").unwrap();
        assert!(matches!(
            split_in_domain(&[d], Fraction::one_tenth(), 0),
            Err(CorpusError::UnlabelledDocument(id)) if id == "u"
        ));
    }

    #[test]
    fn quotas_are_within_one_of_proportional() {
        assert_eq!(stratified_quotas(&[5, 5], 3), [2, 1]);
        assert_eq!(stratified_quotas(&[9, 1], 1), [1, 0]);
        assert_eq!(stratified_quotas(&[1, 0], 1), [1, 0]);
    }

    #[test]
    fn cross_genre_never_trains_on_valid_genre() {
        let mut all = docs(30, Genre::News);
        all.extend(docs(20, Genre::Twitter));
        all.extend(docs(10, Genre::YouTube));
        let corpus = Corpus::new(all, "t").unwrap();
        let spec = ScenarioSpec::cross_genre([Genre::News, Genre::Twitter], Genre::YouTube, 1);
        let (train, valid) = build_scenario(&corpus, &spec).unwrap();
        assert_eq!((train.len(), valid.len()), (50, 10));
        assert!(train.iter().all(|d| d.genre != Genre::YouTube));
    }

    #[test]
    fn missing_genre_is_reported() {
        let corpus = Corpus::new(docs(10, Genre::News), "t").unwrap();
        let spec = ScenarioSpec::cross_genre([Genre::News], Genre::Twitter, 1);
        assert!(matches!(
            build_scenario(&corpus, &spec),
            Err(CorpusError::MissingGenre(Genre::Twitter))
        ));
    }

    #[test]
    fn inconsistent_scenarios_are_rejected() {
        let mut spec = ScenarioSpec::cross_genre([Genre::News], Genre::Twitter, 1);
        spec.train_genres.insert(Genre::Twitter);
        assert!(spec.validate().is_err());
        let mut spec = ScenarioSpec::in_domain(Genre::News, Fraction::one_tenth(), 1);
        spec.train_genres.insert(Genre::Twitter);
        assert!(spec.validate().is_err());
    }

    #[test]
    fn standard_six_names() {
        let names: Vec<String> = ScenarioSpec::standard_six(0).into_iter().map(|s| s.name).collect();
        assert_eq!(
            names,
            ["N (90-10)", "TW (90-10)", "YT (90-10)", "TW+YT | N", "N+YT | TW", "N+TW | YT"]
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn split_partitions_input(n in 2usize..10_000, seed in any::<u64>(), pct in 1u64..99) {
            let input = docs(n, Genre::Twitter);
            let frac = Fraction::new(pct, 100).unwrap();
            let (train, valid) = split_in_domain(&input, frac, seed).unwrap();
            prop_assert_eq!(valid.len(), frac.ceil_of(n));
            prop_assert_eq!(train.len() + valid.len(), n);
            let t: HashSet<&str> = train.iter().map(|d| d.id.as_str()).collect();
            let v: HashSet<&str> = valid.iter().map(|d| d.id.as_str()).collect();
            prop_assert!(t.is_disjoint(&v));
            prop_assert_eq!(t.len() + v.len(), n);

            let females = input.iter().filter(|d| d.label == Some(Label::F)).count() as f64;
            let want = valid.len() as f64 * females / n as f64;
            let got = valid.iter().filter(|d| d.label == Some(Label::F)).count() as f64;
            prop_assert!((got - want).abs() <= 1.0);

            let again = split_in_domain(&input, frac, seed).unwrap();
            prop_assert_eq!(again.1, valid);
        }
    }
}
