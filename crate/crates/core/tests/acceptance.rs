//! End-to-end acceptance checks. Runs without the libtest harness so every
//! criterion prints one PASS/FAIL line even when all of them pass.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use abnormality::corpus::{split_corpus, Corpus, Label};
use abnormality::evaluate::{documents, grid_search, GridSpec};
use abnormality::nb::nb_fit;
use abnormality::persist::{load_model, save_model, Metadata, ModelBundle};
use abnormality::pipeline::{
    encode_tokens, tokenize_documents, ClassifierConfig, ClassifierModel, Pipeline,
};
use abnormality::sparse::{FeatureKind, FeatureMatrix, SparseVector};
use abnormality::svm::{kernel_eval, solve_dual, svm_fit_with_solution, KernelSpec, SolverConfig};
use abnormality::tokenize::tokenize;
use abnormality::vectorize::{FeatureConfig, FeatureExtractor};

use common::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(start: Instant, budget: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < budget, || {
        format!("took {took:.2?}, budget {budget:?}")
    })
}

// ---------------------------------------------------------------------------
// 1. naive Bayes against exact rational arithmetic

fn rational(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite")
}

fn pow(base: &BigRational, exp: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// `P(c) ∏_i θ_ci^{x_i}` for both classes, in exact arithmetic.
fn nb_products(
    counts: &[Vec<u32>],
    labels: &[Label],
    alpha: &BigRational,
    fit_prior: bool,
    x: &[u32],
) -> [BigRational; 2] {
    let n_features = x.len();
    let n_docs = BigInt::from(counts.len());
    let mut out = [BigRational::zero(), BigRational::zero()];
    for (c, label) in Label::ALL.iter().enumerate() {
        let rows: Vec<&Vec<u32>> = counts
            .iter()
            .zip(labels)
            .filter(|(_, l)| *l == label)
            .map(|(r, _)| r)
            .collect();
        let prior = if fit_prior {
            BigRational::new(BigInt::from(rows.len()), n_docs.clone())
        } else {
            BigRational::new(BigInt::one(), BigInt::from(2))
        };
        let class_total: u32 = rows.iter().flat_map(|r| r.iter()).sum();
        let denom =
            BigRational::from_integer(BigInt::from(class_total)) + alpha * BigInt::from(n_features);
        let mut p = prior;
        for (i, &xi) in x.iter().enumerate() {
            let nci: u32 = rows.iter().map(|r| r[i]).sum();
            let theta = (BigRational::from_integer(BigInt::from(nci)) + alpha) / &denom;
            p *= pow(&theta, xi);
        }
        out[c] = p;
    }
    out
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = Rng::new(1);
    let mut checked = 0usize;
    for corpus_no in 0..200 {
        let n_docs = 2 + rng.below(19);
        let n_features = 1 + rng.below(10);
        let alpha = if corpus_no % 2 == 0 { 0.5 } else { 1.0 };
        let fit_prior = corpus_no % 4 != 3;
        let counts: Vec<Vec<u32>> = (0..n_docs)
            .map(|_| {
                (0..n_features)
                    .map(|_| {
                        if rng.unit() < 0.4 {
                            0
                        } else {
                            rng.below(6) as u32
                        }
                    })
                    .collect()
            })
            .collect();
        let labels: Vec<Label> = (0..n_docs)
            .map(|d| match d {
                0 => Label::Normal,
                1 => Label::Abnormal,
                _ if rng.unit() < 0.5 => Label::Abnormal,
                _ => Label::Normal,
            })
            .collect();
        let rows: Vec<SparseVector> = counts
            .iter()
            .map(|r| {
                SparseVector::from_dense(&r.iter().map(|&v| f64::from(v)).collect::<Vec<_>>())
                    .unwrap()
            })
            .collect();
        let matrix =
            FeatureMatrix::new(rows.clone(), labels.clone(), FeatureKind::Count, n_features)
                .unwrap();
        let model = nb_fit(&matrix, alpha, fit_prior).map_err(|e| e.to_string())?;
        let exact_alpha = rational(alpha);
        for (d, x) in counts.iter().enumerate() {
            let [p0, p1] = nb_products(&counts, &labels, &exact_alpha, fit_prior, x);
            let expected = if p1 > p0 {
                Label::Abnormal
            } else {
                Label::Normal
            };
            let got = model.predict(&rows[d]).map_err(|e| e.to_string())?;
            ensure(got == expected, || {
                format!("corpus {corpus_no} doc {d}: predicted {got}, exact {expected}")
            })?;
            let scores = model.log_posterior(&rows[d]).map_err(|e| e.to_string())?;
            for (s, p) in scores.iter().zip([&p0, &p1]) {
                let reference = p.to_f64().expect("representable").ln();
                ensure((s - reference).abs() <= 1e-9, || {
                    format!("corpus {corpus_no} doc {d}: log score {s} vs exact {reference}")
                })?;
            }
            checked += 1;
        }
    }
    within_budget(start, Duration::from_secs(10))?;
    Ok(format!(
        "{checked} documents over 200 corpora agree, {:.2?}",
        start.elapsed()
    ))
}

// ---------------------------------------------------------------------------
// 2. SVM two-point analytic solution

fn criterion_2() -> Outcome {
    let rows = vec![
        SparseVector::from_dense(&[-1.0]).unwrap(),
        SparseVector::from_dense(&[1.0]).unwrap(),
    ];
    let matrix = FeatureMatrix::new(
        rows,
        vec![Label::Normal, Label::Abnormal],
        FeatureKind::Count,
        1,
    )
    .unwrap();
    let (model, solution) = svm_fit_with_solution(
        &matrix,
        100.0,
        &KernelSpec::linear(),
        &SolverConfig::default(),
    )
    .map_err(|e| e.to_string())?;
    for a in &solution.alpha {
        ensure((a - 0.5).abs() <= 1e-6, || {
            format!("alpha {:?}", solution.alpha)
        })?;
    }
    ensure(solution.bias.abs() <= 1e-6, || {
        format!("bias {}", solution.bias)
    })?;
    for k in 0..20 {
        let x = -3.0 + 6.0 * k as f64 / 19.0;
        let f = model
            .decision(&SparseVector::from_dense(&[x]).unwrap())
            .map_err(|e| e.to_string())?;
        ensure((f - x).abs() <= 1e-6, || format!("f({x}) = {f}"))?;
    }
    Ok(format!(
        "alpha = {:?}, b = {:e}, f(x) = x at 20 probes",
        solution.alpha, solution.bias
    ))
}

// ---------------------------------------------------------------------------
// 3. SVM dual against brute-force search over the feasible region

fn kernel_ref(spec: &KernelSpec, x: &[f64], z: &[f64]) -> f64 {
    let dot: f64 = x.iter().zip(z).map(|(a, b)| a * b).sum();
    match spec.kind {
        abnormality::svm::KernelKind::Linear => dot,
        abnormality::svm::KernelKind::Rbf => {
            let d2: f64 = x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
            (-spec.gamma * d2).exp()
        }
        abnormality::svm::KernelKind::Polynomial => (spec.gamma * dot + spec.coef0).powi(2),
        other => panic!("no reference for {other:?}"),
    }
}

/// `Σα − ½ αᵀQα`, the quantity the dual maximizes.
fn dual_value(q: &[Vec<f64>], alpha: &[f64]) -> f64 {
    let mut quad = 0.0;
    for (i, ai) in alpha.iter().enumerate() {
        for (j, aj) in alpha.iter().enumerate() {
            quad += ai * aj * q[i][j];
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

/// Completes `free` (the first n−1 multipliers) with the last one implied by
/// `Σ y_i α_i = 0`, or `None` if that leaves the box.
fn complete(free: &[f64], y: &[f64], c: f64) -> Option<Vec<f64>> {
    let n = y.len();
    let s: f64 = free.iter().zip(y).map(|(a, t)| a * t).sum();
    let mut last = -y[n - 1] * s;
    if last < 0.0 && last > -1e-12 {
        last = 0.0;
    }
    if last > c && last < c + 1e-12 {
        last = c;
    }
    if !(0.0..=c).contains(&last) {
        return None;
    }
    let mut alpha = free.to_vec();
    alpha.push(last);
    Some(alpha)
}

/// Evaluates every point of a `k^(n−1)` lattice centred on `center` with
/// spacing `h`, clipped to the box.
fn best_on_lattice(
    q: &[Vec<f64>],
    y: &[f64],
    c: f64,
    center: &[f64],
    h: f64,
    half: i64,
) -> Option<(f64, Vec<f64>)> {
    let m = center.len();
    let side = (2 * half + 1) as usize;
    let total = side.pow(m as u32);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut point = vec![0.0; m];
    for code in 0..total {
        let mut rest = code;
        for (d, p) in point.iter_mut().enumerate() {
            let offset = (rest % side) as i64 - half;
            rest /= side;
            *p = (center[d] + offset as f64 * h).clamp(0.0, c);
        }
        if let Some(alpha) = complete(&point, y, c) {
            let v = dual_value(q, &alpha);
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, point.clone()));
            }
        }
    }
    best
}

/// Dense lattice over the whole box, then pattern-search refinement that
/// recentres on the best point and halves the step once it stops moving.
fn brute_force_dual(q: &[Vec<f64>], y: &[f64], c: f64) -> f64 {
    let m = y.len() - 1;
    let coarse_half = if m >= 5 { 4 } else { 6 };
    let mut h = c / (2 * coarse_half) as f64;
    let center = vec![c / 2.0; m];
    let (mut best, mut at) =
        best_on_lattice(q, y, c, &center, h, coarse_half).expect("α = 0 is feasible");
    for _ in 0..600 {
        if h < 1e-9 * c {
            break;
        }
        let (v, p) = best_on_lattice(q, y, c, &at, h, 2).expect("centre is feasible");
        if v > best + 1e-15 {
            best = v;
            at = p;
        } else {
            h *= 0.5;
        }
    }
    best
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = Rng::new(3);
    let mut worst_gap = 0.0f64;
    let mut worst_kkt = 0.0f64;
    for problem in 0..50 {
        let n = 2 + rng.below(5);
        let points: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.range(-2.0, 2.0), rng.range(-2.0, 2.0)])
            .collect();
        let y: Vec<f64> = (0..n)
            .map(|i| match i {
                0 => -1.0,
                1 => 1.0,
                _ if rng.unit() < 0.5 => 1.0,
                _ => -1.0,
            })
            .collect();
        let c = [0.1, 1.0, 10.0][problem % 3];
        let kernel = match problem % 5 {
            0 | 1 => KernelSpec::linear(),
            2 | 3 => KernelSpec::rbf(rng.range(0.2, 2.0)),
            _ => KernelSpec::polynomial(rng.range(0.2, 1.0), 1.0),
        };
        let rows: Vec<SparseVector> = points
            .iter()
            .map(|p| SparseVector::from_dense(p).unwrap())
            .collect();
        let solution = solve_dual(&rows, &y, c, &kernel, &SolverConfig::default())
            .map_err(|e| e.to_string())?;
        let q: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| y[i] * y[j] * kernel_ref(&kernel, &points[i], &points[j]))
                    .collect()
            })
            .collect();
        let solver_value = dual_value(&q, &solution.alpha);
        ensure(
            (solver_value + solution.objective).abs() <= 1e-9 * (1.0 + solver_value.abs()),
            || {
                format!(
                    "problem {problem}: reported objective {} vs recomputed {}",
                    solution.objective, -solver_value
                )
            },
        )?;
        let brute = brute_force_dual(&q, &y, c);
        let gap = (solver_value - brute).abs();
        worst_gap = worst_gap.max(gap);
        worst_kkt = worst_kkt.max(solution.kkt.max_residual);
        ensure(gap <= 1e-2, || {
            format!("problem {problem} (n={n}, C={c}, {kernel:?}): solver {solver_value}, brute force {brute}")
        })?;
        ensure(solution.kkt.max_residual <= 1e-3, || {
            format!(
                "problem {problem}: KKT residual {}",
                solution.kkt.max_residual
            )
        })?;
    }
    within_budget(start, Duration::from_secs(60))?;
    Ok(format!(
        "50 problems, max |objective gap| {worst_gap:.2e}, max KKT residual {worst_kkt:.2e}, {:.2?}",
        start.elapsed()
    ))
}

// ---------------------------------------------------------------------------
// 4. kernel identities

fn random_sparse(rng: &mut Rng, dim: usize, integer: bool) -> (SparseVector, Vec<f64>) {
    let dense: Vec<f64> = (0..dim)
        .map(|_| {
            if rng.unit() < 0.4 {
                0.0
            } else if integer {
                rng.below(21) as f64 - 10.0
            } else {
                rng.range(-3.0, 3.0)
            }
        })
        .collect();
    (SparseVector::from_dense(&dense).unwrap(), dense)
}

fn criterion_4() -> Outcome {
    let mut rng = Rng::new(4);
    let kernels = [
        KernelSpec::linear(),
        KernelSpec::polynomial(0.5, 1.0),
        KernelSpec::rbf(0.7),
        KernelSpec::sigmoid(0.1),
        KernelSpec::sigmoid_coef0(0.1, -0.5),
    ];
    let mut max_asym = 0.0f64;
    for spec in &kernels {
        for _ in 0..1000 {
            let dim = 1 + rng.below(12);
            let (x, _) = random_sparse(&mut rng, dim, false);
            let (z, _) = random_sparse(&mut rng, dim, false);
            let kxz = kernel_eval(spec, &x, &z).map_err(|e| e.to_string())?;
            let kzx = kernel_eval(spec, &z, &x).map_err(|e| e.to_string())?;
            max_asym = max_asym.max((kxz - kzx).abs());
            ensure((kxz - kzx).abs() <= 1e-12, || {
                format!("{spec:?}: K(x,z)={kxz}, K(z,x)={kzx}")
            })?;
        }
    }
    for _ in 0..1000 {
        let dim = 1 + rng.below(12);
        let (x, _) = random_sparse(&mut rng, dim, false);
        let k = kernel_eval(&KernelSpec::rbf(rng.range(0.01, 10.0)), &x, &x)
            .map_err(|e| e.to_string())?;
        ensure(k == 1.0, || format!("RBF self-similarity {k}"))?;
    }
    for _ in 0..1000 {
        let dim = 1 + rng.below(12);
        let (x, xd) = random_sparse(&mut rng, dim, true);
        let (z, zd) = random_sparse(&mut rng, dim, true);
        let exact: i64 = xd.iter().zip(&zd).map(|(a, b)| *a as i64 * *b as i64).sum();
        let k = kernel_eval(&KernelSpec::linear(), &x, &z).map_err(|e| e.to_string())?;
        ensure(k == exact as f64, || {
            format!("linear {k} vs integer dot {exact}")
        })?;
    }
    Ok(format!(
        "5 kernels × 1000 pairs symmetric (max {max_asym:.1e}), RBF K(x,x)=1, linear exact"
    ))
}

// ---------------------------------------------------------------------------
// 5. TF-IDF against the hand-computed fixture

#[derive(serde::Deserialize)]
struct TfidfFixture {
    texts: Vec<String>,
    tokens: Vec<Vec<String>>,
    vocabulary: Vec<String>,
    doc_freq: Vec<usize>,
    idf: Vec<f64>,
    tfidf: Vec<Vec<f64>>,
}

fn criterion_5() -> Outcome {
    let fixture: TfidfFixture = serde_json::from_str(include_str!("fixtures/tfidf_5doc.json"))
        .map_err(|e| e.to_string())?;
    let tokens: Vec<_> = fixture
        .texts
        .iter()
        .map(|t| tokenize(&abnormality::corpus::clean_text(t)))
        .collect();
    for (got, want) in tokens.iter().zip(&fixture.tokens) {
        ensure(&got[..] == want.as_slice(), || {
            format!("tokens {got:?} vs {want:?}")
        })?;
    }
    let extractor = FeatureExtractor::fit(&tokens, &FeatureConfig::new(FeatureKind::Tfidf))
        .map_err(|e| e.to_string())?;
    ensure(
        extractor.vocabulary().terms() == fixture.vocabulary.as_slice(),
        || format!("vocabulary {:?}", extractor.vocabulary().terms()),
    )?;
    ensure(
        extractor.vocabulary().doc_freq() == fixture.doc_freq.as_slice(),
        || "doc_freq differs".into(),
    )?;
    let stats = extractor.tfidf_stats().expect("tfidf extractor");
    for (i, (got, want)) in stats.idf.iter().zip(&fixture.idf).enumerate() {
        ensure((got - want).abs() <= 1e-9, || {
            format!("idf[{i}] {got} vs {want}")
        })?;
    }
    let mut entries = 0;
    for (d, (doc, want_row)) in tokens.iter().zip(&fixture.tfidf).enumerate() {
        let row = extractor.transform(doc).to_dense();
        ensure(row.len() == want_row.len(), || {
            format!("row {d} has {} columns", row.len())
        })?;
        for (i, (got, want)) in row.iter().zip(want_row).enumerate() {
            ensure((got - want).abs() <= 1e-9, || {
                format!("tfidf[{d}][{i}] {got} vs {want}")
            })?;
            entries += 1;
        }
    }
    Ok(format!("{entries} matrix entries within 1e-9"))
}

// ---------------------------------------------------------------------------
// 6. synthetic corpus through the default grid

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let corpus = common::synthetic_corpus(2000, 2019);
    let abnormal = corpus.count(Label::Abnormal);
    ensure(abnormal == 800, || format!("{abnormal} abnormal sentences"))?;
    let split = split_corpus(&corpus, 0.7, 42).map_err(|e| e.to_string())?;
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let result =
        grid_search(&corpus, &split, &GridSpec::default(), jobs).map_err(|e| e.to_string())?;
    let csv = result.to_csv().map_err(|e| e.to_string())?;
    for combo in ["count,nb,", "count,svm,", "tfidf,nb,", "tfidf,svm,"] {
        ensure(csv.lines().any(|l| l.starts_with(combo)), || {
            format!("CSV lacks {combo} rows")
        })?;
    }
    let best = result.best_row().ok_or("no successful cell")?;
    let report = best.outcome.as_ref().map_err(Clone::clone)?;
    ensure(report.accuracy >= 0.85, || {
        format!("best accuracy {}", report.accuracy)
    })?;
    within_budget(start, Duration::from_secs(120))?;
    Ok(format!(
        "best cell {} accuracy {:.4} f1 {:.4} over {} cells, {:.2?}",
        best.csv_fields()[..6].join(","),
        report.accuracy,
        report.f1,
        result.rows.len(),
        start.elapsed()
    ))
}

// ---------------------------------------------------------------------------
// 7. byte-identical CLI outputs

fn run_cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_abnormality"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr))
    })
}

fn criterion_7() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let data = dir.path().join("data.tsv");
    std::fs::write(&data, common::synthetic_tsv(400, 7)).map_err(|e| e.to_string())?;
    let data = data.to_str().unwrap();
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let read = |name: &str| std::fs::read(dir.path().join(name)).map_err(|e| e.to_string());

    for name in ["svm_a.json", "svm_b.json"] {
        run_cli(&["train", "--input", data, "--out", &path(name)])?;
    }
    for name in ["nb_a.json", "nb_b.json"] {
        run_cli(&[
            "train",
            "--input",
            data,
            "--classifier",
            "nb",
            "--features",
            "count",
            "--out",
            &path(name),
        ])?;
    }
    for name in ["grid_a.csv", "grid_b.csv"] {
        run_cli(&[
            "grid-search",
            "--input",
            data,
            "--grid-c",
            "1,10",
            "--grid-gamma",
            "0.1,1",
            "--jobs",
            "2",
            "--out",
            &path(name),
        ])?;
    }
    ensure(read("svm_a.json")? == read("svm_b.json")?, || {
        "SVM model files differ".into()
    })?;
    ensure(read("nb_a.json")? == read("nb_b.json")?, || {
        "NB model files differ".into()
    })?;
    ensure(read("grid_a.csv")? == read("grid_b.csv")?, || {
        "grid CSV files differ".into()
    })?;
    Ok(format!(
        "train (svm, nb) and grid-search repeat byte for byte ({} + {} model bytes, {} CSV bytes)",
        read("svm_a.json")?.len(),
        read("nb_a.json")?.len(),
        read("grid_a.csv")?.len()
    ))
}

// ---------------------------------------------------------------------------
// 8. no leakage from the test side

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

struct Fitted {
    terms: Vec<String>,
    doc_freq: Vec<usize>,
    idf: Vec<u64>,
    theta: Vec<Vec<u64>>,
    alpha: Vec<u64>,
}

fn fit_all(corpus: &Corpus, train_ids: &[usize]) -> Result<Fitted, String> {
    let train = documents(corpus, train_ids).map_err(|e| e.to_string())?;
    let tokens = tokenize_documents(train.iter().copied());
    let labels: Vec<Label> = train.iter().map(|d| d.label).collect();
    let extractor = FeatureExtractor::fit(&tokens, &FeatureConfig::new(FeatureKind::Tfidf))
        .map_err(|e| e.to_string())?;
    let matrix = encode_tokens(&extractor, &tokens, labels).map_err(|e| e.to_string())?;
    let nb = nb_fit(&matrix, 1.0, true).map_err(|e| e.to_string())?;
    let (_, solution) = svm_fit_with_solution(
        &matrix,
        1.0,
        &KernelSpec::rbf(1.0),
        &SolverConfig::default(),
    )
    .map_err(|e| e.to_string())?;
    Ok(Fitted {
        terms: extractor.vocabulary().terms().to_vec(),
        doc_freq: extractor.vocabulary().doc_freq().to_vec(),
        idf: bits(&extractor.tfidf_stats().unwrap().idf),
        theta: nb.feature_log_prob.iter().map(|r| bits(r)).collect(),
        alpha: bits(&solution.alpha),
    })
}

fn criterion_8() -> Outcome {
    let corpus = common::synthetic_corpus(300, 8);
    let split = split_corpus(&corpus, 0.7, 42).map_err(|e| e.to_string())?;
    let mut mutated = corpus.clone();
    let mut rng = Rng::new(88);
    for &id in &split.test_ids {
        let noise = format!(
            "{} অজানা{} নতুনশব্দ",
            common::sentence(&mut rng, Label::Abnormal),
            id
        );
        mutated = mutated.with_text_replaced(id, &noise);
    }
    ensure(mutated != corpus, || "mutation had no effect".into())?;
    let a = fit_all(&corpus, &split.train_ids)?;
    let b = fit_all(&mutated, &split.train_ids)?;
    ensure(a.terms == b.terms && a.doc_freq == b.doc_freq, || {
        "vocabulary changed".into()
    })?;
    ensure(a.idf == b.idf, || "IDF changed".into())?;
    ensure(a.theta == b.theta, || "NB θ changed".into())?;
    ensure(a.alpha == b.alpha, || "SVM α changed".into())?;
    Ok(format!(
        "{} test sentences rewritten; vocabulary ({} terms), IDF, θ and α bit-identical",
        split.test_ids.len(),
        a.terms.len()
    ))
}

// ---------------------------------------------------------------------------
// 9. persistence round-trip

fn criterion_9() -> Outcome {
    let corpus = common::synthetic_corpus(300, 9);
    let split = split_corpus(&corpus, 0.7, 42).map_err(|e| e.to_string())?;
    let train = documents(&corpus, &split.train_ids).map_err(|e| e.to_string())?;
    let probes = common::probe_sentences(50, 99);
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let configs = [
        (
            FeatureKind::Count,
            ClassifierConfig::Nb {
                alpha: 1.0,
                fit_prior: true,
            },
        ),
        (
            FeatureKind::Tfidf,
            ClassifierConfig::Svm {
                c: 1.0,
                kernel: KernelSpec::rbf(1.0),
                solver: SolverConfig::default(),
            },
        ),
    ];
    for (k, (kind, classifier)) in configs.iter().enumerate() {
        let features = FeatureConfig::new(*kind);
        let pipeline = Pipeline::fit(&train, &features, classifier).map_err(|e| e.to_string())?;
        let metadata = Metadata {
            trained_at_unix: None,
            corpus_fingerprint: corpus.fingerprint(),
            seed: 42,
            train_fraction: 0.7,
            stratified: false,
            n_train: train.len(),
            features,
            hyperparameters: *classifier,
        };
        let path = dir.path().join(format!("model{k}.json"));
        let bundle = ModelBundle::new(&pipeline, metadata);
        save_model(&bundle, &path).map_err(|e| e.to_string())?;
        let loaded_bundle = load_model(&path).map_err(|e| e.to_string())?;
        ensure(loaded_bundle == bundle, || {
            "bundle differs after load".into()
        })?;
        let loaded = loaded_bundle.pipeline().map_err(|e| e.to_string())?;
        for probe in &probes {
            let (x, y) = (pipeline.encode(probe), loaded.encode(probe));
            ensure(x == y, || format!("encoding of {probe:?} differs"))?;
            let (before, after) = match (&pipeline.classifier, &loaded.classifier) {
                (ClassifierModel::Nb(m0), ClassifierModel::Nb(m1)) => (
                    bits(&m0.log_posterior(&x).map_err(|e| e.to_string())?),
                    bits(&m1.log_posterior(&y).map_err(|e| e.to_string())?),
                ),
                (ClassifierModel::Svm(m0), ClassifierModel::Svm(m1)) => (
                    bits(&[m0.decision(&x).map_err(|e| e.to_string())?]),
                    bits(&[m1.decision(&y).map_err(|e| e.to_string())?]),
                ),
                _ => return Err("classifier kind changed".into()),
            };
            ensure(before == after, || format!("score of {probe:?} differs"))?;
        }
    }
    Ok(format!(
        "NB log-posteriors and SVM decisions bit-identical on {} probes",
        probes.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("naive Bayes matches exact rational evaluation", criterion_1),
        ("two-point SVM analytic solution", criterion_2),
        ("SVM dual matches brute-force optimum", criterion_3),
        ("kernel identities", criterion_4),
        ("TF-IDF matches hand-computed table", criterion_5),
        (
            "synthetic corpus reaches 0.85 on the default grid",
            criterion_6,
        ),
        ("train and grid-search are deterministic", criterion_7),
        ("test side never reaches fitted parameters", criterion_8),
        ("model persistence round-trip", criterion_9),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("[PASS] criterion {}: {name}: {detail}", n + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] criterion {}: {name}: {why}", n + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
