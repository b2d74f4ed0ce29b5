//! Invariant suite: distortion plateau, submultiplicativity band, level-sum
//! band, antichain sums, both quantization recursions, chain rule, and DP
//! exactness against exhaustive search.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ifs::{antichain_threshold, distortion_report, verify_antichain, DistortionReport};
use crate::measure::invariant_atoms_mid;
use crate::quantizer::{
    detect_n0, optimal_quantizer_dp, recursion_check_lower, recursion_check_upper,
};
use crate::root::golden_section_min;
use crate::spectral::{closed_form_sigma, default_bracket, exponent, solve_sigma_spectral, Mesh};
use crate::{AtomicMeasure, Error, IfsModel, Result, Word};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub model: String,
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub r_values: Vec<f64>,
    pub distortion_depth: usize,
    pub mesh_size: usize,
    /// words of length up to this on each side of the band check
    pub band_depth: usize,
    pub level_depth: usize,
    pub measure_depth: usize,
    pub spectral_mesh: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            r_values: vec![1.0, 2.0],
            distortion_depth: 8,
            mesh_size: 33,
            band_depth: 3,
            level_depth: 12,
            measure_depth: 10,
            spectral_mesh: 1025,
        }
    }
}

/// Built-in models checked when none are supplied.
pub fn default_models() -> Vec<(String, IfsModel)> {
    let weighted = IfsModel::similitude(&[1.0 / 3.0, 1.0 / 3.0], &[0.0, 2.0 / 3.0], &[0.7, 0.3])
        .expect("weighted cantor is valid");
    let uneven = IfsModel::similitude(&[0.5, 0.25], &[0.0, 0.75], &[0.6, 0.4])
        .expect("uneven similitude is valid");
    vec![
        ("cantor".into(), IfsModel::cantor()),
        ("weighted_cantor".into(), weighted),
        ("binary_halves".into(), IfsModel::binary_halves()),
        ("uneven_similitude".into(), uneven),
        ("moebius_pair".into(), IfsModel::moebius_pair()),
    ]
}

fn sigma_for(model: &IfsModel, r: f64, spectral_mesh: usize) -> Result<f64> {
    match model.similitude_ratios() {
        Some(ratios) => closed_form_sigma(model.probs(), &ratios, r),
        None => {
            let mesh = Mesh::new(model.domain(), spectral_mesh)?;
            Ok(solve_sigma_spectral(model, &mesh, r, default_bracket(r), 1e-10)?.sigma)
        }
    }
}

struct Recorder<'a> {
    model: &'a str,
    out: Vec<CheckOutcome>,
}

impl Recorder<'_> {
    fn push(&mut self, check: impl Into<String>, passed: bool, detail: String) {
        self.out.push(CheckOutcome {
            model: self.model.to_string(),
            check: check.into(),
            passed,
            detail,
        });
    }
}

fn words_up_to(model: &IfsModel, depth: usize) -> Result<Vec<Word>> {
    let mut all = Vec::new();
    for n in 1..=depth {
        all.extend(model.enumerate_words(n)?);
    }
    Ok(all)
}

fn check_plateau(rec: &mut Recorder, report: &DistortionReport) {
    let half = report.per_depth.len() / 2;
    let early = report.per_depth[..half.max(1)]
        .iter()
        .map(|d| d.max_t_over_r)
        .fold(1.0, f64::max);
    let late = report.per_depth[half.max(1)..]
        .iter()
        .map(|d| d.max_t_over_r)
        .fold(1.0, f64::max);
    rec.push(
        "distortion_plateau",
        late <= early * crate::ifs::CONSTANT_SLACK,
        format!("max T/R early {early:.6}, late {late:.6}"),
    );
}

fn check_chain_rule(rec: &mut Recorder, model: &IfsModel, words: &[Word], mesh: &[f64]) {
    let mut worst = 0.0f64;
    for w in words {
        for t in words {
            let wt = w.concat(t);
            for &x in mesh {
                let direct = model.df_word(&wt, x);
                let split = model.df_word(w, model.apply_word(t, x)) * model.df_word(t, x);
                worst = worst.max((direct - split).abs() / direct.abs().max(f64::MIN_POSITIVE));
            }
        }
    }
    rec.push("chain_rule", worst <= 1e-12, format!("worst relative error {worst:e}"));

    // independent of the chain rule: centered chord quotients of the composed map
    let h = 1e-6;
    let mut worst_fd = 0.0f64;
    for w in words {
        for &x in mesh {
            let (a, b) = (
                (x - h).max(model.domain().lo),
                (x + h).min(model.domain().hi),
            );
            let fd = (model.apply_word(w, b) - model.apply_word(w, a)).abs() / (b - a);
            let df = model.df_word(w, x);
            worst_fd = worst_fd.max((fd - df).abs() / df);
        }
    }
    rec.push(
        "derivative_vs_difference_quotient",
        worst_fd <= 1e-4,
        format!("worst relative error {worst_fd:e}"),
    );
}

fn check_band(rec: &mut Recorder, model: &IfsModel, words: &[Word], mesh_size: usize, m: f64) -> Result<()> {
    let t = |w: &Word| model.word_bounds(w, mesh_size).map(|b| b.t);
    let ts = words.iter().map(t).collect::<Result<Vec<_>>>()?;
    let (mut lo_ratio, mut hi_ratio) = (f64::INFINITY, 0.0f64);
    for (w, tw) in words.iter().zip(&ts) {
        for (u, tu) in words.iter().zip(&ts) {
            let q = t(&w.concat(u))? / (tw * tu);
            lo_ratio = lo_ratio.min(q);
            hi_ratio = hi_ratio.max(q);
        }
    }
    rec.push(
        "submultiplicativity_band",
        lo_ratio >= 1.0 / m && hi_ratio <= m,
        format!("T_wu/(T_w T_u) in [{lo_ratio:.6}, {hi_ratio:.6}], M = {m:.6}"),
    );
    Ok(())
}

fn check_level_sums(rec: &mut Recorder, model: &IfsModel, cfg: &VerifyConfig, r: f64, s: f64, m: f64) -> Result<()> {
    let (lo, hi) = (m.powf(-r * s), m.powf(r * s));
    let mut range = (f64::INFINITY, 0.0f64);
    for n in 1..=cfg.level_depth {
        let table = model.level_table(n, cfg.mesh_size, crate::ifs::DEFAULT_WORD_CAP)?;
        let sum: f64 = table.iter().map(|(p, b)| (p * b.t.powf(r)).powf(s)).sum();
        range = (range.0.min(sum), range.1.max(sum));
    }
    rec.push(
        format!("level_sum_band r={r}"),
        range.0 >= lo && range.1 <= hi,
        format!(
            "sums in [{:.6}, {:.6}] for n <= {}, band [{lo:.6}, {hi:.6}]",
            range.0, range.1, cfg.level_depth
        ),
    );
    Ok(())
}

fn check_antichains(
    rec: &mut Recorder,
    model: &IfsModel,
    cfg: &VerifyConfig,
    r: f64,
    s: f64,
    c2: f64,
    m: f64,
) -> Result<()> {
    let upper = c2.powf(2.0 * r * s);
    let lower = m.powf(-6.0 * r * s);
    for cprime in [0.5, 0.2, 0.05, 0.01] {
        let lambda = antichain_threshold(model, r, s, cprime, cfg.mesh_size)?;
        let cert = verify_antichain(&lambda, model.probs());
        let (mut st, mut sr) = (0.0, 0.0);
        for w in &lambda {
            let b = model.word_bounds(w, cfg.mesh_size)?;
            let p = w.weight(model.probs());
            st += (p * b.t.powf(r)).powf(s);
            sr += (p * b.r.powf(r)).powf(s);
        }
        rec.push(
            format!("antichain_sums r={r} c'={cprime}"),
            cert.is_valid() && st <= upper && sr >= lower,
            format!(
                "{} words, sum T {st:.6} <= {upper:.6}, sum R {sr:.6} >= {lower:.6}",
                lambda.len()
            ),
        );
    }
    Ok(())
}

/// Balanced split of `n` over `k` cells, earlier cells taking the remainder.
fn balanced(n: usize, k: usize) -> Vec<usize> {
    (0..k).map(|i| n / k + usize::from(i < n % k)).collect()
}

/// Split of `n` proportional to `weights` by largest remainder, each cell at least 1.
fn proportional(n: usize, weights: &[f64]) -> Vec<usize> {
    let k = weights.len();
    let total: f64 = weights.iter().sum();
    let spare = n - k;
    let quotas: Vec<f64> = weights.iter().map(|w| w / total * spare as f64).collect();
    let mut alloc: Vec<usize> = quotas.iter().map(|q| 1 + q.floor() as usize).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| (quotas[b] - quotas[b].floor()).total_cmp(&(quotas[a] - quotas[a].floor())));
    let mut left = n - alloc.iter().sum::<usize>();
    for i in order {
        if left == 0 {
            break;
        }
        alloc[i] += 1;
        left -= 1;
    }
    alloc
}

fn check_recursions(
    rec: &mut Recorder,
    model: &IfsModel,
    cfg: &VerifyConfig,
    r: f64,
    s: f64,
    c2_estimate: f64,
    mu: &AtomicMeasure,
) -> Result<()> {
    let level_one: Vec<Word> = (0..model.len()).map(|i| Word::new(vec![i])).collect();
    let level_two = model.enumerate_words(2)?;
    for lambda in [&level_one, &level_two] {
        let weights: Vec<f64> = lambda
            .iter()
            .map(|w| {
                let t = model.word_bounds(w, cfg.mesh_size).map(|b| b.t)?;
                Ok((w.weight(model.probs()) * t.powf(r)).powf(s))
            })
            .collect::<Result<_>>()?;
        let k = lambda.len();
        let mut worst = f64::INFINITY;
        let mut all = true;
        let mut tried = 0;
        for n in [k, k + 2, 2 * k, 2 * k + 3] {
            let mut allocs = vec![balanced(n, k), proportional(n, &weights)];
            let mut skew = vec![1; k];
            skew[k - 1] = n - (k - 1);
            allocs.push(skew);
            for a in allocs {
                let rep = recursion_check_upper(model, mu, lambda, n, r, &a, c2_estimate, cfg.mesh_size)?;
                tried += 1;
                all &= rep.holds;
                worst = worst.min(rep.slack);
            }
        }
        rec.push(
            format!("upper_recursion r={r} |antichain|={k}"),
            all,
            format!("{tried} (n, allocation) pairs, smallest slack {worst:e}"),
        );
    }

    let n_max = 4 * level_one.len() + 8;
    match detect_n0(model, mu, &level_one, r, n_max)? {
        None => rec.push(
            format!("lower_recursion r={r}"),
            false,
            format!("no n0 found up to {n_max}"),
        ),
        Some(n0) => {
            let mut all = true;
            let mut worst = f64::INFINITY;
            for n in n0..n0 + 4 {
                let rep = recursion_check_lower(model, mu, &level_one, n, r, c2_estimate, cfg.mesh_size)?;
                all &= rep.applicable && rep.holds;
                worst = worst.min(rep.slack);
            }
            rec.push(
                format!("lower_recursion r={r}"),
                all,
                format!("n0 = {n0}, n in {n0}..{}, smallest slack {worst:e}", n0 + 3),
            );
        }
    }
    Ok(())
}

/// Runs every check on one model.
pub fn verify_model(name: &str, model: &IfsModel, cfg: &VerifyConfig) -> Result<Vec<CheckOutcome>> {
    model.validate()?;
    let mut rec = Recorder { model: name, out: Vec::new() };
    let report = distortion_report(model, cfg.distortion_depth, cfg.mesh_size)?;
    let (c2, m) = (report.c2_slack(), report.m_slack());
    check_plateau(&mut rec, &report);

    let words = words_up_to(model, cfg.band_depth)?;
    check_chain_rule(&mut rec, model, &words, &model.domain().mesh(cfg.mesh_size));
    check_band(&mut rec, model, &words, cfg.mesh_size, m)?;

    let mu = invariant_atoms_mid(model, cfg.measure_depth)?;
    for &r in &cfg.r_values {
        let sigma = sigma_for(model, r, cfg.spectral_mesh)?;
        let s = exponent(sigma, r);
        check_level_sums(&mut rec, model, cfg, r, s, m)?;
        check_antichains(&mut rec, model, cfg, r, s, c2, m)?;
        check_recursions(&mut rec, model, cfg, r, s, report.c2_estimate, &mu)?;
    }
    Ok(rec.out)
}

/// Small measures on which the DP is compared with exhaustive search.
pub fn small_measures() -> Vec<(String, AtomicMeasure)> {
    let mut out = Vec::new();
    for (name, model) in default_models() {
        let mu = invariant_atoms_mid(&model, 3).expect("depth-3 atoms fit the cap");
        out.push((format!("{name}_depth3"), mu));
    }
    out.push(("equal_steps_12".into(), AtomicMeasure::equal_steps(12)));
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let atoms: Vec<f64> = (0..12).map(|_| rng.gen::<f64>()).collect();
    let raw: Vec<f64> = (0..12).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let weights = raw.iter().map(|w| w / total).collect();
    out.push((
        "random_12".into(),
        AtomicMeasure::new(atoms, weights).expect("random measure is valid"),
    ));
    out
}

/// Cost of one cluster at its best center, found without any ordering
/// assumption on the cluster.
fn cluster_cost(points: &[(f64, f64)], r: f64) -> f64 {
    let cost = |a: f64| points.iter().map(|&(x, w)| w * (x - a).abs().powf(r)).sum::<f64>();
    if r == 2.0 {
        let mass: f64 = points.iter().map(|p| p.1).sum();
        let mean = points.iter().map(|&(x, w)| x * w).sum::<f64>() / mass;
        return cost(mean);
    }
    if r == 1.0 {
        // piecewise linear and convex: some atom is a minimizer
        return points.iter().map(|&(x, _)| cost(x)).fold(f64::INFINITY, f64::min);
    }
    let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= 0.0 {
        return 0.0;
    }
    golden_section_min(cost, lo, hi, 1e-13).1
}

/// `V_{n,r}` by enumerating every partition of the atoms into at most `n`
/// nonempty groups. Exponential; intended for a dozen atoms.
pub fn exhaustive_quantization(mu: &AtomicMeasure, n: usize, r: f64) -> Result<f64> {
    let m = mu.len();
    if m > 14 {
        return Err(Error::Resource(format!("{m} atoms is too many for exhaustive search")));
    }
    if n == 0 {
        return Err(Error::Model("n must be at least 1".into()));
    }
    let pts: Vec<(f64, f64)> = mu.iter().collect();
    let mut labels = vec![0usize; m];
    let mut best = f64::INFINITY;
    // restricted growth strings: labels[i] <= 1 + max(labels[..i])
    fn walk(i: usize, used: usize, n: usize, labels: &mut [usize], pts: &[(f64, f64)], r: f64, best: &mut f64) {
        if i == labels.len() {
            let total: f64 = (0..used)
                .map(|g| {
                    let group: Vec<(f64, f64)> = pts
                        .iter()
                        .zip(labels.iter())
                        .filter(|(_, &l)| l == g)
                        .map(|(p, _)| *p)
                        .collect();
                    cluster_cost(&group, r)
                })
                .sum();
            *best = best.min(total);
            return;
        }
        for g in 0..(used + 1).min(n) {
            labels[i] = g;
            walk(i + 1, used.max(g + 1), n, labels, pts, r, best);
        }
    }
    walk(0, 0, n, &mut labels, &pts, r, &mut best);
    Ok(best)
}

/// DP against exhaustive search on [`small_measures`] for `n ≤ 4`.
pub fn verify_dp_exhaustive(r_values: &[f64]) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for (name, mu) in small_measures() {
        for &r in r_values {
            let mut worst = 0.0f64;
            for n in 1..=4 {
                let dp = optimal_quantizer_dp(&mu, n, r)?.error;
                let ex = exhaustive_quantization(&mu, n, r)?;
                worst = worst.max((dp - ex).abs());
            }
            out.push(CheckOutcome {
                model: name.clone(),
                check: format!("dp_exhaustive r={r}"),
                passed: worst <= 1e-12,
                detail: format!("largest |DP - exhaustive| over n <= 4: {worst:e}"),
            });
        }
    }
    Ok(out)
}

/// Runs the per-model suite on each model, then the DP exactness check.
pub fn verify_suite(models: &[(String, IfsModel)], cfg: &VerifyConfig) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    for (name, model) in models {
        checks.extend(verify_model(name, model, cfg)?);
    }
    checks.extend(verify_dp_exhaustive(&cfg.r_values)?);
    Ok(VerifyReport { checks })
}
