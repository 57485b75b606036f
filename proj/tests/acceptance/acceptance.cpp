// Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion and exits
// non-zero if any criterion fails. Pass criterion numbers as arguments to run
// a subset, e.g. `leiad_acceptance 1 7 9`.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "leiad/active.hpp"
#include "leiad/config.hpp"
#include "leiad/labelmodel.hpp"
#include "leiad/lfgen.hpp"
#include "leiad/metrics.hpp"
#include "leiad/pipeline.hpp"
#include "leiad/random.hpp"
#include "leiad/synthetic.hpp"
#include "leiad/uad.hpp"

using namespace leiad;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    enum Kind { pass, fail, skip } kind;
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string join(const std::vector<double>& v) {
    std::string out;
    for (double x : v) out += (out.empty() ? "" : " ") + fmt("%.3f", x);
    return out;
}

// ---------------------------------------------------------------- 1: formulas

double entropy_oracle(double p) {
    double h = 0.0;
    if (p > 0.0) h -= p * std::log(p);
    if (p < 1.0) h -= (1.0 - p) * std::log(1.0 - p);
    return h;
}

Outcome formulas() {
    const auto t0 = Clock::now();
    constexpr std::size_t n = 1000, lfs = 8, dims = 16, labeled_count = 30, detectors = 5;
    Rng rng(20240101);

    VoteMatrix votes(n);
    for (std::size_t j = 0; j < lfs; ++j) {
        std::vector<Vote> col(n);
        for (auto& v : col) v = vote_from_int(static_cast<int>(rng.index(3)) - 1);
        votes.add_column("lf" + std::to_string(j), std::move(col));
    }
    std::vector<double> probs(n), rows(n * dims);
    for (auto& p : probs) p = rng.uniform();
    probs[0] = 0.0;
    probs[1] = 1.0;
    for (auto& x : rows) x = rng.uniform(-1.0, 1.0);
    const auto rep = representation_from_embedding(rows, dims);
    LabeledSet labeled(n);
    while (labeled.size() < labeled_count) labeled.set(rng.index(n), static_cast<int>(rng.index(2)));
    std::vector<std::vector<double>> det(detectors, std::vector<double>(n));
    for (auto& d : det)
        for (auto& x : d) x = rng.uniform();

    const QueryWeights w{0.5, 0.5, 1.0, 0.2};
    const auto c = compute_components(votes, probs, rep, labeled, det);

    double worst = 0.0;
    auto check = [&](double got, double want) { worst = std::max(worst, std::abs(got - want)); };
    for (std::size_t i = 0; i < n; ++i) {
        int voting = 0, anomalous = 0;
        for (std::size_t j = 0; j < lfs; ++j) {
            const int v = to_int(votes.at(i, j));
            voting += v != -1;
            anomalous += v == 1;
        }
        const double a = voting ? entropy_oracle(static_cast<double>(anomalous) / voting) : 0.0;
        const double h = std::log(static_cast<double>(lfs) - voting + 1.0);
        const double u = entropy_oracle(probs[i]);

        // Cosine similarity written out from the raw rows.
        double sim = 0.0;
        for (auto l : labeled.points()) {
            double dot = 0.0, ni = 0.0, nl = 0.0;
            for (std::size_t k = 0; k < dims; ++k) {
                dot += rows[i * dims + k] * rows[l * dims + k];
                ni += rows[i * dims + k] * rows[i * dims + k];
                nl += rows[l * dims + k] * rows[l * dims + k];
            }
            sim += dot / std::sqrt(ni * nl);
        }
        const double d = 1.0 - sim / static_cast<double>(labeled_count);
        double p = 0.0;
        for (const auto& s : det) p += s[i];
        p /= detectors;
        const double q = a + 0.5 * h + 0.5 * u + 1.0 * d + 0.2 * p;

        std::vector<Vote> row = votes.row(i);
        check(agreement_score(row), a);
        check(c.agreement[i], a);
        check(abstention_score(row, lfs), h);
        check(c.abstention[i], h);
        check(uncertainty_score(probs[i]), u);
        check(c.uncertainty[i], u);
        check(c.diversity[i], d);
        std::vector<double> per_point;
        for (const auto& s : det) per_point.push_back(s[i]);
        check(anomaly_probability(per_point), p);
        check(c.anomaly_prob[i], p);
        check(hybrid_score(a, h, u, d, p, w), q);
        check(c.q(i, w), q);
    }
    const double elapsed = seconds_since(t0);
    const bool ok = worst <= 1e-9 && elapsed < 1.0;
    return {ok ? Outcome::pass : Outcome::fail,
            fmt("max |error| %.2e over %zu points, %.3f s", worst, n, elapsed)};
}

// ------------------------------------------------------- 2: label model vs MV

Outcome label_model_vs_majority() {
    const auto t0 = Clock::now();
    const std::vector<double> acc = {0.9, 0.7, 0.55};
    constexpr std::size_t n = 10000;
    constexpr double prior = 0.1, abstain = 0.2;
    int auc_wins = 0, ordered = 0;
    std::vector<double> lm_aucs, mv_aucs;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(1000 + seed);
        std::vector<int> truth(n);
        for (auto& y : truth) y = rng.bernoulli(prior) ? 1 : 0;
        VoteMatrix m(n);
        for (std::size_t j = 0; j < acc.size(); ++j) {
            std::vector<Vote> col(n);
            for (std::size_t i = 0; i < n; ++i) {
                if (rng.bernoulli(abstain)) {
                    col[i] = Vote::abstain;
                } else {
                    const int v = rng.bernoulli(acc[j]) ? truth[i] : 1 - truth[i];
                    col[i] = v ? Vote::anomaly : Vote::normal;
                }
            }
            m.add_column("lf" + std::to_string(j), std::move(col));
        }
        LabelModelConfig cfg;
        cfg.class_prior = prior;
        const auto params = fit_generative(m, cfg, seed);
        const double lm = roc_auc(posterior(params, m), truth);
        const double mv = roc_auc(majority_vote(m, prior), truth);
        lm_aucs.push_back(lm);
        mv_aucs.push_back(mv);
        auc_wins += lm >= mv;
        ordered += params.weights[0] > params.weights[1] && params.weights[1] > params.weights[2];
    }
    const double elapsed = seconds_since(t0);
    const bool ok = auc_wins >= 8 && ordered >= 8 && elapsed < 30.0;
    return {ok ? Outcome::pass : Outcome::fail,
            fmt("AUC >= MV in %d/10 (median %.4f vs %.4f), weight order in %d/10, %.1f s", auc_wins,
                median(lm_aucs), median(mv_aucs), ordered, elapsed)};
}

// ------------------------------------------------- 3-6, 10: benchmark runs

struct SeedRuns {
    std::vector<Metrics> hybrid, random, no_warmup, no_lfgen;
    std::vector<double> uad_test_ap;
    std::size_t generated_lfs = 0, singleton_lfs = 0;  // hybrid LFs of iterations 1-10
};

std::vector<double> ap_of(const std::vector<Metrics>& curve) {
    std::vector<double> out;
    for (const auto& m : curve) out.push_back(m.average_precision);
    return out;
}

class Benchmark {
public:
    static constexpr std::uint64_t kFirstSeed = 1;
    static constexpr int kSeeds = 10;

    const std::map<std::uint64_t, SeedRuns>& runs() {
        if (runs_.empty()) compute();
        return runs_;
    }
    double seconds() const { return seconds_; }
    // Per-strategy wall time summed over seeds, including the shared preparation
    // amortised evenly across the strategies that use it.
    const std::map<std::string, double>& strategy_seconds() const { return strategy_seconds_; }

private:
    void compute() {
        const auto t0 = Clock::now();
        const auto dataset = generate_synthetic(SyntheticOptions{});
        const LeiadConfig config;
        for (std::uint64_t seed = kFirstSeed; seed < kFirstSeed + kSeeds; ++seed) {
            auto t = Clock::now();
            const auto data = prepare_data(dataset, config, seed);
            const double prep = seconds_since(t) / 4.0;
            SeedRuns r;
            r.uad_test_ap = data->uad_test_ap();
            auto run = [&](const char* name, int iterations, Strategy s) {
                const auto ts = Clock::now();
                auto result = simulate(data, config, iterations, seed, s);
                strategy_seconds_[name] += seconds_since(ts) + prep;
                return result;
            };
            const auto hybrid = run("hybrid", 20, Strategy::hybrid);
            r.hybrid = hybrid.curve;
            for (const auto& lf : hybrid.generated_lfs)
                if (lf.created_at_iteration <= 10) {
                    ++r.generated_lfs;
                    r.singleton_lfs += lf.members.size() == 1;
                }
            r.random = run("random", 20, Strategy::random).curve;
            r.no_warmup = run("no_warmup", 5, Strategy::no_warmup).curve;
            r.no_lfgen = run("no_lfgen", 10, Strategy::no_lfgen).curve;
            std::fprintf(stderr, "  seed %llu: hybrid %s | random@20 %.3f | best UAD %.3f (%.0f s)\n",
                         static_cast<unsigned long long>(seed), join(ap_of(r.hybrid)).c_str(),
                         r.random.back().average_precision,
                         *std::max_element(r.uad_test_ap.begin(), r.uad_test_ap.end()), seconds_since(t));
            runs_.emplace(seed, std::move(r));
        }
        seconds_ = seconds_since(t0);
    }

    std::map<std::uint64_t, SeedRuns> runs_;
    std::map<std::string, double> strategy_seconds_;
    double seconds_ = 0.0;
};

// Median AP over iterations [from, to] of one curve.
double window_median(const std::vector<Metrics>& curve, int from, int to) {
    std::vector<double> v;
    for (int i = from; i <= to; ++i) v.push_back(curve.at(static_cast<std::size_t>(i)).average_precision);
    return median(v);
}

Outcome warm_up_effect(Benchmark& bench) {
    std::vector<double> with, without;
    int wins = 0;
    for (const auto& [seed, r] : bench.runs()) {
        with.push_back(window_median(r.hybrid, 1, 5));
        without.push_back(window_median(r.no_warmup, 1, 5));
        wins += with.back() >= without.back();
    }
    const double a = median(with), b = median(without);
    const auto& secs = bench.strategy_seconds();
    const double runtime = secs.at("no_warmup") + secs.at("hybrid") / 4.0;
    return {a >= b ? Outcome::pass : Outcome::fail,
            fmt("median AP(it 1-5) warm-up %.4f vs none %.4f; per-seed wins %d/10; ~%.0f s", a, b, wins, runtime)};
}

Outcome hybrid_vs_random(Benchmark& bench) {
    std::vector<double> h, r;
    int wins = 0;
    for (const auto& [seed, run] : bench.runs()) {
        h.push_back(run.hybrid.back().average_precision);
        r.push_back(run.random.back().average_precision);
        wins += h.back() >= r.back();
    }
    const double a = median(h), b = median(r);
    const double gain = b > 0 ? (a - b) / b : 0.0;
    const auto& secs = bench.strategy_seconds();
    return {a >= b ? Outcome::pass : Outcome::fail,
            fmt("median AP@20 hybrid %.4f vs random %.4f; relative gain %+.1f%%; paired wins %d/10; %.0f s", a, b,
                100.0 * gain, wins, secs.at("hybrid") + secs.at("random"))};
}

Outcome lf_generation_ablation(Benchmark& bench) {
    std::vector<double> with, without;
    int wins = 0, identical = 0;
    std::size_t lfs = 0, singletons = 0;
    for (const auto& [seed, r] : bench.runs()) {
        with.push_back(window_median(r.hybrid, 1, 10));
        without.push_back(window_median(r.no_lfgen, 1, 10));
        wins += with.back() >= without.back();
        identical += std::equal(r.no_lfgen.begin(), r.no_lfgen.end(), r.hybrid.begin(),
                                [](const Metrics& x, const Metrics& y) { return x.average_precision == y.average_precision; });
        lfs += r.generated_lfs;
        singletons += r.singleton_lfs;
    }
    // Median over seeds of each seed's median over the window. An LF whose only
    // member is the annotated point adds nothing the labeled set does not, so
    // the share of such LFs is reported alongside.
    const double a = median(with), b = median(without);
    return {a >= b ? Outcome::pass : Outcome::fail,
            fmt("median AP(it 1-10) with LF generation %.4f vs without %.4f; paired wins %d/10; curves identical "
                "in %d/10; %zu of %zu generated LFs cover only the annotated point",
                a, b, wins, identical, singletons, lfs)};
}

Outcome beats_best_detector(Benchmark& bench) {
    int wins = 0;
    std::vector<double> leiad, best, warm, worst;
    for (const auto& [seed, r] : bench.runs()) {
        leiad.push_back(r.hybrid.at(5).average_precision);
        best.push_back(*std::max_element(r.uad_test_ap.begin(), r.uad_test_ap.end()));
        warm.push_back(r.hybrid.at(0).average_precision);
        worst.push_back(*std::min_element(r.uad_test_ap.begin(), r.uad_test_ap.end()));
        wins += leiad.back() >= best.back();
    }
    return {wins >= 7 ? Outcome::pass : Outcome::fail,
            fmt("AP@5 >= best single detector in %d/10 seeds (median %.4f vs %.4f); warm-up AP median %.4f vs "
                "worst detector %.4f",
                wins, median(leiad), median(best), median(warm), median(worst))};
}

// ------------------------------------------------------------------- 7: ANN

Outcome ann_quality() {
    const auto t0 = Clock::now();
    constexpr std::size_t n = 100000, dims = 32, k = 100, queries = 200;
    Rng rng(77);
    std::vector<double> rows(n * dims);
    for (auto& x : rows) x = rng.uniform();
    const auto rep = representation_from_embedding(std::move(rows), dims);

    const auto tb = Clock::now();
    const auto index = AnnIndex::build(rep, AnnConfig{}, 7);
    const double build = seconds_since(tb);

    std::vector<std::size_t> q(queries);
    for (auto& x : q) x = rng.index(n);

    // Queries alternate between the two methods so drift in machine speed hits
    // both alike; the best of three passes is kept.
    std::vector<std::vector<Neighbor>> exact(queries), approx(queries);
    double exact_s = INFINITY, ann_s = INFINITY;
    for (int pass = 0; pass < 3; ++pass) {
        double e = 0.0, a = 0.0;
        for (std::size_t i = 0; i < queries; ++i) {
            auto t = Clock::now();
            exact[i] = exact_l1_search(rep, q[i], k);
            e += seconds_since(t);
            t = Clock::now();
            approx[i] = index.search(rep, q[i], k);
            a += seconds_since(t);
        }
        exact_s = std::min(exact_s, e / queries);
        ann_s = std::min(ann_s, a / queries);
    }

    double recall = 0.0;
    for (std::size_t i = 0; i < queries; ++i) {
        std::set<std::size_t> truth;
        for (const auto& nb : exact[i]) truth.insert(nb.index);
        std::size_t hit = 0;
        for (const auto& nb : approx[i]) hit += truth.count(nb.index);
        recall += static_cast<double>(hit) / k;
    }
    recall /= queries;
    const double total = seconds_since(t0);
    const bool ok = recall >= 0.9 && ann_s <= exact_s / 5.0 && total < 300.0;
    return {ok ? Outcome::pass : Outcome::fail,
            fmt("recall@100 %.3f; per query %.3f ms vs exact %.3f ms (ratio %.3f); build %.1f s, total %.1f s", recall,
                1e3 * ann_s, 1e3 * exact_s, ann_s / exact_s, build, total)};
}

// ------------------------------------------------------------- 8: detectors

Series make_series(std::string id, std::vector<double> values) {
    Series s;
    s.id = std::move(id);
    for (std::size_t i = 0; i < values.size(); ++i) s.timestamps.push_back(static_cast<std::int64_t>(i));
    s.values = std::move(values);
    return s;
}

Series sinusoid_with_shift(std::size_t from, std::size_t to) {
    std::vector<double> v(1000);
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = std::sin(2.0 * M_PI * static_cast<double>(i) / 90.0) + (i >= from && i < to ? 5.0 : 0.0);
    return make_series("shift", std::move(v));
}

std::size_t argmax(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

Outcome detector_sanity() {
    std::vector<std::string> problems;
    std::vector<double> spike_values(1000, 0.0);
    spike_values[500] = 100.0;
    const auto spike = make_series("spike", spike_values);
    const auto shift = sinusoid_with_shift(600, 620);

    for (auto kind : kAllDetectors) {
        const auto cfg = DetectorConfig::defaults(kind);
        constexpr double contamination = 0.01;
        const auto a = scores_to_lf_votes(fit_score(cfg, spike, 3), contamination, 0.5);
        if (a.votes[500] != Vote::anomaly) problems.push_back(std::string(to_string(kind)) + " missed the spike");
        const auto b = scores_to_lf_votes(fit_score(cfg, shift, 3), contamination, 0.5);
        bool hit = false;
        for (std::size_t i = 600; i < 620; ++i) hit |= b.votes[i] == Vote::anomaly;
        if (!hit) problems.push_back(std::string(to_string(kind)) + " missed the level shift");
    }

    if (argmax(fit_score(DetectorConfig::defaults(DetectorKind::zscore), spike, 0).scores) != 500)
        problems.push_back("zscore maximum is not at the spike");

    const auto flat = fit_score(DetectorConfig::defaults(DetectorKind::spectral_residual),
                                make_series("flat", std::vector<double>(512, 3.25)), 0).scores;
    const auto [lo, hi] = std::minmax_element(flat.begin(), flat.end());
    if (*hi - *lo >= 1e-6) problems.push_back("spectral residual is not flat on a constant series");

    const auto level = sinusoid_with_shift(600, 1000);
    const auto dec = detectors::stl_decompose(level.values, 90, 0.6, 0.01, 0);
    std::vector<double> mag(dec.remainder.size());
    for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::abs(dec.remainder[i]);
    const auto at = argmax(mag);
    if (at < 595 || at > 605) problems.push_back(fmt("stl remainder peaks at %zu, not at the shift", at));

    const auto cfg = DetectorConfig::defaults(DetectorKind::iforest);
    const auto x = fit_score(cfg, shift, 11).scores, y = fit_score(cfg, shift, 11).scores;
    if (x.size() != y.size() || std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) != 0)
        problems.push_back("isolation forest is not bit-exact for a fixed seed");

    std::string detail = problems.empty() ? "all detectors flag both fixtures; iforest bit-exact" : "";
    for (const auto& p : problems) detail += (detail.empty() ? "" : "; ") + p;
    return {problems.empty() ? Outcome::pass : Outcome::fail, detail};
}

// --------------------------------------------------------------- 9: metrics

// Threshold sweep: every distinct score, descending, predicts score >= t.
std::pair<double, double> sweep_oracle(const std::vector<double>& s, const std::vector<int>& y) {
    std::vector<double> thresholds(s);
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    const double pos = std::count(y.begin(), y.end(), 1), neg = static_cast<double>(y.size()) - pos;
    double ap = 0.0, auc = 0.0, prev_r = 0.0, prev_tpr = 0.0, prev_fpr = 0.0;
    for (double t : thresholds) {
        double tp = 0, fp = 0;
        for (std::size_t i = 0; i < s.size(); ++i)
            if (s[i] >= t) (y[i] ? tp : fp) += 1;
        const double r = tp / pos, p = tp / (tp + fp);
        ap += (r - prev_r) * p;
        const double tpr = tp / pos, fpr = fp / neg;
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        prev_r = r;
        prev_tpr = tpr;
        prev_fpr = fpr;
    }
    return {ap, auc};
}

Outcome metrics_correctness() {
    Rng rng(99);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> s(1000);
        std::vector<int> y(1000);
        for (std::size_t i = 0; i < s.size(); ++i) {
            // Rounding makes ties common.
            s[i] = std::round(rng.uniform() * (trial % 2 ? 50.0 : 1e6)) / 50.0;
            y[i] = rng.bernoulli(0.1 + 0.02 * trial) ? 1 : 0;
        }
        y[0] = 1;
        y[1] = 0;
        const auto [ap, auc] = sweep_oracle(s, y);
        worst = std::max({worst, std::abs(average_precision(s, y) - ap), std::abs(roc_auc(s, y) - auc)});
    }

    std::vector<double> ramp(1000);
    std::vector<int> labels(1000);
    for (std::size_t i = 0; i < ramp.size(); ++i) {
        ramp[i] = static_cast<double>(i);
        labels[i] = i >= 900 ? 1 : 0;
    }
    std::vector<double> reversed(ramp.rbegin(), ramp.rend());
    const double perfect_ap = average_precision(ramp, labels), perfect_auc = roc_auc(ramp, labels);
    const double reversed_auc = roc_auc(reversed, labels);

    std::vector<double> noise(20000);
    std::vector<int> coin(20000);
    for (std::size_t i = 0; i < noise.size(); ++i) {
        noise[i] = rng.uniform();
        coin[i] = rng.bernoulli(0.5) ? 1 : 0;
    }
    const double random_auc = roc_auc(noise, coin);

    const bool ok = worst <= 1e-9 && perfect_ap == 1.0 && perfect_auc == 1.0 && reversed_auc == 0.0 &&
                    std::abs(random_auc - 0.5) <= 0.02;
    return {ok ? Outcome::pass : Outcome::fail,
            fmt("max |error| vs sweep %.2e; perfect AP %.3f AUC %.3f; reversed AUC %.3f; random AUC %.4f", worst,
                perfect_ap, perfect_auc, reversed_auc, random_auc)};
}

// ----------------------------------------------------------- 10: determinism

std::optional<std::string> run_cli_simulate(const std::string& cli, std::uint64_t seed, const std::string& out) {
    const std::string cmd = "\"" + cli + "\" simulate --seed " + std::to_string(seed) + " --out \"" + out +
                            "\" 2>/dev/null";
    if (std::system(cmd.c_str()) != 0) return std::nullopt;
    std::ifstream in(out, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome end_to_end_determinism(Benchmark* bench) {
    constexpr std::uint64_t seed = 7;
    const char* cli = std::getenv("LEIAD_CLI");
    std::string first, second, how;
    if (cli && std::filesystem::exists(cli)) {
        const auto dir = std::filesystem::temp_directory_path();
        const auto a = run_cli_simulate(cli, seed, (dir / "leiad_accept_a.csv").string());
        if (!a) return {Outcome::fail, "CLI simulate failed"};
        first = *a;
        // The in-process hybrid run with the same seed stands in for the second
        // invocation when it is already available.
        if (bench) {
            second = format_curve(bench->runs().at(seed).hybrid);
            how = "CLI run vs in-process run";
        } else {
            const auto b = run_cli_simulate(cli, seed, (dir / "leiad_accept_b.csv").string());
            if (!b) return {Outcome::fail, "CLI simulate failed"};
            second = *b;
            how = "two CLI runs";
        }
    } else {
        const auto dataset = generate_synthetic(SyntheticOptions{});
        first = format_curve(simulate(dataset, LeiadConfig(), 20, seed, Strategy::hybrid).curve);
        second = format_curve(simulate(dataset, LeiadConfig(), 20, seed, Strategy::hybrid).curve);
        how = "two in-process runs";
    }
    const bool same = !first.empty() && first == second;
    return {same ? Outcome::pass : Outcome::fail,
            fmt("%s, seed 7: %s (%zu bytes)", how.c_str(), same ? "byte-identical" : "curves differ", first.size())};
}

// ------------------------------------------------------------------ 11: Yahoo

Outcome yahoo() {
    const char* path = std::getenv("LEIAD_YAHOO_CSV");
    if (!path || !std::filesystem::exists(path)) return {Outcome::skip, "set LEIAD_YAHOO_CSV to the ingested benchmark"};
    const auto t0 = Clock::now();
    const auto dataset = load_dataset(path);
    const auto r = simulate(dataset, config_preset("yahoo"), 20, 7, Strategy::hybrid);
    const double ap = r.curve.back().average_precision;
    return {std::abs(ap - 0.50) <= 0.15 ? Outcome::pass : Outcome::fail,
            fmt("AP@20 %.4f (target 0.50 +/- 0.15); %.0f s", ap, seconds_since(t0))};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
    auto want = [&](int c) { return wanted.empty() || wanted.count(c) > 0; };
    const bool need_bench = want(3) || want(4) || want(5) || want(6);

    Benchmark bench;
    const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
        {1, formulas},
        {2, label_model_vs_majority},
        {3, [&] { return warm_up_effect(bench); }},
        {4, [&] { return hybrid_vs_random(bench); }},
        {5, [&] { return lf_generation_ablation(bench); }},
        {6, [&] { return beats_best_detector(bench); }},
        {7, ann_quality},
        {8, detector_sanity},
        {9, metrics_correctness},
        {10, [&] { return end_to_end_determinism(need_bench ? &bench : nullptr); }},
        {11, yahoo},
    };

    int failures = 0;
    for (const auto& [id, run] : criteria) {
        if (!want(id)) continue;
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {Outcome::fail, std::string("threw: ") + e.what()};
        }
        const char* tag = o.kind == Outcome::pass ? "PASS" : o.kind == Outcome::fail ? "FAIL" : "SKIP";
        failures += o.kind == Outcome::fail;
        std::printf("criterion %2d: %s  %s\n", id, tag, o.detail.c_str());
        std::fflush(stdout);
    }
    if (need_bench) std::printf("benchmark runs took %.0f s\n", bench.seconds());
    return failures == 0 ? 0 : 1;
}
