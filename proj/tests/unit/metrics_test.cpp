#include <algorithm>
#include <set>

#include "leiad/error.hpp"
#include "leiad/metrics.hpp"
#include "leiad/random.hpp"
#include "support.hpp"

using namespace leiad;

namespace {

// Sweep every distinct score as a threshold, predicting positive at or above it.
struct Sweep {
    std::vector<double> precision, recall, tpr, fpr;
};

Sweep sweep(const std::vector<double>& s, const std::vector<int>& y) {
    std::set<double, std::greater<>> thresholds(s.begin(), s.end());
    const double pos = static_cast<double>(std::count(y.begin(), y.end(), 1));
    const double neg = static_cast<double>(y.size()) - pos;
    Sweep out;
    for (double t : thresholds) {
        double tp = 0, fp = 0;
        for (std::size_t i = 0; i < s.size(); ++i)
            if (s[i] >= t) (y[i] ? tp : fp) += 1;
        out.precision.push_back(tp / (tp + fp));
        out.recall.push_back(tp / pos);
        out.tpr.push_back(tp / pos);
        out.fpr.push_back(neg > 0 ? fp / neg : 0.0);
    }
    return out;
}

double ap_oracle(const std::vector<double>& s, const std::vector<int>& y) {
    const auto sw = sweep(s, y);
    double ap = 0.0, prev = 0.0;
    for (std::size_t k = 0; k < sw.recall.size(); ++k) {
        ap += (sw.recall[k] - prev) * sw.precision[k];
        prev = sw.recall[k];
    }
    return ap;
}

double auc_oracle(const std::vector<double>& s, const std::vector<int>& y) {
    const auto sw = sweep(s, y);
    double area = 0.0, x0 = 0.0, y0 = 0.0;
    for (std::size_t k = 0; k < sw.tpr.size(); ++k) {
        area += (sw.fpr[k] - x0) * (sw.tpr[k] + y0) / 2.0;
        x0 = sw.fpr[k];
        y0 = sw.tpr[k];
    }
    return area;
}

}  // namespace

TEST_CASE("AP and ROC AUC match a threshold sweep") {
    Rng rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.index(400);
        std::vector<double> s(n);
        std::vector<int> y(n);
        const double grain = trial % 2 ? 0.1 : 1e-6;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = rng.bernoulli(0.2) ? 1 : 0;
            s[i] = std::round((rng.normal() + y[i]) / grain) * grain;
        }
        y[0] = 1;
        y[1] = 0;
        CHECK(average_precision(s, y) == doctest::Approx(ap_oracle(s, y)).epsilon(1e-9));
        CHECK(roc_auc(s, y) == doctest::Approx(auc_oracle(s, y)).epsilon(1e-9));
    }
}

TEST_CASE("perfect, reversed and uninformative rankings") {
    std::vector<double> s;
    std::vector<int> y;
    for (int i = 0; i < 100; ++i) {
        s.push_back(i);
        y.push_back(i >= 90 ? 1 : 0);
    }
    CHECK(average_precision(s, y) == 1.0);
    CHECK(roc_auc(s, y) == 1.0);
    std::vector<double> rev(s.rbegin(), s.rend());
    CHECK(roc_auc(rev, y) == 0.0);

    Rng rng(3);
    std::vector<double> noise(10000);
    std::vector<int> half(10000);
    for (std::size_t i = 0; i < noise.size(); ++i) {
        noise[i] = rng.uniform();
        half[i] = static_cast<int>(i % 2);
    }
    CHECK(std::abs(roc_auc(noise, half) - 0.5) <= 0.02);
}

TEST_CASE("metrics need both classes") {
    const std::vector<double> s{0.1, 0.2};
    CHECK_THROWS_AS(average_precision(s, std::vector<int>{0, 0}), Error);
    CHECK_THROWS_AS(roc_auc(s, std::vector<int>{1, 1}), Error);
    CHECK_THROWS_AS(average_precision(s, std::vector<int>{1}), Error);
}

TEST_CASE("ap_auc is a unit-spaced trapezoid") {
    CHECK(ap_auc(std::vector<double>{0.5}) == 0.0);
    CHECK(ap_auc(std::vector<double>{0.2, 0.4, 0.4}) == doctest::Approx(0.3 + 0.4));
}
