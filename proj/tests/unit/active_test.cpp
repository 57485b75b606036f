#include <algorithm>
#include <cmath>
#include <map>

#include "leiad/active.hpp"
#include "leiad/error.hpp"
#include "leiad/random.hpp"
#include "support.hpp"

using namespace leiad;

namespace {

std::vector<Vote> votes(std::initializer_list<int> v) {
    std::vector<Vote> out;
    for (int x : v) out.push_back(vote_from_int(x));
    return out;
}

QueryComponents components(std::vector<double> q_like) {
    QueryComponents c;
    for (double x : q_like) {
        c.agreement.push_back(x);
        c.abstention.push_back(0);
        c.uncertainty.push_back(0);
        c.diversity.push_back(0);
        c.anomaly_prob.push_back(0);
    }
    return c;
}

}  // namespace

TEST_CASE("entropy examples") {
    CHECK(agreement_score(votes({1, 1, 0, 0})) == doctest::Approx(std::log(2.0)));
    CHECK(agreement_score(votes({1, 1, 1})) == 0.0);
    CHECK(agreement_score(votes({-1, -1})) == 0.0);
    CHECK(uncertainty_score(0.5) == doctest::Approx(std::log(2.0)));
    CHECK(uncertainty_score(0.0) == 0.0);
    CHECK(uncertainty_score(0.9) == doctest::Approx(0.3251).epsilon(1e-4));
    CHECK_THROWS_AS(binary_entropy(1.5), Error);
}

TEST_CASE("abstention examples") {
    CHECK(abstention_score(votes({1, 0, -1, -1, -1}), 5) == doctest::Approx(std::log(4.0)));
    CHECK(abstention_score(votes({1, 0, 1, 0, 1}), 5) == 0.0);
    CHECK(abstention_score(votes({-1, -1, -1, -1, -1}), 5) == doctest::Approx(std::log(6.0)));
}

TEST_CASE("diversity and anomaly probability examples") {
    const std::vector<double> e1{1, 0}, e2{0, 1};
    CHECK(diversity_score(e1, {e1}) == 0.0);
    CHECK(diversity_score(e1, {e2}) == 1.0);
    CHECK(diversity_score(e1, {e1, e2}) == 0.5);
    CHECK(diversity_score(e1, {}) == 1.0);
    const std::vector<double> e3{1, 0, 0};
    CHECK_THROWS_AS(diversity_score(e1, {e3}), Error);
    CHECK(anomaly_probability(std::vector<double>{0.2, 0.4, 0.6, 0.8, 1.0}) == doctest::Approx(0.6));
    CHECK(anomaly_probability(std::vector<double>{0, 0, 0}) == 0.0);
    CHECK(anomaly_probability(std::vector<double>{0.7}) == 0.7);
}

TEST_CASE("hybrid score example") {
    const double q = hybrid_score(std::log(2.0), std::log(4.0), std::log(2.0), 1.0, 0.5, QueryWeights{});
    CHECK(q == doctest::Approx(2.8328).epsilon(1e-4));
}

TEST_CASE("select_next ties and exclusion") {
    const QueryWeights w;
    const auto tie = components({1.0, 3.0, 3.0, 2.0});
    LabeledSet none(4);
    CHECK(select_next(tie, w, none) == 1);
    LabeledSet labeled(4);
    labeled.set(1, 0);
    CHECK(select_next(tie, w, labeled) == 2);
    labeled.set(2, 0);
    labeled.set(0, 1);
    labeled.set(3, 1);
    CHECK_THROWS_AS(select_next(tie, w, labeled), Error);
    CHECK(top_queries(tie, w, none, 3) == std::vector<std::size_t>{1, 2, 3});
}

TEST_CASE("raising one component never lowers a point's rank") {
    Rng rng(17);
    const QueryWeights w;
    for (int trial = 0; trial < 200; ++trial) {
        QueryComponents c;
        const std::size_t n = 2 + rng.index(30);
        for (std::size_t i = 0; i < n; ++i) {
            c.agreement.push_back(rng.uniform());
            c.abstention.push_back(rng.uniform());
            c.uncertainty.push_back(rng.uniform());
            c.diversity.push_back(rng.uniform());
            c.anomaly_prob.push_back(rng.uniform());
        }
        LabeledSet none(n);
        const auto rank_of = [&](const QueryComponents& cc, std::size_t p) {
            const auto order = top_queries(cc, w, none, n);
            return std::find(order.begin(), order.end(), p) - order.begin();
        };
        const std::size_t p = rng.index(n);
        const auto before = rank_of(c, p);
        auto bumped = c;
        std::vector<double>* fields[] = {&bumped.agreement, &bumped.abstention, &bumped.uncertainty,
                                         &bumped.diversity, &bumped.anomaly_prob};
        (*fields[rng.index(5)])[p] += rng.uniform(0.0, 0.5);
        CHECK(rank_of(bumped, p) <= before);

        // Scaling every component by a positive constant keeps the argmax.
        auto scaled = c;
        const double k = rng.uniform(0.1, 10.0);
        for (auto* f : {&scaled.agreement, &scaled.abstention, &scaled.uncertainty, &scaled.diversity,
                        &scaled.anomaly_prob})
            for (double& x : *f) x *= k;
        CHECK(select_next(scaled, w, none) == select_next(c, w, none));
    }
}

TEST_CASE("entropy is symmetric") {
    for (double p = 0.0; p <= 1.0; p += 0.01) CHECK(binary_entropy(p) == doctest::Approx(binary_entropy(1.0 - p)));
}

TEST_CASE("compute_components matches per-point formulas") {
    Rng rng(23);
    const std::size_t n = 40, dims = 3;
    VoteMatrix m(n);
    for (int j = 0; j < 4; ++j) {
        std::vector<Vote> col(n);
        for (auto& v : col) v = vote_from_int(static_cast<int>(rng.index(3)) - 1);
        m.add_column("lf" + std::to_string(j), col);
    }
    std::vector<double> probs(n), embedding(n * dims);
    for (auto& p : probs) p = rng.uniform();
    for (auto& x : embedding) x = rng.normal();
    const auto rep = representation_from_embedding(embedding, dims);
    LabeledSet labeled(n);
    labeled.set(3, 1);
    labeled.set(17, 0);
    std::vector<std::vector<double>> det(2, std::vector<double>(n));
    for (auto& d : det)
        for (auto& x : d) x = rng.uniform();

    const auto c = compute_components(m, probs, rep, labeled, det);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = m.row(i);
        CHECK(c.agreement[i] == doctest::Approx(agreement_score(row)).epsilon(1e-12));
        CHECK(c.abstention[i] == doctest::Approx(abstention_score(row, 4)).epsilon(1e-12));
        CHECK(c.uncertainty[i] == doctest::Approx(binary_entropy(probs[i])).epsilon(1e-12));
        CHECK(c.diversity[i] == doctest::Approx(diversity_score(rep.unit_row(i), {rep.unit_row(3), rep.unit_row(17)})).epsilon(1e-9));
        CHECK(c.anomaly_prob[i] == doctest::Approx((det[0][i] + det[1][i]) / 2).epsilon(1e-12));
    }
    const auto none = compute_components(m, probs, rep, LabeledSet(n), {});
    CHECK(none.diversity == std::vector<double>(n, 1.0));
    CHECK(none.anomaly_prob == std::vector<double>(n, 0.0));
}
