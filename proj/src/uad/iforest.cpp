#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "leiad/error.hpp"
#include "leiad/random.hpp"
#include "leiad/uad.hpp"

namespace leiad::detectors {

namespace {

constexpr std::size_t kFeatures = 2;
using Row = std::array<double, kFeatures>;

// Average path length of an unsuccessful BST search over n points.
double average_path_length(double n) {
    if (n <= 1.0) return 0.0;
    if (n <= 2.0) return 1.0;
    constexpr double kEuler = 0.5772156649015329;
    return 2.0 * (std::log(n - 1.0) + kEuler) - 2.0 * (n - 1.0) / n;
}

struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int size = 0;
};

class IsolationTree {
public:
    IsolationTree(const std::vector<Row>& rows, std::vector<std::size_t> sample, Rng& rng) {
        const int limit = static_cast<int>(std::ceil(std::log2(std::max<double>(2.0, sample.size()))));
        nodes_.reserve(2 * sample.size());
        build(rows, sample, 0, sample.size(), 0, limit, rng);
    }

    double path_length(const Row& x) const {
        int node = 0;
        double depth = 0.0;
        while (nodes_[node].feature >= 0) {
            const auto& n = nodes_[node];
            node = x[n.feature] < n.threshold ? n.left : n.right;
            depth += 1.0;
        }
        return depth + average_path_length(nodes_[node].size);
    }

private:
    int build(const std::vector<Row>& rows, std::vector<std::size_t>& idx, std::size_t begin,
              std::size_t end, int depth, int limit, Rng& rng) {
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back({});
        nodes_[id].size = static_cast<int>(end - begin);
        if (end - begin <= 1 || depth >= limit) return id;

        std::array<double, kFeatures> lo, hi;
        lo.fill(INFINITY);
        hi.fill(-INFINITY);
        for (std::size_t i = begin; i < end; ++i)
            for (std::size_t f = 0; f < kFeatures; ++f) {
                lo[f] = std::min(lo[f], rows[idx[i]][f]);
                hi[f] = std::max(hi[f], rows[idx[i]][f]);
            }
        std::array<int, kFeatures> usable{};
        int n_usable = 0;
        for (std::size_t f = 0; f < kFeatures; ++f)
            if (hi[f] > lo[f]) usable[n_usable++] = static_cast<int>(f);
        if (n_usable == 0) return id;

        const int f = usable[rng.index(static_cast<std::uint64_t>(n_usable))];
        double cut = rng.uniform(lo[f], hi[f]);
        if (cut <= lo[f]) cut = std::nextafter(lo[f], hi[f]);

        const auto mid = std::partition(idx.begin() + static_cast<long>(begin),
                                        idx.begin() + static_cast<long>(end),
                                        [&](std::size_t r) { return rows[r][f] < cut; });
        const auto split = static_cast<std::size_t>(mid - idx.begin());

        nodes_[id].feature = f;
        nodes_[id].threshold = cut;
        const int left = build(rows, idx, begin, split, depth + 1, limit, rng);
        const int right = build(rows, idx, split, end, depth + 1, limit, rng);
        nodes_[id].left = left;
        nodes_[id].right = right;
        return id;
    }

    std::vector<Node> nodes_;
};

}  // namespace

std::vector<double> isolation_forest(std::span<const double> values, int number_of_estimators,
                                     int max_samples, std::uint64_t seed) {
    const std::size_t n = values.size();
    require(n >= 2, ErrorCode::precondition, "isolation forest needs at least 2 points");
    require(number_of_estimators >= 1 && max_samples >= 2, ErrorCode::invalid_argument,
            "isolation forest: number_of_estimators >= 1 and max_samples >= 2 required");

    std::vector<Row> rows(n);
    for (std::size_t i = 0; i < n; ++i)
        rows[i] = {values[i], i == 0 ? 0.0 : values[i] - values[i - 1]};

    const std::size_t psi = std::min<std::size_t>(static_cast<std::size_t>(max_samples), n);
    const double normalizer = average_path_length(static_cast<double>(psi));

    Rng rng(seed);
    std::vector<double> total(n, 0.0);
    std::vector<std::size_t> pool(n);
    for (int t = 0; t < number_of_estimators; ++t) {
        Rng tree_rng = rng.fork(static_cast<std::uint64_t>(t));
        std::iota(pool.begin(), pool.end(), 0);
        for (std::size_t i = 0; i < psi; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(tree_rng.index(n - i));
            std::swap(pool[i], pool[j]);
        }
        IsolationTree tree(rows, std::vector<std::size_t>(pool.begin(), pool.begin() + static_cast<long>(psi)),
                           tree_rng);
        for (std::size_t i = 0; i < n; ++i) total[i] += tree.path_length(rows[i]);
    }

    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double mean_depth = total[i] / number_of_estimators;
        scores[i] = std::exp2(-mean_depth / normalizer);
    }
    return scores;
}

}  // namespace leiad::detectors
