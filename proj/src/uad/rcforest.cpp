#include <algorithm>
#include <cmath>
#include <numeric>

#include "leiad/error.hpp"
#include "leiad/random.hpp"
#include "leiad/uad.hpp"

namespace leiad::detectors {

namespace {

// Random cut tree over a fixed batch of shingles. Points with identical
// coordinates share a leaf whose size counts the duplicates.
class RandomCutTree {
public:
    RandomCutTree(const std::vector<double>& shingles, std::size_t dim,
                  std::vector<std::size_t> members, Rng& rng)
        : shingles_(shingles), dim_(dim) {
        nodes_.reserve(2 * members.size());
        leaf_of_.reserve(members.size());
        build(members, 0, members.size(), -1, rng);
    }

    /// Collusive displacement of every member: max over ancestors of
    /// |sibling| / |subtree containing the point|.
    void accumulate_codisp(std::vector<double>& totals) const {
        for (const auto& [point, leaf] : leaf_of_) {
            double best = 0.0;
            int node = leaf;
            while (nodes_[node].parent >= 0) {
                const auto& parent = nodes_[nodes_[node].parent];
                const int sibling = parent.left == node ? parent.right : parent.left;
                best = std::max(best, static_cast<double>(nodes_[sibling].size) / nodes_[node].size);
                node = nodes_[node].parent;
            }
            totals[point] += best;
        }
    }

private:
    struct Node {
        int parent = -1;
        int left = -1;
        int right = -1;
        int size = 0;
    };

    double coord(std::size_t point, std::size_t d) const { return shingles_[point * dim_ + d]; }

    int build(std::vector<std::size_t>& idx, std::size_t begin, std::size_t end, int parent,
              Rng& rng) {
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back({parent, -1, -1, static_cast<int>(end - begin)});

        std::vector<double> lo(dim_, INFINITY), hi(dim_, -INFINITY);
        for (std::size_t i = begin; i < end; ++i)
            for (std::size_t d = 0; d < dim_; ++d) {
                lo[d] = std::min(lo[d], coord(idx[i], d));
                hi[d] = std::max(hi[d], coord(idx[i], d));
            }
        double total_span = 0.0;
        for (std::size_t d = 0; d < dim_; ++d) total_span += hi[d] - lo[d];
        if (end - begin == 1 || total_span <= 0.0) {
            for (std::size_t i = begin; i < end; ++i) leaf_of_.emplace_back(idx[i], id);
            return id;
        }

        // Dimension chosen proportionally to its span, cut uniform inside it.
        double r = rng.uniform() * total_span;
        std::size_t d = 0;
        for (; d + 1 < dim_; ++d) {
            if (r < hi[d] - lo[d]) break;
            r -= hi[d] - lo[d];
        }
        while (hi[d] <= lo[d]) d = (d + 1) % dim_;
        double cut = lo[d] + std::min(r, hi[d] - lo[d]);
        if (cut >= hi[d]) cut = std::nextafter(hi[d], lo[d]);

        const auto mid = std::partition(idx.begin() + static_cast<long>(begin),
                                        idx.begin() + static_cast<long>(end),
                                        [&](std::size_t p) { return coord(p, d) <= cut; });
        const auto split = static_cast<std::size_t>(mid - idx.begin());
        const int left = build(idx, begin, split, id, rng);
        const int right = build(idx, split, end, id, rng);
        nodes_[id].left = left;
        nodes_[id].right = right;
        return id;
    }

    const std::vector<double>& shingles_;
    std::size_t dim_;
    std::vector<Node> nodes_;
    std::vector<std::pair<std::size_t, int>> leaf_of_;
};

}  // namespace

std::vector<double> random_cut_forest(std::span<const double> values, int shingle_size,
                                      int number_of_trees, int tree_size, std::uint64_t seed) {
    require(shingle_size >= 1 && number_of_trees >= 1 && tree_size >= 2,
            ErrorCode::invalid_argument,
            "rcforest: shingle_size >= 1, number_of_trees >= 1, tree_size >= 2 required");
    const std::size_t n = values.size();
    require(n >= 2, ErrorCode::precondition, "rcforest needs at least 2 points");

    const auto dim = static_cast<std::size_t>(shingle_size);
    std::vector<double> shingles(n * dim);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t d = 0; d < dim; ++d) {
            const std::size_t back = dim - 1 - d;
            shingles[i * dim + d] = values[i >= back ? i - back : 0];
        }

    // Each tree partitions a fresh shuffle of all points into batches of at
    // most tree_size, so every point is scored by every tree.
    const std::size_t batches = (n + static_cast<std::size_t>(tree_size) - 1) / static_cast<std::size_t>(tree_size);
    Rng rng(seed);
    std::vector<double> totals(n, 0.0);
    std::vector<std::size_t> order(n);
    for (int t = 0; t < number_of_trees; ++t) {
        Rng tree_rng = rng.fork(static_cast<std::uint64_t>(t));
        std::iota(order.begin(), order.end(), 0);
        tree_rng.shuffle(std::span<std::size_t>(order));
        std::size_t begin = 0;
        for (std::size_t b = 0; b < batches; ++b) {
            const std::size_t size = n / batches + (b < n % batches ? 1 : 0);
            std::vector<std::size_t> members(order.begin() + static_cast<long>(begin),
                                             order.begin() + static_cast<long>(begin + size));
            begin += size;
            if (members.size() < 2) continue;
            RandomCutTree tree(shingles, dim, std::move(members), tree_rng);
            tree.accumulate_codisp(totals);
        }
    }
    for (double& v : totals) v /= number_of_trees;
    return totals;
}

}  // namespace leiad::detectors
