#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>

#include "leiad/endmodel.hpp"
#include "leiad/error.hpp"

namespace leiad {

namespace {

double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double mean_logloss(std::span<const double> raw, std::span<const int> y, std::span<const double> w) {
    double loss = 0.0, total = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        loss += w[i] * (softplus(raw[i]) - y[i] * raw[i]);
        total += w[i];
    }
    return loss / total;
}

struct Split {
    double gain = 0.0;
    int feature = -1;
    int bin = -1;  // rows with bin <= this go left
};

struct BinStat {
    double grad = 0.0, hess = 0.0;
    std::uint32_t count = 0;
};

/// Per-feature bins over the training values. A feature with at most
/// kMaxBins distinct values gets one bin per value, so its candidate splits
/// are exactly those of a greedy scan; otherwise bin edges sit at quantiles.
struct Binning {
    static constexpr std::size_t kMaxBins = 255;
    std::vector<std::size_t> offset;   // first histogram slot of each feature
    std::vector<double> lower, upper;  // value range seen in each slot
    std::vector<std::uint8_t> codes;   // row-major n x features

    std::size_t features() const { return offset.size() - 1; }
    std::size_t bins(std::size_t f) const { return offset[f + 1] - offset[f]; }
    std::size_t total() const { return offset.back(); }

    /// Split point between slot `b` of feature f and the next one.
    double threshold(std::size_t f, std::size_t b) const {
        const double v = upper[offset[f] + b], next = lower[offset[f] + b + 1];
        const double t = v + (next - v) / 2.0;
        return t >= next ? v : t;
    }
};

Binning make_bins(const std::vector<std::vector<double>>& columns, std::size_t n) {
    Binning bins;
    const std::size_t nf = columns.size();
    bins.offset.assign(1, 0);
    bins.codes.resize(n * nf);
    std::vector<double> sorted;
    std::vector<double> edges;  // largest value in each bin
    for (std::size_t f = 0; f < nf; ++f) {
        sorted = columns[f];
        std::sort(sorted.begin(), sorted.end());
        edges.clear();
        std::vector<double> values(sorted);
        values.erase(std::unique(values.begin(), values.end()), values.end());
        if (values.size() <= Binning::kMaxBins) {
            edges = values;
        } else {
            for (std::size_t k = 1; k <= Binning::kMaxBins; ++k) {
                const double e = sorted[std::min(n - 1, (k * n) / Binning::kMaxBins)];
                if (edges.empty() || e > edges.back()) edges.push_back(e);
            }
        }
        const std::size_t base = bins.offset.back();
        bins.offset.push_back(base + edges.size());
        bins.lower.resize(bins.offset.back(), INFINITY);
        bins.upper.resize(bins.offset.back(), -INFINITY);
        for (std::size_t i = 0; i < n; ++i) {
            const double v = columns[f][i];
            const auto b = static_cast<std::size_t>(std::lower_bound(edges.begin(), edges.end(), v) - edges.begin());
            bins.codes[i * nf + f] = static_cast<std::uint8_t>(b);
            bins.lower[base + b] = std::min(bins.lower[base + b], v);
            bins.upper[base + b] = std::max(bins.upper[base + b], v);
        }
    }
    return bins;
}

struct Leaf {
    std::size_t begin = 0, end = 0;
    double grad = 0.0, hess = 0.0;
    int node = 0;
    Split best;
    std::vector<BinStat> hist;
};

class TreeBuilder {
public:
    TreeBuilder(const Binning& bins, const EndModelConfig& config) : bins_(bins), config_(config) {}

    /// Grows one tree leaf-wise on (grad, hess); `delta` receives each row's raw leaf value.
    RegressionTree build(const std::vector<double>& grad, const std::vector<double>& hess,
                         std::vector<double>& delta) {
        grad_ = &grad;
        hess_ = &hess;
        const std::size_t n = grad.size();
        rows_.resize(n);
        std::iota(rows_.begin(), rows_.end(), 0u);
        scratch_.resize(n);

        RegressionTree tree;
        tree.nodes.emplace_back();
        std::vector<Leaf> leaves(1);
        leaves[0].end = n;
        for (std::size_t i = 0; i < n; ++i) {
            leaves[0].grad += grad[i];
            leaves[0].hess += hess[i];
        }
        fill_histogram(leaves[0]);
        find_best(leaves[0]);

        while (static_cast<int>(leaves.size()) < config_.num_leaves) {
            std::size_t pick = leaves.size();
            for (std::size_t l = 0; l < leaves.size(); ++l)
                if (leaves[l].best.feature >= 0 &&
                    (pick == leaves.size() || leaves[l].best.gain > leaves[pick].best.gain))
                    pick = l;
            if (pick == leaves.size()) break;
            auto [left, right] = split(leaves[pick], tree);
            find_best(left);
            find_best(right);
            leaves[pick] = std::move(left);
            leaves.push_back(std::move(right));
        }

        for (const auto& leaf : leaves) {
            const double value = -leaf.grad / (leaf.hess + config_.lambda_l2);
            tree.nodes[static_cast<std::size_t>(leaf.node)].value = value;
            for (std::size_t k = leaf.begin; k < leaf.end; ++k) delta[rows_[k]] = value;
        }
        return tree;
    }

private:
    double score(double g, double h) const { return g * g / (h + config_.lambda_l2); }

    void fill_histogram(Leaf& leaf) const {
        leaf.hist.assign(bins_.total(), BinStat{});
        const std::size_t nf = bins_.features();
        const auto& g = *grad_;
        const auto& h = *hess_;
        for (std::size_t k = leaf.begin; k < leaf.end; ++k) {
            const auto row = rows_[k];
            const std::uint8_t* code = bins_.codes.data() + static_cast<std::size_t>(row) * nf;
            for (std::size_t f = 0; f < nf; ++f) {
                auto& b = leaf.hist[bins_.offset[f] + code[f]];
                b.grad += g[row];
                b.hess += h[row];
                ++b.count;
            }
        }
    }

    void find_best(Leaf& leaf) const {
        leaf.best = Split{};
        const auto count = leaf.end - leaf.begin;
        const auto min_data = static_cast<std::size_t>(config_.min_data_in_leaf);
        if (count < 2 * min_data) return;
        const double parent = score(leaf.grad, leaf.hess);
        for (std::size_t f = 0; f < bins_.features(); ++f) {
            const BinStat* hist = leaf.hist.data() + bins_.offset[f];
            double gl = 0.0, hl = 0.0;
            std::size_t nl = 0;
            for (std::size_t b = 0; b + 1 < bins_.bins(f); ++b) {
                gl += hist[b].grad;
                hl += hist[b].hess;
                nl += hist[b].count;
                if (nl < min_data || hist[b].count == 0) continue;
                if (count - nl < min_data) break;
                const double hr = leaf.hess - hl;
                if (hl < config_.min_sum_hessian || hr < config_.min_sum_hessian) continue;
                const double gain = score(gl, hl) + score(leaf.grad - gl, hr) - parent;
                if (gain > leaf.best.gain + 1e-12) leaf.best = {gain, static_cast<int>(f), static_cast<int>(b)};
            }
        }
    }

    std::pair<Leaf, Leaf> split(Leaf& leaf, RegressionTree& tree) {
        const auto f = static_cast<std::size_t>(leaf.best.feature);
        const auto cut = static_cast<std::uint8_t>(leaf.best.bin);
        const std::size_t nf = bins_.features();
        Leaf left, right;
        // Stable partition keeps each child's rows in canonical order.
        std::size_t a = leaf.begin, b = 0;
        for (std::size_t k = leaf.begin; k < leaf.end; ++k) {
            const auto row = rows_[k];
            if (bins_.codes[static_cast<std::size_t>(row) * nf + f] <= cut) {
                rows_[a++] = row;
                left.grad += (*grad_)[row];
                left.hess += (*hess_)[row];
            } else {
                scratch_[b++] = row;
            }
        }
        std::copy(scratch_.begin(), scratch_.begin() + static_cast<long>(b), rows_.begin() + static_cast<long>(a));
        left.begin = leaf.begin;
        left.end = a;
        right.begin = a;
        right.end = leaf.end;
        right.grad = leaf.grad - left.grad;
        right.hess = leaf.hess - left.hess;

        // Scan the smaller child; the larger one is the parent minus it.
        Leaf& small = left.end - left.begin <= right.end - right.begin ? left : right;
        Leaf& large = &small == &left ? right : left;
        fill_histogram(small);
        large.hist = std::move(leaf.hist);
        for (std::size_t s = 0; s < large.hist.size(); ++s) {
            large.hist[s].grad -= small.hist[s].grad;
            large.hist[s].hess -= small.hist[s].hess;
            large.hist[s].count -= small.hist[s].count;
        }

        const auto parent = static_cast<std::size_t>(leaf.node);
        left.node = static_cast<int>(tree.nodes.size());
        right.node = left.node + 1;
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        tree.nodes[parent].feature = leaf.best.feature;
        tree.nodes[parent].threshold = bins_.threshold(f, cut);
        tree.nodes[parent].left = left.node;
        tree.nodes[parent].right = right.node;
        return {std::move(left), std::move(right)};
    }

    const Binning& bins_;
    const EndModelConfig& config_;
    const std::vector<double>* grad_ = nullptr;
    const std::vector<double>* hess_ = nullptr;
    std::vector<std::uint32_t> rows_;
    std::vector<std::uint32_t> scratch_;
};

}  // namespace

std::size_t RegressionTree::leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const Node& n) { return n.feature < 0; }));
}

double RegressionTree::output(std::span<const double> row) const {
    std::size_t i = 0;
    while (nodes[i].feature >= 0) {
        const auto& n = nodes[i];
        i = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return nodes[i].value;
}

GbtModel GbtModel::constant(std::size_t num_features, double prior) {
    require(prior > 0.0 && prior < 1.0, ErrorCode::invalid_argument, "prior must lie in (0, 1)");
    return GbtModel(num_features, std::log(prior / (1.0 - prior)), 0.1, 200);
}

double GbtModel::raw_score(std::span<const double> features) const {
    check_width(features.size());
    double z = base_score_;
    for (const auto& t : trees_) z += t.shrinkage * t.output(features);
    return z;
}

double GbtModel::predict(std::span<const double> features) const { return sigmoid(raw_score(features)); }

void GbtModel::write(std::ostream& out) const {
    out << "LEIAD-GBT-v1\n" << std::setprecision(17);
    out << "num_features " << num_features_ << "\n";
    out << "base_score " << base_score_ << "\n";
    out << "learning_rate " << learning_rate_ << "\n";
    out << "num_leaves_limit " << num_leaves_limit_ << "\n";
    out << "trees " << trees_.size() << "\n";
    for (const auto& t : trees_) {
        out << "tree " << t.shrinkage << " " << t.nodes.size() << "\n";
        for (const auto& n : t.nodes)
            out << n.feature << " " << n.threshold << " " << n.left << " " << n.right << " " << n.value << "\n";
    }
}

GbtModel GbtModel::read(std::istream& in) {
    auto expect = [&](const char* key) {
        std::string word;
        in >> word;
        require(static_cast<bool>(in) && word == key, ErrorCode::parse,
                std::string("model file: expected '") + key + "', got '" + word + "'");
    };
    expect("LEIAD-GBT-v1");
    GbtModel m;
    std::size_t tree_count = 0;
    expect("num_features");
    in >> m.num_features_;
    expect("base_score");
    in >> m.base_score_;
    expect("learning_rate");
    in >> m.learning_rate_;
    expect("num_leaves_limit");
    in >> m.num_leaves_limit_;
    expect("trees");
    in >> tree_count;
    require(static_cast<bool>(in), ErrorCode::parse, "model file: malformed header");
    for (std::size_t t = 0; t < tree_count; ++t) {
        expect("tree");
        RegressionTree tree;
        std::size_t node_count = 0;
        in >> tree.shrinkage >> node_count;
        require(static_cast<bool>(in) && node_count >= 1, ErrorCode::parse, "model file: bad tree header");
        tree.nodes.resize(node_count);
        for (auto& n : tree.nodes) in >> n.feature >> n.threshold >> n.left >> n.right >> n.value;
        require(static_cast<bool>(in), ErrorCode::parse, "model file: truncated tree");
        for (const auto& n : tree.nodes) {
            if (n.feature < 0) continue;
            require(static_cast<std::size_t>(n.feature) < m.num_features_ && n.left > 0 && n.right > 0 &&
                        static_cast<std::size_t>(std::max(n.left, n.right)) < node_count,
                    ErrorCode::parse, "model file: node references out of range");
        }
        m.trees_.push_back(std::move(tree));
    }
    return m;
}

GbtModel train_gbt(const TrainingData& data, const EndModelConfig& config, std::uint64_t /*seed*/) {
    // No row or feature sampling, so the seed is not consumed.
    config.validate();
    const std::size_t n = data.size();
    const std::size_t nf = data.features.cols;
    require(n > 0, ErrorCode::invalid_argument, "cannot train on an empty label set");

    // Canonical row order: lexicographic on (features, label, weight).
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
        const auto ra = data.features.row(a), rb = data.features.row(b);
        for (std::size_t f = 0; f < nf; ++f)
            if (ra[f] != rb[f]) return ra[f] < rb[f];
        if (data.labels[a] != data.labels[b]) return data.labels[a] < data.labels[b];
        return data.weights[a] < data.weights[b];
    });
    std::vector<int> y(n);
    std::vector<double> w(n);
    std::vector<std::vector<double>> columns(nf, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = data.labels[perm[i]];
        w[i] = data.weights[perm[i]];
        const auto r = data.features.row(perm[i]);
        for (std::size_t f = 0; f < nf; ++f) columns[f][i] = r[f];
    }
    const Binning bins = make_bins(columns, n);

    const double base = std::log(config.class_prior / (1.0 - config.class_prior));
    GbtModel model(nf, base, config.learning_rate, config.num_leaves);
    std::vector<double> raw(n, base), grad(n), hess(n), delta(n), trial(n);
    double loss = mean_logloss(raw, y, w);
    model.record_loss(loss);

    TreeBuilder builder(bins, config);
    for (int round = 0; round < config.num_rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(raw[i]);
            grad[i] = w[i] * (p - y[i]);
            hess[i] = w[i] * p * (1.0 - p);
        }
        RegressionTree tree = builder.build(grad, hess, delta);

        double step = config.learning_rate;
        bool accepted = false;
        for (int attempt = 0; attempt < 30; ++attempt, step /= 2.0) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = raw[i] + step * delta[i];
            const double next = mean_logloss(trial, y, w);
            if (next <= loss) {
                loss = next;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        raw.swap(trial);
        tree.shrinkage = step;
        model.add_tree(std::move(tree));
        model.record_loss(loss);
    }
    return model;
}

}  // namespace leiad
