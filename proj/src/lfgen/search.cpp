#include <algorithm>
#include <cmath>
#include <numeric>

#include "leiad/error.hpp"
#include "leiad/lfgen.hpp"
#include "leiad/random.hpp"

#if defined(__SSE2__)
#include <emmintrin.h>
#endif

namespace leiad {

namespace {

// Four running sums break the add dependency chain; every caller uses this
// same summation order, so exact and approximate searches agree bitwise.
double l1(std::span<const double> a, std::span<const double> b) {
    double s[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t d = 0;
    for (; d + 4 <= a.size(); d += 4)
        for (std::size_t j = 0; j < 4; ++j) s[j] += std::abs(a[d + j] - b[d + j]);
    for (; d < a.size(); ++d) s[0] += std::abs(a[d] - b[d]);
    return (s[0] + s[1]) + (s[2] + s[3]);
}

bool closer(const Neighbor& a, const Neighbor& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.index < b.index;
}

// Squared L2 distance (up to the constant |x|^2) from x to every centroid.
// Centroids are stored dimension-major so the inner loop runs over centroids.
void centroid_scores(const float* x, std::size_t dims, const std::vector<float>& centroids_t,
                     const std::vector<float>& centroid_norms, std::vector<float>& out) {
    const std::size_t leaves = centroid_norms.size();
    std::copy(centroid_norms.begin(), centroid_norms.end(), out.begin());
    for (std::size_t d = 0; d < dims; ++d) {
        const float xd = -2.0f * x[d];
        const float* c = centroids_t.data() + d * leaves;
        float* o = out.data();
        for (std::size_t j = 0; j < leaves; ++j) o[j] += xd * c[j];
    }
}

std::uint32_t code_distance(const std::uint8_t* a, const std::uint8_t* b, std::size_t dims) {
    std::size_t d = 0;
    std::uint32_t s = 0;
#if defined(__SSE2__)
    __m128i acc = _mm_setzero_si128();
    for (; d + 16 <= dims; d += 16) {
        const __m128i x = _mm_loadu_si128(reinterpret_cast<const __m128i*>(a + d));
        const __m128i y = _mm_loadu_si128(reinterpret_cast<const __m128i*>(b + d));
        acc = _mm_add_epi64(acc, _mm_sad_epu8(x, y));
    }
    s = static_cast<std::uint32_t>(_mm_cvtsi128_si32(acc) + _mm_extract_epi16(acc, 4));
#endif
    for (; d < dims; ++d) s += static_cast<std::uint32_t>(std::abs(a[d] - b[d]));
    return s;
}

std::size_t argmin(const std::vector<float>& v) {
    return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

struct Centroids {
    std::size_t leaves, dims;
    std::vector<float> rows;  // leaves x dims
    std::vector<float> transposed;
    std::vector<float> norms;

    void refresh() {
        transposed.assign(leaves * dims, 0.0f);
        norms.assign(leaves, 0.0f);
        for (std::size_t j = 0; j < leaves; ++j)
            for (std::size_t d = 0; d < dims; ++d) {
                const float v = rows[j * dims + d];
                transposed[d * leaves + j] = v;
                norms[j] += v * v;
            }
    }
};

}  // namespace

std::vector<Neighbor> exact_l1_search(const RepresentationMatrix& rep, std::size_t query, std::size_t k) {
    require(query < rep.rows, ErrorCode::out_of_range, "query point out of range");
    require(k >= 1 && k < rep.rows, ErrorCode::invalid_argument,
            "k must lie in [1, n - 1]; got " + std::to_string(k) + " for n = " + std::to_string(rep.rows));
    const auto q = rep.row(query);
    std::vector<Neighbor> all;
    all.reserve(rep.rows - 1);
    for (std::size_t i = 0; i < rep.rows; ++i)
        if (i != query) all.push_back({i, l1(q, rep.row(i))});
    std::partial_sort(all.begin(), all.begin() + static_cast<long>(k), all.end(), closer);
    all.resize(k);
    return all;
}

void AnnConfig::validate() const {
    require(number_of_leaves >= 1, ErrorCode::invalid_argument, "ann.number_of_leaves must be >= 1");
    require(number_of_leaves_to_search >= 1 && number_of_leaves_to_search <= number_of_leaves,
            ErrorCode::invalid_argument, "ann.number_of_leaves_to_search must lie in [1, number_of_leaves]");
    require(training_sample_size >= 1, ErrorCode::invalid_argument, "ann.training_sample_size must be >= 1");
    require(reorder >= 1, ErrorCode::invalid_argument, "ann.reorder must be >= 1");
    require(kmeans_iterations >= 0, ErrorCode::invalid_argument, "ann.kmeans_iterations must be >= 0");
    require(spill >= 1, ErrorCode::invalid_argument, "ann.spill must be >= 1");
    require(ann_min_points >= 0, ErrorCode::invalid_argument, "ann.ann_min_points must be >= 0");
}

AnnIndex AnnIndex::build(const RepresentationMatrix& rep, const AnnConfig& config, std::uint64_t seed) {
    config.validate();
    const std::size_t n = rep.rows, dims = rep.dims;
    const auto leaves = static_cast<std::size_t>(config.number_of_leaves);
    require(n >= 1, ErrorCode::invalid_argument, "cannot index an empty representation");
    require(leaves <= n, ErrorCode::invalid_argument,
            "number_of_leaves " + std::to_string(leaves) + " exceeds the " + std::to_string(n) + " points");

    AnnIndex index;
    index.dims_ = dims;
    index.leaves_to_search_ = static_cast<std::size_t>(config.number_of_leaves_to_search);
    index.reorder_ = static_cast<std::size_t>(config.reorder);
    const std::vector<float> data(rep.standardized.begin(), rep.standardized.end());

    Rng rng(seed);
    std::vector<std::uint32_t> sample(n);
    std::iota(sample.begin(), sample.end(), 0u);
    rng.shuffle(std::span<std::uint32_t>(sample));
    sample.resize(std::min(n, static_cast<std::size_t>(config.training_sample_size)));
    if (sample.size() < leaves) {
        // The sample must at least seed every centroid.
        sample.resize(n);
        std::iota(sample.begin(), sample.end(), 0u);
    }

    Centroids c{leaves, dims, std::vector<float>(leaves * dims), {}, {}};
    for (std::size_t j = 0; j < leaves; ++j)
        std::copy_n(data.data() + sample[j] * dims, dims, c.rows.data() + j * dims);
    c.refresh();

    std::vector<float> scores(leaves);
    std::vector<std::uint32_t> label(sample.size());
    std::vector<double> sums(leaves * dims);
    std::vector<std::size_t> counts(leaves);
    for (int iter = 0; iter < config.kmeans_iterations; ++iter) {
        for (std::size_t s = 0; s < sample.size(); ++s) {
            centroid_scores(data.data() + sample[s] * dims, dims, c.transposed, c.norms, scores);
            label[s] = static_cast<std::uint32_t>(argmin(scores));
        }
        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t s = 0; s < sample.size(); ++s) {
            ++counts[label[s]];
            const float* x = data.data() + sample[s] * dims;
            for (std::size_t d = 0; d < dims; ++d) sums[label[s] * dims + d] += x[d];
        }
        for (std::size_t j = 0; j < leaves; ++j) {
            if (counts[j] == 0) {
                const auto pick = sample[rng.index(sample.size())];
                std::copy_n(data.data() + pick * dims, dims, c.rows.data() + j * dims);
                continue;
            }
            for (std::size_t d = 0; d < dims; ++d)
                c.rows[j * dims + d] = static_cast<float>(sums[j * dims + d] / static_cast<double>(counts[j]));
        }
        c.refresh();
    }

    index.centroids_t_ = c.transposed;
    index.centroid_norms_ = c.norms;

    // Quantize with one step for every dimension so code distances stay
    // proportional to L1.
    index.code_offset_.assign(dims, INFINITY);
    std::vector<double> hi(dims, -INFINITY);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t d = 0; d < dims; ++d) {
            index.code_offset_[d] = std::min(index.code_offset_[d], rep.standardized[i * dims + d]);
            hi[d] = std::max(hi[d], rep.standardized[i * dims + d]);
        }
    double range = 0.0;
    for (std::size_t d = 0; d < dims; ++d) range = std::max(range, hi[d] - index.code_offset_[d]);
    index.code_step_ = range > 0.0 ? range / 255.0 : 1.0;

    const std::size_t spill = std::min(leaves, static_cast<std::size_t>(config.spill));
    std::vector<std::uint32_t> nearest(n * spill);
    std::vector<std::uint32_t> order(leaves);
    index.members_.assign(leaves, {});
    index.assignment_.resize(n);
    std::vector<std::size_t> list_sizes(leaves, 0);
    for (std::size_t i = 0; i < n; ++i) {
        centroid_scores(data.data() + i * dims, dims, c.transposed, c.norms, scores);
        std::iota(order.begin(), order.end(), 0u);
        std::partial_sort(order.begin(), order.begin() + static_cast<long>(spill), order.end(),
                          [&](std::uint32_t a, std::uint32_t b) {
                              if (scores[a] != scores[b]) return scores[a] < scores[b];
                              return a < b;
                          });
        std::copy_n(order.begin(), spill, nearest.begin() + static_cast<long>(i * spill));
        index.assignment_[i] = order[0];
        index.members_[order[0]].push_back(static_cast<std::uint32_t>(i));
        for (std::size_t s = 0; s < spill; ++s) ++list_sizes[order[s]];
    }

    index.list_offsets_.assign(leaves + 1, 0);
    for (std::size_t j = 0; j < leaves; ++j) index.list_offsets_[j + 1] = index.list_offsets_[j] + list_sizes[j];
    index.list_ids_.resize(index.list_offsets_[leaves]);
    index.list_codes_.resize(index.list_offsets_[leaves] * dims);
    std::vector<std::size_t> fill(index.list_offsets_.begin(), index.list_offsets_.end() - 1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t s = 0; s < spill; ++s) {
            const std::size_t slot = fill[nearest[i * spill + s]]++;
            index.list_ids_[slot] = static_cast<std::uint32_t>(i);
            index.encode(rep.row(i), index.list_codes_.data() + slot * dims);
        }
    return index;
}

void AnnIndex::encode(std::span<const double> row, std::uint8_t* out) const {
    for (std::size_t d = 0; d < dims_; ++d) {
        const double v = std::round((row[d] - code_offset_[d]) / code_step_);
        out[d] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
}

void AnnIndex::set_leaves_to_search(std::size_t n) {
    require(n >= 1 && n <= members_.size(), ErrorCode::invalid_argument,
            "leaves_to_search must lie in [1, leaves]");
    leaves_to_search_ = n;
}

std::vector<Neighbor> AnnIndex::search(const RepresentationMatrix& rep, std::size_t query, std::size_t k) const {
    require(!members_.empty(), ErrorCode::precondition, "search on an empty index");
    require(rep.rows == assignment_.size() && rep.dims == dims_, ErrorCode::invalid_argument,
            "representation does not match the index");
    require(query < rep.rows, ErrorCode::out_of_range, "query point out of range");
    require(k >= 1 && k <= reorder_ && k < rep.rows, ErrorCode::invalid_argument,
            "k must lie in [1, min(reorder, n - 1)]");

    const std::size_t leaves = members_.size();
    const auto qrow = rep.row(query);
    std::vector<float> q(dims_);
    for (std::size_t d = 0; d < dims_; ++d) q[d] = static_cast<float>(qrow[d]);
    std::vector<float> scores(leaves);
    centroid_scores(q.data(), dims_, centroids_t_, centroid_norms_, scores);
    std::vector<std::uint32_t> probe(leaves);
    std::iota(probe.begin(), probe.end(), 0u);
    const auto nprobe = static_cast<long>(leaves_to_search_);
    std::partial_sort(probe.begin(), probe.begin() + nprobe, probe.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (scores[a] != scores[b]) return scores[a] < scores[b];
        return a < b;
    });

    std::vector<std::uint8_t> qcode(dims_);
    encode(qrow, qcode.data());
    // Per-thread scratch keeps large per-query buffers off the allocator.
    thread_local std::vector<std::uint64_t> seen;
    thread_local std::vector<std::pair<std::uint32_t, std::uint32_t>> approx;  // (code distance, id)
    thread_local std::vector<std::uint32_t> histogram;
    seen.assign((assignment_.size() + 63) / 64, 0);  // spilled copies repeat ids
    seen[query / 64] |= std::uint64_t{1} << (query % 64);
    std::size_t listed = 0;
    for (long p = 0; p < nprobe; ++p) {
        const auto leaf = probe[static_cast<std::size_t>(p)];
        listed += list_offsets_[leaf + 1] - list_offsets_[leaf];
    }
    approx.resize(listed + 1);
    histogram.assign(255 * dims_ + 1, 0);
    std::size_t found = 0;
    for (long p = 0; p < nprobe; ++p) {
        const auto leaf = probe[static_cast<std::size_t>(p)];
        for (std::size_t slot = list_offsets_[leaf]; slot < list_offsets_[leaf + 1]; ++slot) {
            // Branch-free: duplicates are written and then overwritten.
            const auto id = list_ids_[slot];
            const std::uint64_t bit = std::uint64_t{1} << (id % 64);
            const std::uint32_t fresh = (seen[id / 64] & bit) == 0;
            seen[id / 64] |= bit;
            const auto dist = code_distance(list_codes_.data() + slot * dims_, qcode.data(), dims_);
            histogram[dist] += fresh;
            approx[found] = {dist, id};
            found += fresh;
        }
    }
    approx.resize(found);
    // Code distances are small integers, so a histogram finds the cutoff for
    // the `reorder` best in linear time. Ties at the cutoff go to lower ids.
    std::vector<std::uint32_t> candidates;
    if (approx.size() <= reorder_) {
        for (const auto& a : approx) candidates.push_back(a.second);
    } else {
        std::uint32_t cutoff = 0;
        std::size_t below = 0;
        while (below + histogram[cutoff] < reorder_) below += histogram[cutoff++];
        std::vector<std::uint32_t> ties;
        candidates.reserve(reorder_);
        for (const auto& a : approx) {
            if (a.first < cutoff) candidates.push_back(a.second);
            else if (a.first == cutoff) ties.push_back(a.second);
        }
        const auto need = static_cast<long>(reorder_ - below);
        std::nth_element(ties.begin(), ties.begin() + need - 1, ties.end());
        std::sort(ties.begin(), ties.begin() + need);
        candidates.insert(candidates.end(), ties.begin(), ties.begin() + need);
    }

    std::vector<Neighbor> out;
    out.reserve(candidates.size());
    constexpr std::size_t kAhead = 16;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (c + kAhead < candidates.size()) {
            const char* next = reinterpret_cast<const char*>(rep.row(candidates[c + kAhead]).data());
            for (std::size_t b = 0; b < dims_ * sizeof(double); b += 64) __builtin_prefetch(next + b);
        }
        out.push_back({candidates[c], l1(qrow, rep.row(candidates[c]))});
    }
    const std::size_t take = std::min(k, out.size());
    std::partial_sort(out.begin(), out.begin() + static_cast<long>(take), out.end(), closer);
    out.resize(take);
    return out;
}

}  // namespace leiad
