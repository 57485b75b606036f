#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "leiad/features.hpp"
#include "leiad/uad.hpp"

namespace leiad {

/// Per-point vectors used for similarity. `standardized` holds the z-scored
/// rows used for L1 search; `unit` holds the same rows scaled to unit L2 norm
/// for inner products. Zero rows stay zero in `unit`.
struct RepresentationMatrix {
    std::size_t rows = 0;
    std::size_t dims = 0;
    std::vector<double> standardized;
    std::vector<double> unit;
    std::vector<std::size_t> kept_columns;  // source feature column of each dim
    std::uint64_t schema_hash = 0;

    std::span<const double> row(std::size_t i) const { return {standardized.data() + i * dims, dims}; }
    std::span<const double> unit_row(std::size_t i) const { return {unit.data() + i * dims, dims}; }
};

/// Standardizes every feature column over all rows and drops columns with zero
/// variance. Throws if fewer than 2 rows or no column varies.
RepresentationMatrix build_representation(const FeatureMatrix& features);

/// Wraps precomputed embedding rows without standardizing them.
RepresentationMatrix representation_from_embedding(std::vector<double> rows, std::size_t dims);

/// Binary layout: magic, n, k, normalized flag, schema hash, then both blocks.
void save_representation(const RepresentationMatrix& rep, const std::string& path);
RepresentationMatrix load_representation(const std::string& path);

struct Neighbor {
    std::size_t index = 0;
    double distance = 0.0;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Brute-force L1 neighbors of row `query`, excluding the row itself, sorted
/// by (distance, index).
std::vector<Neighbor> exact_l1_search(const RepresentationMatrix& rep, std::size_t query, std::size_t k);

struct AnnConfig {
    int number_of_leaves = 2000;
    int number_of_leaves_to_search = 100;
    int training_sample_size = 250000;
    int reorder = 5000;
    int kmeans_iterations = 10;
    /// Each point is also listed in its `spill` nearest partitions for search.
    int spill = 4;
    /// The pipeline switches from exact to partitioned search at this size.
    int ann_min_points = 200000;

    void validate() const;
};

/// K-means partitioning of the representation rows. Every point belongs to
/// its nearest partition and is also listed under its next `spill - 1`
/// partitions. Searches probe the nearest partitions, shortlist `reorder`
/// candidates by L1 over 8-bit quantized rows, then rescore exactly.
class AnnIndex {
public:
    static AnnIndex build(const RepresentationMatrix& rep, const AnnConfig& config, std::uint64_t seed);

    std::vector<Neighbor> search(const RepresentationMatrix& rep, std::size_t query, std::size_t k) const;

    std::size_t leaves() const { return members_.size(); }
    std::size_t leaves_to_search() const { return leaves_to_search_; }
    std::size_t reorder() const { return reorder_; }
    /// Nearest-centroid assignment, without spilled copies.
    const std::vector<std::vector<std::uint32_t>>& partitions() const { return members_; }
    std::size_t partition_of(std::size_t point) const { return assignment_.at(point); }

    void set_leaves_to_search(std::size_t n);

private:
    void encode(std::span<const double> row, std::uint8_t* out) const;

    std::size_t dims_ = 0;
    std::size_t leaves_to_search_ = 0;
    std::size_t reorder_ = 0;
    std::vector<float> centroids_t_;  // dimension-major
    std::vector<float> centroid_norms_;
    std::vector<std::vector<std::uint32_t>> members_;
    std::vector<std::uint32_t> assignment_;

    // Search lists: leaf j holds ids [list_offsets_[j], list_offsets_[j + 1])
    // of list_ids_, with their codes stored contiguously alongside.
    std::vector<std::size_t> list_offsets_;
    std::vector<std::uint32_t> list_ids_;
    std::vector<std::uint8_t> list_codes_;
    std::vector<double> code_offset_;  // per dimension
    double code_step_ = 1.0;
};

struct GeneratedLF {
    std::string lf_id;
    int label = 0;
    std::vector<std::size_t> members;  // ascending
    int created_at_iteration = 0;

    /// Votes over a universe of `n` points: `label` on members, abstain elsewhere.
    VoteSeries votes(std::size_t n) const;
};

/// Members are the neighbors whose distance is strictly below mu - tau * sigma
/// of the neighbor distances, plus the annotated point itself.
GeneratedLF generate_lf(std::size_t point, int label, std::span<const Neighbor> neighbors, double tau,
                        std::string lf_id, int iteration);

/// One line per LF: `lf_id label iteration count idx idx ...`.
void append_lf_registry(const std::string& path, const GeneratedLF& lf);
std::vector<GeneratedLF> read_lf_registry(const std::string& path);

}  // namespace leiad
