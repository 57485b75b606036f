#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace leiad {

/// Labeling-function vote. Abstain is stored as -1 so a column can be written
/// out verbatim.
enum class Vote : std::int8_t { abstain = -1, normal = 0, anomaly = 1 };

constexpr int to_int(Vote v) { return static_cast<int>(v); }
Vote vote_from_int(int v);

struct Point {
    std::int64_t timestamp = 0;
    double value = 0.0;
    std::optional<int> truth;
};

/// One univariate series, stored column-wise. `truth` is either empty (no
/// labels at all) or holds one 0/1 entry per point.
struct Series {
    std::string id;
    std::vector<std::int64_t> timestamps;
    std::vector<double> values;
    std::vector<std::int8_t> truth;

    std::size_t size() const { return values.size(); }
    bool has_truth() const { return !truth.empty(); }
    Point point(std::size_t i) const;

    /// Throws if timestamps are not strictly increasing, a value is not
    /// finite, or a label is outside {0, 1}.
    void validate() const;
};

/// Per-dataset knobs; names match the config file keys.
struct DatasetParams {
    double anomaly_percentage = 1.0;
    double weak_supervision_ratio = 0.1;
    int length_of_segment = 400;
    int number_of_neighbors = 200;

    void validate() const;
};

struct Dataset {
    std::vector<Series> series;
    DatasetParams params;

    std::size_t total_points() const;
    bool has_truth() const;
    const Series& find(const std::string& id) const;
    std::optional<std::size_t> index_of(const std::string& id) const;
};

/// Flat addressing of every point of a dataset: global index i maps to
/// (series, local index) in series order.
class PointIndex {
public:
    PointIndex() = default;
    explicit PointIndex(const Dataset& dataset);

    std::size_t size() const { return offsets_.empty() ? 0 : offsets_.back(); }
    std::size_t series_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t offset(std::size_t series) const { return offsets_.at(series); }
    std::size_t global(std::size_t series, std::size_t local) const { return offsets_.at(series) + local; }
    std::pair<std::size_t, std::size_t> locate(std::size_t global) const;

private:
    std::vector<std::size_t> offsets_;
};

struct Segment {
    std::string series_id;
    std::size_t start_index = 0;
    std::size_t end_index = 0;  // inclusive
    std::size_t center_index = 0;

    std::size_t length() const { return end_index - start_index + 1; }
    bool contains(std::size_t i) const { return i >= start_index && i <= end_index; }
};

struct ColumnMapping {
    std::string series_id = "series_id";
    std::string timestamp = "timestamp";
    std::string value = "value";
    std::string label = "label";
    char delimiter = ',';
};

/// Reads `series_id,timestamp,value[,label]` rows. Every bad row is collected
/// and reported together, numbered from 1 for the header line.
Dataset load_dataset(const std::string& path, const ColumnMapping& schema = {});
Dataset parse_dataset(const std::string& text, const ColumnMapping& schema = {},
                      const std::string& source = "<memory>");

void write_dataset(const Dataset& dataset, const std::string& path);
std::string format_dataset(const Dataset& dataset);

/// Whole-series split by seeded shuffle. Returns (train, test).
std::pair<Dataset, Dataset> split_train_test(const Dataset& dataset, double test_fraction,
                                             std::uint64_t seed);

/// Window of at most `length` points around `center_index`, with the center
/// at offset floor(length/2) unless the window is clamped at a boundary.
Segment extract_segment(const Series& series, std::size_t center_index, std::size_t length);

}  // namespace leiad
