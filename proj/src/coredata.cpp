#include "leiad/coredata.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "leiad/error.hpp"
#include "leiad/random.hpp"
#include "text.hpp"

namespace leiad {

namespace text {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::io, "cannot write file: " + path);
    out << contents;
    if (!out) fail(ErrorCode::io, "write failed: " + path);
}

}  // namespace text

Vote vote_from_int(int v) {
    require(v >= -1 && v <= 1, ErrorCode::invalid_argument,
            "vote must be -1, 0 or 1, got " + std::to_string(v));
    return static_cast<Vote>(v);
}

Point Series::point(std::size_t i) const {
    Point p{timestamps.at(i), values.at(i), std::nullopt};
    if (has_truth()) p.truth = truth[i];
    return p;
}

void Series::validate() const {
    require(!values.empty(), ErrorCode::invalid_argument, "series '" + id + "' is empty");
    require(timestamps.size() == values.size(), ErrorCode::invalid_argument,
            "series '" + id + "': timestamp/value length mismatch");
    require(truth.empty() || truth.size() == values.size(), ErrorCode::invalid_argument,
            "series '" + id + "': label length mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
        require(std::isfinite(values[i]), ErrorCode::invalid_argument,
                "series '" + id + "': non-finite value at index " + std::to_string(i));
        if (i > 0)
            require(timestamps[i] > timestamps[i - 1], ErrorCode::invalid_argument,
                    "series '" + id + "': timestamps not strictly increasing at index " +
                        std::to_string(i));
        if (!truth.empty())
            require(truth[i] == 0 || truth[i] == 1, ErrorCode::invalid_argument,
                    "series '" + id + "': label outside {0,1} at index " + std::to_string(i));
    }
}

void DatasetParams::validate() const {
    require(anomaly_percentage > 0.0 && anomaly_percentage < 100.0, ErrorCode::invalid_argument,
            "anomaly_percentage must lie in (0, 100)");
    require(weak_supervision_ratio > 0.0 && weak_supervision_ratio <= 1.0,
            ErrorCode::invalid_argument, "weak_supervision_ratio must lie in (0, 1]");
    require(length_of_segment > 0, ErrorCode::invalid_argument,
            "length_of_segment must be positive");
    require(number_of_neighbors > 0, ErrorCode::invalid_argument,
            "number_of_neighbors must be positive");
}

std::size_t Dataset::total_points() const {
    std::size_t n = 0;
    for (const auto& s : series) n += s.size();
    return n;
}

bool Dataset::has_truth() const {
    return !series.empty() &&
           std::all_of(series.begin(), series.end(), [](const Series& s) { return s.has_truth(); });
}

std::optional<std::size_t> Dataset::index_of(const std::string& id) const {
    for (std::size_t i = 0; i < series.size(); ++i)
        if (series[i].id == id) return i;
    return std::nullopt;
}

const Series& Dataset::find(const std::string& id) const {
    const auto idx = index_of(id);
    if (!idx) fail(ErrorCode::not_found, "unknown series: " + id);
    return series[*idx];
}

PointIndex::PointIndex(const Dataset& dataset) {
    offsets_.reserve(dataset.series.size() + 1);
    offsets_.push_back(0);
    for (const auto& s : dataset.series) offsets_.push_back(offsets_.back() + s.size());
}

std::pair<std::size_t, std::size_t> PointIndex::locate(std::size_t global) const {
    require(global < size(), ErrorCode::out_of_range,
            "point index " + std::to_string(global) + " out of range");
    const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), global);
    const auto series = static_cast<std::size_t>(it - offsets_.begin()) - 1;
    return {series, global - offsets_[series]};
}

namespace {

struct RawRow {
    std::int64_t timestamp;
    double value;
    int label;
    std::size_t line;
};

}  // namespace

Dataset parse_dataset(const std::string& contents, const ColumnMapping& schema,
                      const std::string& source) {
    const auto all_lines = text::lines(contents);
    std::size_t header_line = 0;
    while (header_line < all_lines.size() && text::trim(all_lines[header_line]).empty())
        ++header_line;
    require(header_line < all_lines.size(), ErrorCode::parse, source + ": missing header row");

    const auto header = text::split(all_lines[header_line], schema.delimiter);
    auto column = [&](const std::string& name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        return std::nullopt;
    };
    const auto id_col = column(schema.series_id);
    const auto ts_col = column(schema.timestamp);
    const auto value_col = column(schema.value);
    const auto label_col = column(schema.label);
    require(id_col && ts_col && value_col, ErrorCode::parse,
            source + ": header must contain columns '" + schema.series_id + "', '" +
                schema.timestamp + "', '" + schema.value + "'");

    std::vector<std::string> errors;
    auto report = [&](std::size_t line, const std::string& what) {
        errors.push_back("row " + std::to_string(line + 1) + ": " + what);
    };

    std::vector<std::string> order;
    std::unordered_map<std::string, std::vector<RawRow>> rows;
    for (std::size_t ln = header_line + 1; ln < all_lines.size(); ++ln) {
        if (text::trim(all_lines[ln]).empty()) continue;
        const auto cells = text::split(all_lines[ln], schema.delimiter);
        const std::size_t needed = std::max({*id_col, *ts_col, *value_col}) + 1;
        if (cells.size() < needed) {
            report(ln, "expected at least " + std::to_string(needed) + " columns");
            continue;
        }
        const std::string id(cells[*id_col]);
        if (id.empty()) {
            report(ln, "empty series id");
            continue;
        }
        const auto ts = text::parse_int(cells[*ts_col]);
        if (!ts) {
            report(ln, "unparseable timestamp '" + std::string(cells[*ts_col]) + "'");
            continue;
        }
        const auto value = text::parse_double(cells[*value_col]);
        if (!value) {
            report(ln, "unparseable value '" + std::string(cells[*value_col]) + "'");
            continue;
        }
        if (!std::isfinite(*value)) {
            report(ln, "non-finite value");
            continue;
        }
        int label = -1;
        if (label_col && *label_col < cells.size() && !cells[*label_col].empty()) {
            const auto l = text::parse_int(cells[*label_col]);
            if (!l || (*l != 0 && *l != 1)) {
                report(ln, "label outside {0,1}: '" + std::string(cells[*label_col]) + "'");
                continue;
            }
            label = static_cast<int>(*l);
        }
        auto [it, inserted] = rows.try_emplace(id);
        if (inserted) order.push_back(id);
        it->second.push_back({*ts, *value, label, ln});
    }

    Dataset dataset;
    for (const auto& id : order) {
        auto& series_rows = rows[id];
        std::stable_sort(series_rows.begin(), series_rows.end(),
                         [](const RawRow& a, const RawRow& b) { return a.timestamp < b.timestamp; });
        Series s;
        s.id = id;
        bool any_label = false;
        bool all_label = true;
        for (std::size_t i = 0; i < series_rows.size(); ++i) {
            if (i > 0 && series_rows[i].timestamp == series_rows[i - 1].timestamp) {
                report(series_rows[i].line, "duplicate timestamp " +
                                                std::to_string(series_rows[i].timestamp) +
                                                " in series '" + id + "'");
                continue;
            }
            s.timestamps.push_back(series_rows[i].timestamp);
            s.values.push_back(series_rows[i].value);
            s.truth.push_back(static_cast<std::int8_t>(series_rows[i].label));
            any_label |= series_rows[i].label >= 0;
            all_label &= series_rows[i].label >= 0;
        }
        if (any_label && !all_label) {
            report(series_rows.front().line, "series '" + id + "' has labels on some rows only");
        }
        if (!all_label) s.truth.clear();
        dataset.series.push_back(std::move(s));
    }

    if (!errors.empty()) {
        std::sort(errors.begin(), errors.end(), [](const std::string& a, const std::string& b) {
            auto num = [](const std::string& e) { return std::stoul(e.substr(4)); };
            return num(a) < num(b);
        });
        std::string message = source + ": " + std::to_string(errors.size()) + " rejected row(s)";
        const std::size_t shown = std::min<std::size_t>(errors.size(), 20);
        for (std::size_t i = 0; i < shown; ++i) message += "\n  " + errors[i];
        if (shown < errors.size()) message += "\n  ...";
        fail(ErrorCode::parse, message);
    }
    require(!dataset.series.empty(), ErrorCode::parse, source + ": no data rows");
    return dataset;
}

Dataset load_dataset(const std::string& path, const ColumnMapping& schema) {
    return parse_dataset(text::read_file(path), schema, path);
}

std::string format_dataset(const Dataset& dataset) {
    const bool labels = dataset.has_truth();
    std::ostringstream out;
    out.precision(17);
    out << "series_id,timestamp,value" << (labels ? ",label" : "") << '\n';
    for (const auto& s : dataset.series) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            out << s.id << ',' << s.timestamps[i] << ',' << s.values[i];
            if (labels) out << ',' << static_cast<int>(s.truth[i]);
            out << '\n';
        }
    }
    return out.str();
}

void write_dataset(const Dataset& dataset, const std::string& path) {
    text::write_file(path, format_dataset(dataset));
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& dataset, double test_fraction,
                                             std::uint64_t seed) {
    require(test_fraction > 0.0 && test_fraction < 1.0, ErrorCode::invalid_argument,
            "test_fraction must lie in (0, 1)");
    const std::size_t n = dataset.series.size();
    require(n >= 2, ErrorCode::precondition, "need at least 2 series to split");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(std::span<std::size_t>(order));

    auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
    n_test = std::clamp<std::size_t>(n_test, 1, n - 1);

    std::vector<std::size_t> test_idx(order.begin(), order.begin() + static_cast<long>(n_test));
    std::vector<std::size_t> train_idx(order.begin() + static_cast<long>(n_test), order.end());
    std::sort(test_idx.begin(), test_idx.end());
    std::sort(train_idx.begin(), train_idx.end());

    Dataset train, test;
    train.params = test.params = dataset.params;
    for (auto i : train_idx) train.series.push_back(dataset.series[i]);
    for (auto i : test_idx) test.series.push_back(dataset.series[i]);
    return {std::move(train), std::move(test)};
}

Segment extract_segment(const Series& series, std::size_t center_index, std::size_t length) {
    const std::size_t n = series.size();
    require(center_index < n, ErrorCode::out_of_range,
            "segment center " + std::to_string(center_index) + " outside series of length " +
                std::to_string(n));
    require(length > 0, ErrorCode::invalid_argument, "segment length must be positive");
    Segment seg;
    seg.series_id = series.id;
    seg.center_index = center_index;
    if (length >= n) {
        seg.start_index = 0;
        seg.end_index = n - 1;
        return seg;
    }
    const std::size_t half = length / 2;
    std::size_t start = center_index >= half ? center_index - half : 0;
    start = std::min(start, n - length);
    seg.start_index = start;
    seg.end_index = start + length - 1;
    return seg;
}

}  // namespace leiad
