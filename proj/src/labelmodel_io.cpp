#include <cstdio>
#include <set>

#include "leiad/error.hpp"
#include "leiad/labelmodel.hpp"
#include "text.hpp"

namespace leiad {

namespace {
constexpr const char* kWeightsMagic = "LEIAD-LM-v1";

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace

VoteTable make_vote_table(const Dataset& dataset, VoteMatrix matrix) {
    require(matrix.rows() == dataset.total_points(), ErrorCode::invalid_argument,
            "vote matrix rows do not match the dataset");
    VoteTable table;
    table.series_ids.reserve(matrix.rows());
    table.timestamps.reserve(matrix.rows());
    for (const auto& s : dataset.series)
        for (auto t : s.timestamps) {
            table.series_ids.push_back(s.id);
            table.timestamps.push_back(t);
        }
    table.matrix = std::move(matrix);
    return table;
}

std::string format_vote_table(const VoteTable& table) {
    const auto& m = table.matrix;
    std::string out = "series_id,timestamp";
    for (const auto& id : m.lf_ids()) out += "," + id;
    out += '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        out += table.series_ids[r];
        out += ',';
        out += std::to_string(table.timestamps[r]);
        for (std::size_t c = 0; c < m.cols(); ++c) {
            out += ',';
            out += std::to_string(to_int(m.at(r, c)));
        }
        out += '\n';
    }
    return out;
}

VoteTable parse_vote_table(const std::string& text, const std::string& source) {
    const auto lines = text::lines(text);
    require(!lines.empty(), ErrorCode::parse, source + ": empty vote file");
    const auto header = text::split(lines[0], ',');
    require(header.size() >= 2 && header[0] == "series_id" && header[1] == "timestamp", ErrorCode::parse,
            source + ": header must start with series_id,timestamp");
    const std::size_t cols = header.size() - 2;
    std::set<std::string_view> names;
    for (std::size_t c = 0; c < cols; ++c)
        require(!header[c + 2].empty() && names.insert(header[c + 2]).second, ErrorCode::parse,
                source + ": empty or duplicate LF column '" + std::string(header[c + 2]) + "'");

    VoteTable table;
    std::vector<std::vector<Vote>> columns(cols);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (text::trim(lines[i]).empty()) continue;
        const auto where = source + ":" + std::to_string(i + 1) + ": ";
        const auto cells = text::split(lines[i], ',');
        require(cells.size() == header.size(), ErrorCode::parse, where + "expected " +
                std::to_string(header.size()) + " fields, got " + std::to_string(cells.size()));
        const auto ts = text::parse_int(cells[1]);
        require(ts.has_value(), ErrorCode::parse, where + "bad timestamp");
        table.series_ids.emplace_back(cells[0]);
        table.timestamps.push_back(*ts);
        for (std::size_t c = 0; c < cols; ++c) {
            const auto v = text::parse_int(cells[c + 2]);
            require(v && *v >= -1 && *v <= 1, ErrorCode::parse, where + "vote must be -1, 0 or 1");
            columns[c].push_back(vote_from_int(static_cast<int>(*v)));
        }
    }
    table.matrix = VoteMatrix(table.series_ids.size());
    for (std::size_t c = 0; c < cols; ++c) table.matrix.add_column(std::string(header[c + 2]), std::move(columns[c]));
    return table;
}

std::string format_label_model(const LabelModelParams& params, const std::vector<std::string>& lf_ids) {
    require(lf_ids.size() == params.weights.size(), ErrorCode::invalid_argument,
            "one LF id per weight is required");
    std::string out = std::string(kWeightsMagic) + "\n";
    out += "class_prior " + fmt(params.class_prior) + "\n";
    out += "trained_epochs " + std::to_string(params.trained_epochs) + "\n";
    for (std::size_t j = 0; j < lf_ids.size(); ++j) out += lf_ids[j] + " " + fmt(params.weights[j]) + "\n";
    return out;
}

LabelModelParams parse_label_model(const std::string& text, std::vector<std::string>& lf_ids) {
    const auto lines = text::lines(text);
    require(!lines.empty() && text::trim(lines[0]) == kWeightsMagic, ErrorCode::parse,
            std::string("weights file must start with ") + kWeightsMagic);
    LabelModelParams params;
    lf_ids.clear();
    bool have_prior = false;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto line = text::trim(lines[i]);
        if (line.empty()) continue;
        const auto space = line.find(' ');
        require(space != std::string_view::npos, ErrorCode::parse,
                "weights line " + std::to_string(i + 1) + " needs a name and a value");
        const auto key = line.substr(0, space);
        const auto value = text::parse_double(line.substr(space + 1));
        require(value.has_value(), ErrorCode::parse, "weights line " + std::to_string(i + 1) + ": bad number");
        if (key == "class_prior") {
            params.class_prior = *value;
            have_prior = true;
        } else if (key == "trained_epochs") {
            params.trained_epochs = static_cast<int>(*value);
        } else {
            lf_ids.emplace_back(key);
            params.weights.push_back(*value);
        }
    }
    require(have_prior && params.class_prior > 0.0 && params.class_prior < 1.0, ErrorCode::parse,
            "weights file needs class_prior in (0, 1)");
    return params;
}

}  // namespace leiad
