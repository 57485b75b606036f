#include <cmath>
#include <cstring>
#include <fstream>

#include "leiad/error.hpp"
#include "leiad/lfgen.hpp"

namespace leiad {

namespace {

constexpr char kMagic[8] = {'L', 'E', 'I', 'A', 'D', 'R', 'P', '1'};

void fill_unit(RepresentationMatrix& rep) {
    rep.unit.assign(rep.standardized.size(), 0.0);
    for (std::size_t i = 0; i < rep.rows; ++i) {
        const auto r = rep.row(i);
        double norm = 0.0;
        for (double x : r) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        for (std::size_t d = 0; d < rep.dims; ++d) rep.unit[i * rep.dims + d] = r[d] / norm;
    }
}

template <typename T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

}  // namespace

RepresentationMatrix build_representation(const FeatureMatrix& features) {
    require(features.rows >= 2, ErrorCode::precondition,
            "a representation needs at least 2 points to standardize");
    const std::size_t n = features.rows;
    std::vector<double> mean(features.cols, 0.0), sd(features.cols, 0.0);
    RepresentationMatrix rep;
    for (std::size_t f = 0; f < features.cols; ++f) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += features.at(i, f);
        mean[f] = s / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) ss += (features.at(i, f) - mean[f]) * (features.at(i, f) - mean[f]);
        sd[f] = std::sqrt(ss / static_cast<double>(n));
        // Relative floor so columns that are constant up to rounding count as constant.
        if (sd[f] > 1e-12 * std::max(1.0, std::abs(mean[f]))) rep.kept_columns.push_back(f);
    }
    require(!rep.kept_columns.empty(), ErrorCode::precondition,
            "every feature is constant over the training set; no representation is possible");
    rep.rows = n;
    rep.dims = rep.kept_columns.size();
    rep.schema_hash = feature_schema_hash();
    rep.standardized.resize(n * rep.dims);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t d = 0; d < rep.dims; ++d) {
            const auto f = rep.kept_columns[d];
            rep.standardized[i * rep.dims + d] = (features.at(i, f) - mean[f]) / sd[f];
        }
    fill_unit(rep);
    return rep;
}

RepresentationMatrix representation_from_embedding(std::vector<double> rows, std::size_t dims) {
    require(dims > 0 && rows.size() % dims == 0, ErrorCode::invalid_argument,
            "embedding size is not a multiple of its dimension");
    for (double x : rows) require(std::isfinite(x), ErrorCode::invalid_argument, "embedding has non-finite entries");
    RepresentationMatrix rep;
    rep.rows = rows.size() / dims;
    rep.dims = dims;
    rep.standardized = std::move(rows);
    for (std::size_t d = 0; d < dims; ++d) rep.kept_columns.push_back(d);
    fill_unit(rep);
    return rep;
}

void save_representation(const RepresentationMatrix& rep, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorCode::io, "cannot write " + path);
    out.write(kMagic, sizeof kMagic);
    put<std::uint64_t>(out, rep.rows);
    put<std::uint64_t>(out, rep.dims);
    put<std::uint8_t>(out, 1);
    put<std::uint64_t>(out, rep.schema_hash);
    for (auto c : rep.kept_columns) put<std::uint64_t>(out, c);
    out.write(reinterpret_cast<const char*>(rep.standardized.data()),
              static_cast<std::streamsize>(rep.standardized.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(rep.unit.data()),
              static_cast<std::streamsize>(rep.unit.size() * sizeof(double)));
    require(static_cast<bool>(out), ErrorCode::io, "failed writing " + path);
}

RepresentationMatrix load_representation(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorCode::io, "cannot open " + path);
    char magic[8];
    in.read(magic, sizeof magic);
    require(static_cast<bool>(in) && std::memcmp(magic, kMagic, sizeof kMagic) == 0, ErrorCode::parse,
            path + " is not a representation file");
    RepresentationMatrix rep;
    rep.rows = take<std::uint64_t>(in);
    rep.dims = take<std::uint64_t>(in);
    const auto normalized = take<std::uint8_t>(in);
    rep.schema_hash = take<std::uint64_t>(in);
    require(static_cast<bool>(in) && normalized == 1 && rep.dims > 0 && rep.dims < (1u << 20) &&
                rep.rows < (1ull << 32),
            ErrorCode::parse, path + ": malformed header");
    rep.kept_columns.resize(rep.dims);
    for (auto& c : rep.kept_columns) c = take<std::uint64_t>(in);
    rep.standardized.resize(rep.rows * rep.dims);
    rep.unit.resize(rep.rows * rep.dims);
    in.read(reinterpret_cast<char*>(rep.standardized.data()),
            static_cast<std::streamsize>(rep.standardized.size() * sizeof(double)));
    in.read(reinterpret_cast<char*>(rep.unit.data()), static_cast<std::streamsize>(rep.unit.size() * sizeof(double)));
    require(static_cast<bool>(in), ErrorCode::parse, path + ": truncated");
    return rep;
}

}  // namespace leiad
