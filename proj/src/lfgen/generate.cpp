#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "leiad/error.hpp"
#include "leiad/lfgen.hpp"

namespace leiad {

VoteSeries GeneratedLF::votes(std::size_t n) const {
    VoteSeries out{lf_id, std::vector<Vote>(n, Vote::abstain)};
    const Vote v = label == 1 ? Vote::anomaly : Vote::normal;
    for (auto m : members) {
        require(m < n, ErrorCode::out_of_range, "LF '" + lf_id + "' has a member beyond the point set");
        out.votes[m] = v;
    }
    return out;
}

GeneratedLF generate_lf(std::size_t point, int label, std::span<const Neighbor> neighbors, double tau,
                        std::string lf_id, int iteration) {
    require(label == 0 || label == 1, ErrorCode::invalid_argument, "LF label must be 0 or 1");
    require(!neighbors.empty(), ErrorCode::invalid_argument, "LF generation needs at least one neighbor");
    require(tau >= 0.0 && std::isfinite(tau), ErrorCode::invalid_argument, "tau must be finite and >= 0");

    const auto n = static_cast<double>(neighbors.size());
    double mean = 0.0;
    for (const auto& nb : neighbors) mean += nb.distance;
    mean /= n;
    double ss = 0.0;
    for (const auto& nb : neighbors) ss += (nb.distance - mean) * (nb.distance - mean);
    const double threshold = mean - tau * std::sqrt(ss / n);

    GeneratedLF lf{std::move(lf_id), label, {point}, iteration};
    for (const auto& nb : neighbors)
        if (nb.distance < threshold) lf.members.push_back(nb.index);
    std::sort(lf.members.begin(), lf.members.end());
    lf.members.erase(std::unique(lf.members.begin(), lf.members.end()), lf.members.end());
    return lf;
}

void append_lf_registry(const std::string& path, const GeneratedLF& lf) {
    require(!lf.lf_id.empty() && lf.lf_id.find_first_of(" \t\n") == std::string::npos,
            ErrorCode::invalid_argument, "LF id must be a non-empty token without whitespace");
    std::ofstream out(path, std::ios::app);
    require(static_cast<bool>(out), ErrorCode::io, "cannot append to " + path);
    out << lf.lf_id << ' ' << lf.label << ' ' << lf.created_at_iteration << ' ' << lf.members.size();
    for (auto m : lf.members) out << ' ' << m;
    out << '\n';
    require(static_cast<bool>(out), ErrorCode::io, "failed writing " + path);
}

std::vector<GeneratedLF> read_lf_registry(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::io, "cannot open " + path);
    std::vector<GeneratedLF> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        GeneratedLF lf;
        std::size_t count = 0;
        ls >> lf.lf_id >> lf.label >> lf.created_at_iteration >> count;
        lf.members.resize(count);
        for (auto& m : lf.members) ls >> m;
        std::string extra;
        require(static_cast<bool>(ls) && !(ls >> extra) && (lf.label == 0 || lf.label == 1), ErrorCode::parse,
                path + ": line " + std::to_string(lineno) + " is not a valid LF record");
        out.push_back(std::move(lf));
    }
    return out;
}

}  // namespace leiad
