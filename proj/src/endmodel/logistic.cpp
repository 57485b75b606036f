#include <cmath>
#include <iomanip>
#include <istream>
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

constexpr double kL2 = 1e-3;

}  // namespace

double LogisticModel::predict(std::span<const double> features) const {
    check_width(features.size());
    double z = bias;
    for (std::size_t f = 0; f < weights.size(); ++f) z += weights[f] * (features[f] - mean[f]) / scale[f];
    return sigmoid(z);
}

void LogisticModel::write(std::ostream& out) const {
    out << "LEIAD-LOGREG-v1\n" << std::setprecision(17);
    out << weights.size() << " " << bias << "\n";
    for (std::size_t f = 0; f < weights.size(); ++f)
        out << mean[f] << " " << scale[f] << " " << weights[f] << "\n";
}

LogisticModel LogisticModel::read(std::istream& in) {
    std::string magic;
    in >> magic;
    require(magic == "LEIAD-LOGREG-v1", ErrorCode::parse, "not a logistic model file");
    LogisticModel m;
    std::size_t nf = 0;
    in >> nf >> m.bias;
    require(static_cast<bool>(in), ErrorCode::parse, "model file: malformed header");
    m.mean.resize(nf);
    m.scale.resize(nf);
    m.weights.resize(nf);
    for (std::size_t f = 0; f < nf; ++f) in >> m.mean[f] >> m.scale[f] >> m.weights[f];
    require(static_cast<bool>(in), ErrorCode::parse, "model file: truncated");
    return m;
}

LogisticModel train_logistic(const TrainingData& data, const EndModelConfig& config) {
    config.validate();
    const std::size_t n = data.size(), nf = data.features.cols;
    require(n > 0, ErrorCode::invalid_argument, "cannot train on an empty label set");

    LogisticModel m;
    m.mean.assign(nf, 0.0);
    m.scale.assign(nf, 1.0);
    m.weights.assign(nf, 0.0);
    for (std::size_t f = 0; f < nf; ++f) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += data.features.at(i, f);
        m.mean[f] = s / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) ss += std::pow(data.features.at(i, f) - m.mean[f], 2);
        const double sd = std::sqrt(ss / static_cast<double>(n));
        m.scale[f] = sd > 0.0 ? sd : 1.0;
    }
    m.bias = std::log(config.class_prior / (1.0 - config.class_prior));

    double total_w = 0.0;
    for (double w : data.weights) total_w += w;
    std::vector<double> x(nf), grad(nf);
    // Full-batch gradient descent; the objective is convex so plain steps suffice.
    const double lr = 0.5;
    for (int epoch = 0; epoch < config.logistic_epochs; ++epoch) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double gb = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double z = m.bias;
            for (std::size_t f = 0; f < nf; ++f) {
                x[f] = (data.features.at(i, f) - m.mean[f]) / m.scale[f];
                z += m.weights[f] * x[f];
            }
            const double r = data.weights[i] * (sigmoid(z) - data.labels[i]);
            gb += r;
            for (std::size_t f = 0; f < nf; ++f) grad[f] += r * x[f];
        }
        m.bias -= lr * gb / total_w;
        for (std::size_t f = 0; f < nf; ++f) m.weights[f] -= lr * (grad[f] / total_w + kL2 * m.weights[f]);
    }
    return m;
}

}  // namespace leiad
