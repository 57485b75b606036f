#include <algorithm>
#include <cmath>

#include "leiad/error.hpp"
#include "leiad/uad.hpp"

namespace leiad::detectors {

namespace {

double median(std::vector<double> v) {
    const std::size_t n = v.size();
    const auto mid = v.begin() + static_cast<long>(n / 2);
    std::nth_element(v.begin(), mid, v.end());
    double m = *mid;
    if (n % 2 == 0) m = (m + *std::max_element(v.begin(), mid)) / 2.0;
    return m;
}

// Weighted local linear fit at x = at over [left, right].
double local_fit(std::span<const double> y, std::span<const double> robustness, std::size_t left,
                 std::size_t right, std::size_t at) {
    const double x0 = static_cast<double>(at);
    const double radius = std::max(x0 - static_cast<double>(left), static_cast<double>(right) - x0);
    double sw = 0.0, sx = 0.0, sy = 0.0;
    std::vector<double> w(right - left + 1);
    for (std::size_t j = left; j <= right; ++j) {
        double wj = 1.0;
        if (radius > 0.0) {
            const double d = std::abs(static_cast<double>(j) - x0) / radius;
            wj = d < 1.0 ? std::pow(1.0 - d * d * d, 3) : 0.0;
        }
        wj *= robustness[j];
        w[j - left] = wj;
        sw += wj;
        sx += wj * static_cast<double>(j);
        sy += wj * y[j];
    }
    if (sw <= 0.0) return y[at];
    const double mx = sx / sw, my = sy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t j = left; j <= right; ++j) {
        const double dx = static_cast<double>(j) - mx;
        sxx += w[j - left] * dx * dx;
        sxy += w[j - left] * dx * (y[j] - my);
    }
    const double span = static_cast<double>(right - left);
    if (std::sqrt(sxx / sw) <= 1e-3 * span) return my;
    return my + (sxy / sxx) * (x0 - mx);
}

}  // namespace

std::vector<double> lowess(std::span<const double> y, double frac, double delta, int iterations) {
    const std::size_t n = y.size();
    require(n >= 2, ErrorCode::precondition, "lowess needs at least 2 points");
    require(frac > 0.0 && frac <= 1.0, ErrorCode::invalid_argument, "lowess frac must lie in (0, 1]");
    const std::size_t k =
        std::clamp<std::size_t>(static_cast<std::size_t>(frac * static_cast<double>(n) + 1e-10), 2, n);

    std::vector<double> fit(n), robustness(n, 1.0);
    for (int iter = 0; iter <= iterations; ++iter) {
        std::size_t left = 0, right = k - 1;
        std::size_t i = 0;
        long last_fit = -1;
        while (true) {
            while (right + 1 < n && i - left > right + 1 - i) {
                ++left;
                ++right;
            }
            fit[i] = local_fit(y, robustness, left, right, i);
            if (last_fit >= 0 && static_cast<std::size_t>(last_fit) + 1 < i) {
                const auto a = static_cast<std::size_t>(last_fit);
                for (std::size_t j = a + 1; j < i; ++j) {
                    const double t = static_cast<double>(j - a) / static_cast<double>(i - a);
                    fit[j] = fit[a] + t * (fit[i] - fit[a]);
                }
            }
            last_fit = static_cast<long>(i);
            if (i + 1 >= n) break;
            // Skip ahead to the last point within delta, fitting at least one step.
            std::size_t next = i + 1;
            while (next + 1 < n && static_cast<double>(next + 1 - i) <= delta) ++next;
            if (static_cast<double>(next - i) > delta && next > i + 1) --next;
            i = next;
        }
        if (iter == iterations) break;

        std::vector<double> residual(n);
        for (std::size_t j = 0; j < n; ++j) residual[j] = std::abs(y[j] - fit[j]);
        const double scale = 6.0 * median(residual);
        if (scale <= 1e-12) break;
        for (std::size_t j = 0; j < n; ++j) {
            const double u = residual[j] / scale;
            robustness[j] = u < 1.0 ? (1.0 - u * u) * (1.0 - u * u) : 0.0;
        }
    }
    return fit;
}

StlDecomposition stl_decompose(std::span<const double> values, int period, double lo_frac,
                               double lo_delta, int robust_iterations) {
    require(period >= 2, ErrorCode::invalid_argument, "stl: period must be at least 2");
    require(lo_frac > 0.0 && lo_frac <= 1.0, ErrorCode::invalid_argument,
            "stl: lo_frac must lie in (0, 1]");
    require(lo_delta >= 0.0 && lo_delta < 1.0, ErrorCode::invalid_argument,
            "stl: lo_delta must lie in [0, 1)");
    require(robust_iterations >= 0, ErrorCode::invalid_argument,
            "stl: robust_iterations must be non-negative");
    const std::size_t n = values.size();
    const auto p = static_cast<std::size_t>(period);
    require(n >= 2 * p, ErrorCode::precondition,
            "stl needs at least 2 * period = " + std::to_string(2 * p) + " points, got " +
                std::to_string(n));

    StlDecomposition out;
    out.trend = lowess(values, lo_frac, lo_delta * static_cast<double>(n), robust_iterations);

    std::vector<double> detrended(n);
    for (std::size_t i = 0; i < n; ++i) detrended[i] = values[i] - out.trend[i];

    std::vector<double> phase_mean(p, 0.0);
    for (std::size_t ph = 0; ph < p; ++ph) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = ph; i < n; i += p) {
            sum += detrended[i];
            ++count;
        }
        phase_mean[ph] = sum / static_cast<double>(count);
    }
    double centre = 0.0;
    for (double m : phase_mean) centre += m;
    centre /= static_cast<double>(p);

    out.seasonal.resize(n);
    out.remainder.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.seasonal[i] = phase_mean[i % p] - centre;
        out.remainder[i] = detrended[i] - out.seasonal[i];
    }
    return out;
}

std::vector<double> stl(std::span<const double> values, int period, double lo_frac, double lo_delta,
                        int robust_iterations) {
    const auto parts = stl_decompose(values, period, lo_frac, lo_delta, robust_iterations);
    const std::size_t n = values.size();
    const double centre = median(parts.remainder);
    std::vector<double> deviation(n);
    for (std::size_t i = 0; i < n; ++i) deviation[i] = std::abs(parts.remainder[i] - centre);

    double scale = 1.4826 * median(deviation);
    if (scale <= 1e-12) {
        scale = 0.0;
        for (double d : deviation) scale += d;
        scale /= static_cast<double>(n);
    }
    if (scale <= 1e-12) scale = 1.0;

    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) scores[i] = deviation[i] / scale;
    return scores;
}

}  // namespace leiad::detectors
