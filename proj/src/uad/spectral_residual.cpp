#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

#include "leiad/error.hpp"
#include "leiad/uad.hpp"

namespace leiad::detectors {

namespace {

constexpr double kEps = 1e-8;

// FFTW planning is not thread safe.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::vector<std::complex<double>> transform(const std::vector<std::complex<double>>& in,
                                            int direction) {
    const int n = static_cast<int>(in.size());
    std::vector<std::complex<double>> out(in.size());
    auto* src = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data()));
    auto* dst = reinterpret_cast<fftw_complex*>(out.data());
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_1d(n, src, dst, direction, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    if (direction == FFTW_BACKWARD)
        for (auto& c : out) c /= static_cast<double>(n);
    return out;
}

// Trailing moving average; the first n-1 entries average what is available.
std::vector<double> average_filter(const std::vector<double>& values, std::size_t window) {
    std::vector<double> out(values.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        sum += values[i];
        if (i >= window) sum -= values[i - window];
        out[i] = sum / static_cast<double>(std::min(i + 1, window));
    }
    return out;
}

double predict_next(std::span<const double> values) {
    const std::size_t n = values.size();
    const double last = values[n - 1];
    double slope_sum = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        slope_sum += (last - values[i]) / static_cast<double>(n - 1 - i);
    return values[1] + slope_sum;
}

std::vector<double> extend_series(std::span<const double> values, std::size_t extend_num,
                                  std::size_t look_ahead) {
    std::vector<double> out(values.begin(), values.end());
    if (values.size() < look_ahead + 2) return out;
    const auto window = values.subspan(values.size() - look_ahead - 2, look_ahead + 1);
    const double next = predict_next(window);
    out.insert(out.end(), extend_num, next);
    return out;
}

}  // namespace

std::vector<double> spectral_residual(std::span<const double> values, int mag_window,
                                      int score_window) {
    require(mag_window >= 1 && score_window >= 1, ErrorCode::invalid_argument,
            "spectral residual: windows must be positive");
    require(values.size() >= 8, ErrorCode::precondition,
            "spectral residual needs at least 8 points");

    const auto extended = extend_series(values, 5, 5);
    const std::size_t n = extended.size();

    std::vector<std::complex<double>> signal(n);
    for (std::size_t i = 0; i < n; ++i) signal[i] = {extended[i], 0.0};
    auto spectrum = transform(signal, FFTW_FORWARD);

    std::vector<double> magnitude(n), log_mag(n);
    std::vector<bool> tiny(n);
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        magnitude[i] = std::abs(spectrum[i]);
        peak = std::max(peak, magnitude[i]);
    }
    // Bins at round-off level relative to the peak carry no signal.
    const double floor = std::max(kEps, peak * 1e-10);
    for (std::size_t i = 0; i < n; ++i) {
        tiny[i] = magnitude[i] <= floor;
        log_mag[i] = tiny[i] ? 0.0 : std::log(magnitude[i]);
    }
    const auto smoothed = average_filter(log_mag, static_cast<std::size_t>(mag_window));
    for (std::size_t i = 0; i < n; ++i) {
        if (tiny[i]) {
            spectrum[i] = 0.0;
        } else {
            const double residual = std::exp(log_mag[i] - smoothed[i]);
            spectrum[i] *= residual / magnitude[i];
        }
    }
    const auto wave = transform(spectrum, FFTW_BACKWARD);

    std::vector<double> saliency(n);
    for (std::size_t i = 0; i < n; ++i) saliency[i] = std::abs(wave[i]);
    const auto local = average_filter(saliency, static_cast<std::size_t>(score_window));

    std::vector<double> scores(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        scores[i] = local[i] > kEps ? std::abs(saliency[i] - local[i]) / local[i] : 0.0;
    }
    return scores;
}

}  // namespace leiad::detectors
