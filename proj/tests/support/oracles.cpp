#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oracle {

std::array<Eigen::Vector3d, nns::kNumLandmarks> shape(const nns::ShapeModel& model,
                                                      const Eigen::VectorXd& alpha)
{
    std::array<Eigen::Vector3d, nns::kNumLandmarks> out;
    for (int j = 0; j < nns::kNumLandmarks; ++j) {
        const int v = model.annotation()[static_cast<std::size_t>(j)];
        for (int c = 0; c < 3; ++c) {
            double value = model.mean()(3 * v + c);
            for (int k = 0; k < model.num_components(); ++k) {
                value += alpha(k) * model.sigmas()(k) * model.components()(3 * v + c, k);
            }
            out[static_cast<std::size_t>(j)](c) = value;
        }
    }
    return out;
}

Eigen::Vector2d project(const Eigen::Matrix<double, 3, 4>& m, const Eigen::Vector3d& p)
{
    return {m(0, 0) * p.x() + m(0, 1) * p.y() + m(0, 2) * p.z() + m(0, 3),
            m(1, 0) * p.x() + m(1, 1) * p.y() + m(1, 2) * p.z() + m(1, 3)};
}

double butterworth_gain(double f, double low, double high, int order, double fs)
{
    const auto warp = [fs](double hz) { return 2.0 * fs * std::tan(std::numbers::pi * hz / fs); };
    const double w = warp(f);
    const double wl = warp(low);
    const double wh = warp(high);
    if (w == 0.0) {
        return 0.0;
    }
    const double ratio = (w * w - wl * wh) / (w * (wh - wl));
    return 1.0 / std::sqrt(1.0 + std::pow(ratio * ratio, order / 2));
}

std::vector<std::size_t> peaks(const std::vector<double>& x, const nns::QuantParams& params,
                               double sample_rate)
{
    const std::size_t n = x.size();
    double threshold = 0.0;
    for (const double v : x) {
        threshold += params.threshold_mode == nns::ThresholdMode::mean_abs ? std::fabs(v) : v;
    }
    threshold /= static_cast<double>(n);

    // Every index: find the flat run around it, keep it when the run is
    // bounded by strictly lower samples and the index is the run's floor midpoint.
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t lo = i;
        std::size_t hi = i;
        while (lo > 0 && x[lo - 1] == x[i]) --lo;
        while (hi + 1 < n && x[hi + 1] == x[i]) ++hi;
        if (lo == 0 || hi + 1 == n) continue;
        if (!(x[lo - 1] < x[i] && x[hi + 1] < x[i])) continue;
        if (i != (lo + hi) / 2) continue;
        if (x[i] > threshold) candidates.push_back(i);
    }

    const double d = params.min_peak_distance_s * sample_rate;
    std::vector<bool> alive(candidates.size(), true);
    std::vector<std::size_t> kept;
    for (;;) {
        std::size_t best = candidates.size();
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            if (alive[c] && (best == candidates.size() || x[candidates[c]] > x[candidates[best]])) {
                best = c;
            }
        }
        if (best == candidates.size()) break;
        kept.push_back(candidates[best]);
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            const double gap = std::fabs(static_cast<double>(candidates[c]) - static_cast<double>(candidates[best]));
            // Spacing is measured in samples against the time limit, with the
            // same 1e-9 tolerance for limits that are whole sample counts.
            if (gap < d - 1e-9) alive[c] = false;
        }
        alive[best] = false;
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

std::vector<Run> runs(const std::vector<nns::CycleEvent>& cycles, const nns::QuantParams& params)
{
    std::vector<Run> out;
    for (std::size_t i = 0; i < cycles.size();) {
        std::size_t j = i;
        while (j + 1 < cycles.size() && cycles[j + 1].segment == cycles[j].segment &&
               cycles[j + 1].time - cycles[j].time <= params.max_intra_burst_gap_s) {
            ++j;
        }
        const std::size_t count = j - i + 1;
        out.push_back({i, count, static_cast<int>(count) >= params.min_cycles_per_burst});
        i = j + 1;
    }
    return out;
}

} // namespace oracle
