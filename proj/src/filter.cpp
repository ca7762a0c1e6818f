#include "nns/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nns/error.hpp"

namespace nns {

using cplx = std::complex<double>;

void FilterSpec::validate(double sample_rate) const
{
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
        throw Error(ErrorKind::parameter, "sample rate must be positive");
    }
    if (order < 2 || order % 2 != 0) {
        throw Error(ErrorKind::parameter,
                    "filter order must be an even integer >= 2, got " + std::to_string(order));
    }
    if (!(low_cut_hz > 0.0) || !std::isfinite(low_cut_hz)) {
        throw Error(ErrorKind::parameter, "low cutoff must be > 0 Hz");
    }
    if (!(high_cut_hz > low_cut_hz) || !std::isfinite(high_cut_hz)) {
        throw Error(ErrorKind::parameter, "high cutoff must exceed the low cutoff");
    }
    const double nyquist = 0.5 * sample_rate;
    if (high_cut_hz >= nyquist) {
        throw Error(ErrorKind::cutoff, "high cutoff " + std::to_string(high_cut_hz) +
                                           " Hz is not below Nyquist " + std::to_string(nyquist) +
                                           " Hz");
    }
}

namespace {

std::array<double, 2> biquad_steady_state(const Biquad& s)
{
    // Transposed direct form II state that holds the output constant for a
    // unit-step input: (I - A^T) zi = b[1:] - a[1:] * b[0].
    const double b1 = s.b[1] - s.a[1] * s.b[0];
    const double b2 = s.b[2] - s.a[2] * s.b[0];
    const double det = (1.0 + s.a[1]) + s.a[2];
    const double z0 = (b1 + b2) / det;
    const double z1 = b2 - s.a[2] * z0;
    return {z0, z1};
}

cplx section_response(const Biquad& s, cplx zinv)
{
    const cplx num = s.b[0] + zinv * (s.b[1] + zinv * s.b[2]);
    const cplx den = s.a[0] + zinv * (s.a[1] + zinv * s.a[2]);
    return num / den;
}

} // namespace

FilterKernel::FilterKernel(FilterSpec spec, double sample_rate, std::vector<Biquad> sections)
    : spec_(spec), sample_rate_(sample_rate), sections_(std::move(sections))
{
    double scale = 1.0;
    for (const auto& s : sections_) {
        auto zi = biquad_steady_state(s);
        steady_state_.push_back({scale * zi[0], scale * zi[1]});
        scale *= (s.b[0] + s.b[1] + s.b[2]) / (s.a[0] + s.a[1] + s.a[2]);
    }
}

cplx FilterKernel::response(double frequency_hz) const
{
    const double omega = 2.0 * std::numbers::pi * frequency_hz / sample_rate_;
    const cplx zinv = std::polar(1.0, -omega);
    cplx h = 1.0;
    for (const auto& s : sections_) {
        h *= section_response(s, zinv);
    }
    return h;
}

std::vector<cplx> FilterKernel::poles() const
{
    std::vector<cplx> out;
    for (const auto& s : sections_) {
        const cplx disc = std::sqrt(cplx(s.a[1] * s.a[1] - 4.0 * s.a[2], 0.0));
        out.push_back((-s.a[1] + disc) / 2.0);
        out.push_back((-s.a[1] - disc) / 2.0);
    }
    return out;
}

std::vector<double> FilterKernel::run(std::span<const double> x, double initial_level) const
{
    std::vector<double> y(x.begin(), x.end());
    for (std::size_t k = 0; k < sections_.size(); ++k) {
        const auto& s = sections_[k];
        double z0 = steady_state_[k][0] * initial_level;
        double z1 = steady_state_[k][1] * initial_level;
        for (double& v : y) {
            const double in = v;
            const double out = s.b[0] * in + z0;
            z0 = s.b[1] * in - s.a[1] * out + z1;
            z1 = s.b[2] * in - s.a[2] * out;
            v = out;
        }
    }
    return y;
}

std::vector<double> FilterKernel::filter(std::span<const double> x) const
{
    if (x.size() < min_length()) {
        throw Error(ErrorKind::length, "signal of " + std::to_string(x.size()) +
                                           " samples is shorter than the " +
                                           std::to_string(min_length()) + " the filter needs");
    }
    return run(x, x.front());
}

std::vector<double> FilterKernel::filtfilt(std::span<const double> x) const
{
    if (x.size() < min_length()) {
        throw Error(ErrorKind::length, "signal of " + std::to_string(x.size()) +
                                           " samples is shorter than the " +
                                           std::to_string(min_length()) +
                                           " zero-phase filtering needs");
    }
    const std::size_t pad = padding_length();
    const std::size_t n = x.size();
    std::vector<double> ext;
    ext.reserve(n + 2 * pad);
    for (std::size_t i = pad; i >= 1; --i) {
        ext.push_back(2.0 * x[0] - x[i]);
    }
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 1; i <= pad; ++i) {
        ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);
    }
    std::vector<double> forward = run(ext, ext.front());
    std::reverse(forward.begin(), forward.end());
    std::vector<double> backward = run(forward, forward.front());
    std::reverse(backward.begin(), backward.end());
    return {backward.begin() + static_cast<std::ptrdiff_t>(pad),
            backward.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

std::vector<double> FilterKernel::apply(std::span<const double> x) const
{
    return spec_.zero_phase ? filtfilt(x) : filter(x);
}

std::vector<double> FilterKernel::impulse_response(std::size_t length) const
{
    std::vector<double> impulse(length, 0.0);
    if (length > 0) {
        impulse[0] = 1.0;
    }
    return run(impulse, 0.0);
}

FilterKernel design_bandpass(const FilterSpec& spec, double sample_rate)
{
    spec.validate(sample_rate);
    using std::numbers::pi;
    const int prototype_order = spec.order / 2;
    const double fs2 = 2.0 * sample_rate;
    const double w_low = fs2 * std::tan(pi * spec.low_cut_hz / sample_rate);
    const double w_high = fs2 * std::tan(pi * spec.high_cut_hz / sample_rate);
    const double bandwidth = w_high - w_low;
    const double center_sq = w_low * w_high;

    const auto to_digital = [fs2](cplx s) { return (fs2 + s) / (fs2 - s); };
    const auto bandpass_roots = [&](cplx p) {
        const cplx half = 0.5 * p * bandwidth;
        const cplx disc = std::sqrt(half * half - center_sq);
        return std::array<cplx, 2>{half + disc, half - disc};
    };
    const auto section_from = [](cplx p1, cplx p2) {
        Biquad s;
        s.b = {1.0, 0.0, -1.0}; // zeros at z = 1 and z = -1
        s.a = {1.0, -(p1 + p2).real(), (p1 * p2).real()};
        return s;
    };

    std::vector<Biquad> sections;
    for (int k = 0; k < prototype_order; ++k) {
        const cplx p = std::polar(1.0, pi * (2.0 * k + prototype_order + 1) / (2.0 * prototype_order));
        if (p.imag() > 1e-12) {
            // Each upper-half-plane prototype pole yields two bandpass poles;
            // their conjugates come from the mirrored prototype pole.
            for (const cplx s : bandpass_roots(p)) {
                const cplx z = to_digital(s);
                sections.push_back(section_from(z, std::conj(z)));
            }
        } else if (std::abs(p.imag()) <= 1e-12) {
            const auto roots = bandpass_roots(cplx(p.real(), 0.0));
            sections.push_back(section_from(to_digital(roots[0]), to_digital(roots[1])));
        }
    }

    FilterKernel unnormalised(spec, sample_rate, sections);
    const double center_hz = sample_rate / pi * std::atan(std::sqrt(center_sq) / fs2);
    const double gain = unnormalised.gain(center_hz);
    for (double& c : sections.front().b) {
        c /= gain;
    }
    return FilterKernel(spec, sample_rate, std::move(sections));
}

} // namespace nns
