#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace nns {

/// Bandpass request. `order` is the order of the digital bandpass applied
/// in one pass (even, >= 2); zero-phase application doubles it.
struct FilterSpec {
    double low_cut_hz = 0.3;
    double high_cut_hz = 3.0;
    int order = 4;
    bool zero_phase = true;

    /// Throws Error(parameter) for a bad order or band, Error(cutoff) when
    /// the band does not fit below Nyquist.
    void validate(double sample_rate) const;
};

/// Second-order section, a[0] == 1.
struct Biquad {
    std::array<double, 3> b{};
    std::array<double, 3> a{1.0, 0.0, 0.0};
};

/// Digital Butterworth bandpass as a cascade of biquads.
class FilterKernel {
public:
    FilterKernel(FilterSpec spec, double sample_rate, std::vector<Biquad> sections);

    const FilterSpec& spec() const noexcept { return spec_; }
    double sample_rate() const noexcept { return sample_rate_; }
    const std::vector<Biquad>& sections() const noexcept { return sections_; }

    /// Single-pass frequency response H(e^{j 2 pi f / fs}).
    std::complex<double> response(double frequency_hz) const;
    double gain(double frequency_hz) const { return std::abs(response(frequency_hz)); }
    std::vector<std::complex<double>> poles() const;

    /// Samples of reflection padding added at each end per pass.
    std::size_t padding_length() const { return 3 * (static_cast<std::size_t>(spec_.order) + 1); }
    /// Shortest input accepted by apply().
    std::size_t min_length() const { return padding_length() + 1; }

    /// Causal single pass, state initialised to the steady state of x[0].
    std::vector<double> filter(std::span<const double> x) const;
    /// Forward-backward pass over an odd-reflection padded copy of x.
    std::vector<double> filtfilt(std::span<const double> x) const;
    /// filtfilt() or filter() according to spec().zero_phase.
    std::vector<double> apply(std::span<const double> x) const;

    /// Causal response to a unit impulse from rest.
    std::vector<double> impulse_response(std::size_t length) const;

private:
    std::vector<double> run(std::span<const double> x, double initial_level) const;

    FilterSpec spec_;
    double sample_rate_;
    std::vector<Biquad> sections_;
    std::vector<std::array<double, 2>> steady_state_; // per section, for a unit step
};

/// Butterworth bandpass via the bilinear transform of an analog prototype
/// of order spec.order / 2, with the band edges prewarped so the digital
/// -3 dB points land on the requested cutoffs. Passband gain is normalised
/// to 1 at the (warped) geometric centre frequency.
FilterKernel design_bandpass(const FilterSpec& spec, double sample_rate);

} // namespace nns
