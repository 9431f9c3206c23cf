#pragma once

#include <cstddef>
#include <vector>

namespace tractionopt {

struct SpectrumBin {
    double frequency = 0.0;  // Hz
    double u_d = 0.0;        // V, single-sided magnitude
    double u_q = 0.0;        // V, single-sided magnitude
};

/// dq ripple-voltage components, strictly increasing in frequency.
struct HarmonicSpectrum {
    std::vector<SpectrumBin> bins;

    [[nodiscard]] bool empty() const { return bins.empty(); }
    /// Sum over bins of u_d^2 + u_q^2.
    [[nodiscard]] double energy() const;
};

/// Tabulated (f, value) curve, interpolated linearly in log-frequency.
/// Evaluating outside the tabulated range throws.
class FrequencyCurve {
public:
    FrequencyCurve() = default;
    FrequencyCurve(std::vector<double> frequencies, std::vector<double> values);

    [[nodiscard]] double at(double frequency) const;
    [[nodiscard]] double min_frequency() const { return freq_.front(); }
    [[nodiscard]] double max_frequency() const { return freq_.back(); }
    [[nodiscard]] const std::vector<double>& frequencies() const { return freq_; }
    [[nodiscard]] const std::vector<double>& values() const { return value_; }
    [[nodiscard]] FrequencyCurve scaled(double factor) const;

    /// Sequential evaluator for ascending frequencies; same values as at().
    class Cursor {
    public:
        explicit Cursor(const FrequencyCurve& curve) : curve_(&curve) {}
        double operator()(double frequency, double log_frequency);

    private:
        const FrequencyCurve* curve_;
        std::size_t index_ = 0;
    };

    /// `value(f) = reference_value * (f / reference_frequency)^exponent` on a
    /// log-spaced grid.
    static FrequencyCurve power_law(double f_lo, double f_hi, int points_per_decade, double reference_frequency,
                                    double reference_value, double exponent);

private:
    std::vector<double> freq_;
    std::vector<double> log_freq_;
    std::vector<double> value_;
};

struct HarmonicMotorParameters {
    FrequencyCurve d_inductance;        // H
    FrequencyCurve q_inductance;        // H
    FrequencyCurve iron_resistance;     // Ohm-equivalent
    FrequencyCurve magnet_resistance;   // Ohm-equivalent
    FrequencyCurve copper_resistance;   // Ohm
    double k_iron = 1.0;
    double k_mag = 1.0;
    double k_cu = 1.0;
    double f_max = 1e6;                 // Hz
    bool half_switching_lower_bound = true;  // f_min = f_sw / 2

    void validate() const;
    [[nodiscard]] double window_low(double switching_frequency) const;
};

/// Turn-number scaling of the harmonic curves (inductances and loss factors by ratio^2).
HarmonicMotorParameters scale_harmonic_parameters(const HarmonicMotorParameters& params, double ratio);

struct HarmonicLossBreakdown {
    double copper = 0.0;
    double iron = 0.0;
    double magnet = 0.0;
    double total = 0.0;  // magnet + iron + copper
};

HarmonicLossBreakdown harmonic_losses(const HarmonicSpectrum& spectrum, const HarmonicMotorParameters& params);

}  // namespace tractionopt
