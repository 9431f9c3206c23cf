#include "tractionopt/harmonics.hpp"

#include <algorithm>
#include <cmath>

#include "tractionopt/errors.hpp"

namespace tractionopt {

double HarmonicSpectrum::energy() const
{
    double e = 0.0;
    for (const auto& b : bins) {
        e += b.u_d * b.u_d + b.u_q * b.u_q;
    }
    return e;
}

FrequencyCurve::FrequencyCurve(std::vector<double> frequencies, std::vector<double> values)
    : freq_(std::move(frequencies)), value_(std::move(values))
{
    if (freq_.size() < 2 || freq_.size() != value_.size()) {
        throw InputError("frequency curve needs at least two (f, value) pairs");
    }
    log_freq_.reserve(freq_.size());
    for (std::size_t i = 0; i < freq_.size(); ++i) {
        if (!(freq_[i] > 0) || (i > 0 && !(freq_[i] > freq_[i - 1]))) {
            throw InputError("frequency curve grid must be positive and strictly increasing");
        }
        if (!(value_[i] > 0)) {
            throw InputError("frequency curve values must be positive");
        }
        log_freq_.push_back(std::log(freq_[i]));
    }
}

double FrequencyCurve::at(double frequency) const
{
    if (freq_.empty()) {
        throw InputError("frequency curve is empty");
    }
    if (frequency < freq_.front() || frequency > freq_.back()) {
        throw InputError("frequency " + std::to_string(frequency) + " Hz outside the tabulated curve range");
    }
    auto it = std::upper_bound(freq_.begin(), freq_.end(), frequency);
    if (it == freq_.end()) {
        return value_.back();
    }
    const auto hi = static_cast<std::size_t>(it - freq_.begin());
    const auto lo = hi - 1;
    const double t = (std::log(frequency) - log_freq_[lo]) / (log_freq_[hi] - log_freq_[lo]);
    return value_[lo] + t * (value_[hi] - value_[lo]);
}

double FrequencyCurve::Cursor::operator()(double frequency, double log_frequency)
{
    const auto& f = curve_->freq_;
    if (frequency < f.front() || frequency > f.back()) {
        throw InputError("frequency " + std::to_string(frequency) + " Hz outside the tabulated curve range");
    }
    if (frequency < f[index_]) {
        index_ = 0;
    }
    while (index_ + 2 < f.size() && frequency >= f[index_ + 1]) {
        ++index_;
    }
    const auto& lf = curve_->log_freq_;
    const auto& v = curve_->value_;
    const double t = (log_frequency - lf[index_]) / (lf[index_ + 1] - lf[index_]);
    return v[index_] + t * (v[index_ + 1] - v[index_]);
}

FrequencyCurve FrequencyCurve::scaled(double factor) const
{
    auto values = value_;
    for (auto& v : values) {
        v *= factor;
    }
    return FrequencyCurve(freq_, std::move(values));
}

FrequencyCurve FrequencyCurve::power_law(double f_lo, double f_hi, int points_per_decade, double reference_frequency,
                                         double reference_value, double exponent)
{
    const double decades = std::log10(f_hi / f_lo);
    const int count = std::max(2, static_cast<int>(std::ceil(decades * points_per_decade)) + 1);
    std::vector<double> f(static_cast<std::size_t>(count));
    std::vector<double> v(f.size());
    for (int i = 0; i < count; ++i) {
        const double fi = i == count - 1 ? f_hi : f_lo * std::pow(10.0, decades * i / (count - 1));
        f[static_cast<std::size_t>(i)] = fi;
        v[static_cast<std::size_t>(i)] = reference_value * std::pow(fi / reference_frequency, exponent);
    }
    return FrequencyCurve(std::move(f), std::move(v));
}

void HarmonicMotorParameters::validate() const
{
    for (const FrequencyCurve* c :
         {&d_inductance, &q_inductance, &iron_resistance, &magnet_resistance, &copper_resistance}) {
        if (c->frequencies().empty()) {
            throw InputError("harmonic motor parameters: missing curve");
        }
    }
    if (k_iron < 0 || k_mag < 0 || k_cu < 0) {
        throw InputError("harmonic motor parameters: scaling factors must be non-negative");
    }
    if (!(f_max > 0)) {
        throw InputError("harmonic motor parameters: f_max must be positive");
    }
}

double HarmonicMotorParameters::window_low(double switching_frequency) const
{
    return half_switching_lower_bound ? 0.5 * switching_frequency : 0.0;
}

HarmonicMotorParameters scale_harmonic_parameters(const HarmonicMotorParameters& params, double ratio)
{
    if (!(ratio > 0)) {
        throw InputError("turn ratio must be positive");
    }
    const double sq = ratio * ratio;
    HarmonicMotorParameters out = params;
    out.d_inductance = params.d_inductance.scaled(sq);
    out.q_inductance = params.q_inductance.scaled(sq);
    out.iron_resistance = params.iron_resistance.scaled(sq);
    out.magnet_resistance = params.magnet_resistance.scaled(sq);
    out.copper_resistance = params.copper_resistance.scaled(sq);
    return out;
}

HarmonicLossBreakdown harmonic_losses(const HarmonicSpectrum& spectrum, const HarmonicMotorParameters& params)
{
    FrequencyCurve::Cursor ld_at(params.d_inductance);
    FrequencyCurve::Cursor lq_at(params.q_inductance);
    FrequencyCurve::Cursor r_cu_at(params.copper_resistance);
    FrequencyCurve::Cursor r_fe_at(params.iron_resistance);
    FrequencyCurve::Cursor r_mag_at(params.magnet_resistance);
    double copper = 0.0;
    double iron = 0.0;
    double magnet = 0.0;
    for (const auto& bin : spectrum.bins) {
        const double f = bin.frequency;
        const double log_f = std::log(f);
        const double ud2 = bin.u_d * bin.u_d;
        const double uq2 = bin.u_q * bin.u_q;
        const double ld = ld_at(f, log_f);
        const double lq = lq_at(f, log_f);
        copper += r_cu_at(f, log_f) / (f * f) * (ud2 / (ld * ld) + uq2 / (lq * lq));
        iron += (ud2 + uq2) / r_fe_at(f, log_f);
        magnet += ud2 / r_mag_at(f, log_f);
    }
    HarmonicLossBreakdown out;
    out.copper = params.k_cu * copper;
    out.iron = params.k_iron * iron;
    out.magnet = params.k_mag * magnet;
    out.total = out.magnet + out.iron + out.copper;
    return out;
}

}  // namespace tractionopt
