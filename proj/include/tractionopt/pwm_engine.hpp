#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tractionopt/harmonics.hpp"
#include "tractionopt/motor_model.hpp"
#include "tractionopt/waveform.hpp"

namespace tractionopt {

enum class Topology { b6, tnpc, b6_2y };

/// two_level / three_level: star-connected operation of B6 and TNPC;
/// star / h_bridge: Y- and H-operation of the open-winding dual bridge.
enum class Mode { two_level, three_level, star, h_bridge };

/// TNPC zero-vector policy (A: all, B: [1,1,1] only, C: [1,1,1] or
/// [-1,-1,-1] by switching energy) or B6^2-Y H-mode modulator (A: bipolar,
/// B: unipolar).
enum class Variant { none, a, b, c };

std::string_view to_string(Topology t);
std::string_view to_string(Mode m);
std::string_view to_string(Variant v);
Topology parse_topology(std::string_view s);
Mode parse_mode(std::string_view s);
Variant parse_variant(std::string_view s);

/// Whether the topology supports the mode, and whether the variant applies.
bool is_valid_combination(Topology topology, Mode mode, Variant variant);
/// Variant that actually shapes the waveform (none when it does not matter).
Variant effective_variant(Topology topology, Mode mode, Variant variant);

/// Peak phase voltage available in `mode` (V_dc/sqrt(3) for star-connected
/// operation with common-mode injection, V_dc across an H-bridge winding).
double voltage_limit(Mode mode, double dc_voltage);

/// Switch identifiers in canonical order.
std::vector<std::string> switch_ids(Topology topology);

/// Combined turn-on plus turn-off energy coefficients [J/(V A)] of the outer
/// and mid-point TNPC devices, used to pick the zero vector under variant C.
struct ZeroVectorCosts {
    double outer = 1.0;
    double mid = 1.0;
};

struct ModulationConfig {
    Topology topology = Topology::b6;
    Mode mode = Mode::two_level;
    Variant variant = Variant::none;
    double switching_frequency = 10e3;  // Hz
    double dc_voltage = 800.0;          // V
    double time_step = 0.0;             // s; 0 selects 1 / (500 f_sw)
    double min_fundamental_hz = 1.0;    // period used below this fundamental
    ZeroVectorCosts zero_vector_costs;

    void validate() const;
    [[nodiscard]] double nominal_time_step() const;
};

struct SwitchChannel {
    std::string id;
    int phase = 0;  // index into SwitchingTrace::phase_currents
    std::vector<Interval> conduction;
    std::vector<SwitchingEvent> events;
};

/// One fundamental period of simulated switching behaviour. Samples are taken
/// at t_k = k * time_step, k < sample_count, and period = sample_count * time_step.
struct SwitchingTrace {
    double period = 0.0;
    double time_step = 0.0;
    std::size_t sample_count = 0;
    double fundamental_hz = 0.0;  // of the synthesised period
    double electrical_omega = 0.0;
    double dc_voltage = 0.0;
    std::array<PhaseCurrent, 3> phase_currents{};
    std::array<std::vector<double>, 3> winding_voltage;
    std::vector<double> capacitor_current;
    std::vector<SwitchChannel> switches;

    [[nodiscard]] const SwitchChannel& channel(std::string_view id) const;
    /// Current through switch `channel` at time t (zero outside conduction).
    [[nodiscard]] double switch_current(const SwitchChannel& channel, double t) const;
};

/// Synthesises a regular-sampled, centre-aligned PWM period for the
/// operating point. Phase currents are ideal sinusoids from `sol`.
SwitchingTrace synthesize_period(const ModulationConfig& cfg, const OperatingPointSolution& sol);

/// Park transform at the fundamental angle, removal of the mean (the
/// fundamental), real DFT, and single-sided magnitudes inside [f_low, f_high].
HarmonicSpectrum dq_ripple_spectrum(const SwitchingTrace& trace, double f_low, double f_high);

/// Peak-to-peak DC-link voltage excursion of one period [V].
double dc_link_ripple(const SwitchingTrace& trace, double capacitance);

/// Debug dump: one CSV row per sample with winding voltages, phase currents
/// at the sample centre and the capacitor current.
void write_trace_csv(const SwitchingTrace& trace, std::ostream& out);

}  // namespace tractionopt
