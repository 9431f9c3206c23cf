#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "tractionopt/device_thermal.hpp"
#include "tractionopt/harmonics.hpp"
#include "tractionopt/motor_model.hpp"
#include "tractionopt/operating_point.hpp"
#include "tractionopt/pwm_engine.hpp"
#include "tractionopt/vehicle_cycle.hpp"

namespace tractionopt {

/// Everything needed to turn an operating point into losses.
struct SystemConfig {
    VehicleParameters vehicle;
    MotorModel motor;                   // star-connected reference machine
    HarmonicMotorParameters harmonics;  // of the reference machine
    double open_winding_turn_ratio = 1.75;
    DeviceTech device_1200v;
    DeviceTech device_750v;
    ThermalLimits thermal;
    double dc_voltage = 800.0;          // V
    double dc_capacitance = 500e-6;     // F
    double max_ripple = 15.0;           // V, peak-to-peak
    double chip_granule = chip_granule_mm2;
    double max_switch_area = 1000.0;    // mm^2, sizing search cap
    double samples_per_carrier = 500.0;
    double min_fundamental_hz = 1.0;
    bool temperature_feedback = false;
    int envelope_points = 25;           // per torque sign

    void validate() const;
};

struct InverterDesign {
    std::string name;
    Topology topology = Topology::b6;
    Variant variant = Variant::none;
    std::vector<Mode> modes;  // allowed modes; the first one is the full-load fallback
    std::vector<SwitchDesign> switches;  // canonical switch order of the topology
    bool reference = false;

    [[nodiscard]] double total_area() const;
    [[nodiscard]] Mode fallback_mode() const { return modes.front(); }
    [[nodiscard]] bool allows(Mode mode) const;
};

/// "TNPC_A(2L/3L)", "B6", "B6^2-Y_B(H)".
std::string design_label(Topology topology, Variant variant, const std::vector<Mode>& modes);

/// Area-independent result of simulating one (topology, mode, modulator,
/// f_sw, point) combination.
struct PointPhysics {
    OperatingPointSolution solution;
    bool electrical_feasible = false;
    double fundamental_motor_loss = 0.0;  // W
    HarmonicLossBreakdown harmonic;
    double ripple = 0.0;                  // V
    std::vector<SwitchStress> stress;     // canonical switch order
};

/// Shared simulation front-end with a thread-safe memo of PointPhysics.
class SystemModel {
public:
    explicit SystemModel(SystemConfig config);

    [[nodiscard]] const SystemConfig& config() const { return config_; }
    [[nodiscard]] const MotorModel& motor(Topology topology) const;
    [[nodiscard]] const HarmonicMotorParameters& harmonics(Topology topology) const;
    [[nodiscard]] const DeviceTech& device(Topology topology, std::size_t switch_index) const;
    [[nodiscard]] ModulationConfig modulation(Topology topology, Mode mode, Variant variant, double fsw) const;

    /// Full-load envelope of the machine driven by `topology`.
    [[nodiscard]] std::vector<OperatingPoint> envelope(Topology topology) const;

    /// Uncached simulation of one combination.
    [[nodiscard]] PointPhysics simulate(Topology topology, Mode mode, Variant variant, double fsw,
                                        const OperatingPoint& point) const;
    /// Cached simulate().
    [[nodiscard]] std::shared_ptr<const PointPhysics> physics(Topology topology, Mode mode, Variant variant,
                                                              double fsw, const OperatingPoint& point) const;

    /// Empty design with one granule per switch.
    [[nodiscard]] InverterDesign blank_design(Topology topology, Variant variant, std::vector<Mode> modes) const;

    [[nodiscard]] std::size_t cache_size() const;
    void clear_cache() const;

private:
    using Key = std::tuple<int, int, int, double, double, double>;

    SystemConfig config_;
    MotorModel open_winding_motor_;
    HarmonicMotorParameters open_winding_harmonics_;
    mutable std::mutex mutex_;
    mutable std::map<Key, std::shared_ptr<const PointPhysics>> cache_;
};

/// Runs `fn(i)` for i in [0, count) on up to `threads` threads.
template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn);

}  // namespace tractionopt

#include "tractionopt/detail/parallel.hpp"
