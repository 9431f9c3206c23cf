#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tractionopt/system.hpp"

namespace tractionopt {

struct PointEvaluation {
    OperatingPoint point;
    Mode mode = Mode::two_level;
    double switching_frequency = 0.0;
    bool electrical_feasible = false;
    bool thermal_feasible = false;
    bool ripple_feasible = false;
    bool feasible = false;
    std::string reason;

    double p_con = 0.0;    // W, sum over switches
    double p_sw = 0.0;     // W, sum over switches
    double p_inv = 0.0;    // W, sum over switches of P_mos
    double p_mot_f = 0.0;  // W
    double p_mot_h = 0.0;  // W
    double p_tot = 0.0;    // p_inv + p_mot_h + p_mot_f
    HarmonicLossBreakdown harmonic;
    std::vector<SwitchLossBreakdown> switch_losses;
    std::vector<double> junction_temperatures;
    double max_junction_temperature = 0.0;
    double ripple = 0.0;   // V
};

/// Full chain from the operating point to total loss. Electrical
/// infeasibility yields an infeasible evaluation, not an exception.
PointEvaluation evaluate_point(const SystemModel& system, const InverterDesign& design, const OperatingPoint& point,
                               Mode mode, double fsw);

std::vector<Mode> feasible_modes(const SystemModel& system, const InverterDesign& design,
                                 const OperatingPoint& point, double fsw);

/// Ranks modes for tie-breaking: fewer active switches first.
int mode_preference(Mode mode);

/// Lowest-loss feasible evaluation; ties go to the preferred mode.
std::optional<PointEvaluation> select_best(const std::vector<PointEvaluation>& candidates);

/// Throws InfeasibleError when no mode is feasible.
PointEvaluation best_mode(const SystemModel& system, const InverterDesign& design, const OperatingPoint& point,
                          double fsw);

/// Index of the smallest value, first on ties; nullopt entries are skipped.
std::optional<std::size_t> grid_argmin(const std::vector<std::optional<double>>& values);

/// Exhaustive argmin over an ascending grid (ties toward the lower
/// frequency); nullopt when every frequency is infeasible.
std::optional<std::size_t> optimal_grid_index(const std::vector<double>& grid,
                                              const std::function<std::optional<double>(double)>& loss);

/// Exhaustive (f_sw, mode) argmin; throws InfeasibleError when nothing is feasible.
PointEvaluation optimal_fsw(const SystemModel& system, const InverterDesign& design, const OperatingPoint& point,
                            const std::vector<double>& grid);

struct FswPolicy {
    bool optimal = false;
    double fixed = 10e3;        // Hz, requested frequency of the fixed policy
    std::vector<double> grid;   // ascending; escalation and optimisation grid

    [[nodiscard]] std::string tag() const;
};

/// Fixed policy with escalation: the first grid frequency at or above the
/// requested one where some mode is feasible.
PointEvaluation evaluate_with_policy(const SystemModel& system, const InverterDesign& design,
                                     const OperatingPoint& point, const FswPolicy& policy);

struct LossTotals {
    double conduction = 0.0;   // J
    double switching = 0.0;    // J
    double harmonic = 0.0;     // J
    double fundamental = 0.0;  // J
};

struct CycleResult {
    std::string design;
    std::string policy;
    std::vector<PointEvaluation> points;
    double energy = 0.0;          // J, E_tot,cycle
    double delta_e = 0.0;         // kWh / 100 km
    double mean_loss = 0.0;       // W, P_tot,m
    double distance = 0.0;        // m
    double duration = 0.0;        // s
    LossTotals totals;
};

/// Weighted aggregation of per-point evaluations (weights in seconds).
CycleResult aggregate_cycle(std::vector<PointEvaluation> points, double distance, double duration);

CycleResult evaluate_cycle(const SystemModel& system, const InverterDesign& design,
                           const std::vector<OperatingPoint>& points, const FswPolicy& policy, double distance,
                           double duration, int threads = 1);

struct BoundaryCell {
    double speed_rpm = 0.0;
    double torque = 0.0;
    std::vector<Mode> feasible;
    std::optional<Mode> best;
    double best_loss = 0.0;
    double fallback_loss = 0.0;
    double loss_difference = 0.0;  // fallback minus best, W
    bool fallback_feasible = false;
    bool in_envelope = false;
};

struct ModeBoundaryMap {
    std::string design;
    double switching_frequency = 0.0;
    std::vector<double> speeds;
    std::vector<double> torques;
    std::vector<BoundaryCell> cells;  // speed-major: cells[i * torques.size() + j]

    [[nodiscard]] const BoundaryCell& at(std::size_t speed_index, std::size_t torque_index) const;
};

/// `count` x `count` grid over [0, n_max] x [-M_max, M_max].
ModeBoundaryMap mode_boundary_map(const SystemModel& system, const InverterDesign& design, double fsw,
                                  int count = 41, int threads = 1);

}  // namespace tractionopt
