#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tractionopt/system.hpp"

namespace tractionopt {

/// Minimal per-switch areas at one operating point.
struct PointSizing {
    OperatingPoint point;
    Mode mode = Mode::two_level;
    double switching_frequency = 0.0;
    bool feasible = false;
    std::string reason;
    std::vector<double> areas;                  // mm^2, canonical switch order
    std::vector<double> junction_temperatures;  // degC at the sized areas
    std::vector<SwitchLossBreakdown> losses;
    double ripple = 0.0;                         // V
    double switching_to_conduction = 0.0;        // sum P_sw / sum P_con

    [[nodiscard]] double total_area() const;
};

/// Sizes every switch independently by ascending granule search.
PointSizing size_point(const SystemModel& system, Topology topology, Mode mode, Variant variant,
                       const OperatingPoint& point, double fsw);

struct RippleSample {
    double switching_frequency = 0.0;
    double ripple = 0.0;
};

struct FrequencySearch {
    bool found = false;
    double switching_frequency = 0.0;
    std::vector<RippleSample> curve;
};

/// Smallest grid frequency with ripple(f) <= limit; the whole curve is reported.
FrequencySearch min_feasible_fsw(const std::vector<double>& grid, double limit,
                                 const std::function<double(double)>& ripple);

/// Ripple of `mode` at `point` across the grid.
FrequencySearch min_feasible_fsw(const SystemModel& system, Topology topology, Mode mode, Variant variant,
                                 const OperatingPoint& point, const std::vector<double>& grid);

struct SizingReport {
    std::string design;
    Mode mode = Mode::two_level;
    double switching_frequency = 0.0;
    std::vector<PointSizing> points;
    std::vector<std::size_t> binding_point;  // per switch, index into points
    std::vector<std::size_t> skipped_points; // envelope points outside the mode's voltage range
    double total_area = 0.0;
    double worst_ripple = 0.0;
    std::size_t worst_ripple_point = 0;
    bool ripple_ok = false;
};

struct SizingResult {
    InverterDesign design;
    SizingReport report;
};

/// Per-switch maximum over the envelope. Points the mode cannot reach
/// electrically are skipped when `skip_unreachable` is set, otherwise they
/// raise InfeasibleError, as does any point without a thermally feasible area.
SizingResult size_topology(const SystemModel& system, Topology topology, Variant variant, Mode mode,
                           const std::vector<OperatingPoint>& envelope, double fsw, bool skip_unreachable = false);

}  // namespace tractionopt
