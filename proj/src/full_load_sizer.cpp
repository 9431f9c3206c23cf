#include "tractionopt/full_load_sizer.hpp"

#include <algorithm>

#include "tractionopt/errors.hpp"

namespace tractionopt {

double PointSizing::total_area() const
{
    double a = 0.0;
    for (double v : areas) {
        a += v;
    }
    return a;
}

PointSizing size_point(const SystemModel& system, Topology topology, Mode mode, Variant variant,
                       const OperatingPoint& point, double fsw)
{
    const auto& cfg = system.config();
    PointSizing out;
    out.point = point;
    out.mode = mode;
    out.switching_frequency = fsw;
    const auto ph = system.physics(topology, mode, variant, fsw, point);
    if (!ph->electrical_feasible) {
        out.reason = "electrically infeasible: " + ph->solution.reason;
        return out;
    }
    out.ripple = ph->ripple;
    out.feasible = true;
    double p_con = 0.0;
    double p_sw = 0.0;
    for (std::size_t j = 0; j < ph->stress.size(); ++j) {
        const auto& tech = system.device(topology, j);
        double area = minimum_feasible_area(tech, ph->stress[j], cfg.thermal, cfg.chip_granule, cfg.max_switch_area,
                                            cfg.temperature_feedback);
        if (area == 0.0) {
            out.feasible = false;
            out.reason = "switch " + switch_ids(topology)[j] + " needs more than " +
                         std::to_string(cfg.max_switch_area) + " mm^2";
            area = cfg.max_switch_area;
        }
        const auto ev = evaluate_switch(tech, ph->stress[j], area, cfg.thermal, cfg.temperature_feedback);
        out.areas.push_back(area);
        out.junction_temperatures.push_back(ev.thermal.junction_temperature);
        out.losses.push_back(ev.loss);
        p_con += ev.loss.conduction;
        p_sw += ev.loss.switching;
    }
    out.switching_to_conduction = p_con > 0.0 ? p_sw / p_con : 0.0;
    return out;
}

FrequencySearch min_feasible_fsw(const std::vector<double>& grid, double limit,
                                 const std::function<double(double)>& ripple)
{
    if (!std::is_sorted(grid.begin(), grid.end())) {
        throw InputError("switching-frequency grid must be ascending");
    }
    FrequencySearch out;
    for (double f : grid) {
        const double r = ripple(f);
        out.curve.push_back({f, r});
        if (!out.found && r <= limit) {
            out.found = true;
            out.switching_frequency = f;
        }
    }
    return out;
}

FrequencySearch min_feasible_fsw(const SystemModel& system, Topology topology, Mode mode, Variant variant,
                                 const OperatingPoint& point, const std::vector<double>& grid)
{
    return min_feasible_fsw(grid, system.config().max_ripple, [&](double f) {
        const auto ph = system.physics(topology, mode, variant, f, point);
        if (!ph->electrical_feasible) {
            throw InfeasibleError("ripple search at an electrically infeasible point: " + ph->solution.reason);
        }
        return ph->ripple;
    });
}

SizingResult size_topology(const SystemModel& system, Topology topology, Variant variant, Mode mode,
                           const std::vector<OperatingPoint>& envelope, double fsw, bool skip_unreachable)
{
    if (envelope.empty()) {
        throw InputError("sizing envelope is empty");
    }
    SizingResult result;
    result.design = system.blank_design(topology, variant, {mode});
    auto& report = result.report;
    report.design = result.design.name;
    report.mode = mode;
    report.switching_frequency = fsw;
    const std::size_t n_switch = result.design.switches.size();
    report.binding_point.assign(n_switch, 0);
    std::vector<double> area(n_switch, 0.0);
    bool any = false;
    for (std::size_t i = 0; i < envelope.size(); ++i) {
        auto ps = size_point(system, topology, mode, variant, envelope[i], fsw);
        const bool unreachable = !system.physics(topology, mode, variant, fsw, envelope[i])->electrical_feasible;
        if (unreachable && skip_unreachable) {
            report.skipped_points.push_back(i);
            continue;
        }
        if (!ps.feasible) {
            throw InfeasibleError(report.design + " at (" + std::to_string(envelope[i].speed_rpm) + " rpm, " +
                                  std::to_string(envelope[i].torque) + " Nm): " + ps.reason);
        }
        const std::size_t idx = report.points.size();
        for (std::size_t j = 0; j < n_switch; ++j) {
            if (ps.areas[j] > area[j]) {
                area[j] = ps.areas[j];
                report.binding_point[j] = idx;
            }
        }
        if (!any || ps.ripple > report.worst_ripple) {
            report.worst_ripple = ps.ripple;
            report.worst_ripple_point = idx;
        }
        any = true;
        report.points.push_back(std::move(ps));
    }
    if (!any) {
        throw InfeasibleError(report.design + ": no envelope point is reachable in mode " +
                              std::string(to_string(mode)));
    }
    for (std::size_t j = 0; j < n_switch; ++j) {
        result.design.switches[j].area = area[j];
    }
    report.total_area = result.design.total_area();
    report.ripple_ok = report.worst_ripple <= system.config().max_ripple;
    return result;
}

}  // namespace tractionopt
