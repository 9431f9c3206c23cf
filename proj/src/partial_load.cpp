#include "tractionopt/partial_load.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <utility>

#include "tractionopt/errors.hpp"

namespace tractionopt {

PointEvaluation evaluate_point(const SystemModel& system, const InverterDesign& design, const OperatingPoint& point,
                               Mode mode, double fsw)
{
    if (!design.allows(mode)) {
        throw Error("design " + design.name + " does not support mode " + std::string(to_string(mode)));
    }
    const auto& cfg = system.config();
    PointEvaluation ev;
    ev.point = point;
    ev.mode = mode;
    ev.switching_frequency = fsw;
    const auto ph = system.physics(design.topology, mode, design.variant, fsw, point);
    ev.electrical_feasible = ph->electrical_feasible;
    if (!ev.electrical_feasible) {
        ev.reason = ph->solution.reason;
        return ev;
    }
    ev.thermal_feasible = true;
    ev.max_junction_temperature = cfg.thermal.heatsink_temperature;
    for (std::size_t j = 0; j < design.switches.size(); ++j) {
        const auto& sw = design.switches[j];
        const auto se = evaluate_switch(sw.tech, ph->stress[j], sw.area, cfg.thermal, cfg.temperature_feedback);
        ev.p_con += se.loss.conduction;
        ev.p_sw += se.loss.switching;
        ev.p_inv += se.loss.total;
        ev.switch_losses.push_back(se.loss);
        ev.junction_temperatures.push_back(se.thermal.junction_temperature);
        ev.max_junction_temperature = std::max(ev.max_junction_temperature, se.thermal.junction_temperature);
        ev.thermal_feasible = ev.thermal_feasible && se.thermal.feasible;
    }
    ev.harmonic = ph->harmonic;
    ev.p_mot_h = ph->harmonic.total;
    ev.p_mot_f = ph->fundamental_motor_loss;
    ev.p_tot = ev.p_inv + ev.p_mot_h + ev.p_mot_f;
    ev.ripple = ph->ripple;
    ev.ripple_feasible = ev.ripple <= cfg.max_ripple;
    ev.feasible = ev.thermal_feasible && ev.ripple_feasible;
    if (!ev.thermal_feasible) {
        ev.reason = "junction temperature limit exceeded";
    } else if (!ev.ripple_feasible) {
        ev.reason = "DC-link ripple limit exceeded";
    }
    return ev;
}

std::vector<Mode> feasible_modes(const SystemModel& system, const InverterDesign& design,
                                 const OperatingPoint& point, double fsw)
{
    std::vector<Mode> out;
    for (Mode m : design.modes) {
        if (evaluate_point(system, design, point, m, fsw).feasible) {
            out.push_back(m);
        }
    }
    return out;
}

int mode_preference(Mode mode)
{
    return mode == Mode::two_level || mode == Mode::star ? 0 : 1;
}

std::optional<PointEvaluation> select_best(const std::vector<PointEvaluation>& candidates)
{
    const PointEvaluation* best = nullptr;
    for (const auto& c : candidates) {
        if (!c.feasible) {
            continue;
        }
        if (best == nullptr || c.p_tot < best->p_tot ||
            (c.p_tot == best->p_tot && mode_preference(c.mode) < mode_preference(best->mode))) {
            best = &c;
        }
    }
    if (best == nullptr) {
        return std::nullopt;
    }
    return *best;
}

namespace {

std::vector<PointEvaluation> evaluate_modes(const SystemModel& system, const InverterDesign& design,
                                            const OperatingPoint& point, double fsw)
{
    std::vector<PointEvaluation> out;
    for (Mode m : design.modes) {
        out.push_back(evaluate_point(system, design, point, m, fsw));
    }
    return out;
}

std::string describe(const OperatingPoint& p)
{
    std::ostringstream s;
    s << "(" << p.speed_rpm << " rpm, " << p.torque << " Nm)";
    return s.str();
}

}  // namespace

PointEvaluation best_mode(const SystemModel& system, const InverterDesign& design, const OperatingPoint& point,
                          double fsw)
{
    auto best = select_best(evaluate_modes(system, design, point, fsw));
    if (!best) {
        throw InfeasibleError(design.name + " has no feasible mode at " + describe(point));
    }
    return *best;
}

std::optional<std::size_t> grid_argmin(const std::vector<std::optional<double>>& values)
{
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] && (!best || *values[i] < *values[*best])) {
            best = i;
        }
    }
    return best;
}

std::optional<std::size_t> optimal_grid_index(const std::vector<double>& grid,
                                              const std::function<std::optional<double>(double)>& loss)
{
    if (!std::is_sorted(grid.begin(), grid.end())) {
        throw InputError("switching-frequency grid must be ascending");
    }
    std::vector<std::optional<double>> values;
    values.reserve(grid.size());
    for (double f : grid) {
        values.push_back(loss(f));
    }
    return grid_argmin(values);
}

PointEvaluation optimal_fsw(const SystemModel& system, const InverterDesign& design, const OperatingPoint& point,
                            const std::vector<double>& grid)
{
    std::vector<std::optional<PointEvaluation>> per_f;
    per_f.reserve(grid.size());
    const auto idx = optimal_grid_index(grid, [&](double f) -> std::optional<double> {
        per_f.push_back(select_best(evaluate_modes(system, design, point, f)));
        return per_f.back() ? std::optional<double>(per_f.back()->p_tot) : std::nullopt;
    });
    if (!idx) {
        throw InfeasibleError(design.name + " has no feasible (f_sw, mode) at " + describe(point));
    }
    return *per_f[*idx];
}

std::string FswPolicy::tag() const
{
    if (optimal) {
        return "opt";
    }
    std::ostringstream s;
    s << fixed / 1e3 << "kHz";
    return s.str();
}

PointEvaluation evaluate_with_policy(const SystemModel& system, const InverterDesign& design,
                                     const OperatingPoint& point, const FswPolicy& policy)
{
    if (policy.optimal) {
        return optimal_fsw(system, design, point, policy.grid);
    }
    std::vector<double> ladder{policy.fixed};
    for (double f : policy.grid) {
        if (f > policy.fixed) {
            ladder.push_back(f);
        }
    }
    for (double f : ladder) {
        if (auto best = select_best(evaluate_modes(system, design, point, f))) {
            return *best;
        }
    }
    throw InfeasibleError(design.name + " has no feasible mode at " + describe(point) + " up to " +
                          std::to_string(ladder.back()) + " Hz");
}

CycleResult aggregate_cycle(std::vector<PointEvaluation> points, double distance, double duration)
{
    if (!(distance > 0.0)) {
        throw InputError("cycle distance is zero; energy per distance is undefined");
    }
    if (!(duration > 0.0)) {
        throw InputError("cycle duration must be positive");
    }
    CycleResult r;
    for (const auto& p : points) {
        const double w = p.point.weight_s;
        r.energy += p.p_tot * w;
        r.totals.conduction += p.p_con * w;
        r.totals.switching += p.p_sw * w;
        r.totals.harmonic += p.p_mot_h * w;
        r.totals.fundamental += p.p_mot_f * w;
    }
    r.points = std::move(points);
    r.distance = distance;
    r.duration = duration;
    r.delta_e = r.energy / 3.6e6 * (100e3 / distance);
    r.mean_loss = r.energy / duration;
    return r;
}

CycleResult evaluate_cycle(const SystemModel& system, const InverterDesign& design,
                           const std::vector<OperatingPoint>& points, const FswPolicy& policy, double distance,
                           double duration, int threads)
{
    if (!(distance > 0.0)) {
        throw InputError("cycle distance is zero; energy per distance is undefined");
    }
    std::map<std::pair<double, double>, std::size_t> index;
    std::vector<OperatingPoint> unique;
    std::vector<std::size_t> slot(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto key = std::make_pair(points[i].speed_rpm, points[i].torque);
        auto [it, inserted] = index.emplace(key, unique.size());
        if (inserted) {
            unique.push_back(points[i]);
        }
        slot[i] = it->second;
    }
    std::vector<std::optional<PointEvaluation>> evals(unique.size());
    std::vector<std::string> errors(unique.size());
    parallel_for(unique.size(), threads, [&](std::size_t i) {
        try {
            evals[i] = evaluate_with_policy(system, design, unique[i], policy);
        } catch (const InfeasibleError& e) {
            errors[i] = e.what();
        }
    });
    std::vector<std::string> failed;
    for (std::size_t i = 0; i < unique.size(); ++i) {
        if (!evals[i]) {
            failed.push_back(describe(unique[i]));
        }
    }
    if (!failed.empty()) {
        std::string msg = design.name + " cannot serve " + std::to_string(failed.size()) + " cycle point(s):";
        for (std::size_t i = 0; i < failed.size() && i < 10; ++i) {
            msg += " " + failed[i];
        }
        throw InfeasibleError(msg);
    }
    std::vector<PointEvaluation> per_point;
    per_point.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        per_point.push_back(*evals[slot[i]]);
        per_point.back().point = points[i];
    }
    auto r = aggregate_cycle(std::move(per_point), distance, duration);
    r.design = design.name;
    r.policy = policy.tag();
    return r;
}

const BoundaryCell& ModeBoundaryMap::at(std::size_t speed_index, std::size_t torque_index) const
{
    return cells.at(speed_index * torques.size() + torque_index);
}

ModeBoundaryMap mode_boundary_map(const SystemModel& system, const InverterDesign& design, double fsw, int count,
                                  int threads)
{
    if (count < 2) {
        throw InputError("boundary grid needs at least two nodes per axis");
    }
    const auto& motor = system.motor(design.topology);
    ModeBoundaryMap map;
    map.design = design.name;
    map.switching_frequency = fsw;
    const auto n = static_cast<std::size_t>(count);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(n - 1);
        map.speeds.push_back(u * motor.max_speed_rpm);
        map.torques.push_back((2.0 * u - 1.0) * motor.max_torque);
    }
    map.cells.resize(n * n);
    parallel_for(n * n, threads, [&](std::size_t k) {
        auto& cell = map.cells[k];
        cell.speed_rpm = map.speeds[k / n];
        cell.torque = map.torques[k % n];
        cell.in_envelope = std::abs(cell.torque) <= motor.envelope_torque(cell.speed_rpm) * (1.0 + 1e-9);
        if (!cell.in_envelope) {
            return;
        }
        const OperatingPoint p{cell.speed_rpm, cell.torque, 1.0};
        const auto evals = evaluate_modes(system, design, p, fsw);
        for (const auto& e : evals) {
            if (e.feasible) {
                cell.feasible.push_back(e.mode);
            }
        }
        const auto& fallback = evals.front();
        cell.fallback_feasible = fallback.feasible;
        cell.fallback_loss = fallback.p_tot;
        if (auto best = select_best(evals)) {
            cell.best = best->mode;
            cell.best_loss = best->p_tot;
            cell.loss_difference = fallback.feasible ? fallback.p_tot - best->p_tot : 0.0;
        }
    });
    return map;
}

}  // namespace tractionopt
