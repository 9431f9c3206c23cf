#include "tractionopt/pwm_engine.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <mutex>
#include <numbers>

#include "tractionopt/errors.hpp"

namespace tractionopt {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double third_turn = two_pi / 3.0;

constexpr std::int8_t state_n = -1;
constexpr std::int8_t state_m = 0;
constexpr std::int8_t state_p = 1;

bool is_five_smooth(std::size_t n)
{
    for (std::size_t p : {2u, 3u, 5u}) {
        while (n % p == 0) {
            n /= p;
        }
    }
    return n == 1;
}

std::size_t next_even_smooth(std::size_t n)
{
    std::size_t m = std::max<std::size_t>(n, 2);
    while (m % 2 != 0 || !is_five_smooth(m)) {
        ++m;
    }
    return m;
}

/// One half-bridge or T-type leg together with the switches it drives.
struct Leg {
    int phase = 0;
    bool negate_current = false;  // right-hand legs of the H-bridge carry -i_x
    bool three_level = false;
    int upper = -1;   // T1 / T3 (2L) or T1 (3L)
    int lower = -1;   // T2 / T4 (2L) or T2 (3L)
    int mid_p = -1;   // T3 (3L)
    int mid_n = -1;   // T4 (3L)
};

/// Centre-aligned pulse inside one carrier period: `outer` at both ends and
/// `inner` for `fraction` of the period in the middle.
struct Pulse {
    std::int8_t outer = state_n;
    std::int8_t inner = state_p;
    double fraction = 0.0;
};

struct Transition {
    double time;
    std::int8_t state;
};

struct LegTimeline {
    std::int8_t initial = state_n;
    std::vector<Transition> transitions;
    std::int8_t current = state_n;
    bool started = false;

    void append(double begin, double end, std::int8_t state)
    {
        if (!(end > begin)) {
            return;
        }
        if (!started) {
            initial = current = state;
            started = true;
            return;
        }
        if (state != current) {
            transitions.push_back({begin, state});
            current = state;
        }
    }
};

std::vector<Leg> build_legs(Topology topology, Mode mode)
{
    std::vector<Leg> legs;
    for (int x = 0; x < 3; ++x) {
        Leg leg;
        leg.phase = x;
        switch (topology) {
        case Topology::b6:
            leg.upper = 2 * x;
            leg.lower = 2 * x + 1;
            break;
        case Topology::tnpc:
            leg.upper = 4 * x;
            leg.lower = 4 * x + 1;
            leg.mid_p = 4 * x + 2;
            leg.mid_n = 4 * x + 3;
            leg.three_level = mode == Mode::three_level;
            break;
        case Topology::b6_2y:
            leg.upper = 4 * x;
            leg.lower = 4 * x + 1;
            break;
        }
        legs.push_back(leg);
    }
    if (topology == Topology::b6_2y && mode == Mode::h_bridge) {
        for (int x = 0; x < 3; ++x) {
            Leg leg;
            leg.phase = x;
            leg.negate_current = true;
            leg.upper = 4 * x + 2;
            leg.lower = 4 * x + 3;
            legs.push_back(leg);
        }
    }
    return legs;
}

Pulse two_level_pulse(double duty)
{
    return {state_n, state_p, std::clamp(duty, 0.0, 1.0)};
}

/// The higher of the two active levels sits in the middle of the carrier
/// period in both half-bands (in-phase disposition).
Pulse three_level_pulse(double r)
{
    r = std::clamp(r, -1.0, 1.0);
    if (r >= 0.0) {
        return {state_m, state_p, r};
    }
    return {state_n, state_m, 1.0 + r};
}

/// Switching energy weight of one non-clamped TNPC phase at normalised
/// reference r and current i.
double zero_vector_cost(double r, double i, const ZeroVectorCosts& costs)
{
    if (!(std::abs(r) < 1.0) || r == 0.0) {
        return 0.0;
    }
    const bool outer_active = r > 0.0 ? i >= 0.0 : i < 0.0;
    return (outer_active ? costs.outer : costs.mid) * std::abs(i);
}

void push_event(SwitchChannel& ch, double t, double voltage, double current, bool on)
{
    ch.events.push_back({t, voltage, current, on});
}

void push_conduction(SwitchChannel& ch, double begin, double end)
{
    if (!(end > begin)) {
        return;
    }
    if (!ch.conduction.empty() && ch.conduction.back().end >= begin) {
        ch.conduction.back().end = std::max(ch.conduction.back().end, end);
        return;
    }
    ch.conduction.push_back({begin, end});
}

/// Two-state commutation cell: the switch on the side the current flows
/// out of is active and takes the hard transitions.
void two_state_commutation(std::vector<SwitchChannel>& sw, int upper, int lower, bool to_upper, double t,
                           double voltage, double current)
{
    const int active = current >= 0.0 ? upper : lower;
    const double magnitude = std::abs(current);
    push_event(sw[static_cast<std::size_t>(upper)], t, active == upper ? voltage : 0.0, magnitude, to_upper);
    push_event(sw[static_cast<std::size_t>(lower)], t, active == lower ? voltage : 0.0, magnitude, !to_upper);
}

void leg_commutation(std::vector<SwitchChannel>& sw, const Leg& leg, std::int8_t from, std::int8_t to, double t,
                     double current, double dc_voltage)
{
    if (!leg.three_level || from + to == 0) {
        // P <-> N, full DC-link voltage; mid-point switches stay off.
        two_state_commutation(sw, leg.upper, leg.lower, to == state_p, t, dc_voltage, current);
        return;
    }
    const double half = 0.5 * dc_voltage;
    const double magnitude = std::abs(current);
    const bool upper_cell = from == state_p || to == state_p;
    const int outer = upper_cell ? leg.upper : leg.lower;
    const bool outer_active = upper_cell ? current >= 0.0 : current < 0.0;
    const int mid_active = upper_cell ? leg.mid_p : leg.mid_n;
    const bool outer_on = to != state_m;
    push_event(sw[static_cast<std::size_t>(outer)], t, outer_active ? half : 0.0, magnitude, outer_on);
    for (int mid : {leg.mid_p, leg.mid_n}) {
        const bool hard = !outer_active && mid == mid_active;
        push_event(sw[static_cast<std::size_t>(mid)], t, hard ? half : 0.0, magnitude, !outer_on);
    }
}

void leg_conduction(std::vector<SwitchChannel>& sw, const Leg& leg, std::int8_t state, double begin, double end)
{
    auto at = [&](int i) -> SwitchChannel& { return sw[static_cast<std::size_t>(i)]; };
    if (state == state_p) {
        push_conduction(at(leg.upper), begin, end);
    } else if (state == state_n) {
        push_conduction(at(leg.lower), begin, end);
    } else {
        push_conduction(at(leg.mid_p), begin, end);
        push_conduction(at(leg.mid_n), begin, end);
    }
}

struct FftwPlanDeleter {
    void operator()(fftw_plan_s* p) const;
};

std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

void FftwPlanDeleter::operator()(fftw_plan_s* p) const
{
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(p);
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

std::string_view to_string(Topology t)
{
    switch (t) {
    case Topology::b6:
        return "B6";
    case Topology::tnpc:
        return "TNPC";
    case Topology::b6_2y:
        return "B6^2-Y";
    }
    return "?";
}

std::string_view to_string(Mode m)
{
    switch (m) {
    case Mode::two_level:
        return "2L";
    case Mode::three_level:
        return "3L";
    case Mode::star:
        return "Y";
    case Mode::h_bridge:
        return "H";
    }
    return "?";
}

std::string_view to_string(Variant v)
{
    switch (v) {
    case Variant::none:
        return "";
    case Variant::a:
        return "A";
    case Variant::b:
        return "B";
    case Variant::c:
        return "C";
    }
    return "?";
}

Topology parse_topology(std::string_view s)
{
    if (s == "B6" || s == "b6") {
        return Topology::b6;
    }
    if (s == "TNPC" || s == "tnpc") {
        return Topology::tnpc;
    }
    if (s == "B6^2-Y" || s == "B6²-Y" || s == "b6_2y" || s == "B62Y") {
        return Topology::b6_2y;
    }
    throw ConfigError("topology", "unknown topology '" + std::string(s) + "'");
}

Mode parse_mode(std::string_view s)
{
    if (s == "2L") {
        return Mode::two_level;
    }
    if (s == "3L") {
        return Mode::three_level;
    }
    if (s == "Y") {
        return Mode::star;
    }
    if (s == "H") {
        return Mode::h_bridge;
    }
    throw ConfigError("mode", "unknown mode '" + std::string(s) + "'");
}

Variant parse_variant(std::string_view s)
{
    if (s.empty() || s == "none") {
        return Variant::none;
    }
    if (s == "A") {
        return Variant::a;
    }
    if (s == "B") {
        return Variant::b;
    }
    if (s == "C") {
        return Variant::c;
    }
    throw ConfigError("variant", "unknown variant '" + std::string(s) + "'");
}

bool is_valid_combination(Topology topology, Mode mode, Variant variant)
{
    switch (topology) {
    case Topology::b6:
        return mode == Mode::two_level && variant == Variant::none;
    case Topology::tnpc:
        return (mode == Mode::two_level || mode == Mode::three_level) &&
               (variant == Variant::a || variant == Variant::b || variant == Variant::c);
    case Topology::b6_2y:
        return (mode == Mode::star || mode == Mode::h_bridge) && (variant == Variant::a || variant == Variant::b);
    }
    return false;
}

Variant effective_variant(Topology topology, Mode mode, Variant variant)
{
    if (topology == Topology::tnpc && mode == Mode::three_level) {
        return variant;
    }
    if (topology == Topology::b6_2y && mode == Mode::h_bridge) {
        return variant;
    }
    return Variant::none;
}

double voltage_limit(Mode mode, double dc_voltage)
{
    return mode == Mode::h_bridge ? dc_voltage : dc_voltage / std::numbers::sqrt3;
}

std::vector<std::string> switch_ids(Topology topology)
{
    std::vector<std::string> ids;
    const int per_phase = topology == Topology::b6 ? 2 : 4;
    for (char phase : {'a', 'b', 'c'}) {
        for (int j = 1; j <= per_phase; ++j) {
            ids.push_back(std::string("T_") + phase + std::to_string(j));
        }
    }
    if (topology == Topology::b6_2y) {
        for (int j = 1; j <= 3; ++j) {
            ids.push_back("T_d" + std::to_string(j));
        }
    }
    return ids;
}

void ModulationConfig::validate() const
{
    if (!is_valid_combination(topology, mode, variant)) {
        throw ConfigError("modulation", "invalid combination " + std::string(to_string(topology)) + "_" +
                                            std::string(to_string(variant)) + " in mode " +
                                            std::string(to_string(mode)));
    }
    if (!(switching_frequency > 0)) {
        throw ConfigError("modulation.switching_frequency", "switching frequency must be positive");
    }
    if (!(dc_voltage > 0)) {
        throw ConfigError("modulation.dc_voltage", "DC-link voltage must be positive");
    }
    if (time_step < 0 || time_step > 1.0 / (200.0 * switching_frequency) * (1.0 + 1e-12)) {
        throw ConfigError("modulation.time_step", "time step must not exceed 1/(200 f_sw)");
    }
    if (!(min_fundamental_hz > 0)) {
        throw ConfigError("modulation.min_fundamental_hz", "minimum fundamental frequency must be positive");
    }
}

double ModulationConfig::nominal_time_step() const
{
    return time_step > 0 ? time_step : 1.0 / (500.0 * switching_frequency);
}

const SwitchChannel& SwitchingTrace::channel(std::string_view id) const
{
    for (const auto& ch : switches) {
        if (ch.id == id) {
            return ch;
        }
    }
    throw Error("switching trace has no switch '" + std::string(id) + "'");
}

double SwitchingTrace::switch_current(const SwitchChannel& ch, double t) const
{
    auto it = std::upper_bound(ch.conduction.begin(), ch.conduction.end(), t,
                               [](double v, const Interval& iv) { return v < iv.begin; });
    if (it == ch.conduction.begin()) {
        return 0.0;
    }
    --it;
    if (t >= it->end) {
        return 0.0;
    }
    return std::abs(phase_currents[static_cast<std::size_t>(ch.phase)].at(t));
}

SwitchingTrace synthesize_period(const ModulationConfig& cfg, const OperatingPointSolution& sol)
{
    cfg.validate();
    const Variant variant = effective_variant(cfg.topology, cfg.mode, cfg.variant);

    SwitchingTrace trace;
    trace.fundamental_hz = std::max(sol.fundamental_hz, cfg.min_fundamental_hz);
    trace.electrical_omega = two_pi * trace.fundamental_hz;
    trace.dc_voltage = cfg.dc_voltage;
    const double period = 1.0 / trace.fundamental_hz;
    const auto n = next_even_smooth(static_cast<std::size_t>(std::ceil(period / cfg.nominal_time_step() - 1e-9)));
    trace.period = period;
    trace.sample_count = n;
    trace.time_step = period / static_cast<double>(n);

    const double omega = trace.electrical_omega;
    const double u_mag = sol.voltage_magnitude();
    const double u_ang = sol.voltage_angle();
    const double i_mag = sol.current_magnitude();
    const double i_ang = sol.current_angle();
    for (int x = 0; x < 3; ++x) {
        trace.phase_currents[static_cast<std::size_t>(x)] = {i_mag, omega, i_ang - third_turn * x};
    }

    const auto ids = switch_ids(cfg.topology);
    trace.switches.resize(ids.size());
    for (std::size_t j = 0; j < ids.size(); ++j) {
        trace.switches[j].id = ids[j];
    }
    const auto legs = build_legs(cfg.topology, cfg.mode);
    for (const auto& leg : legs) {
        for (int s : {leg.upper, leg.lower, leg.mid_p, leg.mid_n}) {
            if (s >= 0) {
                trace.switches[static_cast<std::size_t>(s)].phase = leg.phase;
            }
        }
    }
    if (cfg.topology == Topology::b6_2y) {
        for (int x = 0; x < 3; ++x) {
            trace.switches[static_cast<std::size_t>(12 + x)].phase = x;
        }
    }

    // Regular-sampled, centre-aligned carrier periods.
    const double ts = 1.0 / cfg.switching_frequency;
    const auto carrier_periods = static_cast<std::size_t>(std::ceil(period / ts - 1e-9));
    std::vector<LegTimeline> timelines(legs.size());
    std::vector<Pulse> pulses(legs.size());
    const double v_dc = cfg.dc_voltage;
    for (std::size_t k = 0; k < carrier_periods; ++k) {
        const double t0 = static_cast<double>(k) * ts;
        const double t_end = std::min(t0 + ts, period);
        const double tc = t0 + 0.5 * ts;
        std::array<double, 3> u{};
        std::array<double, 3> i{};
        for (int x = 0; x < 3; ++x) {
            u[static_cast<std::size_t>(x)] = u_mag * std::cos(omega * tc + u_ang - third_turn * x);
            i[static_cast<std::size_t>(x)] = trace.phase_currents[static_cast<std::size_t>(x)].at(tc);
        }
        const double u_max = *std::max_element(u.begin(), u.end());
        const double u_min = *std::min_element(u.begin(), u.end());

        if (cfg.mode == Mode::h_bridge) {
            for (std::size_t x = 0; x < 3; ++x) {
                const double m = u[x] / v_dc;
                const double d_left = 0.5 + 0.5 * m;
                pulses[x] = two_level_pulse(d_left);
                if (variant == Variant::a) {
                    const auto d = std::clamp(d_left, 0.0, 1.0);
                    pulses[x + 3] = {state_p, state_n, d};
                } else {
                    pulses[x + 3] = two_level_pulse(0.5 - 0.5 * m);
                }
            }
        } else if (cfg.mode == Mode::three_level) {
            std::array<double, 3> r{};
            for (std::size_t x = 0; x < 3; ++x) {
                r[x] = u[x] / (0.5 * v_dc);
            }
            const double r_max = *std::max_element(r.begin(), r.end());
            const double r_min = *std::min_element(r.begin(), r.end());
            double offset = 0.0;
            if (variant == Variant::a) {
                const double o1 = -0.5 * (r_max + r_min);
                std::array<double, 3> g{};
                for (std::size_t x = 0; x < 3; ++x) {
                    const double shifted = r[x] + o1;
                    g[x] = shifted - std::floor(shifted);
                }
                const double g_max = *std::max_element(g.begin(), g.end());
                const double g_min = *std::min_element(g.begin(), g.end());
                offset = o1 + 0.5 - 0.5 * (g_max + g_min);
            } else if (variant == Variant::b) {
                offset = 1.0 - r_max;
            } else {
                const double o_p = 1.0 - r_max;
                const double o_n = -1.0 - r_min;
                double cost_p = 0.0;
                double cost_n = 0.0;
                const auto x_max = static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
                const auto x_min = static_cast<std::size_t>(std::min_element(r.begin(), r.end()) - r.begin());
                for (std::size_t x = 0; x < 3; ++x) {
                    if (x != x_max) {
                        cost_p += zero_vector_cost(std::clamp(r[x] + o_p, -1.0, 1.0), i[x], cfg.zero_vector_costs);
                    }
                    if (x != x_min) {
                        cost_n += zero_vector_cost(std::clamp(r[x] + o_n, -1.0, 1.0), i[x], cfg.zero_vector_costs);
                    }
                }
                // Equal costs (every phase switching, currents summing to zero)
                // resolve to [1,1,1] instead of rounding noise.
                offset = cost_p <= cost_n + 1e-9 * (cost_p + cost_n) ? o_p : o_n;
            }
            for (std::size_t x = 0; x < 3; ++x) {
                pulses[x] = three_level_pulse(r[x] + offset);
            }
        } else {
            const double mid = 0.5 * (u_max + u_min);
            for (std::size_t x = 0; x < 3; ++x) {
                pulses[x] = two_level_pulse(0.5 + (u[x] - mid) / v_dc);
            }
        }

        for (std::size_t l = 0; l < legs.size(); ++l) {
            const Pulse& p = pulses[l];
            const double a = t0 + 0.5 * (1.0 - p.fraction) * ts;
            const double b = t0 + 0.5 * (1.0 + p.fraction) * ts;
            auto& tl = timelines[l];
            tl.append(t0, std::min(a, t_end), p.outer);
            tl.append(std::min(a, t_end), std::min(b, t_end), p.inner);
            tl.append(std::min(b, t_end), t_end, p.outer);
        }
    }

    // Conduction intervals, switching events and sample-averaged leg states.
    // Each sample k covers [k dt, (k+1) dt); partially covered samples take the
    // time-weighted share so pulse widths are not quantised to the grid.
    const double dt = trace.time_step;
    const bool h_mode = cfg.mode == Mode::h_bridge;
    const double half = 0.5 * v_dc;
    for (auto& w : trace.winding_voltage) {
        w.assign(n, 0.0);
    }
    std::array<std::vector<double>, 3> dc_weight;
    for (auto& w : dc_weight) {
        w.assign(n, 0.0);
    }
    auto accumulate = [&](std::vector<double>& arr, double begin, double end, double value) {
        if (value == 0.0 || end <= begin) {
            return;
        }
        const double kb = std::clamp(begin / dt, 0.0, static_cast<double>(n));
        const double ke = std::clamp(end / dt, 0.0, static_cast<double>(n));
        const auto k0 = static_cast<std::size_t>(kb);
        const auto k1 = static_cast<std::size_t>(ke);
        if (k0 == k1) {
            if (k0 < n) {
                arr[k0] += value * (ke - kb);
            }
            return;
        }
        arr[k0] += value * (static_cast<double>(k0 + 1) - kb);
        for (std::size_t k = k0 + 1; k < k1; ++k) {
            arr[k] += value;
        }
        if (k1 < n) {
            arr[k1] += value * (ke - static_cast<double>(k1));
        }
    };
    for (std::size_t l = 0; l < legs.size(); ++l) {
        const Leg& leg = legs[l];
        const auto& tl = timelines[l];
        const std::size_t x = static_cast<std::size_t>(leg.phase);
        const double sign = leg.negate_current ? -1.0 : 1.0;
        const auto& current = trace.phase_currents[x];
        std::int8_t state = tl.initial;
        double begin = 0.0;
        auto close = [&](double end) {
            leg_conduction(trace.switches, leg, state, begin, end);
            accumulate(trace.winding_voltage[x], begin, end, sign * state * half);
            const double w = state == state_p ? 1.0 : (state == state_m && !h_mode ? 0.5 : 0.0);
            accumulate(dc_weight[x], begin, end, sign * w);
        };
        for (const auto& tr : tl.transitions) {
            close(tr.time);
            const double i_leg = leg.negate_current ? -current.at(tr.time) : current.at(tr.time);
            leg_commutation(trace.switches, leg, state, tr.state, tr.time, i_leg, v_dc);
            state = tr.state;
            begin = tr.time;
        }
        close(period);
    }
    if (cfg.topology == Topology::b6_2y && cfg.mode == Mode::star) {
        for (std::size_t x = 0; x < 3; ++x) {
            push_conduction(trace.switches[12 + x], 0.0, period);
        }
    }

    // Winding voltages and DC-link current, currents taken at sample centres.
    std::vector<double> i_eq(n);
    std::array<std::complex<double>, 3> phase_rot{};
    for (std::size_t x = 0; x < 3; ++x) {
        phase_rot[x] = std::polar(i_mag, trace.phase_currents[x].phase);
    }
    const std::complex<double> step = std::polar(1.0, omega * dt);
    std::complex<double> rot = std::polar(1.0, 0.5 * omega * dt);
    for (std::size_t k = 0; k < n; ++k) {
        double dc = 0.0;
        for (std::size_t x = 0; x < 3; ++x) {
            dc += dc_weight[x][k] * (rot * phase_rot[x]).real();
        }
        if (!h_mode) {
            const double mean =
                (trace.winding_voltage[0][k] + trace.winding_voltage[1][k] + trace.winding_voltage[2][k]) / 3.0;
            for (auto& w : trace.winding_voltage) {
                w[k] -= mean;
            }
        }
        i_eq[k] = dc;
        rot *= step;
        if ((k & 1023u) == 1023u) {
            rot /= std::abs(rot);
        }
    }
    double mean = 0.0;
    for (double v : i_eq) {
        mean += v;
    }
    mean /= static_cast<double>(n);
    trace.capacitor_current.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        trace.capacitor_current[k] = mean - i_eq[k];
    }
    return trace;
}

HarmonicSpectrum dq_ripple_spectrum(const SwitchingTrace& trace, double f_low, double f_high)
{
    if (!(f_high > f_low) || f_high <= 0.0) {
        throw InputError("spectrum window is empty");
    }
    const std::size_t n = trace.sample_count;
    if (n < 2 || trace.winding_voltage[0].size() != n) {
        throw InputError("switching trace has no voltage samples");
    }
    using RealBuffer = std::unique_ptr<double[], FftwFree>;
    using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;
    RealBuffer ud(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
    RealBuffer uq(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
    const std::size_t bins = n / 2 + 1;
    ComplexBuffer xd(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins)));
    ComplexBuffer xq(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins)));
    if (!ud || !uq || !xd || !xq) {
        throw Error("out of memory for spectrum");
    }

    const double s3 = std::numbers::sqrt3 / 2.0;
    const std::complex<double> step = std::polar(1.0, trace.electrical_omega * trace.time_step);
    std::complex<double> rot(1.0, 0.0);
    double mean_d = 0.0;
    double mean_q = 0.0;
    const auto& va = trace.winding_voltage[0];
    const auto& vb = trace.winding_voltage[1];
    const auto& vc = trace.winding_voltage[2];
    for (std::size_t k = 0; k < n; ++k) {
        const double c = rot.real();
        const double s = rot.imag();
        const double cb = -0.5 * c + s3 * s;
        const double cc = -0.5 * c - s3 * s;
        const double sb = -0.5 * s - s3 * c;
        const double sc = -0.5 * s + s3 * c;
        ud[k] = (2.0 / 3.0) * (va[k] * c + vb[k] * cb + vc[k] * cc);
        uq[k] = -(2.0 / 3.0) * (va[k] * s + vb[k] * sb + vc[k] * sc);
        mean_d += ud[k];
        mean_q += uq[k];
        rot *= step;
        if ((k & 1023u) == 1023u) {
            rot /= std::abs(rot);
        }
    }
    mean_d /= static_cast<double>(n);
    mean_q /= static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        ud[k] -= mean_d;
        uq[k] -= mean_q;
    }

    std::unique_ptr<fftw_plan_s, FftwPlanDeleter> plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan.reset(fftw_plan_dft_r2c_1d(static_cast<int>(n), ud.get(), xd.get(), FFTW_ESTIMATE));
    }
    if (!plan) {
        throw Error("FFT planning failed");
    }
    fftw_execute_dft_r2c(plan.get(), ud.get(), xd.get());
    fftw_execute_dft_r2c(plan.get(), uq.get(), xq.get());

    HarmonicSpectrum spectrum;
    const double df = 1.0 / trace.period;
    const auto first = static_cast<std::size_t>(std::max(1.0, std::ceil(f_low / df - 1e-9)));
    const auto last = std::min(bins - 1, static_cast<std::size_t>(std::floor(f_high / df + 1e-9)));
    const double norm = 1.0 / static_cast<double>(n);
    for (std::size_t h = first; h <= last; ++h) {
        const double f = static_cast<double>(h) * df;
        if (f < f_low || f > f_high) {
            continue;
        }
        const double scale = (2 * h == n ? 1.0 : 2.0) * norm;
        const double ad = scale * std::hypot(xd[h][0], xd[h][1]);
        const double aq = scale * std::hypot(xq[h][0], xq[h][1]);
        spectrum.bins.push_back({f, ad, aq});
    }
    return spectrum;
}

double dc_link_ripple(const SwitchingTrace& trace, double capacitance)
{
    if (!(capacitance > 0)) {
        throw InputError("DC-link capacitance must be positive");
    }
    double q = 0.0;
    double q_min = 0.0;
    double q_max = 0.0;
    for (double i : trace.capacitor_current) {
        q += i * trace.time_step;
        q_min = std::min(q_min, q);
        q_max = std::max(q_max, q);
    }
    return (q_max - q_min) / capacitance;
}

void write_trace_csv(const SwitchingTrace& trace, std::ostream& out)
{
    out << "t,u_a,u_b,u_c,i_a,i_b,i_c,i_cap\n";
    out.precision(9);
    for (std::size_t k = 0; k < trace.sample_count; ++k) {
        const double t = (static_cast<double>(k) + 0.5) * trace.time_step;
        out << t;
        for (const auto& w : trace.winding_voltage) {
            out << ',' << w[k];
        }
        for (const auto& pc : trace.phase_currents) {
            out << ',' << pc.at(t);
        }
        out << ',' << (k < trace.capacitor_current.size() ? trace.capacitor_current[k] : 0.0) << '\n';
    }
}

}  // namespace tractionopt
