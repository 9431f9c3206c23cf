#include "tractionopt/explorer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "tractionopt/errors.hpp"

namespace tractionopt {

namespace {

std::string fixed2(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

AreaFactor AreaFactor::parse(const std::string& text)
{
    if (text == "floor") {
        return {Kind::floor, 0.0};
    }
    if (text == "full") {
        return {Kind::full, 0.0};
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || !(v > 0)) {
        throw InputError("area factor '" + text + "' is neither a positive number nor floor/full");
    }
    return {Kind::value, v};
}

std::string AreaFactor::label() const
{
    switch (kind) {
    case Kind::floor:
        return "floor";
    case Kind::full:
        return "full";
    case Kind::value:
        break;
    }
    return fixed2(value);
}

void FamilySpec::validate() const
{
    if (modes.empty()) {
        throw ConfigError("families." + name + ".modes", "at least one mode required");
    }
    for (Mode m : modes) {
        if (!is_valid_combination(topology, m, variant)) {
            throw ConfigError("families." + name + ".modes",
                              "invalid combination " + design_label(topology, variant, {m}));
        }
    }
    if (factors.empty()) {
        throw ConfigError("families." + name + ".factors", "at least one area factor required");
    }
}

double FamilyAreas::floor_area() const
{
    return std::accumulate(mandatory.begin(), mandatory.end(), 0.0);
}

double FamilyAreas::full_area() const
{
    return std::accumulate(full.begin(), full.end(), 0.0);
}

std::vector<bool> auxiliary_switches(Topology topology, const std::vector<Mode>& modes)
{
    const auto n = switch_ids(topology).size();
    std::vector<bool> aux(n, false);
    if (modes.size() < 2) {
        return aux;
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (topology == Topology::tnpc) {
            aux[j] = j % 4 >= 2;
        } else if (topology == Topology::b6_2y) {
            aux[j] = j >= 12 || j % 4 < 2;
        }
    }
    return aux;
}

FamilyAreas family_areas(const SystemModel& system, const FamilySpec& spec, double baseline_area, double fsw)
{
    spec.validate();
    if (!(baseline_area > 0)) {
        throw InputError("baseline area must be positive");
    }
    FamilyAreas fa;
    fa.label = design_label(spec.topology, spec.variant, spec.modes);
    fa.baseline_area = baseline_area;
    const auto envelope = system.envelope(spec.topology);
    for (std::size_t m = 0; m < spec.modes.size(); ++m) {
        fa.reports.push_back(
            size_topology(system, spec.topology, spec.variant, spec.modes[m], envelope, fsw, m > 0).report);
    }
    const auto& base = fa.reports.front();
    const std::size_t n = base.binding_point.size();
    fa.auxiliary = auxiliary_switches(spec.topology, spec.modes);
    fa.mandatory.assign(n, 0.0);
    fa.full.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        fa.mandatory[j] = base.points[base.binding_point[j]].areas[j];
        fa.full[j] = fa.mandatory[j];
        if (!fa.auxiliary[j]) {
            continue;
        }
        for (const auto& r : fa.reports) {
            fa.full[j] = std::max(fa.full[j], r.points[r.binding_point[j]].areas[j]);
        }
    }
    return fa;
}

double resolve_factor(const AreaFactor& factor, const FamilyAreas& areas)
{
    switch (factor.kind) {
    case AreaFactor::Kind::floor:
        return areas.floor_factor();
    case AreaFactor::Kind::full:
        return areas.full_factor();
    case AreaFactor::Kind::value:
        break;
    }
    return factor.value;
}

std::vector<double> allocate_areas(const FamilyAreas& areas, double target_area, double granule,
                                   Allocation allocation)
{
    const std::size_t n = areas.mandatory.size();
    const double target = std::round(target_area / granule) * granule;
    const double floor = areas.floor_area();
    if (target < floor - 1e-9 * granule) {
        throw InputError(areas.label + ": target area " + fixed2(target_area) + " mm^2 is below the structural floor " +
                         fixed2(floor) + " mm^2 (factor " + fixed2(areas.floor_factor()) + ")");
    }
    std::vector<double> cap(n, 0.0);
    std::vector<double> weight(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        if (!areas.auxiliary[j]) {
            continue;
        }
        cap[j] = std::max(areas.full[j] - areas.mandatory[j], 0.0);
        if (cap[j] > 0.0) {
            weight[j] = allocation == Allocation::proportional ? cap[j] : 1.0;
        }
    }

    // Water-filling: share the surplus by weight, freezing switches at their caps.
    std::vector<double> share(n, 0.0);
    std::vector<bool> active(n);
    for (std::size_t j = 0; j < n; ++j) {
        active[j] = weight[j] > 0.0;
    }
    double remaining = target - floor;
    while (remaining > 0.0) {
        double w_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            w_sum += active[j] ? weight[j] : 0.0;
        }
        if (w_sum == 0.0) {
            break;
        }
        bool capped = false;
        for (std::size_t j = 0; j < n; ++j) {
            if (active[j] && share[j] + remaining * weight[j] / w_sum >= cap[j]) {
                capped = true;
            }
        }
        if (!capped) {
            for (std::size_t j = 0; j < n; ++j) {
                if (active[j]) {
                    share[j] += remaining * weight[j] / w_sum;
                }
            }
            break;
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (active[j] && share[j] + remaining * weight[j] / w_sum >= cap[j]) {
                remaining -= cap[j] - share[j];
                share[j] = cap[j];
                active[j] = false;
            }
        }
    }

    // Granule quantization: floor, then largest remainders.
    std::vector<double> granted(n, 0.0);
    std::vector<double> remainder(n, 0.0);
    double used = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        granted[j] = std::floor(share[j] / granule + 1e-9) * granule;
        remainder[j] = share[j] - granted[j];
        used += granted[j];
    }
    auto spare = static_cast<long>(std::floor((target - floor - used) / granule + 1e-9));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t j : order) {
        if (spare <= 0) {
            break;
        }
        if (weight[j] > 0.0 && granted[j] + granule <= cap[j] + 1e-9) {
            granted[j] += granule;
            --spare;
        }
    }
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        out[j] = areas.mandatory[j] + granted[j];
    }
    return out;
}

namespace {

bool same_areas(const InverterDesign& a, const InverterDesign& b)
{
    if (a.switches.size() != b.switches.size()) {
        return false;
    }
    for (std::size_t j = 0; j < a.switches.size(); ++j) {
        if (a.switches[j].area != b.switches[j].area) {
            return false;
        }
    }
    return true;
}

}  // namespace

std::vector<FamilyDesign> build_design_family(const SystemModel& system, const FamilySpec& spec,
                                              const FamilyAreas& areas)
{
    spec.validate();
    struct Entry {
        double factor;
        std::string label;
    };
    std::vector<Entry> entries;
    for (const auto& f : spec.factors) {
        // Auxiliary switches stop at full capability, so larger factors
        // collapse onto the full design.
        const double value = std::min(resolve_factor(f, areas), areas.full_factor());
        entries.push_back({value, f.label()});
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return a.factor < b.factor; });
    std::vector<FamilyDesign> out;
    const bool single = spec.modes.size() == 1 && entries.size() == 1;
    for (const auto& e : entries) {
        FamilyDesign fd;
        fd.family = spec.name;
        fd.factor = e.factor;
        fd.factor_label = e.label;
        fd.design = system.blank_design(spec.topology, spec.variant, spec.modes);
        const auto a = allocate_areas(areas, e.factor * areas.baseline_area, system.config().chip_granule,
                                      spec.allocation);
        for (std::size_t j = 0; j < a.size(); ++j) {
            fd.design.switches[j].area = a[j];
        }
        fd.design.reference = spec.topology == Topology::b6 && spec.modes.size() == 1;
        if (!single) {
            fd.design.name += " x" + fixed2(e.factor);
        }
        if (!out.empty() && same_areas(out.back().design, fd.design)) {
            if (e.label == "full") {
                out.back().factor_label = e.label;
            }
            continue;
        }
        out.push_back(std::move(fd));
    }
    return out;
}

bool dominates(const ParetoPoint& a, const ParetoPoint& b)
{
    return a.area <= b.area && a.delta_e <= b.delta_e && (a.area < b.area || a.delta_e < b.delta_e);
}

ParetoResult pareto_front(const std::vector<ParetoPoint>& points)
{
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points[a].area != points[b].area) {
            return points[a].area < points[b].area;
        }
        return points[a].delta_e < points[b].delta_e;
    });
    std::vector<std::string> dominated_by(points.size());
    std::vector<bool> on_front(points.size(), false);
    bool have_best = false;
    std::size_t best = 0;
    for (std::size_t g = 0; g < order.size();) {
        std::size_t end = g;
        while (end < order.size() && points[order[end]].area == points[order[g]].area) {
            ++end;
        }
        const std::size_t head = order[g];
        const double g_min = points[head].delta_e;
        const bool improves = !have_best || g_min < points[best].delta_e;
        for (std::size_t k = g; k < end; ++k) {
            const std::size_t i = order[k];
            if (points[i].delta_e > g_min) {
                dominated_by[i] = points[head].design;
            } else if (improves) {
                on_front[i] = true;
            } else {
                dominated_by[i] = points[best].design;
            }
        }
        if (improves) {
            best = head;
            have_best = true;
        }
        g = end;
    }
    ParetoResult r;
    for (std::size_t i : order) {
        if (on_front[i]) {
            r.front.push_back(points[i]);
        }
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!on_front[i]) {
            r.dominated.push_back(points[i]);
            r.dominated.back().dominated_by = dominated_by[i];
        }
    }
    return r;
}

}  // namespace tractionopt
