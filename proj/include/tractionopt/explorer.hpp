#pragma once

#include <string>
#include <vector>

#include "tractionopt/full_load_sizer.hpp"
#include "tractionopt/system.hpp"

namespace tractionopt {

/// Chip-area factor relative to the B6 baseline: a number, the family's
/// structural minimum ("floor") or its full-capability total ("full").
struct AreaFactor {
    enum class Kind { value, floor, full };
    Kind kind = Kind::value;
    double value = 1.0;

    static AreaFactor parse(const std::string& text);
    [[nodiscard]] std::string label() const;
};

enum class Allocation { proportional, uniform };

struct FamilySpec {
    std::string name;
    Topology topology = Topology::b6;
    Variant variant = Variant::none;
    std::vector<Mode> modes;  // first = mandatory full-load mode
    std::vector<AreaFactor> factors;
    Allocation allocation = Allocation::proportional;

    void validate() const;
};

/// Per-switch area bounds of a family.
struct FamilyAreas {
    std::string label;
    double baseline_area = 0.0;
    std::vector<double> mandatory;  // sized in the mandatory mode, aux switches at least one granule
    std::vector<double> full;       // sized over every mode of the family
    std::vector<bool> auxiliary;
    std::vector<SizingReport> reports;  // one per mode

    [[nodiscard]] double floor_area() const;
    [[nodiscard]] double full_area() const;
    [[nodiscard]] double floor_factor() const { return floor_area() / baseline_area; }
    [[nodiscard]] double full_factor() const { return full_area() / baseline_area; }
};

/// Switches that receive surplus area in a multi-mode family.
std::vector<bool> auxiliary_switches(Topology topology, const std::vector<Mode>& modes);

FamilyAreas family_areas(const SystemModel& system, const FamilySpec& spec, double baseline_area,
                         double fsw);

/// Resolves "floor"/"full" and checks the structural minimum.
double resolve_factor(const AreaFactor& factor, const FamilyAreas& areas);

/// Per-switch areas for a target total: mandatory areas stay, the surplus is
/// spread over auxiliary switches (capped at their full-capability areas)
/// and quantized to granules without exceeding the granule-rounded target.
std::vector<double> allocate_areas(const FamilyAreas& areas, double target_area, double granule,
                                   Allocation allocation);

struct FamilyDesign {
    InverterDesign design;
    std::string family;
    double factor = 1.0;
    std::string factor_label;
};

std::vector<FamilyDesign> build_design_family(const SystemModel& system, const FamilySpec& spec,
                                              const FamilyAreas& areas);

struct ParetoPoint {
    std::string design;
    std::string family;
    double area = 0.0;     // mm^2
    double delta_e = 0.0;  // kWh / 100 km
    std::string policy;
    std::string dominated_by;  // set on dominated points
};

struct ParetoResult {
    std::vector<ParetoPoint> front;      // ascending area
    std::vector<ParetoPoint> dominated;  // input order
};

bool dominates(const ParetoPoint& a, const ParetoPoint& b);
ParetoResult pareto_front(const std::vector<ParetoPoint>& points);

}  // namespace tractionopt
