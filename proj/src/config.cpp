#include "tractionopt/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "tractionopt/errors.hpp"

namespace tractionopt {

namespace {

using nlohmann::json;

/// Tracks consumed keys so that leftovers can be reported as unknown.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path))
    {
        if (!node_.is_object()) {
            throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
        }
    }

    [[nodiscard]] std::string key_path(const std::string& key) const
    {
        return path_.empty() ? key : path_ + "." + key;
    }

    [[nodiscard]] bool has(const std::string& key) const { return node_.contains(key); }

    const json& get(const std::string& key)
    {
        auto it = node_.find(key);
        if (it == node_.end()) {
            throw ConfigError(key_path(key), "missing");
        }
        used_.insert(key);
        return *it;
    }

    double number(const std::string& key)
    {
        const auto& v = get(key);
        if (!v.is_number()) {
            throw ConfigError(key_path(key), "expected a number");
        }
        return v.get<double>();
    }

    double positive(const std::string& key)
    {
        const double v = number(key);
        if (!(v > 0)) {
            throw ConfigError(key_path(key), "must be positive");
        }
        return v;
    }

    int integer(const std::string& key)
    {
        const auto& v = get(key);
        if (!v.is_number_integer()) {
            throw ConfigError(key_path(key), "expected an integer");
        }
        return v.get<int>();
    }

    bool boolean(const std::string& key)
    {
        const auto& v = get(key);
        if (!v.is_boolean()) {
            throw ConfigError(key_path(key), "expected true or false");
        }
        return v.get<bool>();
    }

    std::string text(const std::string& key)
    {
        const auto& v = get(key);
        if (!v.is_string()) {
            throw ConfigError(key_path(key), "expected a string");
        }
        return v.get<std::string>();
    }

    Section section(const std::string& key) { return Section(get(key), key_path(key)); }

    std::vector<double> numbers(const std::string& key)
    {
        const auto& v = get(key);
        if (!v.is_array()) {
            throw ConfigError(key_path(key), "expected an array of numbers");
        }
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) {
                throw ConfigError(key_path(key), "expected an array of numbers");
            }
            out.push_back(e.get<double>());
        }
        return out;
    }

    void finish() const
    {
        for (auto it = node_.begin(); it != node_.end(); ++it) {
            if (!used_.count(it.key())) {
                throw ConfigError(key_path(it.key()), "unknown key");
            }
        }
    }

private:
    const json& node_;
    std::string path_;
    std::set<std::string> used_;
};

template <class F>
auto tagged(const std::string& key, F&& f)
{
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(key, e.what());
    }
}

FrequencyCurve read_curve(Section s)
{
    FrequencyCurve curve;
    if (s.has("power_law")) {
        auto p = s.section("power_law");
        const double f_lo = p.positive("f_min");
        const double f_hi = p.positive("f_max");
        const int ppd = p.integer("points_per_decade");
        const double f_ref = p.positive("reference_frequency");
        const double v_ref = p.positive("reference_value");
        const double exponent = p.number("exponent");
        p.finish();
        if (!(f_hi > f_lo) || ppd < 1) {
            throw ConfigError(p.key_path("f_max"), "need f_max > f_min and points_per_decade >= 1");
        }
        curve = tagged(s.key_path("power_law"),
                       [&] { return FrequencyCurve::power_law(f_lo, f_hi, ppd, f_ref, v_ref, exponent); });
    } else {
        auto f = s.numbers("frequencies");
        auto v = s.numbers("values");
        curve = tagged(s.key_path("values"), [&] { return FrequencyCurve(std::move(f), std::move(v)); });
    }
    s.finish();
    return curve;
}

DeviceTech read_device(Section s, const std::string& name)
{
    DeviceTech d;
    d.name = name;
    d.voltage_class = s.positive("voltage_class");
    d.specific_on_resistance = s.positive("specific_on_resistance");
    d.k_on = s.positive("k_on");
    d.k_off = s.positive("k_off");
    d.specific_output_charge = s.positive("specific_output_charge");
    d.reference_voltage = s.positive("reference_voltage");
    d.on_resistance_tempco = s.number("on_resistance_tempco");
    d.reference_temperature = s.number("reference_temperature");
    s.finish();
    tagged(s.key_path("voltage_class"), [&] {
        d.validate();
        return 0;
    });
    return d;
}

FamilySpec read_family(Section s)
{
    FamilySpec f;
    f.name = s.text("name");
    f.topology = tagged(s.key_path("topology"), [&] { return parse_topology(s.text("topology")); });
    f.variant = tagged(s.key_path("variant"), [&] { return parse_variant(s.text("variant")); });
    const auto& modes = s.get("modes");
    if (!modes.is_array() || modes.empty()) {
        throw ConfigError(s.key_path("modes"), "expected a non-empty array of mode names");
    }
    for (const auto& m : modes) {
        if (!m.is_string()) {
            throw ConfigError(s.key_path("modes"), "expected mode names");
        }
        f.modes.push_back(tagged(s.key_path("modes"), [&] { return parse_mode(m.get<std::string>()); }));
    }
    const auto& factors = s.get("factors");
    if (!factors.is_array() || factors.empty()) {
        throw ConfigError(s.key_path("factors"), "expected a non-empty array");
    }
    for (const auto& v : factors) {
        if (v.is_number()) {
            if (!(v.get<double>() > 0)) {
                throw ConfigError(s.key_path("factors"), "factors must be positive");
            }
            f.factors.push_back({AreaFactor::Kind::value, v.get<double>()});
        } else if (v.is_string()) {
            f.factors.push_back(tagged(s.key_path("factors"), [&] { return AreaFactor::parse(v.get<std::string>()); }));
        } else {
            throw ConfigError(s.key_path("factors"), "expected numbers or \"floor\"/\"full\"");
        }
    }
    const auto alloc = s.text("allocation");
    if (alloc == "proportional") {
        f.allocation = Allocation::proportional;
    } else if (alloc == "uniform") {
        f.allocation = Allocation::uniform;
    } else {
        throw ConfigError(s.key_path("allocation"), "expected proportional or uniform");
    }
    s.finish();
    tagged("families." + f.name, [&] {
        f.validate();
        return 0;
    });
    return f;
}

std::vector<double> read_grid(Section s)
{
    std::vector<double> grid;
    if (s.has("values")) {
        grid = s.numbers("values");
    } else {
        const double lo = s.positive("min");
        const double hi = s.positive("max");
        const double step = s.positive("step");
        if (hi < lo) {
            throw ConfigError(s.key_path("max"), "must not be below min");
        }
        const auto count = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
        for (int i = 0; i <= count; ++i) {
            grid.push_back(lo + step * i);
        }
    }
    s.finish();
    if (grid.empty() || !std::is_sorted(grid.begin(), grid.end()) ||
        std::adjacent_find(grid.begin(), grid.end()) != grid.end() || !(grid.front() > 0)) {
        throw ConfigError(s.key_path("values"), "grid must be positive and strictly ascending");
    }
    return grid;
}

}  // namespace

PipelineConfig parse_config(const std::string& text, const std::filesystem::path& base_dir)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
    }
    PipelineConfig pc;
    Section top(root, "");
    auto& sys = pc.system;

    {
        auto s = top.section("cycle");
        pc.cycle_file = base_dir / s.text("file");
        s.finish();
    }
    {
        auto s = top.section("vehicle");
        auto& v = sys.vehicle;
        v.frontal_area = s.positive("frontal_area");
        v.drag_coefficient = s.positive("drag_coefficient");
        v.air_density = s.positive("air_density");
        v.rolling_coefficient = s.number("rolling_coefficient");
        v.gravity = s.positive("gravity");
        v.wheel_radius = s.positive("wheel_radius");
        v.mass = s.positive("mass");
        v.gear_ratio = s.positive("gear_ratio");
        v.gear_efficiency = s.positive("gear_efficiency");
        v.axle_inertia = s.number("axle_inertia");
        v.machine_inertia = s.number("machine_inertia");
        v.machine_count = s.integer("machine_count");
        s.finish();
        tagged("vehicle", [&] {
            v.validate();
            return 0;
        });
    }
    {
        auto s = top.section("motor");
        auto& m = sys.motor;
        m.name = s.text("name");
        m.pole_pairs = s.integer("pole_pairs");
        m.stator_resistance = s.positive("stator_resistance");
        m.d_inductance = s.positive("d_inductance");
        m.q_inductance = s.positive("q_inductance");
        m.pm_flux = s.positive("pm_flux");
        m.max_current = s.positive("max_current");
        m.max_power = s.positive("max_power");
        m.max_torque = s.positive("max_torque");
        m.max_speed_rpm = s.positive("max_speed_rpm");
        auto iron = s.section("iron");
        m.iron.hysteresis = iron.number("hysteresis");
        m.iron.eddy = iron.number("eddy");
        m.iron.flux_reference = iron.positive("flux_reference");
        iron.finish();
        sys.open_winding_turn_ratio = s.positive("open_winding_turn_ratio");
        s.finish();
        tagged("motor", [&] {
            m.validate();
            return 0;
        });
    }
    {
        auto s = top.section("harmonics");
        auto& h = sys.harmonics;
        auto curves = s.section("curves");
        h.d_inductance = read_curve(curves.section("d_inductance"));
        h.q_inductance = read_curve(curves.section("q_inductance"));
        h.iron_resistance = read_curve(curves.section("iron_resistance"));
        h.magnet_resistance = read_curve(curves.section("magnet_resistance"));
        h.copper_resistance = read_curve(curves.section("copper_resistance"));
        curves.finish();
        h.k_iron = s.number("k_iron");
        h.k_mag = s.number("k_mag");
        h.k_cu = s.number("k_cu");
        h.f_max = s.positive("f_max");
        h.half_switching_lower_bound = s.boolean("half_switching_lower_bound");
        s.finish();
        tagged("harmonics", [&] {
            h.validate();
            return 0;
        });
    }
    {
        auto s = top.section("devices");
        sys.device_1200v = read_device(s.section("1200V"), "1200V");
        sys.device_750v = read_device(s.section("750V"), "750V");
        s.finish();
        if (sys.device_1200v.voltage_class != 1200.0 || sys.device_750v.voltage_class != 750.0) {
            throw ConfigError("devices", "voltage_class must match the device key");
        }
    }
    {
        auto s = top.section("thermal");
        auto& t = sys.thermal;
        t.heatsink_temperature = s.number("heatsink_temperature");
        t.max_junction_temperature = s.number("max_junction_temperature");
        t.resistance_coefficient = s.positive("resistance_coefficient");
        t.resistance_exponent = s.number("resistance_exponent");
        sys.temperature_feedback = s.boolean("temperature_feedback");
        s.finish();
    }
    {
        auto s = top.section("inverter");
        sys.dc_voltage = s.positive("dc_voltage");
        sys.dc_capacitance = s.positive("dc_capacitance");
        sys.max_ripple = s.positive("max_ripple");
        s.finish();
    }
    {
        auto s = top.section("simulation");
        sys.samples_per_carrier = s.positive("samples_per_carrier");
        sys.min_fundamental_hz = s.positive("min_fundamental_hz");
        s.finish();
    }
    {
        auto s = top.section("sizing");
        sys.chip_granule = s.positive("chip_granule");
        sys.max_switch_area = s.positive("max_switch_area");
        sys.envelope_points = s.integer("envelope_points");
        pc.sizing_frequency = s.positive("switching_frequency");
        pc.ripple_grid = read_grid(s.section("ripple_grid"));
        s.finish();
    }
    {
        auto s = top.section("partial_load");
        const auto& f = s.get("switching_frequency");
        if (f.is_string() && f.get<std::string>() == "opt") {
            pc.policy.optimal = true;
        } else if (f.is_number() && f.get<double>() > 0) {
            pc.policy.fixed = f.get<double>();
        } else {
            throw ConfigError(s.key_path("switching_frequency"), "expected a positive number or \"opt\"");
        }
        pc.policy.grid = read_grid(s.section("fsw_grid"));
        pc.boundary_grid = s.integer("boundary_grid");
        if (pc.boundary_grid < 2) {
            throw ConfigError(s.key_path("boundary_grid"), "must be at least 2");
        }
        s.finish();
    }
    {
        const auto& fams = top.get("families");
        if (!fams.is_array() || fams.empty()) {
            throw ConfigError("families", "expected a non-empty array");
        }
        std::set<std::string> names;
        for (std::size_t i = 0; i < fams.size(); ++i) {
            auto spec = read_family(Section(fams[i], "families[" + std::to_string(i) + "]"));
            if (!names.insert(spec.name).second) {
                throw ConfigError("families[" + std::to_string(i) + "].name", "duplicate family name");
            }
            pc.families.push_back(std::move(spec));
        }
        if (pc.families.front().topology != Topology::b6 || pc.families.front().modes.size() != 1) {
            throw ConfigError("families[0]", "the first family must be the B6 baseline");
        }
    }
    top.finish();
    tagged("<root>", [&] {
        sys.validate();
        return 0;
    });
    pc.canonical_json = root.dump();
    return pc;
}

PipelineConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("<file>", "cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

std::string sha256_hex(const std::string& data)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 computation failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

std::string config_hash(const PipelineConfig& config)
{
    return sha256_hex(config.canonical_json);
}

}  // namespace tractionopt
