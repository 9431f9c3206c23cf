#include "tractionopt/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

#include "tractionopt/explorer.hpp"
#include "tractionopt/full_load_sizer.hpp"
#include "tractionopt/partial_load.hpp"
#include "tractionopt/vehicle_cycle.hpp"

namespace tractionopt {

namespace {

using nlohmann::json;

std::string slug(const std::string& name)
{
    std::string out;
    for (char c : name) {
        const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-';
        if (keep) {
            out += c;
        } else if (!out.empty() && out.back() != '_') {
            out += '_';
        }
    }
    while (!out.empty() && out.back() == '_') {
        out.pop_back();
    }
    return out;
}

std::string mode_list(const std::vector<Mode>& modes)
{
    std::string s;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        s += (i ? "/" : "");
        s += to_string(modes[i]);
    }
    return s;
}

std::string sizing_csv(const SizingReport& r, const std::vector<std::string>& ids)
{
    std::ostringstream s;
    s << "point,speed_rpm,torque_nm,mode,fsw_hz,ripple_v,psw_over_pcon,total_area_mm2";
    for (const auto& id : ids) {
        s << ",area_" << id;
    }
    for (const auto& id : ids) {
        s << ",tj_" << id;
    }
    s << "\n";
    for (std::size_t i = 0; i < r.points.size(); ++i) {
        const auto& p = r.points[i];
        s << i << "," << format_number(p.point.speed_rpm) << "," << format_number(p.point.torque) << ","
          << to_string(p.mode) << "," << format_number(p.switching_frequency) << "," << format_number(p.ripple) << ","
          << format_number(p.switching_to_conduction) << "," << format_number(p.total_area());
        for (double a : p.areas) {
            s << "," << format_number(a);
        }
        for (double t : p.junction_temperatures) {
            s << "," << format_number(t);
        }
        s << "\n";
    }
    return s.str();
}

json areas_json(const std::vector<std::string>& ids, const std::vector<double>& areas)
{
    json j = json::object();
    for (std::size_t k = 0; k < ids.size(); ++k) {
        j[ids[k]] = areas[k];
    }
    return j;
}

std::string cycle_csv(const CycleResult& r)
{
    std::ostringstream s;
    s << "index,speed_rpm,torque_nm,weight_s,mode,fsw_hz,p_con_w,p_sw_w,p_inv_w,p_mot_h_w,p_mot_f_w,p_tot_w,ripple_v,"
         "tj_max_c\n";
    for (std::size_t i = 0; i < r.points.size(); ++i) {
        const auto& p = r.points[i];
        s << i << "," << format_number(p.point.speed_rpm) << "," << format_number(p.point.torque) << ","
          << format_number(p.point.weight_s) << "," << to_string(p.mode) << "," << format_number(p.switching_frequency)
          << "," << format_number(p.p_con) << "," << format_number(p.p_sw) << "," << format_number(p.p_inv) << ","
          << format_number(p.p_mot_h) << "," << format_number(p.p_mot_f) << "," << format_number(p.p_tot) << ","
          << format_number(p.ripple) << "," << format_number(p.max_junction_temperature) << "\n";
    }
    return s.str();
}

int mode_code(Mode m)
{
    switch (m) {
    case Mode::two_level:
        return 2;
    case Mode::three_level:
        return 3;
    case Mode::star:
        return 1;
    case Mode::h_bridge:
        return 4;
    }
    return 0;
}

std::string boundary_dat(const ModeBoundaryMap& map)
{
    std::ostringstream s;
    s << "# design: " << map.design << "\n";
    s << "# fsw_hz: " << format_number(map.switching_frequency) << "\n";
    s << "# best_mode codes: 0 none, 1 Y, 2 2L, 3 3L, 4 H\n";
    s << "# speed_rpm torque_nm in_envelope best_mode feasible_count fallback_loss_w best_loss_w loss_difference_w\n";
    for (std::size_t i = 0; i < map.speeds.size(); ++i) {
        for (std::size_t j = 0; j < map.torques.size(); ++j) {
            const auto& c = map.at(i, j);
            s << format_number(c.speed_rpm) << " " << format_number(c.torque) << " " << (c.in_envelope ? 1 : 0) << " "
              << (c.best ? mode_code(*c.best) : 0) << " " << c.feasible.size() << " " << format_number(c.fallback_loss)
              << " " << format_number(c.best_loss) << " " << format_number(c.loss_difference) << "\n";
        }
        s << "\n";
    }
    return s.str();
}

bool wants(const std::vector<Stage>& stages, Stage s)
{
    return std::find(stages.begin(), stages.end(), s) != stages.end();
}

}  // namespace

std::string_view to_string(Stage stage)
{
    switch (stage) {
    case Stage::size:
        return "size";
    case Stage::family:
        return "family";
    case Stage::evaluate:
        return "evaluate";
    case Stage::boundary:
        return "boundary";
    case Stage::pareto:
        return "pareto";
    }
    return "?";
}

StageError::StageError(Stage stage, const std::string& what)
    : Error("[" + std::string(to_string(stage)) + "] " + what), stage_(stage)
{
}

std::string format_number(double v)
{
    if (v == 0.0) {
        return "0";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

BundleSummary run_pipeline(const PipelineConfig& config, const std::filesystem::path& out_dir,
                           const RunOptions& options)
{
    // Stage prerequisites.
    auto stages = options.stages;
    const bool do_pareto = wants(stages, Stage::pareto);
    const bool do_boundary = wants(stages, Stage::boundary);
    const bool do_evaluate = do_pareto || wants(stages, Stage::evaluate);
    const bool do_family = do_evaluate || do_boundary || wants(stages, Stage::family);

    const FswPolicy policy = options.policy.value_or(config.policy);
    const SystemModel system(config.system);
    DriveCycle cycle;
    std::string cycle_hash;
    if (do_evaluate) {
        cycle = load_cycle(config.cycle_file);
        std::ifstream in(config.cycle_file, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        cycle_hash = sha256_hex(ss.str());
    }
    auto log = [&](Stage s, const std::string& msg) {
        if (options.verbose) {
            std::clog << "[" << to_string(s) << "] " << msg << std::endl;
        }
    };

    BundleSummary summary;
    summary.config_hash = config_hash(config);
    summary.policy = policy.tag();
    std::map<std::string, std::string> files;
    json manifest;
    manifest["config_hash"] = summary.config_hash;
    manifest["policy"] = summary.policy;
    if (!cycle_hash.empty()) {
        manifest["cycle"] = {{"name", cycle.name()},
                             {"sha256", cycle_hash},
                             {"samples", cycle.size()},
                             {"distance_m", cycle.distance()},
                             {"duration_s", cycle.duration()}};
    }
    json stage_list = json::array();

    auto write_bundle = [&](bool complete, const std::string& failed_stage, const std::string& error) {
        std::filesystem::create_directories(out_dir);
        json file_list = json::object();
        for (const auto& [path, content] : files) {
            const auto full = out_dir / path;
            std::filesystem::create_directories(full.parent_path());
            std::ofstream out(full, std::ios::binary);
            out << content;
            if (!out) {
                throw Error("cannot write " + full.string());
            }
            const auto hash = sha256_hex(content);
            file_list[path] = hash;
            summary.files[path] = hash;
        }
        manifest["files"] = file_list;
        manifest["stages"] = stage_list;
        manifest["complete"] = complete;
        if (!complete) {
            manifest["failed_stage"] = failed_stage;
            manifest["error"] = error;
        }
        std::ofstream out(out_dir / "manifest.json", std::ios::binary);
        out << manifest.dump(2) << "\n";
        summary.complete = complete;
    };

    Stage current = Stage::size;
    try {
        // Full-load sizing of the baseline.
        current = Stage::size;
        log(current, "sizing B6 baseline at " + format_number(config.sizing_frequency) + " Hz");
        const auto baseline =
            size_topology(system, Topology::b6, Variant::none, Mode::two_level, system.envelope(Topology::b6),
                          config.sizing_frequency);
        summary.baseline_area = baseline.report.total_area;
        const auto b6_ids = switch_ids(Topology::b6);
        files["sizing/B6_2L.csv"] = sizing_csv(baseline.report, b6_ids);
        const auto& worst = baseline.report.points[baseline.report.worst_ripple_point].point;
        const auto search =
            min_feasible_fsw(system, Topology::b6, Mode::two_level, Variant::none, worst, config.ripple_grid);
        json sizing;
        sizing["baseline"] = {{"design", baseline.design.name},
                              {"fsw_hz", config.sizing_frequency},
                              {"total_area_mm2", baseline.report.total_area},
                              {"areas_mm2", areas_json(b6_ids, [&] {
                                   std::vector<double> a;
                                   for (const auto& s : baseline.design.switches) {
                                       a.push_back(s.area);
                                   }
                                   return a;
                               }())},
                              {"worst_ripple_v", baseline.report.worst_ripple},
                              {"ripple_ok", baseline.report.ripple_ok}};
        json curve = json::array();
        for (const auto& c : search.curve) {
            curve.push_back({c.switching_frequency, c.ripple});
        }
        sizing["ripple_search"] = {{"speed_rpm", worst.speed_rpm},
                                   {"torque_nm", worst.torque},
                                   {"limit_v", config.system.max_ripple},
                                   {"found", search.found},
                                   {"min_fsw_hz", search.switching_frequency},
                                   {"curve", curve}};
        stage_list.push_back("size");

        std::vector<FamilyDesign> designs;
        if (do_family) {
            current = Stage::family;
            json fam_json = json::array();
            for (const auto& spec : config.families) {
                log(current, "family " + spec.name);
                const auto fa = family_areas(system, spec, summary.baseline_area, config.sizing_frequency);
                const auto ids = switch_ids(spec.topology);
                for (const auto& r : fa.reports) {
                    files["sizing/" + slug(fa.label) + "_" + std::string(to_string(r.mode)) + ".csv"] =
                        sizing_csv(r, ids);
                }
                auto built = build_design_family(system, spec, fa);
                json dj = json::array();
                for (const auto& d : built) {
                    dj.push_back({{"design", d.design.name},
                                  {"factor", d.factor},
                                  {"factor_label", d.factor_label},
                                  {"total_area_mm2", d.design.total_area()}});
                }
                fam_json.push_back({{"name", spec.name},
                                    {"label", fa.label},
                                    {"modes", mode_list(spec.modes)},
                                    {"floor_area_mm2", fa.floor_area()},
                                    {"floor_factor", fa.floor_factor()},
                                    {"full_area_mm2", fa.full_area()},
                                    {"full_factor", fa.full_factor()},
                                    {"mandatory_mm2", areas_json(ids, fa.mandatory)},
                                    {"full_mm2", areas_json(ids, fa.full)},
                                    {"designs", dj}});
                for (auto& d : built) {
                    designs.push_back(std::move(d));
                }
            }
            sizing["families"] = fam_json;
            std::ostringstream csv;
            csv << "family,design,factor_label,factor,switch,area_mm2,auxiliary\n";
            for (const auto& d : designs) {
                const auto aux = auxiliary_switches(d.design.topology, d.design.modes);
                for (std::size_t j = 0; j < d.design.switches.size(); ++j) {
                    csv << d.family << "," << d.design.name << "," << d.factor_label << ","
                        << format_number(d.factor) << "," << d.design.switches[j].id << ","
                        << format_number(d.design.switches[j].area) << "," << (aux[j] ? 1 : 0) << "\n";
                }
            }
            files["designs.csv"] = csv.str();
            stage_list.push_back("family");
        }
        files["sizing_summary.json"] = sizing.dump(2) + "\n";

        for (const auto& d : designs) {
            summary.designs.push_back({d.family, d.design.name, d.factor_label, d.factor, d.design.total_area(),
                                       std::nullopt, std::nullopt});
        }

        if (do_evaluate) {
            current = Stage::evaluate;
            auto points = cycle_to_operating_points(cycle, config.system.vehicle);
            clamp_to_envelope(points, config.system.motor);
            std::ostringstream csv;
            csv << "family,design,policy,factor,area_mm2,energy_j,delta_e_kwh_per_100km,mean_loss_w,conduction_j,"
                   "switching_j,harmonic_motor_j,fundamental_motor_j,fsw_min_hz,fsw_max_hz\n";
            for (std::size_t k = 0; k < designs.size(); ++k) {
                const auto& d = designs[k];
                log(current, d.design.name + " (" + policy.tag() + ")");
                const auto r = evaluate_cycle(system, d.design, points, policy, cycle.distance(), cycle.duration(),
                                              options.threads);
                files["cycle/" + slug(d.design.name) + "_" + policy.tag() + ".csv"] = cycle_csv(r);
                double f_lo = r.points.front().switching_frequency;
                double f_hi = f_lo;
                for (const auto& p : r.points) {
                    f_lo = std::min(f_lo, p.switching_frequency);
                    f_hi = std::max(f_hi, p.switching_frequency);
                }
                csv << d.family << "," << d.design.name << "," << policy.tag() << "," << format_number(d.factor) << ","
                    << format_number(d.design.total_area()) << "," << format_number(r.energy) << ","
                    << format_number(r.delta_e) << "," << format_number(r.mean_loss) << ","
                    << format_number(r.totals.conduction) << "," << format_number(r.totals.switching) << ","
                    << format_number(r.totals.harmonic) << "," << format_number(r.totals.fundamental) << ","
                    << format_number(f_lo) << "," << format_number(f_hi) << "\n";
                summary.designs[k].delta_e = r.delta_e;
                summary.designs[k].mean_loss = r.mean_loss;
            }
            files["cycle_summary_" + policy.tag() + ".csv"] = csv.str();
            stage_list.push_back("evaluate");
        }

        if (do_boundary) {
            current = Stage::boundary;
            const double fsw = policy.optimal ? config.sizing_frequency : policy.fixed;
            for (const auto& d : designs) {
                if (d.design.modes.size() < 2) {
                    continue;
                }
                log(current, d.design.name);
                const auto map = mode_boundary_map(system, d.design, fsw, config.boundary_grid, options.threads);
                files["boundary/" + slug(d.design.name) + ".dat"] = boundary_dat(map);
            }
            stage_list.push_back("boundary");
        }

        if (do_pareto) {
            current = Stage::pareto;
            std::vector<ParetoPoint> pts;
            for (const auto& d : summary.designs) {
                pts.push_back({d.design, d.family, d.area, *d.delta_e, policy.tag(), ""});
            }
            const auto pr = pareto_front(pts);
            summary.front = pr.front;
            std::ostringstream csv;
            csv << "status,family,design,policy,area_mm2,delta_e_kwh_per_100km,dominated_by\n";
            for (const auto& p : pr.front) {
                csv << "front," << p.family << "," << p.design << "," << p.policy << "," << format_number(p.area)
                    << "," << format_number(p.delta_e) << ",\n";
            }
            for (const auto& p : pr.dominated) {
                csv << "dominated," << p.family << "," << p.design << "," << p.policy << ","
                    << format_number(p.area) << "," << format_number(p.delta_e) << "," << p.dominated_by << "\n";
            }
            files["pareto_" + policy.tag() + ".csv"] = csv.str();
            stage_list.push_back("pareto");
        }
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        write_bundle(false, std::string(to_string(current)), e.what());
        throw StageError(current, e.what());
    }
    write_bundle(true, "", "");
    return summary;
}

}  // namespace tractionopt
