#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tractionopt/config.hpp"
#include "tractionopt/errors.hpp"

namespace tractionopt {

enum class Stage { size, family, evaluate, boundary, pareto };

std::string_view to_string(Stage stage);

/// Error raised inside a pipeline stage; the message carries the stage tag.
class StageError : public Error {
public:
    StageError(Stage stage, const std::string& what);
    [[nodiscard]] Stage stage() const { return stage_; }

private:
    Stage stage_;
};

struct RunOptions {
    std::vector<Stage> stages{Stage::size, Stage::family, Stage::evaluate, Stage::boundary, Stage::pareto};
    std::optional<FswPolicy> policy;  // overrides the configured partial-load policy
    int threads = 1;
    bool verbose = true;
};

struct DesignSummary {
    std::string family;
    std::string design;
    std::string factor_label;
    double factor = 0.0;
    double area = 0.0;
    std::optional<double> delta_e;
    std::optional<double> mean_loss;
};

struct BundleSummary {
    std::string config_hash;
    std::string policy;
    double baseline_area = 0.0;
    std::vector<DesignSummary> designs;
    std::vector<ParetoPoint> front;
    std::map<std::string, std::string> files;  // relative path -> SHA-256
    bool complete = false;
};

/// size -> family -> evaluate -> boundary -> pareto. Files are written into
/// `out_dir` with a manifest.json; a failing stage leaves a manifest marked
/// incomplete and rethrows as StageError.
BundleSummary run_pipeline(const PipelineConfig& config, const std::filesystem::path& out_dir,
                           const RunOptions& options);

/// Fixed-precision number formatting used in every bundle file.
std::string format_number(double v);

}  // namespace tractionopt
