#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hvlab/core_math.hpp"
#include "hvlab/errors.hpp"
#include "hvlab/grid.hpp"
#include "hvlab/minimize.hpp"
#include "hvlab/solver.hpp"

namespace hvlab {

/// Flat `key = value` configuration with [section] headers; keys are stored
/// as "section.key". Environment variables HVLAB_SECTION_KEY override file
/// values; unsectioned keys live in the "run" section.
class Config {
  public:
    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text);

    void apply_environment(); ///< HVLAB_* overrides
    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_seed(std::uint64_t fallback) const;
    std::vector<double> get_list(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const { return kv_; }

  private:
    std::map<std::string, std::string> kv_;
};

struct ExperimentConfig {
    std::string scenario;
    ProblemParams params;
    Weight weight;
    double R = 20.0, H = 20.0;
    int nr = 128, nz = 128;
    MinimizeConfig minimize;
    SolverConfig solver;
    std::uint64_t seed = 7;
    std::string output_dir = "out";
    int suite_size = 100;

    static ExperimentConfig from_config(const Config& cfg);
};

/// Known scenario presets; throws ConfigError for unknown names.
void apply_preset(ExperimentConfig& cfg, const std::string& name);
std::vector<std::string> preset_names();

struct Report {
    std::string scenario;
    std::string inputs_echo;   ///< canonical key=value echo of the inputs
    std::string payload_json;  ///< deterministic numeric payload
    std::string csv;           ///< optional suite rows
    double wall_time_s = 0.0;  ///< excluded from the determinism contract
    std::vector<std::string> artifact_paths;
    bool ok = true;
    std::string error; ///< structured error text when ok is false
};

/// Dispatch one scenario. Writes report files under cfg.output_dir when
/// write_files is true.
Report run(const ExperimentConfig& cfg, bool write_files = true);

struct SweepAxis {
    std::string key; ///< e.g. "weight.gamma", "problem.q", "grid.nr"
    std::vector<double> values;
};

/// Cartesian product of runs; each cell independent, failures isolated into
/// error rows. Returns reports ordered by cell index and writes summary.csv.
std::vector<Report> sweep(const ExperimentConfig& base, const std::vector<SweepAxis>& axes,
                          int workers, bool write_files = true);

/// Format a double with 17 significant digits (bit-reproducible text).
std::string format_g17(double v);

} // namespace hvlab
