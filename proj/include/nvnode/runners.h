// Copyright 2026 The nvnode Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef NVNODE_RUNNERS_H
#define NVNODE_RUNNERS_H

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nvnode/calibrate.h"
#include "nvnode/ghz.h"
#include "nvnode/qec.h"

namespace nvnode {

/// Bad configuration; the command line maps it to exit code 2.
class ConfigError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

enum class FeedbackMode { On, Off, Sweep };
enum class Injection { None, SingleX, LogicalX };

std::string feedback_mode_name(FeedbackMode m);
std::string injection_name(Injection i);

inline constexpr uint64_t kMaxShots = 100000000;
inline constexpr int kMaxRounds = 64;

struct ExperimentConfig {
    std::string command;
    std::optional<uint64_t> seed;
    uint64_t shots = 100000;
    int rounds = 12;
    FeedbackMode feedback = FeedbackMode::Sweep;
    std::string prep = "zero";
    Backend backend = Backend::PureVector;
    /// Empty means the built-in default noise model.
    std::string noise_path;
    std::string out_dir = "out";
    std::vector<JointBasis> bases = {kAllBases[0], kAllBases[1], kAllBases[2]};
    /// Error injected on every heralded qec shot. SingleX flips one random
    /// carbon at the start of one random round in 1..M and needs the
    /// trajectory backend. LogicalX flips all three carbons at round 1.
    Injection inject = Injection::None;
    bool write_records = true;
    bool idle_before_final = true;
    bool bootstrap = false;
    size_t resamples = 1000;
    size_t threads = 0;
    size_t grid_points = 9;
    /// Input table of the fit command (t_ms, p, sigma per row).
    std::string input;
    /// noise.<field> overrides applied after loading the noise file.
    std::vector<std::pair<std::string, double>> noise_overrides;
    CalibrationTargets targets;

    /// Sets one key. Throws ConfigError on unknown keys or bad values.
    void set(std::string_view key, std::string_view value);
    /// Range checks; the seed is mandatory.
    void validate() const;
    /// Every key with its resolved value, in a fixed order.
    std::vector<std::pair<std::string, std::string>> resolved() const;
    /// Loaded noise file (or defaults) with overrides applied.
    NoiseModel noise() const;
};

/// Flat `key = value` text, `#` comments.
ExperimentConfig parse_experiment_config(std::string_view text);
ExperimentConfig load_experiment_config(const std::string &path);

struct RunOutput {
    int exit_code = 0;
    std::vector<std::string> files;
    std::string report;
};

/// Tidy tab-separated table with a "# " header block carrying the schema
/// name and version, the resolved config and the noise model.
struct Table {
    std::string schema;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row);
    std::string render(const ExperimentConfig &config, const NoiseModel &noise) const;
};

/// Fixed 10-significant-digit rendering used by every table.
std::string fmt(double x);

/// Per-point results of the error-correction sweep.
struct QecPoint {
    bool feedback = false;
    int rounds = 0;
    double t_ms = 0.0;
    uint64_t heralded = 0;
    FidelityEstimate fidelity;
    PostSelection post;
    double final_ziz = 0.0;
    double final_izz = 0.0;
};

struct QecSweep {
    std::vector<QecPoint> points;
    /// Per-round syndrome means of the longest run, by feedback flag.
    std::map<bool, std::vector<std::array<double, 2>>> parity_decay;
    std::map<bool, FitResult> fits;
    std::map<bool, std::string> fit_errors;
    /// Trajectory records of the longest run, when records are enabled.
    std::map<bool, std::vector<ShotRecord>> final_records;
};

/// The sweep behind the qec command, without file output.
QecSweep qec_sweep(const ExperimentConfig &config, const NoiseModel &noise);

RunOutput run_ghz(const ExperimentConfig &config);
RunOutput run_qec(const ExperimentConfig &config);
RunOutput run_calibrate(const ExperimentConfig &config);
RunOutput run_fit(const ExperimentConfig &config);

/// Dispatches on config.command.
RunOutput run_experiment(const ExperimentConfig &config);

}  // namespace nvnode

#endif
