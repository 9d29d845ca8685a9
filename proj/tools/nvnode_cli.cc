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


// nvnode: ghz, qec, calibrate and fit experiments on the simulated node.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nvnode/runners.h"

namespace {

struct Flag {
    const char *name;
    const char *key;
    const char *help;
};

constexpr Flag kFlags[] = {
    {"--seed", "seed", "Master seed (required)"},
    {"--shots", "shots", "Shots per point, 1..1e8"},
    {"--rounds", "rounds", "Largest number of QEC rounds M, 0..64"},
    {"--feedback", "feedback", "on, off or sweep"},
    {"--prep", "prep", "zero, one or plus"},
    {"--backend", "backend", "trajectory or exact"},
    {"--noise", "noise", "Noise model file"},
    {"--out", "out", "Output directory"},
    {"--bases", "bases", "Comma list of XeXcXp, ZeZcIp, -ZeIcZp"},
    {"--inject", "inject", "none, single_x or logical_x"},
    {"--records", "records", "Write shot records (on/off)"},
    {"--idle-before-final", "idle_before_final", "Idle round before the final readout (on/off)"},
    {"--bootstrap", "bootstrap", "Bootstrap witness intervals (on/off)"},
    {"--resamples", "resamples", "Bootstrap resamples"},
    {"--threads", "threads", "Worker threads, 0 = hardware"},
    {"--grid-points", "grid_points", "Calibration grid points per field"},
    {"--input", "input", "Input table for fit"},
};

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Simulated NV-centre network node: GHZ witness and repetition-code QEC"};
    app.require_subcommand(1);

    std::string config_path;
    std::map<std::string, std::string> flag_values;
    std::vector<std::string> sets;

    const std::map<std::string, std::string> descriptions = {
        {"ghz", "Electron-carbon-photon GHZ witness"},
        {"qec", "Repeated three-qubit repetition code with optional feedback"},
        {"calibrate", "Fit microscopic noise rates to target observables"},
        {"fit", "Fit p(t) = p_i exp(-t / T1L) + p_f to a t_ms, p, sigma table"},
    };
    for (const auto &[name, description] : descriptions) {
        auto *sub = app.add_subcommand(name, description);
        sub->add_option("-c,--config", config_path, "key = value config file");
        for (const auto &f : kFlags) {
            sub->add_option(f.name, flag_values[f.key], f.help);
        }
        sub->add_option("--set", sets, "Extra key=value setting, repeatable");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    auto *chosen = app.get_subcommands().front();
    try {
        nvnode::ExperimentConfig config;
        if (!config_path.empty()) {
            config = nvnode::load_experiment_config(config_path);
        }
        config.command = chosen->get_name();
        for (const auto &f : kFlags) {
            if (chosen->count(f.name) > 0) {
                config.set(f.key, flag_values[f.key]);
            }
        }
        for (const auto &s : sets) {
            auto eq = s.find('=');
            if (eq == std::string::npos) {
                throw nvnode::ConfigError("--set expects key=value, got '" + s + "'");
            }
            config.set(s.substr(0, eq), s.substr(eq + 1));
        }
        auto result = nvnode::run_experiment(config);
        std::cout << result.report;
        for (const auto &f : result.files) {
            std::cout << "wrote " << f << "\n";
        }
        return result.exit_code;
    } catch (const nvnode::ConfigError &e) {
        std::cerr << "nvnode: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "nvnode: " << e.what() << "\n";
        return 1;
    }
}
