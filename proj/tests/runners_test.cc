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


#include "nvnode/runners.h"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace nvnode;

namespace {

std::filesystem::path scratch(const std::string &name) {
    auto p = std::filesystem::temp_directory_path() / ("nvnode_runners_" + name);
    std::filesystem::remove_all(p);
    return p;
}

std::string slurp(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

ExperimentConfig small_qec(const std::string &out) {
    auto c = parse_experiment_config(
        "command = qec\n"
        "seed = 9\n"
        "shots = 300\n"
        "rounds = 3\n"
        "noise.herald_prob = 1  # every shot heralds\n");
    c.out_dir = out;
    return c;
}

int cli(const std::string &args) {
    std::string cmd = std::string(NVNODE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(config, parses_keys_and_comments) {
    auto c = parse_experiment_config(
        "# header\n"
        "command = ghz\n"
        "seed = 42\n"
        "shots = 1000\n"
        "bases = XeXcXp, ZeZcIp\n"
        "backend = exact\n"
        "noise.p_gate_e = 0.01\n"
        "noise.p_gate_e = 0.02\n"
        "target.e1 = 0.9\n"
        "target_sigma.izz_fidelity = 0.03\n");
    EXPECT_EQ(c.command, "ghz");
    EXPECT_EQ(c.seed, 42u);
    EXPECT_EQ(c.shots, 1000u);
    EXPECT_EQ(c.bases.size(), 2u);
    EXPECT_EQ(c.backend, Backend::DensityMatrix);
    ASSERT_EQ(c.noise_overrides.size(), 1u);
    EXPECT_DOUBLE_EQ(c.noise_overrides[0].second, 0.02);
    EXPECT_DOUBLE_EQ(c.noise().p_gate_e, 0.02);
    EXPECT_DOUBLE_EQ(c.targets.value.e1, 0.9);
    EXPECT_DOUBLE_EQ(c.targets.sigma.izz, 0.03);
    EXPECT_NO_THROW(c.validate());
}

TEST(config, rejects_bad_values) {
    ExperimentConfig c;
    EXPECT_THROW(c.set("shots", "-1"), ConfigError);
    EXPECT_THROW(c.set("shots", "12x"), ConfigError);
    EXPECT_THROW(c.set("rounds", ""), ConfigError);
    EXPECT_THROW(c.set("feedback", "maybe"), ConfigError);
    EXPECT_THROW(c.set("prep", "minus"), ConfigError);
    EXPECT_THROW(c.set("bases", "XeYcZp"), ConfigError);
    EXPECT_THROW(c.set("noise.no_such_rate", "0.1"), ConfigError);
    EXPECT_THROW(c.set("colour", "blue"), ConfigError);
    EXPECT_THROW(c.set("records", "perhaps"), ConfigError);
    EXPECT_THROW(parse_experiment_config("seed 4\n"), ConfigError);
    EXPECT_THROW(load_experiment_config("/nonexistent/nvnode.cfg"), ConfigError);
}

TEST(config, validation_ranges) {
    ExperimentConfig c;
    c.command = "qec";
    EXPECT_THROW(c.validate(), ConfigError);  // no seed
    c.seed = 1;
    EXPECT_NO_THROW(c.validate());
    c.shots = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c.shots = kMaxShots + 1;
    EXPECT_THROW(c.validate(), ConfigError);
    c.shots = kMaxShots;
    c.rounds = 65;
    EXPECT_THROW(c.validate(), ConfigError);
    c.rounds = 64;
    EXPECT_NO_THROW(c.validate());
    c.backend = Backend::DensityMatrix;
    c.inject = Injection::SingleX;
    EXPECT_THROW(c.validate(), ConfigError);
    c.command = "fit";
    c.inject = Injection::None;
    EXPECT_THROW(c.validate(), ConfigError);  // no input
}

TEST(config, missing_noise_file_is_a_config_error) {
    auto c = small_qec(scratch("missing").string());
    c.noise_path = "/nonexistent/noise.txt";
    EXPECT_THROW(run_experiment(c), ConfigError);
}

TEST(runners, qec_files_carry_headers) {
    auto dir = scratch("headers");
    auto out = run_experiment(small_qec(dir.string()));
    EXPECT_EQ(out.exit_code, 0);
    ASSERT_EQ(out.files.size(), 5u);
    for (const auto &f : out.files) {
        std::string text = slurp(f);
        if (f.ends_with(".jsonl")) {
            EXPECT_NE(text.find("\"schema\":\"nvnode.shot_records\""), std::string::npos) << f;
            EXPECT_NE(text.find("\"seed\":\"9\""), std::string::npos) << f;
        } else {
            EXPECT_TRUE(text.starts_with("# schema: nvnode.")) << f;
            EXPECT_NE(text.find("# config: seed = 9\n"), std::string::npos) << f;
            EXPECT_NE(text.find("# config: rounds = 3\n"), std::string::npos) << f;
            EXPECT_NE(text.find("# noise: herald_prob = 1\n"), std::string::npos) << f;
        }
    }
    std::filesystem::remove_all(dir);
}

TEST(runners, identical_seed_gives_identical_bytes) {
    auto a = scratch("det_a");
    auto b = scratch("det_b");
    auto ra = run_experiment(small_qec(a.string()));
    auto cb = small_qec(b.string());
    cb.threads = 3;
    auto rb = run_experiment(cb);
    ASSERT_EQ(ra.files.size(), rb.files.size());
    for (size_t i = 0; i < ra.files.size(); ++i) {
        EXPECT_EQ(slurp(ra.files[i]), slurp(rb.files[i])) << ra.files[i];
    }
    auto cc = small_qec(b.string());
    cc.seed = 10;
    auto rc = run_experiment(cc);
    EXPECT_NE(slurp(ra.files[0]), slurp(rc.files[0]));
    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);
}

TEST(runners, sweep_covers_both_modes_and_all_rounds) {
    auto c = small_qec(scratch("sweep").string());
    auto s = qec_sweep(c, c.noise());
    ASSERT_EQ(s.points.size(), 8u);
    EXPECT_FALSE(s.points[0].feedback);
    EXPECT_TRUE(s.points[4].feedback);
    EXPECT_EQ(s.points[3].rounds, 3);
    EXPECT_DOUBLE_EQ(s.points[3].t_ms, 15.0);
    EXPECT_EQ(s.points[3].heralded, 300u);
    EXPECT_EQ(s.parity_decay[true].size(), 3u);
    EXPECT_EQ(s.final_records[false].size(), 300u);
    EXPECT_EQ(s.fits.size() + s.fit_errors.size(), 2u);
}

TEST(runners, exact_ghz_without_noise_saturates_witness) {
    auto dir = scratch("ghz");
    ExperimentConfig c;
    c.command = "ghz";
    c.seed = 1;
    c.backend = Backend::DensityMatrix;
    c.out_dir = dir.string();
    for (const auto &[k, v] : NoiseModel{}.fields()) {
        c.set("noise." + k, k.starts_with("readout") || k == "mzi_visibility" || k == "herald_prob" ? "1" : "0");
        if (k == "round_duration_ms") c.set("noise." + k, "5");
    }
    auto out = run_experiment(c);
    std::string w = slurp((dir / "ghz_witness.tsv").string());
    EXPECT_NE(w.find("\nf_lb\t1\t0\t-\n"), std::string::npos) << w;
    std::filesystem::remove_all(dir);
}

TEST(runners, fit_reads_table) {
    auto dir = scratch("fit");
    std::filesystem::create_directories(dir);
    {
        std::ofstream t(dir / "in.tsv");
        t.precision(17);
        t << "# decay\nt_ms\tp\tsigma\n";
        for (int k = 0; k <= 12; ++k) {
            double tm = 5.0 * k;
            t << tm << "\t" << 0.5 * std::exp(-tm / 20.0) + 0.3 << "\t0.01\n";
        }
    }
    ExperimentConfig c;
    c.command = "fit";
    c.seed = 3;
    c.input = (dir / "in.tsv").string();
    c.out_dir = dir.string();
    auto out = run_experiment(c);
    std::string table = slurp((dir / "fit.tsv").string());
    auto row = table.find("\nt1l_ms\t");
    ASSERT_NE(row, std::string::npos) << table;
    EXPECT_NEAR(std::stod(table.substr(row + 8)), 20.0, 1e-6) << table;
    std::filesystem::remove_all(dir);
}

TEST(cli, exit_codes) {
    auto dir = scratch("cli");
    EXPECT_EQ(cli("qec --seed 1 --shots 0 --out " + dir.string()), 2);
    EXPECT_EQ(cli("qec --seed 1 --noise /nonexistent/noise.txt --out " + dir.string()), 2);
    EXPECT_EQ(cli("qec --shots 10 --out " + dir.string()), 2);
    EXPECT_EQ(cli("qec --seed 1 --rounds 65 --out " + dir.string()), 2);
    EXPECT_EQ(cli("teleport --seed 1"), 2);
    EXPECT_EQ(cli("--help"), 0);
    EXPECT_EQ(cli("qec --seed 1 --shots 50 --rounds 1 --set noise.herald_prob=1 --out " + dir.string()), 0);
    EXPECT_TRUE(std::filesystem::exists(dir / "qec_summary.tsv"));
    std::filesystem::remove_all(dir);
}
