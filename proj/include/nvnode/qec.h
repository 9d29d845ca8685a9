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

#ifndef NVNODE_QEC_H
#define NVNODE_QEC_H

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "nvnode/analysis.h"
#include "nvnode/node.h"

namespace nvnode {

enum class PrepKind { ZeroL_EarlyPhoton, OneL_LatePhoton, PlusEntangled };

/// Initial logical-photon state. |0>_L = |000>_c, |1>_L = |111>_c.
struct LogicalPrep {
    PrepKind kind = PrepKind::ZeroL_EarlyPhoton;
    Complex alpha = 1.0;
    Complex beta = 0.0;

    static LogicalPrep zero();
    static LogicalPrep one();
    /// alpha |0>_L|e>_p + beta |1>_L|l>_p.
    static LogicalPrep plus(Complex alpha = 1.0 / std::sqrt(2.0), Complex beta = 1.0 / std::sqrt(2.0));

    /// Throws std::invalid_argument unless |alpha|^2 + |beta|^2 = 1.
    void validate() const;
    std::string str() const;
};

LogicalPrep parse_prep(const std::string &name);

enum class ParityCheck { ZIZ, IZZ, ZII };

std::string check_name(ParityCheck check);
std::vector<QubitId> check_support(ParityCheck check);
PauliString check_operator(ParityCheck check);

enum class Action { None, FlipQ1, FlipQ2, FlipQ3 };

std::string action_name(Action a);
Action parse_action(const std::string &name);

/// Lookup-table decoder: (-1,+1) -> FlipQ1, (+1,-1) -> FlipQ2,
/// (-1,-1) -> FlipQ3, (+1,+1) -> None.
Action decode(int ziz, int izz);

/// The four (ziz, izz) -> action entries.
struct CorrectionTable {
    static std::array<std::pair<std::array<int, 2>, Action>, 4> entries();
};

struct SyndromeRecord {
    int round = 0;
    int ziz = 1;
    int izz = 1;
    Action action = Action::None;
    bool feedback_applied = false;

    bool operator==(const SyndromeRecord &) const = default;
};

struct ShotRecord {
    uint64_t shot = 0;
    bool heralded = false;
    std::vector<SyndromeRecord> syndromes;
    int final_outcome = -1;  // i1 + 2 i2 + 4 i3 + 8 j; -1 when unheralded
    int final_ziz = 0;
    int final_izz = 0;
    int final_zii = 0;
    int final_zp = 0;

    bool operator==(const ShotRecord &) const = default;
};

/// Outcome index of |i1 i2 i3>_c |j>_p.
inline int outcome_index(int i1, int i2, int i3, int j) { return i1 | i2 << 1 | i3 << 2 | j << 3; }

/// Parities -> outcome index: i1 from ZII, i3 from ZIZ, i2 from IZZ.
int outcome_from_parities(int ziz, int izz, int zii, int zp);

/// Index over reported bits (ziz, izz, zii, zp), bit = 1 for eigenvalue -1.
/// This is the layout of the readout confusion used for mitigation.
int parity_index(int ziz, int izz, int zii, int zp);
int outcome_from_parity_index(int parity_idx);

/// Preparation circuit for the heralded path.
std::vector<GateSpec> prep_circuit(const LogicalPrep &prep);

/// Runs the preparation on a fresh node. The returned node carries the
/// herald flag.
NodeState prepare_logical(const LogicalPrep &prep, const NoiseModel &noise, Rng &rng,
                          Backend backend = Backend::PureVector);

/// Gates mapping a memory parity onto the electron, eigenvalue +1 -> |1>_e.
std::vector<GateSpec> parity_map(ParityCheck check);

/// Map, fluorescence readout, electron reset. Returns the reported parity.
int parity_round(QuantumState &state, ParityCheck check, const NoiseModel &noise, Rng &rng);

/// Reported parity from a reported fluorescence bit (dark = +1).
inline int parity_from_bit(int reported_bit) { return reported_bit == 1 ? 1 : -1; }

struct FinalMeasurement {
    int outcome = 0;
    int ziz = 1;
    int izz = 1;
    int zii = 1;
    int zp = 1;
};

/// ZIZ, IZZ and ZII readouts through the electron, then photon Z detection.
FinalMeasurement final_measurement(QuantumState &state, const NoiseModel &noise, Rng &rng);

struct QecOptions {
    /// One idle-noise step before the final measurement block.
    bool idle_before_final = true;
    /// Called on heralded shots at the start of round k (1..M) and with
    /// k = M + 1 just before the final block.
    std::function<void(QuantumState &, int round, uint64_t shot)> hook;
    size_t threads = 0;
};

ShotRecord run_qec_shot(const LogicalPrep &prep, int rounds, bool feedback, const NoiseModel &noise, uint64_t seed,
                        uint64_t shot, const QecOptions &options = {});

/// Trajectory backend. Records are ordered by shot index and independent of
/// the worker count.
std::vector<ShotRecord> run_qec(const LogicalPrep &prep, int rounds, bool feedback, uint64_t shots,
                                const NoiseModel &noise, uint64_t seed, const QecOptions &options = {});

/// Exact heralded distribution from the density-matrix backend.
struct QecDistribution {
    std::array<double, 16> parity_probs{};  // by parity_index
    std::vector<double> mean_ziz;           // reported, per round
    std::vector<double> mean_izz;
};

QecDistribution exact_qec(const LogicalPrep &prep, int rounds, bool feedback, const NoiseModel &noise,
                          const QecOptions &options = {});

/// Heralded records tallied by parity_index.
std::vector<uint64_t> parity_counts(const std::vector<ShotRecord> &records);

/// Per-bit confusion in parity_index layout.
std::vector<ConfusionMatrix> final_readout_confusion(const NoiseModel &noise);

/// Outcome indices whose population defines the fidelity for this prep.
std::vector<int> target_outcomes(const LogicalPrep &prep);

struct FidelityEstimate {
    double value = 0.0;
    double sigma = 0.0;
    double raw = 0.0;     // unmitigated target population
    double slack = 0.0;   // mitigation clip diagnostic
    uint64_t samples = 0;
    std::array<double, 16> mitigated{};  // by outcome index
};

/// Readout-mitigated population of the target outcomes. Sigma is the
/// multinomial standard error of the linear estimator.
FidelityEstimate logical_fidelity(const std::vector<double> &parity_probs, uint64_t samples,
                                  const LogicalPrep &prep, const NoiseModel &noise);
FidelityEstimate logical_fidelity(const std::vector<ShotRecord> &records, const LogicalPrep &prep,
                                  const NoiseModel &noise);

struct Mean {
    double value = 0.0;
    double sigma = 0.0;
    uint64_t n = 0;
};

struct PostSelection {
    Mean selected;
    Mean all;
    double acceptance = 0.0;
};

/// <Z_L Z_p> = mean of final_zii * final_zp over heralded records, with and
/// without the final_ziz = final_izz = +1 condition.
PostSelection post_select_no_error(const std::vector<ShotRecord> &records);
PostSelection post_select_no_error(const std::array<double, 16> &parity_probs, uint64_t samples);

/// Line-delimited JSON: a header object, then one record per line.
inline constexpr int kShotSchemaVersion = 1;
void write_shot_records(std::ostream &out, const std::vector<ShotRecord> &records, const std::string &config_json);
std::vector<ShotRecord> read_shot_records(std::istream &in);

}  // namespace nvnode

#endif
