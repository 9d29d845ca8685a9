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

#ifndef NVNODE_GHZ_H
#define NVNODE_GHZ_H

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nvnode/node.h"

namespace nvnode {

/// Joint electron-carbon-photon correlators used by the GHZ witness.
enum class JointBasis { ZeIcZp, ZeZcIp, XeXcXp };

inline constexpr JointBasis kAllBases[3] = {JointBasis::ZeIcZp, JointBasis::ZeZcIp, JointBasis::XeXcXp};

std::string basis_name(JointBasis basis);
JointBasis parse_basis(const std::string &name);

/// Gates that map the basis's spin correlator onto the electron population.
/// ZeZc even parity ends bright (|0>_e), XeXc even parity ends dark (|1>_e),
/// and ZeIcZp reads the electron directly. The photon is never touched.
std::vector<GateSpec> mapping_sequence(JointBasis basis);

/// Mapped electron state (0 or 1) and photon bit (0 for the +1 outcome) ->
/// eigenvalue of the witness term for this basis. The ZeIcZp term carries
/// the minus sign of <-Z_e I_c Z_p>.
int correlator_value(JointBasis basis, int mapped_electron, int photon_bit);

/// |0>_e|0>_c -> MW pi/2 -> conditional rotation -> carbon and electron
/// corrections -> time-bin emission. Noiseless output is
/// (|0>_e|0>_c|l>_p + |1>_e|1>_c|e>_p)/sqrt(2).
std::vector<GateSpec> build_ghz_circuit();

/// The target GHZ state on the five-qubit node register.
std::vector<Complex> ideal_ghz_amplitudes();

/// Imbalanced-MZI readout of the time-bin qubit in the X basis: photon
/// dephasing of strength (1 - v)/2, Hadamard, Z projection, background.
/// Returns +1 or -1.
int mzi_photon_x_measurement(QuantumState &state, const NoiseModel &noise, Rng &rng);

enum class RunVariant { Unflipped = 0, Flipped = 1 };

/// Heralded shot counts of one basis, indexed by (variant, reported electron
/// bit, photon bit). A coincidence is a heralded shot whose electron readout
/// registered fluorescence (reported bit 0).
struct CoincidenceTable {
    JointBasis basis = JointBasis::ZeIcZp;
    std::array<std::array<std::array<uint64_t, 2>, 2>, 2> counts{};
    std::array<uint64_t, 2> shots{};
    std::vector<std::string> warnings;

    uint64_t heralded(RunVariant v) const;
    uint64_t coincidences(RunVariant v, int photon_bit) const;
    uint64_t total_coincidences() const;

    /// Joint population of (mapped electron state, photon bit): the unflipped
    /// run supplies mapped state 0, the flipped run mapped state 1, and all
    /// four entries are normalized together. Sums to 1.
    double population(int mapped_electron, int photon_bit) const;
    /// Per-variant populations over (reported electron bit, photon bit) of all
    /// heralded shots. Sums to 1 for each variant with data.
    double variant_population(RunVariant v, int electron_bit, int photon_bit) const;

    /// Associative, order-independent merge of partial tables.
    void merge(const CoincidenceTable &other);
};

struct MeasureOptions {
    size_t threads = 0;  // 0 = hardware concurrency
};

/// Runs shots/2 GHZ shots per run variant on the trajectory backend.
CoincidenceTable measure_joint(JointBasis basis, uint64_t shots, const NoiseModel &noise, uint64_t seed,
                               const MeasureOptions &options = {});

/// One shot. Returns (reported electron bit, photon bit), or nothing when the
/// photon was not heralded.
std::optional<std::array<int, 2>> run_ghz_shot(JointBasis basis, RunVariant variant, const NoiseModel &noise,
                                               Rng &rng);

/// Exact heralded outcome probabilities (variant, electron bit, photon bit)
/// on the density-matrix backend.
std::array<std::array<std::array<double, 2>, 2>, 2> exact_joint_probabilities(JointBasis basis,
                                                                             const NoiseModel &noise);

struct WitnessTerm {
    double value = 0.0;
    double sigma = 0.0;
    uint64_t coincidences = 0;
};

struct WitnessResult {
    WitnessTerm e1;  // <-Z_e I_c Z_p>
    WitnessTerm e2;  // <Z_e Z_c I_p>
    WitnessTerm e3;  // <X_e X_c X_p>
    double f_lb = 0.0;
    double sigma_f_lb = 0.0;
};

/// (e1 + e2 + e3 - 1) / 2.
double fidelity_lower_bound(double e1, double e2, double e3);

/// Witness from plain expectation values with given sigmas.
WitnessResult witness_from_values(double e1, double e2, double e3, double s1 = 0.0, double s2 = 0.0,
                                  double s3 = 0.0);

/// Expectation of the basis's witness term from coincidence weights.
double expectation_from_counts(JointBasis basis, const std::array<std::array<std::array<double, 2>, 2>, 2> &w,
                               std::optional<int> photon_bit = std::nullopt);

struct WitnessOptions {
    bool bootstrap = false;
    size_t resamples = 1000;
    uint64_t seed = 0;
};

/// Needs all three bases with at least one coincidence each. Sigmas are
/// binomial by default or bootstrap half-widths when requested.
WitnessResult estimate_witness(const std::map<JointBasis, CoincidenceTable> &tables,
                               const WitnessOptions &options = {});

/// Expectation from one run variant alone, normalized over all of its
/// heralded shots with the reported electron bit taken at face value.
double variant_expectation(const CoincidenceTable &table, RunVariant v);

/// Term expectation conditioned on one photon bit (ZeZcIp early vs late).
WitnessTerm conditional_term(const CoincidenceTable &table, int photon_bit);

/// Exact measured witness (mapping noise and readout included).
WitnessResult exact_witness(const NoiseModel &noise);

/// Prepared GHZ state (before any mapping) on the requested backend.
QuantumState prepare_ghz(const NoiseModel &noise, Backend backend, Rng &rng);

/// Witness evaluated directly on state expectations (no measurement model).
WitnessResult state_witness(const QuantumState &state);

}  // namespace nvnode

#endif
