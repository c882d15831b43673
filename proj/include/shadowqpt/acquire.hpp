// Copyright 2026 The shadowqpt Authors
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

#ifndef SHADOWQPT_ACQUIRE_HPP
#define SHADOWQPT_ACQUIRE_HPP

#include <string>
#include <utility>
#include <vector>

#include "shadowqpt/channels.hpp"
#include "shadowqpt/gates.hpp"
#include "shadowqpt/qmat.hpp"
#include "shadowqpt/rng.hpp"

namespace shadowqpt {

enum class Scheme { ancilla, two_sided };

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string &name);

// One unitary block of a measurement setting: either a k-qubit Clifford or
// per-wire basis rotations.
struct SettingBlock {
    std::vector<int> wires;
    bool is_clifford = false;
    CliffordElement cliff;
    std::vector<RotationLabel> labels;

    CMatrix unitary() const;
    int arity() const { return static_cast<int>(wires.size()); }
};

// A measurement setting over the doubled (Choi) register of 2n wires:
// wires 0..n-1 are the input side, n..2n-1 the output side. For the
// ancilla scheme all 2n wires are physical; for the two-sided scheme the
// input-side blocks describe U_L (state preparation, applied as U_L^dag
// to |0>) and the output-side blocks describe U_R, acting on the same n
// physical qubits.
struct UnitarySetting {
    Scheme scheme = Scheme::ancilla;
    int n = 0;
    std::vector<SettingBlock> blocks;
};

// Throws when wires do not partition the doubled register or block shapes
// are inconsistent.
void validate_setting(const UnitarySetting &setting);

// Width of the measured register: 2n for ancilla, n for two-sided.
int measured_width(const UnitarySetting &setting);

// Dense measurement unitary of an ancilla setting on the full 4^n space.
CMatrix ancilla_setting_unitary(const UnitarySetting &setting);

// (U_L, U_R) of a two-sided setting, each 2^n dense.
std::pair<CMatrix, CMatrix> two_sided_setting_unitaries(const UnitarySetting &setting);

struct MeasurementRecord {
    UnitarySetting setting;
    std::vector<std::string> outcomes;  // char 0 = most significant qubit
    uint64_t seed = 0;
    std::string source = "simulated";
};

// Which wires share Clifford blocks in the ancilla scheme.
struct PairingPlan {
    enum class Mode {
        pauli,      // one rotation per wire from the Z/X/Y basis set
        non_fixed,  // uniformly random perfect matching into 2-qubit Cliffords
        fixed,      // declared pairs always together, the rest random
    };
    Mode mode = Mode::pauli;
    std::vector<std::pair<int, int>> fixed_pairs;

    static PairingPlan pauli();
    static PairingPlan non_fixed();
    static PairingPlan fixed(std::vector<std::pair<int, int>> pairs);
};

// Exact Born sampling: outcomes b drawn with probability <b|U rho U^dag|b>
// by inverting the cumulative distribution over all 2^m outcomes.
// Throws when the probabilities do not sum to 1 within 1e-9.
std::vector<std::string> born_sample(const CMatrix &rho, const CMatrix &u, int reps,
                                     RngStream &rng);

// Ancilla-based acquisition: n Bell pairs, one half through the channel,
// then a random per-setting unitary over all 2n qubits. Setting i uses the
// RNG stream keyed by (seed, first_setting + i), so records are
// independent of worker scheduling and contiguous ranges can be acquired
// separately.
std::vector<MeasurementRecord> acquire_ancilla(const ChannelSpec &spec,
                                               const PairingPlan &plan, int n_settings,
                                               int reps, uint64_t seed,
                                               int first_setting = 0);

// Two-sided acquisition: prepare U_L^dag|0>, apply the channel, rotate by
// U_R, measure. U_L draws from the six-element rotation set per wire, U_R
// from the three-element basis set.
std::vector<MeasurementRecord> acquire_two_sided(const ChannelSpec &spec, int n_settings,
                                                 int reps, uint64_t seed,
                                                 int first_setting = 0);

// JSON-lines serialization; a ".gz" suffix selects gzip compression.
void write_records(const std::vector<MeasurementRecord> &records, const std::string &path);
std::vector<MeasurementRecord> read_records(const std::string &path);

// Raw non-empty lines of a record file (gzip-aware), for validation passes
// that must keep going after a bad line.
std::vector<std::string> read_record_lines(const std::string &path);

std::string record_to_json(const MeasurementRecord &record);
MeasurementRecord record_from_json(const std::string &line);

}  // namespace shadowqpt

#endif
