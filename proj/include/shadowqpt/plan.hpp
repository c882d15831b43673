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

#ifndef SHADOWQPT_PLAN_HPP
#define SHADOWQPT_PLAN_HPP

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "shadowqpt/acquire.hpp"
#include "shadowqpt/channels.hpp"
#include "shadowqpt/shadows.hpp"

namespace shadowqpt {

// Minimal TOML reader covering the plan files: [section] headers,
// key = value lines with strings, integers, floats, booleans and
// (possibly nested) arrays, and # comments. Keys are flattened to
// "section.key".
struct TomlValue {
    enum class Kind { boolean, integer, floating, string, array };
    Kind kind = Kind::integer;
    bool b = false;
    int64_t i = 0;
    double d = 0.0;
    std::string s;
    std::vector<TomlValue> arr;

    bool as_bool() const;
    int64_t as_int() const;
    double as_double() const;  // accepts integers
    const std::string &as_string() const;
    const std::vector<TomlValue> &as_array() const;
};

using TomlTable = std::map<std::string, TomlValue>;

TomlTable parse_toml(const std::string &text);
TomlValue parse_toml_value(const std::string &text);

// Fully resolved experiment description. Presets fill every field; plan
// files and key=value overrides replace individual entries.
struct ExperimentPlan {
    std::string preset = "full_process";
    uint64_t seed = 1;

    // channel
    std::string channel_kind = "ghz";  // ghz | identity | tfim
    int n = 2;
    double noise = 0.0;
    std::vector<double> tfim_J, tfim_h;  // empty for seed-drawn couplings
    double tfim_t = 0.1;

    // acquisition
    Scheme scheme = Scheme::ancilla;
    std::string pairing = "pauli";  // pauli | non_fixed | fixed
    std::vector<std::pair<int, int>> fixed_pairs;
    double fixed_fraction = 0.0;  // share of settings using the fixed plan
    int settings = 1024;
    int reps = 50;

    // estimator
    EstimatorConfig estimator;

    // ordered postprocessing stages: cp, tp, purify, mle
    std::vector<std::string> steps;

    // hamlearn
    int64_t shots = 20000;
    int disorder_realizations = 1;
    double t = 0.1;

    static ExperimentPlan from_preset(const std::string &name);
    static ExperimentPlan from_toml_text(const std::string &text);

    void apply_table(const TomlTable &table);
    void apply_override(const std::string &key_equals_value);
    void validate() const;

    ChannelSpec build_channel() const;
    // Acquisition honoring the fixed/non-fixed split for this plan.
    std::vector<MeasurementRecord> acquire(uint64_t seed_override) const;
};

// Paper-style overlap test states: a fixed input state per family and 51
// rotated GHZ target states.
struct OverlapFamily {
    std::string name;
    CMatrix rho;
    std::vector<double> thetas;
    std::vector<CMatrix> sigmas;
};
std::vector<OverlapFamily> overlap_presets(int n);

struct ValidationReport {
    int64_t records = 0;
    int64_t outcomes = 0;
    std::string scheme;
    int n = 0;
    std::vector<std::string> errors;
};
ValidationReport validate_records(const std::string &path);

// Matrix dump: {"n", "normalized", "scheme", "data": row-major [re, im]}.
void write_choi_json(const ChoiMatrix &choi, const std::string &scheme,
                     const std::string &path);
ChoiMatrix read_choi_json(const std::string &path);

// Runs the preset pipeline, writing records.jsonl, choi_<stage>.json,
// metrics.csv and report.json under out_dir. Removes everything it wrote
// when a stage fails.
void run_plan(const ExperimentPlan &plan, const std::string &out_dir);

}  // namespace shadowqpt

#endif
