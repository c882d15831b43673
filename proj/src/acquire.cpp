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

#include "shadowqpt/acquire.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <zlib.h>

#include "json.hpp"

namespace shadowqpt {

std::string scheme_name(Scheme s) {
    return s == Scheme::ancilla ? "ancilla" : "two_sided";
}

Scheme scheme_from_name(const std::string &name) {
    if (name == "ancilla") {
        return Scheme::ancilla;
    }
    if (name == "two_sided") {
        return Scheme::two_sided;
    }
    throw std::invalid_argument("scheme_from_name: unknown scheme " + name);
}

CMatrix SettingBlock::unitary() const {
    if (is_clifford) {
        return clifford_to_unitary(cliff);
    }
    return rotation_unitary(labels);
}

void validate_setting(const UnitarySetting &setting) {
    int width = 2 * setting.n;
    std::vector<bool> seen(static_cast<size_t>(width), false);
    for (const SettingBlock &b : setting.blocks) {
        if (b.wires.empty()) {
            throw std::invalid_argument("validate_setting: empty block");
        }
        for (int w : b.wires) {
            if (w < 0 || w >= width || seen[static_cast<size_t>(w)]) {
                throw std::invalid_argument("validate_setting: wires must partition the register");
            }
            seen[static_cast<size_t>(w)] = true;
        }
        if (b.is_clifford) {
            if (b.cliff.k != b.arity()) {
                throw std::invalid_argument("validate_setting: Clifford arity mismatch");
            }
        } else if (static_cast<int>(b.labels.size()) != b.arity()) {
            throw std::invalid_argument("validate_setting: one rotation label per wire required");
        }
        if (setting.scheme == Scheme::two_sided) {
            bool in_side = b.wires[0] < setting.n;
            for (int w : b.wires) {
                if ((w < setting.n) != in_side) {
                    throw std::invalid_argument(
                        "validate_setting: two-sided blocks cannot span input and output sides");
                }
            }
        }
    }
    for (bool s : seen) {
        if (!s) {
            throw std::invalid_argument("validate_setting: wires must partition the register");
        }
    }
}

int measured_width(const UnitarySetting &setting) {
    return setting.scheme == Scheme::ancilla ? 2 * setting.n : setting.n;
}

// Kron of block unitaries rearranged so wire w sits at register slot w.
static CMatrix blocks_to_unitary(const std::vector<const SettingBlock *> &blocks, int width) {
    std::vector<CMatrix> factors;
    std::vector<int> order;
    for (const SettingBlock *b : blocks) {
        factors.push_back(b->unitary());
        for (int w : b->wires) {
            order.push_back(w);
        }
    }
    CMatrix k = kron_all(factors);
    std::vector<int> perm(static_cast<size_t>(width));
    for (int slot = 0; slot < width; ++slot) {
        auto it = std::find(order.begin(), order.end(), slot);
        if (it == order.end()) {
            throw std::invalid_argument("blocks_to_unitary: missing wire");
        }
        perm[static_cast<size_t>(slot)] = static_cast<int>(it - order.begin());
    }
    return apply_qubit_permutation(k, perm);
}

CMatrix ancilla_setting_unitary(const UnitarySetting &setting) {
    if (setting.scheme != Scheme::ancilla) {
        throw std::invalid_argument("ancilla_setting_unitary: wrong scheme");
    }
    validate_setting(setting);
    std::vector<const SettingBlock *> ptrs;
    for (const SettingBlock &b : setting.blocks) {
        ptrs.push_back(&b);
    }
    return blocks_to_unitary(ptrs, 2 * setting.n);
}

std::pair<CMatrix, CMatrix> two_sided_setting_unitaries(const UnitarySetting &setting) {
    if (setting.scheme != Scheme::two_sided) {
        throw std::invalid_argument("two_sided_setting_unitaries: wrong scheme");
    }
    validate_setting(setting);
    std::vector<const SettingBlock *> left, right;
    for (const SettingBlock &b : setting.blocks) {
        (b.wires[0] < setting.n ? left : right).push_back(&b);
    }
    // Shift output-side wires down to physical qubit indices.
    std::vector<SettingBlock> shifted;
    for (const SettingBlock *b : right) {
        SettingBlock s = *b;
        for (int &w : s.wires) {
            w -= setting.n;
        }
        shifted.push_back(std::move(s));
    }
    std::vector<const SettingBlock *> right_ptrs;
    for (const SettingBlock &b : shifted) {
        right_ptrs.push_back(&b);
    }
    return {blocks_to_unitary(left, setting.n), blocks_to_unitary(right_ptrs, setting.n)};
}

PairingPlan PairingPlan::pauli() { return PairingPlan{}; }

PairingPlan PairingPlan::non_fixed() {
    PairingPlan p;
    p.mode = Mode::non_fixed;
    return p;
}

PairingPlan PairingPlan::fixed(std::vector<std::pair<int, int>> pairs) {
    PairingPlan p;
    p.mode = Mode::fixed;
    p.fixed_pairs = std::move(pairs);
    return p;
}

static std::string index_to_bitstring(Eigen::Index index, int width) {
    std::string s(static_cast<size_t>(width), '0');
    for (int q = 0; q < width; ++q) {
        if ((index >> (width - 1 - q)) & 1) {
            s[static_cast<size_t>(q)] = '1';
        }
    }
    return s;
}

static std::vector<std::string> sample_from_probs(const std::vector<double> &probs, int width,
                                                  int reps, RngStream &rng) {
    double total = 0.0;
    std::vector<double> cum(probs.size());
    for (size_t i = 0; i < probs.size(); ++i) {
        total += probs[i];
        cum[i] = total;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::runtime_error("born_sample: outcome probabilities sum to " +
                                 std::to_string(total));
    }
    std::vector<std::string> out;
    out.reserve(static_cast<size_t>(reps));
    for (int r = 0; r < reps; ++r) {
        double x = rng.uniform();
        auto it = std::upper_bound(cum.begin(), cum.end(), x);
        size_t idx = (it == cum.end()) ? cum.size() - 1 : static_cast<size_t>(it - cum.begin());
        out.push_back(index_to_bitstring(static_cast<Eigen::Index>(idx), width));
    }
    return out;
}

std::vector<std::string> born_sample(const CMatrix &rho, const CMatrix &u, int reps,
                                     RngStream &rng) {
    if (rho.rows() != u.rows() || rho.cols() != u.cols() || u.rows() != u.cols()) {
        throw std::invalid_argument("born_sample: dimension mismatch");
    }
    int width = 0;
    while ((Eigen::Index{1} << width) < u.rows()) {
        ++width;
    }
    // <b|U rho U^dag|b> without forming the full conjugation.
    CMatrix m = u * rho;
    std::vector<double> probs(static_cast<size_t>(u.rows()));
    for (Eigen::Index b = 0; b < u.rows(); ++b) {
        probs[static_cast<size_t>(b)] = (m.row(b) * u.row(b).adjoint())(0, 0).real();
    }
    return sample_from_probs(probs, width, reps, rng);
}

// Uniform perfect matching of the unpaired wires: repeatedly take the
// lowest free wire and draw its partner uniformly from the rest.
static std::vector<std::pair<int, int>> draw_pairing(const std::vector<int> &wires,
                                                     RngStream &rng) {
    std::vector<int> free = wires;
    std::vector<std::pair<int, int>> pairs;
    while (!free.empty()) {
        int a = free.front();
        free.erase(free.begin());
        size_t pick = static_cast<size_t>(rng.below(free.size()));
        int b = free[pick];
        free.erase(free.begin() + static_cast<ptrdiff_t>(pick));
        pairs.emplace_back(a, b);
    }
    return pairs;
}

static UnitarySetting draw_ancilla_setting(int n, const PairingPlan &plan, RngStream &rng) {
    UnitarySetting setting;
    setting.scheme = Scheme::ancilla;
    setting.n = n;
    int width = 2 * n;
    if (plan.mode == PairingPlan::Mode::pauli) {
        for (int w = 0; w < width; ++w) {
            SettingBlock b;
            b.wires = {w};
            b.labels = {kRotationBasisSet[rng.below(3)]};
            setting.blocks.push_back(std::move(b));
        }
        return setting;
    }
    std::vector<std::pair<int, int>> pairs;
    std::vector<bool> taken(static_cast<size_t>(width), false);
    if (plan.mode == PairingPlan::Mode::fixed) {
        for (auto [a, b] : plan.fixed_pairs) {
            if (a < 0 || b < 0 || a >= width || b >= width || a == b ||
                taken[static_cast<size_t>(a)] || taken[static_cast<size_t>(b)]) {
                throw std::invalid_argument("acquire_ancilla: invalid fixed pairs");
            }
            taken[static_cast<size_t>(a)] = taken[static_cast<size_t>(b)] = true;
            pairs.emplace_back(std::min(a, b), std::max(a, b));
        }
    }
    std::vector<int> rest;
    for (int w = 0; w < width; ++w) {
        if (!taken[static_cast<size_t>(w)]) {
            rest.push_back(w);
        }
    }
    if (rest.size() % 2 != 0) {
        throw std::invalid_argument("acquire_ancilla: odd number of unpaired wires");
    }
    for (auto p : draw_pairing(rest, rng)) {
        pairs.push_back(p);
    }
    std::sort(pairs.begin(), pairs.end());
    for (auto [a, b] : pairs) {
        SettingBlock blk;
        blk.wires = {a, b};
        blk.is_clifford = true;
        blk.cliff = sample_clifford(2, rng);
        setting.blocks.push_back(std::move(blk));
    }
    return setting;
}

static UnitarySetting draw_two_sided_setting(int n, RngStream &rng) {
    UnitarySetting setting;
    setting.scheme = Scheme::two_sided;
    setting.n = n;
    for (int w = 0; w < 2 * n; ++w) {
        SettingBlock b;
        b.wires = {w};
        // Input side draws from all six rotations: composing with X merely
        // swaps which basis state is prepared, which the shadow snapshot
        // accounts for.
        b.labels = {w < n ? kRotationFullSet[rng.below(6)] : kRotationBasisSet[rng.below(3)]};
        setting.blocks.push_back(std::move(b));
    }
    return setting;
}

std::vector<MeasurementRecord> acquire_ancilla(const ChannelSpec &spec,
                                               const PairingPlan &plan, int n_settings,
                                               int reps, uint64_t seed, int first_setting) {
    int n = spec.n;
    if (2 * n > 8) {
        throw std::invalid_argument("acquire_ancilla: register exceeds 8 qubits");
    }
    if (n_settings < 0 || reps < 1) {
        throw std::invalid_argument("acquire_ancilla: need n_settings >= 0 and reps >= 1");
    }
    CMatrix u_e = channel_unitary(spec);
    double noise = total_depolarizing(spec);
    Eigen::Index dim = Eigen::Index{1} << n;
    Eigen::Index full = dim * dim;
    // Choi state vector of the noiseless part.
    CVector phi = CVector::Zero(full);
    double norm = 1.0 / std::sqrt(static_cast<double>(dim));
    for (Eigen::Index b = 0; b < dim; ++b) {
        phi.segment(b * dim, dim) = norm * u_e.col(b);
    }
    std::vector<MeasurementRecord> records;
    records.reserve(static_cast<size_t>(n_settings));
    for (int i = 0; i < n_settings; ++i) {
        RngStream rng = substream(seed, static_cast<uint64_t>(first_setting + i));
        UnitarySetting setting = draw_ancilla_setting(n, plan, rng);
        CMatrix u = ancilla_setting_unitary(setting);
        CVector amp = u * phi;
        std::vector<double> probs(static_cast<size_t>(full));
        for (Eigen::Index b = 0; b < full; ++b) {
            probs[static_cast<size_t>(b)] =
                (1.0 - noise) * std::norm(amp[b]) + noise / static_cast<double>(full);
        }
        MeasurementRecord rec;
        rec.setting = std::move(setting);
        rec.outcomes = sample_from_probs(probs, 2 * n, reps, rng);
        rec.seed = seed;
        rec.source = "simulated";
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<MeasurementRecord> acquire_two_sided(const ChannelSpec &spec, int n_settings,
                                                 int reps, uint64_t seed, int first_setting) {
    int n = spec.n;
    if (n > 8) {
        throw std::invalid_argument("acquire_two_sided: register exceeds 8 qubits");
    }
    if (n_settings < 0 || reps < 1) {
        throw std::invalid_argument("acquire_two_sided: need n_settings >= 0 and reps >= 1");
    }
    CMatrix u_e = channel_unitary(spec);
    double noise = total_depolarizing(spec);
    Eigen::Index dim = Eigen::Index{1} << n;
    std::vector<MeasurementRecord> records;
    records.reserve(static_cast<size_t>(n_settings));
    for (int i = 0; i < n_settings; ++i) {
        RngStream rng = substream(seed, static_cast<uint64_t>(first_setting + i));
        UnitarySetting setting = draw_two_sided_setting(n, rng);
        auto [u_l, u_r] = two_sided_setting_unitaries(setting);
        CVector zero = CVector::Zero(dim);
        zero[0] = 1.0;
        CVector psi = u_r * (u_e * (u_l.adjoint() * zero));
        std::vector<double> probs(static_cast<size_t>(dim));
        for (Eigen::Index b = 0; b < dim; ++b) {
            probs[static_cast<size_t>(b)] =
                (1.0 - noise) * std::norm(psi[b]) + noise / static_cast<double>(dim);
        }
        MeasurementRecord rec;
        rec.setting = std::move(setting);
        rec.outcomes = sample_from_probs(probs, n, reps, rng);
        rec.seed = seed;
        rec.source = "simulated";
        records.push_back(std::move(rec));
    }
    return records;
}

std::string record_to_json(const MeasurementRecord &record) {
    nlohmann::json j;
    j["scheme"] = scheme_name(record.setting.scheme);
    j["n"] = record.setting.n;
    nlohmann::json blocks = nlohmann::json::array();
    for (const SettingBlock &b : record.setting.blocks) {
        nlohmann::json jb;
        jb["wires"] = b.wires;
        if (b.is_clifford) {
            jb["kind"] = "clifford";
            jb["payload"] = {{"k", b.cliff.k}, {"rows", clifford_pack(b.cliff)}};
        } else {
            jb["kind"] = "rotation";
            std::vector<std::string> names;
            for (RotationLabel r : b.labels) {
                names.push_back(rotation_label_name(r));
            }
            jb["payload"] = names;
        }
        blocks.push_back(std::move(jb));
    }
    j["blocks"] = std::move(blocks);
    j["outcomes"] = record.outcomes;
    j["seed"] = record.seed;
    j["source"] = record.source;
    return j.dump();
}

MeasurementRecord record_from_json(const std::string &line) {
    nlohmann::json j = nlohmann::json::parse(line);
    MeasurementRecord rec;
    rec.setting.scheme = scheme_from_name(j.at("scheme").get<std::string>());
    rec.setting.n = j.at("n").get<int>();
    for (const auto &jb : j.at("blocks")) {
        SettingBlock b;
        b.wires = jb.at("wires").get<std::vector<int>>();
        std::string kind = jb.at("kind").get<std::string>();
        if (kind == "clifford") {
            b.is_clifford = true;
            b.cliff = clifford_unpack(jb.at("payload").at("k").get<int>(),
                                      jb.at("payload").at("rows").get<std::vector<uint64_t>>());
        } else if (kind == "rotation") {
            for (const auto &name : jb.at("payload")) {
                b.labels.push_back(rotation_label_from_name(name.get<std::string>()));
            }
        } else {
            throw std::invalid_argument("record_from_json: unknown block kind " + kind);
        }
        rec.setting.blocks.push_back(std::move(b));
    }
    validate_setting(rec.setting);
    rec.outcomes = j.at("outcomes").get<std::vector<std::string>>();
    if (rec.outcomes.empty()) {
        throw std::invalid_argument("record_from_json: need at least one repetition");
    }
    int width = measured_width(rec.setting);
    for (const std::string &o : rec.outcomes) {
        if (static_cast<int>(o.size()) != width ||
            o.find_first_not_of("01") != std::string::npos) {
            throw std::invalid_argument("record_from_json: bad outcome bitstring '" + o + "'");
        }
    }
    rec.seed = j.at("seed").get<uint64_t>();
    rec.source = j.at("source").get<std::string>();
    if (rec.source != "simulated" && rec.source != "ingested") {
        throw std::invalid_argument("record_from_json: unknown source " + rec.source);
    }
    return rec;
}

static bool has_gz_suffix(const std::string &path) {
    return path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
}

void write_records(const std::vector<MeasurementRecord> &records, const std::string &path) {
    std::string body;
    for (const MeasurementRecord &rec : records) {
        body += record_to_json(rec);
        body += '\n';
    }
    if (has_gz_suffix(path)) {
        gzFile f = gzopen(path.c_str(), "wb");
        if (!f) {
            throw std::runtime_error("write_records: cannot open " + path);
        }
        if (!body.empty() &&
            gzwrite(f, body.data(), static_cast<unsigned>(body.size())) !=
                static_cast<int>(body.size())) {
            gzclose(f);
            throw std::runtime_error("write_records: gzip write failed for " + path);
        }
        gzclose(f);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("write_records: cannot open " + path);
    }
    out << body;
}

static std::string read_file_maybe_gz(const std::string &path) {
    if (has_gz_suffix(path)) {
        gzFile f = gzopen(path.c_str(), "rb");
        if (!f) {
            throw std::runtime_error("read_records: cannot open " + path);
        }
        std::string body;
        char buf[1 << 16];
        int got;
        while ((got = gzread(f, buf, sizeof(buf))) > 0) {
            body.append(buf, static_cast<size_t>(got));
        }
        gzclose(f);
        if (got < 0) {
            throw std::runtime_error("read_records: gzip read failed for " + path);
        }
        return body;
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("read_records: cannot open " + path);
    }
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::vector<std::string> read_record_lines(const std::string &path) {
    std::string body = read_file_maybe_gz(path);
    std::vector<std::string> lines;
    size_t start = 0;
    while (start < body.size()) {
        size_t end = body.find('\n', start);
        if (end == std::string::npos) {
            end = body.size();
        }
        lines.push_back(body.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

std::vector<MeasurementRecord> read_records(const std::string &path) {
    std::vector<std::string> lines = read_record_lines(path);
    std::vector<MeasurementRecord> records;
    for (size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) {
            continue;
        }
        try {
            records.push_back(record_from_json(lines[i]));
        } catch (const std::exception &e) {
            throw std::runtime_error(path + ":" + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return records;
}

}  // namespace shadowqpt
