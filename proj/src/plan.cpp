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

#include "shadowqpt/plan.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "shadowqpt/hamlearn.hpp"
#include "shadowqpt/postprocess.hpp"
#include "shadowqpt/rng.hpp"

namespace shadowqpt {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// TOML subset

bool TomlValue::as_bool() const {
    if (kind != Kind::boolean) throw std::runtime_error("expected a boolean value");
    return b;
}

int64_t TomlValue::as_int() const {
    if (kind != Kind::integer) throw std::runtime_error("expected an integer value");
    return i;
}

double TomlValue::as_double() const {
    if (kind == Kind::integer) return static_cast<double>(i);
    if (kind != Kind::floating) throw std::runtime_error("expected a number");
    return d;
}

const std::string &TomlValue::as_string() const {
    if (kind != Kind::string) throw std::runtime_error("expected a string value");
    return s;
}

const std::vector<TomlValue> &TomlValue::as_array() const {
    if (kind != Kind::array) throw std::runtime_error("expected an array value");
    return arr;
}

namespace {

std::string trim(const std::string &s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// Drops a # comment that is not inside a quoted string.
std::string strip_comment(const std::string &line) {
    char quote = 0;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quote != 0) {
            if (c == '\\' && quote == '"') {
                ++i;
            } else if (c == quote) {
                quote = 0;
            }
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '#') {
            return line.substr(0, i);
        }
    }
    return line;
}

struct ValueParser {
    const std::string &text;
    size_t pos = 0;

    explicit ValueParser(const std::string &t) : text(t) {}

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }

    [[noreturn]] void fail(const std::string &what) const {
        throw std::runtime_error(what + " in value '" + text + "'");
    }

    TomlValue parse() {
        skip_ws();
        if (pos >= text.size()) fail("missing value");
        char c = text[pos];
        if (c == '[') return parse_array();
        if (c == '"' || c == '\'') return parse_string();
        return parse_scalar();
    }

    TomlValue parse_array() {
        TomlValue v;
        v.kind = TomlValue::Kind::array;
        ++pos;  // [
        skip_ws();
        if (pos < text.size() && text[pos] == ']') {
            ++pos;
            return v;
        }
        while (true) {
            v.arr.push_back(parse());
            skip_ws();
            if (pos >= text.size()) fail("unterminated array");
            if (text[pos] == ',') {
                ++pos;
                skip_ws();
                if (pos < text.size() && text[pos] == ']') {  // trailing comma
                    ++pos;
                    return v;
                }
                continue;
            }
            if (text[pos] == ']') {
                ++pos;
                return v;
            }
            fail("expected ',' or ']'");
        }
    }

    TomlValue parse_string() {
        char quote = text[pos++];
        std::string out;
        while (pos < text.size() && text[pos] != quote) {
            char c = text[pos++];
            if (c == '\\' && quote == '"') {
                if (pos >= text.size()) fail("dangling escape");
                char e = text[pos++];
                switch (e) {
                    case 'n': out.push_back('\n'); break;
                    case 't': out.push_back('\t'); break;
                    case 'r': out.push_back('\r'); break;
                    case '"': out.push_back('"'); break;
                    case '\\': out.push_back('\\'); break;
                    default: fail("unsupported escape");
                }
            } else {
                out.push_back(c);
            }
        }
        if (pos >= text.size()) fail("unterminated string");
        ++pos;  // closing quote
        TomlValue v;
        v.kind = TomlValue::Kind::string;
        v.s = out;
        return v;
    }

    TomlValue parse_scalar() {
        size_t start = pos;
        while (pos < text.size() && text[pos] != ',' && text[pos] != ']' &&
               text[pos] != ' ' && text[pos] != '\t') {
            ++pos;
        }
        std::string tok = text.substr(start, pos - start);
        TomlValue v;
        if (tok == "true" || tok == "false") {
            v.kind = TomlValue::Kind::boolean;
            v.b = tok == "true";
            return v;
        }
        bool looks_float = tok.find_first_of(".eE") != std::string::npos &&
                           tok.find_first_not_of("+-0123456789.eE") == std::string::npos;
        try {
            size_t used = 0;
            if (!looks_float) {
                long long n = std::stoll(tok, &used);
                if (used == tok.size()) {
                    v.kind = TomlValue::Kind::integer;
                    v.i = n;
                    return v;
                }
            }
            double d = std::stod(tok, &used);
            if (used == tok.size()) {
                v.kind = TomlValue::Kind::floating;
                v.d = d;
                return v;
            }
        } catch (const std::exception &) {
        }
        fail("unrecognized token '" + tok + "'");
    }
};

}  // namespace

TomlValue parse_toml_value(const std::string &text) {
    ValueParser p(text);
    TomlValue v = p.parse();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing characters");
    return v;
}

TomlTable parse_toml(const std::string &text) {
    TomlTable table;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        try {
            if (line.front() == '[') {
                if (line.back() != ']') throw std::runtime_error("unterminated section header");
                section = trim(line.substr(1, line.size() - 2));
                if (section.empty()) throw std::runtime_error("empty section name");
                continue;
            }
            size_t eq = line.find('=');
            if (eq == std::string::npos) throw std::runtime_error("expected 'key = value'");
            std::string key = trim(line.substr(0, eq));
            if (key.empty()) throw std::runtime_error("empty key");
            std::string full = section.empty() ? key : section + "." + key;
            if (table.count(full)) throw std::runtime_error("duplicate key '" + full + "'");
            table[full] = parse_toml_value(trim(line.substr(eq + 1)));
        } catch (const std::exception &e) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return table;
}

// ---------------------------------------------------------------------------
// Plans

ExperimentPlan ExperimentPlan::from_preset(const std::string &name) {
    ExperimentPlan p;
    p.preset = name;
    if (name == "full_process") {
        p.steps = {"cp", "tp"};
    } else if (name == "reduced_process") {
        p.n = 4;
        p.steps = {"cp"};
    } else if (name == "overlap") {
        p.n = 2;
    } else if (name == "hamlearn") {
        p.channel_kind = "tfim";
        p.n = 3;
        p.scheme = Scheme::two_sided;
        p.shots = 20000;
        p.reps = 1;
    } else if (name == "bounds") {
        p.channel_kind = "identity";
    } else if (name == "scheme_compare") {
        p.steps = {"cp", "tp"};
    } else {
        throw std::runtime_error("unknown preset '" + name + "'");
    }
    return p;
}

void ExperimentPlan::apply_table(const TomlTable &table) {
    for (const auto &[key, value] : table) {
        try {
            if (key == "preset") {
                preset = value.as_string();
            } else if (key == "seed") {
                seed = static_cast<uint64_t>(value.as_int());
            } else if (key == "channel.kind") {
                channel_kind = value.as_string();
            } else if (key == "channel.n") {
                n = static_cast<int>(value.as_int());
            } else if (key == "channel.noise") {
                noise = value.as_double();
            } else if (key == "channel.J") {
                tfim_J.clear();
                for (const auto &x : value.as_array()) tfim_J.push_back(x.as_double());
            } else if (key == "channel.h") {
                tfim_h.clear();
                for (const auto &x : value.as_array()) tfim_h.push_back(x.as_double());
            } else if (key == "channel.t") {
                tfim_t = value.as_double();
            } else if (key == "acquisition.scheme") {
                scheme = scheme_from_name(value.as_string());
            } else if (key == "acquisition.pairing") {
                pairing = value.as_string();
            } else if (key == "acquisition.fixed_pairs") {
                fixed_pairs.clear();
                for (const auto &pair : value.as_array()) {
                    const auto &xy = pair.as_array();
                    if (xy.size() != 2) throw std::runtime_error("pairs need two wires");
                    fixed_pairs.emplace_back(static_cast<int>(xy[0].as_int()),
                                             static_cast<int>(xy[1].as_int()));
                }
            } else if (key == "acquisition.fixed_fraction") {
                fixed_fraction = value.as_double();
            } else if (key == "acquisition.settings") {
                settings = static_cast<int>(value.as_int());
            } else if (key == "acquisition.reps") {
                reps = static_cast<int>(value.as_int());
            } else if (key == "estimator.aggregation") {
                const std::string &a = value.as_string();
                if (a == "mean") {
                    estimator.aggregation = EstimatorConfig::Aggregation::mean;
                } else if (a == "median_of_means") {
                    estimator.aggregation = EstimatorConfig::Aggregation::median_of_means;
                } else {
                    throw std::runtime_error("unknown aggregation '" + a + "'");
                }
            } else if (key == "estimator.batches") {
                estimator.batches = static_cast<int>(value.as_int());
            } else if (key == "estimator.batch_level") {
                const std::string &l = value.as_string();
                if (l == "shadow") {
                    estimator.level = EstimatorConfig::BatchLevel::shadow;
                } else if (l == "unitary") {
                    estimator.level = EstimatorConfig::BatchLevel::unitary;
                } else {
                    throw std::runtime_error("unknown batch level '" + l + "'");
                }
            } else if (key == "postprocess.steps") {
                steps.clear();
                for (const auto &s : value.as_array()) steps.push_back(s.as_string());
            } else if (key == "hamlearn.shots") {
                shots = value.as_int();
            } else if (key == "hamlearn.realizations") {
                disorder_realizations = static_cast<int>(value.as_int());
            } else if (key == "hamlearn.t") {
                t = value.as_double();
            } else {
                throw std::runtime_error("unknown plan key");
            }
        } catch (const std::exception &e) {
            throw std::runtime_error("plan key '" + key + "': " + e.what());
        }
    }
}

ExperimentPlan ExperimentPlan::from_toml_text(const std::string &text) {
    TomlTable table = parse_toml(text);
    std::string preset = "full_process";
    if (auto it = table.find("preset"); it != table.end()) preset = it->second.as_string();
    ExperimentPlan p = from_preset(preset);
    p.apply_table(table);
    p.validate();
    return p;
}

void ExperimentPlan::apply_override(const std::string &key_equals_value) {
    size_t eq = key_equals_value.find('=');
    if (eq == std::string::npos) {
        throw std::runtime_error("override '" + key_equals_value + "' is not key=value");
    }
    TomlTable one;
    one[trim(key_equals_value.substr(0, eq))] =
        parse_toml_value(trim(key_equals_value.substr(eq + 1)));
    apply_table(one);
}

void ExperimentPlan::validate() const {
    static const std::set<std::string> kinds = {"ghz", "identity", "tfim"};
    static const std::set<std::string> pairings = {"pauli", "non_fixed", "fixed"};
    static const std::set<std::string> stages = {"cp", "tp", "purify", "mle"};
    if (!kinds.count(channel_kind)) {
        throw std::runtime_error("unknown channel kind '" + channel_kind + "'");
    }
    if (n < 1 || n > 10) throw std::runtime_error("channel.n out of range 1..10");
    if (noise < 0.0 || noise > 1.0) throw std::runtime_error("channel.noise outside [0, 1]");
    if (channel_kind == "tfim") {
        if (!tfim_J.empty() && static_cast<int>(tfim_J.size()) != n - 1) {
            throw std::runtime_error("channel.J needs n-1 couplings");
        }
        if (!tfim_h.empty() && static_cast<int>(tfim_h.size()) != n) {
            throw std::runtime_error("channel.h needs n fields");
        }
        if (tfim_J.empty() != tfim_h.empty()) {
            throw std::runtime_error("channel.J and channel.h must be given together");
        }
        if (tfim_t <= 0.0) throw std::runtime_error("channel.t must be positive");
    } else if (!tfim_J.empty() || !tfim_h.empty()) {
        throw std::runtime_error("channel.J/h only apply to the tfim kind");
    }
    if (!pairings.count(pairing)) {
        throw std::runtime_error("unknown pairing '" + pairing + "'");
    }
    if (scheme == Scheme::two_sided && pairing != "pauli") {
        throw std::runtime_error("two_sided acquisition has no pairing choices");
    }
    if (pairing == "fixed" && fixed_pairs.empty()) {
        throw std::runtime_error("fixed pairing needs acquisition.fixed_pairs");
    }
    if (fixed_fraction < 0.0 || fixed_fraction > 1.0) {
        throw std::runtime_error("fixed_fraction outside [0, 1]");
    }
    if (settings < 1) throw std::runtime_error("acquisition.settings must be positive");
    if (reps < 1) throw std::runtime_error("acquisition.reps must be positive");
    if (estimator.batches < 1) throw std::runtime_error("estimator.batches must be positive");
    for (const auto &s : steps) {
        if (!stages.count(s)) throw std::runtime_error("unknown postprocess step '" + s + "'");
    }
    if (shots < 1) throw std::runtime_error("hamlearn.shots must be positive");
    if (disorder_realizations < 1) {
        throw std::runtime_error("hamlearn.realizations must be positive");
    }
    if (t <= 0.0) throw std::runtime_error("hamlearn.t must be positive");
}

ChannelSpec ExperimentPlan::build_channel() const {
    ChannelSpec base;
    if (channel_kind == "ghz") {
        base = ghz_process(n);
    } else if (channel_kind == "identity") {
        base = ChannelSpec::from_unitary(n, identity(Eigen::Index(1) << n));
    } else if (channel_kind == "tfim") {
        HamiltonianTerms ht;
        if (tfim_J.empty()) {
            RngStream rng = substream(seed, 0, 0x7466696dULL);  // couplings stream
            ht = random_tfim(n, rng);
        } else {
            ht = tfim_hamiltonian(n, tfim_J, tfim_h);
        }
        base = ChannelSpec::from_hamiltonian(std::move(ht), tfim_t);
    } else {
        throw std::runtime_error("unknown channel kind '" + channel_kind + "'");
    }
    if (noise > 0.0) return ChannelSpec::depolarized_copy(std::move(base), noise);
    return base;
}

std::vector<MeasurementRecord> ExperimentPlan::acquire(uint64_t seed_override) const {
    ChannelSpec spec = build_channel();
    if (scheme == Scheme::two_sided) {
        return acquire_two_sided(spec, settings, reps, seed_override);
    }
    if (pairing == "pauli") {
        return acquire_ancilla(spec, PairingPlan::pauli(), settings, reps, seed_override);
    }
    if (pairing == "non_fixed") {
        return acquire_ancilla(spec, PairingPlan::non_fixed(), settings, reps, seed_override);
    }
    // Fixed plan for the leading floor(fraction * settings) settings, the
    // uniform matching for the rest. Both halves index the same per-setting
    // streams, so the split commutes with merging record files.
    int n_fixed = static_cast<int>(std::floor(fixed_fraction * settings));
    n_fixed = std::min(n_fixed, settings);
    std::vector<MeasurementRecord> out;
    if (n_fixed > 0) {
        out = acquire_ancilla(spec, PairingPlan::fixed(fixed_pairs), n_fixed, reps,
                              seed_override, 0);
    }
    if (n_fixed < settings) {
        auto rest = acquire_ancilla(spec, PairingPlan::non_fixed(), settings - n_fixed, reps,
                                    seed_override, n_fixed);
        out.insert(out.end(), rest.begin(), rest.end());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Overlap preset states

namespace {

CVector product_state(const std::vector<CVector> &factors) {
    CVector v = factors.front();
    for (size_t i = 1; i < factors.size(); ++i) {
        CVector next(v.size() * factors[i].size());
        for (Eigen::Index a = 0; a < v.size(); ++a) {
            for (Eigen::Index b = 0; b < factors[i].size(); ++b) {
                next(a * factors[i].size() + b) = v(a) * factors[i](b);
            }
        }
        v = next;
    }
    return v;
}

CVector qubit_state(Complex c0, Complex c1) {
    CVector v(2);
    v << c0, c1;
    return v;
}

}  // namespace

std::vector<OverlapFamily> overlap_presets(int n) {
    if (n < 1 || n > 4) throw std::runtime_error("overlap presets cover n in 1..4");
    const int dim = 1 << n;
    std::vector<double> thetas;
    for (int j = 0; j <= 50; ++j) thetas.push_back(2.0 * M_PI * j / 50.0);

    CVector zero = CVector::Zero(dim);
    zero(0) = 1.0;
    std::vector<CVector> plus_i(n, qubit_state(cplx(1 / std::sqrt(2.0)), Complex(0, 1 / std::sqrt(2.0))));
    const double phis[4] = {0.1717, 0.1234, 0.9876, 0.888};
    std::vector<CVector> rx_factors;
    for (int j = 0; j < n; ++j) {
        rx_factors.push_back(qubit_state(cplx(std::cos(phis[j] / 2)),
                                         Complex(0, -std::sin(phis[j] / 2))));
    }

    CMatrix u_ghz = channel_unitary(ghz_process(n));
    auto sigmas_for = [&](const std::string &axis) {
        std::vector<CMatrix> sigmas;
        for (double theta : thetas) {
            CMatrix rot = gate_unitary(Gate{axis, {0}, {theta}}, n);
            CVector w = u_ghz * (rot * zero);
            sigmas.push_back(w * w.adjoint());
        }
        return sigmas;
    };
    std::vector<CMatrix> ry_sigmas = sigmas_for("ry");
    std::vector<CMatrix> rx_sigmas = sigmas_for("rx");

    CMatrix rho_zero = zero * zero.adjoint();
    CVector vi = product_state(plus_i);
    CMatrix rho_plus_i = vi * vi.adjoint();
    CVector vx = product_state(rx_factors);
    CMatrix rho_rx = vx * vx.adjoint();

    std::vector<OverlapFamily> out;
    out.push_back({"zeros_ry", rho_zero, thetas, ry_sigmas});
    out.push_back({"zeros_rx", rho_zero, thetas, rx_sigmas});
    out.push_back({"plus_i_ry", rho_plus_i, thetas, ry_sigmas});
    out.push_back({"rx_product_ry", rho_rx, thetas, ry_sigmas});
    return out;
}

// ---------------------------------------------------------------------------
// Record validation

ValidationReport validate_records(const std::string &path) {
    ValidationReport rep;
    std::vector<std::string> lines = read_record_lines(path);
    for (size_t i = 0; i < lines.size(); ++i) {
        try {
            MeasurementRecord rec = record_from_json(lines[i]);
            if (rep.records == 0) {
                rep.scheme = scheme_name(rec.setting.scheme);
                rep.n = rec.setting.n;
            } else {
                if (scheme_name(rec.setting.scheme) != rep.scheme) {
                    throw std::runtime_error("scheme differs from the first record");
                }
                if (rec.setting.n != rep.n) {
                    throw std::runtime_error("register size differs from the first record");
                }
            }
            rep.records += 1;
            rep.outcomes += static_cast<int64_t>(rec.outcomes.size());
        } catch (const std::exception &e) {
            rep.errors.push_back("line " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Matrix files

void write_choi_json(const ChoiMatrix &choi, const std::string &scheme,
                     const std::string &path) {
    json data = json::array();
    const Eigen::Index d = choi.mat.rows();
    for (Eigen::Index r = 0; r < d; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) {
            data.push_back({choi.mat(r, c).real(), choi.mat(r, c).imag()});
        }
    }
    json j;
    j["n"] = choi.n;
    j["normalized"] = choi.normalized;
    j["scheme"] = scheme;
    j["data"] = std::move(data);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << j.dump() << "\n";
}

ChoiMatrix read_choi_json(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path);
    json j = json::parse(f);
    ChoiMatrix choi;
    choi.n = j.at("n").get<int>();
    choi.normalized = j.at("normalized").get<bool>();
    const Eigen::Index d = Eigen::Index(1) << (2 * choi.n);
    const auto &data = j.at("data");
    if (static_cast<Eigen::Index>(data.size()) != d * d) {
        throw std::runtime_error(path + ": matrix data has the wrong length");
    }
    choi.mat = CMatrix::Zero(d, d);
    Eigen::Index idx = 0;
    for (Eigen::Index r = 0; r < d; ++r) {
        for (Eigen::Index c = 0; c < d; ++c, ++idx) {
            choi.mat(r, c) = Complex(data[idx][0].get<double>(), data[idx][1].get<double>());
        }
    }
    return choi;
}

// ---------------------------------------------------------------------------
// Pipelines

namespace {

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct OutDir {
    std::filesystem::path dir;
    std::vector<std::filesystem::path> written;

    explicit OutDir(const std::string &d) : dir(d) {
        std::filesystem::create_directories(dir);
    }

    std::string path(const std::string &name) {
        written.push_back(dir / name);
        return (dir / name).string();
    }

    void write_text(const std::string &name, const std::string &content) {
        std::string p = path(name);
        std::ofstream f(p, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + p);
        f << content;
    }

    void cleanup() {
        for (const auto &p : written) {
            std::error_code ec;
            std::filesystem::remove(p, ec);
        }
    }
};

struct MetricsCsv {
    std::string text = "scheme,n,N,postproc,trace_distance,frobenius_distance,purity\n";
    json rows = json::array();

    void add(const std::string &scheme, int n, int64_t shots, const std::string &stage,
             const ChoiMatrix &est, const ChoiMatrix &exact) {
        double td = trace_distance(est, exact);
        double fd = frobenius_distance(est, exact);
        double pu = purity(est);
        text += scheme + "," + std::to_string(n) + "," + std::to_string(shots) + "," + stage +
                "," + fmt_g(td) + "," + fmt_g(fd) + "," + fmt_g(pu) + "\n";
        rows.push_back({{"scheme", scheme},
                        {"n", n},
                        {"N", shots},
                        {"postproc", stage},
                        {"trace_distance", td},
                        {"frobenius_distance", fd},
                        {"purity", pu}});
    }
};

json plan_json(const ExperimentPlan &plan) {
    json j;
    j["preset"] = plan.preset;
    j["seed"] = plan.seed;
    j["channel"] = {{"kind", plan.channel_kind}, {"n", plan.n}, {"noise", plan.noise}};
    if (plan.channel_kind == "tfim") {
        j["channel"]["t"] = plan.tfim_t;
        if (!plan.tfim_J.empty()) {
            j["channel"]["J"] = plan.tfim_J;
            j["channel"]["h"] = plan.tfim_h;
        }
    }
    j["acquisition"] = {{"scheme", scheme_name(plan.scheme)},
                        {"pairing", plan.pairing},
                        {"fixed_fraction", plan.fixed_fraction},
                        {"settings", plan.settings},
                        {"reps", plan.reps}};
    j["estimator"] = {
        {"aggregation",
         plan.estimator.aggregation == EstimatorConfig::Aggregation::mean ? "mean"
                                                                          : "median_of_means"},
        {"batches", plan.estimator.batches},
        {"batch_level",
         plan.estimator.level == EstimatorConfig::BatchLevel::shadow ? "shadow" : "unitary"}};
    j["postprocess"] = plan.steps;
    if (plan.preset == "hamlearn") {
        j["hamlearn"] = {{"shots", plan.shots},
                         {"realizations", plan.disorder_realizations},
                         {"t", plan.t}};
    }
    return j;
}

// Applies the named stages in order, writing one matrix file and one
// metrics row per stage.
void run_stages(const ExperimentPlan &plan, const std::vector<MeasurementRecord> &records,
                const ChoiMatrix &raw, const ChoiMatrix &exact, const std::string &scheme,
                const std::string &suffix, OutDir &out, MetricsCsv &metrics, json &stage_info) {
    int64_t shots = static_cast<int64_t>(plan.settings) * plan.reps;
    write_choi_json(raw, scheme, out.path("choi_raw" + suffix + ".json"));
    metrics.add(scheme, plan.n, shots, "raw", raw, exact);
    ChoiMatrix current = raw;
    for (const std::string &step : plan.steps) {
        ProjectionReport rep;
        if (step == "cp") {
            current = cp_project(current, &rep);
        } else if (step == "tp") {
            current = tp_project(current, &rep);
        } else if (step == "purify") {
            current = purify(current, &rep);
        } else if (step == "mle") {
            MleResult mle = mle_reconstruct(records);
            current = mle.choi;
            rep = mle.report;
        } else {
            throw std::runtime_error("unknown postprocess step '" + step + "'");
        }
        write_choi_json(current, scheme, out.path("choi_" + step + suffix + ".json"));
        metrics.add(scheme, plan.n, shots, step, current, exact);
        stage_info.push_back({{"stage", step},
                              {"input_trace", rep.input_trace},
                              {"output_trace", rep.output_trace},
                              {"negative_mass", rep.negative_mass},
                              {"iterations", rep.iterations},
                              {"converged", rep.converged}});
    }
}

void run_full_process(const ExperimentPlan &plan, OutDir &out) {
    ChannelSpec spec = plan.build_channel();
    ChoiMatrix exact = choi_of(spec);
    std::vector<MeasurementRecord> records = plan.acquire(plan.seed);
    write_records(records, out.path("records.jsonl"));
    ChoiMatrix raw = estimate_choi(records, plan.estimator);
    MetricsCsv metrics;
    json stage_info = json::array();
    run_stages(plan, records, raw, exact, scheme_name(plan.scheme), "", out, metrics,
               stage_info);
    out.write_text("metrics.csv", metrics.text);
    json report;
    report["plan"] = plan_json(plan);
    report["metrics"] = metrics.rows;
    report["stages"] = stage_info;
    out.write_text("report.json", report.dump(2) + "\n");
}

void run_scheme_compare(const ExperimentPlan &plan, OutDir &out) {
    ChannelSpec spec = plan.build_channel();
    ChoiMatrix exact = choi_of(spec);
    MetricsCsv metrics;
    json stage_info = json::array();

    ExperimentPlan ancilla = plan;
    ancilla.scheme = Scheme::ancilla;
    std::vector<MeasurementRecord> rec_a = ancilla.acquire(plan.seed);
    write_records(rec_a, out.path("records.jsonl"));
    run_stages(ancilla, rec_a, estimate_choi(rec_a, plan.estimator), exact, "ancilla", "",
               out, metrics, stage_info);

    ExperimentPlan two = plan;
    two.scheme = Scheme::two_sided;
    two.pairing = "pauli";
    std::vector<MeasurementRecord> rec_t = two.acquire(plan.seed);
    write_records(rec_t, out.path("records_two_sided.jsonl"));
    run_stages(two, rec_t, estimate_choi(rec_t, plan.estimator), exact, "two_sided",
               "_two_sided", out, metrics, stage_info);

    out.write_text("metrics.csv", metrics.text);
    json report;
    report["plan"] = plan_json(plan);
    report["metrics"] = metrics.rows;
    report["stages"] = stage_info;
    out.write_text("report.json", report.dump(2) + "\n");
}

void run_reduced_process(const ExperimentPlan &plan, OutDir &out) {
    ChannelSpec spec = plan.build_channel();
    ChoiMatrix exact = choi_of(spec);
    std::vector<MeasurementRecord> records = plan.acquire(plan.seed);
    write_records(records, out.path("records.jsonl"));
    ChoiMatrix raw = estimate_choi(records, plan.estimator);
    MetricsCsv metrics;
    json stage_info = json::array();
    run_stages(plan, records, raw, exact, scheme_name(plan.scheme), "", out, metrics,
               stage_info);

    // Marginal channels of every wire and wire pair, clipped to PSD.
    std::vector<std::vector<int>> subsystems;
    for (int i = 0; i < plan.n; ++i) subsystems.push_back({i});
    for (int i = 0; i < plan.n; ++i) {
        for (int j = i + 1; j < plan.n; ++j) subsystems.push_back({i, j});
    }
    int64_t shots = static_cast<int64_t>(plan.settings) * plan.reps;
    std::string reduced =
        "scheme,n,k,subsystem,N,postproc,trace_distance,frobenius_distance,purity\n";
    json reduced_rows = json::array();
    for (const auto &sub : subsystems) {
        ChoiMatrix est = estimate_reduced(records, sub, plan.estimator);
        ChoiMatrix est_cp = cp_project(est);
        ChoiMatrix ref = reduced_choi(exact, sub);
        std::string label;
        for (size_t i = 0; i < sub.size(); ++i) {
            label += (i ? "+" : "") + std::to_string(sub[i]);
        }
        double td = trace_distance(est_cp, ref);
        double fd = frobenius_distance(est_cp, ref);
        double pu = purity(est_cp);
        reduced += scheme_name(plan.scheme) + "," + std::to_string(plan.n) + "," +
                   std::to_string(sub.size()) + "," + label + "," + std::to_string(shots) +
                   ",cp," + fmt_g(td) + "," + fmt_g(fd) + "," + fmt_g(pu) + "\n";
        reduced_rows.push_back({{"subsystem", label},
                                {"trace_distance", td},
                                {"frobenius_distance", fd},
                                {"purity", pu}});
    }
    out.write_text("reduced.csv", reduced);

    out.write_text("metrics.csv", metrics.text);
    json report;
    report["plan"] = plan_json(plan);
    report["metrics"] = metrics.rows;
    report["reduced"] = reduced_rows;
    report["stages"] = stage_info;
    out.write_text("report.json", report.dump(2) + "\n");
}

void run_overlap(const ExperimentPlan &plan, OutDir &out) {
    ChannelSpec spec = plan.build_channel();
    ChoiMatrix exact = choi_of(spec);
    std::vector<MeasurementRecord> records = plan.acquire(plan.seed);
    write_records(records, out.path("records.jsonl"));
    ChoiMatrix raw = estimate_choi(records, plan.estimator);
    write_choi_json(raw, scheme_name(plan.scheme), out.path("choi_raw.json"));

    // Shared head of both pipelines, computed once for all state pairs.
    ChoiMatrix physical = tp_project(cp_project(raw));
    ChoiMatrix pure = purify(raw);

    std::string csv = "family,theta,mode,exact,estimate,abs_error\n";
    json rows = json::array();
    double worst_full = 0.0, worst_purified = 0.0;
    for (const OverlapFamily &fam : overlap_presets(plan.n)) {
        CMatrix rho_full = cp_project_density(apply_channel(physical, fam.rho));
        CMatrix rho_pure = apply_channel(pure, fam.rho);
        for (size_t j = 0; j < fam.thetas.size(); ++j) {
            double truth = overlap_of(exact, fam.rho, fam.sigmas[j]);
            double est_full = (rho_full * fam.sigmas[j]).trace().real();
            double est_pure = (rho_pure * fam.sigmas[j]).trace().real();
            worst_full = std::max(worst_full, std::abs(est_full - truth));
            worst_purified = std::max(worst_purified, std::abs(est_pure - truth));
            csv += fam.name + "," + fmt_g(fam.thetas[j]) + ",full," + fmt_g(truth) + "," +
                   fmt_g(est_full) + "," + fmt_g(std::abs(est_full - truth)) + "\n";
            csv += fam.name + "," + fmt_g(fam.thetas[j]) + ",purified," + fmt_g(truth) + "," +
                   fmt_g(est_pure) + "," + fmt_g(std::abs(est_pure - truth)) + "\n";
            rows.push_back({{"family", fam.name},
                            {"theta", fam.thetas[j]},
                            {"exact", truth},
                            {"full", est_full},
                            {"purified", est_pure}});
        }
    }
    out.write_text("overlaps.csv", csv);
    json report;
    report["plan"] = plan_json(plan);
    report["worst_full_error"] = worst_full;
    report["worst_purified_error"] = worst_purified;
    report["overlaps"] = rows;
    out.write_text("report.json", report.dump(2) + "\n");
}

void run_hamlearn_preset(const ExperimentPlan &plan, OutDir &out) {
    std::string csv = "n,t,N,realization,term,c_true,c_renormalized,c_estimate,abs_error\n";
    json rows = json::array();
    double total_mean_abs = 0.0;
    for (int r = 0; r < plan.disorder_realizations; ++r) {
        HamiltonianTerms ht;
        if (plan.tfim_J.empty()) {
            RngStream rng = substream(plan.seed, static_cast<uint64_t>(r), 0x7466696dULL);
            ht = random_tfim(plan.n, rng);
        } else {
            ht = tfim_hamiltonian(plan.n, plan.tfim_J, plan.tfim_h);
        }
        HamLearnTask task;
        task.ht = ht;
        task.probes = default_probes(ht);
        task.t = plan.t;
        task.shots = plan.shots;
        task.scheme = Scheme::two_sided;
        HamLearnResult res = run_hamlearn(task, splitmix64(plan.seed ^ (0xABCDull + r)));
        for (size_t i = 0; i < res.estimates.size(); ++i) {
            double err = std::abs(res.estimates[i] - res.true_coeffs[i]);
            csv += std::to_string(plan.n) + "," + fmt_g(plan.t) + "," +
                   std::to_string(plan.shots) + "," + std::to_string(r) + "," +
                   ht.terms[i].second.label() + "," + fmt_g(res.true_coeffs[i]) + "," +
                   fmt_g(res.renormalized[i]) + "," + fmt_g(res.estimates[i]) + "," +
                   fmt_g(err) + "\n";
        }
        rows.push_back({{"realization", r},
                        {"mean_abs_error", res.mean_abs_error},
                        {"systematic_error", res.systematic_error},
                        {"statistical_error", res.statistical_error}});
        total_mean_abs += res.mean_abs_error;
    }
    out.write_text("hamlearn.csv", csv);
    json report;
    report["plan"] = plan_json(plan);
    report["mean_abs_error"] = total_mean_abs / plan.disorder_realizations;
    report["realizations"] = rows;
    out.write_text("report.json", report.dump(2) + "\n");
}

void run_bounds(const ExperimentPlan &plan, OutDir &out) {
    std::string csv = "family,scheme,n,k,m,t,eps,delta,value\n";
    json rows = json::array();
    auto add = [&](const std::string &family, const std::string &scheme, int n, int k,
                   int64_t m, double t, double eps, double delta, int64_t value) {
        csv += family + "," + scheme + "," + std::to_string(n) + "," + std::to_string(k) +
               "," + std::to_string(m) + "," + fmt_g(t) + "," + fmt_g(eps) + "," +
               fmt_g(delta) + "," + std::to_string(value) + "\n";
        rows.push_back({{"family", family},
                        {"scheme", scheme},
                        {"n", n},
                        {"k", k},
                        {"m", m},
                        {"t", t},
                        {"eps", eps},
                        {"delta", delta},
                        {"value", value}});
    };
    const double eps = 0.2, delta = 0.05;
    for (int n = 2; n <= 6; ++n) {
        for (int k = 1; k <= 2; ++k) {
            add("reduced", "global_clifford", n, k, 0, 0, eps, delta,
                bound_reduced(n, k, eps, delta, ReducedBound::global_clifford));
            add("reduced", "pauli6_frobenius", n, k, 0, 0, eps, delta,
                bound_reduced(n, k, eps, delta, ReducedBound::pauli6_frobenius));
            add("reduced", "pauli6_trace", n, k, 0, 0, eps, delta,
                bound_reduced(n, k, eps, delta, ReducedBound::pauli6_trace));
        }
    }
    for (int64_t m : {1, 10, 100}) {
        add("overlap", "global_clifford_pure", 0, 1, m, 0, eps, delta,
            bound_overlap(m, eps, delta, OverlapBound::global_clifford_pure));
        add("overlap", "single_qubit_clifford_pure", 0, 2, m, 0, eps, delta,
            bound_overlap(m, eps, delta, OverlapBound::single_qubit_clifford_pure, 2));
    }
    for (int n : {3, 5, 7, 9}) {
        add("hamlearn", "pauli6", n, 2, 0, 0.1, 0.1, 0.1,
            bound_hamlearn(n, 2, 0.1, 0.1, 0.1));
    }
    out.write_text("bounds.csv", csv);
    json report;
    report["plan"] = plan_json(plan);
    report["bounds"] = rows;
    out.write_text("report.json", report.dump(2) + "\n");
}

}  // namespace

void run_plan(const ExperimentPlan &plan, const std::string &out_dir) {
    plan.validate();
    OutDir out(out_dir);
    try {
        if (plan.preset == "full_process") {
            run_full_process(plan, out);
        } else if (plan.preset == "reduced_process") {
            run_reduced_process(plan, out);
        } else if (plan.preset == "overlap") {
            run_overlap(plan, out);
        } else if (plan.preset == "hamlearn") {
            run_hamlearn_preset(plan, out);
        } else if (plan.preset == "bounds") {
            run_bounds(plan, out);
        } else if (plan.preset == "scheme_compare") {
            run_scheme_compare(plan, out);
        } else {
            throw std::runtime_error("unknown preset '" + plan.preset + "'");
        }
    } catch (...) {
        out.cleanup();
        throw;
    }
}

}  // namespace shadowqpt
