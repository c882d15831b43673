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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "shadowqpt/acquire.hpp"
#include "shadowqpt/plan.hpp"
#include "shadowqpt/postprocess.hpp"
#include "shadowqpt/shadows.hpp"

using namespace shadowqpt;

namespace {

struct CommonArgs {
    std::string plan_file;
    std::string preset;
    std::string out_dir = "out";
    std::vector<std::string> overrides;
    int64_t seed = -1;
};

void attach_common(CLI::App *cmd, CommonArgs &args) {
    cmd->add_option("--plan", args.plan_file, "Plan file (TOML)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--preset", args.preset,
                    "Named preset: full_process, reduced_process, overlap, hamlearn, "
                    "bounds, scheme_compare");
    cmd->add_option("--out", args.out_dir, "Output directory");
    cmd->add_option("--override", args.overrides,
                    "Plan override as key=value, may repeat");
    cmd->add_option("--seed", args.seed, "Master seed (overrides the plan)");
}

ExperimentPlan resolve_plan(const CommonArgs &args, const std::string &default_preset) {
    ExperimentPlan plan;
    if (!args.plan_file.empty()) {
        std::ifstream f(args.plan_file, std::ios::binary);
        if (!f) throw std::runtime_error("cannot read " + args.plan_file);
        std::ostringstream buf;
        buf << f.rdbuf();
        plan = ExperimentPlan::from_toml_text(buf.str());
        if (!args.preset.empty() && args.preset != plan.preset) {
            throw std::runtime_error("--preset conflicts with the plan file");
        }
    } else {
        plan = ExperimentPlan::from_preset(args.preset.empty() ? default_preset
                                                               : args.preset);
    }
    for (const std::string &kv : args.overrides) plan.apply_override(kv);
    if (args.seed >= 0) plan.seed = static_cast<uint64_t>(args.seed);
    plan.validate();
    return plan;
}

int run_guarded(const std::function<int()> &body) {
    try {
        return body();
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Classical-shadow process tomography toolkit"};
    app.require_subcommand(1);

    CommonArgs acquire_args, run_args, overlap_args, hamlearn_args, bounds_args;
    std::string records_path, choi_path, choi_out, steps_arg;

    CLI::App *cmd_acquire = app.add_subcommand("acquire", "Simulate measurement records");
    attach_common(cmd_acquire, acquire_args);

    CLI::App *cmd_reconstruct =
        app.add_subcommand("reconstruct", "Estimate a Choi matrix from records");
    CommonArgs rec_args;
    attach_common(cmd_reconstruct, rec_args);
    cmd_reconstruct->add_option("--records", records_path, "Record file (.jsonl or .jsonl.gz)")
        ->required()
        ->check(CLI::ExistingFile);

    CLI::App *cmd_post =
        app.add_subcommand("postprocess", "Project a stored Choi matrix onto physical sets");
    CommonArgs post_args;
    attach_common(cmd_post, post_args);
    cmd_post->add_option("--choi", choi_path, "Input Choi matrix (choi_*.json)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_post->add_option("--steps", steps_arg, "Comma-separated stages: cp,tp,purify");

    CLI::App *cmd_overlap = app.add_subcommand("overlap", "Overlap prediction sweep");
    attach_common(cmd_overlap, overlap_args);

    CLI::App *cmd_hamlearn = app.add_subcommand("hamlearn", "Hamiltonian coupling recovery");
    attach_common(cmd_hamlearn, hamlearn_args);

    CLI::App *cmd_bounds = app.add_subcommand("bounds", "Tabulate sample-complexity bounds");
    attach_common(cmd_bounds, bounds_args);

    CLI::App *cmd_validate = app.add_subcommand("validate", "Check a record file");
    cmd_validate->add_option("--records", records_path, "Record file")
        ->required()
        ->check(CLI::ExistingFile);

    CLI::App *cmd_report = app.add_subcommand("report", "Run a full plan and emit a report");
    attach_common(cmd_report, run_args);

    CLI11_PARSE(app, argc, argv);

    if (cmd_acquire->parsed()) {
        return run_guarded([&] {
            ExperimentPlan plan = resolve_plan(acquire_args, "full_process");
            std::filesystem::create_directories(acquire_args.out_dir);
            auto records = plan.acquire(plan.seed);
            std::string path = acquire_args.out_dir + "/records.jsonl";
            write_records(records, path);
            std::cout << "wrote " << records.size() << " records to " << path << "\n";
            return 0;
        });
    }
    if (cmd_reconstruct->parsed()) {
        return run_guarded([&] {
            ExperimentPlan plan = resolve_plan(rec_args, "full_process");
            auto records = read_records(records_path);
            ChoiMatrix est = estimate_choi(records, plan.estimator);
            std::filesystem::create_directories(rec_args.out_dir);
            std::string path = rec_args.out_dir + "/choi_raw.json";
            write_choi_json(est, scheme_name(records.front().setting.scheme), path);
            std::cout << "wrote " << path << "\n";
            return 0;
        });
    }
    if (cmd_post->parsed()) {
        return run_guarded([&] {
            ChoiMatrix current = read_choi_json(choi_path);
            std::filesystem::create_directories(post_args.out_dir);
            std::vector<std::string> steps;
            std::stringstream ss(steps_arg.empty() ? std::string("cp,tp") : steps_arg);
            std::string item;
            while (std::getline(ss, item, ',')) {
                if (!item.empty()) steps.push_back(item);
            }
            for (const std::string &step : steps) {
                if (step == "cp") {
                    current = cp_project(current);
                } else if (step == "tp") {
                    current = tp_project(current);
                } else if (step == "purify") {
                    current = purify(current);
                } else {
                    throw std::runtime_error("unknown step '" + step +
                                             "' (postprocess handles cp, tp, purify)");
                }
                std::string path = post_args.out_dir + "/choi_" + step + ".json";
                write_choi_json(current, "stored", path);
                std::cout << "wrote " << path << "\n";
            }
            return 0;
        });
    }
    if (cmd_validate->parsed()) {
        return run_guarded([&] {
            ValidationReport rep = validate_records(records_path);
            std::cout << records_path << ": " << rep.records << " records, " << rep.outcomes
                      << " outcomes";
            if (rep.records > 0) std::cout << " (" << rep.scheme << ", n=" << rep.n << ")";
            std::cout << "\n";
            for (const std::string &e : rep.errors) std::cout << "  " << e << "\n";
            return rep.errors.empty() ? 0 : 1;
        });
    }

    std::string default_preset = "full_process";
    CommonArgs *args = &run_args;
    if (cmd_overlap->parsed()) {
        default_preset = "overlap";
        args = &overlap_args;
    } else if (cmd_hamlearn->parsed()) {
        default_preset = "hamlearn";
        args = &hamlearn_args;
    } else if (cmd_bounds->parsed()) {
        default_preset = "bounds";
        args = &bounds_args;
    }
    return run_guarded([&] {
        ExperimentPlan plan = resolve_plan(*args, default_preset);
        run_plan(plan, args->out_dir);
        std::cout << "wrote " << args->out_dir << "/report.json\n";
        return 0;
    });
}
