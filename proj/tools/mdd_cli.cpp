// Copyright 2026 The MDD Toolkit Authors
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

#include <iostream>

#include "CLI11.hpp"
#include "mdd.hpp"

namespace {

int run_verify(const std::string &suite, std::uint64_t seed, unsigned jobs, const std::string &out) {
    mdd::VerifierOptions vo;
    vo.seed = seed;
    vo.jobs = jobs;
    mdd::VerifierReport rep;
    if (suite == "lemma") {
        rep = mdd::verify_lemma(vo);
    } else if (suite == "theorem") {
        rep = mdd::verify_theorem(vo);
    } else if (suite == "decay") {
        rep = mdd::verify_decay(vo);
    } else if (suite == "bounds") {
        rep = mdd::verify_bounds(vo);
    } else {
        rep = mdd::verify_two_qubit(vo);
    }
    const auto text = rep.to_json().dump(2) + "\n";
    if (!out.empty()) {
        std::filesystem::create_directories(out);
        std::ofstream(std::filesystem::path(out) / (suite + ".json"), std::ios::binary) << text;
    }
    std::cout << text;
    return rep.passed ? mdd::kExitOk : mdd::kExitViolation;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Measurement-based dynamical decoupling toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;
    auto *run = app.add_subcommand("run", "Run an experiment described by a JSON config");
    run->add_option("--config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--seed", seed, "Override the config seed");
    run->add_option("--out", out_dir, "Output directory (default: config 'output')");
    run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

    std::string suite;
    std::uint64_t vseed = 0;
    unsigned vjobs = 1;
    std::string vout;
    auto *verify = app.add_subcommand("verify", "Run a verifier suite and print its JSON report");
    verify->add_option("--suite", suite, "Suite name")
        ->required()
        ->check(CLI::IsMember({"lemma", "theorem", "decay", "bounds", "two-qubit"}));
    verify->add_option("--seed", vseed, "Base seed");
    verify->add_option("--jobs", vjobs, "Worker threads")->check(CLI::PositiveNumber);
    verify->add_option("--out", vout, "Also write <suite>.json into this directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return mdd::kExitConfig;
    }

    try {
        if (*verify) {
            return run_verify(suite, vseed, vjobs, vout);
        }
        auto cfg = mdd::load_experiment_config(config_path);
        if (seed) cfg.seed = *seed;
        const auto res = mdd::run_experiment(cfg, out_dir.empty() ? cfg.output : out_dir, jobs);
        for (const auto &f : res.files) std::cout << f << "\n";
        std::cerr << res.summary << "\n";
        return res.status;
    } catch (const mdd::ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return mdd::kExitConfig;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
