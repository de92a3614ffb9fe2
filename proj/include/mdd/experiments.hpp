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

// Experiment runner: JSON config in, CSV/JSON artifacts out.

#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mdd/analysis.hpp"
#include "mdd/dd.hpp"
#include "mdd/filter.hpp"
#include "mdd/parallel.hpp"
#include "mdd/recovery.hpp"
#include "mdd/schedule.hpp"
#include "mdd/verify.hpp"

namespace mdd {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitViolation = 3 };

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline const std::vector<std::string> &experiment_kinds() {
    static const std::vector<std::string> k = {"fidelity-sweep", "lemma-check", "theorem-gap", "filter-noise",
                                               "two-qubit-opt",  "qft-toy",     "sqd-recover"};
    return k;
}

struct ExperimentConfig {
    std::string kind;
    double t1 = kDefaultT1;
    double t2 = kDefaultT2;
    double omega_c = kDefaultOmegaC;
    std::vector<std::string> spectra = {"ohmic", "1/f"};
    std::vector<std::string> sequences;
    std::vector<double> t_grid;
    int num_qubits = 4;
    int qubit = 0;
    std::size_t states = 20;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::string output = "out";
    std::uint64_t shots = 10000;
    bool exact_expectations = true;
    // qft-toy
    int qft_qubits = 4;
    std::size_t seeds = 5;
    // sqd-recover
    std::string fcidump;
    double flip_rate = 0.05;
    std::uint64_t sqd_shots = 300;
    double delta = kDefaultDelta;
    int iterations = 5;
    int batches = 10;
    int samples_per_batch = 300;
    std::optional<double> reference_energy;

    NoiseParams noise() const {
        return NoiseParams(t1, t2);
    }
};

namespace detail {

inline std::vector<std::string> default_sequences(const std::string &kind) {
    if (kind == "fidelity-sweep") return {"none", "xx", "udd8", "mdd"};
    if (kind == "theorem-gap") return {"xx", "xy4", "udd8", "qdd2"};
    if (kind == "filter-noise") return {"none", "xx", "udd8", "mdd"};
    if (kind == "qft-toy") return {"none", "xx", "mdd"};
    return {};
}

inline std::vector<double> default_grid(const std::string &kind) {
    if (kind == "filter-noise") {
        std::vector<double> g;
        for (int i = 1; i <= 50; ++i) g.push_back(20.0 * i);
        return g;
    }
    return geometric_grid(1000.0, 8);
}

inline std::vector<double> parse_grid(const nlohmann::json &j) {
    if (j.is_array()) return j.get<std::vector<double>>();
    if (!j.is_object()) throw ConfigError("t_grid must be an array or an object");
    if (j.contains("geometric")) {
        const auto &g = j.at("geometric");
        return geometric_grid(g.at("t_max").get<double>(), g.at("points").get<std::size_t>(), g.value("ratio", 2.0));
    }
    if (j.contains("linear")) {
        const auto &g = j.at("linear");
        const double a = g.at("start").get<double>(), b = g.at("stop").get<double>();
        const int n = g.at("points").get<int>();
        if (n < 1) throw ConfigError("linear grid needs at least one point");
        std::vector<double> out;
        for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
        return out;
    }
    throw ConfigError("t_grid object needs 'geometric' or 'linear'");
}

}  // namespace detail

/// Strict parse: unknown keys and invalid values raise ConfigError.
inline ExperimentConfig parse_experiment_config(const nlohmann::json &j) {
    static const std::set<std::string> keys = {
        "kind",    "noise",   "sequences", "t_grid",     "num_qubits", "qubit",      "states",   "trials",
        "seed",    "output",  "shots",     "exact_expectations",      "qft_qubits", "seeds",    "fcidump",
        "flip_rate", "sqd_shots", "delta",  "iterations", "batches", "samples_per_batch", "reference_energy"};
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto &[k, v] : j.items()) {
        if (!keys.count(k)) throw ConfigError("unknown config key '" + k + "'");
    }
    ExperimentConfig c;
    try {
        c.kind = j.at("kind").get<std::string>();
        if (std::find(experiment_kinds().begin(), experiment_kinds().end(), c.kind) == experiment_kinds().end()) {
            throw ConfigError("unknown experiment kind '" + c.kind + "'");
        }
        if (j.contains("noise")) {
            const auto &n = j.at("noise");
            for (const auto &[k, v] : n.items()) {
                if (k != "T1" && k != "T2" && k != "omega_c" && k != "spectra") {
                    throw ConfigError("unknown noise key '" + k + "'");
                }
            }
            c.t1 = n.value("T1", c.t1);
            c.t2 = n.value("T2", c.t2);
            c.omega_c = n.value("omega_c", c.omega_c);
            if (n.contains("spectra")) c.spectra = n.at("spectra").get<std::vector<std::string>>();
        }
        c.sequences = j.contains("sequences") ? j.at("sequences").get<std::vector<std::string>>()
                                              : detail::default_sequences(c.kind);
        c.t_grid = j.contains("t_grid") ? detail::parse_grid(j.at("t_grid")) : detail::default_grid(c.kind);
        c.num_qubits = j.value("num_qubits", c.kind == "filter-noise" ? 2 : c.num_qubits);
        c.qubit = j.value("qubit", c.qubit);
        c.states = j.value("states", c.states);
        c.trials = j.value("trials", c.trials);
        c.seed = j.value("seed", c.seed);
        c.output = j.value("output", c.output);
        c.shots = j.value("shots", c.shots);
        c.exact_expectations = j.value("exact_expectations", c.exact_expectations);
        c.qft_qubits = j.value("qft_qubits", c.qft_qubits);
        c.seeds = j.value("seeds", c.seeds);
        c.fcidump = j.value("fcidump", c.fcidump);
        c.flip_rate = j.value("flip_rate", c.flip_rate);
        c.sqd_shots = j.value("sqd_shots", c.sqd_shots);
        c.delta = j.value("delta", c.delta);
        c.iterations = j.value("iterations", c.iterations);
        c.batches = j.value("batches", c.batches);
        c.samples_per_batch = j.value("samples_per_batch", c.samples_per_batch);
        if (j.contains("reference_energy")) c.reference_energy = j.at("reference_energy").get<double>();
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    if (c.states < 1) throw ConfigError("state count must be at least 1");
    if (c.t_grid.empty()) throw ConfigError("t grid is empty");
    for (std::size_t i = 0; i < c.t_grid.size(); ++i) {
        if (!(c.t_grid[i] > 0.0) || !std::isfinite(c.t_grid[i]) || (i > 0 && !(c.t_grid[i] > c.t_grid[i - 1]))) {
            throw ConfigError("t grid must be positive and strictly increasing");
        }
    }
    if (c.num_qubits < 1 || c.num_qubits > kMaxMixedQubits) throw ConfigError("num_qubits out of range");
    if (c.qubit < 0 || c.qubit >= c.num_qubits) throw ConfigError("qubit index out of range");
    if (c.shots == 0) throw ConfigError("shots must be positive");
    for (const auto &s : c.spectra) {
        if (s != "ohmic" && s != "1/f") throw ConfigError("unknown spectrum '" + s + "'");
    }
    if (c.kind == "sqd-recover" && c.fcidump.empty()) throw ConfigError("sqd-recover needs 'fcidump'");
    try {
        (void)c.noise();
        (void)SpectralDensity(SpectrumKind::Ohmic, c.omega_c);
        for (const auto &s : c.sequences) (void)SequenceSpec::parse(s);
        RecoveryConfig{c.iterations, c.batches, c.samples_per_batch, c.delta, 0, 1}.validate();
        if (c.kind == "qft-toy" && (c.qft_qubits < 2 || c.qft_qubits > 6)) throw ArgumentError("qft_qubits must be 2..6");
        if (c.kind == "sqd-recover" && !(c.flip_rate >= 0.0 && c.flip_rate < 1.0)) throw ArgumentError("flip_rate must lie in [0, 1)");
    } catch (const ArgumentError &e) {
        throw ConfigError(e.what());
    }
    return c;
}

inline ExperimentConfig load_experiment_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_experiment_config(j);
}

struct RunResult {
    int status = kExitOk;
    std::vector<std::string> files;
    std::string summary;
};

namespace detail {

/// Shortest round-trip decimal; CSV cells never carry NaN or Inf.
inline std::string num(double v) {
    if (!std::isfinite(v)) throw NumericalError("non-finite value in output");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Stats {
    double mean = 0, lo = 0, hi = 0;
};

inline Stats stats(const std::vector<double> &v) {
    Stats s{0.0, std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (double x : v) {
        s.mean += x;
        s.lo = std::min(s.lo, x);
        s.hi = std::max(s.hi, x);
    }
    s.mean /= static_cast<double>(v.size());
    return s;
}

class ArtifactWriter {
   public:
    explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }
    void write(const std::string &name, const std::string &content, RunResult &r) {
        const auto p = dir_ / name;
        std::ofstream out(p, std::ios::binary);
        out << content;
        if (!out) throw std::runtime_error("cannot write " + p.string());
        r.files.push_back(p.string());
    }

   private:
    std::filesystem::path dir_;
};

inline std::string dump(const nlohmann::json &j) {
    return j.dump(2) + "\n";
}

inline SpectrumKind spectrum_kind(const std::string &s) {
    return s == "ohmic" ? SpectrumKind::Ohmic : SpectrumKind::OneOverF;
}

}  // namespace detail

/// Mean/min/max entanglement fidelity per (t, sequence) over random states.
inline std::string fidelity_sweep_csv(const ExperimentConfig &c, unsigned jobs) {
    const auto noise = c.noise();
    std::vector<SequenceSpec> specs;
    for (const auto &s : c.sequences) specs.push_back(SequenceSpec::parse(s));
    const auto per_state = parallel_map(c.states, jobs, [&](std::size_t i) {
        const auto psi = haar_random_state(c.num_qubits, derive_seed(c.seed, {0x5EEULL, i}));
        std::optional<PauliExpectations> e;
        if (!c.exact_expectations) {
            auto rng = make_rng(c.seed, {0x5EEULL, i, 1});
            const int q[1] = {c.qubit};
            e = PauliExpectations::sampled(reduced_density(psi, q), c.shots, rng);
        }
        std::vector<double> f;
        for (double t : c.t_grid) {
            for (const auto &sp : specs) {
                if (sp.needs_expectations() && e) {
                    const auto sched = build_schedule(sp, t, e);
                    f.push_back(entanglement_fidelity(psi, evolve_with_schedule(psi, sched, noise, c.qubit)));
                } else {
                    f.push_back(idle_fidelity(psi, sp, t, noise, c.qubit));
                }
            }
        }
        return f;
    });
    std::ostringstream os;
    os << "t,sequence,mean_F,min_F,max_F\n";
    std::size_t k = 0;
    for (double t : c.t_grid) {
        for (const auto &sp : specs) {
            std::vector<double> col;
            for (const auto &row : per_state) col.push_back(row[k]);
            const auto s = detail::stats(col);
            os << detail::num(t) << ',' << sp.name() << ',' << detail::num(s.mean) << ',' << detail::num(s.lo) << ','
               << detail::num(s.hi) << '\n';
            ++k;
        }
    }
    return os.str();
}

/// T1 plus classical dephasing: chi and fidelity statistics per spectrum.
inline std::string filter_noise_csv(const ExperimentConfig &c, unsigned jobs) {
    std::vector<SequenceSpec> specs;
    for (const auto &s : c.sequences) specs.push_back(SequenceSpec::parse(s));
    std::vector<PureState> states;
    for (std::size_t i = 0; i < c.states; ++i) states.push_back(haar_random_state(c.num_qubits, derive_seed(c.seed, {0xF17ULL, i})));
    struct Point {
        double chi;
        std::vector<double> f;
    };
    std::vector<std::tuple<std::string, double, SequenceSpec>> work;
    for (const auto &sp_name : c.spectra)
        for (double t : c.t_grid)
            for (const auto &sp : specs) work.emplace_back(sp_name, t, sp);
    const auto pts = parallel_map(work.size(), jobs, [&](std::size_t w) {
        const auto &[sp_name, t, sp] = work[w];
        const SpectralDensity spectrum(detail::spectrum_kind(sp_name), c.omega_c);
        Point p{0.0, {}};
        for (const auto &psi : states) {
            std::optional<PauliExpectations> e;
            if (sp.needs_expectations()) {
                const int q[1] = {c.qubit};
                e = PauliExpectations::exact(reduced_density(psi, q));
            }
            const auto sched = build_schedule(sp, t, e);
            if (p.f.empty()) p.chi = chi_integral(spectrum, sched.interior_times(), t);
            const auto out =
                evolve_with_random_dephasing(DensityMatrix::from_pure(psi), sched, c.t1, spectrum, c.qubit);
            p.f.push_back(entanglement_fidelity(psi, out));
        }
        return p;
    });
    std::ostringstream os;
    os << "spectrum,t,sequence,chi,mean_F,min_F,max_F\n";
    for (std::size_t w = 0; w < work.size(); ++w) {
        const auto &[sp_name, t, sp] = work[w];
        const auto s = detail::stats(pts[w].f);
        os << sp_name << ',' << detail::num(t) << ',' << sp.name() << ',' << detail::num(pts[w].chi) << ','
           << detail::num(s.mean) << ',' << detail::num(s.lo) << ',' << detail::num(s.hi) << '\n';
    }
    return os.str();
}

struct QftRow {
    int n;
    std::string strategy;
    std::uint64_t seed;
    double p_success, exact_p;
};

/// One seeded toy-QFT run: measured-shot MDD pass, then sampled readout.
inline QftRow qft_run(int n, const SequenceSpec &spec, const NoiseParams &noise, std::uint64_t seed,
                      std::uint64_t shots) {
    const auto base = qft_scenario(n);
    InsertOptions opt;
    opt.shots = shots;
    opt.seed = seed;
    const auto circuit = insert_dd(base, spec, noise, opt);
    const auto rho = simulate(circuit, noise);
    auto rng = make_rng(seed, {7});
    const auto target = qft_target(n);
    const auto counts = sample_bitstrings(rho, shots, rng);
    std::uint64_t idx = 0;
    for (char ch : target) idx = (idx << 1) | static_cast<std::uint64_t>(ch == '1');
    const double exact = 100.0 * rho.matrix()(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(idx)).real();
    return QftRow{n, spec.name(), seed, success_probability(counts, target), exact};
}

inline std::vector<QftRow> qft_rows(const ExperimentConfig &c, unsigned jobs) {
    std::vector<std::pair<SequenceSpec, std::uint64_t>> work;
    for (const auto &s : c.sequences)
        for (std::size_t k = 0; k < c.seeds; ++k) work.emplace_back(SequenceSpec::parse(s), derive_seed(c.seed, {k}));
    const auto noise = c.noise();
    return parallel_map(work.size(), jobs,
                        [&](std::size_t w) { return qft_run(c.qft_qubits, work[w].first, noise, work[w].second, c.shots); });
}

/// Runs one experiment and writes its artifacts under `out_dir`.
inline RunResult run_experiment(const ExperimentConfig &c, const std::string &out_dir, unsigned jobs) {
    RunResult r;
    detail::ArtifactWriter w(out_dir);
    VerifierOptions vo;
    vo.seed = c.seed;
    vo.jobs = jobs;
    vo.noise = c.noise();
    vo.samples = c.states;
    vo.trials = c.trials;
    auto verdict = [&](const VerifierReport &rep, const std::string &file) {
        w.write(file, detail::dump(rep.to_json()), r);
        if (!rep.passed) r.status = kExitViolation;
        r.summary = rep.claim + (rep.passed ? " passed" : " violated") + ", margin " + detail::num(rep.margin);
    };
    if (c.kind == "fidelity-sweep") {
        w.write("fidelity_sweep.csv", fidelity_sweep_csv(c, jobs), r);
    } else if (c.kind == "lemma-check") {
        verdict(verify_lemma(vo), "lemma.json");
    } else if (c.kind == "theorem-gap") {
        TheoremOptions th;
        th.num_qubits = c.num_qubits;
        th.noisy_qubit = c.qubit;
        th.sequences = c.sequences;
        th.t_max = c.t_grid.back();
        th.points = static_cast<int>(c.t_grid.size());
        verdict(verify_theorem(vo, th), "theorem.json");
    } else if (c.kind == "filter-noise") {
        w.write("filter_noise.csv", filter_noise_csv(c, jobs), r);
    } else if (c.kind == "two-qubit-opt") {
        const auto rep = verify_two_qubit(vo);
        std::ostringstream os;
        os << "instance,r_i,r_j,c1,c2,c3,rate,grid_rate,method\n";
        std::size_t i = 0;
        for (const auto &row : rep.details["instances"]) {
            os << i++ << ',' << detail::num(row["r_i"]) << ',' << detail::num(row["r_j"]) << ','
               << detail::num(row["c"][0]) << ',' << detail::num(row["c"][1]) << ',' << detail::num(row["c"][2]) << ','
               << detail::num(row["rate"]) << ',' << detail::num(row["grid_rate"]) << ','
               << row["method"].get<std::string>() << '\n';
        }
        w.write("two_qubit.csv", os.str(), r);
        verdict(rep, "two_qubit.json");
    } else if (c.kind == "qft-toy") {
        std::ostringstream os;
        os << "n,strategy,seed,p_success,exact_p\n";
        for (const auto &row : qft_rows(c, jobs)) {
            os << row.n << ',' << row.strategy << ',' << row.seed << ',' << detail::num(row.p_success) << ','
               << detail::num(row.exact_p) << '\n';
        }
        w.write("qft_toy.csv", os.str(), r);
    } else if (c.kind == "sqd-recover") {
        FciData f = [&] {
            try {
                return read_fcidump(c.fcidump);
            } catch (const ArgumentError &e) {
                throw ConfigError(e.what());
            }
        }();
        const auto dets = fci_space(f);
        const auto gs = project_and_diagonalize(dets, f);
        const auto samples = noisy_sampler(gs.vector, dets, f.norb(), c.flip_rate, c.sqd_shots, c.seed);
        RecoveryConfig rc{c.iterations, c.batches, c.samples_per_batch, c.delta, c.seed, jobs};
        const auto rep = self_consistent_recovery(samples, f, rc, c.reference_energy.value_or(gs.energy));
        w.write("sqd_recovery.csv", recovery_csv(rep), r);
        auto j = to_json(rep);
        j["flip_rate"] = c.flip_rate;
        j["shots"] = c.sqd_shots;
        w.write("sqd_recovery.json", detail::dump(j), r);
        if (!rep.ok) r.status = kExitViolation;
        r.summary = rep.status;
    }
    if (r.summary.empty()) r.summary = c.kind + " done";
    return r;
}

}  // namespace mdd
