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

// Acceptance checks. Usage: acceptance <criterion 1..10> [--jobs K]
// Prints one line "criterion N PASS|FAIL ..." and exits nonzero on failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "mdd.hpp"

using namespace mdd;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream info;

    void check(bool ok, const std::string &what) {
        if (!ok) {
            pass = false;
            info << " [failed: " << what << "]";
        }
    }
};

unsigned g_jobs = 4;

// Criterion 1
void ground_state(Outcome &o) {
    auto rng = make_rng(101);
    const auto g = DensityMatrix::from_pure(PureState::basis(1, 0));
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double t1 = 10.0 + 490.0 * uniform01(rng);
        const double t2 = (0.05 + 1.95 * uniform01(rng)) * t1;
        const double t = 2000.0 * uniform01(rng);
        const auto out = apply_local(combined_channel(NoiseParams(t1, t2), t), g, 0);
        worst = std::max(worst, (out.matrix() - g.matrix()).cwiseAbs().maxCoeff());
    }
    o.info << " max deviation " << worst;
    o.check(worst <= 1e-14, "deviation > 1e-14");
}

VerifierOptions vopts() {
    VerifierOptions v;
    v.jobs = g_jobs;
    return v;
}

void report(Outcome &o, const VerifierReport &r) {
    o.info << " margin " << r.margin << " details " << r.details.dump();
    o.check(r.passed, r.claim + " verifier");
}

// Criterion 3
void theorem(Outcome &o) {
    const auto r = verify_theorem(vopts());
    report(o, r);
    o.check(r.details["mean_mdd_uppermost"].get<bool>(), "mean MDD curve not uppermost");
    o.check(r.details["mean_none_lowest"].get<bool>(), "mean no-DD curve not lowest");
}

// Criterion 6
void two_qubit(Outcome &o) {
    bool pure_ok = true;
    for (std::size_t i = 0; i < 20; ++i) {
        const auto inst = random_two_qubit_instance(77, i);
        const auto opt = optimize_two_qubit_mdd(1.0, 1.0, inst.rates, i);
        pure_ok = pure_ok && std::abs(opt.c.c1 - 1) < 1e-12 && std::abs(opt.c.c2 - 1) < 1e-12 &&
                  std::abs(opt.c.c3 - 1) < 1e-12 && std::abs(opt.rate) < 1e-15;
    }
    o.check(pure_ok, "pure inputs");
    const auto slice = ansatz_slice_feasible(Rational{1, 1});
    o.check(!slice.feasible, "c3 = 1 declared feasible");
    o.info << " c3=1: " << slice.reason;
    const auto r = verify_two_qubit(vopts(), 201);
    report(o, r);
}

// Criterion 7
void filters(Outcome &o) {
    auto rng = make_rng(707);
    double free_err = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double t = 0.1 + 100.0 * uniform01(rng), w = 10.0 * uniform01(rng);
        const double s = std::sin(w * t / 2.0);
        free_err = std::max(free_err, std::abs(filter_function({}, t, w) - 4.0 * s * s));
    }
    o.info << " free err " << free_err;
    o.check(free_err <= 1e-12, "free evolution filter");

    std::vector<double> low;
    for (int k = 0; k < 10; ++k) low.push_back(1e-3 * std::pow(10.0, k / 9.0));
    const auto xx = build_schedule(SequenceSpec::parse("xx"), 1.0).interior_times();
    const double sxx = filter_loglog_slope(xx, 1.0, low);
    o.info << " xx slope " << sxx;
    o.check(std::abs(sxx - 4.0) <= 0.1, "XX low-frequency slope 4 +- 0.1");
    for (int n : {2, 4}) {
        const double s = filter_loglog_slope(udd_times(n, 1.0), 1.0, low);
        o.info << " udd" << n << " slope " << s;
        o.check(std::abs(s - 2.0 * (n + 1)) <= 0.05 * 2.0 * (n + 1), "UDD slope");
    }
    for (auto kind : {SpectrumKind::Ohmic, SpectrumKind::OneOverF}) {
        const SpectralDensity sp(kind, 0.1);
        QuadratureResult prev{-1.0, 0.0, 0};
        bool mono = true;
        for (int k = 1; k <= 50; ++k) {
            const auto c = chi_integral_detailed(sp, {}, 20.0 * k);
            // non-decreasing up to the quadrature error estimates
            mono = mono && std::isfinite(c.value) && c.value >= prev.value - (c.error_estimate + prev.error_estimate);
            prev = c;
        }
        o.info << (kind == SpectrumKind::Ohmic ? " ohmic" : " 1/f") << " chi(1000) " << prev.value;
        o.check(mono, "chi monotone and finite");
    }
    const std::vector<std::string> order = {"mdd", "udd8", "xx", "none"};
    std::vector<PureState> states;
    for (std::size_t i = 0; i < 20; ++i) states.push_back(haar_random_state(2, derive_seed(708, {i})));
    for (auto kind : {SpectrumKind::Ohmic, SpectrumKind::OneOverF}) {
        const SpectralDensity sp(kind, 0.1);
        for (double t : {500.0, 750.0, 1000.0}) {
            std::vector<double> mean;
            for (const auto &name : order) {
                const auto spec = SequenceSpec::parse(name);
                double m = 0.0;
                for (const auto &psi : states) {
                    std::optional<PauliExpectations> e;
                    const int q[1] = {0};
                    if (spec.needs_expectations()) e = PauliExpectations::exact(reduced_density(psi, q));
                    const auto out = evolve_with_random_dephasing(DensityMatrix::from_pure(psi),
                                                                  build_schedule(spec, t, e), kDefaultT1, sp, 0);
                    m += entanglement_fidelity(psi, out) / 20.0;
                }
                mean.push_back(m);
            }
            const bool ok = mean[0] >= mean[1] && mean[1] >= mean[2] && mean[2] >= mean[3];
            o.info << " " << (kind == SpectrumKind::Ohmic ? "ohmic" : "1/f") << " t=" << t << " F(mdd,udd8,xx,none)=("
                   << mean[0] << "," << mean[1] << "," << mean[2] << "," << mean[3] << ")";
            o.check(ok, "late-time ordering");
        }
    }
}

// Independent Fock-space construction for the Slater-Condon comparison.
std::optional<std::pair<double, std::uint64_t>> apply_ops(const std::vector<std::pair<bool, int>> &ops,
                                                         std::uint64_t state) {
    double sign = 1.0;
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
        const auto [create, mode] = *it;
        if (static_cast<bool>((state >> mode) & 1) == create) return std::nullopt;
        if (std::popcount(state & ((std::uint64_t{1} << mode) - 1)) % 2) sign = -sign;
        state ^= std::uint64_t{1} << mode;
    }
    return std::make_pair(sign, state);
}

double fock_element(const FciData &f, std::uint64_t bra, std::uint64_t ket) {
    const int n = f.norb(), m = 2 * n;
    double v = bra == ket ? f.core_energy() : 0.0;
    for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q) {
            if ((p < n) != (q < n)) continue;
            if (auto r = apply_ops({{true, p}, {false, q}}, ket); r && r->second == bra) v += f.h(p % n, q % n) * r->first;
        }
    for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q)
            for (int r = 0; r < m; ++r)
                for (int s = 0; s < m; ++s) {
                    if ((p < n) != (r < n) || (q < n) != (s < n)) continue;
                    auto o = apply_ops({{true, p}, {true, q}, {false, s}, {false, r}}, ket);
                    if (o && o->second == bra) v += 0.5 * f.eri(p % n, r % n, q % n, s % n) * o->first;
                }
    return v;
}

void sqd(Outcome &o) {
    const std::string dir = MDD_DATA_DIR;
    double worst = 0.0;
    for (const char *name : {"random_4so.fcidump", "random_8so.fcidump", "hubbard_dimer.fcidump"}) {
        const auto f = read_fcidump(dir + "/" + name);
        const int n = f.norb();
        std::vector<Determinant> all;
        for (int a = 0; a <= n; ++a)
            for (int b = 0; b <= n; ++b)
                for (const auto &d : fci_space(n, a, b)) all.push_back(d);
        for (const auto &di : all)
            for (const auto &dj : all)
                worst = std::max(worst, std::abs(slater_condon(di, dj, f) -
                                                 fock_element(f, di.spin_mask(n), dj.spin_mask(n))));
    }
    o.info << " slater-condon max err " << worst;
    o.check(worst <= 1e-10, "Slater-Condon vs Fock space");
    const auto hub = read_fcidump(dir + "/hubbard_dimer.fcidump");
    const double eh = project_and_diagonalize(fci_space(hub), hub).energy;
    o.info << " hubbard err " << std::abs(eh - (2.0 - 2.0 * std::sqrt(2.0)));
    o.check(std::abs(eh - (2.0 - 2.0 * std::sqrt(2.0))) <= 1e-10, "Hubbard dimer energy");
    const auto f = read_fcidump(dir + "/random_8so.fcidump");
    const auto dets = fci_space(f);
    const auto g = project_and_diagonalize(dets, f);
    int improved = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        RecoveryConfig cfg;
        cfg.seed = s;
        cfg.jobs = g_jobs;
        const auto rep = self_consistent_recovery(noisy_sampler(g.vector, dets, f.norb(), 0.05, 300, s), f, cfg, g.energy);
        improved += rep.ok && rep.mean_abs_error(rep.iterations.size() - 1) < rep.mean_abs_error(0);
    }
    o.info << " improved " << improved << "/20";
    o.check(improved >= 19, "recovery improvement in >= 95% of seeds");
}

// Criterion 9
void qft(Outcome &o) {
    const auto c = qft_scenario(4);
    const Vector ideal = c.unitary().col(0);
    auto rng = make_rng(9);
    const auto counts = sample_bitstrings(DensityMatrix::from_pure(PureState(ideal)), 10000, rng);
    const double p_ideal = success_probability(counts, qft_target(4));
    o.info << " ideal " << p_ideal;
    o.check(p_ideal == 100.0, "ideal success 100%");
    const NoiseParams noise;
    for (std::uint64_t s = 0; s < 5; ++s) {
        const double none = qft_run(4, SequenceSpec::parse("none"), noise, s, 10000).p_success;
        const double xx = qft_run(4, SequenceSpec::parse("xx"), noise, s, 10000).p_success;
        const double mdd = qft_run(4, SequenceSpec::parse("mdd"), noise, s, 10000).p_success;
        o.info << " seed " << s << " (mdd,xx,none)=(" << mdd << "," << xx << "," << none << ")";
        o.check(mdd >= xx && xx >= none, "ordering");
    }
}

std::string read_dir(const std::filesystem::path &d) {
    std::vector<std::filesystem::path> files;
    for (const auto &e : std::filesystem::directory_iterator(d)) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::string all;
    for (const auto &p : files) {
        std::ifstream in(p, std::ios::binary);
        all += p.filename().string() + "\n" + std::string(std::istreambuf_iterator<char>(in), {});
    }
    return all;
}

// Criterion 10
void determinism(Outcome &o) {
    using Suite = std::function<VerifierReport(unsigned)>;
    const std::vector<std::pair<std::string, Suite>> suites = {
        {"lemma", [](unsigned j) { VerifierOptions v; v.jobs = j; v.trials = 2000; return verify_lemma(v); }},
        {"theorem", [](unsigned j) { VerifierOptions v; v.jobs = j; return verify_theorem(v); }},
        {"decay", [](unsigned j) { VerifierOptions v; v.jobs = j; v.trials = 2000; return verify_decay(v); }},
        {"bounds", [](unsigned j) { VerifierOptions v; v.jobs = j; return verify_bounds(v); }},
        {"two-qubit", [](unsigned j) { VerifierOptions v; v.jobs = j; return verify_two_qubit(v, 101); }},
    };
    for (const auto &[name, run] : suites) {
        const auto a = run(1).to_json().dump(), b = run(1).to_json().dump(), c = run(4).to_json().dump();
        o.check(a == b && a == c, name + " suite differs");
    }
    const auto root = std::filesystem::temp_directory_path() / ("mdd_acceptance_" + std::to_string(::getpid()));
    const std::string data = MDD_DATA_DIR;
    const std::vector<std::string> configs = {
        R"({"kind":"fidelity-sweep","states":5})",
        R"({"kind":"fidelity-sweep","states":5,"exact_expectations":false,"shots":1000})",
        R"({"kind":"filter-noise","states":3,"t_grid":[100,500,1000]})",
        R"({"kind":"qft-toy","qft_qubits":3,"seeds":2,"shots":2000})",
        R"({"kind":"two-qubit-opt","states":4})",
        R"({"kind":"sqd-recover","fcidump":")" + data + R"(/random_8so.fcidump","iterations":3})",
    };
    for (std::size_t k = 0; k < configs.size(); ++k) {
        const auto cfg = parse_experiment_config(nlohmann::json::parse(configs[k]));
        std::string outs[3];
        const unsigned jobs[3] = {1, 1, 4};
        for (int r = 0; r < 3; ++r) {
            const auto dir = root / (std::to_string(k) + "_" + std::to_string(r));
            run_experiment(cfg, dir.string(), jobs[r]);
            outs[r] = read_dir(dir);
        }
        o.check(!outs[0].empty() && outs[0] == outs[1] && outs[0] == outs[2], cfg.kind + " artifacts differ");
    }
    std::filesystem::remove_all(root);
    o.info << " 5 suites and " << configs.size() << " experiments compared across runs and jobs 1/4";
}

}  // namespace

int main(int argc, char **argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance <1..10> [--jobs K]\n";
        return 2;
    }
    const int n = std::atoi(argv[1]);
    if (argc >= 4 && std::string(argv[2]) == "--jobs") g_jobs = static_cast<unsigned>(std::max(1, std::atoi(argv[3])));
    struct Entry {
        double budget_s;
        std::function<void(Outcome &)> run;
    };
    const std::map<int, Entry> table = {
        {1, {1.0, ground_state}},
        {2, {30.0, [](Outcome &o) { report(o, verify_lemma(vopts())); }}},
        {3, {300.0, theorem}},
        {4, {60.0, [](Outcome &o) { report(o, verify_decay(vopts())); }}},
        {5, {60.0, [](Outcome &o) { report(o, verify_bounds(vopts())); }}},
        {6, {120.0, two_qubit}},
        {7, {120.0, filters}},
        {8, {180.0, sqd}},
        {9, {120.0, qft}},
        {10, {600.0, determinism}},
    };
    const auto it = table.find(n);
    if (it == table.end()) {
        std::cerr << "unknown criterion " << argv[1] << "\n";
        return 2;
    }
    Outcome o;
    o.info.precision(10);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        it->second.run(o);
    } catch (const std::exception &e) {
        o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.check(secs <= it->second.budget_s, "runtime budget");
    std::printf("criterion %d %s (%.2fs)%s\n", n, o.pass ? "PASS" : "FAIL", secs, o.info.str().c_str());
    return o.pass ? 0 : 1;
}
