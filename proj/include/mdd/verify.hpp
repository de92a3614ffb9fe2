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

// Seeded verifier suites. Every trial draws from its own derived stream, so
// reports are identical for any worker count.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"
#include "mdd/analysis.hpp"
#include "mdd/crosstalk.hpp"
#include "mdd/parallel.hpp"

namespace mdd {

struct VerifierReport {
    std::string claim;
    bool passed = true;
    double margin = 0.0;
    nlohmann::json worst_case;
    std::uint64_t seed = 0;
    nlohmann::json details = nlohmann::json::object();

    nlohmann::json to_json() const {
        return {{"claim", claim},  {"passed", passed}, {"margin", margin},
                {"worst_case", worst_case}, {"seed", seed}, {"details", details}};
    }
};

struct VerifierOptions {
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    NoiseParams noise{};
    std::size_t samples = 0;  // 0 selects the suite default
    std::size_t trials = 0;
};

namespace detail {

inline nlohmann::json bloch_json(const DensityMatrix &rho) {
    const auto b = bloch_vector(rho);
    return nlohmann::json::array({b.rx, b.ry, b.rz});
}

}  // namespace detail

/// MDD beats Haar-random conjugate pairs on random mixed qubits, each embedded
/// in a two-qubit purification; closed form checked against the purification.
inline VerifierReport verify_lemma(const VerifierOptions &opt = {}) {
    const std::size_t states = opt.samples ? opt.samples : 20;
    const std::size_t trials = opt.trials ? opt.trials : 10000;
    struct Item {
        double margin, closed_err, t;
        std::size_t violations;
        nlohmann::json bloch;
    };
    const auto items = parallel_map(states, opt.jobs, [&](std::size_t i) {
        auto rng = make_rng(opt.seed, {0x1E33AULL, i});
        const auto sigma = random_mixed_qubit(rng);
        const double t = 10.0 + 990.0 * uniform01(rng);
        const auto ch = combined_channel(opt.noise, t);
        const auto ud = mdd_unitary(PauliExpectations::exact(sigma));
        const double f_mdd = purification_fidelity(sigma, ch, ud);
        double err = std::abs(f_mdd - local_entanglement_fidelity(sigma, ch, ud));
        double best = -1.0;
        std::size_t violations = 0;
        for (std::size_t k = 0; k < trials; ++k) {
            const auto u = haar_random_single_qubit(rng);
            const double f = purification_fidelity(sigma, ch, u);
            err = std::max(err, std::abs(f - local_entanglement_fidelity(sigma, ch, u)));
            best = std::max(best, f);
            if (f > f_mdd + 1e-10) ++violations;
        }
        return Item{f_mdd - best, err, t, violations, detail::bloch_json(sigma)};
    });
    VerifierReport rep{"lemma", true, std::numeric_limits<double>::infinity(), nullptr, opt.seed, {}};
    std::size_t violations = 0;
    double closed = 0.0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        violations += items[i].violations;
        closed = std::max(closed, items[i].closed_err);
        if (items[i].margin < rep.margin) {
            rep.margin = items[i].margin;
            rep.worst_case = {{"state", i}, {"bloch", items[i].bloch}, {"t", items[i].t}};
        }
    }
    rep.details = {{"states", states}, {"trials_per_state", trials}, {"violations", violations},
                   {"closed_form_max_error", closed}};
    rep.passed = violations == 0 && closed <= 1e-10;
    return rep;
}

struct TheoremOptions {
    int num_qubits = 4;
    int noisy_qubit = 0;
    std::vector<std::string> sequences = {"xx", "xy4", "udd8", "qdd2"};
    double t_max = 1000.0;
    int points = 8;
};

/// MDD against bang-bang sequences on a geometric time grid; negative gaps
/// must shrink at least like t^1.8. Also records the ordering of the mean curves.
inline VerifierReport verify_theorem(const VerifierOptions &opt = {}, const TheoremOptions &th = {}) {
    const std::size_t states = opt.samples ? opt.samples : 20;
    const auto times = geometric_grid(th.t_max, th.points);
    std::vector<SequenceSpec> specs;
    for (const auto &s : th.sequences) specs.push_back(SequenceSpec::parse(s));
    struct Item {
        std::vector<GapReport> gaps;
        std::vector<double> none;
    };
    const auto items = parallel_map(states, opt.jobs, [&](std::size_t i) {
        const auto psi = haar_random_state(th.num_qubits, derive_seed(opt.seed, {0x7E0ULL, i}));
        Item it;
        for (const auto &sp : specs) it.gaps.push_back(first_order_gap(psi, sp, opt.noise, times, th.noisy_qubit));
        for (double t : times) it.none.push_back(idle_fidelity(psi, SequenceSpec{}, t, opt.noise, th.noisy_qubit));
        return it;
    });
    VerifierReport rep{"theorem", true, std::numeric_limits<double>::infinity(), nullptr, opt.seed, {}};
    std::size_t negatives = 0;
    std::vector<double> mean_mdd(times.size(), 0.0), mean_none(times.size(), 0.0);
    std::vector<std::vector<double>> mean_bb(specs.size(), std::vector<double>(times.size(), 0.0));
    auto failures = nlohmann::json::array();
    for (std::size_t i = 0; i < items.size(); ++i) {
        for (std::size_t s = 0; s < specs.size(); ++s) {
            const auto &g = items[i].gaps[s];
            negatives += g.negative_points;
            if (!g.ok) {
                rep.passed = false;
                failures.push_back({{"state", i}, {"sequence", specs[s].name()}, {"negative_slope", g.negative_slope}});
            }
            for (std::size_t k = 0; k < times.size(); ++k) {
                if (g.gap[k] < rep.margin) {
                    rep.margin = g.gap[k];
                    rep.worst_case = {{"state", i}, {"sequence", specs[s].name()}, {"t", times[k]}};
                }
                mean_bb[s][k] += g.bb[k] / static_cast<double>(states);
                if (s == 0) mean_mdd[k] += g.mdd[k] / static_cast<double>(states);
            }
        }
        for (std::size_t k = 0; k < times.size(); ++k) mean_none[k] += items[i].none[k] / static_cast<double>(states);
    }
    bool mdd_top = true, none_bottom = true;
    double none_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < times.size(); ++k) {
        for (std::size_t s = 0; s < specs.size(); ++s) {
            mdd_top = mdd_top && mean_mdd[k] >= mean_bb[s][k];
            mdd_top = mdd_top && mean_mdd[k] >= mean_none[k];
            none_bottom = none_bottom && mean_none[k] <= mean_bb[s][k];
            none_excess = std::max(none_excess, mean_none[k] - mean_bb[s][k]);
        }
    }
    rep.details = {{"states", states},
                   {"times", times},
                   {"negative_points", negatives},
                   {"failures", failures},
                   {"mean_mdd_uppermost", mdd_top},
                   {"mean_none_lowest", none_bottom},
                   {"max_none_excess_over_sequence_mean", none_excess}};
    return rep;
}

/// Variance formula against a finite-difference derivative, and minimality of
/// the rate at U_d over Haar samples.
inline VerifierReport verify_decay(const VerifierOptions &opt = {}) {
    const std::size_t states = opt.samples ? opt.samples : 100;
    const std::size_t trials = opt.trials ? opt.trials : 10000;
    const auto rates = DecayRates::from_params(opt.noise);
    struct Item {
        double rel_err, min_margin;
        nlohmann::json bloch;
    };
    const auto items = parallel_map(states, opt.jobs, [&](std::size_t i) {
        auto rng = make_rng(opt.seed, {0xDECA1ULL, i});
        const auto sigma = random_mixed_qubit(rng);
        const auto u = haar_random_single_qubit(rng);
        const double rate = decay_rate(sigma, u, rates);
        auto F = [&](double t) { return local_entanglement_fidelity(sigma, combined_channel(opt.noise, t), u); };
        // Richardson-extrapolated one-sided differences.
        auto d = [&](double h) { return -(-3.0 * F(0.0) + 4.0 * F(h) - F(2.0 * h)) / (2.0 * h); };
        const double h = 1e-2;
        const double fd = (4.0 * d(h / 2.0) - d(h)) / 3.0;
        const double rel = std::abs(fd - rate) / std::max(rate, 1e-300);
        const double at_ud = decay_rate(sigma, mdd_unitary(PauliExpectations::exact(sigma)), rates);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < trials; ++k) best = std::min(best, decay_rate(sigma, haar_random_single_qubit(rng), rates));
        return Item{rel, best - at_ud, detail::bloch_json(sigma)};
    });
    VerifierReport rep{"decay", true, std::numeric_limits<double>::infinity(), nullptr, opt.seed, {}};
    double worst_rel = 0.0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        worst_rel = std::max(worst_rel, items[i].rel_err);
        if (items[i].min_margin < rep.margin) {
            rep.margin = items[i].min_margin;
            rep.worst_case = {{"state", i}, {"bloch", items[i].bloch}};
        }
    }
    rep.passed = worst_rel <= 1e-6 && rep.margin >= -1e-12;
    rep.details = {{"states", states}, {"haar_trials", trials}, {"max_relative_fd_error", worst_rel}};
    return rep;
}

/// Uhlmann fidelity of a mixed two-qubit input under MDD on one qubit lies
/// between the bounds; maximally mixed closed forms match.
inline VerifierReport verify_bounds(const VerifierOptions &opt = {}) {
    const std::size_t trials = opt.samples ? opt.samples : 100;
    struct Item {
        double lo_gap, hi_gap, t;
    };
    const auto items = parallel_map(trials, opt.jobs, [&](std::size_t i) {
        auto rng = make_rng(opt.seed, {0xB0DULL, i});
        const auto phi = haar_random_state(4, rng);
        const int sys[2] = {0, 1};
        const auto rho_s = reduced_density(phi, sys);
        const int q[1] = {0};
        const auto sigma = reduced_density(rho_s, q);
        const auto ud = mdd_unitary(PauliExpectations::exact(sigma));
        const double t = 10.0 + 990.0 * uniform01(rng);
        const auto ch = combined_channel(opt.noise, t);
        auto out = apply_unitary(rho_s, ud, 0);
        out = apply_local(ch, out, 0);
        out = apply_unitary(out, ud.adjoint(), 0);
        const double middle = fidelity(rho_s, out);
        const Mat2 d = ud.matrix() * Mat2(sigma.matrix()) * ud.matrix().adjoint();
        Mat2 diag = Mat2::Zero();
        diag(0, 0) = d(0, 0).real();
        diag(1, 1) = d(1, 1).real();
        const auto b = mixed_state_bounds(DensityMatrix(Matrix(diag), DensityMatrix::Trusted{}), ch);
        return Item{middle - b.lower, b.upper - middle, t};
    });
    VerifierReport rep{"bounds", true, std::numeric_limits<double>::infinity(), nullptr, opt.seed, {}};
    for (std::size_t i = 0; i < items.size(); ++i) {
        const double m = std::min(items[i].lo_gap, items[i].hi_gap);
        if (m < rep.margin) {
            rep.margin = m;
            rep.worst_case = {{"trial", i}, {"t", items[i].t}};
        }
    }
    double closed = 0.0;
    for (double t : {1.0, 10.0, 100.0, 250.0, 1000.0, 5000.0}) {
        const auto ch = combined_channel(opt.noise, t);
        const auto sc = ch.require_scalars();
        const double p = sc.p();
        const auto b = mixed_state_bounds(DensityMatrix::maximally_mixed(1), ch);
        closed = std::max(closed, std::abs(b.upper - (1.0 + std::sqrt(1.0 - p * p)) / 2.0));
        closed = std::max(closed, std::abs(b.lower - (2.0 - p + 2.0 * sc.gamma_p * std::sqrt(1.0 - p)) / 4.0));
    }
    rep.passed = rep.margin >= -1e-10 && closed <= 1e-12;
    rep.details = {{"trials", trials}, {"maximally_mixed_closed_form_error", closed}};
    return rep;
}

struct TwoQubitInstance {
    double ri = 0.0, rj = 0.0;
    TwoQubitRates rates;
};

inline TwoQubitInstance random_two_qubit_instance(std::uint64_t seed, std::size_t i) {
    auto rng = make_rng(seed, {0x2C0BULL, i});
    const double g1i = 0.01 * uniform01(rng), g2i = 0.01 * uniform01(rng);
    const double g1j = 0.01 * uniform01(rng), g2j = 0.01 * uniform01(rng);
    const double gzz = 0.01 * uniform01(rng);
    const double ri = 0.05 + 0.9 * uniform01(rng), rj = 0.05 + 0.9 * uniform01(rng);
    return TwoQubitInstance{ri, rj, TwoQubitRates(DecayRates(g1i, g2i), DecayRates(g1j, g2j), gzz)};
}

/// Production optimizer against the dense grid on random mixed instances.
inline VerifierReport verify_two_qubit(const VerifierOptions &opt = {}, int grid_points = 201) {
    const std::size_t n = opt.samples ? opt.samples : 20;
    struct Item {
        TwoQubitOptimum opt, grid;
        TwoQubitInstance inst;
    };
    const auto items = parallel_map(n, opt.jobs, [&](std::size_t i) {
        const auto inst = random_two_qubit_instance(opt.seed, i);
        return Item{optimize_two_qubit_mdd(inst.ri, inst.rj, inst.rates, derive_seed(opt.seed, {i})),
                    two_qubit_grid_oracle(inst.ri, inst.rj, inst.rates, grid_points), inst};
    });
    VerifierReport rep{"two-qubit", true, std::numeric_limits<double>::infinity(), nullptr, opt.seed, {}};
    auto rows = nlohmann::json::array();
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto &it = items[i];
        const double m = it.grid.rate - it.opt.rate;
        rows.push_back({{"r_i", it.inst.ri}, {"r_j", it.inst.rj},
                        {"c", {it.opt.c.c1, it.opt.c.c2, it.opt.c.c3}}, {"rate", it.opt.rate},
                        {"grid_rate", it.grid.rate}, {"method", it.opt.method}, {"feasible", it.opt.c.feasible()}});
        if (m < rep.margin) {
            rep.margin = m;
            rep.worst_case = {{"instance", i}};
        }
        rep.passed = rep.passed && it.opt.c.feasible() && it.opt.rate <= it.grid.rate + 1e-9;
    }
    rep.details = {{"instances", rows}, {"grid_points", grid_points}};
    return rep;
}

}  // namespace mdd
