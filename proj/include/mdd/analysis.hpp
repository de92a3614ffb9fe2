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

// Closed-form fidelity functionals for a single noisy qubit and the
// verifiers built on them.
//
// With sigma_U = U sigma U^+ and r_z its z component, the entanglement
// fidelity of the pair (U, U^+) around the combined channel is
//   f(r_z) = alpha (a + b r_z)^2 + beta (b + a r_z)^2 + (p/4)(r^2 - r_z^2),
// a quadratic with f'' = s (s - gamma_p) and f'(0) = 2ab.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mdd/core.hpp"
#include "mdd/dd.hpp"
#include "mdd/noise.hpp"
#include "mdd/parallel.hpp"
#include "mdd/rng.hpp"

namespace mdd {

/// Sum_jk |Tr(M_jk U sigma U^+)|^2.
inline double local_entanglement_fidelity(const DensityMatrix &sigma, const KrausChannel &channel,
                                          const SingleQubitUnitary &u) {
    if (sigma.num_qubits() != 1) {
        throw ArgumentError("local_entanglement_fidelity expects a single-qubit state");
    }
    const Mat2 su = u.matrix() * Mat2(sigma.matrix()) * u.matrix().adjoint();
    double acc = 0.0;
    for (const auto &m : channel.operators()) {
        acc += std::norm((m * su).trace());
    }
    return acc;
}

enum class QuadraticCase { C1, C2, C3 };

inline std::string to_string(QuadraticCase c) {
    switch (c) {
        case QuadraticCase::C1:
            return "C1";
        case QuadraticCase::C2:
            return "C2";
        case QuadraticCase::C3:
            return "C3";
    }
    return "C3";
}

struct QuadraticFidelity {
    ChannelScalars sc;
    double r = 0.0;

    QuadraticFidelity(const ChannelScalars &scalars, double bloch_norm) : sc(scalars), r(bloch_norm) {
        if (!(r >= 0.0 && r <= 1.0 + 1e-12)) {
            throw ArgumentError("Bloch norm must lie in [0, 1]");
        }
    }

    double operator()(double rz) const {
        const double a = sc.a(), b = sc.b();
        return sc.alpha() * (a + b * rz) * (a + b * rz) + sc.beta() * (b + a * rz) * (b + a * rz) +
               0.25 * sc.p() * (r * r - rz * rz);
    }
    double second_derivative() const {
        return sc.s * (sc.s - sc.gamma_p);
    }
    double slope_at_zero() const {
        return 2.0 * sc.a() * sc.b();
    }
    double derivative(double rz) const {
        return slope_at_zero() + second_derivative() * rz;
    }
    /// -2ab / f'', the unconstrained extreme point; empty in the linear case.
    std::optional<double> extreme_point() const {
        const double c = second_derivative();
        if (c == 0.0) {
            return std::nullopt;
        }
        return -slope_at_zero() / c;
    }
};

inline double quadratic_f(double rz, double r, const ChannelScalars &sc) {
    if (std::abs(rz) > r + 1e-12) {
        throw ArgumentError("|r_z| must not exceed r");
    }
    return QuadraticFidelity(sc, r)(rz);
}

inline QuadraticCase classify_case(const ChannelScalars &sc) {
    const double c = sc.s * (sc.s - sc.gamma_p);
    if (c > 0.0) {
        return QuadraticCase::C1;
    }
    if (c < 0.0) {
        return QuadraticCase::C2;
    }
    return QuadraticCase::C3;
}

/// Fidelity of the (U, U^+) pair evaluated by simulating the two-qubit
/// purification of sigma; the independent route for the closed form.
inline double purification_fidelity(const DensityMatrix &sigma, const KrausChannel &channel,
                                    const SingleQubitUnitary &u) {
    const auto psi = purify_qubit(sigma);
    auto rho = apply_unitary(DensityMatrix::from_pure(psi), u, 0);
    rho = apply_local(channel, rho, 0);
    rho = apply_unitary(rho, u.adjoint(), 0);
    return entanglement_fidelity(psi, rho);
}

struct LemmaReport {
    double mdd_value = 0.0;
    double best_competitor = -1.0;
    double margin = 0.0;  // mdd_value - best_competitor
    std::size_t violations = 0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    SingleQubitUnitary best_unitary = SingleQubitUnitary::identity();
};

/// MDD against `trials` Haar-random unitaries for one sigma and window t.
inline LemmaReport lemma_check(const DensityMatrix &sigma, const NoiseParams &params, double t, std::size_t trials,
                               std::uint64_t seed, double tol = 1e-10) {
    if (trials < 1) {
        throw ArgumentError("lemma_check needs at least one trial");
    }
    const auto channel = combined_channel(params, t);
    const auto ud = mdd_unitary(PauliExpectations::exact(sigma));
    LemmaReport rep;
    rep.seed = seed;
    rep.trials = trials;
    rep.mdd_value = local_entanglement_fidelity(sigma, channel, ud);
    Rng rng(seed);
    for (std::size_t k = 0; k < trials; ++k) {
        const auto u = haar_random_single_qubit(rng);
        const double v = local_entanglement_fidelity(sigma, channel, u);
        if (v > rep.best_competitor) {
            rep.best_competitor = v;
            rep.best_unitary = u;
        }
        if (v > rep.mdd_value + tol) {
            ++rep.violations;
        }
    }
    rep.margin = rep.mdd_value - rep.best_competitor;
    return rep;
}

/// (r delta^2 / 4) [(1 - 2r) gamma_1 + 2r (1 - gamma_p sqrt(1 - gamma_1))]
/// with gamma_1 the damping probability.
inline double gate_error_delta(double r, double delta, const ChannelScalars &sc) {
    const double g1 = sc.p();
    return 0.25 * r * delta * delta * ((1.0 - 2.0 * r) * g1 + 2.0 * r * (1.0 - sc.gamma_p * std::sqrt(1.0 - g1)));
}

struct MixedStateBounds {
    double upper = 1.0;
    double lower = 1.0;
};

/// Bounds on the MDD fidelity of a mixed input whose noisy qubit has the
/// diagonalized reduced state sigma_d.
inline MixedStateBounds mixed_state_bounds(const DensityMatrix &sigma_d, const KrausChannel &channel) {
    if (sigma_d.num_qubits() != 1) {
        throw ArgumentError("mixed_state_bounds expects a single-qubit state");
    }
    const Mat2 s = sigma_d.matrix();
    if (std::abs(s(0, 1)) > 1e-12) {
        throw ArgumentError("sigma_d must be diagonal");
    }
    if (s(0, 0).real() < s(1, 1).real() - 1e-12) {
        throw ArgumentError("sigma_d eigenvalues must be in descending order");
    }
    const Mat2 e = channel.apply(s);
    const double det_s = std::max(0.0, s.determinant().real());
    const double det_e = std::max(0.0, e.determinant().real());
    MixedStateBounds b;
    b.upper = (s * e).trace().real() + 2.0 * std::sqrt(det_s * det_e);
    b.lower = 0.0;
    for (const auto &m : channel.operators()) {
        b.lower += std::norm((m * s).trace());
    }
    return b;
}

struct DecayRates {
    double gamma1 = 0.0;   // relaxation, L = |0><1|
    double gamma2 = 0.0;   // dephasing, L = Z
    double gamma_zz = 0.0; // crosstalk, L = Z Z

    DecayRates(double g1 = 0.0, double g2 = 0.0, double gzz = 0.0) : gamma1(g1), gamma2(g2), gamma_zz(gzz) {
        if (!(g1 >= 0.0 && g2 >= 0.0 && gzz >= 0.0)) {
            throw ArgumentError("decay rates must be non-negative");
        }
    }

    /// Rates that reproduce the combined Kraus channel: 1/T1 and 1/(2 Tp).
    static DecayRates from_params(const NoiseParams &p, double gzz = 0.0) {
        return DecayRates(1.0 / p.t1(), 0.5 * p.pure_dephasing_rate(), gzz);
    }
};

/// Single-qubit decay-rate quadratic in r_z,U.
inline double decay_rate_quadratic(double rz, double r, double gamma1, double gamma2) {
    return gamma1 * (0.5 * (1.0 - rz) - 0.25 * (r * r - rz * rz)) + gamma2 * (1.0 - rz * rz);
}

/// |dF_e/dt| at t = 0 for the pair (U, U^+): sum_k G_k Var_{sigma_U}[L_k].
inline double decay_rate(const DensityMatrix &sigma, const SingleQubitUnitary &u, const DecayRates &rates) {
    if (sigma.num_qubits() != 1) {
        throw ArgumentError("decay_rate expects a single-qubit state");
    }
    const Mat2 su = u.matrix() * Mat2(sigma.matrix()) * u.matrix().adjoint();
    const auto b = bloch_vector(DensityMatrix(Matrix(su), DensityMatrix::Trusted{}));
    return decay_rate_quadratic(b.rz, b.r(), rates.gamma1, rates.gamma2);
}

/// Variance route: sum_k G_k (Tr(sigma_U L^+ L) - |Tr(sigma_U L)|^2).
inline double decay_rate_by_variance(const DensityMatrix &sigma, const SingleQubitUnitary &u,
                                     const DecayRates &rates) {
    const Mat2 su = u.matrix() * Mat2(sigma.matrix()) * u.matrix().adjoint();
    auto var = [&](const Mat2 &l) {
        return (su * l.adjoint() * l).trace().real() - std::norm((su * l).trace());
    };
    Mat2 lower = Mat2::Zero();
    lower(0, 1) = 1.0;
    return rates.gamma1 * var(lower) + rates.gamma2 * var(pauli::Z());
}

/// Geometric grid t_max, t_max/ratio, ... (ascending, `points` values).
inline std::vector<double> geometric_grid(double t_max, std::size_t points, double ratio = 2.0) {
    if (!(t_max > 0.0) || points == 0 || !(ratio > 1.0)) {
        throw ArgumentError("invalid geometric grid");
    }
    std::vector<double> out(points);
    double t = t_max;
    for (std::size_t k = points; k-- > 0;) {
        out[k] = t;
        t /= ratio;
    }
    return out;
}

/// Least-squares slope of log|y| against log x, skipping y = 0.
inline double loglog_slope(std::span<const double> x, std::span<const double> y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (y[i] == 0.0) {
            continue;
        }
        const double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        n += 1;
    }
    if (n < 2) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// F_e of the pair (V, V^+) around the free channel of length t on `qubit`.
inline double frame_fidelity(const PureState &psi, const SingleQubitUnitary &v, const NoiseParams &params, double t,
                             int qubit) {
    auto rho = apply_unitary(DensityMatrix::from_pure(psi), v, qubit);
    rho = apply_local(combined_channel(params, t), rho, qubit);
    rho = apply_unitary(rho, v.adjoint(), qubit);
    return entanglement_fidelity(psi, rho);
}

/// First-order toggling-frame average: sum over free windows of
/// (window / t) * F_e(Lambda^t_{U_window}).
inline double first_order_average(const PureState &psi, const PulseSchedule &schedule, const NoiseParams &params,
                                  int qubit) {
    const double t = schedule.total_time();
    if (!(t > 0.0)) {
        return 1.0;
    }
    double acc = 0.0, now = 0.0;
    Mat2 frame = Mat2::Identity();
    auto window = [&](double until) {
        const double w = until - now;
        if (w > 0.0) {
            acc += (w / t) * frame_fidelity(psi, SingleQubitUnitary(frame), params, t, qubit);
        }
        now = until;
    };
    for (const auto &p : schedule.pulses()) {
        window(p.time);
        frame = p.gate.matrix() * frame;
    }
    window(t);
    return acc;
}

struct GapReport {
    std::vector<double> t;
    std::vector<double> mdd;
    std::vector<double> bb;
    std::vector<double> gap;       // mdd - bb
    std::vector<double> residual;  // |bb - first-order average|
    double min_gap = 0.0;
    double negative_slope = std::numeric_limits<double>::quiet_NaN();
    double residual_slope = std::numeric_limits<double>::quiet_NaN();
    std::size_t negative_points = 0;
    bool ok = true;
};

/// Compares MDD with `spec` on qubit `qubit` of psi over `times`. Negative
/// gaps are tolerated when they scale at least like t^(2 - slope_slack).
inline GapReport first_order_gap(const PureState &psi, const SequenceSpec &spec, const NoiseParams &params,
                                 std::span<const double> times, int qubit = 0, double tol = 1e-12,
                                 double slope_slack = 0.2) {
    GapReport rep;
    const int q[1] = {qubit};
    const auto sigma = reduced_density(psi, q);
    const auto exp = PauliExpectations::exact(sigma);
    std::vector<double> neg_t, neg_gap;
    rep.min_gap = std::numeric_limits<double>::infinity();
    for (double t : times) {
        if (!(t > 0.0)) {
            throw ArgumentError("time grid must be positive");
        }
        const auto mdd_s = build_schedule(SequenceSpec{SequenceKind::MDD, 0}, t, exp);
        const auto bb_s = build_schedule(spec, t, exp);
        const double fm = entanglement_fidelity(psi, evolve_with_schedule(psi, mdd_s, params, qubit));
        const double fb = entanglement_fidelity(psi, evolve_with_schedule(psi, bb_s, params, qubit));
        rep.t.push_back(t);
        rep.mdd.push_back(fm);
        rep.bb.push_back(fb);
        rep.gap.push_back(fm - fb);
        rep.residual.push_back(std::abs(fb - first_order_average(psi, bb_s, params, qubit)));
        rep.min_gap = std::min(rep.min_gap, fm - fb);
        if (fm - fb < -tol) {
            neg_t.push_back(t);
            neg_gap.push_back(fm - fb);
        }
    }
    rep.negative_points = neg_t.size();
    rep.residual_slope = loglog_slope(rep.t, rep.residual);
    if (neg_t.size() >= 2) {
        for (auto &g : neg_gap) {
            g = -g;
        }
        rep.negative_slope = loglog_slope(neg_t, neg_gap);
        rep.ok = rep.negative_slope >= 2.0 - slope_slack;
    } else {
        rep.ok = neg_t.empty();
    }
    return rep;
}

struct MultiSubsystemReport {
    std::vector<double> t;
    std::vector<double> mdd;
    std::vector<double> bb;
    double min_gap = 0.0;
    double negative_slope = std::numeric_limits<double>::quiet_NaN();
    bool ok = true;
};

/// Per-qubit MDD against a per-qubit bang-bang assignment, all listed qubits
/// idling for the same window t with independent local channels.
inline MultiSubsystemReport multi_subsystem_bound_check(const PureState &psi, std::span<const int> qubits,
                                                        std::span<const SequenceSpec> sequences,
                                                        const NoiseParams &params, std::span<const double> times,
                                                        double tol = 1e-12, double slope_slack = 0.2) {
    detail::check_qubits(psi.num_qubits(), qubits);
    if (sequences.size() != qubits.size()) {
        throw ArgumentError("one sequence per noisy qubit is required");
    }
    std::vector<PauliExpectations> exps;
    for (int q : qubits) {
        const int k[1] = {q};
        exps.push_back(PauliExpectations::exact(reduced_density(psi, k)));
    }
    MultiSubsystemReport rep;
    rep.min_gap = std::numeric_limits<double>::infinity();
    std::vector<double> neg_t, neg_gap;
    for (double t : times) {
        auto rm = DensityMatrix::from_pure(psi);
        auto rb = rm;
        for (std::size_t j = 0; j < qubits.size(); ++j) {
            rm = evolve_with_schedule(rm, build_schedule(SequenceSpec{SequenceKind::MDD, 0}, t, exps[j]), params,
                                      qubits[j]);
            rb = evolve_with_schedule(rb, build_schedule(sequences[j], t, exps[j]), params, qubits[j]);
        }
        const double fm = entanglement_fidelity(psi, rm), fb = entanglement_fidelity(psi, rb);
        rep.t.push_back(t);
        rep.mdd.push_back(fm);
        rep.bb.push_back(fb);
        rep.min_gap = std::min(rep.min_gap, fm - fb);
        if (fm - fb < -tol) {
            neg_t.push_back(t);
            neg_gap.push_back(fm - fb);
        }
    }
    if (neg_t.size() >= 2) {
        for (auto &g : neg_gap) {
            g = -g;
        }
        rep.negative_slope = loglog_slope(neg_t, neg_gap);
        rep.ok = rep.negative_slope >= 2.0 - slope_slack;
    } else {
        rep.ok = neg_t.empty();
    }
    return rep;
}

}  // namespace mdd
