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

// Pulse schedules for dynamical decoupling and the stroboscopic evolution
// engine. Pulses are ideal and instantaneous.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mdd/core.hpp"
#include "mdd/filter.hpp"
#include "mdd/noise.hpp"
#include "mdd/rng.hpp"

namespace mdd {

/// Measured (or exact) single-qubit Pauli expectations.
struct PauliExpectations {
    double ex = 0.0;
    double ey = 0.0;
    double ez = 0.0;
    std::optional<std::uint64_t> shots;  // empty means exact

    double r() const {
        return std::sqrt(ex * ex + ey * ey + ez * ez);
    }

    static PauliExpectations exact(const DensityMatrix &rho) {
        const auto b = bloch_vector(rho);
        return PauliExpectations{b.rx, b.ry, b.rz, std::nullopt};
    }

    /// Binomial sampling of each Pauli observable with `shots` repetitions.
    static PauliExpectations sampled(const DensityMatrix &rho, std::uint64_t shots, Rng &rng) {
        if (shots == 0) {
            throw ArgumentError("shot count must be positive");
        }
        const auto b = bloch_vector(rho);
        auto draw = [&](double e) {
            const double p = std::clamp(0.5 * (1.0 + e), 0.0, 1.0);
            const auto k = binomial(rng, shots, p);
            return 2.0 * static_cast<double>(k) / static_cast<double>(shots) - 1.0;
        };
        const double x = draw(b.rx);
        const double y = draw(b.ry);
        const double z = draw(b.rz);
        return PauliExpectations{x, y, z, shots};
    }
};

/// U_d = R_y(-theta_d) R_z(-phi_d) rotating the Bloch vector onto +z, so that
/// U_d sigma U_d^+ = diag(l1, l2) with l1 >= l2. Identity for r = 0.
inline SingleQubitUnitary mdd_unitary(const PauliExpectations &e) {
    double r = e.r();
    if (r < 1e-15) {
        return SingleQubitUnitary(pauli::I(), SingleQubitUnitary::Angles{0.0, 0.0});
    }
    const double theta = std::acos(std::clamp(e.ez / r, -1.0, 1.0));
    // On the z axis the azimuth is undefined; phi = 0 keeps U_d = I there.
    const double phi = std::hypot(e.ex, e.ey) <= 1e-12 * r ? 0.0 : std::atan2(e.ey, e.ex);
    const Mat2 m = SingleQubitUnitary::ry(-theta).matrix() * SingleQubitUnitary::rz(-phi).matrix();
    return SingleQubitUnitary(m, SingleQubitUnitary::Angles{theta, phi});
}

enum class SequenceKind { None, MDD, XX, XY4, UDD, QDD, MDDplusXX };

/// A sequence name: kind plus the order for UDD/QDD.
struct SequenceSpec {
    SequenceKind kind = SequenceKind::None;
    int order = 0;

    bool needs_expectations() const {
        return kind == SequenceKind::MDD || kind == SequenceKind::MDDplusXX;
    }

    std::string name() const {
        switch (kind) {
            case SequenceKind::None:
                return "none";
            case SequenceKind::MDD:
                return "mdd";
            case SequenceKind::XX:
                return "xx";
            case SequenceKind::XY4:
                return "xy4";
            case SequenceKind::UDD:
                return "udd" + std::to_string(order);
            case SequenceKind::QDD:
                return "qdd" + std::to_string(order);
            case SequenceKind::MDDplusXX:
                return "mdd+xx";
        }
        return "none";
    }

    /// Parses `none|mdd|xx|xy4|udd<n>|qdd<n>|mdd+xx`.
    static SequenceSpec parse(const std::string &s) {
        if (s == "none") return {SequenceKind::None, 0};
        if (s == "mdd") return {SequenceKind::MDD, 0};
        if (s == "xx") return {SequenceKind::XX, 0};
        if (s == "xy4") return {SequenceKind::XY4, 0};
        if (s == "mdd+xx") return {SequenceKind::MDDplusXX, 0};
        for (auto [prefix, kind] : {std::pair{"udd", SequenceKind::UDD}, std::pair{"qdd", SequenceKind::QDD}}) {
            const std::string p(prefix);
            if (s.size() > p.size() && s.compare(0, p.size(), p) == 0) {
                const std::string digits = s.substr(p.size());
                if (digits.size() > 3 || !std::all_of(digits.begin(), digits.end(), [](char c) {
                        return c >= '0' && c <= '9';
                    })) {
                    break;
                }
                const int n = std::stoi(digits);
                if (n < 1 || (kind == SequenceKind::QDD && n % 2 != 0)) {
                    throw ArgumentError("invalid sequence order in '" + s + "'");
                }
                return {kind, n};
            }
        }
        throw ArgumentError("unknown sequence kind '" + s + "'");
    }
};

struct Pulse {
    double time = 0.0;
    SingleQubitUnitary gate = SingleQubitUnitary::identity();
};

class PulseSchedule {
   public:
    PulseSchedule(double total_time, std::vector<Pulse> pulses, SequenceSpec spec = {})
        : t_(total_time), pulses_(std::move(pulses)), spec_(spec) {
        if (!(t_ >= 0.0)) {
            throw ArgumentError("schedule duration must be non-negative");
        }
        for (std::size_t i = 0; i < pulses_.size(); ++i) {
            if (!(pulses_[i].time >= 0.0 && pulses_[i].time <= t_)) {
                throw ArgumentError("pulse time outside [0, t]");
            }
            if (i > 0 && pulses_[i].time < pulses_[i - 1].time) {
                throw ArgumentError("pulse times must be non-decreasing");
            }
        }
    }

    double total_time() const {
        return t_;
    }
    const std::vector<Pulse> &pulses() const {
        return pulses_;
    }
    const SequenceSpec &spec() const {
        return spec_;
    }

    /// Times of pulses strictly inside (0, t), i.e. the ones the filter function sees.
    std::vector<double> interior_times() const {
        std::vector<double> out;
        for (const auto &p : pulses_) {
            if (p.time > 0.0 && p.time < t_) {
                out.push_back(p.time);
            }
        }
        return out;
    }

    /// Product of all pulses, last pulse leftmost.
    SingleQubitUnitary net_unitary() const {
        Mat2 m = Mat2::Identity();
        for (const auto &p : pulses_) {
            m = p.gate.matrix() * m;
        }
        return SingleQubitUnitary(m);
    }

   private:
    double t_;
    std::vector<Pulse> pulses_;
    SequenceSpec spec_;
};

inline std::vector<double> udd_times(int n, double t) {
    if (n < 1) {
        throw ArgumentError("UDD needs at least one pulse");
    }
    if (!(t > 0.0)) {
        throw ArgumentError("UDD needs t > 0");
    }
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int a = 1; a <= n; ++a) {
        const double s = std::sin(a * kPi / (2.0 * n + 2.0));
        out.push_back(t * s * s);
    }
    return out;
}

enum class PulseAxis { X, Y };

/// Outer Y pulses at the UDD-n times; n inner X pulses nested with UDD-n
/// spacing in each of the n + 1 gaps, boundary gaps included.
inline std::vector<std::pair<double, PulseAxis>> qdd_times(int n, double t) {
    if (n < 2 || n % 2 != 0) {
        throw ArgumentError("QDD order must be even and at least 2");
    }
    if (!(t > 0.0)) {
        throw ArgumentError("QDD needs t > 0");
    }
    std::vector<double> outer = udd_times(n, t);
    std::vector<double> edges{0.0};
    edges.insert(edges.end(), outer.begin(), outer.end());
    edges.push_back(t);
    std::vector<std::pair<double, PulseAxis>> out;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double lo = edges[i], span = edges[i + 1] - edges[i];
        for (int j = 1; j <= n; ++j) {
            const double s = std::sin(j * kPi / (2.0 * n + 2.0));
            out.emplace_back(lo + span * s * s, PulseAxis::X);
        }
        if (i + 1 < edges.size() - 1) {
            out.emplace_back(edges[i + 1], PulseAxis::Y);
        }
    }
    return out;
}

inline PulseSchedule build_schedule(const SequenceSpec &spec, double t,
                                    const std::optional<PauliExpectations> &exp = std::nullopt) {
    if (!(t >= 0.0)) {
        throw ArgumentError("idle time must be non-negative");
    }
    if (spec.needs_expectations() && !exp) {
        throw ArgumentError("MDD sequences require Pauli expectations");
    }
    const auto X = SingleQubitUnitary::x();
    const auto Y = SingleQubitUnitary::y();
    std::vector<Pulse> p;
    switch (spec.kind) {
        case SequenceKind::None:
            break;
        case SequenceKind::MDD: {
            const auto ud = mdd_unitary(*exp);
            p = {{0.0, ud}, {t, ud.adjoint()}};
            break;
        }
        case SequenceKind::XX:
            p = {{0.25 * t, X}, {0.75 * t, X}};
            break;
        case SequenceKind::XY4:
            p = {{0.0, Y}, {0.25 * t, X}, {0.5 * t, Y}, {0.75 * t, X}};
            break;
        case SequenceKind::UDD:
            if (t > 0.0) {
                for (double tau : udd_times(spec.order, t)) p.push_back({tau, Y});
            }
            break;
        case SequenceKind::QDD:
            if (t > 0.0) {
                for (auto [tau, axis] : qdd_times(spec.order, t)) p.push_back({tau, axis == PulseAxis::X ? X : Y});
            }
            break;
        case SequenceKind::MDDplusXX: {
            const auto ud = mdd_unitary(*exp);
            p = {{0.0, ud}, {0.25 * t, X}, {0.75 * t, X}, {t, ud.adjoint()}};
            break;
        }
    }
    return PulseSchedule(t, std::move(p), spec);
}

/// Cumulative frames U_a = g_a ... g_1, one per pulse.
inline std::vector<SingleQubitUnitary> toggling_frames(const PulseSchedule &schedule) {
    std::vector<SingleQubitUnitary> out;
    Mat2 m = Mat2::Identity();
    for (const auto &p : schedule.pulses()) {
        m = p.gate.matrix() * m;
        out.emplace_back(m);
    }
    return out;
}

/// Free evolution under `channel_for(gap)` between pulses, pulses as
/// instantaneous conjugations on `qubit`.
template <class ChannelFor>
DensityMatrix evolve_stroboscopic(const DensityMatrix &state, const PulseSchedule &schedule, int qubit,
                                  ChannelFor &&channel_for) {
    DensityMatrix rho = state;
    double now = 0.0;
    auto advance = [&](double until) {
        const double gap = until - now;
        if (gap > 0.0) {
            rho = apply_local(channel_for(gap), rho, qubit);
        }
        now = until;
    };
    for (const auto &p : schedule.pulses()) {
        advance(p.time);
        rho = apply_unitary(rho, p.gate, qubit);
    }
    advance(schedule.total_time());
    return rho;
}

inline DensityMatrix evolve_with_schedule(const DensityMatrix &state, const PulseSchedule &schedule,
                                          const NoiseParams &params, int qubit) {
    const int q[1] = {qubit};
    detail::check_qubits(state.num_qubits(), q);
    return evolve_stroboscopic(state, schedule, qubit, [&](double gap) { return combined_channel(params, gap); });
}

inline DensityMatrix evolve_with_schedule(const PureState &state, const PulseSchedule &schedule,
                                          const NoiseParams &params, int qubit) {
    return evolve_with_schedule(DensityMatrix::from_pure(state), schedule, params, qubit);
}

/// Amplitude damping (T1) between pulses plus classical random dephasing with
/// the given spectrum. The dephasing enters as a phase-damping channel with
/// factor exp(-chi), chi from the interior pi-pulse times, applied in the
/// frame just before the pulses at t (for closed echo sequences that frame
/// is the lab frame, for MDD it is the U_d frame).
inline DensityMatrix evolve_with_random_dephasing(const DensityMatrix &state, const PulseSchedule &schedule,
                                                  double t1, const SpectralDensity &spectrum, int qubit) {
    const int q[1] = {qubit};
    detail::check_qubits(state.num_qubits(), q);
    const double t = schedule.total_time();
    DensityMatrix rho = state;
    if (!(t > 0.0)) {
        for (const auto &p : schedule.pulses()) rho = apply_unitary(rho, p.gate, qubit);
        return rho;
    }
    const auto interior = schedule.interior_times();
    const double chi = chi_integral(spectrum, interior, t);
    double now = 0.0;
    auto advance = [&](double until) {
        if (until - now > 0.0) {
            rho = apply_local(amplitude_damping_channel(t1, until - now), rho, qubit);
        }
        now = until;
    };
    const auto &pulses = schedule.pulses();
    std::size_t k = 0;
    for (; k < pulses.size() && pulses[k].time < t; ++k) {
        advance(pulses[k].time);
        rho = apply_unitary(rho, pulses[k].gate, qubit);
    }
    advance(t);
    rho = apply_local(dephasing_channel_from_chi(chi), rho, qubit);
    for (; k < pulses.size(); ++k) {
        rho = apply_unitary(rho, pulses[k].gate, qubit);
    }
    return rho;
}

/// Entanglement fidelity of `psi` after an idle window of length t on `qubit`
/// under `spec`; MDD variants use exact expectations of the pre-interval state.
inline double idle_fidelity(const PureState &psi, const SequenceSpec &spec, double t, const NoiseParams &params,
                            int qubit = 0) {
    std::optional<PauliExpectations> e;
    if (spec.needs_expectations()) {
        const int q[1] = {qubit};
        e = PauliExpectations::exact(reduced_density(psi, q));
    }
    const auto sched = build_schedule(spec, t, e);
    return entanglement_fidelity(psi, evolve_with_schedule(psi, sched, params, qubit));
}

}  // namespace mdd
