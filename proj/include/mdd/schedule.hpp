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

// Time-sliced toy circuits with explicit idle windows, DD insertion passes,
// noisy density-matrix simulation and the QFT success-probability scenario.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "mdd/core.hpp"
#include "mdd/dd.hpp"
#include "mdd/noise.hpp"
#include "mdd/rng.hpp"

namespace mdd {

inline constexpr double kDefaultIdleThreshold = 0.24;  // µs

/// A gate acting on `qubits`; `name` is h, x, y, cp or custom.
struct Gate {
    std::string name;
    std::vector<int> qubits;
    Matrix matrix;
    double lambda = 0.0;

    static Gate h(int q) {
        Matrix m(2, 2);
        m << 1.0, 1.0, 1.0, -1.0;
        return Gate{"h", {q}, m / std::sqrt(2.0), 0.0};
    }
    static Gate x(int q) {
        return Gate{"x", {q}, pauli::X(), 0.0};
    }
    static Gate y(int q) {
        return Gate{"y", {q}, pauli::Y(), 0.0};
    }
    static Gate cp(int control, int target, double lambda) {
        Matrix m = Matrix::Identity(4, 4);
        m(3, 3) = std::polar(1.0, lambda);
        return Gate{"cp", {control, target}, m, lambda};
    }
    static Gate custom(const Matrix &m, std::vector<int> qubits) {
        const auto dim = Eigen::Index{1} << qubits.size();
        if (m.rows() != dim || m.cols() != dim) {
            throw ArgumentError("custom gate size does not match its qubits");
        }
        if ((m.adjoint() * m - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() > 1e-10) {
            throw ArgumentError("custom gate is not unitary");
        }
        return Gate{"custom", std::move(qubits), m, 0.0};
    }
};

struct Slice {
    double duration = 0.0;
    std::vector<Gate> gates;
};

/// Zero-duration single-qubit gate at an absolute time (DD pulses).
struct TimedPulse {
    double time = 0.0;
    int qubit = 0;
    SingleQubitUnitary gate = SingleQubitUnitary::identity();
    std::string label;
};

struct IdleInterval {
    int qubit = 0;
    double start = 0.0;
    double duration = 0.0;
    std::size_t first_slice = 0;
    std::size_t last_slice = 0;
};

class ScheduledCircuit {
   public:
    explicit ScheduledCircuit(int num_qubits) : n_(num_qubits) {
        if (num_qubits < 1 || num_qubits > kMaxMixedQubits) {
            throw ArgumentError("scheduled circuits support 1 to 10 qubits");
        }
    }

    int num_qubits() const {
        return n_;
    }
    const std::vector<Slice> &slices() const {
        return slices_;
    }
    const std::vector<TimedPulse> &pulses() const {
        return pulses_;
    }

    void add_slice(Slice s) {
        if (!(s.duration > 0.0) || !std::isfinite(s.duration)) {
            throw ArgumentError("slice duration must be positive");
        }
        std::set<int> used;
        for (const auto &g : s.gates) {
            detail::check_qubits(n_, g.qubits);
            if (g.matrix.rows() != (Eigen::Index{1} << g.qubits.size())) {
                throw ArgumentError("gate matrix does not match its qubits");
            }
            for (int q : g.qubits) {
                if (!used.insert(q).second) {
                    throw ArgumentError("gates within a slice must act on disjoint qubits");
                }
            }
        }
        slices_.push_back(std::move(s));
    }

    /// Inserts a pulse after any existing pulses with the same time.
    void add_pulse(TimedPulse p) {
        const int q[1] = {p.qubit};
        detail::check_qubits(n_, q);
        if (!(p.time >= 0.0 && p.time <= total_duration() + 1e-9 * std::max(1.0, total_duration()))) {
            throw ArgumentError("pulse time outside the circuit");
        }
        auto it = std::upper_bound(pulses_.begin(), pulses_.end(), p.time,
                                   [](double t, const TimedPulse &x) { return t < x.time; });
        pulses_.insert(it, std::move(p));
    }

    double total_duration() const {
        double t = 0.0;
        for (const auto &s : slices_) t += s.duration;
        return t;
    }

    std::vector<double> slice_starts() const {
        std::vector<double> out;
        double t = 0.0;
        for (const auto &s : slices_) {
            out.push_back(t);
            t += s.duration;
        }
        return out;
    }

    /// Ideal unitary of the gate content (pulses included), qubit 0 most significant.
    Matrix unitary() const {
        const Eigen::Index d = Eigen::Index{1} << n_;
        Matrix u = Matrix::Identity(d, d);
        std::size_t k = 0;
        double end = 0.0;
        for (const auto &s : slices_) {
            for (const auto &g : s.gates) apply_left(u, g.matrix, g.qubits, n_);
            end += s.duration;
            for (; k < pulses_.size() && pulses_[k].time <= end; ++k) {
                const int q[1] = {pulses_[k].qubit};
                apply_left(u, pulses_[k].gate.matrix(), q, n_);
            }
        }
        for (; k < pulses_.size(); ++k) {
            const int q[1] = {pulses_[k].qubit};
            apply_left(u, pulses_[k].gate.matrix(), q, n_);
        }
        return u;
    }

   private:
    int n_;
    std::vector<Slice> slices_;
    std::vector<TimedPulse> pulses_;
};

/// Maximal gate-free runs per qubit longer than `threshold`, sorted by start.
inline std::vector<IdleInterval> identify_idle(const ScheduledCircuit &circuit,
                                               double threshold = kDefaultIdleThreshold) {
    if (!(threshold >= 0.0)) {
        throw ArgumentError("idle threshold must be non-negative");
    }
    const auto &slices = circuit.slices();
    const auto starts = circuit.slice_starts();
    std::vector<IdleInterval> out;
    for (int q = 0; q < circuit.num_qubits(); ++q) {
        std::optional<IdleInterval> run;
        auto close = [&] {
            if (run && run->duration > threshold) out.push_back(*run);
            run.reset();
        };
        for (std::size_t k = 0; k < slices.size(); ++k) {
            const bool busy = std::any_of(slices[k].gates.begin(), slices[k].gates.end(), [&](const Gate &g) {
                return std::find(g.qubits.begin(), g.qubits.end(), q) != g.qubits.end();
            });
            if (busy) {
                close();
                continue;
            }
            if (!run) {
                run = IdleInterval{q, starts[k], 0.0, k, k};
            }
            run->duration += slices[k].duration;
            run->last_slice = k;
        }
        close();
    }
    std::stable_sort(out.begin(), out.end(), [](const IdleInterval &a, const IdleInterval &b) {
        return a.start < b.start;
    });
    return out;
}

/// Slice-by-slice noisy simulation. Gates act ideally at the start of their
/// slice; idle qubits then see the combined channel for the slice duration,
/// interrupted by pulses at their absolute times.
class CircuitSimulator {
   public:
    CircuitSimulator(const ScheduledCircuit &circuit, const NoiseParams &noise, const DensityMatrix &initial)
        : circuit_(circuit), noise_(noise), rho_(initial) {
        if (initial.num_qubits() != circuit.num_qubits()) {
            throw ArgumentError("initial state size does not match the circuit");
        }
    }

    bool done() const {
        return slice_ >= circuit_.slices().size();
    }
    std::size_t next_slice() const {
        return slice_;
    }
    const DensityMatrix &state() const {
        return rho_;
    }

    /// Applies the gates of the next slice without evolving it.
    void apply_gates() {
        if (gates_applied_ || done()) return;
        for (const auto &g : circuit_.slices()[slice_].gates) {
            rho_ = apply_unitary(rho_, g.matrix, g.qubits);
        }
        gates_applied_ = true;
    }

    /// Finishes the next slice: gates, idle evolution and pulses up to its end.
    void step() {
        apply_gates();
        const auto &s = circuit_.slices()[slice_];
        std::vector<int> idle;
        for (int q = 0; q < circuit_.num_qubits(); ++q) {
            const bool busy = std::any_of(s.gates.begin(), s.gates.end(), [&](const Gate &g) {
                return std::find(g.qubits.begin(), g.qubits.end(), q) != g.qubits.end();
            });
            if (!busy) idle.push_back(q);
        }
        const double end = now_ + s.duration;
        double local = now_;
        auto evolve_to = [&](double t) {
            if (t > local) {
                const auto ch = combined_channel(noise_, t - local);
                for (int q : idle) rho_ = apply_local(ch, rho_, q);
                local = t;
            }
        };
        const auto &pulses = circuit_.pulses();
        const bool last = slice_ + 1 == circuit_.slices().size();
        for (; pulse_ < pulses.size() && (last || pulses[pulse_].time <= end); ++pulse_) {
            evolve_to(std::min(pulses[pulse_].time, end));
            rho_ = apply_unitary(rho_, pulses[pulse_].gate, pulses[pulse_].qubit);
        }
        evolve_to(end);
        now_ = end;
        ++slice_;
        gates_applied_ = false;
    }

    DensityMatrix run() {
        while (!done()) step();
        return rho_;
    }

   private:
    const ScheduledCircuit &circuit_;
    NoiseParams noise_;
    DensityMatrix rho_;
    std::size_t slice_ = 0;
    std::size_t pulse_ = 0;
    double now_ = 0.0;
    bool gates_applied_ = false;
};

inline DensityMatrix simulate(const ScheduledCircuit &circuit, const NoiseParams &noise,
                              const std::optional<DensityMatrix> &initial = std::nullopt) {
    const auto start = initial ? *initial : DensityMatrix::from_pure(PureState::basis(circuit.num_qubits(), 0));
    CircuitSimulator sim(circuit, noise, start);
    auto out = sim.run();
    // Pulses of an empty circuit still apply.
    if (circuit.slices().empty()) {
        for (const auto &p : circuit.pulses()) out = apply_unitary(out, p.gate, p.qubit);
    }
    return out;
}

struct InsertOptions {
    double threshold = kDefaultIdleThreshold;
    std::optional<std::uint64_t> shots;  // MDD measurement pass; empty means exact
    std::uint64_t seed = 0;
};

/// Adds the pulses of `spec` to every idle interval longer than the threshold.
/// MDD variants read Pauli expectations from the simulated state at the start
/// of each interval.
inline ScheduledCircuit insert_dd(const ScheduledCircuit &circuit, const SequenceSpec &spec, const NoiseParams &noise,
                                  const InsertOptions &opt = {},
                                  const std::optional<DensityMatrix> &initial = std::nullopt) {
    ScheduledCircuit out = circuit;
    if (spec.kind == SequenceKind::None) {
        return out;
    }
    const auto intervals = identify_idle(circuit, opt.threshold);
    auto add = [&](const IdleInterval &iv, const std::optional<PauliExpectations> &e) {
        const auto sched = build_schedule(spec, iv.duration, e);
        for (const auto &p : sched.pulses()) {
            out.add_pulse(TimedPulse{iv.start + p.time, iv.qubit, p.gate, spec.name()});
        }
    };
    if (!spec.needs_expectations()) {
        for (const auto &iv : intervals) add(iv, std::nullopt);
        return out;
    }
    const auto start = initial ? *initial : DensityMatrix::from_pure(PureState::basis(circuit.num_qubits(), 0));
    CircuitSimulator sim(out, noise, start);
    std::size_t next = 0;
    std::uint64_t measured = 0;
    while (!sim.done()) {
        sim.apply_gates();
        for (; next < intervals.size() && intervals[next].first_slice == sim.next_slice(); ++next) {
            const auto &iv = intervals[next];
            const int q[1] = {iv.qubit};
            const auto sigma = reduced_density(sim.state(), q);
            if (opt.shots) {
                auto rng = make_rng(opt.seed, {measured, static_cast<std::uint64_t>(iv.qubit)});
                add(iv, PauliExpectations::sampled(sigma, *opt.shots, rng));
            } else {
                add(iv, PauliExpectations::exact(sigma));
            }
            ++measured;
        }
        sim.step();
    }
    return out;
}

/// Bitstring of basis index `k`, qubit 0 first.
inline std::string basis_label(std::uint64_t k, int num_qubits) {
    std::string s(static_cast<std::size_t>(num_qubits), '0');
    for (int q = 0; q < num_qubits; ++q) {
        if ((k >> (num_qubits - 1 - q)) & 1) s[static_cast<std::size_t>(q)] = '1';
    }
    return s;
}

/// Seeded categorical sampling of the computational-basis diagonal.
inline std::map<std::string, std::uint64_t> sample_bitstrings(const DensityMatrix &rho, std::uint64_t shots,
                                                             Rng &rng) {
    std::vector<double> cdf(static_cast<std::size_t>(rho.dim()));
    double acc = 0.0;
    for (Eigen::Index i = 0; i < rho.dim(); ++i) {
        acc += std::max(0.0, rho.matrix()(i, i).real());
        cdf[static_cast<std::size_t>(i)] = acc;
    }
    std::map<std::string, std::uint64_t> counts;
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = uniform01(rng) * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) --it;
        ++counts[basis_label(static_cast<std::uint64_t>(it - cdf.begin()), rho.num_qubits())];
    }
    return counts;
}

/// n_target / n_shots * 100.
inline double success_probability(const std::map<std::string, std::uint64_t> &counts, const std::string &target) {
    std::uint64_t total = 0;
    for (const auto &[k, v] : counts) total += v;
    if (total == 0) {
        throw ArgumentError("no samples");
    }
    const auto it = counts.find(target);
    const std::uint64_t hits = it == counts.end() ? 0 : it->second;
    return 100.0 * static_cast<double>(hits) / static_cast<double>(total);
}

/// Slice durations of the toy QFT; these are our construct, not device data.
struct QftDurations {
    double prep = 0.05;        // µs
    double single = 0.05;      // µs
    double two_qubit = 5.0;    // µs
};

/// Alternating target 0101...
inline std::string qft_target(int n) {
    std::string s;
    for (int q = 0; q < n; ++q) s += (q % 2 == 0) ? '0' : '1';
    return s;
}

inline Gate swap_gate(int a, int b) {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
    return Gate::custom(m, {a, b});
}

/// Textbook QFT: H on qubit j, then cp(pi/2^(k-j)) controlled by qubit k > j,
/// for j = 0..n-1, then the reversing swaps as custom 4x4 gates.
inline std::vector<Gate> qft_gates(int n) {
    std::vector<Gate> g;
    for (int j = 0; j < n; ++j) {
        g.push_back(Gate::h(j));
        for (int k = j + 1; k < n; ++k) g.push_back(Gate::cp(k, j, kPi / std::pow(2.0, k - j)));
    }
    for (int q = 0; q < n / 2; ++q) g.push_back(swap_gate(q, n - 1 - q));
    return g;
}

/// One gate per slice.
inline ScheduledCircuit serial_circuit(int n, const std::vector<Gate> &gates, const QftDurations &d = {}) {
    ScheduledCircuit c(n);
    for (const auto &g : gates) c.add_slice(Slice{g.qubits.size() == 1 ? d.single : d.two_qubit, {g}});
    return c;
}

/// Product-state preparation slice followed by the serialized QFT. The
/// preparation is chosen so that the ideal output is the alternating string.
inline ScheduledCircuit qft_scenario(int n, const QftDurations &d = {}) {
    if (n < 2 || n > 6) {
        throw ArgumentError("qft scenario supports 2 to 6 qubits");
    }
    const auto gates = qft_gates(n);
    const auto body = serial_circuit(n, gates, d);
    const Eigen::Index dim = Eigen::Index{1} << n;
    Vector target = Vector::Zero(dim);
    std::uint64_t idx = 0;
    for (char ch : qft_target(n)) idx = (idx << 1) | (ch == '1' ? 1u : 0u);
    target(static_cast<Eigen::Index>(idx)) = 1.0;
    // Inverse QFT of a basis state is a product state; read off each factor.
    const PureState input(body.unitary().adjoint() * target);
    Slice prep{d.prep, {}};
    for (int q = 0; q < n; ++q) {
        const int keep[1] = {q};
        const auto b = bloch_vector(reduced_density(input, keep));
        const double theta = std::acos(std::clamp(b.rz, -1.0, 1.0));
        const double phi = std::atan2(b.ry, b.rx);
        const Mat2 m = SingleQubitUnitary::rz(phi).matrix() * SingleQubitUnitary::ry(theta).matrix();
        prep.gates.push_back(Gate::custom(m, {q}));
    }
    ScheduledCircuit c(n);
    c.add_slice(prep);
    for (const auto &s : body.slices()) c.add_slice(s);
    return c;
}

// JSON form: {"num_qubits": n, "slices": [{"duration": d, "gates": [...]}],
// "pulses": [...]}. Gates are {"name": "h"|"x"|"y", "qubits": [q]},
// {"name": "cp", "lambda": l, "qubits": [c, t]} or {"name": "custom",
// "qubits": [...], "matrix": [[[re, im], ...], ...]}; real entries may be
// plain numbers.

namespace detail {

inline nlohmann::json matrix_to_json(const Matrix &m) {
    auto rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        auto row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(row);
    }
    return rows;
}

inline Matrix matrix_from_json(const nlohmann::json &j) {
    if (!j.is_array() || j.empty()) {
        throw ArgumentError("matrix must be a nested array");
    }
    const auto n = static_cast<Eigen::Index>(j.size());
    Matrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto &row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
            throw ArgumentError("matrix must be square");
        }
        for (Eigen::Index c = 0; c < n; ++c) {
            const auto &e = row[static_cast<std::size_t>(c)];
            if (e.is_number()) {
                m(r, c) = e.get<double>();
            } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
                m(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
            } else {
                throw ArgumentError("matrix entries must be numbers or [re, im] pairs");
            }
        }
    }
    return m;
}

inline Gate gate_from_json(const nlohmann::json &j) {
    const auto name = j.at("name").get<std::string>();
    const auto qubits = j.at("qubits").get<std::vector<int>>();
    auto need = [&](std::size_t k) {
        if (qubits.size() != k) throw ArgumentError("gate '" + name + "' has the wrong number of qubits");
    };
    if (name == "h") {
        need(1);
        return Gate::h(qubits[0]);
    }
    if (name == "x") {
        need(1);
        return Gate::x(qubits[0]);
    }
    if (name == "y") {
        need(1);
        return Gate::y(qubits[0]);
    }
    if (name == "cp") {
        need(2);
        return Gate::cp(qubits[0], qubits[1], j.at("lambda").get<double>());
    }
    if (name == "custom") {
        return Gate::custom(matrix_from_json(j.at("matrix")), qubits);
    }
    throw ArgumentError("unknown gate '" + name + "'");
}

}  // namespace detail

inline nlohmann::json to_json(const ScheduledCircuit &c) {
    nlohmann::json j;
    j["num_qubits"] = c.num_qubits();
    auto slices = nlohmann::json::array();
    for (const auto &s : c.slices()) {
        auto gates = nlohmann::json::array();
        for (const auto &g : s.gates) {
            nlohmann::json jg{{"name", g.name}, {"qubits", g.qubits}};
            if (g.name == "cp") jg["lambda"] = g.lambda;
            if (g.name == "custom") jg["matrix"] = detail::matrix_to_json(g.matrix);
            gates.push_back(jg);
        }
        slices.push_back({{"duration", s.duration}, {"gates", gates}});
    }
    j["slices"] = slices;
    auto pulses = nlohmann::json::array();
    for (const auto &p : c.pulses()) {
        pulses.push_back({{"time", p.time},
                          {"qubit", p.qubit},
                          {"label", p.label},
                          {"matrix", detail::matrix_to_json(p.gate.matrix())}});
    }
    j["pulses"] = pulses;
    return j;
}

inline ScheduledCircuit circuit_from_json(const nlohmann::json &j) {
    try {
        ScheduledCircuit c(j.at("num_qubits").get<int>());
        for (const auto &s : j.at("slices")) {
            Slice slice{s.at("duration").get<double>(), {}};
            for (const auto &g : s.value("gates", nlohmann::json::array())) slice.gates.push_back(detail::gate_from_json(g));
            c.add_slice(std::move(slice));
        }
        for (const auto &p : j.value("pulses", nlohmann::json::array())) {
            const Matrix m = detail::matrix_from_json(p.at("matrix"));
            if (m.rows() != 2) throw ArgumentError("pulses must be 2x2");
            c.add_pulse(TimedPulse{p.at("time").get<double>(), p.at("qubit").get<int>(), SingleQubitUnitary(Mat2(m)),
                                   p.value("label", std::string{})});
        }
        return c;
    } catch (const nlohmann::json::exception &e) {
        throw ArgumentError(std::string("invalid circuit document: ") + e.what());
    }
}

}  // namespace mdd
