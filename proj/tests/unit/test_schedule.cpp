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

#include <gtest/gtest.h>

#include <cmath>

#include "mdd/schedule.hpp"

using namespace mdd;

namespace {

const NoiseParams kQuiet(1e300, 1e300);

Matrix qft_matrix(int n) {
    const Eigen::Index d = Eigen::Index{1} << n;
    Matrix m(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index k = 0; k < d; ++k) {
            m(j, k) = std::polar(1.0 / std::sqrt(static_cast<double>(d)), 2.0 * kPi * static_cast<double>(j * k) / d);
        }
    }
    return m;
}

std::uint64_t index_of(const std::string &bits) {
    std::uint64_t k = 0;
    for (char c : bits) k = (k << 1) | (c == '1' ? 1u : 0u);
    return k;
}

}  // namespace

TEST(Circuit, Validation) {
    ScheduledCircuit c(3);
    EXPECT_THROW(c.add_slice(Slice{0.0, {}}), ArgumentError);
    EXPECT_THROW(c.add_slice(Slice{1.0, {Gate::h(0), Gate::cp(0, 1, 1.0)}}), ArgumentError);
    EXPECT_THROW(c.add_slice(Slice{1.0, {Gate::h(3)}}), ArgumentError);
    EXPECT_THROW(Gate::custom(Matrix::Ones(2, 2), {0}), ArgumentError);
    EXPECT_THROW(ScheduledCircuit(11), ArgumentError);
}

TEST(IdleIntervals, AllBusyIsEmpty) {
    ScheduledCircuit c(2);
    for (int k = 0; k < 3; ++k) c.add_slice(Slice{10.0, {Gate::h(0), Gate::x(1)}});
    EXPECT_TRUE(identify_idle(c).empty());
}

TEST(IdleIntervals, ContiguousMerge) {
    ScheduledCircuit c(2);
    c.add_slice(Slice{1.0, {Gate::h(0), Gate::h(1)}});
    for (int k = 0; k < 3; ++k) c.add_slice(Slice{100.0, {Gate::x(0)}});
    c.add_slice(Slice{0.1, {Gate::h(0)}});
    c.add_slice(Slice{1.0, {Gate::h(1)}});
    const auto iv = identify_idle(c, 0.24);
    ASSERT_EQ(iv.size(), 2u);
    EXPECT_EQ(iv[0].qubit, 1);
    EXPECT_DOUBLE_EQ(iv[0].start, 1.0);
    EXPECT_DOUBLE_EQ(iv[0].duration, 300.1);
    EXPECT_EQ(iv[1].qubit, 0);
    EXPECT_DOUBLE_EQ(iv[1].duration, 1.0);
    EXPECT_EQ(identify_idle(c, 1.0).size(), 1u);
}

TEST(IdleIntervals, GrowWithQftSize) {
    std::size_t prev = 0;
    double prev_total = 0.0;
    for (int n = 4; n <= 8; ++n) {
        const auto c = serial_circuit(n, qft_gates(n));
        const auto iv = identify_idle(c);
        double total = 0.0;
        for (const auto &i : iv) total += i.duration;
        EXPECT_GT(iv.size(), prev);
        EXPECT_GT(total, prev_total);
        prev = iv.size();
        prev_total = total;
    }
}

TEST(Simulate, EmptyAndSingleIdle) {
    const auto psi = haar_random_state(2, 1);
    const auto rho = DensityMatrix::from_pure(psi);
    EXPECT_LT((simulate(ScheduledCircuit(2), NoiseParams(), rho).matrix() - rho.matrix()).norm(), 1e-15);
    ScheduledCircuit c(1);
    c.add_slice(Slice{100.0, {}});
    const auto one = DensityMatrix::from_pure(haar_random_state(1, 2));
    const auto expected = apply_local(combined_channel(NoiseParams(), 100.0), one, 0);
    EXPECT_LT((simulate(c, NoiseParams(), one).matrix() - expected.matrix()).norm(), 1e-14);
}

TEST(Simulate, StaysValidEverySlice) {
    const auto c = insert_dd(qft_scenario(4), SequenceSpec::parse("xy4"), NoiseParams());
    CircuitSimulator sim(c, NoiseParams(), DensityMatrix::from_pure(PureState::basis(4, 0)));
    while (!sim.done()) {
        sim.step();
        EXPECT_TRUE(sim.state().is_valid(1e-10));
    }
}

TEST(InsertDd, NoneXxAndDuration) {
    const auto c = qft_scenario(4);
    const auto none = insert_dd(c, SequenceSpec{}, NoiseParams());
    EXPECT_TRUE(none.pulses().empty());
    EXPECT_EQ(none.slices().size(), c.slices().size());
    const auto xx = insert_dd(c, SequenceSpec::parse("xx"), NoiseParams());
    const auto iv = identify_idle(c);
    ASSERT_EQ(xx.pulses().size(), 2 * iv.size());
    EXPECT_DOUBLE_EQ(xx.total_duration(), c.total_duration());
    for (const auto &i : iv) {
        int found = 0;
        for (const auto &p : xx.pulses()) {
            if (p.qubit != i.qubit) continue;
            if (std::abs(p.time - (i.start + 0.25 * i.duration)) < 1e-12 ||
                std::abs(p.time - (i.start + 0.75 * i.duration)) < 1e-12) {
                EXPECT_TRUE(p.gate.equal_up_to_phase(SingleQubitUnitary::x()));
                ++found;
            }
        }
        EXPECT_EQ(found, 2);
    }
    EXPECT_LT((xx.unitary() - c.unitary()).norm(), 1e-12);
    EXPECT_THROW(SequenceSpec::parse("zz"), ArgumentError);
}

TEST(InsertDd, MddProtectsPureIdleQubit) {
    // Qubit 1 is prepared in a pure state and then idles while qubit 0 works.
    ScheduledCircuit c(2);
    Mat2 prep = SingleQubitUnitary::rz(0.7).matrix() * SingleQubitUnitary::ry(1.1).matrix();
    c.add_slice(Slice{0.05, {Gate::h(0), Gate::custom(prep, {1})}});
    for (int k = 0; k < 4; ++k) c.add_slice(Slice{50.0, {Gate::x(0)}});
    const auto mdd = insert_dd(c, SequenceSpec::parse("mdd"), NoiseParams());
    const auto out = simulate(mdd, NoiseParams());
    const int q[1] = {1};
    const Vector col = prep.col(0);
    const auto ideal = DensityMatrix::from_pure(PureState(col));
    EXPECT_NEAR(fidelity(reduced_density(out, q), ideal), 1.0, 1e-12);
    const auto bare = simulate(c, NoiseParams());
    EXPECT_LT(fidelity(reduced_density(bare, q), ideal), 0.9);
}

TEST(InsertDd, ShotModeIsSeeded) {
    const auto c = qft_scenario(3);
    InsertOptions o;
    o.shots = 1000;
    o.seed = 5;
    const auto a = insert_dd(c, SequenceSpec::parse("mdd"), NoiseParams(), o);
    const auto b = insert_dd(c, SequenceSpec::parse("mdd"), NoiseParams(), o);
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
    o.seed = 6;
    EXPECT_NE(to_json(a).dump(), to_json(insert_dd(c, SequenceSpec::parse("mdd"), NoiseParams(), o)).dump());
}

TEST(SuccessProbability, Basics) {
    EXPECT_DOUBLE_EQ(success_probability({{"0101", 10}}, "0101"), 100.0);
    EXPECT_DOUBLE_EQ(success_probability({{"1111", 10}}, "0101"), 0.0);
    EXPECT_DOUBLE_EQ(success_probability({{"0101", 1}, {"1111", 3}}, "0101"), 25.0);
    EXPECT_THROW(success_probability({}, "0"), ArgumentError);
}

TEST(Sampler, MatchesDiagonal) {
    const auto rho = DensityMatrix::from_pure(haar_random_state(3, 9));
    Rng rng(1);
    const std::uint64_t shots = 200000;
    const auto counts = sample_bitstrings(rho, shots, rng);
    for (const auto &[k, v] : counts) {
        const double p = rho.matrix()(static_cast<Eigen::Index>(index_of(k)), static_cast<Eigen::Index>(index_of(k))).real();
        EXPECT_NEAR(static_cast<double>(v) / shots, p, 5.0 * std::sqrt(p * (1 - p) / shots) + 1e-12);
    }
}

TEST(Qft, TwoQubitUnitaryExact) {
    const auto c = serial_circuit(2, qft_gates(2));
    EXPECT_LT((simulate(c, kQuiet).matrix() - DensityMatrix::from_pure(PureState(qft_matrix(2).col(0))).matrix()).norm(), 1e-12);
    EXPECT_LT((c.unitary() - qft_matrix(2)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((serial_circuit(4, qft_gates(4)).unitary() - qft_matrix(4)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Qft, IdealSuccessIsHundred) {
    for (int n = 2; n <= 6; ++n) {
        const auto out = simulate(qft_scenario(n), kQuiet);
        Rng rng(3);
        EXPECT_DOUBLE_EQ(success_probability(sample_bitstrings(out, 1000, rng), qft_target(n)), 100.0);
    }
    EXPECT_EQ(qft_target(4), "0101");
    EXPECT_THROW(qft_scenario(1), ArgumentError);
    EXPECT_THROW(qft_scenario(7), ArgumentError);
}

TEST(Qft, MddBeatsNoDd) {
    const auto c = qft_scenario(4);
    const auto k = static_cast<Eigen::Index>(index_of(qft_target(4)));
    const double none = simulate(c, NoiseParams()).matrix()(k, k).real();
    const double mdd = simulate(insert_dd(c, SequenceSpec::parse("mdd"), NoiseParams()), NoiseParams()).matrix()(k, k).real();
    EXPECT_GE(mdd, none);
}

TEST(Json, RoundTrip) {
    auto c = insert_dd(qft_scenario(3), SequenceSpec::parse("mdd"), NoiseParams());
    const auto j = to_json(c);
    const auto back = circuit_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(to_json(back).dump(), j.dump());
    EXPECT_LT((simulate(back, NoiseParams()).matrix() - simulate(c, NoiseParams()).matrix()).norm(), 1e-12);
}

TEST(Json, NamedPrimitivesAndErrors) {
    const auto j = nlohmann::json::parse(R"({"num_qubits": 2, "slices": [
        {"duration": 1.0, "gates": [{"name": "h", "qubits": [0]}, {"name": "y", "qubits": [1]}]},
        {"duration": 0.5, "gates": [{"name": "cp", "lambda": 1.5707963267948966, "qubits": [0, 1]}]},
        {"duration": 0.5, "gates": [{"name": "custom", "qubits": [1], "matrix": [[0, 1], [1, 0]]}]}]})");
    const auto c = circuit_from_json(j);
    EXPECT_EQ(c.slices().size(), 3u);
    EXPECT_EQ(c.slices()[1].gates[0].name, "cp");
    EXPECT_THROW(circuit_from_json(nlohmann::json::parse(R"({"num_qubits": 1, "slices": [{"duration": 1, "gates": [{"name": "t", "qubits": [0]}]}]})")),
                 ArgumentError);
    EXPECT_THROW(circuit_from_json(nlohmann::json::parse(R"({"slices": []})")), ArgumentError);
    EXPECT_THROW(circuit_from_json(nlohmann::json::parse(R"({"num_qubits": 1, "slices": [{"duration": -1}]})")),
                 ArgumentError);
}
