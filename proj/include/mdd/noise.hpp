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

// Local T1/T2 decoherence: the combined amplitude-damping + dephasing Kraus
// channel and the matching Lindblad generator.
//
// Scalar conventions. For a free-evolution window t:
//   s       = exp(-t / (2 T1))     amplitude survival
//   p       = 1 - s^2              damping probability
//   gamma_p = exp(-t / Tp)         pure-dephasing factor, 1/Tp = 1/T2 - 1/(2 T1)
//   a, b    = (1 +- s) / 2
//   alpha, beta = (1 +- gamma_p) / 2
// The Kraus operators are
//   K_ad1 = a I + b Z,  K_ad2 = sqrt(p) |0><1|,  K_dp1 = sqrt(alpha) I,  K_dp2 = sqrt(beta) Z
// and M_ij = K_dp_i K_ad_j. The channel maps
//   [[r00, r01], [r10, r11]] -> [[r00 + p r11, s gamma_p r01], [s gamma_p r10, (1 - p) r11]]
// with s * gamma_p = exp(-t/T2). Some texts write the damping probability p
// as "gamma_1" in the Kraus form and the population survival 1 - p as
// "gamma_1" in the matrix form; the accessors below expose both.

#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "mdd/core.hpp"

namespace mdd {

/// Default device parameters (µs).
inline constexpr double kDefaultT1 = 250.0;
inline constexpr double kDefaultT2 = 170.0;

class NoiseParams {
   public:
    NoiseParams(double t1 = kDefaultT1, double t2 = kDefaultT2) : t1_(t1), t2_(t2) {
        if (!(t1 > 0.0)) {
            throw ArgumentError("T1 must be positive");
        }
        if (!(t2 > 0.0) || t2 > 2.0 * t1 * (1.0 + 1e-15)) {
            throw ArgumentError("T2 must satisfy 0 < T2 <= 2 T1");
        }
    }

    double t1() const {
        return t1_;
    }
    double t2() const {
        return t2_;
    }
    /// 1/Tp, zero when T2 = 2 T1 (no pure dephasing).
    double pure_dephasing_rate() const {
        return std::max(0.0, 1.0 / t2_ - 0.5 / t1_);
    }
    double tp() const {
        const double r = pure_dephasing_rate();
        return r > 0.0 ? 1.0 / r : std::numeric_limits<double>::infinity();
    }

   private:
    double t1_;
    double t2_;
};

/// Derived scalars of a phase-covariant single-qubit channel.
struct ChannelScalars {
    double s = 1.0;        // amplitude survival
    double gamma_p = 1.0;  // dephasing factor

    static ChannelScalars make(double s, double gamma_p) {
        if (!(s >= 0.0 && s <= 1.0) || !(gamma_p >= 0.0 && gamma_p <= 1.0)) {
            throw ArgumentError("channel scalars must lie in [0, 1]");
        }
        return ChannelScalars{s, gamma_p};
    }

    double p() const {
        return 1.0 - s * s;
    }
    double a() const {
        return 0.5 * (1.0 + s);
    }
    double b() const {
        return 0.5 * (1.0 - s);
    }
    double alpha() const {
        return 0.5 * (1.0 + gamma_p);
    }
    double beta() const {
        return 0.5 * (1.0 - gamma_p);
    }
    /// Damping probability as used in the Kraus-operator form.
    double damping_probability() const {
        return p();
    }
    /// Excited-population survival exp(-t/T1) as used in the matrix form.
    double population_survival() const {
        return s * s;
    }
    /// Off-diagonal factor exp(-t/T2).
    double coherence_factor() const {
        return s * gamma_p;
    }
};

class KrausChannel {
   public:
    /// Builds M_11, M_12, M_21, M_22 from the scalars.
    explicit KrausChannel(const ChannelScalars &sc) : scalars_(sc) {
        const double a = sc.a(), b = sc.b(), al = sc.alpha(), be = sc.beta(), p = sc.p();
        Mat2 kad1 = a * pauli::I() + b * pauli::Z();
        Mat2 kad2 = Mat2::Zero();
        kad2(0, 1) = std::sqrt(p);
        ops_ = {std::sqrt(al) * kad1, std::sqrt(al) * kad2, std::sqrt(be) * (b * pauli::I() + a * pauli::Z()),
                std::sqrt(be) * kad2};
        check_completeness();
    }

    /// General Kraus set; completeness is validated.
    explicit KrausChannel(std::vector<Mat2> operators) : ops_(std::move(operators)) {
        if (ops_.empty()) {
            throw ArgumentError("a channel needs at least one Kraus operator");
        }
        check_completeness();
    }

    static KrausChannel identity() {
        return KrausChannel(ChannelScalars{1.0, 1.0});
    }

    const std::vector<Mat2> &operators() const {
        return ops_;
    }
    const std::optional<ChannelScalars> &scalars() const {
        return scalars_;
    }
    /// Scalars, or an error for general Kraus sets.
    const ChannelScalars &require_scalars() const {
        if (!scalars_) {
            throw ArgumentError("channel was not built from T1/T2 scalars");
        }
        return *scalars_;
    }

    Mat2 apply(const Mat2 &rho) const {
        Mat2 out = Mat2::Zero();
        for (const auto &m : ops_) {
            out += m * rho * m.adjoint();
        }
        return out;
    }

    double completeness_error() const {
        Mat2 acc = Mat2::Zero();
        for (const auto &m : ops_) {
            acc += m.adjoint() * m;
        }
        return (acc - Mat2::Identity()).cwiseAbs().maxCoeff();
    }

   private:
    void check_completeness() const {
        if (completeness_error() > 1e-12) {
            throw ArgumentError("Kraus operators violate completeness");
        }
    }

    std::vector<Mat2> ops_;
    std::optional<ChannelScalars> scalars_;
};

inline ChannelScalars channel_scalars(const NoiseParams &params, double t) {
    if (!(t >= 0.0)) {
        throw ArgumentError("evolution time must be non-negative");
    }
    return ChannelScalars{std::exp(-t / (2.0 * params.t1())), std::exp(-t * params.pure_dephasing_rate())};
}

inline KrausChannel combined_channel(const NoiseParams &params, double t) {
    return KrausChannel(channel_scalars(params, t));
}

/// Pure phase damping multiplying coherences by exp(-chi).
inline KrausChannel dephasing_channel_from_chi(double chi) {
    if (!(chi >= 0.0)) {
        throw ArgumentError("chi must be non-negative");
    }
    return KrausChannel(ChannelScalars{1.0, std::exp(-chi)});
}

/// Amplitude damping only (no pure dephasing) over t.
inline KrausChannel amplitude_damping_channel(double t1, double t) {
    return combined_channel(NoiseParams(t1, 2.0 * t1), t);
}

inline DensityMatrix apply_local(const KrausChannel &channel, const DensityMatrix &rho, int qubit) {
    const int n = rho.num_qubits();
    const int q[1] = {qubit};
    detail::check_qubits(n, q);
    Matrix out = Matrix::Zero(rho.dim(), rho.dim());
    for (const auto &m : channel.operators()) {
        out += conjugate_local(rho.matrix(), m, q, n);
    }
    return DensityMatrix(out, DensityMatrix::Trusted{});
}

inline DensityMatrix apply_local(const KrausChannel &channel, const PureState &psi, int qubit) {
    return apply_local(channel, DensityMatrix::from_pure(psi), qubit);
}

inline DensityMatrix apply_unitary(const DensityMatrix &rho, const Matrix &u, std::span<const int> qubits) {
    return DensityMatrix(conjugate_local(rho.matrix(), u, qubits, rho.num_qubits()), DensityMatrix::Trusted{});
}

inline DensityMatrix apply_unitary(const DensityMatrix &rho, const SingleQubitUnitary &u, int qubit) {
    const int q[1] = {qubit};
    return apply_unitary(rho, Matrix(u.matrix()), q);
}

struct JumpOperator {
    Matrix matrix;
    double rate = 0.0;  // µs^-1
    std::vector<int> targets;

    JumpOperator(Matrix m, double r, std::vector<int> t) : matrix(std::move(m)), rate(r), targets(std::move(t)) {
        if (!(rate >= 0.0)) {
            throw ArgumentError("jump rate must be non-negative");
        }
        if (matrix.rows() != (Eigen::Index{1} << targets.size()) || matrix.cols() != matrix.rows()) {
            throw ArgumentError("jump operator size does not match its targets");
        }
    }
};

/// Lowering operator (X + iY)/2 = |0><1| at rate 1/T1.
inline JumpOperator relaxation_jump(int qubit, const NoiseParams &params) {
    Matrix l = Matrix::Zero(2, 2);
    l(0, 1) = 1.0;
    return JumpOperator(l, 1.0 / params.t1(), {qubit});
}

/// sigma_z dephasing. The rate is 1/(2 Tp): with L = Z the coherences decay as
/// exp(-2 rate t), which reproduces the exp(-t/Tp) factor of the Kraus channel.
inline JumpOperator dephasing_jump(int qubit, const NoiseParams &params) {
    return JumpOperator(Matrix(pauli::Z()), 0.5 * params.pure_dephasing_rate(), {qubit});
}

inline JumpOperator zz_jump(int qubit_i, int qubit_j, double rate) {
    Matrix zz = Matrix::Zero(4, 4);
    zz.diagonal() << 1.0, -1.0, -1.0, 1.0;
    return JumpOperator(zz, rate, {qubit_i, qubit_j});
}

/// -i[H, rho] + sum_k G_k (L rho L^+ - {L^+ L, rho}/2)
inline Matrix lindblad_derivative(const DensityMatrix &rho, const Matrix &hamiltonian,
                                  std::span<const JumpOperator> jumps) {
    const int n = rho.num_qubits();
    if (hamiltonian.rows() != rho.dim() || hamiltonian.cols() != rho.dim()) {
        throw ArgumentError("Hamiltonian dimension does not match the state");
    }
    const Matrix &r = rho.matrix();
    const cplx i(0.0, 1.0);
    Matrix out = -i * (hamiltonian * r - r * hamiltonian);
    for (const auto &jump : jumps) {
        const Matrix l = embed(jump.matrix, jump.targets, n);
        const Matrix ldl = l.adjoint() * l;
        out += jump.rate * (l * r * l.adjoint() - 0.5 * (ldl * r + r * ldl));
    }
    return out;
}

}  // namespace mdd
