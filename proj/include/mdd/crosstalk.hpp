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

// Two-qubit MDD under ZZ crosstalk. The target state
//   (II + c1 ZI + c2 IZ + c3 ZZ) / 4
// is diagonal with populations
//   p00 = (1 + c1 + c2 + c3)/4,  p01 = (1 + c1 - c2 - c3)/4,
//   p10 = (1 - c1 + c2 - c3)/4,  p11 = (1 - c1 - c2 + c3)/4,
// so the positivity polytope is the tetrahedron with vertices
// (1,1,1), (1,-1,-1), (-1,1,-1), (-1,-1,1). The decay rate is a separable,
// generally indefinite quadratic in c, minimized here by exhaustive KKT
// enumeration over the 15 faces of the tetrahedron, with a multi-start
// projected-gradient pass in population space as a second route.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "mdd/analysis.hpp"
#include "mdd/core.hpp"
#include "mdd/rng.hpp"

namespace mdd {

struct AnsatzCoefficients {
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;

    /// The four populations times 4: 1 +- c1 +- c2 + (sign product) c3.
    std::array<double, 4> constraint_values() const {
        return {1.0 + c1 + c2 + c3, 1.0 + c1 - c2 - c3, 1.0 - c1 + c2 - c3, 1.0 - c1 - c2 + c3};
    }
    /// Closed polytope membership, each constraint >= -tol.
    bool feasible(double tol = 1e-9) const {
        const auto v = constraint_values();
        return std::all_of(v.begin(), v.end(), [tol](double x) { return x >= -tol; });
    }
    bool strictly_feasible() const {
        const auto v = constraint_values();
        return std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
    }
    std::array<double, 4> populations() const {
        auto v = constraint_values();
        for (double &x : v) x *= 0.25;
        return v;
    }
    static AnsatzCoefficients from_populations(const std::array<double, 4> &p) {
        return {p[0] + p[1] - p[2] - p[3], p[0] - p[1] + p[2] - p[3], p[0] - p[1] - p[2] + p[3]};
    }
};

struct TwoQubitRates {
    DecayRates qubit_i;
    DecayRates qubit_j;
    double gamma_zz = 0.0;

    TwoQubitRates(DecayRates i = {}, DecayRates j = {}, double gzz = 0.0) : qubit_i(i), qubit_j(j), gamma_zz(gzz) {
        if (!(gzz >= 0.0)) {
            throw ArgumentError("crosstalk rate must be non-negative");
        }
    }
};

namespace detail {

inline double two_qubit_rate_unchecked(const AnsatzCoefficients &c, double ri, double rj, const TwoQubitRates &g) {
    return decay_rate_quadratic(c.c1, ri, g.qubit_i.gamma1, g.qubit_i.gamma2) +
           decay_rate_quadratic(c.c2, rj, g.qubit_j.gamma1, g.qubit_j.gamma2) + g.gamma_zz * (1.0 - c.c3 * c.c3);
}

}  // namespace detail

inline double two_qubit_decay_rate(const AnsatzCoefficients &c, double ri, double rj, const TwoQubitRates &rates,
                                   double tol = 1e-9) {
    if (!c.feasible(tol)) {
        throw FeasibilityError("ansatz coefficients violate the positivity polytope");
    }
    return detail::two_qubit_rate_unchecked(c, ri, rj, rates);
}

/// Exact rational number with a positive denominator.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;
};

struct SliceFeasibility {
    bool feasible = false;
    std::string reason;
};

/// Whether some (c1, c2) makes all four constraints strictly positive for a
/// fixed rational c3. Pairing the constraints gives
///   (1+c1-c2-c3) > 0 and (1-c1+c2-c3) > 0  =>  1 - c3 > |c1 - c2| >= 0,
///   (1+c1+c2+c3) > 0 and (1-c1-c2+c3) > 0  =>  1 + c3 > |c1 + c2| >= 0,
/// and both are also sufficient (take c1 = c2 = 0). Decided with integer
/// sign tests only.
inline SliceFeasibility ansatz_slice_feasible(Rational c3) {
    if (c3.den <= 0) {
        throw ArgumentError("rational denominator must be positive");
    }
    // sign(1 - c3) = sign(den - num), sign(1 + c3) = sign(den + num).
    const std::int64_t upper = c3.den - c3.num;
    const std::int64_t lower = c3.den + c3.num;
    if (upper <= 0) {
        return {false, "1 + c1 - c2 - c3 > 0 requires c1 > c2 + (c3 - 1) >= c2, and 1 - c1 + c2 - c3 > 0 requires "
                       "c2 > c1 + (c3 - 1) >= c1: contradictory conditions c1 > c2 and c2 > c1"};
    }
    if (lower <= 0) {
        return {false, "1 + c1 + c2 + c3 > 0 requires c1 + c2 > -(1 + c3) >= 0, and 1 - c1 - c2 + c3 > 0 requires "
                       "c1 + c2 < 1 + c3 <= 0: contradictory"};
    }
    return {true, "c1 = c2 = 0 satisfies every constraint strictly"};
}

struct TwoQubitOptimum {
    AnsatzCoefficients c;
    double rate = 0.0;
    std::string method;
};

namespace detail {

inline const std::array<std::array<double, 3>, 4> &tetra_vertices() {
    static const std::array<std::array<double, 3>, 4> v = {
        {{1.0, 1.0, 1.0}, {1.0, -1.0, -1.0}, {-1.0, 1.0, -1.0}, {-1.0, -1.0, 1.0}}};
    return v;
}

/// Separable quadratic q(c) = sum_k (h_k c_k^2 + g_k c_k) + const.
struct SeparableQuadratic {
    std::array<double, 3> h{};
    std::array<double, 3> g{};
};

inline SeparableQuadratic rate_quadratic(const TwoQubitRates &rates) {
    SeparableQuadratic q;
    const DecayRates *r[2] = {&rates.qubit_i, &rates.qubit_j};
    for (int k = 0; k < 2; ++k) {
        q.h[k] = 0.25 * r[k]->gamma1 - r[k]->gamma2;
        q.g[k] = -0.5 * r[k]->gamma1;
    }
    q.h[2] = -rates.gamma_zz;
    q.g[2] = 0.0;
    return q;
}

/// Euclidean projection onto the probability simplex.
inline std::array<double, 4> project_simplex(std::array<double, 4> v) {
    std::array<double, 4> u = v;
    std::sort(u.begin(), u.end(), std::greater<>());
    double css = 0.0, theta = 0.0;
    for (int k = 0; k < 4; ++k) {
        css += u[k];
        const double t = (css - 1.0) / (k + 1);
        if (u[k] - t > 0.0) {
            theta = t;
        }
    }
    for (double &x : v) x = std::max(x - theta, 0.0);
    return v;
}

}  // namespace detail

/// Global minimum by KKT enumeration over every face of the tetrahedron.
inline TwoQubitOptimum optimize_two_qubit_faces(double ri, double rj, const TwoQubitRates &rates) {
    const auto q = detail::rate_quadratic(rates);
    const auto &V = detail::tetra_vertices();
    TwoQubitOptimum best;
    best.rate = std::numeric_limits<double>::infinity();
    best.method = "face-enumeration";
    auto consider = [&](const AnsatzCoefficients &c) {
        if (!c.feasible(1e-12)) {
            return;
        }
        const double v = detail::two_qubit_rate_unchecked(c, ri, rj, rates);
        if (v < best.rate) {
            best.rate = v;
            best.c = c;
        }
    };
    for (unsigned mask = 1; mask < 16; ++mask) {
        std::vector<int> idx;
        for (int k = 0; k < 4; ++k) {
            if (mask & (1u << k)) idx.push_back(k);
        }
        const int m = static_cast<int>(idx.size());
        // c = sum_l lambda_l V_l, sum lambda = 1. Stationarity of q on the
        // affine hull: KKT system [A 1; 1^T 0] [lambda; mu] = [-b; 1] with
        // A_lm = 2 sum_k h_k V_lk V_mk, b_l = sum_k g_k V_lk.
        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + 1, m + 1);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
        for (int l = 0; l < m; ++l) {
            for (int n = 0; n < m; ++n) {
                double a = 0.0;
                for (int k = 0; k < 3; ++k) a += 2.0 * q.h[k] * V[idx[l]][k] * V[idx[n]][k];
                kkt(l, n) = a;
            }
            double b = 0.0;
            for (int k = 0; k < 3; ++k) b += q.g[k] * V[idx[l]][k];
            rhs(l) = -b;
            kkt(l, m) = 1.0;
            kkt(m, l) = 1.0;
        }
        rhs(m) = 1.0;
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(kkt);
        const Eigen::VectorXd sol = cod.solve(rhs);
        if ((kkt * sol - rhs).norm() > 1e-9) {
            continue;  // no stationary point on this face's hull
        }
        bool inside = true;
        AnsatzCoefficients c;
        double sum = 0.0;
        for (int l = 0; l < m; ++l) {
            const double lam = sol(l);
            if (lam < -1e-12) inside = false;
            sum += lam;
            c.c1 += lam * V[idx[l]][0];
            c.c2 += lam * V[idx[l]][1];
            c.c3 += lam * V[idx[l]][2];
        }
        if (inside && std::abs(sum - 1.0) < 1e-9) {
            consider(c);
        }
    }
    return best;
}

/// Multi-start projected gradient descent over the population simplex.
inline TwoQubitOptimum optimize_two_qubit_gradient(double ri, double rj, const TwoQubitRates &rates,
                                                   std::uint64_t seed = 0, int starts = 20, int iterations = 4000) {
    const auto q = detail::rate_quadratic(rates);
    double lip = 0.0;
    for (int k = 0; k < 3; ++k) lip = std::max(lip, 2.0 * std::abs(q.h[k]));
    // c = J p with |J| entries 1; the population-space curvature is at most 4 * 2|h|.
    const double step = lip > 0.0 ? 1.0 / (4.0 * lip) : 1.0;
    TwoQubitOptimum best;
    best.rate = std::numeric_limits<double>::infinity();
    best.method = "projected-gradient";
    Rng rng(derive_seed(seed, {0x2a}));
    for (int s = 0; s < starts; ++s) {
        std::array<double, 4> p{};
        if (s < 4) {
            p[s] = 1.0;
        } else {
            double tot = 0.0;
            for (double &x : p) {
                x = -std::log(1.0 - uniform01(rng));
                tot += x;
            }
            for (double &x : p) x /= tot;
        }
        for (int it = 0; it < iterations; ++it) {
            const auto c = AnsatzCoefficients::from_populations(p);
            const std::array<double, 3> gc = {2.0 * q.h[0] * c.c1 + q.g[0], 2.0 * q.h[1] * c.c2 + q.g[1],
                                              2.0 * q.h[2] * c.c3 + q.g[2]};
            // dc/dp rows: c1 (+,+,-,-), c2 (+,-,+,-), c3 (+,-,-,+)
            const std::array<double, 4> gp = {gc[0] + gc[1] + gc[2], gc[0] - gc[1] - gc[2], -gc[0] + gc[1] - gc[2],
                                              -gc[0] - gc[1] + gc[2]};
            std::array<double, 4> next{};
            for (int k = 0; k < 4; ++k) next[k] = p[k] - step * gp[k];
            next = detail::project_simplex(next);
            double moved = 0.0;
            for (int k = 0; k < 4; ++k) moved += std::abs(next[k] - p[k]);
            p = next;
            if (moved < 1e-15) break;
        }
        const auto c = AnsatzCoefficients::from_populations(p);
        const double v = detail::two_qubit_rate_unchecked(c, ri, rj, rates);
        if (v < best.rate) {
            best.rate = v;
            best.c = c;
        }
    }
    return best;
}

/// Minimum of the two-qubit decay rate over the (closed) positivity polytope.
inline TwoQubitOptimum optimize_two_qubit_mdd(double ri, double rj, const TwoQubitRates &rates,
                                              std::uint64_t seed = 0) {
    auto faces = optimize_two_qubit_faces(ri, rj, rates);
    const auto grad = optimize_two_qubit_gradient(ri, rj, rates, seed);
    return grad.rate < faces.rate - 1e-12 ? grad : faces;
}

/// Dense grid minimum over [-1, 1]^3 restricted to the closed polytope.
inline TwoQubitOptimum two_qubit_grid_oracle(double ri, double rj, const TwoQubitRates &rates, int points = 201) {
    TwoQubitOptimum best;
    best.rate = std::numeric_limits<double>::infinity();
    best.method = "grid";
    const double h = 2.0 / (points - 1);
    for (int a = 0; a < points; ++a) {
        for (int b = 0; b < points; ++b) {
            for (int c = 0; c < points; ++c) {
                const AnsatzCoefficients x{-1.0 + a * h, -1.0 + b * h, -1.0 + c * h};
                if (!x.feasible(1e-12)) continue;
                const double v = detail::two_qubit_rate_unchecked(x, ri, rj, rates);
                if (v < best.rate) {
                    best.rate = v;
                    best.c = x;
                }
            }
        }
    }
    return best;
}

/// Var of the jump operators on the explicit two-qubit state
/// (II + c1 ZI + c2 IZ + c3 ZZ + x_i XI + x_j IX)/4 with x = sqrt(r^2 - c^2):
/// the local Bloch norms are r_i, r_j, which is what the closed form assumes.
inline double two_qubit_rate_by_variance(const AnsatzCoefficients &c, double ri, double rj,
                                         const TwoQubitRates &rates) {
    const Matrix I2 = Matrix::Identity(2, 2);
    auto kron = [](const Matrix &a, const Matrix &b) {
        Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        return out;
    };
    const Matrix X = pauli::X(), Z = pauli::Z();
    const double xi = std::sqrt(std::max(0.0, ri * ri - c.c1 * c.c1));
    const double xj = std::sqrt(std::max(0.0, rj * rj - c.c2 * c.c2));
    const Matrix rho = 0.25 * (kron(I2, I2) + c.c1 * kron(Z, I2) + c.c2 * kron(I2, Z) + c.c3 * kron(Z, Z) +
                               xi * kron(X, I2) + xj * kron(I2, X));
    auto var = [&](const Matrix &l) {
        return (rho * l.adjoint() * l).trace().real() - std::norm((rho * l).trace());
    };
    Matrix lower = Matrix::Zero(2, 2);
    lower(0, 1) = 1.0;
    return rates.qubit_i.gamma1 * var(kron(lower, I2)) + rates.qubit_i.gamma2 * var(kron(Z, I2)) +
           rates.qubit_j.gamma1 * var(kron(I2, lower)) + rates.qubit_j.gamma2 * var(kron(I2, Z)) +
           rates.gamma_zz * var(kron(Z, Z));
}

}  // namespace mdd
