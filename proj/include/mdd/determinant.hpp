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

// Slater determinants as alpha/beta orbital bitmasks, Slater-Condon matrix
// elements and dense subspace diagonalization.
//
// Spin orbitals are ordered alpha 0..norb-1, then beta 0..norb-1; the
// determinant is the product of creation operators in that order acting on
// the vacuum.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "mdd/errors.hpp"
#include "mdd/fcidump.hpp"

namespace mdd {

struct Determinant {
    std::uint64_t alpha = 0;
    std::uint64_t beta = 0;

    int n_alpha() const {
        return std::popcount(alpha);
    }
    int n_beta() const {
        return std::popcount(beta);
    }
    bool operator==(const Determinant &) const = default;
    auto operator<=>(const Determinant &) const = default;

    /// Combined spin-orbital mask (alpha low bits, beta shifted by norb).
    std::uint64_t spin_mask(int norb) const {
        return alpha | (beta << norb);
    }
    static Determinant from_spin_mask(std::uint64_t m, int norb) {
        const std::uint64_t low = norb == 64 ? ~0ULL : ((std::uint64_t{1} << norb) - 1);
        return Determinant{m & low, (m >> norb) & low};
    }

    /// Occupations as a string, alpha orbitals then beta orbitals, orbital 0 first.
    std::string to_string(int norb) const {
        std::string s;
        for (int p = 0; p < norb; ++p) s += ((alpha >> p) & 1) ? '1' : '0';
        for (int p = 0; p < norb; ++p) s += ((beta >> p) & 1) ? '1' : '0';
        return s;
    }
    static Determinant from_string(const std::string &s, int norb) {
        if (static_cast<int>(s.size()) != 2 * norb) {
            throw ArgumentError("bitstring length must be 2 * norb");
        }
        Determinant d;
        for (int p = 0; p < 2 * norb; ++p) {
            const char c = s[static_cast<std::size_t>(p)];
            if (c != '0' && c != '1') throw ArgumentError("bitstring must contain only 0 and 1");
            if (c == '1') {
                if (p < norb) d.alpha |= std::uint64_t{1} << p;
                else d.beta |= std::uint64_t{1} << (p - norb);
            }
        }
        return d;
    }
};

namespace detail {

/// Sign of moving an operator on spin orbital p past the occupied orbitals below it.
inline double parity_below(std::uint64_t mask, int p) {
    const std::uint64_t below = p == 0 ? 0 : (mask & ((std::uint64_t{1} << p) - 1));
    return (std::popcount(below) % 2) ? -1.0 : 1.0;
}

/// a_p on `mask`; returns the sign and clears the bit (caller ensures occupancy).
inline double annihilate(std::uint64_t &mask, int p) {
    const double s = parity_below(mask, p);
    mask &= ~(std::uint64_t{1} << p);
    return s;
}

inline double create(std::uint64_t &mask, int p) {
    const double s = parity_below(mask, p);
    mask |= std::uint64_t{1} << p;
    return s;
}

/// <pq|rs> over spin orbitals (physicists' notation) = (pr|qs) delta_spin.
inline double spin_eri(const FciData &f, int p, int q, int r, int s) {
    const int n = f.norb();
    if ((p < n) != (r < n) || (q < n) != (s < n)) return 0.0;
    return f.eri(p % n, r % n, q % n, s % n);
}

inline double spin_h(const FciData &f, int p, int q) {
    const int n = f.norb();
    if ((p < n) != (q < n)) return 0.0;
    return f.h(p % n, q % n);
}

inline std::vector<int> bits_of(std::uint64_t m) {
    std::vector<int> out;
    while (m) {
        out.push_back(std::countr_zero(m));
        m &= m - 1;
    }
    return out;
}

}  // namespace detail

/// <di|H|dj> including the core energy on the diagonal.
inline double slater_condon(const Determinant &di, const Determinant &dj, const FciData &f) {
    const int n = f.norb();
    const std::uint64_t mi = di.spin_mask(n), mj = dj.spin_mask(n);
    const std::uint64_t diff = mi ^ mj;
    const int degree = std::popcount(diff) / 2;
    if (std::popcount(mi) != std::popcount(mj) || degree > 2) {
        return 0.0;
    }
    if (degree == 0) {
        const auto occ = detail::bits_of(mi);
        double e = f.core_energy();
        for (int i : occ) e += detail::spin_h(f, i, i);
        for (std::size_t a = 0; a < occ.size(); ++a) {
            for (std::size_t b = a + 1; b < occ.size(); ++b) {
                const int i = occ[a], j = occ[b];
                e += detail::spin_eri(f, i, j, i, j) - detail::spin_eri(f, i, j, j, i);
            }
        }
        return e;
    }
    // Holes in dj (occupied in dj only), particles in di (occupied in di only).
    const auto holes = detail::bits_of(mj & diff);
    const auto parts = detail::bits_of(mi & diff);
    if (degree == 1) {
        const int i = holes[0], a = parts[0];
        std::uint64_t m = mj;
        double sign = detail::annihilate(m, i);
        sign *= detail::create(m, a);
        double v = detail::spin_h(f, a, i);
        for (int j : detail::bits_of(mj)) {
            if (j == i) continue;
            v += detail::spin_eri(f, a, j, i, j) - detail::spin_eri(f, a, j, j, i);
        }
        return sign * v;
    }
    const int i = holes[0], j = holes[1], a = parts[0], b = parts[1];
    std::uint64_t m = mj;
    double sign = detail::annihilate(m, i);
    sign *= detail::annihilate(m, j);
    sign *= detail::create(m, b);
    sign *= detail::create(m, a);
    return sign * (detail::spin_eri(f, a, b, i, j) - detail::spin_eri(f, a, b, j, i));
}

/// All determinants with the given alpha and beta counts, ordered by (alpha, beta).
inline std::vector<Determinant> fci_space(int norb, int nalpha, int nbeta) {
    if (norb < 1 || norb > 32 || nalpha < 0 || nbeta < 0 || nalpha > norb || nbeta > norb) {
        throw ArgumentError("invalid FCI space");
    }
    std::vector<std::uint64_t> strings[2];
    const int counts[2] = {nalpha, nbeta};
    for (int s = 0; s < 2; ++s) {
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << norb); ++m) {
            if (std::popcount(m) == counts[s]) strings[s].push_back(m);
        }
    }
    std::vector<Determinant> out;
    for (auto a : strings[0]) {
        for (auto b : strings[1]) out.push_back(Determinant{a, b});
    }
    return out;
}

inline std::vector<Determinant> fci_space(const FciData &f) {
    return fci_space(f.norb(), f.nalpha(), f.nbeta());
}

inline constexpr std::size_t kMaxDenseDimension = 4000;

inline Eigen::MatrixXd hamiltonian_matrix(const std::vector<Determinant> &dets, const FciData &f) {
    const auto n = static_cast<Eigen::Index>(dets.size());
    Eigen::MatrixXd h(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double v = slater_condon(dets[static_cast<std::size_t>(i)], dets[static_cast<std::size_t>(j)], f);
            h(i, j) = v;
            h(j, i) = v;
        }
    }
    return h;
}

struct GroundState {
    double energy = 0.0;
    Eigen::VectorXd vector;
};

/// Lowest eigenpair of H projected onto span(dets).
inline GroundState project_and_diagonalize(const std::vector<Determinant> &dets, const FciData &f) {
    if (dets.empty()) {
        throw ArgumentError("empty determinant subspace");
    }
    if (dets.size() > kMaxDenseDimension) {
        throw ArgumentError("subspace dimension exceeds the dense limit of 4000");
    }
    if (std::set<Determinant>(dets.begin(), dets.end()).size() != dets.size()) {
        throw ArgumentError("determinants must be distinct");
    }
    for (const auto &d : dets) {
        const std::uint64_t low = (std::uint64_t{1} << f.norb()) - 1;
        if ((d.alpha & ~low) || (d.beta & ~low)) throw ArgumentError("determinant uses orbitals beyond norb");
    }
    const auto h = hamiltonian_matrix(dets, f);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success) {
        throw NumericalError("eigensolver failed");
    }
    GroundState g{es.eigenvalues()(0), es.eigenvectors().col(0)};
    // Fix the sign so the largest component is positive.
    Eigen::Index k = 0;
    g.vector.cwiseAbs().maxCoeff(&k);
    if (g.vector(k) < 0) g.vector = -g.vector;
    return g;
}

}  // namespace mdd
