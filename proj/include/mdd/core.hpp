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

// Dense states and fidelity functionals for small qubit registers.
//
// Ordering convention: qubit 0 is the leftmost tensor factor, i.e. the most
// significant bit of a basis index. For N qubits, qubit q sits at bit
// position (N - 1 - q), so |q0 q1 ... q_{N-1}> has index sum_q q_k 2^(N-1-k).

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "mdd/errors.hpp"
#include "mdd/rng.hpp"

namespace mdd {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Mat2 = Eigen::Matrix2cd;

inline constexpr int kMaxPureQubits = 12;
inline constexpr int kMaxMixedQubits = 10;
inline constexpr double kPi = 3.14159265358979323846;

namespace detail {

inline int qubits_for_dim(Eigen::Index dim) {
    int n = 0;
    while ((Eigen::Index{1} << n) < dim) {
        ++n;
    }
    if ((Eigen::Index{1} << n) != dim || n < 1) {
        throw ArgumentError("dimension " + std::to_string(dim) + " is not 2^N with N >= 1");
    }
    return n;
}

inline int bit_of(int num_qubits, int qubit) {
    return num_qubits - 1 - qubit;
}

inline void check_qubits(int num_qubits, std::span<const int> qubits) {
    std::vector<bool> seen(static_cast<std::size_t>(num_qubits), false);
    for (int q : qubits) {
        if (q < 0 || q >= num_qubits) {
            throw ArgumentError("qubit index " + std::to_string(q) + " out of range [0, " +
                                std::to_string(num_qubits) + ")");
        }
        if (seen[static_cast<std::size_t>(q)]) {
            throw ArgumentError("duplicate qubit index " + std::to_string(q));
        }
        seen[static_cast<std::size_t>(q)] = true;
    }
}

/// Hermitian square root. Eigenvalues at or below `floor` are set to zero so
/// that roundoff in rank-deficient inputs is not amplified by the root.
inline Matrix psd_sqrt(const Matrix &m, double floor = 0.0) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
    Eigen::VectorXd ev = es.eigenvalues().unaryExpr([floor](double v) { return v > floor ? std::sqrt(v) : 0.0; });
    return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// Multiplies `m` on the left by `op` acting on `qubits` (op's first qubit is
/// its most significant bit), leaving the other tensor factors untouched.
inline void apply_left(Matrix &m, const Matrix &op, std::span<const int> qubits, int num_qubits) {
    const int k = static_cast<int>(qubits.size());
    const Eigen::Index sub = Eigen::Index{1} << k;
    if (op.rows() != sub || op.cols() != sub) {
        throw ArgumentError("operator size does not match qubit count");
    }
    detail::check_qubits(num_qubits, qubits);
    std::uint64_t mask = 0;
    std::vector<std::uint64_t> offsets(static_cast<std::size_t>(sub), 0);
    for (int j = 0; j < k; ++j) {
        const std::uint64_t b = std::uint64_t{1} << detail::bit_of(num_qubits, qubits[j]);
        mask |= b;
        for (Eigen::Index s = 0; s < sub; ++s) {
            if ((s >> (k - 1 - j)) & 1) {
                offsets[static_cast<std::size_t>(s)] |= b;
            }
        }
    }
    const std::uint64_t dim = std::uint64_t{1} << num_qubits;
    std::vector<cplx> in(static_cast<std::size_t>(sub));
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        for (std::uint64_t base = 0; base < dim; ++base) {
            if (base & mask) {
                continue;
            }
            for (Eigen::Index s = 0; s < sub; ++s) {
                in[static_cast<std::size_t>(s)] = m(static_cast<Eigen::Index>(base | offsets[s]), c);
            }
            for (Eigen::Index r = 0; r < sub; ++r) {
                cplx acc = 0.0;
                for (Eigen::Index s = 0; s < sub; ++s) {
                    acc += op(r, s) * in[static_cast<std::size_t>(s)];
                }
                m(static_cast<Eigen::Index>(base | offsets[r]), c) = acc;
            }
        }
    }
}

/// Returns op_local * m * op_local^dagger with op acting on `qubits`.
inline Matrix conjugate_local(const Matrix &m, const Matrix &op, std::span<const int> qubits, int num_qubits) {
    Matrix left = m;
    apply_left(left, op, qubits, num_qubits);
    Matrix t = left.adjoint();
    apply_left(t, op, qubits, num_qubits);
    return t.adjoint();
}

/// Embeds a local operator into the full 2^N space.
inline Matrix embed(const Matrix &op, std::span<const int> qubits, int num_qubits) {
    Matrix full = Matrix::Identity(Eigen::Index{1} << num_qubits, Eigen::Index{1} << num_qubits);
    apply_left(full, op, qubits, num_qubits);
    return full;
}

class PureState {
   public:
    explicit PureState(Vector amplitudes) : amps_(std::move(amplitudes)) {
        n_ = detail::qubits_for_dim(amps_.size());
        if (n_ > kMaxPureQubits) {
            throw ArgumentError("pure states are limited to 12 qubits");
        }
        if (std::abs(amps_.norm() - 1.0) > 1e-12) {
            throw ArgumentError("state vector is not normalized");
        }
    }

    /// Normalizes before validating.
    static PureState normalized(Vector amplitudes) {
        const double nrm = amplitudes.norm();
        if (!(nrm > 0.0)) {
            throw ArgumentError("zero vector cannot be normalized");
        }
        return PureState(amplitudes / nrm);
    }

    static PureState basis(int num_qubits, std::uint64_t index) {
        Vector v = Vector::Zero(Eigen::Index{1} << num_qubits);
        v(static_cast<Eigen::Index>(index)) = 1.0;
        return PureState(std::move(v));
    }

    int num_qubits() const {
        return n_;
    }
    Eigen::Index dim() const {
        return amps_.size();
    }
    const Vector &amplitudes() const {
        return amps_;
    }
    Matrix projector() const {
        return amps_ * amps_.adjoint();
    }

   private:
    Vector amps_;
    int n_ = 0;
};

class DensityMatrix {
   public:
    /// Validating constructor: Hermitian and unit trace within 1e-12,
    /// eigenvalues >= -1e-10.
    static DensityMatrix from_matrix(const Matrix &m) {
        DensityMatrix d(m, Trusted{});
        if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
            throw ArgumentError("density matrix is not Hermitian");
        }
        if (std::abs(m.trace() - cplx(1.0)) > 1e-12) {
            throw ArgumentError("density matrix trace differs from 1");
        }
        if (d.min_eigenvalue() < -1e-10) {
            throw ArgumentError("density matrix has a negative eigenvalue");
        }
        return d;
    }

    static DensityMatrix from_pure(const PureState &psi) {
        return DensityMatrix(psi.projector(), Trusted{});
    }

    static DensityMatrix maximally_mixed(int num_qubits) {
        const Eigen::Index d = Eigen::Index{1} << num_qubits;
        return DensityMatrix(Matrix::Identity(d, d) / static_cast<double>(d), Trusted{});
    }

    /// For results of trace-preserving maps computed inside the library; only
    /// the shape is checked and the matrix is re-Hermitized.
    struct Trusted {};
    DensityMatrix(const Matrix &m, Trusted) : rho_(0.5 * (m + m.adjoint())) {
        if (rho_.rows() != rho_.cols()) {
            throw ArgumentError("density matrix must be square");
        }
        n_ = detail::qubits_for_dim(rho_.rows());
        if (n_ > kMaxMixedQubits) {
            throw ArgumentError("mixed states are limited to 10 qubits");
        }
    }

    int num_qubits() const {
        return n_;
    }
    Eigen::Index dim() const {
        return rho_.rows();
    }
    const Matrix &matrix() const {
        return rho_;
    }
    double trace() const {
        return rho_.trace().real();
    }
    double purity() const {
        return (rho_ * rho_).trace().real();
    }
    double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }
    bool is_valid(double tol = 1e-10) const {
        return std::abs(trace() - 1.0) <= tol && min_eigenvalue() >= -tol;
    }

   private:
    Matrix rho_;
    int n_ = 0;
};

struct BlochVector {
    double rx = 0.0;
    double ry = 0.0;
    double rz = 0.0;

    double r() const {
        return std::sqrt(rx * rx + ry * ry + rz * rz);
    }

    /// (I + r.sigma)/2
    DensityMatrix density() const {
        if (r() > 1.0 + 1e-12) {
            throw ArgumentError("Bloch vector longer than 1");
        }
        Mat2 m;
        m << cplx(1.0 + rz, 0.0), cplx(rx, -ry), cplx(rx, ry), cplx(1.0 - rz, 0.0);
        return DensityMatrix(Matrix(m / 2.0), DensityMatrix::Trusted{});
    }
};

namespace pauli {
inline Mat2 I() {
    return Mat2::Identity();
}
inline Mat2 X() {
    Mat2 m;
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}
inline Mat2 Y() {
    Mat2 m;
    m << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
    return m;
}
inline Mat2 Z() {
    Mat2 m;
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}
}  // namespace pauli

class SingleQubitUnitary {
   public:
    struct Angles {
        double theta = 0.0;
        double phi = 0.0;
    };

    explicit SingleQubitUnitary(const Mat2 &m, std::optional<Angles> angles = std::nullopt)
        : u_(m), angles_(angles) {
        if ((u_.adjoint() * u_ - Mat2::Identity()).cwiseAbs().maxCoeff() > 1e-12) {
            throw ArgumentError("matrix is not unitary");
        }
    }

    static SingleQubitUnitary identity() {
        return SingleQubitUnitary(pauli::I());
    }
    static SingleQubitUnitary x() {
        return SingleQubitUnitary(pauli::X());
    }
    static SingleQubitUnitary y() {
        return SingleQubitUnitary(pauli::Y());
    }
    static SingleQubitUnitary z() {
        return SingleQubitUnitary(pauli::Z());
    }
    static SingleQubitUnitary rz(double angle) {
        Mat2 m = Mat2::Zero();
        m(0, 0) = std::polar(1.0, -angle / 2.0);
        m(1, 1) = std::polar(1.0, angle / 2.0);
        return SingleQubitUnitary(m);
    }
    static SingleQubitUnitary ry(double angle) {
        const double c = std::cos(angle / 2.0);
        const double s = std::sin(angle / 2.0);
        Mat2 m;
        m << c, -s, s, c;
        return SingleQubitUnitary(m);
    }

    const Mat2 &matrix() const {
        return u_;
    }
    const std::optional<Angles> &angles() const {
        return angles_;
    }
    SingleQubitUnitary adjoint() const {
        return SingleQubitUnitary(u_.adjoint());
    }
    SingleQubitUnitary operator*(const SingleQubitUnitary &rhs) const {
        return SingleQubitUnitary(u_ * rhs.u_);
    }

    /// True when this equals e^{i phase} * other.
    bool equal_up_to_phase(const SingleQubitUnitary &other, double tol = 1e-12) const {
        const cplx overlap = (other.u_.adjoint() * u_).trace() / 2.0;
        return std::abs(std::abs(overlap) - 1.0) <= tol;
    }

   private:
    Mat2 u_;
    std::optional<Angles> angles_;
};

/// Partial trace over the complement of `keep`. The kept qubits appear in the
/// order listed.
inline DensityMatrix reduced_density(const Matrix &rho, int num_qubits, std::span<const int> keep) {
    detail::check_qubits(num_qubits, keep);
    if (keep.empty()) {
        throw ArgumentError("at least one qubit must be kept");
    }
    const int k = static_cast<int>(keep.size());
    std::vector<int> traced;
    for (int q = 0; q < num_qubits; ++q) {
        if (std::find(keep.begin(), keep.end(), q) == keep.end()) {
            traced.push_back(q);
        }
    }
    auto spread = [&](std::uint64_t value, const std::vector<int> &qs) {
        std::uint64_t idx = 0;
        const int m = static_cast<int>(qs.size());
        for (int j = 0; j < m; ++j) {
            if ((value >> (m - 1 - j)) & 1) {
                idx |= std::uint64_t{1} << detail::bit_of(num_qubits, qs[j]);
            }
        }
        return idx;
    };
    const std::vector<int> kept(keep.begin(), keep.end());
    const std::uint64_t dk = std::uint64_t{1} << k;
    const std::uint64_t de = std::uint64_t{1} << traced.size();
    std::vector<std::uint64_t> kidx(dk), eidx(de);
    for (std::uint64_t a = 0; a < dk; ++a) kidx[a] = spread(a, kept);
    for (std::uint64_t e = 0; e < de; ++e) eidx[e] = spread(e, traced);

    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
    for (std::uint64_t a = 0; a < dk; ++a) {
        for (std::uint64_t b = 0; b < dk; ++b) {
            cplx acc = 0.0;
            for (std::uint64_t e = 0; e < de; ++e) {
                acc += rho(static_cast<Eigen::Index>(kidx[a] | eidx[e]), static_cast<Eigen::Index>(kidx[b] | eidx[e]));
            }
            out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = acc;
        }
    }
    return DensityMatrix(out, DensityMatrix::Trusted{});
}

inline DensityMatrix reduced_density(const DensityMatrix &rho, std::span<const int> keep) {
    return reduced_density(rho.matrix(), rho.num_qubits(), keep);
}

inline DensityMatrix reduced_density(const PureState &psi, std::span<const int> keep) {
    if (psi.num_qubits() > kMaxMixedQubits) {
        // Reduce directly from the amplitudes to avoid the 4^N projector.
        detail::check_qubits(psi.num_qubits(), keep);
        const int n = psi.num_qubits();
        const int k = static_cast<int>(keep.size());
        const std::uint64_t dk = std::uint64_t{1} << k;
        Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
        std::uint64_t kmask = 0;
        for (int q : keep) kmask |= std::uint64_t{1} << detail::bit_of(n, q);
        // Group amplitudes by environment bits.
        std::vector<std::pair<std::uint64_t, std::pair<std::uint64_t, cplx>>> entries;
        for (Eigen::Index i = 0; i < psi.dim(); ++i) {
            const auto idx = static_cast<std::uint64_t>(i);
            std::uint64_t a = 0;
            for (int j = 0; j < k; ++j) {
                if ((idx >> detail::bit_of(n, keep[j])) & 1) a |= std::uint64_t{1} << (k - 1 - j);
            }
            entries.push_back({idx & ~kmask, {a, psi.amplitudes()(i)}});
        }
        std::sort(entries.begin(), entries.end(),
                  [](const auto &l, const auto &r) { return l.first < r.first; });
        std::size_t s = 0;
        while (s < entries.size()) {
            std::size_t e = s;
            while (e < entries.size() && entries[e].first == entries[s].first) ++e;
            for (std::size_t u = s; u < e; ++u) {
                for (std::size_t v = s; v < e; ++v) {
                    out(static_cast<Eigen::Index>(entries[u].second.first),
                        static_cast<Eigen::Index>(entries[v].second.first)) +=
                        entries[u].second.second * std::conj(entries[v].second.second);
                }
            }
            s = e;
        }
        return DensityMatrix(out, DensityMatrix::Trusted{});
    }
    return reduced_density(psi.projector(), psi.num_qubits(), keep);
}

inline BlochVector bloch_vector(const DensityMatrix &rho) {
    if (rho.num_qubits() != 1) {
        throw ArgumentError("Bloch vector requires a single-qubit state");
    }
    const Matrix &m = rho.matrix();
    return BlochVector{(m * pauli::X()).trace().real(), (m * pauli::Y()).trace().real(),
                       (m * pauli::Z()).trace().real()};
}

/// Uhlmann fidelity (Tr sqrt(sqrt(X) Y sqrt(X)))^2.
inline double fidelity(const DensityMatrix &x, const DensityMatrix &y) {
    if (x.dim() != y.dim()) {
        throw ArgumentError("fidelity: dimension mismatch");
    }
    // Tr sqrt(sqrt(X) Y sqrt(X)) is the trace norm of sqrt(X) sqrt(Y).
    constexpr double floor = 64.0 * std::numeric_limits<double>::epsilon();
    const Matrix prod = detail::psd_sqrt(x.matrix(), floor) * detail::psd_sqrt(y.matrix(), floor);
    const double tr = Eigen::JacobiSVD<Matrix>(prod).singularValues().sum();
    return std::clamp(tr * tr, 0.0, 1.0);
}

/// <psi| rho |psi> for the channel output rho.
inline double entanglement_fidelity(const PureState &psi, const DensityMatrix &channel_output) {
    if (psi.dim() != channel_output.dim()) {
        throw ArgumentError("entanglement_fidelity: dimension mismatch");
    }
    const Vector &a = psi.amplitudes();
    return std::clamp(a.dot(channel_output.matrix() * a).real(), 0.0, 1.0);
}

inline Vector gaussian_vector(Eigen::Index dim, Rng &rng) {
    Vector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const double re = standard_normal(rng);
        const double im = standard_normal(rng);
        v(i) = cplx(re, im);
    }
    return v;
}

inline PureState haar_random_state(int num_qubits, Rng &rng) {
    if (num_qubits < 1 || num_qubits > kMaxPureQubits) {
        throw ArgumentError("haar_random_state: qubit count must be in [1, 12]");
    }
    return PureState::normalized(gaussian_vector(Eigen::Index{1} << num_qubits, rng));
}

inline PureState haar_random_state(int num_qubits, std::uint64_t seed) {
    Rng rng(seed);
    return haar_random_state(num_qubits, rng);
}

/// Haar unitary: QR of a complex Ginibre matrix with the R-diagonal phases removed.
inline Matrix haar_random_unitary(Eigen::Index dim, Rng &rng) {
    Matrix g(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
        g.col(c) = gaussian_vector(dim, rng);
    }
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index c = 0; c < dim; ++c) {
        const cplx d = r(c, c);
        q.col(c) *= std::abs(d) > 0.0 ? d / std::abs(d) : cplx(1.0);
    }
    return q;
}

inline SingleQubitUnitary haar_random_single_qubit(Rng &rng) {
    Mat2 m = haar_random_unitary(2, rng);
    // Re-orthonormalize to push the unitarity error well below 1e-12.
    Eigen::HouseholderQR<Mat2> qr(m);
    Mat2 q = qr.householderQ();
    const Mat2 r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < 2; ++c) q.col(c) *= r(c, c) / std::abs(r(c, c));
    return SingleQubitUnitary(q);
}

/// Random single-qubit mixed state with Bloch norm drawn uniformly in [rmin, rmax].
inline DensityMatrix random_mixed_qubit(Rng &rng, double rmin = 0.05, double rmax = 0.95) {
    const double r = rmin + (rmax - rmin) * uniform01(rng);
    double x = standard_normal(rng), y = standard_normal(rng), z = standard_normal(rng);
    const double n = std::sqrt(x * x + y * y + z * z);
    return BlochVector{r * x / n, r * y / n, r * z / n}.density();
}

/// Two-qubit purification sqrt(l1)|e1>|0> + sqrt(l2)|e2>|1>; qubit 0 carries sigma.
inline PureState purify_qubit(const DensityMatrix &sigma) {
    if (sigma.num_qubits() != 1) {
        throw ArgumentError("purify_qubit expects a single-qubit state");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(sigma.matrix());
    Vector psi = Vector::Zero(4);
    for (int k = 0; k < 2; ++k) {
        const double lam = std::max(es.eigenvalues()(k), 0.0);
        const Vector e = es.eigenvectors().col(k);
        // |e>_0 |k>_1 : index = 2*bit0 + bit1
        psi(0 * 2 + k) += std::sqrt(lam) * e(0);
        psi(1 * 2 + k) += std::sqrt(lam) * e(1);
    }
    return PureState::normalized(psi);
}

}  // namespace mdd
