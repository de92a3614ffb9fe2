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

// Filter-function treatment of classical random dephasing.
//
// For n instantaneous pi pulses at 0 < t_1 < ... < t_n < t the coherence decays
// as exp(-chi(t)) with
//   chi(t) = (2/pi) int_0^inf S(w)/w F(w t) dw,
//   F(w t) = |1 + (-1)^(n+1) e^{i w t} + 2 sum_j (-1)^j e^{i w t_j}|^2.
// The phasor sum has zero net weight, so it is evaluated as
// sum_k c_k (e^{i w tau_k} - 1), which stays accurate as w -> 0 and gives the
// exact w -> 0 limit of F/w^2 needed by the 1/f integrand.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "mdd/core.hpp"

namespace mdd {

enum class SpectrumKind { Ohmic, OneOverF };

inline constexpr double kDefaultOmegaC = 0.1;  // µs^-1

struct SpectralDensity {
    SpectrumKind kind = SpectrumKind::Ohmic;
    double omega_c = kDefaultOmegaC;

    SpectralDensity(SpectrumKind k = SpectrumKind::Ohmic, double wc = kDefaultOmegaC) : kind(k), omega_c(wc) {
        if (!(omega_c > 0.0)) {
            throw ArgumentError("cutoff frequency must be positive");
        }
    }

    /// S(w): w e^{-(w/wc)^2} (Ohmic) or w^{-1} e^{-(w/wc)^2} (1/f).
    double operator()(double w) const {
        const double g = std::exp(-(w / omega_c) * (w / omega_c));
        return kind == SpectrumKind::Ohmic ? w * g : g / w;
    }
};

namespace detail {

struct Phasors {
    std::vector<double> coeff;
    std::vector<double> tau;
};

inline Phasors filter_phasors(std::span<const double> pulse_times, double t) {
    if (!(t > 0.0)) {
        throw ArgumentError("filter function needs t > 0");
    }
    for (std::size_t j = 0; j < pulse_times.size(); ++j) {
        if (!(pulse_times[j] > 0.0 && pulse_times[j] < t)) {
            throw ArgumentError("pulse times must lie strictly inside (0, t)");
        }
        if (j > 0 && !(pulse_times[j] > pulse_times[j - 1])) {
            throw ArgumentError("pulse times must be strictly increasing");
        }
    }
    Phasors ph;
    const auto n = pulse_times.size();
    // tau = 0 contributes e^0 - 1 = 0 and is dropped.
    ph.coeff.push_back(n % 2 == 0 ? -1.0 : 1.0);
    ph.tau.push_back(t);
    for (std::size_t j = 0; j < n; ++j) {
        ph.coeff.push_back((j + 1) % 2 == 0 ? 2.0 : -2.0);
        ph.tau.push_back(pulse_times[j]);
    }
    return ph;
}

inline double sinc(double x) {
    return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
}

/// sum_k c_k (e^{i w tau_k} - 1) / w, finite at w = 0.
inline cplx phasor_sum_over_omega(const Phasors &ph, double w) {
    cplx acc = 0.0;
    for (std::size_t k = 0; k < ph.tau.size(); ++k) {
        const double half = 0.5 * w * ph.tau[k];
        acc += ph.coeff[k] * cplx(0.0, ph.tau[k]) * std::polar(1.0, half) * sinc(half);
    }
    return acc;
}

}  // namespace detail

inline double filter_function(std::span<const double> pulse_times, double t, double omega) {
    const auto ph = detail::filter_phasors(pulse_times, t);
    cplx g = 0.0;
    for (std::size_t k = 0; k < ph.tau.size(); ++k) {
        const double half = 0.5 * omega * ph.tau[k];
        g += ph.coeff[k] * cplx(0.0, 2.0) * std::polar(1.0, half) * std::sin(half);
    }
    return std::norm(g);
}

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-12;
    std::size_t max_intervals = 200000;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t intervals = 0;
};

namespace detail {

struct GkSegment {
    double lo, hi, value, error;
    bool operator<(const GkSegment &o) const {
        return error < o.error;
    }
};

template <class F>
GkSegment gauss_kronrod15(const F &f, double lo, double hi) {
    static constexpr std::array<double, 8> xk = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                                 0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                                 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                                 0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
    static constexpr std::array<double, 8> wk = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                                 0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                                 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                                 0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr std::array<double, 4> wg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                                 0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    const double fc = f(c);
    double k = wk[7] * fc;
    double g = wg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double f1 = f(c - h * xk[j]);
        const double f2 = f(c + h * xk[j]);
        k += wk[j] * (f1 + f2);
        if (j % 2 == 1) {
            g += wg[j / 2] * (f1 + f2);
        }
    }
    return GkSegment{lo, hi, k * h, std::abs((k - g) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) on [lo, hi], starting from `pieces`
/// equal panels. Throws NumericalError when the interval budget runs out.
template <class F>
QuadratureResult integrate_adaptive(const F &f, double lo, double hi, std::size_t pieces,
                                    const QuadratureOptions &opt = {}) {
    std::priority_queue<detail::GkSegment> heap;
    double total = 0.0, err = 0.0;
    pieces = std::max<std::size_t>(pieces, 1);
    const double w = (hi - lo) / static_cast<double>(pieces);
    for (std::size_t i = 0; i < pieces; ++i) {
        auto seg = detail::gauss_kronrod15(f, lo + w * static_cast<double>(i),
                                           i + 1 == pieces ? hi : lo + w * static_cast<double>(i + 1));
        total += seg.value;
        err += seg.error;
        heap.push(seg);
    }
    while (err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        if (heap.size() >= opt.max_intervals) {
            std::ostringstream os;
            os << "adaptive quadrature did not converge: estimate " << total << ", error " << err << " after "
               << heap.size() << " intervals on [" << lo << ", " << hi << "]";
            throw NumericalError(os.str());
        }
        const auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        const auto left = detail::gauss_kronrod15(f, worst.lo, mid);
        const auto right = detail::gauss_kronrod15(f, mid, worst.hi);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed accumulated update roundoff.
    double sum = 0.0, esum = 0.0;
    const std::size_t count = heap.size();
    while (!heap.empty()) {
        sum += heap.top().value;
        esum += heap.top().error;
        heap.pop();
    }
    return QuadratureResult{sum, esum, count};
}

/// chi(t) for the given pi-pulse times. The integral is truncated at
/// 10 * omega_c where the Gaussian cutoff is below 1e-43.
inline QuadratureResult chi_integral_detailed(const SpectralDensity &spectrum, std::span<const double> pulse_times,
                                              double t, const QuadratureOptions &opt = {}) {
    const auto ph = detail::filter_phasors(pulse_times, t);
    const double wc = spectrum.omega_c;
    auto integrand = [&](double w) {
        const double x = w / wc;
        const cplx g = detail::phasor_sum_over_omega(ph, w);
        const double cutoff = std::exp(-x * x);
        // Ohmic: S/w = e^{-x^2}, integrand e^{-x^2} |g|^2 = e^{-x^2} w^2 |g/w|^2.
        // 1/f:   S/w = e^{-x^2} / w^2, integrand e^{-x^2} |g/w|^2.
        return spectrum.kind == SpectrumKind::Ohmic ? cutoff * w * w * std::norm(g) : cutoff * std::norm(g);
    };
    const double upper = 10.0 * wc;
    // One panel per half oscillation of the fastest phasor keeps the start-up
    // estimate honest for long windows.
    const auto pieces = static_cast<std::size_t>(std::ceil(upper * t / kPi)) + 8;
    auto res = integrate_adaptive(integrand, 0.0, upper, pieces, opt);
    res.value *= 2.0 / kPi;
    res.error_estimate *= 2.0 / kPi;
    res.value = std::max(res.value, 0.0);
    return res;
}

inline double chi_integral(const SpectralDensity &spectrum, std::span<const double> pulse_times, double t,
                           const QuadratureOptions &opt = {}) {
    return chi_integral_detailed(spectrum, pulse_times, t, opt).value;
}

/// Least-squares slope of log F against log w over the given frequencies.
inline double filter_loglog_slope(std::span<const double> pulse_times, double t, std::span<const double> omegas) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(omegas.size());
    for (double w : omegas) {
        const double x = std::log(w);
        const double y = std::log(filter_function(pulse_times, t, w));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace mdd
