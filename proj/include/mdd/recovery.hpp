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

// Self-consistent configuration recovery for sample-based diagonalization.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mdd/determinant.hpp"
#include "mdd/parallel.hpp"
#include "mdd/rng.hpp"

namespace mdd {

inline constexpr double kDefaultDelta = 0.01;

/// Piecewise-linear weight: (delta/h) y below h, then linear up to w(1) = 1.
inline double weight_w(double y, double h, double delta = kDefaultDelta) {
    if (!(h > 0.0 && h < 1.0)) {
        throw ArgumentError("filling factor must lie in (0, 1)");
    }
    if (!(y >= 0.0 && y <= 1.0)) {
        throw ArgumentError("weight argument must lie in [0, 1]");
    }
    if (y <= h) {
        return delta / h * y;
    }
    return delta + (1.0 - delta) * (y - h) / (1.0 - h);
}

/// Spin-orbital occupancies, alpha 0..norb-1 then beta 0..norb-1.
struct OccupancyVector {
    std::vector<double> n;
};

namespace detail {

/// Flips bits of one spin sector until it holds `target` electrons. Candidates
/// are drawn one at a time with probability proportional to
/// w(|x_i - n_i|), without replacement; a zero-weight pool falls back to
/// uniform choice.
inline std::uint64_t recover_sector(std::uint64_t bits, std::span<const double> occ, int norb, int target,
                                    double delta, Rng &rng) {
    if (target < 0 || target > norb) {
        throw ArgumentError("cannot reach the target electron count in this sector");
    }
    int count = std::popcount(bits);
    if (count == target) return bits;
    const bool add = count < target;
    const double h = static_cast<double>(target) / norb;
    const bool flat = !(h > 0.0 && h < 1.0);
    std::vector<int> cand;
    std::vector<double> w;
    for (int p = 0; p < norb; ++p) {
        const bool set = (bits >> p) & 1;
        if (set == add) continue;
        cand.push_back(p);
        const double x = set ? 1.0 : 0.0;
        w.push_back(flat ? 1.0 : weight_w(std::clamp(std::abs(x - occ[static_cast<std::size_t>(p)]), 0.0, 1.0), h, delta));
    }
    while (count != target) {
        double total = 0.0;
        for (double v : w) total += v;
        std::size_t pick = 0;
        if (total > 0.0) {
            const double u = uniform01(rng) * total;
            double acc = 0.0;
            pick = w.size() - 1;
            for (std::size_t k = 0; k < w.size(); ++k) {
                acc += w[k];
                if (u < acc && w[k] > 0.0) {
                    pick = k;
                    break;
                }
            }
            while (w[pick] <= 0.0) --pick;
        } else {
            pick = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(w.size()));
            pick = std::min(pick, w.size() - 1);
        }
        bits ^= std::uint64_t{1} << cand[pick];
        cand.erase(cand.begin() + static_cast<std::ptrdiff_t>(pick));
        w.erase(w.begin() + static_cast<std::ptrdiff_t>(pick));
        count += add ? 1 : -1;
    }
    return bits;
}

}  // namespace detail

/// Restores the alpha and beta electron counts of `x` using occupancies `n`.
inline Determinant recover_configuration(const Determinant &x, const OccupancyVector &n, int norb, int nalpha,
                                         int nbeta, Rng &rng, double delta = kDefaultDelta) {
    if (static_cast<int>(n.n.size()) != 2 * norb) {
        throw ArgumentError("occupancy vector length must be 2 * norb");
    }
    const std::span<const double> occ(n.n);
    return Determinant{detail::recover_sector(x.alpha, occ.subspan(0, static_cast<std::size_t>(norb)), norb, nalpha, delta, rng),
                       detail::recover_sector(x.beta, occ.subspan(static_cast<std::size_t>(norb)), norb, nbeta, delta, rng)};
}

struct RecoveryConfig {
    int iterations = 5;
    int batches = 10;
    int samples_per_batch = 300;
    double delta = kDefaultDelta;
    std::uint64_t seed = 0;
    unsigned jobs = 1;

    void validate() const {
        if (iterations < 1 || batches < 1 || samples_per_batch < 1) {
            throw ArgumentError("iterations, batches and samples per batch must be positive");
        }
        if (!(delta > 0.0 && delta < 1.0)) {
            throw ArgumentError("delta must lie in (0, 1)");
        }
    }
};

struct IterationReport {
    int iteration = 0;
    std::vector<double> energies;  // one per batch
    std::vector<std::size_t> dimensions;
    double mean_energy = 0.0;
    std::size_t valid_configurations = 0;  // size of the pool batches were drawn from
    std::size_t recovered = 0;             // corrupted samples restored this iteration
    OccupancyVector occupancy;
};

struct RecoveryReport {
    bool ok = true;
    std::string status = "ok";
    std::optional<double> reference_energy;
    std::vector<IterationReport> iterations;
    std::string flip_sampler = "sequential weighted sampling without replacement, per spin sector";
    std::string occupancy_average = "unweighted mean over batches";

    double mean_abs_error(std::size_t it) const {
        const auto &r = iterations.at(it);
        double s = 0.0;
        for (double e : r.energies) s += std::abs(e - reference_energy.value());
        return s / static_cast<double>(r.energies.size());
    }
};

namespace detail {

struct BatchResult {
    double energy = 0.0;
    std::size_t dim = 0;
    std::vector<double> occ;
};

inline BatchResult run_batch(const std::vector<Determinant> &pool, const FciData &f, int samples, Rng &rng) {
    // Draw without replacement from the multiset, keep distinct determinants.
    std::vector<std::size_t> idx(pool.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(samples), pool.size());
    for (std::size_t i = 0; i < take; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(idx.size() - i));
        std::swap(idx[i], idx[std::min(j, idx.size() - 1)]);
    }
    std::set<Determinant> uniq;
    for (std::size_t i = 0; i < take; ++i) uniq.insert(pool[idx[i]]);
    const std::vector<Determinant> dets(uniq.begin(), uniq.end());
    const auto g = project_and_diagonalize(dets, f);
    BatchResult r{g.energy, dets.size(), std::vector<double>(static_cast<std::size_t>(2 * f.norb()), 0.0)};
    for (std::size_t k = 0; k < dets.size(); ++k) {
        const double p = g.vector(static_cast<Eigen::Index>(k)) * g.vector(static_cast<Eigen::Index>(k));
        for (int o = 0; o < f.norb(); ++o) {
            if ((dets[k].alpha >> o) & 1) r.occ[static_cast<std::size_t>(o)] += p;
            if ((dets[k].beta >> o) & 1) r.occ[static_cast<std::size_t>(f.norb() + o)] += p;
        }
    }
    return r;
}

}  // namespace detail

/// Iteration 0 diagonalizes batches of the symmetry-preserving samples; later
/// iterations also restore the corrupted samples with the current occupancy
/// vector and merge them into the pool.
inline RecoveryReport self_consistent_recovery(const std::vector<Determinant> &samples, const FciData &f,
                                               const RecoveryConfig &cfg,
                                               std::optional<double> reference = std::nullopt) {
    cfg.validate();
    if (samples.empty()) {
        throw ArgumentError("no samples");
    }
    RecoveryReport rep;
    rep.reference_energy = reference;
    std::vector<Determinant> correct, corrupted;
    for (const auto &s : samples) {
        (s.n_alpha() == f.nalpha() && s.n_beta() == f.nbeta() ? correct : corrupted).push_back(s);
    }
    if (correct.empty()) {
        rep.ok = false;
        rep.status = "no configurations with the target particle numbers at iteration 0";
        return rep;
    }
    OccupancyVector occ;
    for (int it = 0; it < cfg.iterations; ++it) {
        std::vector<Determinant> pool = correct;
        std::size_t recovered = 0;
        if (it > 0) {
            const auto fixed = parallel_map(corrupted.size(), cfg.jobs, [&](std::size_t k) {
                auto rng = make_rng(cfg.seed, {static_cast<std::uint64_t>(it), 0xC0FFEEULL, k});
                return recover_configuration(corrupted[k], occ, f.norb(), f.nalpha(), f.nbeta(), rng, cfg.delta);
            });
            pool.insert(pool.end(), fixed.begin(), fixed.end());
            recovered = fixed.size();
        }
        const auto results = parallel_map(static_cast<std::size_t>(cfg.batches), cfg.jobs, [&](std::size_t b) {
            auto rng = make_rng(cfg.seed, {static_cast<std::uint64_t>(it), b});
            return detail::run_batch(pool, f, cfg.samples_per_batch, rng);
        });
        IterationReport r;
        r.iteration = it;
        r.valid_configurations = pool.size();
        r.recovered = recovered;
        r.occupancy.n.assign(static_cast<std::size_t>(2 * f.norb()), 0.0);
        for (const auto &b : results) {
            r.energies.push_back(b.energy);
            r.dimensions.push_back(b.dim);
            r.mean_energy += b.energy / static_cast<double>(results.size());
            for (std::size_t o = 0; o < b.occ.size(); ++o) r.occupancy.n[o] += b.occ[o] / static_cast<double>(results.size());
        }
        occ = r.occupancy;
        rep.iterations.push_back(std::move(r));
    }
    return rep;
}

/// Samples determinants with probability |c_k|^2 and flips every spin-orbital
/// bit independently with probability `flip_rate`.
inline std::vector<Determinant> noisy_sampler(const Eigen::VectorXd &ground, const std::vector<Determinant> &dets,
                                              int norb, double flip_rate, std::uint64_t shots, std::uint64_t seed) {
    if (!(flip_rate >= 0.0 && flip_rate < 1.0)) {
        throw ArgumentError("flip rate must lie in [0, 1)");
    }
    if (static_cast<std::size_t>(ground.size()) != dets.size() || dets.empty()) {
        throw ArgumentError("amplitudes and determinants differ in length");
    }
    std::vector<double> cdf(dets.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < dets.size(); ++k) {
        acc += ground(static_cast<Eigen::Index>(k)) * ground(static_cast<Eigen::Index>(k));
        cdf[k] = acc;
    }
    auto rng = make_rng(seed, {0x5A3D1E5ULL});
    std::vector<Determinant> out;
    out.reserve(shots);
    for (std::uint64_t s = 0; s < shots; ++s) {
        auto it = std::upper_bound(cdf.begin(), cdf.end(), uniform01(rng) * acc);
        if (it == cdf.end()) --it;
        std::uint64_t m = dets[static_cast<std::size_t>(it - cdf.begin())].spin_mask(norb);
        for (int p = 0; p < 2 * norb; ++p) {
            if (uniform01(rng) < flip_rate) m ^= std::uint64_t{1} << p;
        }
        out.push_back(Determinant::from_spin_mask(m, norb));
    }
    return out;
}

inline std::string recovery_csv(const RecoveryReport &rep) {
    std::ostringstream os;
    os.precision(17);
    os << "iteration,batch,E0,abs_error\n";
    for (const auto &it : rep.iterations) {
        for (std::size_t b = 0; b < it.energies.size(); ++b) {
            os << it.iteration << ',' << b << ',' << it.energies[b] << ',';
            if (rep.reference_energy) os << std::abs(it.energies[b] - *rep.reference_energy);
            os << '\n';
        }
    }
    return os.str();
}

inline nlohmann::json to_json(const RecoveryReport &rep) {
    nlohmann::json j;
    j["ok"] = rep.ok;
    j["status"] = rep.status;
    j["reference_energy"] = rep.reference_energy ? nlohmann::json(*rep.reference_energy) : nlohmann::json(nullptr);
    j["flip_sampler"] = rep.flip_sampler;
    j["occupancy_average"] = rep.occupancy_average;
    auto its = nlohmann::json::array();
    for (const auto &it : rep.iterations) {
        its.push_back({{"iteration", it.iteration},
                       {"energies", it.energies},
                       {"dimensions", it.dimensions},
                       {"mean_energy", it.mean_energy},
                       {"pool_size", it.valid_configurations},
                       {"recovered", it.recovered},
                       {"occupancy", it.occupancy.n}});
    }
    j["iterations"] = its;
    return j;
}

}  // namespace mdd
