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

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <optional>
#include <string>

#include "mdd/recovery.hpp"

using namespace mdd;

namespace {

std::string data(const std::string &name) {
    return std::string(MDD_DATA_DIR) + "/" + name;
}

const char *kH2 = R"(&FCI NORB=2,NELEC=2,MS2=0,
 ORBSYM=1,1,
 ISYM=1,
&END
  0.6746 1 1 1 1
  0.1813 2 1 2 1
  0.6636 2 2 1 1
  0.6975 2 2 2 2
 -1.2528 1 1 0 0
 -0.4759 2 2 0 0
  0.7137 0 0 0 0
)";

// Brute-force Fock space. Mode p is bit p; the basis state with bits
// p1 < p2 < ... is a+_{p1} a+_{p2} ... |vac>.
struct Op {
    bool create;
    int mode;
};

std::optional<std::pair<double, std::uint64_t>> apply_string(const std::vector<Op> &ops, std::uint64_t state) {
    double sign = 1.0;
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
        const bool occ = (state >> it->mode) & 1;
        if (occ == it->create) return std::nullopt;
        int below = 0;
        for (int q = 0; q < it->mode; ++q) below += (state >> q) & 1;
        if (below % 2) sign = -sign;
        state ^= std::uint64_t{1} << it->mode;
    }
    return std::make_pair(sign, state);
}

Eigen::MatrixXd fock_hamiltonian(const FciData &f) {
    const int n = f.norb(), m = 2 * n;
    const int dim = 1 << m;
    Eigen::MatrixXd H = f.core_energy() * Eigen::MatrixXd::Identity(dim, dim);
    auto hs = [&](int p, int q) { return (p < n) == (q < n) ? f.h(p % n, q % n) : 0.0; };
    auto g = [&](int p, int q, int r, int s) {
        return ((p < n) == (r < n) && (q < n) == (s < n)) ? f.eri(p % n, r % n, q % n, s % n) : 0.0;
    };
    for (int col = 0; col < dim; ++col) {
        for (int p = 0; p < m; ++p) {
            for (int q = 0; q < m; ++q) {
                if (hs(p, q) == 0.0) continue;
                if (auto r = apply_string({{true, p}, {false, q}}, col)) H(r->second, col) += hs(p, q) * r->first;
            }
        }
        for (int p = 0; p < m; ++p) {
            for (int q = 0; q < m; ++q) {
                for (int r = 0; r < m; ++r) {
                    for (int s = 0; s < m; ++s) {
                        const double v = g(p, q, r, s);
                        if (v == 0.0) continue;
                        if (auto o = apply_string({{true, p}, {true, q}, {false, s}, {false, r}}, col)) {
                            H(o->second, col) += 0.5 * v * o->first;
                        }
                    }
                }
            }
        }
    }
    return H;
}

FciData random_fci(int norb, int nelec, std::uint64_t seed) {
    Rng rng(seed);
    FciData f(norb, nelec, nelec % 2);
    for (int p = 0; p < norb; ++p) {
        for (int q = 0; q <= p; ++q) {
            f.set_h(p, q, standard_normal(rng));
            for (int r = 0; r < norb; ++r) {
                for (int s = 0; s <= r; ++s) f.set_eri(p, q, r, s, 0.3 * standard_normal(rng));
            }
        }
    }
    f.set_core_energy(0.25);
    return f;
}

}  // namespace

TEST(Fcidump, MinimalFile) {
    const auto f = parse_fcidump(kH2);
    EXPECT_EQ(f.norb(), 2);
    EXPECT_EQ(f.nelec(), 2);
    EXPECT_EQ(f.ms2(), 0);
    EXPECT_DOUBLE_EQ(f.core_energy(), 0.7137);
    EXPECT_DOUBLE_EQ(f.h(0, 0), -1.2528);
    EXPECT_DOUBLE_EQ(f.eri(1, 0, 1, 0), 0.1813);
    EXPECT_DOUBLE_EQ(f.eri(0, 1, 0, 1), 0.1813);
    EXPECT_DOUBLE_EQ(f.eri(1, 0, 0, 1), 0.1813);
    EXPECT_DOUBLE_EQ(f.eri(0, 0, 1, 1), 0.6636);
    EXPECT_EQ(f.symmetry_error(), 0.0);
}

TEST(Fcidump, RoundTrip) {
    for (const char *name : {"random_4so.fcidump", "random_8so.fcidump", "hubbard_dimer.fcidump"}) {
        const auto f = read_fcidump(data(name));
        const auto text = write_fcidump(f);
        const auto g = parse_fcidump(text);
        EXPECT_EQ(write_fcidump(g), text);
        EXPECT_EQ(g.core_energy(), f.core_energy());
        for (int p = 0; p < f.norb(); ++p)
            for (int q = 0; q < f.norb(); ++q) {
                EXPECT_EQ(g.h(p, q), f.h(p, q));
                for (int r = 0; r < f.norb(); ++r)
                    for (int s = 0; s < f.norb(); ++s) EXPECT_EQ(g.eri(p, q, r, s), f.eri(p, q, r, s));
            }
    }
}

TEST(Fcidump, HeaderVariants) {
    const auto f = parse_fcidump("&FCI NORB=2,NELEC=2,MS2=0,ORBSYM=1,1,ISYM=1,/\n 1.0D-1 1 1 1 1\n 0.5 1 0 0 0\n");
    EXPECT_DOUBLE_EQ(f.eri(0, 0, 0, 0), 0.1);
    const auto g = parse_fcidump("\n&fci norb=1, nelec=1, ms2=1\n&end\n -0.5 1 1 0 0\n");
    EXPECT_EQ(g.nalpha(), 1);
    EXPECT_EQ(g.nbeta(), 0);
}

TEST(Fcidump, ErrorsCarryLineNumbers) {
    auto line_of = [](const std::string &text) -> std::size_t {
        try {
            parse_fcidump(text);
        } catch (const ParseError &e) {
            return e.line();
        }
        return 0;
    };
    EXPECT_EQ(line_of("NORB=2\n"), 1u);
    EXPECT_EQ(line_of("&FCI NORB=2,NELEC=2\n"), 1u);
    EXPECT_EQ(line_of("&FCI NORB=2,NELEC=2,\n&END\n 0.1 1 1 1 1\n abc 1 1 0 0\n"), 4u);
    EXPECT_EQ(line_of("&FCI NORB=2,NELEC=2,\n&END\n 0.1 1 3 1 1\n"), 3u);
    EXPECT_EQ(line_of("&FCI NORB=2,NELEC=2,\n&END\n 0.1 1 1 1\n"), 3u);
    EXPECT_EQ(line_of("&FCI NORB=2,NELEC=2,\n&END\n 0.1 2 1 1 1\n 0.2 1 2 1 1\n"), 4u);
    EXPECT_EQ(line_of("&FCI NELEC=2,\n&END\n"), 1u);
    EXPECT_EQ(line_of("&FCI NORB=2,NELEC=7,\n&END\n"), 1u);
    EXPECT_THROW(read_fcidump(data("missing.fcidump")), ArgumentError);
}

TEST(SlaterCondon, DiagonalRule) {
    const auto f = read_fcidump(data("random_8so.fcidump"));
    const Determinant d{0b0011, 0b0101};
    double e = f.core_energy();
    std::vector<std::pair<int, int>> occ;  // (spatial orbital, spin)
    for (int p = 0; p < 4; ++p) {
        if ((d.alpha >> p) & 1) occ.push_back({p, 0});
        if ((d.beta >> p) & 1) occ.push_back({p, 1});
    }
    for (auto [p, s] : occ) e += f.h(p, p);
    for (std::size_t a = 0; a < occ.size(); ++a) {
        for (std::size_t b = a + 1; b < occ.size(); ++b) {
            const auto [p, sp] = occ[a];
            const auto [q, sq] = occ[b];
            e += f.eri(p, p, q, q);
            if (sp == sq) e -= f.eri(p, q, q, p);
        }
    }
    EXPECT_NEAR(slater_condon(d, d, f), e, 1e-12);
    EXPECT_EQ(slater_condon(Determinant{0b0111, 0b0000}, Determinant{0b0000, 0b0111}, f), 0.0);
    EXPECT_EQ(slater_condon(Determinant{0b0011, 0b0011}, Determinant{0b1100, 0b1001}, f), 0.0);
}

TEST(SlaterCondon, MatchesFockSpaceOracle) {
    std::vector<FciData> systems = {read_fcidump(data("random_4so.fcidump")), read_fcidump(data("random_8so.fcidump")),
                                    random_fci(3, 3, 7), random_fci(4, 4, 8)};
    for (const auto &f : systems) {
        const int n = f.norb();
        const auto H = fock_hamiltonian(f);
        double worst = 0.0;
        for (int i = 0; i < (1 << (2 * n)); ++i) {
            const auto di = Determinant::from_spin_mask(static_cast<std::uint64_t>(i), n);
            for (int j = 0; j < (1 << (2 * n)); ++j) {
                const auto dj = Determinant::from_spin_mask(static_cast<std::uint64_t>(j), n);
                worst = std::max(worst, std::abs(slater_condon(di, dj, f) - H(i, j)));
            }
        }
        EXPECT_LT(worst, 1e-10) << "norb " << n;
    }
}

TEST(SlaterCondon, FciEnergyMatchesDenseOracle) {
    const auto f = read_fcidump(data("random_4so.fcidump"));
    const auto H = fock_hamiltonian(f);
    std::vector<int> sector;
    for (int i = 0; i < 16; ++i) {
        const auto d = Determinant::from_spin_mask(static_cast<std::uint64_t>(i), 2);
        if (d.n_alpha() == 1 && d.n_beta() == 1) sector.push_back(i);
    }
    Eigen::MatrixXd sub(sector.size(), sector.size());
    for (std::size_t a = 0; a < sector.size(); ++a)
        for (std::size_t b = 0; b < sector.size(); ++b) sub(a, b) = H(sector[a], sector[b]);
    const double oracle = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sub).eigenvalues()(0);
    EXPECT_NEAR(project_and_diagonalize(fci_space(f), f).energy, oracle, 1e-10);
}

TEST(Diagonalize, HubbardDimer) {
    const auto f = read_fcidump(data("hubbard_dimer.fcidump"));
    const double t = 1.0, u = 4.0;
    EXPECT_NEAR(project_and_diagonalize(fci_space(f), f).energy, 0.5 * (u - std::sqrt(u * u + 16 * t * t)), 1e-10);
}

TEST(Diagonalize, SingleDeterminantAndVariational) {
    const auto f = read_fcidump(data("random_8so.fcidump"));
    const Determinant hf{0b0011, 0b0011};
    EXPECT_DOUBLE_EQ(project_and_diagonalize({hf}, f).energy, slater_condon(hf, hf, f));
    auto all = fci_space(f);
    Rng rng(3);
    std::shuffle(all.begin(), all.end(), rng);
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= all.size(); ++k) {
        const double e = project_and_diagonalize({all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k)}, f).energy;
        EXPECT_LE(e, prev);
        prev = e;
    }
    EXPECT_THROW(project_and_diagonalize({}, f), ArgumentError);
    EXPECT_THROW(project_and_diagonalize({hf, hf}, f), ArgumentError);
}

TEST(Weight, AnchorsAndShape) {
    const double h = 0.4;
    EXPECT_EQ(weight_w(0.0, h), 0.0);
    EXPECT_NEAR(weight_w(h, h), 0.01, 1e-15);
    EXPECT_NEAR(weight_w(1.0, h), 1.0, 1e-15);
    EXPECT_NEAR(weight_w(h + 1e-12, h), 0.01, 1e-10);
    double prev = -1.0;
    for (int k = 0; k <= 1000; ++k) {
        const double w = weight_w(k / 1000.0, h);
        EXPECT_GE(w, prev);
        prev = w;
    }
    EXPECT_THROW(weight_w(0.5, 0.0), ArgumentError);
    EXPECT_THROW(weight_w(0.5, 1.0), ArgumentError);
    EXPECT_THROW(weight_w(1.5, 0.5), ArgumentError);
}

TEST(Recover, CountsAndDirections) {
    const int norb = 6;
    OccupancyVector uniform{std::vector<double>(12, 0.5)};
    Rng rng(1);
    const Determinant ok{0b000111, 0b000111};
    EXPECT_EQ(recover_configuration(ok, uniform, norb, 3, 3, rng), ok);
    for (int trial = 0; trial < 200; ++trial) {
        Determinant x{rng() & 0x3F, rng() & 0x3F};
        const auto y = recover_configuration(x, uniform, norb, 3, 3, rng);
        EXPECT_EQ(y.n_alpha(), 3);
        EXPECT_EQ(y.n_beta(), 3);
        for (auto [xs, ys] : {std::pair{x.alpha, y.alpha}, std::pair{x.beta, y.beta}}) {
            if (std::popcount(xs) < 3) {
                EXPECT_EQ(xs & ~ys, 0u);  // only 0 -> 1
            }
            if (std::popcount(xs) > 3) {
                EXPECT_EQ(ys & ~xs, 0u);  // only 1 -> 0
            }
        }
    }
    const Determinant deficit{0b000011, 0b000111};
    const auto y = recover_configuration(deficit, uniform, norb, 3, 3, rng);
    EXPECT_EQ(std::popcount(y.alpha ^ deficit.alpha), 1);
    EXPECT_EQ(y.beta, deficit.beta);
    EXPECT_THROW(recover_configuration(deficit, uniform, norb, 7, 3, rng), ArgumentError);
    EXPECT_THROW(recover_configuration(deficit, OccupancyVector{{0.5}}, norb, 3, 3, rng), ArgumentError);
}

TEST(Recover, IndicatorOccupancyRestoresConfiguration) {
    const int norb = 5;
    const Determinant c{0b01011, 0b10101};
    OccupancyVector n{std::vector<double>(10, 0.0)};
    for (int p = 0; p < norb; ++p) {
        n.n[static_cast<std::size_t>(p)] = (c.alpha >> p) & 1;
        n.n[static_cast<std::size_t>(norb + p)] = (c.beta >> p) & 1;
    }
    Rng rng(2);
    int hits = 0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        const int bit = static_cast<int>(uniform01(rng) * 2 * norb);
        auto m = c.spin_mask(norb) ^ (std::uint64_t{1} << bit);
        hits += recover_configuration(Determinant::from_spin_mask(m, norb), n, norb, 3, 3, rng) == c;
    }
    EXPECT_EQ(hits, trials);
}

TEST(Sampler, FlipRates) {
    const auto f = read_fcidump(data("random_8so.fcidump"));
    const auto dets = fci_space(f);
    const auto g = project_and_diagonalize(dets, f);
    for (const auto &s : noisy_sampler(g.vector, dets, 4, 0.0, 500, 1)) {
        EXPECT_EQ(s.n_alpha(), 2);
        EXPECT_EQ(s.n_beta(), 2);
    }
    const std::uint64_t shots = 10000;
    const auto noisy = noisy_sampler(g.vector, dets, 4, 0.5, shots, 2);
    std::size_t wrong = 0;
    for (const auto &s : noisy) wrong += !(s.n_alpha() == 2 && s.n_beta() == 2);
    // Each sector is uniform at flip rate 1/2: P(count kept) = C(4,2)/16.
    const double p = 1.0 - (6.0 / 16.0) * (6.0 / 16.0);
    EXPECT_NEAR(static_cast<double>(wrong) / shots, p, 5.0 * std::sqrt(p * (1 - p) / shots));
    const auto a = noisy_sampler(g.vector, dets, 4, 0.05, 100, 9);
    EXPECT_EQ(a, noisy_sampler(g.vector, dets, 4, 0.05, 100, 9));
    EXPECT_THROW(noisy_sampler(g.vector, dets, 4, 1.0, 1, 1), ArgumentError);
}

TEST(Recovery, NoiselessFullCoverageIsExact) {
    const auto f = read_fcidump(data("random_4so.fcidump"));
    const auto dets = fci_space(f);
    const auto g = project_and_diagonalize(dets, f);
    const auto samples = noisy_sampler(g.vector, dets, 2, 0.0, 10000, 4);
    RecoveryConfig cfg;
    cfg.samples_per_batch = 10000;
    cfg.iterations = 2;
    const auto rep = self_consistent_recovery(samples, f, cfg, g.energy);
    ASSERT_TRUE(rep.ok);
    for (double e : rep.iterations[0].energies) EXPECT_NEAR(e, g.energy, 1e-10);
}

TEST(Recovery, PoolKeepsValidSamplesAndIsDeterministic) {
    const auto f = read_fcidump(data("random_8so.fcidump"));
    const auto dets = fci_space(f);
    const auto g = project_and_diagonalize(dets, f);
    const auto samples = noisy_sampler(g.vector, dets, 4, 0.05, 300, 5);
    std::size_t valid = 0;
    for (const auto &s : samples) valid += s.n_alpha() == 2 && s.n_beta() == 2;
    RecoveryConfig cfg;
    cfg.seed = 11;
    const auto rep = self_consistent_recovery(samples, f, cfg, g.energy);
    EXPECT_EQ(rep.iterations[0].valid_configurations, valid);
    for (const auto &it : rep.iterations) {
        EXPECT_GE(it.valid_configurations, valid);
        double s = 0.0;
        for (double x : it.occupancy.n) {
            EXPECT_GE(x, -1e-12);
            EXPECT_LE(x, 1.0 + 1e-12);
            s += x;
        }
        EXPECT_NEAR(s, 4.0, 1e-9);
    }
    EXPECT_EQ(to_json(rep).dump(), to_json(self_consistent_recovery(samples, f, cfg, g.energy)).dump());
    cfg.jobs = 3;
    EXPECT_EQ(recovery_csv(rep), recovery_csv(self_consistent_recovery(samples, f, cfg, g.energy)));
}

TEST(Recovery, ImprovesOnToySystem) {
    const auto f = read_fcidump(data("random_8so.fcidump"));
    const auto dets = fci_space(f);
    const auto g = project_and_diagonalize(dets, f);
    RecoveryConfig cfg;
    cfg.seed = 3;
    const auto rep = self_consistent_recovery(noisy_sampler(g.vector, dets, 4, 0.05, 300, 3), f, cfg, g.energy);
    EXPECT_LT(rep.mean_abs_error(4), rep.mean_abs_error(0));
}

TEST(Recovery, FailureStatusWithoutValidSamples) {
    const auto f = read_fcidump(data("random_8so.fcidump"));
    const auto rep = self_consistent_recovery({Determinant{0b1111, 0}}, f, RecoveryConfig{});
    EXPECT_FALSE(rep.ok);
    EXPECT_TRUE(rep.iterations.empty());
    EXPECT_THROW(self_consistent_recovery({}, f, RecoveryConfig{}), ArgumentError);
    RecoveryConfig bad;
    bad.delta = 1.5;
    EXPECT_THROW(self_consistent_recovery({Determinant{3, 3}}, f, bad), ArgumentError);
}
