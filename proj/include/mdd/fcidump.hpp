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

// FCIDUMP reader and writer. Integrals are stored in chemists' notation
// (pr|qs) with the 8-fold permutational symmetry filled in.

#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mdd/errors.hpp"

namespace mdd {

class FciData {
   public:
    FciData() = default;
    FciData(int norb, int nelec, int ms2) : norb_(norb), nelec_(nelec), ms2_(ms2) {
        if (norb < 1 || norb > 32) {
            throw ArgumentError("norb must be in [1, 32]");
        }
        if (nelec < 0 || nelec > 2 * norb) {
            throw ArgumentError("nelec out of range");
        }
        if (std::abs(ms2) > nelec || (nelec + ms2) % 2 != 0 || (nelec + ms2) / 2 > norb || (nelec - ms2) / 2 > norb) {
            throw ArgumentError("inconsistent NELEC and MS2");
        }
        const auto n = static_cast<std::size_t>(norb);
        h_.assign(n * n, 0.0);
        eri_.assign(n * n * n * n, 0.0);
        orbsym_.assign(n, 1);
    }

    int norb() const {
        return norb_;
    }
    int nelec() const {
        return nelec_;
    }
    int ms2() const {
        return ms2_;
    }
    int nalpha() const {
        return (nelec_ + ms2_) / 2;
    }
    int nbeta() const {
        return (nelec_ - ms2_) / 2;
    }
    double core_energy() const {
        return core_;
    }
    void set_core_energy(double e) {
        core_ = e;
    }
    const std::vector<int> &orbsym() const {
        return orbsym_;
    }
    void set_orbsym(std::vector<int> s) {
        if (static_cast<int>(s.size()) != norb_) {
            throw ArgumentError("ORBSYM length differs from NORB");
        }
        orbsym_ = std::move(s);
    }
    int isym() const {
        return isym_;
    }
    void set_isym(int s) {
        isym_ = s;
    }

    double h(int p, int q) const {
        return h_[idx2(p, q)];
    }
    /// (pr|qs)
    double eri(int p, int r, int q, int s) const {
        return eri_[idx4(p, r, q, s)];
    }

    void set_h(int p, int q, double v) {
        check(p);
        check(q);
        h_[idx2(p, q)] = v;
        h_[idx2(q, p)] = v;
    }

    void set_eri(int p, int r, int q, int s, double v) {
        for (int i : {p, r, q, s}) check(i);
        for (const auto &[a, b, c, d] : permutations(p, r, q, s)) {
            eri_[idx4(a, b, c, d)] = v;
        }
    }

    /// All 8 index orderings equivalent to (pr|qs).
    static std::array<std::array<int, 4>, 8> permutations(int p, int r, int q, int s) {
        return {{{p, r, q, s}, {r, p, q, s}, {p, r, s, q}, {r, p, s, q},
                 {q, s, p, r}, {s, q, p, r}, {q, s, r, p}, {s, q, r, p}}};
    }

    /// Largest deviation from the 8-fold and h symmetries.
    double symmetry_error() const {
        double e = 0.0;
        for (int p = 0; p < norb_; ++p) {
            for (int q = 0; q < norb_; ++q) {
                e = std::max(e, std::abs(h(p, q) - h(q, p)));
                for (int r = 0; r < norb_; ++r) {
                    for (int s = 0; s < norb_; ++s) {
                        const double v = eri(p, r, q, s);
                        for (const auto &[a, b, c, d] : permutations(p, r, q, s)) {
                            e = std::max(e, std::abs(eri(a, b, c, d) - v));
                        }
                    }
                }
            }
        }
        return e;
    }

   private:
    void check(int p) const {
        if (p < 0 || p >= norb_) {
            throw ArgumentError("orbital index out of range");
        }
    }
    std::size_t idx2(int p, int q) const {
        return static_cast<std::size_t>(p) * static_cast<std::size_t>(norb_) + static_cast<std::size_t>(q);
    }
    std::size_t idx4(int p, int r, int q, int s) const {
        const auto n = static_cast<std::size_t>(norb_);
        return ((static_cast<std::size_t>(p) * n + static_cast<std::size_t>(r)) * n + static_cast<std::size_t>(q)) * n +
               static_cast<std::size_t>(s);
    }

    int norb_ = 0;
    int nelec_ = 0;
    int ms2_ = 0;
    int isym_ = 1;
    double core_ = 0.0;
    std::vector<double> h_;
    std::vector<double> eri_;
    std::vector<int> orbsym_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline double parse_real(std::string tok, std::size_t line) {
    std::replace(tok.begin(), tok.end(), 'D', 'E');
    std::replace(tok.begin(), tok.end(), 'd', 'e');
    if (!tok.empty() && tok.front() == '+') tok.erase(0, 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
        throw ParseError(line, "invalid number '" + tok + "'");
    }
    return v;
}

inline long parse_int(const std::string &tok, std::size_t line) {
    long v = 0;
    const char *b = tok.data();
    if (!tok.empty() && tok.front() == '+') ++b;
    const auto [ptr, ec] = std::from_chars(b, tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw ParseError(line, "invalid integer '" + tok + "'");
    }
    return v;
}

}  // namespace detail

/// Parses FCIDUMP text. The namelist header may span several lines and ends
/// at `&END` or `/`. Records are `value i j k l` with 1-based indices:
/// i j k l > 0 gives (ij|kl), i j 0 0 gives h_ij, 0 0 0 0 the core energy;
/// i 0 0 0 orbital energies are ignored.
inline FciData parse_fcidump(const std::string &text) {
    std::istringstream in(text);
    std::string raw;
    std::size_t line = 0;
    std::string header;
    std::size_t header_line = 0;
    bool header_done = false;
    while (std::getline(in, raw)) {
        ++line;
        const auto t = std::string(detail::trim(raw));
        if (t.empty() && header.empty()) continue;
        if (header.empty()) {
            if (t.size() < 4 || !(t[0] == '&' || t[0] == '$')) {
                throw ParseError(line, "expected '&FCI' header");
            }
            std::string up = t.substr(1, 3);
            std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
            if (up != "FCI") {
                throw ParseError(line, "expected '&FCI' header");
            }
            header_line = line;
            header = t.substr(4) + ",";
        } else {
            header += t + ",";
        }
        std::string up = t;
        std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
        if (up.find("&END") != std::string::npos || up == "/" || up.find("$END") != std::string::npos ||
            (!up.empty() && up.back() == '/')) {
            header_done = true;
            break;
        }
    }
    if (!header_done) {
        throw ParseError(line == 0 ? 1 : line, "FCIDUMP header is not terminated");
    }
    // Key=value list; values may be comma-separated sequences (ORBSYM).
    std::string flat;
    for (char c : header) flat += (c == ',' ? ' ' : c);
    for (const char *end : {"&END", "&end", "$END", "$end", "/"}) {
        const auto pos = flat.find(end);
        if (pos != std::string::npos) flat.erase(pos, std::string(end).size());
    }
    std::istringstream hs(flat);
    std::string tok, key;
    int norb = -1, nelec = -1, ms2 = 0, isym = 1;
    std::vector<int> orbsym;
    auto assign = [&](const std::string &k, const std::string &v) {
        std::string uk = k;
        std::transform(uk.begin(), uk.end(), uk.begin(), [](unsigned char c) { return std::toupper(c); });
        if (uk == "NORB") norb = static_cast<int>(detail::parse_int(v, header_line));
        else if (uk == "NELEC") nelec = static_cast<int>(detail::parse_int(v, header_line));
        else if (uk == "MS2") ms2 = static_cast<int>(detail::parse_int(v, header_line));
        else if (uk == "ISYM") isym = static_cast<int>(detail::parse_int(v, header_line));
        else if (uk == "ORBSYM") orbsym.push_back(static_cast<int>(detail::parse_int(v, header_line)));
        else if (uk == "UHF") {
            std::string uv = v;
            std::transform(uv.begin(), uv.end(), uv.begin(), [](unsigned char c) { return std::toupper(c); });
            if (uv == ".TRUE." || uv == "T" || uv == "1") throw ParseError(header_line, "UHF integrals are not supported");
        }
    };
    while (hs >> tok) {
        const auto eq = tok.find('=');
        if (eq != std::string::npos) {
            key = tok.substr(0, eq);
            const auto rest = tok.substr(eq + 1);
            if (!rest.empty()) assign(key, rest);
        } else if (!key.empty()) {
            assign(key, tok);
        } else {
            throw ParseError(header_line, "unexpected header token '" + tok + "'");
        }
    }
    if (norb < 1 || nelec < 0) {
        throw ParseError(header_line, "header must define NORB and NELEC");
    }
    FciData d;
    try {
        d = FciData(norb, nelec, ms2);
    } catch (const ArgumentError &e) {
        throw ParseError(header_line, e.what());
    }
    if (!orbsym.empty()) {
        if (static_cast<int>(orbsym.size()) != norb) throw ParseError(header_line, "ORBSYM length differs from NORB");
        d.set_orbsym(orbsym);
    }
    d.set_isym(isym);
    std::vector<char> seen_h(static_cast<std::size_t>(norb * norb), 0);
    std::vector<char> seen_eri(static_cast<std::size_t>(norb) * norb * norb * norb, 0);
    auto conflict = [&](double old, double v) { return std::abs(old - v) > 1e-12; };
    while (std::getline(in, raw)) {
        ++line;
        const auto t = detail::trim(raw);
        if (t.empty()) continue;
        std::istringstream ls{std::string(t)};
        std::vector<std::string> f;
        while (ls >> tok) f.push_back(tok);
        if (f.size() != 5) {
            throw ParseError(line, "expected 'value i j k l'");
        }
        const double v = detail::parse_real(f[0], line);
        long idx[4];
        for (int k = 0; k < 4; ++k) {
            idx[k] = detail::parse_int(f[static_cast<std::size_t>(k + 1)], line);
            if (idx[k] < 0 || idx[k] > norb) throw ParseError(line, "orbital index out of range");
        }
        const int i = static_cast<int>(idx[0]) - 1, j = static_cast<int>(idx[1]) - 1;
        const int k = static_cast<int>(idx[2]) - 1, l = static_cast<int>(idx[3]) - 1;
        if (i >= 0 && j >= 0 && k >= 0 && l >= 0) {
            const auto flat_idx = ((static_cast<std::size_t>(i) * norb + j) * norb + k) * norb + l;
            if (seen_eri[flat_idx] && conflict(d.eri(i, j, k, l), v)) {
                throw ParseError(line, "two-electron record breaks permutational symmetry");
            }
            d.set_eri(i, j, k, l, v);
            for (const auto &[a, b, c, e] : FciData::permutations(i, j, k, l)) {
                seen_eri[((static_cast<std::size_t>(a) * norb + b) * norb + c) * norb + e] = 1;
            }
        } else if (i >= 0 && j >= 0 && k < 0 && l < 0) {
            const auto fi = static_cast<std::size_t>(i * norb + j);
            if (seen_h[fi] && conflict(d.h(i, j), v)) {
                throw ParseError(line, "one-electron record breaks symmetry");
            }
            d.set_h(i, j, v);
            seen_h[fi] = seen_h[static_cast<std::size_t>(j * norb + i)] = 1;
        } else if (i < 0 && j < 0 && k < 0 && l < 0) {
            d.set_core_energy(v);
        } else if (i >= 0 && j < 0 && k < 0 && l < 0) {
            // orbital energy, not needed
        } else {
            throw ParseError(line, "unsupported index pattern");
        }
    }
    return d;
}

inline FciData read_fcidump(const std::string &path) {
    std::ifstream f(path);
    if (!f) {
        throw ArgumentError("cannot open FCIDUMP file '" + path + "'");
    }
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_fcidump(ss.str());
}

namespace detail {

inline std::string shortest(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace detail

/// Canonical records: (ij|kl) with i >= j, k >= l, ij >= kl; h_ij with
/// i >= j; then the core energy. Zero integrals are skipped.
inline std::string write_fcidump(const FciData &d) {
    std::ostringstream os;
    os << "&FCI NORB=" << d.norb() << ",NELEC=" << d.nelec() << ",MS2=" << d.ms2() << ",\n ORBSYM=";
    for (int s : d.orbsym()) os << s << ",";
    os << "\n ISYM=" << d.isym() << ",\n&END\n";
    auto rec = [&](double v, int i, int j, int k, int l) {
        os << detail::shortest(v) << ' ' << i << ' ' << j << ' ' << k << ' ' << l << '\n';
    };
    const int n = d.norb();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            for (int k = 0; k < n; ++k) {
                for (int l = 0; l <= k; ++l) {
                    if (i * (i + 1) / 2 + j < k * (k + 1) / 2 + l) continue;
                    const double v = d.eri(i, j, k, l);
                    if (v != 0.0) rec(v, i + 1, j + 1, k + 1, l + 1);
                }
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            if (d.h(i, j) != 0.0) rec(d.h(i, j), i + 1, j + 1, 0, 0);
        }
    }
    rec(d.core_energy(), 0, 0, 0, 0);
    return os.str();
}

}  // namespace mdd
