#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "grid.hpp"
#include "parallel.hpp"
#include "zak.hpp"

namespace wilsontf {

struct WilsonIndex {
    int d = 1;
    std::array<int, 2> l{0, 0};
    std::array<int, 2> n{0, 0};

    WilsonIndex() = default;
    WilsonIndex(int l0, int n0) : d(1), l{l0, 0}, n{n0, 0} {}
    WilsonIndex(std::array<int, 2> ls, std::array<int, 2> ns) : d(2), l(ls), n(ns) {}

    // Lexicographic: l vector, then n vector.
    std::strong_ordering operator<=>(const WilsonIndex& o) const {
        if (auto c = d <=> o.d; c != 0) return c;
        for (int i = 0; i < d; ++i)
            if (auto c = l[i] <=> o.l[i]; c != 0) return c;
        for (int i = 0; i < d; ++i)
            if (auto c = n[i] <=> o.n[i]; c != 0) return c;
        return std::strong_ordering::equal;
    }
    bool operator==(const WilsonIndex& o) const { return (*this <=> o) == 0; }

    // rho = sum_i |n_i/2| + |l_i|
    double rho() const {
        double r = 0;
        for (int i = 0; i < d; ++i) r += std::abs(n[i]) / 2.0 + std::abs(l[i]);
        return r;
    }
};

struct WilsonSystem {
    std::shared_ptr<const TightWindow> window;
    int d = 1;
    int l_max = 15;
    int n_max = 24;

    const GridSpec& grid() const { return window->psi.grid; }

    // Largest |n| kept in the l = 0 band: integer shifts beyond T - 1 wrap around the grid.
    int n_max_band0() const { return std::min(n_max, static_cast<int>(std::ceil(grid().T)) - 1); }

    void validate() const {
        if (!window) throw std::invalid_argument("Wilson system needs a window");
        const GridSpec& g = grid();
        g.validate();
        if (d < 1 || d > 2) throw std::invalid_argument("d must be 1 or 2");
        if (g.R % 2) throw std::invalid_argument("half-integer shifts need even R");
        if (std::abs(g.T - std::round(g.T)) > 1e-12) throw std::invalid_argument("Wilson system needs integer T");
        if (l_max < 0 || n_max < 0) throw std::invalid_argument("l_max and n_max must be non-negative");
        if (2 * l_max >= g.R) throw std::invalid_argument("l_max must be below R/2 (Nyquist)");
        if (n_max >= 2 * std::llround(g.T)) throw std::invalid_argument("n_max must be below 2T");
    }

    bool contains1(int l, int n) const {
        if (l < 0 || l > l_max) return false;
        return l == 0 ? std::abs(n) <= n_max_band0() : std::abs(n) <= n_max;
    }

    bool contains(const WilsonIndex& idx) const {
        if (idx.d != d) return false;
        for (int i = 0; i < d; ++i)
            if (!contains1(idx.l[i], idx.n[i])) return false;
        return true;
    }

    std::vector<std::pair<int, int>> indices1() const {
        std::vector<std::pair<int, int>> out;
        for (int l = 0; l <= l_max; ++l) {
            int nm = l == 0 ? n_max_band0() : n_max;
            for (int n = -nm; n <= nm; ++n) out.emplace_back(l, n);
        }
        return out;
    }

    // Full index set in lexicographic order.
    std::vector<WilsonIndex> indices() const {
        auto one = indices1();
        std::vector<WilsonIndex> out;
        if (d == 1) {
            for (auto [l, n] : one) out.emplace_back(l, n);
            return out;
        }
        out.reserve(one.size() * one.size());
        for (auto [l1, n1] : one)
            for (auto [l2, n2] : one) out.emplace_back(std::array<int, 2>{l1, l2}, std::array<int, 2>{n1, n2});
        std::sort(out.begin(), out.end());
        return out;
    }
};

inline WilsonSystem make_system(std::shared_ptr<const TightWindow> w, int l_max, int n_max, int d = 1) {
    WilsonSystem s{std::move(w), d, l_max, n_max};
    s.validate();
    return s;
}

struct CoefficientTable {
    int d = 1;
    std::map<WilsonIndex, cd> entries;
    // System metadata. window may be null for synthetic tables.
    std::shared_ptr<const TightWindow> window;
    int l_max = -1, n_max = -1;
    std::string source_path;

    WilsonSystem system() const {
        if (!window) throw std::invalid_argument("coefficient table carries no window");
        return make_system(window, l_max, n_max, d);
    }
};

namespace detail {

// cos/sin(2 pi l x_j) with the angle reduced exactly: l x_j = l (j - TR)/R.
struct Trig {
    std::vector<double> c, s;
    int R;
    explicit Trig(int R_) : c(R_), s(R_), R(R_) {
        for (int m = 0; m < R; ++m) {
            c[m] = std::cos(2 * pi * m / R);
            s[m] = std::sin(2 * pi * m / R);
        }
    }
    int phase(int l, long long j, long long TR) const {
        long long m = (static_cast<long long>(l) * (j - TR)) % R;
        return static_cast<int>((m + R) % R);
    }
};

// One-dimensional atom samples on a grid of N points.
inline std::vector<double> atom1(const std::vector<double>& psi, const GridSpec& g, const Trig& trig, int l, int n) {
    const long long N = static_cast<long long>(g.N());
    const long long shift = l == 0 ? static_cast<long long>(n) * g.R : static_cast<long long>(n) * g.R / 2;
    const bool use_cos = ((l + n) % 2 + 2) % 2 == 0;
    std::vector<double> out(static_cast<std::size_t>(N));
    for (long long j = 0; j < N; ++j) {
        long long src = ((j - shift) % N + N) % N;
        double v = psi[static_cast<std::size_t>(src)];
        if (l > 0) {
            int m = trig.phase(l, j, g.TR());
            v *= std::sqrt(2.0) * (use_cos ? trig.c[m] : trig.s[m]);
        }
        out[static_cast<std::size_t>(j)] = v;
    }
    return out;
}

inline std::vector<double> real_window(const TightWindow& w) {
    std::vector<double> p(w.psi.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = w.psi[i].real();
    return p;
}

// All one-dimensional coefficients (1/R) sum_j f_j psi_{l,n}(x_j) of a line,
// one correlation per branch and band. Output order matches sys.indices1().
inline std::vector<cd> analyze_line(const std::vector<cd>& f, const WilsonSystem& sys, const std::vector<cd>& psi_hat,
                                    const Trig& trig) {
    const GridSpec& g = sys.grid();
    const long long N = static_cast<long long>(g.N());
    const double invR = 1.0 / g.R;
    auto correlate = [&](const std::vector<cd>& a) {
        auto A = fft(a, -1);
        for (long long k = 0; k < N; ++k) A[k] *= std::conj(psi_hat[k]);
        auto c = fft(A, +1);
        for (auto& v : c) v *= invR / static_cast<double>(N);
        return c;  // c[s] = (1/R) sum_j a_j psi_{j - s}
    };
    auto at = [&](const std::vector<cd>& c, long long s) { return c[static_cast<std::size_t>(((s % N) + N) % N)]; };

    std::vector<cd> out;
    out.reserve(sys.indices1().size());
    const auto base = correlate(f);
    for (int n = -sys.n_max_band0(); n <= sys.n_max_band0(); ++n) out.push_back(at(base, static_cast<long long>(n) * g.R));
    std::vector<cd> gc(static_cast<std::size_t>(N)), gs(static_cast<std::size_t>(N));
    for (int l = 1; l <= sys.l_max; ++l) {
        for (long long j = 0; j < N; ++j) {
            int m = trig.phase(l, j, g.TR());
            gc[j] = f[j] * (std::sqrt(2.0) * trig.c[m]);
            gs[j] = f[j] * (std::sqrt(2.0) * trig.s[m]);
        }
        const auto cc = correlate(gc), cs = correlate(gs);
        for (int n = -sys.n_max; n <= sys.n_max; ++n) {
            const bool use_cos = ((l + n) % 2 + 2) % 2 == 0;
            out.push_back(at(use_cos ? cc : cs, static_cast<long long>(n) * g.R / 2));
        }
    }
    return out;
}

}  // namespace detail

inline Signal wilson_atom(const WilsonSystem& sys, const WilsonIndex& idx) {
    sys.validate();
    if (!sys.contains(idx)) throw std::invalid_argument("index out of truncation");
    const GridSpec& g = sys.grid();
    const detail::Trig trig(g.R);
    const auto psi = detail::real_window(*sys.window);
    if (sys.d == 1) {
        auto a = detail::atom1(psi, g, trig, idx.l[0], idx.n[0]);
        return Signal(g, 1, std::vector<cd>(a.begin(), a.end()));
    }
    auto a = detail::atom1(psi, g, trig, idx.l[0], idx.n[0]);
    auto b = detail::atom1(psi, g, trig, idx.l[1], idx.n[1]);
    const std::size_t N = g.N();
    Signal out(g, 2);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) out[i * N + j] = a[i] * b[j];
    return out;
}

inline CoefficientTable analyze(const Signal& f, const WilsonSystem& sys) {
    sys.validate();
    f.check();
    if (!(f.grid == sys.grid()) || f.dim != sys.d) throw std::invalid_argument("grid/dim mismatch");
    const GridSpec& g = sys.grid();
    const std::size_t N = g.N();
    const detail::Trig trig(g.R);
    const auto psi_hat = fft(sys.window->psi.values, -1);
    const auto one = sys.indices1();

    CoefficientTable table;
    table.d = sys.d;
    table.window = sys.window;
    table.l_max = sys.l_max;
    table.n_max = sys.n_max;

    if (sys.d == 1) {
        auto c = detail::analyze_line(f.values, sys, psi_hat, trig);
        for (std::size_t i = 0; i < one.size(); ++i) table.entries.emplace(WilsonIndex(one[i].first, one[i].second), c[i]);
        return table;
    }
    // Rows first (second coordinate), then columns of the partial result.
    const std::size_t M = one.size();
    std::vector<cd> partial(N * M);
    parallel_for(N, [&](std::size_t i) {
        std::vector<cd> row(f.values.begin() + static_cast<std::ptrdiff_t>(i * N),
                            f.values.begin() + static_cast<std::ptrdiff_t>((i + 1) * N));
        auto c = detail::analyze_line(row, sys, psi_hat, trig);
        std::copy(c.begin(), c.end(), partial.begin() + static_cast<std::ptrdiff_t>(i * M));
    });
    std::vector<cd> full(M * M);
    parallel_for(M, [&](std::size_t b) {
        std::vector<cd> col(N);
        for (std::size_t i = 0; i < N; ++i) col[i] = partial[i * M + b];
        auto c = detail::analyze_line(col, sys, psi_hat, trig);
        for (std::size_t a = 0; a < M; ++a) full[a * M + b] = c[a];
    });
    for (std::size_t a = 0; a < M; ++a)
        for (std::size_t b = 0; b < M; ++b)
            table.entries.emplace(WilsonIndex(std::array<int, 2>{one[a].first, one[b].first},
                                              std::array<int, 2>{one[a].second, one[b].second}),
                                  full[a * M + b]);
    return table;
}

// Direct definition c = inner(f, atom), one atom at a time.
inline CoefficientTable analyze_direct(const Signal& f, const WilsonSystem& sys) {
    CoefficientTable table;
    table.d = sys.d;
    table.window = sys.window;
    table.l_max = sys.l_max;
    table.n_max = sys.n_max;
    for (const auto& idx : sys.indices()) table.entries.emplace(idx, inner(f, wilson_atom(sys, idx)));
    return table;
}

inline Signal synthesize(const CoefficientTable& c, const WilsonSystem& sys) {
    sys.validate();
    if (c.d != sys.d) throw std::invalid_argument("table dimension does not match system");
    for (const auto& [idx, v] : c.entries)
        if (!sys.contains(idx)) throw std::invalid_argument("index outside truncation");
    const GridSpec& g = sys.grid();
    const std::size_t N = g.N();
    const detail::Trig trig(g.R);
    const auto psi = detail::real_window(*sys.window);
    Signal out(g, sys.d);
    if (sys.d == 1) {
        for (const auto& [idx, v] : c.entries) {
            auto a = detail::atom1(psi, g, trig, idx.l[0], idx.n[0]);
            for (std::size_t j = 0; j < N; ++j) out[j] += v * a[j];
        }
        return out;
    }
    // Separable: collapse the second coordinate per first-coordinate atom, then expand.
    std::map<std::pair<int, int>, std::vector<cd>> rows;
    std::map<std::pair<int, int>, std::vector<double>> cache;
    auto atom = [&](int l, int n) -> const std::vector<double>& {
        auto key = std::make_pair(l, n);
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, detail::atom1(psi, g, trig, l, n)).first;
        return it->second;
    };
    for (const auto& [idx, v] : c.entries) {
        auto& r = rows[{idx.l[0], idx.n[0]}];
        if (r.empty()) r.assign(N, 0);
        const auto& b = atom(idx.l[1], idx.n[1]);
        for (std::size_t j = 0; j < N; ++j) r[j] += v * b[j];
    }
    for (const auto& [key, r] : rows) {
        const auto& a = atom(key.first, key.second);
        for (std::size_t i = 0; i < N; ++i) {
            if (a[i] == 0) continue;
            for (std::size_t j = 0; j < N; ++j) out[i * N + j] += a[i] * r[j];
        }
    }
    return out;
}

inline double gram_residual(const WilsonSystem& sys, const std::vector<WilsonIndex>& subset) {
    sys.validate();
    if (subset.size() > 4096) throw std::invalid_argument("subset too large (max 4096)");
    std::vector<Signal> atoms;
    atoms.reserve(subset.size());
    for (const auto& idx : subset) atoms.push_back(wilson_atom(sys, idx));
    std::vector<double> row_worst(subset.size(), 0);
    parallel_for(subset.size(), [&](std::size_t i) {
        double w = 0;
        for (std::size_t j = i; j < subset.size(); ++j) {
            cd v = inner(atoms[i], atoms[j]);
            w = std::max(w, std::abs(v - (i == j ? 1.0 : 0.0)));
        }
        row_worst[i] = w;
    });
    double worst = 0;
    for (double w : row_worst) worst = std::max(worst, w);
    return worst;
}

}  // namespace wilsontf
