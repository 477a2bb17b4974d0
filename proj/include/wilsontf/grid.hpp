#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "fft.hpp"

namespace wilsontf {

constexpr double pi = std::numbers::pi;

// Symmetric grid x_j = -T + j/R, j = 0..N-1, N = 2TR.
struct GridSpec {
    double T = 16;
    int R = 32;

    long long TR() const { return std::llround(T * R); }
    std::size_t N() const { return static_cast<std::size_t>(2 * TR()); }
    double x(std::size_t j) const { return (static_cast<double>(j) - static_cast<double>(TR())) / R; }
    // Index of the nearest grid point to x; the caller checks on-grid-ness.
    long long index_of(double x) const { return std::llround(x * R) + TR(); }

    bool valid(std::string* why = nullptr) const {
        auto fail = [&](const char* m) {
            if (why) *why = m;
            return false;
        };
        if (!(T > 0) || !std::isfinite(T)) return fail("T must be positive");
        if (R < 1) return fail("R must be a positive integer");
        if (std::abs(T * R - static_cast<double>(TR())) > 1e-9) return fail("T*R must be an integer");
        if (N() < 8 || N() % 2 != 0) return fail("N = 2TR must be even and at least 8");
        return true;
    }

    void validate() const {
        std::string why;
        if (!valid(&why)) throw std::invalid_argument(why);
    }

    bool has_dual() const { return std::abs(2 * T - std::round(2 * T)) < 1e-9; }

    // Grid carrying the DFT samples: xi_k = -R/2 + k/(2T).
    GridSpec dual() const {
        if (!has_dual()) throw std::invalid_argument("frequency grid needs 2T integer");
        return GridSpec{R / 2.0, static_cast<int>(std::lround(2 * T))};
    }

    bool operator==(const GridSpec& o) const { return std::abs(T - o.T) < 1e-12 && R == o.R; }
};

struct Signal {
    GridSpec grid;
    int dim = 1;
    std::vector<cd> values;

    Signal() = default;
    Signal(GridSpec g, int d) : grid(g), dim(d), values(count(g, d)) {}
    Signal(GridSpec g, int d, std::vector<cd> v) : grid(g), dim(d), values(std::move(v)) { check(); }

    static std::size_t count(const GridSpec& g, int d) {
        std::size_t n = 1;
        for (int i = 0; i < d; ++i) n *= g.N();
        return n;
    }
    std::size_t size() const { return values.size(); }
    cd& operator[](std::size_t i) { return values[i]; }
    const cd& operator[](std::size_t i) const { return values[i]; }

    void check() const {
        grid.validate();
        if (dim < 1 || dim > 2) throw std::invalid_argument("dim must be 1 or 2");
        if (values.size() != count(grid, dim)) throw std::invalid_argument("values length must be N^d");
        for (const auto& v : values)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw std::invalid_argument("signal has non-finite entries");
    }
};

inline void require_compatible(const Signal& f, const Signal& g) {
    if (!(f.grid == g.grid) || f.dim != g.dim || f.size() != g.size())
        throw std::invalid_argument("grid mismatch");
}

// ---------------------------------------------------------------------------
// Function families

struct FunctionSpec {
    std::string family;  // gaussian, hermite, sech, bspline, subexp, tensor
    std::vector<double> params;
    std::vector<FunctionSpec> factors;

    static FunctionSpec gaussian(double a = 1) { return {"gaussian", {a}, {}}; }
    static FunctionSpec hermite(int k) { return {"hermite", {static_cast<double>(k)}, {}}; }
    static FunctionSpec sech() { return {"sech", {}, {}}; }
    static FunctionSpec bspline(int m) { return {"bspline", {static_cast<double>(m)}, {}}; }
    static FunctionSpec subexp(double h, double sigma) { return {"subexp", {h, sigma}, {}}; }
    static FunctionSpec tensor(FunctionSpec a, FunctionSpec b) { return {"tensor", {}, {std::move(a), std::move(b)}}; }

    std::string str() const;
    double operator()(double x) const;
};

namespace detail {

inline double hermite_function(int k, double x) {
    const double y = std::sqrt(2 * pi) * x;
    double h0 = std::pow(2.0, 0.25) * std::exp(-y * y / 2);
    if (k == 0) return h0;
    double h1 = std::sqrt(2.0) * y * h0;
    for (int j = 1; j < k; ++j) {
        double h2 = std::sqrt(2.0 / (j + 1)) * y * h1 - std::sqrt(static_cast<double>(j) / (j + 1)) * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

// Centered (m+1)-fold convolution of the unit box; degree m, support [-(m+1)/2, (m+1)/2].
inline double bspline_value(int m, double x) {
    const double half = (m + 1) / 2.0;
    if (std::abs(x) >= half) return 0.0;
    double sum = 0, binom = 1, fact = 1;
    for (int i = 2; i <= m; ++i) fact *= i;
    for (int k = 0; k <= m + 1; ++k) {
        double t = x + half - k;
        if (t > 0) sum += ((k % 2) ? -1.0 : 1.0) * binom * std::pow(t, m);
        binom = binom * (m + 1 - k) / (k + 1);
    }
    return sum / fact;
}

inline double sech_pi(double x) {
    double e = std::exp(-pi * std::abs(x));
    return 2 * e / (1 + e * e);
}

}  // namespace detail

inline double FunctionSpec::operator()(double x) const {
    auto param = [&](std::size_t i) {
        if (i >= params.size()) throw std::invalid_argument("missing parameter for " + family);
        return params[i];
    };
    if (family == "gaussian") return std::exp(-param(0) * pi * x * x);
    if (family == "hermite") {
        double k = param(0);
        if (k < 0 || k != std::floor(k)) throw std::invalid_argument("hermite order must be a non-negative integer");
        return detail::hermite_function(static_cast<int>(k), x);
    }
    if (family == "sech") return detail::sech_pi(x);
    if (family == "bspline") {
        double m = param(0);
        if (m < 0 || m != std::floor(m)) throw std::invalid_argument("bspline order must be a non-negative integer");
        return detail::bspline_value(static_cast<int>(m), x);
    }
    if (family == "subexp") {
        if (param(1) <= 0) throw std::invalid_argument("subexp needs sigma > 0");
        return std::exp(-param(0) * std::pow(std::abs(x), 1.0 / param(1)));
    }
    if (family == "tensor") throw std::invalid_argument("tensor spec needs two coordinates");
    throw std::invalid_argument("unknown family: " + family);
}

inline std::string FunctionSpec::str() const {
    auto num = [](double v) {
        std::string s = std::to_string(v);
        s.erase(s.find_last_not_of('0') + 1);
        if (!s.empty() && s.back() == '.') s.pop_back();
        return s;
    };
    std::string out = family;
    if (family == "tensor") {
        out += "(";
        for (std::size_t i = 0; i < factors.size(); ++i) out += (i ? "," : "") + factors[i].str();
        return out + ")";
    }
    if (params.empty()) return out;
    out += "(";
    for (std::size_t i = 0; i < params.size(); ++i) out += (i ? "," : "") + num(params[i]);
    return out + ")";
}

// Parses "gaussian(1)", "hermite(4)", "sech", "subexp(2,1)", "tensor(gaussian(1),sech)".
inline FunctionSpec parse_function_spec(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    auto open = s.find('(');
    FunctionSpec spec;
    spec.family = s.substr(0, open);
    if (open != std::string::npos) {
        if (s.back() != ')') throw std::invalid_argument("malformed function spec: " + text);
        std::string inner = s.substr(open + 1, s.size() - open - 2);
        std::vector<std::string> parts;
        int depth = 0;
        std::string cur;
        for (char c : inner) {
            if (c == '(') ++depth;
            if (c == ')') --depth;
            if (c == ',' && depth == 0) {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!cur.empty()) parts.push_back(cur);
        if (spec.family == "tensor") {
            for (auto& p : parts) spec.factors.push_back(parse_function_spec(p));
            if (spec.factors.size() != 2) throw std::invalid_argument("tensor takes two factors");
        } else {
            for (auto& p : parts) {
                std::size_t used = 0;
                double v = 0;
                try {
                    v = std::stod(p, &used);
                } catch (...) {
                    used = 0;
                }
                if (used != p.size()) throw std::invalid_argument("bad parameter '" + p + "' in " + text);
                spec.params.push_back(v);
            }
        }
    } else {
        if (spec.family == "gaussian") spec.params = {1};
        else if (spec.family == "hermite") spec.params = {0};
        else if (spec.family == "bspline") spec.params = {2};
        else if (spec.family == "subexp") spec.params = {1, 1};
    }
    static const char* known[] = {"gaussian", "hermite", "sech", "bspline", "subexp", "tensor"};
    bool ok = false;
    for (auto k : known) ok = ok || spec.family == k;
    if (!ok) throw std::invalid_argument("unknown family: " + spec.family);
    if (spec.family != "tensor") (void)spec(0.0);
    return spec;
}

inline Signal sample(const FunctionSpec& spec, const GridSpec& grid, int d = 1) {
    grid.validate();
    if (d < 1 || d > 2) throw std::invalid_argument("d must be 1 or 2");
    const std::size_t N = grid.N();
    Signal out(grid, d);
    if (d == 1) {
        if (spec.family == "tensor") throw std::invalid_argument("tensor spec needs d = 2");
        for (std::size_t j = 0; j < N; ++j) out[j] = spec(grid.x(j));
        return out;
    }
    const FunctionSpec& a = spec.family == "tensor" ? spec.factors.at(0) : spec;
    const FunctionSpec& b = spec.family == "tensor" ? spec.factors.at(1) : spec;
    std::vector<double> va(N), vb(N);
    for (std::size_t j = 0; j < N; ++j) {
        va[j] = a(grid.x(j));
        vb[j] = b(grid.x(j));
    }
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) out[i * N + j] = va[i] * vb[j];
    return out;
}

// (1/R)^d sum f conj(g), ascending index order.
inline cd inner(const Signal& f, const Signal& g) {
    require_compatible(f, g);
    cd acc = 0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += f[i] * std::conj(g[i]);
    return acc * std::pow(1.0 / f.grid.R, f.dim);
}

inline double norm(const Signal& f) { return std::sqrt(std::max(0.0, inner(f, f).real())); }

enum class Direction { forward, inverse };

namespace detail {

// One axis of the grid DFT. Maps samples on (T, R) to samples on the dual grid:
// out_k = (1/R) sum_j in_j exp(-+ 2 pi i xi_k x_j), using
// exp(-2 pi i xi_k x_j) = (-1)^{RT} (-1)^{j+k} exp(-2 pi i jk/N).
inline std::vector<cd> dft_line(const std::vector<cd>& in, const GridSpec& g, Direction dir) {
    const std::size_t N = in.size();
    std::vector<cd> tmp(N);
    for (std::size_t j = 0; j < N; ++j) tmp[j] = (j % 2) ? -in[j] : in[j];
    auto out = fft(tmp, dir == Direction::forward ? -1 : +1);
    const double scale = ((g.TR() % 2) ? -1.0 : 1.0) / g.R;
    for (std::size_t k = 0; k < N; ++k) out[k] *= (k % 2) ? -scale : scale;
    return out;
}

}  // namespace detail

// Samples of the Fourier transform (forward) or its inverse on the dual grid.
// Applying inverse to a forward result recovers the original grid and values.
inline Signal dft(const Signal& f, Direction dir = Direction::forward) {
    f.grid.validate();
    const GridSpec dual = f.grid.dual();
    const std::size_t N = f.grid.N();
    Signal out(dual, f.dim);
    if (f.dim == 1) {
        out.values = detail::dft_line(f.values, f.grid, dir);
        return out;
    }
    std::vector<cd> rows(f.size()), line(N);
    for (std::size_t i = 0; i < N; ++i) {
        std::copy_n(f.values.begin() + static_cast<std::ptrdiff_t>(i * N), N, line.begin());
        auto r = detail::dft_line(line, f.grid, dir);
        std::copy(r.begin(), r.end(), rows.begin() + static_cast<std::ptrdiff_t>(i * N));
    }
    for (std::size_t j = 0; j < N; ++j) {
        for (std::size_t i = 0; i < N; ++i) line[i] = rows[i * N + j];
        auto c = detail::dft_line(line, f.grid, dir);
        for (std::size_t i = 0; i < N; ++i) out[i * N + j] = c[i];
    }
    return out;
}

// Fractional part of a*b reduced to [0,1), used for unimodular phases.
inline cd unit_phase(double turns) {
    double t = turns - std::floor(turns);
    return std::polar(1.0, 2 * pi * t);
}

// M_xi0 T_x0 f, i.e. exp(2 pi i xi0.t) f(t - x0), with a circular shift.
inline Signal shift_modulate(const Signal& f, const std::vector<double>& x0, const std::vector<double>& xi0) {
    f.check();
    if (static_cast<int>(x0.size()) != f.dim || static_cast<int>(xi0.size()) != f.dim)
        throw std::invalid_argument("shift/modulation vectors must have d components");
    const GridSpec& g = f.grid;
    const long long N = static_cast<long long>(g.N());
    std::vector<long long> steps(f.dim);
    for (int a = 0; a < f.dim; ++a) {
        double s = x0[a] * g.R;
        if (std::abs(s - std::round(s)) > 1e-9) throw std::invalid_argument("off-grid shift requested");
        steps[a] = ((std::llround(s) % N) + N) % N;
    }
    Signal out(g, f.dim);
    if (f.dim == 1) {
        for (long long j = 0; j < N; ++j) {
            long long src = ((j - steps[0]) % N + N) % N;
            out[j] = f[src] * unit_phase(xi0[0] * g.x(j));
        }
        return out;
    }
    for (long long i = 0; i < N; ++i) {
        long long si = ((i - steps[0]) % N + N) % N;
        cd pi_ = unit_phase(xi0[0] * g.x(i));
        for (long long j = 0; j < N; ++j) {
            long long sj = ((j - steps[1]) % N + N) % N;
            out[i * N + j] = f[si * N + sj] * pi_ * unit_phase(xi0[1] * g.x(j));
        }
    }
    return out;
}

inline double max_abs_diff(const Signal& a, const Signal& b) {
    require_compatible(a, b);
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace wilsontf
