#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "envelope.hpp"
#include "fft.hpp"
#include "grid.hpp"

namespace wilsontf {

// Zg(x_j, w_m) = sum_{k=-T}^{T-1} g(x_j + k) exp(-2 pi i k w_m), x_j = j/R, w_m = m/(2T).
// Stored row-major as [j][m], shape R x 2T.
struct ZakArray {
    GridSpec grid;
    std::vector<cd> values;

    int rows() const { return grid.R; }
    int cols() const { return static_cast<int>(std::lround(2 * grid.T)); }
    cd& at(int j, int m) { return values[static_cast<std::size_t>(j) * cols() + m]; }
    const cd& at(int j, int m) const { return values[static_cast<std::size_t>(j) * cols() + m]; }
};

namespace detail {
inline void require_zak_grid(const GridSpec& g) {
    g.validate();
    if (std::abs(g.T - std::round(g.T)) > 1e-12) throw std::invalid_argument("Zak transform needs integer T");
}
}  // namespace detail

inline ZakArray zak(const Signal& g) {
    g.check();
    if (g.dim != 1) throw std::invalid_argument("Zak transform is one-dimensional");
    detail::require_zak_grid(g.grid);
    const int R = g.grid.R;
    const int K = static_cast<int>(std::lround(2 * g.grid.T));
    ZakArray Z{g.grid, std::vector<cd>(static_cast<std::size_t>(R) * K)};
    std::vector<cd> seq(K);
    for (int j = 0; j < R; ++j) {
        // x_j + k sits at grid index (k + T) R + j; the kernel exp(-2 pi i k m/K)
        // with k = kk - T picks up (-1)^m since T = K/2.
        for (int kk = 0; kk < K; ++kk) seq[kk] = g[static_cast<std::size_t>(kk) * R + j];
        auto s = fft(seq, -1);
        for (int m = 0; m < K; ++m) Z.at(j, m) = (m % 2) ? -s[m] : s[m];
    }
    return Z;
}

inline Signal inverse_zak(const ZakArray& Z) {
    detail::require_zak_grid(Z.grid);
    const int R = Z.rows(), K = Z.cols();
    if (Z.values.size() != static_cast<std::size_t>(R) * K) throw std::invalid_argument("Zak array shape mismatch");
    Signal g(Z.grid, 1);
    std::vector<cd> seq(K);
    for (int j = 0; j < R; ++j) {
        for (int m = 0; m < K; ++m) seq[m] = (m % 2) ? -Z.at(j, m) : Z.at(j, m);
        auto s = fft(seq, +1);
        for (int kk = 0; kk < K; ++kk) g[static_cast<std::size_t>(kk) * R + j] = s[kk] / static_cast<double>(K);
    }
    return g;
}

// Direct evaluation of the defining sum at x = x_j + shift (shift an integer),
// frequency w = m/(2T) + wshift, with samples read periodically. Used to check
// quasi-periodicity outside the stored fundamental domain.
inline cd zak_direct(const Signal& g, int j, int shift, double m, double wshift = 0) {
    const long long N = static_cast<long long>(g.grid.N());
    const int R = g.grid.R;
    const long long T = std::llround(g.grid.T);
    const double w = m / (2.0 * g.grid.T) + wshift;
    cd acc = 0;
    for (long long k = -T; k < T; ++k) {
        long long idx = (k + T + shift) * R + j;
        idx = ((idx % N) + N) % N;
        acc += g[static_cast<std::size_t>(idx)] * unit_phase(-static_cast<double>(k) * w);
    }
    return acc;
}

inline double zak_quasi_periodicity_residual(const Signal& g) {
    const ZakArray Z = zak(g);
    double worst = 0;
    for (int j = 0; j < Z.rows(); ++j)
        for (int m = 0; m < Z.cols(); ++m) {
            const double w = m / (2.0 * g.grid.T);
            cd shifted = zak_direct(g, j, 1, m);
            worst = std::max(worst, std::abs(shifted - unit_phase(w) * Z.at(j, m)));
            cd wrapped = zak_direct(g, j, 0, m, 1.0);
            worst = std::max(worst, std::abs(wrapped - Z.at(j, m)));
        }
    return worst;
}

// |Zg(x,w)|^2 + |Zg(x+1/2,w)|^2 on the stored grid. Needs R even.
inline std::vector<double> frame_multiplier(const ZakArray& Z) {
    const int R = Z.rows(), K = Z.cols();
    if (R % 2) throw std::invalid_argument("half-integer shifts need even R");
    std::vector<double> m(static_cast<std::size_t>(R) * K);
    for (int j = 0; j < R; ++j)
        for (int k = 0; k < K; ++k)
            m[static_cast<std::size_t>(j) * K + k] = std::norm(Z.at(j, k)) + std::norm(Z.at((j + R / 2) % R, k));
    return m;
}

struct ExponentialFit {
    double a = 0;
    double C = 0;
    double r2 = 0;
    std::size_t points = 0;
    // exponential, super-exponential or sub-exponential
    std::string shape;
};

enum class Domain { time, frequency };

// Log-linear fit of the decreasing envelope of |f| over |x| in [lo, hi].
inline ExponentialFit fit_exponential_decay(const Signal& f, Domain domain, double lo, double hi,
                                            double floor = 1e-14) {
    f.check();
    if (f.dim != 1) throw std::invalid_argument("decay fit is one-dimensional");
    const Signal s = domain == Domain::frequency ? dft(f) : f;
    std::vector<EnvelopePoint> pts;
    pts.reserve(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) pts.push_back({std::abs(s.grid.x(j)), std::abs(s[j])});
    std::vector<double> X, Y;
    for (const auto& p : record_envelope(pts))
        if (p.r >= lo && p.r <= hi && p.value > floor) {
            X.push_back(p.r);
            Y.push_back(std::log(p.value));
        }
    if (X.size() < 8) throw std::invalid_argument("fewer than 8 envelope points above floor");
    const LineFit line = fit_line(X, Y);
    ExponentialFit out;
    out.a = -line.slope;
    out.C = std::exp(line.intercept);
    out.r2 = line.r2;
    out.points = X.size();

    // Compare the local rate over the inner and outer halves of the used range.
    const double mid = (X.front() + X.back()) / 2;
    std::vector<double> xi, yi, xo, yo;
    for (std::size_t i = 0; i < X.size(); ++i) {
        if (X[i] <= mid) {
            xi.push_back(X[i]);
            yi.push_back(Y[i]);
        }
        if (X[i] >= mid) {
            xo.push_back(X[i]);
            yo.push_back(Y[i]);
        }
    }
    out.shape = "exponential";
    if (xi.size() >= 2 && xo.size() >= 2 && xi.front() != xi.back() && xo.front() != xo.back()) {
        const double inner_rate = -fit_line(xi, yi).slope, outer_rate = -fit_line(xo, yo).slope;
        if (inner_rate > 0 && outer_rate > 1.25 * inner_rate) out.shape = "super-exponential";
        else if (outer_rate < 0.75 * inner_rate || inner_rate <= 0) out.shape = "sub-exponential";
    }
    return out;
}

inline ExponentialFit fit_exponential_decay(const Signal& f, Domain domain) {
    const double T = domain == Domain::frequency ? f.grid.R / 2.0 : f.grid.T;
    return fit_exponential_decay(f, domain, 2.0, T - 2.0);
}

struct TightWindow {
    Signal psi;
    FunctionSpec source;
    double tightness_residual = 0;
    double max_imag = 0;  // largest imaginary part discarded from the inverse Zak output
    double a = 0, b = 0, C = 0;
    double r2_time = 0, r2_freq = 0;
};

namespace detail {
inline double tightness_of(const Signal& psi) {
    auto m = frame_multiplier(zak(psi));
    double worst = 0;
    for (double v : m) worst = std::max(worst, std::abs(v - 2));
    return worst;
}

inline void attach_decay(TightWindow& w) {
    try {
        auto t = fit_exponential_decay(w.psi, Domain::time);
        auto f = fit_exponential_decay(w.psi, Domain::frequency);
        w.a = t.a;
        w.b = f.a;
        w.C = std::max(t.C, f.C);
        w.r2_time = t.r2;
        w.r2_freq = f.r2;
    } catch (const std::invalid_argument&) {
        // window too concentrated for an envelope fit; leave the constants at zero
    }
}
}  // namespace detail

inline TightWindow tight_window(const Signal& g, const FunctionSpec& source = {}) {
    g.check();
    if (g.dim != 1) throw std::invalid_argument("tight window is one-dimensional");
    if (g.grid.R % 2) throw std::invalid_argument("half-integer shifts need even R");
    ZakArray Z = zak(g);
    const auto m = frame_multiplier(Z);
    for (double v : m)
        if (!(v >= 1e-12)) throw std::invalid_argument("frame multiplier below 1e-12: unusable seed window");
    for (std::size_t i = 0; i < Z.values.size(); ++i) Z.values[i] *= std::sqrt(2.0 / m[i]);
    Signal raw = inverse_zak(Z);
    TightWindow w;
    w.source = source;
    w.psi = Signal(g.grid, 1);
    for (std::size_t j = 0; j < raw.size(); ++j) {
        w.max_imag = std::max(w.max_imag, std::abs(raw[j].imag()));
        w.psi[j] = raw[j].real();
    }
    w.tightness_residual = detail::tightness_of(w.psi);
    detail::attach_decay(w);
    return w;
}

// The seed used as a window without the Zak normalization. Only good for
// negative controls.
inline TightWindow untightened_window(const Signal& g, const FunctionSpec& source = {}) {
    TightWindow w;
    w.source = source;
    w.psi = Signal(g.grid, 1);
    for (std::size_t j = 0; j < g.size(); ++j) {
        w.max_imag = std::max(w.max_imag, std::abs(g[j].imag()));
        w.psi[j] = g[j].real();
    }
    w.tightness_residual = detail::tightness_of(w.psi);
    detail::attach_decay(w);
    return w;
}

inline TightWindow default_window(const GridSpec& grid = {}) {
    const FunctionSpec seed = FunctionSpec::gaussian(1);
    return tight_window(sample(seed, grid), seed);
}

}  // namespace wilsontf
