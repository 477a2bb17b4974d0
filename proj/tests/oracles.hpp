#pragma once

// Reference implementations written straight from the defining sums. Nothing
// here calls the library transforms, so agreement is a real cross-check.

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <vector>

#include "wilsontf/wilsontf.hpp"

namespace oracle {

using cd = std::complex<double>;
constexpr double pi = std::numbers::pi;

inline long long mod(long long a, long long n) { return ((a % n) + n) % n; }

// exp(-2 pi i p / q) for integers, reduced exactly.
inline cd turn(long long p, long long q) {
    const double t = static_cast<double>(mod(p, q)) / static_cast<double>(q);
    return {std::cos(2 * pi * t), -std::sin(2 * pi * t)};
}

// (1/R) sum_j f_j exp(-2 pi i xi_k x_j), xi_k = (k - TR)/(2T), x_j = (j - TR)/R.
inline std::vector<cd> naive_dft(const std::vector<cd>& f, long long T, long long R) {
    const long long N = 2 * T * R, TR = T * R;
    std::vector<cd> out(static_cast<std::size_t>(N));
    for (long long k = 0; k < N; ++k) {
        cd acc = 0;
        for (long long j = 0; j < N; ++j) acc += f[j] * turn((k - TR) * (j - TR), N);
        out[k] = acc / static_cast<double>(R);
    }
    return out;
}

// Zg(j/R, m/(2T)) = sum_{k=-T}^{T-1} g(j/R + k) exp(-2 pi i k m / (2T)).
inline cd zak(const std::vector<cd>& g, long long T, long long R, long long j, long long m) {
    cd acc = 0;
    for (long long k = -T; k < T; ++k) acc += g[(k + T) * R + j] * turn(k * m, 2 * T);
    return acc;
}

// Physicists' Hermite polynomials written out, orders 0..4.
inline double hermite_poly(int k, double y) {
    switch (k) {
        case 0: return 1;
        case 1: return 2 * y;
        case 2: return 4 * y * y - 2;
        case 3: return 8 * y * y * y - 12 * y;
        case 4: return 16 * y * y * y * y - 48 * y * y + 12;
    }
    return NAN;
}

// L2-normalized Hermite function adapted to exp(-pi x^2).
inline double hermite_function(int k, double x) {
    const double y = std::sqrt(2 * pi) * x;
    double fact = 1;
    for (int i = 2; i <= k; ++i) fact *= i;
    return std::pow(2.0, 0.25) / std::sqrt(std::pow(2.0, k) * fact) * hermite_poly(k, y) * std::exp(-pi * x * x);
}

// |V_g g(x, xi)| for g = exp(-pi x^2).
inline double gaussian_stft_abs(double x, double xi) {
    return std::pow(2.0, -0.5) * std::exp(-pi / 2 * (x * x + xi * xi));
}

inline cd inner(const std::vector<cd>& f, const std::vector<cd>& g, double R) {
    cd acc = 0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += f[i] * std::conj(g[i]);
    return acc / R;
}

// V_phi f(x_j, xi_k) = (1/R) sum_t f(x_t) conj(phi(x_t - x_j)) exp(-2 pi i xi_k x_t), circular.
inline cd stft(const std::vector<cd>& f, const std::vector<cd>& phi, long long T, long long R, long long j,
               long long k) {
    const long long N = 2 * T * R, TR = T * R;
    cd acc = 0;
    for (long long t = 0; t < N; ++t)
        acc += f[t] * std::conj(phi[mod(t - j + TR, N)]) * turn((k - TR) * (t - TR), N);
    return acc / static_cast<double>(R);
}

// sqrt(2) cos / sin(2 pi l x) psi(x - n/2), psi(x - n) for l = 0, evaluated with std::cos on x.
inline std::vector<double> wilson_atom(const std::vector<double>& psi, long long T, long long R, int l, int n) {
    const long long N = 2 * T * R;
    const long long shift = l == 0 ? n * R : n * R / 2;
    std::vector<double> out(static_cast<std::size_t>(N));
    for (long long j = 0; j < N; ++j) {
        const double x = static_cast<double>(j - T * R) / static_cast<double>(R);
        const double p = psi[mod(j - shift, N)];
        if (l == 0) out[j] = p;
        else if ((l + n) % 2 == 0) out[j] = std::sqrt(2.0) * std::cos(2 * pi * l * x) * p;
        else out[j] = std::sqrt(2.0) * std::sin(2 * pi * l * x) * p;
    }
    return out;
}

// sum over l in [-R/2, R/2) and n in [0, 4T) of |<f, M_l T_{n/2} psi>|^2.
inline double gabor_energy(const std::vector<cd>& f, const std::vector<double>& psi, long long T, long long R) {
    const long long N = 2 * T * R, TR = T * R;
    double total = 0;
    for (long long n = 0; n < 4 * T; ++n) {
        std::vector<cd> prod(static_cast<std::size_t>(N));
        for (long long j = 0; j < N; ++j) prod[j] = f[j] * psi[mod(j - n * R / 2, N)];
        for (long long l = -R / 2; l < R / 2; ++l) {
            cd acc = 0;
            // exp(-2 pi i l x_j) with l x_j = l (j - TR)/R
            for (long long j = 0; j < N; ++j) acc += prod[j] * turn(l * (j - TR), R);
            total += std::norm(acc / static_cast<double>(R));
        }
    }
    return total;
}

// c_{l,n} = C exp(-k (|n/2| + l)^{1/s}) on the window's index set.
inline wilsontf::CoefficientTable planted(const wilsontf::WilsonSystem& sys, double C, double k, double s) {
    wilsontf::CoefficientTable t;
    t.d = 1;
    t.window = sys.window;
    t.l_max = sys.l_max;
    t.n_max = sys.n_max;
    for (const auto& idx : sys.indices()) {
        const double rho = std::abs(idx.n[0]) / 2.0 + idx.l[0];
        t.entries.emplace(idx, C * std::exp(-k * std::pow(rho, 1.0 / s)));
    }
    return t;
}

inline std::vector<double> block_sums(const std::vector<double>& a, const std::vector<std::size_t>& cuts) {
    std::vector<double> out;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        double s = 0;
        for (std::size_t n = cuts[i - 1]; n < cuts[i]; ++n) s += a[n];
        out.push_back(s);
    }
    return out;
}

}  // namespace oracle
