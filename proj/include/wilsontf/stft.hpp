#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "grid.hpp"
#include "parallel.hpp"

namespace wilsontf {

// V(x_j, xi_k) stored row-major: row j is the time position, column k the frequency.
struct PhasePlaneArray {
    GridSpec grid;
    std::vector<cd> values;

    std::size_t N() const { return grid.N(); }
    double x(std::size_t j) const { return grid.x(j); }
    double xi(std::size_t k) const { return grid.dual().x(k); }
    cd& at(std::size_t j, std::size_t k) { return values[j * N() + k]; }
    const cd& at(std::size_t j, std::size_t k) const { return values[j * N() + k]; }
    // Quadrature weight of one plane cell.
    double cell() const { return 1.0 / (grid.R * 2.0 * grid.T); }
};

inline PhasePlaneArray stft(const Signal& f, const Signal& phi) {
    require_compatible(f, phi);
    f.check();
    if (f.dim != 1) throw std::invalid_argument("STFT is implemented for d = 1");
    const GridSpec& g = f.grid;
    g.dual();
    const std::size_t N = g.N();
    const long long TR = g.TR();
    PhasePlaneArray V{g, std::vector<cd>(N * N)};
    parallel_for(N, [&](std::size_t j) {
        // (T_{x_j} phi)(x_t) = phi at index t - j + TR.
        std::vector<cd> line(N);
        for (std::size_t t = 0; t < N; ++t) {
            long long src = (static_cast<long long>(t) - static_cast<long long>(j) + TR) % static_cast<long long>(N);
            if (src < 0) src += static_cast<long long>(N);
            line[t] = f[t] * std::conj(phi[static_cast<std::size_t>(src)]);
        }
        auto row = detail::dft_line(line, g, Direction::forward);
        std::copy(row.begin(), row.end(), V.values.begin() + static_cast<std::ptrdiff_t>(j * N));
    });
    return V;
}

// Direct definition <f, M_xi T_x phi> at one phase-space point.
inline cd stft_at(const Signal& f, const Signal& phi, double x, double xi) {
    return inner(f, shift_modulate(phi, {x}, {xi}));
}

inline cd plane_inner(const PhasePlaneArray& A, const PhasePlaneArray& B) {
    if (!(A.grid == B.grid)) throw std::invalid_argument("grid mismatch");
    cd acc = 0;
    for (std::size_t i = 0; i < A.values.size(); ++i) acc += A.values[i] * std::conj(B.values[i]);
    return acc * A.cell();
}

inline double plane_norm(const PhasePlaneArray& A) { return std::sqrt(std::max(0.0, plane_inner(A, A).real())); }

// |<V_phi1 f1, V_phi2 f2> - <phi2, phi1><f1, f2>|
inline double check_orthogonality_relation(const Signal& f1, const Signal& f2, const Signal& phi1, const Signal& phi2) {
    require_compatible(f1, f2);
    require_compatible(f1, phi1);
    require_compatible(f1, phi2);
    const cd lhs = plane_inner(stft(f1, phi1), stft(f2, phi2));
    const cd rhs = inner(phi2, phi1) * inner(f1, f2);
    return std::abs(lhs - rhs);
}

struct PhasePoint {
    double x;
    double xi;
};

// max |V_phi f(x, xi) - exp(-2 pi i x xi) V_phihat fhat(xi, -x)| over the points.
inline double check_fundamental_identity(const Signal& f, const Signal& phi, const std::vector<PhasePoint>& points) {
    require_compatible(f, phi);
    const GridSpec& g = f.grid;
    const GridSpec dual = g.dual();
    const Signal fh = dft(f), ph = dft(phi);
    double worst = 0;
    for (const auto& p : points) {
        auto on_grid = [](double v, int rate) { return std::abs(v * rate - std::round(v * rate)) < 1e-9; };
        if (!on_grid(p.x, g.R) || !on_grid(p.xi, dual.R)) throw std::invalid_argument("off-grid point");
        const cd lhs = stft_at(f, phi, p.x, p.xi);
        const cd rhs = unit_phase(-p.x * p.xi) * stft_at(fh, ph, p.xi, -p.x);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

}  // namespace wilsontf
