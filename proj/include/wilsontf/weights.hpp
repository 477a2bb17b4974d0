#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <utility>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "grid.hpp"
#include "stft.hpp"
#include "wilson.hpp"

namespace wilsontf {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Weights

struct WeightSpec {
    enum class Kind { subexp, poly, product, reciprocal, tensor };
    Kind kind = Kind::subexp;
    double h = 0, s = 2, sigma = 0;
    std::vector<WeightSpec> parts;  // reciprocal: {base}; tensor: {time weight, frequency weight}

    static WeightSpec subexp(double h, double s) { return {Kind::subexp, h, s, 0, {}}; }
    static WeightSpec poly(double sigma) { return {Kind::poly, 0, 2, sigma, {}}; }
    static WeightSpec product(double h, double s) { return {Kind::product, h, s, 0, {}}; }
    static WeightSpec reciprocal(WeightSpec base) { return {Kind::reciprocal, 0, 2, 0, {std::move(base)}}; }
    static WeightSpec tensor(WeightSpec wx, WeightSpec wxi) { return {Kind::tensor, 0, 2, 0, {std::move(wx), std::move(wxi)}}; }
    static WeightSpec one() { return subexp(0, 2); }

    // True for weights on the (x, xi) plane.
    bool planar() const {
        switch (kind) {
            case Kind::product:
            case Kind::tensor: return true;
            case Kind::reciprocal: return parts.at(0).planar();
            default: return false;
        }
    }

    double log_at(double x) const {
        switch (kind) {
            case Kind::subexp: return h == 0 ? 0.0 : h * std::pow(std::abs(x), 1.0 / s);
            case Kind::poly: return sigma * std::log1p(std::abs(x));
            case Kind::reciprocal: return -parts.at(0).log_at(x);
            default: throw std::invalid_argument("weight needs two arguments");
        }
    }

    double log_at(double x, double xi) const {
        switch (kind) {
            case Kind::product:
                return h == 0 ? 0.0 : h * (std::pow(std::abs(x), 1.0 / s) + std::pow(std::abs(xi), 1.0 / s));
            case Kind::tensor: return parts.at(0).log_at(x) + parts.at(1).log_at(xi);
            case Kind::reciprocal: return -parts.at(0).log_at(x, xi);
            default: throw std::invalid_argument("weight takes one argument");
        }
    }

    double operator()(double x) const { return std::exp(log_at(x)); }
    double operator()(double x, double xi) const { return std::exp(log_at(x, xi)); }

    // +1 grows away from the origin, 0 constant, -1 decays.
    int trend() const {
        switch (kind) {
            case Kind::subexp:
            case Kind::product: return h > 0 ? 1 : 0;
            case Kind::poly: return sigma > 0 ? 1 : 0;
            case Kind::reciprocal: return -parts.at(0).trend();
            case Kind::tensor: {
                int a = parts.at(0).trend(), b = parts.at(1).trend();
                if (a > 0 || b > 0) return 1;
                return std::min(a, b);
            }
        }
        return 1;
    }

    // Submultiplicative companion v with w(x + y) <= w(x) v(y).
    WeightSpec companion() const {
        switch (kind) {
            case Kind::reciprocal: return parts.at(0).companion();
            case Kind::tensor: return tensor(parts.at(0).companion(), parts.at(1).companion());
            default: return *this;
        }
    }

    std::string str() const {
        auto num = [](double v) {
            std::ostringstream o;
            o << v;
            return o.str();
        };
        switch (kind) {
            case Kind::subexp: return "subexp(" + num(h) + "," + num(s) + ")";
            case Kind::poly: return "poly(" + num(sigma) + ")";
            case Kind::product: return "product(" + num(h) + "," + num(s) + ")";
            case Kind::reciprocal: return "reciprocal(" + parts.at(0).str() + ")";
            case Kind::tensor: return "tensor(" + parts.at(0).str() + "," + parts.at(1).str() + ")";
        }
        return "?";
    }
};

// Parses subexp(h,s), poly(sigma), product(h,s), reciprocal(...), tensor(...,...), one.
inline WeightSpec parse_weight(const std::string& text) {
    std::string t;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (t == "one" || t == "1") return WeightSpec::one();
    auto open = t.find('(');
    if (open == std::string::npos || t.back() != ')') throw std::invalid_argument("malformed weight: " + text);
    const std::string head = t.substr(0, open), body = t.substr(open + 1, t.size() - open - 2);
    std::vector<std::string> args;
    int depth = 0;
    std::string cur;
    for (char c : body) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            args.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    args.push_back(cur);
    auto number = [&](const std::string& a) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(a, &used);
        } catch (...) {
            used = 0;
        }
        if (used != a.size() || a.empty()) throw std::invalid_argument("bad weight parameter '" + a + "'");
        return v;
    };
    auto need = [&](std::size_t n) {
        if (args.size() != n) throw std::invalid_argument(head + " takes " + std::to_string(n) + " argument(s)");
    };
    WeightSpec w;
    if (head == "subexp" || head == "product") {
        need(2);
        w = head == "subexp" ? WeightSpec::subexp(number(args[0]), number(args[1]))
                             : WeightSpec::product(number(args[0]), number(args[1]));
        if (w.h < 0) throw std::invalid_argument("weight needs h >= 0");
        if (w.s <= 0) throw std::invalid_argument("weight needs s > 0");
    } else if (head == "poly") {
        need(1);
        w = WeightSpec::poly(number(args[0]));
        if (w.sigma < 0) throw std::invalid_argument("poly weight needs sigma >= 0");
    } else if (head == "reciprocal") {
        need(1);
        w = WeightSpec::reciprocal(parse_weight(args[0]));
    } else if (head == "tensor") {
        need(2);
        w = WeightSpec::tensor(parse_weight(args[0]), parse_weight(args[1]));
        if (w.parts[0].planar() || w.parts[1].planar()) throw std::invalid_argument("tensor factors must be one-dimensional");
    } else {
        throw std::invalid_argument("unknown weight kind: " + head);
    }
    return w;
}

struct BeurlingDomarAxis {
    int axis = 0;
    std::vector<long long> N;
    std::vector<double> partial;
    double last_term = 0;     // n^-2 log w(n) at n = N_max + 1
    double decade_ratio = 0;  // (S(1e4) - S(1e3)) / (S(1e3) - S(1e2))
    double tail_estimate = 0;
    bool bounded = false;
};

struct WeightAxiomReport {
    std::string weight;
    std::size_t pairs = 0;
    std::size_t violations = 0;
    double C = 1;
    std::string companion;
    double sandwich_r = 0;
    bool sandwich_holds = false;
    std::vector<BeurlingDomarAxis> beurling_domar;
};

inline WeightAxiomReport check_weight_axioms(const WeightSpec& w, std::size_t sample_count, std::uint64_t seed,
                                             double box = 16) {
    if (sample_count < 100) throw std::invalid_argument("sample_count must be at least 100");
    WeightAxiomReport rep;
    rep.weight = w.str();
    const WeightSpec v = w.companion();
    rep.companion = v.str();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-box, box);
    const bool plane = w.planar();
    double r = 0;
    for (std::size_t i = 0; i < sample_count; ++i) {
        double lhs, rhs, lx, nx;
        if (plane) {
            double x1 = U(rng), x2 = U(rng), y1 = U(rng), y2 = U(rng);
            lhs = w.log_at(x1 + y1, x2 + y2);
            rhs = w.log_at(x1, x2) + v.log_at(y1, y2);
            lx = w.log_at(x1, x2);
            nx = std::abs(x1) + std::abs(x2);
        } else {
            double x = U(rng), y = U(rng);
            lhs = w.log_at(x + y);
            rhs = w.log_at(x) + v.log_at(y);
            lx = w.log_at(x);
            nx = std::abs(x);
        }
        ++rep.pairs;
        if (lhs > rhs + 1e-12 * std::max(1.0, std::abs(rhs))) ++rep.violations;
        if (nx >= 1) r = std::max(r, std::abs(lx) / nx);
    }
    rep.sandwich_r = r;
    rep.sandwich_holds = std::isfinite(r);

    const std::vector<long long> checkpoints{100, 1000, 10000};
    const int axes = plane ? 2 : 1;
    for (int a = 0; a < axes; ++a) {
        auto term = [&](long long n) {
            double t = static_cast<double>(n);
            double lw = plane ? (a == 0 ? w.log_at(t, 0) : w.log_at(0, t)) : w.log_at(t);
            return lw / (t * t);
        };
        BeurlingDomarAxis bd;
        bd.axis = a;
        double S = 0;
        std::size_t next = 0;
        for (long long n = 1; n <= checkpoints.back(); ++n) {
            S += term(n);
            if (n == checkpoints[next]) {
                bd.N.push_back(n);
                bd.partial.push_back(S);
                ++next;
            }
        }
        bd.last_term = term(checkpoints.back() + 1);
        const double d1 = bd.partial[1] - bd.partial[0], d2 = bd.partial[2] - bd.partial[1];
        bd.decade_ratio = d1 != 0 ? d2 / d1 : 0;
        bd.bounded = std::abs(d1) < 1e-300 || (bd.decade_ratio >= 0 && bd.decade_ratio < 0.95);
        bd.tail_estimate = bd.bounded ? (d1 != 0 ? d2 * bd.decade_ratio / (1 - bd.decade_ratio) : 0)
                                      : std::numeric_limits<double>::infinity();
        rep.beurling_domar.push_back(bd);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Truncation verdicts

// Evidence for one weighted quantity evaluated on nested truncations.
// partial[i] is the quantity in squared form on region i, increment[i] the
// squared contribution of the shell between regions i-1 and i.
struct TruncationEvidence {
    std::vector<double> radii;
    std::vector<double> partial;
    std::vector<double> increment;
    std::vector<double> measure;  // cells per shell, empty when the quantity is not additive
};

struct Verdict {
    bool finite = true;
    std::string reason;
    std::string str() const { return finite ? "finite" : "divergent"; }
};

constexpr double kConvergenceTol = 1e-10;

// trend: +1 for weights that grow away from the origin, 0 constant, -1 decaying.
inline Verdict assess(const TruncationEvidence& ev, int trend) {
    const auto& Q = ev.partial;
    const auto& D = ev.increment;
    const std::size_t K = Q.size();
    if (K == 0) return {true, "empty"};
    for (std::size_t i = 0; i < K; ++i)
        if (!std::isfinite(Q[i]) || !std::isfinite(D[i])) return {false, "overflow of the weighted values"};
    const double total = Q.back();
    if (total == 0) return {true, "identically zero"};
    // Shells widen outward, so under a decaying weight totals grow with the
    // covered area and the comparison is made per cell instead.
    const bool per_cell = trend < 0 && K >= 2 && ev.measure.size() == K && ev.measure[K - 1] > 0 && ev.measure[K - 2] > 0;
    if (!per_cell && K >= 3 && Q[K - 2] > 1.21 * Q[K - 3] && Q[K - 1] > 1.21 * Q[K - 2])
        return {false, "grew more than 10% on two successive truncation steps"};
    const double d_last = D[K - 1], d_prev = K >= 2 ? D[K - 2] : D[K - 1];
    if (d_last <= kConvergenceTol * total && d_prev <= kConvergenceTol * total)
        return {true, "outer shells below 1e-10 of the total"};
    if (trend > 0) return {false, "outer shells do not fall below 1e-10 of the total under a growing weight"};
    if (per_cell) {
        if (d_last / ev.measure[K - 1] <= d_prev / ev.measure[K - 2])
            return {true, "outer shell density does not grow under a decaying weight"};
        return {false, "outer shell density grows under a decaying weight"};
    }
    if (d_last <= d_prev) return {true, "outer shell contributions do not grow"};
    return {false, "outer shell contributions grow"};
}

struct NormReport {
    std::string kind;
    double value = 0;
    bool squared = false;
    double tail = 0;
    Verdict verdict;
    json params = json::object();
    TruncationEvidence evidence;
    std::string warning;
    bool finite() const { return verdict.finite; }
};

namespace detail {

inline const std::vector<double>& truncation_fractions() {
    static const std::vector<double> f{1 / 2.25, 1 / 1.5, 1.0};
    return f;
}

// Squared-form partial sums over nested regions {r <= fraction*rmax}.
inline TruncationEvidence nested_sums(const std::vector<double>& r, const std::vector<double>& term, double rmax) {
    TruncationEvidence ev;
    const auto& fr = truncation_fractions();
    ev.partial.assign(fr.size(), 0);
    ev.increment.assign(fr.size(), 0);
    ev.measure.assign(fr.size(), 0);
    for (double f : fr) ev.radii.push_back(f * rmax);
    for (std::size_t i = 0; i < r.size(); ++i) {
        std::size_t shell = fr.size();
        for (std::size_t k = 0; k < fr.size(); ++k)
            if (r[i] <= ev.radii[k] * (1 + 1e-12)) {
                shell = k;
                break;
            }
        if (shell == fr.size()) shell = fr.size() - 1;
        ev.increment[shell] += term[i];
        ev.measure[shell] += 1;
    }
    double acc = 0;
    for (std::size_t k = 0; k < fr.size(); ++k) {
        acc += ev.increment[k];
        ev.partial[k] = acc;
    }
    return ev;
}

inline double safe_exp(double v) { return v > 700 ? std::numeric_limits<double>::infinity() : std::exp(v); }

}  // namespace detail

// ||f w|| on the grid; truncation regions are centered boxes in the sup norm of x.
inline NormReport weighted_l2_norm(const Signal& f, const WeightSpec& w) {
    f.check();
    if (w.planar() && f.dim != 2) throw std::invalid_argument("planar weight needs a two-dimensional signal");
    const GridSpec& g = f.grid;
    const std::size_t N = g.N();
    std::vector<double> r(f.size()), term(f.size());
    const double cell = std::pow(1.0 / g.R, f.dim);
    for (std::size_t i = 0; i < f.size(); ++i) {
        double lw;
        if (f.dim == 1) {
            const double x = g.x(i);
            r[i] = std::abs(x);
            lw = w.log_at(x);
        } else {
            const double x1 = g.x(i / N), x2 = g.x(i % N);
            r[i] = std::max(std::abs(x1), std::abs(x2));
            lw = w.planar() ? w.log_at(x1, x2) : w.log_at(x1) + w.log_at(x2);
        }
        const double a = std::abs(f[i]);
        term[i] = a == 0 ? 0.0 : cell * detail::safe_exp(2 * (std::log(a) + lw));
    }
    NormReport rep;
    rep.kind = "weighted_l2";
    rep.evidence = detail::nested_sums(r, term, g.T);
    rep.verdict = assess(rep.evidence, w.trend());
    rep.value = std::sqrt(rep.evidence.partial.back());
    rep.tail = std::sqrt(rep.evidence.increment.back());
    rep.params = {{"weight", w.str()}, {"T", g.T}, {"R", g.R}};
    return rep;
}

// int (int |V|^2 dx) e^{2h|xi|^{1/s}} dxi, reported in squared form.
inline NormReport coorbit_norm(const PhasePlaneArray& V, double h, double s) {
    if (h < 0) throw std::invalid_argument("coorbit norm needs h >= 0");
    if (s <= 0) throw std::invalid_argument("coorbit norm needs s > 0");
    const std::size_t N = V.N();
    const double cell = V.cell();
    std::vector<double> r(N), term(N);
    for (std::size_t k = 0; k < N; ++k) {
        double m = 0;
        for (std::size_t j = 0; j < N; ++j) m += std::norm(V.at(j, k));
        const double xi = V.xi(k);
        r[k] = std::abs(xi);
        term[k] = m * cell * detail::safe_exp(2 * h * std::pow(std::abs(xi), 1.0 / s));
    }
    NormReport rep;
    rep.kind = "coorbit";
    rep.squared = true;
    rep.evidence = detail::nested_sums(r, term, V.grid.R / 2.0);
    rep.verdict = assess(rep.evidence, h > 0 ? 1 : 0);
    rep.value = rep.evidence.partial.back();
    rep.tail = rep.evidence.increment.back();
    rep.params = {{"h", h}, {"s", s}};
    return rep;
}

inline NormReport coorbit_norm(const Signal& f, const Signal& phi, double h, double s) {
    if (norm(phi) == 0) throw std::invalid_argument("window must be nonzero");
    return coorbit_norm(stft(f, phi), h, s);
}

// Same double integral with the weight on the time marginal.
inline NormReport time_marginal_norm(const PhasePlaneArray& V, double h, double s) {
    const std::size_t N = V.N();
    const double cell = V.cell();
    std::vector<double> r(N), term(N);
    for (std::size_t j = 0; j < N; ++j) {
        double m = 0;
        for (std::size_t k = 0; k < N; ++k) m += std::norm(V.at(j, k));
        const double x = V.x(j);
        r[j] = std::abs(x);
        term[j] = m * cell * detail::safe_exp(2 * h * std::pow(std::abs(x), 1.0 / s));
    }
    NormReport rep;
    rep.kind = "time_marginal";
    rep.squared = true;
    rep.evidence = detail::nested_sums(r, term, V.grid.T);
    rep.verdict = assess(rep.evidence, h > 0 ? 1 : 0);
    rep.value = rep.evidence.partial.back();
    rep.tail = rep.evidence.increment.back();
    rep.params = {{"h", h}, {"s", s}};
    return rep;
}

struct FourierCoorbitReport {
    NormReport report;        // coorbit norm of fhat with window phihat
    NormReport time_route;    // time-marginal weighting of V_phi f
    double relative_gap = 0;  // |route1 - route2| / route1
};

inline FourierCoorbitReport fourier_coorbit_norm(const Signal& f, const Signal& phi, double h, double s) {
    if (norm(phi) == 0) throw std::invalid_argument("window must be nonzero");
    FourierCoorbitReport out;
    out.report = coorbit_norm(stft(dft(f), dft(phi)), h, s);
    out.report.kind = "fourier_coorbit";
    out.time_route = time_marginal_norm(stft(f, phi), h, s);
    const double a = out.report.value, b = out.time_route.value;
    out.relative_gap = a == 0 ? std::abs(b) : std::abs(a - b) / a;
    out.report.params["time_route_value"] = b;
    out.report.params["relative_gap"] = out.relative_gap;
    return out;
}

struct Sandwich {
    double lower = 0, value = 0, upper = 0;
    bool holds = false;
    Verdict verdict;
};

inline Sandwich lemma2_sandwich(const Signal& f, const Signal& phi, double h, double s) {
    if (s <= 1) throw std::invalid_argument("sandwich needs s > 1");
    require_compatible(f, phi);
    const NormReport v = time_marginal_norm(stft(f, phi), h, s);
    const NormReport fw = weighted_l2_norm(f, WeightSpec::subexp(h, s));
    double lo = 0, hi = 0;
    for (std::size_t j = 0; j < phi.size(); ++j) {
        const double u = std::pow(std::abs(phi.grid.x(j)), 1.0 / s);
        const double p2 = std::norm(phi[j]) / phi.grid.R;
        lo += p2 * std::exp(-2 * h * u);
        hi += p2 * detail::safe_exp(2 * h * u);
    }
    const double fw2 = fw.value * fw.value;
    Sandwich out;
    out.value = v.value;
    out.lower = fw2 * lo;
    out.upper = fw2 * hi;
    const double eps = 1e-12 * std::max(1.0, out.upper);
    out.holds = out.lower <= out.value + eps && out.value <= out.upper + eps;
    if (!fw.finite()) out.verdict = fw.verdict;
    else out.verdict = v.verdict;
    return out;
}

namespace detail {

// Mixed norm (sum_xi (sum_x |V w|^p dx)^{q/p} dxi)^{1/q} with inner variable x,
// outer xi and sup for infinite exponents, evaluated in one pass over the plane
// for every nested box and every annulus between consecutive boxes.
// Results are squared.
struct MixedNorms {
    std::vector<double> boxes, annuli;
    std::vector<double> cells;  // plane cells per annulus
};

inline MixedNorms nested_mixed_norms(const PhasePlaneArray& V, const WeightSpec& w, double p, double q) {
    const std::size_t N = V.N();
    const auto& fr = truncation_fractions();
    const std::size_t A = fr.size();
    const double dx = 1.0 / V.grid.R, dxi = 1.0 / (2 * V.grid.T);
    const double T = V.grid.T, half = V.grid.R / 2.0;
    const bool pinf = std::isinf(p), qinf = std::isinf(q);
    // inner[a][k]: contribution of annulus a to column k; seen[a][k]: column meets annulus a.
    std::vector<std::vector<double>> inner(A, std::vector<double>(N, 0.0));
    std::vector<std::vector<char>> seen(A, std::vector<char>(N, 0));
    std::vector<double> bxi(N), cells(A, 0.0);
    for (std::size_t k = 0; k < N; ++k) bxi[k] = std::abs(V.xi(k)) / half;
    for (std::size_t j = 0; j < N; ++j) {
        const double x = V.x(j), bx = std::abs(x) / T;
        for (std::size_t k = 0; k < N; ++k) {
            const double b = std::max(bx, bxi[k]);
            std::size_t a = 0;
            while (a + 1 < A && b > fr[a] * (1 + 1e-12)) ++a;
            seen[a][k] = 1;
            cells[a] += 1;
            const double m = std::abs(V.at(j, k));
            if (m == 0) continue;
            const double lv = std::log(m) + w.log_at(x, V.xi(k));
            if (pinf) inner[a][k] = std::max(inner[a][k], safe_exp(lv));
            else inner[a][k] += safe_exp(p * lv) * dx;
        }
    }
    auto finish = [&](const std::vector<double>& col, const std::vector<char>& any) {
        double outer = 0;
        for (std::size_t k = 0; k < N; ++k) {
            if (!any[k]) continue;
            const double line = pinf ? col[k] : std::pow(col[k], 1.0 / p);
            if (qinf) outer = std::max(outer, line);
            else outer += std::pow(line, q) * dxi;
        }
        const double v = qinf ? outer : std::pow(outer, 1.0 / q);
        return v * v;
    };
    MixedNorms out;
    out.cells = std::move(cells);
    std::vector<double> col(N, 0.0);
    std::vector<char> any(N, 0);
    for (std::size_t a = 0; a < A; ++a) {
        for (std::size_t k = 0; k < N; ++k) {
            col[k] = pinf ? std::max(col[k], inner[a][k]) : col[k] + inner[a][k];
            any[k] = any[k] || seen[a][k];
        }
        out.boxes.push_back(finish(col, any));
        out.annuli.push_back(finish(inner[a], seen[a]));
    }
    return out;
}

}  // namespace detail

// Truncation regions are the boxes max(|x|/T, |xi|/(R/2)) <= fraction.
inline NormReport modulation_norm(const PhasePlaneArray& V, double p, double q, const WeightSpec& w) {
    if (!(p >= 1) || !(q >= 1)) throw std::invalid_argument("p and q must lie in [1, inf]");
    if (!w.planar()) throw std::invalid_argument("modulation norm needs a product, tensor or reciprocal weight");
    NormReport rep;
    rep.kind = "modulation";
    auto mixed = detail::nested_mixed_norms(V, w, p, q);
    rep.evidence.radii = detail::truncation_fractions();
    rep.evidence.partial = std::move(mixed.boxes);
    rep.evidence.increment = std::move(mixed.annuli);
    // only the p = q = 2 quantity is a plain sum over cells
    if (p == 2 && q == 2) rep.evidence.measure = std::move(mixed.cells);
    rep.verdict = assess(rep.evidence, w.trend());
    rep.value = std::sqrt(rep.evidence.partial.back());
    rep.tail = std::sqrt(rep.evidence.increment.back());
    rep.params = {{"p", p}, {"q", q}, {"weight", w.str()}};
    return rep;
}

inline NormReport modulation_norm(const Signal& f, const Signal& phi, double p, double q, const WeightSpec& w) {
    return modulation_norm(stft(f, phi), p, q, w);
}

// l^{p,q} norm with w(n,l) = e^{h(|n/2|^{1/s} + |l|^{1/s})}: inner over n, outer over l.
inline NormReport sequence_norm(const CoefficientTable& c, double p, double q, double h, double s) {
    if (!(p >= 1) || !(q >= 1)) throw std::invalid_argument("p and q must lie in [1, inf]");
    NormReport rep;
    rep.kind = "sequence";
    rep.params = {{"p", p}, {"q", q}, {"h", h}, {"s", s}};
    if (c.entries.empty()) {
        rep.warning = "empty table";
        return rep;
    }
    double rho_max = 0;
    for (const auto& [idx, v] : c.entries) rho_max = std::max(rho_max, idx.rho());
    const bool pinf = std::isinf(p), qinf = std::isinf(q);
    auto lw = [&](const WilsonIndex& idx) {
        double e = 0;
        for (int i = 0; i < idx.d; ++i)
            e += std::pow(std::abs(idx.n[i]) / 2.0, 1.0 / s) + std::pow(std::abs(idx.l[i]), 1.0 / s);
        return h * e;
    };
    auto norm_sq = [&](auto&& keep) {
        double outer = 0, inner = 0;
        bool have = false;
        const WilsonIndex* group = nullptr;
        auto flush = [&] {
            if (!have) return;
            const double line = pinf ? inner : std::pow(inner, 1.0 / p);
            if (qinf) outer = std::max(outer, line);
            else outer += std::pow(line, q);
            inner = 0;
            have = false;
        };
        for (const auto& [idx, v] : c.entries) {
            if (group && (idx.l != group->l)) flush();
            group = &idx;
            if (!keep(idx)) continue;
            have = true;
            const double a = std::abs(v);
            if (a == 0) continue;
            const double lv = std::log(a) + (h == 0 ? 0.0 : lw(idx));
            if (pinf) inner = std::max(inner, detail::safe_exp(lv));
            else inner += detail::safe_exp(p * lv);
        }
        flush();
        const double value = qinf ? outer : std::pow(outer, 1.0 / q);
        return value * value;
    };
    const auto& fr = detail::truncation_fractions();
    for (std::size_t i = 0; i < fr.size(); ++i) {
        const double outer = fr[i] * rho_max * (1 + 1e-12), in_r = i ? fr[i - 1] * rho_max * (1 + 1e-12) : -1.0;
        rep.evidence.radii.push_back(fr[i] * rho_max);
        rep.evidence.partial.push_back(norm_sq([&](const WilsonIndex& x) { return x.rho() <= outer; }));
        rep.evidence.increment.push_back(norm_sq([&](const WilsonIndex& x) {
            const double r = x.rho();
            return r <= outer && r > in_r;
        }));
    }
    rep.verdict = assess(rep.evidence, h > 0 ? 1 : 0);
    rep.value = std::sqrt(rep.evidence.partial.back());
    rep.tail = std::sqrt(rep.evidence.increment.back());
    return rep;
}

}  // namespace wilsontf
