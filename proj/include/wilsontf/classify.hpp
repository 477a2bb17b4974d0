#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "envelope.hpp"
#include "stft.hpp"
#include "weights.hpp"
#include "wilson.hpp"

namespace wilsontf {

inline const std::vector<double>& default_s_grid() {
    static const std::vector<double> g{0.5, 0.75, 1.0, 1.5, 2.0, 3.0};
    return g;
}

inline const std::vector<double>& default_h_grid() {
    static const std::vector<double> g{0.25, 0.5, 1.0, 2.0};
    return g;
}

struct LawCandidate {
    double s = 0, k = 0, C = 0, r2 = 0;
    std::size_t shells = 0;
};

struct DecayFit {
    double s_hat = 0;
    double k_hat = 0;
    double C_hat = 0;
    double r2 = 0;
    std::size_t shells_used = 0;
    std::string law;
    std::vector<LawCandidate> candidates;
};

namespace detail {

struct Shell {
    double rho;    // regressor radius of the shell maximum
    double value;  // shell maximum
};

inline DecayFit select_law(const std::vector<double>& s_grid, const std::string& law,
                           const std::function<std::vector<Shell>(double)>& shells_for) {
    DecayFit best;
    best.law = law;
    bool have = false;
    for (double s : s_grid) {
        if (!(s > 0)) throw std::invalid_argument("s grid entries must be positive");
        const auto shells = shells_for(s);
        if (shells.size() < 8) continue;
        std::vector<double> X, Y;
        for (const auto& sh : shells) {
            X.push_back(sh.rho);
            Y.push_back(std::log(sh.value));
        }
        const LineFit f = fit_line(X, Y);
        LawCandidate c{s, -f.slope, std::exp(f.intercept), f.r2, shells.size()};
        best.candidates.push_back(c);
        if (!have || c.r2 > best.r2) {
            have = true;
            best.s_hat = s;
            best.k_hat = c.k;
            best.C_hat = c.C;
            best.r2 = c.r2;
            best.shells_used = c.shells;
        }
    }
    if (!have) throw std::invalid_argument("too few shells (< 8)");
    return best;
}

}  // namespace detail

// Regresses log(shell max |c|) on rho^{1/s}, rho = |n/2| + |l|, over complete shells.
inline DecayFit fit_coefficient_decay(const CoefficientTable& c, const std::vector<double>& s_grid = default_s_grid(),
                                      double floor = 1e-14) {
    double cmax = 0;
    int lmax = 0, nmax = 0;
    for (const auto& [idx, v] : c.entries) {
        cmax = std::max(cmax, std::abs(v));
        for (int i = 0; i < idx.d; ++i) {
            lmax = std::max(lmax, idx.l[i]);
            nmax = std::max(nmax, std::abs(idx.n[i]));
        }
    }
    const double cut = floor * cmax;
    std::size_t above = 0;
    std::map<double, double> shell;
    const double complete = std::min<double>(lmax, nmax / 2.0);
    for (const auto& [idx, v] : c.entries) {
        const double a = std::abs(v);
        if (a <= cut || cmax == 0) continue;
        ++above;
        const double r = idx.rho();
        if (r > complete + 1e-12) continue;
        auto& m = shell[r];
        m = std::max(m, a);
    }
    if (above < 50) throw std::invalid_argument("table has fewer than 50 entries above the floor");
    return detail::select_law(s_grid, "coefficient", [&](double s) {
        std::vector<detail::Shell> out;
        for (const auto& [r, m] : shell) out.push_back({std::pow(r, 1.0 / s), m});
        return out;
    });
}

// Same scheme on |V| with regressor |x|^{1/s} + |xi|^{1/s}, binned in steps of bin,
// over complete shells.
inline DecayFit fit_stft_decay(const PhasePlaneArray& V, const std::vector<double>& s_grid = default_s_grid(),
                               double floor = 1e-14, double bin = 0.25) {
    const std::size_t N = V.N();
    double vmax = 0;
    for (const auto& v : V.values) vmax = std::max(vmax, std::abs(v));
    const double cut = floor * vmax;
    return detail::select_law(s_grid, "stft", [&](double s) {
        std::map<long long, detail::Shell> bins;
        // shells past the nearer axis end are incomplete
        double xe = 0, xie = 0;
        for (std::size_t j = 0; j < N; ++j) {
            xe = std::max(xe, std::abs(V.x(j)));
            xie = std::max(xie, std::abs(V.xi(j)));
        }
        const double complete = std::pow(std::min(xe, xie), 1.0 / s);
        for (std::size_t j = 0; j < N; ++j) {
            const double px = std::pow(std::abs(V.x(j)), 1.0 / s);
            for (std::size_t k = 0; k < N; ++k) {
                const double a = std::abs(V.at(j, k));
                if (a <= cut) continue;
                const double r = px + std::pow(std::abs(V.xi(k)), 1.0 / s);
                if (r > complete) continue;
                auto key = static_cast<long long>(std::floor(r / bin));
                auto it = bins.find(key);
                if (it == bins.end()) bins.emplace(key, detail::Shell{r, a});
                else if (a > it->second.value) it->second = {r, a};
            }
        }
        std::vector<detail::Shell> out;
        for (const auto& [key, sh] : bins) out.push_back(sh);
        return out;
    });
}

// Shape of a decreasing envelope on a finite radial window: either
// exp(-k r^{1/s}) for one s of the default grid or a power law r^{-k}.
struct TailLaw {
    bool identified = false;
    bool power = false;
    double s = 0, k = 0, r2 = 0;
    std::size_t points = 0;
    std::string str() const;
};

constexpr double kLawR2 = 0.99;

inline std::string TailLaw::str() const {
    std::ostringstream o;
    if (!identified) o << "unidentified (" << points << " points, r2 " << r2 << ")";
    else if (power) o << "r^-" << k << " (r2 " << r2 << ")";
    else o << "exp(-" << k << " r^(1/" << s << ")) (r2 " << r2 << ")";
    return o.str();
}

namespace detail {

// Best law by r2 for the record envelope of pts restricted to [lo, hi].
inline TailLaw tail_law(const std::vector<EnvelopePoint>& pts, double lo, double hi, double floor = 1e-14) {
    double vmax = 0;
    for (const auto& p : pts) vmax = std::max(vmax, p.value);
    std::vector<double> r, y;
    for (const auto& p : record_envelope(pts))
        if (p.r >= lo && p.r <= hi && p.value > floor * vmax && p.r > 0) {
            r.push_back(p.r);
            y.push_back(std::log(p.value));
        }
    TailLaw best;
    best.points = r.size();
    if (r.size() < 8) return best;
    auto consider = [&](bool power, double s, const std::vector<double>& u) {
        const LineFit f = fit_line(u, y);
        if (f.r2 > best.r2) {
            best.power = power;
            best.s = s;
            best.k = -f.slope;
            best.r2 = f.r2;
        }
    };
    for (double s : default_s_grid()) {
        std::vector<double> u;
        for (double v : r) u.push_back(std::pow(v, 1.0 / s));
        consider(false, s, u);
    }
    std::vector<double> lr;
    for (double v : r) lr.push_back(std::log(v));
    consider(true, 0, lr);
    best.identified = best.r2 >= kLawR2;
    return best;
}

// Asymptotic verdict for an envelope following L against exp(h r^{1/s}), h > 0.
inline Verdict law_verdict(const TailLaw& L, double h, double s) {
    if (!L.identified) return {false, "unresolved and no decay law identified: " + L.str()};
    if (L.k <= 0) return {false, "unresolved and the envelope does not decay: " + L.str()};
    if (L.power) return {false, "unresolved with a power-law envelope " + L.str()};
    if (L.s < s - 1e-12) return {true, "envelope " + L.str() + " outpaces the weight"};
    if (L.s > s + 1e-12) return {false, "envelope " + L.str() + " decays slower than the weight grows"};
    if (L.k > h) return {true, "envelope " + L.str() + " has rate above h"};
    return {false, "envelope " + L.str() + " has rate at most h"};
}

// Numeric verdicts stand when finite or when the values overflow or grow.
// Otherwise the decision falls to the envelope law for h > 0.
inline Verdict settle(const Verdict& numeric, double h, double s, const std::function<TailLaw()>& law) {
    if (numeric.finite) return numeric;
    if (numeric.reason.rfind("overflow", 0) == 0 || numeric.reason.rfind("grew", 0) == 0 ||
        numeric.reason.rfind("supremum attained", 0) == 0)
        return numeric;
    if (h == 0) return {true, "unweighted sum of a finite-energy sample"};
    return law_verdict(law(), h, s);
}

// Largest rho with every shell up to it fully present in the table.
inline double complete_radius(const CoefficientTable& c) {
    int lmax = 0, nmax = 0;
    for (const auto& [idx, v] : c.entries)
        for (int i = 0; i < idx.d; ++i) {
            lmax = std::max(lmax, idx.l[i]);
            nmax = std::max(nmax, std::abs(idx.n[i]));
        }
    return std::min<double>(lmax, nmax / 2.0);
}

inline TailLaw coefficient_law(const CoefficientTable& c) {
    const double rc = complete_radius(c);
    std::map<double, double> shell;
    for (const auto& [idx, v] : c.entries) {
        const double r = idx.rho();
        if (r > rc + 1e-12) continue;
        auto& m = shell[r];
        m = std::max(m, std::abs(v));
    }
    std::vector<EnvelopePoint> pts;
    for (const auto& [r, m] : shell) pts.push_back({r, m});
    return tail_law(pts, rc / 3, rc);
}

}  // namespace detail

struct SeriesReport {
    double h = 0, s = 2;
    int sign = +1;
    std::vector<double> radii;
    std::vector<double> partial_sums;
    std::vector<double> increments;
    double complete_radius = 0;
    double outer_ratio = 0;  // weighted max on the outer complete shells over the weighted max
    std::optional<TailLaw> law;
    Verdict verdict;
};

namespace detail {

// Polynomial versus super-polynomial growth of shell maxima.
struct GrowthFit {
    bool tempered = true;
    double rate = 0;  // growth rate in rho^{1/s} when not tempered
};

inline GrowthFit growth_of(const CoefficientTable& c, double s) {
    std::map<double, double> shell;
    for (const auto& [idx, v] : c.entries) {
        const double r = idx.rho();
        if (r < 1) continue;
        auto& m = shell[r];
        m = std::max(m, std::abs(v));
    }
    std::vector<double> lr, u, y;
    for (const auto& [r, m] : shell) {
        if (m <= 0) continue;
        lr.push_back(std::log1p(r));
        u.push_back(std::pow(r, 1.0 / s));
        y.push_back(std::log(m));
    }
    GrowthFit g;
    if (y.size() < 4) return g;
    const LineFit pw = fit_line(lr, y), sx = fit_line(u, y);
    if (sx.slope > 0 && sx.r2 > pw.r2 + 0.02) {
        g.tempered = false;
        g.rate = sx.slope;
    }
    return g;
}

}  // namespace detail

// Partial sums of |c|^2 e^{+-2h rho^{1/s}} over rho <= 8, 16, 24, ...
inline SeriesReport membership_series(const CoefficientTable& c, double h, double s, int sign) {
    if (h < 0) throw std::invalid_argument("h must be non-negative");
    if (!(s > 0)) throw std::invalid_argument("s must be positive");
    SeriesReport rep;
    rep.h = h;
    rep.s = s;
    rep.sign = sign >= 0 ? 1 : -1;
    double rho_max = 0;
    for (const auto& [idx, v] : c.entries) rho_max = std::max(rho_max, idx.rho());
    const double step = rho_max >= 24 ? 8.0 : std::max(rho_max / 3.0, 0.5);
    for (double r = step;; r += step) {
        rep.radii.push_back(r);
        if (r >= rho_max - 1e-12) break;
    }
    rep.increments.assign(rep.radii.size(), 0);
    rep.complete_radius = detail::complete_radius(c);
    const double rc = rep.complete_radius;
    double wmax = 0, wouter = 0;
    for (const auto& [idx, v] : c.entries) {
        const double r = idx.rho();
        std::size_t k = 0;
        while (k + 1 < rep.radii.size() && r > rep.radii[k] + 1e-12) ++k;
        const double a = std::abs(v);
        if (a == 0) continue;
        const double e = std::log(a) + rep.sign * h * std::pow(r, 1.0 / s);
        rep.increments[k] += detail::safe_exp(2 * e);
        if (r <= rc + 1e-12) {
            wmax = std::max(wmax, detail::safe_exp(e));
            if (r > rc / 1.5) wouter = std::max(wouter, detail::safe_exp(e));
        }
    }
    double acc = 0;
    for (double d : rep.increments) rep.partial_sums.push_back(acc += d);
    rep.outer_ratio = wmax > 0 ? wouter / wmax : 0;

    TruncationEvidence ev{rep.radii, rep.partial_sums, rep.increments, {}};
    if (rep.sign < 0 && h > 0) {
        Verdict v = assess(ev, 0);
        if (v.reason.rfind("outer shells below", 0) == 0 || v.reason == "identically zero") {
            rep.verdict = v;
        } else {
            auto g = detail::growth_of(c, s);
            if (g.tempered) rep.verdict = {true, "coefficients of tempered growth against a decaying weight"};
            else if (h > g.rate) rep.verdict = {true, "coefficient growth rate below h"};
            else rep.verdict = {false, "coefficient growth rate at least h"};
        }
        return rep;
    }
    Verdict numeric = assess(ev, h > 0 ? 1 : 0);
    if (numeric.finite && h > 0 && std::isfinite(rep.outer_ratio) &&
        rep.outer_ratio * rep.outer_ratio > kConvergenceTol)
        numeric = {false, "outer complete shells not below 1e-5 of the weighted maximum"};
    rep.verdict = detail::settle(numeric, h, s, [&] {
        rep.law = detail::coefficient_law(c);
        return *rep.law;
    });
    return rep;
}

struct SupSide {
    double sup = 0;
    double at = 0;
    bool boundary = false;
    std::optional<TailLaw> law;
    Verdict verdict;
};

struct SupEntry {
    double h = 0;
    SupSide time, freq;
    bool finite() const { return time.verdict.finite && freq.verdict.finite; }
};

namespace detail {

inline SupSide weighted_sup(const Signal& f, double h, double s) {
    const GridSpec& g = f.grid;
    SupSide out;
    double tail = 0;
    const double T = g.T, cut = T / 1.5;
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double x = g.x(j), a = std::abs(f[j]);
        if (a == 0) continue;
        const double v = safe_exp(std::log(a) + h * std::pow(std::abs(x), 1.0 / s));
        if (v > out.sup) {
            out.sup = v;
            out.at = x;
        }
        if (std::abs(x) > cut) tail = std::max(tail, v);
    }
    out.boundary = std::abs(out.at) > 0.9 * T;
    Verdict numeric;
    if (!std::isfinite(out.sup)) numeric = {false, "overflow of the weighted values"};
    else if (out.sup == 0) numeric = {true, "identically zero"};
    else if (out.boundary) numeric = {false, "supremum attained in the outer 10% of the grid"};
    else if ((tail / out.sup) * (tail / out.sup) <= kConvergenceTol) numeric = {true, "outer values below 1e-5 of the supremum"};
    else if (h > 0) numeric = {false, "outer values do not fall below 1e-5 of the supremum under a growing weight"};
    else numeric = {true, "bounded samples"};
    out.verdict = settle(numeric, h, s, [&] {
        std::vector<EnvelopePoint> pts;
        for (std::size_t j = 0; j < f.size(); ++j) pts.push_back({std::abs(g.x(j)), std::abs(f[j])});
        out.law = tail_law(pts, T / 6, T / 2);
        return *out.law;
    });
    return out;
}

}  // namespace detail

inline std::vector<SupEntry> gs_sup_check(const Signal& f, const std::vector<double>& h_list, double s) {
    f.check();
    if (f.dim != 1) throw std::invalid_argument("sup check is one-dimensional");
    if (!(s > 0)) throw std::invalid_argument("s must be positive");
    const Signal fh = dft(f);
    std::vector<SupEntry> out;
    for (double h : h_list) {
        if (h < 0) throw std::invalid_argument("h must be non-negative");
        out.push_back({h, detail::weighted_sup(f, h, s), detail::weighted_sup(fh, h, s)});
    }
    return out;
}

namespace detail {

// l1 radius |x| + |xi| envelope of |V| over the alias-free square |x|, |xi| <= r_w.
inline TailLaw plane_law(const PhasePlaneArray& V, double bin = 0.25) {
    const double rw = std::min(V.grid.T, V.grid.R / 2.0) / 2;
    std::map<long long, double> bins;
    for (std::size_t j = 0; j < V.N(); ++j) {
        const double x = std::abs(V.x(j));
        if (x > rw) continue;
        for (std::size_t k = 0; k < V.N(); ++k) {
            const double xi = std::abs(V.xi(k));
            if (xi > rw) continue;
            auto& m = bins[std::llround((x + xi) / bin)];
            m = std::max(m, std::abs(V.at(j, k)));
        }
    }
    std::vector<EnvelopePoint> pts;
    for (const auto& [b, m] : bins) pts.push_back({static_cast<double>(b) * bin, m});
    return tail_law(pts, rw / 3, rw);
}

}  // namespace detail

struct RouteVerdicts {
    double h = 0, s = 2;
    bool sup = false, series = false, modulation = false;
    bool dual_series = false;  // sign - series
    bool agree() const { return sup == series && series == modulation; }
};

struct ClassSummary {
    double s = 2;
    // per route: Roumieu = finite at some tested h, Beurling = finite at all
    std::map<std::string, bool> roumieu, beurling;
    bool S = false, Sigma = false, S_dual = false, Sigma_dual = false;
    bool consistent = true;
    std::string verdict;
};

struct MembershipReport {
    std::vector<double> h_grid;
    std::vector<double> s_probes;
    std::optional<DecayFit> fit;
    std::string fit_error;
    std::vector<RouteVerdicts> grid;
    std::vector<SeriesReport> series_evidence;
    std::vector<SeriesReport> dual_evidence;
    std::vector<std::vector<SupEntry>> sup_evidence;  // one per s probe
    std::vector<NormReport> modulation_evidence;
    std::optional<TailLaw> plane_law;  // envelope law of |V| used by unresolved modulation verdicts
    std::vector<ClassSummary> classes;
    std::vector<std::string> notes;
    bool consistent = true;
    std::string verdict;
};

struct ClassifyOptions {
    std::vector<double> s_list{2.0};
    std::vector<double> h_grid = default_h_grid();
    bool probe_fitted = true;
};

namespace detail {
inline std::string num(double v) {
    std::ostringstream o;
    o << v;
    return o.str();
}
}  // namespace detail

inline MembershipReport classify_gs(const Signal& f, const WilsonSystem& sys, const Signal& phi,
                                    const ClassifyOptions& opt = {}) {
    if (f.dim != 1) throw std::invalid_argument("classification is one-dimensional");
    MembershipReport rep;
    rep.h_grid = opt.h_grid;
    std::sort(rep.h_grid.begin(), rep.h_grid.end());
    const CoefficientTable c = analyze(f, sys);
    try {
        rep.fit = fit_coefficient_decay(c);
    } catch (const std::invalid_argument& e) {
        rep.fit_error = e.what();
    }
    rep.s_probes = opt.s_list;
    if (opt.probe_fitted && rep.fit) {
        if (rep.fit->s_hat > 1) rep.s_probes.push_back(rep.fit->s_hat);
        else rep.notes.push_back("fitted s = " + detail::num(rep.fit->s_hat) +
                                 " is not above 1; subexponential weights need s > 1, so it is not probed");
    }
    std::sort(rep.s_probes.begin(), rep.s_probes.end());
    rep.s_probes.erase(std::unique(rep.s_probes.begin(), rep.s_probes.end()), rep.s_probes.end());
    const PhasePlaneArray V = stft(f, phi);

    for (double s : rep.s_probes) {
        auto sups = gs_sup_check(f, rep.h_grid, s);
        ClassSummary cs;
        cs.s = s;
        for (const char* r : {"sup", "series", "modulation"}) {
            cs.roumieu[r] = false;
            cs.beurling[r] = true;
        }
        bool dual_all = true, dual_any = false;
        for (std::size_t i = 0; i < rep.h_grid.size(); ++i) {
            const double h = rep.h_grid[i];
            RouteVerdicts rv;
            rv.h = h;
            rv.s = s;
            rv.sup = sups[i].finite();
            auto ser = membership_series(c, h, s, +1);
            auto dual = membership_series(c, h, s, -1);
            auto mod = modulation_norm(V, 2, 2, WeightSpec::product(h, s));
            mod.verdict = detail::settle(mod.verdict, h, s, [&] {
                if (!rep.plane_law) rep.plane_law = detail::plane_law(V);
                return *rep.plane_law;
            });
            rv.series = ser.verdict.finite;
            rv.dual_series = dual.verdict.finite;
            rv.modulation = mod.verdict.finite;
            std::map<std::string, bool> by{{"sup", rv.sup}, {"series", rv.series}, {"modulation", rv.modulation}};
            for (auto& [r, ok] : by) {
                cs.roumieu[r] = cs.roumieu[r] || ok;
                cs.beurling[r] = cs.beurling[r] && ok;
            }
            dual_all = dual_all && rv.dual_series;
            dual_any = dual_any || rv.dual_series;
            cs.consistent = cs.consistent && rv.agree();
            rep.grid.push_back(rv);
            rep.series_evidence.push_back(ser);
            rep.dual_evidence.push_back(dual);
            rep.modulation_evidence.push_back(mod);
        }
        rep.sup_evidence.push_back(sups);
        cs.S = cs.roumieu["sup"] && cs.roumieu["series"] && cs.roumieu["modulation"];
        cs.Sigma = cs.beurling["sup"] && cs.beurling["series"] && cs.beurling["modulation"];
        cs.S_dual = dual_all;
        cs.Sigma_dual = dual_any;
        const std::string at = " at s=" + detail::num(s) + " on tested grid";
        if (!cs.consistent) cs.verdict = "routes disagree" + at;
        else if (cs.Sigma) cs.verdict = "Σ-type" + at;
        else if (cs.S) cs.verdict = "S-type (some h)" + at;
        else cs.verdict = "not in S_s" + at;
        rep.consistent = rep.consistent && cs.consistent;
        rep.classes.push_back(cs);
    }
    for (const auto& cs : rep.classes)
        if (std::abs(cs.s - 2) < 1e-12 || rep.verdict.empty()) rep.verdict = cs.verdict;
    rep.notes.push_back("Roumieu means finite at one or more tested h, Beurling finite at every tested h");
    rep.notes.push_back("distribution-side exponent read as 1/s in the STFT growth bound");
    return rep;
}

struct Pairing {
    cd value = 0;
    double bound = 0;
    double h_used = 0;
    bool holds = false;
    std::vector<std::pair<double, double>> bounds;  // (h, bound) for every h with both factors finite
};

// sum conj(a) c in lexicographic order and its Cauchy-Schwarz bound.
inline Pairing pair_distribution(const CoefficientTable& a, const CoefficientTable& c, const std::vector<double>& hs, double s) {
    if (hs.empty()) throw std::invalid_argument("need at least one h");
    Pairing out;
    for (const auto& [idx, v] : c.entries) {
        auto it = a.entries.find(idx);
        if (it != a.entries.end()) out.value += std::conj(it->second) * v;
    }
    bool have = false;
    for (double h : hs) {
        auto sc = membership_series(c, h, s, -1);
        auto sa = membership_series(a, h, s, +1);
        if (!sc.verdict.finite || !sa.verdict.finite) continue;
        const double b = std::sqrt(sc.partial_sums.back()) * std::sqrt(sa.partial_sums.back());
        out.bounds.emplace_back(h, b);
        if (!have || b < out.bound) {
            have = true;
            out.bound = b;
            out.h_used = h;
        }
    }
    if (!have) throw std::invalid_argument("pairing rejected: bound divergent for every supplied h");
    out.holds = std::abs(out.value) <= out.bound * (1 + 1e-12);
    return out;
}

inline Pairing pair_distribution(const CoefficientTable& a, const CoefficientTable& c, double h, double s) {
    return pair_distribution(a, c, std::vector<double>{h}, s);
}

}  // namespace wilsontf
