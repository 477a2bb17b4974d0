#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "blocks.hpp"
#include "classify.hpp"
#include "io.hpp"

namespace wilsontf {

struct CorpusEntry {
    std::string name;
    FunctionSpec spec;
};

inline const std::vector<CorpusEntry>& corpus() {
    static const std::vector<CorpusEntry> c{
        {"gaussian(1)", FunctionSpec::gaussian(1)}, {"hermite(1)", FunctionSpec::hermite(1)},
        {"hermite(4)", FunctionSpec::hermite(4)},   {"sech", FunctionSpec::sech()},
        {"bspline(2)", FunctionSpec::bspline(2)},   {"subexp(2,1)", FunctionSpec::subexp(2, 1)},
    };
    return c;
}

struct Check {
    int criterion = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifyOptions {
    bool quick = false;
    std::set<int> criteria;  // empty: all
    std::optional<TightWindow> window;
    std::uint64_t seed = 20240611;
    int l_max = 15, n_max = 24;
};

struct VerifyReport {
    std::vector<Check> checks;
    std::vector<std::pair<int, double>> seconds;  // per criterion
    std::size_t passed() const {
        std::size_t n = 0;
        for (const auto& c : checks) n += c.pass;
        return n;
    }
    bool ok() const { return passed() == checks.size(); }
};

inline const std::set<int>& quick_criteria() {
    static const std::set<int> q{1, 2, 3, 4, 8, 9, 10};
    return q;
}

namespace detail {

inline std::string fmt(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3g", v);
    return b;
}

struct VerifyContext {
    GridSpec grid{16, 32};
    std::shared_ptr<const TightWindow> window;
    WilsonSystem sys;
    Signal phi;  // Gaussian STFT window
    std::uint64_t seed;
    std::vector<Check>* out;
    int criterion = 0;

    void check(const std::string& name, bool pass, const std::string& detail) {
        out->push_back({criterion, name, pass, detail});
    }
};

inline void criterion1(VerifyContext& cx) {
    const TightWindow& w = *cx.window;
    cx.check("tightness residual < 1e-9", w.tightness_residual < 1e-9, "residual " + fmt(w.tightness_residual));
    cx.check("window real within 1e-12", w.max_imag <= 1e-12, "max |Im| before discarding " + fmt(w.max_imag));
    const double hi = std::min(12.0, w.psi.grid.T - 2);
    auto fit_ok = [&](Domain d, const char* label, const char* sym) {
        try {
            auto f = fit_exponential_decay(w.psi, d, 2, hi);
            cx.check(std::string(label) + " decay " + sym + " >= 0.3 with r2 > 0.99", f.a >= 0.3 && f.r2 > 0.99,
                     std::string(sym) + " = " + fmt(f.a) + ", r2 = " + fmt(f.r2) + ", " + f.shape);
        } catch (const std::exception& e) {
            cx.check(std::string(label) + " decay " + sym + " >= 0.3 with r2 > 0.99", false, e.what());
        }
    };
    fit_ok(Domain::time, "time", "a");
    fit_ok(Domain::frequency, "frequency", "b");
}

inline std::vector<WilsonIndex> random_atoms(const WilsonSystem& sys, std::size_t count, std::uint64_t seed) {
    auto all = sys.indices();
    std::mt19937_64 rng(seed);
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(std::min(count, all.size()));
    std::sort(all.begin(), all.end());
    return all;
}

inline void criterion2(VerifyContext& cx) {
    const auto subset = random_atoms(cx.sys, 200, cx.seed);
    const double r = gram_residual(cx.sys, subset);
    cx.check("Gram residual over 200 random atoms < 1e-6", r < 1e-6, "residual " + fmt(r));
    auto raw = std::make_shared<const TightWindow>(
        untightened_window(sample(FunctionSpec::gaussian(1), cx.grid), FunctionSpec::gaussian(1)));
    const WilsonSystem bad = make_system(raw, cx.sys.l_max, cx.sys.n_max);
    const double rb = gram_residual(bad, subset);
    cx.check("untightened Gaussian Gram residual > 1e-2", rb > 1e-2, "residual " + fmt(rb));
}

inline void criterion3(VerifyContext& cx) {
    for (const auto& spec : {FunctionSpec::gaussian(1), FunctionSpec::hermite(4), FunctionSpec::sech()}) {
        const Signal f = sample(spec, cx.grid);
        const CoefficientTable c = analyze(f, cx.sys);
        const Signal g = synthesize(c, cx.sys);
        Signal diff = f;
        for (std::size_t i = 0; i < f.size(); ++i) diff[i] -= g[i];
        const double rel = norm(diff) / norm(f);
        double e = 0;
        for (const auto& [idx, v] : c.entries) e += std::norm(v);
        const double f2 = std::pow(norm(f), 2), pars = std::abs(e - f2) / f2;
        cx.check(spec.str() + " reconstruction error < 1e-4", rel < 1e-4, "relative L2 " + fmt(rel));
        cx.check(spec.str() + " Parseval defect < 1e-5", pars < 1e-5, "relative defect " + fmt(pars));
    }
}

inline void criterion4(VerifyContext& cx) {
    auto S = [&](FunctionSpec s) { return sample(s, cx.grid); };
    const Signal g = S(FunctionSpec::gaussian(1)), h0 = S(FunctionSpec::hermite(0)), h1 = S(FunctionSpec::hermite(1)),
                 h4 = S(FunctionSpec::hermite(4)), se = S(FunctionSpec::sech()), b2 = S(FunctionSpec::bspline(2)),
                 e2 = S(FunctionSpec::subexp(2, 1));
    struct Quad {
        const Signal *f1, *f2, *p1, *p2;
    };
    const std::vector<Quad> quads{{&g, &g, &g, &g}, {&h0, &h1, &g, &g}, {&se, &h4, &g, &h1},
                                  {&b2, &e2, &h0, &g}, {&h4, &se, &b2, &e2}};
    double worst = 0;
    for (const auto& q : quads) worst = std::max(worst, check_orthogonality_relation(*q.f1, *q.f2, *q.p1, *q.p2));
    cx.check("orthogonality relation residual < 1e-8 on 5 pairs", worst < 1e-8, "max residual " + fmt(worst));
    std::mt19937_64 rng(cx.seed + 4);
    std::uniform_int_distribution<int> px(-4 * cx.grid.R, 4 * cx.grid.R - 1);
    std::uniform_int_distribution<int> pxi(-8 * 2 * static_cast<int>(cx.grid.T), 8 * 2 * static_cast<int>(cx.grid.T) - 1);
    std::vector<PhasePoint> pts;
    for (int i = 0; i < 16; ++i)
        pts.push_back({static_cast<double>(px(rng)) / cx.grid.R, static_cast<double>(pxi(rng)) / (2 * cx.grid.T)});
    const double fi = check_fundamental_identity(se, g, pts);
    cx.check("fundamental identity residual < 1e-8 at 16 points", fi < 1e-8, "max residual " + fmt(fi));
}

inline void criterion5(VerifyContext& cx) {
    std::size_t bad = 0, total = 0;
    double worst_eq = 0;
    for (const auto& e : corpus()) {
        const Signal f = sample(e.spec, cx.grid);
        for (double h : {0.5, 1.0})
            for (double s : {1.5, 2.0}) {
                auto sw = lemma2_sandwich(f, cx.phi, h, s);
                ++total;
                bad += !sw.holds;
            }
        for (double s : {1.5, 2.0}) {
            auto sw = lemma2_sandwich(f, cx.phi, 0, s);
            const double ref = sw.value;
            worst_eq = std::max({worst_eq, std::abs(sw.lower - ref) / ref, std::abs(sw.upper - ref) / ref});
        }
    }
    cx.check("sandwich holds on corpus x h {0.5,1} x s {1.5,2}", bad == 0,
             std::to_string(total - bad) + "/" + std::to_string(total) + " hold");
    cx.check("sandwich collapses at h = 0 within 1e-8", worst_eq < 1e-8, "max relative gap " + fmt(worst_eq));
}

inline void criterion6(VerifyContext& cx) {
    auto fitted = [&](FunctionSpec spec) { return fit_coefficient_decay(analyze(sample(spec, cx.grid), cx.sys)); };
    const DecayFit fg = fitted(FunctionSpec::gaussian(1));
    cx.check("gaussian(1) fitted s in [0.45, 0.6]", fg.s_hat >= 0.45 && fg.s_hat <= 0.6,
             "s = " + fmt(fg.s_hat) + ", k = " + fmt(fg.k_hat) + ", r2 = " + fmt(fg.r2));
    const DecayFit fs = fitted(FunctionSpec::sech());
    cx.check("sech fitted s in [0.85, 1.2]", fs.s_hat >= 0.85 && fs.s_hat <= 1.2,
             "s = " + fmt(fs.s_hat) + ", k = " + fmt(fs.k_hat) + ", r2 = " + fmt(fs.r2));
    CoefficientTable planted;
    for (const auto& idx : cx.sys.indices()) planted.entries[idx] = std::exp(-std::sqrt(idx.rho()));
    const DecayFit fp = fit_coefficient_decay(planted);
    cx.check("planted law recovers s = 2 +- 0.1 and k = 1 +- 0.05",
             std::abs(fp.s_hat - 2) <= 0.1 && std::abs(fp.k_hat - 1) <= 0.05,
             "s = " + fmt(fp.s_hat) + ", k = " + fmt(fp.k_hat));

    ClassifyOptions opt;
    opt.s_list = {1.5, 2.0, 3.0};
    std::size_t disagree = 0, cells = 0;
    std::string where;
    for (const auto& e : corpus()) {
        const auto rep = classify_gs(sample(e.spec, cx.grid), cx.sys, cx.phi, opt);
        for (const auto& g : rep.grid) {
            ++cells;
            if (!g.agree()) {
                ++disagree;
                if (where.empty()) where = ", first at " + e.name + " h=" + fmt(g.h) + " s=" + fmt(g.s);
            }
        }
        if (e.name == "bspline(2)") {
            bool all_reject = true;
            for (const auto& g : rep.grid)
                if (std::abs(g.s - 2) < 1e-12) all_reject = all_reject && !g.sup && !g.series && !g.modulation;
            cx.check("bspline(2) rejected at s = 2 by all three routes", all_reject, rep.verdict);
        }
    }
    cx.check("three routes agree on corpus at every tested (h, s)", disagree == 0,
             std::to_string(cells - disagree) + "/" + std::to_string(cells) + " cells agree" + where);
}

inline void criterion7(VerifyContext& cx) {
    std::size_t mismatch = 0, cells = 0;
    double worst = 0;
    std::string where;
    for (const auto& e : corpus()) {
        const Signal f = sample(e.spec, cx.grid);
        const CoefficientTable c = analyze(f, cx.sys);
        const PhasePlaneArray V = stft(f, cx.phi);
        for (double h : {0.0, 0.25, 0.5, 1.0, 2.0}) {
            const bool a = sequence_norm(c, 2, 2, h, 2).finite();
            const bool b = modulation_norm(V, 2, 2, WeightSpec::product(h, 2)).finite();
            ++cells;
            if (a != b) {
                ++mismatch;
                if (where.empty()) where = ", first at " + e.name + " h=" + fmt(h);
            }
        }
        for (double h : {0.5, 1.0}) {
            const NormReport co = coorbit_norm(V, h, 2);
            const NormReport mo =
                modulation_norm(V, 2, 2, WeightSpec::tensor(WeightSpec::one(), WeightSpec::subexp(h, 2)));
            const double m2 = mo.value * mo.value;
            worst = std::max(worst, std::abs(co.value - m2) / co.value);
        }
    }
    cx.check("sequence and modulation verdicts coincide", mismatch == 0,
             std::to_string(cells - mismatch) + "/" + std::to_string(cells) + " agree" + where);
    cx.check("coorbit equals squared modulation norm within 1e-8", worst < 1e-8, "max relative gap " + fmt(worst));
}

inline void criterion8(VerifyContext& cx) {
    const Signal f = sample(FunctionSpec::gaussian(1), cx.grid);
    const CoefficientTable a = analyze(f, cx.sys);
    std::mt19937_64 rng(cx.seed + 8);
    std::uniform_real_distribution<double> U(0, 1);
    const std::vector<double> hs{0.25, 0.5, 1.0, 2.0};
    std::size_t held = 0;
    for (int t = 0; t < 50; ++t) {
        CoefficientTable c;
        const double sigma = 3 * U(rng), scale = std::exp(4 * U(rng) - 2);
        for (const auto& [idx, v] : a.entries)
            c.entries[idx] = scale * std::pow(1 + idx.rho(), sigma) * (2 * U(rng) - 1) * unit_phase(U(rng));
        const Pairing p = pair_distribution(a, c, hs, 2);
        held += p.holds;
    }
    cx.check("Cauchy-Schwarz bound holds on 50 tempered tables", held == 50, std::to_string(held) + "/50 hold");
    const Pairing self = pair_distribution(a, a, hs, 2);
    const double f2 = std::pow(norm(f), 2), gap = std::abs(self.value - f2);
    cx.check("self-pairing reproduces the squared norm within 1e-6", gap < 1e-6, "gap " + fmt(gap));
}

inline void criterion9(VerifyContext& cx) {
    std::mt19937_64 rng(cx.seed + 9);
    std::uniform_real_distribution<double> U(0.5, 1.5);
    auto random_source = [&](std::vector<double>& cache) {
        return [&cache, &rng, &U](std::size_t n) -> std::optional<double> {
            while (cache.size() <= n) cache.push_back(U(rng) / static_cast<double>(cache.size() + 1));
            return cache[n];
        };
    };
    auto run = [&](double eps, std::size_t& ok) {
        for (int t = 0; t < 200; ++t) {
            std::vector<double> cache;
            try {
                // u_n <= 1.5, so every term from m0 on is below eps/3
                const auto m0 = static_cast<std::size_t>(std::floor(1.5 / (eps / 3)));
                const auto p = partition_series(random_source(cache), 5, eps, m0);
                ok += verify_partition(cache, p);
            } catch (const std::exception&) {
            }
        }
    };
    std::size_t ok3 = 0, ok09 = 0;
    run(3, ok3);
    run(0.9, ok09);
    cx.check("200 random sequences give blocks in (1, 3)", ok3 == 200, std::to_string(ok3) + "/200");
    cx.check("epsilon 0.9 gives blocks in (0.3, 0.9)", ok09 == 200, std::to_string(ok09) + "/200");
    bool errored = false;
    try {
        partition_series([](std::size_t n) -> std::optional<double> { return std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(n, 2000))); },
                         5, 3, std::nullopt, 100000);
    } catch (const BlockError& e) {
        errored = e.kind == BlockError::Kind::exhausted;
    }
    cx.check("summable input reports exhaustion", errored, errored ? "source exhausted" : "no error raised");
}

inline void criterion10(VerifyContext& cx) {
    const auto r = check_weight_axioms(WeightSpec::subexp(1, 2), 10000, cx.seed + 10);
    cx.check("subexp(1,2) moderate with C = 1 over 1e4 pairs", r.violations == 0,
             std::to_string(r.violations) + " violations");
    bool conv = !r.beurling_domar.empty();
    std::string detail;
    for (const auto& ax : r.beurling_domar) {
        conv = conv && ax.last_term < 1e-6;
        detail += "increment past 1e4 " + fmt(ax.last_term) + " ";
    }
    cx.check("Beurling-Domar increments < 1e-6 past N = 1e4", conv, detail);
}

}  // namespace detail

inline double criterion_limit(int c) {
    static const double lim[] = {0, 5, 20, 30, 10, 20, 60, 30, 10, 5, 5};
    return lim[c];
}

inline const char* criterion_title(int c) {
    static const char* t[] = {"",
                              "tight window",
                              "Wilson orthonormality",
                              "expansion and reconstruction",
                              "STFT identities",
                              "weighted sandwich",
                              "decay classification",
                              "modulation and sequence norms",
                              "distribution pairing",
                              "block partitions",
                              "weight axioms"};
    return t[c];
}

inline VerifyReport run_verify(const VerifyOptions& opt) {
    VerifyReport rep;
    std::set<int> wanted = opt.criteria;
    if (wanted.empty()) {
        if (opt.quick) wanted = quick_criteria();
        else
            for (int c = 1; c <= 10; ++c) wanted.insert(c);
    }
    detail::VerifyContext cx;
    cx.out = &rep.checks;
    cx.seed = opt.seed;
    const auto setup0 = std::chrono::steady_clock::now();
    cx.window = std::make_shared<const TightWindow>(opt.window ? *opt.window : default_window(cx.grid));
    cx.grid = cx.window->psi.grid;
    const double setup = std::chrono::duration<double>(std::chrono::steady_clock::now() - setup0).count();
    cx.phi = sample(FunctionSpec::gaussian(1), cx.grid);
    using Fn = void (*)(detail::VerifyContext&);
    static const Fn fns[] = {nullptr,           detail::criterion1, detail::criterion2, detail::criterion3,
                             detail::criterion4, detail::criterion5, detail::criterion6, detail::criterion7,
                             detail::criterion8, detail::criterion9, detail::criterion10};
    for (int c : wanted) {
        if (c < 1 || c > 10) throw std::invalid_argument("criterion must be 1..10");
        cx.criterion = c;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            if (c != 1) cx.sys = make_system(cx.window, opt.l_max, opt.n_max);
            fns[c](cx);
        } catch (const std::exception& e) {
            cx.check("criterion ran to completion", false, e.what());
        }
        double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c == 1) dt += setup;
        rep.seconds.emplace_back(c, dt);
        cx.check("runtime < " + detail::fmt(criterion_limit(c)) + " s", dt < criterion_limit(c), detail::fmt(dt) + " s");
    }
    return rep;
}

inline json to_json(const VerifyReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"criterion", c.criterion}, {"check", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    json secs = json::object();
    for (const auto& [c, s] : r.seconds) secs[std::to_string(c)] = s;
    return {{"checks", checks}, {"passed", r.passed()}, {"total", r.checks.size()}, {"ok", r.ok()}, {"seconds", secs}};
}

}  // namespace wilsontf
