// wilsontf: command-line front end for the Wilson basis / time-frequency toolkit.
//
// Exit codes: 0 ok, 1 verification failure or runtime error, 2 usage,
// 3 unreadable or malformed input, 4 divergent result under --require-finite.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include <wilsontf/wilsontf.hpp>

using namespace wilsontf;

namespace {

struct Usage : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Divergent : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Global {
    int threads = 0;
    bool csv = false;
    bool require_finite = false;
    std::string out;
};

void emit(const Global& g, const std::string& text) {
    if (g.out.empty() || g.out == "-") {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream f(g.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + g.out);
    f << text;
    if (!text.empty() && text.back() != '\n') f << '\n';
}

void emit(const Global& g, const json& j) { emit(g, j.dump(2)); }

GridSpec grid_from(double T, int R) {
    GridSpec g{T, R};
    std::string why;
    if (!g.valid(&why)) throw Usage(why);
    return g;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Usage("not a number list: " + text);
        }
    }
    if (out.empty()) throw Usage("empty list: " + text);
    return out;
}

FunctionSpec family(const std::string& text) {
    try {
        return parse_function_spec(text);
    } catch (const std::invalid_argument& e) {
        throw Usage(e.what());
    }
}

WeightSpec weight(const std::string& text) {
    try {
        return parse_weight(text);
    } catch (const std::invalid_argument& e) {
        throw Usage(e.what());
    }
}

std::shared_ptr<const TightWindow> window_for(const std::string& path, const GridSpec& grid) {
    if (path.empty()) return std::make_shared<const TightWindow>(default_window(grid));
    auto w = std::make_shared<const TightWindow>(load_window(path));
    if (!(w->psi.grid == grid)) throw Usage("window grid does not match the signal grid");
    return w;
}

WilsonSystem system_for(std::shared_ptr<const TightWindow> w, int lmax, int nmax, int d) {
    try {
        return make_system(std::move(w), lmax, nmax, d);
    } catch (const std::invalid_argument& e) {
        throw Usage(e.what());
    }
}

Signal stft_window(const std::string& path, const std::string& fam, const GridSpec& grid) {
    if (!path.empty()) {
        Signal phi = load_signal(path);
        if (!(phi.grid == grid)) throw Usage("STFT window grid does not match the signal grid");
        return phi;
    }
    return sample(family(fam), grid);
}

void finite_or_throw(const Global& g, bool finite, const std::string& what) {
    if (g.require_finite && !finite) throw Divergent(what + " is divergent");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wilson bases, STFT norms and Gelfand-Shilov classification on sampled grids"};
    app.set_help_flag("--help", "print this help and exit");
    app.require_subcommand(1);
    app.fallthrough();
    Global G;
    app.add_option("--threads", G.threads, "worker threads (default: WILSONTF_THREADS or hardware)");
    app.add_flag("--csv", G.csv, "tabular output where the result is a flat table");
    app.add_option("-o,--output", G.out, "output file (default stdout)");
    app.add_flag("--require-finite", G.require_finite, "exit 4 when the result is divergent");

    // sample
    auto* c_sample = app.add_subcommand("sample", "sample a test function on a grid");
    std::string s_family = "gaussian(1)";
    double s_T = 16;
    int s_R = 32, s_d = 1;
    c_sample->add_option("-F,--family", s_family, "gaussian(a), hermite(k), sech, bspline(m), subexp(h,s)");
    c_sample->add_option("--T", s_T, "grid half-width");
    c_sample->add_option("--R", s_R, "samples per unit");
    c_sample->add_option("-d,--dim", s_d, "dimension (1 or 2)");

    // window
    auto* c_window = app.add_subcommand("window", "build the tight Wilson window from a seed");
    std::string w_seed = "gaussian";
    double w_T = 16;
    int w_R = 32;
    c_window->add_option("--seed-family", w_seed, "seed function");
    c_window->add_option("--T", w_T, "grid half-width (integer)");
    c_window->add_option("--R", w_R, "samples per unit (even)");

    // analyze
    auto* c_analyze = app.add_subcommand("analyze", "Wilson coefficients of a signal");
    std::string a_f, a_w;
    int a_lmax = 15, a_nmax = 24;
    c_analyze->add_option("-f,--signal", a_f, "signal JSON")->required();
    c_analyze->add_option("-w,--window", a_w, "window JSON (default: tight window from gaussian(1))");
    c_analyze->add_option("--lmax", a_lmax, "largest modulation index (below R/2)");
    c_analyze->add_option("--nmax", a_nmax, "largest shift index (below 2T)");

    // synth
    auto* c_synth = app.add_subcommand("synth", "synthesize a signal from a coefficient table");
    std::string y_c, y_f;
    c_synth->add_option("-c,--table", y_c, "coefficient table JSON")->required();
    c_synth->add_option("-f,--signal", y_f, "reference signal (default: the table's source)");

    // stft
    auto* c_stft = app.add_subcommand("stft", "short-time Fourier transform on the phase-space grid");
    std::string t_f, t_g, t_fam = "gaussian(1)";
    c_stft->add_option("-f,--signal", t_f, "signal JSON")->required();
    c_stft->add_option("-g,--stft-window", t_g, "window signal JSON");
    c_stft->add_option("--window-family", t_fam, "window family when no file is given");

    // norm
    auto* c_norm = app.add_subcommand("norm", "weighted norms");
    std::string n_kind = "modulation", n_f, n_c, n_g, n_fam = "gaussian(1)", n_weight;
    double n_h = 1, n_s = 2, n_p = 2, n_q = 2;
    c_norm->add_option("--kind", n_kind, "weighted_l2, coorbit, fourier_coorbit, time_marginal, modulation, sequence, sandwich")
        ->check(CLI::IsMember({"weighted_l2", "coorbit", "fourier_coorbit", "time_marginal", "modulation", "sequence", "sandwich"}));
    c_norm->add_option("-f,--signal", n_f, "signal JSON");
    c_norm->add_option("-c,--table", n_c, "coefficient table JSON (sequence norm)");
    c_norm->add_option("-g,--stft-window", n_g, "STFT window signal JSON");
    c_norm->add_option("--window-family", n_fam, "STFT window family when no file is given");
    c_norm->add_option("--weight", n_weight, "weight, e.g. subexp(1,2), product(1,2), reciprocal(product(1,2))");
    c_norm->add_option("--h", n_h, "weight strength");
    c_norm->add_option("--s", n_s, "weight exponent s");
    c_norm->add_option("--p", n_p, "inner exponent (inf allowed)");
    c_norm->add_option("--q", n_q, "outer exponent (inf allowed)");

    // classify
    auto* c_class = app.add_subcommand("classify", "Gelfand-Shilov classification over a tested (h, s) grid");
    std::string k_f, k_w, k_g, k_fam = "gaussian(1)", k_s = "2", k_h = "0.25,0.5,1,2";
    int k_lmax = 15, k_nmax = 24;
    bool k_nofit = false;
    c_class->add_option("-f,--signal", k_f, "signal JSON")->required();
    c_class->add_option("-w,--window", k_w, "Wilson window JSON");
    c_class->add_option("-g,--stft-window", k_g, "STFT window signal JSON for the modulation route");
    c_class->add_option("--window-family", k_fam, "STFT window family when no file is given");
    c_class->add_option("--s", k_s, "comma-separated s probes");
    c_class->add_option("--h-grid", k_h, "comma-separated h grid");
    c_class->add_option("--lmax", k_lmax, "largest modulation index");
    c_class->add_option("--nmax", k_nmax, "largest shift index");
    c_class->add_flag("--no-fitted-probe", k_nofit, "do not add the fitted s to the probes");

    // blocks
    auto* c_blocks = app.add_subcommand("blocks", "partition a divergent series into blocks");
    std::string b_family = "harmonic";
    std::size_t b_count = 5;
    double b_eps = 3;
    std::uint64_t b_seed = 1;
    c_blocks->add_option("--family", b_family, "harmonic: 1/(n+2); random: u/(n+1); geometric: 2^-n")
        ->check(CLI::IsMember({"harmonic", "random", "geometric"}));
    c_blocks->add_option("--count", b_count, "blocks wanted");
    c_blocks->add_option("--epsilon", b_eps, "block sums land in (epsilon/3, epsilon)");
    c_blocks->add_option("--seed", b_seed, "seed for the random family");

    // verify
    auto* c_verify = app.add_subcommand("verify", "run the invariant suite");
    bool v_quick = false;
    std::string v_w;
    std::vector<int> v_crit;
    std::uint64_t v_seed = VerifyOptions{}.seed;
    c_verify->add_flag("--quick", v_quick, "fast subset");
    c_verify->add_option("-w,--window", v_w, "window JSON to verify instead of the default");
    c_verify->add_option("--criterion", v_crit, "run only these criteria (1..10)");
    c_verify->add_option("--seed", v_seed, "seed for randomized checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (G.threads < 0) throw Usage("--threads must be non-negative");
        if (G.threads > 0) set_threads(G.threads);

        if (*c_sample) {
            if (s_d < 1 || s_d > 2) throw Usage("d must be 1 or 2");
            const Signal f = sample(family(s_family), grid_from(s_T, s_R), s_d);
            if (G.csv) {
                if (f.dim != 1) throw Usage("CSV output is one-dimensional");
                emit(G, signal_csv(f));
            } else {
                emit(G, to_json(f));
            }
        } else if (*c_window) {
            if (std::abs(w_T - std::round(w_T)) > 1e-12) throw Usage("T must be integer");
            const GridSpec g = grid_from(w_T, w_R);
            if (g.R % 2) throw Usage("R must be even");
            const FunctionSpec seed = family(w_seed);
            const TightWindow w = tight_window(sample(seed, g), seed);
            json j = to_json(w);
            if (G.csv) emit(G, signal_csv(w.psi));
            else emit(G, j);
        } else if (*c_analyze) {
            const Signal f = load_signal(a_f);
            auto w = window_for(a_w, f.grid);
            const WilsonSystem sys = system_for(w, a_lmax, a_nmax, f.dim);
            CoefficientTable c = analyze(f, sys);
            c.source_path = a_f;
            if (G.csv) {
                if (c.d != 1) throw Usage("CSV output is one-dimensional");
                emit(G, table_csv(c));
            } else {
                emit(G, to_json(c));
            }
        } else if (*c_synth) {
            const CoefficientTable c = load_table(y_c);
            const WilsonSystem sys = [&] {
                try {
                    return c.system();
                } catch (const std::invalid_argument& e) {
                    throw ParseError(std::string("table system: ") + e.what());
                }
            }();
            const Signal g = synthesize(c, sys);
            const std::string ref = y_f.empty() ? c.source_path : y_f;
            if (!ref.empty()) {
                const Signal f = load_signal(ref);
                require_compatible(f, g);
                Signal d = f;
                for (std::size_t i = 0; i < d.size(); ++i) d[i] -= g[i];
                const double nf = norm(f);
                std::fprintf(stderr, "relative L2 error %.6e\n", nf > 0 ? norm(d) / nf : norm(d));
            }
            if (G.csv) {
                if (g.dim != 1) throw Usage("CSV output is one-dimensional");
                emit(G, signal_csv(g));
            } else {
                emit(G, to_json(g));
            }
        } else if (*c_stft) {
            const Signal f = load_signal(t_f);
            const PhasePlaneArray V = stft(f, stft_window(t_g, t_fam, f.grid));
            if (G.csv) emit(G, plane_csv(V));
            else emit(G, to_json(V));
        } else if (*c_norm) {
            NormReport rep;
            auto need_signal = [&] {
                if (n_f.empty()) throw Usage("--signal is required for this norm");
                return load_signal(n_f);
            };
            if (n_kind == "sequence") {
                if (n_c.empty()) throw Usage("--table is required for the sequence norm");
                rep = sequence_norm(load_table(n_c), n_p, n_q, n_h, n_s);
            } else if (n_kind == "weighted_l2") {
                rep = weighted_l2_norm(need_signal(), weight(n_weight.empty() ? "subexp(" + std::to_string(n_h) + "," +
                                                                                    std::to_string(n_s) + ")"
                                                                              : n_weight));
            } else {
                const Signal f = need_signal();
                const Signal phi = stft_window(n_g, n_fam, f.grid);
                if (n_kind == "coorbit") rep = coorbit_norm(f, phi, n_h, n_s);
                else if (n_kind == "time_marginal") rep = time_marginal_norm(stft(f, phi), n_h, n_s);
                else if (n_kind == "fourier_coorbit") rep = fourier_coorbit_norm(f, phi, n_h, n_s).report;
                else if (n_kind == "modulation")
                    rep = modulation_norm(f, phi, n_p, n_q,
                                          n_weight.empty() ? WeightSpec::product(n_h, n_s) : weight(n_weight));
                else {
                    const Sandwich sw = lemma2_sandwich(f, phi, n_h, n_s);
                    json j = {{"kind", "sandwich"}, {"lower", sw.lower}, {"value", sw.value}, {"upper", sw.upper},
                              {"holds", sw.holds}, {"verdict", sw.verdict.str()}, {"reason", sw.verdict.reason},
                              {"params", {{"h", n_h}, {"s", n_s}}}};
                    emit(G, j);
                    finite_or_throw(G, sw.verdict.finite, "sandwich");
                    return 0;
                }
            }
            if (G.csv)
                emit(G, "kind,value,squared,tail,verdict\n" + rep.kind + "," + fmt_double(rep.value) + "," +
                            (rep.squared ? "true" : "false") + "," + fmt_double(rep.tail) + "," + rep.verdict.str() + "\n");
            else
                emit(G, to_json(rep));
            finite_or_throw(G, rep.finite(), rep.kind + " norm");
        } else if (*c_class) {
            const Signal f = load_signal(k_f);
            if (f.dim != 1) throw Usage("classification is one-dimensional");
            auto w = window_for(k_w, f.grid);
            const WilsonSystem sys = system_for(w, k_lmax, k_nmax, 1);
            ClassifyOptions opt;
            opt.s_list = parse_list(k_s);
            opt.h_grid = parse_list(k_h);
            opt.probe_fitted = !k_nofit;
            for (double h : opt.h_grid)
                if (h < 0) throw Usage("h must be non-negative");
            for (double s : opt.s_list)
                if (!(s > 0)) throw Usage("s must be positive");
            const MembershipReport rep = classify_gs(f, sys, stft_window(k_g, k_fam, f.grid), opt);
            bool any = false;
            for (const auto& g : rep.grid) any = any || g.sup || g.series || g.modulation;
            if (G.csv) {
                std::string t = "s,h,sup,series,modulation,dual_series,agree\n";
                for (const auto& g : rep.grid)
                    t += fmt_double(g.s) + "," + fmt_double(g.h) + "," + (g.sup ? "finite" : "divergent") + "," +
                         (g.series ? "finite" : "divergent") + "," + (g.modulation ? "finite" : "divergent") + "," +
                         (g.dual_series ? "finite" : "divergent") + "," + (g.agree() ? "true" : "false") + "\n";
                emit(G, t);
            } else {
                emit(G, to_json(rep));
            }
            std::fprintf(stderr, "%s\n", rep.verdict.c_str());
            finite_or_throw(G, any, "every tested cell");
        } else if (*c_blocks) {
            std::mt19937_64 rng(b_seed);
            std::uniform_real_distribution<double> U(0.5, 1.5);
            std::vector<double> seen;
            SeriesSource src = [&](std::size_t n) -> std::optional<double> {
                const double k = static_cast<double>(n);
                if (b_family == "harmonic") return 1 / (k + 2);
                if (b_family == "geometric") {
                    // the source ends once 2^-n underflows
                    const double v = std::ldexp(1.0, -static_cast<int>(std::min(k, 2000.0)));
                    return v > 0 ? std::optional<double>(v) : std::nullopt;
                }
                while (seen.size() <= n) seen.push_back(U(rng) / (static_cast<double>(seen.size()) + 1));
                return seen[n];
            };
            if (!(b_eps > 0)) throw Usage("epsilon must be positive");
            const BlockPartition p = partition_series(src, b_count, b_eps);
            if (G.csv) {
                std::string t = "block,start,end,sum\n";
                for (std::size_t i = 0; i < p.block_sums.size(); ++i)
                    t += std::to_string(i + 1) + "," + std::to_string(p.cuts[i]) + "," + std::to_string(p.cuts[i + 1]) +
                         "," + fmt_double(p.block_sums[i]) + "\n";
                emit(G, t);
            } else {
                emit(G, to_json(p));
            }
        } else if (*c_verify) {
            VerifyOptions opt;
            opt.quick = v_quick;
            opt.seed = v_seed;
            opt.criteria.insert(v_crit.begin(), v_crit.end());
            for (int c : opt.criteria)
                if (c < 1 || c > 10) throw Usage("criterion must be 1..10");
            if (!v_w.empty()) opt.window = load_window(v_w);
            const VerifyReport rep = run_verify(opt);
            for (const auto& c : rep.checks)
                std::fprintf(stderr, "%s  [%d] %s: %s\n", c.pass ? "PASS" : "FAIL", c.criterion, c.name.c_str(),
                             c.detail.c_str());
            std::fprintf(stderr, "%zu/%zu checks passed\n", rep.passed(), rep.checks.size());
            emit(G, to_json(rep));
            return rep.ok() ? 0 : 1;
        }
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const Divergent& e) {
        std::fprintf(stderr, "divergent: %s\n", e.what());
        return 4;
    } catch (const BlockError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
