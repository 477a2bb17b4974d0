#pragma once

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "blocks.hpp"
#include "classify.hpp"
#include "grid.hpp"
#include "stft.hpp"
#include "weights.hpp"
#include "wilson.hpp"
#include "zak.hpp"

namespace wilsontf {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Signal / window

inline json grid_json(const GridSpec& g) { return {{"T", g.T}, {"R", g.R}}; }

inline json to_json(const Signal& s) {
    json vals = json::array();
    for (const auto& v : s.values) vals.push_back({v.real(), v.imag()});
    return {{"grid", grid_json(s.grid)}, {"dim", s.dim}, {"values", std::move(vals)}};
}

inline json to_json(const TightWindow& w) {
    json j = to_json(w.psi);
    j["tightness_residual"] = w.tightness_residual;
    j["decay"] = {{"a", w.a}, {"b", w.b}, {"C", w.C}};
    j["fit_r2"] = {{"time", w.r2_time}, {"frequency", w.r2_freq}};
    j["max_imag"] = w.max_imag;
    if (!w.source.family.empty()) j["source"] = w.source.str();
    return j;
}

template <class Fn>
auto parse_guard(const std::string& what, Fn&& fn) {
    try {
        return fn();
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(what + ": " + e.what());
    }
}

inline Signal signal_from_json(const json& j) {
    return parse_guard("invalid signal", [&] {
        GridSpec g{j.at("grid").at("T").get<double>(), j.at("grid").at("R").get<int>()};
        Signal s;
        s.grid = g;
        s.dim = j.at("dim").get<int>();
        const auto& vals = j.at("values");
        if (!vals.is_array()) throw ParseError("values must be an array");
        s.values.reserve(vals.size());
        for (const auto& v : vals) {
            if (!v.is_array() || v.size() != 2) throw ParseError("each value must be [re, im]");
            s.values.emplace_back(v[0].get<double>(), v[1].get<double>());
        }
        s.check();
        return s;
    });
}

inline TightWindow window_from_json(const json& j) {
    return parse_guard("invalid window", [&] {
        TightWindow w;
        w.psi = signal_from_json(j);
        if (w.psi.dim != 1) throw ParseError("window must be one-dimensional");
        if (j.contains("tightness_residual")) {
            w.tightness_residual = j.at("tightness_residual").get<double>();
            const auto& d = j.at("decay");
            w.a = d.at("a").get<double>();
            w.b = d.at("b").get<double>();
            w.C = d.at("C").get<double>();
            if (j.contains("fit_r2")) {
                w.r2_time = j["fit_r2"].value("time", 0.0);
                w.r2_freq = j["fit_r2"].value("frequency", 0.0);
            }
            w.max_imag = j.value("max_imag", 0.0);
            for (auto& v : w.psi.values) {
                w.max_imag = std::max(w.max_imag, std::abs(v.imag()));
                v = v.real();
            }
        } else {
            // plain signal used as a window: measure instead of trusting metadata
            w = untightened_window(w.psi);
        }
        if (j.contains("source")) w.source = parse_function_spec(j.at("source").get<std::string>());
        return w;
    });
}

inline std::string signal_csv(const Signal& s) {
    if (s.dim != 1) throw std::invalid_argument("CSV export is one-dimensional");
    std::string out = "x,re,im\n";
    for (std::size_t j = 0; j < s.size(); ++j)
        out += fmt_double(s.grid.x(j)) + "," + fmt_double(s[j].real()) + "," + fmt_double(s[j].imag()) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Coefficient tables

inline json to_json(const CoefficientTable& c) {
    json sys = {{"d", c.d}, {"l_max", c.l_max}, {"n_max", c.n_max}};
    if (c.window) {
        sys["T"] = c.window->psi.grid.T;
        sys["R"] = c.window->psi.grid.R;
        sys["window"] = to_json(*c.window);
    }
    json entries = json::array();
    for (const auto& [idx, v] : c.entries) {
        json l = json::array(), n = json::array();
        for (int i = 0; i < idx.d; ++i) {
            l.push_back(idx.l[i]);
            n.push_back(idx.n[i]);
        }
        entries.push_back({{"l", l}, {"n", n}, {"re", v.real()}, {"im", v.imag()}});
    }
    json j = {{"system", sys}, {"entries", std::move(entries)}};
    if (!c.source_path.empty()) j["source"] = {{"path", c.source_path}};
    return j;
}

inline CoefficientTable table_from_json(const json& j) {
    return parse_guard("invalid coefficient table", [&] {
        CoefficientTable c;
        const auto& sys = j.at("system");
        c.d = sys.at("d").get<int>();
        if (c.d < 1 || c.d > 2) throw ParseError("d must be 1 or 2");
        c.l_max = sys.value("l_max", -1);
        c.n_max = sys.value("n_max", -1);
        if (sys.contains("window") && !sys["window"].is_null())
            c.window = std::make_shared<const TightWindow>(window_from_json(sys["window"]));
        if (j.contains("source")) c.source_path = j["source"].value("path", "");
        for (const auto& e : j.at("entries")) {
            const auto& l = e.at("l");
            const auto& n = e.at("n");
            if (static_cast<int>(l.size()) != c.d || static_cast<int>(n.size()) != c.d)
                throw ParseError("index length does not match d");
            WilsonIndex idx = c.d == 1 ? WilsonIndex(l[0].get<int>(), n[0].get<int>())
                                       : WilsonIndex({l[0].get<int>(), l[1].get<int>()}, {n[0].get<int>(), n[1].get<int>()});
            cd v(e.at("re").get<double>(), e.at("im").get<double>());
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw ParseError("non-finite coefficient");
            if (!c.entries.emplace(idx, v).second) throw ParseError("duplicate index");
        }
        return c;
    });
}

inline std::string table_csv(const CoefficientTable& c) {
    if (c.d != 1) throw std::invalid_argument("CSV export is one-dimensional");
    std::string out = "l,n,re,im\n";
    for (const auto& [idx, v] : c.entries)
        out += std::to_string(idx.l[0]) + "," + std::to_string(idx.n[0]) + "," + fmt_double(v.real()) + "," +
               fmt_double(v.imag()) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Phase plane

inline std::string plane_csv(const PhasePlaneArray& V) {
    std::string out = "x,xi,re,im,abs\n";
    const std::size_t N = V.N();
    for (std::size_t j = 0; j < N; ++j)
        for (std::size_t k = 0; k < N; ++k) {
            const cd v = V.at(j, k);
            out += fmt_double(V.x(j)) + "," + fmt_double(V.xi(k)) + "," + fmt_double(v.real()) + "," +
                   fmt_double(v.imag()) + "," + fmt_double(std::abs(v)) + "\n";
        }
    return out;
}

inline json to_json(const PhasePlaneArray& V) {
    json vals = json::array();
    for (const auto& v : V.values) vals.push_back({v.real(), v.imag()});
    return {{"grid", grid_json(V.grid)}, {"layout", "row = x, column = xi"}, {"values", std::move(vals)}};
}

// ---------------------------------------------------------------------------
// Reports

inline json to_json(const TruncationEvidence& e) {
    return {{"radii", e.radii}, {"partial", e.partial}, {"increment", e.increment}};
}

inline json to_json(const NormReport& r) {
    json j = {{"kind", r.kind},     {"value", r.value},           {"squared", r.squared},
              {"tail", r.tail},     {"verdict", r.verdict.str()}, {"reason", r.verdict.reason},
              {"params", r.params}, {"evidence", to_json(r.evidence)}};
    if (!r.warning.empty()) j["warning"] = r.warning;
    return j;
}

inline json to_json(const DecayFit& f) {
    json cands = json::array();
    for (const auto& c : f.candidates) cands.push_back({{"s", c.s}, {"k", c.k}, {"C", c.C}, {"r2", c.r2}, {"shells", c.shells}});
    return {{"s_hat", f.s_hat}, {"k_hat", f.k_hat}, {"C_hat", f.C_hat}, {"r2", f.r2},
            {"law", f.law},     {"shells_used", f.shells_used}, {"candidates", cands}};
}

inline json to_json(const BlockPartition& p) {
    return {{"epsilon", p.epsilon}, {"cuts", p.cuts}, {"block_sums", p.block_sums}};
}

inline json to_json(const TailLaw& l) {
    json j = {{"identified", l.identified}, {"points", l.points}, {"r2", l.r2}, {"law", l.str()}};
    if (l.power) j["power"] = l.k;
    else j["subexp"] = {{"k", l.k}, {"s", l.s}};
    return j;
}

inline json to_json(const SeriesReport& s) {
    json j = {{"h", s.h},
            {"s", s.s},
            {"sign", s.sign > 0 ? "+" : "-"},
            {"radii", s.radii},
            {"partial_sums", s.partial_sums},
            {"increments", s.increments},
            {"complete_radius", s.complete_radius},
            {"outer_ratio", s.outer_ratio},
            {"verdict", s.verdict.str()},
            {"reason", s.verdict.reason}};
    if (s.law) j["law"] = to_json(*s.law);
    return j;
}

inline json to_json(const SupSide& s) {
    json j = {{"sup", s.sup}, {"at", s.at}, {"boundary", s.boundary}, {"verdict", s.verdict.str()}, {"reason", s.verdict.reason}};
    if (s.law) j["law"] = to_json(*s.law);
    return j;
}

inline json to_json(const MembershipReport& r) {
    json grid = json::array();
    for (const auto& g : r.grid)
        grid.push_back({{"h", g.h},
                        {"s", g.s},
                        {"sup", g.sup ? "finite" : "divergent"},
                        {"series", g.series ? "finite" : "divergent"},
                        {"modulation", g.modulation ? "finite" : "divergent"},
                        {"dual_series", g.dual_series ? "finite" : "divergent"},
                        {"agree", g.agree()}});
    json classes = json::array();
    for (const auto& c : r.classes) {
        json routes = json::object();
        for (const auto& [name, ok] : c.roumieu) routes[name] = {{"roumieu", ok}, {"beurling", c.beurling.at(name)}};
        classes.push_back({{"s", c.s},
                           {"S_s", c.S},
                           {"Sigma_s", c.Sigma},
                           {"S_s_dual", c.S_dual},
                           {"Sigma_s_dual", c.Sigma_dual},
                           {"routes", routes},
                           {"quantifiers", {{"S_s", "some h"}, {"Sigma_s", "all h"}, {"S_s_dual", "all h"}, {"Sigma_s_dual", "some h"}}},
                           {"consistent", c.consistent},
                           {"verdict", c.verdict}});
    }
    json evidence = {{"series", json::array()}, {"dual_series", json::array()}, {"modulation", json::array()}, {"sup", json::array()}};
    for (const auto& s : r.series_evidence) evidence["series"].push_back(to_json(s));
    for (const auto& s : r.dual_evidence) evidence["dual_series"].push_back(to_json(s));
    for (const auto& m : r.modulation_evidence) evidence["modulation"].push_back(to_json(m));
    for (std::size_t i = 0; i < r.sup_evidence.size(); ++i)
        for (const auto& e : r.sup_evidence[i])
            evidence["sup"].push_back({{"s", r.s_probes[i]}, {"h", e.h}, {"time", to_json(e.time)}, {"frequency", to_json(e.freq)}});
    json j = {{"h_grid", r.h_grid}, {"s_probes", r.s_probes}, {"verdict_grid", grid}, {"classes", classes},
              {"evidence", evidence}, {"consistent", r.consistent}, {"verdict", r.verdict}, {"notes", r.notes}};
    if (r.plane_law) j["plane_law"] = to_json(*r.plane_law);
    if (r.fit) j["fit"] = to_json(*r.fit);
    else j["fit_error"] = r.fit_error;
    return j;
}

// ---------------------------------------------------------------------------
// Files

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const std::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

inline Signal load_signal(const std::string& path) { return signal_from_json(read_json_file(path)); }
inline TightWindow load_window(const std::string& path) { return window_from_json(read_json_file(path)); }
inline CoefficientTable load_table(const std::string& path) { return table_from_json(read_json_file(path)); }

}  // namespace wilsontf
