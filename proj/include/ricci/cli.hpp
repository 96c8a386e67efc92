#pragma once

// Batch driver: config ingestion, command dispatch and file emission.
//
// Config files are "key = value" lines with '#' comments.  Expressions go in
// double quotes.  Output files are <prefix>.<kind>.csv / .txt.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ricci/error.hpp"
#include "ricci/hypersurface.hpp"
#include "ricci/pipeline.hpp"
#include "ricci/potential.hpp"
#include "ricci/reconstruct.hpp"
#include "ricci/rotsym.hpp"
#include "ricci/scalar_fn.hpp"

namespace ricci::cli {

namespace fs = std::filesystem;

enum ExitStatus : int { Ok = 0, ConfigFailure = 1, ValidationFailure = 2, NumericalFailure = 3 };

/// Bad config text, missing keys, unreadable input or unwritable output.
class ConfigError : public Error {
public:
    using Error::Error;
};

enum class Command { Solve, Analyze, Verify, Hypersurface, Portrait };

inline std::optional<Command> parse_command(std::string_view s) {
    if (s == "solve") return Command::Solve;
    if (s == "analyze") return Command::Analyze;
    if (s == "verify") return Command::Verify;
    if (s == "hypersurface") return Command::Hypersurface;
    if (s == "portrait") return Command::Portrait;
    return std::nullopt;
}

inline const char* to_string(Command c) {
    switch (c) {
    case Command::Solve: return "solve";
    case Command::Analyze: return "analyze";
    case Command::Verify: return "verify";
    case Command::Hypersurface: return "hypersurface";
    case Command::Portrait: return "portrait";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Number formatting and CSV

/// Shortest round-trip would vary in width; 17 significant digits is fixed
/// and locale independent.
inline std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header)
        : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw ConfigError("cannot write " + path);
        line(header);
    }

    void row(const std::vector<double>& values) {
        std::vector<std::string> cells;
        cells.reserve(values.size());
        for (double v : values) cells.push_back(fmt(v));
        line(cells);
    }

    void row(const std::string& label, const std::vector<double>& values) {
        std::vector<std::string> cells{label};
        for (double v : values) cells.push_back(fmt(v));
        line(cells);
    }

    void close() {
        out_.close();
        if (!out_) throw ConfigError("failed writing " + path_);
    }

private:
    void line(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    std::string path_;
    std::ofstream out_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::map<std::string, std::vector<double>> columns;
    std::size_t rows = 0;

    const std::vector<double>& column(const std::string& name) const {
        auto it = columns.find(name);
        if (it == columns.end()) throw ConfigError("csv: missing column '" + name + "'");
        return it->second;
    }
};

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = s.find(sep, start);
        out.emplace_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::optional<double> parse_double(std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

/// Numeric CSV with a header row.
inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    CsvTable tab;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto cells = split(line, ',');
        if (tab.header.empty()) {
            for (auto& c : cells) tab.header.push_back(trim(c));
            for (auto& h : tab.header) tab.columns[h];
            continue;
        }
        if (cells.size() != tab.header.size())
            throw ConfigError(path + ": line " + std::to_string(lineno) + ": expected " +
                              std::to_string(tab.header.size()) + " fields");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const auto v = parse_double(trim(cells[i]));
            if (!v) throw ConfigError(path + ": line " + std::to_string(lineno) + ": bad number '" + cells[i] + "'");
            tab.columns[tab.header[i]].push_back(*v);
        }
        ++tab.rows;
    }
    if (tab.header.empty()) throw ConfigError(path + ": empty file");
    return tab;
}

// ---------------------------------------------------------------------------
// Config

struct ProblemConfig {
    std::size_t n = 3;
    std::string phi;
    std::string psi;
    double t_max = 1.0;
    double step = 1e-3;
    double delta = 0.0; ///< 0 selects 1e-4 * t_max
    double constraint_tol = 1e-9;
    double residual_tol = 1e-6;
    std::string output = "ricci";
    std::string h;        ///< hypersurface profile in u = r^2
    double r_max = 0.9;
    std::size_t samples = 101;
    std::string profile;  ///< CSV read by verify
    fs::path base_dir;    ///< directory relative paths are resolved against
    std::set<std::string> keys_set;

    rotsym::RotSymTensor tensor() const {
        return {n, ScalarFn::parse(phi), ScalarFn::parse(psi), t_max};
    }
};

namespace detail {

inline std::size_t parse_count(const std::string& key, const std::string& v, std::size_t min) {
    std::size_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || out < min)
        throw ConfigError(key + ": expected an integer >= " + std::to_string(min) + ", got '" + v + "'");
    return out;
}

inline double parse_positive(const std::string& key, const std::string& v) {
    const auto d = parse_double(v);
    if (!d || !std::isfinite(*d)) throw ConfigError(key + ": expected a number, got '" + v + "'");
    if (!(*d > 0.0)) throw ConfigError(key + ": must be positive, got '" + v + "'");
    return *d;
}

inline void check_expression(const std::string& key, const std::string& src, std::string_view var) {
    try {
        (void)expr::parse(src, var);
    } catch (const ParseError& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

} // namespace detail

inline ProblemConfig parse_config(std::string_view text, const fs::path& base_dir = {}) {
    ProblemConfig c;
    c.base_dir = base_dir;
    std::size_t lineno = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string where = "line " + std::to_string(lineno) + ": ";
        // strip a comment that is not inside quotes
        bool quoted = false;
        std::size_t cut = raw.size();
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] == '"') quoted = !quoted;
            else if (raw[i] == '#' && !quoted) {
                cut = i;
                break;
            }
        }
        const std::string line = trim(std::string_view(raw).substr(0, cut));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw ConfigError(where + "missing key");
        if (!value.empty() && value.front() == '"') {
            if (value.size() < 2 || value.back() != '"' || value.find('"', 1) != value.size() - 1)
                throw ConfigError(where + key + ": unterminated or malformed quoted value");
            value = value.substr(1, value.size() - 2);
        }
        if (value.empty()) throw ConfigError(where + key + ": empty value");
        if (!c.keys_set.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");

        if (key == "n") c.n = detail::parse_count(key, value, 2);
        else if (key == "phi") c.phi = value;
        else if (key == "psi") c.psi = value;
        else if (key == "t_max") c.t_max = detail::parse_positive(key, value);
        else if (key == "step") c.step = detail::parse_positive(key, value);
        else if (key == "delta") c.delta = detail::parse_positive(key, value);
        else if (key == "constraint_tol") c.constraint_tol = detail::parse_positive(key, value);
        else if (key == "residual_tol") c.residual_tol = detail::parse_positive(key, value);
        else if (key == "output") c.output = value;
        else if (key == "h") c.h = value;
        else if (key == "r_max") c.r_max = detail::parse_positive(key, value);
        else if (key == "samples") c.samples = detail::parse_count(key, value, 5);
        else if (key == "profile") c.profile = value;
        else throw ConfigError(where + "unknown key '" + key + "'");
    }
    if (c.n > kMaxDimension) throw ConfigError("n: at most " + std::to_string(kMaxDimension) + " supported");
    if (!c.phi.empty()) detail::check_expression("phi", c.phi, "t");
    if (!c.psi.empty()) detail::check_expression("psi", c.psi, "t");
    if (!c.h.empty()) detail::check_expression("h", c.h, "u");
    if (c.delta > 1e-2 * c.t_max) throw ConfigError("delta: must not exceed 1e-2 * t_max");
    return c;
}

inline ProblemConfig load_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

// ---------------------------------------------------------------------------
// Reports

/// "key = value" lines, the same shape the config reader accepts.
class Report {
public:
    void add(const std::string& key, double v) { lines_.emplace_back(key, fmt(v)); }
    void add(const std::string& key, const std::string& v) { lines_.emplace_back(key, "\"" + v + "\""); }
    void add(const std::string& key, const char* v) { add(key, std::string(v)); }
    void add_int(const std::string& key, long long v) { lines_.emplace_back(key, std::to_string(v)); }

    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + path);
        for (const auto& [k, v] : lines_) out << k << " = " << v << '\n';
        if (!out) throw ConfigError("failed writing " + path);
    }

private:
    std::vector<std::pair<std::string, std::string>> lines_;
};

struct RunResult {
    int status = Ok;
    std::string reason;
    std::vector<std::string> files;
};

/// One machine-readable line for the diagnostic stream.
inline std::string diagnostic_line(const RunResult& r) {
    static const char* kinds[] = {"ok", "config", "validation", "numerical"};
    const char* kind = r.status >= 0 && r.status <= 3 ? kinds[r.status] : "unknown";
    std::string reason = r.reason;
    std::replace(reason.begin(), reason.end(), '\n', ' ');
    std::replace(reason.begin(), reason.end(), '"', '\'');
    return "status=" + std::to_string(r.status) + " kind=" + kind + " reason=\"" + reason + "\"";
}

namespace detail {

inline void require(const ProblemConfig& c, std::initializer_list<const char*> keys, Command cmd) {
    for (const char* k : keys) {
        const bool present = (std::string_view(k) == "phi" && !c.phi.empty()) ||
                             (std::string_view(k) == "psi" && !c.psi.empty()) ||
                             (std::string_view(k) == "h" && !c.h.empty()) ||
                             (std::string_view(k) == "profile" && !c.profile.empty());
        if (!present) throw ConfigError(std::string(k) + ": required by " + to_string(cmd));
    }
}

inline void add_tensor_header(Report& rep, const ProblemConfig& c) {
    rep.add_int("n", static_cast<long long>(c.n));
    rep.add("phi", c.phi);
    rep.add("psi", c.psi);
    rep.add("t_max", c.t_max);
}

inline void add_saddle(Report& rep, const potential::SaddleReport& s) {
    rep.add("saddle", s.folded_saddle() ? "folded saddle" : "degenerate");
    if (!s.reason.empty()) rep.add("saddle_reason", s.reason);
    rep.add("lambda1", s.lambda1);
    rep.add("lambda2", s.lambda2);
    rep.add("w2", s.w2);
    rep.add("w2_other", s.w2_other);
    rep.add("w3", s.w3);
}

inline void add_global(Report& rep, const potential::GlobalReport& g) {
    rep.add("regularity_margin", g.regularity_margin);
    rep.add("fold_regularity_margin", g.fold_regularity_margin);
    if (g.fold_regularity_failure_t) rep.add("fold_regularity_failure_t", *g.fold_regularity_failure_t);
    rep.add("fold_distance", g.fold_distance);
    rep.add("verdict", g.verdict == potential::GlobalVerdict::GlobalContinuationExpected ? "GlobalContinuationExpected"
                                                                                         : "HypothesisFailure");
    rep.add("verdict_reason", g.reason);
}

/// Gate shared by the tensor commands; throws ValidationError.
inline rotsym::Definiteness gate(const rotsym::RotSymTensor& T) {
    auto d = rotsym::definiteness_check(T);
    if (!d.nonsingular()) throw ValidationError(d);
    return d;
}

inline potential::PotentialCurve solution_curve(const ProblemConfig& c, const rotsym::RotSymTensor& T,
                                                const rotsym::Definiteness& d) {
    if (c.n == 2) return potential::solve_n2(T.phi, T.psi, d.phi0 > 0.0 ? +1 : -1, T.t_max, c.step);
    return potential::solve_separatrix(potential::SurfaceF::from(T), c.step, T.t_max,
                                       c.delta > 0.0 ? c.delta : 1e-4 * T.t_max);
}

inline RunResult run_solve(const ProblemConfig& c, const std::string& prefix) {
    const auto T = c.tensor();
    SolveOptions opt;
    opt.step = c.step;
    opt.delta = c.delta;
    const Solution sol = solve(T, opt);
    const auto& rec = sol.reconstruction;
    const auto res = reconstruct::residual_samples(rec.profile, T);

    RunResult out;
    const std::string csv = prefix + ".solution.csv";
    CsvWriter w(csv, {"t", "w", "p", "r", "rp", "f", "fp", "res_rr", "res_thth"});
    const auto& P = rec.profile;
    for (std::size_t i = 0; i < P.size(); ++i)
        w.row({P.grid[i], rec.w[i], rec.p[i], P.r[i], P.rp[i], P.f[i], P.fp[i], res.res_rr[i], res.res_thth[i]});
    w.close();
    out.files.push_back(csv);

    Report rep;
    rep.add("command", "solve");
    add_tensor_header(rep, c);
    rep.add("step", c.step);
    rep.add("delta", sol.curve.delta);
    rep.add("definiteness", rotsym::to_string(sol.definiteness.kind));
    if (sol.saddle) add_saddle(rep, *sol.saddle);
    else rep.add("w2", sol.curve.series.w2);
    rep.add("halt", potential::to_string(sol.curve.halt));
    rep.add("halt_t", sol.curve.halt_t);
    rep.add("t_last", P.grid.back());
    rep.add("w_last", rec.w.back());
    rep.add("r_last", P.r.back());
    rep.add("f_last", P.f.back());
    rep.add("max_constraint", sol.max_constraint);
    rep.add("residual_r", rec.residual_r);
    rep.add("residual_f", rec.residual_f);
    rep.add("res_rr", rec.ricci.res_rr);
    rep.add("res_thth", rec.ricci.res_thth);
    add_global(rep, sol.global);
    const std::string txt = prefix + ".report.txt";
    rep.write(txt);
    out.files.push_back(txt);

    if (sol.max_constraint > c.constraint_tol) {
        out.status = NumericalFailure;
        out.reason = "constraint drift " + fmt(sol.max_constraint) + " exceeds constraint_tol";
    } else if (std::max(rec.ricci.res_rr, rec.ricci.res_thth) > c.residual_tol) {
        out.status = NumericalFailure;
        out.reason = "ricci residual " + fmt(std::max(rec.ricci.res_rr, rec.ricci.res_thth)) + " exceeds residual_tol";
    } else {
        out.reason = std::string("solved, ") + potential::to_string(sol.curve.halt);
    }
    return out;
}

inline RunResult run_analyze(const ProblemConfig& c, const std::string& prefix) {
    const auto T = c.tensor();
    const auto d = gate(T);
    const auto S = potential::SurfaceF::from(T);
    const auto saddle = potential::saddle_report(S);
    const auto curve = solution_curve(c, T, d);
    const auto global = potential::check_global(S, curve);

    RunResult out;
    const std::string csv = prefix + ".fold.csv";
    CsvWriter w(csv, {"branch", "t", "w"});
    const std::size_t m = 200;
    for (const char* branch : {"fold_lower", "fold_upper"}) {
        const std::size_t which = std::string_view(branch) == "fold_lower" ? 0 : 1;
        for (std::size_t i = 0; i <= m; ++i) {
            const double t = T.t_max * static_cast<double>(i) / static_cast<double>(m);
            const auto roots = potential::fold_curve(S, t);
            if (roots.size() == 2) w.row(branch, {t, roots[which]});
            else if (roots.size() == 1 && which == 0) w.row(branch, {t, roots[0]});
        }
    }
    w.close();
    out.files.push_back(csv);

    Report rep;
    rep.add("command", "analyze");
    add_tensor_header(rep, c);
    rep.add("definiteness", rotsym::to_string(d.kind));
    add_saddle(rep, saddle);
    if (c.n > 2) {
        const double nn = static_cast<double>(c.n);
        // leading t^2 coefficient of the lower fold branch, two candidates
        rep.add("fold_t2_coefficient", d.psi0 / (2.0 * (nn - 2.0)));
        rep.add("fold_t2_coefficient_alt", d.psi0 / (2.0 * (nn - 1.0)));
    }
    rep.add("halt", potential::to_string(curve.halt));
    rep.add("t_last", curve.t.back());
    add_global(rep, global);
    const std::string txt = prefix + ".analysis.txt";
    rep.write(txt);
    out.files.push_back(txt);
    out.reason = global.reason;
    return out;
}

inline fs::path resolve(const ProblemConfig& c, const std::string& p) {
    fs::path path(p);
    return path.is_absolute() || c.base_dir.empty() ? path : c.base_dir / path;
}

inline RunResult run_verify(const ProblemConfig& c, const std::string& prefix) {
    const auto T = c.tensor();
    const CsvTable tab = read_csv(resolve(c, c.profile).string());
    rotsym::MetricProfile P;
    P.n = c.n;
    P.grid = tab.column("t");
    P.r = tab.column("r");
    P.rp = tab.column("rp");
    P.f = tab.column("f");
    P.fp = tab.column("fp");
    try {
        rotsym::validate(P);
    } catch (const PreconditionError& e) {
        throw ConfigError(std::string("profile: ") + e.what());
    }
    const auto fwd = rotsym::forward_samples(P);
    const auto res = reconstruct::residual_samples(P, T);
    const double t_hi = P.grid.back();
    const auto window = reconstruct::verify_ricci(P, T, 0.05 * t_hi, t_hi);

    RunResult out;
    const std::string csv = prefix + ".verify.csv";
    CsvWriter w(csv, {"t", "alpha", "beta", "phi_hat", "psi_hat", "res_rr", "res_thth"});
    for (std::size_t i = 0; i < P.size(); ++i)
        w.row({P.grid[i], fwd.alpha[i], fwd.beta[i], fwd.phi_hat[i], fwd.psi_hat[i], res.res_rr[i], res.res_thth[i]});
    w.close();
    out.files.push_back(csv);

    Report rep;
    rep.add("command", "verify");
    add_tensor_header(rep, c);
    rep.add("profile", c.profile);
    rep.add_int("rows", static_cast<long long>(P.size()));
    rep.add("window_lo", 0.05 * t_hi);
    rep.add("window_hi", t_hi);
    rep.add("res_rr", window.res_rr);
    rep.add("res_thth", window.res_thth);
    const std::string txt = prefix + ".verify.txt";
    rep.write(txt);
    out.files.push_back(txt);

    const double worst = std::max(window.res_rr, window.res_thth);
    if (worst > c.residual_tol) {
        out.status = NumericalFailure;
        out.reason = "ricci residual " + fmt(worst) + " exceeds residual_tol";
    } else {
        out.reason = "profile verified";
    }
    return out;
}

inline RunResult run_hypersurface(const ProblemConfig& c, const std::string& prefix) {
    hypersurface::GraphEmbedding E{c.n, ScalarFn(expr::parse(c.h, "u")), c.r_max};
    RunResult out;
    const std::string csv = prefix + ".hypersurface.csv";
    CsvWriter w(csv, {"r", "f", "Ric_rr", "Ric_thth_unit", "h1", "h2", "scalar"});
    for (std::size_t i = 0; i < c.samples; ++i) {
        const double r = c.r_max * static_cast<double>(i) / static_cast<double>(c.samples - 1);
        const auto g = hypersurface::induced_metric(E, r);
        const auto ric = hypersurface::ricci_graph(E, r);
        const auto k = hypersurface::principal_curvatures(E, r);
        const auto gauss = hypersurface::gauss_curvatures(k);
        w.row({r, g.f_val, ric.ric_rr, ric.ric_thth_unit, k[0], k[1], gauss.scalar});
    }
    w.close();
    out.files.push_back(csv);
    out.reason = "hypersurface curvature written";
    return out;
}

inline RunResult run_portrait(const ProblemConfig& c, const std::string& prefix) {
    const auto T = c.tensor();
    const auto d = gate(T);
    const auto S = potential::SurfaceF::from(T);
    RunResult out;
    Report rep;
    rep.add("command", "portrait");
    add_tensor_header(rep, c);

    const std::string csv = prefix + ".portrait.csv";
    CsvWriter w(csv, {"branch", "t", "w", "p", "F"});
    auto emit = [&](const std::string& branch, const potential::PotentialCurve& curve) {
        for (std::size_t i = 0; i < curve.size(); ++i)
            w.row(branch, {curve.t[i], curve.w[i], curve.p[i],
                           potential::surface_eval(S, curve.t[i], curve.w[i], curve.p[i]).F});
        rep.add(branch + "_halt", potential::to_string(curve.halt));
        rep.add(branch + "_t_last", curve.t.back());
    };

    if (c.n == 2) {
        auto fwd = potential::solve_n2(T.phi, T.psi, d.phi0 > 0.0 ? +1 : -1, T.t_max, c.step);
        emit("solution+", fwd);
    } else {
        const auto saddle = potential::saddle_report(S);
        add_saddle(rep, saddle);
        const double delta = c.delta > 0.0 ? c.delta : 1e-4 * T.t_max;
        struct Branch {
            std::string name;
            potential::SeriesSeed seed;
            int dir;
        };
        std::vector<Branch> branches = {{"solution+", {saddle.w2, saddle.w3}, +1},
                                        {"solution-", {saddle.w2, saddle.w3}, -1}};
        std::optional<double> w3_other;
        try {
            w3_other = potential::series_cubic(c.n, saddle.w2_other, S.phi(0.0), S.psi(0.0));
        } catch (const NumericalError& e) {
            rep.add("other_reason", e.what());
        }
        if (w3_other) {
            branches.push_back({"other+", {saddle.w2_other, *w3_other}, +1});
            branches.push_back({"other-", {saddle.w2_other, *w3_other}, -1});
        }
        for (const auto& b : branches) {
            // a branch leaving the surface early is part of the picture, not a failure
            try {
                const auto seed = potential::seed_separatrix(S, saddle, delta, b.dir, b.seed);
                emit(b.name, potential::integrate_separatrix(S, seed, c.step, b.dir * T.t_max));
            } catch (const NumericalError& e) {
                rep.add(b.name + "_reason", e.what());
            }
        }
    }
    const std::size_t m = 400;
    for (const char* branch : {"fold_lower", "fold_upper"}) {
        const std::size_t which = std::string_view(branch) == "fold_lower" ? 0 : 1;
        for (std::size_t i = 0; i <= m; ++i) {
            const double t = T.t_max * (2.0 * static_cast<double>(i) / static_cast<double>(m) - 1.0);
            const auto roots = potential::fold_curve(S, t);
            double wf = 0.0;
            if (roots.size() == 2) wf = roots[which];
            else if (roots.size() == 1 && which == 0) wf = roots[0];
            else continue;
            w.row(branch, {t, wf, 0.0, potential::surface_eval(S, t, wf, 0.0).F});
        }
    }
    w.close();
    out.files.push_back(csv);
    const std::string txt = prefix + ".portrait.txt";
    rep.write(txt);
    out.files.push_back(txt);
    out.reason = "portrait written";
    return out;
}

} // namespace detail

/// Runs one command.  Every library failure is mapped to an exit status.
inline RunResult run(const ProblemConfig& c, Command cmd, const std::string& prefix) {
    RunResult out;
    try {
        switch (cmd) {
        case Command::Solve: detail::require(c, {"phi", "psi"}, cmd); return detail::run_solve(c, prefix);
        case Command::Analyze: detail::require(c, {"phi", "psi"}, cmd); return detail::run_analyze(c, prefix);
        case Command::Verify: detail::require(c, {"phi", "psi", "profile"}, cmd); return detail::run_verify(c, prefix);
        case Command::Hypersurface: detail::require(c, {"h"}, cmd); return detail::run_hypersurface(c, prefix);
        case Command::Portrait: detail::require(c, {"phi", "psi"}, cmd); return detail::run_portrait(c, prefix);
        }
    } catch (const ConfigError& e) {
        out.status = ConfigFailure;
        out.reason = e.what();
    } catch (const ParseError& e) {
        out.status = ConfigFailure;
        out.reason = e.what();
    } catch (const ValidationError& e) {
        out.status = ValidationFailure;
        out.reason = e.what();
    } catch (const Error& e) {
        out.status = NumericalFailure;
        out.reason = e.what();
    }
    return out;
}

/// The config's own output prefix, relative to the config's directory.
inline std::string resolve_output(const ProblemConfig& c) { return detail::resolve(c, c.output).string(); }

/// Loads a config file and runs; `out_prefix` overrides the config's output key.
inline RunResult run_file(const fs::path& config, Command cmd, const std::optional<std::string>& out_prefix) {
    try {
        const ProblemConfig c = load_config(config);
        return run(c, cmd, out_prefix ? *out_prefix : resolve_output(c));
    } catch (const ConfigError& e) {
        return {ConfigFailure, e.what(), {}};
    }
}

struct SweepEntry {
    fs::path config;
    std::string prefix;
    RunResult result;
};

/// Runs every *.cfg in `dir` concurrently.  Each writes to
/// <out_dir>/<stem>; out_dir defaults to `dir`.
inline std::vector<SweepEntry> run_sweep(const fs::path& dir, Command cmd, const std::optional<std::string>& out_dir) {
    if (!fs::is_directory(dir)) throw ConfigError("sweep: not a directory: " + dir.string());
    std::vector<SweepEntry> entries;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".cfg") entries.push_back({e.path(), {}, {}});
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.config < b.config; });
    const fs::path base = out_dir ? fs::path(*out_dir) : dir;
    if (out_dir) {
        std::error_code ec;
        fs::create_directories(base, ec);
        if (ec) throw ConfigError("sweep: cannot create " + base.string());
    }
    std::vector<std::future<RunResult>> jobs;
    for (auto& e : entries) {
        e.prefix = (base / e.config.stem()).string();
        jobs.push_back(std::async(std::launch::async, [&e, cmd] { return run_file(e.config, cmd, e.prefix); }));
    }
    for (std::size_t i = 0; i < entries.size(); ++i) entries[i].result = jobs[i].get();
    return entries;
}

} // namespace ricci::cli
