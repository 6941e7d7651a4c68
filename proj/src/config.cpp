#include "sfdlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "sfdlab/errors.hpp"

namespace sfdlab {

double ExperimentConfig::spacing(int level) const {
    return (period / points) / static_cast<double>(1 << level);
}

int ExperimentConfig::points_at(int level) const { return points << level; }

double ExperimentConfig::desired_dt(int level) const {
    double h = spacing(level);
    switch (dt_policy) {
    case DtPolicy::fixed: return std::min(dt, dt_max);
    case DtPolicy::h2: return std::min(dt_scale * h * h, dt_max);
    case DtPolicy::h4: return std::min(dt_scale * h * h * h * h, dt_max);
    }
    return dt_max;
}

namespace {

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

/// Raw parse of the sectioned text plus the preset fallback table. Typed
/// getters mark keys as consumed so leftovers can be rejected by name and
/// line at the end.
class Reader {
public:
    explicit Reader(const std::string& text) {
        static const char* known_sections[] = {"problem",     "scheme",        "grid",
                                               "time",        "monte_carlo",   "extrapolation",
                                               "output"};
        std::istringstream is(text);
        std::string line;
        std::string section;
        int lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            std::string s = strip_comment(line);
            if (s.empty()) continue;
            if (s.front() == '[') {
                if (s.back() != ']')
                    fail(lineno, "unterminated section header '" + s + "'");
                section = trim(s.substr(1, s.size() - 2));
                bool known = std::any_of(std::begin(known_sections), std::end(known_sections),
                                         [&](const char* k) { return section == k; });
                if (!known) fail(lineno, "unknown section [" + section + "]");
                continue;
            }
            auto eq = s.find('=');
            if (eq == std::string::npos)
                fail(lineno, "expected 'key = value', got '" + s + "'");
            if (section.empty()) fail(lineno, "key outside any [section]");
            std::string key = trim(s.substr(0, eq));
            std::string value = trim(s.substr(eq + 1));
            if (key.empty()) fail(lineno, "empty key");
            if (value.empty()) fail(lineno, "key '" + key + "' has no value");
            auto [it, inserted] = entries_[section].emplace(key, Entry{value, lineno});
            if (!inserted)
                fail(lineno, "duplicate key '" + key + "' in [" + section + "] (first at line " +
                                 std::to_string(it->second.line) + ")");
        }
    }

    void add_preset(const std::string& section, const std::string& key,
                    const std::string& value) {
        preset_[section].emplace(key, value);
    }

    /// The raw value of section.key, consuming the entry; falls back to
    /// the preset table, then to nullptr.
    const std::string* get(const std::string& section, const std::string& key) {
        auto sit = entries_.find(section);
        if (sit != entries_.end()) {
            auto kit = sit->second.find(key);
            if (kit != sit->second.end()) {
                kit->second.used = true;
                return &kit->second.value;
            }
        }
        auto pit = preset_.find(section);
        if (pit != preset_.end()) {
            auto kit = pit->second.find(key);
            if (kit != pit->second.end()) return &kit->second;
        }
        return nullptr;
    }

    bool given_explicitly(const std::string& section, const std::string& key) const {
        auto sit = entries_.find(section);
        return sit != entries_.end() && sit->second.count(key) > 0;
    }

    int line_of(const std::string& section, const std::string& key) const {
        return entries_.at(section).at(key).line;
    }

    /// All still-unconsumed keys, as "line N: unknown key 'k' in [s]".
    std::vector<std::string> leftovers() const {
        std::vector<std::pair<int, std::string>> rows;
        for (const auto& [section, keys] : entries_)
            for (const auto& [key, e] : keys)
                if (!e.used)
                    rows.emplace_back(e.line, "line " + std::to_string(e.line) +
                                                  ": unknown key '" + key + "' in [" + section +
                                                  "]");
        std::sort(rows.begin(), rows.end());
        std::vector<std::string> out;
        for (auto& [line, msg] : rows) out.push_back(std::move(msg));
        return out;
    }

private:
    static std::string trim(const std::string& s) {
        auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return "";
        auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    static std::string strip_comment(const std::string& s) {
        auto pos = s.find_first_of("#;");
        return trim(pos == std::string::npos ? s : s.substr(0, pos));
    }

    [[noreturn]] static void fail(int line, const std::string& msg) {
        throw ValidationError("config line " + std::to_string(line) + ": " + msg);
    }

    std::map<std::string, std::map<std::string, Entry>> entries_;
    std::map<std::string, std::map<std::string, std::string>> preset_;
};

[[noreturn]] void bad_value(const std::string& section, const std::string& key,
                            const std::string& why) {
    throw ValidationError("config: " + section + "." + key + " " + why);
}

/// Scalar constants may be arithmetic expressions ("2*pi/3") or the bare
/// shorthand "2pi".
double parse_scalar(const std::string& section, const std::string& key,
                    const std::string& text) {
    std::string s = text;
    double factor = 1.0;
    if (s.size() >= 2 && s.substr(s.size() - 2) == "pi" &&
        (s.size() == 2 || (std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == '-' ||
                           s[0] == '+' || s[0] == '.'))) {
        std::string head = s.substr(0, s.size() - 2);
        if (head.empty() || head == "-" || head == "+")
            factor = (head == "-") ? -1.0 : 1.0;
        else {
            try {
                std::size_t used = 0;
                factor = std::stod(head, &used);
                if (used != head.size()) factor = std::nan("");
            } catch (const std::logic_error&) {
                factor = std::nan("");
            }
        }
        if (std::isfinite(factor)) return factor * 3.14159265358979323846;
        // fall through: not actually the shorthand, parse as an expression
    }
    CoefficientField f;
    try {
        f = parse_field(text, 3);
    } catch (const ValidationError& e) {
        bad_value(section, key, std::string("is not a number: ") + e.what());
    }
    if (!f.is_constant()) bad_value(section, key, "must be a constant, not '" + text + "'");
    return f.constant_value();
}

long parse_integer(const std::string& section, const std::string& key,
                   const std::string& text) {
    try {
        std::size_t used = 0;
        long v = std::stol(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::logic_error&) {
        bad_value(section, key, "must be an integer, got '" + text + "'");
    }
}

bool parse_flag(const std::string& section, const std::string& key, const std::string& text) {
    if (text == "true" || text == "yes" || text == "on" || text == "1") return true;
    if (text == "false" || text == "no" || text == "off" || text == "0") return false;
    bad_value(section, key, "must be a boolean, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> parts;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ',')) {
        auto b = item.find_first_not_of(" \t");
        auto e = item.find_last_not_of(" \t");
        parts.push_back(b == std::string::npos ? "" : item.substr(b, e - b + 1));
    }
    return parts;
}

CoefficientField parse_field_value(const std::string& section, const std::string& key,
                                   const std::string& text, int dim) {
    try {
        return parse_field(text, dim);
    } catch (const ValidationError& e) {
        bad_value(section, key, std::string("does not parse: ") + e.what());
    }
}

} // namespace

ExperimentConfig parse_config(const std::string& text) {
    Reader rd(text);
    ExperimentConfig cfg;
    std::vector<std::string> missing;

    // The preset fills the worked one-dimensional transport benchmark:
    // d u = 2 D^2 u dt + 2 D u dw, psi = cos x, on [0, 1].
    if (const std::string* p = rd.get("problem", "preset")) {
        if (*p != "example-2-4")
            bad_value("problem", "preset", "must be 'example-2-4', got '" + *p + "'");
        rd.add_preset("problem", "dim", "1");
        rd.add_preset("problem", "drivers", "1");
        rd.add_preset("problem", "a11", "2");
        rd.add_preset("problem", "b1_1", "2");
        rd.add_preset("problem", "psi", "cos(x)");
        rd.add_preset("problem", "psi_modes", "1:0.5,-1:0.5");
        rd.add_preset("problem", "horizon", "1");
        rd.add_preset("scheme", "type", "central");
        rd.add_preset("grid", "h", "0.1");
        rd.add_preset("grid", "points", "16");
        rd.add_preset("grid", "levels", "3");
        rd.add_preset("time", "policy", "fixed");
        rd.add_preset("time", "dt", "0.001");
        rd.add_preset("time", "integrator", "exact");
    }

    auto require = [&](const char* section, const char* key) -> const std::string* {
        const std::string* v = rd.get(section, key);
        if (!v) missing.push_back(std::string(section) + "." + key);
        return v;
    };
    auto throw_missing = [&]() {
        std::string msg = "config: missing required key(s): ";
        for (std::size_t i = 0; i < missing.size(); ++i) msg += (i ? ", " : "") + missing[i];
        throw ValidationError(msg);
    };

    // [problem] dimensions first; coefficient key names depend on them.
    if (const std::string* v = require("problem", "dim")) {
        long d = parse_integer("problem", "dim", *v);
        if (d < 1 || d > 3) bad_value("problem", "dim", "must be 1, 2, or 3");
        cfg.dim = static_cast<int>(d);
    }
    if (const std::string* v = require("problem", "drivers")) {
        long m = parse_integer("problem", "drivers", *v);
        if (m < 0 || m > 64) bad_value("problem", "drivers", "must be in [0, 64]");
        cfg.drivers = static_cast<int>(m);
    }
    if (!missing.empty()) throw_missing(); // coefficient key names need dim and drivers

    cfg.pde = TargetPDE(cfg.dim, cfg.drivers);
    for (int i = 0; i <= cfg.dim; ++i)
        for (int j = 0; j <= cfg.dim; ++j) {
            std::string key = "a" + std::to_string(i) + std::to_string(j);
            if (i > j) {
                if (rd.given_explicitly("problem", key))
                    throw ValidationError(
                        "config line " + std::to_string(rd.line_of("problem", key)) +
                        ": coefficients are stored symmetrically; give a" + std::to_string(j) +
                        std::to_string(i) + " instead of " + key);
                continue;
            }
            if (const std::string* v = rd.get("problem", key))
                cfg.pde.set_a(i, j, parse_field_value("problem", key, *v, cfg.dim));
        }
    for (int i = 0; i <= cfg.dim; ++i)
        for (int r = 1; r <= cfg.drivers; ++r) {
            std::string key = "b" + std::to_string(i) + "_" + std::to_string(r);
            if (const std::string* v = rd.get("problem", key))
                cfg.pde.set_b(i, r - 1, parse_field_value("problem", key, *v, cfg.dim));
        }
    if (const std::string* v = require("problem", "psi")) {
        cfg.psi_expr = *v;
        cfg.psi = parse_field_value("problem", "psi", *v, cfg.dim);
    }
    if (const std::string* v = rd.get("problem", "f"))
        cfg.f = parse_field_value("problem", "f", *v, cfg.dim);
    cfg.g.assign(static_cast<std::size_t>(cfg.drivers), CoefficientField());
    for (int r = 1; r <= cfg.drivers; ++r) {
        std::string key = "g" + std::to_string(r);
        if (const std::string* v = rd.get("problem", key))
            cfg.g[static_cast<std::size_t>(r - 1)] =
                parse_field_value("problem", key, *v, cfg.dim);
    }
    if (const std::string* v = rd.get("problem", "psi_modes")) {
        for (const std::string& item : split_list(*v)) {
            std::istringstream ms(item);
            ModeSpec mode;
            char sep1 = 0;
            if (!(ms >> mode.k >> sep1 >> mode.re) || sep1 != ':')
                bad_value("problem", "psi_modes", "entries must look like k:re or k:re:im");
            char sep2 = 0;
            if (ms >> sep2) {
                if (sep2 != ':' || !(ms >> mode.im))
                    bad_value("problem", "psi_modes", "entries must look like k:re or k:re:im");
            }
            cfg.psi_modes.push_back(mode);
        }
    }
    if (const std::string* v = require("problem", "horizon")) {
        cfg.horizon = parse_scalar("problem", "horizon", *v);
        if (!(cfg.horizon > 0.0)) bad_value("problem", "horizon", "must be > 0");
    }

    // [scheme]
    if (const std::string* v = require("scheme", "type")) {
        if (*v == "central")
            cfg.scheme = SchemeKind::central;
        else if (*v == "upwind")
            cfg.scheme = SchemeKind::upwind;
        else
            bad_value("scheme", "type", "must be 'central' or 'upwind', got '" + *v + "'");
    }
    {
        const std::string* all = rd.get("scheme", "theta");
        bool any_axis = false;
        std::vector<const std::string*> per_axis(static_cast<std::size_t>(cfg.dim), nullptr);
        for (int a = 1; a <= cfg.dim; ++a) {
            per_axis[static_cast<std::size_t>(a - 1)] =
                rd.get("scheme", "theta" + std::to_string(a));
            any_axis = any_axis || per_axis[static_cast<std::size_t>(a - 1)];
        }
        if (all && any_axis)
            throw ValidationError(
                "config: give either scheme.theta or per-axis theta1.., not both");
        if (all || any_axis) {
            cfg.theta.assign(static_cast<std::size_t>(cfg.dim), 0.0);
            for (int a = 1; a <= cfg.dim; ++a) {
                const std::string* v = per_axis[static_cast<std::size_t>(a - 1)];
                std::string key = v ? "theta" + std::to_string(a) : "theta";
                if (!v) v = all;
                if (!v) bad_value("scheme", key, "is required for every axis");
                double th = parse_scalar("scheme", key, *v);
                if (!(th >= 0.0)) bad_value("scheme", key, "must be >= 0");
                cfg.theta[static_cast<std::size_t>(a - 1)] = th;
            }
        }
        if (cfg.scheme == SchemeKind::upwind && cfg.theta.empty())
            missing.push_back("scheme.theta");
    }

    // [grid]
    if (const std::string* v = require("grid", "points")) {
        long n = parse_integer("grid", "points", *v);
        if (n < 3) bad_value("grid", "points", "must be >= 3");
        cfg.points = static_cast<int>(n);
    }
    if (const std::string* v = require("grid", "levels")) {
        long n = parse_integer("grid", "levels", *v);
        if (n < 1 || n > 12) bad_value("grid", "levels", "must be in [1, 12]");
        cfg.levels = static_cast<int>(n);
    }
    {
        const std::string* h = rd.get("grid", "h");
        const std::string* period = rd.get("grid", "period");
        const bool h_explicit = rd.given_explicitly("grid", "h");
        const bool period_explicit = rd.given_explicitly("grid", "period");
        if (h_explicit && period_explicit)
            throw ValidationError("config: give either grid.h or grid.period, not both");
        // A preset fills in grid.h; an explicit key for the other form supersedes
        // it rather than clashing.
        if (period_explicit) h = nullptr;
        if (h_explicit) period = nullptr;
        if (!h && !period) missing.push_back("grid.h (or grid.period)");
        if (h) {
            double hv = parse_scalar("grid", "h", *h);
            if (!(hv > 0.0)) bad_value("grid", "h", "must be > 0");
            cfg.period = hv * cfg.points;
        } else if (period) {
            double pv = parse_scalar("grid", "period", *period);
            if (!(pv > 0.0)) bad_value("grid", "period", "must be > 0");
            cfg.period = pv;
        }
    }

    // [time]
    if (const std::string* v = rd.get("time", "policy")) {
        if (*v == "fixed")
            cfg.dt_policy = DtPolicy::fixed;
        else if (*v == "h2")
            cfg.dt_policy = DtPolicy::h2;
        else if (*v == "h4")
            cfg.dt_policy = DtPolicy::h4;
        else
            bad_value("time", "policy", "must be 'fixed', 'h2', or 'h4'");
    }
    {
        const std::string* dtv = rd.get("time", "dt");
        const std::string* scale = rd.get("time", "dt_scale");
        const std::string* dtm = rd.get("time", "dt_max");
        if (cfg.dt_policy == DtPolicy::fixed) {
            if (scale)
                throw ValidationError("config: time.dt_scale applies to the h2/h4 policies");
            if (!dtv)
                missing.push_back("time.dt");
            else {
                cfg.dt = parse_scalar("time", "dt", *dtv);
                if (!(cfg.dt > 0.0)) bad_value("time", "dt", "must be > 0");
            }
            // Leave dt_max at its default while dt itself is missing so the
            // missing-key report below stays the only complaint.
            cfg.dt_max = dtm ? parse_scalar("time", "dt_max", *dtm) : (dtv ? cfg.dt : cfg.dt_max);
        } else {
            // A preset's dt is ignored under an explicit h2/h4 policy; only a
            // dt the user typed clashes.
            if (rd.given_explicitly("time", "dt"))
                throw ValidationError(
                    "config: time.dt applies to the fixed policy; use dt_scale and dt_max");
            if (scale) {
                cfg.dt_scale = parse_scalar("time", "dt_scale", *scale);
                if (!(cfg.dt_scale > 0.0)) bad_value("time", "dt_scale", "must be > 0");
            }
            if (dtm) cfg.dt_max = parse_scalar("time", "dt_max", *dtm);
        }
        if (!(cfg.dt_max > 0.0)) bad_value("time", "dt_max", "must be > 0");
    }
    bool integrator_exact = false;
    if (const std::string* v = rd.get("time", "integrator")) {
        if (*v == "euler-maruyama")
            cfg.solver = SolverKind::euler_maruyama;
        else if (*v == "exact") {
            cfg.solver = SolverKind::exact_fourier;
            integrator_exact = true;
        } else
            bad_value("time", "integrator", "must be 'euler-maruyama' or 'exact'");
    }
    cfg.reference = integrator_exact ? ReferenceKind::closed_form : ReferenceKind::fine_grid;
    if (const std::string* v = rd.get("time", "reference")) {
        if (*v == "closed-form")
            cfg.reference = ReferenceKind::closed_form;
        else if (*v == "fine-grid")
            cfg.reference = ReferenceKind::fine_grid;
        else
            bad_value("time", "reference", "must be 'closed-form' or 'fine-grid'");
    }

    // [monte_carlo]
    {
        const std::string* count = rd.get("monte_carlo", "seeds");
        const std::string* base = rd.get("monte_carlo", "base_seed");
        const std::string* list = rd.get("monte_carlo", "seed_list");
        if (count && list)
            throw ValidationError(
                "config: give either monte_carlo.seeds or monte_carlo.seed_list, not both");
        if (list) {
            if (base)
                throw ValidationError("config: monte_carlo.base_seed applies to the "
                                      "count form, not seed_list");
            cfg.seeds.clear();
            for (const std::string& item : split_list(*list))
                cfg.seeds.push_back(static_cast<std::uint64_t>(
                    parse_integer("monte_carlo", "seed_list", item)));
            if (cfg.seeds.empty()) bad_value("monte_carlo", "seed_list", "must be nonempty");
        } else if (count) {
            long n = parse_integer("monte_carlo", "seeds", *count);
            if (n < 1 || n > 100000) bad_value("monte_carlo", "seeds", "must be in [1, 1e5]");
            long b = base ? parse_integer("monte_carlo", "base_seed", *base) : 1000;
            cfg.seeds.clear();
            for (long i = 0; i < n; ++i)
                cfg.seeds.push_back(static_cast<std::uint64_t>(b + i));
        }
    }
    if (const std::string* v = rd.get("monte_carlo", "moment_p")) {
        cfg.moment_p.clear();
        for (const std::string& item : split_list(*v)) {
            double p = parse_scalar("monte_carlo", "moment_p", item);
            if (!(p > 0.0)) bad_value("monte_carlo", "moment_p", "entries must be > 0");
            cfg.moment_p.push_back(p);
        }
    }

    // [extrapolation]
    if (const std::string* v = rd.get("extrapolation", "enabled"))
        cfg.extrapolate = parse_flag("extrapolation", "enabled", *v);
    if (const std::string* v = rd.get("extrapolation", "order")) {
        long k = parse_integer("extrapolation", "order", *v);
        if (k < 1 || k > 6) bad_value("extrapolation", "order", "must be in [1, 6]");
        cfg.extrap_order = static_cast<int>(k);
    }
    if (const std::string* v = rd.get("extrapolation", "power_step")) {
        long s = parse_integer("extrapolation", "power_step", *v);
        if (s != 1 && s != 2) bad_value("extrapolation", "power_step", "must be 1 or 2");
        cfg.power_step = static_cast<int>(s);
    }

    // [output]
    if (const std::string* v = rd.get("output", "directory")) cfg.out_dir = *v;
    if (const std::string* v = rd.get("output", "format")) {
        if (*v != "csv" && *v != "json")
            bad_value("output", "format", "must be 'csv' or 'json'");
        cfg.format = *v;
    }
    if (const std::string* v = rd.get("output", "norms")) {
        cfg.norms = split_list(*v);
        if (cfg.norms.empty()) bad_value("output", "norms", "must be nonempty");
        for (const std::string& n : cfg.norms)
            if (n != "sup" && n != "l2h")
                bad_value("output", "norms", "entries must be 'sup' or 'l2h', got '" + n + "'");
    }
    if (const std::string* v = rd.get("output", "record_points")) {
        long n = parse_integer("output", "record_points", *v);
        if (n < 2 || n > 100000) bad_value("output", "record_points", "must be in [2, 1e5]");
        cfg.record_points = static_cast<int>(n);
    }
    if (const std::string* v = rd.get("output", "clip_positive"))
        cfg.clip_positive = parse_flag("output", "clip_positive", *v);

    if (!missing.empty()) throw_missing();
    std::vector<std::string> unknown = rd.leftovers();
    if (!unknown.empty()) {
        std::string msg = "config: ";
        for (std::size_t i = 0; i < unknown.size(); ++i) msg += (i ? "; " : "") + unknown[i];
        throw ValidationError(msg);
    }

    // Cross-field checks that need the whole picture.
    if (cfg.scheme == SchemeKind::upwind && static_cast<int>(cfg.theta.size()) != cfg.dim)
        throw ValidationError("config: upwind schemes need one theta per axis");
    if (cfg.reference == ReferenceKind::closed_form) {
        if (cfg.dim != 1)
            throw ValidationError(
                "config: the closed-form reference requires a one-dimensional problem");
        if (cfg.psi_modes.empty())
            throw ValidationError(
                "config: the closed-form reference needs problem.psi_modes (k:re[:im] list)");
    }
    if (cfg.solver == SolverKind::exact_fourier) {
        if (cfg.dim != 1)
            throw ValidationError(
                "config: the exact integrator requires a one-dimensional problem");
        if (cfg.psi_modes.empty())
            throw ValidationError(
                "config: the exact integrator needs problem.psi_modes (k:re[:im] list)");
    }
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << is.rdbuf();
    try {
        return parse_config(buf.str());
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

} // namespace sfdlab
