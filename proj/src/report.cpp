#include "sfdlab/report.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "sfdlab/errors.hpp"

namespace sfdlab {

namespace {

std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void put_rows(std::ostream& os, const std::vector<CellResult>& cells, const char* sup_name,
              const char* l2h_name) {
    for (const CellResult& c : cells) {
        os << num17(c.h) << ',' << c.points << ',' << c.seed << ',' << sup_name << ','
           << num17(c.sup_error) << '\n';
        os << num17(c.h) << ',' << c.points << ',' << c.seed << ',' << l2h_name << ','
           << num17(c.l2h_error) << '\n';
    }
}

nlohmann::ordered_json fit_json(const OrderFit& f) {
    nlohmann::ordered_json j;
    j["fitted"] = f.fitted;
    j["slope"] = f.slope;
    j["r_squared"] = f.r_squared;
    j["exact"] = f.exact;
    j["used"] = f.used;
    j["dropped"] = f.dropped;
    if (!f.note.empty()) j["note"] = f.note;
    return j;
}

nlohmann::ordered_json cells_json(const std::vector<CellResult>& cells) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const CellResult& c : cells) {
        nlohmann::ordered_json j;
        j["h"] = c.h;
        j["points"] = c.points;
        j["seed"] = c.seed;
        j["sup_error"] = c.sup_error;
        j["l2h_error"] = c.l2h_error;
        arr.push_back(std::move(j));
    }
    return arr;
}

std::string fit_str(const OrderFit& f) {
    if (f.exact) return "exact (all residuals below the floor)";
    if (!f.fitted) return f.note.empty() ? std::string("no fit") : "no fit (" + f.note + ")";
    char buf[80];
    std::snprintf(buf, sizeof buf, "%.4f (R^2 = %.6f, %d levels)", f.slope, f.r_squared,
                  f.used);
    return buf;
}

} // namespace

void write_report_csv(const ConvergenceReport& rep, std::ostream& os) {
    os << "h,points,seed,norm,value\n";
    put_rows(os, rep.cells, "sup", "l2h");
    put_rows(os, rep.extrapolated_cells, "sup_extrap", "l2h_extrap");
}

std::vector<ReportRow> read_report_rows_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "h,points,seed,norm,value")
        throw ValidationError("report CSV must start with the header 'h,points,seed,norm,value'");
    std::vector<ReportRow> rows;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        auto next = [&](const char* what) -> std::string& {
            if (!std::getline(ss, field, ','))
                throw ValidationError("report CSV line " + std::to_string(lineno) +
                                      ": missing field '" + what + "'");
            return field;
        };
        ReportRow row;
        try {
            row.h = std::stod(next("h"));
            row.points = std::stoi(next("points"));
            row.seed = std::stoull(next("seed"));
            row.norm = next("norm");
            row.value = std::stod(next("value"));
        } catch (const std::logic_error&) {
            throw ValidationError("report CSV line " + std::to_string(lineno) +
                                  ": malformed number");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_report_json(const ConvergenceReport& rep, std::ostream& os) {
    nlohmann::ordered_json j;
    j["h_levels"] = rep.h_levels;
    j["points_per_level"] = rep.points_per_level;
    j["cells"] = cells_json(rep.cells);
    if (!rep.extrapolated_cells.empty())
        j["extrapolated_cells"] = cells_json(rep.extrapolated_cells);
    nlohmann::ordered_json moments = nlohmann::ordered_json::array();
    for (const MomentRow& m : rep.moments) {
        nlohmann::ordered_json mj;
        mj["h"] = m.h;
        mj["p"] = m.p;
        mj["norm"] = m.norm;
        mj["value"] = m.estimate.value;
        mj["half_width"] = m.estimate.half_width;
        mj["sample_count"] = m.estimate.sample_count;
        mj["degenerate"] = m.estimate.degenerate;
        moments.push_back(std::move(mj));
    }
    j["moments"] = std::move(moments);
    j["sup_order"] = fit_json(rep.sup_order);
    j["l2h_order"] = fit_json(rep.l2h_order);
    if (!rep.weights.empty()) {
        j["extrap_sup_order"] = fit_json(rep.extrap_sup_order);
        j["extrap_l2h_order"] = fit_json(rep.extrap_l2h_order);
        j["weights"] = rep.weights;
    }
    nlohmann::ordered_json per_seed = nlohmann::ordered_json::array();
    for (const OrderFit& f : rep.per_seed_sup_orders) per_seed.push_back(fit_json(f));
    j["per_seed_sup_orders"] = std::move(per_seed);
    j["reference"] = rep.reference;
    if (!rep.advisory.empty()) j["advisory"] = rep.advisory;
    j["data_norm"] = rep.data_norm;
    j["clip_checked"] = rep.clip_checked;
    if (rep.clip_checked) j["clip_ok"] = rep.clip_ok;
    j["runtime_seconds"] = rep.runtime_seconds;
    j["threads"] = rep.threads;
    os << j.dump(2) << '\n';
}

void write_report_summary(const ConvergenceReport& rep, std::ostream& os) {
    os << "levels:";
    for (std::size_t i = 0; i < rep.h_levels.size(); ++i)
        os << " h=" << num17(rep.h_levels[i]) << " (" << rep.points_per_level[i] << " points)";
    os << '\n';
    os << "sup-norm order: " << fit_str(rep.sup_order) << '\n';
    os << "l2h-norm order: " << fit_str(rep.l2h_order) << '\n';
    if (!rep.weights.empty()) {
        os << "extrapolation weights: " << rep.weights << '\n';
        os << "extrapolated sup-norm order: " << fit_str(rep.extrap_sup_order) << '\n';
        os << "extrapolated l2h-norm order: " << fit_str(rep.extrap_l2h_order) << '\n';
    }
    for (const MomentRow& m : rep.moments) {
        os << "moment p=" << m.p << ' ' << m.norm << " h=" << num17(m.h) << ": "
           << num17(m.estimate.value) << " +/- " << num17(m.estimate.half_width) << " ("
           << m.estimate.sample_count << " seeds"
           << (m.estimate.degenerate ? ", degenerate" : "") << ")\n";
    }
    if (!rep.per_seed_sup_orders.empty()) {
        os << "per-seed sup orders:";
        for (const OrderFit& f : rep.per_seed_sup_orders) {
            char buf[32];
            std::snprintf(buf, sizeof buf, " %.3f", f.slope);
            os << (f.fitted ? buf : " (none)");
        }
        os << '\n';
    }
    os << "reference: " << rep.reference << '\n';
    if (!rep.advisory.empty()) os << "advisory: " << rep.advisory << '\n';
    os << "data norm (diagnostic): " << num17(rep.data_norm) << '\n';
    if (rep.clip_checked)
        os << "positive-part clip: " << (rep.clip_ok ? "ok" : "VIOLATED") << '\n';
    char buf[64];
    std::snprintf(buf, sizeof buf, "runtime: %.3f s on %d thread(s)\n", rep.runtime_seconds,
                  rep.threads);
    os << buf;
}

} // namespace sfdlab
