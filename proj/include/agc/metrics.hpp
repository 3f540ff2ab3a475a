// Evaluation metrics and report rendering: cumulative absolute net-profit
// error curves, Welch's t-test (pooled variant available), a per-greenhouse
// economics comparison table, ledger replay verification, and CSV/SVG/markdown
// emission.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "agc/trajectory.hpp"
#include "agc/twin.hpp"

namespace agc {

// e_t = sum_{k<=t} |sim_k - truth_k|; monotone non-decreasing by construction.
inline std::vector<double> cumulative_abs_error(const std::vector<double>& sim_curve,
                                                const std::vector<double>& truth_curve) {
    if (sim_curve.size() != truth_curve.size())
        throw ValidationError("cumulative_abs_error: curve length mismatch");
    std::vector<double> out(sim_curve.size());
    double acc = 0.0;
    for (size_t t = 0; t < sim_curve.size(); ++t) {
        acc += std::abs(sim_curve[t] - truth_curve[t]);
        out[t] = acc;
    }
    return out;
}

// --- Student's t distribution --------------------------------------------

namespace detail {

// Continued fraction for the regularized incomplete beta (Lentz's method).
inline double betacf(double a, double b, double x) {
    const int max_iter = 400;
    const double eps = 3e-14, fpmin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

inline double ibeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                      b * std::log(1.0 - x);
    const double bt = std::exp(ln);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

inline double sample_mean(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    return m / v.size();
}

inline double sample_var(const std::vector<double>& v, double mean) {
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return s / (v.size() - 1);
}

}  // namespace detail

// Two-sided p-value of |T| > |t| for Student's t with `df` degrees of freedom.
inline double t_two_sided_p(double t, double df) {
    if (!std::isfinite(t)) return 0.0;
    return detail::ibeta(df / 2.0, 0.5, df / (df + t * t));
}

struct TTestResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
    bool significant = false; // p < 0.01
};

// Welch's unequal-variance t-test (the default); `pooled` switches to the
// classic equal-variance form. Degenerate zero-variance inputs use the
// convention: equal means -> p = 1, different means -> p = 0.
inline TTestResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b,
                                bool pooled = false) {
    const size_t na = a.size(), nb = b.size();
    if (na < 2 || nb < 2)
        throw ValidationError("welch_t_test: both samples need at least 2 values");
    const double ma = detail::sample_mean(a), mb = detail::sample_mean(b);
    const double va = detail::sample_var(a, ma), vb = detail::sample_var(b, mb);
    if (!std::isfinite(va) || !std::isfinite(vb))
        throw ValidationError("welch_t_test: non-finite variance");

    TTestResult r;
    double se2, df;
    if (pooled) {
        const double sp2 = ((na - 1) * va + (nb - 1) * vb) / (na + nb - 2);
        se2 = sp2 * (1.0 / na + 1.0 / nb);
        df = static_cast<double>(na + nb - 2);
    } else {
        const double xa = va / na, xb = vb / nb;
        se2 = xa + xb;
        df = se2 > 0.0
                 ? se2 * se2 / (xa * xa / (na - 1) + xb * xb / (nb - 1))
                 : static_cast<double>(na + nb - 2);
    }
    r.df = df;
    if (se2 <= 0.0) {
        r.t = 0.0;
        r.p = (ma == mb) ? 1.0 : 0.0;
        r.significant = r.p < 0.01;
        return r;
    }
    r.t = (ma - mb) / std::sqrt(se2);
    r.p = t_two_sided_p(r.t, df);
    r.significant = r.p < 0.01;
    return r;
}

// --- economics comparison table --------------------------------------------

struct GroupStat {
    double mean = 0.0;
    double sd = 0.0;
};

struct EconRow {
    std::string label;
    bool higher_is_better = false;
    GroupStat control, experiment;
    double rel_improvement = 0.0; // signed: + means the experiment improved
    bool has_ri = true;
    double p = 1.0;
    bool has_p = true;
};

namespace detail {

inline GroupStat group_stat(const std::vector<double>& v) {
    GroupStat g;
    g.mean = sample_mean(v);
    g.sd = v.size() > 1 ? std::sqrt(sample_var(v, g.mean)) : 0.0;
    return g;
}

}  // namespace detail

// Per-greenhouse economics (per-m2 ledgers scaled by the configured area),
// one row per cost/benefit component, with relative improvement and a t-test
// column when both groups carry spread.
inline std::vector<EconRow> build_econ_table(const std::vector<Trajectory>& control,
                                             const std::vector<Trajectory>& experiment,
                                             double greenhouse_area) {
    if (control.empty() || experiment.empty())
        throw ValidationError("build_econ_table: both groups need at least one episode");
    struct Field {
        const char* label;
        bool higher_is_better;
        double (*get)(const Trajectory&);
    };
    static const Field fields[] = {
        {"Energy Cost (EUR)", false, [](const Trajectory& t) { return t.ledger.energy_cost; }},
        {"CO2 Cost (EUR)", false, [](const Trajectory& t) { return t.ledger.co2_cost; }},
        {"Water Cost (EUR)", false, [](const Trajectory& t) { return t.ledger.water_cost; }},
        {"Crop Maintenance Cost (EUR)", false,
         [](const Trajectory& t) { return t.ledger.maintenance_cost; }},
        {"Equipment Depreciation (EUR)", false,
         [](const Trajectory& t) { return t.ledger.depreciation; }},
        {"Total Cost (EUR)", false, [](const Trajectory& t) { return t.ledger.total_cost(); }},
        {"Crop Yield (kg)", true,
         [](const Trajectory& t) { return t.daily_yield.empty() ? 0.0 : t.daily_yield.back(); }},
        {"Gains (EUR)", true, [](const Trajectory& t) { return t.ledger.gains; }},
        {"Net Profit (EUR)", true, [](const Trajectory& t) { return t.ledger.net_profit(); }},
    };

    std::vector<EconRow> rows;
    for (const Field& f : fields) {
        std::vector<double> cv, ev;
        for (const auto& tr : control) cv.push_back(f.get(tr) * greenhouse_area);
        for (const auto& tr : experiment) ev.push_back(f.get(tr) * greenhouse_area);
        EconRow row;
        row.label = f.label;
        row.higher_is_better = f.higher_is_better;
        row.control = detail::group_stat(cv);
        row.experiment = detail::group_stat(ev);
        const double ctrl = row.control.mean;
        if (std::abs(ctrl) > 1e-12) {
            const double delta = row.experiment.mean - ctrl;
            row.rel_improvement =
                (f.higher_is_better ? delta : -delta) / std::abs(ctrl);
        } else {
            row.has_ri = false;
        }
        if (cv.size() >= 2 && ev.size() >= 2 &&
            (detail::sample_var(cv, row.control.mean) > 1e-18 ||
             detail::sample_var(ev, row.experiment.mean) > 1e-18)) {
            row.p = welch_t_test(cv, ev).p;
        } else {
            row.has_p = false;
        }
        rows.push_back(row);
    }
    return rows;
}

// --- ledger replay -----------------------------------------------------------

struct ReplayCheck {
    bool ok = true;
    std::string detail;
    EconomicLedger recomputed;
    std::vector<double> rewards;
};

// Recomputes the cost/gain stream from the logged weather, actions and daily
// yields (the economics config travels in the trajectory meta) and compares it
// bit for bit against the stored rewards and ledger.
inline ReplayCheck replay_trajectory(const Trajectory& tr) {
    if (!tr.meta.contains("econ"))
        throw ValidationError("replay: trajectory meta lacks the econ config");
    const EconConfig econ = tr.meta.at("econ").get<EconConfig>();
    const int T = tr.horizon();

    ReplayCheck chk;
    EconomicLedger ledger;
    if (T == 0 && tr.ledger.finalized) ledger = finalize_ledger(ledger, econ);
    for (int t = 0; t < T; ++t) {
        const double prev_np = ledger.net_profit();
        ledger.accrue(step_cost_components(tr.actions[t], tr.states[t].weather, 1.0, econ));
        if ((t + 1) % 24 == 0) {
            const size_t d = static_cast<size_t>(t + 1) / 24 - 1;
            if (d < tr.daily_yield.size()) {
                const double prev_fw =
                    d == 0 ? tr.states.front().yield.fw : tr.daily_yield[d - 1];
                const double inc = tr.daily_yield[d] - prev_fw;
                if (inc > 0.0) ledger.gains += step_gain(inc, econ);
            }
        }
        if (t == T - 1 && tr.ledger.finalized) ledger = finalize_ledger(ledger, econ);
        chk.rewards.push_back(ledger.net_profit() - prev_np);
    }
    chk.recomputed = ledger;

    auto fail = [&](const std::string& why) {
        chk.ok = false;
        if (!chk.detail.empty()) chk.detail += "; ";
        chk.detail += why;
    };
    if (ledger.energy_cost != tr.ledger.energy_cost) fail("energy_cost differs");
    if (ledger.co2_cost != tr.ledger.co2_cost) fail("co2_cost differs");
    if (ledger.water_cost != tr.ledger.water_cost) fail("water_cost differs");
    if (ledger.maintenance_cost != tr.ledger.maintenance_cost) fail("maintenance_cost differs");
    if (ledger.depreciation != tr.ledger.depreciation) fail("depreciation differs");
    if (ledger.gains != tr.ledger.gains) fail("gains differ");
    for (int t = 0; t < T; ++t)
        if (chk.rewards[t] != tr.rewards[t]) {
            fail("reward differs at step " + std::to_string(t));
            break;
        }
    return chk;
}

// --- rendering ----------------------------------------------------------------

struct MetricsReport {
    R2Table r2;
    std::vector<EconRow> econ;
    std::vector<double> truth_net_profit;
    std::vector<double> sim_net_profit;
    std::vector<double> cum_abs_error;
};

inline std::string r2_csv(const R2Table& table) {
    std::string csv = "variable,r2,r2_raw,defined,n\n";
    char line[160];
    for (const auto& row : table.rows) {
        std::snprintf(line, sizeof(line), "%s,%.6f,%.6f,%d,%zu\n", row.variable.c_str(),
                      row.defined ? row.r2_clamped : std::numeric_limits<double>::quiet_NaN(),
                      row.defined ? row.r2_raw : std::numeric_limits<double>::quiet_NaN(),
                      row.defined ? 1 : 0, row.n);
        csv += line;
    }
    return csv;
}

inline void write_r2_csv(const R2Table& table, const std::filesystem::path& path) {
    write_text_file(path, r2_csv(table));
}

inline R2Table read_r2_csv(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    R2Table table;
    size_t pos = text.find('\n');
    if (pos == std::string::npos) throw IoError(path.string() + ": empty R2 csv");
    while (pos != std::string::npos && pos + 1 < text.size()) {
        const size_t end = text.find('\n', pos + 1);
        const std::string line = text.substr(pos + 1, end == std::string::npos
                                                          ? std::string::npos
                                                          : end - pos - 1);
        pos = end;
        if (line.empty()) continue;
        R2Entry e;
        char name[64];
        double r2, raw;
        int defined;
        size_t n;
        if (std::sscanf(line.c_str(), "%63[^,],%lf,%lf,%d,%zu", name, &r2, &raw, &defined, &n) !=
            5)
            throw IoError(path.string() + ": malformed R2 csv line: " + line);
        e.variable = name;
        e.r2_clamped = r2;
        e.r2_raw = raw;
        e.defined = defined != 0;
        e.n = n;
        table.rows.push_back(e);
    }
    return table;
}

// Minimal multi-series SVG line chart; well-formed XML by construction.
inline std::string svg_line_chart(const std::string& title,
                                  const std::vector<std::pair<std::string,
                                                              const std::vector<double>*>>& series) {
    const int W = 860, H = 420, ml = 70, mr = 160, mt = 40, mb = 40;
    double lo = 1e300, hi = -1e300;
    size_t n = 0;
    for (const auto& [name, data] : series) {
        for (double v : *data) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        n = std::max(n, data->size());
    }
    if (n == 0 || lo > hi) throw ValidationError("svg_line_chart: empty series");
    if (hi - lo < 1e-12) {
        hi += 1.0;
        lo -= 1.0;
    }
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

    std::string svg;
    char buf[256];
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                  "viewBox=\"0 0 %d %d\">\n",
                  W, H, W, H);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%d\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">%s</text>\n",
                  ml, title.c_str());
    svg += buf;
    // axes
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"#333\"/>\n", ml, H - mb,
                  W - mr, H - mb);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"#333\"/>\n", ml, mt, ml,
                  H - mb);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"8\" y=\"%d\" font-family=\"sans-serif\" font-size=\"11\">%.4f</text>\n",
                  mt + 4, hi);
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"8\" y=\"%d\" font-family=\"sans-serif\" font-size=\"11\">%.4f</text>\n",
                  H - mb, lo);
    svg += buf;

    int color_idx = 0;
    int legend_y = mt + 10;
    for (const auto& [name, data] : series) {
        const char* color = colors[color_idx++ % 4];
        std::string points;
        for (size_t i = 0; i < data->size(); ++i) {
            const double x = ml + (W - ml - mr) * (n > 1 ? static_cast<double>(i) / (n - 1) : 0.5);
            const double y = (H - mb) - (H - mt - mb) * (((*data)[i] - lo) / (hi - lo));
            std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", x, y);
            points += buf;
        }
        svg += "<polyline fill=\"none\" stroke=\"";
        svg += color;
        svg += "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"12\" "
                      "fill=\"%s\">%s</text>\n",
                      W - mr + 10, legend_y, color, name.c_str());
        svg += buf;
        legend_y += 18;
    }
    svg += "</svg>\n";
    return svg;
}

inline std::string econ_table_markdown(const std::vector<EconRow>& rows) {
    std::string md;
    md += "| Economic (per greenhouse) | Control Group | Experimental Group | RI | T-test |\n";
    md += "|---|---|---|---|---|\n";
    for (const auto& r : rows) {
        md += "| " + r.label + " | ";
        md += format_fixed(r.control.mean, 4) + " ± " + format_fixed(r.control.sd, 4) + " | ";
        md += format_fixed(r.experiment.mean, 4) + " ± " + format_fixed(r.experiment.sd, 4) +
              " | ";
        if (r.has_ri) {
            const double pct = 100.0 * r.rel_improvement;
            md += (pct >= 0 ? "+" : "") + format_fixed(pct, 2) + "% | ";
        } else {
            md += "- | ";
        }
        md += r.has_p ? format_fixed(r.p, 4) : "-";
        md += " |\n";
    }
    return md;
}

inline std::string econ_table_csv(const std::vector<EconRow>& rows) {
    std::string csv =
        "label,control_mean,control_sd,experiment_mean,experiment_sd,relative_improvement,"
        "p_value\n";
    char line[320];
    for (const auto& r : rows) {
        std::snprintf(line, sizeof(line), "%s,%.4f,%.4f,%.4f,%.4f,%s,%s\n", r.label.c_str(),
                      r.control.mean, r.control.sd, r.experiment.mean, r.experiment.sd,
                      r.has_ri ? format_fixed(r.rel_improvement, 6).c_str() : "",
                      r.has_p ? format_fixed(r.p, 6).c_str() : "");
        csv += line;
    }
    return csv;
}

// Emits the full report bundle: CSV data, SVG charts, and the markdown
// economics table. Every section must be populated.
inline void render_report(const MetricsReport& m, const std::filesystem::path& out_dir) {
    std::string missing;
    auto need = [&](bool ok, const char* what) {
        if (!ok) {
            if (!missing.empty()) missing += ", ";
            missing += what;
        }
    };
    need(!m.r2.rows.empty(), "r2 table");
    need(!m.econ.empty(), "economics table");
    need(!m.truth_net_profit.empty(), "truth net-profit curve");
    need(!m.sim_net_profit.empty(), "simulated net-profit curve");
    need(!m.cum_abs_error.empty(), "cumulative absolute error curve");
    if (!missing.empty())
        throw ValidationError("render_report: missing fields: " + missing);
    if (m.truth_net_profit.size() != m.sim_net_profit.size())
        throw ValidationError("render_report: net-profit curves have different lengths");

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (!std::filesystem::exists(out_dir))
        throw IoError("render_report: cannot create output directory " + out_dir.string());

    write_r2_csv(m.r2, out_dir / "r2.csv");
    write_text_file(out_dir / "econ_table.csv", econ_table_csv(m.econ));
    write_text_file(out_dir / "econ_table.md", econ_table_markdown(m.econ));

    std::string curve_csv = "step,truth_net_profit,sim_net_profit\n";
    char line[128];
    for (size_t t = 0; t < m.truth_net_profit.size(); ++t) {
        std::snprintf(line, sizeof(line), "%zu,%.10g,%.10g\n", t, m.truth_net_profit[t],
                      m.sim_net_profit[t]);
        curve_csv += line;
    }
    write_text_file(out_dir / "net_profit.csv", curve_csv);

    std::string err_csv = "step,cumulative_abs_error\n";
    for (size_t t = 0; t < m.cum_abs_error.size(); ++t) {
        std::snprintf(line, sizeof(line), "%zu,%.10g\n", t, m.cum_abs_error[t]);
        err_csv += line;
    }
    write_text_file(out_dir / "cum_abs_error.csv", err_csv);

    write_text_file(out_dir / "net_profit.svg",
                    svg_line_chart("Net profit over time (EUR/m2)",
                                   {{"ground truth", &m.truth_net_profit},
                                    {"simulated", &m.sim_net_profit}}));
    write_text_file(out_dir / "cum_abs_error.svg",
                    svg_line_chart("Cumulative absolute net-profit error (EUR/m2)",
                                   {{"cumulative error", &m.cum_abs_error}}));
}

}  // namespace agc
