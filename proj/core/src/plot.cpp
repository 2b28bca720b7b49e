#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavnav/experiment.hpp"

namespace uavnav::experiment {

namespace {

constexpr double kPanelW = 340.0;
constexpr double kPanelH = 300.0;
constexpr double kMarginL = 64.0;
constexpr double kMarginR = 16.0;
constexpr double kMarginT = 42.0;
constexpr double kMarginB = 56.0;
constexpr double kPanelGap = 18.0;

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

void put_text(std::ostream& out, double x, double y, const std::string& body,
              const std::string& anchor = "middle", int size = 12,
              const std::string& extra = "") {
    out << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-size=\"" << size
        << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\"" << extra << ">"
        << body << "</text>\n";
}

void put_line(std::ostream& out, double x1, double y1, double x2, double y2,
              const std::string& stroke, double width = 1.0) {
    out << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2)
        << "\" y2=\"" << fmt(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
        << fmt(width) << "\"/>\n";
}

}  // namespace

void emit_plot(const SweepResult& result, std::ostream& out) {
    std::set<double> ts_set;
    std::set<double> vel_set;
    std::map<std::pair<std::string, std::string>, std::vector<const CellStats*>> panels;
    for (const auto& c : result.cells) {
        ts_set.insert(c.epoch_s);
        vel_set.insert(c.velocity_mps);
        panels[{c.schedule, c.mode}].push_back(&c);
    }
    if (ts_set.size() < 2) {
        throw std::invalid_argument(
            "emit_plot: need at least two T_S values to draw lines; use the CSV output for "
            "degenerate grids");
    }

    const std::vector<double> velocities(vel_set.begin(), vel_set.end());
    const double ts_min = *ts_set.begin();
    const double ts_max = *ts_set.rbegin();

    double y_max = 0.0;
    for (const auto& c : result.cells) {
        if (c.has_stats) {
            y_max = std::max(y_max, c.ci95_hi_s);
        }
    }
    if (y_max <= 0.0) {
        y_max = 1.0;
    }
    y_max *= 1.05;

    const std::size_t n_panels = panels.size();
    const double total_w = n_panels * kPanelW + (n_panels - 1) * kPanelGap;
    const double total_h = kPanelH;

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(total_w)
        << "\" height=\"" << fmt(total_h) << "\" viewBox=\"0 0 " << fmt(total_w) << ' '
        << fmt(total_h) << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << fmt(total_w) << "\" height=\"" << fmt(total_h)
        << "\" fill=\"white\"/>\n";

    std::size_t panel_index = 0;
    for (const auto& [key, cells] : panels) {
        const double ox = panel_index * (kPanelW + kPanelGap);
        const double plot_x0 = ox + kMarginL;
        const double plot_y0 = kMarginT;
        const double plot_w = kPanelW - kMarginL - kMarginR;
        const double plot_h = kPanelH - kMarginT - kMarginB;
        const double plot_x1 = plot_x0 + plot_w;
        const double plot_y1 = plot_y0 + plot_h;

        auto x_of = [&](double ts) {
            return plot_x0 + (ts - ts_min) / (ts_max - ts_min) * plot_w;
        };
        auto y_of = [&](double v) { return plot_y1 - v / y_max * plot_h; };

        put_text(out, ox + kPanelW / 2.0, kMarginT - 16.0, key.first + " / " + key.second,
                 "middle", 13);
        put_line(out, plot_x0, plot_y0, plot_x0, plot_y1, "black");
        put_line(out, plot_x0, plot_y1, plot_x1, plot_y1, "black");

        for (const double ts : ts_set) {
            const double x = x_of(ts);
            put_line(out, x, plot_y1, x, plot_y1 + 4.0, "black");
            put_text(out, x, plot_y1 + 18.0, fmt_tick(ts));
        }
        put_text(out, plot_x0 + plot_w / 2.0, plot_y1 + 38.0, "sampling duration T_S (s)");

        for (int i = 0; i <= 4; ++i) {
            const double v = y_max * i / 4.0;
            const double y = y_of(v);
            put_line(out, plot_x0 - 4.0, y, plot_x0, y, "black");
            put_text(out, plot_x0 - 8.0, y + 4.0, fmt_tick(v), "end", 11);
        }
        put_text(out, plot_x0 - 50.0, plot_y0 + plot_h / 2.0, "mean convergence time (s)",
                 "middle", 12,
                 " transform=\"rotate(-90 " + fmt(plot_x0 - 50.0) + ' ' +
                     fmt(plot_y0 + plot_h / 2.0) + ")\"");

        // One polyline per velocity; CI whiskers behind the line.
        for (std::size_t vi = 0; vi < velocities.size(); ++vi) {
            const double vel = velocities[vi];
            const std::string color = kPalette[vi % (sizeof(kPalette) / sizeof(kPalette[0]))];
            std::vector<const CellStats*> series;
            for (const CellStats* c : cells) {
                if (c->velocity_mps == vel && c->has_stats) {
                    series.push_back(c);
                }
            }
            std::sort(series.begin(), series.end(), [](const CellStats* a, const CellStats* b) {
                return a->epoch_s < b->epoch_s;
            });
            for (const CellStats* c : series) {
                const double x = x_of(c->epoch_s);
                put_line(out, x, y_of(c->ci95_lo_s), x, y_of(c->ci95_hi_s), color, 1.0);
                put_line(out, x - 3.0, y_of(c->ci95_lo_s), x + 3.0, y_of(c->ci95_lo_s), color);
                put_line(out, x - 3.0, y_of(c->ci95_hi_s), x + 3.0, y_of(c->ci95_hi_s), color);
            }
            out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" "
                << "points=\"";
            bool first = true;
            for (const CellStats* c : series) {
                if (!first) {
                    out << ' ';
                }
                out << fmt(x_of(c->epoch_s)) << ',' << fmt(y_of(c->mean_s));
                first = false;
            }
            out << "\"/>\n";
            for (const CellStats* c : series) {
                out << "<circle cx=\"" << fmt(x_of(c->epoch_s)) << "\" cy=\""
                    << fmt(y_of(c->mean_s)) << "\" r=\"2.2\" fill=\"" << color << "\"/>\n";
            }

            const double ly = plot_y0 + 14.0 + 16.0 * vi;
            put_line(out, plot_x1 - 72.0, ly - 4.0, plot_x1 - 52.0, ly - 4.0, color, 1.5);
            put_text(out, plot_x1 - 46.0, ly, "v=" + fmt_tick(vel) + " m/s", "start", 11);
        }
        ++panel_index;
    }
    out << "</svg>\n";
}

}  // namespace uavnav::experiment
