#include "sympdyn/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "sympdyn/error.hpp"

namespace sympdyn::harness {

RunReport report_from_trajectory(const integrators::Trajectory& traj) {
    RunReport rep;
    rep.rows = traj.diagnostics;
    rep.total_oracle_calls = traj.score_builds;
    rep.status = traj.ok() ? "ok" : traj.error;
    if (!rep.rows.empty()) {
        rep.final_energy = rep.rows.back().energy;
        rep.min_energy = rep.rows.front().energy;
        for (const auto& r : rep.rows) rep.min_energy = std::min(rep.min_energy, r.energy);
    }
    return rep;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool same_bits(double a, double b) {
    return std::memcmp(&a, &b, sizeof a) == 0 || a == b || (std::isnan(a) && std::isnan(b));
}

} // namespace

void emit_csv(const RunReport& report, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error("emit_csv: cannot open '" + path + "'");
    os << "t,hamiltonian,h_tilde,energy,y_norm,oracle_calls\n";
    for (const auto& r : report.rows)
        os << fmt(r.t) << ',' << fmt(r.hamiltonian) << ',' << fmt(r.h_tilde) << ','
           << fmt(r.energy) << ',' << fmt(r.y_norm) << ',' << r.oracle_calls << '\n';
    if (!os) throw Error("emit_csv: write failure on '" + path + "'");
}

std::vector<integrators::StepDiagnostics> parse_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("parse_csv: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(is, line) || line != "t,hamiltonian,h_tilde,energy,y_norm,oracle_calls")
        throw ParseError(1, "unexpected CSV header");
    std::vector<integrators::StepDiagnostics> rows;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        integrators::StepDiagnostics d;
        char comma;
        ls >> d.t >> comma >> d.hamiltonian >> comma >> d.h_tilde >> comma >> d.energy >> comma >>
            d.y_norm >> comma >> d.oracle_calls;
        if (ls.fail()) throw ParseError(line_no, "malformed CSV row '" + line + "'");
        rows.push_back(d);
    }
    return rows;
}

bool rows_identical(const std::vector<integrators::StepDiagnostics>& a,
                    const std::vector<integrators::StepDiagnostics>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!same_bits(a[i].t, b[i].t) || !same_bits(a[i].hamiltonian, b[i].hamiltonian) ||
            !same_bits(a[i].h_tilde, b[i].h_tilde) || !same_bits(a[i].energy, b[i].energy) ||
            !same_bits(a[i].y_norm, b[i].y_norm) || a[i].oracle_calls != b[i].oracle_calls)
            return false;
    }
    return true;
}

// ------------------------------- SVG ----------------------------------------

namespace {

constexpr int kWidth = 860, kHeight = 520;
constexpr int kLeft = 70, kRight = 180, kTop = 40, kBottom = 50;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

} // namespace

void write_svg_chart(const std::string& path, const std::vector<SvgSeries>& series,
                     const SvgOptions& opts) {
    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
    bool have = false;
    auto y_of = [&](double y) { return opts.log_y ? std::log10(y) : y; };
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double yv = s.y[i];
            if (!std::isfinite(s.x[i]) || !std::isfinite(yv)) continue;
            if (opts.log_y && !(yv > 0.0)) continue;
            const double ty = y_of(yv);
            if (!have) {
                x_min = x_max = s.x[i];
                y_min = y_max = ty;
                have = true;
            } else {
                x_min = std::min(x_min, s.x[i]);
                x_max = std::max(x_max, s.x[i]);
                y_min = std::min(y_min, ty);
                y_max = std::max(y_max, ty);
            }
        }
    }
    if (!have) {
        x_min = y_min = 0;
        x_max = y_max = 1;
    }
    if (x_max == x_min) x_max = x_min + 1;
    if (y_max == y_min) y_max = y_min + 1;

    const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
    auto py = [&](double y) { return kTop + plot_h - (y - y_min) / (y_max - y_min) * plot_h; };

    std::ofstream os(path);
    if (!os) throw Error("write_svg_chart: cannot open '" + path + "'");
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
       << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    os << "  <rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
    os << "  <text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
       << escape_xml(opts.title) << "</text>\n";

    // axes
    os << "  <line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
       << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
    os << "  <line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
       << kTop + plot_h << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double fx = x_min + (x_max - x_min) * i / 5.0;
        const double fy = y_min + (y_max - y_min) * i / 5.0;
        os << "  <line x1=\"" << px(fx) << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << px(fx)
           << "\" y2=\"" << kTop + plot_h + 5 << "\" stroke=\"black\"/>\n";
        os << "  <text x=\"" << px(fx) << "\" y=\"" << kTop + plot_h + 20
           << "\" text-anchor=\"middle\" font-size=\"11\">" << tick_label(fx) << "</text>\n";
        os << "  <line x1=\"" << kLeft - 5 << "\" y1=\"" << py(fy) << "\" x2=\"" << kLeft
           << "\" y2=\"" << py(fy) << "\" stroke=\"black\"/>\n";
        os << "  <text x=\"" << kLeft - 8 << "\" y=\"" << py(fy) + 4
           << "\" text-anchor=\"end\" font-size=\"11\">" << tick_label(fy) << "</text>\n";
    }
    os << "  <text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
       << "\" text-anchor=\"middle\" font-size=\"13\">" << escape_xml(opts.x_label)
       << "</text>\n";
    os << "  <text x=\"18\" y=\"" << kTop + plot_h / 2
       << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
       << kTop + plot_h / 2 << ")\">"
       << escape_xml(opts.log_y ? "log10 " + opts.y_label : opts.y_label) << "</text>\n";

    // curves
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % 6];
        std::ostringstream pts;
        bool open = false;
        auto flush = [&]() {
            if (open) {
                os << "  <polyline fill=\"none\" stroke=\"" << color
                   << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
                pts.str("");
                open = false;
            }
        };
        for (std::size_t i = 0; i < series[s].x.size(); ++i) {
            const double xv = series[s].x[i], yv = series[s].y[i];
            const bool bad =
                !std::isfinite(xv) || !std::isfinite(yv) || (opts.log_y && !(yv > 0.0));
            if (bad) {
                flush();
                continue;
            }
            pts << px(xv) << ',' << py(y_of(yv)) << ' ';
            open = true;
        }
        flush();
        // legend
        const int ly = kTop + 18 + static_cast<int>(s) * 20;
        os << "  <line x1=\"" << kLeft + plot_w + 14 << "\" y1=\"" << ly << "\" x2=\""
           << kLeft + plot_w + 40 << "\" y2=\"" << ly << "\" stroke=\"" << color
           << "\" stroke-width=\"2\"/>\n";
        os << "  <text x=\"" << kLeft + plot_w + 46 << "\" y=\"" << ly + 4
           << "\" font-size=\"12\">" << escape_xml(series[s].label) << "</text>\n";
    }
    os << "</svg>\n";
    if (!os) throw Error("write_svg_chart: write failure on '" + path + "'");
}

void emit_svg(const RunReport& report, const std::string& path, const std::string& title) {
    SvgSeries energy{"energy", {}, {}};
    SvgSeries ynorm{"|Y|_F", {}, {}};
    SvgSeries ham{"H", {}, {}};
    for (const auto& r : report.rows) {
        energy.x.push_back(r.t);
        energy.y.push_back(r.energy);
        ynorm.x.push_back(r.t);
        ynorm.y.push_back(r.y_norm);
        ham.x.push_back(r.t);
        ham.y.push_back(r.hamiltonian);
    }
    std::vector<SvgSeries> series{energy, ynorm};
    for (double v : ham.y)
        if (std::isfinite(v)) {
            series.push_back(ham);
            break;
        }
    write_svg_chart(path, series, {title, "t", "value", false});
}

} // namespace sympdyn::harness
