#pragma once

#include <string>
#include <vector>

#include "sympdyn/integrators.hpp"

namespace sympdyn::harness {

// Per-step diagnostics plus a run summary. Wall time lives only in the
// summary (never in the CSV) so identical runs emit byte-identical files.
struct RunReport {
    std::vector<integrators::StepDiagnostics> rows;
    double final_energy = 0.0;
    double min_energy = 0.0;
    long total_oracle_calls = 0;
    double wall_seconds = 0.0;
    std::string status = "ok";

    bool ok() const noexcept { return status == "ok"; }
};

RunReport report_from_trajectory(const integrators::Trajectory& traj);

// Header row then full 17-significant-digit decimals.
void emit_csv(const RunReport& report, const std::string& path);

// Reads rows back (summary recomputed); the round-trip test compares bitwise.
std::vector<integrators::StepDiagnostics> parse_csv(const std::string& path);

bool rows_identical(const std::vector<integrators::StepDiagnostics>& a,
                    const std::vector<integrators::StepDiagnostics>& b);

// Minimal line-chart writer.
struct SvgSeries {
    std::string label;
    std::vector<double> x, y;
};

struct SvgOptions {
    std::string title, x_label, y_label;
    bool log_y = false; // log10 of y; non-positive points are skipped
};

void write_svg_chart(const std::string& path, const std::vector<SvgSeries>& series,
                     const SvgOptions& opts);

// Energy and momentum-norm curves of a run.
void emit_svg(const RunReport& report, const std::string& path, const std::string& title);

} // namespace sympdyn::harness
