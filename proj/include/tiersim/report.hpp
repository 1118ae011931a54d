#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "tiersim/errors.hpp"
#include "tiersim/format.hpp"
#include "tiersim/metrics.hpp"

namespace tiersim {

inline std::string to_csv(const std::vector<RunSummary>& rows) {
    std::string out = "pool,scheduler,instances,makespan_s,mean_utilization\n";
    for (const RunSummary& r : rows) {
        out += r.pool_label + ',' + r.scheduler + ',' + std::to_string(r.instances) + ',' +
               format_double(r.makespan_s) + ',' + format_double(r.mean_utilization) + '\n';
    }
    return out;
}

namespace detail {

inline std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
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

// One axis label per bar: whichever of pool / scheduler varies across the
// table (both, joined, when both vary).
inline std::string bar_label(const RunSummary& r, bool pools_vary, bool schedulers_vary) {
    if (pools_vary && schedulers_vary) return r.pool_label + "/" + r.scheduler;
    if (schedulers_vary) return r.scheduler;
    return r.pool_label;
}

} // namespace detail

// Static bar chart of makespans, one bar per row, linear scale. The printed
// bar values are the same strings the CSV carries, so the two always agree.
inline std::string to_svg(const std::vector<RunSummary>& rows, const std::string& title) {
    if (rows.empty()) throw ValidationError("cannot chart an empty result table");

    const int bar_w = 46, gap = 28, left = 70, right = 30, top = 56, bottom = 96;
    const int plot_h = 260;
    const int n = static_cast<int>(rows.size());
    const int width = left + n * (bar_w + gap) + right;
    const int height = top + plot_h + bottom;

    double max_v = 0.0;
    bool pools_vary = false, schedulers_vary = false;
    for (const RunSummary& r : rows) {
        max_v = std::max(max_v, r.makespan_s);
        pools_vary = pools_vary || r.pool_label != rows.front().pool_label;
        schedulers_vary = schedulers_vary || r.scheduler != rows.front().scheduler;
    }
    if (!(max_v > 0)) throw ValidationError("cannot chart non-positive makespans");

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\" font-family=\"monospace\">\n";
    svg += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "  <text x=\"" + std::to_string(width / 2) + "\" y=\"28\" font-size=\"15\" " +
           "text-anchor=\"middle\">" + detail::xml_escape(title) + "</text>\n";
    svg += "  <text x=\"18\" y=\"" + std::to_string(top + plot_h / 2) +
           "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
           std::to_string(top + plot_h / 2) + ")\">makespan (s)</text>\n";

    const int baseline = top + plot_h;
    svg += "  <line x1=\"" + std::to_string(left - 8) + "\" y1=\"" + std::to_string(baseline) +
           "\" x2=\"" + std::to_string(width - right) + "\" y2=\"" + std::to_string(baseline) +
           "\" stroke=\"black\"/>\n";

    for (int i = 0; i < n; ++i) {
        const RunSummary& r = rows[i];
        int h = static_cast<int>(std::max(1.0, r.makespan_s / max_v * plot_h));
        int x = left + i * (bar_w + gap);
        int y = baseline - h;
        int cx = x + bar_w / 2;
        svg += "  <rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) +
               "\" width=\"" + std::to_string(bar_w) + "\" height=\"" + std::to_string(h) +
               "\" fill=\"#4878a8\"/>\n";
        svg += "  <text x=\"" + std::to_string(cx) + "\" y=\"" + std::to_string(y - 6) +
               "\" font-size=\"11\" text-anchor=\"middle\">" + format_double(r.makespan_s) +
               "</text>\n";
        std::string label = detail::bar_label(r, pools_vary, schedulers_vary);
        svg += "  <text x=\"" + std::to_string(cx) + "\" y=\"" + std::to_string(baseline + 14) +
               "\" font-size=\"11\" text-anchor=\"end\" transform=\"rotate(-35 " +
               std::to_string(cx) + " " + std::to_string(baseline + 14) + ")\">" +
               detail::xml_escape(label) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << content;
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

// Emits whichever outputs have paths set; empty paths are skipped.
inline void emit_outputs(const std::vector<RunSummary>& rows, const std::string& csv_path,
                         const std::string& svg_path, const std::string& title) {
    if (rows.empty()) throw ValidationError("empty result table");
    if (!csv_path.empty()) write_file(csv_path, to_csv(rows));
    if (!svg_path.empty()) write_file(svg_path, to_svg(rows, title));
}

} // namespace tiersim
