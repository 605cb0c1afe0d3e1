#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cosim/metrics.hpp"

namespace cosim {

/// Mean (d_robustness, d_recovery) movement of one intervention arm relative
/// to control, aggregated over seeds of one community.
struct ArmMovement {
    std::string community_id;
    std::string arm;
    double d_robustness = 0.0;
    double d_recovery = 0.0;
    size_t runs = 0;
};

inline nlohmann::ordered_json resilience_map_to_json(const ResilienceMap& map) {
    nlohmann::ordered_json j;
    j["robustness_median"] = map.robustness_median;
    j["recovery_median"] = map.recovery_median;
    j["degenerate_robustness"] = map.degenerate_robustness;
    j["degenerate_recovery"] = map.degenerate_recovery;
    j["ranking"] = nlohmann::ordered_json::array();
    for (const auto& e : map.ranking) {
        j["ranking"].push_back({{"rank", e.rank},
                                {"community", e.community_id},
                                {"robustness", e.robustness},
                                {"recovery", e.recovery},
                                {"composite", e.composite}});
    }
    return j;
}

/// Scatter of communities in the robustness-recovery plane with dashed
/// median-split lines. Plain SVG emission, no plotting dependency.
inline std::string resilience_map_svg(const ResilienceMap& map, int width = 640, int height = 480) {
    double rob_lo = map.ranking.front().robustness, rob_hi = rob_lo;
    double rec_lo = map.ranking.front().recovery, rec_hi = rec_lo;
    for (const auto& e : map.ranking) {
        rob_lo = std::min(rob_lo, e.robustness);
        rob_hi = std::max(rob_hi, e.robustness);
        rec_lo = std::min(rec_lo, e.recovery);
        rec_hi = std::max(rec_hi, e.recovery);
    }
    // pad the data box so edge points stay visible
    const double rob_pad = std::max(1.0, 0.08 * (rob_hi - rob_lo));
    const double rec_pad = std::max(1.0, 0.08 * (rec_hi - rec_lo));
    rob_lo -= rob_pad;
    rob_hi += rob_pad;
    rec_lo -= rec_pad;
    rec_hi += rec_pad;

    const double margin = 48.0;
    const double plot_w = width - 2 * margin;
    const double plot_h = height - 2 * margin;
    auto sx = [&](double rob) { return margin + (rob - rob_lo) / (rob_hi - rob_lo) * plot_w; };
    auto sy = [&](double rec) { return height - margin - (rec - rec_lo) / (rec_hi - rec_lo) * plot_h; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#444\"/>\n";
    // median splits
    svg << "<line x1=\"" << sx(map.robustness_median) << "\" y1=\"" << margin << "\" x2=\""
        << sx(map.robustness_median) << "\" y2=\"" << height - margin
        << "\" stroke=\"#999\" stroke-dasharray=\"6 4\"/>\n";
    svg << "<line x1=\"" << margin << "\" y1=\"" << sy(map.recovery_median) << "\" x2=\""
        << width - margin << "\" y2=\"" << sy(map.recovery_median)
        << "\" stroke=\"#999\" stroke-dasharray=\"6 4\"/>\n";
    // points and labels
    for (const auto& e : map.ranking) {
        const double x = sx(e.robustness);
        const double y = sy(e.recovery);
        const bool extreme = e.rank == 1 || e.rank == static_cast<int>(map.ranking.size());
        svg << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"" << (extreme ? 6 : 4)
            << "\" fill=\"" << (extreme ? "#d62728" : "#1f77b4") << "\"/>\n";
        svg << "<text x=\"" << x + 7 << "\" y=\"" << y + 4
            << "\" font-size=\"11\" font-family=\"sans-serif\">" << e.community_id << "</text>\n";
    }
    svg << "<text x=\"" << width / 2 << "\" y=\"" << height - 12
        << "\" font-size=\"13\" font-family=\"sans-serif\" text-anchor=\"middle\">robustness</text>\n";
    svg << "<text x=\"16\" y=\"" << height / 2
        << "\" font-size=\"13\" font-family=\"sans-serif\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << height / 2 << ")\">recovery</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace cosim
