#include "dqbn/report.hpp"

#include <cstdio>
#include <sstream>

#include "dqbn/error.hpp"

namespace dqbn {

namespace {

std::string fmt17(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

std::string fmt2(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.2f", value);
    return buffer;
}

const char* backend_color(Backend backend) {
    switch (backend) {
        case Backend::Classical: return "#4878cf";
        case Backend::QuantumExact: return "#6acc65";
        case Backend::QuantumShots: return "#d65f5f";
        case Backend::QuantumNoisy: return "#b47cc7";
    }
    return "#4878cf";
}

}  // namespace

std::string timeline_csv(const DqbnModel& model, const TimelineResult& result,
                         const std::vector<Backend>& backends) {
    std::ostringstream out;
    out << "step,variable,state,backend,prior,posterior\n";
    for (const StepRecord& record : result.steps) {
        for (const std::string& var : model.tracked) {
            const NodeSpec& node = model.static_net.node(var);
            for (int state = 0; state < node.num_states; ++state) {
                for (Backend b : backends) {
                    const BackendStepRecord& r = record.backends.at(b);
                    out << record.step << ',' << var << ',' << node.state_label(state)
                        << ',' << backend_name(b) << ','
                        << fmt17(r.prior.at(var)[static_cast<std::size_t>(state)]) << ','
                        << fmt17(r.posterior.at(var)[static_cast<std::size_t>(state)])
                        << '\n';
                }
            }
        }
    }
    for (Backend b : backends) {
        if (b == Backend::Classical) continue;
        for (const std::string& var : model.tracked) {
            out << "# rms_percent," << backend_name(b) << ',' << var << ','
                << fmt17(result.rms.at(b).at(var)) << '\n';
        }
    }
    return out.str();
}

std::string timeline_svg(const DqbnModel& model, const TimelineResult& result,
                         const std::vector<Backend>& backends) {
    if (backends.empty()) {
        throw Error(ErrorCategory::Usage, "no backends requested for the chart");
    }
    const int steps = static_cast<int>(result.steps.size());
    const int bars_per_group = static_cast<int>(backends.size()) * 2;
    const int bar_w = 9;
    const int group_pad = 14;
    const int group_w = bars_per_group * bar_w + group_pad;
    const int margin_left = 46;
    const int margin_right = 16;
    const int plot_h = 150;
    const int panel_header = 26;
    const int panel_footer = 44;
    const int panel_h = panel_header + plot_h + panel_footer;
    const int plot_w = steps * group_w;
    const int width = margin_left + plot_w + margin_right;
    const int height = panel_h * static_cast<int>(model.tracked.size()) + 10;

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "  <rect width=\"" << width << "\" height=\"" << height
        << "\" fill=\"#ffffff\"/>\n";

    int panel_top = 5;
    for (const std::string& var : model.tracked) {
        const NodeSpec& node = model.static_net.node(var);
        const int plot_top = panel_top + panel_header;
        const int plot_bottom = plot_top + plot_h;

        out << "  <text x=\"" << margin_left << "\" y=\"" << panel_top + 16
            << "\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#222222\">" << var
            << ": P(" << node.state_label(0)
            << ") prior (light) and posterior per backend</text>\n";

        // Axis and horizontal guides at 0, 0.5, 1.
        for (int tick = 0; tick <= 2; ++tick) {
            double frac = tick / 2.0;
            double y = plot_bottom - frac * plot_h;
            out << "  <line x1=\"" << margin_left << "\" y1=\"" << fmt2(y) << "\" x2=\""
                << margin_left + plot_w << "\" y2=\"" << fmt2(y)
                << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
            out << "  <text x=\"" << margin_left - 6 << "\" y=\"" << fmt2(y + 4)
                << "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#555555\" "
                   "text-anchor=\"end\">"
                << fmt2(frac) << "</text>\n";
        }

        for (int s = 0; s < steps; ++s) {
            const StepRecord& record = result.steps[static_cast<std::size_t>(s)];
            int group_x = margin_left + s * group_w + group_pad / 2;
            int bar = 0;
            for (Backend b : backends) {
                const BackendStepRecord& r = record.backends.at(b);
                double prior = r.prior.at(var)[0];
                double posterior = r.posterior.at(var)[0];
                int x_prior = group_x + bar * bar_w;
                int x_post = group_x + (bar + 1) * bar_w;
                out << "  <rect x=\"" << x_prior << "\" y=\""
                    << fmt2(plot_bottom - prior * plot_h) << "\" width=\"" << bar_w - 2
                    << "\" height=\"" << fmt2(prior * plot_h) << "\" fill=\""
                    << backend_color(b) << "\" fill-opacity=\"0.45\"/>\n";
                out << "  <rect x=\"" << x_post << "\" y=\""
                    << fmt2(plot_bottom - posterior * plot_h) << "\" width=\"" << bar_w - 2
                    << "\" height=\"" << fmt2(posterior * plot_h) << "\" fill=\""
                    << backend_color(b) << "\"/>\n";
                bar += 2;
            }
            out << "  <text x=\"" << group_x + bars_per_group * bar_w / 2 << "\" y=\""
                << plot_bottom + 14
                << "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#555555\" "
                   "text-anchor=\"middle\">t=" << record.step << "</text>\n";
        }

        // Legend under the step labels.
        int legend_x = margin_left;
        int legend_y = plot_bottom + 30;
        for (Backend b : backends) {
            out << "  <rect x=\"" << legend_x << "\" y=\"" << legend_y - 9
                << "\" width=\"10\" height=\"10\" fill=\"" << backend_color(b) << "\"/>\n";
            out << "  <text x=\"" << legend_x + 14 << "\" y=\"" << legend_y
                << "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#222222\">"
                << backend_name(b) << "</text>\n";
            legend_x += 14 + 7 * static_cast<int>(backend_name(b).size()) + 16;
        }
        panel_top += panel_h;
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace dqbn
