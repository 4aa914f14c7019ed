#pragma once

#include <string>
#include <vector>

namespace netsense {

struct Series {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
};

struct Panel {
    std::string y_label;
    bool log_y = false;
    std::vector<Series> series;
};

/// Stacked panels sharing a logarithmic x axis. Output contains no timestamps.
[[nodiscard]] std::string render_svg(const std::string& title, const std::string& x_label,
                                     const std::vector<Panel>& panels);

}  // namespace netsense
