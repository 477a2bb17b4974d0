#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace wilsontf {

struct LineFit {
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
    std::size_t points = 0;
};

// Ordinary least squares y = slope*x + intercept.
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("line fit needs at least two points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.points = x.size();
    if (sxx == 0) throw std::invalid_argument("line fit needs distinct abscissae");
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double e = y[i] - (f.slope * x[i] + f.intercept);
        sse += e * e;
    }
    f.r2 = syy > 0 ? std::max(0.0, 1 - sse / syy) : 1.0;
    return f;
}

struct EnvelopePoint {
    double r;
    double value;
};

// Decreasing record envelope: keeps a point when its value is at least as large
// as every value at larger radius. Scans from the outer edge of the full set, so
// restricting to a window afterwards does not pick up falling edges of humps.
inline std::vector<EnvelopePoint> record_envelope(std::vector<EnvelopePoint> pts) {
    std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.r > b.r; });
    std::vector<EnvelopePoint> kept;
    double run = -1;
    for (const auto& p : pts) {
        if (p.value >= run) {
            run = p.value;
            kept.push_back(p);
        }
    }
    std::reverse(kept.begin(), kept.end());
    return kept;
}

}  // namespace wilsontf
