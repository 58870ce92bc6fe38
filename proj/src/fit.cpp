#include "mfl/fit.hpp"

#include <cmath>
#include <stdexcept>

namespace mfl {

FitResult loglog_fit(const std::vector<std::pair<double, double>>& pts) {
    if (pts.size() < 2) throw std::invalid_argument("loglog_fit: needs at least 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [x, y] : pts) {
        if (!(x > 0.0) || !(y > 0.0)) throw std::invalid_argument("loglog_fit: nonpositive value");
        const double lx = std::log(x), ly = std::log(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = (double)pts.size();
    const double den = n * sxx - sx * sx;
    if (den == 0.0) throw std::invalid_argument("loglog_fit: degenerate abscissae");
    FitResult r;
    r.n = (int)pts.size();
    r.slope = (n * sxy - sx * sy) / den;
    r.intercept = (sy - r.slope * sx) / n;
    double ss = 0.0;
    for (auto& [x, y] : pts) {
        const double e = std::log(y) - (r.intercept + r.slope * std::log(x));
        ss += e * e;
    }
    r.residual = std::sqrt(ss / n);
    return r;
}

FitResult decay_fit(const std::vector<std::pair<double, double>>& t_linf, double t0, double t1,
                    double horizon) {
    if (t1 > horizon) throw std::invalid_argument("decay_fit: window violates wrap-around horizon");
    std::vector<std::pair<double, double>> pts;
    for (auto& p : t_linf)
        if (p.first >= t0 && p.first <= t1) pts.push_back(p);
    if (pts.size() < 8) throw std::invalid_argument("decay_fit: fewer than 8 samples in window");
    return loglog_fit(pts);
}

}  // namespace mfl
