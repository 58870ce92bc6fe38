#pragma once

#include <utility>
#include <vector>

namespace mfl {

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // rms of log-space residuals
    int n = 0;
};

// least squares on (log x, log y); throws on nonpositive values or < 2 points
FitResult loglog_fit(const std::vector<std::pair<double, double>>& pts);

// slope of log(linf) vs log(t) over t in [t0, t1]; requires >= 8 samples in
// the window and t1 <= horizon (pass infinity to skip the horizon check)
FitResult decay_fit(const std::vector<std::pair<double, double>>& t_linf, double t0, double t1,
                    double horizon);

}  // namespace mfl
