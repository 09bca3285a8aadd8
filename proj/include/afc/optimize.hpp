#pragma once

#include <cmath>
#include <utility>

namespace afc {

// Golden-section search for the maximum of a unimodal function on [lo, hi].
// Returns {argmax, max}; the bracket shrinks below xtol.
template <typename F>
std::pair<double, double> golden_section_maximize(F&& f, double lo, double hi, double xtol = 1e-6,
                                                  int max_iter = 400) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < max_iter && (b - a) > xtol; ++i) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    double x = 0.5 * (a + b);
    return {x, f(x)};
}

// Vertex of the parabola through three samples around a discrete argmax.
// Falls back to the middle point when the points do not bend downward.
inline double parabolic_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
    double d1 = (y1 - y0) / (x1 - x0);
    double d2 = (y2 - y1) / (x2 - x1);
    double curv = (d2 - d1) / (x2 - x0);
    if (curv >= 0.0) return x1;
    return 0.5 * (x0 + x1) - 0.5 * d1 / curv;
}

} // namespace afc
