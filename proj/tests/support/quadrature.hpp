#pragma once

#include <cmath>
#include <functional>

// Independent numerical oracles for the distribution code under test. Only
// tests include this header; the library must not depend on it.
namespace testoracle {

inline double simpson_rule(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double fa, double fm, double fb,
                               double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson_rule(a, m, fa, flm, fm);
    const double right = simpson_rule(m, b, fm, frm, fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) < 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-13) {
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = simpson_rule(a, b, fa, fm, fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

inline double t_density(double x, int df) {
    const double v = static_cast<double>(df);
    const double log_norm = std::lgamma(0.5 * (v + 1.0)) - std::lgamma(0.5 * v) -
                            0.5 * std::log(v * M_PI);
    return std::exp(log_norm - 0.5 * (v + 1.0) * std::log1p(x * x / v));
}

// Student-t CDF by quadrature of the density from 0 to t.
inline double t_cdf(double t, int df) {
    if (t == 0.0) return 0.5;
    const double tail = integrate([df](double x) { return t_density(x, df); }, 0.0,
                                  std::abs(t));
    return t > 0.0 ? 0.5 + tail : 0.5 - tail;
}

}  // namespace testoracle
