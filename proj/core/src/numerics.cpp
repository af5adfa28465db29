#include "torusflow/numerics.hpp"

#include <algorithm>
#include <cstdio>
#include <queue>

#include "torusflow/errors.hpp"

namespace torusflow {

double sinc(double x) {
    if (std::abs(x) < 1e-4) {
        double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

double wrap_angle(double x) {
    double r = std::fmod(x, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    // fmod can land exactly on 2*pi after the correction when x is a tiny
    // negative multiple; keep the representative in [0, 2*pi).
    if (r >= kTwoPi) r = 0.0;
    return r;
}

// ------------------------------------------------------------ quadrature ---

const GaussLegendre32& GaussLegendre32::instance() {
    static GaussLegendre32 rule;
    return rule;
}

GaussLegendre32::GaussLegendre32() {
    // Roots of P_32 by Newton iteration from the Chebyshev initial guess.
    constexpr int n = 32;
    for (int i = 0; i < n / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

std::complex<double> gl32_panel(const std::function<std::complex<double>(double)>& f,
                                double a, double b) {
    const auto& rule = GaussLegendre32::instance();
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    std::complex<double> acc = 0.0;
    for (int i = 0; i < 32; ++i) acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return acc * half;
}

double gl32_panel_real(const std::function<double(double)>& f, double a, double b) {
    const auto& rule = GaussLegendre32::instance();
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 32; ++i) acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return acc * half;
}

namespace {

struct Panel {
    double a, b;
    std::complex<double> whole;
    std::complex<double> halves;
    double err;
};

Panel make_panel(const std::function<std::complex<double>(double)>& f, double a, double b) {
    Panel p;
    p.a = a;
    p.b = b;
    p.whole = gl32_panel(f, a, b);
    double m = 0.5 * (a + b);
    p.halves = gl32_panel(f, a, m) + gl32_panel(f, m, b);
    p.err = std::abs(p.whole - p.halves);
    return p;
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<std::complex<double>(double)>& f,
                                    double a, double b, double abs_tol,
                                    int initial_panels, int max_panels) {
    if (!(b > a)) return {0.0, 0.0, 0};
    initial_panels = std::clamp(initial_panels, 1, max_panels);

    auto cmp = [](const Panel& x, const Panel& y) { return x.err < y.err; };
    std::priority_queue<Panel, std::vector<Panel>, decltype(cmp)> queue(cmp);

    double total_err = 0.0;
    int count = 0;
    for (int i = 0; i < initial_panels; ++i) {
        double lo = a + (b - a) * i / initial_panels;
        double hi = a + (b - a) * (i + 1) / initial_panels;
        Panel p = make_panel(f, lo, hi);
        total_err += p.err;
        queue.push(p);
        ++count;
    }

    while (total_err > abs_tol) {
        if (count >= max_panels) {
            throw QuadratureError("adaptive quadrature: panel budget exhausted", total_err);
        }
        Panel worst = queue.top();
        queue.pop();
        total_err -= worst.err;
        double m = 0.5 * (worst.a + worst.b);
        if (!(m > worst.a && m < worst.b)) {
            // interval no longer splittable; accept its estimate
            queue.push(worst);
            total_err += worst.err;
            if (total_err > abs_tol)
                throw QuadratureError("adaptive quadrature: interval exhausted", total_err);
            break;
        }
        Panel left = make_panel(f, worst.a, m);
        Panel right = make_panel(f, m, worst.b);
        total_err += left.err + right.err;
        queue.push(left);
        queue.push(right);
        ++count;
    }

    std::complex<double> value = 0.0;
    // drain in deterministic order: collect and sort by left endpoint
    std::vector<Panel> panels;
    panels.reserve(queue.size());
    while (!queue.empty()) {
        panels.push_back(queue.top());
        queue.pop();
    }
    std::sort(panels.begin(), panels.end(),
              [](const Panel& x, const Panel& y) { return x.a < y.a; });
    for (const auto& p : panels) value += p.halves;
    return {value, total_err, count};
}

double integrate_adaptive_real(const std::function<double(double)>& f,
                               double a, double b, double abs_tol,
                               int initial_panels, int max_panels) {
    auto fc = [&f](double x) { return std::complex<double>(f(x), 0.0); };
    return integrate_adaptive(fc, a, b, abs_tol, initial_panels, max_panels).value.real();
}

// ----------------------------------------------------------------- grids ---

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
    std::vector<double> out;
    out.reserve(n);
    if (n == 1) {
        out.push_back(lo);
        return out;
    }
    double llo = std::log(lo), lhi = std::log(hi);
    for (std::size_t i = 0; i < n; ++i) {
        double e = llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(n - 1);
        out.push_back(std::exp(e));
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

// ------------------------------------------------------------------ hash ---

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string fnv1a_hex(std::string_view bytes) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(bytes)));
    return buf;
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace torusflow
