#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace torusflow {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// sin(x)/x with the removable singularity handled by series.
double sinc(double x);

// Reduce an angle to [0, 2*pi). fmod is exact, so the result is a faithful
// representative of x mod 2*pi.
double wrap_angle(double x);

// ------------------------------------------------------------ quadrature ---

// Nodes/weights of the 32-point Gauss-Legendre rule on [-1, 1].
// Computed once by Newton iteration on the Legendre polynomial.
struct GaussLegendre32 {
    static const GaussLegendre32& instance();
    double nodes[32];
    double weights[32];

  private:
    GaussLegendre32();
};

// One 32-node panel of f over [a, b].
std::complex<double> gl32_panel(const std::function<std::complex<double>(double)>& f,
                                double a, double b);
double gl32_panel_real(const std::function<double(double)>& f, double a, double b);

struct QuadratureResult {
    std::complex<double> value;
    double error_estimate;
    int panels;
};

// Composite Gauss-Legendre with bisection refinement: panels are split until
// the estimated error drops below abs_tol. initial_panels seeds the partition
// (callers bump it for oscillatory integrands). Throws QuadratureError if the
// panel budget is exhausted first.
QuadratureResult integrate_adaptive(const std::function<std::complex<double>(double)>& f,
                                    double a, double b, double abs_tol,
                                    int initial_panels = 4, int max_panels = 20000);

double integrate_adaptive_real(const std::function<double(double)>& f,
                               double a, double b, double abs_tol,
                               int initial_panels = 4, int max_panels = 20000);

// ----------------------------------------------------------------- grids ---

// n logarithmically spaced points in [lo, hi], endpoints included.
// Grids with n' = 2n-1 nest the grid with n samples.
std::vector<double> log_spaced(double lo, double hi, std::size_t n);

// ------------------------------------------------------------------ hash ---

// FNV-1a, used to stamp output files with the scenario they came from.
std::uint64_t fnv1a(std::string_view bytes);
std::string fnv1a_hex(std::string_view bytes);

// Fixed-format float for byte-stable CSV/JSON output ("%.17g").
std::string format_double(double x);

}  // namespace torusflow
