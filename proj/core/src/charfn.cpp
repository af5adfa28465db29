#include "torusflow/charfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "torusflow/numerics.hpp"
#include "torusflow/parallel.hpp"

namespace torusflow {

const char* convention_name(Convention c) {
    return c == Convention::Angular ? "angular" : "cyclic";
}

Convention natural_convention(const Measure& mu) {
    return mu.is_single_bernoulli() ? Convention::Cyclic : Convention::Angular;
}

namespace {

using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};

// exact Fourier integral of a linear density piece: int_{x0}^{x1} (a+b*x) e^{-itx} dx
cplx fourier_linear_piece(double a, double b, double x0, double x1, double t) {
    if (std::abs(t) * (x1 - x0) < 0.5 || std::abs(t) < 1e-12) {
        auto f = [a, b, t](double x) { return (a + b * x) * std::exp(-kI * (t * x)); };
        return gl32_panel(f, x0, x1);
    }
    auto g = [a, b, t](double x) {
        return cplx{b / (t * t), (a + b * x) / t};
    };
    return std::exp(-kI * (t * x1)) * g(x1) - std::exp(-kI * (t * x0)) * g(x0);
}

cplx charfn_atomic(const AtomicMeasure& m, double t) {
    cplx acc = 0.0;
    for (const auto& atom : m.atoms) {
        acc += atom.weight * std::exp(-kI * (t * atom.location));
    }
    return acc;
}

cplx charfn_density(const DensityMeasure& d, double t) {
    if (!d.is_weighted()) {
        switch (d.shape) {
            case DensityShape::Uniform: {
                double c = 0.5 * (d.lo + d.hi), h = 0.5 * (d.hi - d.lo);
                return d.mass * std::exp(-kI * (t * c)) * sinc(t * h);
            }
            case DensityShape::Triangular: {
                double c = 0.5 * (d.lo + d.hi), h = 0.5 * (d.hi - d.lo);
                double s = sinc(0.5 * t * h);
                return d.mass * std::exp(-kI * (t * c)) * (s * s);
            }
            case DensityShape::PiecewiseLinear: {
                cplx acc = 0.0;
                for (std::size_t i = 0; i + 1 < d.nodes.size(); ++i) {
                    double x0 = d.nodes[i], x1 = d.nodes[i + 1];
                    double b = (d.values[i + 1] - d.values[i]) / (x1 - x0);
                    double a = d.values[i] - b * x0;
                    acc += fourier_linear_piece(a, b, x0, x1, t);
                }
                return acc;
            }
        }
    }
    // weighted shapes go through certified quadrature
    auto f = [&d, t](double x) { return d.effective_density_at(x) * std::exp(-kI * (t * x)); };
    int panels = static_cast<int>(std::abs(t) * (d.hi - d.lo) / 25.0) + 4;
    return integrate_adaptive(f, d.lo, d.hi, 1e-10, panels, 40000).value;
}

}  // namespace

double bernoulli_product(double eta, double t, double tol, int* k_out) {
    if (!(eta > 0.0 && eta < 1.0)) {
        throw MeasureError("bernoulli_product: eta must lie in (0,1)");
    }
    if (!(tol > 0.0)) throw MeasureError("bernoulli_product: tol must be > 0");
    if (t == 0.0) {
        if (k_out) *k_out = 0;
        return 1.0;
    }
    // truncation: |prod - prod_K| <= sum_{k>K} (2*pi*|t|*eta^k)^2 / 2
    //                              = (2*pi*t)^2 * eta^(2K+2) / (2*(1-eta^2))
    double w = kTwoPi * std::abs(t);
    double rhs = 2.0 * tol * (1.0 - eta * eta) / (w * w);
    int k_trunc = 0;
    if (rhs < 1.0) {
        k_trunc = static_cast<int>(std::ceil(std::log(rhs) / (2.0 * std::log(eta)) - 1.0));
        k_trunc = std::max(k_trunc, 0);
    }
    if (k_trunc > 2'000'000) {
        throw MeasureError("bernoulli_product: truncation depth out of range");
    }
    double prod = 1.0;
    double p = 1.0;
    for (int k = 1; k <= k_trunc; ++k) {
        p *= eta;
        prod *= std::cos(w * p);
        if (prod == 0.0) break;
    }
    if (k_out) *k_out = k_trunc;
    return std::clamp(prod, -1.0, 1.0);
}

CharfnValue charfn_detail(const Measure& mu, double t, Convention conv) {
    CharfnValue out;
    cplx acc = 0.0;
    double t_ang = (conv == Convention::Cyclic) ? kTwoPi * t : t;
    double t_cyc = (conv == Convention::Cyclic) ? t : t / kTwoPi;
    for (const auto& term : mu.terms()) {
        std::visit(
            [&](const auto& comp) {
                using T = std::decay_t<decltype(comp)>;
                if constexpr (std::is_same_v<T, AtomicMeasure>) {
                    acc += term.coefficient * charfn_atomic(comp, t_ang);
                } else if constexpr (std::is_same_v<T, DensityMeasure>) {
                    acc += term.coefficient * charfn_density(comp, t_ang);
                } else {
                    int k = 0;
                    acc += term.coefficient * bernoulli_product(comp.eta, t_cyc, 1e-12, &k);
                    out.truncation_k = k;
                }
            },
            term.component);
    }
    if (mu.terms().size() != 1) out.truncation_k.reset();
    out.value = acc;
    return out;
}

std::complex<double> charfn(const Measure& mu, double t, Convention conv) {
    return charfn_detail(mu, t, conv).value;
}

DecayBound analytic_decay_bound(const Measure& mu) {
    DecayBound out;
    out.convention = Convention::Angular;
    bool all_atomic = true;
    bool any_sampled = false;
    for (const auto& term : mu.terms()) {
        double c = term.coefficient;
        std::visit(
            [&](const auto& comp) {
                using T = std::decay_t<decltype(comp)>;
                if constexpr (std::is_same_v<T, AtomicMeasure>) {
                    // a point measure may keep |mu^| arbitrarily close to ||mu||
                    out.ceiling += c * (comp.listed_mass() + comp.tail_mass_bound);
                } else if constexpr (std::is_same_v<T, DensityMeasure>) {
                    all_atomic = false;
                    if (!comp.is_weighted()) {
                        switch (comp.shape) {
                            case DensityShape::Uniform: {
                                double h = 0.5 * (comp.hi - comp.lo);
                                out.envelope_c += c * comp.mass / h;
                                break;
                            }
                            case DensityShape::Triangular: {
                                // sinc^2(th/2) <= (2/(th))^2 <= (4/h^2)/t for t >= 1
                                double h = 0.5 * (comp.hi - comp.lo);
                                out.envelope_c += c * comp.mass * 4.0 / (h * h);
                                out.valid_from = std::max(out.valid_from, 1.0);
                                break;
                            }
                            case DensityShape::PiecewiseLinear: {
                                // integration by parts: (rho(lo)+rho(hi)+TV(rho))/t
                                double tv = 0.0;
                                for (std::size_t i = 0; i + 1 < comp.values.size(); ++i) {
                                    tv += std::abs(comp.values[i + 1] - comp.values[i]);
                                }
                                out.envelope_c +=
                                    c * (comp.values.front() + comp.values.back() + tv);
                                break;
                            }
                        }
                    } else {
                        // Riemann-Lebesgue only: no onset time is certified
                        out.valid_from = std::numeric_limits<double>::infinity();
                    }
                } else {
                    all_atomic = false;
                    double ceil_b = std::max(std::abs(std::cos(kPi * comp.eta)),
                                             std::abs(std::cos(kPi * comp.eta * comp.eta)));
                    out.ceiling += c * ceil_b;
                    // cyclic onset 1/(2*eta)  ->  angular onset pi/eta
                    out.valid_from = std::max(out.valid_from, kPi / comp.eta);
                }
            },
            term.component);
    }
    out.kind = any_sampled                ? BoundKind::SampledEstimate
               : all_atomic              ? BoundKind::Exact
                                         : BoundKind::AnalyticBound;
    if (mu.is_single_bernoulli()) {
        out.convention = Convention::Cyclic;
        out.valid_from /= kTwoPi;
        out.envelope_c /= kTwoPi;
    }
    return out;
}

double limsup_estimate(const Measure& mu, double t_lo, double t_hi, std::size_t samples,
                       Convention conv) {
    if (!(0.0 < t_lo && t_lo < t_hi)) {
        throw MeasureError("limsup_estimate: need 0 < t_lo < t_hi");
    }
    if (samples < 2) throw MeasureError("limsup_estimate: need samples >= 2");
    auto grid = log_spaced(t_lo, t_hi, samples);
    std::vector<double> vals(grid.size());
    parallel_for(grid.size(),
                 [&](std::size_t i) { vals[i] = std::abs(charfn(mu, grid[i], conv)); });
    return *std::max_element(vals.begin(), vals.end());
}

double displacement_sq(const Measure& mu_u, double t, Convention conv) {
    double tv = total_variation(mu_u);
    double d = 2.0 * tv - 2.0 * charfn(mu_u, t, conv).real();
    return std::clamp(d, 0.0, 4.0 * tv);
}

}  // namespace torusflow
