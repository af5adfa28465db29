#pragma once

#include <complex>
#include <cstddef>
#include <optional>

#include "torusflow/measure.hpp"

namespace torusflow {

// Fourier kernel. Angular integrates e^{-itx} (the flow e^{itx} lives in these
// units); Cyclic integrates e^{-2*pi*itx} (the Bernoulli product formula is
// stated in these units). One convention per analysis; never mixed silently.
enum class Convention { Angular, Cyclic };

const char* convention_name(Convention c);

// ---------------------------------------------------------------- decay bound ---

enum class BoundKind { Exact, AnalyticBound, SampledEstimate };

// Certified bound |mu^(t)| <= ceiling + envelope_c / t for all t >= valid_from,
// in the units of `convention`. The ceiling alone also bounds limsup |mu^|.
// valid_from = +inf means only the limsup statement survives (no onset time
// can be certified, e.g. weighted densities under plain Riemann-Lebesgue).
struct DecayBound {
    double ceiling = 0.0;
    BoundKind kind = BoundKind::Exact;
    double valid_from = 0.0;
    double envelope_c = 0.0;
    Convention convention = Convention::Angular;
};

// ----------------------------------------------------------------- evaluation ---

struct CharfnValue {
    std::complex<double> value;
    std::optional<int> truncation_k;  // Bernoulli product factor count
};

// mu^(t) under the given kernel convention. Atomic parts sum exactly,
// uniform/triangular densities use closed forms, piecewise-linear densities
// use the exact per-piece Fourier integral, weighted densities fall back to
// certified quadrature, Bernoulli parts use the cosine product.
std::complex<double> charfn(const Measure& mu, double t, Convention conv);
CharfnValue charfn_detail(const Measure& mu, double t, Convention conv);

// Truncated cosine product for the Bernoulli convolution (Cyclic kernel):
// prod_{k=1..K} cos(2*pi*t*eta^k) with K chosen so the truncation error is
// at most tol. Result clamped to [-1, 1]. k_out receives K when non-null.
double bernoulli_product(double eta, double t, double tol, int* k_out = nullptr);

// Analytic ceiling on limsup |mu^|: atomic parts give their full mass (no
// decay is guaranteed), integrable densities give 0 with a 1/t envelope where
// the shape provides one, Bernoulli(eta) gives max(|cos(pi*eta)|,
// |cos(pi*eta^2)|) valid from t = 1/(2*eta) in Cyclic units. Mixtures add.
DecayBound analytic_decay_bound(const Measure& mu);

// Finite-window proxy for limsup |mu^|: max over a log-spaced grid.
double limsup_estimate(const Measure& mu, double t_lo, double t_hi, std::size_t samples,
                       Convention conv = Convention::Angular);

// ||Phi_t u - u||^2 for the amplitude-weighted measure mu_u:
// 2*||mu_u|| - 2*Re mu_u^(t). Angular by default (flow time units).
double displacement_sq(const Measure& mu_u, double t, Convention conv = Convention::Angular);

// Natural kernel for a measure: Cyclic for a pure Bernoulli, Angular else.
Convention natural_convention(const Measure& mu);

}  // namespace torusflow
