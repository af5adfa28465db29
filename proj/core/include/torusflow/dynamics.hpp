#pragma once

#include <optional>
#include <string>
#include <vector>

#include "torusflow/charfn.hpp"
#include "torusflow/flow.hpp"
#include "torusflow/measure.hpp"

namespace torusflow {

// -------------------------------------------------------- wandering certificate ---

// Certifies (delta, T): the flow displaces every torus point by more than
// delta for all |t| > T, so every point is wandering. Time units follow
// `convention` (Cyclic for pure Bernoulli measures, Angular otherwise).
struct WanderingCertificate {
    double delta = 0.0;
    double T = 0.0;
    enum class Basis { AnalyticBound, SampledEstimate } basis = Basis::AnalyticBound;
    double ceiling = 0.0;          // the limsup bound the certificate rests on
    double window_lo = 0.0;        // sampling window (SampledEstimate only)
    double window_hi = 0.0;
    std::size_t samples = 0;
    Convention convention = Convention::Angular;
    std::string measure_id;
};

struct WanderingOptions {
    double window_lo = 1.0;  // sampling window used when no analytic bound applies
    double window_hi = 1e4;
    std::size_t samples = 4096;
    std::string measure_id;
};

// Certificate delta = sqrt(||mu_u|| - L) from a decay ceiling L on |mu_u^|.
// Returns nullopt when the condition fails; pure point measures always fail
// (their ceiling is the full mass).
std::optional<WanderingCertificate> wandering_certificate(const Measure& mu_u, double margin,
                                                          const WanderingOptions& opts = {});

// ----------------------------------------------------------------- recurrence ---

struct RecurrenceReport {
    double epsilon = 0.0;
    double t_min = 0.0;
    double scan_horizon = 0.0;
    double scan_step = 0.0;
    struct Return {
        double t;
        double distance;
    };
    std::vector<Return> return_times;
    enum class Verdict { ReturnsFound, NoneFoundWithinHorizon } verdict =
        Verdict::NoneFoundWithinHorizon;
    double tail_distance_allowance = 0.0;
};

// Deterministic grid scan of t -> distance(Phi_t u, u) on [t_min, t_max] with
// step at most pi/(4 * max lambda), plus golden-section refinement around
// candidate grid minima. Requires the torus tail to satisfy the eps^2/8 rule.
RecurrenceReport recurrence_search(const CountableState& state, double epsilon, double t_min,
                                   double t_max);
// as above, after checking that the spec resolves to the state's frequencies
RecurrenceReport recurrence_search(const CountableState& state, const FrequencySpec& spec,
                                   double epsilon, double t_min, double t_max);

// ------------------------------------------------------------------- taxonomy ---

// Type I: periodic. Type II: some pair of frequencies has irrational ratio,
// so the pair's 4-dimensional projection is dense. Type III: commensurate at
// every prefix yet the prefix periods diverge (no common period survives).
struct TrajectoryClass {
    enum class Kind { TypeI, TypeII, TypeIII } kind = Kind::TypeI;
    enum class Confidence { Exact, HeightBounded } confidence = Confidence::Exact;
    long long height_bound = 0;

    double period = 0.0;                       // Type I
    std::optional<mpq_class> lambda0;          // Type I, exact inputs
    std::optional<std::pair<std::size_t, std::size_t>> dense_pair;  // Type II
    std::vector<std::size_t> prefixes;         // prefixes examined
    std::vector<double> prefix_periods;        // Type III: strictly increasing
    std::vector<mpq_class> prefix_lambda0;     // Type III, exact inputs
};

TrajectoryClass classify_trajectory(const FrequencySpec& freqs,
                                    const std::vector<std::size_t>& prefixes,
                                    const CountableTorus& torus);

// ------------------------------------------------------------------ Weyl test ---

// Box-count discrepancy of the orbit sampling (lambda_i t mod 2pi)/2pi at
// t = j*Delta with Delta a golden-ratio multiple of the fastest mode's period:
// total-variation distance between the empirical bins^d cell histogram and
// the uniform distribution. Near 0 for equidistributed orbits; bounded away
// from 0 for resonant ones.
double weyl_discrepancy(const std::vector<double>& freqs, std::size_t samples,
                        std::size_t bins);

// ----------------------------------------------------------- sigma condition ---

struct SigmaScanReport {
    bool holds_on_family = false;
    std::optional<BorelSet::Cell> failing_cell;
    double failing_sup = 0.0;
    double failing_mass = 0.0;
    std::size_t cells_tested = 0;
    std::size_t cells_skipped = 0;  // zero restricted mass
    double sigma = 0.0;
    int dyadic_depth = 0;
    double window_lo = 0.0, window_hi = 0.0;
    std::size_t samples = 0;
    // verdicts only speak for the tested family at the tested window
    std::string label = "on tested family";
};

// For every dyadic subinterval A of the support hull with depth <= dyadic_depth
// and nonzero restricted mass, check the sampled sup of |(mu|_A)^| against
// (1 - sigma) * ||mu|_A||.
SigmaScanReport sigma_condition_scan(const Measure& mu, int dyadic_depth, double sigma,
                                     double window_lo, double window_hi,
                                     std::size_t samples);

// ------------------------------------------------- AC non-periodicity check ---

struct NonperiodicityReport {
    double T = 0.0;
    double threshold = 0.0;       // (1/2) * int_Delta r^2 rho
    std::size_t m_max = 0;
    std::size_t m_half_lo = 0;    // "large m" = top half of [1, m_max]
    double min_large_m = 0.0;     // min of D(m) over the top half
    std::size_t argmin_m = 0;
    bool passed = false;
    std::vector<double> displacement;  // D(m) for m = 1..m_max
};

// Evaluates D(m) = int_Delta r(k)^2 |e^{i T lambda(k) m} - 1|^2 rho(k) dk and
// compares the top-half minimum with the threshold; a pass is numerical
// evidence that T is not a period of the flow. lambda must be strictly
// monotone on Delta (derivative of fixed sign at the quadrature nodes).
NonperiodicityReport nonperiodicity_check_ac(const DensityMeasure& rho,
                                             const FrequencySpec& lambda, double delta_lo,
                                             double delta_hi, const AmplitudeProfile& r,
                                             double T, std::size_t m_max);

}  // namespace torusflow
