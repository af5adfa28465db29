#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "torusflow/errors.hpp"

namespace torusflow {

// ---------------------------------------------------------------- borel sets ---

// Finite union of disjoint half-open intervals [lo, hi), kept sorted.
class BorelSet {
  public:
    struct Cell {
        double lo, hi;  // lo < hi
    };

    BorelSet() = default;
    explicit BorelSet(std::vector<Cell> cells);  // normalizes: sorts, merges, validates
    static BorelSet interval(double lo, double hi);

    const std::vector<Cell>& cells() const { return cells_; }
    bool empty() const { return cells_.empty(); }
    bool contains(double x) const;
    double length() const;

    // Complement relative to [hull_lo, hull_hi).
    BorelSet complement_within(double hull_lo, double hull_hi) const;

  private:
    std::vector<Cell> cells_;
};

// --------------------------------------------------------- amplitude profiles ---

// Nonnegative amplitude r(x); the measure ops integrate its square.
// PiecewiseLinear profiles vanish outside their node range, so they stay
// bounded; Identity is unbounded.
class AmplitudeProfile {
  public:
    static AmplitudeProfile constant(double c);
    static AmplitudeProfile identity();  // r(x) = |x|
    static AmplitudeProfile piecewise_linear(std::vector<double> nodes,
                                             std::vector<double> values);
    static AmplitudeProfile product(std::vector<AmplitudeProfile> factors);

    double operator()(double x) const;
    bool is_constant() const;
    double constant_value() const;  // valid only when is_constant()
    bool is_bounded() const;
    double bound() const;  // sup over the real line; +inf when unbounded

    std::string describe() const;

  private:
    struct Constant {
        double value;
    };
    struct Identity {};
    struct PiecewiseLinear {
        std::vector<double> nodes;
        std::vector<double> values;
    };
    struct Product {
        std::vector<AmplitudeProfile> factors;
    };
    using Node = std::variant<Constant, Identity, PiecewiseLinear, Product>;
    explicit AmplitudeProfile(Node node) : node_(std::move(node)) {}
    Node node_;
};

// ----------------------------------------------------------------- components ---

// Finite point measure. tail_mass_bound is a declared bound on the total
// weight of atoms omitted from the listed prefix; it counts toward the total
// variation but has no known locations.
struct AtomicMeasure {
    struct Atom {
        double location;
        double weight;  // > 0
    };
    std::vector<Atom> atoms;
    double tail_mass_bound = 0.0;

    void validate() const;
    double listed_mass() const;
};

enum class DensityShape { Uniform, Triangular, PiecewiseLinear };

// Absolutely continuous measure on [lo, hi]. The effective density is
// base(x) * weight(x)^2 where weight is an optional amplitude profile
// (amplitude_weight folds profiles here so it stays exact and composable).
// base_total is the integral of the base density alone; mass is the integral
// of the effective density. They coincide while no weight is attached.
struct DensityMeasure {
    double lo = 0.0, hi = 1.0;
    DensityShape shape = DensityShape::Uniform;
    std::vector<double> nodes;   // PiecewiseLinear only
    std::vector<double> values;  // density of the *base* at nodes
    double base_total = 1.0;
    double mass = 1.0;
    std::optional<AmplitudeProfile> weight;

    static DensityMeasure uniform(double lo, double hi, double mass);
    static DensityMeasure triangular(double lo, double hi, double mass);
    static DensityMeasure piecewise_linear(std::vector<double> nodes,
                                           std::vector<double> values);

    void validate() const;
    double base_density_at(double x) const;       // unweighted
    double effective_density_at(double x) const;  // base * weight^2
    bool is_weighted() const;
};

// Bernoulli convolution with contraction ratio eta in (0,1): the law of
// sum_{k>=1} s_k eta^k with fair independent signs s_k = +-1. Probability
// measure; support inside [-eta/(1-eta), eta/(1-eta)].
struct BernoulliMeasure {
    double eta = 0.5;

    void validate() const;
    double support_radius() const { return eta / (1.0 - eta); }
};

using MeasureComponent = std::variant<AtomicMeasure, DensityMeasure, BernoulliMeasure>;

// ------------------------------------------------------------------- measure ---

// Finite nonnegative Borel measure: a single component or a mixture.
// Mixtures are flattened (coefficient, component) terms; components are
// treated as mutually singular, so total variation is additive.
class Measure {
  public:
    struct Term {
        double coefficient;  // > 0
        MeasureComponent component;
    };

    Measure() = default;  // zero measure
    Measure(AtomicMeasure m);
    Measure(DensityMeasure m);
    Measure(BernoulliMeasure m);
    static Measure mixture(std::vector<std::pair<double, Measure>> parts);

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_single_bernoulli() const;
    bool has_atomic_part() const;

    std::string describe() const;

  private:
    std::vector<Term> terms_;
};

// ---------------------------------------------------------------- operations ---

// ||mu||: sum of atom weights plus declared tail, declared density masses,
// 1 per Bernoulli factor; additive over mixture terms.
double total_variation(const Measure& mu);

// mu restricted to A. Atoms outside A are dropped (a declared atomic tail is
// dropped too: its locations are unknown, so membership in a bounded A cannot
// be certified). Densities are clipped cell by cell. A Bernoulli factor is
// replaced by a tabulated piecewise-linear density of its dyadic-cell masses
// unless A covers its support hull.
Measure restrict(const Measure& mu, const BorelSet& A);

// As restrict(), but throws MeasureError when the result is the zero measure.
Measure restrict_nonzero(const Measure& mu, const BorelSet& A);

// d(mu_u) = |u|^2 d(mu). Atom weights are scaled in place; densities fold the
// profile into their weight slot; a Bernoulli factor with non-constant profile
// is tabulated into a piecewise-linear density. Throws MeasureError when the
// weighted mass is not finite (unbounded profile against a declared tail).
Measure amplitude_weight(const Measure& mu, const AmplitudeProfile& u);

// Smallest closed interval containing the support of the listed data
// (hull of atoms, density supports, Bernoulli support bound).
struct Interval {
    double lo, hi;
};
Interval support_interval(const Measure& mu);

// ------------------------------------------------- Bernoulli cell machinery ---

// F[i] = mu_eta((-inf, boundaries[i])) computed by recursion over the
// +-eta^k digit tree, truncated at depth 40. boundaries must be sorted.
std::vector<double> bernoulli_cdf(double eta, std::span<const double> boundaries);

// mu_eta([lo, hi)).
double bernoulli_interval_mass(double eta, double lo, double hi);

// Tabulate mu_eta (weighted by profile^2 if given) on [lo, hi) as a
// piecewise-linear density with 2^depth cells. Returns the zero measure
// when the cell carries no mass.
Measure bernoulli_tabulate(const BernoulliMeasure& b, double lo, double hi,
                           int depth, const AmplitudeProfile* profile = nullptr);

// Default tabulation depth for restriction (cells = 2^depth per interval);
// capped at 20. The tabulated transform tracks the true one while the phase
// across one cell stays small, i.e. for |t| well below 1/(cell width).
inline constexpr int kBernoulliTabulateDepth = 8;
inline constexpr int kBernoulliDigitDepth = 40;

}  // namespace torusflow
