#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "torusflow/errors.hpp"

namespace torusflow {

// ---------------------------------------------------------------- frequency ---

// A single oscillator frequency: exact rational (arbitrary precision, kept in
// lowest terms) or a real value with an optional label ("sqrt2", ...).
// Frequencies are positive.
class Frequency {
  public:
    static Frequency exact(mpq_class r);
    static Frequency exact(long num, long den);
    static Frequency real(double v, std::string label = "");

    bool is_exact() const { return exact_.has_value(); }
    const mpq_class& rational() const;
    double value() const { return value_; }
    const std::string& label() const { return label_; }

  private:
    std::optional<mpq_class> exact_;
    double value_ = 0.0;
    std::string label_;
};

// parse "p/q", a decimal literal, or a named constant (sqrt2, sqrt3, pi, e,
// golden); "k!" forms come from FrequencySpec rules, not from here.
Frequency parse_frequency(const std::string& text);

// gcd on positive rationals: gcd(p/q, r/s) = gcd(p*s, r*q) / (q*s).
mpq_class rational_gcd(const mpq_class& a, const mpq_class& b);

// ----------------------------------------------------- rational reconstruction ---

// Continued-fraction reconstruction of a rational from a double. A value is
// reported Rational only when the expansion terminates with a huge partial
// quotient (the signature of an exact rational stored in floating point) and
// the reconstruction residual is below 1e-12 relative. A clean non-terminating
// expansion past the denominator bound is reported Irrational; ambiguous
// signals land in Undecided.
struct RationalFit {
    enum class Status { Rational, Irrational, Undecided };
    Status status = Status::Undecided;
    mpq_class value;  // meaningful when Rational
    double residual = 0.0;
    long long max_quotient_seen = 0;
};

RationalFit reconstruct_rational(double x, long long denominator_bound = 1'000'000'000LL);

// ----------------------------------------------------------- relation search ---

// Integer relation sum_i coefficients[i] * freqs[indices[i]] = 0
// (exact for rational inputs; residual below 1e-9 * max|lambda| for reals).
struct RelationWitness {
    std::vector<mpz_class> coefficients;  // not all zero
    std::vector<std::size_t> indices;
    mpz_class height;  // max |coefficient|
    double residual = 0.0;
};

struct RelationSearchReport {
    std::optional<RelationWitness> witness;
    long long height_bound = 0;
    // true when "no witness" certifies that no relation with coefficients
    // <= height_bound exists (exact inputs, pair searches, small brute force)
    bool exhaustive = false;
};

// None never means "independent", only "no relation with coefficients up to
// height found". Exact-rational inputs always yield a witness.
RelationSearchReport rational_relation_report(const std::vector<Frequency>& freqs,
                                              long long height);
std::optional<RelationWitness> rational_relation(const std::vector<Frequency>& freqs,
                                                 long long height);

// -------------------------------------------------- strong commensurability ---

struct StrongCommensurability {
    enum class Verdict { Yes, No, Undecided };
    Verdict verdict = Verdict::Undecided;
    std::optional<std::pair<std::size_t, std::size_t>> witness_pair;  // for No
    long long denominator_bound = 0;
};

// Yes iff every pairwise ratio is rational (exact for rational inputs,
// reconstructed for reals). Pair ratios are enough: they force every element
// to be a rational multiple of any other.
StrongCommensurability strong_commensurate(const std::vector<Frequency>& freqs);

// ----------------------------------------------------------- periodicity base ---

// lambda_k = lambda0 * n_k with integer multipliers; the common period of the
// prefix flow is 2*pi / lambda0.
struct PeriodicityBase {
    mpq_class lambda0;
    std::vector<mpz_class> multipliers;
    std::size_t prefix_length = 0;
    double period() const;
};

PeriodicityBase periodicity_base(const std::vector<mpq_class>& freqs);
// convenience: requires every frequency to be exact
PeriodicityBase periodicity_base(const std::vector<Frequency>& freqs);

// -------------------------------------------------------------------- Jacobi ---

// Finite-dimensional trichotomy: all trajectories periodic, dense on the
// torus (no relation up to the height bound), or resonant with a witness.
struct JacobiClassification {
    enum class Kind { PeriodicAll, DenseOnTorus, ResonantMixed };
    Kind kind = Kind::ResonantMixed;
    std::optional<RelationWitness> witness;
    long long height_bound = 0;
    bool exhaustive = false;
    bool undecided_commensurability = false;
};

JacobiClassification jacobi_classify(const std::vector<Frequency>& freqs,
                                     long long height = 1'000'000LL);

}  // namespace torusflow
