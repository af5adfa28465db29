#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <vector>

#include "torusflow/commensurability.hpp"
#include "torusflow/measure.hpp"

namespace torusflow {

// ------------------------------------------------------------ frequency spec ---

// A frequency sequence lambda_k (modes, 1-based) or frequency function
// lambda(x), named by rule so prefixes can be extended without rewriting a
// scenario.
class FrequencySpec {
  public:
    enum class Rule {
        ExplicitList,      // lambda_k given outright
        LinearModes,       // lambda_k = k
        InverseFactorial,  // lambda_k = 1/k!
        SineGordon,        // lambda(x) = sqrt(x^2 + m^2); also usable as a sequence
        IdentityLine,      // lambda(x) = x (canonical continuous realization)
    };

    static FrequencySpec list(std::vector<Frequency> freqs);
    static FrequencySpec linear_modes();
    static FrequencySpec inverse_factorial();
    static FrequencySpec sine_gordon(double m);
    static FrequencySpec identity_line();

    Rule rule() const { return rule_; }
    double mass_parameter() const { return m_; }
    bool is_sequence() const;  // defined on mode indices
    bool unbounded_modes() const;
    std::size_t list_size() const { return list_.size(); }

    double at_mode(std::size_t k) const;  // k >= 1
    std::optional<Frequency> exact_at_mode(std::size_t k) const;
    std::vector<Frequency> prefix(std::size_t n) const;

    double at_point(double x) const;
    double derivative_at(double x) const;  // central difference

  private:
    Rule rule_ = Rule::IdentityLine;
    double m_ = 0.0;
    std::vector<Frequency> list_;
};

// ------------------------------------------------------------------- torus ---

// Radii prefix of an invariant torus plus a certified bound on the truncated
// tail energy sum_{k>N} r_k^2. Non-degenerate means every listed radius is
// positive (the defining rules are positive everywhere).
class CountableTorus {
  public:
    static CountableTorus from_list(std::vector<double> radii, double tail_energy_bound = 0.0);
    static CountableTorus geometric(double a, double q, std::size_t modes);
    static CountableTorus power(double a, double s, std::size_t modes);

    std::size_t modes() const { return radii_->size(); }
    const std::vector<double>& radii() const { return *radii_; }
    double tail_energy_bound() const { return tail_energy_bound_; }
    double energy_norm_sq() const;  // sum of listed r_k^2
    bool non_degenerate() const;
    // worst-case distance effect of the omitted tail: 2*sqrt(tail energy)
    double tail_distance_bound() const;

    bool same_as(const CountableTorus& other) const;

  private:
    std::shared_ptr<const std::vector<double>> radii_;
    double tail_energy_bound_ = 0.0;
};

// ------------------------------------------------------------------- states ---

// Phase configuration on a countable torus. Stores initial phases plus the
// elapsed flow time tau; phases are materialized on demand. Composing
// evolutions adds times, so the group law and reversibility of the flow hold
// exactly in this arithmetic and |z_k| = r_k is structural.
class CountableState {
  public:
    CountableState(CountableTorus torus, std::vector<double> lambda,
                   std::vector<double> initial_phases);
    static CountableState make(const CountableTorus& torus, const FrequencySpec& spec,
                               std::vector<double> initial_phases = {});

    const CountableTorus& torus() const { return torus_; }
    const std::vector<double>& lambda() const { return *lambda_; }
    const std::vector<double>& initial_phases() const { return *theta0_; }
    double elapsed() const { return tau_; }
    std::size_t modes() const { return torus_.modes(); }

    CountableState evolved(double t) const;
    double phase(std::size_t k) const;  // in [0, 2*pi)
    std::vector<double> phases() const;
    std::complex<double> mode(std::size_t k) const;
    std::vector<std::complex<double>> values() const;

    bool same_structure(const CountableState& other) const;
    bool identical(const CountableState& other) const;  // bitwise state equality

  private:
    CountableTorus torus_;
    std::shared_ptr<const std::vector<double>> lambda_;
    std::shared_ptr<const std::vector<double>> theta0_;
    double tau_ = 0.0;
};

// Phase configuration on the quadrature nodes induced by a density measure.
// The flow acts pointwise, so nodes never move and no interpolation happens.
class ContinuousState {
  public:
    static ContinuousState make(const DensityMeasure& mu, const FrequencySpec& spec,
                                const AmplitudeProfile& amplitude, int panels = 8);

    std::size_t nodes() const { return xs_->size(); }
    const std::vector<double>& node_points() const { return *xs_; }
    const std::vector<double>& node_weights() const { return *ws_; }
    const std::vector<double>& amplitudes() const { return *amp_; }
    const std::vector<double>& lambda() const { return *lambda_; }
    double elapsed() const { return tau_; }

    ContinuousState evolved(double t) const;
    double phase(std::size_t j) const;
    std::complex<double> value(std::size_t j) const;

    double norm_sq() const;  // sum w_j r_j^2
    bool same_structure(const ContinuousState& other) const;

  private:
    std::shared_ptr<const std::vector<double>> xs_, ws_, amp_, lambda_, theta0_;
    double tau_ = 0.0;
};

// --------------------------------------------------------------- operations ---

CountableState evolve(const CountableState& s, double t);
CountableState evolve(const CountableState& s, const FrequencySpec& spec, double t);
ContinuousState evolve(const ContinuousState& s, double t);

// Hilbert-space distance between two states over the same discretization.
double distance(const CountableState& a, const CountableState& b);
double distance(const ContinuousState& a, const ContinuousState& b);

// H = sum lambda_k r_k^2 / 2 over the listed prefix.
double energy(const CountableState& s);
double energy(const ContinuousState& s);
// Prefix energy plus a certified tail bound. Throws FlowError when the torus
// declares tail energy but the rule's frequencies are unbounded over modes.
double energy_certified(const CountableState& s, const FrequencySpec& spec);

// first integrals I_k = r_k^2
std::vector<double> actions(const CountableState& s);

// The atomic measure sum_k r_k^2 delta_{lambda_k} whose characteristic
// function drives the displacement identity for this state (equal frequencies
// merge their weights).
Measure mode_measure(const CountableState& s);

// -------------------------------------------------------------- realization ---

struct RealizedState {
    std::vector<double> q;  // Re u
    std::vector<double> p;  // Im u
};

RealizedState realize(const std::vector<std::complex<double>>& u);
RealizedState realize(const CountableState& s);

// omega(u, v) = -Im <u, v> with <u, v> = sum u_k conj(v_k). Matches the
// realization-form identity (i/2)[(u,v) - (v,u)] and the basis pairing
// omega(g_j, f_j) = 1 with g_j the real and f_j the imaginary axis of mode j.
double symplectic_form(const std::vector<std::complex<double>>& u,
                       const std::vector<std::complex<double>>& v);

// The operator J with omega(u, v) = Re<u, J v> and J^2 = -1; acts as
// multiplication by -i, i.e. J g_j = -f_j, J f_k = g_k.
std::vector<std::complex<double>> apply_symplectic_operator(
    const std::vector<std::complex<double>>& u);

}  // namespace torusflow
