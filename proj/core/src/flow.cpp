#include "torusflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "torusflow/numerics.hpp"

namespace torusflow {

// ------------------------------------------------------------ frequency spec ---

FrequencySpec FrequencySpec::list(std::vector<Frequency> freqs) {
    if (freqs.empty()) throw FlowError("frequency list: empty");
    FrequencySpec s;
    s.rule_ = Rule::ExplicitList;
    s.list_ = std::move(freqs);
    return s;
}

FrequencySpec FrequencySpec::linear_modes() {
    FrequencySpec s;
    s.rule_ = Rule::LinearModes;
    return s;
}

FrequencySpec FrequencySpec::inverse_factorial() {
    FrequencySpec s;
    s.rule_ = Rule::InverseFactorial;
    return s;
}

FrequencySpec FrequencySpec::sine_gordon(double m) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw FlowError("sine_gordon: m must be >= 0");
    FrequencySpec s;
    s.rule_ = Rule::SineGordon;
    s.m_ = m;
    return s;
}

FrequencySpec FrequencySpec::identity_line() { return FrequencySpec(); }

bool FrequencySpec::is_sequence() const { return rule_ != Rule::IdentityLine; }

bool FrequencySpec::unbounded_modes() const {
    return rule_ == Rule::LinearModes || rule_ == Rule::SineGordon;
}

double FrequencySpec::at_mode(std::size_t k) const {
    if (k == 0) throw FlowError("frequency: modes are 1-based");
    switch (rule_) {
        case Rule::ExplicitList:
            if (k > list_.size()) throw FlowError("frequency: mode beyond the listed prefix");
            return list_[k - 1].value();
        case Rule::LinearModes:
            return static_cast<double>(k);
        case Rule::InverseFactorial: {
            auto f = exact_at_mode(k);
            return f->value();
        }
        case Rule::SineGordon:
            return std::sqrt(static_cast<double>(k) * static_cast<double>(k) + m_ * m_);
        case Rule::IdentityLine:
            throw FlowError("frequency: lambda(x) = x has no mode sequence");
    }
    return 0.0;
}

std::optional<Frequency> FrequencySpec::exact_at_mode(std::size_t k) const {
    if (k == 0) throw FlowError("frequency: modes are 1-based");
    switch (rule_) {
        case Rule::ExplicitList: {
            if (k > list_.size()) throw FlowError("frequency: mode beyond the listed prefix");
            const Frequency& f = list_[k - 1];
            if (f.is_exact()) return f;
            return std::nullopt;
        }
        case Rule::LinearModes:
            return Frequency::exact(mpq_class(static_cast<unsigned long>(k)));
        case Rule::InverseFactorial: {
            if (k > 2000) throw FlowError("frequency: factorial rule prefix too long");
            mpz_class fact;
            mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(k));
            return Frequency::exact(mpq_class(1, fact));
        }
        case Rule::SineGordon: {
            if (m_ == 0.0) return Frequency::exact(mpq_class(static_cast<unsigned long>(k)));
            return std::nullopt;
        }
        case Rule::IdentityLine:
            throw FlowError("frequency: lambda(x) = x has no mode sequence");
    }
    return std::nullopt;
}

std::vector<Frequency> FrequencySpec::prefix(std::size_t n) const {
    std::vector<Frequency> out;
    out.reserve(n);
    for (std::size_t k = 1; k <= n; ++k) {
        if (auto f = exact_at_mode(k)) {
            out.push_back(*f);
        } else {
            out.push_back(Frequency::real(at_mode(k)));
        }
    }
    return out;
}

double FrequencySpec::at_point(double x) const {
    switch (rule_) {
        case Rule::IdentityLine:
            return x;
        case Rule::SineGordon:
            return std::sqrt(x * x + m_ * m_);
        case Rule::LinearModes:
            return x;
        case Rule::ExplicitList:
        case Rule::InverseFactorial:
            throw FlowError("frequency: rule has no continuous extension");
    }
    return x;
}

double FrequencySpec::derivative_at(double x) const {
    double h = 1e-6 * std::max(1.0, std::abs(x));
    return (at_point(x + h) - at_point(x - h)) / (2.0 * h);
}

// ------------------------------------------------------------------- torus ---

CountableTorus CountableTorus::from_list(std::vector<double> radii, double tail_energy_bound) {
    if (radii.empty()) throw FlowError("torus: needs at least one mode");
    for (double r : radii) {
        if (!std::isfinite(r) || r < 0.0) throw FlowError("torus: radii must be >= 0");
    }
    if (!(tail_energy_bound >= 0.0)) throw FlowError("torus: tail bound must be >= 0");
    CountableTorus t;
    t.radii_ = std::make_shared<const std::vector<double>>(std::move(radii));
    t.tail_energy_bound_ = tail_energy_bound;
    return t;
}

CountableTorus CountableTorus::geometric(double a, double q, std::size_t modes) {
    if (!(a > 0.0) || !(q > 0.0 && q < 1.0)) {
        throw FlowError("torus: geometric rule needs a > 0, 0 < q < 1");
    }
    std::vector<double> radii(modes);
    for (std::size_t k = 0; k < modes; ++k) radii[k] = a * std::pow(q, double(k + 1));
    // sum_{k>N} a^2 q^{2k} = a^2 q^{2(N+1)} / (1 - q^2)
    double tail = a * a * std::pow(q, 2.0 * double(modes + 1)) / (1.0 - q * q);
    return from_list(std::move(radii), tail);
}

CountableTorus CountableTorus::power(double a, double s, std::size_t modes) {
    if (!(a > 0.0) || !(s > 0.5)) {
        throw FlowError("torus: power rule needs a > 0 and s > 1/2 for finite energy");
    }
    std::vector<double> radii(modes);
    for (std::size_t k = 0; k < modes; ++k) radii[k] = a * std::pow(double(k + 1), -s);
    // integral tail bound: sum_{k>N} a^2 k^{-2s} <= a^2 N^{1-2s} / (2s-1)
    double tail = a * a * std::pow(double(modes), 1.0 - 2.0 * s) / (2.0 * s - 1.0);
    return from_list(std::move(radii), tail);
}

double CountableTorus::energy_norm_sq() const {
    double acc = 0.0;
    for (double r : *radii_) acc += r * r;
    return acc;
}

bool CountableTorus::non_degenerate() const {
    return std::all_of(radii_->begin(), radii_->end(), [](double r) { return r > 0.0; });
}

double CountableTorus::tail_distance_bound() const {
    return 2.0 * std::sqrt(tail_energy_bound_);
}

bool CountableTorus::same_as(const CountableTorus& other) const {
    return *radii_ == *other.radii_ && tail_energy_bound_ == other.tail_energy_bound_;
}

// ------------------------------------------------------------------- states ---

CountableState::CountableState(CountableTorus torus, std::vector<double> lambda,
                               std::vector<double> initial_phases)
    : torus_(std::move(torus)) {
    if (lambda.size() != torus_.modes()) {
        throw FlowError("state: frequency prefix does not match the torus");
    }
    for (double l : lambda) {
        if (!std::isfinite(l)) throw FlowError("state: non-finite frequency");
    }
    if (initial_phases.empty()) initial_phases.assign(torus_.modes(), 0.0);
    if (initial_phases.size() != torus_.modes()) {
        throw FlowError("state: phase count does not match the torus");
    }
    for (double& th : initial_phases) th = wrap_angle(th);
    lambda_ = std::make_shared<const std::vector<double>>(std::move(lambda));
    theta0_ = std::make_shared<const std::vector<double>>(std::move(initial_phases));
}

CountableState CountableState::make(const CountableTorus& torus, const FrequencySpec& spec,
                                    std::vector<double> initial_phases) {
    std::vector<double> lambda(torus.modes());
    for (std::size_t k = 0; k < torus.modes(); ++k) lambda[k] = spec.at_mode(k + 1);
    return CountableState(torus, std::move(lambda), std::move(initial_phases));
}

CountableState CountableState::evolved(double t) const {
    CountableState s = *this;
    s.tau_ = tau_ + t;
    return s;
}

double CountableState::phase(std::size_t k) const {
    return wrap_angle((*theta0_)[k] + std::fmod((*lambda_)[k] * tau_, kTwoPi));
}

std::vector<double> CountableState::phases() const {
    std::vector<double> out(modes());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = phase(k);
    return out;
}

std::complex<double> CountableState::mode(std::size_t k) const {
    return std::polar(torus_.radii()[k], phase(k));
}

std::vector<std::complex<double>> CountableState::values() const {
    std::vector<std::complex<double>> out(modes());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = mode(k);
    return out;
}

bool CountableState::same_structure(const CountableState& other) const {
    return torus_.same_as(other.torus_) && *lambda_ == *other.lambda_;
}

bool CountableState::identical(const CountableState& other) const {
    return same_structure(other) && *theta0_ == *other.theta0_ && tau_ == other.tau_;
}

ContinuousState ContinuousState::make(const DensityMeasure& mu, const FrequencySpec& spec,
                                      const AmplitudeProfile& amplitude, int panels) {
    mu.validate();
    if (spec.rule() == FrequencySpec::Rule::ExplicitList ||
        spec.rule() == FrequencySpec::Rule::InverseFactorial) {
        throw FlowError("continuous state: frequency rule has no lambda(x)");
    }
    panels = std::clamp(panels, 1, 4096);
    const auto& rule = GaussLegendre32::instance();
    auto xs = std::make_shared<std::vector<double>>();
    auto ws = std::make_shared<std::vector<double>>();
    auto amp = std::make_shared<std::vector<double>>();
    auto lam = std::make_shared<std::vector<double>>();
    xs->reserve(32 * panels);
    for (int p = 0; p < panels; ++p) {
        double a = mu.lo + (mu.hi - mu.lo) * p / panels;
        double b = mu.lo + (mu.hi - mu.lo) * (p + 1) / panels;
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int i = 0; i < 32; ++i) {
            double x = mid + half * rule.nodes[i];
            xs->push_back(x);
            ws->push_back(half * rule.weights[i] * mu.effective_density_at(x));
            amp->push_back(amplitude(x));
            lam->push_back(spec.at_point(x));
        }
    }
    ContinuousState s;
    s.xs_ = xs;
    s.ws_ = ws;
    s.amp_ = amp;
    s.lambda_ = lam;
    s.theta0_ = std::make_shared<const std::vector<double>>(xs->size(), 0.0);
    return s;
}

ContinuousState ContinuousState::evolved(double t) const {
    ContinuousState s = *this;
    s.tau_ = tau_ + t;
    return s;
}

double ContinuousState::phase(std::size_t j) const {
    return wrap_angle((*theta0_)[j] + std::fmod((*lambda_)[j] * tau_, kTwoPi));
}

std::complex<double> ContinuousState::value(std::size_t j) const {
    return std::polar((*amp_)[j], phase(j));
}

double ContinuousState::norm_sq() const {
    double acc = 0.0;
    for (std::size_t j = 0; j < nodes(); ++j) acc += (*ws_)[j] * (*amp_)[j] * (*amp_)[j];
    return acc;
}

bool ContinuousState::same_structure(const ContinuousState& other) const {
    return *xs_ == *other.xs_ && *ws_ == *other.ws_ && *amp_ == *other.amp_ &&
           *lambda_ == *other.lambda_;
}

// --------------------------------------------------------------- operations ---

CountableState evolve(const CountableState& s, double t) { return s.evolved(t); }

CountableState evolve(const CountableState& s, const FrequencySpec& spec, double t) {
    for (std::size_t k = 0; k < s.modes(); ++k) {
        if (spec.at_mode(k + 1) != s.lambda()[k]) {
            throw FlowError("evolve: frequency spec does not match the state");
        }
    }
    return s.evolved(t);
}

ContinuousState evolve(const ContinuousState& s, double t) { return s.evolved(t); }

namespace {

// squared chord between phases a and b at radius r: 4 r^2 sin^2((a-b)/2)
inline double chord_sq(double r, double dtheta) {
    double s = std::sin(0.5 * dtheta);
    return 4.0 * r * r * s * s;
}

}  // namespace

double distance(const CountableState& a, const CountableState& b) {
    if (!a.same_structure(b)) {
        throw FlowError("distance: states live on different discretizations");
    }
    double dtau = a.elapsed() - b.elapsed();
    double acc = 0.0;
    const auto& radii = a.torus().radii();
    for (std::size_t k = 0; k < a.modes(); ++k) {
        double dtheta = (a.initial_phases()[k] - b.initial_phases()[k]) +
                        std::fmod(a.lambda()[k] * dtau, kTwoPi);
        acc += chord_sq(radii[k], dtheta);
    }
    return std::sqrt(acc);
}

double distance(const ContinuousState& a, const ContinuousState& b) {
    if (!a.same_structure(b)) {
        throw FlowError("distance: states live on different discretizations");
    }
    double dtau = a.elapsed() - b.elapsed();
    double acc = 0.0;
    for (std::size_t j = 0; j < a.nodes(); ++j) {
        double dtheta = std::fmod(a.lambda()[j] * dtau, kTwoPi);
        acc += a.node_weights()[j] * chord_sq(a.amplitudes()[j], dtheta);
    }
    return std::sqrt(std::max(0.0, acc));
}

double energy(const CountableState& s) {
    double acc = 0.0;
    const auto& radii = s.torus().radii();
    for (std::size_t k = 0; k < s.modes(); ++k) {
        acc += 0.5 * s.lambda()[k] * radii[k] * radii[k];
    }
    if (!std::isfinite(acc)) throw FlowError("energy: divergent prefix energy");
    return acc;
}

double energy(const ContinuousState& s) {
    double acc = 0.0;
    for (std::size_t j = 0; j < s.nodes(); ++j) {
        double r = s.amplitudes()[j];
        acc += 0.5 * s.node_weights()[j] * s.lambda()[j] * r * r;
    }
    if (!std::isfinite(acc)) throw FlowError("energy: divergent energy");
    return acc;
}

double energy_certified(const CountableState& s, const FrequencySpec& spec) {
    double prefix = energy(s);
    double tail = s.torus().tail_energy_bound();
    if (tail == 0.0) return prefix;
    if (spec.unbounded_modes()) {
        throw FlowError(
            "energy: frequencies unbounded over modes; tail energy cannot be certified");
    }
    // bounded rules: lambda on the tail is at most the max over the prefix
    // (factorial rule decreases; explicit lists end at the prefix)
    double lam_max = 0.0;
    for (double l : s.lambda()) lam_max = std::max(lam_max, l);
    return prefix + 0.5 * lam_max * tail;
}

std::vector<double> actions(const CountableState& s) {
    std::vector<double> out(s.modes());
    const auto& radii = s.torus().radii();
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = radii[k] * radii[k];
    return out;
}

Measure mode_measure(const CountableState& s) {
    std::map<double, double> grouped;  // equal frequencies merge their weights
    const auto& radii = s.torus().radii();
    for (std::size_t k = 0; k < s.modes(); ++k) {
        grouped[s.lambda()[k]] += radii[k] * radii[k];
    }
    AtomicMeasure m;
    for (const auto& [loc, w] : grouped) m.atoms.push_back({loc, w});
    m.tail_mass_bound = s.torus().tail_energy_bound();
    return Measure(m);
}

// -------------------------------------------------------------- realization ---

RealizedState realize(const std::vector<std::complex<double>>& u) {
    RealizedState r;
    r.q.reserve(u.size());
    r.p.reserve(u.size());
    for (auto z : u) {
        r.q.push_back(z.real());
        r.p.push_back(z.imag());
    }
    return r;
}

RealizedState realize(const CountableState& s) { return realize(s.values()); }

double symplectic_form(const std::vector<std::complex<double>>& u,
                       const std::vector<std::complex<double>>& v) {
    if (u.size() != v.size()) throw FlowError("symplectic_form: size mismatch");
    double acc = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        acc -= (u[k] * std::conj(v[k])).imag();
    }
    return acc;
}

std::vector<std::complex<double>> apply_symplectic_operator(
    const std::vector<std::complex<double>>& u) {
    std::vector<std::complex<double>> out(u.size());
    const std::complex<double> minus_i{0.0, -1.0};
    for (std::size_t k = 0; k < u.size(); ++k) out[k] = minus_i * u[k];
    return out;
}

}  // namespace torusflow
