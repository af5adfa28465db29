#include "torusflow/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "torusflow/numerics.hpp"

namespace torusflow {

namespace {

bool finite(double x) { return std::isfinite(x); }

double trapezoid(const std::vector<double>& nodes, const std::vector<double>& values) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        acc += 0.5 * (values[i] + values[i + 1]) * (nodes[i + 1] - nodes[i]);
    }
    return acc;
}

}  // namespace

// ---------------------------------------------------------------- borel sets ---

BorelSet::BorelSet(std::vector<Cell> cells) : cells_(std::move(cells)) {
    for (const auto& c : cells_) {
        if (!finite(c.lo) || !finite(c.hi) || !(c.lo < c.hi)) {
            throw MeasureError("BorelSet: cells must be finite with lo < hi");
        }
    }
    std::sort(cells_.begin(), cells_.end(),
              [](const Cell& a, const Cell& b) { return a.lo < b.lo; });
    for (std::size_t i = 0; i + 1 < cells_.size(); ++i) {
        if (cells_[i].hi > cells_[i + 1].lo) {
            throw MeasureError("BorelSet: cells must be disjoint");
        }
    }
    // merge touching cells so the representation is canonical
    std::vector<Cell> merged;
    for (const auto& c : cells_) {
        if (!merged.empty() && merged.back().hi == c.lo) {
            merged.back().hi = c.hi;
        } else {
            merged.push_back(c);
        }
    }
    cells_ = std::move(merged);
}

BorelSet BorelSet::interval(double lo, double hi) { return BorelSet({{lo, hi}}); }

bool BorelSet::contains(double x) const {
    for (const auto& c : cells_) {
        if (x >= c.lo && x < c.hi) return true;
    }
    return false;
}

double BorelSet::length() const {
    double acc = 0.0;
    for (const auto& c : cells_) acc += c.hi - c.lo;
    return acc;
}

BorelSet BorelSet::complement_within(double hull_lo, double hull_hi) const {
    std::vector<Cell> out;
    double cursor = hull_lo;
    for (const auto& c : cells_) {
        double lo = std::max(c.lo, hull_lo);
        double hi = std::min(c.hi, hull_hi);
        if (hi <= lo) continue;
        if (lo > cursor) out.push_back({cursor, lo});
        cursor = std::max(cursor, hi);
    }
    if (cursor < hull_hi) out.push_back({cursor, hull_hi});
    return BorelSet(std::move(out));
}

// --------------------------------------------------------- amplitude profiles ---

AmplitudeProfile AmplitudeProfile::constant(double c) {
    if (!finite(c) || c < 0.0) throw MeasureError("profile: constant must be >= 0");
    return AmplitudeProfile(Node(Constant{c}));
}

AmplitudeProfile AmplitudeProfile::identity() { return AmplitudeProfile(Node(Identity{})); }

AmplitudeProfile AmplitudeProfile::piecewise_linear(std::vector<double> nodes,
                                                    std::vector<double> values) {
    if (nodes.size() != values.size() || nodes.size() < 2) {
        throw MeasureError("profile: piecewise_linear needs matching nodes/values, >= 2");
    }
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        if (!(nodes[i] < nodes[i + 1])) {
            throw MeasureError("profile: nodes must be strictly increasing");
        }
    }
    for (double v : values) {
        if (!finite(v) || v < 0.0) throw MeasureError("profile: values must be >= 0");
    }
    return AmplitudeProfile(Node(PiecewiseLinear{std::move(nodes), std::move(values)}));
}

AmplitudeProfile AmplitudeProfile::product(std::vector<AmplitudeProfile> factors) {
    if (factors.empty()) return constant(1.0);
    if (factors.size() == 1) return factors.front();
    return AmplitudeProfile(Node(Product{std::move(factors)}));
}

double AmplitudeProfile::operator()(double x) const {
    struct Eval {
        double x;
        double operator()(const Constant& c) const { return c.value; }
        double operator()(const Identity&) const { return std::abs(x); }
        double operator()(const PiecewiseLinear& p) const {
            if (x < p.nodes.front() || x > p.nodes.back()) return 0.0;
            auto it = std::upper_bound(p.nodes.begin(), p.nodes.end(), x);
            if (it == p.nodes.begin()) return p.values.front();
            if (it == p.nodes.end()) return p.values.back();
            std::size_t i = static_cast<std::size_t>(it - p.nodes.begin()) - 1;
            double t = (x - p.nodes[i]) / (p.nodes[i + 1] - p.nodes[i]);
            return p.values[i] + t * (p.values[i + 1] - p.values[i]);
        }
        double operator()(const Product& pr) const {
            double acc = 1.0;
            for (const auto& f : pr.factors) acc *= f(x);
            return acc;
        }
    };
    return std::visit(Eval{x}, node_);
}

bool AmplitudeProfile::is_constant() const {
    if (std::holds_alternative<Constant>(node_)) return true;
    if (const auto* pr = std::get_if<Product>(&node_)) {
        return std::all_of(pr->factors.begin(), pr->factors.end(),
                           [](const AmplitudeProfile& f) { return f.is_constant(); });
    }
    return false;
}

double AmplitudeProfile::constant_value() const {
    if (const auto* c = std::get_if<Constant>(&node_)) return c->value;
    if (const auto* pr = std::get_if<Product>(&node_)) {
        double acc = 1.0;
        for (const auto& f : pr->factors) acc *= f.constant_value();
        return acc;
    }
    throw MeasureError("profile: not constant");
}

bool AmplitudeProfile::is_bounded() const {
    struct Q {
        bool operator()(const Constant&) const { return true; }
        bool operator()(const Identity&) const { return false; }
        bool operator()(const PiecewiseLinear&) const { return true; }
        bool operator()(const Product& pr) const {
            // a single bounded factor that vanishes outside a window does not
            // tame an unbounded one in general; demand all factors bounded
            return std::all_of(pr.factors.begin(), pr.factors.end(),
                               [](const AmplitudeProfile& f) { return f.is_bounded(); });
        }
    };
    return std::visit(Q{}, node_);
}

double AmplitudeProfile::bound() const {
    struct Q {
        double operator()(const Constant& c) const { return c.value; }
        double operator()(const Identity&) const {
            return std::numeric_limits<double>::infinity();
        }
        double operator()(const PiecewiseLinear& p) const {
            return *std::max_element(p.values.begin(), p.values.end());
        }
        double operator()(const Product& pr) const {
            double acc = 1.0;
            for (const auto& f : pr.factors) acc *= f.bound();
            return acc;
        }
    };
    return std::visit(Q{}, node_);
}

std::string AmplitudeProfile::describe() const {
    struct Q {
        std::string operator()(const Constant& c) const {
            return "const(" + format_double(c.value) + ")";
        }
        std::string operator()(const Identity&) const { return "identity"; }
        std::string operator()(const PiecewiseLinear& p) const {
            return "piecewise_linear[" + std::to_string(p.nodes.size()) + "]";
        }
        std::string operator()(const Product& pr) const {
            std::string s = "product(";
            for (std::size_t i = 0; i < pr.factors.size(); ++i) {
                if (i) s += ",";
                s += pr.factors[i].describe();
            }
            return s + ")";
        }
    };
    return std::visit(Q{}, node_);
}

// ----------------------------------------------------------------- components ---

void AtomicMeasure::validate() const {
    if (atoms.empty()) throw MeasureError("atomic: needs at least one atom");
    if (!finite(tail_mass_bound) || tail_mass_bound < 0.0) {
        throw MeasureError("atomic: tail_mass_bound must be >= 0");
    }
    for (const auto& a : atoms) {
        if (!finite(a.location)) throw MeasureError("atomic: non-finite location");
        if (!finite(a.weight) || a.weight <= 0.0) {
            throw MeasureError("atomic: weights must be strictly positive");
        }
    }
    std::vector<double> locs;
    locs.reserve(atoms.size());
    for (const auto& a : atoms) locs.push_back(a.location);
    std::sort(locs.begin(), locs.end());
    if (std::adjacent_find(locs.begin(), locs.end()) != locs.end()) {
        throw MeasureError("atomic: locations must be pairwise distinct");
    }
}

double AtomicMeasure::listed_mass() const {
    double acc = 0.0;
    for (const auto& a : atoms) acc += a.weight;
    return acc;
}

DensityMeasure DensityMeasure::uniform(double lo, double hi, double mass) {
    DensityMeasure d;
    d.lo = lo;
    d.hi = hi;
    d.shape = DensityShape::Uniform;
    d.base_total = d.mass = mass;
    d.validate();
    return d;
}

DensityMeasure DensityMeasure::triangular(double lo, double hi, double mass) {
    DensityMeasure d;
    d.lo = lo;
    d.hi = hi;
    d.shape = DensityShape::Triangular;
    d.base_total = d.mass = mass;
    d.validate();
    return d;
}

DensityMeasure DensityMeasure::piecewise_linear(std::vector<double> nodes,
                                                std::vector<double> values) {
    DensityMeasure d;
    if (nodes.size() < 2) throw MeasureError("density: need at least two nodes");
    d.lo = nodes.front();
    d.hi = nodes.back();
    d.shape = DensityShape::PiecewiseLinear;
    d.nodes = std::move(nodes);
    d.values = std::move(values);
    d.base_total = d.mass = trapezoid(d.nodes, d.values);
    d.validate();
    return d;
}

void DensityMeasure::validate() const {
    if (!finite(lo) || !finite(hi) || !(lo < hi)) {
        throw MeasureError("density: support must satisfy lo < hi");
    }
    if (!finite(mass) || mass <= 0.0) throw MeasureError("density: mass must be > 0");
    if (!finite(base_total) || base_total <= 0.0) {
        throw MeasureError("density: base integral must be > 0");
    }
    if (shape == DensityShape::PiecewiseLinear) {
        if (nodes.size() != values.size() || nodes.size() < 2) {
            throw MeasureError("density: piecewise_linear needs matching nodes/values");
        }
        if (nodes.front() != lo || nodes.back() != hi) {
            throw MeasureError("density: node range must equal the support interval");
        }
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
            if (!(nodes[i] < nodes[i + 1])) {
                throw MeasureError("density: nodes must be strictly increasing");
            }
        }
        for (double v : values) {
            if (!finite(v) || v < 0.0) throw MeasureError("density: values must be >= 0");
        }
        double integral = trapezoid(nodes, values);
        if (std::abs(integral - base_total) > 1e-9 * std::max(1.0, base_total)) {
            throw MeasureError("density: integral of values does not match declared mass");
        }
    }
    if (!weight && std::abs(mass - base_total) > 1e-9 * std::max(1.0, base_total)) {
        throw MeasureError("density: unweighted mass must equal the base integral");
    }
}

double DensityMeasure::base_density_at(double x) const {
    if (x < lo || x > hi) return 0.0;
    switch (shape) {
        case DensityShape::Uniform:
            return base_total / (hi - lo);
        case DensityShape::Triangular: {
            double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
            double peak = base_total / h;  // triangle integral = peak * h
            return peak * std::max(0.0, 1.0 - std::abs(x - c) / h);
        }
        case DensityShape::PiecewiseLinear: {
            auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
            if (it == nodes.begin()) return values.front();
            if (it == nodes.end()) return values.back();
            std::size_t i = static_cast<std::size_t>(it - nodes.begin()) - 1;
            double t = (x - nodes[i]) / (nodes[i + 1] - nodes[i]);
            return values[i] + t * (values[i + 1] - values[i]);
        }
    }
    return 0.0;
}

double DensityMeasure::effective_density_at(double x) const {
    double base = base_density_at(x);
    if (!weight) return base;
    double w = (*weight)(x);
    return base * w * w;
}

bool DensityMeasure::is_weighted() const { return weight.has_value(); }

void BernoulliMeasure::validate() const {
    if (!finite(eta) || !(eta > 0.0 && eta < 1.0)) {
        throw MeasureError("bernoulli: eta must lie in (0,1)");
    }
}

// ------------------------------------------------------------------- measure ---

Measure::Measure(AtomicMeasure m) {
    m.validate();
    terms_.push_back({1.0, std::move(m)});
}

Measure::Measure(DensityMeasure m) {
    m.validate();
    terms_.push_back({1.0, std::move(m)});
}

Measure::Measure(BernoulliMeasure m) {
    m.validate();
    terms_.push_back({1.0, std::move(m)});
}

Measure Measure::mixture(std::vector<std::pair<double, Measure>> parts) {
    Measure out;
    for (auto& [coef, m] : parts) {
        if (!finite(coef) || coef <= 0.0) {
            throw MeasureError("mixture: coefficients must be strictly positive");
        }
        for (auto& term : m.terms_) {
            out.terms_.push_back({coef * term.coefficient, std::move(term.component)});
        }
    }
    return out;
}

bool Measure::is_single_bernoulli() const {
    return terms_.size() == 1 && std::holds_alternative<BernoulliMeasure>(terms_[0].component);
}

bool Measure::has_atomic_part() const {
    return std::any_of(terms_.begin(), terms_.end(), [](const Term& t) {
        return std::holds_alternative<AtomicMeasure>(t.component);
    });
}

std::string Measure::describe() const {
    if (terms_.empty()) return "zero";
    std::ostringstream os;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (i) os << " + ";
        if (terms_[i].coefficient != 1.0) os << format_double(terms_[i].coefficient) << "*";
        std::visit(
            [&os](const auto& c) {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, AtomicMeasure>) {
                    os << "atomic[" << c.atoms.size() << "]";
                } else if constexpr (std::is_same_v<T, DensityMeasure>) {
                    const char* k = c.shape == DensityShape::Uniform     ? "uniform"
                                    : c.shape == DensityShape::Triangular ? "triangular"
                                                                          : "pl";
                    os << k << "[" << format_double(c.lo) << "," << format_double(c.hi)
                       << "]m" << format_double(c.mass);
                } else {
                    os << "bernoulli(" << format_double(c.eta) << ")";
                }
            },
            terms_[i].component);
    }
    return os.str();
}

// ---------------------------------------------------------------- operations ---

namespace {

double component_tv(const MeasureComponent& c) {
    struct Q {
        double operator()(const AtomicMeasure& a) const {
            return a.listed_mass() + a.tail_mass_bound;
        }
        double operator()(const DensityMeasure& d) const { return d.mass; }
        double operator()(const BernoulliMeasure&) const { return 1.0; }
    };
    return std::visit(Q{}, c);
}

}  // namespace

double total_variation(const Measure& mu) {
    double acc = 0.0;
    for (const auto& t : mu.terms()) acc += t.coefficient * component_tv(t.component);
    return acc;
}

namespace {

// clip a density to [a, b]; returns nullopt when the clip has no mass
std::optional<DensityMeasure> clip_density(const DensityMeasure& d, double a, double b) {
    double lo = std::max(a, d.lo), hi = std::min(b, d.hi);
    if (!(lo < hi)) return std::nullopt;
    DensityMeasure out;
    out.lo = lo;
    out.hi = hi;
    out.weight = d.weight;
    if (d.shape == DensityShape::Uniform) {
        out.shape = DensityShape::Uniform;
        out.base_total = d.base_total * (hi - lo) / (d.hi - d.lo);
    } else {
        // triangle and piecewise-linear clips are both piecewise linear
        out.shape = DensityShape::PiecewiseLinear;
        std::vector<double> xs;
        xs.push_back(lo);
        if (d.shape == DensityShape::Triangular) {
            double c = 0.5 * (d.lo + d.hi);
            if (c > lo && c < hi) xs.push_back(c);
        } else {
            for (double x : d.nodes) {
                if (x > lo && x < hi) xs.push_back(x);
            }
        }
        xs.push_back(hi);
        out.nodes = xs;
        for (double x : xs) out.values.push_back(d.base_density_at(x));
        out.base_total = trapezoid(out.nodes, out.values);
    }
    if (!(out.base_total > 0.0)) return std::nullopt;
    if (out.is_weighted()) {
        auto f = [&out](double x) { return out.effective_density_at(x); };
        out.mass = integrate_adaptive_real(f, lo, hi, 1e-12 * std::max(1.0, d.mass), 8);
    } else {
        out.mass = out.base_total;
    }
    if (!(out.mass > 0.0)) return std::nullopt;
    return out;
}

}  // namespace

Measure restrict(const Measure& mu, const BorelSet& A) {
    std::vector<std::pair<double, Measure>> parts;
    for (const auto& term : mu.terms()) {
        std::visit(
            [&](const auto& comp) {
                using T = std::decay_t<decltype(comp)>;
                if constexpr (std::is_same_v<T, AtomicMeasure>) {
                    AtomicMeasure out;
                    out.tail_mass_bound = 0.0;  // omitted atoms have unknown locations
                    for (const auto& atom : comp.atoms) {
                        if (A.contains(atom.location)) out.atoms.push_back(atom);
                    }
                    if (!out.atoms.empty()) parts.push_back({term.coefficient, Measure(out)});
                } else if constexpr (std::is_same_v<T, DensityMeasure>) {
                    for (const auto& cell : A.cells()) {
                        if (auto piece = clip_density(comp, cell.lo, cell.hi)) {
                            parts.push_back({term.coefficient, Measure(*piece)});
                        }
                    }
                } else {  // BernoulliMeasure
                    double r = comp.support_radius();
                    // no-op restriction keeps the exact representation
                    bool covers = false;
                    for (const auto& cell : A.cells()) {
                        if (cell.lo <= -r && cell.hi > r) covers = true;
                    }
                    if (covers) {
                        parts.push_back({term.coefficient, Measure(comp)});
                        return;
                    }
                    for (const auto& cell : A.cells()) {
                        Measure tab = bernoulli_tabulate(comp, cell.lo, cell.hi,
                                                         kBernoulliTabulateDepth);
                        if (!tab.is_zero()) parts.push_back({term.coefficient, tab});
                    }
                }
            },
            term.component);
    }
    if (parts.empty()) return Measure();
    return Measure::mixture(std::move(parts));
}

Measure restrict_nonzero(const Measure& mu, const BorelSet& A) {
    Measure out = restrict(mu, A);
    if (out.is_zero()) {
        throw MeasureError("restrict: restriction to the given set is the zero measure");
    }
    return out;
}

Measure amplitude_weight(const Measure& mu, const AmplitudeProfile& u) {
    std::vector<std::pair<double, Measure>> parts;
    for (const auto& term : mu.terms()) {
        std::visit(
            [&](const auto& comp) {
                using T = std::decay_t<decltype(comp)>;
                if constexpr (std::is_same_v<T, AtomicMeasure>) {
                    AtomicMeasure out;
                    for (const auto& atom : comp.atoms) {
                        double w = u(atom.location);
                        if (w * w * atom.weight > 0.0) {
                            out.atoms.push_back({atom.location, atom.weight * w * w});
                        }
                    }
                    if (comp.tail_mass_bound > 0.0) {
                        if (!u.is_bounded()) {
                            throw MeasureError(
                                "amplitude_weight: unbounded profile against a declared "
                                "atomic tail; weighted mass cannot be certified");
                        }
                        double s = u.bound();
                        out.tail_mass_bound = comp.tail_mass_bound * s * s;
                    }
                    if (!out.atoms.empty() || out.tail_mass_bound > 0.0) {
                        if (out.atoms.empty()) {
                            throw MeasureError(
                                "amplitude_weight: profile annihilates all listed atoms "
                                "but a tail bound remains");
                        }
                        parts.push_back({term.coefficient, Measure(out)});
                    }
                } else if constexpr (std::is_same_v<T, DensityMeasure>) {
                    DensityMeasure out = comp;
                    out.weight = comp.weight
                                     ? AmplitudeProfile::product({*comp.weight, u})
                                     : u;
                    auto f = [&out](double x) { return out.effective_density_at(x); };
                    out.mass = integrate_adaptive_real(f, out.lo, out.hi,
                                                       1e-12 * std::max(1.0, comp.mass), 8);
                    if (!std::isfinite(out.mass)) {
                        throw MeasureError("amplitude_weight: weighted mass is not finite");
                    }
                    if (out.mass > 0.0) parts.push_back({term.coefficient, Measure(out)});
                } else {  // BernoulliMeasure
                    if (u.is_constant()) {
                        double c = u.constant_value();
                        if (c > 0.0) {
                            parts.push_back({term.coefficient * c * c, Measure(comp)});
                        }
                    } else {
                        double r = comp.support_radius();
                        Measure tab = bernoulli_tabulate(comp, -r, r, kBernoulliTabulateDepth, &u);
                        if (!tab.is_zero()) parts.push_back({term.coefficient, tab});
                    }
                }
            },
            term.component);
    }
    if (parts.empty()) return Measure();
    return Measure::mixture(std::move(parts));
}

Interval support_interval(const Measure& mu) {
    if (mu.is_zero()) throw MeasureError("support_interval: zero measure");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& term : mu.terms()) {
        std::visit(
            [&](const auto& comp) {
                using T = std::decay_t<decltype(comp)>;
                if constexpr (std::is_same_v<T, AtomicMeasure>) {
                    for (const auto& a : comp.atoms) {
                        lo = std::min(lo, a.location);
                        hi = std::max(hi, a.location);
                    }
                } else if constexpr (std::is_same_v<T, DensityMeasure>) {
                    lo = std::min(lo, comp.lo);
                    hi = std::max(hi, comp.hi);
                } else {
                    double r = comp.support_radius();
                    lo = std::min(lo, -r);
                    hi = std::max(hi, r);
                }
            },
            term.component);
    }
    return {lo, hi};
}

// ------------------------------------------------- Bernoulli cell machinery ---

namespace {

struct DigitTreeScan {
    double eta;
    std::span<const double> xs;
    std::vector<double> suffix_add;  // suffix_add[i]: add to F[j] for all j >= i
    std::vector<double> pow_eta;     // eta^k, k = 0..kBernoulliDigitDepth+2
    long nodes_visited = 0;
    static constexpr long kNodeBudget = 10'000'000;

    explicit DigitTreeScan(double eta_, std::span<const double> xs_) : eta(eta_), xs(xs_) {
        suffix_add.assign(xs.size() + 1, 0.0);
        pow_eta.resize(kBernoulliDigitDepth + 3);
        pow_eta[0] = 1.0;
        for (std::size_t k = 1; k < pow_eta.size(); ++k) pow_eta[k] = pow_eta[k - 1] * eta;
    }

    // node: signs chosen through depth j, partial sum s, mass p = 2^-j.
    // remaining digits span [s - R, s + R] with R = eta^{j+1}/(1-eta).
    void visit(int depth, double p, double s, std::size_t ilo, std::size_t ihi) {
        if (++nodes_visited > kNodeBudget) {
            throw MeasureError("bernoulli tabulation: digit tree too wide (eta near 1?)");
        }
        double radius = pow_eta[depth + 1] / (1.0 - eta);
        double lo = s - radius, hi = s + radius;
        while (ilo < ihi && xs[ilo] <= lo) ++ilo;
        std::size_t cut = ihi;
        while (cut > ilo && xs[cut - 1] > hi) --cut;
        // boundaries with index >= cut lie strictly above the node: full mass
        suffix_add[cut] += p;
        if (ilo >= cut) return;  // nothing straddles this node
        if (depth >= kBernoulliDigitDepth) {
            // collapse remaining digits to a point at s
            std::size_t k = ilo;
            while (k < cut && xs[k] <= s) ++k;
            suffix_add[cut] -= p;  // replace the full-mass credit
            suffix_add[k] += p;
            return;
        }
        suffix_add[cut] -= p;
        double step = pow_eta[depth + 1];
        visit(depth + 1, 0.5 * p, s - step, ilo, cut);
        visit(depth + 1, 0.5 * p, s + step, ilo, cut);
    }
};

}  // namespace

std::vector<double> bernoulli_cdf(double eta, std::span<const double> boundaries) {
    BernoulliMeasure{eta}.validate();
    for (std::size_t i = 0; i + 1 < boundaries.size(); ++i) {
        if (!(boundaries[i] <= boundaries[i + 1])) {
            throw MeasureError("bernoulli_cdf: boundaries must be sorted");
        }
    }
    DigitTreeScan scan(eta, boundaries);
    scan.visit(0, 1.0, 0.0, 0, boundaries.size());
    std::vector<double> cdf(boundaries.size());
    // F[i] = sum of suffix_add[0..i]; suffix_add[j] contributes to all F[i>=j]
    double acc = 0.0;
    // suffix_add[k] means "add to F[i] for i >= k"; accumulate left to right
    for (std::size_t i = 0; i < boundaries.size(); ++i) {
        acc += scan.suffix_add[i];
        cdf[i] = acc;
    }
    return cdf;
}

double bernoulli_interval_mass(double eta, double lo, double hi) {
    if (!(lo < hi)) return 0.0;
    double bounds[2] = {lo, hi};
    auto cdf = bernoulli_cdf(eta, bounds);
    return std::max(0.0, cdf[1] - cdf[0]);
}

Measure bernoulli_tabulate(const BernoulliMeasure& b, double lo, double hi, int depth,
                           const AmplitudeProfile* profile) {
    b.validate();
    depth = std::clamp(depth, 1, 20);
    double r = b.support_radius();
    double clo = std::max(lo, -r), chi = std::min(hi, r);
    if (!(clo < chi)) return Measure();

    std::size_t cells = std::size_t(1) << depth;
    std::vector<double> bounds(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) {
        bounds[i] = clo + (chi - clo) * static_cast<double>(i) / static_cast<double>(cells);
    }
    auto cdf = bernoulli_cdf(b.eta, bounds);

    double width = (chi - clo) / static_cast<double>(cells);
    std::vector<double> level(cells);
    double target_mass = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
        double m = std::max(0.0, cdf[i + 1] - cdf[i]);
        if (profile) {
            double mid = 0.5 * (bounds[i] + bounds[i + 1]);
            double w = (*profile)(mid);
            m *= w * w;
        }
        target_mass += m;
        level[i] = m / width;
    }
    if (!(target_mass > 0.0)) return Measure();

    // piecewise-linear density through cell midpoints, flat half-cells at the
    // ends, rescaled so the integral equals the cell-mass total exactly
    DensityMeasure d;
    d.lo = clo;
    d.hi = chi;
    d.shape = DensityShape::PiecewiseLinear;
    d.nodes.reserve(cells + 2);
    d.values.reserve(cells + 2);
    d.nodes.push_back(clo);
    d.values.push_back(level.front());
    for (std::size_t i = 0; i < cells; ++i) {
        d.nodes.push_back(0.5 * (bounds[i] + bounds[i + 1]));
        d.values.push_back(level[i]);
    }
    d.nodes.push_back(chi);
    d.values.push_back(level.back());
    double integral = trapezoid(d.nodes, d.values);
    if (!(integral > 0.0)) return Measure();
    double scale = target_mass / integral;
    for (double& v : d.values) v *= scale;
    d.base_total = trapezoid(d.nodes, d.values);
    d.mass = d.base_total;
    return Measure(d);
}

}  // namespace torusflow
