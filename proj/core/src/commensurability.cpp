#include "torusflow/commensurability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "torusflow/numerics.hpp"

namespace torusflow {

// ---------------------------------------------------------------- frequency ---

Frequency Frequency::exact(mpq_class r) {
    r.canonicalize();
    if (r <= 0) throw MeasureError("frequency: must be positive");
    Frequency f;
    f.value_ = r.get_d();
    f.exact_ = std::move(r);
    return f;
}

Frequency Frequency::exact(long num, long den) { return exact(mpq_class(num, den)); }

Frequency Frequency::real(double v, std::string label) {
    if (!(v > 0.0) || !std::isfinite(v)) throw MeasureError("frequency: must be positive");
    Frequency f;
    f.value_ = v;
    f.label_ = std::move(label);
    return f;
}

const mpq_class& Frequency::rational() const {
    if (!exact_) throw MeasureError("frequency: not exact rational");
    return *exact_;
}

Frequency parse_frequency(const std::string& text) {
    if (text == "sqrt2") return Frequency::real(std::sqrt(2.0), text);
    if (text == "sqrt3") return Frequency::real(std::sqrt(3.0), text);
    if (text == "sqrt5") return Frequency::real(std::sqrt(5.0), text);
    if (text == "pi") return Frequency::real(kPi, text);
    if (text == "e") return Frequency::real(std::exp(1.0), text);
    if (text == "golden") return Frequency::real(0.5 * (1.0 + std::sqrt(5.0)), text);
    if (text == "1+sqrt2") return Frequency::real(1.0 + std::sqrt(2.0), text);
    bool rational_literal = !text.empty() &&
                            text.find('.') == std::string::npos &&
                            text.find('e') == std::string::npos &&
                            text.find('E') == std::string::npos;
    if (rational_literal) {
        try {
            return Frequency::exact(mpq_class(text));
        } catch (const std::invalid_argument&) {
            throw MeasureError("frequency: cannot parse '" + text + "'");
        }
    }
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (end == nullptr || *end != '\0') {
        throw MeasureError("frequency: cannot parse '" + text + "'");
    }
    return Frequency::real(v, text);
}

mpq_class rational_gcd(const mpq_class& a, const mpq_class& b) {
    mpz_class x = a.get_num() * b.get_den();
    mpz_class y = b.get_num() * a.get_den();
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
    mpq_class out(g, a.get_den() * b.get_den());
    out.canonicalize();
    return out;
}

// ----------------------------------------------------- rational reconstruction ---

RationalFit reconstruct_rational(double x, long long denominator_bound) {
    RationalFit fit;
    if (!(x > 0.0) || !std::isfinite(x)) {
        fit.status = RationalFit::Status::Undecided;
        return fit;
    }
    // quotient >= kHardStop terminates the expansion (exact rational in fp);
    // quotients in [kGray, kHardStop) are ambiguous evidence
    constexpr double kHardStop = 1e8;
    constexpr double kGray = 1e4;

    mpz_class h2 = 0, h1 = 1;  // numerator recurrence
    mpz_class k2 = 1, k1 = 0;  // denominator recurrence
    double y = x;
    bool gray = false;
    for (int iter = 0; iter < 80; ++iter) {
        double af = std::floor(y);
        if (af > 9e17) break;  // over any plausible bound
        mpz_class a(static_cast<long>(af));
        mpz_class h = a * h1 + h2;
        mpz_class k = a * k1 + k2;
        if (k > static_cast<long>(denominator_bound)) break;
        double frac = y - af;
        double approx = mpq_class(h, k).get_d();
        double resid = std::abs(x - approx) / x;
        if (frac <= 0.0) {  // expansion terminated exactly
            if (resid <= 1e-12) {
                fit.status = RationalFit::Status::Rational;
                fit.value = mpq_class(h, k);
                fit.value.canonicalize();
                fit.residual = resid;
                return fit;
            }
            break;
        }
        double next_quotient = 1.0 / frac;
        fit.max_quotient_seen =
            std::max(fit.max_quotient_seen,
                     static_cast<long long>(std::min(next_quotient, 9e17)));
        if (next_quotient >= kHardStop && resid <= 1e-12) {
            fit.status = RationalFit::Status::Rational;
            fit.value = mpq_class(h, k);
            fit.value.canonicalize();
            fit.residual = resid;
            return fit;
        }
        if (next_quotient >= kGray && resid <= 1e-12) gray = true;
        fit.residual = resid;
        h2 = h1;
        h1 = h;
        k2 = k1;
        k1 = k;
        y = 1.0 / frac;
    }
    fit.status = gray ? RationalFit::Status::Undecided : RationalFit::Status::Irrational;
    return fit;
}

// ----------------------------------------------------------- relation search ---

namespace {

// exhaustive pair search via continued-fraction best approximations of the
// ratio (ordered so the ratio is <= 1, which keeps both coefficients bounded
// by the height)
std::optional<std::pair<long long, long long>> pair_relation(double x, double y,
                                                             long long height,
                                                             double tol_abs) {
    bool swapped = x > y;
    double lo = swapped ? y : x, hi = swapped ? x : y;  // ratio lo/hi <= 1
    double r = lo / hi;
    long long h2 = 0, h1 = 1, k2 = 1, k1 = 0;
    double yv = r;
    for (int iter = 0; iter < 80; ++iter) {
        double af = std::floor(yv);
        if (af > static_cast<double>(height)) break;
        long long a = static_cast<long long>(af);
        long long h = a * h1 + h2;
        long long k = a * k1 + k2;
        if (k > height || h > height) break;
        if (k > 0) {
            // candidate relation k*lo - h*hi = 0
            double resid = std::abs(k * lo - h * hi);
            if (resid < tol_abs && (h != 0 || k != 0)) {
                long long c_lo = k, c_hi = -h;
                if (swapped) return std::make_pair(c_hi, c_lo);
                return std::make_pair(c_lo, c_hi);
            }
        }
        double frac = yv - af;
        if (frac <= 1e-18) break;
        h2 = h1;
        h1 = h;
        k2 = k1;
        k1 = k;
        yv = 1.0 / frac;
    }
    return std::nullopt;
}

// ----------------------------------------------------------------- LLL core ---

struct IntBasis {
    int rows = 0, cols = 0;
    std::vector<std::vector<long long>> v;
};

bool entries_sane(const IntBasis& b) {
    constexpr long long kLimit = 1'000'000'000'000'000'000LL;  // 1e18
    for (const auto& row : b.v) {
        for (long long e : row) {
            if (e > kLimit || e < -kLimit) return false;
        }
    }
    return true;
}

// Gram-Schmidt in long double over the exact integer basis.
void gso(const IntBasis& b, std::vector<std::vector<long double>>& mu,
         std::vector<long double>& norms) {
    int d = b.rows, m = b.cols;
    std::vector<std::vector<long double>> star(d, std::vector<long double>(m));
    mu.assign(d, std::vector<long double>(d, 0.0L));
    norms.assign(d, 0.0L);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < m; ++j) star[i][j] = static_cast<long double>(b.v[i][j]);
        for (int j = 0; j < i; ++j) {
            long double num = 0.0L;
            for (int k = 0; k < m; ++k) {
                num += static_cast<long double>(b.v[i][k]) * star[j][k];
            }
            long double m_ij = norms[j] > 0.0L ? num / norms[j] : 0.0L;
            mu[i][j] = m_ij;
            for (int k = 0; k < m; ++k) star[i][k] -= m_ij * star[j][k];
        }
        long double n2 = 0.0L;
        for (int k = 0; k < m; ++k) n2 += star[i][k] * star[i][k];
        norms[i] = n2;
    }
}

// Plain LLL with delta = 0.99; returns false if entries blow past the guard.
bool lll_reduce(IntBasis& b) {
    const long double delta = 0.99L;
    std::vector<std::vector<long double>> mu;
    std::vector<long double> norms;
    gso(b, mu, norms);
    int k = 1;
    long iter = 0;
    while (k < b.rows) {
        if (++iter > 500000) break;
        // size-reduce row k
        bool changed = false;
        for (int j = k - 1; j >= 0; --j) {
            long double q = std::floor(mu[k][j] + 0.5L);
            if (q != 0.0L) {
                long long qi = static_cast<long long>(q);
                for (int c = 0; c < b.cols; ++c) b.v[k][c] -= qi * b.v[j][c];
                changed = true;
            }
        }
        if (changed) {
            if (!entries_sane(b)) return false;
            gso(b, mu, norms);
        }
        long double lhs = norms[k];
        long double rhs = (delta - mu[k][k - 1] * mu[k][k - 1]) * norms[k - 1];
        if (lhs >= rhs) {
            ++k;
        } else {
            std::swap(b.v[k], b.v[k - 1]);
            gso(b, mu, norms);
            k = std::max(1, k - 1);
        }
    }
    return true;
}

std::optional<RelationWitness> witness_from_coeffs(const std::vector<long long>& coeffs,
                                                   const std::vector<double>& vals,
                                                   long long height, double tol_abs) {
    bool nonzero = false;
    long long hmax = 0;
    long double resid = 0.0L;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (coeffs[i] != 0) nonzero = true;
        hmax = std::max(hmax, std::llabs(coeffs[i]));
        resid += static_cast<long double>(coeffs[i]) * vals[i];
    }
    if (!nonzero || hmax > height) return std::nullopt;
    double r = static_cast<double>(std::abs(resid));
    if (r >= tol_abs) return std::nullopt;
    RelationWitness w;
    int sign = 0;  // normalize: first nonzero coefficient positive
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (coeffs[i] != 0) {
            if (sign == 0) sign = coeffs[i] > 0 ? 1 : -1;
            w.coefficients.emplace_back(static_cast<long>(sign * coeffs[i]));
            w.indices.push_back(i);
        }
    }
    w.height = static_cast<long>(hmax);
    w.residual = r;
    return w;
}

}  // namespace

RelationSearchReport rational_relation_report(const std::vector<Frequency>& freqs,
                                              long long height) {
    if (height < 1) throw MeasureError("rational_relation: height must be >= 1");
    if (freqs.size() < 2) throw MeasureError("rational_relation: need at least 2 frequencies");
    RelationSearchReport report;
    report.height_bound = height;

    // exact rationals are always dependent pairwise: clear denominators
    std::vector<std::size_t> exact_idx;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        if (freqs[i].is_exact()) exact_idx.push_back(i);
    }
    if (exact_idx.size() >= 2) {
        const mpq_class& a = freqs[exact_idx[0]].rational();
        const mpq_class& b = freqs[exact_idx[1]].rational();
        mpz_class ca = b.get_num() * a.get_den();
        mpz_class cb = -(a.get_num() * b.get_den());
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), ca.get_mpz_t(), cb.get_mpz_t());
        if (g > 0) {
            ca /= g;
            cb /= g;
        }
        if (ca < 0) {  // first coefficient positive
            ca = -ca;
            cb = -cb;
        }
        RelationWitness w;
        w.coefficients = {ca, cb};
        w.indices = {exact_idx[0], exact_idx[1]};
        w.height = ca > 0 ? ca : mpz_class(-ca);
        if (cb > w.height) w.height = cb;
        if (-cb > w.height) w.height = -cb;
        w.residual = 0.0;
        report.witness = std::move(w);
        report.exhaustive = true;
        return report;
    }

    if (freqs.size() > 12) {
        throw MeasureError("rational_relation: real-valued search limited to 12 frequencies");
    }
    std::vector<double> vals;
    vals.reserve(freqs.size());
    double vmax = 0.0;
    for (const auto& f : freqs) {
        vals.push_back(f.value());
        vmax = std::max(vmax, f.value());
    }
    const double tol_abs = 1e-9 * vmax;

    // all-pairs continued-fraction search: exhaustive per pair
    for (std::size_t i = 0; i < vals.size(); ++i) {
        for (std::size_t j = i + 1; j < vals.size(); ++j) {
            if (auto pr = pair_relation(vals[i], vals[j], height, tol_abs)) {
                std::vector<long long> coeffs(vals.size(), 0);
                coeffs[i] = pr->first;
                coeffs[j] = pr->second;
                if (auto w = witness_from_coeffs(coeffs, vals, height, tol_abs)) {
                    report.witness = std::move(w);
                    report.exhaustive = true;
                    return report;
                }
            }
        }
    }
    if (vals.size() == 2) {
        report.exhaustive = true;  // pair search is decisive up to the height
        return report;
    }

    // lattice reduction candidates
    {
        const int n = static_cast<int>(vals.size());
        // scale so a true relation maps to a short lattice vector
        double scale_cap = 5e16 / vmax;
        double scale = std::min(static_cast<double>(height) / tol_abs, scale_cap);
        IntBasis basis;
        basis.rows = n;
        basis.cols = n + 1;
        basis.v.assign(n, std::vector<long long>(n + 1, 0));
        for (int i = 0; i < n; ++i) {
            basis.v[i][i] = 1;
            basis.v[i][n] = static_cast<long long>(std::llround(vals[i] * scale));
        }
        if (lll_reduce(basis)) {
            std::optional<RelationWitness> best;
            for (int i = 0; i < n; ++i) {
                std::vector<long long> coeffs(basis.v[i].begin(), basis.v[i].end() - 1);
                auto w = witness_from_coeffs(coeffs, vals, height, tol_abs);
                if (w && (!best || w->height < best->height)) best = std::move(w);
            }
            if (best) {
                report.witness = std::move(best);
                report.exhaustive = false;
                return report;
            }
        }
    }

    // brute-force fallback certifies small heights for triples
    if (vals.size() == 3) {
        long long cap = std::min<long long>(height, 2000);
        for (long long n1 = 0; n1 <= cap; ++n1) {
            for (long long n2 = (n1 == 0 ? 0 : -cap); n2 <= cap; ++n2) {
                double partial = n1 * vals[0] + n2 * vals[1];
                long long n3 = static_cast<long long>(std::llround(-partial / vals[2]));
                if (std::llabs(n3) > cap) continue;
                if (n1 == 0 && n2 == 0 && n3 == 0) continue;
                std::vector<long long> coeffs{n1, n2, n3};
                if (auto w = witness_from_coeffs(coeffs, vals, height, tol_abs)) {
                    report.witness = std::move(w);
                    report.exhaustive = true;
                    return report;
                }
            }
        }
        report.exhaustive = (cap == height);
    }
    return report;
}

std::optional<RelationWitness> rational_relation(const std::vector<Frequency>& freqs,
                                                 long long height) {
    return rational_relation_report(freqs, height).witness;
}

// -------------------------------------------------- strong commensurability ---

StrongCommensurability strong_commensurate(const std::vector<Frequency>& freqs) {
    if (freqs.size() < 2) {
        throw MeasureError("strong_commensurate: need at least 2 frequencies");
    }
    StrongCommensurability out;
    out.denominator_bound = 1'000'000'000LL;
    bool undecided = false;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        for (std::size_t j = i + 1; j < freqs.size(); ++j) {
            if (freqs[i].is_exact() && freqs[j].is_exact()) continue;
            double ratio = freqs[i].value() / freqs[j].value();
            RationalFit fit = reconstruct_rational(ratio, out.denominator_bound);
            switch (fit.status) {
                case RationalFit::Status::Rational:
                    break;
                case RationalFit::Status::Irrational:
                    out.verdict = StrongCommensurability::Verdict::No;
                    out.witness_pair = std::make_pair(i, j);
                    return out;
                case RationalFit::Status::Undecided:
                    undecided = true;
                    break;
            }
        }
    }
    out.verdict = undecided ? StrongCommensurability::Verdict::Undecided
                            : StrongCommensurability::Verdict::Yes;
    return out;
}

// ----------------------------------------------------------- periodicity base ---

double PeriodicityBase::period() const { return kTwoPi / lambda0.get_d(); }

PeriodicityBase periodicity_base(const std::vector<mpq_class>& freqs) {
    if (freqs.empty()) throw MeasureError("periodicity_base: empty frequency list");
    for (const auto& f : freqs) {
        if (f <= 0) throw MeasureError("periodicity_base: frequencies must be positive");
    }
    mpq_class g = freqs[0];
    for (std::size_t i = 1; i < freqs.size(); ++i) g = rational_gcd(g, freqs[i]);
    PeriodicityBase base;
    base.lambda0 = g;
    base.prefix_length = freqs.size();
    for (const auto& f : freqs) {
        mpq_class ratio = f / g;
        ratio.canonicalize();
        if (ratio.get_den() != 1) {
            throw MeasureError("periodicity_base: gcd does not divide a frequency");
        }
        base.multipliers.push_back(ratio.get_num());
    }
    return base;
}

PeriodicityBase periodicity_base(const std::vector<Frequency>& freqs) {
    std::vector<mpq_class> rats;
    rats.reserve(freqs.size());
    for (const auto& f : freqs) {
        if (!f.is_exact()) {
            throw MeasureError(
                "periodicity_base: real-valued input; decide commensurability first");
        }
        rats.push_back(f.rational());
    }
    return periodicity_base(rats);
}

// -------------------------------------------------------------------- Jacobi ---

JacobiClassification jacobi_classify(const std::vector<Frequency>& freqs, long long height) {
    if (freqs.size() < 2 || freqs.size() > 12) {
        throw MeasureError("jacobi_classify: need 2..12 frequencies");
    }
    JacobiClassification out;
    out.height_bound = height;
    StrongCommensurability sc = strong_commensurate(freqs);
    if (sc.verdict == StrongCommensurability::Verdict::Yes) {
        out.kind = JacobiClassification::Kind::PeriodicAll;
        out.exhaustive = true;
        return out;
    }
    RelationSearchReport rel = rational_relation_report(freqs, height);
    out.exhaustive = rel.exhaustive;
    if (sc.verdict == StrongCommensurability::Verdict::Undecided) {
        out.kind = JacobiClassification::Kind::ResonantMixed;
        out.witness = rel.witness;
        out.undecided_commensurability = true;
        return out;
    }
    if (!rel.witness) {
        out.kind = JacobiClassification::Kind::DenseOnTorus;
        return out;
    }
    out.kind = JacobiClassification::Kind::ResonantMixed;
    out.witness = rel.witness;
    return out;
}

}  // namespace torusflow
