#include "torusflow/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "torusflow/numerics.hpp"
#include "torusflow/parallel.hpp"

namespace torusflow {

// -------------------------------------------------------- wandering certificate ---

std::optional<WanderingCertificate> wandering_certificate(const Measure& mu_u, double margin,
                                                          const WanderingOptions& opts) {
    if (mu_u.is_zero()) throw MeasureError("wandering_certificate: zero measure");
    if (!(margin > 0.0 && margin < 1.0)) {
        throw MeasureError("wandering_certificate: margin must lie in (0,1)");
    }
    const double tv = total_variation(mu_u);
    const double threshold = (1.0 - margin) * tv;
    DecayBound bound = analytic_decay_bound(mu_u);

    WanderingCertificate cert;
    cert.measure_id = opts.measure_id.empty() ? mu_u.describe() : opts.measure_id;

    if (bound.ceiling < threshold && std::isfinite(bound.valid_from)) {
        // displacement^2 = 2||mu|| - 2 Re mu^ >= 2||mu|| - 2(ceiling + c/t)
        // exceeds delta^2 = ||mu|| - ceiling once t > 2c/(||mu|| - ceiling)
        cert.delta = std::sqrt(tv - bound.ceiling);
        double onset = bound.envelope_c > 0.0
                           ? 2.0 * bound.envelope_c / (tv - bound.ceiling)
                           : 0.0;
        cert.T = std::max(bound.valid_from, onset);
        cert.basis = WanderingCertificate::Basis::AnalyticBound;
        cert.ceiling = bound.ceiling;
        cert.convention = bound.convention;
        return cert;
    }

    if (bound.kind == BoundKind::Exact) {
        // pure point measure: limsup |mu^| can reach ||mu||, no certificate
        return std::nullopt;
    }

    Convention conv = natural_convention(mu_u);
    double sampled =
        limsup_estimate(mu_u, opts.window_lo, opts.window_hi, opts.samples, conv);
    if (!(sampled < threshold)) return std::nullopt;
    cert.delta = std::sqrt(tv - sampled);
    const double delta_sq = tv - sampled;
    // largest sampled t whose displacement still dips under delta^2
    auto grid = log_spaced(opts.window_lo, opts.window_hi, opts.samples);
    double t_last = opts.window_lo;
    for (double t : grid) {
        if (displacement_sq(mu_u, t, conv) < delta_sq) t_last = t;
    }
    cert.T = t_last;
    cert.basis = WanderingCertificate::Basis::SampledEstimate;
    cert.ceiling = sampled;
    cert.window_lo = opts.window_lo;
    cert.window_hi = opts.window_hi;
    cert.samples = opts.samples;
    cert.convention = conv;
    return cert;
}

// ----------------------------------------------------------------- recurrence ---

namespace {

// golden-section minimization of f on [a, b]
template <typename F>
std::pair<double, double> golden_min(F&& f, double a, double b, int iters = 80) {
    const double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters && (b - a) > 1e-13 * std::max(1.0, std::abs(b)); ++i) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

}  // namespace

RecurrenceReport recurrence_search(const CountableState& state, double epsilon, double t_min,
                                   double t_max) {
    if (!(epsilon > 0.0)) throw FlowError("recurrence_search: epsilon must be > 0");
    if (!(t_min < t_max)) throw FlowError("recurrence_search: need t_min < t_max");
    const auto& radii = state.torus().radii();
    const auto& lambda = state.lambda();
    if (state.torus().tail_energy_bound() >= epsilon * epsilon / 8.0) {
        throw FlowError(
            "recurrence_search: torus tail energy exceeds eps^2/8; extend the prefix");
    }

    double lam_max = 0.0;
    double slope_sq = 0.0;  // sum lambda^2 r^2: Lipschitz bound for the distance
    for (std::size_t k = 0; k < lambda.size(); ++k) {
        lam_max = std::max(lam_max, std::abs(lambda[k]));
        slope_sq += lambda[k] * lambda[k] * radii[k] * radii[k];
    }
    double step = lam_max > 0.0 ? kPi / (4.0 * lam_max) : (t_max - t_min) / 1024.0;
    std::size_t points = static_cast<std::size_t>(std::ceil((t_max - 0.0) / step)) + 1;
    if (points > 80'000'000) {
        throw FlowError("recurrence_search: scan grid too large for this horizon");
    }

    auto dist_at = [&radii, &lambda](double t) {
        double acc = 0.0;
        for (std::size_t k = 0; k < lambda.size(); ++k) {
            double s = std::sin(0.5 * std::fmod(lambda[k] * t, kTwoPi));
            acc += 4.0 * radii[k] * radii[k] * s * s;
        }
        return std::sqrt(acc);
    };

    std::vector<double> d(points);
    parallel_for(points, [&](std::size_t i) { d[i] = dist_at(i * step); });

    RecurrenceReport report;
    report.epsilon = epsilon;
    report.t_min = t_min;
    report.scan_horizon = t_max;
    report.scan_step = step;
    report.tail_distance_allowance = state.torus().tail_distance_bound();

    // a well of depth < eps can hide between grid points; refine every local
    // minimum that could reach it given the Lipschitz slope
    const double refine_threshold = epsilon + std::sqrt(slope_sq) * step;
    for (std::size_t i = 1; i + 1 < points; ++i) {
        if (d[i] > refine_threshold) continue;
        if (!(d[i] <= d[i - 1] && d[i] <= d[i + 1])) continue;
        auto [t_star, d_star] = golden_min(dist_at, (i - 1) * step, (i + 1) * step);
        if (d_star < epsilon && t_star > t_min && t_star <= t_max) {
            report.return_times.push_back({t_star, d_star});
        }
    }
    std::sort(report.return_times.begin(), report.return_times.end(),
              [](const auto& a, const auto& b) { return a.t < b.t; });
    // merge refinements that converged into the same well
    std::vector<RecurrenceReport::Return> merged;
    for (const auto& r : report.return_times) {
        if (!merged.empty() && std::abs(r.t - merged.back().t) < 0.5 * step) {
            if (r.distance < merged.back().distance) merged.back() = r;
        } else {
            merged.push_back(r);
        }
    }
    report.return_times = std::move(merged);
    report.verdict = report.return_times.empty()
                         ? RecurrenceReport::Verdict::NoneFoundWithinHorizon
                         : RecurrenceReport::Verdict::ReturnsFound;
    return report;
}

RecurrenceReport recurrence_search(const CountableState& state, const FrequencySpec& spec,
                                   double epsilon, double t_min, double t_max) {
    for (std::size_t k = 0; k < state.modes(); ++k) {
        if (spec.at_mode(k + 1) != state.lambda()[k]) {
            throw FlowError("recurrence_search: frequency spec does not match the state");
        }
    }
    return recurrence_search(state, epsilon, t_min, t_max);
}

// ------------------------------------------------------------------- taxonomy ---

TrajectoryClass classify_trajectory(const FrequencySpec& freqs,
                                    const std::vector<std::size_t>& prefixes,
                                    const CountableTorus& torus) {
    if (prefixes.empty()) throw FlowError("classify_trajectory: no prefixes given");
    for (std::size_t i = 0; i + 1 < prefixes.size(); ++i) {
        if (!(prefixes[i] < prefixes[i + 1])) {
            throw FlowError("classify_trajectory: prefixes must be strictly increasing");
        }
    }
    const std::size_t n_max = prefixes.back();
    if (n_max < 1) throw FlowError("classify_trajectory: empty prefix");
    if (torus.modes() < n_max) {
        throw FlowError("classify_trajectory: torus prefix shorter than the frequency prefix");
    }
    if (!torus.non_degenerate()) {
        throw FlowError("classify_trajectory: degenerate torus (some radius vanishes)");
    }

    std::vector<Frequency> fs = freqs.prefix(n_max);

    TrajectoryClass out;
    out.prefixes.assign(prefixes.begin(), prefixes.end());
    constexpr long long kDenomBound = 1'000'000'000LL;

    // Type II: any pair with irrational ratio makes a dense 4d projection
    bool undecided_ratio = false;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        for (std::size_t j = i + 1; j < fs.size(); ++j) {
            if (fs[i].is_exact() && fs[j].is_exact()) continue;
            RationalFit fit = reconstruct_rational(fs[i].value() / fs[j].value(), kDenomBound);
            if (fit.status == RationalFit::Status::Irrational) {
                out.kind = TrajectoryClass::Kind::TypeII;
                out.confidence = TrajectoryClass::Confidence::HeightBounded;
                out.height_bound = kDenomBound;
                out.dense_pair = std::make_pair(i, j);
                return out;
            }
            if (fit.status == RationalFit::Status::Undecided) undecided_ratio = true;
        }
    }

    // commensurate prefixes: track lambda0 across the nested prefixes
    bool all_exact = std::all_of(fs.begin(), fs.end(),
                                 [](const Frequency& f) { return f.is_exact(); });
    std::vector<mpq_class> exact_values;
    double scale = 1.0;  // lambda0 = gcd(ratios) * scale in the reconstructed path
    if (all_exact) {
        for (const auto& f : fs) exact_values.push_back(f.rational());
    } else {
        // rebuild exact ratios against the first frequency
        exact_values.emplace_back(1);
        for (std::size_t k = 1; k < fs.size(); ++k) {
            if (fs[k].is_exact() && fs[0].is_exact()) {
                exact_values.push_back(fs[k].rational() / fs[0].rational());
            } else {
                RationalFit fit =
                    reconstruct_rational(fs[k].value() / fs[0].value(), kDenomBound);
                if (fit.status != RationalFit::Status::Rational) {
                    undecided_ratio = true;
                    exact_values.emplace_back(1);  // placeholder; verdict is undecided
                    continue;
                }
                exact_values.push_back(fit.value);
            }
        }
        scale = fs[0].value();
    }

    std::vector<mpq_class> lambda0_per_prefix;
    for (std::size_t p : prefixes) {
        std::vector<mpq_class> head(exact_values.begin(), exact_values.begin() + p);
        lambda0_per_prefix.push_back(periodicity_base(head).lambda0);
    }

    bool strictly_decreasing = lambda0_per_prefix.size() >= 3;
    for (std::size_t i = 0; i + 1 < lambda0_per_prefix.size(); ++i) {
        if (!(lambda0_per_prefix[i + 1] < lambda0_per_prefix[i])) strictly_decreasing = false;
    }

    out.confidence = (all_exact && !undecided_ratio) ? TrajectoryClass::Confidence::Exact
                                                     : TrajectoryClass::Confidence::HeightBounded;
    if (out.confidence == TrajectoryClass::Confidence::HeightBounded) {
        out.height_bound = kDenomBound;
    }

    if (strictly_decreasing && !undecided_ratio) {
        out.kind = TrajectoryClass::Kind::TypeIII;
        for (std::size_t i = 0; i < prefixes.size(); ++i) {
            const mpq_class& l0 = lambda0_per_prefix[i];
            out.prefix_periods.push_back(kTwoPi / (l0.get_d() * scale));
            if (all_exact) out.prefix_lambda0.push_back(l0);
        }
        return out;
    }

    out.kind = TrajectoryClass::Kind::TypeI;
    const mpq_class& l0 = lambda0_per_prefix.back();
    out.period = kTwoPi / (l0.get_d() * scale);
    if (all_exact) out.lambda0 = l0;
    return out;
}

// ------------------------------------------------------------------ Weyl test ---

double weyl_discrepancy(const std::vector<double>& freqs, std::size_t samples,
                        std::size_t bins) {
    if (freqs.size() < 2 || freqs.size() > 4) {
        throw FlowError("weyl_discrepancy: need 2..4 frequencies");
    }
    if (bins < 2) throw FlowError("weyl_discrepancy: need bins >= 2");
    if (samples < bins * bins) throw FlowError("weyl_discrepancy: need samples >= bins^2");
    double lam_max = 0.0;
    for (double f : freqs) {
        if (!(f > 0.0) || !std::isfinite(f)) {
            throw FlowError("weyl_discrepancy: frequencies must be positive");
        }
        lam_max = std::max(lam_max, f);
    }
    const std::size_t dim = freqs.size();
    std::size_t cells = 1;
    for (std::size_t i = 0; i < dim; ++i) {
        cells *= bins;
        if (cells > (std::size_t(1) << 26)) {
            throw FlowError("weyl_discrepancy: bins^dim too large");
        }
    }
    // golden-ratio multiple of the fastest mode's period avoids aliasing with
    // any single frequency
    const double golden = 0.6180339887498949;
    const double delta_t = golden * kTwoPi / lam_max;

    std::vector<std::uint64_t> counts(cells, 0);
    for (std::size_t j = 0; j < samples; ++j) {
        double t = static_cast<double>(j) * delta_t;
        std::size_t idx = 0;
        for (std::size_t i = 0; i < dim; ++i) {
            double u = wrap_angle(freqs[i] * t) / kTwoPi;
            auto cell = static_cast<std::size_t>(u * static_cast<double>(bins));
            if (cell >= bins) cell = bins - 1;
            idx = idx * bins + cell;
        }
        counts[idx]++;
    }
    const double uniform = 1.0 / static_cast<double>(cells);
    double tv = 0.0;
    for (std::uint64_t c : counts) {
        tv += std::abs(static_cast<double>(c) / static_cast<double>(samples) - uniform);
    }
    return 0.5 * tv;
}

// ----------------------------------------------------------- sigma condition ---

SigmaScanReport sigma_condition_scan(const Measure& mu, int dyadic_depth, double sigma,
                                     double window_lo, double window_hi,
                                     std::size_t samples) {
    if (dyadic_depth < 0 || dyadic_depth > 12) {
        throw MeasureError("sigma_condition_scan: dyadic_depth must lie in [0, 12]");
    }
    if (!(sigma > 0.0 && sigma < 1.0)) {
        throw MeasureError("sigma_condition_scan: sigma must lie in (0,1)");
    }
    SigmaScanReport report;
    report.sigma = sigma;
    report.dyadic_depth = dyadic_depth;
    report.window_lo = window_lo;
    report.window_hi = window_hi;
    report.samples = samples;

    Interval hull = support_interval(mu);
    double lo = hull.lo, hi = hull.hi;
    if (hi - lo < 1e-9) {  // single-atom hull: pad so the dyadic family exists
        lo -= 0.5;
        hi += 0.5;
    }
    hi += std::max(1e-12, (hi - lo) * 1e-12);  // keep the top endpoint inside

    const double tv = total_variation(mu);
    for (int depth = 0; depth <= dyadic_depth; ++depth) {
        std::size_t cells = std::size_t(1) << depth;
        for (std::size_t j = 0; j < cells; ++j) {
            double a = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(cells);
            double b = lo + (hi - lo) * static_cast<double>(j + 1) / static_cast<double>(cells);
            Measure restricted = restrict(mu, BorelSet::interval(a, b));
            double mass = total_variation(restricted);
            if (mass <= 1e-14 * std::max(1.0, tv)) {
                report.cells_skipped++;
                continue;
            }
            report.cells_tested++;
            double sup = limsup_estimate(restricted, window_lo, window_hi, samples,
                                         Convention::Angular);
            if (sup > (1.0 - sigma) * mass) {
                report.holds_on_family = false;
                report.failing_cell = BorelSet::Cell{a, b};
                report.failing_sup = sup;
                report.failing_mass = mass;
                return report;
            }
        }
    }
    report.holds_on_family = true;
    return report;
}

// ------------------------------------------------- AC non-periodicity check ---

NonperiodicityReport nonperiodicity_check_ac(const DensityMeasure& rho,
                                             const FrequencySpec& lambda, double delta_lo,
                                             double delta_hi, const AmplitudeProfile& r,
                                             double T, std::size_t m_max) {
    if (!(T > 0.0)) throw FlowError("nonperiodicity_check_ac: periods are positive (T > 0)");
    if (m_max < 2) throw FlowError("nonperiodicity_check_ac: m_max must be >= 2");
    if (!(delta_lo < delta_hi)) throw FlowError("nonperiodicity_check_ac: empty interval");
    rho.validate();

    // strict monotonicity proxy: derivative of fixed sign at quadrature nodes
    const auto& rule = GaussLegendre32::instance();
    int sign = 0;
    for (int p = 0; p < 8; ++p) {
        double a = delta_lo + (delta_hi - delta_lo) * p / 8.0;
        double b = delta_lo + (delta_hi - delta_lo) * (p + 1) / 8.0;
        for (int i = 0; i < 32; ++i) {
            double x = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[i];
            double d = lambda.derivative_at(x);
            int s = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
            if (s == 0 || (sign != 0 && s != sign)) {
                throw FlowError(
                    "nonperiodicity_check_ac: lambda is not strictly monotone on the "
                    "interval (derivative changes sign or vanishes at a node)");
            }
            sign = s;
        }
    }

    auto weight_at = [&rho, &r](double k) {
        double amp = r(k);
        return amp * amp * rho.effective_density_at(k);
    };
    double base = integrate_adaptive_real(weight_at, delta_lo, delta_hi, 1e-12, 8);
    if (!(base > 0.0)) {
        throw FlowError("nonperiodicity_check_ac: int_Delta r^2 rho must be positive");
    }

    NonperiodicityReport report;
    report.T = T;
    report.threshold = 0.5 * base;
    report.m_max = m_max;
    report.m_half_lo = m_max / 2;
    report.displacement.assign(m_max, 0.0);

    double lam_span = std::abs(lambda.at_point(delta_hi) - lambda.at_point(delta_lo));
    parallel_for(m_max, [&](std::size_t idx) {
        double m = static_cast<double>(idx + 1);
        auto integrand = [&](double k) {
            return weight_at(k) * std::cos(T * m * lambda.at_point(k));
        };
        int panels = static_cast<int>(T * m * lam_span / (2.0 * kTwoPi)) + 4;
        double osc = integrate_adaptive_real(integrand, delta_lo, delta_hi, 1e-9, panels);
        report.displacement[idx] = 2.0 * base - 2.0 * osc;
    });

    double best = std::numeric_limits<double>::infinity();
    std::size_t best_m = 0;
    for (std::size_t m = report.m_half_lo; m <= m_max; ++m) {
        double v = report.displacement[m - 1];
        if (v < best) {
            best = v;
            best_m = m;
        }
    }
    report.min_large_m = best;
    report.argmin_m = best_m;
    report.passed = best >= report.threshold;
    return report;
}

}  // namespace torusflow
