// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances and runtime caps are pinned in code.

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "torusflow/charfn.hpp"
#include "torusflow/commensurability.hpp"
#include "torusflow/dynamics.hpp"
#include "torusflow/flow.hpp"
#include "torusflow/measure.hpp"
#include "torusflow/numerics.hpp"
#include "torusflow/scenario.hpp"

using namespace torusflow;
using njson = nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& what,
            const std::string& detail = "") {
    std::printf("[%s] criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", criterion,
                what.c_str(), detail.empty() ? "" : " -- ", detail.c_str());
    if (!pass) ++failures;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string scenario_path(const char* name) {
    return std::string(TORUSFLOW_SCENARIO_DIR) + "/" + name;
}

// ---------------------------------------------------------------- criteria ---

// cosine-product truncation against the eta = 1/2 closed form
void criterion_1() {
    auto start = Clock::now();
    double worst = 0.0;
    for (double t : {0.1, 0.3, 1.7, 10.0, 50.0}) {
        double got = bernoulli_product(0.5, t, 1e-10);
        double x = kTwoPi * t;
        double oracle = std::sin(x) / x;
        worst = std::max(worst, std::abs(got - oracle));
    }
    double elapsed = seconds_since(start);
    char detail[128];
    std::snprintf(detail, sizeof detail, "max err %.2e, %.3fs", worst, elapsed);
    report(1, worst <= 1e-8 && elapsed < 1.0, "Bernoulli product matches the sinc oracle",
           detail);
}

// sampled decay ceiling for the singular family
void criterion_2() {
    auto start = Clock::now();
    bool ok = true;
    double worst_excess = -1.0;
    for (double eta : {0.3, 1.0 / 3.0, 0.4}) {
        double bound = std::max(std::abs(std::cos(kPi * eta)),
                                std::abs(std::cos(kPi * eta * eta)));
        auto grid = log_spaced(1.0 / (2.0 * eta) + 1.0, 1e4, 10000);
        double sup = 0.0;
        for (double t : grid) sup = std::max(sup, std::abs(bernoulli_product(eta, t, 1e-10)));
        ok = ok && (sup <= bound + 1e-9);
        worst_excess = std::max(worst_excess, sup - bound);
    }
    double elapsed = seconds_since(start);
    char detail[128];
    std::snprintf(detail, sizeof detail, "worst sup-bound %.2e, %.3fs", worst_excess, elapsed);
    report(2, ok && elapsed < 10.0, "Bernoulli decay ceiling holds on the sampled ray",
           detail);
}

// displacement identity over random atomic systems
void criterion_3() {
    std::mt19937_64 rng(424242);
    std::uniform_real_distribution<double> locd(-5.0, 5.0), wd(0.01, 1.0), td(-50.0, 50.0);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        int n = 1 + int(rng() % 16);
        AtomicMeasure am;
        for (int i = 0; i < n; ++i) {
            double loc = locd(rng);
            bool dup = false;
            for (const auto& a : am.atoms) dup |= (a.location == loc);
            if (dup) {
                --i;
                continue;
            }
            am.atoms.push_back({loc, wd(rng)});
        }
        Measure mu(am);
        for (int j = 0; j < 100; ++j) {
            double t = td(rng);
            double direct = 0.0;
            for (const auto& a : am.atoms) {
                direct += a.weight * std::norm(std::polar(1.0, a.location * t) - 1.0);
            }
            worst = std::max(worst, std::abs(direct - displacement_sq(mu, t)));
        }
    }
    char detail[64];
    std::snprintf(detail, sizeof detail, "max err %.2e", worst);
    report(3, worst <= 1e-10, "displacement identity 2||mu|| - 2 Re mu^", detail);
}

// wandering vs non-wandering dichotomy on the named scenarios
void criterion_4() {
    auto start = Clock::now();
    bool ok = true;
    std::string detail;
    try {
        Scenario wander = Scenario::from_json_text(read_file(scenario_path("uniform-density.json")));
        njson wdoc = njson::parse(wander.run().json);
        const njson& cert = wdoc.at("result").at("certificate");
        ok = ok && !cert.is_null();
        double delta = cert.at("delta").get<double>();
        double T = cert.at("T").get<double>();
        ok = ok && std::abs(delta - 1.0) < 1e-12 && std::abs(T - 4.0) < 1e-12;
        Measure uni(DensityMeasure::uniform(0.0, 1.0, 1.0));
        double low = 1e9;
        for (int i = 0; i <= 200000; ++i) {
            double t = 4.0 + 36.0 * i / 200000.0;
            low = std::min(low, displacement_sq(uni, t, Convention::Angular));
        }
        ok = ok && (low >= 1.0 - 1e-9);

        Scenario recur = Scenario::from_json_text(
            read_file(scenario_path("three-irrational-oscillators.json")));
        njson rdoc = njson::parse(recur.run().json);
        ok = ok && rdoc.at("result").at("verdict") == "returns_found";
        bool found = false;
        double eps = 0.05 * std::sqrt(3.0);
        for (const auto& r : rdoc.at("result").at("returns")) {
            if (r.at("t").get<double>() > 10.0 && r.at("distance").get<double>() < eps) {
                found = true;
            }
        }
        ok = ok && found;
        char buf[160];
        std::snprintf(buf, sizeof buf, "delta=%.3f T=%.3f scan-min=%.3f returns=%zu, %.3fs",
                      delta, T, low, rdoc.at("result").at("returns").size(),
                      seconds_since(start));
        detail = buf;
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    double elapsed = seconds_since(start);
    report(4, ok && elapsed < 60.0, "wandering certificate and Poincare return", detail);
}

// trajectory taxonomy with bit-reproducible exact parts
void criterion_5() {
    bool ok = true;
    std::string detail;
    try {
        auto torus = CountableTorus::from_list({1, 1, 1, 1, 1, 1});
        auto t1 = classify_trajectory(FrequencySpec::linear_modes(), {3, 4, 5, 6}, torus);
        ok = ok && t1.kind == TrajectoryClass::Kind::TypeI &&
             std::abs(t1.period - kTwoPi) < 1e-12;

        auto t3a = classify_trajectory(FrequencySpec::inverse_factorial(), {3, 4, 5, 6}, torus);
        auto t3b = classify_trajectory(FrequencySpec::inverse_factorial(), {3, 4, 5, 6}, torus);
        ok = ok && t3a.kind == TrajectoryClass::Kind::TypeIII;
        double fact[] = {6.0, 24.0, 120.0, 720.0};
        for (int i = 0; i < 4; ++i) {
            ok = ok && std::abs(t3a.prefix_periods[i] - kTwoPi * fact[i]) < 1e-9;
            if (i) ok = ok && t3a.prefix_periods[i] > t3a.prefix_periods[i - 1];
        }
        // exact arithmetic is bit-reproducible across runs
        ok = ok && t3a.prefix_lambda0.size() == 4 && t3b.prefix_lambda0.size() == 4;
        for (int i = 0; i < 4; ++i) {
            ok = ok && t3a.prefix_lambda0[i] == t3b.prefix_lambda0[i];
            ok = ok && t3a.prefix_periods[i] == t3b.prefix_periods[i];
        }
        ok = ok && t3a.prefix_lambda0[3] == mpq_class(1, 720);

        auto spec2 = FrequencySpec::list({Frequency::exact(1, 1),
                                          Frequency::real(std::sqrt(2.0), "sqrt2"),
                                          Frequency::exact(1, 2)});
        auto t2 = classify_trajectory(spec2, {2, 3}, CountableTorus::from_list({1, 1, 1}));
        ok = ok && t2.kind == TrajectoryClass::Kind::TypeII && t2.dense_pair.has_value();
        detail = "TypeI(2pi) / TypeIII(2pi*N!) / TypeII(pair)";
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report(5, ok, "trajectory taxonomy", detail);
}

// finite-dimensional trichotomy with the Weyl corroboration
void criterion_6() {
    auto start = Clock::now();
    bool ok = true;
    std::string detail;
    try {
        auto periodic = jacobi_classify({Frequency::exact(2, 1), Frequency::exact(3, 1)});
        ok = ok && periodic.kind == JacobiClassification::Kind::PeriodicAll;

        auto dense = jacobi_classify(
            {Frequency::exact(1, 1), Frequency::real(std::sqrt(2.0), "sqrt2")}, 1'000'000);
        ok = ok && dense.kind == JacobiClassification::Kind::DenseOnTorus;
        double disc = weyl_discrepancy({1.0, std::sqrt(2.0)}, 100000, 16);
        ok = ok && disc <= 0.02;

        auto mixed = jacobi_classify({Frequency::exact(1, 1),
                                      Frequency::real(std::sqrt(2.0), "sqrt2"),
                                      Frequency::real(1.0 + std::sqrt(2.0), "1+sqrt2")});
        ok = ok && mixed.kind == JacobiClassification::Kind::ResonantMixed &&
             mixed.witness.has_value() && mixed.witness->height == 1;
        char buf[96];
        std::snprintf(buf, sizeof buf, "weyl discrepancy %.4f, %.3fs", disc,
                      seconds_since(start));
        detail = buf;
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    double elapsed = seconds_since(start);
    report(6, ok && elapsed < 30.0, "Jacobi trichotomy", detail);
}

// sigma condition over the dyadic family
void criterion_7() {
    auto start = Clock::now();
    bool ok = true;
    std::string detail;
    try {
        Measure uni(DensityMeasure::uniform(0.0, 1.0, 1.0));
        auto pass = sigma_condition_scan(uni, 6, 0.5, 1e3, 1e4, 2048);
        ok = ok && pass.holds_on_family;

        Measure atom(AtomicMeasure{{{1.0, 1.0}}, 0.0});
        auto fail_case = sigma_condition_scan(atom, 4, 0.5, 1e3, 1e4, 256);
        ok = ok && !fail_case.holds_on_family && fail_case.failing_cell.has_value() &&
             fail_case.failing_cell->lo <= 1.0 && 1.0 < fail_case.failing_cell->hi;
        char buf[96];
        std::snprintf(buf, sizeof buf, "uniform holds on %zu cells; atom fails, %.3fs",
                      pass.cells_tested, seconds_since(start));
        detail = buf;
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    double elapsed = seconds_since(start);
    report(7, ok && elapsed < 30.0, "sigma-condition scan", detail);
}

// absolutely continuous non-periodicity evidence
void criterion_8() {
    auto start = Clock::now();
    bool ok = true;
    double worst_margin = 1e9;
    std::string detail;
    try {
        auto rho = DensityMeasure::uniform(0.0, 1.0, 1.0);
        auto prof = AmplitudeProfile::constant(1.0);
        for (const auto& spec :
             {FrequencySpec::identity_line(), FrequencySpec::sine_gordon(1.0)}) {
            for (double T : {1.0, 2.5, kPi}) {
                auto rep = nonperiodicity_check_ac(rho, spec, 0.0, 1.0, prof, T, 200);
                ok = ok && rep.passed && rep.m_half_lo == 100;
                worst_margin = std::min(worst_margin, rep.min_large_m - rep.threshold);
            }
        }
        char buf[96];
        std::snprintf(buf, sizeof buf, "min margin over threshold %.3f, %.3fs", worst_margin,
                      seconds_since(start));
        detail = buf;
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    double elapsed = seconds_since(start);
    report(8, ok && elapsed < 30.0, "AC non-periodicity D(m) >= threshold", detail);
}

// conservation laws and exact flow algebra
void criterion_9() {
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> td(-100.0, 100.0), phd(0.0, kTwoPi),
        rd(0.1, 2.0), ld(0.1, 10.0);
    bool ok = true;
    double worst_rel = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        int n = 2 + int(rng() % 6);
        std::vector<double> radii, phases_a, phases_b, lambda;
        for (int k = 0; k < n; ++k) {
            radii.push_back(rd(rng));
            phases_a.push_back(phd(rng));
            phases_b.push_back(phd(rng));
            lambda.push_back(ld(rng));
        }
        auto torus = CountableTorus::from_list(radii);
        CountableState a(torus, lambda, phases_a);
        CountableState b(torus, lambda, phases_b);
        double t = td(rng), t2 = td(rng);
        auto ae = a.evolved(t);
        auto be = b.evolved(t);
        double e0 = energy(a), e1 = energy(ae);
        worst_rel = std::max(worst_rel, std::abs(e1 - e0) / std::max(1e-300, std::abs(e0)));
        ok = ok && (std::abs(e1 - e0) <= 1e-12 * std::abs(e0));
        auto act0 = actions(a);
        auto act1 = actions(ae);
        ok = ok && act0 == act1;
        double d0 = distance(a, b), d1 = distance(ae, be);
        ok = ok && (std::abs(d1 - d0) <= 1e-12 * std::max(1e-300, d0));
        ok = ok && a.evolved(t).evolved(t2).identical(a.evolved(t + t2));
        ok = ok && a.evolved(t).evolved(-t).identical(a);
    }
    char detail[64];
    std::snprintf(detail, sizeof detail, "worst relative drift %.2e", worst_rel);
    report(9, ok, "conservation: energy, actions, distances; exact group law", detail);
}

// symplectic pairings of the realized basis
void criterion_10() {
    bool ok = true;
    const int n = 16;
    for (int j = 0; j < n && ok; ++j) {
        for (int k = 0; k < n && ok; ++k) {
            std::vector<std::complex<double>> gj(n, 0.0), fk(n, 0.0), gk(n, 0.0), fj(n, 0.0);
            gj[j] = 1.0;
            fk[k] = {0.0, 1.0};
            gk[k] = 1.0;
            fj[j] = {0.0, 1.0};
            double expect = j == k ? 1.0 : 0.0;
            ok = ok && std::abs(symplectic_form(gj, fk) - expect) <= 1e-15;
            ok = ok && std::abs(symplectic_form(gj, gk)) <= 1e-15;
            ok = ok && std::abs(symplectic_form(fj, fk)) <= 1e-15;
        }
    }
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> xd(-3.0, 3.0);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::complex<double>> u(n), v(n);
        for (int k = 0; k < n; ++k) {
            u[k] = {xd(rng), xd(rng)};
            v[k] = {xd(rng), xd(rng)};
        }
        worst = std::max(worst, std::abs(symplectic_form(u, u)));
        worst = std::max(worst, std::abs(symplectic_form(u, v) + symplectic_form(v, u)));
    }
    ok = ok && worst <= 1e-12;
    char detail[64];
    std::snprintf(detail, sizeof detail, "worst defect %.2e", worst);
    report(10, ok, "symplectic basis pairings and skew symmetry", detail);
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    if (failures) {
        std::printf("%d criterion(s) FAILED\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
