#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "support/oracles.hpp"
#include "torusflow/charfn.hpp"
#include "torusflow/flow.hpp"
#include "torusflow/numerics.hpp"

using namespace torusflow;

namespace {

CountableState simple_state(std::vector<double> radii, std::vector<Frequency> freqs,
                            std::vector<double> phases = {}) {
    auto torus = CountableTorus::from_list(std::move(radii));
    return CountableState::make(torus, FrequencySpec::list(std::move(freqs)),
                                std::move(phases));
}

}  // namespace

TEST_CASE("evolution advances phases by lambda t") {
    auto s = simple_state({1.0}, {Frequency::exact(1, 1)});
    CHECK(s.evolved(kPi).phase(0) == doctest::Approx(kPi).epsilon(1e-15));
    CHECK(s.evolved(0.0).identical(s));
    auto two = simple_state({1.0, 1.0}, {Frequency::exact(1, 1), Frequency::exact(2, 1)});
    auto period = two.evolved(kTwoPi);
    CHECK(period.phase(0) == doctest::Approx(0.0));
    CHECK(period.phase(1) == doctest::Approx(0.0));
    CHECK(distance(period, two) < 1e-12);
}

TEST_CASE("distance basics") {
    auto a = simple_state({1.0}, {Frequency::exact(1, 1)}, {0.0});
    auto b = simple_state({1.0}, {Frequency::exact(1, 1)}, {kPi});
    CHECK(distance(a, a) == 0.0);
    CHECK(distance(a, b) == doctest::Approx(2.0).epsilon(1e-12));
    auto c = simple_state({1.0, 1.0}, {Frequency::exact(1, 1), Frequency::exact(2, 1)});
    CHECK_THROWS_AS(distance(a, c), FlowError);
}

TEST_CASE("distance agrees with the direct complex-chord computation") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> phd(0.0, kTwoPi), rd(0.1, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> radii, pa, pb;
        std::vector<Frequency> fs;
        for (int k = 0; k < 6; ++k) {
            radii.push_back(rd(rng));
            pa.push_back(phd(rng));
            pb.push_back(phd(rng));
            fs.push_back(Frequency::real(rd(rng)));
        }
        auto torus = CountableTorus::from_list(radii);
        auto spec = FrequencySpec::list(fs);
        auto a = CountableState::make(torus, spec, pa);
        auto b = CountableState::make(torus, spec, pb);
        CHECK(distance(a, b) ==
              doctest::Approx(oracles::direct_distance(radii, pa, pb)).epsilon(1e-12));
    }
}

TEST_CASE("distance squared equals the displacement identity for mode measures") {
    auto s = simple_state({1.0, 0.5, 0.25},
                          {Frequency::exact(1, 1), Frequency::real(std::sqrt(2.0)),
                           Frequency::exact(5, 2)},
                          {0.3, 1.2, 4.4});
    Measure mu = mode_measure(s);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> td(-80.0, 80.0);
    for (int i = 0; i < 100; ++i) {
        double t = td(rng);
        double d = distance(s.evolved(t), s);
        CHECK(std::abs(d * d - displacement_sq(mu, t)) <= 1e-9);
    }
}

TEST_CASE("mode measure merges equal frequencies") {
    auto s = simple_state({1.0, 2.0}, {Frequency::exact(3, 1), Frequency::exact(3, 1)});
    Measure mu = mode_measure(s);
    const auto& atoms = std::get<AtomicMeasure>(mu.terms()[0].component).atoms;
    REQUIRE(atoms.size() == 1);
    CHECK(atoms[0].weight == doctest::Approx(5.0));  // 1^2 + 2^2
}

TEST_CASE("energy of simple systems") {
    auto one = simple_state({1.0}, {Frequency::exact(2, 1)});
    CHECK(energy(one) == doctest::Approx(1.0));
    auto two = simple_state({1.0, 1.0}, {Frequency::exact(1, 1), Frequency::exact(1, 1)});
    CHECK(energy(two) == doctest::Approx(1.0));
}

TEST_CASE("energy, actions, distances are flow invariants") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> td(-100.0, 100.0), phd(0.0, kTwoPi);
    auto torus = CountableTorus::from_list({1.0, 0.5, 0.25, 0.125});
    auto spec = FrequencySpec::list({Frequency::exact(1, 1), Frequency::real(std::sqrt(2.0)),
                                     Frequency::exact(7, 2), Frequency::real(kPi)});
    for (int i = 0; i < 100; ++i) {
        auto s = CountableState::make(torus, spec, {phd(rng), phd(rng), phd(rng), phd(rng)});
        double t = td(rng);
        auto e = s.evolved(t);
        CHECK(energy(e) == energy(s));    // phases never enter
        CHECK(actions(e) == actions(s));  // structural
        double sum = 0.0;
        for (double a : actions(s)) sum += a;
        CHECK(sum <= torus.energy_norm_sq() + 1e-15);
    }
}

TEST_CASE("group law and reversibility are exact in phase arithmetic") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> td(-100.0, 100.0);
    auto s = simple_state({1.0, 0.5, 0.25},
                          {Frequency::exact(1, 1), Frequency::real(std::sqrt(2.0)),
                           Frequency::exact(5, 2)},
                          {0.3, 1.2, 4.4});
    for (int i = 0; i < 1000; ++i) {
        double t1 = td(rng), t2 = td(rng);
        CHECK(s.evolved(t1).evolved(t2).identical(s.evolved(t1 + t2)));
        CHECK(s.evolved(t1).evolved(-t1).identical(s));
    }
}

TEST_CASE("unitarity: pairwise distances survive evolution bit for bit") {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> td(-100.0, 100.0), phd(0.0, kTwoPi);
    auto torus = CountableTorus::from_list({1.0, 1.0, 0.5});
    auto spec = FrequencySpec::list(
        {Frequency::exact(1, 1), Frequency::real(std::sqrt(3.0)), Frequency::exact(1, 3)});
    for (int i = 0; i < 200; ++i) {
        auto a = CountableState::make(torus, spec, {phd(rng), phd(rng), phd(rng)});
        auto b = CountableState::make(torus, spec, {phd(rng), phd(rng), phd(rng)});
        double t = td(rng);
        CHECK(distance(a.evolved(t), b.evolved(t)) == distance(a, b));
    }
}

TEST_CASE("evolve validates the frequency spec against the state") {
    auto spec = FrequencySpec::list({Frequency::exact(1, 1), Frequency::exact(2, 1)});
    auto torus = CountableTorus::from_list({1.0, 1.0});
    auto s = CountableState::make(torus, spec);
    CHECK(evolve(s, spec, 1.0).elapsed() == 1.0);
    auto other = FrequencySpec::list({Frequency::exact(1, 1), Frequency::exact(3, 1)});
    CHECK_THROWS_AS(evolve(s, other, 1.0), FlowError);
}

TEST_CASE("torus rules certify their tail energy") {
    // oracle: extend the rule tenfold and sum the actual continuation
    auto geo = CountableTorus::geometric(1.0, 0.5, 8);
    double actual = 0.0;
    for (int k = 9; k <= 200; ++k) actual += std::pow(0.5, 2.0 * k);
    CHECK(geo.tail_energy_bound() >= actual);
    CHECK(geo.tail_energy_bound() <= actual * 1.5 + 1e-12);

    auto pow_t = CountableTorus::power(2.0, 1.0, 16);
    double actual_p = 0.0;
    for (int k = 17; k <= 2000000; ++k) actual_p += 4.0 / (double(k) * double(k));
    CHECK(pow_t.tail_energy_bound() >= actual_p);

    CHECK_THROWS_AS(CountableTorus::power(1.0, 0.5, 8), FlowError);  // not square-summable
    CHECK_THROWS_AS(CountableTorus::geometric(1.0, 1.0, 8), FlowError);
    CHECK_THROWS_AS(CountableTorus::from_list({}), FlowError);
    CHECK_THROWS_AS(CountableTorus::from_list({1.0, -1.0}), FlowError);
}

TEST_CASE("truncation error honors the eps^2/8 tail rule") {
    // full system of 12 modes; prefix chosen so the tail obeys the rule
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> phd(0.0, kTwoPi);
    std::vector<double> radii;
    for (int k = 1; k <= 12; ++k) radii.push_back(std::pow(0.6, k));
    const double eps = 0.5;
    std::size_t prefix = 0;
    double tail = 0.0;
    for (std::size_t n = radii.size(); n-- > 0;) {
        tail += radii[n] * radii[n];
        if (tail >= eps * eps / 8.0) {
            prefix = n + 2;
            break;
        }
    }
    REQUIRE(prefix >= 1);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> pa, pb;
        for (std::size_t k = 0; k < radii.size(); ++k) {
            pa.push_back(phd(rng));
            pb.push_back(phd(rng));
        }
        double d_full = oracles::direct_distance(radii, pa, pb);
        std::vector<double> r_tr(radii.begin(), radii.begin() + prefix);
        std::vector<double> pa_tr(pa.begin(), pa.begin() + prefix);
        std::vector<double> pb_tr(pb.begin(), pb.begin() + prefix);
        double d_tr = oracles::direct_distance(r_tr, pa_tr, pb_tr);
        // each point sits within eps/2 of its truncation, so distances move
        // by at most twice that
        CHECK(std::abs(d_full - d_tr) <= eps);
        double point_shift = 0.0;
        for (std::size_t k = prefix; k < radii.size(); ++k) {
            point_shift += radii[k] * radii[k];
        }
        CHECK(std::sqrt(point_shift) <= eps / 2.0);
    }
}

TEST_CASE("realization splits real and imaginary parts") {
    RealizedState r = realize({{1.0, 0.0}});
    REQUIRE(r.q.size() == 1);
    CHECK(r.q[0] == 1.0);
    CHECK(r.p[0] == 0.0);
    auto s = simple_state({2.0}, {Frequency::exact(1, 1)}, {kPi / 2.0});
    RealizedState rs = realize(s);
    CHECK(rs.q[0] == doctest::Approx(0.0));
    CHECK(rs.p[0] == doctest::Approx(2.0));
    // q^2 + p^2 = r^2 structurally
    CHECK(rs.q[0] * rs.q[0] + rs.p[0] * rs.p[0] == doctest::Approx(4.0));
}

TEST_CASE("symplectic form: basis pairing, skew symmetry, operator J") {
    const int n = 16;
    for (int j = 0; j < n; ++j) {
        std::vector<std::complex<double>> gj(n, 0.0), fj(n, 0.0);
        gj[j] = 1.0;
        fj[j] = {0.0, 1.0};
        for (int k = 0; k < n; ++k) {
            std::vector<std::complex<double>> gk(n, 0.0), fk(n, 0.0);
            gk[k] = 1.0;
            fk[k] = {0.0, 1.0};
            double expect = (j == k) ? 1.0 : 0.0;
            CHECK(symplectic_form(gj, fk) == doctest::Approx(expect));
            CHECK(symplectic_form(gj, gk) == doctest::Approx(0.0));
            CHECK(symplectic_form(fj, fk) == doctest::Approx(0.0));
        }
    }

    std::mt19937_64 rng(44);
    std::uniform_real_distribution<double> xd(-2.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::complex<double>> u(n), v(n);
        for (int k = 0; k < n; ++k) {
            u[k] = {xd(rng), xd(rng)};
            v[k] = {xd(rng), xd(rng)};
        }
        CHECK(std::abs(symplectic_form(u, u)) <= 1e-12);
        CHECK(std::abs(symplectic_form(u, v) + symplectic_form(v, u)) <= 1e-12);
        // omega(u, v) = Re<u, Jv>, J^2 = -1, and omega(u,v) = -Im<u,v>
        auto jv = apply_symplectic_operator(v);
        std::complex<double> ip = 0.0, raw = 0.0;
        for (int k = 0; k < n; ++k) {
            ip += u[k] * std::conj(jv[k]);
            raw += u[k] * std::conj(v[k]);
        }
        CHECK(symplectic_form(u, v) == doctest::Approx(ip.real()).epsilon(1e-12));
        CHECK(symplectic_form(u, v) == doctest::Approx(-raw.imag()).epsilon(1e-12));
        auto jj = apply_symplectic_operator(jv);
        for (int k = 0; k < n; ++k) CHECK(std::abs(jj[k] + v[k]) <= 1e-15);
    }
}

TEST_CASE("continuous states: pointwise flow, isometry, conserved energy") {
    auto rho = DensityMeasure::uniform(0.0, 1.0, 1.0);
    auto s = ContinuousState::make(rho, FrequencySpec::identity_line(),
                                   AmplitudeProfile::constant(1.0));
    CHECK(s.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(energy(s) == doctest::Approx(0.25).epsilon(1e-12));  // int x/2 dx
    auto e = s.evolved(7.3);
    CHECK(energy(e) == energy(s));
    CHECK(distance(e, e) == 0.0);
    // displacement matches the measure-side identity
    double d = distance(s.evolved(3.0), s);
    double oracle = std::sqrt(displacement_sq(Measure(rho), 3.0, Convention::Angular));
    CHECK(d == doctest::Approx(oracle).epsilon(1e-10));
    // group law in tau arithmetic
    CHECK(distance(s.evolved(1.5).evolved(2.5), s.evolved(4.0)) == 0.0);
    CHECK_THROWS_AS(
        ContinuousState::make(rho, FrequencySpec::inverse_factorial(),
                              AmplitudeProfile::constant(1.0)),
        FlowError);
}

TEST_CASE("frequency rules") {
    auto fact = FrequencySpec::inverse_factorial();
    CHECK(fact.exact_at_mode(6)->rational() == mpq_class(1, 720));
    CHECK(fact.at_mode(3) == doctest::Approx(1.0 / 6.0));
    auto lin = FrequencySpec::linear_modes();
    CHECK(lin.at_mode(7) == 7.0);
    CHECK(lin.exact_at_mode(7)->rational() == 7);
    auto sg = FrequencySpec::sine_gordon(1.0);
    CHECK(sg.at_mode(2) == doctest::Approx(std::sqrt(5.0)));
    CHECK(sg.at_point(0.5) == doctest::Approx(std::sqrt(1.25)));
    CHECK(sg.derivative_at(0.5) > 0.0);
    CHECK(!sg.exact_at_mode(2).has_value());
    auto idl = FrequencySpec::identity_line();
    CHECK(idl.at_point(3.25) == 3.25);
    CHECK_THROWS_AS(idl.at_mode(1), FlowError);
    CHECK_THROWS_AS(FrequencySpec::list({}), FlowError);
    CHECK_THROWS_AS(lin.at_mode(0), FlowError);
}

TEST_CASE("energy certification against the declared tail") {
    auto torus = CountableTorus::geometric(1.0, 0.5, 6);
    auto lin = FrequencySpec::linear_modes();
    auto fact = FrequencySpec::inverse_factorial();
    auto s_lin = CountableState::make(torus, lin);
    auto s_fact = CountableState::make(torus, fact);
    CHECK_THROWS_AS(energy_certified(s_lin, lin), FlowError);  // unbounded frequencies
    CHECK(energy_certified(s_fact, fact) >= energy(s_fact));
    auto no_tail = CountableTorus::from_list({1.0, 0.5});
    auto s2 = CountableState::make(no_tail, lin);
    CHECK(energy_certified(s2, lin) == energy(s2));
}
