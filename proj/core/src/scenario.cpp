#include "torusflow/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "torusflow/charfn.hpp"
#include "torusflow/commensurability.hpp"
#include "torusflow/dynamics.hpp"
#include "torusflow/flow.hpp"
#include "torusflow/measure.hpp"
#include "torusflow/numerics.hpp"
#include "torusflow/version.hpp"

namespace torusflow {

namespace {

using njson = nlohmann::json;

// ------------------------------------------------------------ parse helpers ---

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ValidationError(path, what);
}

const njson& require_key(const njson& j, const char* key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) fail(path + "." + key, "missing");
    return j.at(key);
}

double require_num(const njson& j, const char* key, const std::string& path) {
    const njson& v = require_key(j, key, path);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

double opt_num(const njson& j, const char* key, double fallback) {
    if (j.is_object() && j.contains(key) && j.at(key).is_number()) {
        return j.at(key).get<double>();
    }
    return fallback;
}

std::size_t opt_count(const njson& j, const char* key, std::size_t fallback) {
    if (j.is_object() && j.contains(key) && j.at(key).is_number()) {
        auto v = j.at(key).get<double>();
        if (v < 0) return fallback;
        return static_cast<std::size_t>(v);
    }
    return fallback;
}

std::string require_str(const njson& j, const char* key, const std::string& path) {
    const njson& v = require_key(j, key, path);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

std::string opt_str(const njson& j, const char* key, const std::string& fallback) {
    if (j.is_object() && j.contains(key) && j.at(key).is_string()) {
        return j.at(key).get<std::string>();
    }
    return fallback;
}

std::vector<double> num_array(const njson& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) fail(path, "expected an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

// ----------------------------------------------------------- domain parsers ---

AmplitudeProfile parse_profile(const njson& j, const std::string& path) {
    if (j.is_number()) return AmplitudeProfile::constant(j.get<double>());
    std::string type = require_str(j, "type", path);
    try {
        if (type == "constant") {
            return AmplitudeProfile::constant(require_num(j, "value", path));
        }
        if (type == "identity") return AmplitudeProfile::identity();
        if (type == "piecewise_linear") {
            return AmplitudeProfile::piecewise_linear(
                num_array(require_key(j, "nodes", path), path + ".nodes"),
                num_array(require_key(j, "values", path), path + ".values"));
        }
        if (type == "product") {
            const njson& factors = require_key(j, "factors", path);
            if (!factors.is_array()) fail(path + ".factors", "expected an array");
            std::vector<AmplitudeProfile> fs;
            for (std::size_t i = 0; i < factors.size(); ++i) {
                fs.push_back(parse_profile(factors[i],
                                           path + ".factors[" + std::to_string(i) + "]"));
            }
            return AmplitudeProfile::product(std::move(fs));
        }
    } catch (const MeasureError& e) {
        fail(path, e.what());
    }
    fail(path + ".type", "unknown profile type '" + type + "'");
}

Measure parse_measure(const njson& j, const std::string& path) {
    std::string type = require_str(j, "type", path);
    try {
        if (type == "atomic") {
            const njson& atoms = require_key(j, "atoms", path);
            if (!atoms.is_array()) fail(path + ".atoms", "expected [[location, weight], ...]");
            AtomicMeasure m;
            for (const auto& a : atoms) {
                if (!a.is_array() || a.size() != 2) {
                    fail(path + ".atoms", "expected [location, weight] pairs");
                }
                m.atoms.push_back({a[0].get<double>(), a[1].get<double>()});
            }
            m.tail_mass_bound = opt_num(j, "tail_mass_bound", 0.0);
            return Measure(m);
        }
        if (type == "density") {
            std::string shape = opt_str(j, "shape", "uniform");
            if (shape == "piecewise_linear") {
                return Measure(DensityMeasure::piecewise_linear(
                    num_array(require_key(j, "nodes", path), path + ".nodes"),
                    num_array(require_key(j, "values", path), path + ".values")));
            }
            auto support = num_array(require_key(j, "support", path), path + ".support");
            if (support.size() != 2) fail(path + ".support", "expected [lo, hi]");
            double mass = opt_num(j, "mass", 1.0);
            if (shape == "uniform") {
                return Measure(DensityMeasure::uniform(support[0], support[1], mass));
            }
            if (shape == "triangular") {
                return Measure(DensityMeasure::triangular(support[0], support[1], mass));
            }
            fail(path + ".shape", "unknown density shape '" + shape + "'");
        }
        if (type == "bernoulli") {
            double eta = require_num(j, "eta", path);
            if (!(eta > 0.0 && eta < 1.0)) fail(path + ".eta", "must lie in (0,1)");
            return Measure(BernoulliMeasure{eta});
        }
        if (type == "mixture") {
            const njson& comps = require_key(j, "components", path);
            if (!comps.is_array() || comps.empty()) {
                fail(path + ".components", "expected a non-empty array");
            }
            std::vector<std::pair<double, Measure>> parts;
            for (std::size_t i = 0; i < comps.size(); ++i) {
                std::string cpath = path + ".components[" + std::to_string(i) + "]";
                double coef = require_num(comps[i], "coefficient", cpath);
                parts.emplace_back(
                    coef, parse_measure(require_key(comps[i], "measure", cpath),
                                        cpath + ".measure"));
            }
            return Measure::mixture(std::move(parts));
        }
    } catch (const ValidationError&) {
        throw;
    } catch (const MeasureError& e) {
        fail(path, e.what());
    }
    fail(path + ".type", "unknown measure type '" + type + "'");
}

FrequencySpec parse_frequencies(const njson& j, const std::string& path) {
    std::string type = require_str(j, "type", path);
    try {
        if (type == "list") {
            const njson& values = require_key(j, "values", path);
            if (!values.is_array() || values.empty()) {
                fail(path + ".values", "expected a non-empty array");
            }
            std::vector<Frequency> fs;
            for (const auto& v : values) {
                if (v.is_string()) {
                    fs.push_back(parse_frequency(v.get<std::string>()));
                } else if (v.is_number_integer()) {
                    fs.push_back(Frequency::exact(mpq_class(v.get<long>())));
                } else if (v.is_number()) {
                    fs.push_back(Frequency::real(v.get<double>()));
                } else {
                    fail(path + ".values", "expected numbers or strings");
                }
            }
            return FrequencySpec::list(std::move(fs));
        }
        if (type == "linear") return FrequencySpec::linear_modes();
        if (type == "factorial") return FrequencySpec::inverse_factorial();
        if (type == "sine_gordon") {
            return FrequencySpec::sine_gordon(opt_num(j, "m", 1.0));
        }
        if (type == "identity") return FrequencySpec::identity_line();
    } catch (const ValidationError&) {
        throw;
    } catch (const std::runtime_error& e) {
        fail(path, e.what());
    }
    fail(path + ".type", "unknown frequency rule '" + type + "'");
}

CountableTorus parse_torus(const njson& j, const std::string& path) {
    std::string type = opt_str(j, "type", "list");
    try {
        if (type == "list") {
            auto radii = num_array(require_key(j, "radii", path), path + ".radii");
            return CountableTorus::from_list(std::move(radii),
                                             opt_num(j, "tail_energy_bound", 0.0));
        }
        std::size_t modes = opt_count(j, "modes", 8);
        if (type == "geometric") {
            return CountableTorus::geometric(require_num(j, "a", path),
                                             require_num(j, "q", path), modes);
        }
        if (type == "power") {
            return CountableTorus::power(require_num(j, "a", path),
                                         require_num(j, "s", path), modes);
        }
    } catch (const ValidationError&) {
        throw;
    } catch (const FlowError& e) {
        fail(path, e.what());
    }
    fail(path + ".type", "unknown torus rule '" + type + "'");
}

std::vector<double> parse_phases(const njson& scenario, std::size_t modes,
                                 const std::string& path) {
    if (!scenario.contains("initial_phases")) return std::vector<double>(modes, 0.0);
    const njson& j = scenario.at("initial_phases");
    std::string type = opt_str(j, "type", "zero");
    if (type == "zero") return std::vector<double>(modes, 0.0);
    if (type == "list") {
        auto vals = num_array(require_key(j, "values", path), path + ".values");
        if (vals.size() != modes) fail(path + ".values", "phase count != torus modes");
        return vals;
    }
    if (type == "random") {
        std::uint64_t seed = static_cast<std::uint64_t>(opt_num(scenario, "seed", 0.0));
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> uni(0.0, kTwoPi);
        std::vector<double> vals(modes);
        for (double& v : vals) v = uni(rng);
        return vals;
    }
    fail(path + ".type", "unknown phase rule '" + type + "'");
}

// ------------------------------------------------------------- csv assembly ---

std::string csv_header(const std::string& hash, const std::string& name,
                       const std::string& columns) {
    std::ostringstream os;
    os << "# " << kToolName << " " << kToolVersion << "\n";
    os << "# scenario_hash: " << hash << "\n";
    if (!name.empty()) os << "# name: " << name << "\n";
    os << columns << "\n";
    return os.str();
}

// ------------------------------------------------------------------ runners ---

struct RunContext {
    const njson& doc;
    const njson& analysis;
    std::string hash;
    std::string name;
};

struct RunResult {
    njson result;
    std::optional<std::string> csv;
};

Convention parse_convention(const njson& j, Convention fallback) {
    std::string s = opt_str(j, "convention", "");
    if (s.empty()) return fallback;
    if (s == "angular") return Convention::Angular;
    if (s == "cyclic") return Convention::Cyclic;
    fail("analysis.convention", "expected 'angular' or 'cyclic'");
}

RunResult run_charfn(const RunContext& ctx) {
    Measure mu = parse_measure(require_key(ctx.doc, "measure", ""), "measure");
    Convention conv = parse_convention(ctx.analysis, natural_convention(mu));
    double t_lo = opt_num(ctx.analysis, "t_lo", 0.1);
    double t_hi = opt_num(ctx.analysis, "t_hi", 100.0);
    std::size_t samples = opt_count(ctx.analysis, "samples", 256);
    std::string spacing = opt_str(ctx.analysis, "spacing", "log");
    if (samples < 2) fail("analysis.samples", "need at least 2");
    std::vector<double> grid;
    if (spacing == "log") {
        if (!(0.0 < t_lo && t_lo < t_hi)) fail("analysis.t_lo", "need 0 < t_lo < t_hi");
        grid = log_spaced(t_lo, t_hi, samples);
    } else if (spacing == "linear") {
        if (!(t_lo < t_hi)) fail("analysis.t_lo", "need t_lo < t_hi");
        for (std::size_t i = 0; i < samples; ++i) {
            grid.push_back(t_lo + (t_hi - t_lo) * double(i) / double(samples - 1));
        }
    } else {
        fail("analysis.spacing", "expected 'log' or 'linear'");
    }
    bool with_k = mu.is_single_bernoulli();
    std::ostringstream rows;
    for (double t : grid) {
        CharfnValue v = charfn_detail(mu, t, conv);
        rows << format_double(t) << "," << format_double(v.value.real()) << ","
             << format_double(v.value.imag()) << "," << format_double(std::abs(v.value))
             << "," << convention_name(conv);
        if (with_k) rows << "," << (v.truncation_k ? *v.truncation_k : 0);
        rows << "\n";
    }
    std::string columns = "t,re,im,abs,convention";
    if (with_k) columns += ",truncation_K";
    RunResult out;
    out.result = njson{{"rows", grid.size()},
                       {"convention", convention_name(conv)},
                       {"measure", mu.describe()}};
    out.csv = csv_header(ctx.hash, ctx.name, columns) + rows.str();
    return out;
}

njson certificate_json(const WanderingCertificate& c) {
    njson j{{"delta", c.delta},
            {"T", c.T},
            {"basis", c.basis == WanderingCertificate::Basis::AnalyticBound
                          ? "analytic_bound"
                          : "sampled_estimate"},
            {"ceiling", c.ceiling},
            {"convention", convention_name(c.convention)},
            {"measure_id", c.measure_id}};
    if (c.basis == WanderingCertificate::Basis::SampledEstimate) {
        j["window"] = njson::array({c.window_lo, c.window_hi});
        j["samples"] = c.samples;
    }
    return j;
}

RunResult run_wander(const RunContext& ctx) {
    Measure mu = parse_measure(require_key(ctx.doc, "measure", ""), "measure");
    if (ctx.doc.contains("amplitude")) {
        mu = amplitude_weight(mu, parse_profile(ctx.doc.at("amplitude"), "amplitude"));
    }
    double margin = opt_num(ctx.analysis, "margin", 0.5);
    if (!(margin > 0.0 && margin < 1.0)) fail("analysis.margin", "must lie in (0,1)");
    WanderingOptions opts;
    opts.window_lo = opt_num(ctx.analysis, "window_lo", 1.0);
    opts.window_hi = opt_num(ctx.analysis, "window_hi", 1e4);
    opts.samples = opt_count(ctx.analysis, "samples", 4096);
    opts.measure_id = ctx.name;
    auto cert = wandering_certificate(mu, margin, opts);
    RunResult out;
    out.result = njson{{"margin", margin},
                       {"total_variation", total_variation(mu)},
                       {"certificate", cert ? certificate_json(*cert) : njson(nullptr)}};
    return out;
}

njson witness_json(const RelationWitness& w) {
    njson coeffs = njson::array();
    njson idx = njson::array();
    for (const auto& c : w.coefficients) coeffs.push_back(c.get_str());
    for (auto i : w.indices) idx.push_back(i);
    return njson{{"coefficients", coeffs},
                 {"indices", idx},
                 {"height", w.height.get_str()},
                 {"residual", w.residual}};
}

RunResult run_classify_freqs(const RunContext& ctx) {
    FrequencySpec spec =
        parse_frequencies(require_key(ctx.doc, "frequencies", ""), "frequencies");
    std::size_t prefix = opt_count(ctx.analysis, "prefix", spec.list_size());
    if (spec.list_size() == 0 && !ctx.analysis.contains("prefix")) {
        fail("analysis.prefix", "rule-based frequencies need an explicit prefix length");
    }
    if (prefix < 2) fail("analysis.prefix", "need at least 2 frequencies");
    long long height =
        static_cast<long long>(opt_num(ctx.analysis, "height", 1'000'000.0));
    std::vector<Frequency> fs = spec.prefix(prefix);

    JacobiClassification jc = jacobi_classify(fs, height);
    StrongCommensurability sc = strong_commensurate(fs);
    RunResult out;
    const char* kind = jc.kind == JacobiClassification::Kind::PeriodicAll ? "periodic_all"
                       : jc.kind == JacobiClassification::Kind::DenseOnTorus
                           ? "dense_on_torus"
                           : "resonant_mixed";
    const char* scv = sc.verdict == StrongCommensurability::Verdict::Yes   ? "yes"
                      : sc.verdict == StrongCommensurability::Verdict::No  ? "no"
                                                                           : "undecided";
    out.result = njson{{"kind", kind},
                       {"strong_commensurate", scv},
                       {"height", jc.height_bound},
                       {"exhaustive", jc.exhaustive},
                       {"undecided_commensurability", jc.undecided_commensurability},
                       {"witness", jc.witness ? witness_json(*jc.witness) : njson(nullptr)}};
    if (sc.witness_pair) {
        out.result["irrational_pair"] =
            njson::array({sc.witness_pair->first, sc.witness_pair->second});
    }
    bool all_exact = std::all_of(fs.begin(), fs.end(),
                                 [](const Frequency& f) { return f.is_exact(); });
    if (jc.kind == JacobiClassification::Kind::PeriodicAll && all_exact) {
        PeriodicityBase base = periodicity_base(fs);
        njson mult = njson::array();
        for (const auto& n : base.multipliers) mult.push_back(n.get_str());
        out.result["periodicity_base"] = njson{{"lambda0", base.lambda0.get_str()},
                                               {"multipliers", mult},
                                               {"period", base.period()}};
    }
    return out;
}

RunResult run_classify(const RunContext& ctx) {
    FrequencySpec spec =
        parse_frequencies(require_key(ctx.doc, "frequencies", ""), "frequencies");
    std::vector<std::size_t> prefixes;
    if (ctx.analysis.contains("prefixes")) {
        for (double v : num_array(ctx.analysis.at("prefixes"), "analysis.prefixes")) {
            prefixes.push_back(static_cast<std::size_t>(v));
        }
    } else {
        prefixes = {3, 4, 5, 6};
    }
    CountableTorus torus = parse_torus(require_key(ctx.doc, "torus", ""), "torus");
    TrajectoryClass tc;
    try {
        tc = classify_trajectory(spec, prefixes, torus);
    } catch (const FlowError& e) {
        fail("torus", e.what());
    }
    RunResult out;
    const char* kind = tc.kind == TrajectoryClass::Kind::TypeI    ? "type_i"
                       : tc.kind == TrajectoryClass::Kind::TypeII ? "type_ii"
                                                                  : "type_iii";
    out.result = njson{{"kind", kind},
                       {"confidence", tc.confidence == TrajectoryClass::Confidence::Exact
                                          ? "exact"
                                          : "height_bounded"}};
    if (tc.confidence == TrajectoryClass::Confidence::HeightBounded) {
        out.result["height_bound"] = tc.height_bound;
    }
    out.result["prefixes"] = tc.prefixes;
    if (tc.kind == TrajectoryClass::Kind::TypeI) {
        out.result["period"] = tc.period;
        if (tc.lambda0) out.result["lambda0"] = tc.lambda0->get_str();
    } else if (tc.kind == TrajectoryClass::Kind::TypeII) {
        out.result["dense_pair"] =
            njson::array({tc.dense_pair->first, tc.dense_pair->second});
    } else {
        out.result["prefix_periods"] = tc.prefix_periods;
        if (!tc.prefix_lambda0.empty()) {
            njson l0 = njson::array();
            for (const auto& q : tc.prefix_lambda0) l0.push_back(q.get_str());
            out.result["prefix_lambda0"] = l0;
        }
    }
    return out;
}

RunResult run_simulate(const RunContext& ctx) {
    FrequencySpec spec =
        parse_frequencies(require_key(ctx.doc, "frequencies", ""), "frequencies");
    CountableTorus torus = parse_torus(require_key(ctx.doc, "torus", ""), "torus");
    std::vector<double> phases = parse_phases(ctx.doc, torus.modes(), "initial_phases");
    CountableState state = CountableState::make(torus, spec, phases);

    std::vector<double> times;
    if (ctx.analysis.contains("times")) {
        times = num_array(ctx.analysis.at("times"), "analysis.times");
    } else {
        double t_lo = opt_num(ctx.analysis, "t_lo", 0.0);
        double t_hi = opt_num(ctx.analysis, "t_hi", 10.0);
        std::size_t samples = opt_count(ctx.analysis, "samples", 11);
        if (samples < 2) fail("analysis.samples", "need at least 2");
        for (std::size_t i = 0; i < samples; ++i) {
            times.push_back(t_lo + (t_hi - t_lo) * double(i) / double(samples - 1));
        }
    }
    std::ostringstream rows;
    for (double t : times) {
        CountableState st = state.evolved(t);
        for (std::size_t k = 0; k < st.modes(); ++k) {
            rows << format_double(t) << "," << (k + 1) << ","
                 << format_double(st.torus().radii()[k]) << ","
                 << format_double(st.phase(k)) << "\n";
        }
    }
    CountableState final_state = state.evolved(times.empty() ? 0.0 : times.back());
    njson modes = njson::array();
    for (std::size_t k = 0; k < final_state.modes(); ++k) {
        modes.push_back(njson{{"k", k + 1},
                              {"r", final_state.torus().radii()[k]},
                              {"theta", final_state.phase(k)}});
    }
    RunResult out;
    out.result = njson{{"samples", times.size()},
                       {"energy", energy(state)},
                       {"actions", actions(state)},
                       {"final", njson{{"t", final_state.elapsed()}, {"modes", modes}}}};
    out.csv = csv_header(ctx.hash, ctx.name, "t,mode,r,theta") + rows.str();
    return out;
}

RunResult run_recur(const RunContext& ctx) {
    FrequencySpec spec =
        parse_frequencies(require_key(ctx.doc, "frequencies", ""), "frequencies");
    CountableTorus torus = parse_torus(require_key(ctx.doc, "torus", ""), "torus");
    std::vector<double> phases = parse_phases(ctx.doc, torus.modes(), "initial_phases");
    CountableState state = CountableState::make(torus, spec, phases);
    double epsilon = opt_num(ctx.analysis, "epsilon", 0.0);
    if (ctx.analysis.contains("epsilon_rel")) {
        epsilon = ctx.analysis.at("epsilon_rel").get<double>() *
                  std::sqrt(torus.energy_norm_sq());
    }
    if (!(epsilon > 0.0)) fail("analysis.epsilon", "must be > 0");
    double t_min = opt_num(ctx.analysis, "t_min", 1.0);
    double t_max = opt_num(ctx.analysis, "t_max", 1e4);
    RecurrenceReport rep;
    try {
        rep = recurrence_search(state, epsilon, t_min, t_max);
    } catch (const FlowError& e) {
        fail("analysis", e.what());
    }
    njson returns = njson::array();
    std::ostringstream rows;
    for (const auto& r : rep.return_times) {
        returns.push_back(njson{{"t", r.t}, {"distance", r.distance}});
        rows << format_double(r.t) << "," << format_double(r.distance) << "\n";
    }
    RunResult out;
    out.result = njson{
        {"verdict", rep.verdict == RecurrenceReport::Verdict::ReturnsFound
                        ? "returns_found"
                        : "none_found_within_horizon"},
        {"epsilon", rep.epsilon},
        {"t_min", rep.t_min},
        {"scan_horizon", rep.scan_horizon},
        {"scan_step", rep.scan_step},
        {"tail_distance_allowance", rep.tail_distance_allowance},
        {"returns", returns}};
    out.csv = csv_header(ctx.hash, ctx.name, "t,distance") + rows.str();
    return out;
}

RunResult run_weyl(const RunContext& ctx) {
    FrequencySpec spec =
        parse_frequencies(require_key(ctx.doc, "frequencies", ""), "frequencies");
    std::size_t n = spec.list_size();
    if (spec.rule() != FrequencySpec::Rule::ExplicitList || n < 2 || n > 4) {
        fail("frequencies", "weyl needs an explicit list of 2..4 frequencies");
    }
    std::vector<double> freqs;
    for (std::size_t k = 1; k <= n; ++k) freqs.push_back(spec.at_mode(k));
    std::size_t samples = opt_count(ctx.analysis, "samples", 100000);
    std::size_t bins = opt_count(ctx.analysis, "bins", 16);
    bool ladder = !ctx.analysis.contains("ladder") || ctx.analysis.at("ladder").get<bool>();
    std::vector<std::size_t> sizes;
    if (ladder) {
        for (std::size_t s : {samples / 100, samples / 10, samples}) {
            if (s >= bins * bins && (sizes.empty() || s != sizes.back())) sizes.push_back(s);
        }
    } else {
        sizes.push_back(samples);
    }
    njson entries = njson::array();
    std::ostringstream rows;
    for (std::size_t s : sizes) {
        double d = weyl_discrepancy(freqs, s, bins);
        entries.push_back(njson{{"samples", s}, {"bins", bins}, {"discrepancy", d}});
        rows << s << "," << bins << "," << format_double(d) << "\n";
    }
    RunResult out;
    out.result = njson{{"entries", entries}};
    out.csv = csv_header(ctx.hash, ctx.name, "samples,bins,discrepancy") + rows.str();
    return out;
}

RunResult run_sigma_scan(const RunContext& ctx) {
    Measure mu = parse_measure(require_key(ctx.doc, "measure", ""), "measure");
    int depth = static_cast<int>(opt_num(ctx.analysis, "depth", 6.0));
    double sigma = opt_num(ctx.analysis, "sigma", 0.5);
    double window_lo = opt_num(ctx.analysis, "window_lo", 1e3);
    double window_hi = opt_num(ctx.analysis, "window_hi", 1e4);
    std::size_t samples = opt_count(ctx.analysis, "samples", 2048);
    SigmaScanReport rep;
    try {
        rep = sigma_condition_scan(mu, depth, sigma, window_lo, window_hi, samples);
    } catch (const MeasureError& e) {
        fail("analysis", e.what());
    }
    RunResult out;
    out.result = njson{{"holds_on_family", rep.holds_on_family},
                       {"label", rep.label},
                       {"sigma", rep.sigma},
                       {"dyadic_depth", rep.dyadic_depth},
                       {"window", njson::array({rep.window_lo, rep.window_hi})},
                       {"samples", rep.samples},
                       {"cells_tested", rep.cells_tested},
                       {"cells_skipped", rep.cells_skipped}};
    if (rep.failing_cell) {
        out.result["failing_cell"] =
            njson::array({rep.failing_cell->lo, rep.failing_cell->hi});
        out.result["failing_sup"] = rep.failing_sup;
        out.result["failing_mass"] = rep.failing_mass;
    }
    return out;
}

RunResult run_nonperiodic_ac(const RunContext& ctx) {
    Measure mu = parse_measure(require_key(ctx.doc, "measure", ""), "measure");
    if (mu.terms().size() != 1 ||
        !std::holds_alternative<DensityMeasure>(mu.terms()[0].component)) {
        fail("measure", "nonperiodic-ac needs a single density measure");
    }
    const auto& rho = std::get<DensityMeasure>(mu.terms()[0].component);
    FrequencySpec spec =
        parse_frequencies(require_key(ctx.doc, "frequencies", ""), "frequencies");
    AmplitudeProfile amp = ctx.doc.contains("amplitude")
                               ? parse_profile(ctx.doc.at("amplitude"), "amplitude")
                               : AmplitudeProfile::constant(1.0);
    auto interval =
        num_array(require_key(ctx.analysis, "interval", "analysis"), "analysis.interval");
    if (interval.size() != 2) fail("analysis.interval", "expected [lo, hi]");
    std::vector<double> periods;
    if (ctx.analysis.contains("T")) {
        if (ctx.analysis.at("T").is_array()) {
            periods = num_array(ctx.analysis.at("T"), "analysis.T");
        } else {
            periods.push_back(ctx.analysis.at("T").get<double>());
        }
    } else {
        fail("analysis.T", "missing");
    }
    std::size_t m_max = opt_count(ctx.analysis, "m_max", 200);

    njson runs = njson::array();
    std::ostringstream rows;
    for (double T : periods) {
        NonperiodicityReport rep;
        try {
            rep = nonperiodicity_check_ac(rho, spec, interval[0], interval[1], amp, T, m_max);
        } catch (const FlowError& e) {
            fail("analysis", e.what());
        }
        runs.push_back(njson{{"T", rep.T},
                             {"threshold", rep.threshold},
                             {"m_max", rep.m_max},
                             {"m_half_lo", rep.m_half_lo},
                             {"min_large_m", rep.min_large_m},
                             {"argmin_m", rep.argmin_m},
                             {"passed", rep.passed}});
        for (std::size_t m = 1; m <= rep.m_max; ++m) {
            rows << format_double(T) << "," << m << ","
                 << format_double(rep.displacement[m - 1]) << "\n";
        }
    }
    RunResult out;
    out.result = njson{{"runs", runs}};
    out.csv = csv_header(ctx.hash, ctx.name, "T,m,displacement") + rows.str();
    return out;
}

}  // namespace

// ---------------------------------------------------------------- scenario ---

struct ScenarioData {
    njson doc;
};

Scenario Scenario::from_json_text(const std::string& text) {
    njson doc;
    try {
        doc = njson::parse(text);
    } catch (const njson::parse_error& e) {
        throw ValidationError("(document)", std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("(document)", "expected a JSON object");
    Scenario s;
    s.raw_ = text;
    s.hash_ = fnv1a_hex(text);
    s.name_ = opt_str(doc, "name", "");
    const njson& analysis = require_key(doc, "analysis", "");
    s.op_ = require_str(analysis, "op", "analysis");
    static const char* kOps[] = {"charfn",    "wander", "classify-freqs",
                                 "classify",  "simulate", "recur",
                                 "weyl",      "sigma-scan", "nonperiodic-ac"};
    if (std::find_if(std::begin(kOps), std::end(kOps), [&](const char* o) {
            return s.op_ == o;
        }) == std::end(kOps)) {
        throw ValidationError("analysis.op", "unknown operation '" + s.op_ + "'");
    }
    if (doc.contains("output") && doc.at("output").is_object()) {
        const njson& outj = doc.at("output");
        if (outj.contains("json")) s.json_path_ = outj.at("json").get<std::string>();
        if (outj.contains("csv")) s.csv_path_ = outj.at("csv").get<std::string>();
    }
    auto data = std::make_shared<ScenarioData>();
    data->doc = std::move(doc);
    s.data_ = std::shared_ptr<const void>(data, static_cast<const void*>(data.get()));
    return s;
}

ScenarioOutput Scenario::run() const {
    const auto* data = static_cast<const ScenarioData*>(data_.get());
    const njson& doc = data->doc;
    RunContext ctx{doc, doc.at("analysis"), hash_, name_};
    RunResult r;
    if (op_ == "charfn") r = run_charfn(ctx);
    else if (op_ == "wander") r = run_wander(ctx);
    else if (op_ == "classify-freqs") r = run_classify_freqs(ctx);
    else if (op_ == "classify") r = run_classify(ctx);
    else if (op_ == "simulate") r = run_simulate(ctx);
    else if (op_ == "recur") r = run_recur(ctx);
    else if (op_ == "weyl") r = run_weyl(ctx);
    else if (op_ == "sigma-scan") r = run_sigma_scan(ctx);
    else if (op_ == "nonperiodic-ac") r = run_nonperiodic_ac(ctx);
    else throw ValidationError("analysis.op", "unknown operation");

    njson out{{"meta",
               njson{{"tool", kToolName},
                     {"version", kToolVersion},
                     {"scenario_hash", hash_},
                     {"name", name_},
                     {"op", op_}}},
              {"result", r.result}};
    ScenarioOutput so;
    so.json = out.dump(2) + "\n";
    so.csv = std::move(r.csv);
    return so;
}

void validate_result_document(const std::string& json_text) {
    njson doc;
    try {
        doc = njson::parse(json_text);
    } catch (const njson::parse_error& e) {
        throw ValidationError("(result)", std::string("not valid JSON: ") + e.what());
    }
    if (!doc.contains("meta") || !doc.contains("result")) {
        throw ValidationError("(result)", "missing meta/result sections");
    }
    const njson& meta = doc.at("meta");
    for (const char* key : {"tool", "version", "scenario_hash", "op"}) {
        if (!meta.contains(key)) {
            throw ValidationError(std::string("meta.") + key, "missing");
        }
    }
    std::string op = meta.at("op").get<std::string>();
    const njson& result = doc.at("result");
    auto need = [&](std::initializer_list<const char*> keys) {
        for (const char* k : keys) {
            if (!result.contains(k)) {
                throw ValidationError("result." + std::string(k),
                                      "missing for op '" + op + "'");
            }
        }
    };
    if (op == "charfn") need({"rows", "convention"});
    else if (op == "wander") need({"certificate", "margin", "total_variation"});
    else if (op == "classify-freqs") need({"kind", "strong_commensurate", "height"});
    else if (op == "classify") need({"kind", "confidence"});
    else if (op == "simulate") need({"final", "energy", "actions"});
    else if (op == "recur") need({"verdict", "returns", "scan_step"});
    else if (op == "weyl") need({"entries"});
    else if (op == "sigma-scan") need({"holds_on_family", "label"});
    else if (op == "nonperiodic-ac") need({"runs"});
    else throw ValidationError("meta.op", "unknown operation '" + op + "'");
}

}  // namespace torusflow
