// torusflow — batch front end for the oscillator-system analyses.
// Scenario JSON in, verdict JSON + plot-ready CSV out. The CLI is the only
// place that touches the filesystem; everything behind it is pure.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "torusflow/errors.hpp"
#include "torusflow/scenario.hpp"
#include "torusflow/version.hpp"

namespace {

using torusflow::Scenario;
using torusflow::ScenarioOutput;

struct CommonArgs {
    std::string scenario_path;
    std::string json_path;
    std::string csv_path;

    // quick measure flags (scenario-less runs)
    double eta = -1.0;
    std::vector<double> uniform;      // lo hi mass
    std::vector<double> triangular;   // lo hi mass
    std::string atoms;                // "loc:w,loc:w"
    std::string freqs;                // "1,1/2,sqrt2"
    std::string freq_rule;            // linear | factorial | sine_gordon | identity
    double sg_mass = 1.0;
    std::string radii;                // "1,1,1"
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("-s,--scenario", args.scenario_path, "scenario JSON file");
    cmd->add_option("--json", args.json_path, "write the result document here ('-' = stdout)");
    cmd->add_option("--csv", args.csv_path, "write the CSV table here ('-' = stdout)");
}

void add_measure_flags(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--eta", args.eta, "Bernoulli measure parameter in (0,1)");
    cmd->add_option("--uniform", args.uniform, "uniform density: LO HI MASS")->expected(3);
    cmd->add_option("--triangular", args.triangular, "triangular density: LO HI MASS")
        ->expected(3);
    cmd->add_option("--atoms", args.atoms, "atomic measure: 'loc:w,loc:w,...'");
}

void add_freq_flags(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--freqs", args.freqs, "frequency list: '1,1/2,sqrt2,...'");
    cmd->add_option("--freq-rule", args.freq_rule,
                    "frequency rule: linear | factorial | sine_gordon | identity");
    cmd->add_option("--sg-mass", args.sg_mass, "sine-Gordon mass parameter");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

std::string measure_json(const CommonArgs& args) {
    std::ostringstream os;
    if (args.eta > 0.0) {
        os << "{\"type\":\"bernoulli\",\"eta\":" << args.eta << "}";
    } else if (args.uniform.size() == 3) {
        os << "{\"type\":\"density\",\"shape\":\"uniform\",\"support\":[" << args.uniform[0]
           << "," << args.uniform[1] << "],\"mass\":" << args.uniform[2] << "}";
    } else if (args.triangular.size() == 3) {
        os << "{\"type\":\"density\",\"shape\":\"triangular\",\"support\":["
           << args.triangular[0] << "," << args.triangular[1]
           << "],\"mass\":" << args.triangular[2] << "}";
    } else if (!args.atoms.empty()) {
        os << "{\"type\":\"atomic\",\"atoms\":[";
        bool first = true;
        for (const auto& pair : split(args.atoms, ',')) {
            auto loc_w = split(pair, ':');
            if (loc_w.size() != 2) throw torusflow::ValidationError("--atoms", "use loc:w,...");
            if (!first) os << ",";
            os << "[" << loc_w[0] << "," << loc_w[1] << "]";
            first = false;
        }
        os << "]}";
    } else {
        throw torusflow::ValidationError(
            "measure", "give --scenario or one of --eta/--uniform/--triangular/--atoms");
    }
    return os.str();
}

std::string freqs_json(const CommonArgs& args) {
    if (!args.freq_rule.empty()) {
        if (args.freq_rule == "sine_gordon") {
            std::ostringstream os;
            os << "{\"type\":\"sine_gordon\",\"m\":" << args.sg_mass << "}";
            return os.str();
        }
        return "{\"type\":\"" + json_escape(args.freq_rule) + "\"}";
    }
    if (!args.freqs.empty()) {
        std::ostringstream os;
        os << "{\"type\":\"list\",\"values\":[";
        bool first = true;
        for (const auto& f : split(args.freqs, ',')) {
            if (!first) os << ",";
            os << "\"" << json_escape(f) << "\"";
            first = false;
        }
        os << "]}";
        return os.str();
    }
    throw torusflow::ValidationError("frequencies", "give --scenario, --freqs or --freq-rule");
}

std::string radii_json(const CommonArgs& args, std::size_t fallback_modes) {
    std::ostringstream os;
    if (!args.radii.empty()) {
        os << "{\"type\":\"list\",\"radii\":[";
        bool first = true;
        for (const auto& r : split(args.radii, ',')) {
            if (!first) os << ",";
            os << r;
            first = false;
        }
        os << "]}";
    } else {
        os << "{\"type\":\"geometric\",\"a\":1.0,\"q\":0.5,\"modes\":" << fallback_modes << "}";
    }
    return os.str();
}

int write_output(const Scenario& scenario, const CommonArgs& args) {
    ScenarioOutput out = scenario.run();

    std::string json_path = !args.json_path.empty()
                                ? args.json_path
                                : scenario.json_path().value_or("-");
    std::string csv_path =
        !args.csv_path.empty() ? args.csv_path : scenario.csv_path().value_or("");

    if (json_path == "-") {
        std::cout << out.json;
    } else {
        std::ofstream f(json_path, std::ios::binary);
        if (!f) {
            std::cerr << "error: cannot write " << json_path << "\n";
            return 1;
        }
        f << out.json;
    }
    if (out.csv && !csv_path.empty()) {
        if (csv_path == "-") {
            std::cout << *out.csv;
        } else {
            std::ofstream f(csv_path, std::ios::binary);
            if (!f) {
                std::cerr << "error: cannot write " << csv_path << "\n";
                return 1;
            }
            f << *out.csv;
        }
    }
    return 0;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw torusflow::ValidationError(path, "cannot read scenario file");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// assemble a scenario document from a subcommand's flags
std::string assemble(const std::string& op, const std::string& sections,
                     const std::string& analysis_params) {
    std::ostringstream os;
    os << "{" << sections;
    if (!sections.empty()) os << ",";
    os << "\"analysis\":{\"op\":\"" << op << "\"";
    if (!analysis_params.empty()) os << "," << analysis_params;
    os << "}}";
    return os.str();
}

int run_one(const std::string& op, const CommonArgs& args,
            const std::string& sections_if_no_scenario,
            const std::string& analysis_params) {
    Scenario scenario = args.scenario_path.empty()
                            ? Scenario::from_json_text(
                                  assemble(op, sections_if_no_scenario, analysis_params))
                            : Scenario::from_json_text(read_file(args.scenario_path));
    if (scenario.op() != op) {
        throw torusflow::ValidationError(
            "analysis.op", "scenario requests '" + scenario.op() + "' but the '" + op +
                               "' subcommand was invoked");
    }
    return write_output(scenario, args);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"linear flows of harmonic-oscillator systems: measures, characteristic "
                 "functions, commensurability, and dynamical verdicts"};
    app.set_version_flag("--version",
                         std::string(torusflow::kToolName) + " " + torusflow::kToolVersion);
    app.require_subcommand(1);

    // ------------------------------------------------------------------ charfn
    CommonArgs charfn_args;
    double t_lo = 0.1, t_hi = 100.0;
    std::size_t samples = 256;
    std::string spacing = "log", convention;
    auto* cmd_charfn = app.add_subcommand("charfn", "characteristic function on a t-grid");
    add_common(cmd_charfn, charfn_args);
    add_measure_flags(cmd_charfn, charfn_args);
    cmd_charfn->add_option("--t-lo", t_lo);
    cmd_charfn->add_option("--t-hi", t_hi);
    cmd_charfn->add_option("--samples", samples);
    cmd_charfn->add_option("--spacing", spacing, "log | linear");
    cmd_charfn->add_option("--convention", convention, "angular | cyclic");

    // ------------------------------------------------------------------ wander
    CommonArgs wander_args;
    double margin = 0.5;
    auto* cmd_wander =
        app.add_subcommand("wander", "wandering certificate from the decay of mu^");
    add_common(cmd_wander, wander_args);
    add_measure_flags(cmd_wander, wander_args);
    cmd_wander->add_option("--margin", margin, "required decay margin in (0,1)");

    // ---------------------------------------------------------- classify-freqs
    CommonArgs cf_args;
    double height = 1e6;
    std::size_t cf_prefix = 0;
    auto* cmd_cf = app.add_subcommand("classify-freqs",
                                      "Jacobi trichotomy for a finite frequency set");
    add_common(cmd_cf, cf_args);
    add_freq_flags(cmd_cf, cf_args);
    cmd_cf->add_option("--height", height, "integer-relation height bound");
    cmd_cf->add_option("--prefix", cf_prefix, "prefix length for rule-based frequencies");

    // ---------------------------------------------------------------- classify
    CommonArgs cl_args;
    std::string prefixes = "3,4,5,6";
    auto* cmd_cl = app.add_subcommand("classify", "Type I/II/III trajectory classification");
    add_common(cmd_cl, cl_args);
    add_freq_flags(cmd_cl, cl_args);
    cmd_cl->add_option("--radii", cl_args.radii, "torus radii list '1,1,1,...'");
    cmd_cl->add_option("--prefixes", prefixes, "nested prefixes, e.g. '3,4,5,6'");

    // ---------------------------------------------------------------- simulate
    CommonArgs sim_args;
    double sim_lo = 0.0, sim_hi = 10.0;
    std::size_t sim_samples = 11;
    auto* cmd_sim = app.add_subcommand("simulate", "evolve a state and emit snapshots");
    add_common(cmd_sim, sim_args);
    add_freq_flags(cmd_sim, sim_args);
    cmd_sim->add_option("--radii", sim_args.radii, "torus radii list");
    cmd_sim->add_option("--t-lo", sim_lo);
    cmd_sim->add_option("--t-hi", sim_hi);
    cmd_sim->add_option("--samples", sim_samples);

    // ------------------------------------------------------------------- recur
    CommonArgs recur_args;
    double eps = 0.0, eps_rel = 0.0, rec_tmin = 1.0, rec_tmax = 1e4;
    auto* cmd_recur = app.add_subcommand("recur", "Poincare return-time scan");
    add_common(cmd_recur, recur_args);
    add_freq_flags(cmd_recur, recur_args);
    cmd_recur->add_option("--radii", recur_args.radii, "torus radii list");
    cmd_recur->add_option("--epsilon", eps, "return threshold (absolute)");
    cmd_recur->add_option("--epsilon-rel", eps_rel, "return threshold as a fraction of ||r||");
    cmd_recur->add_option("--t-min", rec_tmin);
    cmd_recur->add_option("--t-max", rec_tmax);

    // -------------------------------------------------------------------- weyl
    CommonArgs weyl_args;
    std::size_t weyl_samples = 100000, weyl_bins = 16;
    auto* cmd_weyl = app.add_subcommand("weyl", "equidistribution discrepancy of the orbit");
    add_common(cmd_weyl, weyl_args);
    add_freq_flags(cmd_weyl, weyl_args);
    cmd_weyl->add_option("--samples", weyl_samples);
    cmd_weyl->add_option("--bins", weyl_bins);

    // -------------------------------------------------------------- sigma-scan
    CommonArgs sig_args;
    int sig_depth = 6;
    double sig_sigma = 0.5, sig_wlo = 1e3, sig_whi = 1e4;
    std::size_t sig_samples = 2048;
    auto* cmd_sig = app.add_subcommand("sigma-scan",
                                       "restricted-measure decay over the dyadic family");
    add_common(cmd_sig, sig_args);
    add_measure_flags(cmd_sig, sig_args);
    cmd_sig->add_option("--depth", sig_depth);
    cmd_sig->add_option("--sigma", sig_sigma);
    cmd_sig->add_option("--window-lo", sig_wlo);
    cmd_sig->add_option("--window-hi", sig_whi);
    cmd_sig->add_option("--samples", sig_samples);

    // ---------------------------------------------------------- nonperiodic-ac
    CommonArgs np_args;
    auto* cmd_np = app.add_subcommand(
        "nonperiodic-ac", "absolutely-continuous non-periodicity check (scenario only)");
    add_common(cmd_np, np_args);

    // --------------------------------------------------------------------- run
    std::string run_path;
    CommonArgs run_args;
    auto* cmd_run = app.add_subcommand("run", "run a scenario file");
    cmd_run->add_option("scenario", run_path, "scenario JSON file")->required();
    cmd_run->add_option("--json", run_args.json_path, "override the JSON output path");
    cmd_run->add_option("--csv", run_args.csv_path, "override the CSV output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_charfn->parsed()) {
            std::ostringstream sections, params;
            if (charfn_args.scenario_path.empty()) {
                sections << "\"measure\":" << measure_json(charfn_args);
            }
            params << "\"t_lo\":" << t_lo << ",\"t_hi\":" << t_hi
                   << ",\"samples\":" << samples << ",\"spacing\":\"" << spacing << "\"";
            if (!convention.empty()) params << ",\"convention\":\"" << convention << "\"";
            return run_one("charfn", charfn_args, sections.str(), params.str());
        }
        if (cmd_wander->parsed()) {
            std::ostringstream sections, params;
            if (wander_args.scenario_path.empty()) {
                sections << "\"measure\":" << measure_json(wander_args);
            }
            params << "\"margin\":" << margin;
            return run_one("wander", wander_args, sections.str(), params.str());
        }
        if (cmd_cf->parsed()) {
            std::ostringstream sections, params;
            if (cf_args.scenario_path.empty()) {
                sections << "\"frequencies\":" << freqs_json(cf_args);
            }
            params << "\"height\":" << static_cast<long long>(height);
            if (cf_prefix > 0) params << ",\"prefix\":" << cf_prefix;
            return run_one("classify-freqs", cf_args, sections.str(), params.str());
        }
        if (cmd_cl->parsed()) {
            std::ostringstream sections, params;
            if (cl_args.scenario_path.empty()) {
                auto parts = split(prefixes, ',');
                std::size_t max_prefix = 0;
                for (const auto& p : parts) {
                    max_prefix = std::max(max_prefix, static_cast<std::size_t>(
                                                          std::strtoull(p.c_str(), nullptr, 10)));
                }
                sections << "\"frequencies\":" << freqs_json(cl_args)
                         << ",\"torus\":" << radii_json(cl_args, std::max<std::size_t>(
                                                                     max_prefix, 6));
            }
            params << "\"prefixes\":[" << prefixes << "]";
            return run_one("classify", cl_args, sections.str(), params.str());
        }
        if (cmd_sim->parsed()) {
            std::ostringstream sections, params;
            if (sim_args.scenario_path.empty()) {
                sections << "\"frequencies\":" << freqs_json(sim_args)
                         << ",\"torus\":" << radii_json(sim_args, 8);
            }
            params << "\"t_lo\":" << sim_lo << ",\"t_hi\":" << sim_hi
                   << ",\"samples\":" << sim_samples;
            return run_one("simulate", sim_args, sections.str(), params.str());
        }
        if (cmd_recur->parsed()) {
            std::ostringstream sections, params;
            if (recur_args.scenario_path.empty()) {
                sections << "\"frequencies\":" << freqs_json(recur_args)
                         << ",\"torus\":" << radii_json(recur_args, 8);
            }
            if (eps_rel > 0.0) params << "\"epsilon_rel\":" << eps_rel;
            else params << "\"epsilon\":" << eps;
            params << ",\"t_min\":" << rec_tmin << ",\"t_max\":" << rec_tmax;
            return run_one("recur", recur_args, sections.str(), params.str());
        }
        if (cmd_weyl->parsed()) {
            std::ostringstream sections, params;
            if (weyl_args.scenario_path.empty()) {
                sections << "\"frequencies\":" << freqs_json(weyl_args);
            }
            params << "\"samples\":" << weyl_samples << ",\"bins\":" << weyl_bins;
            return run_one("weyl", weyl_args, sections.str(), params.str());
        }
        if (cmd_sig->parsed()) {
            std::ostringstream sections, params;
            if (sig_args.scenario_path.empty()) {
                sections << "\"measure\":" << measure_json(sig_args);
            }
            params << "\"depth\":" << sig_depth << ",\"sigma\":" << sig_sigma
                   << ",\"window_lo\":" << sig_wlo << ",\"window_hi\":" << sig_whi
                   << ",\"samples\":" << sig_samples;
            return run_one("sigma-scan", sig_args, sections.str(), params.str());
        }
        if (cmd_np->parsed()) {
            if (np_args.scenario_path.empty()) {
                throw torusflow::ValidationError("--scenario",
                                                 "nonperiodic-ac needs a scenario file");
            }
            return run_one("nonperiodic-ac", np_args, "", "");
        }
        if (cmd_run->parsed()) {
            Scenario scenario = Scenario::from_json_text(read_file(run_path));
            return write_output(scenario, run_args);
        }
    } catch (const torusflow::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const torusflow::QuadratureError& e) {
        std::cerr << "numeric error: " << e.what()
                  << " (achieved tolerance " << e.achieved_error << ")\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
