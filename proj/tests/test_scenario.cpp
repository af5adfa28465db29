#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "support/oracles.hpp"
#include "torusflow/scenario.hpp"

using namespace torusflow;

namespace {

ScenarioOutput run_text(const std::string& text) {
    return Scenario::from_json_text(text).run();
}

}  // namespace

TEST_CASE("charfn scenario emits a CSV matching the sinc closed form") {
    const char* text = R"({
      "name": "bernoulli-half",
      "measure": {"type": "bernoulli", "eta": 0.5},
      "analysis": {"op": "charfn", "t_lo": 0.1, "t_hi": 50, "samples": 64,
                   "spacing": "log", "convention": "cyclic"}
    })";
    auto out = run_text(text);
    REQUIRE(out.csv.has_value());
    std::istringstream csv(*out.csv);
    std::string line;
    bool header_seen = false;
    int rows = 0;
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.find("torusflow") != std::string::npos) header_seen = true;
            continue;
        }
        if (line.rfind("t,", 0) == 0) {
            CHECK(line == "t,re,im,abs,convention,truncation_K");
            continue;
        }
        ++rows;
        double t, re;
        char comma;
        std::istringstream row(line);
        row >> t >> comma >> re;
        CHECK(std::abs(re - oracles::sinc_2pi(t)) <= 1e-8);
    }
    CHECK(header_seen);
    CHECK(rows == 64);
    validate_result_document(out.json);
}

TEST_CASE("non-Bernoulli charfn CSV has no truncation column") {
    const char* text = R"({
      "measure": {"type": "density", "shape": "uniform", "support": [0,1], "mass": 1},
      "analysis": {"op": "charfn", "samples": 8}
    })";
    auto out = run_text(text);
    REQUIRE(out.csv.has_value());
    CHECK(out.csv->find("t,re,im,abs,convention\n") != std::string::npos);
    CHECK(out.csv->find("truncation_K") == std::string::npos);
}

TEST_CASE("validation failures carry field paths") {
    // the canonical example: eta out of range names measure.eta
    const char* bad_eta = R"({
      "measure": {"type": "bernoulli", "eta": 1.5},
      "analysis": {"op": "charfn"}
    })";
    try {
        run_text(bad_eta);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.field_path == "measure.eta");
        CHECK(std::string(e.what()).find("measure.eta") != std::string::npos);
    }

    CHECK_THROWS_AS(run_text(R"({"analysis":{"op":"nonsense"}})"), ValidationError);
    CHECK_THROWS_AS(run_text(R"({"analysis":{"op":"charfn"}})"), ValidationError);
    CHECK_THROWS_AS(run_text("{not json"), ValidationError);
    try {
        run_text(R"({"measure":{"type":"atomic","atoms":[[0,-1]]},"analysis":{"op":"charfn"}})");
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.field_path == "measure");
    }
}

TEST_CASE("scenario runs are deterministic") {
    const char* text = R"({
      "name": "det",
      "seed": 7,
      "frequencies": {"type": "list", "values": ["1", "sqrt2", "5/2"]},
      "torus": {"type": "list", "radii": [1.0, 0.5, 0.25]},
      "initial_phases": {"type": "random"},
      "analysis": {"op": "simulate", "t_lo": 0, "t_hi": 5, "samples": 6}
    })";
    auto a = run_text(text);
    auto b = run_text(text);
    CHECK(a.json == b.json);
    REQUIRE(a.csv.has_value());
    CHECK(*a.csv == *b.csv);
    validate_result_document(a.json);
}

TEST_CASE("every operation round-trips through the result validator") {
    const char* scenarios[] = {
        R"({"measure":{"type":"bernoulli","eta":0.5},
            "analysis":{"op":"charfn","samples":8}})",
        R"({"measure":{"type":"density","shape":"uniform","support":[0,1],"mass":1},
            "analysis":{"op":"wander","margin":0.5}})",
        R"({"frequencies":{"type":"list","values":["2","3"]},
            "analysis":{"op":"classify-freqs","height":1000}})",
        R"({"frequencies":{"type":"factorial"},
            "torus":{"type":"geometric","a":1.0,"q":0.5,"modes":6},
            "analysis":{"op":"classify","prefixes":[3,4,5,6]}})",
        R"({"frequencies":{"type":"list","values":["1","sqrt2"]},
            "torus":{"type":"list","radii":[1,1]},
            "analysis":{"op":"simulate","t_lo":0,"t_hi":1,"samples":3}})",
        R"({"frequencies":{"type":"list","values":["1","1/2","1/3"]},
            "torus":{"type":"list","radii":[1,0.7,0.4]},
            "analysis":{"op":"recur","epsilon":1e-6,"t_min":1,"t_max":50}})",
        R"({"frequencies":{"type":"list","values":["1","sqrt2"]},
            "analysis":{"op":"weyl","samples":4096,"bins":8}})",
        R"({"measure":{"type":"density","shape":"uniform","support":[0,1],"mass":1},
            "analysis":{"op":"sigma-scan","depth":3,"sigma":0.5,
                        "window_lo":1e3,"window_hi":1e4,"samples":256}})",
        R"({"measure":{"type":"density","shape":"uniform","support":[0,1],"mass":1},
            "frequencies":{"type":"identity"},
            "analysis":{"op":"nonperiodic-ac","interval":[0,1],"T":[1.0],"m_max":40}})",
    };
    for (const char* s : scenarios) {
        auto out = run_text(s);
        CHECK_NOTHROW(validate_result_document(out.json));
        CHECK(out.json.find("scenario_hash") != std::string::npos);
    }
}

TEST_CASE("result documents echo the scenario hash") {
    const char* text = R"({"measure":{"type":"bernoulli","eta":0.5},
                           "analysis":{"op":"charfn","samples":4}})";
    Scenario s = Scenario::from_json_text(text);
    auto out = s.run();
    CHECK(out.json.find(s.hash()) != std::string::npos);
    REQUIRE(out.csv.has_value());
    CHECK(out.csv->find(s.hash()) != std::string::npos);
    // different text, different hash
    Scenario s2 = Scenario::from_json_text(
        R"({"measure":{"type":"bernoulli","eta":0.4},"analysis":{"op":"charfn","samples":4}})");
    CHECK(s.hash() != s2.hash());
}

TEST_CASE("torus and phase rules parse") {
    const char* text = R"({
      "frequencies": {"type": "linear"},
      "torus": {"type": "power", "a": 1.0, "s": 1.0, "modes": 6},
      "initial_phases": {"type": "list", "values": [0, 0.5, 1, 1.5, 2, 2.5]},
      "analysis": {"op": "simulate", "times": [0.0, 2.0]}
    })";
    auto out = run_text(text);
    CHECK_NOTHROW(validate_result_document(out.json));
    // wrong phase count names the field
    const char* bad = R"({
      "frequencies": {"type": "linear"},
      "torus": {"type": "list", "radii": [1, 1]},
      "initial_phases": {"type": "list", "values": [0]},
      "analysis": {"op": "simulate", "times": [0.0]}
    })";
    try {
        run_text(bad);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.field_path == "initial_phases.values");
    }
}

TEST_CASE("amplitude profiles weight the measure before analysis") {
    const char* text = R"({
      "measure": {"type": "density", "shape": "uniform", "support": [0,1], "mass": 1},
      "amplitude": {"type": "identity"},
      "analysis": {"op": "wander", "margin": 0.5,
                   "window_lo": 1.0, "window_hi": 500.0, "samples": 512}
    })";
    auto out = run_text(text);
    CHECK(out.json.find("\"certificate\"") != std::string::npos);
    CHECK(out.json.find("0.3333333") != std::string::npos);  // ||mu_u|| = 1/3
}
