#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "commands.hpp"
#include "ppcalc/ppcalc.h"

#include <cstdio>
#include <fstream>

using namespace ppcalc;

namespace {

FpModule diag_module(const std::vector<Int>& orders) {
    FpModule m;
    m.gens = static_cast<int>(orders.size());
    IntMatrix rel(m.gens, m.gens);
    for (int i = 0; i < m.gens; ++i) rel.at(i, i) = orders[static_cast<size_t>(i)];
    m.rel = Lattice::from_rows(rel);
    return m;
}

// scratch files live in the test working directory inside the build tree
std::string tmp(const char* name) { return std::string("tmp_") + name; }

CommandResult run(Session& s, std::initializer_list<const char*> args) {
    return run_command(s, std::vector<std::string>(args.begin(), args.end()));
}

} // namespace

TEST_CASE("empty session round-trips with a stable digest") {
    Session s;
    const std::string path = tmp("empty_session.json");
    save_session(s, path);
    Session back = load_session(path);
    CHECK(json_of(back) == json_of(s));
    CHECK(session_digest(back) == session_digest(s));
    CHECK(back.formulas.empty());
    CHECK(back.log.empty());
    std::remove(path.c_str());
}

TEST_CASE("session with every object kind survives save/load losslessly") {
    Session s;
    FpModule m24 = diag_module({2, 4});
    IntMatrix t(1, 2);
    t.at(0, 0) = 1;
    s.formulas["phi"] = pp_type_generator(m24, t);
    s.formulas["psi"] = parse_formula("E y1 . x1 = 3*y1");
    s.modules["m"] = m24;
    s.modules["free"] = diag_module({0});
    s.chains["tau"] = arrange_l_chain(m24, {0, 1}, TestClass::absolute());
    s.chains["raw"] = prufer_chain(2, 3);

    OmegaLimit lim = prufer_limit(2, 8);
    (void)lim.stage(6); // warm part of the cache; serialization must keep it
    s.limits["pr"] = lim;
    s.limits["sys"] = build_m_phi(prufer_chain(2, 4), TestClass::flat());
    s.limits["cs"] = cyclic_sum_limit({Int(2), Int(4), Int(8)});
    s.log = {"one command", "another command"};

    const std::string path = tmp("full_session.json");
    save_session(s, path);
    Session back = load_session(path);
    CHECK(json_of(back) == json_of(s));
    CHECK(session_digest(back) == session_digest(s));
    CHECK(back.formulas.at("phi") == s.formulas.at("phi"));
    CHECK(back.chains.at("tau") == s.chains.at("tau"));
    CHECK(back.chains.at("tau").verified_for == std::vector<std::string>{"absolute"});
    // cached stages reload as modules, not just counts
    CHECK(invariant_factors(back.limits.at("pr").stage(6)) ==
          std::vector<Int>{Int(64)});
    CHECK(back.log == s.log);
    std::remove(path.c_str());
}

TEST_CASE("digest separates different contents") {
    Session a, b;
    a.formulas["f"] = parse_formula("2*x1 = 0");
    b.formulas["f"] = parse_formula("3*x1 = 0");
    CHECK(session_digest(a) != session_digest(b));
    CHECK(session_digest(a).size() == 16);
}

TEST_CASE("loading rejects malformed session files") {
    const std::string path = tmp("bad_session.json");
    {
        std::ofstream out(path);
        out << "{\"formulas\": {\"f\": {\"n\": 1}}}";
    }
    CHECK_THROWS_AS(load_session(path), Error);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_session("no_such_dir/nope.json"), Error);
}

TEST_CASE("run_command: flat implication example") {
    Session s;
    CommandResult r = run(s, {"implies", "--class", "flat", "2*x1=0", "x1=0"});
    CHECK(r.exit_code == 0);
    json rep = json::parse(r.output);
    CHECK(rep.at("result").at("holds") == true);
    CHECK(rep.at("class") == "flat");

    // same question over all modules fails, with a counterexample module
    r = run(s, {"implies", "--class", "absolute", "2*x1=0", "x1=0"});
    CHECK(r.exit_code == 1);
    rep = json::parse(r.output);
    CHECK(rep.at("result").at("holds") == false);
    CHECK(rep.at("result").at("counterexample").at("kind") == "free_realization");
}

TEST_CASE("run_command: evaluation example lists the subgroup") {
    Session s;
    CommandResult r = run(s, {"eval", "E y1 . x1 - 2*y1 = 0", "--module",
                              R"({"gens":1,"relations":[[4]]})"});
    CHECK(r.exit_code == 0);
    json rep = json::parse(r.output);
    CHECK(rep.at("subgroup_basis") == json::parse(R"([["2"]])"));
    CHECK(rep.at("member_count") == 2);
    CHECK(rep.at("members") == json::parse(R"([[["0"]],[["2"]]])"));
}

TEST_CASE("run_command: demo z4 reports the purity split") {
    Session s;
    CommandResult r = run(s, {"demo", "z4"});
    CHECK(r.exit_code == 0);
    json rep = json::parse(r.output);
    CHECK(rep.at("pure").at("absolute") == false);
    CHECK(rep.at("pure").at("flat") == true);
    CHECK(rep.at("phi_equals_divisibility_form") == true);
    CHECK(rep.at("both_flat_trivial").at("phi") == true);
    CHECK(rep.at("both_flat_trivial").at("psi") == true);
    CHECK(rep.at("psi").at("text") == "2*x1 = 0");
}

TEST_CASE("run_command: exit codes cover the documented table") {
    Session s;
    CHECK(run(s, {"equiv", "2*x1=0", "x1=0", "--class", "flat"}).exit_code == 0);
    CHECK(run(s, {"equiv", "2*x1=0", "x1=0", "--class", "absolute"}).exit_code == 1);
    CHECK(run(s, {"no_such_command"}).exit_code == 64);
    CHECK(run(s, {"implies", "2*x1 =", "x1=0", "--class", "flat"}).exit_code == 65);
    CHECK(run(s, {"eval", "x1=0"}).exit_code == 2);                    // missing --module
    CHECK(run(s, {"eval", "x1=0", "--module"}).exit_code == 2);        // missing value
    CHECK(run(s, {"eval", "x1=0", "--bogus", "1"}).exit_code == 2);    // unknown flag
    CHECK(run(s, {"implies", "x1=0", "x1=0", "--class", "weird"}).exit_code == 2);
    CHECK(run(s, {"eval", "x1=0", "--module", "{\"gens\":"}).exit_code == 65);
    CHECK(run(s, {"realize", "--module", R"({"gens":1,"relations":[[4]]})",
                  "--limit", "@x", "--class", "flat"})
              .exit_code == 2);
    // error reports name the failing piece
    CommandResult r = run(s, {"pptype", "--module", R"({"gens":1,"relations":[[4]]})",
                              "--tuple", "[[1,2]]"});
    CHECK(r.exit_code == 2);
    CHECK(json::parse(r.output).contains("error"));
}

TEST_CASE("run_command: demos are deterministic byte for byte") {
    Session s1, s2;
    CHECK(run(s1, {"demo", "z4"}).output == run(s2, {"demo", "z4"}).output);
    CHECK(run(s1, {"demo", "prufer", "--budget", "4"}).output ==
          run(s2, {"demo", "prufer", "--budget", "4"}).output);
    Session s3;
    CHECK(run(s3, {"demo", "z4", "--format", "text"}).output ==
          run(s3, {"demo", "z4", "--format", "text"}).output);
}

TEST_CASE("run_command verdicts match direct library calls") {
    Session s;
    const char* pairs[][2] = {
        {"2*x1=0", "4*x1=0"},
        {"4*x1=0", "2*x1=0"},
        {"E y1 . x1 = 2*y1", "E y1 . x1 = 4*y1"},
        {"E y1 . x1 = 4*y1", "E y1 . x1 = 2*y1"},
        {"E y1 . x1 = 2*y1 & 2*x1 = 0", "2*x1 = 0"},
    };
    const char* classes[] = {"absolute", "flat", "abspure"};
    for (auto& pr : pairs) {
        PpFormula f = parse_formula(pr[0]);
        PpFormula g = parse_formula(pr[1]);
        for (const char* cname : classes) {
            ImplicationResult lib = implies(f, g, test_class_from_spec(cname));
            CommandResult r = run(s, {"implies", pr[0], pr[1], "--class", cname});
            CHECK(r.exit_code == (lib.holds ? 0 : 1));
            CHECK(json::parse(r.output).at("result").at("holds") == lib.holds);
        }
    }
}

TEST_CASE("run_command: explicit class files work end to end") {
    const std::string path = tmp("class_pool.json");
    {
        std::ofstream out(path);
        out << R"([{"gens":1,"relations":[[2]]},{"gens":1,"relations":[[4]]}])";
    }
    Session s;
    std::string spec = "explicit:" + path;
    // holds in Z/2 (both formulas are everything) but fails in Z/4 at x = 1
    CommandResult r = run(s, {"implies", "4*x1 = 0", "2*x1 = 0",
                              "--class", spec.c_str()});
    CHECK(r.exit_code == 1);
    json rep = json::parse(r.output);
    CHECK(rep.at("result").at("counterexample").at("kind") == "list_member");
    CHECK(rep.at("result").at("counterexample").at("member_index") == 1);

    ImplicationResult lib = implies(parse_formula("4*x1 = 0"),
                                    parse_formula("2*x1 = 0"),
                                    test_class_from_spec(spec));
    CHECK(lib.holds == false);
    CHECK(lib.member_index == 1);
    std::remove(path.c_str());

    CHECK(run(s, {"implies", "x1=0", "x1=0", "--class", spec.c_str()}).exit_code == 2);
}

TEST_CASE("run_command: --store then @name, --save then --session") {
    Session s;
    CommandResult r = run(s, {"pptype", "--module", R"({"gens":1,"relations":[[4]]})",
                              "--tuple", "[[2]]", "--store", "phi"});
    CHECK(r.exit_code == 0);
    REQUIRE(s.formulas.count("phi") == 1);

    r = run(s, {"implies", "@phi", "2*x1 = 0", "--class", "absolute"});
    CHECK(r.exit_code == 0);

    const std::string path = tmp("cli_session.json");
    r = run(s, {"freerealize", "@phi", "--store", "frmod", "--save", path.c_str()});
    CHECK(r.exit_code == 0);

    Session fresh;
    r = run(fresh, {"eval", "@phi", "--module", "@frmod", "--session", path.c_str()});
    CHECK(r.exit_code == 0);
    CHECK(fresh.modules.count("frmod") == 1);
    CHECK(fresh.log.size() >= 3); // loaded log plus this command
    std::remove(path.c_str());
}

TEST_CASE("run_command: limits round-trip through session files") {
    Session s;
    CommandResult r = run(s, {"chain", "arrange", "--module",
                              R"({"gens":2,"relations":[[2,0],[0,4]]})",
                              "--class", "absolute", "--store", "tau"});
    CHECK(r.exit_code == 0);
    r = run(s, {"chain", "build", "--chain", "@tau", "--class", "absolute",
                "--store", "sys"});
    CHECK(r.exit_code == 0);
    const std::string path = tmp("limit_session.json");
    r = run(s, {"demo", "z4", "--save", path.c_str()});
    CHECK(r.exit_code == 0);

    Session fresh;
    r = run(fresh, {"limit", "stabilize", "--limit", "@sys", "--tuple", "[[1,0]]",
                    "--class", "absolute", "--session", path.c_str()});
    CHECK(r.exit_code == 0);
    json rep = json::parse(r.output);
    CHECK(rep.at("tail").at("stabilized") == true);
    std::remove(path.c_str());
}

TEST_CASE("C API: formulas, modules, and operations") {
    ppc_formula* f = nullptr;
    REQUIRE(ppc_formula_parse("E y1 . x1 = 2*y1", &f) == PPC_OK);
    char* text = nullptr;
    REQUIRE(ppc_formula_format(f, &text) == PPC_OK);
    CHECK(std::string(text) == "E y1 . x1 = 2*y1");
    ppc_string_free(text);

    char* fjson = nullptr;
    REQUIRE(ppc_formula_to_json(f, &fjson) == PPC_OK);
    ppc_formula* f2 = nullptr;
    REQUIRE(ppc_formula_from_json(fjson, &f2) == PPC_OK);
    int eq = 0;
    REQUIRE(ppc_formula_equal(f, f2, &eq) == PPC_OK);
    CHECK(eq == 1);
    ppc_string_free(fjson);

    ppc_formula* g = nullptr;
    REQUIRE(ppc_formula_parse("2*x1 = 0", &g) == PPC_OK);
    ppc_formula* fg = nullptr;
    REQUIRE(ppc_formula_meet(f, g, &fg) == PPC_OK);
    ppc_formula* fj = nullptr;
    REQUIRE(ppc_formula_join(f, g, &fj) == PPC_OK);
    ppc_formula* fd = nullptr;
    REQUIRE(ppc_formula_dual(f, &fd) == PPC_OK);

    CHECK(ppc_implies(g, f, "flat") == PPC_OK);
    CHECK(ppc_implies(g, f, "absolute") == PPC_PROPERTY_FAILED);
    CHECK(std::string(ppc_last_error()) == "implication fails");
    CHECK(ppc_equivalent(f, f, "absolute") == PPC_OK);
    CHECK(ppc_implies(g, f, "nonsense") == PPC_INPUT_ERROR);

    ppc_module* m = nullptr;
    REQUIRE(ppc_module_from_json("{\"gens\":1,\"relations\":[[4]]}", &m) == PPC_OK);
    char* factors = nullptr;
    REQUIRE(ppc_module_invariant_factors(m, &factors) == PPC_OK);
    CHECK(std::string(factors) == "[\"4\"]");
    ppc_string_free(factors);

    char* basis = nullptr;
    REQUIRE(ppc_eval(f, m, &basis) == PPC_OK);
    CHECK(std::string(basis) == "[[\"2\"]]");
    ppc_string_free(basis);

    CHECK(ppc_is_pure(m, "[[2]]", "flat") == PPC_OK);
    CHECK(ppc_is_pure(m, "[[2]]", "absolute") == PPC_PROPERTY_FAILED);
    CHECK(ppc_is_pure(m, "[[2,3]]", "flat") == PPC_INPUT_ERROR); // width mismatch
    CHECK(ppc_is_pure(m, "[[2", "flat") == PPC_PARSE_ERROR);

    ppc_formula_free(f);
    ppc_formula_free(f2);
    ppc_formula_free(g);
    ppc_formula_free(fg);
    ppc_formula_free(fj);
    ppc_formula_free(fd);
    ppc_module_free(m);

    CHECK(ppc_formula_parse("x1 = ", &f) == PPC_PARSE_ERROR);
    CHECK(std::string(ppc_last_error()).size() > 0);
    CHECK(ppc_formula_parse(nullptr, &f) == PPC_INPUT_ERROR);
}

TEST_CASE("C API: sessions and command dispatch") {
    ppc_session* s = ppc_session_new();
    REQUIRE(s != nullptr);

    const char* argv1[] = {"implies", "--class", "flat", "2*x1=0", "x1=0"};
    char* report = nullptr;
    CHECK(ppc_run_command(s, 5, argv1, &report) == PPC_OK);
    REQUIRE(report != nullptr);
    CHECK(json::parse(report).at("result").at("holds") == true);
    ppc_string_free(report);

    const char* argv2[] = {"what"};
    report = nullptr;
    CHECK(ppc_run_command(s, 1, argv2, &report) == PPC_UNKNOWN_COMMAND);
    ppc_string_free(report);

    const char* argv3[] = {"pptype", "--module", "{\"gens\":1,\"relations\":[[4]]}",
                           "--tuple", "[[2]]", "--store", "phi"};
    report = nullptr;
    CHECK(ppc_run_command(s, 7, argv3, &report) == PPC_OK);
    ppc_string_free(report);

    char* digest1 = nullptr;
    REQUIRE(ppc_session_digest(s, &digest1) == PPC_OK);

    const std::string path = tmp("capi_session.json");
    REQUIRE(ppc_session_save(s, path.c_str()) == PPC_OK);

    ppc_session* s2 = ppc_session_new();
    REQUIRE(ppc_session_load(s2, path.c_str()) == PPC_OK);
    char* digest2 = nullptr;
    REQUIRE(ppc_session_digest(s2, &digest2) == PPC_OK);
    CHECK(std::string(digest1) == std::string(digest2));

    char* j1 = nullptr;
    char* j2 = nullptr;
    REQUIRE(ppc_session_to_json(s, &j1) == PPC_OK);
    REQUIRE(ppc_session_to_json(s2, &j2) == PPC_OK);
    CHECK(std::string(j1) == std::string(j2));

    ppc_string_free(digest1);
    ppc_string_free(digest2);
    ppc_string_free(j1);
    ppc_string_free(j2);
    ppc_session_free(s);
    ppc_session_free(s2);
    std::remove(path.c_str());

    CHECK(ppc_session_load(nullptr, "x") == PPC_INPUT_ERROR);
    CHECK(ppc_run_command(nullptr, 0, nullptr, nullptr) == PPC_INPUT_ERROR);
}

TEST_CASE("library objects used by the command layer stay consistent") {
    // the witness module reported for a failed absolute implication really is
    // a counterexample: it satisfies the premise and refutes the conclusion
    Session s;
    CommandResult r = run(s, {"implies", "E y1 . x1 = 2*y1 & 2*x1 = 0", "x1 = 0",
                              "--class", "absolute"});
    CHECK(r.exit_code == 1);
    json rep = json::parse(r.output);
    json cx = rep.at("result").at("counterexample");
    FpModule m = module_from(cx.at("module").at("presentation"));
    IntMatrix t = matrix_from(cx.at("tuple"), "tuple", m.gens);
    PpFormula premise = parse_formula("E y1 . x1 = 2*y1 & 2*x1 = 0");
    PpFormula conclusion = parse_formula("x1 = 0");
    CHECK(evaluate(premise, m).contains_tuple(t));
    CHECK(!evaluate(conclusion, m).contains_tuple(t));
}
