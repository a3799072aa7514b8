#include "commands.hpp"

#include "implication.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ppcalc {

namespace {

// ---------------------------------------------------------------------------
// argument scanning

struct ParsedArgs {
    std::vector<std::string> positional;
    std::map<std::string, std::string> flags;
};

ParsedArgs scan_args(const std::vector<std::string>& args) {
    ParsedArgs out;
    for (size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a.rfind("--", 0) == 0 && a.size() > 2) {
            std::string name = a.substr(2);
            if (i + 1 >= args.size())
                fail(Error::Code::argument, "flag --" + name + " needs a value");
            if (out.flags.count(name))
                fail(Error::Code::argument, "flag --" + name + " given twice");
            out.flags[name] = args[++i];
        } else {
            out.positional.push_back(a);
        }
    }
    return out;
}

void check_flags(const ParsedArgs& pa, std::initializer_list<const char*> allowed) {
    static const std::vector<std::string> global = {"format", "session", "save", "store"};
    for (const auto& [name, value] : pa.flags) {
        (void)value;
        bool ok = false;
        for (const char* a : allowed)
            if (name == a) ok = true;
        for (const auto& g : global)
            if (name == g) ok = true;
        if (!ok) fail(Error::Code::argument, "unknown flag --" + name + " for this command");
    }
}

const std::string* flag(const ParsedArgs& pa, const std::string& name) {
    auto it = pa.flags.find(name);
    return it == pa.flags.end() ? nullptr : &it->second;
}

const std::string& need_flag(const ParsedArgs& pa, const std::string& name) {
    const std::string* v = flag(pa, name);
    if (!v) fail(Error::Code::argument, "missing required flag --" + name);
    return *v;
}

void need_positional(const ParsedArgs& pa, size_t count, const char* what) {
    if (pa.positional.size() != count)
        fail(Error::Code::argument,
             std::string(what) + ": expected " + std::to_string(count) +
                 " positional argument(s), got " + std::to_string(pa.positional.size()));
}

int int_arg(const std::string& text, const std::string& what) {
    size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(text, &pos);
    } catch (const std::exception&) {
        fail(Error::Code::argument, what + " must be an integer, got '" + text + "'");
    }
    if (pos != text.size())
        fail(Error::Code::argument, what + " must be an integer, got '" + text + "'");
    return v;
}

// --budget if given, else PPCALC_BUDGET, else the built-in default.
int budget_arg(const ParsedArgs& pa, int fallback) {
    if (const std::string* b = flag(pa, "budget")) return int_arg(*b, "--budget");
    if (const char* env = std::getenv("PPCALC_BUDGET"); env && *env)
        return int_arg(env, "PPCALC_BUDGET");
    return fallback;
}

json parse_json_text(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        fail(Error::Code::parse, what + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// object resolution: @name looks in the session, otherwise inline literal

bool is_json_literal(const std::string& text) {
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
        return c == '{' || c == '[';
    }
    return false;
}

PpFormula resolve_formula(const Session& s, const std::string& arg) {
    if (!arg.empty() && arg[0] == '@') {
        auto it = s.formulas.find(arg.substr(1));
        if (it == s.formulas.end())
            fail(Error::Code::argument, "no stored formula named " + arg);
        return it->second;
    }
    if (is_json_literal(arg)) return formula_from(parse_json_text(arg, "formula"));
    return parse_formula(arg);
}

FpModule resolve_module(const Session& s, const std::string& arg) {
    if (!arg.empty() && arg[0] == '@') {
        auto it = s.modules.find(arg.substr(1));
        if (it == s.modules.end())
            fail(Error::Code::argument, "no stored module named " + arg);
        return it->second;
    }
    return module_from(parse_json_text(arg, "module"));
}

LChain resolve_chain(const Session& s, const std::string& arg) {
    if (!arg.empty() && arg[0] == '@') {
        auto it = s.chains.find(arg.substr(1));
        if (it == s.chains.end())
            fail(Error::Code::argument, "no stored chain named " + arg);
        return it->second;
    }
    return chain_from(parse_json_text(arg, "chain"));
}

OmegaLimit resolve_limit(const Session& s, const std::string& arg) {
    if (!arg.empty() && arg[0] == '@') {
        auto it = s.limits.find(arg.substr(1));
        if (it == s.limits.end())
            fail(Error::Code::argument, "no stored limit named " + arg);
        return it->second;
    }
    return limit_from(parse_json_text(arg, "limit"));
}

// Width mismatches against an already-known module are dimension errors
// (exit 2), not parse errors: the JSON itself is fine.
IntMatrix matrix_arg(const std::string& text, const char* what, int cols = -1) {
    IntMatrix m = matrix_from(parse_json_text(text, what), what);
    if (cols >= 0 && m.rows == 0) return IntMatrix(0, cols);
    if (cols >= 0 && m.cols != cols)
        fail(Error::Code::dimension, std::string(what) + ": expected " +
                                         std::to_string(cols) + " column(s), got " +
                                         std::to_string(m.cols));
    return m;
}

std::vector<int> order_arg(const std::string& text) {
    std::vector<int> out;
    if (is_json_literal(text)) {
        json j = parse_json_text(text, "--order");
        if (!j.is_array()) fail(Error::Code::argument, "--order must be a list of indices");
        for (const auto& e : j) {
            if (!e.is_number_integer())
                fail(Error::Code::argument, "--order must be a list of indices");
            out.push_back(e.get<int>());
        }
        return out;
    }
    std::stringstream ss(text);
    std::string piece;
    while (std::getline(ss, piece, ','))
        out.push_back(int_arg(piece, "--order entry"));
    return out;
}

TestClass class_arg(const ParsedArgs& pa, const char* fallback = nullptr) {
    const std::string* spec = flag(pa, "class");
    std::string text = spec ? *spec : (fallback ? fallback : "");
    if (text.empty()) fail(Error::Code::argument, "missing required flag --class");
    return test_class_from_spec(text);
}

std::string class_name(const TestClass& cls) {
    switch (cls.kind) {
        case TestClass::Kind::absolute: return "absolute";
        case TestClass::Kind::flat: return "flat";
        case TestClass::Kind::abs_pure: return "abspure";
        case TestClass::Kind::explicit_list:
            return "explicit[" + std::to_string(cls.members.size()) + "]";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// report building blocks

json fmla(const PpFormula& f) {
    return json{{"formula", json_of(f)}, {"text", format_formula(f)}};
}

json factors_json(const FpModule& m) {
    json out = json::array();
    for (const Int& d : invariant_factors(m)) out.push_back(json_of(d));
    return out;
}

json modl(const FpModule& m) {
    return json{{"presentation", json_of(m)}, {"invariant_factors", factors_json(m)}};
}

const char* witness_kind(ImplicationResult::Witness w) {
    switch (w) {
        case ImplicationResult::Witness::none: return "none";
        case ImplicationResult::Witness::free_realization_counterexample:
            return "free_realization";
        case ImplicationResult::Witness::regular_module_counterexample:
            return "regular_module";
        case ImplicationResult::Witness::dual_delegate: return "dual_delegate";
        case ImplicationResult::Witness::member_counterexample: return "list_member";
    }
    return "?";
}

json implication_json(const ImplicationResult& r) {
    json out{{"holds", r.holds}};
    if (!r.holds) {
        json w{{"kind", witness_kind(r.witness)},
               {"module", modl(r.module)},
               {"tuple", json_of(r.tuple)}};
        if (r.member_index >= 0) w["member_index"] = r.member_index;
        out["counterexample"] = std::move(w);
    }
    return out;
}

json chain_summary(const LChain& c) {
    json alphas = json::array();
    for (const auto& a : c.alphas) alphas.push_back(fmla(a));
    json stages = json::array();
    for (const auto& a : c.alphas) stages.push_back(factors_json(free_realization(a).module));
    return json{{"chain", json_of(c)},
                {"alphas", std::move(alphas)},
                {"stage_invariant_factors", std::move(stages)}};
}

json verify_json(const ChainVerifyReport& r) {
    json out{{"ok", r.ok}, {"descending", r.descending}, {"linked", r.linked}};
    if (!r.ok) {
        out["first_failure"] = r.first_failure;
        out["failure_kind"] = r.failure_kind;
    }
    return out;
}

json stabilization_json(const StabilizationVerdict& v, bool include_formulas) {
    json out{{"stabilized", v.stabilized},
             {"stage", v.stage},
             {"tail_start", v.tail_start},
             {"distinct_stages", v.distinct_stages}};
    if (include_formulas) {
        json fs = json::array();
        for (const auto& f : v.formulas) fs.push_back(fmla(f));
        out["formulas"] = std::move(fs);
        json ds = json::array();
        for (const auto& f : v.distinct_formulas) ds.push_back(fmla(f));
        out["distinct_formulas"] = std::move(ds);
    } else {
        out["distinct_count"] = static_cast<int>(v.distinct_formulas.size());
    }
    return out;
}

json realize_json(const RealizeResult& r) {
    json stages = json::array();
    for (const RealizeStage& st : r.stages) {
        stages.push_back(json{{"source_invariant_factors", factors_json(st.source)},
                              {"target_invariant_factors", factors_json(st.target)},
                              {"map", json_of(st.map.matrix)},
                              {"surjective", st.surjective},
                              {"injective", st.injective},
                              {"pure_on_generators", st.pure_on_generators}});
    }
    return json{{"ok", r.ok},
                {"injectivity_required", r.injectivity_required},
                {"chain", json_of(r.chain)},
                {"system", json_of(r.system)},
                {"stages", std::move(stages)}};
}

// members of evaluate(f, M) when the search space is small enough to list
void append_members(json& rep, const PpSubgroup& sub) {
    const FpModule& m = sub.module;
    if (!is_finite(m)) return;
    Int total = 1;
    const Int cap = 4096;
    for (int i = 0; i < sub.arity && total <= cap; ++i) total *= element_count(m);
    if (total > cap) return;
    std::vector<std::vector<Int>> elems = enumerate_elements(m);
    std::vector<size_t> idx(static_cast<size_t>(sub.arity), 0);
    json members = json::array();
    while (true) {
        IntMatrix tuple(sub.arity, m.gens);
        for (int r = 0; r < sub.arity; ++r)
            for (int c = 0; c < m.gens; ++c) tuple.at(r, c) = elems[idx[static_cast<size_t>(r)]][static_cast<size_t>(c)];
        if (sub.contains_tuple(tuple)) members.push_back(json_of(tuple));
        int pos = sub.arity - 1;
        while (pos >= 0) {
            if (++idx[static_cast<size_t>(pos)] < elems.size()) break;
            idx[static_cast<size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    rep["member_count"] = static_cast<int>(members.size());
    rep["members"] = std::move(members);
}

// ---------------------------------------------------------------------------
// text rendering: a generic walk that prefers embedded formula text

bool is_formula_node(const json& j) {
    return j.is_object() && j.size() == 2 && j.contains("formula") && j.contains("text");
}

std::string scalar_text(const json& j) {
    if (j.is_string()) return j.get<std::string>();
    return j.dump();
}

bool is_scalar_array(const json& j) {
    for (const auto& e : j)
        if (!e.is_primitive()) return false;
    return true;
}

bool is_matrix_node(const json& j) {
    if (!j.is_array() || j.empty()) return false;
    for (const auto& e : j)
        if (!e.is_array() || !is_scalar_array(e)) return false;
    return true;
}

std::string inline_array(const json& j) {
    std::string out = "[";
    bool first = true;
    for (const auto& e : j) {
        if (!first) out += ", ";
        out += e.is_array() ? inline_array(e) : scalar_text(e);
        first = false;
    }
    return out + "]";
}

void render_text(const json& j, const std::string& label, int depth, std::string& out) {
    std::string pad(static_cast<size_t>(depth) * 2, ' ');
    if (is_formula_node(j)) {
        out += pad + label + ": " + j.at("text").get<std::string>() + "\n";
        return;
    }
    if (j.is_object()) {
        if (!label.empty()) out += pad + label + ":\n";
        for (const auto& [key, value] : j.items())
            render_text(value, key, label.empty() ? depth : depth + 1, out);
        return;
    }
    if (j.is_array()) {
        if (is_scalar_array(j) || is_matrix_node(j)) {
            out += pad + label + ": " + inline_array(j) + "\n";
            return;
        }
        out += pad + label + ":\n";
        int i = 0;
        for (const auto& e : j) render_text(e, "- " + std::to_string(i++), depth + 1, out);
        return;
    }
    out += pad + label + ": " + scalar_text(j) + "\n";
}

std::string render_report(const json& rep, const std::string& format) {
    if (format == "json") return rep.dump(2) + "\n";
    std::string out;
    if (rep.contains("command")) out += rep.at("command").get<std::string>() + "\n";
    for (const auto& [key, value] : rep.items()) {
        if (key == "command") continue;
        render_text(value, key, 0, out);
    }
    return out;
}

// ---------------------------------------------------------------------------
// handlers; each returns the report and sets the exit code

struct Outcome {
    json rep;
    int code = 0;
};

Outcome cmd_eval(Session& s, const ParsedArgs& pa) {
    check_flags(pa, {"module"});
    need_positional(pa, 2, "eval FORMULA");
    PpFormula f = resolve_formula(s, pa.positional[1]);
    FpModule m = resolve_module(s, need_flag(pa, "module"));
    PpSubgroup sub = evaluate(f, m);
    json rep{{"command", "eval"},
             {"formula", fmla(f)},
             {"module", modl(m)},
             {"arity", sub.arity},
             {"subgroup_basis", json_of(sub.lattice.basis)}};
    append_members(rep, sub);
    return {std::move(rep), 0};
}

Outcome cmd_implies(Session& s, const ParsedArgs& pa) {
    check_flags(pa, {"class"});
    need_positional(pa, 3, "implies PREMISE CONCLUSION");
    PpFormula p = resolve_formula(s, pa.positional[1]);
    PpFormula c = resolve_formula(s, pa.positional[2]);
    TestClass cls = class_arg(pa, "absolute");
    ImplicationResult r = implies(p, c, cls);
    json rep{{"command", "implies"},
             {"premise", fmla(p)},
             {"conclusion", fmla(c)},
             {"class", class_name(cls)},
             {"result", implication_json(r)}};
    return {std::move(rep), r.holds ? 0 : 1};
}

Outcome cmd_equiv(Session& s, const ParsedArgs& pa) {
    check_flags(pa, {"class"});
    need_positional(pa, 3, "equiv FORMULA FORMULA");
    PpFormula f = resolve_formula(s, pa.positional[1]);
    PpFormula g = resolve_formula(s, pa.positional[2]);
    TestClass cls = class_arg(pa, "absolute");
    ImplicationResult fw = implies(f, g, cls);
    ImplicationResult bw = implies(g, f, cls);
    bool eq = fw.holds && bw.holds;
    json rep{{"command", "equiv"},
             {"left", fmla(f)},
             {"right", fmla(g)},
             {"class", class_name(cls)},
             {"equivalent", eq},
             {"forward", implication_json(fw)},
             {"backward", implication_json(bw)}};
    return {std::move(rep), eq ? 0 : 1};
}

Outcome cmd_dual(Session& s, const ParsedArgs& pa) {
    check_flags(pa, {});
    need_positional(pa, 2, "dual FORMULA");
    PpFormula f = resolve_formula(s, pa.positional[1]);
    PpFormula d = dualize(f);
    if (const std::string* name = flag(pa, "store")) s.formulas[*name] = d;
    json rep{{"command", "dual"}, {"input", fmla(f)}, {"dual", fmla(d)}};
    return {std::move(rep), 0};
}

Outcome cmd_freerealize(Session& s, const ParsedArgs& pa) {
    check_flags(pa, {});
    need_positional(pa, 2, "freerealize FORMULA");
    PpFormula f = resolve_formula(s, pa.positional[1]);
    FreeRealization fr = free_realization(f);
    if (const std::string* name = flag(pa, "store")) s.modules[*name] = fr.module;
    json rep{{"command", "freerealize"},
             {"formula", fmla(f)},
             {"module", modl(fr.module)},
             {"tuple", json_of(fr.tuple)},
             {"witness", json_of(fr.witness)}};
    return {std::move(rep), 0};
}

Outcome cmd_pptype(Session& s, const ParsedArgs& pa, bool quantifier_free) {
    check_flags(pa, {"module", "tuple"});
    need_positional(pa, 1, quantifier_free ? "qftype" : "pptype");
    FpModule m = resolve_module(s, need_flag(pa, "module"));
    IntMatrix tuple = matrix_arg(need_flag(pa, "tuple"), "--tuple", m.gens);
    PpFormula f = quantifier_free ? qf_annihilator_formula(m, tuple)
                                  : pp_type_generator(m, tuple);
    if (const std::string* name = flag(pa, "store")) s.formulas[*name] = f;
    json rep{{"command", quantifier_free ? "qftype" : "pptype"},
             {"module", modl(m)},
             {"tuple", json_of(tuple)},
             {"type_generator", fmla(f)}};
    if (quantifier_free)
        rep["annihilator_basis"] = json_of(annihilator_lattice(m, tuple).basis);
    return {std::move(rep), 0};
}

Outcome cmd_purity(Session& s, const ParsedArgs& pa) {
    check_flags(pa, {"module", "tuple", "class"});
    need_positional(pa, 1, "purity");
    FpModule m = resolve_module(s, need_flag(pa, "module"));
    IntMatrix gens = matrix_arg(need_flag(pa, "tuple"), "--tuple", m.gens);
    TestClass cls = class_arg(pa);
    SubmodulePresentation sp = submodule_presentation(m, gens);
    PpFormula inside = qf_from_lattice(sp.module.rel);
    PpFormula outside = pp_type_generator(m, gens);
    ImplicationResult r = implies(inside, outside, cls);
    json rep{{"command", "purity"},
             {"module", modl(m)},
             {"tuple", json_of(gens)},
             {"class", class_name(cls)},
             {"submodule", modl(sp.module)},
             {"inside_type", fmla(inside)},
             {"ambient_type", fmla(outside)},
             {"pure", r.holds},
             {"result", implication_json(r)}};
    return {std::move(rep), r.holds ? 0 : 1};
}

Outcome cmd_tensor(Session& s, const ParsedArgs& pa) {
    check_flags(pa, {"left", "right", "ltuple", "rtuple"});
    need_positional(pa, 1, "tensor");
    FpModule a = resolve_module(s, need_flag(pa, "left"));
    FpModule b = resolve_module(s, need_flag(pa, "right"));
    TensorProduct t = tensor_product(a, b);
    json rep{{"command", "tensor"},
             {"left", modl(a)},
             {"right", modl(b)},
             {"product", modl(t.module)},
             {"left_gens", t.left_gens},
             {"right_gens", t.right_gens}};
    const std::string* lt = flag(pa, "ltuple");
    const std::string* rt = flag(pa, "rtuple");
    if ((lt == nullptr) != (rt == nullptr))
        fail(Error::Code::argument, "--ltuple and --rtuple must be given together");
    if (lt && rt) {
        IntMatrix ltm = matrix_arg(*lt, "--ltuple", a.gens);
        IntMatrix rtm = matrix_arg(*rt, "--rtuple", b.gens);
        std::vector<Int> coords = t.pair_tuples(ltm, rtm);
        IntMatrix row(1, t.module.gens);
        for (int i = 0; i < t.module.gens; ++i) row.at(0, i) = coords[static_cast<size_t>(i)];
        IntMatrix reduced = reduce_tuple(t.module, row);
        rep["pairing"] = json{{"coordinates", json_of(reduced)},
                              {"zero", t.module.is_zero_element(coords)}};
    }
    return {std::move(rep), 0};
}

Outcome cmd_herzog(Session& s, const ParsedArgs& pa) {
    check_flags(pa, {"left", "ltuple", "right", "rtuple"});
    need_positional(pa, 1, "herzog");
    FpModule n = resolve_module(s, need_flag(pa, "left"));
    FpModule m = resolve_module(s, need_flag(pa, "right"));
    IntMatrix nt = matrix_arg(need_flag(pa, "ltuple"), "--ltuple", n.gens);
    IntMatrix mt = matrix_arg(need_flag(pa, "rtuple"), "--rtuple", m.gens);
    HerzogResult r = herzog_check(n, nt, m, mt);
    json rep{{"command", "herzog"},
             {"left", modl(n)},
             {"left_tuple", json_of(nt)},
             {"right", modl(m)},
             {"right_tuple", json_of(mt)},
             {"zero", r.zero},
             {"membership_checked", r.membership_checked}};
    if (r.zero) {
        rep["witness"] = fmla(r.witness);
        rep["right_in_witness"] = evaluate(r.witness, m).contains_tuple(mt);
        rep["left_in_dual_witness"] = evaluate(dualize(r.witness), n).contains_tuple(nt);
    } else {
        IntMatrix row(1, static_cast<int>(r.tensor_coords.size()));
        for (size_t i = 0; i < r.tensor_coords.size(); ++i)
            row.at(0, static_cast<int>(i)) = r.tensor_coords[i];
        rep["tensor_coordinates"] = json_of(row);
    }
    return {std::move(rep), 0};
}

Outcome cmd_chain(Session& s, const ParsedArgs& pa) {
    if (pa.positional.size() < 2)
        fail(Error::Code::argument, "chain: expected a subcommand (verify, build, arrange)");
    const std::string& sub = pa.positional[1];
    if (sub == "verify") {
        check_flags(pa, {"chain", "class"});
        need_positional(pa, 2, "chain verify");
        LChain c = resolve_chain(s, need_flag(pa, "chain"));
        TestClass cls = class_arg(pa);
        ChainVerifyReport r = verify_l_chain(c, cls);
        json rep{{"command", "chain verify"}, {"class", class_name(cls)}};
        rep.update(chain_summary(c));
        rep["verify"] = verify_json(r);
        return {std::move(rep), r.ok ? 0 : 1};
    }
    if (sub == "build") {
        check_flags(pa, {"chain", "class", "budget"});
        need_positional(pa, 2, "chain build");
        LChain c = resolve_chain(s, need_flag(pa, "chain"));
        TestClass cls = class_arg(pa);
        // default: the whole chain (the library resolves -1 to alphas-1)
        int budget = flag(pa, "budget") ? budget_arg(pa, -1) : -1;
        OmegaLimit lim = build_m_phi(c, cls, budget);
        json stages = json::array();
        for (int i = 0; i <= lim.budget; ++i) stages.push_back(factors_json(lim.stage(i)));
        if (const std::string* name = flag(pa, "store")) s.limits[*name] = lim;
        json rep{{"command", "chain build"},
                 {"class", class_name(cls)},
                 {"budget", lim.budget},
                 {"limit", json_of(lim)},
                 {"stage_invariant_factors", std::move(stages)}};
        return {std::move(rep), 0};
    }
    if (sub == "arrange") {
        check_flags(pa, {"module", "order", "class"});
        need_positional(pa, 2, "chain arrange");
        FpModule m = resolve_module(s, need_flag(pa, "module"));
        TestClass cls = class_arg(pa);
        std::vector<int> order;
        if (const std::string* o = flag(pa, "order")) {
            order = order_arg(*o);
        } else {
            for (int i = 0; i < m.gens; ++i) order.push_back(i);
        }
        LChain c = arrange_l_chain(m, order, cls);
        if (const std::string* name = flag(pa, "store")) s.chains[*name] = c;
        json rep{{"command", "chain arrange"},
                 {"module", modl(m)},
                 {"order", order},
                 {"class", class_name(cls)}};
        rep.update(chain_summary(c));
        return {std::move(rep), 0};
    }
    fail(Error::Code::argument, "unknown chain subcommand '" + sub + "'");
}

Outcome cmd_limit(Session& s, const ParsedArgs& pa) {
    if (pa.positional.size() < 2)
        fail(Error::Code::argument, "limit: expected a subcommand (tails, stabilize)");
    const std::string& sub = pa.positional[1];
    if (sub != "tails" && sub != "stabilize")
        fail(Error::Code::argument, "unknown limit subcommand '" + sub + "'");
    check_flags(pa, {"limit", "tuple", "class", "start", "budget"});
    need_positional(pa, 2, ("limit " + sub).c_str());
    OmegaLimit lim = resolve_limit(s, need_flag(pa, "limit"));
    TestClass cls = class_arg(pa);
    int start = 0;
    if (const std::string* st = flag(pa, "start")) start = int_arg(*st, "--start");
    int budget = flag(pa, "budget") ? budget_arg(pa, lim.budget) : lim.budget;
    IntMatrix tuple = matrix_arg(need_flag(pa, "tuple"), "--tuple");
    StabilizationVerdict v = tail_stabilization(lim, start, tuple, cls, budget);
    json rep{{"command", "limit " + sub},
             {"limit", json_of(lim)},
             {"tuple", json_of(tuple)},
             {"class", class_name(cls)},
             {"budget", budget},
             {"tail", stabilization_json(v, sub == "tails")}};
    return {std::move(rep), v.stabilized ? 0 : 1};
}

Outcome cmd_separate(Session& s, const ParsedArgs& pa) {
    check_flags(pa, {"module", "tuple", "class", "budget"});
    need_positional(pa, 1, "separate");
    FpModule m = resolve_module(s, need_flag(pa, "module"));
    IntMatrix c = matrix_arg(need_flag(pa, "tuple"), "--tuple", m.gens);
    TestClass cls = class_arg(pa);
    int budget = budget_arg(pa, 16);
    SeparationResult r = separate_pure(m, c, cls, budget);
    bool ok = r.pure_certified && !r.budget_exhausted;
    json rep{{"command", "separate"},
             {"module", modl(m)},
             {"tuple", json_of(c)},
             {"class", class_name(cls)},
             {"budget", budget},
             {"generators", json_of(r.gens)},
             {"rounds", r.rounds},
             {"shortcut", r.shortcut},
             {"pure_certified", r.pure_certified},
             {"budget_exhausted", r.budget_exhausted}};
    return {std::move(rep), ok ? 0 : 1};
}

Outcome cmd_realize(Session& s, const ParsedArgs& pa) {
    check_flags(pa, {"module", "limit", "class", "budget"});
    need_positional(pa, 1, "realize");
    const std::string* marg = flag(pa, "module");
    const std::string* larg = flag(pa, "limit");
    if ((marg == nullptr) == (larg == nullptr))
        fail(Error::Code::argument, "realize needs exactly one of --module or --limit");
    TestClass cls = class_arg(pa);
    int budget = budget_arg(pa, 16);
    RealizeResult r = marg ? realize_as_pure_image(resolve_module(s, *marg), cls, budget)
                           : realize_as_pure_image(resolve_limit(s, *larg), cls, budget);
    json rep{{"command", "realize"},
             {"class", class_name(cls)},
             {"budget", budget},
             {"realization", realize_json(r)}};
    return {std::move(rep), r.ok ? 0 : 1};
}

Outcome cmd_demo_z4(const ParsedArgs& pa) {
    check_flags(pa, {});
    FpModule m = module_from(parse_json_text(R"({"gens":1,"relations":[[4]]})", "demo"));
    IntMatrix c(1, 1);
    c.at(0, 0) = 2;

    SubmodulePresentation sp = submodule_presentation(m, c);
    PpFormula inside = qf_from_lattice(sp.module.rel);
    PpFormula phi = pp_type_generator(m, c);
    PpFormula psi = qf_annihilator_formula(m, c);
    bool pure_abs = implies(inside, phi, TestClass::absolute()).holds;
    bool pure_flat = implies(inside, phi, TestClass::flat()).holds;

    PpFormula phi_canonical = parse_formula("E y1 . x1 = 2*y1 & 2*x1 = 0");
    PpFormula zero = parse_formula("x1 = 0");
    PpSubgroup sub = evaluate(phi, m);

    json rep{{"command", "demo z4"},
             {"module", modl(m)},
             {"embedded_tuple", json_of(c)},
             {"pure", json{{"absolute", pure_abs}, {"flat", pure_flat}}},
             {"phi", fmla(phi)},
             {"phi_equals_divisibility_form",
              equivalent(phi, phi_canonical, TestClass::absolute())},
             {"psi", fmla(psi)},
             {"both_flat_trivial", json{{"phi", equivalent(phi, zero, TestClass::flat())},
                                        {"psi", equivalent(psi, zero, TestClass::flat())}}},
             {"evaluation", json{{"subgroup_basis", json_of(sub.lattice.basis)}}}};
    append_members(rep["evaluation"], sub);
    return {std::move(rep), 0};
}

Outcome cmd_demo_prufer(const ParsedArgs& pa) {
    check_flags(pa, {"budget"});
    int budget = budget_arg(pa, 8);
    if (budget < 1) fail(Error::Code::argument, "demo prufer needs --budget >= 1");
    LChain chain = prufer_chain(2, budget);
    ChainVerifyReport flat_report = verify_l_chain(chain, TestClass::flat());
    ChainVerifyReport abs_report = verify_l_chain(chain, TestClass::absolute());

    OmegaLimit lim = prufer_limit(2, budget);
    json stages = json::array();
    for (int i = 0; i <= budget; ++i) stages.push_back(factors_json(lim.stage(i)));

    IntMatrix gen(1, 1);
    gen.at(0, 0) = 1;
    StabilizationVerdict flat_tail =
        tail_stabilization(lim, 1, gen, TestClass::flat(), budget);
    StabilizationVerdict abs_tail =
        tail_stabilization(lim, 1, gen, TestClass::absolute(), budget);

    RealizeResult tower = realize_as_pure_image(lim, TestClass::flat(), budget);

    json rep{{"command", "demo prufer"},
             {"budget", budget},
             {"verify", json{{"flat", verify_json(flat_report)},
                             {"absolute", verify_json(abs_report)}}},
             {"limit_stage_invariant_factors", std::move(stages)},
             {"tail", json{{"flat", stabilization_json(flat_tail, false)},
                           {"absolute", stabilization_json(abs_tail, false)}}},
             {"realization", realize_json(tower)}};
    rep.update(chain_summary(chain));
    return {std::move(rep), 0};
}

Outcome dispatch(Session& s, const ParsedArgs& pa) {
    if (pa.positional.empty()) fail(Error::Code::argument, "no command given");
    const std::string& cmd = pa.positional[0];
    if (cmd == "eval") return cmd_eval(s, pa);
    if (cmd == "implies") return cmd_implies(s, pa);
    if (cmd == "equiv") return cmd_equiv(s, pa);
    if (cmd == "dual") return cmd_dual(s, pa);
    if (cmd == "freerealize") return cmd_freerealize(s, pa);
    if (cmd == "pptype") return cmd_pptype(s, pa, false);
    if (cmd == "qftype") return cmd_pptype(s, pa, true);
    if (cmd == "purity") return cmd_purity(s, pa);
    if (cmd == "tensor") return cmd_tensor(s, pa);
    if (cmd == "herzog") return cmd_herzog(s, pa);
    if (cmd == "chain") return cmd_chain(s, pa);
    if (cmd == "limit") return cmd_limit(s, pa);
    if (cmd == "separate") return cmd_separate(s, pa);
    if (cmd == "realize") return cmd_realize(s, pa);
    if (cmd == "demo") {
        if (pa.positional.size() < 2)
            fail(Error::Code::argument, "demo: expected a subcommand (z4, prufer)");
        if (pa.positional[1] == "z4") {
            need_positional(pa, 2, "demo z4");
            return cmd_demo_z4(pa);
        }
        if (pa.positional[1] == "prufer") {
            need_positional(pa, 2, "demo prufer");
            return cmd_demo_prufer(pa);
        }
        fail(Error::Code::argument, "unknown demo '" + pa.positional[1] + "'");
    }
    // not a known command word at all: reserved exit code
    Outcome out;
    out.code = 64;
    out.rep = json{{"error", json{{"kind", "unknown_command"},
                                  {"message", "unknown command '" + cmd + "'"}}}};
    return out;
}

std::string join_args(const std::vector<std::string>& args) {
    std::string out;
    for (size_t i = 0; i < args.size(); ++i) {
        if (i) out += ' ';
        out += args[i];
    }
    return out;
}

const char* error_kind(Error::Code c) {
    switch (c) {
        case Error::Code::parse: return "parse";
        case Error::Code::dimension: return "dimension";
        case Error::Code::domain: return "domain";
        case Error::Code::budget: return "budget";
        case Error::Code::io: return "io";
        case Error::Code::argument: return "argument";
    }
    return "?";
}

} // namespace

TestClass test_class_from_spec(const std::string& text) {
    if (text == "absolute") return TestClass::absolute();
    if (text == "flat") return TestClass::flat();
    if (text == "abspure") return TestClass::abs_pure();
    if (text.rfind("explicit:", 0) == 0) {
        std::string path = text.substr(9);
        std::ifstream in(path);
        if (!in) fail(Error::Code::io, "cannot open class file: " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        json j = parse_json_text(buf.str(), "class file " + path);
        if (!j.is_array())
            fail(Error::Code::parse, "class file " + path + ": expected an array of modules");
        std::vector<FpModule> members;
        for (const auto& e : j) members.push_back(module_from(e));
        if (members.empty())
            fail(Error::Code::argument, "class file " + path + " lists no modules");
        return TestClass::explicit_list(std::move(members));
    }
    fail(Error::Code::argument,
         "unknown class '" + text + "' (want absolute, flat, abspure, or explicit:FILE)");
}

CommandResult run_command(Session& session, const std::vector<std::string>& args) {
    std::string format = "json";
    CommandResult result;
    try {
        ParsedArgs pa = scan_args(args);
        if (const std::string* f = flag(pa, "format")) {
            if (*f != "json" && *f != "text")
                fail(Error::Code::argument, "unknown format '" + *f + "' (want json or text)");
            format = *f;
        }
        if (const std::string* path = flag(pa, "session")) session = load_session(*path);
        Outcome out = dispatch(session, pa);
        if (out.code <= 1) {
            session.log.push_back(join_args(args));
            if (const std::string* path = flag(pa, "save")) save_session(session, *path);
        }
        result.exit_code = out.code;
        result.output = render_report(out.rep, format);
        return result;
    } catch (const Error& e) {
        json rep{{"error", json{{"kind", error_kind(e.code)}, {"message", e.what()}}}};
        result.exit_code = e.code == Error::Code::parse ? 65 : 2;
        result.output = render_report(rep, format);
        return result;
    } catch (const json::exception& e) {
        json rep{{"error", json{{"kind", "parse"}, {"message", e.what()}}}};
        result.exit_code = 65;
        result.output = render_report(rep, format);
        return result;
    } catch (const std::exception& e) {
        json rep{{"error", json{{"kind", "internal"}, {"message", e.what()}}}};
        result.exit_code = 70;
        result.output = render_report(rep, format);
        return result;
    }
}

} // namespace ppcalc
