#include "ppcalc/ppcalc.h"

#include "commands.hpp"

#include <cstdlib>
#include <cstring>

using namespace ppcalc;

struct ppc_session {
    Session impl;
};
struct ppc_formula {
    PpFormula impl;
};
struct ppc_module {
    FpModule impl;
};

namespace {

thread_local std::string g_last_error = "ok";

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) return nullptr;
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

ppc_status status_of(Error::Code c) {
    return c == Error::Code::parse ? PPC_PARSE_ERROR : PPC_INPUT_ERROR;
}

// Run the body, translating exceptions into statuses + last-error text.
template <class F>
ppc_status guarded(F&& body) {
    try {
        ppc_status st = body();
        if (st == PPC_OK) g_last_error = "ok";
        return st;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_of(e.code);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return PPC_INTERNAL_ERROR;
    }
}

ppc_status require(bool cond, const char* msg) {
    if (cond) return PPC_OK;
    g_last_error = msg;
    return PPC_INPUT_ERROR;
}

json parse_json_arg(const char* text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        fail(Error::Code::parse, std::string(what) + ": " + e.what());
    }
}

} // namespace

extern "C" {

const char* ppc_last_error(void) { return g_last_error.c_str(); }

void ppc_string_free(char* s) { std::free(s); }

/* ---- sessions ---------------------------------------------------------- */

ppc_session* ppc_session_new(void) { return new (std::nothrow) ppc_session{}; }

void ppc_session_free(ppc_session* s) { delete s; }

ppc_status ppc_session_load(ppc_session* s, const char* path) {
    if (require(s && path, "null argument") != PPC_OK) return PPC_INPUT_ERROR;
    return guarded([&] {
        s->impl = load_session(path);
        return PPC_OK;
    });
}

ppc_status ppc_session_save(const ppc_session* s, const char* path) {
    if (require(s && path, "null argument") != PPC_OK) return PPC_INPUT_ERROR;
    return guarded([&] {
        save_session(s->impl, path);
        return PPC_OK;
    });
}

ppc_status ppc_session_to_json(const ppc_session* s, char** json_out) {
    if (require(s && json_out, "null argument") != PPC_OK) return PPC_INPUT_ERROR;
    return guarded([&] {
        *json_out = copy_string(json_of(s->impl).dump(2));
        return *json_out ? PPC_OK : PPC_INTERNAL_ERROR;
    });
}

ppc_status ppc_session_digest(const ppc_session* s, char** digest_out) {
    if (require(s && digest_out, "null argument") != PPC_OK) return PPC_INPUT_ERROR;
    return guarded([&] {
        *digest_out = copy_string(session_digest(s->impl));
        return *digest_out ? PPC_OK : PPC_INTERNAL_ERROR;
    });
}

ppc_status ppc_run_command(ppc_session* s, int argc, const char* const* argv,
                           char** report_out) {
    if (require(s && report_out && (argc == 0 || argv), "null argument") != PPC_OK)
        return PPC_INPUT_ERROR;
    *report_out = nullptr;
    return guarded([&] {
        std::vector<std::string> args;
        args.reserve(static_cast<size_t>(argc));
        for (int i = 0; i < argc; ++i) {
            if (!argv[i]) fail(Error::Code::argument, "null argv entry");
            args.emplace_back(argv[i]);
        }
        CommandResult r = run_command(s->impl, args);
        *report_out = copy_string(r.output);
        if (!*report_out) return PPC_INTERNAL_ERROR;
        if (r.exit_code != 0) g_last_error = "command exited with status " +
                                             std::to_string(r.exit_code);
        return static_cast<ppc_status>(r.exit_code);
    });
}

/* ---- formulas ---------------------------------------------------------- */

ppc_status ppc_formula_parse(const char* text, ppc_formula** out) {
    if (require(text && out, "null argument") != PPC_OK) return PPC_INPUT_ERROR;
    return guarded([&] {
        *out = new ppc_formula{parse_formula(text)};
        return PPC_OK;
    });
}

ppc_status ppc_formula_from_json(const char* json_text, ppc_formula** out) {
    if (require(json_text && out, "null argument") != PPC_OK) return PPC_INPUT_ERROR;
    return guarded([&] {
        *out = new ppc_formula{formula_from(parse_json_arg(json_text, "formula"))};
        return PPC_OK;
    });
}

void ppc_formula_free(ppc_formula* f) { delete f; }

ppc_status ppc_formula_format(const ppc_formula* f, char** text_out) {
    if (require(f && text_out, "null argument") != PPC_OK) return PPC_INPUT_ERROR;
    return guarded([&] {
        *text_out = copy_string(format_formula(f->impl));
        return *text_out ? PPC_OK : PPC_INTERNAL_ERROR;
    });
}

ppc_status ppc_formula_to_json(const ppc_formula* f, char** json_out) {
    if (require(f && json_out, "null argument") != PPC_OK) return PPC_INPUT_ERROR;
    return guarded([&] {
        *json_out = copy_string(json_of(f->impl).dump());
        return *json_out ? PPC_OK : PPC_INTERNAL_ERROR;
    });
}

ppc_status ppc_formula_meet(const ppc_formula* f, const ppc_formula* g, ppc_formula** out) {
    if (require(f && g && out, "null argument") != PPC_OK) return PPC_INPUT_ERROR;
    return guarded([&] {
        *out = new ppc_formula{meet(f->impl, g->impl)};
        return PPC_OK;
    });
}

ppc_status ppc_formula_join(const ppc_formula* f, const ppc_formula* g, ppc_formula** out) {
    if (require(f && g && out, "null argument") != PPC_OK) return PPC_INPUT_ERROR;
    return guarded([&] {
        *out = new ppc_formula{join(f->impl, g->impl)};
        return PPC_OK;
    });
}

ppc_status ppc_formula_dual(const ppc_formula* f, ppc_formula** out) {
    if (require(f && out, "null argument") != PPC_OK) return PPC_INPUT_ERROR;
    return guarded([&] {
        *out = new ppc_formula{dualize(f->impl)};
        return PPC_OK;
    });
}

ppc_status ppc_formula_equal(const ppc_formula* f, const ppc_formula* g, int* equal_out) {
    if (require(f && g && equal_out, "null argument") != PPC_OK) return PPC_INPUT_ERROR;
    return guarded([&] {
        *equal_out = (f->impl == g->impl) ? 1 : 0;
        return PPC_OK;
    });
}

/* ---- modules ----------------------------------------------------------- */

ppc_status ppc_module_from_json(const char* json_text, ppc_module** out) {
    if (require(json_text && out, "null argument") != PPC_OK) return PPC_INPUT_ERROR;
    return guarded([&] {
        *out = new ppc_module{module_from(parse_json_arg(json_text, "module"))};
        return PPC_OK;
    });
}

void ppc_module_free(ppc_module* m) { delete m; }

ppc_status ppc_module_to_json(const ppc_module* m, char** json_out) {
    if (require(m && json_out, "null argument") != PPC_OK) return PPC_INPUT_ERROR;
    return guarded([&] {
        *json_out = copy_string(json_of(m->impl).dump());
        return *json_out ? PPC_OK : PPC_INTERNAL_ERROR;
    });
}

ppc_status ppc_module_invariant_factors(const ppc_module* m, char** json_out) {
    if (require(m && json_out, "null argument") != PPC_OK) return PPC_INPUT_ERROR;
    return guarded([&] {
        json arr = json::array();
        for (const Int& d : invariant_factors(m->impl)) arr.push_back(json_of(d));
        *json_out = copy_string(arr.dump());
        return *json_out ? PPC_OK : PPC_INTERNAL_ERROR;
    });
}

/* ---- operations --------------------------------------------------------- */

ppc_status ppc_eval(const ppc_formula* f, const ppc_module* m, char** basis_json_out) {
    if (require(f && m && basis_json_out, "null argument") != PPC_OK) return PPC_INPUT_ERROR;
    return guarded([&] {
        PpSubgroup sub = evaluate(f->impl, m->impl);
        *basis_json_out = copy_string(json_of(sub.lattice.basis).dump());
        return *basis_json_out ? PPC_OK : PPC_INTERNAL_ERROR;
    });
}

ppc_status ppc_implies(const ppc_formula* premise, const ppc_formula* conclusion,
                       const char* class_spec) {
    if (require(premise && conclusion && class_spec, "null argument") != PPC_OK)
        return PPC_INPUT_ERROR;
    return guarded([&] {
        TestClass cls = test_class_from_spec(class_spec);
        ImplicationResult r = implies(premise->impl, conclusion->impl, cls);
        if (r.holds) return PPC_OK;
        g_last_error = "implication fails";
        return PPC_PROPERTY_FAILED;
    });
}

ppc_status ppc_equivalent(const ppc_formula* f, const ppc_formula* g,
                          const char* class_spec) {
    if (require(f && g && class_spec, "null argument") != PPC_OK) return PPC_INPUT_ERROR;
    return guarded([&] {
        TestClass cls = test_class_from_spec(class_spec);
        if (equivalent(f->impl, g->impl, cls)) return PPC_OK;
        g_last_error = "formulas are not equivalent over the class";
        return PPC_PROPERTY_FAILED;
    });
}

ppc_status ppc_is_pure(const ppc_module* m, const char* tuple_json,
                       const char* class_spec) {
    if (require(m && tuple_json && class_spec, "null argument") != PPC_OK)
        return PPC_INPUT_ERROR;
    return guarded([&] {
        TestClass cls = test_class_from_spec(class_spec);
        IntMatrix tuple = matrix_from(parse_json_arg(tuple_json, "tuple"), "tuple");
        if (tuple.rows > 0 && tuple.cols != m->impl.gens)
            fail(Error::Code::dimension, "tuple width does not match the module");
        if (is_pure(m->impl, tuple, cls)) return PPC_OK;
        g_last_error = "submodule is not pure relative to the class";
        return PPC_PROPERTY_FAILED;
    });
}

} /* extern "C" */
