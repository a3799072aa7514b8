/* C interface to the pp-formula calculator.
 *
 * All objects are opaque handles created and destroyed here. Functions
 * return a ppc_status; on any failure ppc_last_error() describes the
 * problem (thread-local, valid until the next call on the same thread).
 * Strings returned through out-parameters are heap copies; release them
 * with ppc_string_free.
 */
#ifndef PPCALC_H
#define PPCALC_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ppc_status {
    PPC_OK = 0,
    PPC_PROPERTY_FAILED = 1,  /* computed fine; the tested property is false */
    PPC_INPUT_ERROR = 2,
    PPC_UNKNOWN_COMMAND = 64,
    PPC_PARSE_ERROR = 65,
    PPC_INTERNAL_ERROR = 70
} ppc_status;

typedef struct ppc_session ppc_session;
typedef struct ppc_formula ppc_formula;
typedef struct ppc_module ppc_module;

/* Message for the most recent failing call on this thread; never NULL. */
const char* ppc_last_error(void);
void ppc_string_free(char* s);

/* ---- sessions ---------------------------------------------------------- */

ppc_session* ppc_session_new(void);
void ppc_session_free(ppc_session* s);
ppc_status ppc_session_load(ppc_session* s, const char* path);
ppc_status ppc_session_save(const ppc_session* s, const char* path);
ppc_status ppc_session_to_json(const ppc_session* s, char** json_out);
/* 16 hex digits identifying the session contents. */
ppc_status ppc_session_digest(const ppc_session* s, char** digest_out);

/* Run one command (the argv tail, without the program name) against the
 * session. *report_out receives the rendered report (including error
 * reports); the return value is the command's exit status. */
ppc_status ppc_run_command(ppc_session* s, int argc, const char* const* argv,
                           char** report_out);

/* ---- formulas ---------------------------------------------------------- */

/* Text DSL: "[E y1 .. ym .] lin = lin & ..." with sugar "r|xi". */
ppc_status ppc_formula_parse(const char* text, ppc_formula** out);
ppc_status ppc_formula_from_json(const char* json_text, ppc_formula** out);
void ppc_formula_free(ppc_formula* f);
ppc_status ppc_formula_format(const ppc_formula* f, char** text_out);
ppc_status ppc_formula_to_json(const ppc_formula* f, char** json_out);
ppc_status ppc_formula_meet(const ppc_formula* f, const ppc_formula* g, ppc_formula** out);
ppc_status ppc_formula_join(const ppc_formula* f, const ppc_formula* g, ppc_formula** out);
ppc_status ppc_formula_dual(const ppc_formula* f, ppc_formula** out);
/* Structural equality after normalization; 1 or 0 into *equal_out. */
ppc_status ppc_formula_equal(const ppc_formula* f, const ppc_formula* g, int* equal_out);

/* ---- modules ----------------------------------------------------------- */

/* {"gens": n, "relations": [[...], ...]} */
ppc_status ppc_module_from_json(const char* json_text, ppc_module** out);
void ppc_module_free(ppc_module* m);
ppc_status ppc_module_to_json(const ppc_module* m, char** json_out);
/* JSON array of decimal strings: torsion factors then one "0" per free rank. */
ppc_status ppc_module_invariant_factors(const ppc_module* m, char** json_out);

/* ---- operations --------------------------------------------------------- */

/* Class specifiers: "absolute", "flat", "abspure", "explicit:FILE" where
 * FILE holds a JSON array of module presentations. */

/* Basis of f(M^n) as a JSON matrix of flattened tuple rows. */
ppc_status ppc_eval(const ppc_formula* f, const ppc_module* m, char** basis_json_out);
/* PPC_OK if the implication holds, PPC_PROPERTY_FAILED if it fails. */
ppc_status ppc_implies(const ppc_formula* premise, const ppc_formula* conclusion,
                       const char* class_spec);
ppc_status ppc_equivalent(const ppc_formula* f, const ppc_formula* g,
                          const char* class_spec);
/* Purity of the submodule generated by the rows of tuple_json in m. */
ppc_status ppc_is_pure(const ppc_module* m, const char* tuple_json,
                       const char* class_spec);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PPCALC_H */
