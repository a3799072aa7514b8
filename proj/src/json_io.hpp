#pragma once

#include <json.hpp>

#include "chains.hpp"

namespace ppcalc {

using json = nlohmann::json;

// Integers serialize as decimal strings (arbitrary precision survives any
// JSON reader); inputs may be JSON numbers or strings.
json json_of(const Int& v);
json json_of(const IntMatrix& m);
json json_of(const PpFormula& f);   // {"n", "m", "A", "B"}
json json_of(const FpModule& m);    // {"gens", "relations"}
json json_of(const LChain& c);      // {"blocks", "alphas", "verified"}
json json_of(const OmegaLimit& l);  // tagged by "family"

Int int_from(const json& j, const char* where);
// cols < 0 infers the width from the first row (empty matrices become 0 x 0)
IntMatrix matrix_from(const json& j, const char* where, int cols = -1);
PpFormula formula_from(const json& j);
FpModule module_from(const json& j);
LChain chain_from(const json& j);
OmegaLimit limit_from(const json& j);

}  // namespace ppcalc
