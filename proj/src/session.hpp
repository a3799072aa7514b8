#pragma once

#include "json_io.hpp"

#include <map>

namespace ppcalc {

// A named workspace: formulas, modules, chains and limits addressable as
// @name from the command layer, plus a log of the commands that built them.
// Names are unique per kind; storing under an existing name replaces it.
struct Session {
    std::map<std::string, PpFormula> formulas;
    std::map<std::string, FpModule> modules;
    std::map<std::string, LChain> chains;
    std::map<std::string, OmegaLimit> limits;
    std::vector<std::string> log;
};

json json_of(const Session& s);
Session session_from(const json& j);

void save_session(const Session& s, const std::string& path);
Session load_session(const std::string& path);

// Stable 16-hex-digit digest of the canonical serialization.  Two sessions
// with the same content (including cached limit stages) hash equal.
std::string session_digest(const Session& s);

} // namespace ppcalc
