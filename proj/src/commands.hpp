#pragma once

#include "session.hpp"

namespace ppcalc {

struct CommandResult {
    int exit_code = 0;      // 0 computed, 1 property failed, 2 input error,
                            // 64 unknown command, 65 parse error
    std::string output;     // full report, trailing newline included
};

// Run one command against the session. args is the argv tail (no program
// name). Global flags: --format json|text, --session PATH (load first),
// --save PATH (save on exit 0/1), --store NAME (keep the primary result),
// --class SPEC, --budget N. Never throws; failures become exit codes with an
// error report on output.
CommandResult run_command(Session& session, const std::vector<std::string>& args);

// Class specifier: absolute | flat | abspure | explicit:FILE, where FILE
// holds a JSON array of module presentations.
TestClass test_class_from_spec(const std::string& spec);

} // namespace ppcalc
