#include "session.hpp"

#include <fstream>
#include <sstream>

namespace ppcalc {

namespace {

[[noreturn]] void schema_fail(const std::string& where, const std::string& what) {
    fail(Error::Code::parse, where + ": " + what);
}

template <class T, class FromJson>
std::map<std::string, T> named_from(const json& j, const std::string& where, FromJson from) {
    std::map<std::string, T> out;
    if (j.is_null()) return out;
    if (!j.is_object()) schema_fail(where, "expected an object of named entries");
    for (const auto& [name, value] : j.items()) {
        if (name.empty()) schema_fail(where, "entry names must be nonempty");
        try {
            out.emplace(name, from(value));
        } catch (const Error& e) {
            if (e.code != Error::Code::parse) throw;
            schema_fail(where + "." + name, e.what());
        }
    }
    return out;
}

} // namespace

json json_of(const Session& s) {
    json formulas = json::object();
    for (const auto& [name, f] : s.formulas) formulas[name] = json_of(f);
    json modules = json::object();
    for (const auto& [name, m] : s.modules) modules[name] = json_of(m);
    json chains = json::object();
    for (const auto& [name, c] : s.chains) chains[name] = json_of(c);
    json limits = json::object();
    for (const auto& [name, l] : s.limits) limits[name] = json_of(l);
    return json{{"formulas", formulas},
                {"modules", modules},
                {"chains", chains},
                {"limits", limits},
                {"log", s.log}};
}

Session session_from(const json& j) {
    if (!j.is_object()) schema_fail("session", "expected an object");
    Session s;
    if (j.contains("formulas"))
        s.formulas = named_from<PpFormula>(j.at("formulas"), "session.formulas", formula_from);
    if (j.contains("modules"))
        s.modules = named_from<FpModule>(j.at("modules"), "session.modules", module_from);
    if (j.contains("chains"))
        s.chains = named_from<LChain>(j.at("chains"), "session.chains", chain_from);
    if (j.contains("limits"))
        s.limits = named_from<OmegaLimit>(j.at("limits"), "session.limits", limit_from);
    if (j.contains("log")) {
        const json& log = j.at("log");
        if (!log.is_array()) schema_fail("session.log", "expected an array of strings");
        for (const auto& entry : log) {
            if (!entry.is_string()) schema_fail("session.log", "expected an array of strings");
            s.log.push_back(entry.get<std::string>());
        }
    }
    return s;
}

void save_session(const Session& s, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(Error::Code::io, "cannot open session file for writing: " + path);
    out << json_of(s).dump(2) << '\n';
    out.flush();
    if (!out) fail(Error::Code::io, "failed writing session file: " + path);
}

Session load_session(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Error::Code::io, "cannot open session file for reading: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    json j;
    try {
        j = json::parse(buf.str());
    } catch (const json::exception& e) {
        fail(Error::Code::parse, "session file " + path + ": " + e.what());
    }
    return session_from(j);
}

std::string session_digest(const Session& s) {
    const std::string dump = json_of(s).dump(); // keys sorted; no whitespace
    std::uint64_t h = 1469598103934665603ull;   // FNV-1a 64
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ull;
    }
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = hex[h & 0xf];
        h >>= 4;
    }
    return out;
}

} // namespace ppcalc
