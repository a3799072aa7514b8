#include "json_io.hpp"

namespace ppcalc {

namespace {

[[noreturn]] void schema_fail(const char* where, const std::string& what) {
    fail(Error::Code::parse, std::string(where) + ": " + what);
}

}  // namespace

json json_of(const Int& v) { return v.str(); }

json json_of(const IntMatrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows; ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols; ++j) row.push_back(json_of(m.at(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

json json_of(const PpFormula& f) {
    return {{"n", f.n}, {"m", f.m}, {"A", json_of(f.A)}, {"B", json_of(f.B)}};
}

json json_of(const FpModule& m) {
    return {{"gens", m.gens}, {"relations", json_of(m.rel.basis)}};
}

json json_of(const LChain& c) {
    json alphas = json::array();
    for (const PpFormula& a : c.alphas) alphas.push_back(json_of(a));
    return {{"blocks", c.blocks}, {"alphas", std::move(alphas)}, {"verified", c.verified_for}};
}

json json_of(const OmegaLimit& l) {
    json out;
    switch (l.family) {
        case OmegaLimit::Family::prufer:
            out["family"] = "prufer";
            out["p"] = json_of(l.p);
            out["budget"] = l.budget;
            break;
        case OmegaLimit::Family::cyclic_sum: {
            out["family"] = "cyclic_sum";
            json orders = json::array();
            for (const Int& r : l.orders) orders.push_back(json_of(r));
            out["orders"] = std::move(orders);
            break;
        }
        case OmegaLimit::Family::from_chain:
            out["family"] = "from_chain";
            out["chain"] = json_of(l.chain);
            out["budget"] = l.budget;
            break;
        case OmegaLimit::Family::explicit_stages: {
            out["family"] = "explicit";
            json stages = json::array(), maps = json::array();
            for (int i = 0; i <= l.budget; ++i) stages.push_back(json_of(l.stage(i)));
            for (int i = 0; i < l.budget; ++i) maps.push_back(json_of(l.connecting(i).matrix));
            out["stages"] = std::move(stages);
            out["maps"] = std::move(maps);
            return out;  // nothing lazy to record
        }
    }
    out["cached"] = l.cached_stages();
    return out;
}

Int int_from(const json& j, const char* where) {
    if (j.is_number_integer()) return Int(j.get<long long>());
    if (j.is_string()) {
        const std::string& s = j.get_ref<const std::string&>();
        if (s.empty()) schema_fail(where, "empty integer string");
        size_t k = s[0] == '-' || s[0] == '+' ? 1 : 0;
        if (k == s.size()) schema_fail(where, "not an integer: " + s);
        for (; k < s.size(); ++k)
            if (s[k] < '0' || s[k] > '9') schema_fail(where, "not an integer: " + s);
        return Int(s);
    }
    schema_fail(where, "expected an integer (number or decimal string)");
}

IntMatrix matrix_from(const json& j, const char* where, int cols) {
    if (!j.is_array()) schema_fail(where, "expected an array of rows");
    int rows = static_cast<int>(j.size());
    if (rows > 0 && !j[0].is_array()) {
        // a flat array of scalars is a single row
        IntMatrix m(1, rows);
        for (int c = 0; c < rows; ++c) m.at(0, c) = int_from(j[static_cast<size_t>(c)], where);
        if (cols >= 0 && m.cols != cols) schema_fail(where, "row width mismatch");
        return m;
    }
    int width = cols;
    if (width < 0) width = rows == 0 ? 0 : static_cast<int>(j[0].size());
    IntMatrix m(rows, width);
    for (int r = 0; r < rows; ++r) {
        const json& row = j[static_cast<size_t>(r)];
        if (!row.is_array() || static_cast<int>(row.size()) != width)
            schema_fail(where, "row width mismatch");
        for (int c = 0; c < width; ++c) m.at(r, c) = int_from(row[static_cast<size_t>(c)], where);
    }
    return m;
}

namespace {

const json& field(const json& j, const char* key, const char* where) {
    if (!j.is_object()) schema_fail(where, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) schema_fail(where, std::string("missing field \"") + key + "\"");
    return *it;
}

int int_field(const json& j, const char* key, const char* where) {
    const json& v = field(j, key, where);
    if (!v.is_number_integer()) schema_fail(where, std::string("field \"") + key + "\" must be an integer");
    return v.get<int>();
}

}  // namespace

PpFormula formula_from(const json& j) {
    const char* where = "formula";
    int n = int_field(j, "n", where);
    int m = int_field(j, "m", where);
    if (n < 0 || m < 0) schema_fail(where, "negative arity");
    IntMatrix A = matrix_from(field(j, "A", where), "formula.A", n);
    IntMatrix B = matrix_from(field(j, "B", where), "formula.B", m);
    if (A.rows != B.rows) schema_fail(where, "A and B need the same number of rows");
    return PpFormula(n, m, A, B);
}

FpModule module_from(const json& j) {
    const char* where = "module";
    int gens = int_field(j, "gens", where);
    if (gens < 0) schema_fail(where, "negative generator count");
    IntMatrix rel = matrix_from(field(j, "relations", where), "module.relations", gens);
    return present_module(gens, rel);
}

LChain chain_from(const json& j) {
    const char* where = "chain";
    const json& blocks = field(j, "blocks", where);
    if (!blocks.is_array()) schema_fail(where, "blocks must be an array");
    LChain c;
    for (const json& b : blocks) {
        if (!b.is_number_integer()) schema_fail(where, "blocks must be integers");
        c.blocks.push_back(b.get<int>());
    }
    const json& alphas = field(j, "alphas", where);
    if (!alphas.is_array()) schema_fail(where, "alphas must be an array");
    for (const json& a : alphas) c.alphas.push_back(formula_from(a));
    if (j.contains("verified")) {
        const json& v = j["verified"];
        if (!v.is_array()) schema_fail(where, "verified must be an array of class tags");
        for (const json& t : v) {
            if (!t.is_string()) schema_fail(where, "verified must be an array of class tags");
            c.verified_for.push_back(t.get<std::string>());
        }
    }
    return c;
}

OmegaLimit limit_from(const json& j) {
    const char* where = "limit";
    const json& fam = field(j, "family", where);
    if (!fam.is_string()) schema_fail(where, "family must be a string");
    std::string f = fam.get<std::string>();
    OmegaLimit out;
    if (f == "prufer") {
        out = prufer_limit(int_from(field(j, "p", where), "limit.p"),
                           int_field(j, "budget", where));
    } else if (f == "cyclic_sum") {
        const json& ords = field(j, "orders", where);
        if (!ords.is_array()) schema_fail(where, "orders must be an array");
        std::vector<Int> orders;
        for (const json& r : ords) orders.push_back(int_from(r, "limit.orders"));
        out = cyclic_sum_limit(orders);
    } else if (f == "from_chain") {
        LChain c = chain_from(field(j, "chain", where));
        int budget = j.contains("budget") ? int_field(j, "budget", where) : -1;
        // rebuild through a stamped class; otherwise find one that verifies
        std::vector<TestClass> try_classes;
        for (const std::string& tag : c.verified_for) {
            if (tag == "absolute") try_classes.push_back(TestClass::absolute());
            else if (tag == "flat") try_classes.push_back(TestClass::flat());
            else if (tag == "abspure") try_classes.push_back(TestClass::abs_pure());
            else schema_fail(where, "unknown verified tag: " + tag);
        }
        if (try_classes.empty())
            try_classes = {TestClass::flat(), TestClass::absolute(), TestClass::abs_pure()};
        bool built = false;
        for (const TestClass& cls : try_classes) {
            if (!c.verified_for.empty() || verify_l_chain(c, cls).ok) {
                out = build_m_phi(c, cls, budget);
                built = true;
                break;
            }
        }
        if (!built) schema_fail(where, "chain does not verify for any class");
    } else if (f == "explicit") {
        const json& st = field(j, "stages", where);
        const json& mp = field(j, "maps", where);
        if (!st.is_array() || !mp.is_array()) schema_fail(where, "stages/maps must be arrays");
        std::vector<FpModule> stages;
        for (const json& s : st) stages.push_back(module_from(s));
        std::vector<IntMatrix> maps;
        for (size_t i = 0; i < mp.size(); ++i) {
            int cols = i + 1 < stages.size() ? stages[i + 1].gens : -1;
            maps.push_back(matrix_from(mp[i], "limit.maps", cols));
        }
        return explicit_limit(std::move(stages), std::move(maps));
    } else {
        schema_fail(where, "unknown family: " + f);
    }
    if (j.contains("cached")) {
        int cached = int_field(j, "cached", where);
        if (cached > 0) out.stage(std::min(cached, out.budget + 1) - 1);
    }
    return out;
}

}  // namespace ppcalc
