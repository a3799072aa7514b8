#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "fpmodule.hpp"
#include "test_rng.hpp"

using namespace ppcalc;
using testutil::Rng;

namespace {

IntMatrix rows_of(std::vector<std::vector<long>> rows, int cols) {
    IntMatrix m(static_cast<int>(rows.size()), cols);
    for (size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < cols; ++j) m.at(static_cast<int>(i), j) = rows[i][j];
    return m;
}

FpModule cyclic(long n) { return present_module(1, rows_of({{n}}, 1)); }

FpModule diag_module(std::vector<long> ds) {
    int k = static_cast<int>(ds.size());
    IntMatrix rel(k, k);
    for (int i = 0; i < k; ++i) rel.at(i, i) = ds[i];
    return present_module(k, rel);
}

std::vector<Int> factors_of(const FpModule& m) { return invariant_factors(m); }

}  // namespace

TEST_CASE("invariant factors frozen values") {
    CHECK(factors_of(cyclic(0)) == std::vector<Int>{0});            // Z
    CHECK(factors_of(cyclic(1)) == std::vector<Int>{});             // zero module
    CHECK(factors_of(cyclic(12)) == std::vector<Int>{12});
    CHECK(factors_of(diag_module({2, 4})) == std::vector<Int>{2, 4});
    CHECK(factors_of(diag_module({2, 3})) == std::vector<Int>{6});  // CRT collapse
    CHECK(factors_of(diag_module({0, 4})) == std::vector<Int>{4, 0});
    CHECK(factors_of(diag_module({6, 4})) == std::vector<Int>{2, 12});
    CHECK(factors_of(present_module(2, rows_of({{2, 0}, {0, 4}, {2, 4}}, 2))) ==
          std::vector<Int>{2, 4});  // redundant relator changes nothing
    // non-diagonal presentation of Z/4: generators x, 2x
    CHECK(factors_of(present_module(2, rows_of({{1, -2}, {0, 4}}, 2))) == std::vector<Int>{4});
}

TEST_CASE("torsion, exponent, order, counting") {
    FpModule m = diag_module({2, 4});
    CHECK(is_torsion(m));
    CHECK_FALSE(is_torsion(diag_module({0, 4})));
    CHECK(torsion_exponent(m) == 4);
    CHECK(torsion_exponent(diag_module({0, 4})) == 4);
    CHECK(torsion_exponent(cyclic(0)) == 1);
    CHECK(element_count(m) == 8);
    CHECK(element_count(cyclic(1)) == 1);
    CHECK_THROWS_AS(element_count(cyclic(0)), Error);
    CHECK(element_order(m, {Int(1), Int(0)}) == 2);
    CHECK(element_order(m, {Int(0), Int(1)}) == 4);
    CHECK(element_order(m, {Int(1), Int(1)}) == 4);
    CHECK(element_order(m, {Int(0), Int(0)}) == 1);
    CHECK(element_order(cyclic(0), {Int(3)}) == 0);  // infinite order
}

TEST_CASE("element enumeration is exact") {
    Rng rng(2001);
    for (int it = 0; it < 60; ++it) {
        int k = static_cast<int>(rng.pick(1, 2));
        IntMatrix rel = rng.matrix(static_cast<int>(rng.pick(1, 3)), k, -6, 6);
        FpModule m = present_module(k, rel);
        if (!is_finite(m) || element_count(m) > 60) continue;
        auto els = enumerate_elements(m);
        CHECK(Int(els.size()) == element_count(m));
        for (size_t i = 1; i < els.size(); ++i) CHECK(els[i - 1] < els[i]);  // distinct, sorted
        // closed under addition, contains zero
        CHECK(std::find(els.begin(), els.end(), std::vector<Int>(k, Int(0))) != els.end());
        for (int s = 0; s < 12; ++s) {
            auto& a = els[rng.pick(0, static_cast<long>(els.size()) - 1)];
            auto& b = els[rng.pick(0, static_cast<long>(els.size()) - 1)];
            std::vector<Int> c(k);
            for (int j = 0; j < k; ++j) c[j] = a[j] + b[j];
            CHECK(std::find(els.begin(), els.end(), m.reduce(c)) != els.end());
        }
    }
}

TEST_CASE("check_hom accepts and rejects") {
    FpModule z = cyclic(0), z2 = cyclic(2), z4 = cyclic(4);
    CHECK_NOTHROW(check_hom(z, z2, rows_of({{1}}, 1)));       // projection
    CHECK_NOTHROW(check_hom(z4, z2, rows_of({{1}}, 1)));      // 4x = 0 holds mod 2
    CHECK_NOTHROW(check_hom(z2, z4, rows_of({{2}}, 1)));      // x -> 2x
    CHECK_THROWS_AS(check_hom(z2, z4, rows_of({{1}}, 1)), Error);  // 2*1 != 0 mod 4
    try {
        check_hom(z2, z4, rows_of({{1}}, 1));
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("relator 0") != std::string::npos);
    }
    FpModule m = diag_module({2, 4});
    try {
        // first relator (2,0) maps fine to 2*4=8=0 mod 8, second (0,4) -> 4*1 != 0 mod 8
        check_hom(m, cyclic(8), rows_of({{4}, {1}}, 1));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("relator 1") != std::string::npos);
    }
}

TEST_CASE("surjectivity and injectivity") {
    FpModule z = cyclic(0), z2 = cyclic(2), z4 = cyclic(4);
    FpHom proj = check_hom(z, z2, rows_of({{1}}, 1));
    CHECK(is_surjective(proj));
    CHECK_FALSE(is_injective(proj));
    FpHom dbl = check_hom(z2, z4, rows_of({{2}}, 1));
    CHECK(is_injective(dbl));
    CHECK_FALSE(is_surjective(dbl));
    FpHom idm = identity_hom(diag_module({2, 4}));
    CHECK(is_surjective(idm));
    CHECK(is_injective(idm));
    // non-injective endo of Z/4: x -> 2x
    FpHom e = check_hom(z4, z4, rows_of({{2}}, 1));
    CHECK_FALSE(is_injective(e));
    CHECK_FALSE(is_surjective(e));
}

TEST_CASE("compose and apply") {
    FpModule z8 = cyclic(8), z4 = cyclic(4), z2 = cyclic(2);
    FpHom a = check_hom(z8, z4, rows_of({{1}}, 1));
    FpHom b = check_hom(z4, z2, rows_of({{1}}, 1));
    FpHom c = compose(a, b);
    CHECK(c.apply({Int(5)}) == std::vector<Int>{Int(1)});
    CHECK(a.apply({Int(7)}) == std::vector<Int>{Int(3)});
    CHECK_THROWS_AS(compose(b, a), Error);
}

TEST_CASE("direct sum") {
    DirectSum s = direct_sum(cyclic(2), cyclic(4));
    CHECK(factors_of(s.module) == std::vector<Int>{2, 4});
    CHECK(is_injective(s.into_left));
    CHECK(is_injective(s.into_right));
    CHECK(is_surjective(s.onto_left));
    CHECK(is_surjective(s.onto_right));
    // projection of the injected element recovers it
    FpHom through = compose(s.into_right, s.onto_right);
    CHECK(through.apply({Int(3)}) == std::vector<Int>{Int(3)});
    FpHom cross = compose(s.into_left, s.onto_right);
    CHECK(cross.apply({Int(1)}) == std::vector<Int>{Int(0)});
}

TEST_CASE("quotient") {
    Quotient q = quotient_by(cyclic(0), rows_of({{5}}, 1));
    CHECK(factors_of(q.module) == std::vector<Int>{5});
    CHECK(is_surjective(q.projection));
    Quotient q2 = quotient_by(diag_module({2, 4}), rows_of({{0, 2}}, 2));
    CHECK(factors_of(q2.module) == std::vector<Int>{2, 2});
}

TEST_CASE("annihilator lattice frozen values") {
    // (2,3) in Z/6 x Z/6 presented as diag(6,6): { (a,b) : 2a+3b = 0 mod 6 } -- no:
    // annihilator of the tuple with rows (2) and (3) in Z/6: {(a,b): 2a+3b in 6Z}
    FpModule z6 = cyclic(6);
    Lattice ann = annihilator_lattice(z6, rows_of({{2}, {3}}, 1));
    CHECK(ann == Lattice::from_rows(rows_of({{3, 0}, {0, 2}}, 2)));
    // annihilator of 2 in Z/4 is 2Z
    CHECK(annihilator_lattice(cyclic(4), rows_of({{2}}, 1)) ==
          Lattice::from_rows(rows_of({{2}}, 1)));
    // annihilator of a free generator is trivial
    CHECK(annihilator_lattice(cyclic(0), rows_of({{1}}, 1)).rank() == 0);
}

TEST_CASE("annihilator lattice vs enumeration") {
    Rng rng(2002);
    for (int it = 0; it < 80; ++it) {
        int k = static_cast<int>(rng.pick(1, 2));
        FpModule m = present_module(k, rng.matrix(k, k, -5, 5));
        if (!is_finite(m) || element_count(m) > 40) continue;
        int n = static_cast<int>(rng.pick(1, 2));
        IntMatrix tuple = reduce_tuple(m, rng.matrix(n, k, -5, 5));
        Lattice ann = annihilator_lattice(m, tuple);
        testutil::for_each_box_vector(n, -8, 8, [&](const std::vector<Int>& c) {
            std::vector<Int> acc(k);
            for (int t = 0; t < n; ++t)
                for (int j = 0; j < k; ++j) acc[j] += c[t] * tuple.at(t, j);
            CHECK(ann.contains(c) == m.is_zero_element(acc));
            return true;
        });
    }
}

TEST_CASE("submodule presentation") {
    // <2> inside Z/4 is Z/2, included by multiplication
    SubmodulePresentation s = submodule_presentation(cyclic(4), rows_of({{2}}, 1));
    CHECK(factors_of(s.module) == std::vector<Int>{2});
    CHECK(is_injective(s.inclusion));
    // the full generator tuple presents the module itself
    FpModule m = diag_module({2, 4});
    SubmodulePresentation whole = submodule_presentation(m, IntMatrix::identity(2));
    CHECK(factors_of(whole.module) == factors_of(m));
    CHECK(is_injective(whole.inclusion));
    CHECK(is_surjective(whole.inclusion));
}

TEST_CASE("tensor product sizes match the gcd oracle") {
    Rng rng(2003);
    std::vector<std::vector<long>> shapes = {{2}, {3}, {4}, {6}, {2, 4}, {2, 2}, {12}, {8}, {2, 6}};
    for (const auto& da : shapes)
        for (const auto& db : shapes) {
            TensorProduct t = tensor_product(diag_module(da), diag_module(db));
            Int expected = 1;
            for (long x : da)
                for (long y : db) expected *= std::gcd(x, y);
            CHECK(element_count(t.module) == expected);
        }
    // commutativity up to isomorphism
    for (int it = 0; it < 20; ++it) {
        FpModule a = diag_module({rng.pick(1, 8), rng.pick(1, 8)});
        FpModule b = diag_module({rng.pick(1, 8)});
        CHECK(factors_of(tensor_product(a, b).module) == factors_of(tensor_product(b, a).module));
    }
}

TEST_CASE("tensor frozen values and bilinearity") {
    TensorProduct t = tensor_product(cyclic(4), cyclic(6));
    CHECK(factors_of(t.module) == std::vector<Int>{2});   // Z/4 (x) Z/6 = Z/2
    // 2 (x) 3 = 6 (1 (x) 1) = 0 there
    CHECK(t.module.is_zero_element(t.pure_tensor({Int(2)}, {Int(3)})));
    CHECK_FALSE(t.module.is_zero_element(t.pure_tensor({Int(1)}, {Int(1)})));
    TensorProduct t42 = tensor_product(cyclic(4), cyclic(2));
    CHECK(t42.module.is_zero_element(t42.pure_tensor({Int(2)}, {Int(1)})));
    // tensoring with Z keeps the module
    TensorProduct tz = tensor_product(diag_module({2, 4}), cyclic(0));
    CHECK(factors_of(tz.module) == std::vector<Int>{2, 4});
    // Z/2 (x) Z/3 = 0
    TensorProduct t23 = tensor_product(cyclic(2), cyclic(3));
    CHECK(factors_of(t23.module).empty());

    Rng rng(2004);
    FpModule a = diag_module({2, 4}), b = cyclic(6);
    TensorProduct tp = tensor_product(a, b);
    for (int it = 0; it < 60; ++it) {
        std::vector<Int> v = rng.vec(2, -5, 5), v2 = rng.vec(2, -5, 5), w = rng.vec(1, -5, 5);
        std::vector<Int> sum(2);
        for (int j = 0; j < 2; ++j) sum[j] = v[j] + v2[j];
        std::vector<Int> lhs = tp.pure_tensor(sum, w);
        std::vector<Int> r1 = tp.pure_tensor(v, w), r2 = tp.pure_tensor(v2, w);
        std::vector<Int> rhs(r1.size());
        for (size_t j = 0; j < r1.size(); ++j) rhs[j] = r1[j] + r2[j];
        CHECK(lhs == tp.module.reduce(rhs));
        // relation-compatibility: (2,0) is zero in a, so its tensors vanish
        CHECK(tp.module.is_zero_element(tp.pure_tensor({Int(2), Int(0)}, w)));
    }
}

TEST_CASE("pair_tuples sums pure tensors") {
    TensorProduct t = tensor_product(cyclic(4), cyclic(4));
    IntMatrix vs = rows_of({{1}, {2}}, 1), ws = rows_of({{2}, {1}}, 1);
    // 1(x)2 + 2(x)1 = 4(1(x)1) = 0 in Z/4
    CHECK(t.module.is_zero_element(t.pair_tuples(vs, ws)));
    IntMatrix vs2 = rows_of({{1}}, 1), ws2 = rows_of({{3}}, 1);
    CHECK_FALSE(t.module.is_zero_element(t.pair_tuples(vs2, ws2)));
}
