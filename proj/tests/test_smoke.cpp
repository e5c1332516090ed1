// Build smoke test: pulls in every public header and checks a handful of
// end-to-end facts so gross breakage is caught before the detailed suites.

#include <catch2/catch_amalgamated.hpp>

#include "nmfid/block.hpp"
#include "nmfid/certify.hpp"
#include "nmfid/classify.hpp"
#include "nmfid/corpus.hpp"
#include "nmfid/io.hpp"
#include "nmfid/json_report.hpp"
#include "nmfid/linalg.hpp"
#include "nmfid/nnls.hpp"
#include "nmfid/scalar.hpp"
#include "nmfid/sfa.hpp"
#include "nmfid/solve.hpp"
#include "nmfid/version.hpp"

using namespace nmfid;

TEST_CASE("exact scalar parsing canonicalizes", "[smoke]") {
    REQUIRE(*parse_rational("0.25") == Rational(1, 4));
    REQUIRE(*parse_rational("-2/6") == Rational(-1, 3));
    REQUIRE(format_scalar(*parse_rational("-2/6")) == "-1/3");
}

TEST_CASE("all benchmark factorizations verify exactly", "[smoke]") {
    for (const char* name : kWorkedExampleNames) {
        auto inst = worked_example<Rational>(name);
        REQUIRE(!inst.factorizations.empty());
        for (const auto& f : inst.factorizations)
            REQUIRE(residual_fro_sq(inst.s, f) == Rational(0));
    }
}

TEST_CASE("rank of the span-changing example is 5", "[smoke]") {
    auto inst = worked_example<Rational>("type2");
    REQUIRE(rank(inst.s) == 5);
    REQUIRE(rank(inst.s.to_double_matrix()) == 5);
}

TEST_CASE("same-span pair classifies as TypeI", "[smoke]") {
    auto inst = worked_example<Rational>("type1");
    TypeVerdict<Rational> v =
        classify_pair(inst.s, inst.factorizations[0], inst.factorizations[1]);
    REQUIRE(v.kind == TypeKind::type1);
}
