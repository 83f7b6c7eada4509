#include "act/ontology.hpp"
#include "act/pql.hpp"
#include "support/fixtures.hpp"
#include "support/seed.hpp"

#include <doctest.h>

#include <regex>
#include <set>

using namespace act;
using act::testing::fixture_queries;
using act::testing::fixture_text;

TEST_SUITE("pql") {
    TEST_CASE("fixture files: normalization touches only datetime literals") {
        const std::string verbatim = fixture_text("queries/verbatim.cql");
        const std::string normalized = fixture_text("queries/normalized.pql");
        CHECK(verbatim.find("apoc.date.parse") != std::string::npos);
        CHECK(normalized.find("apoc") == std::string::npos);
        const std::regex literal(R"(datetime\(\{epochMillis:apoc\.date\.parse\('([^']*)'[^)]*\)\}\))");
        std::string expected = verbatim;
        std::smatch m;
        std::string out;
        auto it = expected.cbegin();
        while (std::regex_search(it, expected.cend(), m, literal)) {
            out.append(it, m[0].first);
            std::string v = m[1].str();
            if (v.size() == 10) v += "T00:00:00";
            else v[10] = 'T';
            out += "datetime('" + v + "')";
            it = m[0].second;
        }
        out.append(it, expected.cend());
        CHECK(out == normalized);
    }

    TEST_CASE("seven fixture queries parse") {
        const auto qs = fixture_queries();
        REQUIRE(qs.size() == 7);
        for (const auto& q : qs) CHECK(pql::parse(pql::to_text(q)) == q);
    }

    TEST_CASE("every fixture relation is registered") {
        const auto& reg = onto::default_ontology();
        const std::regex rel(R"(\[:([A-Z_]+)\])");
        const std::string text = fixture_text("queries/normalized.pql");
        std::set<std::string> names;
        for (auto i = std::sregex_iterator(text.begin(), text.end(), rel); i != std::sregex_iterator(); ++i)
            names.insert((*i)[1].str());
        CHECK(names.size() == 5);
        for (const auto& n : names) CHECK_MESSAGE(reg.find_relation(n) != nullptr, n);
    }

    TEST_CASE("fixture queries return rows on the seeded plant") {
        const GraphStore g = act::testing::pipeline_graph();
        pql::EvalOptions opt;
        opt.registry = &onto::default_ontology();
        const auto qs = fixture_queries();
        for (std::size_t i = 0; i < qs.size(); ++i) {
            CAPTURE(i);
            const auto rs = pql::evaluate(qs[i], g, opt);
            CHECK_FALSE(rs.rows.empty());
        }
        // The production-line lookup finds exactly the anchored line.
        const auto line = pql::evaluate(qs[1], g, opt);
        REQUIRE(line.rows.size() == 1);
        CHECK(g.node(line.rows[0][0].node).property("uuid")->as_text() == "0a1e");
    }
}
