#pragma once

#include "act/pql.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace act::testing {

inline std::string fixture_text(const std::string& relative) {
    std::ifstream in(std::string(ACT_SOURCE_DIR) + "/fixtures/" + relative);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// The seven listing queries with datetime literals normalized.
inline std::vector<pql::Query> fixture_queries() {
    return pql::parse_script(fixture_text("queries/normalized.pql"));
}

}  // namespace act::testing
