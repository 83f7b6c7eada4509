#pragma once

// JSON encodings shared by the snapshot writer and the HTTP payloads.

#include "act/graph.hpp"

#include <json.hpp>

namespace act::detail {

using Json = nlohmann::json;

/// ["kind", value] pair; timestamps are ISO strings.
Json encode_value(const PropertyValue& v);
PropertyValue decode_value(const Json& j);

Json encode_properties(const PropertyMap& props);
PropertyMap decode_properties(const Json& j);

Json encode_provenance(const ProvenanceTag& p);
ProvenanceTag decode_provenance(const Json& j);

/// Plain rendering for API payloads: text/ids as strings, timestamps ISO.
Json plain_value(const PropertyValue& v);
Json plain_properties(const PropertyMap& props);

Json node_record(const Node& n);
Json edge_record(const Edge& e);

}  // namespace act::detail
