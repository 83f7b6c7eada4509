#pragma once

// Property literals stored on nodes and edges.

#include <chrono>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace act {

/// UTC instant with millisecond precision.
struct Timestamp {
    std::int64_t millis = 0;

    auto operator<=>(const Timestamp&) const = default;

    static Timestamp from_seconds(std::int64_t s) { return Timestamp{s * 1000}; }
    static Timestamp now();
};

inline constexpr std::int64_t kMillisPerHour = 3'600'000;
inline constexpr std::int64_t kMillisPerDay = 24 * kMillisPerHour;

/// Opaque text key (foreign keys, natural keys).
struct Identifier {
    std::string value;
    auto operator<=>(const Identifier&) const = default;
};

/// Parse "YYYY-MM-DD", "YYYY-MM-DDTHH:MM[:SS[.mmm]]" with optional "Z" or
/// "+HH:MM"/"-HH:MM" offset (a space may replace 'T'). Result is UTC.
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// ISO-8601 UTC rendering, always "YYYY-MM-DDTHH:MM:SS.mmmZ".
std::string format_timestamp(Timestamp ts);

/// "YYYY-MM-DD" of the UTC day containing ts.
std::string format_date(Timestamp ts);

/// Days since 1970-01-01 (floor) and back.
std::int64_t day_index(Timestamp ts);
Timestamp day_start(std::int64_t day);

/// 0 = Monday ... 6 = Sunday.
int day_of_week(std::int64_t day);

std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d);

enum class ValueKind { text, integer, real, boolean, timestamp, identifier };

std::string_view to_string(ValueKind kind);
std::optional<ValueKind> value_kind_from_string(std::string_view name);

/// Tagged literal. Floats must be finite; see make_real().
class PropertyValue {
public:
    using Storage =
        std::variant<std::string, std::int64_t, double, bool, Timestamp, Identifier>;

    PropertyValue() : v_(std::string{}) {}
    PropertyValue(std::string s) : v_(std::move(s)) {}
    PropertyValue(const char* s) : v_(std::string(s)) {}
    PropertyValue(std::int64_t i) : v_(i) {}
    PropertyValue(int i) : v_(static_cast<std::int64_t>(i)) {}
    PropertyValue(bool b) : v_(b) {}
    PropertyValue(Timestamp t) : v_(t) {}
    PropertyValue(Identifier id) : v_(std::move(id)) {}
    /// Throws InvalidValue on NaN/Inf.
    PropertyValue(double d);

    ValueKind kind() const { return static_cast<ValueKind>(v_.index()); }
    const Storage& storage() const { return v_; }

    bool is_text_like() const {
        return kind() == ValueKind::text || kind() == ValueKind::identifier;
    }
    bool is_numeric() const {
        return kind() == ValueKind::integer || kind() == ValueKind::real;
    }

    const std::string& as_text() const;  // text or identifier
    std::int64_t as_int() const;
    double as_real() const;  // integer or real
    bool as_bool() const;
    Timestamp as_timestamp() const;

    /// Exact, kind-sensitive equality (used for snapshots and upserts).
    bool operator==(const PropertyValue& other) const { return v_ == other.v_; }

    /// Human-readable rendering without kind tag.
    std::string to_display() const;

private:
    Storage v_;
};

/// Equality used by query matching: text and identifier compare by content,
/// integer and real compare numerically.
bool values_match(const PropertyValue& a, const PropertyValue& b);

/// Total order consistent with values_match (ties only for matching values).
std::strong_ordering compare_values(const PropertyValue& a, const PropertyValue& b);

/// Hash key consistent with values_match.
std::string index_key(const PropertyValue& v);

/// Parse a raw textual cell as the given kind.
std::optional<PropertyValue> parse_value(std::string_view text, ValueKind kind);

using PropertyMap = std::map<std::string, PropertyValue, std::less<>>;

}  // namespace act
