#include "act/value.hpp"

#include "act/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace act {

namespace {

bool parse_fixed(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
        v = v * 10 + (s[i] - '0');
    }
    out = v;
    return true;
}

// Howard Hinnant's civil_from_days.
void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    if (m <= 2) ++y;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

Timestamp Timestamp::now() {
    using namespace std::chrono;
    return Timestamp{
        duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count()};
}

std::optional<Timestamp> parse_timestamp(std::string_view s) {
    int year = 0, month = 0, day = 0;
    if (s.size() < 10 || !parse_fixed(s, 0, 4, year) || s[4] != '-' ||
        !parse_fixed(s, 5, 2, month) || s[7] != '-' || !parse_fixed(s, 8, 2, day))
        return std::nullopt;
    if (month < 1 || month > 12 || day < 1 || day > 31) return std::nullopt;
    // Reject 2019-02-30 and friends by a civil round-trip.
    const std::int64_t days = days_from_civil(year, month, day);
    {
        std::int64_t y;
        unsigned m, d;
        civil_from_days(days, y, m, d);
        if (y != year || static_cast<int>(m) != month || static_cast<int>(d) != day)
            return std::nullopt;
    }
    std::int64_t millis = days * kMillisPerDay;
    std::size_t pos = 10;
    if (pos < s.size() && (s[pos] == 'T' || s[pos] == ' ')) {
        int hh = 0, mm = 0, ss = 0, ms = 0;
        if (!parse_fixed(s, pos + 1, 2, hh) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
            !parse_fixed(s, pos + 4, 2, mm))
            return std::nullopt;
        pos += 6;
        if (pos < s.size() && s[pos] == ':') {
            if (!parse_fixed(s, pos + 1, 2, ss)) return std::nullopt;
            pos += 3;
            if (pos < s.size() && s[pos] == '.') {
                ++pos;
                int digits = 0;
                int frac = 0;
                while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
                    if (digits < 3) frac = frac * 10 + (s[pos] - '0');
                    ++digits;
                    ++pos;
                }
                if (digits == 0) return std::nullopt;
                for (int i = digits; i < 3; ++i) frac *= 10;
                ms = frac;
            }
        }
        if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
        millis += hh * kMillisPerHour + mm * 60'000LL + ss * 1000LL + ms;
    }
    if (pos < s.size()) {
        if (s[pos] == 'Z') {
            ++pos;
        } else if (s[pos] == '+' || s[pos] == '-') {
            int oh = 0, om = 0;
            const int sign = s[pos] == '+' ? 1 : -1;
            if (!parse_fixed(s, pos + 1, 2, oh) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
                !parse_fixed(s, pos + 4, 2, om))
                return std::nullopt;
            millis -= sign * (oh * kMillisPerHour + om * 60'000LL);
            pos += 6;
        }
    }
    if (pos != s.size()) return std::nullopt;
    return Timestamp{millis};
}

std::string format_timestamp(Timestamp ts) {
    const std::int64_t day = floor_div(ts.millis, kMillisPerDay);
    std::int64_t rem = ts.millis - day * kMillisPerDay;
    std::int64_t y;
    unsigned m, d;
    civil_from_days(day, y, m, d);
    const int hh = static_cast<int>(rem / kMillisPerHour);
    rem %= kMillisPerHour;
    const int mm = static_cast<int>(rem / 60'000);
    rem %= 60'000;
    const int ss = static_cast<int>(rem / 1000);
    const int ms = static_cast<int>(rem % 1000);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02d:%02d:%02d.%03dZ",
                  static_cast<long long>(y), m, d, hh, mm, ss, ms);
    return buf;
}

std::string format_date(Timestamp ts) { return format_timestamp(ts).substr(0, 10); }

std::int64_t day_index(Timestamp ts) { return floor_div(ts.millis, kMillisPerDay); }

Timestamp day_start(std::int64_t day) { return Timestamp{day * kMillisPerDay}; }

int day_of_week(std::int64_t day) {
    // 1970-01-01 was a Thursday.
    return static_cast<int>(((day % 7) + 7 + 3) % 7);
}

std::string_view to_string(ValueKind kind) {
    switch (kind) {
        case ValueKind::text: return "text";
        case ValueKind::integer: return "int";
        case ValueKind::real: return "float";
        case ValueKind::boolean: return "bool";
        case ValueKind::timestamp: return "ts";
        case ValueKind::identifier: return "id";
    }
    return "text";
}

std::optional<ValueKind> value_kind_from_string(std::string_view name) {
    if (name == "text") return ValueKind::text;
    if (name == "int") return ValueKind::integer;
    if (name == "float") return ValueKind::real;
    if (name == "bool") return ValueKind::boolean;
    if (name == "ts") return ValueKind::timestamp;
    if (name == "id") return ValueKind::identifier;
    return std::nullopt;
}

PropertyValue::PropertyValue(double d) : v_(d) {
    if (!std::isfinite(d)) throw InvalidValue("non-finite float property");
}

const std::string& PropertyValue::as_text() const {
    if (auto* s = std::get_if<std::string>(&v_)) return *s;
    if (auto* id = std::get_if<Identifier>(&v_)) return id->value;
    throw InvalidValue("property is not text");
}

std::int64_t PropertyValue::as_int() const {
    if (auto* i = std::get_if<std::int64_t>(&v_)) return *i;
    throw InvalidValue("property is not an integer");
}

double PropertyValue::as_real() const {
    if (auto* d = std::get_if<double>(&v_)) return *d;
    if (auto* i = std::get_if<std::int64_t>(&v_)) return static_cast<double>(*i);
    throw InvalidValue("property is not numeric");
}

bool PropertyValue::as_bool() const {
    if (auto* b = std::get_if<bool>(&v_)) return *b;
    throw InvalidValue("property is not a boolean");
}

Timestamp PropertyValue::as_timestamp() const {
    if (auto* t = std::get_if<Timestamp>(&v_)) return *t;
    throw InvalidValue("property is not a timestamp");
}

std::string PropertyValue::to_display() const {
    switch (kind()) {
        case ValueKind::text:
        case ValueKind::identifier: return as_text();
        case ValueKind::integer: return std::to_string(as_int());
        case ValueKind::real: {
            const double d = std::get<double>(v_);
            char probe[32];
            // Shortest representation that round-trips.
            for (int prec = 1; prec <= 17; ++prec) {
                std::snprintf(probe, sizeof probe, "%.*g", prec, d);
                if (std::strtod(probe, nullptr) == d) break;
            }
            return probe;
        }
        case ValueKind::boolean: return as_bool() ? "true" : "false";
        case ValueKind::timestamp: return format_timestamp(as_timestamp());
    }
    return {};
}

bool values_match(const PropertyValue& a, const PropertyValue& b) {
    if (a.is_text_like() && b.is_text_like()) return a.as_text() == b.as_text();
    if (a.is_numeric() && b.is_numeric()) return a.as_real() == b.as_real();
    return a == b;
}

namespace {
int kind_rank(const PropertyValue& v) {
    switch (v.kind()) {
        case ValueKind::boolean: return 0;
        case ValueKind::integer:
        case ValueKind::real: return 1;
        case ValueKind::timestamp: return 2;
        case ValueKind::text:
        case ValueKind::identifier: return 3;
    }
    return 4;
}
}  // namespace

std::strong_ordering compare_values(const PropertyValue& a, const PropertyValue& b) {
    const int ra = kind_rank(a), rb = kind_rank(b);
    if (ra != rb) return ra <=> rb;
    switch (ra) {
        case 0: return a.as_bool() <=> b.as_bool();
        case 1: {
            const double x = a.as_real(), y = b.as_real();
            if (x < y) return std::strong_ordering::less;
            if (x > y) return std::strong_ordering::greater;
            return std::strong_ordering::equal;
        }
        case 2: return a.as_timestamp() <=> b.as_timestamp();
        default: return a.as_text().compare(b.as_text()) <=> 0;
    }
}

std::string index_key(const PropertyValue& v) {
    switch (v.kind()) {
        case ValueKind::text:
        case ValueKind::identifier: return "s:" + v.as_text();
        case ValueKind::integer:
        case ValueKind::real: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "n:%.17g", v.as_real());
            return buf;
        }
        case ValueKind::boolean: return v.as_bool() ? "b:1" : "b:0";
        case ValueKind::timestamp: return "t:" + std::to_string(v.as_timestamp().millis);
    }
    return {};
}

std::optional<PropertyValue> parse_value(std::string_view text, ValueKind kind) {
    switch (kind) {
        case ValueKind::text: return PropertyValue(std::string(text));
        case ValueKind::identifier: {
            if (text.empty()) return std::nullopt;
            return PropertyValue(Identifier{std::string(text)});
        }
        case ValueKind::integer: {
            std::int64_t out = 0;
            auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
            if (ec != std::errc{} || p != text.data() + text.size() || text.empty())
                return std::nullopt;
            return PropertyValue(out);
        }
        case ValueKind::real: {
            if (text.empty()) return std::nullopt;
            std::string buf(text);
            char* end = nullptr;
            const double d = std::strtod(buf.c_str(), &end);
            if (end != buf.c_str() + buf.size() || !std::isfinite(d)) return std::nullopt;
            return PropertyValue(d);
        }
        case ValueKind::boolean: {
            if (text == "true" || text == "1") return PropertyValue(true);
            if (text == "false" || text == "0") return PropertyValue(false);
            return std::nullopt;
        }
        case ValueKind::timestamp: {
            auto ts = parse_timestamp(text);
            if (!ts) return std::nullopt;
            return PropertyValue(*ts);
        }
    }
    return std::nullopt;
}

}  // namespace act
