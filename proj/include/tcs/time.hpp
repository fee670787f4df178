#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include "tcs/error.hpp"

namespace tcs {

/// Non-negative duration in integer nanoseconds.
///
/// One value is reserved as "infinite"; it is only meaningful as an
/// inter-arrival time (a one-shot stage). Arithmetic on finite values is
/// checked and throws OverflowError instead of wrapping.
class Duration {
public:
    using rep = std::int64_t;

    constexpr Duration() = default;
    constexpr explicit Duration(rep ns) : ns_(ns) {}

    static constexpr Duration infinite() { return Duration(kInfinite); }
    static constexpr Duration zero() { return Duration(0); }

    static constexpr Duration ns(rep v) { return Duration(v); }
    static Duration us(rep v);
    static Duration ms(rep v);
    static Duration s(rep v);
    static Duration min(rep v);
    static Duration h(rep v);

    constexpr rep count() const { return ns_; }
    constexpr bool is_infinite() const { return ns_ == kInfinite; }
    constexpr bool is_finite() const { return ns_ != kInfinite; }

    friend constexpr auto operator<=>(Duration, Duration) = default;

private:
    static constexpr rep kInfinite = std::numeric_limits<rep>::max();
    rep ns_ = 0;
};

// Checked arithmetic. Infinite operands are rejected with OverflowError.
Duration operator+(Duration a, Duration b);
Duration operator-(Duration a, Duration b);
Duration operator*(Duration a, std::int64_t k);
Duration operator*(std::int64_t k, Duration a);
Duration& operator+=(Duration& a, Duration b);

/// a + b, or nullopt-like sentinel `false` on overflow (used in hot loops).
bool try_add(Duration::rep a, Duration::rep b, Duration::rep& out);
bool try_mul(Duration::rep a, Duration::rep b, Duration::rep& out);

/// ceil(num / den) for num >= 0, den > 0.
constexpr std::int64_t ceil_div(std::int64_t num, std::int64_t den)
{
    return num / den + (num % den != 0 ? 1 : 0);
}

/// Parses "127us", "1.5ms", "2h", "0", "inf". Decimal fractions must
/// resolve to a whole number of nanoseconds.
Duration parse_duration(std::string_view text);

/// Shortest exact spelling using the largest unit that divides the value.
std::string format_duration(Duration d);

} // namespace tcs
