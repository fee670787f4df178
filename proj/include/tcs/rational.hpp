#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

#include "tcs/time.hpp"

namespace tcs {

/// Exact rational used for utilizations, capacities and frequencies.
using Rational = mpq_class;

/// num / den in canonical form; comparisons on mpq_class assume it.
inline Rational ratio(long num, long den)
{
    Rational q(num, den);
    q.canonicalize();
    return q;
}

/// cost / period as an exact rational; a one-shot (infinite) period gives 0.
Rational utilization(Duration cost, Duration period);

/// floor(q) for q >= 0.
std::int64_t floor_to_int(const Rational& q);

/// Period in nanoseconds for a frequency in Hz, floored: floor(1e9 / hz).
Duration period_from_frequency(const Rational& hz);

/// Accepts "3", "0.75", "3/4" and rejects negatives or malformed text.
Rational parse_rational(std::string_view text);

/// Exact decimal when the denominator allows it ("0.75"), else "3/7".
std::string format_rational_exact(const Rational& q);

/// Nine significant digits, as used in reports and CSV output.
std::string format_rational_sig9(const Rational& q);

} // namespace tcs
