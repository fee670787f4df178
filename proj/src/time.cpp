#include "tcs/time.hpp"

#include <array>
#include <cctype>
#include <utility>

namespace tcs {

namespace {

struct Unit {
    std::string_view suffix;
    Duration::rep scale;
};

// Accepted unit suffixes (matched exactly).
constexpr std::array<Unit, 7> kUnits{{
    {"min", 60'000'000'000},
    {"ns", 1},
    {"us", 1'000},
    {"\xC2\xB5s", 1'000}, // µs
    {"ms", 1'000'000},
    {"s", 1'000'000'000},
    {"h", 3'600'000'000'000},
}};

// Units tried by the formatter, largest first.
constexpr std::array<Unit, 6> kFormatUnits{{
    {"h", 3'600'000'000'000},
    {"min", 60'000'000'000},
    {"s", 1'000'000'000},
    {"ms", 1'000'000},
    {"us", 1'000},
    {"ns", 1},
}};

Duration scaled(Duration::rep v, Duration::rep scale)
{
    Duration::rep out = 0;
    if (v < 0 || !try_mul(v, scale, out) || out == Duration::infinite().count())
        throw OverflowError("duration out of range");
    return Duration(out);
}

void require_finite(Duration a, const char* op)
{
    if (a.is_infinite())
        throw OverflowError(std::string("arithmetic on infinite duration (") + op + ")");
}

} // namespace

Duration Duration::us(rep v) { return scaled(v, 1'000); }
Duration Duration::ms(rep v) { return scaled(v, 1'000'000); }
Duration Duration::s(rep v) { return scaled(v, 1'000'000'000); }
Duration Duration::min(rep v) { return scaled(v, 60'000'000'000); }
Duration Duration::h(rep v) { return scaled(v, 3'600'000'000'000); }

bool try_add(Duration::rep a, Duration::rep b, Duration::rep& out)
{
    return !__builtin_add_overflow(a, b, &out);
}

bool try_mul(Duration::rep a, Duration::rep b, Duration::rep& out)
{
    return !__builtin_mul_overflow(a, b, &out);
}

Duration operator+(Duration a, Duration b)
{
    require_finite(a, "+");
    require_finite(b, "+");
    Duration::rep out = 0;
    if (!try_add(a.count(), b.count(), out) || out == Duration::infinite().count())
        throw OverflowError("duration sum overflows");
    return Duration(out);
}

Duration operator-(Duration a, Duration b)
{
    require_finite(a, "-");
    require_finite(b, "-");
    if (b > a)
        throw OverflowError("negative duration");
    return Duration(a.count() - b.count());
}

Duration operator*(Duration a, std::int64_t k)
{
    require_finite(a, "*");
    if (k < 0)
        throw OverflowError("negative duration scale");
    return scaled(a.count(), k);
}

Duration operator*(std::int64_t k, Duration a) { return a * k; }

Duration& operator+=(Duration& a, Duration b)
{
    a = a + b;
    return a;
}

Duration parse_duration(std::string_view text)
{
    const std::string token(text);
    auto fail = [&](const std::string& why) -> Duration {
        throw ParseError("", "bad duration '" + token + "': " + why);
    };

    if (text == "inf" || text == "infinite")
        return Duration::infinite();

    std::size_t pos = 0;
    Duration::rep whole = 0;
    std::size_t int_digits = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        if (!try_mul(whole, 10, whole) || !try_add(whole, text[pos] - '0', whole))
            return fail("too large");
        ++pos;
        ++int_digits;
    }
    Duration::rep frac = 0;
    Duration::rep frac_scale = 1;
    std::size_t frac_digits = 0;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            if (frac_digits >= 15)
                return fail("too many fractional digits");
            frac = frac * 10 + (text[pos] - '0');
            frac_scale *= 10;
            ++pos;
            ++frac_digits;
        }
        if (frac_digits == 0)
            return fail("missing fractional digits");
    }
    if (int_digits == 0 && frac_digits == 0)
        return fail("missing number");

    const std::string_view suffix = text.substr(pos);
    Duration::rep scale = 0;
    if (suffix.empty()) {
        // A bare zero needs no unit; anything else is ambiguous.
        if (whole == 0 && frac == 0)
            return Duration::zero();
        return fail("missing unit");
    }
    for (const auto& u : kUnits) {
        if (suffix == u.suffix) {
            scale = u.scale;
            break;
        }
    }
    if (scale == 0)
        return fail("unknown unit '" + std::string(suffix) + "'");

    Duration::rep total = 0;
    if (!try_mul(whole, scale, total))
        return fail("too large");
    if (frac != 0) {
        // frac / frac_scale * scale must be integral.
        Duration::rep num = 0;
        if (!try_mul(frac, scale, num))
            return fail("too large");
        if (num % frac_scale != 0)
            return fail("not a whole number of nanoseconds");
        if (!try_add(total, num / frac_scale, total))
            return fail("too large");
    }
    if (total == Duration::infinite().count())
        return fail("too large");
    return Duration(total);
}

std::string format_duration(Duration d)
{
    if (d.is_infinite())
        return "inf";
    if (d.count() == 0)
        return "0";
    for (const auto& u : kFormatUnits) {
        if (d.count() % u.scale == 0)
            return std::to_string(d.count() / u.scale) + std::string(u.suffix);
    }
    return std::to_string(d.count()) + "ns";
}

} // namespace tcs
