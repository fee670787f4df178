#include "tcs/rational.hpp"

#include <cctype>
#include <cstdio>

namespace tcs {

Rational utilization(Duration cost, Duration period)
{
    if (period.is_infinite())
        return Rational(0);
    if (period.count() == 0)
        throw PreconditionViolated("utilization with a zero period");
    Rational q(mpz_class(static_cast<long>(cost.count())), mpz_class(static_cast<long>(period.count())));
    q.canonicalize();
    return q;
}

std::int64_t floor_to_int(const Rational& q)
{
    mpz_class out;
    mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    if (!out.fits_slong_p())
        throw OverflowError("rational too large for a 64-bit integer");
    return out.get_si();
}

Duration period_from_frequency(const Rational& hz)
{
    if (hz <= 0)
        throw PreconditionViolated("frequency must be positive");
    const Rational ns_per_event = Rational(1'000'000'000) / hz;
    const auto period = floor_to_int(ns_per_event);
    if (period <= 0)
        throw PreconditionViolated("frequency above 1 GHz has no nanosecond period");
    return Duration(period);
}

Rational parse_rational(std::string_view text)
{
    const std::string token(text);
    auto fail = [&]() -> Rational { throw ParseError("", "bad number '" + token + "'"); };
    if (text.empty())
        return fail();

    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        const std::string num(text.substr(0, slash));
        const std::string den(text.substr(slash + 1));
        auto digits = [](const std::string& s) {
            if (s.empty())
                return false;
            for (char c : s)
                if (!std::isdigit(static_cast<unsigned char>(c)))
                    return false;
            return true;
        };
        if (!digits(num) || !digits(den))
            return fail();
        mpz_class d(den);
        if (d == 0)
            return fail();
        Rational q(mpz_class(num), d);
        q.canonicalize();
        return q;
    }

    mpz_class whole = 0;
    mpz_class frac = 0;
    mpz_class scale = 1;
    std::size_t pos = 0;
    std::size_t digits = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        whole = whole * 10 + (text[pos] - '0');
        ++pos;
        ++digits;
    }
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        std::size_t frac_digits = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            frac = frac * 10 + (text[pos] - '0');
            scale *= 10;
            ++pos;
            ++frac_digits;
        }
        if (frac_digits == 0)
            return fail();
        digits += frac_digits;
    }
    if (digits == 0 || pos != text.size())
        return fail();
    Rational q(whole * scale + frac, scale);
    q.canonicalize();
    return q;
}

std::string format_rational_exact(const Rational& q)
{
    if (q.get_den() == 1)
        return q.get_num().get_str();
    // Terminating decimal iff the denominator has only factors 2 and 5.
    mpz_class den = q.get_den();
    std::size_t twos = 0;
    std::size_t fives = 0;
    while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) {
        den /= 2;
        ++twos;
    }
    while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
        den /= 5;
        ++fives;
    }
    if (den != 1)
        return q.get_num().get_str() + "/" + q.get_den().get_str();

    const std::size_t places = std::max(twos, fives);
    mpz_class pow10;
    mpz_ui_pow_ui(pow10.get_mpz_t(), 10, places);
    const mpz_class scaled = q.get_num() * pow10 / q.get_den();
    const bool negative = scaled < 0;
    std::string digits = mpz_class(abs(scaled)).get_str();
    if (digits.size() <= places)
        digits.insert(0, places - digits.size() + 1, '0');
    digits.insert(digits.size() - places, ".");
    return negative ? "-" + digits : digits;
}

std::string format_rational_sig9(const Rational& q)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", q.get_d());
    return buf;
}

} // namespace tcs
