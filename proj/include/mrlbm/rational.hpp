#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace mrlbm
{
    using Rational = boost::multiprecision::cpp_rational;
    using BigInt   = boost::multiprecision::cpp_int;

    // Integer power, exponent may be negative.
    Rational pow2(int e);
    Rational ipow(const Rational& x, int e);

    double to_double(const Rational& r);

    // "p" or "p/2^e" when the denominator is a power of two, "p/q" otherwise.
    std::string to_dyadic_string(const Rational& r);
}
