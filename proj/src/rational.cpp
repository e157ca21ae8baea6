#include "mrlbm/rational.hpp"

namespace mrlbm
{
    Rational pow2(int e)
    {
        BigInt one = 1;
        if (e >= 0)
        {
            return Rational(BigInt(one << e));
        }
        return Rational(one, BigInt(one << (-e)));
    }

    Rational ipow(const Rational& x, int e)
    {
        if (e < 0)
        {
            return Rational(1) / ipow(x, -e);
        }
        Rational r = 1;
        for (int i = 0; i < e; ++i)
        {
            r *= x;
        }
        return r;
    }

    double to_double(const Rational& r)
    {
        return static_cast<double>(r);
    }

    std::string to_dyadic_string(const Rational& r)
    {
        BigInt num = boost::multiprecision::numerator(r);
        BigInt den = boost::multiprecision::denominator(r);
        if (den == 1)
        {
            return num.str();
        }
        if ((den & (den - 1)) == 0)
        {
            unsigned e = boost::multiprecision::msb(den);
            return num.str() + "/2^" + std::to_string(e);
        }
        return num.str() + "/" + den.str();
    }
}
