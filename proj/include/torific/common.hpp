#pragma once
// Shared scalar types, the error taxonomy, and small numeric helpers.

#include <array>
#include <cctype>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace torific {

// Exact arithmetic for lattice data and moment tables.  Converted to double
// once at module boundaries; everything downstream of that is binary fp.
using Rational = boost::multiprecision::cpp_rational;

// Error taxonomy, mapped to CLI exit codes: usage/config/lookup problems ->
// 1, certification or monitor failures -> 2, numerical breakdown -> 3.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CertificationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// Accepts "p", "-p", "p/q"; rejects everything else.
inline Rational parse_rational(const std::string& s) {
    if (s.empty()) throw UsageError("empty rational literal");
    for (char c : s) {
        if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '/'))
            throw UsageError("bad rational literal: " + s);
    }
    try {
        Rational r(s);
        return r;
    } catch (const std::exception&) {
        throw UsageError("bad rational literal: " + s);
    }
}

// Points carry capacity 2; the active dimension (1 or 2) lives with the
// owning object.  Unused slots stay zero so dot products are dim-agnostic.
template <class S>
using PointT = std::array<S, 2>;
using Vec = PointT<double>;
using RVec = PointT<Rational>;

template <class S>
inline S dot(const PointT<S>& a, const PointT<S>& b) {
    return a[0] * b[0] + a[1] * b[1];
}

inline RVec to_rational(const Vec& v) { return {Rational(v[0]), Rational(v[1])}; }
inline Vec from_rational(const RVec& v) { return {to_double(v[0]), to_double(v[1])}; }

}  // namespace torific
