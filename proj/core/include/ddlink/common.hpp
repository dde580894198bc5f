#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddlink {

using cd = std::complex<double>;
using cvec = std::vector<cd>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Thrown when a requested configuration cannot be realized (infeasible
/// layout, unsupported code dimensions, malformed sweep spec, ...).
/// Search drivers catch this to skip a candidate; everything else propagates.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

inline double energy(const cvec& x) {
    double e = 0.0;
    for (const cd& v : x) e += std::norm(v);
    return e;
}

} // namespace ddlink
