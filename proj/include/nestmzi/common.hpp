#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace nestmzi {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Error raised by numerical routines on precondition violation (bad sizes,
// out-of-range orders, non-finite parameters). Parser diagnostics use the
// richer types in netlang.hpp.
class domain_error : public std::runtime_error {
public:
    explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nestmzi
