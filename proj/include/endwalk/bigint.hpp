#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace endwalk {

// Walk counts routinely overflow 64 bits (mu_w near 3, n near 40), so all
// exact counters are arbitrary precision.
using BigInt = boost::multiprecision::cpp_int;

}  // namespace endwalk
