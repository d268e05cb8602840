#pragma once

#include <complex>
#include <span>
#include <vector>

namespace vibshape::detail {

/// Forward real-to-complex DFT, n/2 + 1 outputs.
std::vector<std::complex<double>> rfft(std::span<const double> input);

/// Inverse of rfft for a length-n signal, normalised so irfft(rfft(x)) == x.
std::vector<double> irfft(std::span<const std::complex<double>> spectrum, std::size_t n);

}  // namespace vibshape::detail
