#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace nrssb {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

// Thrown on malformed configuration (CLI exit code 1).
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown on malformed or missing data files (CLI exit code 2).
struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace nrssb
