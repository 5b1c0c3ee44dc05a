#pragma once

#include <stdexcept>
#include <string>

namespace logtrap {

// Bad argument values (even L, non-positive tolerance, ...).
struct parameter_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// The computational box is too small for the requested states.
struct domain_truncation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A factor <= K or other input the protocol cannot encode.
struct protocol_domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// No spectral level within tolerance of a measured energy.
struct decode_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Decoded candidate does not divide N; points at a mis-set drive
// frequency or a truncated basis.
struct inconsistency_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct stiffness_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Classical orbit energy below the effective-potential minimum.
struct no_motion_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Caller handed in data violating a documented contract
// (unnormalized basis functions, asymmetric potential, ...).
struct contract_error : std::logic_error {
    using std::logic_error::logic_error;
};

} // namespace logtrap
