#pragma once

#include <stdexcept>
#include <string>

namespace sea {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad input files, malformed records, violated preconditions.
struct InputError : Error {
    using Error::Error;
};

// Network / endpoint failures after retries are exhausted.
struct TransportError : Error {
    using Error::Error;
};

// The endpoint answered, but the payload does not match the wire contract.
struct ProtocolError : Error {
    using Error::Error;
};

// The endpoint returned an empty completion.
struct EmptyResponseError : Error {
    using Error::Error;
};

}  // namespace sea
