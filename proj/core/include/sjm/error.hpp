#pragma once

#include <stdexcept>
#include <string>

namespace sjm {

// Malformed input: bad dimensions, invalid hyperparameters, corrupt files.
class InvalidInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A factorization or solve failed on otherwise valid input.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sjm
