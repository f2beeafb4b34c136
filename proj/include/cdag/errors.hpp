#pragma once

#include <stdexcept>
#include <string>

namespace cdag {

// Malformed or inconsistent caller input (bad indices, overlapping sets, missing data).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A well-posed computation that failed numerically.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parent columns that are linearly dependent once the base design is projected out.
class CollinearityError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace cdag
