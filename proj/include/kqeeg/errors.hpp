#pragma once

#include <stdexcept>
#include <string>

namespace kqeeg {

// Base class for all pipeline errors. Subclasses name the specific contract
// violation so callers and tests can catch them precisely.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace kqeeg
