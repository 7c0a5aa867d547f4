#pragma once

#include <stdexcept>
#include <string>

namespace votesig {

// Invalid inputs: broken type invariants, malformed files, bad flags.
// The CLI maps this to exit code 2.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Mathematically infeasible requests (non-realizable signatures,
// divergent endpoint integrals).  CLI exit code 3.
class infeasibility_error : public std::runtime_error {
public:
    explicit infeasibility_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A computation whose answer cannot be certified in double precision.
// Reported, never guessed.  CLI exit code 3.
class precision_error : public std::runtime_error {
public:
    explicit precision_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace votesig
