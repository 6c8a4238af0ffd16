#pragma once

#include <stdexcept>
#include <string>

namespace npsp {

    /// Malformed input text (map documents, rule files, weight snapshots, configs).
    class ParseError : public std::runtime_error {
    public:
        using std::runtime_error::runtime_error;
    };

    /// Well-formed input that violates a domain invariant.
    class ValidationError : public std::runtime_error {
    public:
        using std::runtime_error::runtime_error;
    };

    /// A caller broke an operation's precondition.
    class ContractViolation : public std::logic_error {
    public:
        using std::logic_error::logic_error;
    };

} // namespace npsp
