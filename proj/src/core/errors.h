// Copyright (c) 2026 The feerate-lab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef FEELAB_CORE_ERRORS_H
#define FEELAB_CORE_ERRORS_H

#include <stdexcept>
#include <string>

namespace feelab {

/** Malformed input file: message names the offending row/field. */
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/** Structurally valid input that breaks a domain invariant. */
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/**
 * Expected failure modes of the estimators. The benchmark harness catches
 * these per transaction and reports coverage instead of aborting.
 */
class EstimationError : public std::runtime_error {
public:
    enum class Kind {
        InsufficientData,    // bcore: no bucket set satisfies p1/p2
        OutOfBoundary,       // mslp: theta beyond mempool depth
        UntrainedModel,      // mslp: no instances for the routed range
        MaxFeerateReached,   // mslp: search-loop cap hit
        InsufficientHistory, // fenn: not enough blocks for the sequence
        TrainingDiverged,    // non-finite loss/gradient
    };

    EstimationError(Kind kind, const std::string& what)
        : std::runtime_error(what), m_kind(kind) {}

    Kind kind() const { return m_kind; }

private:
    Kind m_kind;
};

} // namespace feelab

#endif // FEELAB_CORE_ERRORS_H
