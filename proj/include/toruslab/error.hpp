#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace toruslab {

enum class ErrorKind {
    EmptyQuotients,
    NonPositiveQuotient,
    LevelBeyondHorizon,
    RangeError,
    LengthNotConvergentDenominator,
    SampleOutsideDomain,
    HypothesisViolated,
    PoleAtZero,
    OrbitHitsPole,
    PoleAtCusp,
    OrbitHitsCusp,
    NotPositiveDefinite,
    NonPositiveDeterminant,
    SectionThroughStoppingPoint,
    LevelBudgetExceeded,
    EmptySeries,
    UnknownLemmaTag,
    ConflictingCertificates,
    InvalidArgument,
    Stagnation,
    InvariantBroken,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string detail, std::int64_t index = -1);

    ErrorKind kind() const { return kind_; }
    const std::string& detail() const { return detail_; }
    // Offending orbit index for OrbitHitsPole / OrbitHitsCusp, -1 otherwise.
    std::int64_t index() const { return index_; }

private:
    ErrorKind kind_;
    std::string detail_;
    std::int64_t index_;
};

[[noreturn]] void hypothesis_violated(const std::string& clause);

}  // namespace toruslab
