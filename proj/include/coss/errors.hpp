#pragma once

#include <stdexcept>

namespace coss {

/// Base class for every recoverable input/precondition failure raised by the
/// library. Callers that only care about "bad input vs. bug" can catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define COSS_DECLARE_ERROR(NAME)    \
    class NAME : public Error {     \
    public:                         \
        using Error::Error;         \
    }

// allocation
COSS_DECLARE_ERROR(EmptyInputError);
COSS_DECLARE_ERROR(DuplicateIdError);
COSS_DECLARE_ERROR(NonFiniteCovariateError);

// estimation
COSS_DECLARE_ERROR(MissingOutcomeError);
COSS_DECLARE_ERROR(MissingCovariateError);
COSS_DECLARE_ERROR(EmptyArmError);
COSS_DECLARE_ERROR(DegenerateCovariateError);
COSS_DECLARE_ERROR(DegenerateDesignError);
COSS_DECLARE_ERROR(TooFewUnitsError);

// inference
COSS_DECLARE_ERROR(TooFewSamplesError);
COSS_DECLARE_ERROR(TooFewPairsError);
COSS_DECLARE_ERROR(ZeroVarianceError);

// theory
COSS_DECLARE_ERROR(NTooSmallError);

// simgen / config / cli plumbing
COSS_DECLARE_ERROR(SampleTooLargeError);
COSS_DECLARE_ERROR(ConfigError);
COSS_DECLARE_ERROR(InvalidParameterError);
COSS_DECLARE_ERROR(CsvError);

#undef COSS_DECLARE_ERROR

}  // namespace coss
