#pragma once

#include <stdexcept>
#include <string>

namespace convdiff {

/// Base class for all solver errors. Every specific failure below derives
/// from this so callers can catch the whole family or a single kind.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct HaloTooShallow : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct ZeroDivisor : Error {
    using Error::Error;
};
struct NonPositiveSpacing : Error {
    using Error::Error;
};
struct NonPositiveDiagonal : Error {
    using Error::Error;
};
struct UnsupportedCombination : Error {
    using Error::Error;
};
struct OddDimensions : Error {
    using Error::Error;
};
struct IndivisibleDims : Error {
    using Error::Error;
};
struct ParseError : Error {
    using Error::Error;
};
struct InconsistentGroups : Error {
    using Error::Error;
};
struct NegativeCrossSection : Error {
    using Error::Error;
};
struct UnknownMaterial : Error {
    using Error::Error;
};
struct GridIndivisible : Error {
    using Error::Error;
};
struct NoFissileMaterial : Error {
    using Error::Error;
};
struct NonConvergence : Error {
    using Error::Error;
};

} // namespace convdiff
