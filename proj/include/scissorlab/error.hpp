#pragma once

#include <stdexcept>
#include <string>

namespace scissorlab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define SCISSORLAB_ERROR(Name)          \
    class Name : public Error {         \
    public:                             \
        using Error::Error;             \
    }

SCISSORLAB_ERROR(OccupationOutOfRange);
SCISSORLAB_ERROR(DegenerateCat);
SCISSORLAB_ERROR(ModeCollision);
SCISSORLAB_ERROR(ModeOutOfRange);
SCISSORLAB_ERROR(ParameterOutOfRange);
SCISSORLAB_ERROR(UnsupportedOrder);
SCISSORLAB_ERROR(ZeroProbability);
SCISSORLAB_ERROR(DimensionMismatch);
SCISSORLAB_ERROR(NotNormalized);
SCISSORLAB_ERROR(UnphysicalCovariance);
SCISSORLAB_ERROR(ConvergenceFailure);
SCISSORLAB_ERROR(ConfigError);

#undef SCISSORLAB_ERROR

// Carries the population that fell outside the truncated space.
class CutoffTooSmall : public Error {
public:
    CutoffTooSmall(const std::string& what, double leakage)
        : Error(what), leakage_(leakage) {}
    double leakage() const noexcept { return leakage_; }

private:
    double leakage_;
};

}  // namespace scissorlab
