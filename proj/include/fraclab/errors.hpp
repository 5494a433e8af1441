// errors.hpp — exception types thrown across the library.
// Every precondition violation maps to one of these; numerical outcomes
// (blow-up, under-resolution) are reported through result types instead.

#pragma once

#include <stdexcept>
#include <string>

namespace fraclab {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define FRACLAB_DEFINE_ERROR(Name)                                     \
    struct Name : Error {                                              \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

FRACLAB_DEFINE_ERROR(InvalidGrid);
FRACLAB_DEFINE_ERROR(InvalidField);
FRACLAB_DEFINE_ERROR(NonHermitianSpectrum);
FRACLAB_DEFINE_ERROR(ScaleTooFine);
FRACLAB_DEFINE_ERROR(InvalidExponent);
FRACLAB_DEFINE_ERROR(InvalidAlpha);
FRACLAB_DEFINE_ERROR(InvalidKernel);
FRACLAB_DEFINE_ERROR(DimensionMismatch);
FRACLAB_DEFINE_ERROR(NonZeroMeanVorticity);
FRACLAB_DEFINE_ERROR(SpecMismatch);
FRACLAB_DEFINE_ERROR(NoPositiveMaximum);
FRACLAB_DEFINE_ERROR(InvalidDelta);
FRACLAB_DEFINE_ERROR(InvalidInput);
FRACLAB_DEFINE_ERROR(InvalidRange);
FRACLAB_DEFINE_ERROR(InvalidConfig);
FRACLAB_DEFINE_ERROR(IoError);

#undef FRACLAB_DEFINE_ERROR

} // namespace fraclab
