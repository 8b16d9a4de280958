#pragma once

#include <stdexcept>
#include <string>

namespace igs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

#define IGS_DEFINE_ERROR(name)                  \
    class name : public Error                   \
    {                                           \
    public:                                     \
        using Error::Error;                     \
    }

IGS_DEFINE_ERROR(DimensionError);
IGS_DEFINE_ERROR(RangeError);
IGS_DEFINE_ERROR(OverlapError);
IGS_DEFINE_ERROR(CoverageError);
IGS_DEFINE_ERROR(ZeroColumnError);
IGS_DEFINE_ERROR(NoCandidates);
IGS_DEFINE_ERROR(PolicyError);
IGS_DEFINE_ERROR(FamilyError);
IGS_DEFINE_ERROR(SingularError);
IGS_DEFINE_ERROR(CombinatorialBudgetError);
IGS_DEFINE_ERROR(FormatError);

#undef IGS_DEFINE_ERROR

} // namespace igs
