#pragma once

#include <stdexcept>
#include <string>

namespace sakr {

// Base for everything the library throws. InputError covers bad user input
// (files, config, CLI usage) and maps to exit code 2; plain Error maps to 1.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InputError : public Error {
public:
    explicit InputError(const std::string& msg) : Error(msg) {}
};

#define SAKR_DEFINE_ERROR(Name, Base)                                  \
    class Name : public Base {                                         \
    public:                                                            \
        explicit Name(const std::string& msg) : Base(#Name ": " + msg) {} \
    }

// corpus
SAKR_DEFINE_ERROR(MissingId, InputError);
SAKR_DEFINE_ERROR(DuplicateId, InputError);
SAKR_DEFINE_ERROR(MalformedRecord, InputError);
SAKR_DEFINE_ERROR(BadLabel, InputError);
SAKR_DEFINE_ERROR(MalformedLine, InputError);
SAKR_DEFINE_ERROR(ZeroChunkSize, InputError);

// embed
SAKR_DEFINE_ERROR(DimMismatch, InputError);
SAKR_DEFINE_ERROR(NonFiniteComponent, InputError);
SAKR_DEFINE_ERROR(NotNormalizable, InputError);
SAKR_DEFINE_ERROR(ZeroNorm, Error);

// hhindex
SAKR_DEFINE_ERROR(ZeroCapacity, InputError);
SAKR_DEFINE_ERROR(NotInitialized, Error);
SAKR_DEFINE_ERROR(EmptyCorpus, InputError);

// cluster
SAKR_DEFINE_ERROR(TooManyClusters, InputError);
SAKR_DEFINE_ERROR(EmptyInput, InputError);
SAKR_DEFINE_ERROR(SingleCluster, InputError);
SAKR_DEFINE_ERROR(NoCentroids, InputError);

// retrieve
SAKR_DEFINE_ERROR(BadAlpha, InputError);
SAKR_DEFINE_ERROR(BadProbeCount, InputError);
SAKR_DEFINE_ERROR(MismatchedClustering, InputError);

// eval
SAKR_DEFINE_ERROR(DegenerateQrels, InputError);

// cli
SAKR_DEFINE_ERROR(ArtifactMissing, InputError);
SAKR_DEFINE_ERROR(BadConfig, InputError);

#undef SAKR_DEFINE_ERROR

}  // namespace sakr
