#pragma once

#include <stdexcept>
#include <string>

namespace roomtex {

// Base class for all library errors so callers can catch the whole family.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define ROOMTEX_DEFINE_ERROR(Name)                                            \
    struct Name : Error {                                                     \
        explicit Name(const std::string& msg) : Error(#Name ": " + msg) {}    \
    }

// Layout parsing / geometry.
ROOMTEX_DEFINE_ERROR(MalformedLayout);
ROOMTEX_DEFINE_ERROR(DegenerateWall);
ROOMTEX_DEFINE_ERROR(NonVerticalWall);
ROOMTEX_DEFINE_ERROR(EmptyInput);
ROOMTEX_DEFINE_ERROR(CollinearInput);
ROOMTEX_DEFINE_ERROR(SelfIntersectingLoop);

// View planning.
ROOMTEX_DEFINE_ERROR(MixedResolutions);
ROOMTEX_DEFINE_ERROR(Unplannable);

// Image exchange / metrics.
ROOMTEX_DEFINE_ERROR(DimensionMismatch);
ROOMTEX_DEFINE_ERROR(OutsideMaskModified);
ROOMTEX_DEFINE_ERROR(TooSmall);
ROOMTEX_DEFINE_ERROR(DegenerateCorners);
ROOMTEX_DEFINE_ERROR(InvalidCornerOrder);

// Synthetic capture.
ROOMTEX_DEFINE_ERROR(PoseOutsideRoom);

// Dataset directories.
ROOMTEX_DEFINE_ERROR(MalformedDataset);
ROOMTEX_DEFINE_ERROR(NoGroundTruth);

// Generic I/O and data problems.
ROOMTEX_DEFINE_ERROR(IoError);
ROOMTEX_DEFINE_ERROR(MalformedData);

#undef ROOMTEX_DEFINE_ERROR

}  // namespace roomtex
