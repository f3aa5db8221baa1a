#pragma once

#include <stdexcept>
#include <string>

namespace spnlab {

// Invalid user input or configuration (CLI maps these to exit code 1).
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Shape/dimension mismatch in tensor math.
struct ShapeError : ValidationError {
    explicit ShapeError(const std::string& msg) : ValidationError(msg) {}
};

// Dataset / checkpoint file problems, each distinguishable by type.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};
struct CorruptMagicError : IoError {
    explicit CorruptMagicError(const std::string& msg) : IoError(msg) {}
};
struct TruncatedFileError : IoError {
    explicit TruncatedFileError(const std::string& msg) : IoError(msg) {}
};
struct ManifestMismatchError : IoError {
    explicit ManifestMismatchError(const std::string& msg) : IoError(msg) {}
};

}  // namespace spnlab
