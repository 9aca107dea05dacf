#pragma once

#include <stdexcept>
#include <string>

namespace tamatrack {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A TrackerConfig field violates its documented range. `name()` carries the
/// per-field violation label (e.g. "NonPositiveCueLimit").
class ConfigError : public Error {
public:
    ConfigError(std::string name, const std::string& msg)
        : Error(name + ": " + msg), name_(std::move(name)) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& msg) : Error("DimensionMismatch: " + msg) {}
};

class UntaggedDescriptor : public Error {
public:
    explicit UntaggedDescriptor(const std::string& msg) : Error("UntaggedDescriptor: " + msg) {}
};

class EmptyTrackAppearance : public Error {
public:
    explicit EmptyTrackAppearance(const std::string& msg) : Error("EmptyTrackAppearance: " + msg) {}
};

/// Parse failure in a line-oriented input file; carries the 1-based line number.
class MalformedRow : public Error {
public:
    MalformedRow(int line, const std::string& msg)
        : Error("MalformedRow at line " + std::to_string(line) + ": " + msg), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class MalformedWeightFile : public Error {
public:
    MalformedWeightFile(int line, const std::string& msg)
        : Error("MalformedWeightFile at line " + std::to_string(line) + ": " + msg), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class DuplicateKey : public Error {
public:
    DuplicateKey(int line, const std::string& msg)
        : Error("DuplicateKey at line " + std::to_string(line) + ": " + msg), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class NonMonotoneFrame : public Error {
public:
    explicit NonMonotoneFrame(const std::string& msg) : Error("NonMonotoneFrame: " + msg) {}
};

class NonIntegerStride : public Error {
public:
    explicit NonIntegerStride(const std::string& msg) : Error("NonIntegerStride: " + msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error("IoError: " + msg) {}
};

}  // namespace tamatrack
