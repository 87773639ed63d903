#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace zeus {

// Base for every error the library raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input: malformed files, invalid config, violated preconditions.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Filesystem failures (unreadable input, unwritable output).
class IoError : public Error {
public:
    using Error::Error;
};

// A backend could not be reached after all retries.
class TransportError : public Error {
public:
    TransportError(const std::string& what, std::string fingerprint)
        : Error(what + " [request " + fingerprint + "]"), fingerprint_(std::move(fingerprint)) {}

    const std::string& fingerprint() const noexcept { return fingerprint_; }

private:
    std::string fingerprint_;
};

// A backend answered, but not in the shape we expect.
class ProtocolError : public Error {
public:
    using Error::Error;
};

// Some perturbation slots of a pool could not be filled.
class PoolIncompleteError : public Error {
public:
    PoolIncompleteError(const std::string& question_id, std::vector<std::string> missing_slots,
                        std::string first_cause);

    const std::vector<std::string>& missing_slots() const noexcept { return missing_; }
    const std::string& cause() const noexcept { return cause_; }

private:
    std::vector<std::string> missing_;
    std::string cause_;
};

}  // namespace zeus
