#pragma once

#include <stdexcept>
#include <string>

namespace filterlab {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad rational, inconsistent trace, schema violation.
class ValidationError : public Error {
public:
  using Error::Error;
};

// A coordinate outside the prefix whose tail class cannot resolve it.
class BiasUndefinedError : public Error {
public:
  using Error::Error;
};

// Refusal to enumerate 2^I for |I| above the configured cap.
class EnumerationCapError : public Error {
public:
  EnumerationCapError(std::size_t size, std::size_t cap)
      : Error("enumeration cap exceeded: |I| = " + std::to_string(size) + " > cap " +
              std::to_string(cap)),
        size_(size), cap_(cap) {}
  std::size_t size() const { return size_; }
  std::size_t cap() const { return cap_; }

private:
  std::size_t size_;
  std::size_t cap_;
};

// Set-theoretic precondition failures (a ⊄ I, window too short, not dominated, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

}  // namespace filterlab
