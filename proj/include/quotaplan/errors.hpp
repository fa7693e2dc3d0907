#pragma once

#include <stdexcept>
#include <string>

namespace quotaplan {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define QUOTAPLAN_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                          \
   public:                                                             \
    using Error::Error;                                                \
    const char* kind() const noexcept override { return #Name; }       \
  };

// Input had no usable observations.
QUOTAPLAN_DEFINE_ERROR(EmptyDataError)
// Mismatched lengths, malformed intervals, bad sign vectors.
QUOTAPLAN_DEFINE_ERROR(ShapeError)
// A parameter outside its mathematical domain (probability, level, count).
QUOTAPLAN_DEFINE_ERROR(DomainError)
// Observations that contradict each other (acceptances > offers).
QUOTAPLAN_DEFINE_ERROR(DataError)
// A convolution result would exceed the support cap.
QUOTAPLAN_DEFINE_ERROR(CapacityError)
QUOTAPLAN_DEFINE_ERROR(ParseError)
QUOTAPLAN_DEFINE_ERROR(SchemaError)
QUOTAPLAN_DEFINE_ERROR(ValidationError)

#undef QUOTAPLAN_DEFINE_ERROR

/// A required option for the requested operation was not supplied.
class MissingOptionError : public Error {
 public:
  explicit MissingOptionError(std::string option)
      : Error("missing required option: " + option), option_(std::move(option)) {}
  const char* kind() const noexcept override { return "MissingOptionError"; }
  const std::string& option() const noexcept { return option_; }

 private:
  std::string option_;
};

}  // namespace quotaplan
