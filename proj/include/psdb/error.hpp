#pragma once

#include <stdexcept>
#include <string>

namespace psdb {

// Base of every exception thrown by the library. The CLI maps the
// category onto its exit codes.
class Error : public std::runtime_error {
 public:
  enum class Category { kDomain, kNumerical, kVerification };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

 private:
  Category category_;
};

#define PSDB_DEFINE_ERROR(Name, Cat)                                   \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& what) : Error(Category::Cat, what) {} \
  }

PSDB_DEFINE_ERROR(InvalidDimension, kDomain);
PSDB_DEFINE_ERROR(InvalidIndex, kDomain);
PSDB_DEFINE_ERROR(InvalidArgument, kDomain);
PSDB_DEFINE_ERROR(DomainError, kDomain);
PSDB_DEFINE_ERROR(EnumerationLimit, kDomain);
PSDB_DEFINE_ERROR(SizeLimit, kDomain);
PSDB_DEFINE_ERROR(PreconditionError, kDomain);
PSDB_DEFINE_ERROR(ParseError, kDomain);
PSDB_DEFINE_ERROR(NumericalFailure, kNumerical);
PSDB_DEFINE_ERROR(OracleFailure, kNumerical);

#undef PSDB_DEFINE_ERROR

}  // namespace psdb
