#ifndef RSCCA_ERROR_H_
#define RSCCA_ERROR_H_

#include <stdexcept>
#include <string>

namespace rscca {

// Malformed or inconsistent input: bad dimensions, invalid parameters,
// unreadable files. The CLI maps it to exit code 2.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// Estimation failed on valid input (singular blocks, no usable projection).
// The CLI maps it to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rscca

#endif  // RSCCA_ERROR_H_
