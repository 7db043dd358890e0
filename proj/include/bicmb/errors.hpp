#pragma once

#include <stdexcept>
#include <string>

namespace bicmb {

// Bad arguments or mismatched shapes.
class parameter_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical factorization failed to meet its accuracy contract.
class decomposition_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rank-deficient input where full column rank is required.
class rank_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A quantization region has no training items.
class empty_region_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training cannot make progress (e.g. every region emptied).
class degenerate_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable or malformed data files.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bicmb
