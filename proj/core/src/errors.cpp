#include "selpol/errors.hpp"

namespace selpol {

std::string_view category_name(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::validation:
      return "validation";
    case ErrorCategory::computation:
      return "computation";
    case ErrorCategory::io:
      return "io";
  }
  return "unknown";
}

}  // namespace selpol
