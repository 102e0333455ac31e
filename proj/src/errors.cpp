#include "rigtk/errors.hpp"

#include <cstdio>

namespace rigtk {

void log_warning(const std::string& message) {
  std::fprintf(stderr, "[rigtk] warning: %s\n", message.c_str());
}

}  // namespace rigtk
