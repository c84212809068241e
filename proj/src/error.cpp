#include "hsim/error.hpp"

namespace hsim {

const char* to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::Usage: return "usage";
  case ErrorKind::Io: return "io";
  case ErrorKind::Parse: return "parse";
  case ErrorKind::Topology: return "topology";
  case ErrorKind::EmptyMesh: return "empty-mesh";
  case ErrorKind::Disconnected: return "disconnected";
  case ErrorKind::Size: return "size";
  case ErrorKind::SingularShift: return "singular-shift";
  case ErrorKind::RankCollapse: return "rank-collapse";
  case ErrorKind::NoConvergence: return "no-convergence";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::Usage:
  case ErrorKind::Size:
    return 1;
  case ErrorKind::Io:
  case ErrorKind::Parse:
  case ErrorKind::Topology:
  case ErrorKind::EmptyMesh:
  case ErrorKind::Disconnected:
    return 2;
  case ErrorKind::SingularShift:
  case ErrorKind::RankCollapse:
  case ErrorKind::NoConvergence:
    return 3;
  }
  return 3;
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + " error: " + message), kind_(kind), detail_(message) {}

} // namespace hsim
