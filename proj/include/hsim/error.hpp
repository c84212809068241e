#pragma once

#include <stdexcept>
#include <string>

namespace hsim {

enum class ErrorKind {
  Usage,
  Io,
  Parse,
  Topology,
  EmptyMesh,
  Disconnected,
  Size,
  SingularShift,
  RankCollapse,
  NoConvergence,
};

const char* to_string(ErrorKind kind);

// Process exit code for a failure of this kind: 1 usage, 2 input/output,
// 3 numerical failure.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const { return kind_; }
  // Message without the kind prefix.
  const std::string& detail() const { return detail_; }

private:
  ErrorKind kind_;
  std::string detail_;
};

} // namespace hsim
