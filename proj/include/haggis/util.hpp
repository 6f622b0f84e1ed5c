#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace haggis {

// Error with a stable category used for exit-code mapping in the CLI.
class Error : public std::runtime_error {
 public:
  enum class Kind { Usage, Io, Schema, State };

  Error(Kind kind, std::string msg) : std::runtime_error(std::move(msg)), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline Error usage_error(std::string msg) { return Error(Error::Kind::Usage, std::move(msg)); }
inline Error io_error(std::string msg) { return Error(Error::Kind::Io, std::move(msg)); }
inline Error schema_error(std::string msg) { return Error(Error::Kind::Schema, std::move(msg)); }
inline Error state_error(std::string msg) { return Error(Error::Kind::State, std::move(msg)); }

// log(exp(a) + exp(b)) without overflow; tolerates -inf.
inline double log_add(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace haggis
