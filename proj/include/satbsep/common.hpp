// Copyright 2026 SATB Separation Project Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SATBSEP_COMMON_HPP_
#define SATBSEP_COMMON_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace satbsep {

// Error taxonomy shared by all modules. The CLI maps these onto its
// stable exit codes (io -> 2, missing prerequisite -> 3, schema -> 4).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ValueError : public Error {
 public:
  explicit ValueError(const std::string& msg) : Error(msg) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

class MissingPrereqError : public Error {
 public:
  explicit MissingPrereqError(const std::string& msg) : Error(msg) {}
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& msg) : Error(msg) {}
};

// splitmix64: stateless hash used to derive independent RNG streams and
// per-element Bernoulli draws (dropout) that do not depend on thread count.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

// Uniform double in [0,1) from a 64-bit hash value.
inline double hash_to_unit(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace satbsep

#endif  // SATBSEP_COMMON_HPP_
