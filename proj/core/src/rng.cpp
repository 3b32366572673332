#include "l2g/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "l2g/error.hpp"

namespace l2g {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "Rng::index with n = 0");
  const std::uint64_t bound = n;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return static_cast<std::size_t>(x % bound);
}

double Rng::normal() {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Rng Rng::derive(std::uint64_t stream) const {
  return Rng(mix_seed(seed_ ^ mix_seed(stream + 0x9e3779b97f4a7c15ULL)));
}

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidPair: return "invalid-pair";
    case ErrorCode::kInvalidConfig: return "invalid-config";
    case ErrorCode::kSamplerExhausted: return "sampler-exhausted";
    case ErrorCode::kUnknownToken: return "unknown-token";
    case ErrorCode::kNotAnInstruction: return "not-an-instruction";
    case ErrorCode::kAmbiguousInstruction: return "ambiguous-instruction";
    case ErrorCode::kSyntax: return "syntax-error";
    case ErrorCode::kNoChange: return "no-change";
    case ErrorCode::kInapplicableShift: return "inapplicable-shift";
    case ErrorCode::kShapeMismatch: return "shape-mismatch";
    case ErrorCode::kEmptySequence: return "empty-sequence";
    case ErrorCode::kUninitializedState: return "uninitialized-state";
    case ErrorCode::kIo: return "io-error";
    case ErrorCode::kFormatVersionMismatch: return "format-version-mismatch";
    case ErrorCode::kChecksumMismatch: return "checksum-mismatch";
    case ErrorCode::kBadFormat: return "bad-format";
    case ErrorCode::kMissingOracleEntry: return "missing-oracle-entry";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
  }
  return "unknown";
}

}  // namespace l2g
