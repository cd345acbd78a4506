#pragma once

#include <stdexcept>
#include <string>

namespace cqtom {

struct TruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IndexError : std::out_of_range {
  using std::out_of_range::out_of_range;
};
struct DegenerateState : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ImpossibleOutcome : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct OutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonpositiveNu : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptySample : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonpositiveInstrumentVariance : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GridTooNarrow : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cqtom
