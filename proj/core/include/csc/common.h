// core/include/csc/common.h

// Copyright 2026  css-curate authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef CSC_COMMON_H_
#define CSC_COMMON_H_

#include <atomic>
#include <cstdint>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace csc {

using int32 = std::int32_t;
using int64 = std::int64_t;

// Malformed or contradictory input data.  The CLI maps this to exit status 1;
// messages carry the offending file/line or symbol where known.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename... Args>
std::string StrCat(Args&&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without leaving the log domain.
double LogSumExp(double a, double b);
double LogSumExp(const std::vector<double>& xs);

// Log verbosity, from the CSS_CURATE_LOG environment variable (default 0:
// warnings only; 1 adds info; 2 adds debug).  All log output goes to stderr.
int VerboseLevel();
void LogWarn(const std::string& msg);
void LogInfo(const std::string& msg);
void LogDebug(const std::string& msg);

std::vector<std::string> SplitWhitespace(std::string_view s);
std::vector<std::string> SplitChar(std::string_view s, char sep);
std::string JoinStrings(const std::vector<std::string>& parts,
                        std::string_view sep);

// Parses the whole token or throws DataError mentioning `what`.
double ParseDouble(std::string_view token, std::string_view what);
int64 ParseInt(std::string_view token, std::string_view what);

// Fixed-point with at most `max_decimals` fractional digits, trailing zeros
// trimmed.  Used for the text lattice format.
std::string FormatFixedTrim(double value, int max_decimals);
// Shortest representation that round-trips the double exactly.  Used for
// probabilities and log-likelihoods that feed later pipeline stages.
std::string FormatExact(double value);

// Splits UTF-8 text into codepoint strings; invalid bytes pass through as
// single-byte units.
std::vector<std::string> Utf8Codepoints(std::string_view s);
std::string AsciiLower(std::string_view s);

// Applies fn to every index in [0, n) on `jobs` threads and returns the
// results in input order.  fn must be pure; the first exception thrown by
// any worker is rethrown on the caller thread.
template <typename Fn>
auto ParallelMap(std::size_t n, int jobs, Fn fn)
    -> std::vector<decltype(fn(std::size_t{0}))> {
  using Out = decltype(fn(std::size_t{0}));
  std::vector<Out> results(n);
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) results[i] = fn(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto worker = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      try {
        results[i] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  int nthreads = std::min<std::size_t>(jobs, n);
  threads.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

}  // namespace csc

#endif  // CSC_COMMON_H_
