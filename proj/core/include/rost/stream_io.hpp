#pragma once

// Text formats.
//
// Stream file:
//   rost-stream v1 V=<int>
//   <t> <x> <y> <word>        (one record per line, single spaces, t non-decreasing)
//
// Label sidecar: the same layout with V=<K> and the word column holding the
// ground-truth topic.
//
// CSV reports (header row, '\n' line endings):
//   run:        t,n_words,instant_ppx,r_t
//   comparison: scheduler,T_R_or_R,mean_instant_ppx,mean_final_ppx,instant_ratio,final_ratio
//   ratios:     scheduler,t,instant_ratio,final_ratio

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rost/eval.hpp"
#include "rost/pipeline.hpp"
#include "rost/types.hpp"

namespace rost {

class StreamFormatError : public std::runtime_error {
 public:
  StreamFormatError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct StreamData {
  std::size_t vocab_size = 0;
  Stream observations;                // consecutive t from 0
  std::vector<std::string> warnings;  // e.g. remapped timestep gaps
};

/// Parses a stream file. The smallest t becomes 0 and gaps are closed up with
/// a warning. Throws StreamFormatError (with the 1-based line) on bad input.
StreamData parse_stream(std::istream& in);
StreamData read_stream(const std::filesystem::path& path);

void write_stream(std::ostream& out, std::size_t vocab_size, const Stream& stream);
void write_stream(const std::filesystem::path& path, std::size_t vocab_size, const Stream& stream);

/// Label sidecar for `stream`; labels[t][i] belongs to stream[t].words[i].
void write_labels(const std::filesystem::path& path, std::size_t topics, const Stream& stream,
                  const std::vector<std::vector<TopicId>>& labels);

void write_report(std::ostream& out, const RunReport& report);
void write_report(const std::filesystem::path& path, const RunReport& report);
void write_report(std::ostream& out, const ComparisonTable& table);
void write_report(const std::filesystem::path& path, const ComparisonTable& table);
void write_ratios(std::ostream& out, const ComparisonTable& table);
void write_ratios(const std::filesystem::path& path, const ComparisonTable& table);

/// Shortest round-tripping, locale-independent decimal form of a double.
std::string format_number(double value);

}  // namespace rost
