#include "rost/stream_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string_view>

namespace rost {
namespace {

constexpr std::string_view kHeaderPrefix = "rost-stream v1 V=";

// Only ASCII digits with an optional leading '-'; from_chars is locale-free.
bool parse_int(std::string_view text, std::int64_t& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(' ', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("error while writing '" + path.string() + "'");
}

void write_records(std::ostream& out, std::size_t header_v, const Stream& stream,
                   const std::vector<std::vector<TopicId>>* labels) {
  out << kHeaderPrefix << header_v << '\n';
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const auto& obs = stream[i];
    for (std::size_t j = 0; j < obs.words.size(); ++j) {
      const auto& w = obs.words[j];
      const auto value = labels ? static_cast<std::uint64_t>((*labels)[i][j]) : w.word;
      out << obs.t << ' ' << w.pos.x << ' ' << w.pos.y << ' ' << value << '\n';
    }
  }
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

StreamData parse_stream(std::istream& in) {
  StreamData data;
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw StreamFormatError(1, "missing header");
  {
    std::int64_t v = 0;
    const std::string_view header(line);
    if (!header.starts_with(kHeaderPrefix) || !parse_int(header.substr(kHeaderPrefix.size()), v) ||
        v <= 0) {
      throw StreamFormatError(1, "expected header 'rost-stream v1 V=<positive int>'");
    }
    data.vocab_size = static_cast<std::size_t>(v);
  }

  struct Record {
    std::int64_t t;
    ObservedWord word;
  };
  std::vector<Record> records;
  std::int64_t last_t = -1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_spaces(line);
    if (fields.size() != 4) {
      throw StreamFormatError(line_no, "expected 4 fields, found " + std::to_string(fields.size()));
    }
    std::int64_t values[4];
    for (std::size_t i = 0; i < 4; ++i) {
      if (!parse_int(fields[i], values[i])) {
        throw StreamFormatError(line_no, "field " + std::to_string(i + 1) + " is not an integer");
      }
    }
    const auto [t, x, y, word] = values;
    if (t < 0) throw StreamFormatError(line_no, "negative timestep");
    if (t < last_t) {
      throw StreamFormatError(line_no, "timestep " + std::to_string(t) + " follows " +
                                           std::to_string(last_t));
    }
    if (word < 0 || static_cast<std::uint64_t>(word) >= data.vocab_size) {
      throw StreamFormatError(line_no, "word " + std::to_string(word) +
                                           " outside vocabulary of size " +
                                           std::to_string(data.vocab_size));
    }
    last_t = t;
    records.push_back({t, ObservedWord{static_cast<WordId>(word), Position{x, y, t}}});
  }

  std::int64_t prev_raw = -1;
  for (const auto& rec : records) {
    if (rec.t != prev_raw) {
      if (prev_raw >= 0 && rec.t != prev_raw + 1) {
        data.warnings.push_back("timestep gap: t=" + std::to_string(rec.t) + " follows t=" +
                                std::to_string(prev_raw) + ", remapped to " +
                                std::to_string(data.observations.size()));
      }
      Observation obs;
      obs.t = static_cast<Timestep>(data.observations.size());
      data.observations.push_back(std::move(obs));
      prev_raw = rec.t;
    }
    auto& obs = data.observations.back();
    ObservedWord w = rec.word;
    w.pos.t = obs.t;
    obs.words.push_back(w);
  }
  return data;
}

StreamData read_stream(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return parse_stream(in);
}

void write_stream(std::ostream& out, std::size_t vocab_size, const Stream& stream) {
  write_records(out, vocab_size, stream, nullptr);
}

void write_stream(const std::filesystem::path& path, std::size_t vocab_size, const Stream& stream) {
  auto out = open_output(path);
  write_stream(out, vocab_size, stream);
  finish(out, path);
}

void write_labels(const std::filesystem::path& path, std::size_t topics, const Stream& stream,
                  const std::vector<std::vector<TopicId>>& labels) {
  if (labels.size() != stream.size()) throw std::invalid_argument("labels do not match stream");
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (labels[i].size() != stream[i].words.size()) {
      throw std::invalid_argument("labels do not match stream at t=" + std::to_string(i));
    }
  }
  auto out = open_output(path);
  write_records(out, topics, stream, &labels);
  finish(out, path);
}

void write_report(std::ostream& out, const RunReport& report) {
  out << "t,n_words,instant_ppx,r_t\n";
  for (const auto& rec : report.timesteps) {
    out << rec.t << ',' << rec.n_words << ','
        << (rec.instant_ppx ? format_number(*rec.instant_ppx) : std::string{}) << ',' << rec.r_t
        << '\n';
  }
}

void write_report(const std::filesystem::path& path, const RunReport& report) {
  auto out = open_output(path);
  write_report(out, report);
  finish(out, path);
}

void write_report(std::ostream& out, const ComparisonTable& table) {
  out << "scheduler,T_R_or_R,mean_instant_ppx,mean_final_ppx,instant_ratio,final_ratio\n";
  for (const auto& row : table.rows) {
    out << row.scheduler << ',' << format_number(row.budget) << ','
        << format_number(row.mean_instant_ppx) << ',' << format_number(row.mean_final_ppx) << ','
        << format_number(row.instant_ratio) << ',' << format_number(row.final_ratio) << '\n';
  }
}

void write_report(const std::filesystem::path& path, const ComparisonTable& table) {
  auto out = open_output(path);
  write_report(out, table);
  finish(out, path);
}

void write_ratios(std::ostream& out, const ComparisonTable& table) {
  out << "scheduler,t,instant_ratio,final_ratio\n";
  for (const auto& series : table.per_timestep) {
    for (const auto& pt : series.points) {
      out << series.scheduler << ',' << pt.t << ',' << format_number(pt.instant_ratio) << ','
          << format_number(pt.final_ratio) << '\n';
    }
  }
}

void write_ratios(const std::filesystem::path& path, const ComparisonTable& table) {
  auto out = open_output(path);
  write_ratios(out, table);
  finish(out, path);
}

}  // namespace rost
