#include "lfsurv/dataset.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "lfsurv/errors.hpp"

namespace lfsurv {

namespace {

struct Row {
  double time;
  bool event;
};

// Leukemia-free survival times (years); event = false marks a censored time.
constexpr std::array<Row, 46> kKerseyRows{{
    {0.0301, true},  {0.0384, true},  {0.0630, true},  {0.0849, true},  {0.0877, true},  {0.0959, true},
    {0.1397, true},  {0.1616, true},  {0.1699, true},  {0.2137, true},  {0.2137, true},  {0.2164, true},
    {0.2384, true},  {0.2712, true},  {0.2740, true},  {0.3863, true},  {0.4384, true},  {0.4548, true},
    {0.5918, true},  {0.6000, true},  {0.6438, true},  {0.6849, true},  {0.7397, true},  {0.8575, true},
    {0.9096, true},  {0.9644, true},  {1.0082, true},  {1.2822, true},  {1.3452, true},  {1.4000, true},
    {1.5260, true},  {1.7205, false}, {1.9890, false}, {2.2438, true},  {2.5068, false}, {2.6466, false},
    {3.0384, true},  {3.1726, false}, {3.4411, true},  {4.4219, false}, {4.4356, false}, {4.5863, false},
    {4.6904, false}, {4.7808, false}, {4.9863, false}, {5.0000, false},
}};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view field, std::size_t line) {
  double v = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end || field.empty())
    throw ParseError(line, "invalid time '" + std::string(field) + "'");
  return v;
}

}  // namespace

CensoredSample kersey1987() {
  std::vector<Observation> obs;
  obs.reserve(kKerseyRows.size());
  for (const auto& row : kKerseyRows) obs.push_back({row.time, row.event});
  return CensoredSample(std::move(obs));
}

CensoredSample read_dataset(std::istream& in) {
  std::string raw;
  std::size_t line = 0;
  bool have_header = false;
  std::vector<Observation> obs;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view text = trim(raw);
    if (text.empty()) continue;
    if (!have_header) {
      if (text != "time,status") throw ParseError(line, "expected header 'time,status', got '" + std::string(text) + "'");
      have_header = true;
      continue;
    }
    const auto comma = text.find(',');
    if (comma == std::string_view::npos || text.find(',', comma + 1) != std::string_view::npos)
      throw ParseError(line, "expected two fields in row '" + std::string(text) + "'");
    const double t = parse_double(trim(text.substr(0, comma)), line);
    if (!(t > 0.0) || !std::isfinite(t)) throw ParseError(line, "time must be positive in row '" + std::string(text) + "'");
    const std::string_view status = trim(text.substr(comma + 1));
    if (status != "0" && status != "1")
      throw ParseError(line, "status must be 0 or 1 in row '" + std::string(text) + "'");
    obs.push_back({t, status == "1"});
  }
  if (!have_header) throw ParseError(0, "missing header 'time,status'");
  return CensoredSample(std::move(obs));
}

void write_dataset(std::ostream& out, const CensoredSample& data) {
  out << "time,status\n";
  for (const auto& obs : data.observations()) out << format_number(obs.time) << ',' << (obs.event ? 1 : 0) << '\n';
}

CensoredSample load_dataset(const std::string& source) {
  if (source == kKersey1987) return kersey1987();
  std::ifstream in(source);
  if (!in) throw ParseError(0, "cannot open dataset '" + source + "'");
  return read_dataset(in);
}

std::string format_number(double x) {
  if (std::isnan(x)) return "NA";
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

}  // namespace lfsurv
