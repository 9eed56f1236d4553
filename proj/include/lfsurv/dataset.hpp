#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "lfsurv/censored_sample.hpp"

namespace lfsurv {

/// Name of the embedded leukemia-free survival data (46 autologous marrow
/// transplant patients, times in years).
inline constexpr std::string_view kKersey1987 = "kersey1987";

CensoredSample kersey1987();

/// CSV with header `time,status`; status 1 = event, 0 = censored. Blank lines
/// are skipped. Throws ParseError naming the offending line.
CensoredSample read_dataset(std::istream& in);
void write_dataset(std::ostream& out, const CensoredSample& data);

/// The embedded dataset by name, otherwise a CSV file path.
CensoredSample load_dataset(const std::string& source);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double x);

}  // namespace lfsurv
