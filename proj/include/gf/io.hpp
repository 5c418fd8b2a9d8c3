#ifndef GF_IO_HPP
#define GF_IO_HPP

#include <string>

namespace gf::io {

/// %.17g formatting: round-trippable doubles, '.' decimal point, no locale.
std::string fmt(double v);

/// UTC timestamp for output headers (suppressible via --no-timestamp).
std::string timestamp_utc();

void write_file(const std::string& path, const std::string& content);

}  // namespace gf::io

#endif
