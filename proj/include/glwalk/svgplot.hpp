#pragma once

#include <filesystem>
#include <string>

namespace glwalk {

// Render a report CSV as a standalone SVG. Rate-style kinds (be_curve,
// depcoef, rate_fit) use log-log axes with theory reference lines; gap plots
// are linear in n. Throws SchemaMismatchError when the CSV kind does not
// match.
void plot(const std::filesystem::path& report_csv, const std::string& kind,
          const std::filesystem::path& out_svg);

} // namespace glwalk
