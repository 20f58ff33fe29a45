#pragma once

#include <stdexcept>
#include <string>

namespace fogsim {

// Input is not a result CSV this artifact wrote (wrong columns, short rows).
// Messages name the offending 1-based line.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Renders a result CSV as aligned per-experiment text tables. Metadata
// comment lines become a caption; a header-only file yields a "no rows"
// notice. Throws FormatError on anything this artifact could not have
// produced.
std::string render_report(const std::string& csv_text);

}  // namespace fogsim
